import sys
from pathlib import Path

# Allow running pytest from a source checkout without installing.
sys.path.insert(0, str(Path(__file__).parent / "src"))
