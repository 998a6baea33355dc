"""Car manufacturer identification from engine sound.

Pipeline: WAV ingestion -> tempo-based segmentation -> 22 audio features ->
[0, 1] normalization -> nine classifier families -> cross-validated
hyperparameter search and leave-one-out evaluation.  A deterministic
synthetic engine corpus makes the whole chain testable end to end.
"""

__version__ = "0.1.0"

from .audio_io import RecordingMeta, Waveform, load_manifest, load_wav
from .errors import EngineIdError
from .features import FeatureExtractor, extract_feature_vector
from .segmentation import Segment, SegmentationPlan, plan_segmentation, segment
from .synth import CorpusSpec, EngineProfile, build_corpus, synth_engine

__all__ = [
    "CorpusSpec",
    "EngineIdError",
    "EngineProfile",
    "FeatureExtractor",
    "RecordingMeta",
    "Segment",
    "SegmentationPlan",
    "Waveform",
    "__version__",
    "build_corpus",
    "extract_feature_vector",
    "load_manifest",
    "load_wav",
    "plan_segmentation",
    "segment",
    "synth_engine",
]
