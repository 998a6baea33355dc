"""Exception hierarchy shared across the package.

Every domain error raised by the library derives from :class:`EngineIdError`,
so callers (and the CLI) can distinguish expected failures from bugs.
"""


class EngineIdError(Exception):
    """Base class for all expected, domain-level errors."""


class AudioFormatError(EngineIdError):
    """Malformed or unparseable audio container."""


class UnsupportedCodecError(EngineIdError):
    """Recognized container but unsupported sample encoding."""


class EmptyAudioError(EngineIdError):
    """Audio file contains no samples."""


class ManifestError(EngineIdError):
    """Recording manifest is malformed or contains invalid values."""


class FilterbankError(EngineIdError):
    """Degenerate filterbank construction (e.g. collapsed band)."""


class LogFreqRangeError(EngineIdError):
    """Log-frequency spectrogram bins exceed Nyquist coverage."""


class RecordingTooShortError(EngineIdError):
    """Recording is shorter than one segmentation window."""


class FeatureComputationError(EngineIdError):
    """A feature failed on a segment; carries the feature name."""

    def __init__(self, feature, message):
        super().__init__(f"feature '{feature}': {message}")
        self.feature = feature


class EmptyVariantError(EngineIdError):
    """Dataset variant filter matched no rows."""


class DimensionError(EngineIdError):
    """Feature vector does not match the expected layout."""


class SplitError(EngineIdError):
    """Evaluation split cannot be constructed."""


class StratificationError(SplitError):
    """A class is too small for the requested stratified folds."""


class ConfigError(EngineIdError):
    """Invalid model specification or hyperparameter value."""


class TrainingError(EngineIdError):
    """Training failed (empty data, degenerate setup, ...)."""


class DivergenceError(TrainingError):
    """Loss became non-finite during training; carries the epoch."""

    def __init__(self, epoch, message="non-finite loss"):
        super().__init__(f"{message} at epoch {epoch}")
        self.epoch = epoch


class LayoutError(EngineIdError):
    """Vector layout incompatible with a trained model."""


class ModelFormatError(EngineIdError):
    """Model file is malformed or has an incompatible version."""


class SearchError(EngineIdError):
    """Hyperparameter search could not produce a result."""


class CrossValidationError(EngineIdError):
    """Training failed inside cross-validation; carries the fold."""

    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold


class EvaluationSplitError(EngineIdError):
    """Training failed inside leave-one-out; carries the split index."""

    def __init__(self, split, cause):
        super().__init__(f"split {split}: {cause}")
        self.split = split


class MetricsInputError(EngineIdError):
    """Confusion matrix input is not a square nonnegative count matrix."""


class IncompleteGridError(EngineIdError):
    """Report builder received an incomplete results grid."""

    def __init__(self, missing):
        cells = ", ".join(str(m) for m in missing)
        super().__init__(f"missing grid cells: {cells}")
        self.missing = list(missing)
