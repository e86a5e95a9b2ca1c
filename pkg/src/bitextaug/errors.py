"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: input/validation problems exit 1,
external translator failures exit 3, everything else that breaks a
pipeline stage exits 2.
"""


class ToolError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToolError):
    """Bad input data or configuration (malformed files, bad parameters)."""


class CorpusFormatError(ValidationError):
    """A parallel corpus file violates the line-aligned plain-text contract."""


class PipelineError(ToolError):
    """A pipeline stage failed for a non-validation reason."""


class AugmentationError(PipelineError):
    """Concatenation augmentation could not satisfy its contract."""


class TranslatorError(PipelineError):
    """An external translator subprocess failed or broke its file contract."""
