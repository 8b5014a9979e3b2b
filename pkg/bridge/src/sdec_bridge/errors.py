"""Error taxonomy for the bridge, mirroring the toolkit's exit-code tiers."""


class BridgeError(Exception):
    """Base class; maps to exit code 1 unless a subclass says otherwise."""


class BridgeValidationError(BridgeError):
    """Rejected input (bad files, bad flags, bad spans); exit code 2."""


class SpanNotFound(BridgeValidationError):
    """The identity fragment does not occur in the prompt on token boundaries."""


class ShapeMismatch(BridgeValidationError):
    """A refined embedding file disagrees with the manifest's recorded shape."""


class EmptyPrompt(BridgeValidationError):
    """The prompt tokenizes to nothing."""


class ManifestError(BridgeValidationError):
    """A manifest file is missing, malformed, or self-inconsistent."""


class EncoderUnavailable(BridgeError):
    """The requested real encoder/pipeline stack cannot be loaded here."""


class PipelineError(BridgeError):
    """Image generation or file emission failed."""
