"""Bridge between the embedding toolkit and a text-to-image pipeline.

Speaks to the toolkit only through files: NPY embedding matrices, partition
JSON, and manifests.  Ships a deterministic reference encoder/pipeline pair
so the interchange contracts are testable without any ML stack; the real
backends are probed lazily and report honestly when they cannot run.
"""

from .encoder import ReferenceEncoder, load_real_encoder
from .errors import (
    BridgeError,
    BridgeValidationError,
    EncoderUnavailable,
    ManifestError,
    PipelineError,
    ShapeMismatch,
    SpanNotFound,
)
from .export import ExportManifest, export_embeddings, load_manifest
from .inject import generate_from_prompt, inject_embeddings
from .pipeline import ReferencePipeline, load_real_pipeline
from .tokenizer import Token, find_token_span, tokenize

__version__ = "0.1.0"

__all__ = [
    "BridgeError",
    "BridgeValidationError",
    "EncoderUnavailable",
    "ExportManifest",
    "ManifestError",
    "PipelineError",
    "ReferenceEncoder",
    "ReferencePipeline",
    "ShapeMismatch",
    "SpanNotFound",
    "Token",
    "export_embeddings",
    "find_token_span",
    "generate_from_prompt",
    "inject_embeddings",
    "load_manifest",
    "load_real_encoder",
    "load_real_pipeline",
    "tokenize",
    "__version__",
]
