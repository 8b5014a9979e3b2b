"""Injection: a (possibly refined) embedding file -> generated image.

The embedding file is validated against the manifest written at export time,
then handed to the pipeline in place of prompt text.  A JSON record with the
generation seed is written next to the image so a run can be reproduced.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .encoder import ReferenceEncoder
from .errors import BridgeValidationError, PipelineError, ShapeMismatch
from .export import SCHEMA_VERSION, load_manifest
from .pipeline import ReferencePipeline


def _load_embedding(path) -> np.ndarray:
    path = Path(path)
    try:
        arr = np.load(path, allow_pickle=False)
    except OSError as exc:
        raise BridgeValidationError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise BridgeValidationError(f"{path} is not a plain array file: {exc}") from exc
    if arr.ndim != 2:
        raise BridgeValidationError(f"{path} must hold a 2-D matrix, got shape {arr.shape}")
    arr = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise BridgeValidationError(f"{path} contains non-finite values")
    return arr


def inject_embeddings(refined_path, manifest_path, out_path, seed: int = 0,
                      pipeline: Optional[ReferencePipeline] = None) -> Path:
    """Generate an image from ``refined_path``, validated against the manifest."""
    manifest = load_manifest(manifest_path)
    matrix = _load_embedding(refined_path)
    expected = tuple(manifest["shape"])
    if matrix.shape != expected:
        raise ShapeMismatch(
            f"{refined_path} has shape {matrix.shape}, manifest recorded {expected}"
        )
    pipeline = pipeline if pipeline is not None else ReferencePipeline()
    out_path = pipeline.generate(matrix, seed, out_path)
    record = {
        "schema_version": SCHEMA_VERSION,
        "seed": int(seed),
        "image": out_path.name,
        "pipeline": pipeline.name,
        "embeddings_sha256": hashlib.sha256(
            np.ascontiguousarray(matrix).tobytes()
        ).hexdigest(),
        "manifest": Path(manifest_path).name,
    }
    try:
        out_path.with_suffix(out_path.suffix + ".json").write_text(
            json.dumps(record, sort_keys=True, indent=2) + "\n"
        )
    except OSError as exc:
        raise PipelineError(f"cannot write generation record: {exc}") from exc
    return out_path


def generate_from_prompt(prompt: str, out_path, seed: int = 0,
                         encoder: Optional[ReferenceEncoder] = None,
                         pipeline: Optional[ReferencePipeline] = None) -> Path:
    """Text-prompt generation: encode and render directly, no files between."""
    encoder = encoder if encoder is not None else ReferenceEncoder()
    pipeline = pipeline if pipeline is not None else ReferencePipeline()
    matrix, _ = encoder.encode(prompt)
    return pipeline.generate(matrix, seed, out_path)
