"""Image generation backends.

The default :class:`ReferencePipeline` is a deterministic stand-in for a
diffusion pipeline: the image is a pure function of (embedding bytes,
generation seed, size), emitted as binary PPM.  Identical embeddings and seed
therefore give byte-identical image files — the property the injection
contract is specified and tested against.  ``load_real_pipeline`` probes for
a real diffusion stack.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import EncoderUnavailable, PipelineError


class ReferencePipeline:
    """Deterministic, weight-free embedding-to-image function."""

    name = "reference-v1"

    def __init__(self, width: int = 48, height: int = 48):
        if width < 1 or height < 1:
            raise ValueError(f"image size must be positive, got {width}x{height}")
        self.width = int(width)
        self.height = int(height)

    def render_bytes(self, embedding: np.ndarray, seed: int) -> bytes:
        emb = np.ascontiguousarray(np.asarray(embedding, dtype=np.float64))
        material = (
            emb.tobytes()
            + int(seed).to_bytes(8, "little", signed=True)
            + self.width.to_bytes(4, "little")
            + self.height.to_bytes(4, "little")
        )
        digest = hashlib.sha256(material).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        pixels = rng.integers(0, 256, size=(self.height, self.width, 3), dtype=np.uint8)
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + pixels.tobytes()

    def generate(self, embedding: np.ndarray, seed: int, out_path) -> Path:
        out_path = Path(out_path)
        try:
            out_path.write_bytes(self.render_bytes(embedding, seed))
        except OSError as exc:
            raise PipelineError(f"cannot write image {out_path}: {exc}") from exc
        return out_path


def load_real_pipeline(model_id: str = "stabilityai/stable-diffusion-xl-base-1.0"):
    """Load a weights-backed diffusion pipeline, or say why it cannot load."""
    try:
        import torch  # noqa: F401
        from diffusers import StableDiffusionXLPipeline
    except ImportError as exc:
        raise EncoderUnavailable(f"diffusion stack not importable: {exc}") from exc
    try:
        return StableDiffusionXLPipeline.from_pretrained(model_id, local_files_only=True)
    except Exception as exc:
        raise EncoderUnavailable(
            f"model weights for {model_id!r} are not available locally: {exc}"
        ) from exc
