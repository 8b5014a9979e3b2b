"""Prompt encoders.

The default :class:`ReferenceEncoder` is a deterministic stand-in for a real
text encoder: each token gets a hash-seeded base vector, a sinusoidal
position code is added, and one softmax mixing pass makes every row depend on
the whole prompt (as a transformer's final hidden states do).  It needs no
model weights and is reproducible bit-for-bit across processes, which is what
the byte-level injection contract is tested against.

``load_real_encoder`` probes for an actual ML stack and reports honestly when
it cannot run here.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import EmptyPrompt, EncoderUnavailable
from .tokenizer import Token, tokenize


class ReferenceEncoder:
    """Deterministic, weight-free prompt encoder."""

    name = "reference-v1"

    def __init__(self, dim: int = 64):
        if dim < 2 or dim % 2:
            raise ValueError(f"dim must be even and >= 2, got {dim}")
        self.dim = int(dim)

    def _token_vector(self, text: str) -> np.ndarray:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "little")
        return np.random.default_rng(seed).standard_normal(self.dim)

    def _position_code(self, n: int) -> np.ndarray:
        pos = np.arange(n, dtype=np.float64)[:, None]
        k = np.arange(self.dim // 2, dtype=np.float64)[None, :]
        angle = pos / (10000.0 ** (2.0 * k / self.dim))
        code = np.empty((n, self.dim))
        code[:, 0::2] = np.sin(angle)
        code[:, 1::2] = np.cos(angle)
        return code

    def encode(self, text: str) -> tuple[np.ndarray, list[Token]]:
        """Prompt -> (token embedding matrix (n, dim) float64, tokens)."""
        tokens = tokenize(text)
        if not tokens:
            raise EmptyPrompt(f"prompt {text!r} has no tokens")
        base = np.stack([self._token_vector(t.text) for t in tokens])
        base = base + self._position_code(len(tokens))
        # one attention-style mixing pass: rows become context-dependent
        logits = (base @ base.T) / np.sqrt(self.dim)
        logits -= logits.max(axis=1, keepdims=True)
        alpha = np.exp(logits)
        alpha /= alpha.sum(axis=1, keepdims=True)
        return 0.5 * base + 0.5 * (alpha @ base), tokens


def load_real_encoder(model_id: str = "openai/clip-vit-large-patch14"):
    """Load a weights-backed text encoder, or say exactly why it cannot load.

    Raises
    ------
    EncoderUnavailable
        When the ML stack is not importable or the model weights are not
        reachable from this environment.
    """
    try:
        import torch  # noqa: F401
        from transformers import AutoTokenizer, CLIPTextModel
    except ImportError as exc:
        raise EncoderUnavailable(f"ML stack not importable: {exc}") from exc
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id, local_files_only=True)
        model = CLIPTextModel.from_pretrained(model_id, local_files_only=True)
    except Exception as exc:
        raise EncoderUnavailable(
            f"model weights for {model_id!r} are not available locally: {exc}"
        ) from exc
    return tokenizer, model
