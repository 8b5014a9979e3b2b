"""Export: prompt text -> embedding matrix + partition + manifest on disk.

The embedding file is NPY (double precision, C order); the partition JSON
uses the toolkit's schema, mapping the identity fragment to a token-row range
via the tokenizer's character offsets.  The manifest ties the pieces together
so injection can validate shapes later without re-encoding anything.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .encoder import ReferenceEncoder
from .errors import ManifestError, PipelineError, SpanNotFound
from .tokenizer import find_token_span

SCHEMA_VERSION = 1

EMBEDDINGS_NAME = "embeddings.npy"
PARTITION_NAME = "partition.json"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class ExportManifest:
    prompt: str
    id_span: str
    scene_span: Optional[str]
    id_rows: tuple[int, int]
    sc_rows: Optional[tuple[int, int]]
    shape: tuple[int, int]
    tokens: tuple[str, ...]
    encoder: str
    encoder_states: str
    embeddings: str = EMBEDDINGS_NAME
    partition: str = PARTITION_NAME

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "prompt": self.prompt,
            "id_span": self.id_span,
            "scene_span": self.scene_span,
            "id_rows": list(self.id_rows),
            "sc_rows": list(self.sc_rows) if self.sc_rows is not None else None,
            "shape": list(self.shape),
            "tokens": list(self.tokens),
            "encoder": self.encoder,
            "encoder_states": self.encoder_states,
            "embeddings": self.embeddings,
            "partition": self.partition,
        }


def load_manifest(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ManifestError(f"manifest {path} must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ManifestError(
            f"manifest {path} has unsupported schema_version {doc.get('schema_version')}"
        )
    for key in ("prompt", "shape", "embeddings", "encoder"):
        if key not in doc:
            raise ManifestError(f"manifest {path} is missing {key!r}")
    return doc


def _scene_rows(prompt: str, id_rows: tuple[int, int],
                scene_span: Optional[str], n: int) -> tuple[Optional[str], Optional[tuple[int, int]]]:
    """Resolve the scene fragment and its token range.

    An explicit fragment is located like the identity one.  Otherwise the
    scene defaults to every token after the identity range, provided that
    region is nonempty.
    """
    if scene_span is not None:
        rows = find_token_span(prompt, scene_span)
        return scene_span, rows
    if id_rows[1] < n:
        return None, (id_rows[1], n)
    return None, None


def export_embeddings(prompt: str, id_span: str, out_dir,
                      scene_span: Optional[str] = None,
                      encoder: Optional[ReferenceEncoder] = None,
                      encoder_states: str = "concat") -> ExportManifest:
    """Encode ``prompt`` and write embeddings + partition + manifest to ``out_dir``."""
    encoder = encoder if encoder is not None else ReferenceEncoder()
    matrix, tokens = encoder.encode(prompt)
    id_rows = find_token_span(prompt, id_span)
    scene_span, sc_rows = _scene_rows(prompt, id_rows, scene_span, len(tokens))
    if sc_rows is not None and not (sc_rows[1] <= id_rows[0] or id_rows[1] <= sc_rows[0]):
        raise SpanNotFound(
            f"identity rows {id_rows} and scene rows {sc_rows} overlap"
        )
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise PipelineError(f"cannot create {out_dir}: {exc}") from exc

    manifest = ExportManifest(
        prompt=prompt,
        id_span=id_span,
        scene_span=scene_span,
        id_rows=id_rows,
        sc_rows=sc_rows,
        shape=matrix.shape,
        tokens=tuple(t.text for t in tokens),
        encoder=encoder.name,
        encoder_states=encoder_states,
    )
    partition = {
        "schema_version": SCHEMA_VERSION,
        "id_rows": list(id_rows),
        "sc_rows": list(sc_rows) if sc_rows is not None else None,
        "total_rows": len(tokens),
    }
    try:
        np.save(out_dir / EMBEDDINGS_NAME, np.asarray(matrix, dtype=np.float64))
        (out_dir / PARTITION_NAME).write_text(json.dumps(partition, sort_keys=True, indent=2) + "\n")
        (out_dir / MANIFEST_NAME).write_text(
            json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n"
        )
    except OSError as exc:
        raise PipelineError(f"cannot write export files to {out_dir}: {exc}") from exc
    return manifest
