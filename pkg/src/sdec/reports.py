"""JSON schemas spoken by the command-line tools.

Two documents cross the process boundary: a prompt partition (which token
rows are identity, which are scene) and a run report (everything a command
did, with digests of the files it touched).  Reports serialize with sorted
keys so equal runs produce byte-identical documents apart from timings.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .decontext import OptimizerConfig
from .errors import IoError, SliceOverlap, ValidationError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PromptPartition:
    """Half-open row ranges marking identity and scene tokens.

    ``sc_rows`` may be ``None``: the embedding then has no scene block and
    consumers fall back to using the identity block as its own scene.  Rows
    outside both ranges (padding, separators) are left untouched by every
    command.
    """

    id_rows: tuple[int, int]
    sc_rows: Optional[tuple[int, int]]
    total_rows: int

    def __post_init__(self):
        n = self.total_rows
        if n < 1:
            raise ValidationError(f"total_rows must be >= 1, got {n}")
        lo, hi = self.id_rows
        if not 0 <= lo < hi <= n:
            raise ValidationError(f"id_rows {self.id_rows} must be nonempty within [0, {n})")
        if self.sc_rows is not None:
            slo, shi = self.sc_rows
            if not 0 <= slo < shi <= n:
                raise ValidationError(
                    f"sc_rows {self.sc_rows} must be nonempty within [0, {n})"
                )
            if max(lo, slo) < min(hi, shi):
                raise SliceOverlap(f"id_rows {self.id_rows} and sc_rows {self.sc_rows} overlap")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id_rows": list(self.id_rows),
            "sc_rows": list(self.sc_rows) if self.sc_rows is not None else None,
            "total_rows": self.total_rows,
        }

    @classmethod
    def from_dict(cls, doc) -> "PromptPartition":
        if not isinstance(doc, dict):
            raise ValidationError("partition document must be a JSON object")
        allowed = {"schema_version", "id_rows", "sc_rows", "total_rows"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValidationError(f"partition has unknown fields: {sorted(unknown)}")
        if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValidationError(f"unsupported partition schema_version {doc['schema_version']}")
        try:
            id_rows = tuple(int(x) for x in doc["id_rows"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"partition id_rows is malformed: {exc}") from exc
        sc = doc.get("sc_rows")
        sc_rows = None
        if sc is not None:
            try:
                sc_rows = tuple(int(x) for x in sc)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"partition sc_rows is malformed: {exc}") from exc
            if len(sc_rows) != 2:
                raise ValidationError(f"sc_rows must have two entries, got {sc}")
        if len(id_rows) != 2:
            raise ValidationError(f"id_rows must have two entries, got {doc['id_rows']}")
        try:
            total = int(doc["total_rows"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"partition total_rows is malformed: {exc}") from exc
        return cls(id_rows=id_rows, sc_rows=sc_rows, total_rows=total)


def load_partition(path) -> PromptPartition:
    return PromptPartition.from_dict(_read_json(path))


@dataclass(frozen=True)
class RunReport:
    """Everything one command run produced, minus the array payloads."""

    command: str
    seed: Optional[int]
    config: dict
    timings: dict
    payload: dict
    inputs: dict
    outputs: dict
    tool: str = "sdec"
    tool_version: str = "0.1.0"
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        doc = json.loads(text)
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - fields
        if unknown:
            raise ValidationError(f"report has unknown fields: {sorted(unknown)}")
        missing = fields - set(doc)
        if missing:
            raise ValidationError(f"report is missing fields: {sorted(missing)}")
        return cls(**doc)

    def write(self, path) -> None:
        try:
            Path(path).write_text(self.to_json())
        except OSError as exc:
            raise IoError(f"cannot write report {path}: {exc}") from exc


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(OptimizerConfig)}


def load_optimizer_config(path=None) -> OptimizerConfig:
    """Optimizer settings from a JSON file; every field optional."""
    if path is None:
        return OptimizerConfig()
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ValidationError("config document must be a JSON object")
    doc = dict(doc)
    version = doc.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported config schema_version {version}")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise ValidationError(f"config has unknown fields: {sorted(unknown)}")
    try:
        return OptimizerConfig(**doc)
    except TypeError as exc:
        raise ValidationError(f"config is malformed: {exc}") from exc


def config_echo(cfg: OptimizerConfig) -> dict:
    return dataclasses.asdict(cfg)


def file_digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise IoError(f"cannot digest {path}: {exc}") from exc


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
