"""Strict reader/writer for 2-D arrays in NPY format version 1.0.

Only little-endian float32/float64 payloads in C order are accepted; reads
widen to float64 and writes always emit float64.  The writer pads its header
with spaces so the payload starts on a 64-byte boundary, matching the
reference implementation byte for byte, which keeps digests of equal arrays
equal across runs.
"""

from __future__ import annotations

import ast
import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    FortranOrderUnsupported,
    IoError,
    ShapeNotTwoDim,
    TruncatedFile,
    UnsupportedDtype,
)
from .spectral import as_matrix

MAGIC = b"\x93NUMPY"
_VERSION = b"\x01\x00"
_ALIGN = 64
_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}


def load_array(path) -> np.ndarray:
    """Read one 2-D float array, widened to float64.

    Raises
    ------
    BadMagic
        If the file does not parse as NPY version 1.0.
    UnsupportedDtype, FortranOrderUnsupported, ShapeNotTwoDim
        If the header declares anything but a little-endian float
        C-order matrix with at least one row and column.
    TruncatedFile
        If the payload size does not match the declared shape.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 10 or raw[:6] != MAGIC:
        raise BadMagic(f"{path} does not start with the NPY magic string")
    if raw[6:8] != _VERSION:
        raise BadMagic(
            f"{path} declares format version {raw[6]}.{raw[7]}; only 1.0 is supported"
        )
    (header_len,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + header_len
    if len(raw) < header_end:
        raise BadMagic(f"{path} header is shorter than its declared length")
    try:
        header = ast.literal_eval(raw[10:header_end].decode("ascii"))
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise BadMagic(f"{path} header is not a valid literal: {exc}") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise BadMagic(f"{path} header must declare exactly descr/fortran_order/shape")

    descr = header["descr"]
    if descr not in _DTYPES:
        raise UnsupportedDtype(f"{path} holds dtype {descr!r}; only '<f4'/'<f8' are supported")
    if header["fortran_order"] is not False:
        if header["fortran_order"] is True:
            raise FortranOrderUnsupported(f"{path} stores a column-major payload")
        raise BadMagic(f"{path} has a malformed fortran_order field")
    shape = header["shape"]
    if (not isinstance(shape, tuple) or len(shape) != 2
            or not all(isinstance(s, int) for s in shape) or min(shape) < 1):
        raise ShapeNotTwoDim(f"{path} declares shape {shape}; need 2-D with n, d >= 1")

    dtype = _DTYPES[descr]
    expected = shape[0] * shape[1] * dtype.itemsize
    payload = raw[header_end:]
    if len(payload) != expected:
        raise TruncatedFile(
            f"{path} payload is {len(payload)} bytes; shape {shape} needs {expected}"
        )
    data = np.frombuffer(payload, dtype=dtype).reshape(shape)
    return data.astype(np.float64)


def save_array(path, matrix) -> None:
    """Write ``matrix`` as little-endian float64, C order, NPY version 1.0.

    The output is deterministic: saving equal matrices yields identical
    bytes.  Empty or non-2-D input is rejected with ``ShapeNotTwoDim``.
    """
    arr = as_matrix(matrix, "matrix")
    header = "{'descr': '<f8', 'fortran_order': False, 'shape': (%d, %d), }" % arr.shape
    # pad so magic + version + length field + header is a multiple of 64
    pad = _ALIGN - ((len(MAGIC) + len(_VERSION) + 2 + len(header) + 1) % _ALIGN)
    header = header + " " * pad + "\n"
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(_VERSION)
            fh.write(struct.pack("<H", len(header)))
            fh.write(header.encode("ascii"))
            fh.write(arr.astype("<f8").tobytes(order="C"))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
