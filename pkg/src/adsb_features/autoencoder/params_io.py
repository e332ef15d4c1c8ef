"""Binary parameter container.

Layout::

    8 bytes   magic b"ADSBAE\\x00\\x01"
    4 bytes   header length L, little-endian uint32
    L bytes   UTF-8 JSON header: {"format_version", "variant", "hidden_dim",
              "arrays": [{"name", "shape"}, ...]}
    ...       each array in header order, float64 little-endian, row-major
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .dense import DenseParams
from .lstm import LstmParams

MAGIC = b"ADSBAE\x00\x01"
FORMAT_VERSION = 1
_CLASSES = {"dense": DenseParams, "lstm": LstmParams}


def save_params(params, path) -> None:
    arrays = params.arrays()
    header = {
        "format_version": FORMAT_VERSION,
        "variant": params.variant,
        "hidden_dim": int(params.code_dim),
        "arrays": [{"name": n, "shape": list(a.shape)} for n, a in arrays.items()],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for a in arrays.values():
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_params(path):
    """Read a parameter file written by :func:`save_params`.

    Raises:
        FormatError: bad magic, truncated data, trailing bytes, or array
            shapes that do not fit together.
    """
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise FormatError(f"{path}: not a parameter file")
    if len(data) < 12:
        raise FormatError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<I", data[8:12])
    try:
        header = json.loads(data[12:12 + hlen].decode("utf-8"))
        cls = _CLASSES[header["variant"]]
        specs = header["arrays"]
        version = header["format_version"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError):
        raise FormatError(f"{path}: corrupt or truncated header") from None
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    if [s["name"] for s in specs] != list(cls.names):
        raise FormatError(f"{path}: unexpected array list for {header['variant']}")

    offset = 12 + hlen
    arrays = {}
    for spec in specs:
        shape = tuple(spec["shape"])
        nbytes = 8 * int(np.prod(shape))
        if offset + nbytes > len(data):
            raise FormatError(f"{path}: truncated at array {spec['name']}")
        arrays[spec["name"]] = np.frombuffer(data, dtype="<f8", count=nbytes // 8,
                                             offset=offset).reshape(shape).astype(float)
        offset += nbytes
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes")
    params = cls(**arrays)
    if {n: a.shape for n, a in arrays.items()} != params.expected_shapes() \
            or params.code_dim != header["hidden_dim"]:
        raise FormatError(f"{path}: dimension mismatch")
    return params
