"""Binary model checkpoints with bit-exact round trips.

Layout: an 8-byte magic, an 8-byte little-endian header length, a JSON
header (architecture, frozen normalization scale, array manifest,
optional metadata), then the raw little-endian float64 bytes of every
parameter array in declared order.  The format is deliberately dumb: no
compression, no timestamps, nothing that could differ between two runs
that produced the same parameters.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .io import atomic_write_bytes
from .model import NomaAutoencoder, SystemDims

MAGIC = b"NOMAAE01"


def checkpoint_bytes(model: NomaAutoencoder, meta: dict | None = None) -> bytes:
    params = model.parameters()
    names = model.parameter_names()
    header = {
        "arrays": [
            {"name": name, "shape": list(p.shape)}
            for name, p in zip(names, params)
        ],
        "hidden_layers": model.hidden_layers,
        "k": list(model.dims.k),
        "meta": meta or {},
        "n": model.dims.n,
        "normalization_scale": model.normalization_scale,
        "sicnet": model.sic_chaining,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<Q", len(blob)), blob]
    for p in params:
        parts.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return b"".join(parts)


def save_checkpoint(model: NomaAutoencoder, path: str, meta: dict | None = None) -> None:
    atomic_write_bytes(path, checkpoint_bytes(model, meta))


def read_checkpoint(path: str):
    """Load (model, meta) from a checkpoint file.

    The model is rebuilt from the recorded architecture; every array is
    checked against the expected name and shape before being installed.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 8 or data[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file (bad magic)")
    (hlen,) = struct.unpack_from("<Q", data, len(MAGIC))
    hstart = len(MAGIC) + 8
    if hstart + hlen > len(data):
        raise ValueError(f"{path}: truncated checkpoint header")
    header = json.loads(data[hstart:hstart + hlen].decode("utf-8"))

    dims = SystemDims(k=tuple(header["k"]), n=int(header["n"]))
    model = NomaAutoencoder.build(
        dims,
        np.random.default_rng(0),
        sic_chaining=bool(header["sicnet"]),
        hidden_layers=int(header["hidden_layers"]),
    )
    scale = header["normalization_scale"]
    model.normalization_scale = None if scale is None else float(scale)

    params = model.parameters()
    names = model.parameter_names()
    entries = header["arrays"]
    if len(entries) != len(params):
        raise ValueError(f"{path}: checkpoint has {len(entries)} arrays, "
                         f"model needs {len(params)}")
    offset = hstart + hlen
    for entry, name, p in zip(entries, names, params):
        if entry["name"] != name or tuple(entry["shape"]) != p.shape:
            raise ValueError(
                f"{path}: array {entry['name']!r} {entry['shape']} does not "
                f"match expected {name!r} {list(p.shape)}"
            )
        nbytes = p.size * 8
        if offset + nbytes > len(data):
            raise ValueError(f"{path}: truncated checkpoint payload")
        p[...] = np.frombuffer(
            data[offset:offset + nbytes], dtype="<f8"
        ).reshape(p.shape)
        offset += nbytes
    if offset != len(data):
        raise ValueError(f"{path}: {len(data) - offset} trailing bytes")
    return model, dict(header["meta"])


def load_checkpoint(path: str) -> NomaAutoencoder:
    return read_checkpoint(path)[0]
