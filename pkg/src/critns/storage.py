"""Serialization: the CNSF binary snapshot format, JSONL diagnostic records,
canonical JSON, and run-config parsing (INI-style sections with JSON as an
alternative encoding).

CNSF layout: magic "CNSF", version u16, n u32, box period f64, component
count u8, then each component as little-endian f64 physical samples in
x-fastest order. All integers little-endian.
"""

import configparser
import hashlib
import io
import json
from pathlib import Path
import struct

import numpy as np

from ._version import FORMAT_VERSION
from .norms import CONVENTION_VERSION
from .spectral import Grid, SpectralVectorField

_MAGIC = b"CNSF"
_HEADER = struct.Struct("<4sHIdB")


def write_cnsf(path, field: SpectralVectorField):
    """Write a vector field snapshot."""
    samples = field.samples()
    buf = io.BytesIO()
    buf.write(_HEADER.pack(_MAGIC, FORMAT_VERSION, field.grid.n,
                           field.grid.l, samples.shape[0]))
    for comp in samples:
        # component array is indexed [x, y, z]; file wants x varying fastest
        buf.write(np.ascontiguousarray(comp.transpose(2, 1, 0),
                                       dtype="<f8").tobytes())
    Path(path).write_bytes(buf.getvalue())


def read_cnsf(path) -> SpectralVectorField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated CNSF header")
    magic, version, n, l, ncomp = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: format version {version} != {FORMAT_VERSION}")
    if ncomp != 3:
        raise ValueError(f"{path}: expected 3 components, found {ncomp}")
    grid = Grid(int(n), float(l))
    count = n ** 3
    expected = _HEADER.size + 8 * count * ncomp
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    comps = []
    offset = _HEADER.size
    for _ in range(ncomp):
        flat = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        comps.append(flat.reshape(n, n, n).transpose(2, 1, 0))
        offset += 8 * count
    return SpectralVectorField.from_samples(grid, np.stack(comps))


# ---------------------------------------------------------------------------
# canonical JSON and config hashing
# ---------------------------------------------------------------------------

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=True)


def config_digest(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def write_json_report(path, payload: dict, config: dict):
    doc = dict(payload)
    doc["format_version"] = FORMAT_VERSION
    doc["config_hash"] = config_digest(config)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# JSONL diagnostics
# ---------------------------------------------------------------------------

def write_diagnostics_jsonl(path, diagnostics, config: dict):
    """One header line, then one record per (time, norm_tag)."""
    lines = [canonical_json({
        "format_version": FORMAT_VERSION,
        "convention_version": CONVENTION_VERSION,
        "config_hash": config_digest(config),
        "kind": "diagnostics",
        "grid": {"n": diagnostics.grid_n, "l": diagnostics.grid_l},
        "scheme": diagnostics.scheme,
        "status": diagnostics.status,
    })]
    for rec in diagnostics.to_records():
        rec["convention_version"] = CONVENTION_VERSION
        lines.append(canonical_json(rec))
    Path(path).write_text("\n".join(lines) + "\n")


def read_jsonl(path):
    """Returns (header, records)."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty JSONL file")
    header = json.loads(lines[0])
    return header, [json.loads(line) for line in lines[1:]]


# ---------------------------------------------------------------------------
# run configs
# ---------------------------------------------------------------------------

def _coerce(value: str):
    try:
        return json.loads(value)
    except (json.JSONDecodeError, TypeError):
        return value


def load_config(path) -> dict:
    """Sectioned key=value text, or a JSON object with the same nesting."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{") or str(path).endswith(".json"):
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: top-level JSON config must be an object")
        return doc
    parser = configparser.ConfigParser()
    parser.read_string(text)
    out = {}
    for section in parser.sections():
        out[section] = {key: _coerce(val) for key, val in parser.items(section)}
    return out
