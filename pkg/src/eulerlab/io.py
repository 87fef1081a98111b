"""Binary snapshots, graymap heatmaps, CSV tables and JSON sidecars."""

from __future__ import annotations

import csv
import json
import re
import struct
from pathlib import Path

import numpy as np

GEOMETRY_TAGS = {"torus": 0, "channel": 1, "S1": 2}
TAG_NAMES = {v: k for k, v in GEOMETRY_TAGS.items()}
MAP_IDS = {"algebraic": 0, "log": 1}
MAP_NAMES = {v: k for k, v in MAP_IDS.items()}


def write_snapshot(path, values: np.ndarray, geometry: str, t: float):
    """Write an ``FLD1`` snapshot.

    Layout: magic ``FLD1``, little-endian u32 nx, u32 ny, u8 geometry tag,
    f64 time, then ``nx * ny`` f64 values in row-major order. ``ny`` is the
    number of stored rows (walls included on the channel).
    """
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.ndim == 1:
        values = values[None, :]
    ny, nx = values.shape
    with open(path, "wb") as fh:
        fh.write(b"FLD1")
        fh.write(struct.pack("<IIBd", nx, ny, GEOMETRY_TAGS[geometry], float(t)))
        fh.write(values.tobytes())


def read_snapshot(path):
    """Return ``(values, geometry, t)`` from an ``FLD1`` file."""
    data = Path(path).read_bytes()
    if data[:4] != b"FLD1":
        raise ValueError(f"{path}: not an FLD1 snapshot")
    if len(data) < 4 + struct.calcsize("<IIBd"):
        raise ValueError(f"{path}: truncated FLD1 header")
    nx, ny, tag, t = struct.unpack_from("<IIBd", data, 4)
    off = 4 + struct.calcsize("<IIBd")
    expected = off + 8 * nx * ny
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    if tag not in TAG_NAMES:
        raise ValueError(f"{path}: unknown geometry tag {tag}")
    values = np.frombuffer(data, dtype="<f8", offset=off).reshape(ny, nx).astype(float)
    return values, TAG_NAMES[tag], t


def write_polar_snapshot(path, values: np.ndarray, t: float, grid_map: str):
    """Write a ``POL1`` snapshot: magic, u32 nR, u32 ntheta, f64 time, u8 map id, values."""
    values = np.ascontiguousarray(values, dtype="<f8")
    nr, nth = values.shape
    with open(path, "wb") as fh:
        fh.write(b"POL1")
        fh.write(struct.pack("<IIdB", nr, nth, float(t), MAP_IDS[grid_map]))
        fh.write(values.tobytes())


def read_polar_snapshot(path):
    data = Path(path).read_bytes()
    if data[:4] != b"POL1":
        raise ValueError(f"{path}: not a POL1 snapshot")
    if len(data) < 4 + struct.calcsize("<IIdB"):
        raise ValueError(f"{path}: truncated POL1 header")
    nr, nth, t, mid = struct.unpack_from("<IIdB", data, 4)
    off = 4 + struct.calcsize("<IIdB")
    if len(data) != off + 8 * nr * nth:
        raise ValueError(f"{path}: truncated POL1 snapshot")
    if mid not in MAP_NAMES:
        raise ValueError(f"{path}: unknown radial map id {mid}")
    values = np.frombuffer(data, dtype="<f8", offset=off).reshape(nr, nth).astype(float)
    return values, t, MAP_NAMES[mid]


def write_pgm(path, values: np.ndarray):
    """8-bit binary graymap; the first image row is the largest y.

    The data range is kept in a ``# min=... max=...`` comment line.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[None, :]
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    scaled = np.zeros_like(values) if span == 0 else (values - lo) / span
    img = np.round(scaled[::-1] * 255).astype(np.uint8)
    h, w = img.shape
    header = f"P5\n# min={lo!r} max={hi!r}\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())


def read_pgm(path):
    """Return ``(image, lo, hi)``; ``lo``/``hi`` are ``None`` without a range comment."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    lo = hi = None
    while len(tokens) < 4:
        if data[pos : pos + 1] == b"#":
            end = data.index(b"\n", pos)
            m = re.search(rb"min=(\S+) max=(\S+)", data[pos:end])
            if m:
                lo, hi = float(m.group(1)), float(m.group(2))
            pos = end + 1
        elif data[pos : pos + 1].isspace():
            pos += 1
        else:
            m = re.match(rb"\S+", data[pos:])
            tokens.append(m.group(0))
            pos += len(m.group(0))
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary graymap")
    w, h = int(tokens[1]), int(tokens[2])
    img = np.frombuffer(data, dtype=np.uint8, offset=pos + 1, count=w * h).reshape(h, w)
    return img, lo, hi


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    return header, np.array(rows).reshape(len(rows), len(header))


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
