"""Serialization: binary Field container, CSV emission, run manifests.

Data files are deterministic for a fixed seed and configuration; wall
clock timestamps appear only inside manifests.
"""

import csv
import hashlib
import json
import struct
import time

import numpy as np

from .errors import PreconditionError
from .spectral_core import Field, Grid

MAGIC = b"BOF1"
VERSION = "0.1.0"


def write_field(path, f):
    """Binary container: magic, endianness tag, n (uint64), L (float64),
    then n little-endian float64 samples."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(b"<")
        fh.write(struct.pack("<Qd", f.grid.n, f.grid.half_length))
        fh.write(f.samples.astype("<f8").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise PreconditionError("not a field container: bad magic %r"
                                    % magic)
        endian = fh.read(1)
        if endian != b"<":
            raise PreconditionError("unsupported endianness tag %r" % endian)
        n, half_length = struct.unpack("<Qd", fh.read(16))
        payload = np.frombuffer(fh.read(8 * n), dtype="<f8")
    return Field(Grid(n, half_length), payload.astype(float))


def _fmt(value):
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_csv(path, header, rows):
    """RFC-4180-style CSV with a header row; floats at full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_field_csv(path, f):
    write_csv(path, ["x", "u"], zip(f.grid.x.tolist(), f.samples.tolist()))


def write_norm_series_csv(path, records, s, r):
    rows = [(rec.t, s, r, rec.sobolev, rec.weighted, rec.combined,
             rec.mean_mode, rec.first_moment) for rec in records]
    write_csv(path, ["t", "s", "r", "sobolev", "weighted", "combined",
                     "mean_mode", "first_moment"], rows)


def content_hash(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, command, config_echo, seed, outputs,
                   extra=None, wall_time=None, steps=None):
    """Run manifest: configuration echo, seed, content hashes of every
    emitted data file.  Manifests are written once per run and never
    rewritten (append-only discipline at the directory level)."""
    manifest = {
        "command": command,
        "artifact_version": VERSION,
        "config": config_echo,
        "seed": seed,
        "outputs": {name: content_hash(p) for name, p in outputs.items()},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if wall_time is not None:
        manifest["wall_time_s"] = wall_time
    if steps is not None:
        manifest["steps"] = steps
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
