"""Binary snapshot format and trajectory directories.

Snapshot layout (little endian throughout):

    bytes 0..3   magic "TNLS"
    bytes 4..7   u32 format version, currently 1
    bytes 8..11  u32 lattice size M
    bytes 12..19 f64 timestamp
    payload      M^3 complex samples as (re, im) f64 pairs, x3 fastest,
                 then x2, then x1 (C order of values[x1, x2, x3])

A trajectory directory holds a JSON manifest (lattice size, rho, dt, sample
times, file names) next to one snapshot per stored sample.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from .fields import Lattice, TorusField

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "write_snapshot",
    "read_snapshot",
    "write_trajectory",
    "read_trajectory",
]

MAGIC = b"TNLS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIId")


def write_snapshot(path: str | os.PathLike, f: TorusField) -> None:
    """Write one field to a .tnls snapshot file."""
    M = f.lattice.M
    data = np.ascontiguousarray(f.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, M, f.timestamp))
        fh.write(data.tobytes())


def read_snapshot(path: str | os.PathLike, lattice: Lattice | None = None) -> TorusField:
    """Read a snapshot, validating magic, version, size and finiteness.

    Passing a lattice reuses it (and enforces a matching M); otherwise a new
    one is built from the header.
    """
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, M, timestamp = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise ValueError(
                f"{path}: unsupported format version {version}, "
                f"expected {FORMAT_VERSION}"
            )
        payload = fh.read()
    expected = 16 * M**3
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} "
            f"for M = {M}"
        )
    if lattice is None:
        lattice = Lattice(M)
    elif lattice.M != M:
        raise ValueError(f"{path}: snapshot M = {M} != lattice M = {lattice.M}")
    values = np.frombuffer(payload, dtype="<c16").reshape(lattice.shape)
    return TorusField(lattice, values.astype(np.complex128), timestamp)


def write_trajectory(directory: str | os.PathLike, traj) -> None:
    """Write a solver trajectory as manifest.json plus one snapshot per
    stored sample."""
    os.makedirs(directory, exist_ok=True)
    files = []
    for k, field in enumerate(traj.fields):
        name = f"field_{k:06d}.tnls"
        write_snapshot(os.path.join(directory, name), field)
        files.append(name)
    manifest = {
        "format": "TNLS-TRAJ",
        "version": FORMAT_VERSION,
        "M": traj.lattice.M,
        "rho": traj.rho,
        "dt": traj.dt,
        "times": [float(t) for t in traj.times],
        "files": files,
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def read_trajectory(directory: str | os.PathLike):
    """Read a trajectory directory back into an evolution.Trajectory."""
    from .evolution import Trajectory

    with open(os.path.join(directory, "manifest.json")) as fh:
        manifest = json.load(fh)
    if manifest.get("format") != "TNLS-TRAJ":
        raise ValueError(f"{directory}: not a trajectory directory")
    lattice = Lattice(manifest["M"])
    fields = [
        read_snapshot(os.path.join(directory, name), lattice)
        for name in manifest["files"]
    ]
    times = [float(t) for t in manifest["times"]]
    if len(times) != len(fields):
        raise ValueError(f"{directory}: manifest times/files length mismatch")
    return Trajectory(
        lattice=lattice,
        times=np.asarray(times),
        fields=fields,
        rho=float(manifest["rho"]),
        dt=float(manifest["dt"]),
    )
