"""Bit-exact binary snapshots of simulation states.

Layout (all little-endian):
    magic "OBM1" (4 bytes), u16 version=1, u8 dim, u8 kind
    (0=compressible, 1=incompressible), u32 n, f64 box_length,
    f64 epsilon (0 for incompressible), f64 time, u32 component count,
    then each component as f64 row-major, then CRC32 of the payload.

Component order: compressible phi, u_1..u_dim, eta, tau upper-triangle;
incompressible u_1..u_dim, eta, tau upper-triangle, pi.  The dealias rule
is not stored; loaded grids use the default 2/3 fraction.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import SnapshotError
from .grid import Field, GridSpec, SymTensorField, VectorField
from .model import CompressibleState, IncompressibleState

MAGIC = b"OBM1"
VERSION = 1
_HEADER = struct.Struct("<4sHBBIdddI")

KIND_COMPRESSIBLE = 0
KIND_INCOMPRESSIBLE = 1


def _components(state) -> list[np.ndarray]:
    if isinstance(state, CompressibleState):
        return (
            [state.phi.values]
            + [c.values for c in state.u.components]
            + [state.eta.values]
            + [c.values for c in state.tau.components]
        )
    return (
        [c.values for c in state.u.components]
        + [state.eta.values]
        + [c.values for c in state.tau.components]
        + [state.pi.values]
    )


def save_snapshot(state: CompressibleState | IncompressibleState, path) -> None:
    """Write a state so that load_snapshot reproduces it bit for bit."""
    if isinstance(state, CompressibleState):
        kind, epsilon = KIND_COMPRESSIBLE, state.epsilon
    elif isinstance(state, IncompressibleState):
        kind, epsilon = KIND_INCOMPRESSIBLE, 0.0
    else:
        raise SnapshotError(f"cannot snapshot {type(state).__name__}")
    grid = state.grid
    comps = _components(state)
    header = _HEADER.pack(
        MAGIC, VERSION, grid.dim, kind, grid.n, grid.box_length,
        epsilon, state.time, len(comps),
    )
    payload = b"".join(np.ascontiguousarray(c, dtype="<f8").tobytes() for c in comps)
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def load_snapshot(path) -> CompressibleState | IncompressibleState:
    """Read a snapshot; raises SnapshotError on any format defect."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size + 4:
        raise SnapshotError("file shorter than the snapshot header")
    magic, version, dim, kind, n, box_length, epsilon, time, count = _HEADER.unpack(
        blob[: _HEADER.size]
    )
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    if kind not in (KIND_COMPRESSIBLE, KIND_INCOMPRESSIBLE):
        raise SnapshotError(f"unknown state kind {kind}")

    grid = GridSpec(dim=dim, n=n, box_length=box_length)
    per_comp = grid.num_points * 8
    expected = _HEADER.size + count * per_comp + 4
    if len(blob) != expected:
        raise SnapshotError(
            f"payload length mismatch: expected {expected} bytes, got {len(blob)}"
        )
    payload = blob[_HEADER.size : -4]
    (crc_stored,) = struct.unpack("<I", blob[-4:])
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise SnapshotError("payload checksum mismatch")

    arrays = [
        np.frombuffer(payload[i * per_comp : (i + 1) * per_comp], dtype="<f8")
        .astype(np.float64)
        .reshape(grid.shape)
        for i in range(count)
    ]
    n_tau = dim * (dim + 1) // 2
    if kind == KIND_COMPRESSIBLE:
        if count != 1 + dim + 1 + n_tau:
            raise SnapshotError(f"unexpected component count {count} for kind 0")
        return CompressibleState(
            phi=Field(grid, arrays[0]),
            u=VectorField.from_arrays(grid, arrays[1 : 1 + dim]),
            eta=Field(grid, arrays[1 + dim]),
            tau=SymTensorField.from_arrays(grid, arrays[2 + dim : 2 + dim + n_tau]),
            epsilon=epsilon,
            time=time,
        )
    if count != dim + 1 + n_tau + 1:
        raise SnapshotError(f"unexpected component count {count} for kind 1")
    return IncompressibleState(
        u=VectorField.from_arrays(grid, arrays[:dim]),
        eta=Field(grid, arrays[dim]),
        tau=SymTensorField.from_arrays(grid, arrays[dim + 1 : dim + 1 + n_tau]),
        pi=Field(grid, arrays[dim + 1 + n_tau]),
        time=time,
    )


def describe_snapshot(path) -> str:
    """Human-readable header plus per-component L2 norms."""
    state = load_snapshot(path)
    grid = state.grid
    lines = []
    if isinstance(state, CompressibleState):
        lines.append("kind: compressible")
        lines.append(f"epsilon: {state.epsilon:.17g}")
    else:
        lines.append("kind: incompressible")
    lines.append(f"dim: {grid.dim}")
    lines.append(f"n: {grid.n}")
    lines.append(f"box_length: {grid.box_length:.17g}")
    lines.append(f"time: {state.time:.17g}")
    vol = grid.cell_volume

    def l2(arr):
        return float(np.sqrt((arr**2).sum() * vol))

    if isinstance(state, CompressibleState):
        lines.append(f"phi L2: {l2(state.phi.values):.6e}")
    for j, comp in enumerate(state.u.components):
        lines.append(f"u{j} L2: {l2(comp.values):.6e}")
    lines.append(f"eta-1 L2: {l2(state.eta.values - 1.0):.6e}")
    for j, comp in enumerate(state.tau.components):
        lines.append(f"tau{j} L2: {l2(comp.values):.6e}")
    if isinstance(state, IncompressibleState):
        lines.append(f"pi L2: {l2(state.pi.values):.6e}")
    return "\n".join(lines)
