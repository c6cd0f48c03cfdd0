"""Binary field checkpoints and CSV emission.

Checkpoint layout (all little-endian):
  bytes 0-3   magic "NLSF"
  bytes 4-7   uint32 format version (currently 1)
  bytes 8-11  uint32 spatial dimension N
  then per axis: uint64 point count
  then per axis: float64 grid spacing
  then float64 lam, alpha, omega, t
  then the field samples as interleaved (re, im) float64 pairs, C order.

A checkpoint round-trip is bit-exact.  Malformed files raise FormatError
carrying the byte offset of the offending datum.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .core import CartesianGrid, RadialProfile, WaveField
from .errors import FormatError, InvalidInputError
from .ground_state import ModelParams

__all__ = [
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
    "checkpoint_write",
    "checkpoint_read",
    "observables_csv_write",
    "profile_csv_write",
]

CHECKPOINT_MAGIC = b"NLSF"
CHECKPOINT_VERSION = 1


def checkpoint_write(field: WaveField, path) -> None:
    """Write `field` to `path` in the NLSF checkpoint format."""
    grid = field.grid
    params = field.params_link
    lam = params.lam if params is not None else 0.0
    alpha = params.alpha if params is not None else 0.0
    omega = params.omega if params is not None else 0.0
    header = bytearray()
    header += CHECKPOINT_MAGIC
    header += struct.pack("<I", CHECKPOINT_VERSION)
    header += struct.pack("<I", grid.dim)
    for _ in range(grid.dim):
        header += struct.pack("<Q", grid.points_per_axis)
    for _ in range(grid.dim):
        header += struct.pack("<d", grid.dx)
    header += struct.pack("<dddd", lam, alpha, omega, field.time_stamp)
    payload = np.empty(field.values.size * 2, dtype="<f8")
    payload[0::2] = field.values.real.ravel(order="C")
    payload[1::2] = field.values.imag.ravel(order="C")
    with open(path, "wb") as f:
        f.write(bytes(header))
        f.write(payload.tobytes())


def _take(buf: bytes, offset: int, fmt: str, what: str):
    size = struct.calcsize(fmt)
    if offset + size > len(buf):
        raise FormatError(f"file truncated while reading {what}", offset=offset)
    return struct.unpack_from(fmt, buf, offset)[0], offset + size


def checkpoint_read(path) -> WaveField:
    """Read an NLSF checkpoint; the inverse of `checkpoint_write`."""
    with open(path, "rb") as f:
        buf = f.read()
    if len(buf) < 4:
        raise FormatError("file truncated while reading magic", offset=0)
    if buf[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r}, expected {CHECKPOINT_MAGIC!r}",
                          offset=0)
    offset = 4
    version, offset = _take(buf, offset, "<I", "version")
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version} "
                          f"(supported: {CHECKPOINT_VERSION})", offset=4)
    dim_offset = offset
    dim, offset = _take(buf, offset, "<I", "dimension")
    if dim not in (1, 2):
        raise FormatError(f"unsupported dimension {dim}", offset=dim_offset)
    sizes = []
    for i in range(dim):
        size_offset = offset
        n, offset = _take(buf, offset, "<Q", f"axis {i} size")
        if n < 16 or n > 2 ** 30 or (n & (n - 1)) != 0:
            raise FormatError(f"axis {i} size {n} is not a power of two >= 16",
                              offset=size_offset)
        sizes.append(int(n))
    if len(set(sizes)) != 1:
        raise FormatError(f"anisotropic axis sizes {sizes} are not supported",
                          offset=12)
    spacings = []
    for i in range(dim):
        d_offset = offset
        d, offset = _take(buf, offset, "<d", f"axis {i} spacing")
        if not (math.isfinite(d) and d > 0):
            raise FormatError(f"axis {i} spacing {d} is not positive finite",
                              offset=d_offset)
        spacings.append(d)
    lam, offset = _take(buf, offset, "<d", "lambda")
    alpha, offset = _take(buf, offset, "<d", "alpha")
    omega, offset = _take(buf, offset, "<d", "omega")
    t, offset = _take(buf, offset, "<d", "time stamp")
    n_total = 1
    for n in sizes:
        n_total *= n
    expected = n_total * 16
    if len(buf) - offset < expected:
        raise FormatError(
            f"file truncated: payload holds {len(buf) - offset} bytes, "
            f"expected {expected}", offset=offset)
    if len(buf) - offset > expected:
        raise FormatError(
            f"trailing garbage: {len(buf) - offset - expected} extra bytes",
            offset=offset + expected)
    flat = np.frombuffer(buf, dtype="<f8", count=2 * n_total, offset=offset)
    values = (flat[0::2] + 1j * flat[1::2]).reshape(tuple(sizes), order="C")
    grid = CartesianGrid(dim=dim, half_width=sizes[0] * spacings[0] / 2.0,
                         points_per_axis=sizes[0])
    params = None
    if alpha > 0:
        params = ModelParams(dim, alpha, lam=lam, omega=omega)
    return WaveField(grid=grid, values=values, time_stamp=t, params_link=params)


def observables_csv_write(series, path) -> None:
    """Write an ObservableSeries as CSV: t, mass, energy, grad_sq, variance, Q, S, dt."""
    if len(series) == 0:
        raise InvalidInputError("cannot write an empty observable series")
    lines = ["t,mass,energy,grad_sq,variance,Q,S,dt"]
    for r in series.records:
        lines.append(",".join("%.17g" % v for v in (
            r.t, r.mass, r.energy, r.grad_sq, r.variance, r.q, r.s, r.dt_used)))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def profile_csv_write(profile: RadialProfile, path) -> None:
    """Write a radial profile as CSV: r, value."""
    lines = ["r,value"]
    for r, v in zip(profile.grid.nodes, profile.values):
        lines.append("%.17g,%.17g" % (r, v))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
