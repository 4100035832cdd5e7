"""Bit-exact binary snapshot format for spectral states.

Layout (all little-endian):
  8 bytes   magic "CBFSNAP1"
  uint32    dim
  uint32    n_points
  float64   period, time, r, mu, alpha, beta
  then dim row-major complex128 coefficient arrays, one per component.
"""

import struct

import numpy as np

from .errors import SnapshotFormatError
from .fields import SpectralField
from .grid import TorusGrid
from .operators import CbfParams

MAGIC = b"CBFSNAP1"
_HEADER = struct.Struct("<II6d")


def write_snapshot_file(path, field: SpectralField, time: float,
                        params: CbfParams):
    grid = field.grid
    if not field.is_vector:
        raise SnapshotFormatError("snapshots store full vector fields")
    header = _HEADER.pack(grid.dim, grid.n_points, grid.period, time,
                          params.r, params.mu, params.alpha, params.beta)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header)
        fh.write(np.ascontiguousarray(field.coeffs.astype("<c16")).tobytes())


def read_snapshot_file(path):
    """Returns (SpectralField, time, CbfParams)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise SnapshotFormatError(f"bad magic {magic!r} in {path}")
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise SnapshotFormatError(f"truncated header in {path}")
        dim, n_points, period, time, r, mu, alpha, beta = _HEADER.unpack(raw)
        grid = TorusGrid(dim=dim, n_points=n_points, period=period)
        count = dim * n_points ** dim
        raw_coeffs = fh.read(count * 16)
        if len(raw_coeffs) != count * 16:
            raise SnapshotFormatError(f"truncated coefficients in {path}")
        data = np.frombuffer(raw_coeffs, dtype="<c16")
        if fh.read(1):
            raise SnapshotFormatError(f"trailing bytes in {path}")
    coeffs = data.reshape((dim,) + grid.shape).astype(complex)
    field = SpectralField(grid, coeffs)
    return field, time, CbfParams(mu=mu, alpha=alpha, beta=beta, r=r)
