"""Vector fields on the torus in physical and spectral representation.

Both field types are immutable snapshots: the wrapped arrays are marked
read-only and every operation returns a new field, so values are safe to
share across threads.

Spectral coefficients follow the convention u(x) = sum_m u_hat(m) e^{i k_m.x}
with k_m = 2*pi*m/L, i.e. ``fftn(samples) / N^d``.  Real-valued fields then
satisfy the Hermitian symmetry u_hat(-m) = conj(u_hat(m)), which
:func:`to_physical` enforces before inverting.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidFieldError, SymmetryError
from .grid import TorusGrid

SYMMETRY_TOL = 1e-10


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhysicalField:
    """Real samples on the grid, shape (ncomp, N, ..., N)."""

    grid: TorusGrid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == self.grid.dim:
            data = data[np.newaxis]
        if data.shape[1:] != self.grid.shape:
            raise InvalidFieldError(
                f"sample shape {data.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidFieldError("non-finite samples")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def ncomp(self):
        return self.data.shape[0]

    @property
    def is_vector(self):
        return self.ncomp == self.grid.dim

    def magnitude(self):
        """Pointwise Euclidean magnitude |u(x)|."""
        return np.sqrt(np.sum(self.data * self.data, axis=0))


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients, shape (ncomp, N, ..., N)."""

    grid: TorusGrid
    coeffs: np.ndarray
    divergence_free: bool = False

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim == self.grid.dim:
            coeffs = coeffs[np.newaxis]
        if coeffs.shape[1:] != self.grid.shape:
            raise InvalidFieldError(
                f"coefficient shape {coeffs.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidFieldError("non-finite coefficients")
        object.__setattr__(self, "coeffs", _freeze(coeffs))

    @property
    def ncomp(self):
        return self.coeffs.shape[0]

    @property
    def is_vector(self):
        return self.ncomp == self.grid.dim

    def symmetry_defect(self):
        """max |u_hat(-k) - conj(u_hat(k))| over all modes and components."""
        defect = 0.0
        for c in self.coeffs:
            defect = max(defect, float(np.max(np.abs(c - self.grid.conj_reflect(c)))))
        return defect

    def scale(self):
        """Coefficient magnitude used to normalize tolerances."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def replace(self, coeffs, divergence_free=None):
        if divergence_free is None:
            divergence_free = self.divergence_free
        return SpectralField(self.grid, coeffs, divergence_free)

    def __add__(self, other):
        require_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs,
                             self.divergence_free and other.divergence_free)

    def __sub__(self, other):
        require_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs,
                             self.divergence_free and other.divergence_free)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * float(scalar), self.divergence_free)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def require_same_grid(a, b):
    if not a.grid.compatible(b.grid):
        raise GridMismatchError("fields live on incompatible grids")


def zero_field(grid, ncomp=None):
    ncomp = grid.dim if ncomp is None else ncomp
    return SpectralField(grid, np.zeros((ncomp,) + grid.shape, dtype=complex),
                         divergence_free=True)


def to_spectral(field: PhysicalField) -> SpectralField:
    """Forward transform; coefficients are fftn(samples)/N^d per component."""
    norm = field.grid.n_points ** field.grid.dim
    axes = tuple(range(1, field.grid.dim + 1))
    coeffs = np.fft.fftn(field.data, axes=axes) / norm
    return SpectralField(field.grid, coeffs)


def to_physical(field: SpectralField) -> PhysicalField:
    """Inverse transform back to real samples.

    Raises :class:`SymmetryError` when the coefficients are not Hermitian
    symmetric relative to the overall coefficient scale.
    """
    scale = field.scale()
    if field.symmetry_defect() > SYMMETRY_TOL * max(scale, 1e-300):
        raise SymmetryError("coefficients violate Hermitian symmetry")
    norm = field.grid.n_points ** field.grid.dim
    axes = tuple(range(1, field.grid.dim + 1))
    samples = np.fft.ifftn(field.coeffs * norm, axes=axes)
    return PhysicalField(field.grid, samples.real)
