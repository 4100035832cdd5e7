"""Operator algebra of the damped Navier-Stokes system.

The full operator applied to a divergence-free field u is

    G(u) = mu * A u + B(u, u) + beta * C_r(u) + alpha * u

with A the (negative) Laplacian restricted to divergence-free fields, B the
Leray-projected advection and C_r the projected pointwise damping
|u|^{r-1} u.  Nonlinear terms are evaluated pseudo-spectrally: physical-space
products, forward transform, 2/3-rule dealiasing, then Leray projection.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ContractViolationError, InvalidArgumentsError,
                     InvalidExponentError, NotApplicableError)
from .fields import (PhysicalField, SpectralField, require_same_grid,
                     to_physical, to_spectral)
from .spectral import (dealias, divergence_defect, jacobian, l2_pairing,
                       leray_project)

DIV_FREE_TOL = 1e-10


@dataclass(frozen=True)
class CbfParams:
    """Physical parameters: viscosity mu, Darcy alpha, Forchheimer beta,
    absorption exponent r."""

    mu: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    r: float = 3.0

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgumentsError(f"mu must be positive, got {self.mu}")
        if self.beta < 0:
            raise InvalidArgumentsError(f"beta must be >= 0, got {self.beta}")
        if self.alpha < 0:
            raise InvalidArgumentsError(f"alpha must be >= 0, got {self.alpha}")
        if self.r < 1:
            raise InvalidExponentError(f"r must be >= 1, got {self.r}")

    @property
    def critical_regime(self) -> bool:
        """True at the critical exponent r=3 with 2*beta*mu >= 1."""
        return self.r == 3.0 and 2.0 * self.beta * self.mu >= 1.0


def _require_div_free(u: SpectralField, what: str):
    if u.divergence_free:
        return
    if divergence_defect(u) > DIV_FREE_TOL:
        raise ContractViolationError(f"{what} requires a divergence-free field")


def stokes(u: SpectralField) -> SpectralField:
    """A u = -P(Laplacian u): multiplier |k|^2 on divergence-free fields."""
    _require_div_free(u, "stokes operator")
    return u.replace(u.grid.k_squared * u.coeffs)


def damping_pointwise(data: np.ndarray, r: float) -> np.ndarray:
    """|u|^{r-1} u evaluated on samples, with |u|^{r-1}u := 0 where u = 0."""
    if r < 1:
        raise InvalidExponentError(f"r must be >= 1, got {r}")
    mag = np.sqrt(np.sum(data * data, axis=0))
    if r == 1.0:
        return data.copy()
    factor = np.where(mag > 0, mag, 1.0) ** (r - 1.0)
    factor = np.where(mag > 0, factor, 0.0)
    return factor * data


def damping(u: SpectralField, r: float, apply_dealias: bool = True) -> SpectralField:
    """C_r(u) = P(|u|^{r-1} u), evaluated pointwise then dealiased/projected."""
    phys = to_physical(u)
    out = to_spectral(PhysicalField(u.grid, damping_pointwise(phys.data, r)))
    if apply_dealias:
        out = dealias(out)
    return leray_project(out)


def advect_samples(u_phys: np.ndarray, v_jac_phys: np.ndarray) -> np.ndarray:
    """(u . grad) v on samples given u and the physical Jacobian of v."""
    return np.einsum("i...,ji...->j...", u_phys, v_jac_phys)


def physical_jacobian(v: SpectralField) -> np.ndarray:
    """Partial derivatives of v evaluated on the grid, shape (ncomp, dim, ...)."""
    grid = v.grid
    jac = jacobian(v)
    norm = grid.n_points ** grid.dim
    axes = tuple(range(2, grid.dim + 2))
    return np.fft.ifftn(jac * norm, axes=axes).real


def advection(u: SpectralField, v: SpectralField = None,
              apply_dealias: bool = True) -> SpectralField:
    """B(u, v) = P[(u . grad) v]; B(u) = B(u, u) when v is omitted."""
    if v is None:
        v = u
    require_same_grid(u, v)
    _require_div_free(u, "advection")
    if apply_dealias:
        u, v = dealias(u), dealias(v)
    u_phys = to_physical(u).data
    term = advect_samples(u_phys, physical_jacobian(v))
    out = to_spectral(PhysicalField(u.grid, term))
    if apply_dealias:
        out = dealias(out)
    return leray_project(out)


def advection_form(u: SpectralField, v: SpectralField, w: SpectralField) -> float:
    """Trilinear form b(u, v, w) = integral of (u . grad) v . w."""
    require_same_grid(u, v)
    require_same_grid(u, w)
    u_phys = to_physical(u).data
    w_phys = to_physical(w).data
    term = advect_samples(u_phys, physical_jacobian(v))
    return float(np.sum(term * w_phys) * u.grid.cell_volume)


def nonlinear_rhs(u: SpectralField, params: CbfParams,
                  apply_dealias: bool = True) -> SpectralField:
    """B(u) + beta*C(u) through one shared transform pipeline."""
    if apply_dealias:
        u = dealias(u)
    u_phys = to_physical(u).data
    term = advect_samples(u_phys, physical_jacobian(u))
    term = term + params.beta * damping_pointwise(u_phys, params.r)
    out = to_spectral(PhysicalField(u.grid, term))
    if apply_dealias:
        out = dealias(out)
    return leray_project(out)


def cbf_operator(u: SpectralField, params: CbfParams,
                 apply_dealias: bool = True) -> SpectralField:
    """G(u) = mu*A u + B(u) + beta*C(u) + alpha*u."""
    _require_div_free(u, "cbf operator")
    nl = nonlinear_rhs(u, params, apply_dealias)
    coeffs = (params.mu * u.grid.k_squared + params.alpha) * u.coeffs + nl.coeffs
    return SpectralField(u.grid, coeffs, divergence_free=True)


def operator_energy(u: SpectralField, params: CbfParams) -> float:
    """<G(u), u>, assembled as one pairing."""
    return l2_pairing(cbf_operator(u, params), u)


def monotonicity_shift(params: CbfParams, variant: str = "theorem") -> float:
    """Shift rho making G + rho*I monotone for r > 3.

    ``variant="theorem"`` (default) returns
    (r-3)/(2 mu (r-1)) * (2/(beta mu (r-1)))^{2/(r-3)}.
    ``variant="proof_step"`` exposes the alternative prefactor (r-3)/(r-1)
    that appears in one derivation step; the two disagree and the default is
    the one backed by the full estimate chain.  For r <= 3 the shift is 0
    (global monotonicity regime when 2*beta*mu >= 1).
    """
    r, mu, beta = params.r, params.mu, params.beta
    if r <= 3.0:
        return 0.0
    if beta == 0.0:
        raise NotApplicableError("monotonicity shift needs beta > 0")
    tail = (2.0 / (beta * mu * (r - 1.0))) ** (2.0 / (r - 3.0))
    if variant == "theorem":
        return (r - 3.0) / (2.0 * mu * (r - 1.0)) * tail
    if variant == "proof_step":
        return (r - 3.0) / (r - 1.0) * tail
    raise InvalidArgumentsError(f"unknown variant {variant!r}")


def regularity_rate(params: CbfParams) -> float:
    """Exponential rate rho* in the gradient-norm a-priori bound (r > 3)."""
    r, mu, beta = params.r, params.mu, params.beta
    if r <= 3.0:
        raise NotApplicableError("regularity rate is defined for r > 3 only")
    if beta == 0.0:
        raise NotApplicableError("regularity rate needs beta > 0")
    return (2.0 * (r - 3.0) / (mu * (r - 1.0))
            * (4.0 / (beta * mu * (r - 1.0))) ** (2.0 / (r - 3.0)))


def recover_pressure(u: SpectralField, f: SpectralField,
                     params: CbfParams, apply_dealias: bool = True) -> SpectralField:
    """Mean-zero pressure from Delta p = div(f - (u.grad)u - beta|u|^{r-1}u)."""
    _require_div_free(u, "pressure recovery")
    require_same_grid(u, f)
    grid = u.grid
    if apply_dealias:
        u = dealias(u)
    u_phys = to_physical(u).data
    term = advect_samples(u_phys, physical_jacobian(u))
    term = term + params.beta * damping_pointwise(u_phys, params.r)
    rhs = to_spectral(PhysicalField(grid, term))
    if apply_dealias:
        rhs = dealias(rhs)
    source = f.coeffs - rhs.coeffs
    k = grid.wavenumbers
    div_src = sum(1j * k[i] * source[i] for i in range(grid.dim))
    k2 = grid.k_squared
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(k2 > 0, -div_src / np.where(k2 > 0, k2, 1.0), 0.0)
    return SpectralField(grid, p[np.newaxis])
