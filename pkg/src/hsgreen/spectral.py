"""Exact transform-space objects for the linearized system.

The linearized half-line system couples mass and momentum through the flux
matrix A = [[0, 1], [c^2, 0]] and the (degenerate) viscosity matrix
B = diag(0, nu).  This module provides:

* the dispersion roots of the Fourier symbol,
* the Fourier-space fundamental solution (whole line),
* the Laplace-space fundamental solution and half-line Green's function,
* the boundary reflection coefficient and its right-half-plane pole.

All evaluators broadcast over numpy arrays in their transform variable so the
inversion quadratures in :mod:`hsgreen.transforms` stay vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelParams
from .errors import BranchCutError, ParameterError, PoleError

# Relative |Delta * t| below which the confluent (series) form of
# sinh(z)/z is used; keeps the double-root wavenumbers xi = +-2c/nu and the
# origin free of catastrophic cancellation.
_SINHC_SWITCH = 1e-2


@dataclass(frozen=True)
class ComplexPair:
    """The two growth rates of the Fourier symbol at one wavenumber."""

    sigma_plus: complex
    sigma_minus: complex

    def vieta_residuals(self, xi: float, params: ModelParams) -> tuple[float, float]:
        """Relative residuals of sigma+ + sigma- = -nu xi^2 and
        sigma+ * sigma- = c^2 xi^2."""
        s, p = self.sigma_plus + self.sigma_minus, self.sigma_plus * self.sigma_minus
        ts, tp = -params.nu * xi**2, params.c**2 * xi**2
        scale_s = max(abs(ts), 1.0)
        scale_p = max(abs(tp), 1.0)
        return abs(s - ts) / scale_s, abs(p - tp) / scale_p


def dispersion_sigma(xi: float, params: ModelParams) -> ComplexPair:
    """Growth rates sigma+- = -xi (nu xi +- sqrt(nu^2 xi^2 - 4 c^2)) / 2.

    The root with the cancelling combination nu xi -+ sqrt(...) is recovered
    from the product identity sigma+ sigma- = c^2 xi^2, so both Vieta
    identities hold to machine precision even for nu^2 xi^2 >> 4 c^2.
    """
    root = np.sqrt(complex(params.nu**2 * xi**2 - 4.0 * params.c**2))
    sp = complex(-0.5 * xi * (params.nu * xi + root))
    sm = complex(-0.5 * xi * (params.nu * xi - root))
    if xi != 0.0 and root != 0.0:
        prod = complex(params.c**2 * xi**2)
        if abs(sp) >= abs(sm):
            sm = prod / sp
        else:
            sp = prod / sm
    return ComplexPair(sigma_plus=sp, sigma_minus=sm)


def fourier_fundamental(xi, t: float, params: ModelParams) -> np.ndarray:
    """Fourier transform of the whole-line fundamental solution at time t.

    Returns shape xi.shape + (2, 2) complex.  Implemented through the matrix
    exponential of the symbol -i xi A - xi^2 B in the overflow-free form

        exp(mu t) [cosh(D t) I + t sinhc(D t) (M - mu I)],

    mu = -nu xi^2 / 2, D^2 = mu^2 - c^2 xi^2, which reduces to the standard
    two-mode display for distinct roots and to the confluent (t e^{sigma t})
    form at the double roots xi = 0 and xi = +-2c/nu.
    """
    if t < 0:
        raise ParameterError(f"need t >= 0, got t={t}")
    xi = np.asarray(xi, dtype=float)
    c, nu = params.c, params.nu
    mu = -0.5 * nu * xi**2
    delta = np.sqrt((mu**2 - c**2 * xi**2).astype(complex))
    # Both exponents have non-positive real part, so no overflow.
    ep = np.exp((mu + delta) * t)
    em = np.exp((mu - delta) * t)
    cosh_term = 0.5 * (ep + em)
    z = delta * t
    small = np.abs(z) <= _SINHC_SWITCH
    z2 = np.where(small, z, 0.0) ** 2
    series = t * np.exp(mu * t) * (1.0 + z2 / 6.0 + z2 * z2 / 120.0)
    direct = (ep - em) / (2.0 * np.where(small, 1.0, delta))
    sinhc_term = np.where(small, series, direct)
    out = np.empty(xi.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = cosh_term - mu * sinhc_term
    out[..., 1, 1] = cosh_term + mu * sinhc_term
    out[..., 0, 1] = -1j * xi * sinhc_term
    out[..., 1, 0] = c**2 * out[..., 0, 1]
    return out


def _nu_s_plus_c2(s, params: ModelParams) -> np.ndarray:
    """nu*s + c^2, rejecting arguments on the branch cut (<= 0 on the real axis)."""
    s = np.asarray(s, dtype=complex)
    w = params.nu * s + params.c**2
    on_cut = (w.imag == 0.0) & (w.real <= 0.0)
    if np.any(on_cut):
        bad = np.asarray(s)[on_cut].ravel()[0]
        raise BranchCutError(
            f"s={bad} lies on the branch cut of sqrt(nu*s + c^2) "
            f"(cut: real s <= -c^2/nu = {-params.c ** 2 / params.nu:.6g})"
        )
    return w


def lambda_of_s(s, params: ModelParams):
    """Spatial decay rate lambda(s) = s / sqrt(nu*s + c^2), principal branch.

    The principal square root makes Re(lambda) >= 0 on Re(s) >= 0, which is
    the decaying-mode selection for the half line.
    """
    w = _nu_s_plus_c2(s, params)
    lam = np.asarray(s, dtype=complex) / np.sqrt(w)
    return lam if lam.ndim else complex(lam)


@dataclass
class LaplaceGreenValue:
    """Laplace-space kernel value: smooth 2x2 matrix plus a delta coefficient.

    ``delta_weight`` is the coefficient of delta(x - y) in the (1,1) slot
    (equal to nu/(nu*s + c^2) on the diagonal x = y, zero elsewhere).
    """

    value: np.ndarray
    delta_weight: np.ndarray | complex


def laplace_fundamental(x, s, params: ModelParams) -> LaplaceGreenValue:
    """Laplace transform of the whole-line fundamental solution.

    Broadcasts over x and s; returns value of shape broadcast(x, s) + (2, 2).
    Uses the singularity-free algebraic form (no lone 1/lambda factor):

        (1/2) e^{-lambda |x|} [[c^2 w^{-3/2}, sgn(x) w^{-1}],
                               [c^2 sgn(x) w^{-1}, w^{-1/2}]],  w = nu s + c^2,

    with the nu delta(x)/w contribution reported via delta_weight at x = 0.
    """
    x = np.asarray(x, dtype=float)
    w = _nu_s_plus_c2(s, params)
    s = np.asarray(s, dtype=complex)
    sqw = np.sqrt(w)
    lam = s / sqw
    xb, wb = np.broadcast_arrays(x, w)
    sqwb = np.sqrt(wb)
    lamb = np.broadcast_to(lam, wb.shape)
    expf = np.exp(-lamb * np.abs(xb))
    sgn = np.sign(xb)
    c2 = params.c**2
    out = np.empty(wb.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 0.5 * c2 * expf / (wb * sqwb)
    out[..., 0, 1] = 0.5 * sgn * expf / wb
    out[..., 1, 0] = c2 * out[..., 0, 1]
    out[..., 1, 1] = 0.5 * expf / sqwb
    delta_weight = np.where(xb == 0.0, params.nu / wb, 0.0 + 0.0j)
    if out.ndim == 2:
        return LaplaceGreenValue(out, complex(delta_weight))
    return LaplaceGreenValue(out, delta_weight)


def reflection_coefficient(s, params: ModelParams):
    """Boundary reflection factor (a2 + a1*lambda) / (a2 - a1*lambda)."""
    lam = np.asarray(lambda_of_s(s, params))
    num = params.a2 + params.a1 * lam
    den = params.a2 - params.a1 * lam
    scale = np.abs(params.a2) + np.abs(params.a1 * lam) + 1e-300
    tiny = np.abs(den) <= 1e-13 * scale
    if np.any(tiny):
        flat_s = np.broadcast_to(np.asarray(s, dtype=complex), lam.shape).ravel()
        bad = complex(flat_s[np.asarray(tiny).ravel().argmax()])
        raise PoleError(bad)
    r = num / den
    return r if r.ndim else complex(r)


def find_boundary_pole(params: ModelParams) -> float | None:
    """Positive real pole s* of the reflection coefficient, if any.

    Solves the quadratic s^2 = (a2/a1)^2 (nu s + c^2) obtained by squaring
    lambda(s) = a2/a1, then keeps only roots that actually satisfy
    a2 - a1 lambda(s) = 0 (the squaring step introduces a spurious root for
    every stable sign combination).  Returns None for Dirichlet, Neumann and
    the stable mixed class.
    """
    if params.a1 == 0.0 or params.a2 == 0.0:
        return None
    kappa = params.a2 / params.a1
    nu, c = params.nu, params.c
    disc = math.sqrt(kappa**4 * nu**2 + 4.0 * kappa**2 * c**2)
    roots = [0.5 * (kappa**2 * nu + disc), 0.5 * (kappa**2 * nu - disc)]
    for r in roots:
        if r <= 0.0:
            continue
        residual = abs(params.a2 - params.a1 * lambda_of_s(complex(r), params))
        if residual <= 1e-12 * (abs(params.a2) + abs(params.a1) + 1.0):
            return r
    return None


def laplace_green(x, y, s, params: ModelParams) -> LaplaceGreenValue:
    """Laplace-space half-line Green's function (smooth part plus delta).

    L[G](x - y, s) + R(s) L[G](x + y, s) diag(1, -1), broadcast over x, y, s.
    The image delta at x = -y never fires for interior arguments and is not
    reported; the diagonal delta (x = y) is returned via ``delta_weight``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0.0) or np.any(y < 0.0):
        raise ParameterError("laplace_green needs x >= 0 and y >= 0")
    direct = laplace_fundamental(x - y, s, params)
    mirror = laplace_fundamental(x + y, s, params)
    r = np.asarray(reflection_coefficient(s, params))
    value = direct.value + r[..., None, None] * mirror.value * np.array([1.0, -1.0])
    return LaplaceGreenValue(value, direct.delta_weight)
