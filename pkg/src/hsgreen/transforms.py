"""Independent numerical oracles: inverse Fourier and Laplace transforms.

These evaluators never use the closed-form leading-order kernels; they invert
the exact transform-space objects from :mod:`hsgreen.spectral` by quadrature,
so agreement with :mod:`hsgreen.kernels` is a genuine cross-check.

Inverse Fourier strategy
------------------------
The Fourier symbol of the fundamental solution does not vanish at large
wavenumber: its slow mode tends to exp(-c^2 t / nu) with algebraic 1/xi
corrections, so the raw integrand is not quadrature-friendly.  We subtract a
large-wavenumber model S(xi, t) built from Lorentzian profiles whose inverse
transforms are explicit decaying exponentials:

    S11 = q (1 + a11 L1),          a11 = (c^2/nu^2)(1 - c^2 t / nu)
    S22 = q a22 L1,                a22 = -c^2/nu^2
    S12 = -(i q / nu)  (A xi L1 + B xi L2),   S21 = c^2 S12
    L1 = 1/(b^2 + xi^2), L2 = 1/(4 b^2 + xi^2), b = c/nu, q = e^{-c^2 t/nu},
    A = 2 - c^2 t/(3 nu), B = 1 - A.

A and B match both the 1/xi and 1/xi^3 coefficients of the odd entries, so
the remaining integrand decays like xi^{-4} (even entries) and xi^{-5} (odd
entries); the subtracted part is added back in closed form.  The constant
piece of S11 is the persistent delta, reported separately.

Inverse Laplace strategy
------------------------
Default contour is the fixed parabolic (Talbot-style) contour, which wraps
the branch cut on the negative real axis; it is shifted right when the
reflection coefficient has a right-half-plane pole.  A truncated vertical
line (Bromwich) contour is available as an independent cross-check away from
the diagonal x = y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import KernelValue, ModelParams
from .errors import AccuracyError, ConfigurationError, ParameterError
from .spectral import find_boundary_pole, fourier_fundamental, laplace_green

CONTOURS = ("talbot", "line")


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for the inversion quadratures.

    xi_max:  truncation wavenumber for the Fourier inversion; None selects a
             tail-informed automatic value.
    n_xi:    Gauss-Legendre nodes per panel in the Fourier inversion.
    contour: "talbot" (parabolic, default) or "line" (shifted Bromwich).
    n_nodes: Talbot degree, or panels-per-unit-time for the line contour.
    abscissa: line-contour shift; None selects max(0, s*) + 1/t.
    tol:     target absolute accuracy; quadratures self-check against it.
    """

    xi_max: float | None = None
    n_xi: int = 10
    contour: str = "talbot"
    n_nodes: int = 32
    abscissa: float | None = None
    tol: float = 1e-8

    def __post_init__(self):
        if self.n_xi < 4 or self.n_nodes < 8:
            raise ConfigurationError("need n_xi >= 4 and n_nodes >= 8")
        if self.contour not in CONTOURS:
            raise ConfigurationError(f"contour must be one of {CONTOURS}")
        if self.xi_max is not None and self.xi_max <= 0:
            raise ConfigurationError("xi_max must be positive when given")
        if not (0 < self.tol < 1e-2):
            raise ConfigurationError("tol must lie in (0, 1e-2)")


DEFAULT_QUADRATURE = QuadratureConfig()


def _gauss_panels(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on the union of panels given by edges."""
    gx, gw = np.polynomial.legendre.leggauss(n)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def _edges(lo: float, hi: float, width: float) -> np.ndarray:
    n = max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, n + 1)


def _xi_grid(
    t: float, x_absmax: float, params: ModelParams, cfg: QuadratureConfig, refine: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Panel grid on [0, xi_max]: dense where the symbol oscillates, coarser
    on the algebraic tail.  ``refine`` halves the panel widths (error probe)."""
    c, nu = params.c, params.nu
    q = math.exp(-c**2 * t / nu)
    # Core: beyond xi_core the Gaussian-decaying modes are < 1e-18.
    xi_core = math.sqrt(83.0 / (nu * t)) + 2.0 * c / nu
    if cfg.xi_max is not None:
        xi_max = cfg.xi_max
    else:
        # Residual after subtraction decays like C_res / xi^4; pick xi_max so
        # the tail integral is below tol/4 (coefficient padded for safety).
        r = c**2 / nu**2
        c_res = q * (r**2 * (2.0 + 0.5 * (c**2 * t / nu) ** 2) + r) + 1e-30
        xi_max = (4.0 * c_res / (3.0 * math.pi * cfg.tol)) ** (1.0 / 3.0)
        xi_max = max(xi_max, 1.2 * xi_core + 5.0, 10.0 * c / nu)
    xi_core = min(xi_core, xi_max * 0.5)
    osc = x_absmax + c * t + 1.0
    w_core = min(5.0 / osc, xi_core / 6.0, 0.5 * c / nu) / refine
    w_tail = 5.0 / (x_absmax + 1.0) / refine
    nodes1, wts1 = _gauss_panels(_edges(0.0, xi_core, w_core), cfg.n_xi)
    nodes2, wts2 = _gauss_panels(_edges(xi_core, xi_max, w_tail), cfg.n_xi)
    return np.concatenate([nodes1, nodes2]), np.concatenate([wts1, wts2])


def _subtraction_coefficients(t: float, params: ModelParams):
    c, nu = params.c, params.nu
    q = math.exp(-c**2 * t / nu)
    b = c / nu
    a11 = (c**2 / nu**2) * (1.0 - c**2 * t / nu)
    a22 = -(c**2) / nu**2
    A = 2.0 - c**2 * t / (3.0 * nu)
    return q, b, a11, a22, A, 1.0 - A


def _fourier_smooth_grid(
    x: np.ndarray, t: float, params: ModelParams, cfg: QuadratureConfig, refine: int = 1
) -> np.ndarray:
    """Smooth part of the fundamental solution on an array of offsets."""
    x = np.asarray(x, dtype=float)
    xi, wts = _xi_grid(t, float(np.abs(x).max()), params, cfg, refine)
    F = fourier_fundamental(xi, t, params)
    q, b, a11, a22, A, B = _subtraction_coefficients(t, params)
    l1 = 1.0 / (b**2 + xi**2)
    l2 = 1.0 / (4.0 * b**2 + xi**2)
    odd_model = -(q / params.nu) * (A * xi * l1 + B * xi * l2)
    f11 = F[:, 0, 0].real - q * (1.0 + a11 * l1)
    f22 = F[:, 1, 1].real - q * a22 * l1
    h12 = F[:, 0, 1].imag - odd_model
    h21 = F[:, 1, 0].imag - params.c**2 * odd_model

    out = np.empty(x.shape + (2, 2))
    inv_pi = 1.0 / math.pi
    # Chunk the trig outer products to bound memory.
    step = max(1, int(4e6 / max(xi.size, 1)))
    for i in range(0, x.size, step):
        blk = x.ravel()[i : i + step]
        phase = np.outer(blk, xi)
        cosw = np.cos(phase) * wts
        sinw = np.sin(phase) * wts
        sl = slice(i, i + blk.size)
        flat = out.reshape(-1, 2, 2)
        flat[sl, 0, 0] = inv_pi * (cosw @ f11)
        flat[sl, 1, 1] = inv_pi * (cosw @ f22)
        flat[sl, 0, 1] = -inv_pi * (sinw @ h12)
        flat[sl, 1, 0] = -inv_pi * (sinw @ h21)
    # Closed-form transform of the subtracted model (minus its delta).
    ax = np.abs(x)
    e1 = np.exp(-b * ax)
    e2 = np.exp(-2.0 * b * ax)
    sg = np.sign(x)
    out[..., 0, 0] += q * a11 * e1 / (2.0 * b)
    out[..., 1, 1] += q * a22 * e1 / (2.0 * b)
    odd_x = (q / (2.0 * params.nu)) * sg * (A * e1 + B * e2)
    out[..., 0, 1] += odd_x
    out[..., 1, 0] += params.c**2 * odd_x
    return out


def _fourier_smooth_with_error(
    x: np.ndarray, t: float, params: ModelParams, cfg: QuadratureConfig
) -> tuple[np.ndarray, float]:
    coarse = _fourier_smooth_grid(x, t, params, cfg, refine=1)
    fine = _fourier_smooth_grid(x, t, params, cfg, refine=2)
    return fine, float(np.abs(fine - coarse).max())


def invert_fourier_fundamental(
    x, t: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> KernelValue:
    """Whole-line fundamental solution by Fourier inversion.

    Accepts scalar or array x; the smooth part has shape x.shape + (2, 2).
    The persistent delta exp(-c^2 t/nu) delta(x) diag(1, 0) is returned in the
    delta list.  Raises AccuracyError when the self-estimate misses cfg.tol.
    """
    if not (t > 0.0):
        raise ParameterError(f"need t > 0, got t={t}")
    xarr = np.atleast_1d(np.asarray(x, dtype=float))
    smooth, err = _fourier_smooth_with_error(xarr, t, params, cfg)
    if err > cfg.tol:
        raise AccuracyError("fourier inversion did not meet tolerance", err, cfg.tol)
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        smooth = smooth[0]
    q = math.exp(-params.c**2 * t / params.nu)
    return KernelValue(smooth=smooth, deltas=[(0.0, q * np.diag([1.0, 0.0]))])


# ---------------------------------------------------------------------------
# Inverse Laplace transforms
# ---------------------------------------------------------------------------


def _talbot_nodes(t: float, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed parabolic-contour nodes s_k and complex weights g_k such that
    f(t) = sum_k Re(g_k F(s_k)) for real-valued f."""
    r = 2.0 * M / (5.0 * t)
    theta = np.arange(1, M) * math.pi / M
    cot = np.cos(theta) / np.sin(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    g = (r / M) * np.exp(t * s) * (1.0 + 1j * sigma)
    s0 = np.array([r + 0.0j])
    g0 = np.array([0.5 * (r / M) * math.exp(r * t) + 0.0j])
    return np.concatenate([s0, s]), np.concatenate([g0, g])


def _laplace_shift(t: float, params: ModelParams) -> float:
    pole = find_boundary_pole(params)
    return 0.0 if pole is None else pole + 1.0 / t


def _invert_laplace_talbot(
    x: np.ndarray, y: np.ndarray, t: float, params: ModelParams, M: int
) -> np.ndarray:
    shift = _laplace_shift(t, params)
    s, g = _talbot_nodes(t, M)
    values = laplace_green(x[..., None], y[..., None], s + shift, params).value
    weighted = g[:, None, None] * values
    out = weighted.real.sum(axis=-3)
    if shift:
        out *= math.exp(shift * t)  # exp factored out of the shifted contour
    return out


def _invert_laplace_line(
    x: np.ndarray, y: np.ndarray, t: float, params: ModelParams, cfg: QuadratureConfig
) -> tuple[np.ndarray, float]:
    """Truncated vertical contour; returns (value, imaginary residue)."""
    pole = find_boundary_pole(params)
    a = cfg.abscissa if cfg.abscissa is not None else max(0.0, pole or 0.0) + 1.0 / t
    if pole is not None and a <= pole:
        raise ConfigurationError(f"line contour abscissa {a} is left of the pole {pole}")
    w_min = float(min(np.abs(x - y).min(), np.abs(x + y).min()))
    if w_min < 0.3:
        raise ConfigurationError(
            "line contour needs |x - y| >= 0.3 (integrand decays too slowly "
            f"near the diagonal), got {w_min:.3g}"
        )
    # Truncation so exp(-Re(lambda) w) has decayed: Re lambda ~ sqrt(w/(2 nu)).
    decay = (30.0 + a * t) / w_min
    omega_max = 2.0 * params.nu * decay**2 + 10.0 / t
    width = 4.0 / t * (32.0 / cfg.n_nodes)
    omega, wts = _gauss_panels(_edges(0.0, omega_max, width), 8)
    omega = np.concatenate([-omega[::-1], omega])
    wts = np.concatenate([wts[::-1], wts])
    s = a + 1j * omega
    values = laplace_green(x[..., None], y[..., None], s, params).value
    phase = (np.exp(s * t) * wts)[:, None, None] / (2.0 * math.pi)
    total = (phase * values).sum(axis=-3)
    resid = float(np.abs(total.imag).max() / max(np.abs(total.real).max(), 1e-300))
    return total.real, resid


def invert_laplace_green(
    x, y, t: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
):
    """Smooth part of the half-line Green's function by contour quadrature.

    Broadcasts over arrays x, y (same t).  Requires x != y pointwise (the
    delta on the diagonal is not representable by quadrature).  The parabolic
    contour self-checks by comparing two degrees and raises AccuracyError on
    failure; the line contour checks its imaginary residue instead.
    """
    if not (t > 0.0):
        raise ParameterError(f"need t > 0, got t={t}")
    xarr, yarr = np.broadcast_arrays(
        np.atleast_1d(np.asarray(x, dtype=float)), np.atleast_1d(np.asarray(y, dtype=float))
    )
    if np.any(xarr < 0.0) or np.any(yarr < 0.0):
        raise ParameterError("need x >= 0 and y >= 0")
    if np.any(xarr == yarr):
        raise ParameterError("invert_laplace_green needs x != y (smooth part only)")
    if cfg.contour == "talbot":
        out = _invert_laplace_talbot(xarr, yarr, t, params, cfg.n_nodes)
        probe = _invert_laplace_talbot(xarr, yarr, t, params, cfg.n_nodes + 8)
        err = float(np.abs(out - probe).max())
        if err > cfg.tol:
            raise AccuracyError("parabolic contour did not meet tolerance", err, cfg.tol)
        out = probe
    else:
        out, resid = _invert_laplace_line(xarr, yarr, t, params, cfg)
        if resid > 1e-9:
            raise AccuracyError("line contour imaginary residue too large", resid, 1e-9)
    if np.asarray(x).ndim == 0 and np.asarray(y).ndim == 0:
        return out[0]
    return out


def _exp_weighted_tail_integrals(
    u: np.ndarray, G: np.ndarray, gamma: float
) -> np.ndarray:
    """J(u_k) = int_{u_k}^{u_max} e^{-gamma (v - u_k)} G(v) dv on a uniform grid.

    Backward recurrence J_k = e^{-gamma h} J_{k+1} + local panel integral,
    with the panel integral taken over the linear interpolant of G (exact
    exponential moments), so every factor stays below unit scale.
    """
    h = u[1] - u[0]
    eh = math.exp(-gamma * h)
    c0 = (1.0 - eh) / gamma
    c1 = (1.0 - (1.0 + gamma * h) * eh) / gamma**2
    w_left = c0 - c1 / h
    w_right = c1 / h
    J = np.zeros_like(G)
    for k in range(u.size - 2, -1, -1):
        J[k] = eh * J[k + 1] + w_left * G[k] + w_right * G[k + 1]
    return J


def mirror_by_quadrature(
    w, t: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
):
    """Mirror kernel by direct quadrature of the image-source integral.

    G_mir(w, t) = (-G(w, t) + 2 gamma int_0^inf e^{-gamma z} G(w + z, t) dz)
                  diag(1, -1),

    with G evaluated by the Fourier oracle (smooth part; the integrand's
    delta never fires for w > 0).  Broadcasts over array w.  The z-integral
    is a one-sided exponential convolution, computed for all w at once by a
    backward recurrence over a shared fine grid.
    """
    from .core import BoundaryClass

    if params.boundary_class is not BoundaryClass.MIXED_STABLE:
        raise ParameterError("mirror_by_quadrature needs the stable mixed class")
    if not (t > 0.0):
        raise ParameterError(f"need t > 0, got t={t}")
    warr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(warr < 0.0):
        raise ParameterError("need w >= 0")
    gamma, c, nu = params.gamma, params.c, params.nu
    lo = float(warr.min())
    hi = float(warr.max()) + c * t + 12.0 * math.sqrt(nu * t) + 45.0 / gamma
    h0 = min(1.0 / gamma, math.sqrt(nu * t), 1.0) / 30.0

    def assemble(scale: int) -> np.ndarray:
        n = int(math.ceil((hi - lo) / (h0 / scale))) + 1
        u = np.linspace(lo, hi, n)
        G = _fourier_smooth_grid(u, t, params, cfg, refine=scale)
        J = _exp_weighted_tail_integrals(u, G, gamma)
        mir = (-G + 2.0 * gamma * J) * np.array([1.0, -1.0])
        out = np.empty(warr.shape + (2, 2))
        for i in range(2):
            for j in range(2):
                out[..., i, j] = np.interp(warr, u, mir[:, i, j])
        return out

    coarse = assemble(1)
    fine = assemble(2)
    err = float(np.abs(fine - coarse).max())
    if err > 10.0 * cfg.tol:
        raise AccuracyError("mirror quadrature did not meet tolerance", err, 10.0 * cfg.tol)
    if np.asarray(w).ndim == 0:
        return fine[0]
    return fine


def with_tolerance(cfg: QuadratureConfig, tol: float) -> QuadratureConfig:
    return replace(cfg, tol=tol)
