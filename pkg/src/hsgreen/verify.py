"""Quantitative verification harnesses.

Every harness turns an asymptotic claim into a falsifiable numeric check:
"O(1) bound" becomes "the sup of LHS/RHS over a grid is finite and moves by
at most 10% under one grid refinement"; "decay rate" becomes "a log-log fit
lands within a stated window".  Reports carry every number the pass/fail
verdict is computed from, so a report is reproducible from its manifest.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BoundaryClass,
    BoundEnvelope,
    Grid1D,
    ModelParams,
    Trajectory,
    a0_profile,
    psi_envelope,
    theta_envelope,
)
from .errors import AccuracyError, ParameterError, UsageError
from .solver import InitialData, SolverConfig, make_initial_data, solve_linear
from .spectral import find_boundary_pole
from .transforms import DEFAULT_QUADRATURE, QuadratureConfig, invert_laplace_green

#: Uniform refinement-stability criterion: the sup ratio may move by at most
#: this relative amount under one 2x grid refinement.
STABILITY_RTOL = 0.10


@dataclass
class VerificationReport:
    name: str
    parameters: dict
    status: str  # "pass" | "fail" | "inconclusive"
    sup_ratio: float | None = None
    fitted: dict = field(default_factory=dict)
    grid_levels: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, path: str) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, default=float)
        return path


def _write_ratio_csv(path: str, rows: list[tuple]) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write("x,y_or_s,t,lhs,rhs,ratio\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return path


def _stable(sup_coarse: float, sup_fine: float) -> bool:
    return abs(sup_fine - sup_coarse) <= STABILITY_RTOL * abs(sup_coarse)


# ---------------------------------------------------------------------------
# Pointwise Green's-function envelope
# ---------------------------------------------------------------------------


def pointwise_envelope(
    x, y, t, params: ModelParams, env: BoundEnvelope, alpha: int | None = None
):
    """Three-ridge Gaussian envelope plus exponential tails (unit constants).

    t^(-alpha/2) [ e^{-(x-y+ct)^2/(2 nu t)} + e^{-(x-y-ct)^2/(2 nu t)}
                   + e^{-(x+y-ct)^2/((2 nu + eps) t)} ] / sqrt(nu t)
    + e^{-(|x-y|+t)/C} + e^{-(|x+y|+t)/C}
    """
    a = env.alpha if alpha is None else alpha
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    c, nu = params.c, params.nu
    ridge = (
        np.exp(-((x - y + c * t) ** 2) / (2.0 * nu * t))
        + np.exp(-((x - y - c * t) ** 2) / (2.0 * nu * t))
        + np.exp(-((x + y - c * t) ** 2) / ((2.0 * nu + env.eps) * t))
    )
    val = t ** (-a / 2.0) * ridge / np.sqrt(nu * t)
    val = val + np.exp(-(np.abs(x - y) + t) / env.bigC)
    val = val + np.exp(-(np.abs(x + y) + t) / env.bigC)
    return val if val.ndim else float(val)


def _green_ratio_sup(
    x_grid: np.ndarray,
    y_grid: np.ndarray,
    t_grid: np.ndarray,
    params: ModelParams,
    env: BoundEnvelope,
    alpha: int,
    cfg: QuadratureConfig,
) -> tuple[float, tuple, list]:
    sup, arg = -np.inf, None
    rows = []
    for t in t_grid:
        X, Y = np.meshgrid(x_grid, y_grid, indexing="ij")
        if alpha == 0:
            keep = X != Y
            xs, ys = X[keep], Y[keep]
            vals = invert_laplace_green(xs, ys, float(t), params, cfg)
        else:
            # Keep the whole five-point stencil inside x >= 0 and off x = y.
            h = math.sqrt(params.nu * t) / 20.0
            keep = X >= 2.0 * h
            for k in (-2, -1, 1, 2):
                keep &= np.abs(X + k * h - Y) > 1e-9
            keep &= X != Y
            xs, ys = X[keep], Y[keep]
            stencil = [
                invert_laplace_green(xs + k * h, ys, float(t), params, cfg)
                for k in (-2, -1, 1, 2)
            ]
            vals = (stencil[0] - 8.0 * stencil[1] + 8.0 * stencil[2] - stencil[3]) / (12.0 * h)
        lhs = np.abs(vals).max(axis=(-2, -1))
        rhs = pointwise_envelope(xs, ys, float(t), params, env, alpha=alpha)
        ratio = lhs / rhs
        k = int(np.argmax(ratio))
        if ratio[k] > sup:
            sup, arg = float(ratio[k]), (float(xs[k]), float(ys[k]), float(t))
        step = max(1, ratio.size // 200)
        rows.extend(
            (xs[i], ys[i], t, lhs[i], rhs[i], ratio[i]) for i in range(0, ratio.size, step)
        )
    return sup, arg, rows


def green_bound_report(
    params: ModelParams,
    x_grid,
    y_grid,
    t_grid,
    alpha: int = 0,
    envelope: BoundEnvelope | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    out_dir: str | None = None,
) -> VerificationReport:
    """Sup of |smooth Green's function| (or its x-derivative) over the
    three-ridge envelope; passes when finite, refinement-stable, and attained
    near one of the acoustic ridges.

    The transform oracle used here is independently validated against the
    narrow-pulse solver columns in the acceptance suite.
    """
    if params.boundary_class is BoundaryClass.MIXED_UNSTABLE:
        raise UsageError("green_bound_report needs a stable boundary class")
    if alpha not in (0, 1):
        raise ParameterError("alpha must be 0 or 1")
    env = envelope or BoundEnvelope(alpha=alpha)
    x_grid = np.asarray(x_grid, dtype=float)
    y_grid = np.asarray(y_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)

    def refined(g: np.ndarray) -> np.ndarray:
        mid = 0.5 * (g[:-1] + g[1:])
        return np.sort(np.concatenate([g, mid]))

    try:
        sup_c, arg_c, rows = _green_ratio_sup(x_grid, y_grid, t_grid, params, env, alpha, cfg)
        sup_f, arg_f, _ = _green_ratio_sup(
            refined(x_grid), refined(y_grid), refined(t_grid), params, env, alpha, cfg
        )
    except AccuracyError as exc:
        return VerificationReport(
            name=f"green_bound_alpha{alpha}",
            parameters={"params": dataclasses.asdict(params), "alpha": alpha},
            status="inconclusive",
            details={"reason": str(exc)},
        )
    x0, y0, t0 = arg_f
    ridge_sigma = abs(
        min(abs(x0 - y0 - params.c * t0), abs(x0 - y0 + params.c * t0),
            abs(x0 + y0 - params.c * t0))
    ) / math.sqrt((2.0 * params.nu + env.eps) * t0)
    on_ridge = ridge_sigma <= 3.0
    status = "pass" if (np.isfinite(sup_f) and _stable(sup_c, sup_f) and on_ridge) else "fail"
    report = VerificationReport(
        name=f"green_bound_alpha{alpha}",
        parameters={
            "params": dataclasses.asdict(params),
            "alpha": alpha,
            "envelope": dataclasses.asdict(env),
        },
        status=status,
        sup_ratio=sup_f,
        grid_levels=[
            {"nx": x_grid.size, "ny": y_grid.size, "nt": t_grid.size, "sup": sup_c},
            {"nx": 2 * x_grid.size - 1, "ny": 2 * y_grid.size - 1,
             "nt": 2 * t_grid.size - 1, "sup": sup_f},
        ],
        tolerances={"stability_rtol": STABILITY_RTOL, "ridge_sigmas": 3.0},
        details={
            "sup_location": {"x": x0, "y": y0, "t": t0},
            "ridge_distance_sigmas": ridge_sigma,
            "coarse_location": {"x": arg_c[0], "y": arg_c[1], "t": arg_c[2]},
        },
    )
    if out_dir:
        report.artifacts.append(
            _write_ratio_csv(os.path.join(out_dir, f"green_bound_alpha{alpha}.csv"), rows)
        )
    return report


# ---------------------------------------------------------------------------
# Instability dichotomy
# ---------------------------------------------------------------------------


def instability_report(
    params: ModelParams, cfg: SolverConfig, out_dir: str | None = None
) -> VerificationReport:
    """Measured exponential growth rate against the reflection-coefficient
    pole; pass when they agree within 5% over the late-time window."""
    if params.boundary_class is not BoundaryClass.MIXED_UNSTABLE:
        raise UsageError("instability_report needs a1*a2 > 0 (unstable mixed class)")
    pole = find_boundary_pole(params)
    spec = InitialData(
        kind="gaussian", amplitude=0.01, center=min(5.0, cfg.grid.L / 8.0), width=1.0,
        components=("rho",),
    )
    init = make_initial_data(spec, cfg.grid, params)
    times = np.linspace(0.0, cfg.t_end, max(cfg.n_snapshots, 25))
    traj = solve_linear(init, params, cfg, output_times=times)
    ts = traj.times
    norms = np.array([float(np.abs(s.m).max()) for s in traj.states])
    window = ts >= cfg.t_end / 2.0
    # Far-boundary contamination: the growing mode is a boundary layer at
    # x = 0; energy reaching the artificial boundary poisons the fit.
    far = np.array(
        [float(np.abs(s.m[-cfg.grid.nx // 10 :]).max()) for s in traj.states]
    )
    contaminated = bool(np.any(far[window] > 1e-3 * norms[window]))
    slope, intercept = np.polyfit(ts[window], np.log(norms[window]), 1)
    rel_err = abs(slope - pole) / pole
    if contaminated:
        status = "inconclusive"
    else:
        status = "pass" if rel_err <= 0.05 else "fail"
    report = VerificationReport(
        name="instability",
        parameters={"params": dataclasses.asdict(params), "t_end": cfg.t_end},
        status=status,
        fitted={"growth_rate": float(slope), "pole": float(pole),
                "relative_error": float(rel_err)},
        tolerances={"rate_rtol": 0.05},
        details={"window": [float(ts[window][0]), float(ts[window][-1])],
                 "contaminated": contaminated},
    )
    if out_dir:
        rows = [(0.0, 0.0, t, n, math.exp(intercept + slope * t), 1.0)
                for t, n in zip(ts, norms)]
        report.artifacts.append(
            _write_ratio_csv(os.path.join(out_dir, "instability_norms.csv"), rows)
        )
    return report


# ---------------------------------------------------------------------------
# Nonlinear decay diagnostics
# ---------------------------------------------------------------------------


def _window_mask(grid: Grid1D, x_max_fraction: float) -> np.ndarray:
    return grid.x <= x_max_fraction * grid.L


def ansatz_M(
    traj: Trajectory, params: ModelParams, x_max_fraction: float = 0.85
) -> tuple[np.ndarray, np.ndarray]:
    """Running weighted sup-norm series

    M(T) = sup_{t <= T} [ ||U / A0||_inf + ||(t+1)^(1/4) U_x / A0||_inf ],

    with U = (rho - 1, m) and the derivative reconstructed by central
    differences; the sponge region is excluded from the sups."""
    keep = _window_mask(traj.grid, x_max_fraction)
    x = traj.grid.x
    times, series = [], []
    running = 0.0
    for st in traj.states:
        u = st.rho - 1.0
        a0 = a0_profile(x[keep], st.t, params.c)
        amp = np.maximum(np.abs(u), np.abs(st.m))[keep] / a0
        ux = np.gradient(u, x)[keep]
        mx = np.gradient(st.m, x)[keep]
        damp = (st.t + 1.0) ** 0.25 * np.maximum(np.abs(ux), np.abs(mx)) / a0
        running = max(running, float(amp.max() + damp.max()))
        times.append(st.t)
        series.append(running)
    return np.array(times), np.array(series)


def _final_quarter_growth(series: np.ndarray) -> float:
    n4 = max(1, series.size // 4)
    base = series[-n4]
    return float((series[-1] - base) / base) if base else 0.0


def ansatz_report(
    traj: Trajectory, params: ModelParams, out_dir: str | None = None
) -> VerificationReport:
    times, series = ansatz_M(traj, params)
    growth = _final_quarter_growth(series)
    status = "pass" if growth <= 0.05 else "fail"
    report = VerificationReport(
        name="ansatz_M",
        parameters={"params": dataclasses.asdict(params)},
        status=status,
        fitted={"M_final": float(series[-1]), "final_quarter_growth": growth},
        tolerances={"plateau_growth": 0.05},
        details={"times": times.tolist(), "M": series.tolist()},
    )
    if out_dir:
        rows = [(0.0, 0.0, t, m, m, 1.0) for t, m in zip(times, series)]
        report.artifacts.append(
            _write_ratio_csv(os.path.join(out_dir, "ansatz_M.csv"), rows)
        )
    return report


def decay_report(
    traj: Trajectory,
    params: ModelParams,
    p_list=(2, 4, math.inf),
    t_min: float = 5.0,
    x_max_fraction: float = 0.85,
    out_dir: str | None = None,
) -> VerificationReport:
    """Log-log decay-rate fits of the perturbation norms.

    Pass requires each fitted slope of ||(rho-1, m)(., t)||_p to sit within
    0.1 of -(1/2)(1 - 1/p), the weighted sup-norm

        sup_x |U| [(x - c(t+1))^2 + (t+1)]^(1/2)

    to plateau (final-quarter growth <= 5%), and the ansatz series M(T) to
    plateau.  The derivative weighted norm (extra (1+t)^(-1/4)) is reported.
    p = 1 is outside the valid range and is refused.
    """
    for p in p_list:
        if p <= 1:
            raise ParameterError(f"L^p decay rates hold for p in (1, inf], got p={p}")
    ts_all = traj.times
    fit_mask = ts_all >= t_min
    ts = ts_all[fit_mask]
    if ts.size < 4 or ts[-1] / max(ts[0], 1e-12) < 10.0:
        return VerificationReport(
            name="decay",
            parameters={"p_list": [float(p) for p in p_list]},
            status="inconclusive",
            details={"reason": "fit window must span at least one decade in t"},
        )
    keep = _window_mask(traj.grid, x_max_fraction)
    x = traj.grid.x
    norms = {p: [] for p in p_list}
    wsup, wsup_dx = [], []
    for st in traj.states:
        mag = np.sqrt((st.rho - 1.0) ** 2 + st.m**2)[keep]
        for p in p_list:
            if math.isinf(p):
                norms[p].append(float(mag.max()))
            else:
                norms[p].append(float(np.trapezoid(mag**p, x[keep]) ** (1.0 / p)))
        weight = np.sqrt((x[keep] - params.c * (st.t + 1.0)) ** 2 + (st.t + 1.0))
        amp = np.maximum(np.abs(st.rho - 1.0), np.abs(st.m))[keep]
        wsup.append(float((amp * weight).max()))
        ux = np.gradient(st.rho - 1.0, x)[keep]
        mx = np.gradient(st.m, x)[keep]
        damp = np.maximum(np.abs(ux), np.abs(mx))
        wsup_dx.append(float((damp * weight).max() * (st.t + 1.0) ** 0.25))

    logt = np.log(ts + 1.0)
    fitted, slope_ok = {}, True
    for p in p_list:
        vals = np.log(np.asarray(norms[p])[fit_mask])
        coef, cov = np.polyfit(logt, vals, 1, cov=True)
        target = -0.5 * (1.0 - (0.0 if math.isinf(p) else 1.0 / p))
        band = 2.0 * math.sqrt(max(cov[0, 0], 0.0))
        key = "Linf" if math.isinf(p) else f"L{p:g}"
        fitted[key] = {"slope": float(coef[0]), "target": target, "band": band}
        slope_ok = slope_ok and abs(coef[0] - target) <= 0.1
    slopes = [fitted[k]["slope"] for k in fitted]
    monotone = all(s1 > s2 for s1, s2 in zip(slopes, slopes[1:]))
    wsup_arr = np.asarray(wsup)[fit_mask]
    wsup_growth = _final_quarter_growth(wsup_arr)
    _, m_series = ansatz_M(traj, params, x_max_fraction)
    m_growth = _final_quarter_growth(m_series)
    status = "pass" if (slope_ok and wsup_growth <= 0.05 and m_growth <= 0.05) else "fail"
    report = VerificationReport(
        name="decay",
        parameters={
            "params": dataclasses.asdict(params),
            "p_list": [float(p) for p in p_list],
            "t_window": [float(ts[0]), float(ts[-1])],
        },
        status=status,
        fitted=fitted,
        tolerances={"slope_window": 0.1, "plateau_growth": 0.05},
        details={
            "weighted_sup_final": float(wsup_arr[-1]),
            "weighted_sup_growth": wsup_growth,
            "weighted_sup_dx_final": float(np.asarray(wsup_dx)[fit_mask][-1]),
            "M_final": float(m_series[-1]),
            "M_growth": m_growth,
            "slopes_monotone_in_p": monotone,
        },
    )
    if out_dir:
        rows = [
            (0.0, 0.0, t) + tuple(norms[p][i] for p in p_list)
            for i, t in enumerate(ts_all)
        ]
        path = os.path.join(out_dir, "decay_norms.csv")
        os.makedirs(out_dir, exist_ok=True)
        with open(path, "w") as fh:
            fh.write("x,y_or_s,t," + ",".join(
                "Linf" if math.isinf(p) else f"L{p:g}" for p in p_list) + "\n")
            for row in rows:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        report.artifacts.append(path)
    return report


# ---------------------------------------------------------------------------
# Convolution lemma checkers
# ---------------------------------------------------------------------------


def _merged_panels(windows: list[tuple[float, float, float]], n: int = 8):
    """Gauss nodes over a union of (lo, hi, width) windows (overlaps merged)."""
    ivs = sorted((lo, hi) for lo, hi, _ in windows if hi > lo)
    merged = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    nodes, weights = [], []
    gx, gw = np.polynomial.legendre.leggauss(n)
    for lo, hi in merged:
        width = min(w for alo, ahi, w in windows if alo < hi and ahi > lo)
        edges = np.linspace(lo, hi, max(1, int(math.ceil((hi - lo) / width))) + 1)
        half = 0.5 * np.diff(edges)
        mids = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mids[:, None] + half[:, None] * gx[None, :]).ravel())
        weights.append((half[:, None] * gw[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def lemma_initial_data_check(
    d0: float,
    r: float,
    e_const: float,
    x_grid,
    t_grid,
    refine: int = 1,
    out_dir: str | None = None,
) -> VerificationReport:
    """Gaussian-vs-algebraic convolution bound checker.

    I(x, t) = int e^{-(x-y)^2/(d0 (t+1))} / sqrt(t+1) (1+y^2)^{-r} dy is
    compared against e^{-x^2/(E (t+1))}/sqrt(t+1) + (t+1+x^2)^{-r}; the sup
    ratio must be finite and refinement-stable.  Requires E > d0, r > 1/2.
    """
    if not (r > 0.5):
        raise ParameterError(f"hypothesis needs r > 1/2, got r={r}")
    if not (e_const > d0 > 0.0):
        raise ParameterError(f"hypothesis needs E > d0 > 0, got E={e_const}, d0={d0}")
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)

    def sup_ratio(scale: int) -> tuple[float, list]:
        sup = -np.inf
        rows = []
        for t in t_grid:
            width_g = math.sqrt(d0 * (t + 1.0))
            for x in x_grid:
                wins = [
                    (x - 9.0 * width_g, x + 9.0 * width_g, width_g / (4.0 * scale)),
                    (-30.0, 30.0, 0.5 / scale),
                ]
                y, wts = _merged_panels(wins)
                integ = np.exp(-((x - y) ** 2) / (d0 * (t + 1.0))) * (1.0 + y**2) ** (-r)
                lhs = float(wts @ integ) / math.sqrt(t + 1.0)
                rhs = math.exp(-(x**2) / (e_const * (t + 1.0))) / math.sqrt(t + 1.0)
                rhs += (t + 1.0 + x**2) ** (-r)
                rows.append((x, 0.0, t, lhs, rhs, lhs / rhs))
                sup = max(sup, lhs / rhs)
        return sup, rows

    sup_c, rows = sup_ratio(refine)
    sup_f, _ = sup_ratio(2 * refine)
    # Core-region diagnostic: I <= O(1)/sqrt(t+1) for |x| <= sqrt(t+1).
    core = [
        row[3] * math.sqrt(row[2] + 1.0)
        for row in rows
        if abs(row[0]) <= math.sqrt(row[2] + 1.0)
    ]
    status = "pass" if (np.isfinite(sup_f) and _stable(sup_c, sup_f)) else "fail"
    report = VerificationReport(
        name="lemma_initial_data",
        parameters={"d0": d0, "r": r, "E": e_const},
        status=status,
        sup_ratio=float(sup_f),
        grid_levels=[{"refine": refine, "sup": sup_c}, {"refine": 2 * refine, "sup": sup_f}],
        tolerances={"stability_rtol": STABILITY_RTOL},
        details={"core_sup_scaled": float(max(core)) if core else None},
    )
    if out_dir:
        report.artifacts.append(
            _write_ratio_csv(os.path.join(out_dir, "lemma_initial_data.csv"), rows)
        )
    return report


def _wave_kernel_lhs(
    x: np.ndarray,
    t: float,
    alpha: float,
    alpha_prime: float,
    beta: float,
    nu: float,
    lam: float,
    lam_prime: float,
    scale: int,
) -> np.ndarray:
    """Regularized space-time convolution

    int_0^t int (t-s+1)^{-alpha/2} e^{-(x-y-lam(t-s))^2/(nu(t-s+1))}
              (s+1)^{-beta/2} psi^{3/2}(y, s; lam') dy ds,

    vectorized over the x grid.  All temporal powers and the Gaussian
    variance use (t - s + 1); the drift keeps (t - s).  The unregularized
    kernel diverges at the upper limit once alpha - alpha' reaches 3, which
    is exactly the regime the end-to-end estimates need.
    """
    s_nodes, s_wts = _merged_panels([(0.0, t, max(t / (36.0 * scale), 1e-3))], n=6)
    y_lo = min(float(x.min()) - max(lam, 0.0) * t, lam_prime * (t + 1.0))
    y_hi = max(float(x.max()) - min(lam, 0.0) * t, lam_prime * (t + 1.0))
    pad = 10.0 * math.sqrt((nu + 1.0) * (t + 1.0))
    y, y_wts = _merged_panels(
        [(y_lo - pad, y_hi + pad, min(math.sqrt(nu), 1.0) * 0.5 / scale)], n=6
    )
    psi_y = psi_envelope(y[None, :], s_nodes[:, None], lam_prime, 1.5)
    out = np.zeros(x.size)
    for k, (s, ws) in enumerate(zip(s_nodes, s_wts)):
        tau = t - s
        pref = (tau + 1.0) ** (-(alpha - alpha_prime) / 2.0 - alpha_prime / 2.0)
        gauss = np.exp(-((x[:, None] - y[None, :] - lam * tau) ** 2) / (nu * (tau + 1.0)))
        out += ws * pref * (s + 1.0) ** (-beta / 2.0) * (gauss @ (y_wts * psi_y[k]))
    return out


def _lemma42_rhs(x, t, alpha, beta, nu, lam, eps):
    gam = alpha + min(beta, 1.5) - 1.5
    sig = min(alpha, 3.0) + min(beta, 2.0) - 3.0
    logt = math.log(t + 1.0)
    rhs = theta_envelope(x, t, lam, nu + eps, gam)
    rhs = rhs + (t + 1.0) ** (-sig / 2.0) * psi_envelope(x, t, lam, 1.5)
    branches = {"theta_log": beta == 1.5, "psi_log": alpha == 3.0 or beta == 2.0}
    if branches["theta_log"]:
        rhs = rhs + theta_envelope(x, t, lam, nu + eps, gam) * logt
    if branches["psi_log"]:
        rhs = rhs + (t + 1.0) ** (-sig / 2.0) * psi_envelope(x, t, lam, 1.5) * logt
    return rhs, branches, {"gamma_exponent": gam, "sigma_exponent": sig}


def _lemma43_rhs(x, t, alpha, beta, nu, lam, lam_prime, eps, K):
    gam = alpha + 0.5 * min(beta, 1.5) - 0.75
    sig = alpha + min(beta, 2.0) - 3.0
    sig_p = min(alpha, 3.0) + beta - 3.0
    m3 = min(alpha, 3.0) / 3.0
    logt = math.log(t + 1.0)
    tp = t + 1.0
    u = x - lam * tp
    u_p = x - lam_prime * tp
    rhs = theta_envelope(x, t, lam, nu + eps, gam)
    rhs = rhs + tp ** (-sig / 2.0) * (u**2 + tp ** (5.0 / 3.0 - min(beta, 2.0) / 3.0)) ** (-0.75)
    third = (
        tp ** (-sig_p / 2.0)
        * psi_envelope(x, t, lam_prime, 1.5) ** m3
        * (u**2 + tp**2) ** (-0.75 * (1.0 - m3))
    )
    branches = {"alpha_3": alpha == 3.0, "beta_3_2": beta == 1.5, "beta_2": beta == 2.0}
    if branches["alpha_3"]:
        third = third * (1.0 + logt)
    rhs = rhs + third
    lo = min(lam, lam_prime) * tp + K * math.sqrt(tp)
    hi = max(lam, lam_prime) * tp - K * math.sqrt(tp)
    zone = (x >= lo) & (x <= hi)
    with np.errstate(divide="ignore"):
        zone_term = np.where(
            zone,
            np.abs(u) ** (-0.5 * min(beta, 2.5) - 0.25)
            * np.abs(u_p) ** (-0.5 * (alpha - 1.0)),
            0.0,
        )
    rhs = rhs + zone_term
    if branches["beta_3_2"]:
        rhs = rhs + theta_envelope(x, t, lam, nu + eps, alpha) * logt
    if branches["beta_2"]:
        rhs = rhs + tp ** (-0.5 * (alpha - 1.0)) * psi_envelope(x, t, lam, 1.5) * logt
    extras = {
        "gamma_exponent": gam,
        "sigma_exponent": sig,
        "sigma_prime_exponent": sig_p,
        "zone_bounds": [float(lo), float(hi)],
        "zone_fraction": float(zone.mean()),
    }
    return rhs, branches, extras


def lemma_wave_interaction_check(
    kind: str,
    alpha: float,
    alpha_prime: float,
    beta: float,
    nu: float,
    lam: float,
    lam_prime: float | None = None,
    t_values=(4.0, 16.0, 48.0),
    n_x: int = 41,
    eps: float = 0.5,
    K: float | None = None,
    out_dir: str | None = None,
) -> VerificationReport:
    """Space-time wave-interaction convolution against the lemma envelopes.

    kind "same-speed" uses the single-speed envelope table; "cross-speed"
    the two-speed table with its characteristic-zone term.  Hypothesis
    violations are refused.  The selected logarithmic branches are logged so
    a wrong-branch assembly is visible in the report.
    """
    if kind not in ("same-speed", "cross-speed"):
        raise ParameterError("kind must be 'same-speed' or 'cross-speed'")
    if not (alpha >= alpha_prime >= 0.0 and beta >= 0.0 and nu > 0.0):
        raise ParameterError("hypothesis violated: need alpha >= alpha' >= 0, beta >= 0")
    if alpha - alpha_prime > 3.0:
        raise ParameterError("hypothesis violated: need alpha - alpha' <= 3")
    if kind == "same-speed":
        lam_prime = lam
    else:
        if lam_prime is None or lam_prime == lam:
            raise ParameterError("cross-speed needs lam' != lam")
        if alpha < 1.0:
            raise ParameterError("hypothesis violated: cross-speed needs alpha >= 1")
        if K is None:
            K = 2.0 * abs(lam - lam_prime) + 1.0
        elif K <= 2.0 * abs(lam - lam_prime):
            raise ParameterError("hypothesis violated: need K > 2|lam - lam'|")

    def sweep(scale: int):
        sup = -np.inf
        rows = []
        branches = extras = None
        for t in t_values:
            tp = t + 1.0
            lo = min(lam, lam_prime) * tp - 12.0 * math.sqrt(tp)
            hi = max(lam, lam_prime) * tp + 12.0 * math.sqrt(tp)
            x = np.linspace(lo, hi, n_x)
            lhs = _wave_kernel_lhs(x, t, alpha, alpha_prime, beta, nu, lam, lam_prime, scale)
            if kind == "same-speed":
                rhs, branches, extras = _lemma42_rhs(x, t, alpha, beta, nu, lam, eps)
            else:
                rhs, branches, extras = _lemma43_rhs(
                    x, t, alpha, beta, nu, lam, lam_prime, eps, K
                )
            ratio = lhs / rhs
            sup = max(sup, float(ratio.max()))
            rows.extend((x[i], 0.0, t, lhs[i], rhs[i], ratio[i]) for i in range(x.size))
        return sup, rows, branches, extras

    sup_c, rows, branches, extras = sweep(1)
    sup_f, _, _, _ = sweep(2)
    status = "pass" if (np.isfinite(sup_f) and _stable(sup_c, sup_f)) else "fail"
    name = "lemma_wave_same_speed" if kind == "same-speed" else "lemma_wave_cross_speed"
    report = VerificationReport(
        name=name,
        parameters={
            "alpha": alpha, "alpha_prime": alpha_prime, "beta": beta,
            "nu": nu, "lam": lam, "lam_prime": lam_prime, "eps": eps, "K": K,
            "t_values": list(t_values),
        },
        status=status,
        sup_ratio=float(sup_f),
        grid_levels=[{"refine": 1, "sup": sup_c}, {"refine": 2, "sup": sup_f}],
        tolerances={"stability_rtol": STABILITY_RTOL},
        details={"log_branches": branches, **(extras or {})},
    )
    if out_dir:
        report.artifacts.append(
            _write_ratio_csv(os.path.join(out_dir, f"{name}.csv"), rows)
        )
    return report
