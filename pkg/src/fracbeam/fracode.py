"""Direct time integration of the fractionally damped single-mode oscillator.

The fractional term is discretized with the L1 scheme on a uniform grid
(order 2-alpha, built from piecewise-linear history interpolation), the
inertia with the average-acceleration Newmark method (gamma = 1/2,
beta = 1/4, non-dissipative, second order).  The unknown displacement at the
new time level enters the L1 sum only through the leading weight, so the
linear model needs one scalar solve per step and the nonlinear model one
scalar Newton iteration per step.

History sums are evaluated directly from a stored increment buffer; cost is
O(N^2) over N steps, which is fine at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constitutive import MaterialParams
from .errors import InsufficientDataError, StepFailureError
from .modes import ModalCoefficients

__all__ = [
    "GridSpec",
    "HarmonicForcing",
    "Trajectory",
    "EnvelopeFit",
    "l1_weights",
    "caputo_l1",
    "caputo_l1_series",
    "integrate_linear",
    "integrate_nonlinear",
    "envelope_fit",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid with n_steps intervals of width dt."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not math.isfinite(self.dt * self.n_steps):
            raise ValueError("total time dt * n_steps must be finite")

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class HarmonicForcing:
    """f(t) = amplitude * cos(frequency * t + phase), sampled exactly at nodes."""

    amplitude: float
    frequency: float
    phase: float = 0.0

    def values(self, t) -> np.ndarray:
        return self.amplitude * np.cos(self.frequency * np.asarray(t, dtype=float) + self.phase)


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid displacement/velocity/acceleration samples."""

    grid: GridSpec
    q: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.grid.times()


def l1_weights(alpha: float, n: int) -> np.ndarray:
    """L1 history weights b_j = (j+1)^(1-alpha) - j^(1-alpha), j = 0..n-1.

    Strictly decreasing with b_0 = 1 and telescoping sum n^(1-alpha).
    alpha = 1 is excluded: a classical first derivative takes a separate
    code path in the integrators.
    """
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    j = np.arange(n + 1, dtype=float)
    return np.diff(j ** (1.0 - alpha))


def caputo_l1(samples, dt: float, alpha: float) -> float:
    """L1 approximation of the order-alpha Caputo derivative at the last node.

        D^a q(t_n) ~= dt^(-a)/Gamma(2-a) * sum_j b_j (q_{n-j} - q_{n-j-1})

    Exact to round-off when the samples come from a piecewise-linear signal
    with kinks on grid nodes; order 2-alpha on smooth signals.
    """
    q = np.asarray(samples, dtype=float)
    if q.size < 2:
        raise ValueError("need at least two samples of history")
    n = q.size - 1
    b = l1_weights(alpha, n)
    incr = np.diff(q)
    return float(np.dot(b, incr[::-1]) * dt ** (-alpha) / math.gamma(2.0 - alpha))


def caputo_l1_series(samples, dt: float, alpha: float) -> np.ndarray:
    """L1 Caputo derivative on every node of a sampled history (zero at t=0)."""
    q = np.asarray(samples, dtype=float)
    if q.size < 2:
        raise ValueError("need at least two samples of history")
    n = q.size - 1
    b = l1_weights(alpha, n)
    out = np.zeros(n + 1)
    out[1:] = np.convolve(np.diff(q), b)[:n] * dt ** (-alpha) / math.gamma(2.0 - alpha)
    return out


def _forcing_samples(forcing, grid: GridSpec) -> np.ndarray:
    if forcing is None:
        return np.zeros(grid.n_steps + 1)
    if isinstance(forcing, HarmonicForcing):
        return forcing.values(grid.times())
    f = np.asarray(forcing, dtype=float)
    if f.shape != (grid.n_steps + 1,):
        raise ValueError(
            f"sampled forcing must have n_steps+1 = {grid.n_steps + 1} values, got {f.shape}"
        )
    return f


def integrate_linear(
    c_l: float,
    k_l: float,
    e_r: float,
    alpha: float,
    q0: float,
    v0: float,
    grid: GridSpec,
    forcing=None,
) -> Trajectory:
    """Solve q'' + E_r c_l D^alpha q + k_l q = f(t) from (q0, v0).

    The new displacement appears linearly in the Newmark/L1 closure, so each
    step is one scalar solve.  alpha = 1 runs the classical viscous path
    (D^1 q = q').  The initial acceleration comes from the equation at t = 0
    with D^alpha q(0) = 0.
    """
    if not (k_l > 0):
        raise ValueError(f"k_l must be positive, got {k_l}")
    if e_r < 0:
        raise ValueError(f"e_r must be non-negative, got {e_r}")
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    dt, n = grid.dt, grid.n_steps
    f = _forcing_samples(forcing, grid)
    q = np.empty(n + 1)
    v = np.empty(n + 1)
    a = np.empty(n + 1)
    q[0], v[0] = q0, v0
    w0 = 4.0 / dt**2
    damp = e_r * c_l

    if alpha == 1.0:
        a[0] = f[0] - damp * v0 - k_l * q0
        lhs = w0 + 2.0 * damp / dt + k_l
        for i in range(n):
            rhs = (f[i + 1] + w0 * (q[i] + dt * v[i]) + a[i]
                   + damp * (2.0 / dt * q[i] + v[i]))
            q1 = rhs / lhs
            a1 = w0 * (q1 - q[i] - dt * v[i]) - a[i]
            v[i + 1] = v[i] + 0.5 * dt * (a[i] + a1)
            q[i + 1], a[i + 1] = q1, a1
    else:
        a[0] = f[0] - k_l * q0
        b = l1_weights(alpha, max(n, 1))
        ca = damp * dt ** (-alpha) / math.gamma(2.0 - alpha)
        dq = np.empty(n)
        lhs = w0 + ca * b[0] + k_l
        for i in range(n):
            hist = np.dot(b[1:i + 1], dq[i - 1::-1]) if i > 0 else 0.0
            rhs = (f[i + 1] + w0 * (q[i] + dt * v[i]) + a[i]
                   + ca * (b[0] * q[i] - hist))
            q1 = rhs / lhs
            a1 = w0 * (q1 - q[i] - dt * v[i]) - a[i]
            v[i + 1] = v[i] + 0.5 * dt * (a[i] + a1)
            dq[i] = q1 - q[i]
            q[i + 1], a[i + 1] = q1, a1

    meta = {"model": "linear", "c_l": c_l, "k_l": k_l, "e_r": e_r, "alpha": alpha,
            "q0": q0, "v0": v0, "dt": dt, "n_steps": n}
    return Trajectory(grid=grid, q=q, v=v, a=a, metadata=meta)


def integrate_nonlinear(
    coeffs: ModalCoefficients,
    mat: MaterialParams,
    q0: float,
    v0: float,
    grid: GridSpec,
    base_accel: HarmonicForcing | None = None,
    newton_tol: float = 1e-10,
    max_newton: int = 50,
) -> Trajectory:
    """Integrate the full single-mode model under harmonic base acceleration.

    M_t q'' + Jnl (q'' q^2 + q q'^2) + K_l q + E_r C_l D^a q
        + 2 K_nl q^3 + (E_r C_nl / 2) (D^a q^3 + 3 q^2 D^a q) = -M_b Vb''(t)

    D^a q^3 is the L1 sum over the stored q^3 history (the operator applied
    to the cubed signal, not expanded).  Each step solves a scalar residual
    by damped Newton with a finite-difference slope; if Newton stalls, a
    sign-change bracket plus bisection is tried before giving up.
    """
    dt, n = grid.dt, grid.n_steps
    alpha, e_r = mat.alpha, mat.e_r
    mt, jnl = coeffs.m_modal, coeffs.j_nl
    kl, cl, knl, cnl, mb = coeffs.k_l, coeffs.c_l, coeffs.k_nl, coeffs.c_nl, coeffs.m_b
    t_nodes = grid.times()
    rhs_force = -mb * base_accel.values(t_nodes) if base_accel is not None else np.zeros(n + 1)

    q = np.empty(n + 1)
    v = np.empty(n + 1)
    a = np.empty(n + 1)
    q[0], v[0] = q0, v0
    classical = alpha == 1.0
    # governing equation at t = 0; the fractional history is empty, but the
    # classical path keeps its instantaneous viscous terms
    num0 = rhs_force[0] - jnl * q0 * v0**2 - kl * q0 - 2.0 * knl * q0**3
    if classical:
        num0 -= e_r * cl * v0 + 3.0 * e_r * cnl * q0**2 * v0
    a[0] = num0 / (mt + jnl * q0**2)

    if not classical:
        b = l1_weights(alpha, max(n, 1))
        ca = dt ** (-alpha) / math.gamma(2.0 - alpha)
        dq = np.empty(n)   # displacement increments
        dc = np.empty(n)   # q^3 increments
    w0 = 4.0 / dt**2

    for i in range(n):
        qi, vi, ai = q[i], v[i], a[i]
        ci = qi**3
        if not classical:
            hist_q = np.dot(b[1:i + 1], dq[i - 1::-1]) if i > 0 else 0.0
            hist_c = np.dot(b[1:i + 1], dc[i - 1::-1]) if i > 0 else 0.0
        fo = rhs_force[i + 1]

        def residual(u: float) -> float:
            au = w0 * (u - qi - dt * vi) - ai
            vu = 2.0 / dt * (u - qi) - vi
            if classical:
                dq_frac = vu
                dc_frac = 3.0 * u**2 * vu
            else:
                dq_frac = ca * (b[0] * (u - qi) + hist_q)
                dc_frac = ca * (b[0] * (u**3 - ci) + hist_c)
            return (mt * au + jnl * (au * u**2 + u * vu**2) + kl * u
                    + e_r * cl * dq_frac + 2.0 * knl * u**3
                    + 0.5 * e_r * cnl * (dc_frac + 3.0 * u**2 * dq_frac) - fo)

        u = qi + dt * vi + 0.5 * dt**2 * ai   # predictor
        r = residual(u)
        scale = mt * w0 * max(abs(qi), abs(dt * vi), 1.0)
        tol = max(newton_tol, 64.0 * np.finfo(float).eps * scale)
        converged = abs(r) < tol
        for _ in range(max_newton):
            if converged:
                break
            h = 1e-7 * max(1.0, abs(u))
            slope = (residual(u + h) - residual(u - h)) / (2.0 * h)
            if slope == 0.0:
                break
            step = -r / slope
            # damped update: halve until the residual actually shrinks
            lam = 1.0
            for _ in range(30):
                u_new = u + lam * step
                r_new = residual(u_new)
                if abs(r_new) < abs(r):
                    break
                lam *= 0.5
            else:
                break
            u, r = u_new, r_new
            converged = abs(r) < tol
        if not converged:
            u_b = _bisect_residual(residual, u, max(abs(qi) + abs(dt * vi), 1.0))
            if u_b is None:
                raise StepFailureError(i + 1, f"Newton stalled with |residual| = {abs(r):.3e}")
            u, r = u_b, residual(u_b)

        a1 = w0 * (u - qi - dt * vi) - ai
        v[i + 1] = vi + 0.5 * dt * (ai + a1)
        if not classical:
            dq[i] = u - qi
            dc[i] = u**3 - ci
        q[i + 1], a[i + 1] = u, a1

    meta = {"model": "nonlinear", "alpha": alpha, "e_r": e_r, "q0": q0, "v0": v0,
            "dt": dt, "n_steps": n, "m_modal": mt, "j_nl": jnl, "k_l": kl,
            "k_nl": knl, "m_b": mb,
            "base_accel": None if base_accel is None else
            (base_accel.amplitude, base_accel.frequency, base_accel.phase)}
    return Trajectory(grid=grid, q=q, v=v, a=a, metadata=meta)


def _bisect_residual(residual, center: float, width: float):
    """Expanding bracket search around ``center`` followed by bisection."""
    for grow in range(1, 12):
        w = width * 2.0**grow * 1e-3
        lo, hi = center - w, center + w
        rlo, rhi = residual(lo), residual(hi)
        if (rlo < 0) != (rhi < 0):
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                rm = residual(mid)
                if rm == 0.0 or hi - lo < 1e-15 * max(1.0, abs(mid)):
                    return mid
                if (rlo < 0) == (rm < 0):
                    lo, rlo = mid, rm
                else:
                    hi = mid
            return 0.5 * (lo + hi)
    return None


@dataclass(frozen=True)
class EnvelopeFit:
    """Local maxima of |q| in a trailing window plus two envelope fits."""

    peak_times: np.ndarray
    peak_amps: np.ndarray
    loglog_slope: float
    loglog_r2: float
    exp_rate: float
    exp_r2: float
    window: float


def _least_squares_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(intercept), float(r2)


def envelope_fit(traj: Trajectory, window: float = 0.5) -> EnvelopeFit:
    """Extract |q| peaks in the trailing ``window`` fraction and fit envelopes.

    Peaks come from a 3-point local-maximum test refined by a parabola
    through the three samples.  Two least-squares fits are reported:
    log(amp) against log(t) (power law) and against t (exponential).
    """
    if not (0 < window <= 1):
        raise ValueError(f"window must lie in (0, 1], got {window}")
    t = traj.t
    aq = np.abs(traj.q)
    n = len(aq) - 1
    i0 = max(1, int(math.floor((1.0 - window) * n)))
    pk_t, pk_a = [], []
    for i in range(i0, n):
        if aq[i] >= aq[i - 1] and aq[i] > aq[i + 1]:
            y0, y1, y2 = aq[i - 1], aq[i], aq[i + 1]
            curv = y0 - 2.0 * y1 + y2
            off = 0.5 * (y0 - y2) / curv if curv != 0.0 else 0.0
            pk_t.append(t[i] + off * traj.grid.dt)
            pk_a.append(y1 - 0.25 * (y0 - y2) * off)
    if len(pk_t) < 5:
        raise InsufficientDataError(
            f"found {len(pk_t)} peaks in the window, need at least 5"
        )
    pk_t = np.asarray(pk_t)
    pk_a = np.asarray(pk_a)
    log_a = np.log(pk_a)
    ll_slope, _, ll_r2 = _least_squares_line(np.log(pk_t), log_a)
    ex_slope, _, ex_r2 = _least_squares_line(pk_t, log_a)
    return EnvelopeFit(
        peak_times=pk_t,
        peak_amps=pk_a,
        loglog_slope=ll_slope,
        loglog_r2=ll_r2,
        exp_rate=-ex_slope,
        exp_r2=ex_r2,
        window=window,
    )
