"""Slow-flow (multiple-scales) analysis of the single-mode oscillator.

First-order averaging of the weakly nonlinear, fractionally damped mode gives
closed-form slow equations for the response amplitude a and phase.  For free
vibration the amplitude obeys a Bernoulli equation

    da/dT = -(p a + r a^3),
    p = (c_l/2)   E_r w0^(a-1) sin(a pi/2),
    r = (3 c_nl/8) E_r w0^(a-1) sin(a pi/2),

solved in closed form here.  Under primary resonance (drive frequency
w0 + delta) the steady amplitude solves a cubic in a^2 whose coefficients,
discriminant and roots this module exposes, together with detuning sweeps
and saddle-node (jump) point location.

A tip mass adds an inertia rate m_nl that enters only the phase equation and
the cubic coefficient B2; setting m_nl = 0 recovers the plain cantilever.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .modes import ScaledCoefficients

__all__ = [
    "MmsParams",
    "CubicCoeffs",
    "SteadyStateRoot",
    "ResponseBranch",
    "CriticalAlphaResult",
    "free_envelope",
    "decay_rate",
    "sensitivity",
    "critical_alpha",
    "steady_state_cubic",
    "solve_steady_amplitudes",
    "frequency_sweep",
]


@dataclass(frozen=True)
class MmsParams:
    """Rates and material constants feeding the slow-flow formulas."""

    omega0: float
    c_l: float
    c_nl: float
    k_nl: float
    e_r: float
    alpha: float
    m_nl: float = 0.0
    f: float = 0.0
    case_tag: str = "no-tip"

    def __post_init__(self):
        if not (self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not (0 < self.alpha <= 1):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.e_r < 0:
            raise ValueError(f"e_r must be non-negative, got {self.e_r}")
        if self.case_tag == "no-tip" and self.m_nl != 0.0:
            raise ValueError("m_nl must be zero for the no-tip case")

    @classmethod
    def from_scaled(cls, sc: ScaledCoefficients, case_tag: str | None = None) -> "MmsParams":
        tag = case_tag if case_tag is not None else ("no-tip" if sc.m_nl == 0.0 else "tip-mass")
        return cls(omega0=sc.omega0, c_l=sc.c_l, c_nl=sc.c_nl, k_nl=sc.k_nl,
                   e_r=sc.e_r, alpha=sc.alpha, m_nl=sc.m_nl, f=sc.f, case_tag=tag)


def _damping_factor(p: MmsParams) -> float:
    return p.e_r * p.omega0 ** (p.alpha - 1.0)


def decay_rate(params: MmsParams) -> float:
    """Linear free-vibration decay rate c_l E_r w0^(alpha-1) sin(alpha pi/2)."""
    return params.c_l * _damping_factor(params) * math.sin(0.5 * math.pi * params.alpha)


def sensitivity(params: MmsParams) -> float:
    """Partial derivative of the decay rate with respect to alpha."""
    fac = params.c_l * _damping_factor(params)
    half = 0.5 * math.pi * params.alpha
    return fac * (0.5 * math.pi * math.cos(half) + math.sin(half) * math.log(params.omega0))


def _sensitivity_slope(params: MmsParams, alpha: float) -> float:
    """d(sensitivity)/d(alpha), analytic."""
    fac = params.c_l * params.e_r * params.omega0 ** (alpha - 1.0)
    half = 0.5 * math.pi * alpha
    ln = math.log(params.omega0)
    return fac * (math.pi * ln * math.cos(half) + (ln**2 - 0.25 * math.pi**2) * math.sin(half))


@dataclass(frozen=True)
class CriticalAlphaResult:
    """Root report for a critical fractional order.

    ``found`` is False when the requested condition has no sign change in the
    search interval (0, 2); ``in_unit_interval`` flags whether the root lies
    in the physically admissible range (0, 1).  ``closed_form`` is the
    principal-branch arctangent expression for the decay-peak condition,
    reported for comparison (it can leave (0, 1), or even turn negative,
    while the bisection root stays meaningful).
    """

    found: bool
    alpha_cr: float | None
    residual: float | None
    in_unit_interval: bool
    mode: str
    closed_form: float


def critical_alpha(params: MmsParams, mode: str = "decay-peak") -> CriticalAlphaResult:
    """Locate the critical fractional order by bisection on (0, 2).

    mode = "decay-peak":          root of d(decay_rate)/d(alpha) = 0
    mode = "sensitivity-extremum": root of d(sensitivity)/d(alpha) = 0
    """
    if mode == "decay-peak":
        # evaluate the sensitivity formula directly: the search interval
        # (0, 2) deliberately extends past the physical range (0, 1]
        def g(a: float) -> float:
            fac = params.c_l * params.e_r * params.omega0 ** (a - 1.0)
            half = 0.5 * math.pi * a
            return fac * (0.5 * math.pi * math.cos(half)
                          + math.sin(half) * math.log(params.omega0))
    elif mode == "sensitivity-extremum":
        g = lambda a: _sensitivity_slope(params, a)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    ln = math.log(params.omega0)
    closed = -(2.0 / math.pi) * math.atan(0.5 * math.pi / ln) if ln != 0.0 else -1.0

    lo, hi = 1e-9, 2.0 - 1e-9
    grid = np.linspace(lo, hi, 2001)
    vals = [g(a) for a in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            bracket = (grid[i], grid[i])
            break
        if (vals[i] < 0) != (vals[i + 1] < 0):
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        return CriticalAlphaResult(found=False, alpha_cr=None, residual=None,
                                   in_unit_interval=False, mode=mode, closed_form=closed)
    a_lo, a_hi = bracket
    if a_lo == a_hi:
        root = a_lo
    else:
        f_lo = g(a_lo)
        for _ in range(200):
            mid = 0.5 * (a_lo + a_hi)
            f_mid = g(mid)
            if f_mid == 0.0 or a_hi - a_lo < 1e-15:
                break
            if (f_lo < 0) == (f_mid < 0):
                a_lo, f_lo = mid, f_mid
            else:
                a_hi = mid
        root = 0.5 * (a_lo + a_hi)
    return CriticalAlphaResult(found=True, alpha_cr=root, residual=g(root),
                               in_unit_interval=0.0 < root < 1.0, mode=mode,
                               closed_form=closed)


def _amplitude_squared(p_lin: float, r_cub: float, a0: float, t) -> np.ndarray:
    """Closed-form a(t)^2 of da/dt = -(p a + r a^3) from a(0) = a0."""
    t = np.asarray(t, dtype=float)
    a0sq = a0 * a0
    if p_lin == 0.0:
        return a0sq / (1.0 + 2.0 * r_cub * a0sq * t)
    decay = np.exp(-2.0 * p_lin * t)
    return p_lin * a0sq * decay / (p_lin + r_cub * a0sq * (1.0 - decay))


def _adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, depth: int = 40) -> float:
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(x0, x2, f0, f2, f1, acc, d):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = f(lm), f(rm)
        left = (x1 - x0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (x2 - x1) / 6.0 * (f1 + 4.0 * frm + f2)
        if d <= 0 or abs(left + right - acc) < 15.0 * tol:
            return left + right + (left + right - acc) / 15.0
        return (recurse(x0, x1, f0, f1, flm, left, d - 1)
                + recurse(x1, x2, f1, f2, frm, right, d - 1))

    return recurse(a, b, fa, fb, fm, whole, depth)


def free_envelope(params: MmsParams, a0: float, phi0: float, t):
    """Free-vibration envelope a(t) and phase phi(t) from the slow flow.

    The amplitude uses the Bernoulli closed form; the phase integrates

        dphi/dt = c1 + c2 a(t)^2,
        c1 = (c_l/2)  E_r w0^(a-1) cos(a pi/2),
        c2 = (3 c_nl/4) E_r w0^(a-1) cos(a pi/2) + (3/4) k_nl / w0
             - (1/4) m_nl w0,

    with adaptive Simpson quadrature of the smooth, monotone a^2(t).
    """
    if not (a0 > 0):
        raise ValueError(f"a0 must be positive, got {a0}")
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be non-negative")
    fac = _damping_factor(params)
    half = 0.5 * math.pi * params.alpha
    p_lin = 0.5 * params.c_l * fac * math.sin(half)
    r_cub = 0.375 * params.c_nl * fac * math.sin(half)
    c1 = 0.5 * params.c_l * fac * math.cos(half)
    c2 = (0.75 * params.c_nl * fac * math.cos(half)
          + 0.75 * params.k_nl / params.omega0
          - 0.25 * params.m_nl * params.omega0)

    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    amp = np.sqrt(_amplitude_squared(p_lin, r_cub, a0, t_arr))
    a2 = lambda tau: _amplitude_squared(p_lin, r_cub, a0, tau)
    phases = np.empty_like(t_arr)
    prev_t, acc = 0.0, 0.0
    order = np.argsort(t_arr)
    for idx in order:
        ti = t_arr[idx]
        if ti > prev_t:
            acc += _adaptive_simpson(a2, prev_t, ti)
            prev_t = ti
        phases[idx] = phi0 + c1 * ti + c2 * acc
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(amp[0]), float(phases[0])
    return amp, phases


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficient block of the steady-state amplitude equation.

    The response amplitude solves

        (a1 x + a2 x^2 ... ) -- written on x = a^2:
        (a2^2 + b2^2) x^3 + 2 (a1 a2 + b1 b2) x^2 + (a1^2 + b1^2) x - c_rhs = 0.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    c_rhs: float

    def __post_init__(self):
        if self.c_rhs < 0:
            raise ValueError(f"c_rhs must be non-negative, got {self.c_rhs}")

    def cubic(self) -> tuple[float, float, float, float]:
        """(p3, p2, p1, p0) with p3 x^3 + p2 x^2 + p1 x + p0 = 0, x = a^2."""
        return (
            self.a2**2 + self.b2**2,
            2.0 * (self.a1 * self.a2 + self.b1 * self.b2),
            self.a1**2 + self.b1**2,
            -self.c_rhs,
        )

    def discriminant(self) -> float:
        a, b, c, d = self.cubic()
        return (18.0 * a * b * c * d - 4.0 * b**3 * d + b**2 * c**2
                - 4.0 * a * c**3 - 27.0 * a**2 * d**2)


def steady_state_cubic(params: MmsParams, delta: float) -> CubicCoeffs:
    """Coefficients of the primary-resonance steady-state equation at detuning delta."""
    fac = _damping_factor(params)
    half = 0.5 * math.pi * params.alpha
    sin_h, cos_h = math.sin(half), math.cos(half)
    a1 = 0.5 * params.c_l * fac * sin_h
    a2 = 0.375 * params.c_nl * fac * sin_h
    b1 = delta - 0.5 * params.c_l * fac * cos_h
    b2 = -0.75 * (params.c_nl * fac * cos_h
                  + params.k_nl / params.omega0
                  + params.m_nl * params.omega0 / 3.0)
    c = params.f**2 / (4.0 * params.omega0**2)
    return CubicCoeffs(a1=a1, a2=a2, b1=b1, b2=b2, c_rhs=c)


@dataclass(frozen=True)
class SteadyStateRoot:
    """One admissible steady-state response point."""

    amp: float
    gamma: float
    stable: bool


def _real_cubic_roots(p3: float, p2: float, p1: float, p0: float) -> list[float]:
    """Real roots of p3 x^3 + p2 x^2 + p1 x + p0, trig/Cardano closed form."""
    a, b, c = p2 / p3, p1 / p3, p0 / p3
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    disc = -4.0 * p**3 - 27.0 * q * q
    if disc > 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        roots = [m * math.cos((theta - 2.0 * math.pi * k) / 3.0) - shift for k in range(3)]
    elif disc < 0.0:
        if p == 0.0:
            roots = [-math.copysign(abs(q) ** (1.0 / 3.0), q) - shift]
        elif p < 0.0:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * abs(q) / (p * m)
            t0 = -2.0 * math.copysign(1.0, q) * math.cosh(math.acosh(max(-arg, 1.0)) / 3.0)
            roots = [math.sqrt(-p / 3.0) * t0 - shift]
        else:
            m = 2.0 * math.sqrt(p / 3.0)
            arg = 3.0 * q / (p * m)
            t0 = -2.0 * math.copysign(1.0, q) * math.sinh(math.asinh(abs(arg)) / 3.0)
            roots = [math.sqrt(p / 3.0) * t0 - shift]
    else:
        if p == 0.0:
            roots = [-shift]
        else:
            roots = [3.0 * q / p - shift, -1.5 * q / p - shift]
    # one Newton polish per root on the original cubic, kept only when it
    # actually reduces the residual (the slope degenerates at double roots)
    cubic = lambda x: ((p3 * x + p2) * x + p1) * x + p0
    polished = []
    for x in roots:
        fx = cubic(x)
        dfx = (3.0 * p3 * x + 2.0 * p2) * x + p1
        if dfx != 0.0:
            x_new = x - fx / dfx
            if abs(cubic(x_new)) < abs(fx):
                x = x_new
        polished.append(x)
    return polished


def solve_steady_amplitudes(coeffs: CubicCoeffs) -> list[SteadyStateRoot]:
    """Admissible (a >= 0) steady-state roots with phase and stability tags.

    The phase gamma is recovered from the two projection identities
    sin(gamma) ~ a1 a + a2 a^3 and cos(gamma) ~ b1 a + b2 a^3 through the
    two-argument arctangent.  With three positive roots the middle amplitude
    is tagged unstable (saddle-node branch structure); otherwise roots are
    stable.
    """
    p3, p2, p1, p0 = coeffs.cubic()
    scale = max(abs(p2), abs(p1), abs(p0), 1e-300)
    if abs(p3) < 1e-14 * scale:
        xs = []
        if abs(p2) < 1e-14 * max(abs(p1), abs(p0), 1e-300):
            if p1 != 0.0:
                xs = [-p0 / p1]
        else:
            disc = p1 * p1 - 4.0 * p2 * p0
            if disc >= 0.0:
                # cancellation-free quadratic roots
                s = -0.5 * (p1 + math.copysign(math.sqrt(disc), p1))
                xs = [s / p2] + ([p0 / s] if s != 0.0 else [0.0])
    else:
        xs = _real_cubic_roots(p3, p2, p1, p0)

    x_tol = 1e-12 * max(1.0, max((abs(x) for x in xs), default=1.0))
    amps = sorted({x for x in xs if x > x_tol})
    if coeffs.c_rhs == 0.0:
        # x = 0 always solves the zero-forcing case; the cubic may carry it
        # inexactly, so insert it explicitly
        amps = [0.0] + amps
    roots = []
    n_pos = len([x for x in amps if x > 0.0])
    for rank, x in enumerate(amps):
        a = math.sqrt(x)
        if coeffs.c_rhs > 0.0 and a > 0.0:
            s = coeffs.a1 * a + coeffs.a2 * a**3
            c = coeffs.b1 * a + coeffs.b2 * a**3
            gamma = math.atan2(s, c)
        else:
            gamma = 0.0
        stable = not (n_pos == 3 and rank == 1)
        roots.append(SteadyStateRoot(amp=a, gamma=gamma, stable=stable))
    return roots


@dataclass(frozen=True)
class ResponseBranch:
    """Detuning sweep result: root sets per point plus located jump points."""

    deltas: np.ndarray
    root_sets: list = field(repr=False)
    bifurcations: list
    branches: list = field(repr=False)


def _bisect_discriminant(params: MmsParams, lo: float, hi: float) -> float:
    d_lo = steady_state_cubic(params, lo).discriminant()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        d_mid = steady_state_cubic(params, mid).discriminant()
        if d_mid == 0.0 or hi - lo < 1e-10:
            return mid
        if (d_lo < 0) == (d_mid < 0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _match_branches(deltas: np.ndarray, root_sets: list) -> list:
    """Nearest-amplitude continuation of root sets across the sweep."""
    branches: list[dict] = []
    open_ids: list[int] = []
    for i, (d, roots) in enumerate(zip(deltas, root_sets)):
        amps = [r.amp for r in roots]
        taken = [False] * len(roots)
        next_open = []
        for bid in open_ids:
            br = branches[bid]
            last = br["amp"][-1]
            # local jump threshold: 10x the amplitude step the branch just took
            if len(br["amp"]) > 1:
                tol = 10.0 * max(abs(br["amp"][-1] - br["amp"][-2]), 1e-12)
            else:
                tol = np.inf
            best, best_dist = None, np.inf
            for k, a in enumerate(amps):
                if not taken[k] and abs(a - last) < best_dist:
                    best, best_dist = k, abs(a - last)
            if best is not None and best_dist <= tol:
                taken[best] = True
                br["delta"].append(float(d))
                br["amp"].append(amps[best])
                br["stable"].append(roots[best].stable)
                next_open.append(bid)
        for k, r in enumerate(roots):
            if not taken[k]:
                branches.append({"delta": [float(d)], "amp": [r.amp], "stable": [r.stable]})
                next_open.append(len(branches) - 1)
        open_ids = next_open
    return branches


def frequency_sweep(
    params: MmsParams,
    delta_grid,
    alpha: float | None = None,
    e_r: float | None = None,
    f: float | None = None,
    workers: int | None = None,
) -> ResponseBranch:
    """Steady-state roots over a monotone detuning grid, with jump points.

    Optional alpha / e_r / f values override the base parameters for this
    sweep.  Grid points are independent; with ``workers`` they are evaluated
    in a thread pool, output order is the grid order either way.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.size == 0:
        raise ValueError("delta grid is empty")
    if deltas.size > 1:
        steps = np.diff(deltas)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("delta grid must be strictly monotone")
    p = params
    if alpha is not None:
        p = replace(p, alpha=alpha)
    if e_r is not None:
        p = replace(p, e_r=e_r)
    if f is not None:
        p = replace(p, f=f)

    solve_one = lambda d: solve_steady_amplitudes(steady_state_cubic(p, d))
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            root_sets = list(pool.map(solve_one, deltas))
    else:
        root_sets = [solve_one(d) for d in deltas]

    discs = [steady_state_cubic(p, d).discriminant() for d in deltas]
    bifurcations = []
    for i in range(len(deltas) - 1):
        if discs[i] == 0.0:
            bifurcations.append(float(deltas[i]))
        elif (discs[i] < 0) != (discs[i + 1] < 0):
            bifurcations.append(_bisect_discriminant(p, float(deltas[i]), float(deltas[i + 1])))
    branches = _match_branches(deltas, root_sets)
    return ResponseBranch(deltas=deltas, root_sets=root_sets,
                          bifurcations=bifurcations, branches=branches)
