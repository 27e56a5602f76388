"""Fractional Kelvin-Voigt constitutive law.

The material is a Hookean spring in parallel with a Scott-Blair element,

    sigma(t) = E_inf * eps(t) + E_alpha * D^alpha eps(t),      0 < alpha <= 1,

where ``D^alpha`` is the fractional derivative of order ``alpha``.  Under a
quiescent start (eps(0) = 0) the Riemann-Liouville and Caputo flavours
coincide, so the time-domain evaluation works on strain increments (Caputo
form) and avoids the singular t^(-alpha) initial term.

The module provides the frequency-domain moduli, the tangent loss, the exact
stress under a ramp-hold strain, and an L1 finite-difference evaluation of
the stress for arbitrary sampled strain histories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MaterialParams",
    "StrainProgram",
    "complex_modulus",
    "tangent_loss",
    "ramp_hold_stress",
    "stress_history_l1",
]


@dataclass(frozen=True)
class MaterialParams:
    """Constants of the fractional Kelvin-Voigt law.

    ``e_inf`` and ``e_alpha`` are stored; the ratio ``e_r = e_alpha/e_inf``
    is always derived so the two representations cannot drift apart.
    """

    e_inf: float = 1.0
    e_alpha: float = 1.0
    alpha: float = 0.5

    def __post_init__(self):
        if not (self.e_inf > 0):
            raise ValueError(f"e_inf must be positive, got {self.e_inf}")
        if not (self.e_alpha >= 0):
            raise ValueError(f"e_alpha must be non-negative, got {self.e_alpha}")
        if not (0 < self.alpha <= 1):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def e_r(self) -> float:
        return self.e_alpha / self.e_inf

    @classmethod
    def from_ratio(cls, e_r: float, alpha: float, e_inf: float = 1.0) -> "MaterialParams":
        return cls(e_inf=e_inf, e_alpha=e_r * e_inf, alpha=alpha)


@dataclass(frozen=True)
class StrainProgram:
    """Prescribed strain history: a ramp-hold profile or uniform samples."""

    kind: str
    rate: float = 0.0
    t_ramp: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)
    dt: float = 0.0

    def __post_init__(self):
        if self.kind == "ramp-hold":
            if not math.isfinite(self.rate):
                raise ValueError("ramp rate must be finite")
            if not (self.t_ramp > 0):
                raise ValueError(f"t_ramp must be positive, got {self.t_ramp}")
        elif self.kind == "sampled":
            if not (self.dt > 0):
                raise ValueError(f"dt must be positive, got {self.dt}")
            if self.samples is None or len(self.samples) < 2:
                raise ValueError("sampled program needs at least 2 samples")
            if self.samples[0] != 0.0:
                raise ValueError("sampled strain must start from a quiescent state, strain(0) = 0")
        else:
            raise ValueError(f"unknown strain program kind {self.kind!r}")

    @classmethod
    def ramp_hold(cls, rate: float, t_ramp: float) -> "StrainProgram":
        return cls(kind="ramp-hold", rate=rate, t_ramp=t_ramp)

    @classmethod
    def sampled(cls, values, dt: float) -> "StrainProgram":
        return cls(kind="sampled", samples=np.asarray(values, dtype=float), dt=dt)

    def strain(self, t):
        """Evaluate the ramp-hold strain at time(s) t."""
        if self.kind != "ramp-hold":
            raise ValueError("strain(t) is defined for ramp-hold programs only")
        t = np.asarray(t, dtype=float)
        return self.rate * np.minimum(t, self.t_ramp)


def complex_modulus(mat: MaterialParams, omega: float) -> tuple[float, float]:
    """Storage and loss moduli of the fractional Kelvin-Voigt element.

    G'(w)  = E_inf + E_alpha * w^alpha * cos(alpha*pi/2)
    G''(w) =         E_alpha * w^alpha * sin(alpha*pi/2)
    """
    if not (omega > 0):
        raise ValueError(f"omega must be positive, got {omega}")
    wa = omega ** mat.alpha
    half = 0.5 * math.pi * mat.alpha
    storage = mat.e_inf + mat.e_alpha * wa * math.cos(half)
    loss = mat.e_alpha * wa * math.sin(half)
    return storage, loss


def tangent_loss(mat: MaterialParams, omega: float) -> float:
    """Ratio of dissipated to stored energy per cycle, tan(delta) = G''/G'."""
    storage, loss = complex_modulus(mat, omega)
    return loss / storage


def ramp_hold_stress(mat: MaterialParams, rate: float, t_ramp: float, t):
    """Exact stress under eps(t) = rate*t up to t_ramp, held constant after.

    For t < t_ramp:
        sigma = E_inf*rate*t + E_alpha*rate * t^(1-alpha) / Gamma(2-alpha)
    For t >= t_ramp:
        sigma = E_inf*rate*t_ramp
              + E_alpha*rate * [t^(1-alpha) - (t-t_ramp)^(1-alpha)] / Gamma(2-alpha)

    The alpha = 1 limit is the classical Kelvin-Voigt response
    sigma = E_inf*eps + E_alpha*d(eps)/dt and is evaluated as such.
    """
    if not (t_ramp > 0):
        raise ValueError(f"t_ramp must be positive, got {t_ramp}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("time must be non-negative")

    ramping = t_arr < t_ramp
    elastic = mat.e_inf * rate * np.where(ramping, t_arr, t_ramp)
    if mat.alpha == 1.0:
        viscous = mat.e_alpha * rate * np.where(ramping, 1.0, 0.0)
        # the hold onset itself still carries the full ramp-rate dashpot stress
        viscous = np.where(t_arr == t_ramp, mat.e_alpha * rate, viscous)
    else:
        g = math.gamma(2.0 - mat.alpha)
        e = 1.0 - mat.alpha
        tail = np.where(ramping, 0.0, np.maximum(t_arr - t_ramp, 0.0) ** e)
        viscous = mat.e_alpha * rate * (t_arr ** e - tail) / g
    out = elastic + viscous
    return out if out.ndim else float(out)


def stress_history_l1(mat: MaterialParams, program: StrainProgram) -> np.ndarray:
    """Stress samples for a sampled strain program via the L1 scheme.

    sigma_n = E_inf*eps_n + E_alpha * D^alpha eps |_n, with the fractional
    term discretized on strain increments.  Exact (to round-off) whenever the
    strain is piecewise linear with kinks on grid nodes; order 2-alpha on
    smooth strain histories.
    """
    if program.kind != "sampled":
        raise ValueError("stress_history_l1 needs a sampled strain program")
    from .fracode import caputo_l1_series  # shared L1 kernel

    eps = program.samples
    if mat.alpha == 1.0:
        rate = np.gradient(eps, program.dt)
        return mat.e_inf * eps + mat.e_alpha * rate
    frac = caputo_l1_series(eps, program.dt, mat.alpha)
    return mat.e_inf * eps + mat.e_alpha * frac
