"""Fresnel integrals and the Weierstrass elliptic function on the real line.

``weierstrass_p`` reduces a real argument by the real period, then uses the
Laurent expansion about the pole (terms through ``z**16``) when the reduced
argument is within ``0.2 / max(1, |g2|**(1/4), |g3|**(1/6))`` of it, and the
Jacobi elliptic representation otherwise.  Repeated duplication from a small
argument is avoided on purpose: every doubling multiplies the relative error
by roughly 30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import PoleProximity

_LAURENT_ORDER = 9  # coefficients c2..c9, i.e. terms through z**16
_POLE_RADIUS = 1e-8


def fresnel_s(x):
    """Sine Fresnel integral, the integral of sin(pi t**2 / 2) from 0 to x."""
    s, _ = special.fresnel(x)
    return float(s) if np.ndim(s) == 0 else s


def fresnel_c(x):
    """Cosine Fresnel integral, the integral of cos(pi t**2 / 2) from 0 to x."""
    _, c = special.fresnel(x)
    return float(c) if np.ndim(c) == 0 else c


@dataclass(frozen=True)
class WeierstrassInvariants:
    g2: float
    g3: float

    def __post_init__(self):
        if not (math.isfinite(self.g2) and math.isfinite(self.g3)):
            raise ValueError("Weierstrass invariants must be finite")

    @property
    def discriminant(self) -> float:
        return self.g2**3 - 27.0 * self.g3**2

    @property
    def degenerate(self) -> bool:
        scale = max(abs(self.g2) ** 3, 27.0 * self.g3**2, 1e-300)
        return abs(self.discriminant) <= 1e-12 * scale

    def real_minimum(self) -> float:
        """Lower bound of P on the real axis: the largest real root of 4x^3 - g2 x - g3.

        A positive value means P never vanishes for real arguments.
        """
        roots = np.roots([4.0, 0.0, -self.g2, -self.g3])
        real = roots[np.abs(roots.imag) <= 1e-9 * max(1.0, float(np.max(np.abs(roots))))].real
        return float(np.max(real))


def laurent_coefficients(g2: float, g3: float, order: int = _LAURENT_ORDER) -> list[float]:
    """Coefficients ``c_k`` of ``P(z) = z**-2 + sum_{k>=2} c_k z**(2k-2)``; index k."""
    c = [0.0] * (order + 1)
    if order >= 2:
        c[2] = g2 / 20.0
    if order >= 3:
        c[3] = g3 / 28.0
    for k in range(4, order + 1):
        acc = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return c


def _series(z: float, coeffs: list[float]) -> tuple[float, float]:
    z2 = z * z
    p = 0.0
    dp = 0.0
    # Horner in z**2 for both P and P'.
    for k in range(len(coeffs) - 1, 1, -1):
        p = p * z2 + coeffs[k]
        dp = dp * z2 + (2 * k - 2) * coeffs[k]
    p = 1.0 / z2 + p * z2
    dp = -2.0 / (z2 * z) + dp * z
    return p, dp


def series_radius(g2: float, g3: float) -> float:
    scale = max(1.0, abs(g2) ** 0.25, abs(g3) ** (1.0 / 6.0))
    return 0.2 / scale


@dataclass(frozen=True)
class _JacobiForm:
    """P written through Jacobi functions of parameter m.

    ``kind == "sn"``: P = e_low + span / sn(k z | m)**2 (three real roots).
    ``kind == "cn"``: P = e_real + H (1 + cn)**2 / sn**2 at argument k z
    (one real root).  ``half_period`` is inf when P is not periodic on the real axis.
    """

    kind: str
    shift: float
    span: float
    k: float
    m: float
    half_period: float


@lru_cache(maxsize=256)
def _jacobi_form(g2: float, g3: float) -> _JacobiForm:
    roots = np.roots([4.0, 0.0, -g2, -g3])
    scale = max(1.0, float(np.max(np.abs(roots))))
    real_mask = np.abs(roots.imag) <= 1e-7 * scale
    if real_mask.all():
        e3, e2, e1 = np.sort(roots.real)
        span = e1 - e3
        m = min(max((e2 - e3) / span, 0.0), 1.0)
        k = math.sqrt(span)
        half = math.inf if m >= 1.0 else special.ellipk(m) / k
        return _JacobiForm("sn", float(e3), float(span), k, m, float(half))
    e_real = float(roots[np.argmin(np.abs(roots.imag))].real)
    H = math.sqrt(3.0 * e_real * e_real - 0.25 * g2)
    m = min(max(0.5 - 0.75 * e_real / H, 0.0), 1.0)
    k = 2.0 * math.sqrt(H)
    # cn(k z | m) has period 4K, and P depends on cn only, so the real period is 4K / k.
    half = 2.0 * special.ellipk(m) / k
    return _JacobiForm("cn", e_real, H, k, m, float(half))


def _jacobi_value(z: float, form: _JacobiForm) -> float:
    w = form.k * z
    if form.m >= 1.0:
        sn, cn = math.tanh(w), 1.0 / math.cosh(w)
    else:
        sn, cn, _, _ = special.ellipj(w, form.m)
    if sn == 0.0:
        return math.inf
    if form.kind == "sn":
        return form.shift + form.span / (sn * sn)
    return form.shift + form.span * (1.0 + cn) ** 2 / (sn * sn)


def weierstrass_p(z: float, inv: WeierstrassInvariants) -> float:
    """P(z; g2, g3) for real nonzero z.

    Near any pole the truncated Laurent series is used on the argument
    reduced by the real period; elsewhere the Jacobi-function form.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("argument must be finite")
    if abs(z) < _POLE_RADIUS:
        raise PoleProximity(f"|z| = {abs(z):.3e} is within {_POLE_RADIUS} of the pole at 0")
    if inv.g2 == 0.0 and inv.g3 == 0.0:
        return 1.0 / (z * z)
    radius = series_radius(inv.g2, inv.g3)
    form = _jacobi_form(inv.g2, inv.g3)
    zr = abs(z)
    if math.isfinite(form.half_period):
        period = 2.0 * form.half_period
        zr = math.fmod(zr, period)
        if zr > form.half_period:
            zr = period - zr
    if zr <= radius:
        if zr == 0.0:
            return math.inf
        return _series(zr, laurent_coefficients(inv.g2, inv.g3))[0]
    return _jacobi_value(zr, form)


def real_half_period(inv: WeierstrassInvariants) -> float:
    """Half of the real period of P (inf when P is not periodic on the real axis)."""
    if inv.g2 == 0.0 and inv.g3 == 0.0:
        return math.inf
    return _jacobi_form(inv.g2, inv.g3).half_period
