"""Scalar profile functions used as the arbitrary functions of the invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Mapping

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ConfigError, DomainError
from ..specfn import WeierstrassInvariants, laurent_coefficients, weierstrass_p


class ProfileKind(str, Enum):
    CONST = "const"
    TANH_SQ = "tanh_sq"
    SECH_SQ = "sech_sq"
    KINK = "kink"
    WEIERSTRASS_RECIP = "weierstrass_recip"
    SIN = "sin"
    CUSTOM_TABLE = "custom_table"


_SMALL_ARG = 1e-3  # below this |z|, 1/P is taken from the Laurent series directly


@dataclass(frozen=True)
class ProfileFn:
    """A smooth function of one real variable.

    ``z = scale * r`` is the scaled argument; every kind returns
    ``offset + A * shape(z)``:

    ========================  ===========================================
    const                     A  (offset ignored)
    tanh_sq / sech_sq         tanh(z)**2 / sech(z)**2
    kink                      z / sqrt(1 + B z**2)   (B = 0 gives a line)
    weierstrass_recip         1 / P(z; 4/3, 8/27 + 4/3 A**4)
    sin                       sin(z)
    custom_table              monotone cubic (PCHIP) through the knots
    ========================  ===========================================

    ``custom_table`` uses ``knots``/``values`` (A, scale, offset ignored);
    ``interp="linear"`` gives a piecewise-linear, non-C1 table.
    """

    kind: ProfileKind
    A: float = 1.0
    B: float = 0.0
    offset: float = 0.0
    scale: float = 1.0
    knots: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    interp: str = "pchip"

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        for name in ("A", "B", "offset", "scale"):
            object.__setattr__(self, name, float(getattr(self, name)))
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"profile parameter {name} must be finite")
        if self.kind is ProfileKind.KINK and self.B < 0:
            raise ValueError("kink profile requires B >= 0")
        if self.kind is ProfileKind.CUSTOM_TABLE:
            knots = tuple(float(k) for k in self.knots)
            values = tuple(float(v) for v in self.values)
            if len(knots) < 2 or len(knots) != len(values):
                raise ValueError("custom_table needs at least two knots and matching values")
            if any(b <= a for a, b in zip(knots, knots[1:])):
                raise ValueError("custom_table knots must be strictly increasing")
            if self.interp not in ("pchip", "linear"):
                raise ValueError(f"unknown table interpolation {self.interp!r}")
            object.__setattr__(self, "knots", knots)
            object.__setattr__(self, "values", values)

    @classmethod
    def const(cls, value: float) -> "ProfileFn":
        return cls(ProfileKind.CONST, A=value)

    @cached_property
    def _invariants(self) -> WeierstrassInvariants:
        return WeierstrassInvariants(4.0 / 3.0, 8.0 / 27.0 + 4.0 / 3.0 * self.A**4)

    @cached_property
    def _table(self):
        if self.interp == "pchip":
            return PchipInterpolator(np.array(self.knots), np.array(self.values), extrapolate=True)
        knots = np.array(self.knots)
        values = np.array(self.values)

        def linear(r):
            return float(np.interp(r, knots, values))

        return linear

    def _recip_p(self, z: float) -> float:
        inv = self._invariants
        if abs(z) < _SMALL_ARG:
            c = laurent_coefficients(inv.g2, inv.g3, order=4)
            z2 = z * z
            return z2 / (1.0 + z2 * z2 * (c[2] + z2 * (c[3] + z2 * c[4])))
        p = weierstrass_p(z, inv)
        if math.isinf(p):
            return 0.0
        if abs(p) < 1e-12:
            raise DomainError(f"P({z}) = {p:.3e} is too close to zero for 1/P")
        return 1.0 / p

    def __call__(self, r: float) -> float:
        kind = self.kind
        if kind is ProfileKind.CONST:
            return self.A
        if kind is ProfileKind.CUSTOM_TABLE:
            return float(self._table(r))
        z = self.scale * r
        if kind is ProfileKind.TANH_SQ:
            shape = math.tanh(z) ** 2
        elif kind is ProfileKind.SECH_SQ:
            shape = 1.0 / math.cosh(z) ** 2 if abs(z) < 350 else 0.0
        elif kind is ProfileKind.KINK:
            shape = z / math.sqrt(1.0 + self.B * z * z)
        elif kind is ProfileKind.SIN:
            shape = math.sin(z)
        elif kind is ProfileKind.WEIERSTRASS_RECIP:
            shape = self._recip_p(z)
        else:  # pragma: no cover - exhaustive over ProfileKind
            raise AssertionError(kind)
        return self.offset + self.A * shape

    def derivative(self, r: float) -> float:
        """d/dr of the profile (closed form where available, else central differences)."""
        kind = self.kind
        if kind is ProfileKind.CONST:
            return 0.0
        if kind is ProfileKind.CUSTOM_TABLE and self.interp == "pchip":
            return float(self._table.derivative()(r))
        z = self.scale * r
        k = self.A * self.scale
        if kind is ProfileKind.TANH_SQ:
            return k * 2.0 * math.tanh(z) / math.cosh(z) ** 2 if abs(z) < 350 else 0.0
        if kind is ProfileKind.SECH_SQ:
            return -k * 2.0 * math.tanh(z) / math.cosh(z) ** 2 if abs(z) < 350 else 0.0
        if kind is ProfileKind.KINK:
            return k * (1.0 + self.B * z * z) ** -1.5
        if kind is ProfileKind.SIN:
            return k * math.cos(z)
        h = 1e-4 * max(1.0, abs(r))
        return (-self(r + 2 * h) + 8 * self(r + h) - 8 * self(r - h) + self(r - 2 * h)) / (12 * h)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.kind is ProfileKind.CUSTOM_TABLE:
            out.update(knots=list(self.knots), values=list(self.values), interp=self.interp)
            return out
        out["A"] = self.A
        if self.kind is ProfileKind.CONST:
            return out
        out.update(offset=self.offset, scale=self.scale)
        if self.kind is ProfileKind.KINK:
            out["B"] = self.B
        return out

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any]) -> "ProfileFn":
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls.const(float(spec))
        if not isinstance(spec, Mapping):
            raise ConfigError(f"profile must be an object or a number, got {spec!r}")
        allowed = {"kind", "A", "B", "offset", "scale", "knots", "values", "interp"}
        unknown = set(spec) - allowed
        if unknown:
            raise ConfigError(f"unknown profile keys: {sorted(unknown)}")
        if "kind" not in spec:
            raise ConfigError("profile needs a 'kind'")
        try:
            kind = ProfileKind(spec["kind"])
        except ValueError as exc:
            raise ConfigError(f"unknown profile kind {spec['kind']!r}") from exc
        kwargs = {k: v for k, v in spec.items() if k != "kind"}
        for key in ("knots", "values"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(kind, **kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid profile {dict(spec)!r}: {exc}") from exc
