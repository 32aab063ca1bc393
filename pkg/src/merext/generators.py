"""Synthetic boundary data with known ground truth.

A generator is described by a JSON-compatible dict with a ``kind`` key:

``entire``
    ``{"poly": [[re, im], ...], "funcs": [{"name": "sin", "coef": [re, im]}]}``;
    a polynomial (ascending coefficients) plus multiples of exp, sin or cos.
``rational``
    ``{"poles": [{"re", "im", "multiplicity"}], "numerator": [[re, im], ...],
    "entire": {...}}``; R(z)/S(z) + E(z) with S = prod (z - p)^m. Without a
    numerator each pole gets the principal part 1/(z - p)^m.
``essential``
    ``{"center": [re, im], "coef": [re, im]}``; coef * exp(1/(z - center)).
``conjugate``
    ``{"base": {...}}``; the complex conjugate of a rational or entire base.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import DomainBoundary, locate_points

KINDS = ("rational", "entire", "essential", "conjugate")
_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


def _cx(pair) -> complex:
    if isinstance(pair, (int, float, complex)):
        return complex(pair)
    if isinstance(pair, dict):
        return complex(pair.get("re", 0.0), pair.get("im", 0.0))
    re, im = pair
    return complex(re, im)


def _cx_list(items) -> np.ndarray:
    return np.array([_cx(p) for p in items], dtype=complex) if items else np.zeros(0, dtype=complex)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "conjugate" and "base" not in self.params:
            raise ValueError("conjugate generator needs a 'base'")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GeneratorSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    # evaluation -----------------------------------------------------------

    def _poles(self) -> list[tuple[complex, int]]:
        return [(_cx(p), int(p.get("multiplicity", 1))) for p in self.params.get("poles", [])]

    def _entire(self, z, spec=None):
        spec = self.params if spec is None else spec
        out = npoly.polyval(z, _cx_list(spec.get("poly", []))) if spec.get("poly") else 0 * z
        for term in spec.get("funcs", []):
            out = out + _cx(term.get("coef", 1.0)) * _FUNCS[term["name"]](z)
        return out

    def function(self):
        """Vectorized callable z -> f(z)."""
        kind, prm = self.kind, self.params
        if kind == "entire":
            return lambda z: self._entire(np.asarray(z, dtype=complex))
        if kind == "essential":
            c, a = _cx(prm.get("center", 0.0)), _cx(prm.get("coef", 1.0))
            return lambda z: a * np.exp(1 / (np.asarray(z, dtype=complex) - c))
        if kind == "conjugate":
            base = GeneratorSpec.from_dict(prm["base"]).function()
            return lambda z: np.conj(base(np.asarray(z, dtype=complex)))

        poles = self._poles()
        entire = prm.get("entire") or {}
        if "numerator" in prm:
            num = _cx_list(prm["numerator"])
            den = npoly.polyfromroots([p for p, m in poles for _ in range(m)])

            def f(z):
                z = np.asarray(z, dtype=complex)
                return npoly.polyval(z, num) / npoly.polyval(z, den) + self._entire(z, entire)
            return f

        def g(z):
            z = np.asarray(z, dtype=complex)
            out = self._entire(z, entire)
            for p, m in poles:
                out = out + 1 / (z - p) ** m
            return out
        return g

    # ground truth ---------------------------------------------------------

    def truth(self, domain: DomainBoundary) -> dict:
        """Poles of the extension through the domain, when known.

        ``extendible`` is None when the generator has no closed-form answer for
        this domain.
        """
        if self.kind == "entire":
            return {"extendible": True, "poles": []}
        if self.kind == "essential":
            c = _cx(self.params.get("center", 0.0))
            inside = locate_points(domain, [c])[0]
            if inside.kind == "Interior":
                return {"extendible": False, "poles": None}
            if inside.kind == "NearBoundary":
                return {"extendible": None, "poles": None}
            return {"extendible": True, "poles": []}
        if self.kind == "rational":
            return {"extendible": True, "poles": _inside(domain, self._poles())}
        return self._conjugate_truth(domain)

    def _conjugate_truth(self, domain: DomainBoundary) -> dict:
        unknown = {"extendible": None, "poles": None}
        if not _is_unit_circle(domain):
            return unknown
        base = GeneratorSpec.from_dict(self.params["base"])
        spec = base.params.get("entire") or {} if base.kind == "rational" else base.params
        if base.kind not in ("rational", "entire") or spec.get("funcs"):
            return unknown
        # on |z| = 1, conj(B(z)) = Bbar(1/z) with Bbar(w) = conj(B(conj w));
        # a pole p of B gives a pole at 1/conj(p), the behaviour at infinity a pole at 0
        poles = []
        order_inf = len(spec.get("poly", [])) - 1 if spec.get("poly") else 0
        if base.kind == "rational":
            if "numerator" in base.params:
                deg_num = len(base.params["numerator"]) - 1
                deg_den = sum(m for _, m in base._poles())
                order_inf = max(order_inf, deg_num - deg_den)
            for p, m in base._poles():
                if abs(p) > 1:
                    poles.append((1 / np.conj(p), m))
                elif abs(p) == 1:
                    return unknown
        if order_inf > 0:
            poles.append((0j, order_inf))
        return {"extendible": True, "poles": _inside(domain, poles)}


def _is_unit_circle(domain: DomainBoundary) -> bool:
    if domain.m != 1:
        return False
    c = domain.curves[0]
    coeffs = dict(zip(c.modes.tolist(), c.coeffs))
    return all(abs(v - (1 if k == 1 else 0)) < 1e-14 for k, v in coeffs.items()) and 1 in coeffs


def _inside(domain, poles):
    if not poles:
        return []
    tags = locate_points(domain, [p for p, _ in poles])
    return [{"re": p.real, "im": p.imag, "multiplicity": m}
            for (p, m), t in zip(poles, tags) if t.in_domain]


def random_rational(rng: np.random.Generator, max_degree: int = 3, radius: float = 0.6,
                    separation: float = 0.05, entire_degree: int = 3) -> GeneratorSpec:
    """Random R/S + E with deg S <= max_degree, poles in |z| <= radius, pairwise separation."""
    deg = int(rng.integers(1, max_degree + 1))
    # split deg into multiplicities
    mults, left = [], deg
    while left:
        m = int(rng.integers(1, left + 1))
        mults.append(m)
        left -= m
    poles: list[complex] = []
    while len(poles) < len(mults):
        z = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if all(abs(z - q) >= separation for q in poles):
            poles.append(z)
    num = rng.normal(size=deg) + 1j * rng.normal(size=deg)
    ent = rng.normal(size=entire_degree + 1) + 1j * rng.normal(size=entire_degree + 1)
    return GeneratorSpec("rational", {
        "poles": [{"re": p.real, "im": p.imag, "multiplicity": m} for p, m in zip(poles, mults)],
        "numerator": [[c.real, c.imag] for c in num],
        "entire": {"poly": [[c.real, c.imag] for c in ent]},
    })
