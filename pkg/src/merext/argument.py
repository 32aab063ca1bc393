"""Winding numbers along the boundary and random probes of the argument-principle bound.

If f extends meromorphically with N poles, then W(P f + Q) >= -N for every pair
P, Q holomorphic on the closed domain with P f + Q nonvanishing on the boundary.
The harness samples P and Q from rational functions with poles off the closed
domain and records any violation. It can refute extendibility with a given N
but never prove it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly

from .cauchy import BoundarySamples, _interior_values, inward_normals
from .errors import AllTrialsInadmissible, NearZero, Unresolved
from .geometry import BoundaryCurve, DomainBoundary, locate_points

NEAR_ZERO_REL = 1e-12
MAX_REFINE = 6


@dataclass(frozen=True, eq=False)
class LoopFunction:
    samples: BoundarySamples
    min_modulus: float

    @classmethod
    def of(cls, samples: BoundarySamples, rel: float = NEAR_ZERO_REL) -> "LoopFunction":
        mods = np.abs(samples.concat())
        lo, hi = float(mods.min()), float(mods.max())
        if lo <= rel * hi or hi == 0.0:
            raise NearZero(f"function nearly vanishes on the boundary (min |phi| = {lo:.3g})")
        return cls(samples, lo)


def _steps(values: np.ndarray) -> np.ndarray:
    return np.angle(np.roll(values, -1) / values)


def _curve_winding(values: np.ndarray, sign: int, resample: Callable[[int], np.ndarray] | None,
                   max_refine: int = MAX_REFINE) -> int:
    """Winding of one closed sampled loop, doubling the sampling until every step is below pi/2."""
    v = values
    for _ in range(max_refine + 1):
        steps = _steps(v)
        if np.max(np.abs(steps)) < np.pi / 2:
            total = sign * steps.sum() / (2 * np.pi)
            return int(np.rint(total))
        if resample is None:
            raise Unresolved("argument jumps by pi/2 or more between samples; "
                             "data is not generator-backed, so it cannot be resampled")
        v = resample(2 * v.size)
        scale = np.max(np.abs(v))
        if np.min(np.abs(v)) <= NEAR_ZERO_REL * scale:
            raise NearZero("function nearly vanishes on the refined boundary grid")
    raise Unresolved(f"argument still unresolved after {max_refine} refinements")


def _resampler(curve: BoundaryCurve, func, offset: float = 0.0):
    if func is None:
        return None

    def resample(n):
        t = 2 * np.pi * np.arange(n) / n
        z = curve(t)
        if offset:
            d = curve.derivative(t)
            z = z + offset * 1j * curve.sign * d / np.abs(d)
        return np.asarray(func(z), dtype=complex)
    return resample


def winding_number(domain: DomainBoundary, phi: BoundarySamples | LoopFunction) -> int:
    """Change of argument of phi along the boundary (standard orientation) over 2 pi.

    Raises:
        NearZero: phi nearly vanishes at a node.
        Unresolved: sampling too coarse and phi cannot be re-evaluated.
    """
    loop = phi if isinstance(phi, LoopFunction) else LoopFunction.of(phi)
    s = loop.samples
    s.check(domain)
    return sum(_curve_winding(v, c.sign, _resampler(c, s.func))
               for c, v in zip(domain.curves, s.values))


@dataclass(frozen=True)
class ArgumentCheck:
    winding: int
    zeros: int
    poles: int

    @property
    def consistent(self) -> bool:
        return self.winding == self.zeros - self.poles


def argument_principle_check(domain: DomainBoundary, f: BoundarySamples, Q,
                             offset: float | None = None) -> ArgumentCheck:
    """Compare W(f) with zeros minus poles of the extension h/Q.

    Poles are counted as deg Q. Zeros are the winding of h on the boundary
    pushed inward by ``offset`` (default ten band widths), where h is the
    interior Cauchy integral of Q*f.
    """
    Q = np.atleast_1d(np.asarray(Q, dtype=complex))
    W = winding_number(domain, f)
    offset = 10 * domain.band if offset is None else offset
    qf = f.times_poly(domain, Q).concat()

    def h(z):
        z = np.asarray(z, dtype=complex)
        return _interior_values(domain, qf, z.ravel()).reshape(z.shape)

    zeros = 0
    for c, p, nu in zip(domain.curves, domain.points, inward_normals(domain)):
        vals = h(p + offset * nu)
        if np.min(np.abs(vals)) <= NEAR_ZERO_REL * np.max(np.abs(vals)):
            raise NearZero("extension nearly vanishes on the shrunk boundary")
        zeros += _curve_winding(vals, c.sign, _resampler(c, h, offset))
    poles = int(np.nonzero(np.abs(Q) > 0)[0].max())
    return ArgumentCheck(W, zeros, poles)


@dataclass(frozen=True, eq=False)
class RationalProbe:
    """A pair P, Q of rational functions holomorphic on the closed domain.

    Each is num(u) / prod(u - p_k) in the scaled variable u = (z - center)/radius.
    """

    p_num: np.ndarray
    p_poles: np.ndarray
    q_num: np.ndarray
    q_poles: np.ndarray
    center: complex
    radius: float
    seed: tuple

    def _eval(self, num, poles, z):
        u = (np.asarray(z, dtype=complex) - self.center) / self.radius
        den = np.ones_like(u)
        for p in poles:
            den = den * (u - (p - self.center) / self.radius)
        return npoly.polyval(u, num) / den

    def P(self, z):
        return self._eval(self.p_num, self.p_poles, z)

    def Q(self, z):
        return self._eval(self.q_num, self.q_poles, z)

    @property
    def poles(self) -> np.ndarray:
        return np.concatenate([self.p_poles, self.q_poles])


def _random_disc(rng, n):
    return np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def make_probe(domain: DomainBoundary, seed, complexity: int, margin: float | None = None) -> RationalProbe:
    """Deterministic random probe pair with up to ``complexity`` poles each.

    Poles are drawn uniformly from a disc of three domain radii and kept only if
    they fall in a hole or outside, at least ``margin`` (default two band
    widths) from the boundary.
    """
    seed = tuple(np.atleast_1d(seed).tolist())
    rng = np.random.default_rng(list(seed))
    margin = 2 * domain.band if margin is None else margin
    c, R = domain.center, domain.radius

    def poles(n):
        out = []
        while len(out) < n:
            cand = c + 3 * R * _random_disc(rng, 4 * n)
            tags = locate_points(domain, cand)
            dist = domain.distance(cand)
            out += [z for z, t, d in zip(cand, tags, dist) if t.complementary and d >= margin]
        return np.array(out[:n], dtype=complex)

    def numerator(deg):
        return _random_disc(rng, deg + 1)

    n_p = int(rng.integers(0, complexity + 1))
    n_q = int(rng.integers(0, complexity + 1))
    return RationalProbe(numerator(n_p), poles(n_p), numerator(n_q), poles(n_q), c, R, seed)


@dataclass(frozen=True, eq=False)
class ProbeReport:
    attempted: int
    admissible: int
    unresolved: int
    windings: list[dict] = field(default_factory=list)
    n_poles: int = 0

    @property
    def min_winding(self) -> int | None:
        ws = [w["winding"] for w in self.windings]
        return min(ws) if ws else None

    @property
    def violations(self) -> list[dict]:
        return [w for w in self.windings if w["winding"] < -self.n_poles]

    def to_dict(self) -> dict:
        return {
            "n_poles": self.n_poles,
            "attempted": self.attempted,
            "admissible": self.admissible,
            "unresolved": self.unresolved,
            "min_winding": self.min_winding,
            "violations": self.violations,
            "windings": self.windings,
        }


def probe_harness(domain: DomainBoundary, f: BoundarySamples, N: int, trials: int, seed: int = 0,
                  complexity: int = 3, rho_min: float = 1e-6) -> ProbeReport:
    """Evaluate W(P f + Q) over seeded random probes and collect violations of W >= -N.

    Trial k uses probe complexity k mod (complexity + 1). Trials where
    |P f + Q| drops below ``rho_min`` times its maximum are skipped as
    inadmissible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    f.check(domain)
    records, admissible, unresolved = [], 0, 0
    for k in range(trials):
        cplx = k % (complexity + 1)
        probe = make_probe(domain, (seed, k), cplx)
        g = f.map(domain, lambda z, v, pr=probe: pr.P(z) * v + pr.Q(z))
        mods = np.abs(g.concat())
        if mods.max() == 0 or mods.min() < rho_min * mods.max():
            continue
        admissible += 1
        try:
            w = winding_number(domain, LoopFunction(g, float(mods.min())))
        except (Unresolved, NearZero):
            unresolved += 1
            continue
        records.append({"trial": k, "complexity": cplx, "winding": int(w)})
    if admissible == 0:
        raise AllTrialsInadmissible(f"all {trials} probes nearly vanish on the boundary")
    return ProbeReport(trials, admissible, unresolved, records, N)
