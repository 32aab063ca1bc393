"""Fourier boundary curves, multiply connected domains and point location.

A domain is bounded by closed curves gamma(t) = sum_k a_k exp(ikt). One of them
(the outer curve) encloses the others; the inner curves bound the holes. The
standard orientation runs the outer curve counterclockwise and the inner ones
clockwise, so the domain is on the left.

All integrals over the boundary use the periodic trapezoidal rule on the
equispaced nodes t_i = 2*pi*i/M of each curve.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbiguousNesting, CurvesIntersect, DegenerateCurve, SampleMismatch

DEFAULT_NODES = 256
BAND_FRACTION = 1e-3
SEPARATION_FACTOR = 10.0
# dense samples per quadrature node used for distances and point location
DENSE_FACTOR = 8


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed curve given by a truncated Fourier series.

    ``modes`` holds the integer wave numbers k and ``coeffs`` the matching a_k.
    ``orientation`` is the direction of traversal in the plane (+1
    counterclockwise, -1 clockwise), independent of how t runs.
    """

    modes: np.ndarray
    coeffs: np.ndarray
    orientation: int = 1
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=int).ravel()
        coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        if modes.shape != coeffs.shape:
            raise ValueError("modes and coeffs must have the same length")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.nodes < 4 or self.nodes & (self.nodes - 1):
            raise ValueError(f"node count must be a power of two >= 4, got {self.nodes}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def circle(cls, center: complex = 0.0, radius: float = 1.0, nodes: int = DEFAULT_NODES,
               orientation: int = 1) -> "BoundaryCurve":
        return cls(np.array([0, 1]), np.array([center, radius], dtype=complex),
                   orientation=orientation, nodes=nodes)

    @classmethod
    def from_coeffs(cls, coeffs: dict[int, complex], **kwargs) -> "BoundaryCurve":
        ks = sorted(coeffs)
        return cls(np.array(ks, dtype=int), np.array([coeffs[k] for k in ks]), **kwargs)

    def __call__(self, t) -> np.ndarray | complex:
        t = np.asarray(t, dtype=float)
        out = np.exp(1j * np.multiply.outer(t, self.modes)) @ self.coeffs
        return out[()] if out.ndim == 0 else out

    def derivative(self, t) -> np.ndarray | complex:
        t = np.asarray(t, dtype=float)
        out = np.exp(1j * np.multiply.outer(t, self.modes)) @ (1j * self.modes * self.coeffs)
        return out[()] if out.ndim == 0 else out

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(1j * np.multiply.outer(t, self.modes)) @ (-(self.modes ** 2) * self.coeffs)
        return out[()] if out.ndim == 0 else out

    @property
    def natural_direction(self) -> int:
        """+1 if increasing t runs counterclockwise, from the signed area pi*sum k|a_k|^2."""
        area = np.pi * np.sum(self.modes * np.abs(self.coeffs) ** 2)
        return 1 if area > 0 else -1

    @property
    def signed_area(self) -> float:
        return float(np.pi * np.sum(self.modes * np.abs(self.coeffs) ** 2))

    @property
    def sign(self) -> int:
        """Factor turning a parametric integral into one along the traversal direction."""
        return self.orientation * self.natural_direction

    @property
    def node_params(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.nodes) / self.nodes

    def with_orientation(self, orientation: int) -> "BoundaryCurve":
        return replace(self, orientation=orientation)

    def with_nodes(self, nodes: int) -> "BoundaryCurve":
        return replace(self, nodes=nodes)

    def translated(self, shift: complex) -> "BoundaryCurve":
        modes, coeffs = self.modes, self.coeffs.copy()
        if 0 in modes:
            coeffs[modes == 0] += shift
        else:
            modes = np.append(modes, 0)
            coeffs = np.append(coeffs, shift)
        return replace(self, modes=modes, coeffs=coeffs)


def curve_eval(curve: BoundaryCurve, t):
    return curve(t)


def curve_derivative(curve: BoundaryCurve, t):
    return curve.derivative(t)


@dataclass(frozen=True)
class RegionTag:
    """Where a point sits relative to the domain.

    ``kind`` is one of ``Interior``, ``Hole``, ``Exterior`` or ``NearBoundary``;
    ``index`` is the curve index bounding the hole.
    """

    kind: str
    index: int | None = None

    def __str__(self):
        return f"Hole({self.index})" if self.kind == "Hole" else self.kind

    @property
    def in_domain(self) -> bool:
        return self.kind == "Interior"

    @property
    def complementary(self) -> bool:
        return self.kind in ("Hole", "Exterior")


INTERIOR = RegionTag("Interior")
EXTERIOR = RegionTag("Exterior")
NEAR_BOUNDARY = RegionTag("NearBoundary")


def hole(index: int) -> RegionTag:
    return RegionTag("Hole", index)


@dataclass(frozen=True, eq=False)
class DomainBoundary:
    """Validated set of boundary curves in standard orientation with their grids.

    Build it with :func:`build_domain`; the constructor does not validate.
    """

    curves: tuple[BoundaryCurve, ...]
    outer_index: int
    band: float
    orientation_fixes: int = 0
    min_separation: float = float("inf")
    points: tuple[np.ndarray, ...] = field(init=False, repr=False)
    derivs: tuple[np.ndarray, ...] = field(init=False, repr=False)
    weights: tuple[np.ndarray, ...] = field(init=False, repr=False)
    dense: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self):
        pts, ders, wts, dense = [], [], [], []
        for c in self.curves:
            t = c.node_params
            p, d = c(t), c.derivative(t)
            pts.append(p)
            ders.append(d)
            wts.append(c.sign * d * (2 * np.pi / c.nodes))
            nd = DENSE_FACTOR * c.nodes
            dense.append(c(2 * np.pi * np.arange(nd) / nd))
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "derivs", tuple(ders))
        object.__setattr__(self, "weights", tuple(wts))
        object.__setattr__(self, "dense", tuple(dense))

    @property
    def m(self) -> int:
        return len(self.curves)

    @property
    def node_counts(self) -> tuple[int, ...]:
        return tuple(c.nodes for c in self.curves)

    @property
    def all_points(self) -> np.ndarray:
        return np.concatenate(self.points)

    @property
    def all_weights(self) -> np.ndarray:
        return np.concatenate(self.weights)

    @property
    def center(self) -> complex:
        return complex(np.mean(self.points[self.outer_index]))

    @property
    def radius(self) -> float:
        return float(np.max(np.abs(self.all_points - self.center)))

    @property
    def diameter(self) -> float:
        return _diameter(self.points[self.outer_index])

    @property
    def spacing(self) -> float:
        """Largest distance between neighbouring nodes over all curves."""
        return max(float(np.max(np.abs(d))) * 2 * np.pi / c.nodes
                   for c, d in zip(self.curves, self.derivs))

    @property
    def perimeter(self) -> float:
        return float(sum(np.sum(np.abs(w)) for w in self.weights))

    @property
    def inner_indices(self) -> list[int]:
        return [j for j in range(self.m) if j != self.outer_index]

    def with_nodes(self, nodes: int) -> "DomainBoundary":
        return DomainBoundary(tuple(c.with_nodes(nodes) for c in self.curves),
                              self.outer_index, self.band, self.orientation_fixes,
                              self.min_separation)

    def with_band(self, band: float) -> "DomainBoundary":
        return DomainBoundary(self.curves, self.outer_index, band, self.orientation_fixes,
                              self.min_separation)

    def distance(self, z) -> np.ndarray:
        """Distance from each z to the nearest dense boundary sample."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        best = np.full(z.shape, np.inf)
        for pts in self.dense:
            for chunk in _chunks(z):
                best[chunk] = np.minimum(best[chunk],
                                         np.min(np.abs(z[chunk, None] - pts[None, :]), axis=1))
        return best

    def check_samples(self, samples: Sequence[np.ndarray]) -> None:
        if len(samples) != self.m:
            raise SampleMismatch(f"expected {self.m} sample arrays, got {len(samples)}")
        for j, (s, c) in enumerate(zip(samples, self.curves)):
            if np.shape(s) != (c.nodes,):
                raise SampleMismatch(
                    f"curve {j}: expected {c.nodes} samples, got {np.shape(s)}")


def _chunks(z: np.ndarray, size: int = 512):
    for start in range(0, z.size, size):
        yield slice(start, min(start + size, z.size))


def _diameter(p: np.ndarray) -> float:
    best = 0.0
    for chunk in _chunks(p):
        best = max(best, float(np.max(np.abs(p[chunk, None] - p[None, :]))))
    return best


def polygon_winding(polygon: np.ndarray, z) -> np.ndarray:
    """Integer winding number of a closed polygon (vertices in order) around each z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=int)
    nxt = np.roll(polygon, -1)
    for chunk in _chunks(z):
        a = polygon[None, :] - z[chunk, None]
        b = nxt[None, :] - z[chunk, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            # a point on a vertex gives nan; callers treat it as near the boundary
            total = np.nan_to_num(np.sum(np.angle(b / a), axis=1))
        out[chunk] = np.rint(total / (2 * np.pi)).astype(int)
    return out


def _segments_cross(p: np.ndarray) -> bool:
    """True if two non-adjacent edges of the closed polygon p intersect."""
    a, b = p, np.roll(p, -1)
    n = p.size

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    idx = np.arange(n)
    for chunk in _chunks(idx, 256):
        i = idx[chunk][:, None]
        j = idx[None, :]
        gap = np.abs(i - j)
        valid = (j > i) & (gap > 1) & (gap < n - 1)
        a1, b1 = a[chunk][:, None], b[chunk][:, None]
        a2, b2 = a[None, :], b[None, :]
        d1 = cross(b1 - a1, a2 - a1)
        d2 = cross(b1 - a1, b2 - a1)
        d3 = cross(b2 - a2, a1 - a2)
        d4 = cross(b2 - a2, b1 - a2)
        hit = (d1 * d2 < 0) & (d3 * d4 < 0) & valid
        if hit.any():
            return True
    return False


def build_domain(curves: Iterable[BoundaryCurve], band: float | None = None,
                 band_fraction: float = BAND_FRACTION,
                 separation_factor: float = SEPARATION_FACTOR) -> DomainBoundary:
    """Validate curves, find the outer one and put everything in standard orientation.

    Args:
        curves: the boundary curves in any order and orientation.
        band: absolute width of the near-boundary band; defaults to
            ``band_fraction`` times the domain diameter.
        separation_factor: curves closer than this many node spacings are
            treated as intersecting.

    Raises:
        DegenerateCurve: gamma' vanishes at a node.
        CurvesIntersect: a curve crosses itself or comes too close to another.
        AmbiguousNesting: no curve encloses all others, or inner curves nest.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("at least one curve is required")

    spacing = []
    for j, c in enumerate(curves):
        d = np.abs(c.derivative(c.node_params))
        if np.min(d) <= 1e-12 * max(1.0, float(np.max(d))):
            raise DegenerateCurve(f"curve {j}: derivative vanishes at a node")
        spacing.append(float(np.max(d)) * 2 * np.pi / c.nodes)
        if _segments_cross(c(c.node_params)):
            raise CurvesIntersect(f"curve {j} is not simple")

    nodes = [c(c.node_params) for c in curves]
    min_sep = float("inf")
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            dist = float(np.min(np.abs(nodes[i][:, None] - nodes[j][None, :])))
            min_sep = min(min_sep, dist)
            threshold = separation_factor * max(spacing[i], spacing[j])
            if dist < threshold:
                raise CurvesIntersect(
                    f"curves {i} and {j} are {dist:.3g} apart (threshold {threshold:.3g})")

    m = len(curves)
    inside = np.zeros((m, m), dtype=bool)  # inside[i, j]: curve i lies inside curve j
    for j, c in enumerate(curves):
        poly = c(2 * np.pi * np.arange(DENSE_FACTOR * c.nodes) / (DENSE_FACTOR * c.nodes))
        for i in range(m):
            if i != j:
                inside[i, j] = polygon_winding(poly, nodes[i][0])[0] != 0

    if m == 1:
        outer = 0
    else:
        candidates = [j for j in range(m) if all(inside[i, j] for i in range(m) if i != j)]
        if len(candidates) != 1:
            raise AmbiguousNesting("no single curve encloses all the others")
        outer = candidates[0]
        for i in range(m):
            for j in range(m):
                if i != j and i != outer and j != outer and inside[i, j]:
                    raise AmbiguousNesting(f"inner curve {i} lies inside inner curve {j}")

    fixed, fixes = [], 0
    for j, c in enumerate(curves):
        want = 1 if j == outer else -1
        fixes += c.orientation != want
        fixed.append(c.with_orientation(want))

    if band is None:
        band = band_fraction * _diameter(nodes[outer])
    return DomainBoundary(tuple(fixed), outer, float(band), fixes, min_sep)


def unit_disc(nodes: int = DEFAULT_NODES, **kwargs) -> DomainBoundary:
    return build_domain([BoundaryCurve.circle(0, 1, nodes)], **kwargs)


def annulus(inner: float, outer: float = 1.0, center: complex = 0,
            nodes: int = DEFAULT_NODES, **kwargs) -> DomainBoundary:
    return build_domain([BoundaryCurve.circle(center, outer, nodes),
                         BoundaryCurve.circle(center, inner, nodes)], **kwargs)


def curve_windings(domain: DomainBoundary, z) -> np.ndarray:
    """Winding of each curve (standard orientation) around each z; shape (len(z), m)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    cols = []
    for c, dense in zip(domain.curves, domain.dense):
        w = polygon_winding(dense, z)  # parametric direction
        cols.append(c.orientation * np.abs(w))
    return np.stack(cols, axis=1)


def locate_points(domain: DomainBoundary, z) -> list[RegionTag]:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    near = domain.distance(z) < domain.band
    wind = curve_windings(domain, z)
    tags = []
    for k in range(z.size):
        if near[k]:
            tags.append(NEAR_BOUNDARY)
            continue
        w = wind[k]
        if w[domain.outer_index] == 0:
            tags.append(EXTERIOR)
        elif w.sum() == 1:
            tags.append(INTERIOR)
        else:
            j = next(j for j in domain.inner_indices if w[j] == -1)
            tags.append(hole(j))
    return tags


def locate_point(domain: DomainBoundary, z: complex) -> RegionTag:
    """Classify z as Interior, Hole(j), Exterior or NearBoundary.

    >>> str(locate_point(annulus(0.5), 0.25))
    'Hole(1)'
    """
    return locate_points(domain, [z])[0]


def curve_integral(curve: BoundaryCurve, samples) -> complex:
    """Trapezoidal integral of g(zeta) dzeta along one curve in its traversal direction."""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (curve.nodes,):
        raise SampleMismatch(f"expected {curve.nodes} samples, got {samples.shape}")
    t = curve.node_params
    return complex(curve.sign * np.sum(samples * curve.derivative(t)) * 2 * np.pi / curve.nodes)


def contour_integral(domain: DomainBoundary, samples: Sequence[np.ndarray]) -> complex:
    """Integral of g over the whole boundary in standard orientation.

    ``samples`` holds one array of integrand values per curve, aligned with the
    node grid of that curve.
    """
    domain.check_samples(samples)
    return complex(sum(np.sum(np.asarray(s) * w) for s, w in zip(samples, domain.weights)))
