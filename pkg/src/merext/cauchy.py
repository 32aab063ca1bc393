"""Moments, Cauchy transform, the holomorphic-extension test and reconstruction.

Boundary data lives in :class:`BoundarySamples`, one complex array per curve,
aligned with the node grid of a :class:`~merext.geometry.DomainBoundary`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import EvalAtPole, NoProbes, ProbeTooClose, SampleMismatch
from .geometry import DomainBoundary, RegionTag, locate_points

TWO_PI_I = 2j * np.pi
# distance, in node spacings, beyond which the plain trapezoidal rule needs no refinement
SAFE_SPACINGS = 6.0
MAX_UPSAMPLE = 1024
# entries of the point-by-node kernel matrix formed at once
KERNEL_BLOCK = 1 << 22


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    """Values of a function at the boundary nodes.

    ``func``, when present, evaluates the same function at arbitrary points; the
    winding-number code uses it to resample instead of interpolating.
    """

    values: tuple[np.ndarray, ...]
    func: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        vals = tuple(np.asarray(v, dtype=complex).copy() for v in self.values)
        for v in vals:
            if not np.all(np.isfinite(v)):
                raise ValueError("boundary samples must be finite")
            v.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, domain: DomainBoundary, func) -> "BoundarySamples":
        def vec(z):
            return np.broadcast_to(np.asarray(func(np.asarray(z)), dtype=complex), np.shape(z))
        return cls(tuple(vec(p) for p in domain.points), vec)

    @classmethod
    def zeros(cls, domain: DomainBoundary) -> "BoundarySamples":
        return cls.from_function(domain, lambda z: np.zeros_like(z, dtype=complex))

    @property
    def scale(self) -> float:
        return max(float(np.max(np.abs(v))) for v in self.values)

    def concat(self) -> np.ndarray:
        return np.concatenate(self.values)

    def check(self, domain: DomainBoundary) -> None:
        domain.check_samples(self.values)

    def __add__(self, other: "BoundarySamples") -> "BoundarySamples":
        if len(self.values) != len(other.values):
            raise SampleMismatch("sample sets belong to different domains")
        func = None
        if self.func is not None and other.func is not None:
            f, g = self.func, other.func
            func = lambda z: f(z) + g(z)  # noqa: E731
        return BoundarySamples(tuple(a + b for a, b in zip(self.values, other.values)), func)

    def __mul__(self, scalar: complex) -> "BoundarySamples":
        func = None
        if self.func is not None:
            f = self.func
            func = lambda z: scalar * f(z)  # noqa: E731
        return BoundarySamples(tuple(scalar * v for v in self.values), func)

    __rmul__ = __mul__

    def times_poly(self, domain: DomainBoundary, coeffs) -> "BoundarySamples":
        """Samples of P(zeta) f(zeta); ``coeffs`` are ascending polynomial coefficients."""
        coeffs = np.asarray(coeffs, dtype=complex)
        func = None
        if self.func is not None:
            f = self.func
            func = lambda z: npoly.polyval(z, coeffs) * f(z)  # noqa: E731
        return BoundarySamples(
            tuple(npoly.polyval(p, coeffs) * v for p, v in zip(domain.points, self.values)), func)

    def map(self, domain: DomainBoundary, op) -> "BoundarySamples":
        """Samples of op(zeta, f(zeta)) for a pointwise operation."""
        func = None
        if self.func is not None:
            f = self.func
            func = lambda z: op(z, f(z))  # noqa: E731
        return BoundarySamples(tuple(op(p, v) for p, v in zip(domain.points, self.values)), func)


@dataclass(frozen=True)
class MomentSequence:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("need at least one moment")
        object.__setattr__(self, "values", v)

    @property
    def J(self) -> int:
        return self.values.size

    def __getitem__(self, j: int) -> complex:
        """1-based access: ``moments[1]`` is c_1."""
        if j < 1:
            raise IndexError("moments are numbered from 1")
        return self.values[j - 1]


def compute_moments(domain: DomainBoundary, f: BoundarySamples, J: int) -> MomentSequence:
    """c_j = -(1/2 pi i) * integral of zeta^(j-1) f(zeta) dzeta over the boundary, j = 1..J."""
    if J < 1:
        raise ValueError("J must be >= 1")
    f.check(domain)
    zeta = domain.all_points
    fw = f.concat() * domain.all_weights
    powers = zeta[None, :] ** np.arange(J)[:, None]
    return MomentSequence(-(powers @ fw) / TWO_PI_I)


def _interpolate_periodic(values: np.ndarray, factor: int) -> np.ndarray:
    """Trigonometric interpolation of equispaced periodic samples onto a grid ``factor`` times finer."""
    n = values.size
    if factor == 1:
        return values
    spec = np.fft.fft(values)
    big = np.zeros(n * factor, dtype=complex)
    half = n // 2
    big[:half] = spec[:half]
    big[-half:] = spec[-half:]
    # split the Nyquist mode evenly to keep real data real
    big[half] = 0.5 * spec[half]
    big[-half] = 0.5 * spec[half]
    return np.fft.ifft(big) * factor


def _refined(domain: DomainBoundary, f: BoundarySamples, factor: int):
    if factor == 1:
        return domain.all_points, domain.all_weights, f.concat()
    fine = domain.with_nodes(domain.curves[0].nodes * factor) if len(set(domain.node_counts)) == 1 \
        else DomainBoundary(tuple(c.with_nodes(c.nodes * factor) for c in domain.curves),
                            domain.outer_index, domain.band)
    vals = np.concatenate([_interpolate_periodic(v, factor) for v in f.values])
    return fine.all_points, fine.all_weights, vals


def _upsample_factor(domain: DomainBoundary, dist: float) -> int:
    factor = 1
    h = domain.spacing
    while SAFE_SPACINGS * h / factor > dist and factor < MAX_UPSAMPLE:
        factor *= 2
    return factor


def cauchy_transform_many(domain: DomainBoundary, f: BoundarySamples, z,
                          upsample: int | str = "auto", check_band: bool = True) -> np.ndarray:
    """(1/2 pi i) * integral of f(zeta)/(zeta - z) dzeta at each z.

    With ``upsample="auto"`` points closer than a few node spacings to the
    boundary are evaluated on a spectrally interpolated finer grid, refined
    at most ``MAX_UPSAMPLE`` times; points nearer than about 6*h/MAX_UPSAMPLE
    (h the node spacing) lose accuracy.
    """
    f.check(domain)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = domain.distance(z)
    if check_band and np.any(dist < domain.band):
        k = int(np.argmin(dist))
        raise ProbeTooClose(f"point {z[k]} is {dist[k]:.3g} from the boundary "
                            f"(band {domain.band:.3g})")
    if upsample == "auto":
        factors = np.array([_upsample_factor(domain, d) for d in dist])
    else:
        factors = np.full(z.shape, int(upsample))
    out = np.empty(z.shape, dtype=complex)
    for factor in np.unique(factors):
        sel = np.nonzero(factors == factor)[0]
        zeta, w, vals = _refined(domain, f, int(factor))
        fw = vals * w
        step = max(1, KERNEL_BLOCK // zeta.size)
        for start in range(0, sel.size, step):
            idx = sel[start:start + step]
            out[idx] = (fw[None, :] / (zeta[None, :] - z[idx, None])).sum(axis=1) / TWO_PI_I
    return out


def cauchy_transform(domain: DomainBoundary, f: BoundarySamples, z: complex,
                     upsample: int | str = "auto") -> complex:
    return complex(cauchy_transform_many(domain, f, [z], upsample)[0])


@dataclass(frozen=True)
class ProbeConfig:
    """Where the extension test looks.

    Exterior probes sit on circles around the domain centre at the given
    multiples of the domain radius; each hole gets a grid of candidate points
    of which at most ``max_hole_probes`` are kept.
    """

    exterior_radii: tuple[float, ...] = (1.5, 2.0, 4.0)
    ring_points: int = 16
    hole_grid: int = 11
    max_hole_probes: int = 25
    j_check: int = 8


@dataclass(frozen=True, eq=False)
class CauchyField:
    points: np.ndarray
    tags: tuple[RegionTag, ...]
    values: np.ndarray
    component_max: dict[str, float]


@dataclass(frozen=True, eq=False)
class HoloResult:
    verdict: bool
    max_residual: float
    probe_residual: float
    moment_residual: float
    field: CauchyField


def place_probes(domain: DomainBoundary, cfg: ProbeConfig = ProbeConfig()):
    """Probe points in every complementary component, with their region tags."""
    c, R = domain.center, domain.radius
    theta = 2 * np.pi * (np.arange(cfg.ring_points) + 0.5) / cfg.ring_points
    pts = [c + r * R * np.exp(1j * theta) for r in cfg.exterior_radii]
    tags = [RegionTag("Exterior")] * (cfg.ring_points * len(cfg.exterior_radii))
    for j in domain.inner_indices:
        p = domain.points[j]
        xs = np.linspace(p.real.min(), p.real.max(), cfg.hole_grid + 2)[1:-1]
        ys = np.linspace(p.imag.min(), p.imag.max(), cfg.hole_grid + 2)[1:-1]
        grid = (xs[None, :] + 1j * ys[:, None]).ravel()
        located = locate_points(domain, grid)
        keep = np.array([t.kind == "Hole" and t.index == j for t in located])
        cand = grid[keep]
        if cand.size == 0:
            raise NoProbes(f"hole bounded by curve {j} is too thin for probes")
        if cand.size > cfg.max_hole_probes:
            cand = cand[np.linspace(0, cand.size - 1, cfg.max_hole_probes).round().astype(int)]
        pts.append(cand)
        tags += [RegionTag("Hole", j)] * cand.size
    return np.concatenate(pts), tuple(tags)


def normalized_moments(domain: DomainBoundary, g: BoundarySamples, J: int) -> np.ndarray:
    """Moments of g about the domain centre with zeta scaled by the domain radius.

    They vanish together with the ordinary moments c_1..c_J but stay O(scale)
    wherever the domain sits in the plane.
    """
    c, R = domain.center, domain.radius
    u = (domain.all_points - c) / R
    fw = g.concat() * domain.all_weights
    return ((u[None, :] ** np.arange(J)[:, None]) @ fw) / TWO_PI_I


def holo_test(domain: DomainBoundary, g: BoundarySamples, probe_cfg: ProbeConfig = ProbeConfig(),
              tol_rel: float = 1e-8, j_check: int | None = None) -> HoloResult:
    """Decide whether g extends holomorphically through the domain.

    The Cauchy transform of g must vanish off the closed domain. It is checked
    at probes in each hole and outside, and through the first ``j_check``
    moments (the expansion coefficients at infinity). Residuals are relative
    to ``g.scale``.
    """
    g.check(domain)
    j_check = probe_cfg.j_check if j_check is None else j_check
    pts, tags = place_probes(domain, probe_cfg)
    vals = cauchy_transform_many(domain, g, pts)
    comp: dict[str, float] = {}
    for t, v in zip(tags, np.abs(vals)):
        comp[str(t)] = max(comp.get(str(t), 0.0), float(v))
    scale = g.scale
    if scale == 0.0:
        probe_res = moment_res = 0.0
    else:
        probe_res = float(np.max(np.abs(vals))) / scale
        mom = normalized_moments(domain, g, j_check) if j_check > 0 else np.zeros(1)
        moment_res = float(np.max(np.abs(mom))) / (scale * domain.perimeter / (2 * np.pi))
    residual = max(probe_res, moment_res)
    return HoloResult(residual <= tol_rel, residual, probe_res, moment_res,
                      CauchyField(pts, tags, vals, comp))


def _interior_values(domain: DomainBoundary, g_values: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Interior Cauchy integral of g in barycentric (compensated) form.

    Dividing by the quadrature of (1/2 pi i) * integral of dzeta/(zeta - z),
    which equals 1 inside the domain, cancels the near-singular error, so the
    value stays accurate close to the boundary.
    """
    zeta, w = domain.all_points, domain.all_weights
    out = np.empty(z.shape, dtype=complex)
    for start in range(0, z.size, 256):
        zz = z[start:start + 256]
        k = w[None, :] / (zeta[None, :] - zz[:, None])
        out[start:start + 256] = (k @ g_values) / k.sum(axis=1)
    return out


def _check_pole(Q: np.ndarray, z: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    qz = npoly.polyval(z, Q)
    size = npoly.polyval(np.abs(z), np.abs(Q))
    return np.abs(qz) <= rel * size


def reconstruct_many(domain: DomainBoundary, f: BoundarySamples, Q, z) -> np.ndarray:
    """Values h(z)/Q(z) of the meromorphic extension at interior points."""
    f.check(domain)
    Q = np.atleast_1d(np.asarray(Q, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for zz, tag in zip(z, locate_points(domain, z)):
        if tag.kind == "NearBoundary":
            raise ProbeTooClose(f"point {zz} lies within the boundary band")
        if not tag.in_domain:
            raise ValueError(f"point {zz} is not in the domain ({tag})")
    at_pole = _check_pole(Q, z)
    if np.any(at_pole):
        raise EvalAtPole(f"Q vanishes at {z[at_pole][0]}")
    qf = f.times_poly(domain, Q).concat()
    return _interior_values(domain, qf, z) / npoly.polyval(z, Q)


def reconstruct(domain: DomainBoundary, f: BoundarySamples, Q, z: complex) -> complex:
    """Value at z of the extension h/Q, where h is the Cauchy integral of Q*f.

    ``Q`` holds ascending polynomial coefficients.

    Raises:
        EvalAtPole: Q(z) is numerically zero.
        ProbeTooClose: z is inside the boundary band.
    """
    return complex(reconstruct_many(domain, f, Q, [z])[0])


def inward_normals(domain: DomainBoundary) -> tuple[np.ndarray, ...]:
    out = []
    for c, d in zip(domain.curves, domain.derivs):
        tangent = c.sign * d / np.abs(d)
        out.append(1j * tangent)  # domain lies to the left of the traversal
    return tuple(out)


def boundary_mismatch(domain: DomainBoundary, f: BoundarySamples, Q, offset: float | None = None,
                      ladder: int = 6) -> float:
    """Largest gap between the reconstructed extension and f on held-out nodes.

    The extension is built from the even-numbered nodes only and evaluated on
    ``ladder`` points along the inward normal at each odd-numbered node, at
    distances offset*k/ladder. Polynomial extrapolation of these values to the
    boundary is compared with the sample there. ``offset`` defaults to ten
    band widths.
    """
    f.check(domain)
    Q = np.atleast_1d(np.asarray(Q, dtype=complex))
    offset = 10 * domain.band if offset is None else offset
    coarse = DomainBoundary(tuple(c.with_nodes(c.nodes // 2) for c in domain.curves),
                            domain.outer_index, domain.band)
    qf = np.concatenate([(npoly.polyval(p, Q) * v)[::2] for p, v in zip(domain.points, f.values)])

    s = offset * np.arange(1, ladder + 1) / ladder
    # Lagrange weights extrapolating values at s to s = 0
    lag = np.array([np.prod([-s[l] / (s[k] - s[l]) for l in range(ladder) if l != k])
                     for k in range(ladder)])
    worst = 0.0
    for p, v, nu in zip(domain.points, f.values, inward_normals(domain)):
        zeta, target, n = p[1::2], v[1::2], nu[1::2]
        z = zeta[:, None] + s[None, :] * n[:, None]
        q = npoly.polyval(z, Q)
        vals = _interior_values(coarse, qf, z.ravel()).reshape(z.shape) / q
        edge = vals @ lag
        worst = max(worst, float(np.max(np.abs(edge - target))))
    return worst
