"""Candidate pole polynomials from the Hankel moment system, and the detection pipeline.

For an upper bound N on the number of poles, a null vector D of the N x (N+1)
Hankel matrix H[j][i] = c_{i+j} gives P(z) = D_0 + D_1 z + ... + D_N z^N. The
data extends meromorphically with at most N poles exactly when P*f extends
holomorphically, and then the poles are among the zeros of P inside the
domain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .cauchy import (BoundarySamples, MomentSequence, ProbeConfig, boundary_mismatch,
                     compute_moments, holo_test)
from .errors import InsufficientMoments, ZeroPolynomial
from .geometry import DomainBoundary, RegionTag, locate_points

HOLOMORPHIC = "Holomorphic"
MEROMORPHIC = "Meromorphic"
NOT_EXTENDIBLE = "NotExtendible"


@dataclass(frozen=True, eq=False)
class HankelSystem:
    matrix: np.ndarray
    moments: MomentSequence

    @property
    def N(self) -> int:
        return self.matrix.shape[0]


def build_hankel(moments: MomentSequence, N: int) -> HankelSystem:
    if N < 1:
        raise ValueError("N must be >= 1")
    if moments.J < 2 * N:
        raise InsufficientMoments(f"need {2 * N} moments for N={N}, have {moments.J}")
    c = moments.values
    rows = np.arange(1, N + 1)[:, None]
    cols = np.arange(N + 1)[None, :]
    return HankelSystem(c[rows + cols - 1], moments)


def null_vector(H: HankelSystem) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm D minimizing ||H D||, and the singular values of H.

    The phase is fixed by making the largest-modulus coefficient real and
    positive, so the result is deterministic even when the null space has
    dimension above one.
    """
    _, s, vh = np.linalg.svd(H.matrix, full_matrices=True)
    D = vh[-1].conj()
    k = int(np.argmax(np.abs(D)))
    D = D * (abs(D[k]) / D[k])
    return D / np.linalg.norm(D), s


def cluster_radius(roots: np.ndarray, factor: float = 1e-3) -> float:
    return factor * (1 + (float(np.max(np.abs(roots))) if roots.size else 0.0))


def poly_roots(coeffs, drop: float = 1e-10, cluster_factor: float = 1e-3):
    """Roots of an ascending-coefficient polynomial, merged into clusters.

    High-order coefficients below ``drop`` times the largest one are removed
    first. Roots within the clustering radius of a cluster centre are merged;
    the centre is their mean and the multiplicity their count.

    Returns:
        (roots, multiplicities) as arrays.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    big = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if not np.isfinite(big) or big == 0.0:
        raise ZeroPolynomial("all coefficients vanish")
    keep = np.nonzero(np.abs(coeffs) > drop * big)[0]
    eff = coeffs[:keep[-1] + 1]
    if eff.size == 1:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=int)
    raw = np.roots(eff[::-1])
    r = cluster_radius(raw, cluster_factor)

    clusters: list[list[complex]] = []
    for z in sorted(raw, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(z - np.mean(cl)) <= r:
                cl.append(z)
                break
        else:
            clusters.append([z])
    merged = True
    while merged:
        merged = False
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                if abs(np.mean(clusters[a]) - np.mean(clusters[b])) <= r:
                    clusters[a] += clusters.pop(b)
                    merged = True
                    break
            if merged:
                break
    roots = np.array([np.mean(cl) for cl in clusters], dtype=complex)
    mults = np.array([len(cl) for cl in clusters], dtype=int)
    return roots, mults


@dataclass(frozen=True, eq=False)
class CandidatePolynomial:
    coeffs: np.ndarray
    degree: int
    roots: np.ndarray
    multiplicities: np.ndarray
    tags: tuple[RegionTag, ...]
    singular_values: np.ndarray
    residual: float

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)


@dataclass(frozen=True)
class RootPartition:
    inside: list[tuple[complex, int]]
    boundary: list[tuple[complex, int]]
    outside: list[tuple[complex, int]]


def classify_roots(roots, multiplicities, domain: DomainBoundary) -> RootPartition:
    """Split roots into those in the domain, on its boundary band, and elsewhere.

    Roots in a hole count as outside: holes are not part of the domain.
    """
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    inside, boundary, outside = [], [], []
    if roots.size == 0:
        return RootPartition(inside, boundary, outside)
    for z, m, tag in zip(roots, multiplicities, locate_points(domain, roots)):
        entry = (complex(z), int(m))
        if tag.kind == "NearBoundary":
            boundary.append(entry)
        elif tag.in_domain:
            inside.append(entry)
        else:
            outside.append(entry)
    return RootPartition(inside, boundary, outside)


def tail_residuals(moments: MomentSequence, coeffs, extra: int = 8) -> np.ndarray:
    """d_{N+j} = sum_i D_i c_{i+N+j}, j = 1..extra: the z^-(N+j) coefficients of P times the transform."""
    D = np.asarray(coeffs, dtype=complex)
    N = D.size - 1
    if moments.J < 2 * N + extra:
        raise InsufficientMoments(f"need {2 * N + extra} moments, have {moments.J}")
    c = moments.values
    return np.array([np.dot(D, c[N + j - 1 + np.arange(N + 1)]) for j in range(1, extra + 1)])


def poly_from_roots(pairs) -> np.ndarray:
    roots = [z for z, m in pairs for _ in range(m)]
    return npoly.polyfromroots(roots) if roots else np.ones(1, dtype=complex)


@dataclass(frozen=True)
class DetectConfig:
    tol_rel: float = 1e-8
    extra: int = 8
    mismatch_tol: float = 1e-6
    drop: float = 1e-10
    cluster_factor: float = 1e-3
    probes: ProbeConfig = ProbeConfig()


@dataclass(frozen=True, eq=False)
class ExtensionReport:
    verdict: str
    n_poles: int
    candidate: CandidatePolynomial
    Q: np.ndarray
    poles: list[tuple[complex, int]]
    outside_roots: list[tuple[complex, int]]
    discarded_boundary_roots: list[tuple[complex, int]]
    holo_residual: float
    tail: np.ndarray
    mismatch: float | None
    conflicting: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def extendible(self) -> bool:
        return self.verdict in (HOLOMORPHIC, MEROMORPHIC)

    def to_dict(self) -> dict:
        def pts(pairs):
            return [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in pairs]

        return {
            "verdict": self.verdict,
            "n_poles": self.n_poles,
            "conflicting_evidence": self.conflicting,
            "poles": pts(self.poles),
            "residuals": {
                "holo": self.holo_residual,
                "tail": [abs(d) for d in self.tail],
                "mismatch": self.mismatch,
            },
            "singular_values": [float(s) for s in self.candidate.singular_values],
            "candidate_coeffs": [[c.real, c.imag] for c in self.candidate.coeffs],
            "Q_coeffs": [[c.real, c.imag] for c in self.Q],
            "outside_roots": pts(self.outside_roots),
            "discarded_boundary_roots": pts(self.discarded_boundary_roots),
            "notes": list(self.notes),
        }


def candidate_polynomial(domain: DomainBoundary, moments: MomentSequence, N: int,
                         config: DetectConfig = DetectConfig()) -> CandidatePolynomial:
    if N == 0:
        D, s, res = np.ones(1, dtype=complex), np.zeros(0), 0.0
    else:
        H = build_hankel(moments, N)
        D, s = null_vector(H)
        norm = np.linalg.norm(H.matrix, 2)
        res = float(np.linalg.norm(H.matrix @ D) / norm) if norm > 0 else 0.0
    roots, mults = poly_roots(D, config.drop, config.cluster_factor)
    tags = tuple(locate_points(domain, roots)) if roots.size else ()
    return CandidatePolynomial(D, int(mults.sum()), roots, mults, tags, s, res)


def _prune(domain, f, inside, config, j_check):
    """Drop candidate roots whose removal keeps Q*f holomorphically extendible.

    When the null space is larger than one dimension, P carries spurious
    factors; their zeros inside the domain are removable, not poles.
    """
    kept = dict((z, m) for z, m in inside)
    for z in sorted(kept, key=lambda w: (abs(w), w.real, w.imag)):
        while kept[z] > 0:
            trial = dict(kept)
            trial[z] -= 1
            Q = poly_from_roots(trial.items())
            if not holo_test(domain, f.times_poly(domain, Q), config.probes, config.tol_rel,
                             j_check).verdict:
                break
            kept = trial
    return [(z, m) for z, m in kept.items() if m > 0]


def certify(domain: DomainBoundary, f: BoundarySamples, cand: CandidatePolynomial,
            moments: MomentSequence, N: int, config: DetectConfig = DetectConfig()) -> ExtensionReport:
    """Run the extension test for a given candidate polynomial and assemble the report."""
    j_check = N + config.extra
    holo = holo_test(domain, f.times_poly(domain, cand.coeffs), config.probes, config.tol_rel, j_check)
    tail = tail_residuals(moments, cand.coeffs, config.extra)
    parts = classify_roots(cand.roots, cand.multiplicities, domain)
    base = dict(n_poles=N, candidate=cand, outside_roots=parts.outside,
                discarded_boundary_roots=parts.boundary, holo_residual=holo.max_residual, tail=tail)
    if not holo.verdict:
        return ExtensionReport(NOT_EXTENDIBLE, Q=np.ones(1, dtype=complex), poles=[], mismatch=None,
                               **base)

    notes = []
    Q = poly_from_roots(parts.inside)
    if not holo_test(domain, f.times_poly(domain, Q), config.probes, config.tol_rel, j_check).verdict:
        notes.append("P*f passes but Q*f fails after removing outside/boundary roots")
        return ExtensionReport(NOT_EXTENDIBLE, Q=Q, poles=parts.inside, mismatch=None,
                               conflicting=True, notes=tuple(notes), **base)
    poles = _prune(domain, f, parts.inside, config, j_check)
    removed = sum(m for _, m in parts.inside) - sum(m for _, m in poles)
    if removed:
        notes.append(f"{removed} removable candidate root(s) dropped")
    Q = poly_from_roots(poles)
    mismatch = boundary_mismatch(domain, f, Q)
    if mismatch > config.mismatch_tol * f.scale:
        notes.append("extension test passed but the reconstruction misses the data")
        return ExtensionReport(NOT_EXTENDIBLE, Q=Q, poles=poles, mismatch=mismatch,
                               conflicting=True, notes=tuple(notes), **base)
    verdict = MEROMORPHIC if poles else HOLOMORPHIC
    return ExtensionReport(verdict, Q=Q, poles=poles, mismatch=mismatch, notes=tuple(notes), **base)


def detect(domain: DomainBoundary, f: BoundarySamples, N: int,
           config: DetectConfig = DetectConfig()) -> ExtensionReport:
    """Decide whether f extends meromorphically with at most N poles, and find them.

    Args:
        domain: the validated domain.
        f: boundary samples.
        N: upper bound on the number of poles, counted with multiplicity.
            N = 0 asks for a holomorphic extension.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    f.check(domain)
    moments = compute_moments(domain, f, 2 * N + config.extra)
    cand = candidate_polynomial(domain, moments, N, config)
    return certify(domain, f, cand, moments, N, config)
