"""Rectangle richness, incomparable rich families, the incidence-count oracle
bound, quantitative broadness for quadratic families, and the broad/narrow
pair classification.

Everything counts tangencies with the jet test (the O(1) workhorse); the
containment test cross-validates it in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadratics import (
    PLANAR_DOMAIN,
    CurviRect,
    Interval,
    Quadratic,
    BipartitePair,
    coeff_array,
    comparable,
    delta_gauge,
    dt_rectangle,
    rect_t_scale,
    validate_bipartite,
)
from .tubes import BroadnessReport, ProbeSpec

__all__ = [
    "Richness",
    "TangencyScale",
    "WolffCheck",
    "richness_of",
    "max_incomparable_rich",
    "wolff_bound_check",
    "quad_broadness",
    "classify_broad_narrow",
]


@dataclass(frozen=True)
class Richness:
    mu: int
    nu: int

    def __post_init__(self):
        if self.mu < 0 or self.nu < 0:
            raise ValueError("richness counts must be nonnegative")


@dataclass(frozen=True)
class TangencyScale:
    """The (K, sigma, t) window in which a pair counts as K-transverse."""

    K: float
    sigma: float
    t: float

    def __post_init__(self):
        if self.K < 1.0:
            raise ValueError(f"transversality constant must be >= 1, got {self.K}")
        if not (0.0 < self.sigma <= self.t <= 1.0):
            raise ValueError(f"need 0 < sigma <= t <= 1, got ({self.sigma}, {self.t})")


def _jet_tangent_mask(
    coeffs: np.ndarray, center: Quadratic, theta: float, delta: float, t: float, c_jet: float
) -> np.ndarray:
    """Vectorized jet tangency of many curves against one rectangle."""
    da = coeffs[:, 0] - center.a
    db = coeffs[:, 1] - center.b
    dc = coeffs[:, 2] - center.c
    hv = (0.5 * da * theta + db) * theta + dc
    hd = da * theta + db
    return (
        (np.abs(hv) <= c_jet * delta)
        & (np.abs(hd) <= c_jet * math.sqrt(delta * t))
        & (np.abs(da) <= c_jet * t)
    )


def richness_of(
    rect: CurviRect,
    F: list[Quadratic],
    G: list[Quadratic],
    c_jet: float = 4.0,
) -> Richness:
    """Counts of jet-tangent curves from each family."""
    delta = rect.thickness
    t = rect_t_scale(rect)
    theta = rect.base.mid
    mu = nu = 0
    if F:
        mu = int(_jet_tangent_mask(coeff_array(F), rect.center, theta, delta, t, c_jet).sum())
    if G:
        nu = int(_jet_tangent_mask(coeff_array(G), rect.center, theta, delta, t, c_jet).sum())
    return Richness(mu, nu)


def _anchor_grid(domain: Interval, length: float) -> np.ndarray:
    """Base midpoints spaced at half the base length, rectangles kept inside."""
    lo = domain.lo + 0.5 * length
    hi = domain.hi - 0.5 * length
    if hi < lo:
        return np.array([domain.mid])
    n = int(math.floor((hi - lo) / (0.5 * length))) + 1
    return lo + 0.5 * length * np.arange(n)


def max_incomparable_rich(
    F: list[Quadratic],
    G: list[Quadratic],
    delta: float,
    t: float,
    mu: int,
    nu: int,
    domain: Interval = PLANAR_DOMAIN,
    c_jet: float = 4.0,
    c_cmp: float = 10.0,
) -> list[CurviRect]:
    """Greedy family of pairwise incomparable (mu, nu)-rich (delta, t)-rectangles.

    Candidates are anchored on the curves of F with base midpoints on a grid
    spaced at half the base length; any rectangle rich for the family is
    within comparability of such an anchor.  Selection is first-fit in the
    deterministic scan order (curve index, then midpoint), so identical
    inputs give identical output.
    """
    if not (delta <= t <= 1.0):
        raise ValueError(f"need delta <= t <= 1, got delta={delta}, t={t}")
    if not F:
        return []
    length = math.sqrt(delta / t)
    mids = _anchor_grid(domain, length)
    fc = coeff_array(F)
    gc = coeff_array(G) if G else np.zeros((0, 3))
    root_dt = math.sqrt(delta * t)

    # jets of every curve at every midpoint: values[i, m], slopes[i, m]
    fvals = (0.5 * fc[:, 0:1] * mids + fc[:, 1:2]) * mids + fc[:, 2:3]
    fders = fc[:, 0:1] * mids + fc[:, 1:2]
    if len(gc):
        gvals = (0.5 * gc[:, 0:1] * mids + gc[:, 1:2]) * mids + gc[:, 2:3]
        gders = gc[:, 0:1] * mids + gc[:, 1:2]

    chosen: list[CurviRect] = []
    for i in range(len(F)):
        mu_mask = (
            (np.abs(fvals - fvals[i]) <= c_jet * delta)
            & (np.abs(fders - fders[i]) <= c_jet * root_dt)
            & (np.abs(fc[:, 0:1] - fc[i, 0]) <= c_jet * t)
        )
        mu_counts = mu_mask.sum(axis=0)
        if len(gc):
            nu_mask = (
                (np.abs(gvals - fvals[i]) <= c_jet * delta)
                & (np.abs(gders - fders[i]) <= c_jet * root_dt)
                & (np.abs(gc[:, 0:1] - fc[i, 0]) <= c_jet * t)
            )
            nu_counts = nu_mask.sum(axis=0)
        else:
            nu_counts = np.zeros(len(mids), dtype=int)
        good = np.nonzero((mu_counts >= mu) & (nu_counts >= nu))[0]
        for m in good:
            cand = dt_rectangle(F[i], float(mids[m]), delta, t)
            if all(not comparable(cand, r, c_cmp) for r in chosen):
                chosen.append(cand)
    return chosen


@dataclass(frozen=True)
class WolffCheck:
    count: int
    bound: float
    ok: bool
    bipartite_ok: bool
    note: str = ""


def wolff_bound_check(
    F: list[Quadratic],
    G: list[Quadratic],
    delta: float,
    t: float,
    mu: int,
    nu: int,
    eps: float = 0.1,
    k_eps: float = 64.0,
    domain: Interval = PLANAR_DOMAIN,
) -> WolffCheck:
    """Check the incidence bound for pairwise incomparable rich rectangles.

    count comes from the greedy construction; the bound is
    (#F #G)^eps * [ (#F #G / (mu nu))^(3/4) + #F/mu + #G/nu ] scaled by the
    calibration constant k_eps.  The t-bipartite hypothesis is validated and
    a failure is reported in the result (the count and bound are still
    computed; the bound is only guaranteed under the hypothesis).
    """
    if not F or not G:
        raise ValueError("both families must be nonempty")
    if mu < 1 or nu < 1:
        raise ValueError("richness thresholds must be positive integers")
    report = validate_bipartite(BipartitePair(tuple(F), tuple(G), t), domain)
    count = len(max_incomparable_rich(F, G, delta, t, mu, nu, domain))
    nf, ng = len(F), len(G)
    bound = (nf * ng) ** eps * ((nf * ng / (mu * nu)) ** 0.75 + nf / mu + ng / nu)
    return WolffCheck(
        count=count,
        bound=bound,
        ok=count <= k_eps * bound,
        bipartite_ok=report.ok,
        note=report.note,
    )


def quad_broadness(
    Q: list[Quadratic],
    delta: float,
    alpha: float,
    probes: ProbeSpec | None = None,
    domain: Interval = PLANAR_DOMAIN,
    c_jet: float = 4.0,
) -> BroadnessReport:
    """Worst rectangle-concentration ratio of a quadratic family.

    Probes every (sigma, t)-rectangle with dyadic sigma in [delta, 1] and
    dyadic t in [sigma, 1], anchored on the curves of Q (midpoint grid at
    half the base length, anchors deduplicated by their quantized jets), and
    reports max of  #tangent / (1 + t^alpha * #Q).
    """
    if not Q:
        raise ValueError("family must be nonempty")
    probes = probes or ProbeSpec()
    qc = coeff_array(Q)
    n = len(Q)

    def dyadic(top, bottom):
        vals = []
        v = top
        while v >= bottom * (1.0 - 1e-12):
            vals.append(v)
            v *= 0.5
        return vals or [top]

    worst = 0.0
    witness = "no probe exceeded zero"
    for sigma in dyadic(1.0, delta):
        for t in dyadic(1.0, sigma):
            length = math.sqrt(sigma / t)
            mids = _anchor_grid(domain, length)
            if len(mids) > probes.max_anchor_midpoints:
                step = len(mids) / probes.max_anchor_midpoints
                mids = mids[(np.arange(probes.max_anchor_midpoints) * step).astype(int)]
            root_st = math.sqrt(sigma * t)
            vals = (0.5 * qc[:, 0:1] * mids + qc[:, 1:2]) * mids + qc[:, 2:3]
            ders = qc[:, 0:1] * mids + qc[:, 1:2]
            for mi in range(len(mids)):
                v, d = vals[:, mi], ders[:, mi]
                # deduplicate anchors whose jets quantize identically
                keys = np.stack(
                    [
                        np.round(v / (0.5 * sigma)),
                        np.round(d / (0.5 * root_st)),
                        np.round(qc[:, 0] / (0.5 * t)),
                    ],
                    axis=1,
                )
                _, anchor_rows = np.unique(keys, axis=0, return_index=True)
                for i in anchor_rows:
                    count = int(
                        (
                            (np.abs(v - v[i]) <= c_jet * sigma)
                            & (np.abs(d - d[i]) <= c_jet * root_st)
                            & (np.abs(qc[:, 0] - qc[i, 0]) <= c_jet * t)
                        ).sum()
                    )
                    ratio = count / (1.0 + (t ** alpha) * n)
                    if ratio > worst:
                        worst = ratio
                        witness = (
                            f"sigma={sigma:.6g} t={t:.6g} midpoint={mids[mi]:.6g} "
                            f"anchor_curve={i} tangent={count}/{n}"
                        )
    return BroadnessReport(alpha, worst, witness)


def classify_broad_narrow(
    S: CurviRect,
    G: list[Quadratic],
    K: float,
    domain: Interval = PLANAR_DOMAIN,
    c_jet: float = 4.0,
) -> tuple[bool, int, int]:
    """Classify a (sigma, t)-rectangle by the transversality of its tangent pairs.

    Counts ordered pairs (g1, g2) of tangent curves with
    sigma*t/K <= Delta(g1, g2) <= sigma*t; broad means at least half of all
    ordered pairs (diagonal included in the total) are transverse.
    """
    if K < 1.0:
        raise ValueError(f"transversality constant must be >= 1, got {K}")
    sigma = S.thickness
    t = rect_t_scale(S)
    tangent: list[Quadratic] = []
    if G:
        mask = _jet_tangent_mask(coeff_array(G), S.center, S.base.mid, sigma, t, c_jet)
        tangent = [g for g, m in zip(G, mask) if m]
    n = len(tangent)
    total = n * n
    if n <= 1:
        return (False, 0, total)
    lo, hi = sigma * t / K, sigma * t
    transverse = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dv = delta_gauge(tangent[i], tangent[j], domain)
            if lo <= dv <= hi:
                transverse += 1
    return (transverse >= total / 2.0, transverse, total)
