"""Planar quadratic engine: jet gauges, near-intersection structure, tangency.

A quadratic (a, b, c) is the function s -> (a/2) s^2 + b s + c, so the
coefficient triple is exactly the 2-jet at 0 up to the usual factor: f'' = a,
f'(s) = a s + b.  Two gauges drive everything downstream:

  * tau(f, g)   = sup over the domain of |h| + |h'| + |h''|,  h = f - g
  * Delta(f, g) = inf over the domain of |h| + |h'|

tau is a norm-induced metric on coefficient triples, Delta a pseudo-metric
that measures how deeply the two graphs are tangent.  Both sup and inf are
computed exactly by evaluating at a closed-form candidate set (endpoints,
roots of h and h', critical points of the piecewise-quadratic jet sums);
tests cross-check against dense grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quadratic",
    "Interval",
    "CurviRect",
    "BipartitePair",
    "BipartiteReport",
    "PLANAR_DOMAIN",
    "tau",
    "delta_gauge",
    "near_intersection_intervals",
    "is_tangent_jet",
    "is_tangent_containment",
    "comparable",
    "dt_rectangle",
    "rect_t_scale",
    "coeff_array",
    "validate_bipartite",
]


@dataclass(frozen=True)
class Quadratic:
    """The quadratic s -> (a/2) s^2 + b s + c, identified with (a, b, c)."""

    a: float
    b: float
    c: float

    def __call__(self, s: float):
        return (0.5 * self.a * s + self.b) * s + self.c

    def deriv(self, s: float):
        return self.a * s + self.b

    def jet(self, s: float) -> tuple[float, float, float]:
        """(value, slope, curvature) at s."""
        return (self(s), self.deriv(s), self.a)

    def sub(self, other: "Quadratic") -> "Quadratic":
        return Quadratic(self.a - other.a, self.b - other.b, self.c - other.c)

    @staticmethod
    def from_jet(theta: float, value: float, slope: float, curvature: float) -> "Quadratic":
        """The unique quadratic with the given 2-jet at theta."""
        b = slope - curvature * theta
        c = value - slope * theta + 0.5 * curvature * theta * theta
        return Quadratic(curvature, b, c)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, s: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= s <= self.hi + slack

    def shrink(self, factor: float) -> "Interval":
        """Concentric interval with length scaled by 1/factor."""
        half = 0.5 * self.length / factor
        return Interval(self.mid - half, self.mid + half)


PLANAR_DOMAIN = Interval(-5.0, 5.0)


@dataclass(frozen=True)
class CurviRect:
    """Vertical delta-neighbourhood of the `center` graph over `base`.

    When base.length == sqrt(thickness / t) the rectangle is a
    (thickness, t)-rectangle; `rect_t_scale` recovers t.
    """

    center: Quadratic
    base: Interval
    thickness: float

    def __post_init__(self):
        if not (self.thickness > 0.0):
            raise ValueError(f"rectangle thickness must be positive, got {self.thickness}")
        if self.base.length <= 0.0:
            raise ValueError("rectangle base must have positive length")


def rect_t_scale(rect: CurviRect) -> float:
    """The t for which rect is a (delta, t)-rectangle: t = delta / |base|^2."""
    return rect.thickness / (rect.base.length ** 2)


def dt_rectangle(center: Quadratic, midpoint: float, delta: float, t: float) -> CurviRect:
    """(delta, t)-rectangle on `center` with the given base midpoint."""
    if not (0.0 < delta <= t <= 1.0):
        raise ValueError(f"need 0 < delta <= t <= 1, got delta={delta}, t={t}")
    half = 0.5 * math.sqrt(delta / t)
    return CurviRect(center, Interval(midpoint - half, midpoint + half), delta)


def _quadratic_roots(da: float, db: float, dc: float) -> list[float]:
    """Real roots of (da/2) s^2 + db s + dc, cancellation-safe for tiny da."""
    if da == 0.0:
        return [] if db == 0.0 else [-dc / db]
    disc = db * db - 2.0 * da * dc
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (db + math.copysign(sq, db))
    roots = []
    if q != 0.0:
        roots.append(2.0 * q / da)
        roots.append(dc / q)
    else:  # db == 0 and disc == db^2 means dc == 0: double root at 0
        roots.append(0.0)
    return roots


def _jet_candidates(h: Quadratic, domain: Interval) -> list[float]:
    """Candidate arguments where |h| + |h'| (+ const) can attain sup or inf.

    These are the domain endpoints, the sign changes of h and h', and the
    interior critical points of the four smooth pieces +-h +- h' (each piece
    is a quadratic whose derivative +-h' +- h'' vanishes at a single s).
    """
    cands = [domain.lo, domain.hi]
    da, db, dc = h.a, h.b, h.c

    def add(s):
        if domain.lo <= s <= domain.hi:
            cands.append(s)

    for r in _quadratic_roots(da, db, dc):
        add(r)
    if da != 0.0:
        add(-db / da)          # root of h'
        add((da - db) / da)    # h' = +h''
        add((-da - db) / da)   # h' = -h''
    return cands


def tau(f: Quadratic, g: Quadratic, domain: Interval = PLANAR_DOMAIN) -> float:
    """sup over the domain of |h| + |h'| + |h''| for h = f - g."""
    h = f.sub(g)
    best = 0.0
    for s in _jet_candidates(h, domain):
        v = abs(h(s)) + abs(h.deriv(s))
        if v > best:
            best = v
    return best + abs(h.a)


def delta_gauge(f: Quadratic, g: Quadratic, domain: Interval = PLANAR_DOMAIN) -> float:
    """inf over the domain of |h| + |h'| for h = f - g; 0 iff graphs share a
    point with a common tangent line (inside the domain)."""
    h = f.sub(g)
    best = math.inf
    for s in _jet_candidates(h, domain):
        v = abs(h(s)) + abs(h.deriv(s))
        if v < best:
            best = v
    return best


def _solve_le(a: float, b: float, c: float, bound: float):
    """Solution set of (a/2)s^2 + b s + c <= bound as intervals over R.

    Returns a list of (lo, hi) with +-inf endpoints allowed.
    """
    c = c - bound
    if a > 0.0:
        roots = _quadratic_roots(a, b, c)
        if len(roots) < 2:
            return [] if not roots else [(roots[0], roots[0])]
        return [tuple(sorted(roots))]
    if a < 0.0:
        roots = _quadratic_roots(a, b, c)
        if len(roots) < 2:
            return [(-math.inf, math.inf)]
        r1, r2 = sorted(roots)
        return [(-math.inf, r1), (r2, math.inf)]
    if b > 0.0:
        return [(-math.inf, -c / b)]
    if b < 0.0:
        return [(-c / b, math.inf)]
    return [(-math.inf, math.inf)] if c <= 0.0 else []


def near_intersection_intervals(
    f: Quadratic, g: Quadratic, delta: float, window: Interval
) -> list[Interval]:
    """The set {s in window : |f(s) - g(s)| <= delta} as exact closed intervals.

    The set is the intersection of two quadratic sublevel sets, hence always
    a union of at most two intervals; a RuntimeError flags any violation of
    that structure (it would be an implementation bug, not an input issue).
    Callers studying the fine structure pass window = I/4.
    """
    if not (delta > 0.0):
        raise ValueError(f"delta must be positive, got {delta}")
    h = f.sub(g)
    upper = _solve_le(h.a, h.b, h.c, delta)       # h <= delta
    lower = _solve_le(-h.a, -h.b, -h.c, delta)    # h >= -delta

    pieces = []
    for lo1, hi1 in upper:
        for lo2, hi2 in lower:
            lo = max(lo1, lo2, window.lo)
            hi = min(hi1, hi2, window.hi)
            if lo <= hi:
                pieces.append((lo, hi))
    pieces.sort()
    merged: list[list[float]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1] + 1e-15:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    if len(merged) > 2:
        raise RuntimeError(f"near-intersection set split into {len(merged)} intervals")
    return [Interval(lo, hi) for lo, hi in merged]


def is_tangent_jet(f: Quadratic, rect: CurviRect, c_jet: float = 4.0) -> bool:
    """Jet tangency test at the base midpoint.

    With t recovered from |base| = sqrt(delta/t), requires
    |h| <= C*delta, |h'| <= C*sqrt(delta*t), |h''| <= C*t at the midpoint.
    """
    delta = rect.thickness
    t = rect_t_scale(rect)
    if not (delta * (1.0 - 1e-9) <= t <= 1.0 + 1e-9):
        raise ValueError(
            f"base length {rect.base.length} implies t={t}, outside [delta, 1]"
        )
    theta = rect.base.mid
    h = f.sub(rect.center)
    return (
        abs(h(theta)) <= c_jet * delta
        and abs(h.deriv(theta)) <= c_jet * math.sqrt(delta * t)
        and abs(h.a) <= c_jet * t
    )


def is_tangent_containment(f: Quadratic, rect: CurviRect, c_tan: float = 4.0) -> bool:
    """True iff rect is contained in the C*delta-neighbourhood of f over its base.

    Both sets are bundles of vertical intervals over the base, so containment
    is exactly sup over the base of |f - center| <= (C - 1)*delta; the sup of
    the quadratic difference is evaluated at the base endpoints and at the
    vertex of the difference.
    """
    h = f.sub(rect.center)
    sup = max(abs(h(rect.base.lo)), abs(h(rect.base.hi)))
    if h.a != 0.0:
        vertex = -h.b / h.a
        if rect.base.contains(vertex):
            sup = max(sup, abs(h(vertex)))
    return sup <= (c_tan - 1.0) * rect.thickness


def comparable(r1: CurviRect, r2: CurviRect, c_cmp: float = 10.0) -> bool:
    """Whether two (delta, t)-rectangles fit inside a common (C*delta, t)-one.

    Transcribed to jets: base midpoints within C*sqrt(delta/t) and the 2-jets
    of the two center curves at the joint midpoint within
    (C*delta, C*sqrt(delta*t), C*t).
    """
    d1, d2 = r1.thickness, r2.thickness
    t1, t2 = rect_t_scale(r1), rect_t_scale(r2)
    if abs(d1 - d2) > 1e-9 * max(d1, d2) or abs(t1 - t2) > 1e-9 * max(t1, t2):
        raise ValueError(
            f"comparability needs matching (delta, t); got ({d1}, {t1}) vs ({d2}, {t2})"
        )
    delta, t = d1, t1
    m1, m2 = r1.base.mid, r2.base.mid
    if abs(m1 - m2) > c_cmp * math.sqrt(delta / t):
        return False
    joint = 0.5 * (m1 + m2)
    h = r1.center.sub(r2.center)
    return (
        abs(h(joint)) <= c_cmp * delta
        and abs(h.deriv(joint)) <= c_cmp * math.sqrt(delta * t)
        and abs(h.a) <= c_cmp * t
    )


@dataclass(frozen=True)
class BipartitePair:
    """Two families with cross tau in [rho, 100*rho] and in-family tau <= rho."""

    F: tuple[Quadratic, ...]
    G: tuple[Quadratic, ...]
    rho: float

    def __post_init__(self):
        if not (self.rho > 0.0):
            raise ValueError(f"rho must be positive, got {self.rho}")
        object.__setattr__(self, "F", tuple(self.F))
        object.__setattr__(self, "G", tuple(self.G))


@dataclass
class BipartiteReport:
    ok: bool
    within_max: float
    cross_min: float
    cross_max: float
    separation_min: float = math.inf
    pairs_checked: int = 0
    note: str = ""


def _pair_sample(n1: int, n2: int, max_pairs: int, seed: int):
    if n1 * n2 <= max_pairs:
        for i in range(n1):
            for j in range(n2):
                yield i, j
        return
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n1, size=max_pairs)
    jj = rng.integers(0, n2, size=max_pairs)
    yield from zip(ii.tolist(), jj.tolist())


def validate_bipartite(
    pair: BipartitePair,
    domain: Interval = PLANAR_DOMAIN,
    separation: float | None = None,
    max_pairs: int = 200_000,
    seed: int = 0,
) -> BipartiteReport:
    """Check the bipartite window, exhaustively when small, sampled when large.

    If `separation` is given, also checks that each family is that separated
    in tau (on the same pair sample).
    """
    F, G, rho = pair.F, pair.G, pair.rho
    within_max = 0.0
    sep_min = math.inf
    checked = 0
    for fam in (F, G):
        n = len(fam)
        for i, j in _pair_sample(n, n, max_pairs // 2, seed):
            if i >= j:
                continue
            tv = tau(fam[i], fam[j], domain)
            within_max = max(within_max, tv)
            sep_min = min(sep_min, tv)
            checked += 1
    cross_min, cross_max = math.inf, 0.0
    for i, j in _pair_sample(len(F), len(G), max_pairs, seed + 1):
        tv = tau(F[i], G[j], domain)
        cross_min = min(cross_min, tv)
        cross_max = max(cross_max, tv)
        checked += 1
    slack = 1.0 + 1e-9  # float headroom: window edges are attained exactly
    ok = (
        within_max <= rho * slack
        and rho <= cross_min * slack
        and cross_max <= 100.0 * rho * slack
    )
    note = ""
    if not ok:
        note = (
            f"within_max={within_max:.6g} (need <= {rho:.6g}), "
            f"cross=[{cross_min:.6g}, {cross_max:.6g}] (need within [{rho:.6g}, {100 * rho:.6g}])"
        )
    if separation is not None and sep_min < separation:
        ok = False
        note += f" in-family separation {sep_min:.6g} < {separation:.6g}"
    return BipartiteReport(ok, within_max, cross_min, cross_max, sep_min, checked, note)


def coeff_array(curves) -> np.ndarray:
    """Stack coefficient triples into an (n, 3) float64 array."""
    return np.array([(q.a, q.b, q.c) for q in curves], dtype=np.float64).reshape(-1, 3)
