"""Experiment harness: named experiments binding the family generators to the
integral estimators, with CSV output and a reproducibility manifest.

Every experiment writes `<out>` (CSV, header row always emitted) and
`<out>.manifest` (plain text: parameters, seed, versions, wall time, and one
PASS/FAIL line per in-experiment check).  Identical invocations produce
byte-identical CSV bodies; the timestamp lives only in the manifest.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, _bulk
from .families import (
    build_bipartite_balls,
    build_bush,
    build_clamshell,
    build_opposed_pair,
    fan_cores,
    net_family_size,
    net_multiplicity,
    net_tubes,
    parabolic_net_spec,
    tube_cores,
)
from .heis import HDirection, HPoint
from .incidence import quad_broadness, richness_of, wolff_bound_check
from .integrals import (
    SampleSpec,
    bilinear_curve_integral,
    bilinear_integral_from_multiplicity,
    bilinear_tube_integral,
    fit_exponent,
)
from .projection import (
    PlanePoint,
    fiber_length,
    project_W_batch,
    projection_containment_ratio,
    tube_points_sample,
)
from .quadratics import (
    PLANAR_DOMAIN,
    Quadratic,
    coeff_array,
    delta_gauge,
    near_intersection_intervals,
    tau,
)
from .tubes import HTube, line_broadness

EXPERIMENTS = {}


def experiment(name):
    def wrap(fn):
        EXPERIMENTS[name] = fn
        return fn

    return wrap


@dataclass
class ExperimentResult:
    columns: list
    rows: list
    checks: list  # (name, passed: bool, detail: str)
    extras: dict  # free-form manifest entries (slopes, counts, ...)


# ---------------------------------------------------------------------------
# defaults and config handling

DEFAULTS = {
    "delta-exps": None,  # per-experiment default below
    "rho": None,
    "alpha": None,
    "p": None,
    "mu": 16,
    "nu": 4,
    "n": 256,
    "t": 2.0 ** -4,
    "seed": 0,
    "samples": None,
    "grid-res": None,
    "out": None,
    "workers": 1,
}

_FLOAT_KEYS = {"rho", "alpha", "p", "t", "grid-res"}
_INT_KEYS = {"mu", "nu", "n", "seed", "samples", "workers"}


def parse_delta_exps(text: str) -> list[int]:
    """'A..B' -> [A, A+1, ..., B] (dyadic exponents, delta = 2^-k)."""
    parts = text.split("..")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) != 2:
        raise ValueError(f"bad delta-exps {text!r}, want A..B")
    a, b = int(parts[0]), int(parts[1])
    if b < a:
        raise ValueError(f"bad delta-exps {text!r}: descending range")
    return list(range(a, b + 1))


def read_config(path: str) -> dict:
    """Plain key = value lines; '#' starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def coerce(cfg: dict) -> dict:
    out = dict(cfg)
    for k, v in cfg.items():
        if v is None or not isinstance(v, str):
            continue
        if k in _FLOAT_KEYS:
            out[k] = float(v)
        elif k in _INT_KEYS:
            out[k] = int(v)
    return out


def _ladder(cfg, default_lo, default_hi):
    text = cfg.get("delta-exps")
    if text is None:
        return list(range(default_lo, default_hi + 1))
    if isinstance(text, str):
        return parse_delta_exps(text)
    return list(text)


def _slope_check(name, points, predicate, detail_fmt):
    """Slope assertion that degrades to a skip on ladders too short to fit."""
    if len(points) < 3:
        return None, (name, True, "skipped: ladder shorter than 3 points")
    slope = fit_exponent(points).slope
    return slope, (name, predicate(slope), detail_fmt(slope))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


# ---------------------------------------------------------------------------
# shared generators for randomized experiments


def _random_direction(rng, min_axis_sum=0.5) -> HDirection:
    while True:
        e = HDirection.from_angle(rng.uniform(-math.pi, math.pi))
        if abs(e.a + e.b) >= min_axis_sum:
            return e


def _random_tube(rng, delta, min_axis_sum=0.5) -> HTube:
    e = _random_direction(rng, min_axis_sum)
    g = rng.normal(scale=0.15, size=3)
    return HTube(HPoint(g[0], g[1], 0.25 * g[2]), e, delta)


def _near_contact_pair(rng, delta):
    """Random quadratic pair forced to approach within delta/2 somewhere in I/8."""
    f = Quadratic(*rng.normal(scale=1.0, size=3))
    theta0 = rng.uniform(-0.625, 0.625)
    v = rng.uniform(-0.5, 0.5) * delta
    u = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-4.0, 0.3)
    w = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-4.0, 0.5)
    g = Quadratic.from_jet(theta0, f(theta0) + v, f.deriv(theta0) + u, f.a + w)
    return f, g, theta0


# ---------------------------------------------------------------------------
# experiments


@experiment("bush-refutes-naive")
def _exp_bush(cfg) -> ExperimentResult:
    samples = cfg.get("samples") or 400_000
    seed = cfg["seed"]
    workers = cfg["workers"]
    rows = []
    ratios_bush, ratios_naive = [], []
    for k in _ladder(cfg, 4, 8):
        d = 2.0 ** -k
        t1, t2 = build_bush(d)
        est = bilinear_tube_integral(
            t1, t2, 0.75, SampleSpec(samples=samples, seed=seed), workers
        )
        n1, n2 = len(t1), len(t2)
        rb = est.value / (d ** 4 * n1 ** 0.75 * n2)
        rn = est.value / (d ** 4 * n1 ** 0.75 * n2 ** 0.75)
        ratios_bush.append((d, rb))
        ratios_naive.append((d, rn))
        rows.append([d, n1, n2, est.value, est.stderr, rb, rn])
    checks = [
        (
            "bush ratio within [1/16, 16]",
            all(1 / 16 <= r <= 16 for _, r in ratios_bush),
            f"ratios {[round(r, 3) for _, r in ratios_bush]}",
        ),
        ("positive integrals", all(v > 0 for _, v in ratios_bush), ""),
    ]
    extras = {}
    if len(ratios_naive) >= 3:
        extras["naive_ratio_slope"] = fit_exponent(ratios_naive).slope
    return ExperimentResult(
        ["delta", "n_t1", "n_t2", "lhs", "stderr", "ratio_bush", "ratio_naive"],
        rows,
        checks,
        extras,
    )


@experiment("opposed-pair-scaling")
def _exp_opposed(cfg) -> ExperimentResult:
    rho = cfg.get("rho") or 1.0
    res = cfg.get("grid-res")
    rows, dpts, rpts = [], [], []
    for k in _ladder(cfg, 4, 10):
        d = 2.0 ** -k
        pair = build_opposed_pair(d, rho)
        est = bilinear_curve_integral(
            list(pair.F), list(pair.G), d, 0.75, SampleSpec(mode="grid", resolution=res)
        )
        dpts.append((d, est.value))
        rows.append(["delta", d, rho, est.value])
    for j in (1, 2, 3, 4):
        r = 2.0 ** -j
        d = 2.0 ** -8
        pair = build_opposed_pair(d, r)
        est = bilinear_curve_integral(
            list(pair.F), list(pair.G), d, 0.75, SampleSpec(mode="grid", resolution=res)
        )
        rpts.append((r, est.value))
        rows.append(["rho", d, r, est.value])
    slope_d, check_d = _slope_check(
        "delta slope = 1.5 +- 0.1", dpts, lambda s: abs(s - 1.5) <= 0.1,
        lambda s: f"slope {s:.4f}")
    slope_r, check_r = _slope_check(
        "rho slope = -0.5 +- 0.1", rpts, lambda s: abs(s + 0.5) <= 0.1,
        lambda s: f"slope {s:.4f}")
    extras = {}
    if slope_d is not None:
        extras["delta_slope"] = slope_d
    if slope_r is not None:
        extras["rho_slope"] = slope_r
    return ExperimentResult(
        ["sweep", "delta", "rho", "lhs"], rows, [check_d, check_r], extras
    )


@experiment("bipartite-ball-sharpness")
def _exp_balls(cfg) -> ExperimentResult:
    rho = cfg.get("rho") or 0.25
    seed = cfg["seed"]
    rows, norm_pts = [], []
    m_ok = True
    for k in _ladder(cfg, 5, 7):
        d = 2.0 ** -k
        pair = build_bipartite_balls(d, rho)
        est = bilinear_curve_integral(
            list(pair.F), list(pair.G), d, 0.75, SampleSpec(mode="grid")
        )
        rng = np.random.default_rng([seed, k])
        s = rng.uniform(0.1, 0.9, 1000)
        y = rho * s * s + rng.uniform(-rho / 8, rho / 8, 1000)
        fc = coeff_array(pair.F)
        vals = (0.5 * fc[:, 0:1] * s + fc[:, 1:2]) * s + fc[:, 2:3]
        m = (np.abs(vals - y) <= d).sum(axis=0)
        scale = (rho / d) ** 2
        norm = est.value * d ** 3
        norm_pts.append((d, norm))
        m_ok = m_ok and (m.min() >= scale / 8) and (m.max() <= scale * 8)
        rows.append([d, len(pair.F), len(pair.G), est.value, norm,
                     int(m.min()), float(np.median(m)), int(m.max())])
    slope, slope_chk = _slope_check(
        "normalized LHS flat (|slope| <= 0.2)", norm_pts,
        lambda s: abs(s) <= 0.2, lambda s: f"slope {s:.4f}")
    checks = [
        ("pointwise multiplicity within 8x of (rho/delta)^2", m_ok, ""),
        slope_chk,
    ]
    return ExperimentResult(
        ["delta", "n_f", "n_g", "lhs", "lhs_norm", "m_min", "m_med", "m_max"],
        rows,
        checks,
        {} if slope is None else {"normalized_slope": slope},
    )


@experiment("clamshell-alpha")
def _exp_clamshell(cfg) -> ExperimentResult:
    exps = _ladder(cfg, 8, 8)
    d = 2.0 ** -exps[0]
    t = cfg["t"]
    mu, nu, n = cfg["mu"], cfg["nu"], cfg["n"]
    F, G, R = build_clamshell(d, t, mu, nu, n)
    rich = [richness_of(r, F, G) for r in R]
    counts_ok = (
        len(F) == n
        and len(R) == round(t ** -0.5 * n / mu)
        and len(G) == nu * len(R)
    )
    rich_ok = all(x.mu == mu and x.nu == nu for x in rich)
    alphas = [0.2, 0.5]
    if cfg.get("alpha") is not None and cfg["alpha"] not in alphas:
        alphas.append(cfg["alpha"])
    rows = []
    worst = {}
    for alpha in alphas:
        rep = quad_broadness(F, d, alpha)
        worst[alpha] = rep.worst_ratio
        rows.append([alpha, rep.worst_ratio, rep.witness])
    checks = [
        ("exact counts #F, #G, #R", counts_ok, f"{len(F)}, {len(G)}, {len(R)}"),
        ("exact richness (mu, nu) at every subdivision", rich_ok, ""),
        (
            "broadness ratio grows with alpha",
            worst[0.5] > worst[0.2],
            f"{worst[0.2]:.3f} -> {worst[0.5]:.3f}",
        ),
    ]
    return ExperimentResult(
        ["alpha", "worst_ratio", "witness"],
        rows,
        checks,
        {"n_f": len(F), "n_g": len(G), "n_r": len(R)},
    )


@experiment("parabolic-net-p23")
def _exp_net(cfg) -> ExperimentResult:
    samples = cfg.get("samples") or 100_000
    seed = cfg["seed"]
    workers = cfg["workers"]
    region = np.array([[-1.1, 1.1], [-1.1, 1.1], [-0.3, 0.3]])
    rows, pts_l = [], []
    m_lo, m_hi = math.inf, 0
    for k in _ladder(cfg, 4, 6):
        d = 2.0 ** -k
        spec = parabolic_net_spec(d)
        est = bilinear_integral_from_multiplicity(
            lambda q: net_multiplicity(spec, q, 1),
            lambda q: net_multiplicity(spec, q, 2),
            region,
            2.0 / 3.0,
            SampleSpec(samples=samples, seed=seed),
            workers,
        )
        probes = _gauge_ball_points(1000, [seed, k, 3])
        m1 = net_multiplicity(spec, probes, 1)
        m2 = net_multiplicity(spec, probes, 2)
        m_lo = min(m_lo, int(m1.min()), int(m2.min()))
        m_hi = max(m_hi, int(m1.max()), int(m2.max()))
        pts_l.append((d, est.value))
        rows.append([d, net_family_size(spec), est.value, est.stderr,
                     int(min(m1.min(), m2.min())), int(max(m1.max(), m2.max()))])
    slope, slope_chk = _slope_check(
        "LHS(p=2/3) flat (|slope| <= 0.2)", pts_l,
        lambda s: abs(s) <= 0.2, lambda s: f"slope {s:.4f}")
    checks = [
        ("multiplicity within [1, 8] on the unit ball", m_lo >= 1 and m_hi <= 8,
         f"range [{m_lo}, {m_hi}]"),
        slope_chk,
    ]
    return ExperimentResult(
        ["delta", "n_tubes", "lhs", "stderr", "m_min", "m_max"],
        rows,
        checks,
        {} if slope is None else {"lhs_slope": slope},
    )


def _gauge_ball_points(n, seed):
    rng = np.random.default_rng(seed)
    out = np.empty((0, 3))
    while len(out) < n:
        z = rng.random((2 * n, 3)) * 2.0 - 1.0
        z[:, 2] *= 0.25
        out = np.vstack([out, z[_bulk.norm4(z) <= 1.0]])
    return out[:n]


@experiment("projection-containment")
def _exp_projection(cfg) -> ExperimentResult:
    samples = cfg.get("samples") or 100_000
    seed = cfg["seed"]
    rows, maxima = [], []
    for k in _ladder(cfg, 4, 8):
        d = 2.0 ** -k
        rng = np.random.default_rng([seed, k])
        n_tubes = 20
        worst = 0.0
        for i in range(n_tubes):
            tube = _random_tube(rng, d)
            worst = max(
                worst,
                projection_containment_ratio(tube, samples // n_tubes, seed=seed + i),
            )
        maxima.append((d, worst))
        rows.append([d, worst])
    worst_all = max(r for _, r in maxima)
    slope, slope_chk = _slope_check(
        "no growth trend (|slope| <= 0.15)", maxima,
        lambda s: abs(s) <= 0.15, lambda s: f"slope {s:.4f}")
    checks = [
        ("max vertical distance / delta^2 <= 8", worst_all <= 8.0, f"max {worst_all:.3f}"),
        slope_chk,
    ]
    return ExperimentResult(
        ["delta", "max_ratio"], rows, checks,
        {} if slope is None else {"ratio_slope": slope},
    )


@experiment("fiber-length")
def _exp_fiber(cfg) -> ExperimentResult:
    seed = cfg["seed"]
    n_pairs = cfg.get("samples") or 1000
    rows = []
    worst_all = 0.0
    for k in _ladder(cfg, 6, 6):
        d = 2.0 ** -k
        rng = np.random.default_rng([seed, k])
        worst, total = 0.0, 0.0
        for i in range(n_pairs):
            tube = _random_tube(rng, d, min_axis_sum=1 / math.sqrt(2))
            q = tube_points_sample(tube, 1, seed=seed * 1000 + i)[0]
            w = project_W_batch(q.reshape(1, 3))[0]
            length = fiber_length(tube, PlanePoint(w[0], w[1]), d / 100)
            worst = max(worst, length / d)
            total += length / d
        worst_all = max(worst_all, worst)
        rows.append([d, n_pairs, worst, total / n_pairs])
    checks = [("max fiber length / delta <= 8", worst_all <= 8.0, f"max {worst_all:.3f}")]
    return ExperimentResult(
        ["delta", "n_pairs", "max_ratio", "mean_ratio"], rows, checks, {}
    )


@experiment("lemma-rect-structure")
def _exp_rect(cfg) -> ExperimentResult:
    seed = cfg["seed"]
    n_cases = cfg.get("samples") or 10_000
    window = PLANAR_DOMAIN.shrink(4.0)
    rows = []
    for k in _ladder(cfg, 6, 6):
        d = 2.0 ** -k
        rng = np.random.default_rng([seed, k])
        max_pieces = 0
        max_factor, min_factor = 0.0, math.inf
        for _ in range(n_cases):
            f, g, theta0 = _near_contact_pair(rng, d)
            pieces = near_intersection_intervals(f, g, d, window)
            max_pieces = max(max_pieces, len(pieces))
            x = d / math.sqrt((tau(f, g) + d) * (delta_gauge(f, g) + d))
            for piece in pieces:
                max_factor = max(max_factor, piece.length / x)
            home = [p for p in pieces if p.contains(theta0, slack=1e-12)]
            if home:
                min_factor = min(min_factor, home[0].length / x)
        rows.append([d, n_cases, max_pieces, max_factor, min_factor])
    checks = [
        ("never more than 2 intervals", all(r[2] <= 2 for r in rows), ""),
        (
            "interval lengths within factor 32 of delta/sqrt((tau+delta)(Delta+delta))",
            all(r[3] <= 32.0 and r[4] >= 1.0 / 32.0 for r in rows),
            f"factors [{rows[0][4]:.4f}, {rows[0][3]:.4f}]",
        ),
    ]
    return ExperimentResult(
        ["delta", "n_cases", "max_pieces", "max_len_factor", "min_len_factor"],
        rows,
        checks,
        {},
    )


@experiment("wolff-bound-check")
def _exp_wolff(cfg) -> ExperimentResult:
    seed = cfg["seed"]
    d = 2.0 ** -5
    rho = cfg.get("rho") or 0.25
    pair = build_bipartite_balls(d, rho)
    F, G = list(pair.F), list(pair.G)
    rng = np.random.default_rng([seed, 41])
    rows = []
    all_ok = True
    for i in range(20):
        fi = sorted(rng.choice(len(F), size=min(64, len(F)), replace=False).tolist())
        gi = sorted(rng.choice(len(G), size=min(64, len(G)), replace=False).tolist())
        Fs, Gs = [F[j] for j in fi], [G[j] for j in gi]
        chk = wolff_bound_check(Fs, Gs, d, pair.rho, 1, 1)
        all_ok = all_ok and chk.ok
        rows.append([f"random-{i}", len(Fs), len(Gs), 1, 1, chk.count, chk.bound,
                     chk.ok, chk.bipartite_ok])
    dc, tc, mu, nu, n = 2.0 ** -8, cfg["t"], cfg["mu"], cfg["nu"], cfg["n"]
    Fc, Gc, _ = build_clamshell(dc, tc, mu, nu, n)
    chk = wolff_bound_check(Fc, Gc, dc, 1.0, mu, nu)
    all_ok = all_ok and chk.ok
    rows.append(["clamshell", len(Fc), len(Gc), mu, nu, chk.count, chk.bound,
                 chk.ok, chk.bipartite_ok])
    checks = [("count <= 64 * bound on every instance", all_ok, "")]
    return ExperimentResult(
        ["instance", "n_f", "n_g", "mu", "nu", "count", "bound", "ok", "bipartite_ok"],
        rows,
        checks,
        {},
    )


@experiment("broadness-scan")
def _exp_broadness(cfg) -> ExperimentResult:
    rows = []
    bush_worst = fan_worst = 0.0
    exps = _ladder(cfg, 5, 8)
    for k in exps:
        d = 2.0 ** -k
        t1, _ = build_bush(d)
        rep = line_broadness(tube_cores(t1), d, 1.0)
        rows.append(["bush-lines", d, 1.0, rep.worst_ratio])
        bush_worst = max(bush_worst, rep.worst_ratio)
    for k in exps[: max(1, len(exps) - 1)]:
        d = 2.0 ** -k
        rep = line_broadness(fan_cores(d), d, 1.0)
        rows.append(["fan-lines", d, 1.0, rep.worst_ratio])
        fan_worst = max(fan_worst, rep.worst_ratio)
    dc, tc = 2.0 ** -exps[-1], cfg["t"]
    F, _, _ = build_clamshell(dc, tc, cfg["mu"], cfg["nu"], cfg["n"])
    for alpha in (0.2, 0.5, 1.0):
        rep = quad_broadness(F, dc, alpha)
        rows.append(["clamshell-F", dc, alpha, rep.worst_ratio])
    t1_top, _ = build_bush(2.0 ** -exps[-1])
    checks = [
        (
            "bush concentration is a large share of the family",
            bush_worst >= 0.4 * len(t1_top),
            f"max {bush_worst:.2f} of {len(t1_top)} lines",
        ),
        ("fan stays bounded (<= 4)", fan_worst <= 4.0, f"max {fan_worst:.3f}"),
    ]
    return ExperimentResult(["family", "delta", "alpha", "worst_ratio"], rows, checks, {})


# ---------------------------------------------------------------------------
# family dumps

TUBE_COLUMNS = ["x", "y", "t", "a", "b", "delta"]
QUAD_COLUMNS = ["a", "b", "c"]
RECT_COLUMNS = ["a", "b", "c", "lo", "hi", "delta"]


def _tube_rows(tubes):
    return [
        [t.center.x, t.center.y, t.center.t, t.dir.a, t.dir.b, t.delta] for t in tubes
    ]


def _quad_rows(quads):
    return [[q.a, q.b, q.c] for q in quads]


def _rect_rows(rects):
    return [
        [r.center.a, r.center.b, r.center.c, r.base.lo, r.base.hi, r.thickness]
        for r in rects
    ]


def dump_family(generator: str, cfg: dict, out: str) -> list[str]:
    """Write the family as CSV; returns the list of files written.

    Tube and quadratic parts share one file; the clamshell's rectangles go to
    `<stem>.rects.csv` since their schema differs.
    """
    outp = Path(out)
    written = []
    exps = cfg.get("delta-exps")
    k = parse_delta_exps(exps)[0] if isinstance(exps, str) else (exps or [8])[0]
    d = 2.0 ** -k
    if generator == "bush":
        t1, t2 = build_bush(d)
        _write_csv(outp, TUBE_COLUMNS, _tube_rows(t1) + _tube_rows(t2))
        written.append(str(outp))
    elif generator == "opposed-pair":
        pair = build_opposed_pair(d, cfg.get("rho") or 1.0)
        _write_csv(outp, QUAD_COLUMNS, _quad_rows(pair.F) + _quad_rows(pair.G))
        written.append(str(outp))
    elif generator == "bipartite-balls":
        pair = build_bipartite_balls(d, cfg.get("rho") or 0.25)
        _write_csv(outp, QUAD_COLUMNS, _quad_rows(pair.F) + _quad_rows(pair.G))
        written.append(str(outp))
    elif generator == "clamshell":
        F, G, R = build_clamshell(d, cfg["t"], cfg["mu"], cfg["nu"], cfg["n"])
        _write_csv(outp, QUAD_COLUMNS, _quad_rows(F) + _quad_rows(G))
        written.append(str(outp))
        rect_path = outp.with_name(outp.stem + ".rects.csv")
        _write_csv(rect_path, RECT_COLUMNS, _rect_rows(R))
        written.append(str(rect_path))
    elif generator == "parabolic-net":
        t1, t2 = net_tubes(parabolic_net_spec(d))
        _write_csv(outp, TUBE_COLUMNS, _tube_rows(t1) + _tube_rows(t2))
        written.append(str(outp))
    else:
        raise KeyError(generator)
    return written


def load_family(path: str):
    """Round-trip loader for the dump format; the header names the object type."""
    from .quadratics import CurviRect, Interval

    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        vals = [float(v) for v in line.split(",")]
        if header == TUBE_COLUMNS:
            out.append(
                HTube(HPoint(vals[0], vals[1], vals[2]), HDirection(vals[3], vals[4]), vals[5])
            )
        elif header == QUAD_COLUMNS:
            out.append(Quadratic(*vals))
        elif header == RECT_COLUMNS:
            out.append(
                CurviRect(Quadratic(vals[0], vals[1], vals[2]), Interval(vals[3], vals[4]), vals[5])
            )
        else:
            raise ValueError(f"{path}: unknown schema {header}")
    return out


def _write_csv(path: Path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(path: Path, experiment_name, cfg, result, walltime):
    lines = [
        f"experiment = {experiment_name}",
        f"heislab_version = {__version__}",
        f"python = {sys.version.split()[0]}",
        f"numpy = {np.__version__}",
        f"timestamp = {datetime.now(timezone.utc).isoformat()}",
        f"walltime_seconds = {walltime:.3f}",
    ]
    for key in sorted(cfg):
        if cfg[key] is not None:
            lines.append(f"param {key} = {_fmt(cfg[key])}")
    for key in sorted(result.extras):
        lines.append(f"result {key} = {_fmt(result.extras[key])}")
    for name, passed, detail in result.checks:
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        lines.append(f"check [{status}] {name}{suffix}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_experiment(name: str, cfg: dict) -> int:
    """Execute one named experiment; returns a process exit code."""
    if name not in EXPERIMENTS:
        print(
            f"unknown experiment {name!r}; available: {', '.join(sorted(EXPERIMENTS))}",
            file=sys.stderr,
        )
        return 2
    out = cfg.get("out") or f"{name}.csv"
    t0 = time.time()
    result = EXPERIMENTS[name](cfg)
    walltime = time.time() - t0
    _write_csv(Path(out), result.columns, result.rows)
    _write_manifest(Path(out + ".manifest"), name, cfg, result, walltime)
    ok = True
    for check_name, passed, detail in result.checks:
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"[{status}] {check_name}{suffix}")
        ok = ok and passed
    print(f"wrote {out} and {out}.manifest in {walltime:.1f}s")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heislab",
        description="experiment harness for Heisenberg tube and quadratic tangency geometry",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("experiment")
    run.add_argument("--delta-exps", help="dyadic ladder A..B meaning 2^-A .. 2^-B")
    run.add_argument("--rho", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--p", type=float)
    run.add_argument("--mu", type=int)
    run.add_argument("--nu", type=int)
    run.add_argument("--n", type=int)
    run.add_argument("--t", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--grid-res", type=float)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--config")

    dump = sub.add_parser("dump", help="dump a generated family as CSV")
    dump.add_argument("generator")
    dump.add_argument("--delta-exps")
    dump.add_argument("--rho", type=float)
    dump.add_argument("--mu", type=int)
    dump.add_argument("--nu", type=int)
    dump.add_argument("--n", type=int)
    dump.add_argument("--t", type=float)
    dump.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg.update(read_config(args.config))
        except (OSError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
    for key in DEFAULTS:
        flag = key.replace("-", "_")
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = value
    try:
        cfg = coerce(cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "run":
        try:
            return run_experiment(args.experiment, cfg)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    if args.command == "dump":
        try:
            files = dump_family(args.generator, cfg, cfg["out"])
        except KeyError:
            print(
                f"unknown generator {args.generator!r}; available: bush, opposed-pair, "
                "bipartite-balls, clamshell, parabolic-net",
                file=sys.stderr,
            )
            return 2
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        for f in files:
            print(f"wrote {f}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
