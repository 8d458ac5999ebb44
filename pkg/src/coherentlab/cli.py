"""Command-line orchestration: config parsing, experiment dispatch, reports.

Five subcommands (geometry, rep-check, frame, density, hole), each driven by
one INI section of the same name.  Reports are emitted as report.json plus a
rows CSV; reruns with identical config/seed/version are byte-identical, so
wall-clock timings are printed to the console only.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, density, frames, groups, reporting, reps

EXPERIMENTS = ("geometry", "rep-check", "frame", "density", "hole")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending key."""


def parallel_map(fn, items, threads: int = 1):
    """Order-preserving map, optionally on a thread pool."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- Config handling -----------------------------------------------------------------

_SCHEMAS = {
    "geometry": {
        "group": ("str", "integer_lattice", ("integer_lattice",
                                             "discrete_heisenberg", "euclidean")),
        "metric": ("str", "", ("", "word", "euclidean", "heisenberg_gauge")),
        "growth_radii": ("floats", "4,5,6,7,8,9,10,11,12", None),
        "folner_r0": ("float", "1", None),
        "folner_count": ("int", "3", None),
        "folner_step": ("float", "10", None),
        "folner_k_radius": ("float", "1", None),
        "annular_radii": ("floats", "2,4,8,16", None),
        "annular_fracs": ("floats", "0.25,0.5", None),
        "annular_c_max": ("float", "8", None),
        "seed": ("int", "0", None),
    },
    "rep-check": {
        "n": ("int", "8", None),
        "trials": ("int", "20", None),
        "tol": ("float", "1e-10", None),
        "window": ("str", "random_unit", ("random_unit", "delta")),
        "degree_radius": ("float", "-1", None),
        "seed": ("int", "0", None),
    },
    "frame": {
        "model": ("str", "gaussian", ("gaussian", "finite")),
        "n": ("int", "8", None),
        "subset": ("str", "full", ("full", "even_shifts", "single_row")),
        "lattice_a": ("float", "0.5", None),
        "lattice_b": ("float", "0.5", None),
        "section_radius": ("float", "12", None),
        "margin": ("float", "3", None),
        "restriction_radius": ("float", "6", None),
        "q_radius": ("float", "0.6", None),
        "k_radius": ("float", "4", None),
        "dump_matrices": ("bool", "false", None),
        "seed": ("int", "0", None),
    },
    "density": {
        "side": ("str", "frame", ("frame", "riesz")),
        "lattice_a": ("float", "0.5", None),
        "lattice_b": ("float", "0.5", None),
        "radii": ("floats", "6,10,14", None),
        "q_radius": ("float", "1", None),
        "section_radius": ("float", "12", None),
        "margin": ("float", "3", None),
        "restriction_radius": ("float", "8", None),
        "grid_spacing": ("float", "-1", None),
        "tol": ("float", "1e-8", None),
        "fit_exponent": ("bool", "false", None),
        "alpha": ("float", "2", None),
        "delta": ("float", "1", None),
        "diagnostic": ("bool", "false", None),
        "seed": ("int", "0", None),
    },
    "hole": {
        "lattice_a": ("float", "0.5", None),
        "lattice_b": ("float", "0.5", None),
        "hole_radii": ("floats", "0,1,2,4", None),
        "section_radius": ("float", "12", None),
        "margin": ("float", "3", None),
        "r0": ("float", "1.25", None),
        "alpha": ("float", "2", None),
        "delta": ("float", "1", None),
        "calibration_radius": ("float", "8", None),
        "seed": ("int", "0", None),
    },
}


def _parse_value(key: str, raw: str, typ: str):
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if typ == "floats":
            return tuple(float(v) for v in raw.replace(" ", "").split(",") if v)
        return raw
    except ValueError as exc:
        raise ConfigError(f"invalid value for '{key}': {raw!r}") from exc


def load_config(path: str, experiment: str) -> dict:
    """Parse and validate the INI section for the experiment kind."""
    schema = _SCHEMAS[experiment]
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path!r}")
    if not parser.has_section(experiment):
        raise ConfigError(f"config is missing the [{experiment}] section")
    cfg = {}
    for key, (typ, default, choices) in schema.items():
        raw = parser.get(experiment, key, fallback=default)
        val = _parse_value(key, raw, typ)
        if choices and val not in choices:
            raise ConfigError(f"invalid value for '{key}': {val!r} "
                              f"(choose from {', '.join(c or '<auto>' for c in choices)})")
        cfg[key] = val
    for key in parser.options(experiment):
        if key not in schema:
            raise ConfigError(f"unknown key '{key}' in [{experiment}]")
    _validate(experiment, cfg)
    return cfg


def _validate(experiment: str, cfg: dict) -> None:
    if experiment == "geometry":
        if cfg["folner_step"] <= cfg["folner_r0"]:
            raise ConfigError(
                f"step must exceed r0 (got step={cfg['folner_step']:g}, "
                f"r0={cfg['folner_r0']:g})")
        dim = 3 if cfg["group"] == "discrete_heisenberg" else 2
        top = max([*cfg["growth_radii"],
                   cfg["folner_r0"] + cfg["folner_step"] * cfg["folner_count"]])
        if (2.0 * top + 1.0) ** dim > groups.ball_budget():
            raise ConfigError(f"growth_radii exceed the enumeration budget "
                              f"({groups.BUDGET_ENV_VAR}={groups.ball_budget()})")
    elif experiment == "rep-check":
        if not 2 <= cfg["n"] <= 64:
            raise ConfigError("n must be between 2 and 64 for exhaustive checks")
        if cfg["trials"] < 1:
            raise ConfigError("trials must be positive")
    elif experiment == "frame":
        if cfg["model"] == "finite" and not 2 <= cfg["n"] <= 64:
            raise ConfigError("n must be between 2 and 64 for exhaustive checks")
        if cfg["model"] == "gaussian":
            if cfg["section_radius"] <= cfg["margin"] + 1.0:
                raise ConfigError("section_radius must exceed margin + 1")
            if cfg["lattice_a"] <= 0 or cfg["lattice_b"] <= 0:
                raise ConfigError("lattice_a and lattice_b must be positive")
    elif experiment == "density":
        if not cfg["radii"]:
            raise ConfigError("radii must be a nonempty list")
        if any(r <= 0 for r in cfg["radii"]):
            raise ConfigError("radii must be positive")
        if cfg["fit_exponent"]:
            if len(cfg["radii"]) < 4 or max(cfg["radii"]) < 4.0 * min(cfg["radii"]):
                raise ConfigError("fit_exponent needs radii: >= 4 values "
                                  "spanning a factor of 4")
        if (2.0 * max(cfg["radii"]) / min(cfg["lattice_a"], cfg["lattice_b"])) ** 2 \
                > groups.ball_budget():
            raise ConfigError("radii exceed the enumeration budget for this lattice")
    elif experiment == "hole":
        if cfg["lattice_a"] * cfg["lattice_b"] >= 1.0:
            raise ConfigError("lattice_a * lattice_b must be < 1 (frame regime)")
        if cfg["hole_radii"] and cfg["section_radius"] < 2.0 * max(cfg["hole_radii"]):
            raise ConfigError("section_radius too small relative to the "
                              "largest hole_radii entry")
        if cfg["r0"] < 1.0:
            raise ConfigError("r0 must be at least 1")
        if cfg["alpha"] + cfg["delta"] <= 1.0:
            raise ConfigError("alpha + delta must exceed 1")


# -- Run report ----------------------------------------------------------------------


@dataclass
class RunReport:
    experiment: str
    config: dict
    records: list = field(default_factory=list)
    csv_header: tuple = ()
    csv_rows: list = field(default_factory=list)
    matrices: dict = field(default_factory=dict)  # filename -> ndarray audit dumps
    timings: dict = field(default_factory=dict)  # console only, never emitted

    @property
    def overall_pass(self) -> bool:
        flags = [r.get("passed") for r in self.records
                 if "passed" in r and not r.get("diagnostic", False)]
        return all(flags) if flags else True

    def to_json(self) -> dict:
        return {"experiment": self.experiment, "config": dict(self.config),
                "version": __version__, "records": self.records,
                "overall_pass": self.overall_pass}


def emit_report(report: RunReport, out_dir: str,
                formats: tuple = ("csv", "json")) -> list:
    """Write report.json / rows.csv; returns the written paths."""
    reporting.ensure_dir(out_dir)
    written = []
    if "json" in formats:
        written.append(reporting.write_json(
            report.to_json(), os.path.join(out_dir, "report.json")))
    if "csv" in formats and report.csv_header:
        meta = {"experiment": report.experiment, "config": dict(report.config),
                "version": __version__}
        written.append(reporting.write_csv(
            os.path.join(out_dir, "rows.csv"), report.csv_header,
            report.csv_rows, meta))
    for fname, mat in report.matrices.items():
        path = os.path.join(out_dir, fname)
        frames.dump_matrix_csv(mat, path)
        written.append(path)
    return written


def _record(name, payload=None, passed=None, diagnostic=None, **fields) -> dict:
    """Flatten a payload dict plus extras into one named record.

    An explicit ``passed``/``diagnostic`` argument wins over payload keys of
    the same name; otherwise the payload's own flag is promoted.
    """
    merged = {**(payload or {}), **fields}
    if passed is None:
        passed = merged.pop("passed", None)
    else:
        merged.pop("passed", None)
    if diagnostic is None:
        diagnostic = merged.pop("diagnostic", False)
    else:
        merged.pop("diagnostic", None)
    rec = {"name": name, **merged}
    if passed is not None:
        rec["passed"] = bool(passed)
    if diagnostic:
        rec["diagnostic"] = True
    return rec


# -- Runners -------------------------------------------------------------------------


def run_geometry(cfg: dict, threads: int = 1) -> RunReport:
    report = RunReport("geometry", cfg)
    group_kind = cfg["group"]
    metric_kind = cfg["metric"]
    if group_kind == "euclidean":
        metric = groups.euclidean_metric(dim=2)
        metric_kind = metric_kind or "euclidean"
    elif group_kind == "discrete_heisenberg":
        g = groups.discrete_heisenberg()
        metric = (groups.heisenberg_gauge_metric(g)
                  if metric_kind == "heisenberg_gauge" else groups.word_metric(g))
        metric_kind = metric_kind or "word"
    else:
        metric = groups.word_metric(groups.integer_lattice(2))
        metric_kind = metric_kind or "word"
    t0 = time.perf_counter()
    fit = groups.fit_growth_exponent(metric, cfg["growth_radii"])
    report.records.append(_record("growth_fit", fit.to_json()))
    report.timings["growth"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ad = groups.estimate_annular_decay(metric, cfg["annular_radii"],
                                       cfg["annular_fracs"],
                                       c_max=cfg["annular_c_max"])
    radii = cfg["annular_radii"]
    fresh = sorted({*radii, *((r1 + r2) / 2.0 for r1, r2 in zip(radii, radii[1:]))})
    violations = groups.annular_violations(ad, metric, fresh, cfg["annular_fracs"])
    report.records.append(_record("annular_decay", ad.to_json(), passed=violations == 0,
                                  violations_recheck=violations))
    report.timings["annular"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    exhaustion = groups.folner_exhaustion(metric, cfg["folner_r0"],
                                          cfg["folner_count"], cfg["folner_step"])
    k = groups.ball(metric, None, cfg["folner_k_radius"])
    ratios = parallel_map(lambda b: groups.folner_ratio(metric, b, k),
                          exhaustion, threads)
    rows = []
    for i, (b, ratio) in enumerate(zip(exhaustion, ratios)):
        measure = (float(len(b.points)) if b.points is not None
                   else groups.ball_measure(metric, b.radius, b.closed))
        rows.append((i, b.radius, measure, ratio))
    monotone = all(ratios[i + 1] <= ratios[i] + 1e-12
                   for i in range(len(ratios) - 1))
    report.records.append(_record("folner_table", passed=monotone,
                                  radii=[b.radius for b in exhaustion],
                                  ratios=list(ratios)))
    report.timings["folner"] = time.perf_counter() - t0
    report.csv_header = ("experiment", "n", "radius", "measure", "folner_ratio")
    report.csv_rows = [("folner", i, r, m, q) for (i, r, m, q) in rows]
    report.config = {**cfg, "metric": metric_kind}
    return report


def run_rep_check(cfg: dict, threads: int = 1) -> RunReport:
    report = RunReport("rep-check", cfg)
    n = cfg["n"]
    rep = reps.finite_weyl_heisenberg(n)
    rng = np.random.default_rng(cfg["seed"])
    if cfg["window"] == "delta":
        g = np.zeros(n, dtype=complex)
        g[0] = 1.0
    else:
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g /= np.linalg.norm(g)
    t0 = time.perf_counter()
    orth = reps.verify_orthogonality(rep, trials=cfg["trials"], tol=cfg["tol"],
                                     seed=cfg["seed"])
    report.records.append(_record("orthogonality", orth))
    report.timings["orthogonality"] = time.perf_counter() - t0
    if n <= 16:
        t0 = time.perf_counter()
        coc = reps.verify_cocycle_identity(rep)
        report.records.append(_record("cocycle_identity", coc))
        report.timings["cocycle"] = time.perf_counter() - t0
    radius = cfg["degree_radius"] if cfg["degree_radius"] > 0 else 2.0 * n
    est = reps.estimate_formal_degree(rep, g, radius)
    dev = abs(est - 1.0 / n)
    report.records.append(_record("formal_degree", passed=dev <= 1e-10,
                                  estimate=est, expected=1.0 / n, deviation=dev))
    report.csv_header = ("experiment", "n", "check", "value", "passed")
    report.csv_rows = sorted(
        [("rep-check", n, r["name"], r.get("max_deviation", r.get("deviation", 0.0)),
          r["passed"]) for r in report.records],
        key=lambda row: row[2])
    return report


def run_frame(cfg: dict, threads: int = 1) -> RunReport:
    report = RunReport("frame", cfg)
    if cfg["model"] == "finite":
        n = cfg["n"]
        rep = reps.finite_weyl_heisenberg(n)
        rng = np.random.default_rng(cfg["seed"])
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g /= np.linalg.norm(g)
        subset = cfg["subset"]
        if subset == "full":
            lam = frames.full_torus(n)
        elif subset == "even_shifts":
            lam = frames.finite_subset(n, [(k, l) for k in range(0, n, 2)
                                           for l in range(n)])
        else:
            lam = frames.finite_subset(n, [(k, 0) for k in range(n)])
        fb = frames.frame_operator_spectrum(rep, g, lam)
        rb = frames.riesz_bounds(rep, g, lam)
        q = groups.ball(groups.word_metric(rep.group), None, cfg["q_radius"])
        bessel = frames.bessel_separation_bound(rep, g, lam, q,
                                                bessel_bound=fb.upper)
        amalgam = frames.amalgam_check(rep, g, lam, q, cfg["k_radius"])
        if cfg["dump_matrices"]:
            report.matrices["synthesis.csv"] = np.column_stack(
                [reps.apply_rep(rep, x, g) for x in lam.points])
        report.records.append(_record("frame_bounds", fb.to_json(), passed=True))
        report.records.append(_record("riesz_bounds", rb.to_json(), passed=True))
        if fb.kind == "frame":
            dual = frames.canonical_dual(rep, g, lam, seed=cfg["seed"])
            report.records.append(_record(
                "canonical_dual", passed=dual.passed,
                reconstruction_error=dual.reconstruction_error,
                dual_bounds=dual.dual_bounds.to_json()))
    else:
        rep = reps.gabor_gaussian()
        g = reps.gaussian_window()
        lam = frames.lattice(cfg["lattice_a"], cfg["lattice_b"])
        fb = frames.frame_operator_spectrum(rep, g, lam,
                                            section_radius=cfg["section_radius"],
                                            margin=cfg["margin"])
        rb = frames.riesz_bounds(rep, g, lam,
                                 restriction_radius=cfg["restriction_radius"])
        q = groups.ball(groups.euclidean_metric(dim=2), None, cfg["q_radius"])
        bessel = frames.bessel_separation_bound(rep, g, lam, q,
                                                bessel_bound=fb.upper)
        amalgam = frames.amalgam_check(rep, g, lam, q, cfg["k_radius"])
        if cfg["dump_matrices"]:
            pts = lam.restrict(groups.ball(
                groups.euclidean_metric(dim=2), None, cfg["restriction_radius"]))
            gram = np.array([[frames.gabor_gram_entry(mu, nu) for nu in pts]
                             for mu in pts])
            report.matrices["gram.csv"] = gram
        report.records.append(_record("frame_bounds", fb.to_json(), passed=True))
        report.records.append(_record("riesz_bounds", rb.to_json(), passed=True))
    report.records.append(_record("bessel_separation", bessel,
                                  passed=bessel["passed"] and bessel["scale_invariant"]))
    report.records.append(_record("amalgam", amalgam))
    report.csv_header = ("experiment", "n", "check", "lhs", "rhs", "passed")
    rows = [
        ("frame", 0, "bessel_separation", bessel["rel_sep"], bessel["bound"],
         bessel["passed"]),
        ("frame", 1, "amalgam", amalgam["lhs"], amalgam["rhs"], amalgam["passed"]),
    ]
    report.csv_rows = rows
    return report


def run_density(cfg: dict, threads: int = 1) -> RunReport:
    report = RunReport("density", cfg)
    rep = reps.gabor_gaussian()
    g = reps.gaussian_window()
    lam = frames.lattice(cfg["lattice_a"], cfg["lattice_b"])
    em = groups.euclidean_metric(dim=2)
    exhaustion = [groups.ball(em, None, r) for r in cfg["radii"]]
    q = groups.ball(em, None, cfg["q_radius"])
    spacing = cfg["grid_spacing"] if cfg["grid_spacing"] > 0 else None
    side = cfg["side"]
    t0 = time.perf_counter()
    if side == "frame":
        bounds = frames.frame_operator_spectrum(
            rep, g, lam, section_radius=cfg["section_radius"], margin=cfg["margin"])
    else:
        bounds = frames.riesz_bounds(
            rep, g, lam, restriction_radius=cfg["restriction_radius"])
    report.timings["bounds"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    kind = "I" if side == "frame" else "J"
    integral_fn = density.error_integral_I if kind == "I" else density.error_integral_J
    integrals = parallel_map(
        lambda ik: integral_fn(rep, g, q, ik[1], tol=cfg["tol"], n=ik[0]),
        list(enumerate(exhaustion)), threads)
    report.timings["integrals"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    checker = (density.check_frame_counting if side == "frame"
               else density.check_riesz_counting)
    checks = checker(rep, g, lam, exhaustion, q, bounds, integrals=integrals,
                     center_grid_spacing=spacing, diagnostic=cfg["diagnostic"])
    report.timings["counting"] = time.perf_counter() - t0
    dens = density.beurling_density(lam, em, exhaustion, spacing)
    report.records.append(_record("bounds", bounds.to_json(), passed=True))
    for chk in checks:
        report.records.append(_record(chk.theorem, chk.to_json()))
    report.records.append(_record("density_estimate", lower=dens.lower,
                                  upper=dens.upper, rel_sep=dens.rel_sep))
    if cfg["fit_exponent"]:
        fit = density.check_polynomial_error_exponent(
            dens.records, integrals, cfg["alpha"], cfg["delta"],
            d_pi=rep.formal_degree, side="inf" if side == "frame" else "sup")
        report.records.append(_record(fit.theorem, fit.to_json()))
    report.csv_header = ("n", "r_n", "inf_count", "sup_count", "measure",
                         "I_n", "J_n", "lhs", "rhs", "margin", "pass")
    per_n = [c for c in checks if c.theorem in ("T3.3", "T3.5")]
    rows = []
    for rec, integ, chk in zip(dens.records, integrals, per_n):
        i_val = integ.value if kind == "I" else ""
        j_val = integ.value if kind == "J" else ""
        rows.append((rec.n, rec.radius, rec.inf_count, rec.sup_count,
                     rec.measure, i_val, j_val, chk.lhs, chk.rhs, chk.margin,
                     chk.passed))
    report.csv_rows = rows
    return report


def run_hole(cfg: dict, threads: int = 1) -> RunReport:
    report = RunReport("hole", cfg)
    rep = reps.gabor_gaussian()
    g = reps.gaussian_window()
    t0 = time.perf_counter()
    exps = density.run_hole_falsification(
        rep, g, cfg["lattice_a"], cfg["lattice_b"], cfg["hole_radii"],
        cfg["section_radius"], r0=cfg["r0"], alpha=cfg["alpha"],
        delta=cfg["delta"], margin=cfg["margin"],
        calibration_radius=cfg["calibration_radius"])
    report.timings["experiments"] = time.perf_counter() - t0
    a_prev = None
    monotone = True
    for e in exps:
        if a_prev is not None and e.bounds.lower > a_prev + 1e-12:
            monotone = False
        a_prev = e.bounds.lower
        report.records.append(_record(f"hole_r={e.hole_radius:g}", e.to_json()))
    report.records.append(_record("lower_bound_monotone", passed=monotone))
    report.csv_header = ("experiment", "n", "hole_radius", "A", "B",
                         "theorem_radius", "tail_value", "tail_envelope", "pass")
    report.csv_rows = [
        ("hole", i, e.hole_radius, e.bounds.lower, e.bounds.upper,
         "" if e.theorem_radius is None else e.theorem_radius,
         "" if e.tail_value is None else e.tail_value,
         "" if e.tail_envelope is None else e.tail_envelope, e.passed)
        for i, e in enumerate(exps)]
    return report


_RUNNERS = {"geometry": run_geometry, "rep-check": run_rep_check,
            "frame": run_frame, "density": run_density, "hole": run_hole}


def run_experiment(experiment: str, config_path: str, out_dir: str,
                   seed: int | None = None, threads: int = 1) -> RunReport:
    cfg = load_config(config_path, experiment)
    if seed is not None:
        cfg["seed"] = seed
    cfg = {**cfg, "threads": threads}
    report = _RUNNERS[experiment](cfg, threads=threads)
    emit_report(report, out_dir)
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coherentlab",
        description="Coherent-frame experiments: geometry, representation "
                    "checks, frame bounds, densities, and hole falsification.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for kind in EXPERIMENTS:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="out")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        report = run_experiment(args.experiment, args.config, args.out,
                                seed=args.seed, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except groups.BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    for rec in report.records:
        if "passed" in rec:
            tag = "PASS" if rec["passed"] else "FAIL"
            if rec.get("diagnostic"):
                tag = "DIAG"
            print(f"[{tag}] {rec['name']}")
    for stage, dt in report.timings.items():
        print(f"  time[{stage}] = {dt:.2f}s")
    print(f"overall: {'PASS' if report.overall_pass else 'FAIL'} "
          f"(outputs in {args.out})")
    return 0 if report.overall_pass else 1


if __name__ == "__main__":
    sys.exit(main())
