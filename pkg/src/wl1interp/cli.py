"""Command-line surface: config parsing, experiment verbs, result files.

Verbs: run, phase, rip, nsp, gram, sample, oracle-check.  Configs are
strict JSON (unknown keys rejected, errors path-qualified); every run
writes a manifest echoing the fully resolved configuration.  Results are
written atomically (temp file + rename) with 17 significant digits so CSV
values round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, analysis, experiments, report, solvers
from .bases import OrthonormalSystem, gram_check, sampling_matrix
from .indexsets import IndexSet, WeightScheme, build_index_set
from .sampling import RandomStream, SamplingMeasure, draw_points, points_to_csv, sidecar

OUTPUT_ROOT_ENV = "WL1INTERP_OUT"


class ConfigError(ValueError):
    """Configuration problem; message carries the offending key path."""


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _require(doc, key, typ, path):
    if key not in doc:
        raise ConfigError(f"{path}.{key}: missing required key")
    val = doc[key]
    if not isinstance(val, typ) or isinstance(val, bool):
        names = "/".join(t.__name__ for t in (typ if isinstance(typ, tuple) else (typ,)))
        raise ConfigError(f"{path}.{key}: expected {names}, got {type(val).__name__}")
    return val


def _check_keys(doc, allowed, path):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _weight_scheme(doc, path) -> WeightScheme:
    _check_keys(doc, {"kind", "param", "values"}, path)
    kind = _require(doc, "kind", str, path)
    try:
        if kind == "table":
            return WeightScheme("table", table=tuple(float(v) for v in doc["values"]))
        return WeightScheme(kind, param=doc.get("param"))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_MATRIX_KEYS = {"kind", "m", "N", "family", "seed"}


def _build_matrix(doc, path):
    _check_keys(doc, _MATRIX_KEYS, path)
    kind = _require(doc, "kind", str, path)
    m = int(_require(doc, "m", int, path))
    n = int(_require(doc, "N", int, path))
    seed = int(doc.get("seed", 0))
    if kind == "gaussian":
        rng = RandomStream(seed).generator()
        return rng.standard_normal((m, n)) / np.sqrt(m)
    if kind == "sampling":
        family = _require(doc, "family", str, path)
        system = OrthonormalSystem(family)
        if family == "real_trigonometric":
            iset = build_index_set("range_1d", N=n)
        else:
            iset = IndexSet(1, tuple((k,) for k in range(n)))
        pts = draw_points(system.measure, m, RandomStream(seed))
        return sampling_matrix(system, iset, pts, normalized=True).values
    raise ConfigError(f"{path}.kind: unknown matrix kind {kind!r}")


# -- config resolution ------------------------------------------------------

_RUN_NUMERIC = {"m": 30, "trials": 100, "N": 100, "d": 15,
                "grid_size": experiments.ERROR_GRID_SIZE,
                "quad_nodes": experiments.QUAD_NODES}


def parse_config(source, verb: str = "run") -> dict:
    """Load, validate, and resolve a config.  ``source`` is a path or an
    already-parsed dict.  Resolution is idempotent: parsing a resolved
    config returns it unchanged."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    else:
        doc = dict(source)
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at top level")

    if verb == "run":
        allowed = {"preset", "seed", "overrides"} | set(_RUN_NUMERIC)
        _check_keys(doc, allowed, "config")
        preset = _require(doc, "preset", str, "config")
        if preset not in {"runge-trig", "runge-legendre"}:
            raise ConfigError(f"config.preset: unknown preset {preset!r}")
        seed = int(_require(doc, "seed", int, "config"))
        resolved = {"preset": preset, "seed": seed}
        overrides = doc.get("overrides", {})
        _check_keys(overrides, set(_RUN_NUMERIC), "config.overrides")
        for key, default in _RUN_NUMERIC.items():
            val = overrides.get(key, doc.get(key, default))
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"config.{key}: expected int")
            resolved[key] = val
        return resolved

    if verb == "phase":
        allowed = {"family", "N", "weights", "m_values", "s_values",
                   "trials", "seed"}
        _check_keys(doc, allowed, "config")
        return {
            "family": doc.get("family", "real_trigonometric"),
            "N": int(doc.get("N", 101)),
            "weights": doc.get("weights", {"kind": "sqrt"}),
            "m_values": _require(doc, "m_values", list, "config"),
            "s_values": _require(doc, "s_values", list, "config"),
            "trials": int(doc.get("trials", 50)),
            "seed": int(_require(doc, "seed", int, "config")),
        }

    if verb in {"rip", "nsp"}:
        allowed = {"matrix", "weights", "s", "mode", "n_supports",
                   "trials", "support_mode", "seed"}
        _check_keys(doc, allowed, "config")
        out = {
            "matrix": _require(doc, "matrix", dict, "config"),
            "weights": doc.get("weights", {"kind": "constant", "param": 1.0}),
            "s": float(_require(doc, "s", (int, float), "config")),
            "seed": int(doc.get("seed", 0)),
        }
        if verb == "rip":
            out["mode"] = doc.get("mode", "exhaustive")
            out["n_supports"] = int(doc.get("n_supports", 1000))
        else:
            out["trials"] = int(doc.get("trials", 1000))
            out["support_mode"] = doc.get("support_mode", "exhaustive")
        return out

    if verb == "gram":
        allowed = {"family", "dimension", "max_degree", "quadrature"}
        _check_keys(doc, allowed, "config")
        quad = doc.get("quadrature", {"kind": "gauss", "n": 200})
        _check_keys(quad, {"kind", "n", "seed"}, "config.quadrature")
        return {
            "family": _require(doc, "family", str, "config"),
            "dimension": int(doc.get("dimension", 1)),
            "max_degree": int(doc.get("max_degree", 30)),
            "quadrature": quad,
        }

    if verb == "sample":
        allowed = {"measure", "dimension", "m", "seed", "stream"}
        _check_keys(doc, allowed, "config")
        return {
            "measure": _require(doc, "measure", str, "config"),
            "dimension": int(doc.get("dimension", 1)),
            "m": int(_require(doc, "m", int, "config")),
            "seed": int(_require(doc, "seed", int, "config")),
            "stream": int(doc.get("stream", 0)),
        }

    if verb == "oracle-check":
        allowed = {"instances", "m", "N", "seed"}
        _check_keys(doc, allowed, "config")
        out = {
            "instances": int(doc.get("instances", 100)),
            "m": int(doc.get("m", 5)),
            "N": int(doc.get("N", 8)),
            "seed": int(doc.get("seed", 0)),
        }
        if out["m"] > 6 or out["N"] > 10:
            raise ConfigError("config.m/config.N: oracle check capped at m <= 6, N <= 10")
        return out

    raise ConfigError(f"unknown verb {verb!r}")


# -- atomic output ----------------------------------------------------------

def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_manifest(out_dir: Path, verb: str, config: dict, flags: dict) -> None:
    doc = {"tool": "wl1interp", "version": __version__, "verb": verb,
           "config": config, "flags": flags}
    write_atomic(out_dir / "manifest.json", json.dumps(doc, indent=2) + "\n")


def trials_to_csv(results) -> str:
    header = "trial,method,error_linf,error_l2,odd_mass,iterations,status,wall_ms"
    lines = [header]
    for r in sorted(results, key=lambda r: (r.trial, r.method)):
        lines.append(
            f"{r.trial},{r.method},{_fmt(r.error_linf)},{_fmt(r.error_l2)},"
            f"{_fmt(r.odd_mass)},{r.iterations},{r.status},{_fmt(r.wall_ms)}"
        )
    return "\n".join(lines) + "\n"


def curves_to_csv(curves) -> str:
    grid, target, recs = curves
    labels = list(recs)
    lines = ["t,f," + ",".join(labels)]
    for i, t in enumerate(grid):
        row = [_fmt(t), _fmt(target[i])] + [_fmt(recs[lab][i]) for lab in labels]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# -- verb drivers -----------------------------------------------------------

def _run_run(config, out_dir, flags):
    exp = experiments.runge_preset(config["preset"], config["seed"])
    # apply resolved numeric parameters
    if config["preset"] == "runge-trig":
        iset = build_index_set("range_1d", N=config["N"])
    else:
        iset = IndexSet(1, tuple((k,) for k in range(config["N"])))
    methods = tuple(
        experiments.MethodSpec("least_squares", m.label, d=config["d"])
        if m.name == "least_squares" else m
        for m in exp.methods
    )
    exp = experiments.ExperimentConfig(
        system=exp.system, index_set=iset, measure_tag=exp.measure_tag,
        m=config["m"], trials=config["trials"], seed=config["seed"],
        methods=methods, target=exp.target, grid_size=config["grid_size"],
        quad_nodes=config["quad_nodes"], preset=config["preset"],
    )
    results, summary, curves = experiments.run_runge_suite(exp)
    failures = sum(1 for r in results if r.status.startswith("failed"))
    flags["trial_failures"] = failures
    write_atomic(out_dir / "trials.csv", trials_to_csv(results))
    write_atomic(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")
    write_atomic(out_dir / "curves.csv", curves_to_csv(curves))
    grid, target, recs = curves
    report.render_curves(grid, target, recs, out_dir / "curves.png",
                         title=config["preset"])
    report.render_method_panels(grid, target, recs, out_dir / "methods.png",
                                title=config["preset"])
    print(f"wrote trials.csv, summary.json, curves.csv, figures to {out_dir}")
    for method, rec in summary.items():
        med = rec.get("error_linf", {}).get("median", float("nan"))
        print(f"  {method:22s} median Linf {med:.3e}")
    return failures == 0


def _run_phase(config, out_dir, flags):
    family = config["family"]
    system = OrthonormalSystem(family)
    if family == "real_trigonometric":
        iset = build_index_set("range_1d", N=config["N"])
    else:
        iset = IndexSet(1, tuple((k,) for k in range(config["N"])))
    scheme = _weight_scheme(config["weights"], "config.weights")
    table = experiments.run_phase_diagram(
        system, iset, scheme,
        [int(v) for v in config["m_values"]],
        [float(v) for v in config["s_values"]],
        config["trials"], RandomStream(config["seed"]),
    )
    lines = ["s,m,probability"]
    for si, s in enumerate(table["s"]):
        for mi, m in enumerate(table["m"]):
            lines.append(f"{_fmt(s)},{m},{_fmt(table['probability'][si][mi])}")
    write_atomic(out_dir / "phase.csv", "\n".join(lines) + "\n")
    report.render_phase_diagram(table, out_dir / "phase.png",
                                title=f"{family}, {config['trials']} trials")
    print(f"wrote phase.csv and phase.png to {out_dir}")
    return True


def _run_rip(config, out_dir, flags):
    A = _build_matrix(config["matrix"], "config.matrix")
    scheme = _weight_scheme(config["weights"], "config.weights")
    omega = np.array([scheme.weight_of(j) for j in range(1, A.shape[1] + 1)])
    rep = analysis.wrip_constant(
        A, omega, config["s"], mode=config["mode"],
        n_supports=config["n_supports"], stream=RandomStream(config["seed"]),
    )
    write_atomic(out_dir / "rip.json", rep.to_json() + "\n")
    print(f"delta_(omega,{config['s']}) = {rep.delta:.6g}  "
          f"({rep.method}, {rep.supports_scanned} supports)")
    return True


def _run_nsp(config, out_dir, flags):
    A = _build_matrix(config["matrix"], "config.matrix")
    scheme = _weight_scheme(config["weights"], "config.weights")
    omega = np.array([scheme.weight_of(j) for j in range(1, A.shape[1] + 1)])
    s = config["s"]
    rip = analysis.wrip_constant(A, omega, 3.0 * s)
    if rip.delta >= 1.0:
        print(f"delta_(omega,{3*s:g}) = {rip.delta:.4g} >= 1: "
              "null space property not certifiable")
        flags["nsp_not_certifiable"] = True
        write_atomic(out_dir / "nsp.json", json.dumps(
            {"delta_3s": rip.delta, "certified": False}) + "\n")
        return True
    rho, tau, valid = analysis.rip_to_nsp_constants(rip.delta)
    rep = analysis.check_nsp_empirical(
        A, omega, s, rho, tau, config["trials"],
        RandomStream(config["seed"]), config["support_mode"],
    )
    doc = json.loads(rep.to_json())
    doc["delta_3s"] = rip.delta
    doc["rip_implies_nsp"] = valid
    write_atomic(out_dir / "nsp.json", json.dumps(doc, indent=2) + "\n")
    print(f"delta_3s = {rip.delta:.4g}  rho = {rho:.4g}  tau = {tau:.4g}  "
          f"valid = {valid}  violations = {len(rep.violations)}/{rep.trials}")
    return len(rep.violations) == 0


def _run_gram(config, out_dir, flags):
    system = OrthonormalSystem(config["family"], config["dimension"])
    if config["family"] == "real_trigonometric":
        iset = build_index_set("range_1d", N=config["max_degree"])
    elif config["family"] in {"spherical_harmonics_real", "spherical_preconditioned"}:
        iset = experiments.spherical_index_set(config["max_degree"])
    elif config["dimension"] == 1:
        iset = IndexSet(1, tuple((k,) for k in range(config["max_degree"] + 1)))
    else:
        iset = build_index_set("tensor_box", d=config["dimension"],
                               N_per_axis=config["max_degree"])
    quad = config["quadrature"]
    if quad["kind"] == "gauss":
        spec = ("gauss", int(quad.get("n", 200)))
    else:
        spec = ("montecarlo", int(quad.get("n", 10**6)), int(quad.get("seed", 0)))
    disc = gram_check(system, iset, spec)
    write_atomic(out_dir / "gram.json", json.dumps(
        {"family": config["family"], "max_degree": config["max_degree"],
         "quadrature": quad, "max_discrepancy": disc}) + "\n")
    print(f"gram discrepancy {config['family']}: {disc:.3e}")
    return True


def _run_sample(config, out_dir, flags):
    measure = SamplingMeasure(config["measure"], config["dimension"])
    stream = RandomStream(config["seed"], config["stream"])
    pts = draw_points(measure, config["m"], stream)
    write_atomic(out_dir / "points.csv", points_to_csv(pts))
    write_atomic(out_dir / "points.json",
                 json.dumps(sidecar(measure, stream), indent=2) + "\n")
    print(f"wrote {config['m']} points to {out_dir / 'points.csv'}")
    return True


def _run_oracle_check(config, out_dir, flags):
    rng = RandomStream(config["seed"]).generator()
    m, n = config["m"], config["N"]
    bad = []
    for i in range(config["instances"]):
        A = rng.standard_normal((m, n))
        x = np.zeros(n)
        x[rng.choice(n, 2, replace=False)] = rng.standard_normal(2)
        y = A @ x
        omega = 1.0 + 2.0 * rng.random(n)
        oracle = solvers.lp_oracle_wl1(A, y, omega)
        res = solvers.solve_wl1(A, y, omega)
        rel = abs(res.objective - oracle.objective) / (1.0 + oracle.objective)
        cert = solvers.certify_optimality(A, y, omega, res.coefficients,
                                          dual=res.certificate)
        if rel > 1e-6 or not cert["ok"]:
            bad.append({"instance": i, "relative_gap": rel, "certificate": cert})
    doc = {"instances": config["instances"], "mismatches": bad}
    write_atomic(out_dir / "oracle.json", json.dumps(doc, indent=2) + "\n")
    print(f"oracle check: {config['instances'] - len(bad)}/{config['instances']} ok")
    return not bad


_VERBS = {
    "run": _run_run,
    "phase": _run_phase,
    "rip": _run_rip,
    "nsp": _run_nsp,
    "gram": _run_gram,
    "sample": _run_sample,
    "oracle-check": _run_oracle_check,
}


def _apply_cli_overrides(config, pairs):
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r}: expected key=value")
        key, _, raw = pair.partition("=")
        target = config
        parts = key.split(".")
        for part in parts[:-1]:
            if part not in target or not isinstance(target[part], dict):
                raise ConfigError(f"override {key!r}: unknown key path")
            target = target[part]
        if parts[-1] not in target:
            raise ConfigError(f"override {key!r}: unknown key")
        try:
            target[parts[-1]] = json.loads(raw)
        except json.JSONDecodeError:
            target[parts[-1]] = raw
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wl1interp",
        description="Interpolation via weighted l1 minimization: experiment "
                    "runner and certification tools.",
    )
    parser.add_argument("verb", choices=sorted(_VERBS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUTPUT_ROOT_ENV} or ./wl1interp_out)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS thread count (best effort)")
    parser.add_argument("--strict", action="store_true",
                        help="runtime/solver failures exit with code 3")
    parser.add_argument("overrides", nargs="*",
                        help="dotted-key=value config overrides")
    args = parser.parse_intermixed_args(argv)

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    out_dir = Path(
        args.out
        or os.environ.get(OUTPUT_ROOT_ENV)
        or Path.cwd() / "wl1interp_out"
    )

    try:
        config = parse_config(args.config, args.verb)
        if args.overrides:
            config = _apply_cli_overrides(config, args.overrides)
            config = parse_config(config, args.verb)
        if args.seed is not None:
            config["seed"] = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    flags = {"strict": args.strict}
    if args.threads is not None:
        flags["threads"] = args.threads
    try:
        ok = _VERBS[args.verb](config, out_dir, flags)
    except Exception as exc:  # runtime failure
        flags["runtime_error"] = str(exc)
        emit_manifest(out_dir, args.verb, config, flags)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3 if args.strict else 0
    if not ok:
        flags["runtime_failures"] = True
    emit_manifest(out_dir, args.verb, config, flags)
    if not ok and args.strict:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
