"""Command-line harness: coefficient tables, determinants, experiment runs.

Exit codes: 0 success, 1 a sharp experiment missed its target,
2 usage or spec error, 3 a bound violation (regression signal).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .classes import FunctionSpec, sample_robertson_params
from .determinants import toeplitz_det
from .errors import SpecError, ToeplitzError
from .experiments import EXPERIMENT_IDS, REGISTRY, extremal_experiment
from .lemmas import SWEEP_ORACLES, sweep
from .series import DETERMINANT_ORDER
from .typically_real import region_hull, robertson_coeffs_array

SCHEMA_VERSION = 1
EXIT_OK, EXIT_MISSED, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3
DEFAULT_OUT = "reports/run.json"


class UsageError(Exception):
    pass


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _g(x: float) -> str:
    return f"{x:.17g}"


def _to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def load_spec(arg: str) -> FunctionSpec:
    text = Path(arg[1:]).read_text(encoding="utf-8") if arg.startswith("@") else arg
    return FunctionSpec.from_json(text)


# ------------------------------------------------------------- manifests


@dataclass
class RunManifest:
    experiments: list = field(default_factory=lambda: list(EXPERIMENT_IDS))
    seed: int = 0
    resolution: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    output: str = DEFAULT_OUT

    def __post_init__(self):
        unknown = [e for e in self.experiments if e not in REGISTRY]
        if unknown:
            raise UsageError(f"unknown experiment ids: {unknown}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        if not isinstance(d, dict):
            raise UsageError("manifest must be a JSON object")
        allowed = {"experiments", "seed", "resolution", "samples", "output"}
        extra = set(d) - allowed
        if extra:
            raise UsageError(f"unknown manifest keys: {sorted(extra)}")
        return cls(**d)

    def resolution_for(self, eid: str) -> Optional[int]:
        return self.resolution.get(eid, self.resolution.get("*"))

    def samples_for(self, eid: str) -> Optional[int]:
        return self.samples.get(eid, self.samples.get("*"))


def run_manifest(manifest: RunManifest) -> dict:
    reports = [
        extremal_experiment(
            eid,
            seed=manifest.seed,
            resolution=manifest.resolution_for(eid),
            samples=manifest.samples_for(eid),
        )
        for eid in manifest.experiments
    ]
    violations = sum(r.violations for r in reports)
    missed = [r.experiment_id for r in reports if r.kind == "sharp" and not r.passed()]
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": manifest.seed,
        "experiments": [r.to_dict() for r in reports],
        "summary": {
            "count": len(reports),
            "violations": violations,
            "missed_targets": missed,
            "passed": violations == 0 and not missed,
        },
    }


def summary_table(payload: dict) -> str:
    lines = [f"{'id':<5}{'best':>14}{'target':>14}{'deviation':>12}{'viol':>6}  status"]
    for r in payload["experiments"]:
        ok = r["violations"] == 0 and (r["kind"] != "sharp" or abs(r["deviation"]) < 1e-6)
        lines.append(
            f"{r['experiment_id']:<5}{r['best_value']:>14.6f}{r['paper_target']:>14.6f}"
            f"{r['deviation']:>12.2e}{r['violations']:>6}  {'PASS' if ok else 'FAIL'}"
        )
    return "\n".join(lines) + "\n"


def summary_csv(payload: dict) -> str:
    rows = [
        [r["experiment_id"], r["kind"], r["objective"], _g(r["best_value"]), _g(r["paper_target"]),
         _g(r["deviation"]), r["violations"], r["samples_used"]]
        for r in payload["experiments"]
    ]
    header = ["experiment_id", "kind", "objective", "best_value", "paper_target", "deviation",
              "violations", "samples_used"]
    return _to_csv(header, rows)


def exit_code_for(payload: dict) -> int:
    s = payload["summary"]
    if s["violations"]:
        return EXIT_VIOLATION
    if s["missed_targets"]:
        return EXIT_MISSED
    return EXIT_OK


# -------------------------------------------------------------- commands


def cmd_coeffs(args) -> int:
    spec = load_spec(args.spec)
    f = spec.build(args.order)
    rows = [(n, float(c.real), float(c.imag)) for n, c in enumerate(f.coeffs, start=1)]
    if args.format == "json":
        text = json.dumps({"spec": spec.to_dict(), "coeffs": [{"n": n, "re": r, "im": i} for n, r, i in rows]},
                          indent=2) + "\n"
    else:
        text = _to_csv(["n", "re", "im"], [(n, _g(r), _g(i)) for n, r, i in rows])
    _emit(text, args.out)
    return EXIT_OK


def cmd_toeplitz(args) -> int:
    spec = load_spec(args.spec)
    N = max(DETERMINANT_ORDER, args.n + args.q - 1)
    res = toeplitz_det(spec.build(N), args.n, args.q)
    d = res.to_dict()
    if args.format == "json":
        text = json.dumps(d, indent=2) + "\n"
    else:
        text = _to_csv(list(d), [[d["n"], d["q"], _g(d["value_re"]), _g(d["value_im"]), _g(d["abs_value"])]])
    _emit(text, args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    if args.manifest:
        try:
            raw = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read manifest: {exc}") from exc
        manifest = RunManifest.from_dict(raw)
    else:
        manifest = RunManifest()
    if args.experiments:
        manifest = RunManifest(**{**manifest.__dict__, "experiments": args.experiments})
    if args.seed is not None:
        manifest.seed = args.seed
    if args.resolution is not None:
        manifest.resolution = {"*": args.resolution}
    if args.samples is not None:
        manifest.samples = {"*": args.samples}
    if args.out:
        manifest.output = args.out
    payload = run_manifest(manifest)
    write_atomic(manifest.output, json.dumps(payload, indent=2) + "\n")
    if args.format == "csv":
        write_atomic(Path(manifest.output).with_suffix(".csv"), summary_csv(payload))
    sys.stdout.write(summary_table(payload))
    return exit_code_for(payload)


def cmd_region(args) -> int:
    hull = region_hull(args.n, args.m, args.samples)
    rng = np.random.default_rng(args.seed)
    w, t = sample_robertson_params(rng, args.check)
    a = robertson_coeffs_array(w, t, max(args.n, args.m))
    pts = np.stack([a[:, args.n - 1], a[:, args.m - 1]], axis=-1)
    escapes = int(np.sum(~hull.contains_many(pts))) if args.check else 0
    out = Path(args.out)
    write_atomic(out.with_suffix(".csv"), hull.to_csv())
    write_atomic(out.with_suffix(".json"), hull.to_json() + "\n")
    sys.stdout.write(
        f"A_{{{args.n},{args.m}}}: {len(hull.vertices)} vertices, "
        f"{escapes} escapes out of {args.check} random measures\n"
    )
    return EXIT_VIOLATION if escapes else EXIT_OK


def cmd_verify_lemmas(args) -> int:
    results = [sweep(name, args.samples, args.seed) for name in SWEEP_ORACLES]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "samples": args.samples,
        "oracles": [r.to_dict() for r in results],
    }
    if args.format == "csv":
        text = _to_csv(
            ["oracle", "samples", "min_slack", "violations"],
            [[r.oracle, r.samples, _g(r.min_slack), r.violations] for r in results],
        )
    else:
        text = json.dumps(payload, indent=2) + "\n"
    _emit(text, args.out)
    if args.out:
        for r in results:
            sys.stdout.write(f"{r.oracle:<18} min slack {r.min_slack: .6g}  violations {r.violations}\n")
    return EXIT_VIOLATION if any(r.violations for r in results) else EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="univalent-toeplitz",
        description="Toeplitz determinants of univalent-function coefficients.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_format="csv"):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=default_format)

    sp = sub.add_parser("coeffs", help="print Taylor coefficients of a function spec")
    sp.add_argument("spec", help="FunctionSpec JSON, or @path to a JSON file")
    sp.add_argument("--order", type=int, default=DETERMINANT_ORDER)
    common(sp)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("toeplitz", help="evaluate T_q(n)")
    sp.add_argument("spec")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    common(sp, "json")
    sp.set_defaults(func=cmd_toeplitz)

    sp = sub.add_parser("run", help="run extremal experiments")
    sp.add_argument("experiments", nargs="*", help="experiment ids (default: all)")
    sp.add_argument("--manifest")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--resolution", type=int)
    sp.add_argument("--samples", type=int)
    common(sp, "json")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("region", help="convex hull of the coefficient region A_{n,m}")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--samples", type=int, default=2001)
    sp.add_argument("--check", type=int, default=1000, help="random measures to re-check")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="reports/region")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("verify-lemmas", help="sample every coefficient inequality")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, "json")
    sp.set_defaults(func=cmd_verify_lemmas)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SpecError, ToeplitzError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
