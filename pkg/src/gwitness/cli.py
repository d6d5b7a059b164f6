"""Command-line entry point.

Reports are JSON with a ``deterministic`` section (byte-stable for a fixed
scenario and seed) and a ``footer`` holding wall-clock time and worker count.
Exit codes: 0 verdict computed, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .campaign import default_workers, run_campaign
from .errors import NumericalError, ValidationError
from .mediators import FAMILIES
from .nonclassicality import classify_system, superinformation_check
from .protocol import evaluate
from .scenario import (
    DEMOS,
    VERSION,
    payload_kind,
    protocol_from_dict,
    protocol_to_dict,
    validate_scenario,
    variables_from_json,
)
from .witness import ENTANGLEMENT_TOL

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def tool_version() -> str:
    try:
        return f"gwitness {version('gwitness')}"
    except PackageNotFoundError:
        return "gwitness (unknown)"


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, no NaN."""
    return json.dumps(obj, sort_keys=True, allow_nan=False, indent=2) + "\n"


def _classification_result(variables) -> dict:
    verdict = classify_system(variables)
    pairs = []
    for i in range(len(variables)):
        for j in range(i + 1, len(variables)):
            a, b = variables[i], variables[j]
            if a.dim != b.dim or len(a.attributes) != len(b.attributes):
                continue
            s = superinformation_check(a, b)
            pairs.append({"pair": [i, j], "superinformation": s.ok, "disjoint": s.disjoint,
                          "union_information": s.union_information, "max_cross_overlap": s.max_cross_overlap})
    return {"kind": verdict.kind, "witness": list(verdict.witness) if verdict.witness else None, "pairs": pairs}


def execute(scenario: dict, workers: int | None = None) -> tuple[dict, dict]:
    """Validate and run a scenario; returns (report, extra) where ``extra``
    holds in-memory objects for the human summary."""
    validate_scenario(scenario)
    kind = payload_kind(scenario)
    seed = None
    extra: dict = {"kind": kind}
    if kind in ("protocol", "demo"):
        spec = DEMOS[scenario["demo"]]() if kind == "demo" else protocol_from_dict(scenario["protocol"])
        _, report = evaluate(spec)
        result = report.to_dict()
        result["protocol"] = protocol_to_dict(spec)
        extra["report"] = report
    elif kind == "campaign":
        c = scenario["campaign"]
        seed = c["seed"]
        tol = c.get("thresholds", {}).get("negativity", ENTANGLEMENT_TOL)
        result = run_campaign(c["family"], c["samples"], seed, c.get("n_steps", 12), tol, workers)
    else:
        result = _classification_result(variables_from_json(scenario["variables"]))
    out = {
        "version": VERSION,
        "deterministic": {"tool": tool_version(), "scenario": scenario, "seed": seed, "kind": kind, "result": result},
        "footer": {},
    }
    return out, extra


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def summary(report: dict) -> str:
    det = report["deterministic"]
    res = det["result"]
    lines = []
    if det["kind"] in ("protocol", "demo"):
        neg = res["negativity_AB"]
        lines.append(f"{'protocol':<22}{res['name'] or '(unnamed)'}")
        lines.append(f"{'verdict':<22}{res['final_verdict']}")
        lines.append(f"{'negativity A:B':<22}plus {neg['plus']:.9f}  minus {neg['minus']:.9f}")
        lines.append(f"{'trace distance A,B':<22}{res['e_distinguishability']['trace_distance']:.9f}")
        lines.append(f"{'audit':<22}{'ok':>4}")
        rows = [
            ("factorization", res["factorization"]["ok"]),
            ("locality", res["locality"]["ok"]),
            ("classical-compatible", res["classical_compatibility"]["ok"]),
            ("task_te", res["task_te"]),
            ("microcausality", all(m["ok"] for m in res["microcausality"])),
            ("picture consistency", res["picture_consistency"]["ok"]),
        ]
        lines += [f"  {name:<20}{_yn(ok):>4}" for name, ok in rows]
    elif det["kind"] == "campaign":
        lines.append(f"{'family':<22}{res['family']}")
        lines.append(f"{'samples':<22}{res['samples']}")
        lines.append(f"{'seed':<22}{res['seed']}")
        lines.append(f"{'max negativity':<22}{res['max_negativity']:.3e} (sample {res['max_negativity_index']})")
        lines.append(f"{'violations':<22}{len(res['violations'])}")
        for verdict, n in res["verdict_counts"].items():
            lines.append(f"  {verdict:<28}{n:>6}")
        lines.append(f"{'pass':<22}{_yn(res['pass'])}")
    else:
        lines.append(f"{'classification':<22}{res['kind']}")
        if res["witness"]:
            lines.append(f"{'witness pair':<22}{res['witness']}")
    wall = report["footer"].get("wall_clock_s")
    if wall is not None:
        lines.append(f"{'wall clock (s)':<22}{wall:.3f}")
    return "\n".join(lines)


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gwitness", description="Mediated-entanglement witness simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (default: stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress the human-readable summary")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--workers", type=int, default=None)

    d = sub.add_parser("demo", parents=[common], help="run a built-in demo protocol")
    d.add_argument("name", choices=sorted(DEMOS))

    s = sub.add_parser("sweep", parents=[common], help="sample a protocol family")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--steps", type=int, default=12)
    s.add_argument("--tol", type=float, default=ENTANGLEMENT_TOL)
    s.add_argument("--workers", type=int, default=None)

    c = sub.add_parser("classify", parents=[common], help="classify a system from its declared variables")
    c.add_argument("variables")
    return p


def _scenario_from_args(args) -> dict:
    if args.command == "run":
        return _load(args.scenario)
    if args.command == "demo":
        return {"version": VERSION, "demo": args.name}
    if args.command == "sweep":
        return {"version": VERSION, "campaign": {
            "family": args.family, "samples": args.samples, "seed": args.seed,
            "n_steps": args.steps, "thresholds": {"negativity": args.tol}}}
    data = _load(args.variables)
    if isinstance(data, list):
        data = {"version": VERSION, "variables": data}
    if not isinstance(data, dict) or "variables" not in data:
        raise ValidationError("expected a list of variables or a scenario with a variables payload", pointer="/")
    return data


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = getattr(args, "workers", None)
    start = time.perf_counter()
    try:
        report, _ = execute(_scenario_from_args(args), workers)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report["footer"] = {"wall_clock_s": time.perf_counter() - start,
                        "workers": workers if workers is not None else default_workers()}
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(summary(report), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
