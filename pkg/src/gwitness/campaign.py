"""Seeded sampling campaigns over a protocol family.

Sample ``i`` of a campaign is generated from the stream keyed by
``(seed, i)``, so any partition of the indices over workers produces the
same per-sample results; aggregation sorts by index before emitting.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ValidationError
from .mediators import FAMILIES, SAMPLERS
from .protocol import FIRES, INITS, evaluate
from .witness import ENTANGLEMENT_TOL


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def run_sample(family: str, seed: int, n_steps: int, index: int) -> dict:
    spec = SAMPLERS[family](seed, n_steps, index)
    _, report = evaluate(spec, microcausality=False)
    return {
        "index": index,
        "negativity": {w: report.negativity_AB[w] for w in INITS},
        "verdict": report.final_verdict,
        "nonclassical_usage": report.analysis.non_classical_usage,
    }


def _run_chunk(args) -> list[dict]:
    family, seed, n_steps, indices = args
    return [run_sample(family, seed, n_steps, i) for i in indices]


def run_campaign(family: str, samples: int, seed: int, n_steps: int = 12,
                 tol: float = ENTANGLEMENT_TOL, workers: int | None = None) -> dict:
    """Evaluate ``samples`` protocols of ``family`` and aggregate.

    A sample violates when its A:B negativity exceeds ``tol`` for either
    initialization; the campaign passes iff there are no violations.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; expected one of {list(FAMILIES)}")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    if not tol > 0:
        raise ValidationError("negativity threshold must be positive")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValidationError("workers must be >= 1")

    if workers == 1 or samples == 1:
        rows = _run_chunk((family, seed, n_steps, range(samples)))
    else:
        n_chunks = min(samples, 4 * workers)
        chunks = [(family, seed, n_steps, range(k, samples, n_chunks)) for k in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_run_chunk, chunks) for r in part]
    rows.sort(key=lambda r: r["index"])

    max_neg, argmax = 0.0, 0
    counts: dict[str, int] = {}
    violations, unwired = [], []
    for r in rows:
        worst = max(r["negativity"].values())
        if worst > max_neg:
            max_neg, argmax = worst, r["index"]
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
        if worst > tol:
            violations.append({"index": r["index"], "negativity": r["negativity"], "verdict": r["verdict"]})
        if r["verdict"] == FIRES and not r["nonclassical_usage"]:
            unwired.append(r["index"])
    return {
        "family": family,
        "samples": samples,
        "seed": seed,
        "n_steps": n_steps,
        "threshold": tol,
        "max_negativity": max_neg,
        "max_negativity_index": argmax,
        "violations": violations,
        "verdict_counts": dict(sorted(counts.items())),
        "fires_without_nonclassical_usage": unwired,
        "pass": not violations,
    }
