"""Runtime-scaling benchmark: polynomial fast paths against brute force.

Every suite draws its instances from ``random.Random(f"{seed}:{suite}:{n}")``
so the instance stream is fixed by the seed alone.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .core import ConstantOne, check_cap
from .generators import layered_fbdd, random_bits, random_fbdd, random_perceptron, random_subset
from .queries import cc_query, mcr_minimum

SUITES = ("perceptron-mcr", "brute-mcr", "fbdd-cc", "fbdd-mcr", "agree")

DEFAULT_SIZES = {
    "perceptron-mcr": [8, 16, 24, 32, 48, 64],
    "brute-mcr": [12, 16, 20],
    "fbdd-cc": [500, 1000, 2000, 4000, 7000, 10000],
    "fbdd-mcr": [500, 1000, 2000, 4000, 7000, 10000],
    "agree": [6, 8, 10, 12],
}

COLUMNS = ["model_class", "query", "mode", "n", "size", "median_time", "answer"]


@dataclass
class BenchConfig:
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    sizes: dict[str, list[int]] = field(default_factory=dict)
    seed: int = 0
    reps: int = 5
    cap: int | None = None
    threads: int = 1


def _rng(seed, suite, n):
    return random.Random(f"{seed}:{suite}:{n}")


def _answer(res) -> str:
    if res.kind == "minimum":
        return "none" if res.answer is None else f"{res.answer}:{res.witness}"
    return str(res.answer)


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return time.perf_counter() - start, out


def _row(cls, query, mode, n, size, times, answers):
    return {
        "model_class": cls,
        "query": query,
        "mode": mode,
        "n": n,
        "size": size,
        "median_time": statistics.median(times),
        "answer": "|".join(answers),
    }


def _perceptron_mcr(cfg, n, mode, reps):
    rng = _rng(cfg.seed, "perceptron-mcr", n)
    times, answers = [], []
    for _ in range(reps):
        f = random_perceptron(rng, n)
        x = random_bits(rng, n)
        t, res = _timed(lambda: mcr_minimum(f, ConstantOne(n), x, mode=mode, cap=cfg.cap,
                                            threads=cfg.threads))
        times.append(t)
        answers.append(_answer(res))
    return _row("perceptron", "mcr", mode, n, n + 1, times, answers)


def _layered_for(size, rng):
    # edges = 2 * reachable nodes; aim for about `size` edges over 50 layers
    layers = 50
    width = max(2, round(size / (2 * layers * 0.66)))
    return layered_fbdd(rng, layers, width)


def _fbdd_fast(cfg, size, query, reps):
    rng = _rng(cfg.seed, f"fbdd-{query}", size)
    f = _layered_for(size, rng)
    times, answers = [], []
    for _ in range(reps):
        x = random_bits(rng, f.n)
        if query == "cc":
            s = random_subset(rng, f.n)
            t, res = _timed(lambda: cc_query(f, ConstantOne(f.n), x, s, mode="fast"))
            answers.append(str(res.answer > 0))
        else:
            t, res = _timed(lambda: mcr_minimum(f, ConstantOne(f.n), x, mode="fast"))
            answers.append(_answer(res))
        times.append(t)
    return _row("fbdd", query, "fast", f.n, f.size, times, answers)


def _agree(cfg, n, reps):
    rng = _rng(cfg.seed, "agree", n)
    rows = []
    cases = []
    for _ in range(reps):
        f = random_fbdd(rng, n, rng.randint(n, 4 * n))
        cases.append((f, random_bits(rng, n), random_subset(rng, n)))
    for mode in ("fast", "brute"):
        times, answers = [], []
        for f, x, s in cases:
            t, res = _timed(lambda: cc_query(f, ConstantOne(n), x, s, mode=mode, cap=cfg.cap))
            times.append(t)
            answers.append(str(res.answer))
        rows.append(_row("fbdd", "cc", mode, n, max(f.size for f, _, _ in cases), times, answers))
    return rows


def run_bench(cfg: BenchConfig) -> list[dict]:
    """Rows in suite order. Brute-force sizes are cap-checked before any work."""
    unknown = [s for s in cfg.suites if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}")
    sizes = {s: cfg.sizes.get(s, DEFAULT_SIZES[s]) for s in cfg.suites}
    if "brute-mcr" in sizes:
        for n in sizes["brute-mcr"]:
            check_cap(1 << n, cfg.cap)
    rows = []
    for suite in cfg.suites:
        for n in sizes[suite]:
            if suite == "perceptron-mcr":
                rows.append(_perceptron_mcr(cfg, n, "fast", cfg.reps))
            elif suite == "brute-mcr":
                # large cubes are slow; a single repetition past 2^20 points
                rows.append(_perceptron_mcr(cfg, n, "brute", cfg.reps if n <= 20 else 1))
            elif suite == "fbdd-cc":
                rows.append(_fbdd_fast(cfg, n, "cc", cfg.reps))
            elif suite == "fbdd-mcr":
                rows.append(_fbdd_fast(cfg, n, "mcr", cfg.reps))
            else:
                rows.extend(_agree(cfg, n, cfg.reps))
    return rows


def fit_exponent(rows: list[dict], model_class="fbdd", query="cc", mode="fast") -> float:
    """Least-squares slope of log(median time) against log(size)."""
    pts = [(r["size"], r["median_time"]) for r in rows
           if (r["model_class"], r["query"], r["mode"]) == (model_class, query, mode)]
    if len(pts) < 2:
        raise ValueError("need at least two sizes to fit an exponent")
    xs = np.log([p[0] for p in pts])
    ys = np.log([max(p[1], 1e-9) for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({**r, "median_time": f"{r['median_time']:.6g}"})
    return buf.getvalue()
