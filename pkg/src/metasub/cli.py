"""Command-line surface: instance generation, diagnostics, solving, and
property verification, all emitting deterministic JSON reports.

Exit codes: 0 success, 2 invalid input, 3 size/iteration guard exceeded,
4 property failure.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import time

import numpy as np

from . import diag, metric
from .errors import GuardError, ValidationError
from .matching import max_weight_matching_k
from .matroid import (
    GraphicMatroid,
    MatroidOracle,
    PartitionMatroid,
    UniformMatroid,
    generic_min_circuit,
)
from .search import (
    SolveConfig,
    brute_force_opt,
    guarantee_general,
    guarantee_supermodular,
    iteration_bound,
    solve,
)
from .setfn import SetFunctionOracle, build_coverage, build_diversity, build_table

SCHEMA_VERSION = 1


class PropertyFailure(Exception):
    """A verified property does not hold (exit code 4)."""


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


# ---------------------------------------------------------------- instances


def build_function(n: int, desc: dict) -> SetFunctionOracle:
    kind = desc.get("kind")
    if kind in ("diversity", "diversity_plus_modular"):
        D = np.asarray(desc["distance"], dtype=float)
        if D.shape != (n, n):
            raise ValidationError(f"distance shape {D.shape} does not match n={n}")
        return build_diversity(D, desc.get("weights"))
    if kind == "coverage":
        incidence = desc["incidence"]
        if len(incidence) != n:
            raise ValidationError(f"incidence length {len(incidence)} does not match n={n}")
        return build_coverage(incidence, desc["universe_weights"])
    if kind == "table":
        values = desc["values"]
        if len(values) != 1 << n:
            raise ValidationError(f"table length {len(values)} does not match n={n}")
        return build_table(values)
    raise ValidationError(f"unknown function kind {kind!r}")


def build_matroid(n: int, desc: dict) -> MatroidOracle:
    kind = desc.get("kind")
    if kind == "uniform":
        return UniformMatroid(n, int(desc["r"]))
    if kind == "partition":
        M = PartitionMatroid(desc["blocks"], desc["caps"])
        if M.n != n:
            raise ValidationError(f"partition blocks cover {M.n} elements, not n={n}")
        return M
    if kind == "graphic":
        edges = [tuple(e) for e in desc["edges"]]
        if len(edges) != n:
            raise ValidationError(f"graphic matroid needs n={n} edges, got {len(edges)}")
        return GraphicMatroid(int(desc["vertices"]), edges)
    raise ValidationError(f"unknown matroid kind {kind!r}")


def parse_instance(doc: dict) -> tuple[SetFunctionOracle, MatroidOracle]:
    try:
        n = int(doc["n"])
        fn = build_function(n, doc["function"])
        M = build_matroid(n, doc["matroid"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance document: {exc!r}") from exc
    return fn, M


def load_instance(path: str | None) -> dict:
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance is not valid JSON: {exc}") from exc


# --------------------------------------------------------------- generators


def _euclidean(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def generate(kind: str, n: int, seed: int, args) -> dict:
    if n < 2:
        raise ValidationError("generated instances need n >= 2")
    rng = np.random.default_rng(seed)
    meta: dict = {"generator": kind, "seed": seed}
    matroid = {"kind": "uniform", "r": args.r if args.r is not None else max(2, n // 3)}
    if kind == "metric-random":
        D = _euclidean(rng.standard_normal((n, args.dim)))
        meta["sigma"] = 1.0
        function = {"kind": "diversity", "distance": D.tolist()}
    elif kind == "semimetric-power":
        if args.power < 1:
            raise ValidationError("power must be >= 1")
        D = _euclidean(rng.standard_normal((n, args.dim))) ** args.power
        meta["sigma"] = 2.0 ** (args.power - 1)
        meta["power"] = args.power
        function = {"kind": "diversity", "distance": D.tolist()}
    elif kind == "negtype-sqeuclid":
        D = _euclidean(rng.standard_normal((n, args.dim))) ** 2
        meta["sigma"] = 2.0
        meta["negative_type"] = True
        function = {"kind": "diversity", "distance": D.tolist()}
    elif kind == "js-random":
        probs = rng.dirichlet(np.ones(args.support), size=n)
        D = metric.js_divergence_matrix(probs)
        meta["sigma"] = 2.0
        function = {"kind": "diversity", "distance": D.tolist()}
    elif kind == "coverage-random":
        m = args.universe if args.universe is not None else 2 * n
        incidence = [
            sorted(int(u) for u in np.flatnonzero(rng.random(m) < 0.4)) for _ in range(n)
        ]
        function = {
            "kind": "coverage",
            "incidence": incidence,
            "universe_weights": rng.random(m).tolist(),
        }
    else:
        raise ValidationError(f"unknown generator {kind!r}")
    return {"n": n, "function": function, "matroid": matroid, "metadata": meta}


# ------------------------------------------------------------------ reports


def make_report(command: str, inputs, results: dict, work: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs_digest": digest(inputs),
        "results": results,
        "timings": work,  # deterministic work counters, not wall clock
    }


def emit(doc: dict, args) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def trace_csv(result_dict: dict) -> str:
    lines = ["iteration,removed,inserted,value"]
    for step in result_dict["trace"]:
        lines.append(f'{step["iteration"]},{step["removed"]},{step["inserted"]},{step["value"]!r}')
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    instance = generate(args.kind, args.n, args.seed, args)
    emit(instance, args)
    return 0


def cmd_analyze(args) -> int:
    instance = load_instance(args.instance)
    fn, M = parse_instance(instance)
    results: dict = {"matroid": {"rank": M.rank, "min_circuit_size": M.min_circuit_size}}
    meta = instance.get("metadata", {})
    if isinstance(fn.distance if hasattr(fn, "distance") else None, np.ndarray):
        D = fn.distance
        sigma = metric.semi_metric_parameter(D)
        neg, top = metric.is_negative_type(D, tol=args.tolerance)
        sqrt_ok, sqrt_witness = metric.is_sqrt_metric(D, tol=args.tolerance)
        results["metric"] = {
            "semi_metric": sigma.to_dict(),
            "negative_type": {"holds": neg, "top_eigenvalue": top},
            "sqrt_metric": {"holds": sqrt_ok, "witness": sqrt_witness},
        }
        if "sigma" in meta and not sigma.is_infinite:
            results["metric"]["declared_sigma_delta"] = sigma.sigma - meta["sigma"]
    if fn.n <= args.n_max:
        g = diag.gamma_parameter(fn, n_max=args.n_max)
        results["gamma"] = g.to_dict()
        if "gamma" in meta and not g.is_infinite:
            results["gamma"]["declared_delta"] = g.gamma - meta["gamma"]
        results["classification"] = diag.classify(fn, n_max=args.n_max).to_dict()
        results["lemmas"] = {
            name: chk.to_dict()
            for name, chk in diag.verify_lemmas(fn, n_max=args.n_max, matroid=M).items()
        }
    else:
        results["skipped"] = f"exhaustive diagnostics need n <= {args.n_max}, instance has n={fn.n}"
    work = {"n": fn.n, "table_size": 1 << fn.n if fn.n <= args.n_max else 0}
    emit(make_report("analyze", instance, results, work), args)
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    fn, M = parse_instance(instance)
    config = SolveConfig(epsilon=args.epsilon, pivot=args.pivot, seed=args.seed)
    result = solve(fn, M, config)
    payload = result.to_dict()
    if args.with_opt:
        opt_mask, opt_value = brute_force_opt(fn, M)
        ratio = opt_value / result.chosen_value if result.chosen_value > 0 else None
        payload["opt"] = {
            "S": sorted(diag.elements_of(opt_mask)),
            "value": opt_value,
            "ratio": ratio,
        }
    work = {"iterations": result.iterations, "evaluations": result.evaluations}
    if args.format == "csv":
        text = trace_csv(payload)
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
        return 0
    inputs = {
        "instance": instance,
        "epsilon": args.epsilon,
        "pivot": args.pivot,
        "seed": args.seed,
        "with_opt": args.with_opt,
    }
    emit(make_report("solve", inputs, payload, work), args)
    return 0


# ------------------------------------------------------------ verify suites


def _random_diversity(rng, n: int, kind: str = "metric"):
    points = rng.standard_normal((n, 3))
    D = _euclidean(points)
    if kind == "squared":
        D = D**2
    return build_diversity(D)


def _exhaustive_matching(w: np.ndarray, k: int) -> float:
    best = -np.inf
    rows, cols = w.shape
    for rsub in itertools.combinations(range(rows), k):
        for csub in itertools.permutations(range(cols), k):
            best = max(best, sum(w[i, j] for i, j in zip(rsub, csub)))
    return float(best) if k else 0.0


def verify_lemma_suite(rng, samples: int, n: int) -> list[dict]:
    failures = []
    for t in range(samples):
        fn = _random_diversity(rng, n, "squared" if t % 2 else "metric")
        M = UniformMatroid(n, max(2, n // 2))
        for name, chk in diag.verify_lemmas(fn, matroid=M, seed=t).items():
            if chk.passed is False:
                failures.append({"trial": t, "lemma": name, "detail": chk.to_dict()})
    return failures


def verify_smoothness_suite(rng, samples: int, n: int) -> list[dict]:
    failures = []
    for t in range(samples):
        fn = _random_diversity(rng, n, "squared" if t % 2 else "metric")
        g = diag.gamma_parameter(fn)
        sigma = max(3.0 * g.gamma, 2.0 * g.gamma + 1.0)
        for _ in range(5):
            x = rng.random(n) * 0.9 + 0.05
            u = rng.random(n)
            chk = diag.check_one_sided_smooth(fn, x, u, sigma)
            if chk.residual > 1e-9 * max(1.0, abs(chk.rhs)):
                failures.append({"trial": t, "check": chk.to_dict()})
            i, j = rng.integers(0, n, size=2)
            if i != j:
                gap = diag.check_expectation_inequality(fn, x, int(i), int(j), sigma)
                if gap > 1e-9:
                    failures.append({"trial": t, "expectation_gap": gap})
    return failures


def verify_matching_suite(rng, samples: int) -> list[dict]:
    failures = []
    for t in range(samples):
        rows = int(rng.integers(1, 7))
        cols = int(rng.integers(1, 7))
        w = rng.standard_normal((rows, cols))
        for k in range(min(rows, cols) + 1):
            got = max_weight_matching_k(w, k)
            want = _exhaustive_matching(w, k)
            if abs(got.total_weight - want) > 1e-9:
                failures.append({"trial": t, "k": k, "got": got.total_weight, "want": want})
    return failures


def _random_matroid(rng, n: int) -> MatroidOracle:
    roll = rng.integers(0, 3)
    if roll == 0:
        return UniformMatroid(n, int(rng.integers(1, n + 1)))
    if roll == 1:
        cut = int(rng.integers(1, n))
        return PartitionMatroid(
            [list(range(cut)), list(range(cut, n))],
            [int(rng.integers(1, cut + 1)), int(rng.integers(1, n - cut + 1))],
        )
    v = max(2, n // 2 + 1)
    edges = [(int(rng.integers(0, v)), int(rng.integers(0, v))) for _ in range(n)]
    return GraphicMatroid(v, edges)


def verify_matroid_suite(rng, samples: int, n: int) -> list[dict]:
    failures = []
    for t in range(samples):
        M = _random_matroid(rng, n)
        if M.min_circuit_size != generic_min_circuit(M):
            failures.append({"trial": t, "kind": M.kind, "bad": "min_circuit_size"})
        base1 = M.extend_to_base(0)
        perm = rng.permutation(M.n)
        acc = 0
        for v in perm:
            if M.is_independent(acc | (1 << int(v))):
                acc |= 1 << int(v)
        pairs = M.exchange_bijection(base1, acc).pairs
        for i, j in pairs:
            if not M.is_independent((base1 & ~(1 << i)) | (1 << j)):
                failures.append({"trial": t, "kind": M.kind, "bad": "exchange", "pair": [i, j]})
    return failures


def verify_ratio_suite(rng, samples: int, n: int) -> list[dict]:
    failures = []
    for t in range(samples):
        fn = _random_diversity(rng, n, "squared" if t % 2 else "metric")
        r = int(rng.integers(2, max(3, n // 2 + 1)))
        M = UniformMatroid(n, r)
        g = diag.gamma_parameter(fn)
        gamma = max(g.gamma, 1.0)
        result = solve(fn, M)
        _, opt_value = brute_force_opt(fn, M)
        if result.chosen_value <= 0:
            if opt_value > 1e-9:
                failures.append({"trial": t, "bad": "zero output, positive opt"})
            continue
        ratio = opt_value / result.chosen_value
        cls = diag.classify(fn)
        bound = guarantee_general(gamma, M.rank, 0.1, n)
        if cls.supermodular:
            bound = min(
                bound,
                guarantee_supermodular(
                    gamma, M.rank, 0.1, n, M.min_circuit_size, cls.second_order_submodular
                ),
            )
        if ratio > bound * (1 + 1e-9):
            failures.append({"trial": t, "ratio": ratio, "bound": bound})
        limit = iteration_bound(n, M.rank, gamma, 0.1)
        if result.iterations > limit:
            failures.append({"trial": t, "iterations": result.iterations, "limit": limit})
    return failures


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    n = min(args.n_max, 8)
    if args.suite == "lemmas":
        failures = verify_lemma_suite(rng, args.samples, n)
    elif args.suite == "smoothness":
        failures = verify_smoothness_suite(rng, args.samples, min(n, 7))
    elif args.suite == "matching":
        failures = verify_matching_suite(rng, args.samples)
    elif args.suite == "matroid":
        failures = verify_matroid_suite(rng, args.samples, n)
    elif args.suite == "ratios":
        failures = verify_ratio_suite(rng, args.samples, n)
    else:
        raise ValidationError(f"unknown suite {args.suite!r}")
    results = {"suite": args.suite, "samples": args.samples, "failures": failures,
               "passed": not failures}
    inputs = {"suite": args.suite, "samples": args.samples, "seed": args.seed, "n_max": args.n_max}
    emit(make_report("verify", inputs, results, {"samples": args.samples}), args)
    if failures:
        raise PropertyFailure(f"{len(failures)} failures in suite {args.suite}")
    return 0


# -------------------------------------------------------------------- main


def _add_common(p) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--n-max", dest="n_max", type=int, default=diag.DEFAULT_N_MAX)
    p.add_argument("--out", default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metasub")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("kind", choices=[
        "metric-random", "semimetric-power", "negtype-sqeuclid", "js-random", "coverage-random",
    ])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--support", type=int, default=4)
    p.add_argument("--universe", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="structural diagnostics for an instance")
    p.add_argument("instance", nargs="?", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="run the local-search pipeline")
    p.add_argument("instance", nargs="?", default=None)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--pivot", choices=["first", "best"], default="first")
    p.add_argument("--with-opt", dest="with_opt", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run a randomized property suite")
    p.add_argument("suite", choices=["lemmas", "smoothness", "matching", "matroid", "ratios"])
    p.add_argument("--samples", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    started = time.monotonic()
    try:
        code = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return 3
    except PropertyFailure as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return 4
    print(f"elapsed {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
