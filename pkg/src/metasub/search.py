"""Local-search maximization over matroid bases with a matching fallback.

The pipeline: seed with the best independent pair, extend greedily to a base,
run swap local search with a multiplicative acceptance threshold, then build a
second candidate from a maximum-weight matching on the second-difference
weights between the base and its complement. The better of the two candidates
wins.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field

from .errors import GuardError, ValidationError
from .matching import Matching, max_weight_matching_k
from .matroid import MatroidOracle
from .setfn import ABS_TOL, SetFunctionOracle, elements_of, iter_elements

DEFAULT_EPSILON = 0.1
DEFAULT_MAX_ITERATIONS = 1_000_000
BRUTE_FORCE_GUARD = 20


@dataclass(frozen=True)
class SolveConfig:
    epsilon: float = DEFAULT_EPSILON
    pivot: str = "first"  # "first" or "best"
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    seed: int = 0  # reserved for randomized pivots; the default rules are deterministic

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if self.pivot not in ("first", "best"):
            raise ValidationError(f"unknown pivot rule {self.pivot!r}")
        if self.max_iterations < 1:
            raise ValidationError("iteration guard must be at least 1")


@dataclass
class SolveResult:
    initial: int
    S: int
    S_value: float
    S_prime: int
    S_prime_value: float
    chosen: int
    chosen_value: float
    iterations: int
    evaluations: int
    trace: list[dict] = field(default_factory=list)
    matching: Matching | None = None
    matching_k: int = 0

    def to_dict(self) -> dict:
        return {
            "initial": elements_of(self.initial),
            "local_search": {"S": elements_of(self.S), "value": self.S_value},
            "matching_candidate": {
                "S": elements_of(self.S_prime),
                "value": self.S_prime_value,
                "k": self.matching_k,
                "matching": self.matching.to_dict() if self.matching else None,
            },
            "chosen": {"S": elements_of(self.chosen), "value": self.chosen_value},
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "trace": self.trace,
        }


def best_pair_init(fn: SetFunctionOracle, M: MatroidOracle) -> int:
    """Best independent pair, scanned in lexicographic order; falls back to
    the best singleton (or the empty set) when the rank is short."""
    if fn.n != M.n:
        raise ValidationError("oracle and matroid ground sets differ")
    best_mask = 0
    best_value = None
    for i in range(fn.n):
        for j in range(i + 1, fn.n):
            mask = (1 << i) | (1 << j)
            if not M.is_independent(mask):
                continue
            v = fn.value(mask)
            if best_value is None or v > best_value:
                best_mask, best_value = mask, v
    if best_value is not None:
        return best_mask
    for i in range(fn.n):
        mask = 1 << i
        if not M.is_independent(mask):
            continue
        v = fn.value(mask)
        if best_value is None or v > best_value:
            best_mask, best_value = mask, v
    return best_mask


def _accepts(current: float, candidate: float, threshold: float) -> bool:
    if current > ABS_TOL:
        return candidate >= threshold * current
    return candidate > current + ABS_TOL


def local_search(
    fn: SetFunctionOracle,
    M: MatroidOracle,
    start: int,
    config: SolveConfig = SolveConfig(),
) -> tuple[int, int, int, list[dict]]:
    """Swap search from a base; returns (S, iterations, evaluations, trace).

    A swap S - i + j is accepted when it clears the multiplicative threshold
    1 + epsilon/n^2 (absolute improvement when the current value is zero).
    """
    n = fn.n
    threshold = 1.0 + config.epsilon / (n * n)
    S = start
    full = (1 << n) - 1
    iterations = 0
    evaluations = 0
    trace: list[dict] = []
    current = fn.value(S)
    improved = True
    while improved:
        improved = False
        best_swap = None
        best_value = current
        for i in iter_elements(S):
            for j in iter_elements(full & ~S):
                cand = (S & ~(1 << i)) | (1 << j)
                if not M.is_independent(cand):
                    continue
                v = fn.value(cand)
                evaluations += 1
                if not _accepts(current, v, threshold):
                    continue
                if config.pivot == "first":
                    best_swap, best_value = (i, j), v
                    break
                if best_swap is None or v > best_value:
                    best_swap, best_value = (i, j), v
            if config.pivot == "first" and best_swap is not None:
                break
        if best_swap is not None:
            i, j = best_swap
            S = (S & ~(1 << i)) | (1 << j)
            current = best_value
            iterations += 1
            trace.append({"iteration": iterations, "removed": i, "inserted": j, "value": current})
            if iterations >= config.max_iterations:
                raise GuardError(
                    f"local search exceeded {config.max_iterations} accepted swaps; "
                    f"last value {current!r}"
                )
            improved = True
    return S, iterations, evaluations, trace


def matching_cardinality(M: MatroidOracle, S: int) -> int:
    """Pair budget for the matching candidate: below half the minimum circuit
    size, so the matched node set can never contain a circuit."""
    inside = S.bit_count()
    outside = M.n - inside
    if M.min_circuit_size is None:
        k = (M.n - 1) // 2
    else:
        k = (M.min_circuit_size - 1) // 2
    return max(0, min(k, inside, outside))


def matching_step(
    fn: SetFunctionOracle, M: MatroidOracle, S: int
) -> tuple[int, Matching | None, int]:
    """Candidate built from the top-k matching of second differences at S."""
    k = matching_cardinality(M, S)
    if k <= 0:
        return 0, None, 0
    left = elements_of(S)
    right = elements_of(((1 << M.n) - 1) & ~S)
    weights = [[fn.second_difference(i, j, S) for j in right] for i in left]
    matching = max_weight_matching_k(weights, k)
    mask = 0
    for a, b in matching.pairs:
        mask |= (1 << left[a]) | (1 << right[b])
    return mask, matching, k


def solve(
    fn: SetFunctionOracle, M: MatroidOracle, config: SolveConfig = SolveConfig()
) -> SolveResult:
    """Full pipeline; the locally-optimal base wins ties against the
    matching candidate."""
    seed = best_pair_init(fn, M)
    base = M.extend_to_base(seed)
    S, iterations, evaluations, trace = local_search(fn, M, base, config)
    s_value = fn.value(S)
    S_prime, matching, k = matching_step(fn, M, S)
    sp_value = fn.value(S_prime)
    if sp_value > s_value:
        chosen, chosen_value = S_prime, sp_value
    else:
        chosen, chosen_value = S, s_value
    return SolveResult(
        initial=seed,
        S=S,
        S_value=s_value,
        S_prime=S_prime,
        S_prime_value=sp_value,
        chosen=chosen,
        chosen_value=chosen_value,
        iterations=iterations,
        evaluations=evaluations,
        trace=trace,
        matching=matching,
        matching_k=k,
    )


def brute_force_opt(fn: SetFunctionOracle, M: MatroidOracle) -> tuple[int, float]:
    """Exhaustive maximum over independent sets; first maximum by mask order."""
    if fn.n > BRUTE_FORCE_GUARD:
        raise GuardError(f"brute force needs n <= {BRUTE_FORCE_GUARD}, got {fn.n}")
    best_mask, best_value = 0, fn.value(0)
    for mask in range(1, 1 << fn.n):
        if not M.is_independent(mask):
            continue
        v = fn.value(mask)
        if v > best_value:
            best_mask, best_value = mask, v
    return best_mask, best_value


def guarantee_general(gamma: float, r: int, epsilon: float, n: int) -> float:
    """Worst-case f(OPT)/f(chosen) for monotone instances with the given
    meta-submodularity parameter, from the explicit proof constants."""
    if r < 2:
        return 1.0
    head = (2.0 * gamma + r - 1.0) / (r - 1.0)
    blow = 2.0 ** (4.0 * gamma)
    return head * blow * (5.0 * gamma + 2.0) + 1.0 + blow * r * epsilon / (n * n)


def guarantee_supermodular(
    gamma: float, r: int, epsilon: float, n: int, c: int | None,
    second_order: bool,
) -> float:
    """Worst-case ratio for supermodular instances: the second-order chain
    (when it applies) against the matching-candidate chain, whichever is
    smaller."""
    bounds = []
    if second_order and r >= 2:
        bounds.append(
            1.0
            + (1.0 + gamma)
            * (4.0 * gamma / (r - 1.0) + 2.0 + r * epsilon * (gamma + r - 1.0) / ((r - 1.0) * n * n))
        )
    if c is not None and c > 2:
        bounds.append(1.0 + (1.0 + gamma) * (r * epsilon / (n * n) + 2.0 + 3.0 * r / (c - 1.0)))
    return min(bounds) if bounds else math.inf


def iteration_bound(n: int, r: int, gamma: float, epsilon: float) -> int:
    """Accepted-swap cap for monotone instances: every swap multiplies the
    value by at least 1 + epsilon/n^2 and the optimum is within an explicit
    factor of the starting pair."""
    from .diag import pair_seed_constant

    arg = max(r, 1) * (1.0 + gamma) ** max(r - 2, 0) * pair_seed_constant(r, gamma)
    return math.ceil(n * n * math.log(max(arg, 1.0)) / epsilon)
