"""Exact structural diagnostics for set functions.

Everything here works by full enumeration over the 2^n value table:
the meta-submodularity parameter, monotonicity/curvature classification,
the multilinear extension with its exact derivatives, one-sided-smoothness
checks, and a battery of structural-inequality verifications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError
from .setfn import ABS_TOL, REL_TOL, SetFunctionOracle, elements_of

DEFAULT_N_MAX = 14
EXTENSION_N_MAX = 20


def _guard(n: int, n_max: int) -> None:
    if n > n_max:
        raise GuardError(f"exhaustive diagnostic needs n <= {n_max}, got {n}")


class ExactTables:
    """Cached per-element difference vectors over all masks of one oracle."""

    def __init__(self, fn: SetFunctionOracle):
        _guard(fn.n, EXTENSION_N_MAX)
        self.fn = fn
        self.n = fn.n
        self.values = fn.value_table()
        self.masks = np.arange(1 << fn.n, dtype=np.int64)
        self.sizes = np.array([m.bit_count() for m in range(1 << fn.n)], dtype=np.int64)
        self._marginals: dict[int, np.ndarray] = {}
        self._seconds: dict[tuple[int, int], np.ndarray] = {}

    def marginals(self, i: int) -> np.ndarray:
        """Vector of B_i over all masks."""
        if i not in self._marginals:
            bit = 1 << i
            self._marginals[i] = self.values[self.masks | bit] - self.values[self.masks & ~bit]
        return self._marginals[i]

    def seconds(self, i: int, j: int) -> np.ndarray:
        """Vector of A_ij over all masks."""
        key = (min(i, j), max(i, j))
        if key not in self._seconds:
            if i == j:
                self._seconds[key] = np.zeros(1 << self.n)
            else:
                bi, bj = 1 << key[0], 1 << key[1]
                base = self.masks & ~bi & ~bj
                self._seconds[key] = (
                    self.values[base | bi | bj]
                    - self.values[base | bi]
                    - self.values[base | bj]
                    + self.values[base]
                )
        return self._seconds[key]

    def probabilities(self, x: np.ndarray) -> np.ndarray:
        """p_x over all masks; bit k of the index is element k."""
        p = np.array([1.0])
        for i in range(self.n):
            p = np.concatenate([p * (1.0 - x[i]), p * x[i]])
        return p


@dataclass(frozen=True)
class GammaReport:
    gamma: float
    is_infinite: bool = False
    witness: tuple[int, int, int] | None = None  # (S mask, i, j)
    vacuous: bool = False
    zero_denominators: int = 0

    def to_dict(self) -> dict:
        return {
            "gamma": None if self.is_infinite else self.gamma,
            "is_infinite": self.is_infinite,
            "vacuous": self.vacuous,
            "witness": {
                "S": elements_of(self.witness[0]),
                "i": self.witness[1],
                "j": self.witness[2],
            }
            if self.witness
            else None,
            "zero_denominators": self.zero_denominators,
        }


def gamma_parameter(fn: SetFunctionOracle, n_max: int = DEFAULT_N_MAX) -> GammaReport:
    """Smallest gamma with |S| A_ij(S) <= gamma (B_i(S) + B_j(S)) everywhere.

    Only strictly positive A_ij(S) terms constrain gamma; a positive term
    with a non-positive denominator makes the parameter infinite.
    """
    _guard(fn.n, n_max)
    t = ExactTables(fn)
    best = 0.0
    witness = None
    vacuous = True
    zero_den = 0
    nonempty = t.sizes > 0
    for i in range(t.n):
        for j in range(i + 1, t.n):
            a = t.seconds(i, j)
            active = nonempty & (a > ABS_TOL)
            if not active.any():
                continue
            vacuous = False
            den = t.marginals(i) + t.marginals(j)
            bad = active & (den <= ABS_TOL)
            if bad.any():
                mask = int(t.masks[bad][0])
                return GammaReport(
                    0.0, is_infinite=True, witness=(mask, i, j),
                    zero_denominators=int(bad.sum()),
                )
            ratio = np.where(active, t.sizes * a / np.where(active, den, 1.0), -np.inf)
            k = int(np.argmax(ratio))
            if ratio[k] > best or witness is None:
                best = float(ratio[k])
                witness = (int(t.masks[k]), i, j)
    if vacuous:
        return GammaReport(0.0, vacuous=True)
    return GammaReport(best, witness=witness, zero_denominators=zero_den)


@dataclass(frozen=True)
class ClassificationReport:
    monotone: bool
    submodular: bool
    supermodular: bool
    second_order_submodular: bool
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "submodular": self.submodular,
            "supermodular": self.supermodular,
            "second_order_submodular": self.second_order_submodular,
            "witnesses": self.witnesses,
        }


def classify(fn: SetFunctionOracle, n_max: int = DEFAULT_N_MAX, tol: float = ABS_TOL) -> ClassificationReport:
    """Exhaustive sign checks of B_i, A_ij, and the A_ij set-monotonicity."""
    _guard(fn.n, n_max)
    t = ExactTables(fn)
    witnesses: dict = {}

    monotone = True
    for i in range(t.n):
        b = t.marginals(i)
        k = int(np.argmin(b))
        if b[k] < -tol:
            monotone = False
            witnesses["monotone"] = {"i": i, "S": elements_of(int(k)), "B": float(b[k])}
            break

    submodular = supermodular = True
    second = True
    for i in range(t.n):
        for j in range(i + 1, t.n):
            a = t.seconds(i, j)
            hi, lo = int(np.argmax(a)), int(np.argmin(a))
            if submodular and a[hi] > tol:
                submodular = False
                witnesses["submodular"] = {"i": i, "j": j, "S": elements_of(hi), "A": float(a[hi])}
            if supermodular and a[lo] < -tol:
                supermodular = False
                witnesses["supermodular"] = {"i": i, "j": j, "S": elements_of(lo), "A": float(a[lo])}
            if second:
                for k in range(t.n):
                    bit = 1 << k
                    diff = a[t.masks | bit] - a[t.masks & ~bit]
                    w = int(np.argmax(diff))
                    if diff[w] > tol:
                        second = False
                        witnesses["second_order_submodular"] = {
                            "i": i, "j": j, "k": k, "S": elements_of(w), "delta": float(diff[w]),
                        }
                        break
    return ClassificationReport(monotone, submodular, supermodular, second, witnesses)


def multilinear_exact(fn: SetFunctionOracle, x) -> float:
    """F(x) by full enumeration."""
    t = ExactTables(fn)
    return float(t.values @ t.probabilities(np.asarray(x, dtype=float)))


def multilinear_gradient_exact(fn: SetFunctionOracle, x, i: int) -> float:
    """Partial derivative of F at x: the expectation of B_i under x."""
    t = ExactTables(fn)
    return float(t.marginals(i) @ t.probabilities(np.asarray(x, dtype=float)))


def multilinear_hessian_exact(fn: SetFunctionOracle, x, i: int, j: int) -> float:
    """Mixed second derivative of F at x: the expectation of A_ij under x."""
    if i == j:
        return 0.0
    t = ExactTables(fn)
    return float(t.seconds(i, j) @ t.probabilities(np.asarray(x, dtype=float)))


def multilinear_mc(fn: SetFunctionOracle, x, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of F(x) with its standard error."""
    if samples < 1:
        raise GuardError("need at least one sample")
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    draws = rng.random((samples, fn.n)) < x
    vals = np.empty(samples)
    bits = 1 << np.arange(fn.n, dtype=np.int64)
    for s in range(samples):
        vals[s] = fn.value(int((bits[draws[s]]).sum()))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr


@dataclass(frozen=True)
class SmoothnessCheck:
    sigma: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual}


def check_one_sided_smooth(fn: SetFunctionOracle, x, u, sigma: float) -> SmoothnessCheck:
    """Exact residual of (1/2) u' H(x) u <= sigma (|u|_1/|x|_1) u' grad(x)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    x_norm = float(x.sum())
    if x_norm <= 0:
        raise GuardError("one-sided smoothness is defined only at x != 0")
    t = ExactTables(fn)
    p = t.probabilities(x)
    grad = np.array([t.marginals(i) @ p for i in range(t.n)])
    lhs = 0.0
    for i in range(t.n):
        if u[i] == 0:
            continue
        for j in range(t.n):
            if i == j or u[j] == 0:
                continue
            lhs += 0.5 * u[i] * u[j] * float(t.seconds(i, j) @ p)
    rhs = sigma * (float(u.sum()) / x_norm) * float(u @ grad)
    return SmoothnessCheck(sigma, lhs, rhs)


def check_expectation_inequality(fn: SetFunctionOracle, x, i: int, j: int, sigma: float) -> float:
    """Residual of |x|_1 H_ij(x) <= sigma (grad_i(x) + grad_j(x))."""
    x = np.asarray(x, dtype=float)
    t = ExactTables(fn)
    p = t.probabilities(x)
    lhs = float(x.sum()) * float(t.seconds(i, j) @ p)
    rhs = sigma * float((t.marginals(i) + t.marginals(j)) @ p)
    return lhs - rhs


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool | None  # None when the hypotheses do not apply
    skipped_reason: str | None = None
    worst_slack: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "skipped_reason": self.skipped_reason,
            "worst_slack": self.worst_slack,
            "detail": self.detail,
        }


def _leq(lhs: float, rhs: float, tol: float = REL_TOL) -> bool:
    return lhs <= rhs + tol * max(1.0, abs(rhs))


def pair_seed_constant(r: int, gamma: float) -> float:
    """Explicit constant bounding f(optimum) / f(best independent pair).

    Follows the induction chain: the stage-2 marginal bound 2*gamma + 1 grows
    by a factor (1 + 2*gamma/k) per added element.
    """
    if r <= 2:
        return 1.0
    total = 1.0
    c = 2.0 * gamma + 1.0
    for i in range(3, r + 1):
        # c bounds the marginals onto the first i-1 chosen elements
        total += c
        c *= 1.0 + 2.0 * gamma / (i - 1)
    return total


def check_discrete_integral(fn: SetFunctionOracle, orderings: int = 3, seed: int = 0) -> LemmaCheck:
    """B_i(R) = f({i}) + sum_j A_{i v_j}(prefix) for sampled orderings of every R."""
    t = ExactTables(fn)
    rng = np.random.default_rng(seed)
    worst = 0.0
    witness: dict = {}
    passed = True
    singletons = [t.values[1 << i] for i in range(t.n)]
    for i in range(t.n):
        b = t.marginals(i)
        for mask in range(1 << t.n):
            elems = elements_of(mask)
            r = len(elems)
            for _ in range(min(orderings, math.factorial(r)) if r else 1):
                order = list(rng.permutation(elems)) if r > 1 else elems
                total = singletons[i]
                prefix = 0
                for v in order:
                    total += float(t.seconds(i, int(v))[prefix])
                    prefix |= 1 << int(v)
                err = abs(total - b[mask])
                rel = err / max(ABS_TOL, REL_TOL * max(abs(total), abs(b[mask])))
                if err > max(ABS_TOL, REL_TOL * max(abs(total), abs(b[mask]))):
                    passed = False
                    if not witness:
                        witness = {"i": i, "R": elems, "order": [int(v) for v in order],
                                   "lhs": float(b[mask]), "rhs": total}
                worst = max(worst, err)
    return LemmaCheck("discrete_integral", passed, worst_slack=worst, detail=witness)


def verify_lemmas(
    fn: SetFunctionOracle,
    n_max: int = DEFAULT_N_MAX,
    matroid=None,
    seed: int = 0,
    sample_points: int = 10,
) -> dict[str, LemmaCheck]:
    """Structural-inequality battery; checks skip (and say so) when their
    hypotheses fail for the given oracle."""
    _guard(fn.n, n_max)
    t = ExactTables(fn)
    cls = classify(fn, n_max=n_max)
    g = gamma_parameter(fn, n_max=n_max)
    gamma = None if g.is_infinite else g.gamma
    checks: dict[str, LemmaCheck] = {}

    checks["discrete_integral"] = check_discrete_integral(fn, seed=seed)

    # sum of marginals over R against (5*gamma + 2) f(R); B_i(R-i) == B_i(R)
    in_r = np.stack([(t.masks >> i) & 1 for i in range(t.n)])
    marg_sum = sum(in_r[i] * t.marginals(i) for i in range(t.n))
    big = t.sizes >= 2
    if not cls.monotone or gamma is None:
        checks["marginal_sum_bound"] = LemmaCheck(
            "marginal_sum_bound", None, skipped_reason="needs a monotone function with finite gamma")
    else:
        bound = (5.0 * gamma + 2.0) * t.values[big]
        slack = marg_sum[big] - bound
        k = int(np.argmax(slack))
        checks["marginal_sum_bound"] = LemmaCheck(
            "marginal_sum_bound", bool(np.all(_leq_vec(marg_sum[big], bound))),
            worst_slack=float(slack[k]),
            detail={"R": elements_of(int(t.masks[big][k]))})

    if not cls.second_order_submodular or float(t.values.min()) < -ABS_TOL:
        checks["second_order_marginal_bound"] = LemmaCheck(
            "second_order_marginal_bound", None,
            skipped_reason="needs a non-negative second-order-submodular function")
    else:
        bound = 2.0 * t.values
        slack = marg_sum - bound
        k = int(np.argmax(slack))
        checks["second_order_marginal_bound"] = LemmaCheck(
            "second_order_marginal_bound", bool(np.all(_leq_vec(marg_sum, bound))),
            worst_slack=float(slack[k]), detail={"R": elements_of(int(t.masks[k]))})

    checks["gradient_growth"] = _check_gradient_growth(t, cls, gamma, seed, sample_points)
    checks["kleinberg_equivalence"] = _check_kleinberg(t)
    if matroid is not None:
        checks["pair_seed_bound"] = _check_pair_seed(fn, t, matroid, cls, gamma)
    return checks


def _leq_vec(lhs: np.ndarray, rhs: np.ndarray, tol: float = REL_TOL) -> np.ndarray:
    return lhs <= rhs + tol * np.maximum(1.0, np.abs(rhs))


def _gradient(t: ExactTables, x: np.ndarray) -> np.ndarray:
    p = t.probabilities(x)
    return np.array([float(t.marginals(i) @ p) for i in range(t.n)])


def _check_gradient_growth(t, cls, gamma, seed, sample_points) -> LemmaCheck:
    """Directional-derivative growth along 1_R -> 1_R + u, two bounds at once:
    the 2^(4*gamma) cap and the (norm ratio)^(2*sigma) cap with sigma = 2*gamma."""
    if not cls.monotone or gamma is None:
        return LemmaCheck("gradient_growth", None,
                          skipped_reason="needs a monotone function with finite gamma")
    rng = np.random.default_rng(seed)
    worst = -math.inf
    passed = True
    detail: dict = {}
    cap = 2.0 ** (4.0 * gamma)
    for _ in range(sample_points):
        mask = int(rng.integers(1, 1 << t.n))
        r = mask.bit_count()
        ind = np.array([(mask >> i) & 1 for i in range(t.n)], dtype=float)
        x = rng.random(t.n)
        x *= min(1.0, r / max(x.sum(), 1e-12)) * rng.random()
        u = np.maximum(ind, x) - ind
        if u.sum() <= 0:
            continue
        base = float(u @ _gradient(t, ind))
        for eps in (0.25, 0.5, 1.0):
            moved = float(u @ _gradient(t, ind + eps * u))
            for name, rhs in (
                ("power_of_two", cap * base),
                ("norm_ratio", ((r + eps * float(u.sum())) / r) ** (4.0 * gamma) * base),
            ):
                slack = moved - rhs
                if slack > worst:
                    worst = slack
                    detail = {"bound": name, "R": elements_of(mask), "eps": eps,
                              "lhs": moved, "rhs": rhs}
                if not _leq(moved, rhs):
                    passed = False
    return LemmaCheck("gradient_growth", passed, worst_slack=None if worst == -math.inf else worst,
                      detail=detail)


def _check_kleinberg(t: ExactTables) -> LemmaCheck:
    """Zero-parameter meta-submodularity against the diminishing-marginals
    form quantified over sets with an outside element."""
    zero_ms = True
    outside_form = True
    nonempty = t.sizes > 0
    for i in range(t.n):
        for j in range(i + 1, t.n):
            a = t.seconds(i, j)
            if np.any(nonempty & (a > ABS_TOL)):
                zero_ms = False
            outside = nonempty & (((t.masks >> i) & 1) == 0) & (((t.masks >> j) & 1) == 0)
            if np.any(outside & (a > ABS_TOL)):
                outside_form = False
    # zero_ms must imply the outside-element form
    passed = (not zero_ms) or outside_form
    return LemmaCheck("kleinberg_equivalence", passed,
                      detail={"zero_ms": zero_ms, "kleinberg_form": outside_form})


def _check_pair_seed(fn, t, matroid, cls, gamma) -> LemmaCheck:
    """Optimum vs best independent pair against the explicit chain constant."""
    if not cls.monotone or gamma is None:
        return LemmaCheck("pair_seed_bound", None,
                          skipped_reason="needs a monotone function with finite gamma")
    if matroid.rank < 2:
        return LemmaCheck("pair_seed_bound", None, skipped_reason="matroid rank below 2")
    from .search import best_pair_init, brute_force_opt

    seed_mask = best_pair_init(fn, matroid)
    opt_mask, opt_value = brute_force_opt(fn, matroid)
    bound = pair_seed_constant(matroid.rank, gamma) * fn.value(seed_mask)
    return LemmaCheck("pair_seed_bound", _leq(opt_value, bound),
                      worst_slack=opt_value - bound,
                      detail={"optimum": elements_of(opt_mask), "seed": elements_of(seed_mask)})
