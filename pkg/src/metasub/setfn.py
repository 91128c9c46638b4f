"""Set-function oracles over bitmask subsets of a ground set {0, ..., n-1}.

Every oracle is normalized so that the empty set evaluates to 0, and exposes
the first-order difference (marginal gain) and the symmetric second-order
difference that the structural diagnostics are built from.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

MAX_GROUND_SET = 62
TABLE_GUARD = 20

REL_TOL = 1e-9
ABS_TOL = 1e-12


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for v in elements:
        m |= 1 << int(v)
    return m


def iter_elements(mask: int):
    mask = int(mask)
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def elements_of(mask: int) -> list[int]:
    return list(iter_elements(mask))


def check_mask(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ValidationError(f"mask {mask:#x} out of range for ground set of size {n}")


def close(a: float, b: float, rel: float = REL_TOL, floor: float = ABS_TOL) -> bool:
    return abs(a - b) <= max(floor, rel * max(abs(a), abs(b)))


class SetFunctionOracle:
    """Base oracle: deterministic, immutable, f(empty)=0."""

    kind = "abstract"

    def __init__(self, n: int):
        if n < 1 or n > MAX_GROUND_SET:
            raise ValidationError(f"ground set size {n} outside [1, {MAX_GROUND_SET}]")
        self.n = n
        self._offset: float | None = None
        self._table: np.ndarray | None = None

    def _raw_value(self, mask: int) -> float:
        raise NotImplementedError

    def value(self, mask: int) -> float:
        check_mask(mask, self.n)
        if self._table is not None:
            return float(self._table[mask])
        if self._offset is None:
            self._offset = self._raw_value(0)
        return self._raw_value(mask) - self._offset

    def marginal(self, i: int, mask: int) -> float:
        """f(S+i) - f(S-i); independent of whether i is already in S."""
        if not 0 <= i < self.n:
            raise ValidationError(f"element {i} out of range")
        bit = 1 << i
        return self.value(mask | bit) - self.value(mask & ~bit)

    def second_difference(self, i: int, j: int, mask: int) -> float:
        """Symmetric mixed second difference; zero when i == j."""
        if not 0 <= i < self.n or not 0 <= j < self.n:
            raise ValidationError("element out of range")
        check_mask(mask, self.n)
        bi, bj = 1 << min(i, j), 1 << max(i, j)
        if bi == bj:
            return 0.0
        base = mask & ~bi & ~bj
        return (
            self.value(base | bi | bj)
            - self.value(base | bi)
            - self.value(base | bj)
            + self.value(base)
        )

    def value_table(self) -> np.ndarray:
        """Dense vector of f over all 2^n masks (cached; n capped)."""
        if self._table is None:
            if self.n > TABLE_GUARD:
                from .errors import GuardError

                raise GuardError(f"value table needs n <= {TABLE_GUARD}, got {self.n}")
            if self._offset is None:
                self._offset = self._raw_value(0)
            vals = np.empty(1 << self.n)
            for mask in range(1 << self.n):
                vals[mask] = self._raw_value(mask) - self._offset
            self._table = vals
        return self._table


class DiversityFunction(SetFunctionOracle):
    """Pairwise dissimilarity sum, optionally plus non-negative modular weights."""

    def __init__(self, distance: np.ndarray, weights: Sequence[float] | None = None):
        distance = np.asarray(distance, dtype=float)
        n = distance.shape[0]
        super().__init__(n)
        from .metric import validate_distance

        self.distance = validate_distance(distance)
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (n,):
                raise ValidationError("modular weights must have length n")
            if np.any(weights < 0):
                raise ValidationError("modular weights must be non-negative")
            self.kind = "diversity_plus_modular"
        else:
            self.kind = "diversity"
        self.weights = weights

    def _raw_value(self, mask: int) -> float:
        idx = elements_of(mask)
        total = float(self.distance[np.ix_(idx, idx)].sum()) / 2.0 if len(idx) > 1 else 0.0
        if self.weights is not None and idx:
            total += float(self.weights[idx].sum())
        return total

    def marginal(self, i: int, mask: int) -> float:
        if not 0 <= i < self.n:
            raise ValidationError(f"element {i} out of range")
        check_mask(mask, self.n)
        others = elements_of(mask & ~(1 << i))
        total = float(self.distance[i, others].sum()) if others else 0.0
        if self.weights is not None:
            total += float(self.weights[i])
        return total


class CoverageFunction(SetFunctionOracle):
    """Weighted coverage: value of the union of per-element universe subsets."""

    kind = "coverage"

    def __init__(self, incidence: Sequence[Iterable[int]], universe_weights: Sequence[float]):
        super().__init__(len(incidence))
        weights = np.asarray(universe_weights, dtype=float)
        if np.any(weights < 0):
            raise ValidationError("universe weights must be non-negative")
        m = len(weights)
        self.universe_weights = weights
        self._covers: list[int] = []
        for items in incidence:
            cover = 0
            for u in items:
                if not 0 <= u < m:
                    raise ValidationError(f"incidence references unknown universe item {u}")
                cover |= 1 << u
            self._covers.append(cover)

    def _raw_value(self, mask: int) -> float:
        union = 0
        for v in iter_elements(mask):
            union |= self._covers[v]
        return float(self.universe_weights[elements_of(union)].sum()) if union else 0.0


class TableFunction(SetFunctionOracle):
    """Explicit lookup over all 2^n subsets."""

    kind = "table"

    def __init__(self, values: Sequence[float]):
        values = np.asarray(values, dtype=float)
        size = len(values)
        n = size.bit_length() - 1
        if size < 2 or size != 1 << n:
            raise ValidationError(f"table length {size} is not a power of two >= 2")
        if not np.all(np.isfinite(values)):
            raise ValidationError("table contains non-finite values")
        if abs(values[0]) > ABS_TOL:
            raise ValidationError("table value at the empty set must be 0")
        super().__init__(n)
        self._table = values.copy()

    def _raw_value(self, mask: int) -> float:
        return float(self._table[mask])


class WeightedSumFunction(SetFunctionOracle):
    """Positive linear combination of oracles over a common ground set."""

    kind = "weighted_sum"

    def __init__(self, components: Sequence[tuple[SetFunctionOracle, float]]):
        if not components:
            raise ValidationError("weighted sum needs at least one component")
        n = components[0][0].n
        for fn, coeff in components:
            if fn.n != n:
                raise ValidationError("components must share the ground set size")
            if not coeff > 0:
                raise ValidationError(f"coefficient {coeff} must be positive")
        super().__init__(n)
        self.components = list(components)

    def _raw_value(self, mask: int) -> float:
        return sum(coeff * fn.value(mask) for fn, coeff in self.components)


def build_diversity(distance, weights=None) -> DiversityFunction:
    return DiversityFunction(distance, weights)


def build_coverage(incidence, universe_weights) -> CoverageFunction:
    return CoverageFunction(incidence, universe_weights)


def build_table(values) -> TableFunction:
    return TableFunction(values)


def build_weighted_sum(components) -> WeightedSumFunction:
    return WeightedSumFunction(components)
