"""Distance-matrix validation and approximate-triangle-inequality diagnostics.

Covers the semi-metric parameter (worst ratio d(i,j) / (d(i,k) + d(k,j))),
negative-type certification via the centered quadratic form, square-root
metric certification, and Jensen-Shannon distance matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

MATRIX_TOL = 1e-12


def validate_distance(raw) -> np.ndarray:
    """Return the validated matrix or raise listing every violated cell."""
    D = np.asarray(raw, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValidationError(f"distance matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    violations = []
    for i in range(n):
        if abs(D[i, i]) > MATRIX_TOL:
            violations.append(f"nonzero diagonal at ({i},{i}): {D[i, i]!r}")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(D[i, j] - D[j, i]) > MATRIX_TOL:
                violations.append(f"asymmetry at ({i},{j}): {D[i, j]!r} vs {D[j, i]!r}")
    neg = np.argwhere(D < -MATRIX_TOL)
    for i, j in neg:
        violations.append(f"negative entry at ({i},{j}): {D[i, j]!r}")
    if not np.all(np.isfinite(D)):
        violations.append("non-finite entry")
    if violations:
        raise ValidationError("invalid distance matrix: " + "; ".join(violations))
    return D


@dataclass(frozen=True)
class SemiMetricReport:
    sigma: float
    is_infinite: bool = False
    witness: tuple[int, int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "sigma": None if self.is_infinite else self.sigma,
            "is_infinite": self.is_infinite,
            "witness": list(self.witness) if self.witness else None,
        }


def semi_metric_parameter(D: np.ndarray, tol: float = MATRIX_TOL) -> SemiMetricReport:
    """Smallest sigma with d(i,j) <= sigma*(d(i,k)+d(k,j)) over all triples.

    A positive entry whose every two-leg path has zero length yields the
    infinite flag. n < 3 reports sigma 0 by convention.
    """
    n = D.shape[0]
    if n < 3:
        return SemiMetricReport(0.0)
    best = 0.0
    witness = None
    for i in range(n):
        for j in range(n):
            if j == i or D[i, j] <= tol:
                continue
            denom_ok = False
            for k in range(n):
                if k == i or k == j:
                    continue
                denom = D[i, k] + D[k, j]
                if denom > tol:
                    denom_ok = True
                    ratio = D[i, j] / denom
                    if ratio > best:
                        best = ratio
                        witness = (i, j, k)
            if not denom_ok:
                k = next(v for v in range(n) if v != i and v != j)
                return SemiMetricReport(0.0, is_infinite=True, witness=(i, j, k))
    return SemiMetricReport(best, witness=witness)


def is_negative_type(D: np.ndarray, tol: float = 1e-9) -> tuple[bool, float]:
    """Decide x^T D x <= tol for all x on the sum-zero hyperplane.

    Checked spectrally: the largest eigenvalue of P D P, with P the
    centering projector, must not exceed tol. Returns the decision and
    that eigenvalue.
    """
    n = D.shape[0]
    P = np.eye(n) - np.full((n, n), 1.0 / n)
    centered = P @ D @ P
    # symmetrize against round-off before the eigen-solve
    centered = (centered + centered.T) / 2.0
    eigvals = np.linalg.eigvalsh(centered)
    top = float(eigvals[-1])
    return top <= tol, top


def is_sqrt_metric(D: np.ndarray, tol: float = 1e-9) -> tuple[bool, tuple[int, int, int] | None]:
    """True iff the entrywise square root satisfies every triangle inequality."""
    root = np.sqrt(D)
    n = D.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k == i or k == j:
                    continue
                if root[i, j] > root[i, k] + root[j, k] + tol:
                    return False, (i, j, k)
    return True, None


def js_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Jensen-Shannon divergence with natural logarithm; 0*log(0) := 0."""
    m = (p + q) / 2.0
    total = 0.0
    for a, b in ((p, m), (q, m)):
        pos = a > 0
        total += 0.5 * float(np.sum(a[pos] * np.log(a[pos] / b[pos])))
    return total


def js_divergence_matrix(distributions: Sequence[Sequence[float]], tol: float = 1e-9) -> np.ndarray:
    """Pairwise JS divergences of probability vectors as a distance matrix."""
    probs = np.asarray(distributions, dtype=float)
    if probs.ndim != 2:
        raise ValidationError("distributions must share a common support size")
    for idx, p in enumerate(probs):
        if np.any(p < 0):
            raise ValidationError(f"distribution {idx} has a negative entry")
        if abs(p.sum() - 1.0) > tol:
            raise ValidationError(f"distribution {idx} sums to {p.sum()!r}, not 1")
    n = probs.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = js_divergence(probs[i], probs[j])
    return validate_distance(D)
