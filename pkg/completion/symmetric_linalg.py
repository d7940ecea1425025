"""
Dense symmetric matrix primitives.
Every rank or sign decision is an eigenvalue test relative to the largest eigenvalue,
never a test on the magnitude of a determinant.
"""
import json
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy import linalg

from completion.errors import InputError, MatrixFormatError, NumericError, SingularBlockError
from completion.report import dumps
from settings import NEAR_TOL_FACTOR, OPT_TOL, RANK_TOL, SYMMETRY_RTOL


@dataclass(frozen=True)
class Tolerance:
    rank_tol: float = RANK_TOL
    opt_tol: float = OPT_TOL

    def __post_init__(self):
        if not (self.rank_tol > 0 and self.opt_tol > 0):
            raise InputError(f"Tolerances must be strictly positive, got {self.rank_tol}, {self.opt_tol}")


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Inertia:
    positives: int
    negatives: int
    kernel: int

    @property
    def n(self) -> int:
        return self.positives + self.negatives + self.kernel

    @property
    def rank(self) -> int:
        return self.positives + self.negatives

    def as_tuple(self) -> Tuple[int, int, int]:
        return self.positives, self.negatives, self.kernel

    def to_dict(self) -> dict:
        return {"positives": self.positives, "negatives": self.negatives, "kernel": self.kernel}


def as_symmetric(a, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """
    Validates a square, finite, symmetric array and returns an exactly symmetric copy.
    """
    a = np.array(a, dtype=float)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, 0)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixFormatError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MatrixFormatError("Matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > rtol * scale:
        raise MatrixFormatError("Matrix is not symmetric")
    return (a + a.T) / 2


def _eigenvalues(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return np.empty(0)
    try:
        return linalg.eigh(a, eigvals_only=True)
    except linalg.LinAlgError as e:
        raise NumericError(f"Symmetric eigensolver failed: {e}")


def _kernel_threshold(values: np.ndarray, tol: Tolerance) -> float:
    largest = float(np.max(np.abs(values))) if values.size else 0.0
    return tol.rank_tol * max(1.0, largest)


def inertia(a, tol: Tolerance = DEFAULT_TOLERANCE) -> Inertia:
    values = _eigenvalues(as_symmetric(a))
    threshold = _kernel_threshold(values, tol)
    positives = int(np.sum(values > threshold))
    negatives = int(np.sum(values < -threshold))
    return Inertia(positives, negatives, values.size - positives - negatives)


def numeric_rank(a, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    return inertia(a, tol).rank


def det_sign(a, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """+1, -1, or 0 when the matrix is singular at tol. The 0x0 matrix has sign +1."""
    result = inertia(a, tol)
    if result.kernel:
        return 0
    return -1 if result.negatives % 2 else 1


def is_near_tolerance(a, tol: Tolerance = DEFAULT_TOLERANCE, factor: float = NEAR_TOL_FACTOR) -> bool:
    """True when some eigenvalue sits within `factor` of the kernel threshold, on either side."""
    values = _eigenvalues(as_symmetric(a))
    threshold = _kernel_threshold(values, tol)
    magnitudes = np.abs(values)
    return bool(np.any((magnitudes > threshold / factor) & (magnitudes <= threshold * factor)))


def principal_submatrix(a, keep: Iterable[int]) -> np.ndarray:
    """Rows and columns in `keep` (1-indexed), in increasing order."""
    a = np.asarray(a, dtype=float)
    keep = sorted(set(keep))
    if any(not 1 <= k <= a.shape[0] for k in keep):
        raise InputError(f"Index set {keep} is outside 1..{a.shape[0]}")
    index = np.array(keep, dtype=int) - 1
    return a[np.ix_(index, index)]


def det(a) -> float:
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(a))


def minor_det(a, rows: Iterable[int], cols: Iterable[int]) -> float:
    """Determinant after deleting the given rows and columns (1-indexed)."""
    a = np.asarray(a, dtype=float)
    keep_rows = [i for i in range(a.shape[0]) if i + 1 not in set(rows)]
    keep_cols = [j for j in range(a.shape[1]) if j + 1 not in set(cols)]
    if len(keep_rows) != len(keep_cols):
        raise InputError("Minor must be square")
    return det(a[np.ix_(keep_rows, keep_cols)])


def pluecker_terms(a) -> Tuple[float, float, float]:
    """
    The three products in
    det(A)det(A_1n,1n) - det(A_1,1)det(A_n,n) + det(A_1,n)det(A_n,1).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
        raise MatrixFormatError(f"Expected a square matrix of size at least 2, got shape {a.shape}")
    n = a.shape[0]
    return (det(a) * minor_det(a, [1, n], [1, n]),
            minor_det(a, [1], [1]) * minor_det(a, [n], [n]),
            minor_det(a, [1], [n]) * minor_det(a, [n], [1]))


def pluecker_residual(a) -> float:
    first, second, third = pluecker_terms(a)
    return first - second + third


def orthogonal_diagonalize(a) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns (C, values) with C orthogonal and C^T a C = diag(values), values descending.
    """
    a = as_symmetric(a)
    if a.shape[0] == 0:
        return np.empty((0, 0)), np.empty(0)
    try:
        values, vectors = linalg.eigh(a)
    except linalg.LinAlgError as e:
        raise NumericError(f"Symmetric eigensolver failed: {e}")
    return vectors[:, ::-1], values[::-1]


def assemble_blocks(a, x, b) -> np.ndarray:
    """[[A, X], [X^T, B]]"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float).reshape(a.shape[0], b.shape[0])
    return np.block([[a, x], [x.T, b]])


def schur_rank(a, x, b, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """rank(A) + rank(B - X^T A^-1 X) for the block matrix [[A, X], [X^T, B]]."""
    a, b = as_symmetric(a), as_symmetric(b)
    x = np.asarray(x, dtype=float).reshape(a.shape[0], b.shape[0])
    if numeric_rank(a, tol) != a.shape[0]:
        raise SingularBlockError("Leading block is singular at the configured tolerance")
    if a.shape[0] == 0:
        return numeric_rank(b, tol)
    schur = b - x.T @ linalg.solve(a, x, assume_a="sym")
    return a.shape[0] + numeric_rank((schur + schur.T) / 2, tol)


## File format ##

def parse_matrix(text: str) -> np.ndarray:
    """Reads {"n": int, "rows": [[...], ...]} and validates symmetry."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"Matrix file is not valid JSON: {e}")
    if not isinstance(payload, dict) or "n" not in payload or "rows" not in payload:
        raise MatrixFormatError("Matrix file needs 'n' and 'rows'")
    n, rows = payload["n"], payload["rows"]
    if not isinstance(n, int) or n < 0 or not isinstance(rows, list) or len(rows) != n \
            or any(not isinstance(row, list) or len(row) != n for row in rows):
        raise MatrixFormatError(f"'rows' must be an {n} x {n} list of lists")
    try:
        return as_symmetric(np.array(rows, dtype=float).reshape(n, n))
    except (TypeError, ValueError):
        raise MatrixFormatError("Matrix entries must be numbers")


def format_matrix(a) -> str:
    a = np.asarray(a, dtype=float)
    return dumps({"n": a.shape[0], "rows": a.tolist()})
