"""Invertible linear operators: dense complex matrices and two-sided weighted shifts.

A :class:`DenseOperator` acts on ``C^dim`` as an explicit matrix.  A
:class:`ShiftOperator` acts on finitely supported vectors over the
integer-indexed orthonormal basis ``(e_n)``.  Its two-sided-constant weight
profile lives on the *edges* of the index lattice: the hop between basis
indices ``m`` and ``m+1`` carries ``weight_pos`` when ``m >= crossover`` and
``weight_neg`` otherwise.  Adjoints, inverses and finite windows all follow
from that single convention, e.g. the adjoint of a forward shift is the
backward shift with the same edge weights.

All values are immutable after construction and every operation here is pure,
so concurrent use from multiple threads is safe.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotUnimodularError, SingularOperatorError

__all__ = [
    "DenseOperator",
    "ShiftOperator",
    "SupportedVector",
    "identity",
    "diagonal",
    "basis_vector",
    "apply",
    "adjoint",
    "inverse",
    "materialize",
    "rotate",
    "vec_norm",
    "vec_add",
    "vec_sub",
    "vec_scale",
    "vec_inner",
    "operator_to_json",
    "operator_from_json",
]

UNIMODULAR_TOL = 1e-12

# Invertibility cutoff: smallest singular value must exceed this multiple of
# the largest one (configurable per call on `inverse`).
SINGULARITY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Square complex matrix, frozen after construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("entries must form a square matrix of dimension >= 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("entries must be finite (no NaN/Inf)")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self):
        return f"DenseOperator(dim={self.dim})"


def identity(dim: int) -> DenseOperator:
    return DenseOperator(np.eye(dim, dtype=np.complex128))


def diagonal(values) -> DenseOperator:
    """Dense diagonal operator from a sequence of complex diagonal entries."""
    return DenseOperator(np.diag(np.asarray(list(values), dtype=np.complex128)))


@dataclass(frozen=True)
class ShiftOperator:
    """Bilateral weighted shift with a two-sided-constant weight profile.

    direction "forward" maps e_n -> w * e_{n+1}, "backward" maps
    e_n -> w * e_{n-1}; in both cases w is the weight of the traversed edge.
    Forward with crossover 0 and weights (2*sqrt(2), 1/(2*sqrt(2))) is the
    standard expansive-without-shadowing example; the backward shift with the
    same parameters is its adjoint.
    """

    direction: str
    weight_pos: float
    weight_neg: float
    crossover: int = 0

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValueError("direction must be 'forward' or 'backward'")
        if not (self.weight_pos > 0 and self.weight_neg > 0):
            raise ValueError("shift weights must be positive")
        if not (np.isfinite(self.weight_pos) and np.isfinite(self.weight_neg)):
            raise ValueError("shift weights must be finite")

    def edge_weight(self, m: int) -> float:
        """Weight on the edge between basis indices m and m+1."""
        return self.weight_pos if m >= self.crossover else self.weight_neg


@dataclass(frozen=True, eq=False)
class SupportedVector:
    """Finitely supported vector over the integer-indexed basis.

    Only listed indices are nonzero; the norm is the l2 norm over the listed
    support.  Instances are value-immutable: the coefficient map is copied at
    construction and never mutated afterwards.
    """

    coefficients: dict

    def __post_init__(self):
        coeffs = {int(k): complex(v) for k, v in self.coefficients.items()}
        for v in coeffs.values():
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def support(self):
        return sorted(self.coefficients)

    def get(self, n: int) -> complex:
        return self.coefficients.get(n, 0j)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.coefficients.values())))

    def scaled(self, a) -> "SupportedVector":
        a = complex(a)
        return SupportedVector({n: a * v for n, v in self.coefficients.items()})

    def __add__(self, other: "SupportedVector") -> "SupportedVector":
        out = dict(self.coefficients)
        for n, v in other.coefficients.items():
            out[n] = out.get(n, 0j) + v
        return SupportedVector(out)

    def __sub__(self, other: "SupportedVector") -> "SupportedVector":
        return self + other.scaled(-1.0)

    def inner(self, other: "SupportedVector") -> complex:
        """<self, other>, linear in self and conjugate-linear in other."""
        theirs = other.coefficients
        return complex(
            sum(v * theirs[n].conjugate() for n, v in self.coefficients.items() if n in theirs)
        )

    def to_window_array(self, half_width: int) -> np.ndarray:
        """Dense coefficient array on indices -half_width..half_width."""
        out = np.zeros(2 * half_width + 1, dtype=np.complex128)
        for n, v in self.coefficients.items():
            if -half_width <= n <= half_width:
                out[n + half_width] = v
        return out


def basis_vector(n: int, value=1.0) -> SupportedVector:
    return SupportedVector({n: value})


def apply(op, v):
    """Image of v under op.

    Dense operators take length-dim complex arrays, shifts take
    SupportedVectors; anything else is a dimension/kind mismatch.
    """
    if isinstance(op, DenseOperator):
        if isinstance(v, SupportedVector):
            raise DimensionMismatchError("dense operator expects a dense coefficient vector")
        arr = np.asarray(v, dtype=np.complex128)
        if arr.shape != (op.dim,):
            raise DimensionMismatchError(
                f"vector of shape {arr.shape} does not match operator dimension {op.dim}"
            )
        return op.entries @ arr
    if isinstance(op, ShiftOperator):
        if not isinstance(v, SupportedVector):
            raise DimensionMismatchError("shift operator expects a SupportedVector")
        if op.direction == "forward":
            return SupportedVector(
                {n + 1: op.edge_weight(n) * c for n, c in v.coefficients.items()}
            )
        return SupportedVector(
            {n - 1: op.edge_weight(n - 1) * c for n, c in v.coefficients.items()}
        )
    raise TypeError(f"not an operator: {op!r}")


def adjoint(op):
    """Adjoint with respect to the standard inner product.

    Conjugate transpose for dense operators; for shifts, the opposite-direction
    shift with identical edge weights (weights are real, so transposition is
    enough).
    """
    if isinstance(op, DenseOperator):
        return DenseOperator(op.entries.conj().T)
    if isinstance(op, ShiftOperator):
        flipped = "backward" if op.direction == "forward" else "forward"
        return ShiftOperator(flipped, op.weight_pos, op.weight_neg, op.crossover)
    raise TypeError(f"not an operator: {op!r}")


def inverse(op, rtol: float = SINGULARITY_RTOL):
    """Inverse operator.

    Dense: numerical inverse, guarded by the smallest singular value
    (raises SingularOperatorError below rtol * largest singular value).
    Shift: the opposite-direction shift with reciprocated edge weights,
    which is exact.
    """
    if isinstance(op, ShiftOperator):
        flipped = "backward" if op.direction == "forward" else "forward"
        return ShiftOperator(flipped, 1.0 / op.weight_pos, 1.0 / op.weight_neg, op.crossover)
    if not isinstance(op, DenseOperator):
        raise TypeError(f"not an operator: {op!r}")
    svals = np.linalg.svd(op.entries, compute_uv=False)
    if svals[-1] <= rtol * svals[0]:
        raise SingularOperatorError(
            f"operator is numerically singular: smallest singular value {svals[-1]:.3e} "
            f"<= {rtol:.1e} * largest ({svals[0]:.3e})"
        )
    return DenseOperator(np.linalg.inv(op.entries))


def materialize(op: ShiftOperator, half_width: int) -> DenseOperator:
    """Finite window of a shift on basis indices -N..N as a (2N+1)x(2N+1) matrix.

    The column of the boundary vector whose image leaves the window is dropped
    (set to zero), so the window agrees with `apply` exactly on vectors
    supported in -N+1..N-1; callers manage boundary effects through the
    half_width margin.
    """
    if not isinstance(op, ShiftOperator):
        raise TypeError("materialize takes a ShiftOperator")
    n = int(half_width)
    if n < 1:
        raise ValueError("half_width must be >= 1")
    size = 2 * n + 1
    mat = np.zeros((size, size), dtype=np.complex128)
    if op.direction == "forward":
        for m in range(-n, n):  # image of e_n leaves the window; its column stays zero
            mat[m + 1 + n, m + n] = op.edge_weight(m)
    else:
        for m in range(-n + 1, n + 1):  # image of e_{-n} leaves the window
            mat[m - 1 + n, m + n] = op.edge_weight(m - 1)
    return DenseOperator(mat)


def rotate(op, lam):
    """Scale an operator by the reciprocal of a unimodular factor: lam^{-1} * op.

    For shifts only lam == 1 keeps the result in the positive-weight shift
    family; other factors require a dense operator.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) >= UNIMODULAR_TOL:
        raise NotUnimodularError(f"|lambda| = {abs(lam)!r} is not within {UNIMODULAR_TOL} of 1")
    if isinstance(op, DenseOperator):
        return DenseOperator(op.entries / lam)
    if isinstance(op, ShiftOperator):
        if lam == 1:
            return op
        raise ValueError(
            "rotation of a ShiftOperator by lambda != 1 leaves the positive-weight "
            "shift family; materialize or use a dense operator instead"
        )
    raise TypeError(f"not an operator: {op!r}")


# ---------------------------------------------------------------------------
# kind-generic vector helpers (dense ndarrays and SupportedVectors)

def vec_norm(v) -> float:
    if isinstance(v, SupportedVector):
        return v.norm()
    return float(np.linalg.norm(np.asarray(v)))


def vec_add(a, b):
    if isinstance(a, SupportedVector):
        return a + b
    return np.asarray(a) + np.asarray(b)


def vec_sub(a, b):
    if isinstance(a, SupportedVector):
        return a - b
    return np.asarray(a) - np.asarray(b)


def vec_scale(c, v):
    if isinstance(v, SupportedVector):
        return v.scaled(c)
    return complex(c) * np.asarray(v, dtype=np.complex128)


def vec_inner(a, b) -> complex:
    """<a, b>, linear in a, conjugate-linear in b."""
    if isinstance(a, SupportedVector):
        return a.inner(b)
    return complex(np.sum(np.asarray(a) * np.conj(np.asarray(b))))


# ---------------------------------------------------------------------------
# JSON wire format
#
#   {"kind": "dense", "dim": n, "entries": [[re, im], ...]}   (row-major, n*n pairs)
#   {"kind": "shift", "direction": "forward"|"backward",
#    "weight_pos": w, "weight_neg": w, "crossover": k}

def operator_to_json(op) -> dict:
    if isinstance(op, DenseOperator):
        flat = op.entries.reshape(-1)
        return {
            "kind": "dense",
            "dim": op.dim,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }
    if isinstance(op, ShiftOperator):
        return {
            "kind": "shift",
            "direction": op.direction,
            "weight_pos": float(op.weight_pos),
            "weight_neg": float(op.weight_neg),
            "crossover": int(op.crossover),
        }
    raise TypeError(f"not an operator: {op!r}")


def operator_from_json(data: dict):
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("operator JSON must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "dense":
        dim = int(data["dim"])
        pairs = data["entries"]
        if len(pairs) != dim * dim:
            raise ValueError(f"dense operator needs {dim * dim} entries, got {len(pairs)}")
        flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
        return DenseOperator(flat.reshape(dim, dim))
    if kind == "shift":
        return ShiftOperator(
            str(data["direction"]),
            float(data["weight_pos"]),
            float(data["weight_neg"]),
            int(data.get("crossover", 0)),
        )
    raise ValueError(f"unknown operator kind {kind!r}")
