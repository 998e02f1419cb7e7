"""Matrices over ``A``, the Hadamard axioms, equivalence and product constructions.

A matrix ``H in M_{R x C}(A)`` is stored per fiber as an array of shape
``(R, C, K, K)``; ``blocks[x][i, j]`` is the fiber-``x`` block of ``H_ij``.
Product matrices use the flattening ``(i, a) -> i*M + a`` on rows and
``(j, b) -> j*M + b`` on columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraShape,
    AlgElem,
    Check,
    central_residual,
    is_commutative,
    make_shape,
    opnorm,
    unitarity_residual,
)
from .errors import HypothesisError, PreconditionError, ShapeMismatchError


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class NCMatrix:
    """An ``R x C`` grid of elements of ``A``."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        if not blocks:
            raise ValueError("need at least one fiber")
        r, c = blocks[0].shape[:2]
        for b in blocks:
            if b.ndim != 4 or b.shape[:2] != (r, c) or b.shape[2] != b.shape[3]:
                raise ValueError(f"inconsistent fiber block array of shape {b.shape}")
        if r < 1 or c < 1:
            raise ValueError("matrices must have at least one row and one column")
        object.__setattr__(self, "blocks", blocks)

    @property
    def shape(self) -> AlgebraShape:
        return tuple(b.shape[2] for b in self.blocks)

    @property
    def rows(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def cols(self) -> int:
        return self.blocks[0].shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> AlgElem:
        return AlgElem(tuple(b[i, j] for b in self.blocks))

    def __getitem__(self, ij) -> AlgElem:
        i, j = ij
        return self.entry(i, j)

    def entries(self) -> list[list[AlgElem]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    @classmethod
    def from_entries(cls, grid: Sequence[Sequence[AlgElem]]) -> "NCMatrix":
        if not grid or not grid[0]:
            raise ValueError("empty grid")
        ncols = len(grid[0])
        if any(len(row) != ncols for row in grid):
            raise ValueError("ragged grid")
        shape = grid[0][0].shape
        for row in grid:
            for e in row:
                if e.shape != shape:
                    raise ShapeMismatchError(shape, e.shape, "matrix entries")
        blocks = tuple(
            np.array([[e.blocks[x] for e in row] for row in grid]) for x in range(len(shape))
        )
        return cls(blocks)

    @classmethod
    def from_scalars(cls, values, shape: AlgebraShape = (1,)) -> "NCMatrix":
        """Embed a complex matrix, each entry times the identity of ``A``."""
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim != 2:
            raise ValueError("need a 2-d array of scalars")
        shape = make_shape(shape)
        return cls(tuple(values[:, :, None, None] * np.eye(k) for k in shape))

    def __eq__(self, other):
        if not isinstance(other, NCMatrix):
            return NotImplemented
        if self.shape != other.shape or (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"NCMatrix({self.rows}x{self.cols}, shape={list(self.shape)})"

    def operator(self) -> tuple[np.ndarray, ...]:
        """The matrix as an operator, one ``(R*K) x (C*K)`` array per fiber."""
        return tuple(
            b.transpose(0, 2, 1, 3).reshape(self.rows * b.shape[2], self.cols * b.shape[2])
            for b in self.blocks
        )

    def grid_transpose(self) -> "NCMatrix":
        """``H^t``: swap the grid indices, leave the entries alone."""
        return NCMatrix(tuple(b.transpose(1, 0, 2, 3) for b in self.blocks))

    def entrywise_adjoint(self) -> "NCMatrix":
        """``H-bar``: replace each entry by its adjoint."""
        return NCMatrix(tuple(b.conj().transpose(0, 1, 3, 2) for b in self.blocks))

    def distance(self, other: "NCMatrix") -> float:
        """Largest entrywise operator-norm difference."""
        if self.shape != other.shape:
            raise ShapeMismatchError(self.shape, other.shape)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix sizes differ")
        return float(max(opnorm(a - b).max() for a, b in zip(self.blocks, other.blocks)))


def _require_square(H: NCMatrix, what: str = "matrix"):
    if not H.is_square:
        raise PreconditionError(f"{what} must be square, got {H.rows}x{H.cols}", "square")


# -- residual kernels (per fiber, vectorised) --------------------------------


def _argmax(arr: np.ndarray):
    idx = np.unravel_index(int(np.argmax(arr)), arr.shape)
    return float(arr[idx]), tuple(int(i) for i in idx)


def _max_over_fibers(values):
    best, where = 0.0, None
    for val, idx in values:
        if where is None or val > best:
            best, where = val, idx
    return best, where


def _unitarity(B: np.ndarray):
    eye = np.eye(B.shape[-1])
    r1 = opnorm(B @ B.conj().swapaxes(-1, -2) - eye)
    r2 = opnorm(B.conj().swapaxes(-1, -2) @ B - eye)
    return _argmax(np.maximum(r1, r2))


def _row_commutation(B: np.ndarray):
    """Worst ``||[B_ij, B_ik]||`` over entries sharing a row."""
    if B.shape[1] < 2:
        return 0.0, None
    prod = B[:, :, None] @ B[:, None, :]
    comm = prod - prod.swapaxes(1, 2)
    val, (i, j, k) = _argmax(opnorm(comm))
    return val, ((i, j), (i, k))


def _col_commutation(B: np.ndarray):
    val, where = _row_commutation(B.swapaxes(0, 1))
    if where is not None:
        where = tuple((j, i) for i, j in where)
    return val, where


def _row_orthogonality(B: np.ndarray):
    """Worst of ``||(sum_j B_ij B_kj^* - N delta_ik)/N||`` and the ``B^* B`` variant."""
    n, k = B.shape[1], B.shape[-1]
    target = n * np.eye(B.shape[0])[:, :, None, None] * np.eye(k)
    s1 = np.einsum("ijab,kjcb->ikac", B, B.conj())
    s2 = np.einsum("ijba,kjbc->ikac", B.conj(), B)
    r = np.maximum(opnorm(s1 - target), opnorm(s2 - target)) / n
    return _argmax(r)


def _col_orthogonality(B: np.ndarray):
    return _row_orthogonality(B.swapaxes(0, 1))


def _cross_commutation(X: np.ndarray, Y: np.ndarray):
    """Worst ``||[X_p, Y_q]||`` over all entries ``p`` of X and ``q`` of Y."""
    xs = X.reshape(-1, *X.shape[-2:])
    ys = Y.reshape(-1, *Y.shape[-2:])
    comm = xs[:, None] @ ys[None, :] - ys[None, :] @ xs[:, None]
    val, (p, q) = _argmax(opnorm(comm))
    return val, (tuple(int(t) for t in np.unravel_index(p, X.shape[:2])),
                 tuple(int(t) for t in np.unravel_index(q, Y.shape[:2])))


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    residual_unitarity: float
    residual_row_commutation: float
    residual_col_commutation: float
    residual_row_orth: float
    residual_col_orth: float
    tol: float
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "unitarity": self.residual_unitarity,
            "row_commutation": self.residual_row_commutation,
            "col_commutation": self.residual_col_commutation,
            "row_orthogonality": self.residual_row_orth,
            "col_orthogonality": self.residual_col_orth,
        }

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "residuals": self.residuals,
            "worst": {k: _jsonable(v) for k, v in self.worst.items()},
        }


def _jsonable(where):
    if where is None:
        return None
    if isinstance(where, tuple):
        return [_jsonable(w) for w in where]
    return where


def verify_hadamard(H: NCMatrix, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check the three Hadamard axioms and report every residual.

    Orthogonality residuals are the operator norms of
    ``(sum_j H_ij H_kj^* - N delta_ik) / N`` and of the three companion sums
    (``H_ij^* H_kj`` along rows, both forms along columns), maximised over
    all index pairs and fibers.
    """
    _require_square(H)
    checks = {
        "unitarity": _unitarity,
        "row_commutation": _row_commutation,
        "col_commutation": _col_commutation,
        "row_orthogonality": _row_orthogonality,
        "col_orthogonality": _col_orthogonality,
    }
    res, worst = {}, {}
    for name, fn in checks.items():
        val, where = _max_over_fibers(fn(B) for B in H.blocks)
        res[name] = val
        worst[name] = where
    return VerificationReport(
        residual_unitarity=res["unitarity"],
        residual_row_commutation=res["row_commutation"],
        residual_col_commutation=res["col_commutation"],
        residual_row_orth=res["row_orthogonality"],
        residual_col_orth=res["col_orthogonality"],
        tol=tol,
        worst=worst,
    )


def is_biunitary(H: NCMatrix, tol: float = DEFAULT_TOL) -> Check:
    """Whether ``H H^* = H^t H-bar = N 1`` holds, i.e. ``H/sqrt(N)`` is biunitary."""
    _require_square(H)
    n = H.rows
    ht_bar = H.grid_transpose().operator(), H.entrywise_adjoint().operator()
    res = 0.0
    for op, t, bar in zip(H.operator(), *ht_bar):
        eye = n * np.eye(op.shape[0])
        res = max(res, float(opnorm(op @ op.conj().T - eye)), float(opnorm(t @ bar - eye)))
    return Check(res <= n * tol, res)


def is_classical(H: NCMatrix, tol: float = DEFAULT_TOL) -> Check:
    """Whether all entries (and their adjoints) commute pairwise.

    Returns the worst commutator norm alongside the verdict.
    """
    res = 0.0
    for B in H.blocks:
        flat = B.reshape(-1, *B.shape[-2:])
        res = max(res, _cross_commutation(flat[:, None], flat[:, None])[0])
        adj = flat.conj().swapaxes(-1, -2)
        res = max(res, _cross_commutation(flat[:, None], adj[:, None])[0])
    return Check(res <= tol, res)


# -- equivalence --------------------------------------------------------------


@dataclass(frozen=True)
class PermuteRows:
    perm: tuple[int, ...]


@dataclass(frozen=True)
class PermuteCols:
    perm: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ScaleRow:
    index: int
    unit: AlgElem


@dataclass(frozen=True, eq=False)
class ScaleCol:
    index: int
    unit: AlgElem


EquivalenceOp = Union[PermuteRows, PermuteCols, ScaleRow, ScaleCol]


def _check_perm(perm, n):
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise PreconditionError(f"{list(perm)} is not a permutation of range({n})", "permutation")
    return perm


def _check_scaling_unit(u: AlgElem, shape: AlgebraShape, tol: float):
    if u.shape != shape:
        raise ShapeMismatchError(shape, u.shape, "matrix and scaling element")
    if unitarity_residual(u) > tol:
        raise PreconditionError("scaling element is not unitary", "unitary")
    if central_residual(u) > tol:
        raise PreconditionError("scaling element is not central", "central")


def apply_equivalence(H: NCMatrix, op: EquivalenceOp, tol: float = DEFAULT_TOL) -> NCMatrix:
    """Apply one of the equivalence moves.

    Permutations reorder so that new row ``r`` is old row ``perm[r]``.
    Scalings left-multiply each entry of a row or column by a central
    unitary.
    """
    if isinstance(op, PermuteRows):
        perm = _check_perm(op.perm, H.rows)
        return NCMatrix(tuple(b[list(perm)] for b in H.blocks))
    if isinstance(op, PermuteCols):
        perm = _check_perm(op.perm, H.cols)
        return NCMatrix(tuple(b[:, list(perm)] for b in H.blocks))
    if isinstance(op, (ScaleRow, ScaleCol)):
        _check_scaling_unit(op.unit, H.shape, tol)
        out = []
        for b, u in zip(H.blocks, op.unit.blocks):
            b = b.copy()
            if isinstance(op, ScaleRow):
                b[op.index] = u @ b[op.index]
            else:
                b[:, op.index] = u @ b[:, op.index]
            out.append(b)
        return NCMatrix(tuple(out))
    raise TypeError(f"unknown equivalence operation {op!r}")


def dephase(H: NCMatrix) -> NCMatrix:
    """Normalise the first row and column to 1.

    Only allowed over commutative algebras, where every unitary is central.
    """
    _require_square(H)
    if not is_commutative(H.shape):
        raise PreconditionError(
            f"dephasing needs a commutative algebra, shape is {list(H.shape)}", "commutative"
        )
    out = []
    for b in H.blocks:
        s = b[:, :, 0, 0]
        s = s * s[0].conj()[None, :]
        s = s * s[:, 0].conj()[:, None]
        out.append(s[:, :, None, None])
    return NCMatrix(tuple(out))


# -- constructions ------------------------------------------------------------


def fourier(n: int, shape: AlgebraShape = (1,)) -> NCMatrix:
    """``F_N = (w^{ij})``, ``w = exp(2 pi i / N)``, indices from 0."""
    if n < 1:
        raise ValueError("N must be >= 1")
    ij = np.outer(np.arange(n), np.arange(n)) % n
    return NCMatrix.from_scalars(np.exp(2j * np.pi * ij / n), shape)


def _product(H: NCMatrix, K: NCMatrix, Q: NCMatrix | None) -> NCMatrix:
    n, m = H.rows, K.rows
    out = []
    for x in range(len(H.shape)):
        hk = H.blocks[x][:, None, :, None] @ K.blocks[x][None, :, None, :]
        if Q is not None:
            # L[i,a,j,b] = Q[i,b] H[i,j] K[a,b]
            hk = Q.blocks[x][:, None, None, :] @ hk
        k = hk.shape[-1]
        out.append(hk.reshape(n * m, n * m, k, k))
    return NCMatrix(tuple(out))


def tensor(H: NCMatrix, K: NCMatrix, tol: float = DEFAULT_TOL) -> NCMatrix:
    """``(H x K)_{ia,jb} = H_ij K_ab``; the entries of H and K must commute."""
    _require_square(H, "H")
    _require_square(K, "K")
    if H.shape != K.shape:
        raise ShapeMismatchError(H.shape, K.shape, "H and K")
    res, where = _max_over_fibers(_cross_commutation(h, k) for h, k in zip(H.blocks, K.blocks))
    if res > tol:
        raise HypothesisError("<H_ij> commutes with <K_ab>", res, tol, where)
    return _product(H, K, None)


def dita_deform(
    H: NCMatrix, K: NCMatrix, Q: NCMatrix, tol: float = DEFAULT_TOL, verify: bool = True
) -> NCMatrix:
    """Deformed tensor product ``(H x_Q K)_{ia,jb} = Q_ib H_ij K_ab``.

    ``Q`` is ``N x M`` with unitary entries commuting along its rows and
    columns, and the algebras generated by the entries of ``H``, ``K`` and
    ``Q`` must pairwise commute. Every hypothesis is checked numerically
    and a failure raises :class:`HypothesisError` naming it.
    """
    _require_square(H, "H")
    _require_square(K, "K")
    for name, X in (("K", K), ("Q", Q)):
        if X.shape != H.shape:
            raise ShapeMismatchError(H.shape, X.shape, f"H and {name}")
    if (Q.rows, Q.cols) != (H.rows, K.rows):
        raise PreconditionError(
            f"Q must be {H.rows}x{K.rows}, got {Q.rows}x{Q.cols}", "Q dimensions"
        )

    def fiberwise(fn, *mats):
        return _max_over_fibers(fn(*bs) for bs in zip(*(m.blocks for m in mats)))

    for label, X in (("H", H), ("K", K)):
        rep = verify_hadamard(X, tol)
        if not rep.passed:
            name = max(rep.residuals, key=rep.residuals.get)
            raise HypothesisError(f"{label} is Hadamard ({name})", rep.max_residual, tol, rep.worst[name])
    hypotheses = [
        ("Q has unitary entries", _unitarity, (Q,)),
        ("Q entries commute along rows", _row_commutation, (Q,)),
        ("Q entries commute along columns", _col_commutation, (Q,)),
        ("<H_ij> commutes with <K_ab>", _cross_commutation, (H, K)),
        ("<H_ij> commutes with <Q_ib>", _cross_commutation, (H, Q)),
        ("<K_ab> commutes with <Q_ib>", _cross_commutation, (K, Q)),
    ]
    for name, fn, mats in hypotheses:
        res, where = fiberwise(fn, *mats)
        if res > tol:
            raise HypothesisError(name, res, tol, where)
    L = _product(H, K, Q)
    if verify:
        rep = verify_hadamard(L, 10 * tol)
        if not rep.passed:
            raise HypothesisError("deformed product is Hadamard", rep.max_residual, 10 * tol)
    return L


class Relatives(NamedTuple):
    conjugate: NCMatrix
    transpose: NCMatrix
    adjoint: NCMatrix


def relatives(H: NCMatrix) -> Relatives:
    """``(H-bar, H^t, H^*)``: entrywise adjoint, grid transpose and both."""
    bar = H.entrywise_adjoint()
    return Relatives(bar, H.grid_transpose(), bar.grid_transpose())


def deformed_fourier4(x: AlgElem, y: AlgElem, z: AlgElem, t: AlgElem, tol: float = DEFAULT_TOL) -> NCMatrix:
    """The 4x4 family ``F_2 x_Q F_2`` with ``Q = [[x, y], [z, t]]``.

    Needs ``[x,y] = [x,z] = [y,t] = [z,t] = 0``; ``x`` and ``t`` may fail
    to commute, which makes the result non-classical.
    """
    shape = x.shape
    Q = NCMatrix.from_entries([[x, y], [z, t]])
    F2 = fourier(2, shape)
    return dita_deform(F2, F2, Q, tol)
