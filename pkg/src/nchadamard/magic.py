"""The magic unitary ``P = (P_ij)`` attached to a Hadamard matrix.

Each ``P_ij`` lives in ``M_d(A)``; per fiber it is stored as a
``(d*K) x (d*K)`` operator with the outer index major, so a whole magic
matrix is one array of shape ``(n, n, d*K, d*K)`` per fiber.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraShape, is_commutative, opnorm
from .errors import PreconditionError, VerificationError
from .hadamard import NCMatrix, verify_hadamard


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class MagicUnitary:
    """An ``n x n`` grid of elements of ``M_d(A)``."""

    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        if len(blocks) != len(self.shape):
            raise ValueError("need one block array per fiber")
        n = blocks[0].shape[0]
        d = blocks[0].shape[2] // self.shape[0]
        for b, k in zip(blocks, self.shape):
            if b.ndim != 4 or b.shape != (n, n, d * k, d * k):
                raise ValueError(f"bad magic block array of shape {b.shape} for fiber dimension {k}")
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def inner(self) -> int:
        """``d``, the matrix size of each entry ``P_ij in M_d(A)``."""
        return self.blocks[0].shape[2] // self.shape[0]

    def entry(self, i: int, j: int) -> tuple[np.ndarray, ...]:
        return tuple(b[i, j] for b in self.blocks)

    def with_blocks(self, blocks) -> "MagicUnitary":
        return MagicUnitary(self.shape, tuple(blocks))


def magic_blocks(B: np.ndarray) -> np.ndarray:
    """``(P_ij)_ab = H_ia H_ja^* H_jb H_ib^* / N`` for one fiber block array."""
    n, k = B.shape[0], B.shape[-1]
    # X[i, j, a] = H_ia H_ja^*
    X = np.einsum("iaxy,jazy->ijaxz", B, B.conj())
    Xt = X.transpose(1, 0, 2, 3, 4)
    P = (X[:, :, :, None] @ Xt[:, :, None, :]) / n
    return P.transpose(0, 1, 2, 4, 3, 5).reshape(n, n, n * k, n * k)


def build_magic(H: NCMatrix, tol: float = DEFAULT_TOL, check: bool = True) -> MagicUnitary:
    """Magic unitary of a Hadamard matrix.

    With ``check`` (the default) ``H`` is verified first and a failing
    matrix raises :class:`VerificationError` carrying the report. Passing
    ``check=False`` evaluates the formula on any square matrix, which is
    useful for perturbation studies.
    """
    if not H.is_square:
        raise PreconditionError("H must be square", "square")
    if check:
        rep = verify_hadamard(H, tol)
        if not rep.passed:
            raise VerificationError("input is not Hadamard", rep)
    return MagicUnitary(H.shape, tuple(magic_blocks(B) for B in H.blocks))


@dataclass(frozen=True)
class MagicReport:
    residual_self_adjoint: float
    residual_idempotent: float
    residual_row_sums: float
    residual_col_sums: float
    tol: float

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "self_adjoint": self.residual_self_adjoint,
            "idempotent": self.residual_idempotent,
            "row_sums": self.residual_row_sums,
            "col_sums": self.residual_col_sums,
        }

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "residuals": self.residuals}


def _magic_residuals(p: np.ndarray):
    eye = np.eye(p.shape[-1])
    adj = p.conj().swapaxes(-1, -2)
    sa = opnorm(p - adj).max()
    idem = opnorm(p @ p - p).max()
    rows = opnorm(p.sum(axis=1) - eye).max()
    cols = opnorm(p.sum(axis=0) - eye).max()
    return float(sa), float(idem), float(rows), float(cols)


def verify_magic(P: MagicUnitary, tol: float = DEFAULT_TOL) -> MagicReport:
    """Projection, row-sum and column-sum residuals (operator norms in ``M_d(A)``)."""
    res = np.max([_magic_residuals(p) for p in P.blocks], axis=0)
    return MagicReport(*(float(r) for r in res), tol=tol)


def row_quotient_projection(H: NCMatrix, i: int, j: int) -> np.ndarray:
    """Projection onto ``xi = H_i / H_j`` for a matrix over a commutative algebra.

    Returns one ``N x N`` complex matrix per fiber, stacked on axis 0.
    """
    if not is_commutative(H.shape):
        raise PreconditionError("row quotients need scalar entries", "commutative")
    out = []
    for B in H.blocks:
        s = B[:, :, 0, 0]
        xi = s[i] / s[j]
        out.append(np.outer(xi, xi.conj()) / np.vdot(xi, xi).real)
    return np.array(out)


def scalar_projection_residual(H: NCMatrix, P: MagicUnitary) -> float:
    """Worst ``||P_ij - Proj(H_i/H_j)||`` over ``i, j`` and fibers."""
    n = H.rows
    res = 0.0
    for i in range(n):
        for j in range(n):
            proj = row_quotient_projection(H, i, j)
            for x, p in enumerate(P.entry(i, j)):
                res = max(res, float(opnorm(p - proj[x])))
    return res


def column_sum_residuals(P: MagicUnitary) -> np.ndarray:
    """``||sum_i P_ij - 1||`` for each column ``j`` (max over fibers)."""
    out = []
    for p in P.blocks:
        out.append(opnorm(p.sum(axis=0) - np.eye(p.shape[-1])))
    return np.max(out, axis=0)


__all__ = [
    "MagicUnitary",
    "MagicReport",
    "build_magic",
    "verify_magic",
    "row_quotient_projection",
    "scalar_projection_residual",
    "column_sum_residuals",
    "magic_blocks",
]
