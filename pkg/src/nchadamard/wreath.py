"""Magic unitaries of deformed tensor products and their wreath factorization.

For ``L = H x_Q K`` (``H`` of size N, ``K`` of size M) the magic unitary
``P = (P_{ia,jb})`` splits as ``P_{ia,jb} = U^{(i)}_{ab} V_ij`` with

    U^{(i)}_{ab} = sum_j P_{ia,jb},     V_ij = sum_a P_{ia,jb},

where ``V_ij = R_ij (x) 1`` does not depend on ``b`` and each ``U^{(i)}``
is itself magic. This module checks those identities numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, opnorm
from .errors import PreconditionError, ShapeMismatchError
from .hadamard import NCMatrix, dita_deform
from .magic import MagicUnitary, build_magic, verify_magic


def product_formula_blocks(H: NCMatrix, K: NCMatrix, Q: NCMatrix) -> tuple[np.ndarray, ...]:
    """``R_ij (x) (Q_ic Q_jc^* Q_jd Q_id^* K_ac K_bc^* K_bd K_ad^*)_{cd} / M`` per fiber.

    The result has the layout of ``build_magic(H x_Q K).blocks``.
    """
    n, m = H.rows, K.rows
    R = build_magic(H, check=False)
    out = []
    for Rb, Qb, Kb in zip(R.blocks, Q.blocks, K.blocks):
        k = Kb.shape[-1]
        qq = np.einsum("icxy,jczy->ijcxz", Qb, Qb.conj())  # Q_ic Q_jc^*
        kk = np.einsum("acxy,bczy->abcxz", Kb, Kb.conj())  # K_ac K_bc^*
        # X[i,j,a,b,c,d] = qq[i,j,c] qq[j,i,d] kk[a,b,c] kk[b,a,d]
        q4 = qq[:, :, :, None] @ qq.transpose(1, 0, 2, 3, 4)[:, :, None, :]
        k4 = kk[:, :, :, None] @ kk.transpose(1, 0, 2, 3, 4)[:, :, None, :]
        X = (q4[:, :, None, None] @ k4[None, None]) / m
        R6 = Rb.reshape(n, n, n, k, n, k)
        full = np.einsum("ijkxly,ijabcdyz->iajbkcxldz", R6, X)
        d = n * m * k
        out.append(full.reshape(n * m, n * m, d, d))
    return tuple(out)


def verify_product_formula(H: NCMatrix, K: NCMatrix, Q: NCMatrix, tol: float = DEFAULT_TOL) -> float:
    """Largest operator-norm gap between the magic unitary of ``H x_Q K`` and
    the closed-form tensor expression built from the magic unitary of ``H``.

    Raises :class:`~nchadamard.errors.HypothesisError` when ``(H, K, Q)``
    does not satisfy the deformation hypotheses.
    """
    L = dita_deform(H, K, Q, tol)
    P = build_magic(L, check=False)
    formula = product_formula_blocks(H, K, Q)
    return float(max(opnorm(p - f).max() for p, f in zip(P.blocks, formula)))


@dataclass(frozen=True, eq=False)
class WreathComponents:
    n: int
    m: int
    V_all: tuple[np.ndarray, ...]  # per fiber (N, N, M, D, D): V_ij computed at each b
    U: tuple[np.ndarray, ...]  # per fiber (N, M, M, D, D): U^{(i)}_{ab}
    b_independence_residual: float
    r_residual: float | None = None

    @property
    def V(self) -> tuple[np.ndarray, ...]:
        """``V_ij`` taken at ``b = 0``."""
        return tuple(v[:, :, 0] for v in self.V_all)


def compute_components(P: MagicUnitary, n: int, m: int, R: MagicUnitary | None = None) -> WreathComponents:
    """Split the magic unitary of a size ``n*m`` product matrix.

    ``V_ij`` is computed at every ``b`` and the worst pairwise deviation is
    reported. When ``R`` (the magic unitary of the first factor) is given,
    ``V_ij`` is also compared with ``R_ij (x) 1``.
    """
    if n < 1 or m < 1 or P.n != n * m:
        raise PreconditionError(
            f"magic unitary of size {P.n} does not carry the product index convention for N={n}, M={m}",
            "index convention",
        )
    if R is not None and (R.n != n or R.shape != P.shape):
        raise ShapeMismatchError((R.n, *R.shape), (n, *P.shape), "R and the first factor")
    V_all, U = [], []
    b_res = 0.0
    r_res = 0.0 if R is not None else None
    for x, p in enumerate(P.blocks):
        D = p.shape[-1]
        p6 = p.reshape(n, m, n, m, D, D)
        v = p6.sum(axis=1)  # (i, j, b)
        u = p6.sum(axis=2)  # (i, a, b)
        if m > 1:
            diff = v[:, :, :, None] - v[:, :, None, :]
            b_res = max(b_res, float(opnorm(diff).max()))
        if R is not None:
            k = P.shape[x]
            R6 = R.blocks[x].reshape(n, n, n, k, n, k)
            r1 = np.einsum("ijkxly,cd->ijkcxldy", R6, np.eye(m)).reshape(n, n, D, D)
            r_res = max(r_res, float(opnorm(v - r1[:, :, None]).max()))
        V_all.append(v)
        U.append(u)
    return WreathComponents(n, m, tuple(V_all), tuple(U), b_res, r_res)


@dataclass(frozen=True)
class FactorizationReport:
    b_independence: float
    v_equals_r_tensor_one: float | None
    u_magic: float
    uv_equals_p: float
    vu_equals_p: float
    tol: float

    @property
    def residuals(self) -> dict[str, float]:
        out = {
            "b_independence": self.b_independence,
            "u_magic": self.u_magic,
            "uv_equals_p": self.uv_equals_p,
            "vu_equals_p": self.vu_equals_p,
        }
        if self.v_equals_r_tensor_one is not None:
            out["v_equals_r_tensor_one"] = self.v_equals_r_tensor_one
        return out

    @property
    def passed(self) -> bool:
        return max(self.residuals.values()) <= self.tol

    def to_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "residuals": self.residuals}


def verify_factorization(C: WreathComponents, P: MagicUnitary, tol: float = DEFAULT_TOL) -> FactorizationReport:
    """Check that every ``U^{(i)}`` is magic and ``U^{(i)}_ab V_ij = V_ij U^{(i)}_ab = P_{ia,jb}``."""
    n, m = C.n, C.m
    if P.n != n * m:
        raise PreconditionError("components do not match the magic unitary", "index convention")
    u_magic = max(
        verify_magic(MagicUnitary(P.shape, tuple(u[i] for u in C.U)), tol).max_residual for i in range(n)
    )
    uv = vu = 0.0
    for p, u, v in zip(P.blocks, C.U, C.V):
        D = p.shape[-1]
        p6 = p.reshape(n, m, n, m, D, D)
        # U[i,a,b] against V[i,j]: broadcast to (i, a, j, b)
        uu = u[:, :, None, :]
        vv = v[:, None, :, None]
        uv = max(uv, float(opnorm(uu @ vv - p6).max()))
        vu = max(vu, float(opnorm(vv @ uu - p6).max()))
    return FactorizationReport(
        b_independence=C.b_independence_residual,
        v_equals_r_tensor_one=C.r_residual,
        u_magic=u_magic,
        uv_equals_p=uv,
        vu_equals_p=vu,
        tol=tol,
    )


@dataclass(frozen=True)
class WreathReport:
    product_formula: float
    factorization: FactorizationReport
    tol: float

    @property
    def passed(self) -> bool:
        return self.product_formula <= self.tol and self.factorization.passed

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "product_formula_residual": self.product_formula,
            "factorization": self.factorization.to_dict(),
        }


def wreath_check(H: NCMatrix, K: NCMatrix, Q: NCMatrix, tol: float = DEFAULT_TOL) -> WreathReport:
    """Run the product formula and the factorization checks for ``H x_Q K``."""
    formula = verify_product_formula(H, K, Q, tol)
    L = dita_deform(H, K, Q, tol)
    P = build_magic(L, check=False)
    R = build_magic(H, check=False)
    C = compute_components(P, H.rows, K.rows, R)
    return WreathReport(formula, verify_factorization(C, P, tol), tol)
