"""Moments of the main character of the quantum permutation group of ``H``.

With ``phi = tr o pi`` the trace state pulled back along the representation
defined by the magic unitary, the convolution powers evaluate on ``chi^k``
as ``phi^{*n}(chi^k) = Tr(M_k^n)``, where

    M_k[(i_1..i_k), (j_1..j_k)] = tr(P_{i_1 j_1} ... P_{i_k j_k}).

The Cesaro limit of ``Tr(M_k^n)`` is the number of eigenvalues of ``M_k``
equal to 1, which is what :func:`estimate_moments` reports. These are the
moments of the idempotent state obtained as the Cesaro limit; for Fourier
matrices they agree with the Haar moments of ``Z_N``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError
from .magic import MagicUnitary

DEFAULT_CAP = 4096
DEFAULT_EIG_TOL = 1e-6
CESARO_TERMS = 200
RADIUS_SLACK = 1e-8
IMAG_TOL = 1e-8
# largest possible |lambda - 1| inside the closed unit disk; reported as the
# gap when no eigenvalue is rejected
MAX_GAP = 2.0
MOMENT_KIND = "idempotent-state moments"


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    k: int
    n: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_moment_matrix(P: MagicUnitary, k: int, cap: int = DEFAULT_CAP) -> MomentMatrix:
    """Transfer matrix ``M_k`` of normalised traces of ``k``-fold products.

    The trace on ``M_N(A)`` is ``(1/N) sum_a tr_A(diagonal block a)``, i.e.
    the uniform average over fibers of ``Tr / (N K_x)``. Rows and columns
    are flattened with ``i_1`` most significant.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = P.n
    size = n**k
    if size > cap:
        raise CapExceededError(size, cap)
    total = np.zeros((size, size), dtype=np.complex128)
    for p in P.blocks:
        d = p.shape[-1]
        if k == 1:
            tr = np.trace(p, axis1=-2, axis2=-1)
        else:
            w = p
            for _ in range(k - 2):
                rows = w.shape[0]
                w = np.einsum("IJab,ijbc->IiJjac", w, p).reshape(rows * n, rows * n, d, d)
            rows = w.shape[0]
            tr = np.einsum("IJab,ijba->IiJj", w, p).reshape(rows * n, rows * n)
        total += tr / d
    return MomentMatrix(k=k, n=n, matrix=total / len(P.blocks))


def _power_sum(M: np.ndarray, n: int):
    """``(sum_{m=1}^n M^m, M^n)`` by binary splitting."""
    if n == 1:
        return M.copy(), M.copy()
    if n % 2 == 0:
        s, p = _power_sum(M, n // 2)
        return s + p @ s, p @ p
    s, p = _power_sum(M, n - 1)
    p = p @ M
    return s + p, p


def cesaro_trace_complex(M: MomentMatrix | np.ndarray, n: int = CESARO_TERMS) -> complex:
    if n < 1:
        raise ValueError("n must be >= 1")
    mat = M.matrix if isinstance(M, MomentMatrix) else np.asarray(M, dtype=np.complex128)
    s, _ = _power_sum(mat, n)
    return complex(np.trace(s) / n)


def cesaro_trace(M: MomentMatrix | np.ndarray, n: int = CESARO_TERMS) -> float:
    """Real part of ``(1/n) sum_{m=1}^n Tr(M^m)``.

    Uses matrix powers only, so it cross-checks the eigenvalue count.
    """
    val = cesaro_trace_complex(M, n)
    if abs(val.imag) > IMAG_TOL:
        warnings.warn(f"Cesaro mean has imaginary part {val.imag:.3e}", RuntimeWarning, stacklevel=2)
    return val.real


@dataclass(frozen=True)
class DegreeMoment:
    k: int
    moment: int
    multiplicity: int
    gap: float
    cesaro200: float
    eig_tol: float
    spectral_radius: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "moment": self.moment,
            "gap": self.gap,
            "cesaro200": self.cesaro200,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class MomentReport:
    n: int
    eig_tol: float
    degrees: tuple[DegreeMoment, ...] = field(default_factory=tuple)
    kind: str = MOMENT_KIND

    @property
    def moments(self) -> list[int]:
        return [d.moment for d in self.degrees]

    @property
    def flagged(self) -> bool:
        return any(d.flags for d in self.degrees)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "N": self.n,
            "eig_tol": self.eig_tol,
            "moments": self.moments,
            "degrees": [d.to_dict() for d in self.degrees],
        }


def analyse_moment_matrix(M: MomentMatrix, eig_tol: float = DEFAULT_EIG_TOL) -> DegreeMoment:
    if eig_tol <= 0:
        raise ValueError("eig_tol must be positive")
    eig = np.linalg.eigvals(M.matrix)
    dist = np.abs(eig - 1.0)
    accepted = dist <= eig_tol
    mult = int(accepted.sum())
    gap = float(dist[~accepted].min()) if (~accepted).any() else MAX_GAP
    radius = float(np.abs(eig).max())
    flags = []
    if radius > 1.0 + RADIUS_SLACK:
        flags.append("spectral-radius-exceeds-1")
    if gap < 10 * eig_tol:
        flags.append("ill-separated-spectrum")
    ces = cesaro_trace_complex(M, CESARO_TERMS)
    if abs(ces.imag) > IMAG_TOL:
        flags.append("complex-trace")
    return DegreeMoment(
        k=M.k,
        moment=mult,
        multiplicity=mult,
        gap=gap,
        cesaro200=ces.real,
        eig_tol=eig_tol,
        spectral_radius=radius,
        flags=tuple(flags),
    )


def estimate_moments(
    P: MagicUnitary, kmax: int, eig_tol: float = DEFAULT_EIG_TOL, cap: int = DEFAULT_CAP
) -> MomentReport:
    """Moments ``c_1..c_kmax`` as eigenvalue-1 multiplicities of ``M_k``.

    A degree is flagged (never silently rounded) when the spectrum leaves
    the unit disk or when the nearest rejected eigenvalue lies within
    ``10 * eig_tol`` of 1.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if P.n**kmax > cap:
        raise CapExceededError(P.n**kmax, cap)
    degrees = tuple(
        analyse_moment_matrix(build_moment_matrix(P, k, cap), eig_tol) for k in range(1, kmax + 1)
    )
    return MomentReport(n=P.n, eig_tol=eig_tol, degrees=degrees)
