"""Seeded families of Hadamard matrices used by the test and acceptance suites."""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraShape, AlgElem, haar_unitary, random_unitary
from .hadamard import (
    NCMatrix,
    PermuteCols,
    PermuteRows,
    ScaleCol,
    ScaleRow,
    apply_equivalence,
    deformed_fourier4,
    dita_deform,
    fourier,
    tensor,
)

GENERIC_PHASES_2x2 = np.array([[0.0, 0.0], [0.0, 1.234]])
GENERIC_PHASES_2x3 = np.array([[0.0, 0.41, -1.3], [0.0, 2.2, 0.77]])


def noncommuting_pair(shape: AlgebraShape = (2,)):
    """``x = sigma_x``, ``t = sigma_z`` on every fiber of size 2; ``||[x, t]|| = 2``."""
    x = AlgElem(tuple(np.array([[0, 1], [1, 0]]) for _ in shape))
    t = AlgElem(tuple(np.diag([1, -1]) for _ in shape))
    return x, t


def deformed_fourier4_instance(seed: int, shape: AlgebraShape = (2,)) -> NCMatrix:
    """``F_2 x_Q F_2`` with ``Q = [[x, 1], [1, t]]``, ``x, t`` Haar random."""
    rng = np.random.SeedSequence(seed).spawn(2)
    x = random_unitary(shape, int(rng[0].generate_state(1)[0]))
    t = random_unitary(shape, int(rng[1].generate_state(1)[0]))
    one = AlgElem.identity(shape)
    return deformed_fourier4(x, one, one, t)


def scalar_q(phases, shape: AlgebraShape = (1,)) -> NCMatrix:
    return NCMatrix.from_scalars(np.exp(1j * np.asarray(phases)), shape)


def random_central_unitary(shape: AlgebraShape, rng: np.random.Generator) -> AlgElem:
    return AlgElem.from_fiber_scalars(np.exp(2j * np.pi * rng.random(len(shape))), shape)


def scramble(H: NCMatrix, seed: int, moves: int = 6) -> NCMatrix:
    """Apply a seeded random sequence of legal equivalence moves."""
    rng = np.random.default_rng(seed)
    for _ in range(moves):
        kind = rng.integers(4)
        if kind == 0:
            H = apply_equivalence(H, PermuteRows(tuple(rng.permutation(H.rows))))
        elif kind == 1:
            H = apply_equivalence(H, PermuteCols(tuple(rng.permutation(H.cols))))
        elif kind == 2:
            H = apply_equivalence(H, ScaleRow(int(rng.integers(H.rows)), random_central_unitary(H.shape, rng)))
        else:
            H = apply_equivalence(H, ScaleCol(int(rng.integers(H.cols)), random_central_unitary(H.shape, rng)))
    return H


def rotated_direct_sum(scalar_mats, seed: int) -> NCMatrix:
    """Classical matrix over ``M_K``: ``V diag(h^1_ij, ..., h^K_ij) V^*`` with ``V`` Haar."""
    mats = [np.asarray(m, dtype=np.complex128) for m in scalar_mats]
    k = len(mats)
    V = haar_unitary(k, np.random.default_rng(seed))
    diag = np.zeros(mats[0].shape + (k, k), dtype=np.complex128)
    for e, m in enumerate(mats):
        diag[:, :, e, e] = m
    return NCMatrix((V @ diag @ V.conj().T,))


def _scalar_hadamard(n: int, rng: np.random.Generator) -> np.ndarray:
    f = fourier(n).blocks[0][:, :, 0, 0]
    dr = np.exp(2j * np.pi * rng.random(n))
    dc = np.exp(2j * np.pi * rng.random(n))
    return dr[:, None] * f[rng.permutation(n)][:, rng.permutation(n)] * dc[None, :]


def classical_2x2(seed: int, k: int = 2) -> NCMatrix:
    """Seeded classical 2x2 Hadamard matrix over ``M_k`` with non-central entries."""
    rng = np.random.default_rng(seed)
    return rotated_direct_sum([_scalar_hadamard(2, rng) for _ in range(k)], int(rng.integers(2**31)))


def commuting_pair_2x2(seed: int, k: int = 2) -> NCMatrix:
    """``[[u1, u2], [u1, -u2]]`` with commuting non-scalar unitaries ``u1, u2``."""
    rng = np.random.default_rng(seed)
    V = haar_unitary(k, rng)
    u1 = V @ np.diag(np.exp(2j * np.pi * rng.random(k))) @ V.conj().T
    u2 = V @ np.diag(np.exp(2j * np.pi * rng.random(k))) @ V.conj().T
    return NCMatrix((np.array([[u1, u2], [u1, -u2]]),))


def hadamard_corpus() -> list[tuple[str, NCMatrix]]:
    """Named Hadamard matrices covering every construction in the package."""
    out: list[tuple[str, NCMatrix]] = []
    for n in range(2, 9):
        out.append((f"F{n}", fourier(n)))
    for shape in [(2,), (1, 1, 1), (1, 2)]:
        for n in (2, 3, 4):
            out.append((f"F{n}{list(shape)}", fourier(n, shape)))
    x, t = noncommuting_pair()
    one = AlgElem.identity((2,))
    out.append(("F2xQF2[sigma]", deformed_fourier4(x, one, one, t)))
    for s in range(3):
        out.append((f"F2xQF2[haar{s}]", deformed_fourier4_instance(s)))
    out.append(("F2xQF2[scalar]", dita_deform(fourier(2), fourier(2), scalar_q(GENERIC_PHASES_2x2))))
    out.append(("F2xQF3[scalar]", dita_deform(fourier(2), fourier(3), scalar_q(GENERIC_PHASES_2x3))))
    out.append(("F3xQF2[scalar]", dita_deform(fourier(3), fourier(2), scalar_q(GENERIC_PHASES_2x3.T))))
    out.append(("F2xF3", tensor(fourier(2), fourier(3))))
    for s in range(2):
        out.append((f"classical2x2[{s}]", classical_2x2(s)))
        out.append((f"rotated4[{s}]", rotated_direct_sum([_scalar_hadamard(4, np.random.default_rng(100 + s)),
                                                           _scalar_hadamard(4, np.random.default_rng(200 + s))], s)))
        out.append((f"F3scrambled[{s}]", scramble(fourier(3, (1, 2)), s)))
    return out
