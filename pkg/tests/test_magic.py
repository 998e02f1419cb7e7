import numpy as np
import pytest

from nchadamard.algebra import AlgElem
from nchadamard.corpus import deformed_fourier4_instance, noncommuting_pair
from nchadamard.errors import VerificationError
from nchadamard.hadamard import NCMatrix, deformed_fourier4, fourier
from nchadamard.magic import (
    MagicUnitary,
    build_magic,
    column_sum_residuals,
    scalar_projection_residual,
    verify_magic,
)


def test_f2_magic_unitary():
    P = build_magic(fourier(2))
    plus = 0.5 * np.array([[1, 1], [1, 1]])
    minus = 0.5 * np.array([[1, -1], [-1, 1]])
    np.testing.assert_allclose(P.entry(0, 0)[0], plus, atol=1e-15)
    np.testing.assert_allclose(P.entry(1, 1)[0], plus, atol=1e-15)
    np.testing.assert_allclose(P.entry(0, 1)[0], minus, atol=1e-15)
    np.testing.assert_allclose(P.entry(1, 0)[0], minus, atol=1e-15)


@pytest.mark.parametrize("n", range(2, 7))
def test_scalar_projection_equality(n):
    H = fourier(n)
    assert scalar_projection_residual(H, build_magic(H)) <= 1e-10


def test_scalar_projection_equality_on_commutative_corpus(corpus):
    for name, H in corpus:
        if all(k == 1 for k in H.shape):
            assert scalar_projection_residual(H, build_magic(H)) <= 1e-10, name


def test_sigma_deformed_magic():
    x, t = noncommuting_pair()
    one = AlgElem.identity((2,))
    assert verify_magic(build_magic(deformed_fourier4(x, one, one, t)), 1e-10).passed


def test_f3_and_deformed_magic():
    assert verify_magic(build_magic(fourier(3))).passed
    for seed in range(3):
        assert verify_magic(build_magic(deformed_fourier4_instance(seed))).passed


def test_corpus_magic(corpus):
    for name, H in corpus:
        rep = verify_magic(build_magic(H), 1e-9)
        assert rep.passed, (name, rep.residuals)


def test_zeroed_entry_fails_row_sums():
    P = build_magic(fourier(3))
    blocks = [b.copy() for b in P.blocks]
    blocks[0][1, 2] = 0
    rep = verify_magic(P.with_blocks(blocks))
    assert not rep.passed
    assert rep.residual_row_sums == pytest.approx(1.0, abs=1e-12)


def test_build_magic_rejects_non_hadamard():
    B = fourier(3).blocks[0].copy()
    B[0, 0] = 2
    with pytest.raises(VerificationError) as err:
        build_magic(NCMatrix((B,)))
    assert err.value.report is not None and not err.value.report.passed


def test_magic_layout():
    P = build_magic(deformed_fourier4_instance(0, (1, 2)))
    assert isinstance(P, MagicUnitary)
    assert P.n == 4 and P.shape == (1, 2)
    assert [b.shape for b in P.blocks] == [(4, 4, 4, 4), (4, 4, 8, 8)]


def _perturbed(eps):
    x, t = noncommuting_pair()
    one = AlgElem.identity((2,))
    H = deformed_fourier4(x, one, one, t)
    B = H.blocks[0].copy()
    rot = np.cos(eps) * np.eye(2) + 1j * np.sin(eps) * np.diag([1.0, -1.0])  # exp(i eps sigma_z)
    B[0, 0] = B[0, 0] @ rot
    return NCMatrix((B,))


def test_column_sum_residual_grows_with_column_commutation_defect():
    from nchadamard.algebra import commutator_residual

    res = {}
    for eps in (0.0, 1e-3, 1e-2):
        H = _perturbed(eps)
        defect = commutator_residual(H[0, 0], H[1, 0])
        assert defect == pytest.approx(2 * np.sin(eps), rel=1e-6, abs=1e-15)
        res[eps] = column_sum_residuals(build_magic(H, check=False))[0]
    assert res[0.0] <= 1e-12
    assert res[0.0] < res[1e-3] < res[1e-2]
