import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nchadamard.algebra import AlgElem, random_unitary
from nchadamard.corpus import GENERIC_PHASES_2x2, deformed_fourier4_instance, noncommuting_pair, scalar_q, scramble
from nchadamard.errors import HypothesisError, PreconditionError
from nchadamard.hadamard import (
    NCMatrix,
    PermuteCols,
    PermuteRows,
    ScaleCol,
    ScaleRow,
    apply_equivalence,
    deformed_fourier4,
    dephase,
    dita_deform,
    fourier,
    is_biunitary,
    is_classical,
    relatives,
    tensor,
    verify_hadamard,
)

W3 = np.exp(2j * np.pi / 3)


def sigma_deformed(shape=(2,)):
    x, t = noncommuting_pair(shape)
    one = AlgElem.identity(shape)
    return deformed_fourier4(x, one, one, t)


def small_shapes():
    # every shape with total dimension at most 6
    out = []
    for m in range(1, 7):
        for parts in itertools.product(range(1, 7), repeat=m):
            if sum(parts) <= 6 and list(parts) == sorted(parts):
                out.append(parts)
    return out


@pytest.mark.parametrize("shape", small_shapes(), ids=str)
def test_fourier_passes_everywhere(shape):
    for n in range(1, 9):
        assert verify_hadamard(fourier(n, shape), 1e-12).passed


def test_fourier_entries():
    assert fourier(2).distance(NCMatrix.from_scalars([[1, 1], [1, -1]])) <= 1e-15
    assert fourier(3)[2, 2].blocks[0][0, 0] == pytest.approx(W3)
    assert verify_hadamard(fourier(4, (2,))).passed
    with pytest.raises(ValueError):
        fourier(0)


def test_verify_f4_residuals():
    rep = verify_hadamard(fourier(4), 1e-12)
    assert rep.passed
    assert max(rep.residuals.values()) <= 1e-12


def test_verify_sigma_deformed_instance():
    H = sigma_deformed()
    assert verify_hadamard(H).passed
    assert H.rows == 4 and H.shape == (2,)


def test_verify_detects_zero_entry():
    B = fourier(2).blocks[0].copy()
    B[0, 0] = 0
    rep = verify_hadamard(NCMatrix((B,)))
    assert not rep.passed
    assert rep.residual_unitarity == pytest.approx(1.0)
    assert rep.worst["unitarity"] == (0, 0)


def test_verify_needs_square():
    with pytest.raises(PreconditionError):
        verify_hadamard(NCMatrix.from_scalars(np.ones((2, 3))))


def test_report_passes_iff_all_residuals_below_tol():
    B = fourier(3).blocks[0] * np.exp(1j * 1e-6 * np.outer([0, 1, 5], [0, 2, 3]).reshape(3, 3, 1, 1))
    H = NCMatrix((B,))
    rep = verify_hadamard(H, 1e-9)
    assert rep.passed == (max(rep.residuals.values()) <= 1e-9)
    assert not rep.passed
    assert verify_hadamard(H, 1e-4).passed


def test_biunitary_examples():
    assert is_biunitary(fourier(3)).passed
    assert is_biunitary(sigma_deformed()).passed
    assert not is_biunitary(NCMatrix.from_scalars(np.eye(3))).passed


@pytest.mark.parametrize("eps", [0.0, 1e-3, 1e-1])
def test_biunitary_agrees_with_verify(eps, corpus):
    # phase perturbation keeps unitarity and (for scalar matrices) commutation
    rng = np.random.default_rng(5)
    for name, H in corpus:
        if not all(k == 1 for k in H.shape):
            continue
        phases = np.exp(1j * eps * rng.standard_normal((H.rows, H.cols, 1, 1)))
        P = NCMatrix(tuple(b * phases for b in H.blocks))
        assert verify_hadamard(P).passed == is_biunitary(P).passed, name


def test_biunitary_agrees_with_verify_on_corpus(corpus):
    for name, H in corpus:
        assert is_biunitary(H).passed, name


def test_classical_examples():
    assert is_classical(fourier(5)).passed
    ok, res = is_classical(sigma_deformed())
    assert not ok and res == pytest.approx(2.0)
    assert is_classical(deformed_fourier4_instance(0, (1, 1, 1))).passed


def test_permutation_involution():
    H = fourier(2)
    swap = PermuteRows((1, 0))
    assert apply_equivalence(apply_equivalence(H, swap), swap) == H


def test_scale_row_by_minus_one():
    H = apply_equivalence(fourier(2), ScaleRow(1, AlgElem.scalar((1,), -1)))
    assert verify_hadamard(H).passed


def test_scaling_rejects_noncentral_and_nonunitary():
    H = fourier(2, (2,))
    with pytest.raises(PreconditionError) as err:
        apply_equivalence(H, ScaleRow(0, AlgElem((np.diag([1.0, -1.0]),))))
    assert err.value.precondition == "central"
    with pytest.raises(PreconditionError) as err:
        apply_equivalence(H, ScaleCol(0, AlgElem.scalar((2,), 2.0)))
    assert err.value.precondition == "unitary"


def test_permutation_must_be_valid():
    with pytest.raises(PreconditionError):
        apply_equivalence(fourier(3), PermuteCols((0, 0, 1)))


def test_equivalence_preserves_non_hadamard_status():
    B = fourier(3).blocks[0].copy()
    B[1, 1] *= np.exp(0.3j)
    H = NCMatrix((B,))
    assert not verify_hadamard(H).passed
    assert not verify_hadamard(scramble(H, 3)).passed


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_equivalence_sequences_preserve_hadamard(seed):
    H = deformed_fourier4_instance(seed % 7, (1, 2))
    assert verify_hadamard(scramble(H, seed, moves=10), 1e-8).passed


def test_dephase_examples():
    assert dephase(fourier(5)).distance(fourier(5)) <= 1e-12
    H = apply_equivalence(fourier(2), ScaleRow(0, AlgElem.scalar((1,), 1j)))
    H = apply_equivalence(H, ScaleRow(1, AlgElem.scalar((1,), 1j)))
    assert dephase(H).distance(fourier(2)) <= 1e-15
    with pytest.raises(PreconditionError):
        dephase(sigma_deformed())


def test_dephase_normalises_first_row_and_column():
    H = scramble(fourier(4, (1, 1)), 9)
    D = dephase(H)
    assert verify_hadamard(D).passed
    for b in D.blocks:
        np.testing.assert_allclose(b[0, :, 0, 0], 1, atol=1e-14)
        np.testing.assert_allclose(b[:, 0, 0, 0], 1, atol=1e-14)


def test_tensor_f2_f2():
    expected = NCMatrix.from_scalars([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]])
    assert tensor(fourier(2), fourier(2)).distance(expected) <= 1e-15
    assert verify_hadamard(tensor(fourier(2), fourier(3))).passed


def test_tensor_rejects_noncommuting_factors():
    x, t = noncommuting_pair()
    H = NCMatrix.from_entries([[x, x], [x, -x]])
    K = NCMatrix.from_entries([[t, t], [t, -t]])
    assert verify_hadamard(H).passed and verify_hadamard(K).passed
    with pytest.raises(HypothesisError) as err:
        tensor(H, K)
    assert err.value.hypothesis == "<H_ij> commutes with <K_ab>"
    assert err.value.residual == pytest.approx(2.0)


def test_dita_identity_q_is_tensor():
    for H, K in [(fourier(2), fourier(3)), (fourier(3, (1, 2)), fourier(2, (1, 2)))]:
        Q = NCMatrix.from_scalars(np.ones((H.rows, K.rows)), H.shape)
        assert dita_deform(H, K, Q) == tensor(H, K)


def test_dita_reproduces_sigma_deformed_matrix():
    x, t = noncommuting_pair()
    one = AlgElem.identity((2,))
    L = deformed_fourier4(x, one, one, t)
    y = z = one
    expected = NCMatrix.from_entries([
        [x, y, x, y],
        [x, -y, x, -y],
        [z, t, -z, -t],
        [z, -t, -z, t],
    ])
    assert L.distance(expected) <= 1e-15


def test_dita_scalar_generic_q():
    L = dita_deform(fourier(2), fourier(2), scalar_q(GENERIC_PHASES_2x2))
    assert verify_hadamard(L).passed
    assert is_classical(L).passed


def test_dita_names_the_failed_hypothesis():
    x, t = noncommuting_pair()
    one = AlgElem.identity((2,))
    F2 = fourier(2, (2,))
    # x and y must commute along the first row of Q
    with pytest.raises(HypothesisError) as err:
        dita_deform(F2, F2, NCMatrix.from_entries([[x, t], [one, one]]))
    assert err.value.hypothesis == "Q entries commute along rows"
    with pytest.raises(HypothesisError) as err:
        dita_deform(F2, F2, NCMatrix.from_entries([[x, one], [t, one]]))
    assert err.value.hypothesis == "Q entries commute along columns"
    with pytest.raises(HypothesisError) as err:
        dita_deform(F2, F2, NCMatrix.from_entries([[x * 2, one], [one, one]]))
    assert err.value.hypothesis == "Q has unitary entries"
    H = NCMatrix.from_entries([[x, x], [x, -x]])
    with pytest.raises(HypothesisError) as err:
        dita_deform(H, F2, NCMatrix.from_entries([[t, t], [t, t]]))
    assert err.value.hypothesis == "<H_ij> commutes with <Q_ib>"
    with pytest.raises(HypothesisError) as err:
        dita_deform(F2, H, NCMatrix.from_entries([[t, t], [t, t]]))
    assert err.value.hypothesis == "<K_ab> commutes with <Q_ib>"


def test_dita_checks_q_dimensions():
    with pytest.raises(PreconditionError):
        dita_deform(fourier(2), fourier(3), NCMatrix.from_scalars(np.ones((3, 2))))


def test_relatives_examples():
    F2 = fourier(2)
    assert all(R.distance(F2) <= 1e-15 for R in relatives(F2))
    F3 = fourier(3)
    assert relatives(F3).conjugate.distance(NCMatrix.from_scalars(np.conj(F3.blocks[0][:, :, 0, 0]))) == 0
    for R in relatives(sigma_deformed()):
        assert verify_hadamard(R).passed


def test_relatives_close_the_corpus(corpus):
    for name, H in corpus:
        for R in relatives(H):
            assert verify_hadamard(R).passed, name


def test_random_deformed_instances_are_non_classical():
    for seed in range(5):
        H = deformed_fourier4_instance(seed)
        assert verify_hadamard(H, 1e-10).passed
        assert not is_classical(H).passed


def test_matrix_is_immutable():
    H = fourier(3)
    with pytest.raises(ValueError):
        H.blocks[0][0, 0] = 5


def test_from_entries_round_trip():
    H = deformed_fourier4_instance(1, (1, 2))
    assert NCMatrix.from_entries(H.entries()) == H


def test_random_unitary_q_breaks_hypothesis():
    u, v = random_unitary((2,), 1), random_unitary((2,), 2)
    F2 = fourier(2, (2,))
    with pytest.raises(HypothesisError):
        dita_deform(F2, F2, NCMatrix.from_entries([[u, v], [v, u]]))
