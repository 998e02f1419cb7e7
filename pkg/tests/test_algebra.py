import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nchadamard.algebra import (
    AlgElem,
    adjoint,
    commutator_residual,
    haar_unitary,
    is_central,
    is_unitary,
    make_shape,
    mul,
    norm,
    normalized_trace,
    random_element,
    random_unitary,
)
from nchadamard.errors import ShapeMismatchError

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)

shapes = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple)
seeds = st.integers(0, 2**31 - 1)


def elem(*blocks):
    return AlgElem(tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks))


def test_make_shape_accepts_comma_strings():
    assert make_shape("1,1,1") == (1, 1, 1)
    assert make_shape([2]) == (2,)
    with pytest.raises(ValueError):
        make_shape("0")
    with pytest.raises(ValueError):
        make_shape([])


def test_identity_is_neutral():
    a = random_element((1, 2), 3)
    one = AlgElem.identity((1, 2))
    assert mul(one, a) == a
    assert mul(a, one) == a


def test_product_by_hand():
    assert mul(elem(SX), elem(SZ)) == elem([[0, -1], [1, 0]])


def test_product_is_fiberwise():
    a = elem([[2.0]], SX)
    b = elem([[3j]], SZ)
    p = mul(a, b)
    assert p.blocks[0][0, 0] == 6j
    np.testing.assert_array_equal(p.blocks[1], SX @ SZ)


def test_shape_mismatch_reports_both_shapes():
    with pytest.raises(ShapeMismatchError) as err:
        mul(AlgElem.identity((2,)), AlgElem.identity((1, 2)))
    assert "[2]" in str(err.value) and "[1, 2]" in str(err.value)


def test_adjoint_examples():
    assert adjoint(elem(np.diag([1j, -1j]))) == elem(np.diag([-1j, 1j]))
    assert adjoint(elem(SX)) == elem(SX)


@given(shapes, seeds)
def test_adjoint_is_exact_involution(shape, seed):
    a = random_element(shape, seed)
    assert adjoint(adjoint(a)) == a


@given(shapes, seeds, seeds)
def test_adjoint_reverses_products(shape, s1, s2):
    a, b = random_element(shape, s1), random_element(shape, s2)
    assert norm(adjoint(mul(a, b)) - mul(adjoint(b), adjoint(a))) <= 1e-12


@given(shapes, seeds, seeds, seeds)
def test_associativity(shape, s1, s2, s3):
    a, b, c = (random_element(shape, s) for s in (s1, s2, s3))
    assert norm(mul(mul(a, b), c) - mul(a, mul(b, c))) <= 1e-12 * norm(a) * norm(b) * norm(c)


def test_is_unitary_examples():
    ok, res = is_unitary(elem(np.diag([np.exp(0.7j), 1j])))
    assert ok and res <= 1e-14
    assert not is_unitary(elem([[1, 1], [0, 1]])).passed
    assert is_unitary(elem(np.array([[1, 1], [1, -1]]) / np.sqrt(2))).passed


@given(shapes, seeds, seeds)
def test_products_of_unitaries_are_unitary(shape, s1, s2):
    assert is_unitary(mul(random_unitary(shape, s1), random_unitary(shape, s2)), 1e-10).passed


def test_commutator_residual_examples():
    a = random_element((2,), 1)
    assert commutator_residual(a, AlgElem.identity((2,))) == 0
    assert commutator_residual(elem(SX), elem(SZ)) == pytest.approx(2.0, abs=1e-14)
    assert commutator_residual(elem(np.diag([1, 2j])), elem(np.diag([3, -1]))) == 0


def test_normalized_trace_examples():
    assert normalized_trace(AlgElem.identity((1, 2, 3))) == pytest.approx(1.0)
    assert normalized_trace(elem(SZ)) == 0
    assert normalized_trace(elem([[4.0]], np.eye(2))) == pytest.approx(2.5)


@given(shapes, seeds, seeds)
def test_trace_is_tracial(shape, s1, s2):
    a, b = random_element(shape, s1), random_element(shape, s2)
    assert abs(normalized_trace(mul(a, b)) - normalized_trace(mul(b, a))) <= 1e-12


@given(shapes, seeds)
def test_trace_is_faithful(shape, seed):
    a = random_element(shape, seed)
    t = normalized_trace(mul(a, adjoint(a)))
    assert abs(t.imag) <= 1e-12
    assert t.real > 1e-6
    assert normalized_trace(mul(AlgElem.zeros(shape), AlgElem.zeros(shape))) == 0


def test_is_central_examples():
    assert is_central(AlgElem.scalar((2, 3), 0.3 - 2j))
    assert not is_central(elem(SZ))
    assert is_central(random_element((1, 1), 4))


@settings(max_examples=25)
@given(shapes, seeds)
def test_random_unitary_is_unitary_and_deterministic(shape, seed):
    u = random_unitary(shape, seed)
    assert is_unitary(u, 1e-12).passed
    assert random_unitary(shape, seed) == u


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_haar_second_moment(k):
    u = haar_unitary(k, np.random.default_rng(2024 + k), size=100_000)
    assert np.mean(np.abs(u[:, 0, 0]) ** 2) == pytest.approx(1.0 / k, abs=0.01)


def test_haar_batch_draws_are_unitary():
    u = haar_unitary(4, np.random.default_rng(1), size=50)
    assert np.allclose(u @ u.conj().swapaxes(-1, -2), np.eye(4))
