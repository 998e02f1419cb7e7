"""Finite-dimensional C*-algebras ``A = M_{K_1}(C) + ... + M_{K_m}(C)``.

An algebra is described by its *shape*, the tuple of fiber dimensions
``(K_1, ..., K_m)``. A commutative algebra ``C(X)`` on a finite set ``X``
is the shape ``(1, ..., 1)``; a continuous family over a compact ``X`` is
modelled by sampling ``X`` at finitely many points.

Elements are stored fiber by fiber as dense complex blocks. Every
operation here is a pure function of immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ShapeMismatchError

AlgebraShape = tuple[int, ...]

DEFAULT_TOL = 1e-9


class Check(NamedTuple):
    passed: bool
    residual: float


def make_shape(fibers) -> AlgebraShape:
    """Validate and normalise a shape given as a sequence or ``"1,2"`` string."""
    if isinstance(fibers, str):
        parts = [p.strip() for p in fibers.split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError(f"bad shape {fibers!r}")
        try:
            fibers = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"bad shape {fibers!r}") from None
    shape = tuple(int(k) for k in fibers)
    if len(shape) < 1:
        raise ValueError("an algebra needs at least one fiber")
    if any(k < 1 for k in shape):
        raise ValueError(f"fiber dimensions must be positive, got {list(shape)}")
    return shape


def is_commutative(shape: AlgebraShape) -> bool:
    return all(k == 1 for k in shape)


def opnorm(arr: np.ndarray) -> np.ndarray:
    """Largest singular value over the last two axes (works on stacks)."""
    arr = np.asarray(arr)
    if arr.shape[-1] == 1 and arr.shape[-2] == 1:
        return np.abs(arr[..., 0, 0])
    return np.linalg.norm(arr, ord=2, axis=(-2, -1))


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class AlgElem:
    """One element of ``A``, a tuple of square complex blocks."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        if not blocks:
            raise ValueError("an element needs at least one fiber block")
        for b in blocks:
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError(f"fiber blocks must be square matrices, got shape {b.shape}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def shape(self) -> AlgebraShape:
        return tuple(b.shape[0] for b in self.blocks)

    @classmethod
    def scalar(cls, shape: AlgebraShape, value: complex = 1.0) -> "AlgElem":
        return cls(tuple(value * np.eye(k) for k in shape))

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "AlgElem":
        return cls.scalar(shape, 1.0)

    @classmethod
    def zeros(cls, shape: AlgebraShape) -> "AlgElem":
        return cls.scalar(shape, 0.0)

    @classmethod
    def from_fiber_scalars(cls, values: Sequence[complex], shape: AlgebraShape) -> "AlgElem":
        """Central element equal to ``values[x]`` times the identity on fiber ``x``."""
        if len(values) != len(shape):
            raise ValueError("need one scalar per fiber")
        return cls(tuple(v * np.eye(k) for v, k in zip(values, shape)))

    def __eq__(self, other):
        if not isinstance(other, AlgElem) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, AlgElem) else False
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def __matmul__(self, other: "AlgElem") -> "AlgElem":
        return mul(self, other)

    def __add__(self, other: "AlgElem") -> "AlgElem":
        _require_same(self, other)
        return AlgElem(tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgElem") -> "AlgElem":
        _require_same(self, other)
        return AlgElem(tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "AlgElem":
        return AlgElem(tuple(-a for a in self.blocks))

    def __mul__(self, c) -> "AlgElem":
        if isinstance(c, AlgElem):
            return NotImplemented
        return AlgElem(tuple(complex(c) * a for a in self.blocks))

    __rmul__ = __mul__

    @property
    def H(self) -> "AlgElem":
        return adjoint(self)

    def __repr__(self):
        return f"AlgElem(shape={list(self.shape)})"


def _require_same(a: AlgElem, b: AlgElem):
    if a.shape != b.shape:
        raise ShapeMismatchError(a.shape, b.shape)


def mul(a: AlgElem, b: AlgElem) -> AlgElem:
    _require_same(a, b)
    return AlgElem(tuple(x @ y for x, y in zip(a.blocks, b.blocks)))


def adjoint(a: AlgElem) -> AlgElem:
    return AlgElem(tuple(x.conj().T for x in a.blocks))


def norm(a: AlgElem) -> float:
    """C*-norm: the largest singular value over all fibers."""
    return float(max(opnorm(b) for b in a.blocks))


def unitarity_residual(a: AlgElem) -> float:
    res = 0.0
    for b in a.blocks:
        eye = np.eye(b.shape[0])
        res = max(res, float(opnorm(b @ b.conj().T - eye)), float(opnorm(b.conj().T @ b - eye)))
    return res


def is_unitary(a: AlgElem, tol: float = DEFAULT_TOL) -> Check:
    if tol <= 0:
        raise ValueError("tol must be positive")
    r = unitarity_residual(a)
    return Check(r <= tol, r)


def commutator_residual(a: AlgElem, b: AlgElem) -> float:
    """Operator norm of ``ab - ba``, maximised over fibers."""
    _require_same(a, b)
    return float(max(opnorm(x @ y - y @ x) for x, y in zip(a.blocks, b.blocks)))


def normalized_trace(a: AlgElem) -> complex:
    """The uniform trace ``(1/m) sum_x Tr(a_x) / K_x``."""
    return complex(np.mean([np.trace(b) / b.shape[0] for b in a.blocks]))


def central_residual(a: AlgElem) -> float:
    res = 0.0
    for b in a.blocks:
        k = b.shape[0]
        res = max(res, float(opnorm(b - (np.trace(b) / k) * np.eye(k))))
    return res


def is_central(a: AlgElem, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return central_residual(a) <= tol


def haar_unitary(k: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed ``k x k`` unitary (QR of a Ginibre matrix, phases fixed).

    With ``size`` a stack of ``size`` independent draws is returned.
    """
    lead = () if size is None else (size,)
    z = (rng.standard_normal(lead + (k, k)) + 1j * rng.standard_normal(lead + (k, k))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def random_unitary(shape: AlgebraShape, seed: int) -> AlgElem:
    rng = np.random.default_rng(seed)
    return AlgElem(tuple(haar_unitary(k, rng) for k in shape))


def random_element(shape: AlgebraShape, seed: int) -> AlgElem:
    """Complex Ginibre element; handy for property tests."""
    rng = np.random.default_rng(seed)
    return AlgElem(tuple(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)) for k in shape))
