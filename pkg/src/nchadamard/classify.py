"""Small-size structure of Hadamard matrices over ``A``, and a numerical search.

* :func:`check_2x2` - every 2x2 Hadamard matrix is classical.
* :func:`extract_vanishing_sum_unit` - ``a + b + c = 0`` forces
  ``b = w a, c = w^2 a`` with ``1 + w + w^2 = 0``.
* :func:`canonical_form_3x3` - read off ``(a,b,c,u,v,w)`` and test the
  normal form of a 3x3 Hadamard matrix.
* :func:`search_hadamard` - multi-restart minimisation of the axiom
  residuals, used to probe existence questions. A failed search is
  evidence, never proof.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .algebra import DEFAULT_TOL, AlgebraShape, AlgElem, commutator_residual, is_commutative, make_shape, norm, unitarity_residual
from .errors import PreconditionError, VerificationError
from .hadamard import NCMatrix, dephase, fourier, is_classical, verify_hadamard

# -- vanishing sums -------------------------------------------------------------


def extract_vanishing_sum_unit(a: AlgElem, b: AlgElem, c: AlgElem, tol: float = DEFAULT_TOL):
    """Return ``(w, ||1 + w + w^2||)`` with ``w = b a^*`` for a vanishing sum of unitaries."""
    for name, e in (("a", a), ("b", b), ("c", c)):
        if unitarity_residual(e) > tol:
            raise PreconditionError(f"{name} is not unitary", "unitary")
    s = norm(a + b + c)
    if s > tol:
        raise PreconditionError(f"a + b + c does not vanish: ||a+b+c|| = {s:.6g}", "vanishing sum")
    w = b @ a.H
    one = AlgElem.identity(a.shape)
    return w, norm(one + w + w @ w)


# -- 2x2 ------------------------------------------------------------------------


@dataclass(frozen=True)
class Check2x2Report:
    classical: bool
    classical_residual: float
    relation_a: float  # ||A + C D^* B||
    relation_c: float  # ||C + A B^* D||
    dephased_distance: float | None
    tol: float

    @property
    def passed(self) -> bool:
        ok = self.classical and max(self.relation_a, self.relation_c) <= self.tol
        if self.dephased_distance is not None:
            ok = ok and self.dephased_distance <= self.tol
        return ok

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def check_2x2(H: NCMatrix, tol: float = DEFAULT_TOL) -> Check2x2Report:
    if (H.rows, H.cols) != (2, 2):
        raise PreconditionError("check_2x2 needs a 2x2 matrix", "2x2")
    rep = verify_hadamard(H, tol)
    if not rep.passed:
        raise VerificationError("input is not Hadamard", rep)
    A, B, C, D = H[0, 0], H[0, 1], H[1, 0], H[1, 1]
    cls = is_classical(H, tol)
    ra = norm(A + C @ D.H @ B)
    rc = norm(C + A @ B.H @ D)
    dist = None
    if is_commutative(H.shape):
        dist = dephase(H).distance(fourier(2, H.shape))
    return Check2x2Report(cls.passed, cls.residual, ra, rc, dist, tol)


# -- 3x3 ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CanonicalForm3:
    a: AlgElem
    b: AlgElem
    c: AlgElem
    u: AlgElem
    v: AlgElem
    w: AlgElem
    residuals: dict
    intermediate: dict
    classical: bool
    classical_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.classical and max(self.residuals.values()) <= self.tol

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "classical": self.classical,
            "classical_residual": self.classical_residual,
            "residuals": dict(self.residuals),
            "intermediate_pattern": dict(self.intermediate),
        }


def _triple_commutation(x, y, z) -> float:
    return max(commutator_residual(x, y), commutator_residual(x, z), commutator_residual(y, z))


def canonical_form_3x3(H: NCMatrix, tol: float = DEFAULT_TOL) -> CanonicalForm3:
    """Extract ``(a,b,c,u,v,w)`` and test the normal form

        [[a,   b,      c    ],
         [u a, w^2 u b, w u c],
         [v a, w v b,  w^2 v c]]

    with ``(a,b,c)`` and ``(u,v,w)`` commuting triples and
    ``1 + w + w^2 = 0``. The earlier, uncommuted form (``u v^* w^2 v b``,
    ``u v^* w v c``) is evaluated too and reported separately.
    """
    if (H.rows, H.cols) != (3, 3):
        raise PreconditionError("canonical_form_3x3 needs a 3x3 matrix", "3x3")
    rep = verify_hadamard(H, tol)
    if not rep.passed:
        raise VerificationError("input is not Hadamard", rep)
    a, b, c = H[0, 0], H[0, 1], H[0, 2]
    u = H[1, 0] @ a.H
    v = H[2, 0] @ a.H
    w = H[2, 1] @ b.H @ v.H
    w2 = w @ w
    one = AlgElem.identity(H.shape)
    residuals = {
        "H22 = w^2 u b": norm(H[1, 1] - w2 @ u @ b),
        "H23 = w u c": norm(H[1, 2] - w @ u @ c),
        "H33 = w^2 v c": norm(H[2, 2] - w2 @ v @ c),
        "(a,b,c) commute": _triple_commutation(a, b, c),
        "(u,v,w) commute": _triple_commutation(u, v, w),
        "1 + w + w^2 = 0": norm(one + w + w2),
    }
    vs = v.H
    intermediate = {
        "H22 = u v^* w^2 v b": norm(H[1, 1] - u @ vs @ w2 @ v @ b),
        "H23 = u v^* w v c": norm(H[1, 2] - u @ vs @ w @ v @ c),
    }
    cls = is_classical(H, tol)
    return CanonicalForm3(a, b, c, u, v, w, residuals, intermediate, cls.passed, cls.residual, tol)


# -- N = 4 pattern ---------------------------------------------------------------

_F2_SIGN = np.array([[1, 1], [1, -1]])


def deformed_fourier4_residual(H: NCMatrix) -> tuple[float, tuple]:
    """How far ``H`` is from ``F_2 x_Q F_2`` up to permutations and central scalings.

    For every pair of row/column permutations the matrix is tested for
    ``H_{ia,jb} = alpha_{ia} beta_{jb} s_ij s_ab Q_ib`` with central
    ``alpha, beta``; the best residual and its permutations are returned.
    """
    if (H.rows, H.cols) != (4, 4):
        raise PreconditionError("pattern test needs a 4x4 matrix", "4x4")
    best, best_perm = np.inf, None
    perms = list(itertools.permutations(range(4)))
    for rp in perms:
        for cp in perms:
            res = 0.0
            for B in H.blocks:
                X = B[list(rp)][:, list(cp)].reshape(2, 2, 2, 2, *B.shape[-2:])  # [i,a,j,b]
                k = B.shape[-1]
                eye = np.eye(k)
                adj = X.conj().swapaxes(-1, -2)
                # G[i,a,j,b] = X[i,a,j,b] X[i,0,j,b]^* s_ab must be one central element per (i,a)
                G = (X @ adj[:, :1]) * _F2_SIGN[None, :, None, :, None, None]
                # E[i,a,j,b] = X[i,a,j,b] X[i,a,0,b]^* s_ij must be one central element per (j,b)
                E = (X @ adj[:, :, :1]) * _F2_SIGN[:, None, :, None, None, None]
                g0 = np.trace(G[:, :, :1, :1], axis1=-2, axis2=-1)[..., None, None] / k * eye
                e0 = np.trace(E[:1, :1], axis1=-2, axis2=-1)[..., None, None] / k * eye
                res = max(res, float(np.abs(G - g0).max()), float(np.abs(E - e0).max()))
                if res >= best:
                    break
            if res < best:
                best, best_perm = res, (rp, cp)
    return float(best), best_perm


# -- search ---------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    n: int
    shape: AlgebraShape
    self_adjoint: bool = False
    restarts: int = 10
    max_iters: int = 2000
    seed: int = 0
    target_residual: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "shape", make_shape(self.shape))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.target_residual > 0:
            raise ValueError("target_residual must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shape"] = list(self.shape)
        d.pop("workers")
        return d


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    residual: float
    iterations: int
    classical: bool


@dataclass(frozen=True, eq=False)
class SearchResult:
    config: SearchConfig
    best_residual: float
    best_matrix: NCMatrix
    residual_trace: tuple[float, ...]
    restarts: tuple[RestartOutcome, ...]
    classical: bool
    classical_residual: float
    max_axiom_residual: float
    pattern_residual: float | None = None

    @property
    def reached_target(self) -> bool:
        return self.best_residual <= self.config.target_residual

    def to_dict(self) -> dict:
        out = {
            "config": self.config.to_dict(),
            "best_residual": self.best_residual,
            "reached_target": self.reached_target,
            "max_axiom_residual": self.max_axiom_residual,
            "classical": self.classical,
            "classical_residual": self.classical_residual,
            "residual_trace": list(self.residual_trace),
            "restarts": [asdict(r) for r in self.restarts],
            "note": (
                "a candidate below target was found"
                if self.reached_target
                else "no candidate below target was found; this is numerical evidence, not a proof"
            ),
        }
        if self.pattern_residual is not None:
            out["deformed_fourier4_pattern_residual"] = self.pattern_residual
        return out


def hadamard_objective(H: NCMatrix) -> float:
    """Squared axiom residual of a matrix with unitary entries.

    Sum over fibers of the squared Frobenius norms of all same-row and
    same-column commutators (unordered pairs), plus the squared Frobenius
    norms of ``(H H^* - N)/N``, ``(H-bar H^t - N)/N``, ``(H^t H-bar - N)/N``
    and ``(H^* H - N)/N``.
    """
    n = H.rows
    total = 0.0
    for x in range(len(H.shape)):
        E = [[H.blocks[x][i, j] for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                for jj in range(j + 1, n):
                    total += np.linalg.norm(E[i][j] @ E[i][jj] - E[i][jj] @ E[i][j]) ** 2
                    total += np.linalg.norm(E[j][i] @ E[jj][i] - E[jj][i] @ E[j][i]) ** 2
        k = H.shape[x]
        eye = np.eye(k)
        for i in range(n):
            for l in range(n):
                target = n * eye if i == l else 0 * eye
                sums = [
                    sum(E[i][j] @ E[l][j].conj().T for j in range(n)),
                    sum(E[i][j].conj().T @ E[l][j] for j in range(n)),
                    sum(E[j][i] @ E[j][l].conj().T for j in range(n)),
                    sum(E[j][i].conj().T @ E[j][l] for j in range(n)),
                ]
                total += sum(np.linalg.norm(s - target) ** 2 for s in sums) / n**2
    return float(total)


class _Parametrisation:
    """Maps real vectors to matrices with unitary (or self-adjoint unitary) entries.

    Each entry on fiber ``x`` is ``V = exp(i G)`` with ``G`` Hermitian
    (``K_x^2`` real parameters); in self-adjoint mode the entry is
    ``V D V^*`` with ``D`` a fixed diagonal of signs, i.e. ``2 proj - 1``.
    """

    def __init__(self, n: int, shape: AlgebraShape, signatures=None):
        self.n = n
        self.shape = shape
        self.signatures = signatures
        self.sizes = [n * n * k * k for k in shape]
        self.size = sum(self.sizes)

    def blocks(self, theta: np.ndarray) -> list[np.ndarray]:
        theta = np.atleast_2d(theta)
        batch = theta.shape[0]
        out, start = [], 0
        for x, (k, size) in enumerate(zip(self.shape, self.sizes)):
            t = theta[:, start : start + size].reshape(batch, self.n, self.n, k * k)
            start += size
            G = np.zeros((batch, self.n, self.n, k, k), dtype=np.complex128)
            d = np.arange(k)
            G[..., d, d] = t[..., :k]
            iu = np.triu_indices(k, 1)
            npair = len(iu[0])
            if npair:
                off = t[..., k : k + npair] + 1j * t[..., k + npair :]
                G[..., iu[0], iu[1]] = off
                G[..., iu[1], iu[0]] = off.conj()
            lam, W = np.linalg.eigh(G)
            Wh = W.conj().swapaxes(-1, -2)
            V = (W * np.exp(1j * lam)[..., None, :]) @ Wh
            if self.signatures is not None:
                V = (V * self.signatures[x][None, :, :, None, :]) @ V.conj().swapaxes(-1, -2)
            out.append(V)
        return out

    def matrix(self, theta: np.ndarray) -> NCMatrix:
        return NCMatrix(tuple(b[0] for b in self.blocks(theta)))


def _objective_batch(blocks: list[np.ndarray]) -> np.ndarray:
    total = 0.0
    for E in blocks:
        batch, n, _, k, _ = E.shape
        for M in (E, E.swapaxes(1, 2)):
            prod = M[:, :, :, None] @ M[:, :, None, :]
            comm = prod - prod.swapaxes(2, 3)
            total = total + 0.5 * np.sum(np.abs(comm) ** 2, axis=(1, 2, 3, 4, 5))
        op = E.transpose(0, 1, 3, 2, 4).reshape(batch, n * k, n * k)
        opt = E.transpose(0, 2, 3, 1, 4).reshape(batch, n * k, n * k)  # H^t
        bar_e = E.conj().swapaxes(-1, -2)
        bar = bar_e.transpose(0, 1, 3, 2, 4).reshape(batch, n * k, n * k)  # H-bar
        opH = op.conj().swapaxes(-1, -2)
        eye = n * np.eye(n * k)
        for s in (op @ opH, bar @ opt, opt @ bar, opH @ op):
            total = total + np.sum(np.abs(s - eye) ** 2, axis=(1, 2)) / n**2
    return total


class _Objective:
    def __init__(self, param: _Parametrisation, h: float = 1e-6):
        self.param = param
        self.h = h

    def values(self, thetas: np.ndarray) -> np.ndarray:
        return _objective_batch(self.param.blocks(thetas))

    def __call__(self, theta: np.ndarray) -> float:
        return float(self.values(theta[None])[0])

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        p = theta.size
        steps = self.h * np.eye(p)
        pts = np.concatenate([theta + steps, theta - steps])
        f = self.values(pts)
        return (f[:p] - f[p:]) / (2 * self.h)


_STOP_BELOW = 1e-26


def _run_restart(cfg: SearchConfig, index: int, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    signatures = None
    if cfg.self_adjoint:
        signatures = [rng.choice([-1.0, 1.0], size=(cfg.n, cfg.n, k)) for k in cfg.shape]
    param = _Parametrisation(cfg.n, cfg.shape, signatures)
    obj = _Objective(param)
    theta = rng.uniform(-np.pi, np.pi, size=param.size)

    def stop(intermediate_result):
        if intermediate_result.fun < _STOP_BELOW:
            raise StopIteration

    iters = 0
    budget = cfg.max_iters
    best_theta, best_f = theta, obj(theta)
    for phase in range(2):
        res = minimize(obj, best_theta, jac=obj.gradient, method="BFGS", callback=stop,
                       options={"maxiter": budget, "gtol": 1e-13})
        iters += int(res.nit)
        budget = cfg.max_iters - iters
        if res.fun < best_f:
            best_theta, best_f = res.x, float(res.fun)
        if best_f <= cfg.target_residual or budget <= 0 or phase == 1:
            break
        # stalled above target: derivative-free polish, then one more gradient pass
        dfo = minimize(obj, best_theta, method="Powell", options={"maxfev": 20 * param.size, "xtol": 1e-10, "ftol": 1e-14})
        if dfo.fun < best_f:
            best_theta, best_f = dfo.x, float(dfo.fun)
        else:
            break
    return param.matrix(best_theta), best_f, iters


def search_hadamard(cfg: SearchConfig) -> SearchResult:
    """Seeded multi-restart minimisation of :func:`hadamard_objective`.

    Restarts use seeds spawned from ``cfg.seed`` and are reduced in index
    order, so results do not depend on ``cfg.workers``.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    jobs = list(enumerate(seeds))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            runs = list(pool.map(lambda job: _run_restart(cfg, *job), jobs))
    else:
        runs = [_run_restart(cfg, *job) for job in jobs]

    outcomes, trace = [], []
    best_idx = 0
    for idx, (H, f, iters) in enumerate(runs):
        ctol = _classical_tol(f)
        outcomes.append(RestartOutcome(idx, f, iters, is_classical(H, ctol).passed))
        trace.append(f)
        if f < runs[best_idx][1]:
            best_idx = idx
    best = runs[best_idx][0]
    best_f = hadamard_objective(best)
    cls = is_classical(best, _classical_tol(best_f))
    axiom = verify_hadamard(best, DEFAULT_TOL).max_residual
    pattern = deformed_fourier4_residual(best)[0] if cfg.n == 4 else None
    return SearchResult(
        config=cfg,
        best_residual=best_f,
        best_matrix=best,
        residual_trace=tuple(trace),
        restarts=tuple(outcomes),
        classical=cls.passed,
        classical_residual=cls.residual,
        max_axiom_residual=axiom,
        pattern_residual=pattern,
    )


def _classical_tol(objective: float) -> float:
    # commutators of an approximate solution scale like the root of the objective
    return max(DEFAULT_TOL, 100.0 * float(np.sqrt(max(objective, 0.0))))
