"""Perron-Frobenius structure of a word acceptor.

Given the integer transition matrix M of an acceptor with growth rate
lambda, this module computes the projections rho(v) and ell(v) onto the
right/left lambda-eigenspaces, the stochastic matrix
N_ij = M_ij rho(1)_j / (lambda rho(1)_i), the stationary measure
mu_i = rho(1)_i ell(v1)_i, the support decomposition, and Patterson-Sullivan
cone weights lambda^{-n} rho(1)_{v}.

Projections are computed by a direct linear solve (kernel plus range
decomposition); the Cesaro averages n^{-1} sum lambda^{-i} M^i v converge too
slowly to be primary but are exposed as a cross-check.  When lambda is
rational everything can be carried out exactly over Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import ratlin
from .digraph import (ComponentDecomposition, DirectedPath, LabeledDigraph,
                      NotAccepted, accept, components, perron_root,
                      strongly_connected_components)


class DegenerateEigenstructure(ValueError):
    """The top eigenvalue has mismatched algebraic/geometric multiplicity, so
    the eigenprojection does not exist (the acceptor is not almost semisimple)."""


@dataclass(frozen=True)
class TransitionMatrix:
    rows: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


def transition_matrix(digraph: LabeledDigraph) -> TransitionMatrix:
    return TransitionMatrix(digraph.adjacency_rows)


def perron(matrix: Union[TransitionMatrix, Sequence[Sequence[int]]],
           tol: float = 1e-12) -> float:
    """Largest real eigenvalue, computed per recurrent component.

    Power iteration is run on each strongly connected component with at least
    one cycle (where convergence is geometric) and the maximum is returned;
    0.0 if the matrix is nilpotent.
    """
    rows = matrix.rows if isinstance(matrix, TransitionMatrix) else [tuple(r) for r in matrix]
    n = len(rows)
    succ = {i: [j for j in range(n) if rows[i][j]] for i in range(n)}
    best = 0.0
    for comp in strongly_connected_components(range(n), succ):
        if len(comp) == 1 and not rows[comp[0]][comp[0]]:
            continue
        idx = sorted(comp)
        sub = [[rows[i][j] for j in idx] for i in idx]
        best = max(best, perron_root(sub, tol=tol))
    return best


def _float_projection(rows, lam: float, vec, transpose: bool = False,
                      kernel_tol: float = 1e-9, resid_tol: float = 1e-8) -> np.ndarray:
    a = np.array(rows, dtype=float)
    if transpose:
        a = a.T
    n = a.shape[0]
    shifted = a - lam * np.eye(n)
    _, svals, vt = np.linalg.svd(shifted)
    scale = max(svals.max(), 1.0)
    k = int(np.sum(svals <= kernel_tol * scale))
    if k == 0:
        raise DegenerateEigenstructure(f"{lam} is not an eigenvalue")
    basis = vt[n - k:].T
    aug = np.hstack([shifted, basis])
    v = np.asarray(vec, dtype=float)
    sol, *_ = np.linalg.lstsq(aug, v, rcond=None)
    resid = np.linalg.norm(aug @ sol - v)
    if resid > resid_tol * max(1.0, float(np.linalg.norm(v))):
        raise DegenerateEigenstructure(
            "projection system is inconsistent: the top eigenvalue has a "
            f"nontrivial Jordan block (residual {resid:.3g})")
    return basis @ sol[n:]


def project_rho(matrix: TransitionMatrix, lam: float, vec) -> np.ndarray:
    """Projection of ``vec`` onto the right lambda-eigenspace of M along the
    other generalized eigenspaces."""
    return _float_projection(matrix.rows, lam, vec, transpose=False)


def project_ell(matrix: TransitionMatrix, lam: float, vec) -> np.ndarray:
    """Projection onto the left lambda-eigenspace (right eigenspace of M^T)."""
    return _float_projection(matrix.rows, lam, vec, transpose=True)


def cesaro_projection(matrix: TransitionMatrix, lam: float, vec,
                      horizon: int, transpose: bool = False) -> np.ndarray:
    """Partial Cesaro average n^{-1} sum_{i<=n} lambda^{-i} M^i v; converges
    to the projection at rate O(1/n), used only as a cross-check."""
    a = matrix.numpy()
    if transpose:
        a = a.T
    v = np.asarray(vec, dtype=float)
    acc = v.copy()
    cur = v.copy()
    for _ in range(horizon):
        cur = a @ cur / lam
        acc += cur
    return acc / (horizon + 1)


@dataclass(frozen=True)
class SupportVerdict:
    lambda_components: tuple[int, ...]
    vertices: frozenset[int]
    pairwise_ok: bool
    violating_pair: Optional[tuple[int, int]]


def support_analysis(digraph: LabeledDigraph, decomposition: ComponentDecomposition,
                     lam: float, rel_tol: float = 1e-9) -> SupportVerdict:
    """Components whose Perron root equals lambda (within rel_tol), with a
    check that no directed path joins two of them; a violation means the
    acceptor is not almost semisimple."""
    lam_comps = [i for i, xi in enumerate(decomposition.per_component_eigenvalue)
                 if abs(xi - lam) <= rel_tol * max(lam, 1.0)]
    verts = frozenset(v for i in lam_comps for v in decomposition.components[i])
    violating = None
    if len(lam_comps) > 1:
        reach = decomposition.reachable_pairs(digraph)
        for i in lam_comps:
            for j in lam_comps:
                if i != j and (i, j) in reach:
                    violating = (i, j)
                    break
            if violating:
                break
    return SupportVerdict(tuple(lam_comps), verts, violating is None, violating)


@dataclass(frozen=True)
class ExactSpectral:
    lam: Fraction
    rho_one: tuple[Fraction, ...]
    ell_v1: tuple[Fraction, ...]
    N: tuple[tuple[Fraction, ...], ...]
    mu: tuple[Fraction, ...]


@dataclass(frozen=True)
class SpectralData:
    digraph: LabeledDigraph
    matrix: TransitionMatrix
    lam: float
    rho_one: np.ndarray
    ell_v1: np.ndarray
    N: np.ndarray
    mu: np.ndarray
    support: frozenset[int]
    decomposition: ComponentDecomposition
    support_verdict: SupportVerdict
    exact: Optional[ExactSpectral]

    @property
    def mode(self) -> str:
        return "exact" if self.exact is not None else "float"

    def lambda_components(self) -> tuple[int, ...]:
        return self.support_verdict.lambda_components


def _chain_float(rows, lam: float, rho_one: np.ndarray, ell_v1: np.ndarray,
                 support_tol: float = 1e-12):
    n = len(rows)
    N = np.zeros((n, n))
    scale = float(np.max(np.abs(rho_one))) or 1.0
    for i in range(n):
        if rho_one[i] > support_tol * scale:
            for j in range(n):
                if rows[i][j]:
                    N[i, j] = rows[i][j] * rho_one[j] / (lam * rho_one[i])
        else:
            N[i, i] = 1.0
    mu = rho_one * ell_v1
    total = mu.sum()
    if total <= 0:
        raise DegenerateEigenstructure("stationary measure has zero total mass")
    return N, mu / total


def _chain_exact(rows, lam: Fraction, rho_one, ell_v1):
    n = len(rows)
    N = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if rho_one[i] != 0:
            for j in range(n):
                if rows[i][j]:
                    N[i][j] = Fraction(rows[i][j]) * rho_one[j] / (lam * rho_one[i])
        else:
            N[i][i] = Fraction(1)
    mu = [rho_one[i] * ell_v1[i] for i in range(n)]
    total = sum(mu)
    if total <= 0:
        raise DegenerateEigenstructure("stationary measure has zero total mass")
    mu = [m / total for m in mu]
    return tuple(tuple(row) for row in N), tuple(mu)


def chain(matrix: TransitionMatrix, lam: float, rho_one: np.ndarray,
          ell_v1: np.ndarray):
    """The stochastic matrix N (with identity rows off the support of rho(1))
    and the stationary probability measure mu."""
    return _chain_float(matrix.rows, lam, rho_one, ell_v1)


def _try_exact(rows, lam_float: float) -> Optional[ExactSpectral]:
    lam = ratlin.rational_eigenvalue_candidate(lam_float)
    if lam is None:
        return None
    n = len(rows)
    mat = ratlin.to_fraction_matrix(rows)
    ones = [Fraction(1)] * n
    e1 = [Fraction(1 if i == 0 else 0) for i in range(n)]
    rho = ratlin.eigen_projection(mat, lam, ones, transpose=False)
    if rho is None:
        return None
    ell = ratlin.eigen_projection(mat, lam, e1, transpose=True)
    if ell is None:
        return None
    # verify the eigenvector identities exactly
    for i in range(n):
        if sum(mat[i][j] * rho[j] for j in range(n)) != lam * rho[i]:
            return None
        if sum(mat[j][i] * ell[j] for j in range(n)) != lam * ell[i]:
            return None
    N, mu = _chain_exact(rows, lam, rho, ell)
    return ExactSpectral(lam, tuple(rho), tuple(ell), N, mu)


def analyze(digraph: LabeledDigraph, mode: str = "auto",
            eigen_tol: float = 1e-12, support_rel_tol: float = 1e-9) -> SpectralData:
    """Full spectral analysis of an acceptor digraph.

    mode "auto" attempts an exact rational computation (possible whenever the
    growth rate is rational) and falls back to floating point; "float" and
    "exact" force a path (the latter raising if no rational eigenvalue is
    found).  Raises DegenerateEigenstructure for acceptors whose top
    eigenvalue carries a nontrivial Jordan block.
    """
    matrix = transition_matrix(digraph)
    decomp = components(digraph, tol=eigen_tol)
    if not decomp.components:
        raise DegenerateEigenstructure(
            "no recurrent component: the accepted language is finite")
    lam = max(decomp.per_component_eigenvalue)
    exact = None
    if mode in ("auto", "exact"):
        exact = _try_exact(matrix.rows, lam)
        if exact is None and mode == "exact":
            raise DegenerateEigenstructure(
                "no exact rational spectral data at this growth rate")
    if exact is not None:
        lam_f = float(exact.lam)
        rho_one = np.array([float(x) for x in exact.rho_one])
        ell_v1 = np.array([float(x) for x in exact.ell_v1])
        N = np.array([[float(x) for x in row] for row in exact.N])
        mu = np.array([float(x) for x in exact.mu])
        support = frozenset(i + 1 for i, m in enumerate(exact.mu) if m > 0)
    else:
        lam_f = lam
        n = matrix.size
        rho_one = project_rho(matrix, lam_f, np.ones(n))
        ell_v1 = project_ell(matrix, lam_f, np.eye(n)[0])
        N, mu = chain(matrix, lam_f, rho_one, ell_v1)
        scale = float(np.max(mu)) or 1.0
        support = frozenset(i + 1 for i, m in enumerate(mu) if m > 1e-12 * scale)
    verdict = support_analysis(digraph, decomp, lam_f, rel_tol=support_rel_tol)
    if not verdict.pairwise_ok:
        raise DegenerateEigenstructure(
            f"components {verdict.violating_pair} share the top eigenvalue and "
            "are joined by a directed path")
    return SpectralData(digraph, matrix, lam_f, rho_one, ell_v1, N, mu,
                        support, decomp, verdict, exact)


@dataclass(frozen=True)
class ConeWeight:
    word: tuple
    end_vertex: int
    weight: float
    weight_exact: Optional[Fraction]


def cone_weight(data: SpectralData, word) -> ConeWeight:
    """Patterson-Sullivan weight lambda^{-|w|} rho(1)_{end vertex} of the cone
    over an accepted word."""
    path = accept(data.digraph, word)
    if not isinstance(path, DirectedPath):
        raise NotAccepted(f"word {word!r} rejected at index {path.halt_index}")
    g = path.end
    n = len(path)
    weight = float(data.rho_one[g - 1]) * data.lam ** (-n)
    exact = None
    if data.exact is not None:
        exact = data.exact.rho_one[g - 1] / data.exact.lam ** n
    return ConeWeight(path.label_sequence, g, weight, exact)


@dataclass(frozen=True)
class PoincareReport:
    terms: tuple[tuple[int, int, float], ...]  # (n, |G_n|, |G_n| lambda^-n)
    partial_zeta: float
    critical_exponent: float
    term_ratio: float  # max/min of the normalized terms over n >= 1
    radius: int


def poincare_diagnostics(oracle, genset: str, radius: int, lam: float) -> PoincareReport:
    """Per-shell terms |G_n| lambda^{-n} of the Poincare series at the
    critical exponent log(lambda); the terms stay in a bounded band exactly
    when the two-sided exponential growth bounds hold."""
    ball = oracle.ball(genset, radius)
    terms = []
    for n, shell in enumerate(ball.shells[:radius + 1]):
        terms.append((n, len(shell), len(shell) * lam ** (-n)))
    normalized = [t for n, _, t in terms if n >= 1 and t > 0]
    ratio = (max(normalized) / min(normalized)) if normalized else float("inf")
    return PoincareReport(tuple(terms), sum(t for _, _, t in terms),
                          float(np.log(lam)), ratio, radius)
