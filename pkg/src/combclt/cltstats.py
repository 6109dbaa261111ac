"""Central limit statistics of vertex weightings along the stationary chain.

Provides the exact drift/variance computation per recurrent component (via
the Poisson equation of the chain), an exact moment oracle used as an
independent cross-check, reproducible sampling of the cone-measure law on
length-n accepted words, empirical CLT reports, typicality profiles of a
single long ray, and the comparison constant between two generating sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.special
import scipy.stats

from . import ratlin
from .combable import CombableFunction, SynthesisFailure, synthesize_dphi
from .combing import Combing
from .spectral import SpectralData, analyze


class SingularPoisson(ValueError):
    pass


class MismatchedDigraph(ValueError):
    pass


class DeadEnd(RuntimeError):
    pass


class TooShort(ValueError):
    pass


def _dphi_vector(data: SpectralData, fn) -> list[int]:
    if isinstance(fn, CombableFunction):
        if fn.combing.digraph != data.digraph:
            raise MismatchedDigraph(
                "the function's acceptor differs from the analyzed digraph; "
                "run the spectral analysis on the function's (refined) acceptor")
        return fn.dphi_vector()
    if isinstance(fn, dict):
        return [int(fn[v]) for v in data.digraph.vertices()]
    vec = [int(x) for x in fn]
    if len(vec) != data.digraph.vertex_count:
        raise MismatchedDigraph("weight vector length does not match the digraph")
    return vec


@dataclass(frozen=True)
class ComponentStats:
    component_index: int
    vertices: tuple[int, ...]
    E: float
    sigma_sq: float
    E_exact: Optional[Fraction]
    sigma_sq_exact: Optional[Fraction]
    poisson_g: tuple[float, ...]


@dataclass(frozen=True)
class CltReport:
    per_component: tuple[ComponentStats, ...]
    E: float
    sigma_sq: float
    sigma: float
    agreement_ok: bool
    mode: str
    E_exact: Optional[Fraction]
    sigma_sq_exact: Optional[Fraction]


def _poisson_float(Nc: np.ndarray, mu: np.ndarray, fbar: np.ndarray,
                   resid_tol: float = 1e-9):
    m = Nc.shape[0]
    aug = np.vstack([np.eye(m) - Nc, mu])
    rhs = np.concatenate([fbar, [0.0]])
    g, *_ = np.linalg.lstsq(aug, rhs, rcond=None)
    resid = float(np.linalg.norm(aug @ g - rhs))
    if resid > resid_tol * max(1.0, float(np.linalg.norm(rhs))):
        raise SingularPoisson(
            f"Poisson equation inconsistent (residual {resid:.3g}); the "
            "centered weights do not integrate to zero on this component")
    return g


def _poisson_exact(Nc, mu, fbar):
    m = len(mu)
    rows = [[(Fraction(1) if i == j else Fraction(0)) - Nc[i][j] for j in range(m)]
            for i in range(m)]
    rows.append([mu[j] for j in range(m)])
    g = ratlin.solve(rows, list(fbar) + [Fraction(0)])
    if g is None:
        raise SingularPoisson("exact Poisson system inconsistent")
    return g


def drift_variance(data: SpectralData, fn, agreement_tol: float = 1e-8) -> CltReport:
    """Drift E^i = <mu^i, dphi> and chain CLT variance per top component.

    The variance solves the Poisson equation (I - N^i) g = dphi - E^i with
    <mu^i, g> = 0 and reads off sigma^2 = 2<mu, fbar g> - <mu, fbar^2>; this
    needs only stationarity, so periodic components are fine.  Component
    values must agree pairwise for the global verdict (they do for weightings
    of genuinely bicombable functions); disagreement is reported, not raised.
    """
    dphi = _dphi_vector(data, fn)
    exact_mode = data.exact is not None
    per = []
    for ci in data.support_verdict.lambda_components:
        verts = sorted(data.decomposition.components[ci])
        idx = [v - 1 for v in verts]
        Nc = data.N[np.ix_(idx, idx)]
        mu_c = data.mu[idx]
        mu_c = mu_c / mu_c.sum()
        f = np.array([dphi[i] for i in idx], dtype=float)
        E = float(mu_c @ f)
        fbar = f - E
        g = _poisson_float(Nc, mu_c, fbar)
        sigma_sq = float(2.0 * mu_c @ (fbar * g) - mu_c @ (fbar * fbar))
        E_ex = sq_ex = None
        if exact_mode:
            Nc_ex = [[data.exact.N[i][j] for j in idx] for i in idx]
            mu_ex = [data.exact.mu[i] for i in idx]
            tot = sum(mu_ex)
            mu_ex = [m / tot for m in mu_ex]
            f_ex = [Fraction(dphi[i]) for i in idx]
            E_ex = sum(m * x for m, x in zip(mu_ex, f_ex))
            fbar_ex = [x - E_ex for x in f_ex]
            g_ex = _poisson_exact(Nc_ex, mu_ex, fbar_ex)
            sq_ex = (2 * sum(m * fb * gg for m, fb, gg in zip(mu_ex, fbar_ex, g_ex))
                     - sum(m * fb * fb for m, fb in zip(mu_ex, fbar_ex)))
            if sq_ex < 0:
                raise SingularPoisson(f"negative exact variance {sq_ex}")
            E, sigma_sq = float(E_ex), float(sq_ex)
        if sigma_sq < 0:
            if sigma_sq < -1e-10:
                raise SingularPoisson(f"variance {sigma_sq} is significantly negative")
            sigma_sq = 0.0
        per.append(ComponentStats(ci, tuple(verts), E, sigma_sq, E_ex, sq_ex,
                                  tuple(float(x) for x in g)))
    agreement_ok = all(
        abs(a.E - b.E) <= agreement_tol and abs(a.sigma_sq - b.sigma_sq) <= agreement_tol
        for a in per for b in per)
    weights = [sum(float(data.mu[v - 1]) for v in st.vertices) for st in per]
    total = sum(weights)
    E_global = sum(w * st.E for w, st in zip(weights, per)) / total
    sq_global = sum(w * st.sigma_sq for w, st in zip(weights, per)) / total
    E_exact = per[0].E_exact if exact_mode and agreement_ok else None
    sq_exact = per[0].sigma_sq_exact if exact_mode and agreement_ok else None
    return CltReport(tuple(per), E_global, sq_global, math.sqrt(max(sq_global, 0.0)),
                     agreement_ok, "exact" if exact_mode else "float",
                     E_exact, sq_exact)


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    variance: float
    mean_exact: Optional[Fraction]
    variance_exact: Optional[Fraction]


def moment_oracle(data: SpectralData, fn, n: int) -> MomentReport:
    """Exact mean and variance of the path sum of dphi over the chain law on
    length-n accepted words, by dynamic programming from the initial vertex.

    Runs in rationals when the spectral data is exact, else in doubles.  This
    is an independent check of drift_variance: mean ~ nE + O(1) and
    variance ~ n sigma^2 + O(1).
    """
    dphi = _dphi_vector(data, fn)
    nv = data.digraph.vertex_count
    if data.exact is not None:
        N = data.exact.N
        p = [Fraction(0)] * nv
        m1 = [Fraction(0)] * nv
        m2 = [Fraction(0)] * nv
        p[0] = Fraction(1)
        m1[0] = Fraction(dphi[0])
        m2[0] = Fraction(dphi[0]) ** 2
        for _ in range(n):
            p2 = [Fraction(0)] * nv
            m12 = [Fraction(0)] * nv
            m22 = [Fraction(0)] * nv
            for i in range(nv):
                if p[i] == 0 and m1[i] == 0 and m2[i] == 0:
                    continue
                for j in range(nv):
                    w = N[i][j]
                    if w == 0:
                        continue
                    dj = dphi[j]
                    p2[j] += p[i] * w
                    m12[j] += (m1[i] + p[i] * dj) * w
                    m22[j] += (m2[i] + 2 * m1[i] * dj + p[i] * dj * dj) * w
            p, m1, m2 = p2, m12, m22
        mean = sum(m1)
        var = sum(m2) - mean * mean
        return MomentReport(n, float(mean), float(var), mean, var)
    N = data.N
    dv = np.array(dphi, dtype=float)
    p = np.zeros(nv)
    m1 = np.zeros(nv)
    m2 = np.zeros(nv)
    p[0] = 1.0
    m1[0] = dphi[0]
    m2[0] = dphi[0] ** 2
    for _ in range(n):
        pN = p @ N
        m1N = m1 @ N
        m2N = m2 @ N
        p, m1, m2 = pN, m1N + dv * pN, m2N + 2 * dv * m1N + dv * dv * pN
    mean = float(m1.sum())
    var = float(m2.sum()) - mean * mean
    return MomentReport(n, mean, var, None, None)


class ChainWalker:
    """Vectorized edge-level walker for the chain law: an edge (i, j, s) is
    taken from i with probability rho(1)_j / (lambda rho(1)_i)."""

    def __init__(self, data: SpectralData):
        dg = data.digraph
        nv = dg.vertex_count
        rho = data.rho_one
        scale = float(np.max(np.abs(rho))) or 1.0
        per_vertex: list[list[tuple[float, str, int]]] = [[] for _ in range(nv + 1)]
        for v in dg.vertices():
            if rho[v - 1] <= 1e-12 * scale:
                continue
            for letter, w in dg.out_edges[v]:
                per_vertex[v].append((float(rho[w - 1] / (data.lam * rho[v - 1])),
                                      letter, w))
        self.dead = np.array([len(per_vertex[v]) == 0 for v in range(nv + 1)])
        maxdeg = max((len(lst) for lst in per_vertex), default=1) or 1
        self.cum = np.ones((nv + 1, maxdeg))
        self.targets = np.zeros((nv + 1, maxdeg), dtype=np.int64)
        self.letters: list[list[str]] = [[l for _, l, _ in lst] for lst in per_vertex]
        for v, lst in enumerate(per_vertex):
            if not lst:
                continue
            probs = np.array([p for p, _, _ in lst])
            cum = np.cumsum(probs)
            cum[-1] = max(cum[-1], 1.0)  # guard rounding so search never overflows
            self.cum[v, :len(lst)] = cum
            self.targets[v, :len(lst)] = [w for _, _, w in lst]

    def step(self, states: np.ndarray, u: np.ndarray):
        if np.any(self.dead[states]):
            raise DeadEnd("walk reached a vertex with no outgoing chain edges")
        edge_idx = (u[:, None] > self.cum[states]).sum(axis=1)
        return self.targets[states, edge_idx], edge_idx


@dataclass
class SampleBatch:
    n: int
    count: int
    seed: int
    words: Optional[tuple]
    end_vertices: np.ndarray
    phi_values: Optional[np.ndarray]


def sample(data: SpectralData, n: int, count: int, seed: int,
           fn=None, keep_words: bool = True,
           max_word_cells: int = 5_000_000) -> SampleBatch:
    """Draw ``count`` length-n accepted words from the cone-measure law by
    running the chain from the initial vertex; reproducible from the seed."""
    walker = ChainWalker(data)
    rng = np.random.default_rng(seed)
    states = np.ones(count, dtype=np.int64)
    dphi = np.array(_dphi_vector(data, fn), dtype=np.int64) if fn is not None else None
    sums = None
    if dphi is not None:
        sums = np.full(count, dphi[0], dtype=np.int64)
    keep = keep_words and n * count <= max_word_cells
    letter_idx = np.zeros((count, n), dtype=np.int16) if keep else None
    state_log = np.zeros((count, n), dtype=np.int64) if keep else None
    for step in range(n):
        u = rng.random(count)
        nxt, edges = walker.step(states, u)
        if keep:
            letter_idx[:, step] = edges
            state_log[:, step] = states
        states = nxt
        if sums is not None:
            sums += dphi[states - 1]
    words = None
    if keep:
        words = tuple(
            tuple(walker.letters[state_log[i, j]][letter_idx[i, j]] for j in range(n))
            for i in range(count))
    return SampleBatch(n, count, seed, words, states, sums)


def sample_phi_sums(data: SpectralData, fn, n: int, count: int, seed: int) -> np.ndarray:
    """Path sums of dphi over sampled length-n words, without storing words.

    Consumes the generator exactly as ``sample`` does, so the same seed yields
    sums of the same words.
    """
    walker = ChainWalker(data)
    rng = np.random.default_rng(seed)
    dphi = np.array(_dphi_vector(data, fn), dtype=np.int64)
    states = np.ones(count, dtype=np.int64)
    sums = np.full(count, dphi[0], dtype=np.int64)
    for _ in range(n):
        u = rng.random(count)
        states, _ = walker.step(states, u)
        sums += dphi[states - 1]
    return sums


@dataclass(frozen=True)
class EmpiricalCltReport:
    n: int
    count: int
    seed: int
    E: float
    sigma: float
    degenerate: bool
    max_abs_centered: float
    ks_distance: float
    ks_distance_uncorrected: float
    skewness: float
    excess_kurtosis: float
    mean_standardized: float
    std_standardized: float
    lattice_step: float
    histogram: tuple[tuple[float, float, int], ...]


def _lattice_ks(z: np.ndarray, step: float):
    """One-sample KS distance to the standard normal.

    The sums are integer-valued, so the standardized sample lives on a lattice
    of the given step; the corrected distance compares each lattice atom with
    the normal mass of its half-open cell (midpoint convention), which removes
    the discretization floor of the plain statistic.  Both values returned.
    """
    vals, counts = np.unique(np.sort(z), return_counts=True)
    total = counts.sum()
    f_hi = np.cumsum(counts) / total
    f_lo = f_hi - counts / total
    phi_mid_hi = scipy.special.ndtr(vals + step / 2)
    phi_mid_lo = scipy.special.ndtr(vals - step / 2)
    corrected = max(np.abs(f_hi - phi_mid_hi).max(), np.abs(f_lo - phi_mid_lo).max())
    phi = scipy.special.ndtr(vals)
    naive = max(np.abs(f_hi - phi).max(), np.abs(f_lo - phi).max())
    return float(corrected), float(naive)


def empirical_clt(data: SpectralData, fn, n: int, count: int, seed: int,
                  clt: Optional[CltReport] = None, bins: int = 61,
                  bin_range: tuple[float, float] = (-4.0, 4.0)) -> EmpiricalCltReport:
    """Standardize sampled path sums and compare with the normal law.

    sigma = 0 routes to the degenerate mode: the limit law is the Dirac mass
    at the origin, so the report carries max |sum - nE| (exactly 0 for a
    constant weighting) and standardized values (sum - nE)/sqrt(n) instead of
    the normal comparison.
    """
    if clt is None:
        clt = drift_variance(data, fn)
    sums = sample_phi_sums(data, fn, n, count, seed)
    E, sigma_sq = clt.E, clt.sigma_sq
    centered = sums - n * E
    max_abs = float(np.abs(centered).max())
    if sigma_sq <= 0:
        z = centered / math.sqrt(n)
        hist = np.histogram(z, bins=bins, range=bin_range)
        return EmpiricalCltReport(n, count, seed, E, 0.0, True, max_abs,
                                  0.0, 0.0, 0.0, 0.0,
                                  float(z.mean()), float(z.std()), 0.0,
                                  _histogram_rows(hist))
    sigma = math.sqrt(sigma_sq)
    z = centered / (sigma * math.sqrt(n))
    base = sums - sums.min()
    g = int(np.gcd.reduce(base)) if np.any(base) else 1
    step = g / (sigma * math.sqrt(n))
    ks_corr, ks_naive = _lattice_ks(z, step)
    hist = np.histogram(z, bins=bins, range=bin_range)
    return EmpiricalCltReport(
        n, count, seed, E, sigma, False, max_abs, ks_corr, ks_naive,
        float(scipy.stats.skew(z)), float(scipy.stats.kurtosis(z)),
        float(z.mean()), float(z.std()), float(step), _histogram_rows(hist))


def _histogram_rows(hist) -> tuple[tuple[float, float, int], ...]:
    counts, edges = hist
    return tuple((float(edges[i]), float(edges[i + 1]), int(counts[i]))
                 for i in range(len(counts)))


def sample_ray(data: SpectralData, length: int, seed: int) -> np.ndarray:
    """One chain trajectory of vertex indices, initial vertex included."""
    walker = ChainWalker(data)
    us = np.random.default_rng(seed).random(length)
    cum = walker.cum
    targets = walker.targets
    dead = walker.dead
    out = np.empty(length + 1, dtype=np.int64)
    state = 1
    out[0] = 1
    for i in range(length):
        if dead[state]:
            raise DeadEnd("ray reached a vertex with no outgoing chain edges")
        row = cum[state]
        u = us[i]
        j = 0
        while row[j] < u:
            j += 1
        state = int(targets[state, j])
        out[i + 1] = state
    return out


@dataclass(frozen=True)
class TypicalityProfile:
    n: int
    m: int
    mean: float
    variance: float
    histogram: tuple[tuple[float, float, int], ...]


def typicality_profile(data: SpectralData, fn, gamma: np.ndarray, n: int, m: int,
                       E: float, bins: int = 61,
                       bin_range: tuple[float, float] = (-4.0, 4.0)) -> TypicalityProfile:
    """Window statistics of one long ray: the distribution of
    (phi(gamma_{i+n}) - phi(gamma_i) - nE) / sqrt(n) over i = 1..m."""
    if len(gamma) < n + m + 1:
        raise TooShort(f"ray of length {len(gamma) - 1} is shorter than n + m = {n + m}")
    dphi = np.array(_dphi_vector(data, fn), dtype=np.int64)
    prefix = np.cumsum(dphi[np.asarray(gamma) - 1])
    i = np.arange(1, m + 1)
    vals = (prefix[i + n] - prefix[i] - n * E) / math.sqrt(n)
    hist = np.histogram(vals, bins=bins, range=bin_range)
    return TypicalityProfile(n, m, float(vals.mean()), float(vals.var()),
                             _histogram_rows(hist))


@dataclass(frozen=True)
class GensetComparison:
    E: float
    E_exact: Optional[Fraction]
    lambda12: float
    lambda12_exact: Optional[Fraction]
    lambda1: float
    lambda2: float
    growth_bound: float  # log(lambda1) / log(lambda2)
    inequality_margin: float
    sigma: float
    deviation_rows: tuple  # (n, count, mean_dev, dev95, K_n)
    K_fitted: Optional[float]
    synthesis_depth: int
    synthesis_radius: int


def compare_gensets(combing: Combing, genset2: str,
                    length_oracle: Optional[Callable] = None,
                    synth_depth: int = 3, synth_radius: int = 7,
                    check_lengths: Sequence[int] = (),
                    ball_radius2: int = 7) -> GensetComparison:
    """Length comparison constant between the combing's generating set and a
    second one: word length in the second set is synthesized as a weighting on
    the combing acceptor, its drift E gives lambda_{1,2} = 1/E (so that
    |g|_1 ~ lambda_{1,2} |g|_2 along typical geodesics), and the counting
    bound lambda_{1,2} >= log(lambda_1)/log(lambda_2) is verified.

    ``check_lengths`` requests exhaustive deviation tables: for each n, every
    accepted word of length n is measured and |n - lambda12*|g|_2| is reported
    (mean, and max over the middle 95% by second-set length, with the fitted
    K_n = dev95/sqrt(n)).
    """
    oracle = combing.oracle
    phi = length_oracle or (lambda el: oracle.word_length(el, genset2))
    fn = synthesize_dphi(combing, phi, refine_depth=synth_depth,
                         verify_radius=synth_radius)
    if isinstance(fn, SynthesisFailure):
        raise SingularPoisson(f"length synthesis failed: {fn.kind}")
    sp = analyze(fn.combing.digraph)
    clt = drift_variance(sp, fn)
    E = clt.E
    E_exact = clt.E_exact
    lam12 = 1.0 / E
    lam12_exact = (1 / E_exact) if E_exact not in (None, 0) else None
    sp1 = analyze(combing.digraph)
    lambda1 = sp1.lam
    ball2 = oracle.ball(genset2, ball_radius2)
    sizes = ball2.shell_sizes()
    lambda2 = (sizes[ball_radius2] / sizes[ball_radius2 - 1]) if sizes[ball_radius2 - 1] else float("nan")
    growth_bound = math.log(lambda1) / math.log(lambda2)
    rows = []
    K_fitted = None
    for n in check_lengths:
        lengths2 = []
        for word, _, el in combing.iter_words(n):
            if len(word) == n:
                lengths2.append(int(phi(el)))
        arr = np.array(lengths2)
        devs = np.abs(n - lam12 * arr)
        order = np.argsort(arr, kind="stable")
        lo = int(math.floor(0.025 * len(arr)))
        hi = int(math.ceil(0.975 * len(arr)))
        middle = order[lo:hi]
        dev95 = float(devs[middle].max()) if len(middle) else float(devs.max())
        rows.append((n, len(arr), float(devs.mean()), dev95,
                     dev95 / math.sqrt(n)))
        K_fitted = max(K_fitted or 0.0, dev95 / math.sqrt(n))
    return GensetComparison(E, E_exact, lam12, lam12_exact, float(lambda1),
                            float(lambda2), growth_bound, lam12 - growth_bound,
                            clt.sigma, tuple(rows), K_fitted,
                            synth_depth, synth_radius)
