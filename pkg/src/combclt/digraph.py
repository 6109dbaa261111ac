"""Deterministic edge-labeled digraphs with a distinguished initial vertex.

Vertices are numbered 1..n; vertex 1 is the initial vertex, has no incoming
edges, and must reach every other vertex.  At most one outgoing edge per
(vertex, label) pair, so every word over the alphabet traces at most one
path from the initial vertex.  All path counting is done in exact integer
arithmetic.  Instances are immutable after construction and safe to share
between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

Letter = str
Word = tuple[Letter, ...]


class DigraphError(ValueError):
    """Invalid digraph input."""


class NondeterministicLabel(DigraphError):
    def __init__(self, vertex: int, letter: Letter):
        super().__init__(f"vertex {vertex} has two outgoing edges labeled {letter!r}")
        self.vertex = vertex
        self.letter = letter


class UnreachableVertex(DigraphError):
    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} is not reachable from the initial vertex")
        self.vertex = vertex


class IncomingEdgeToInitial(DigraphError):
    def __init__(self, edge):
        super().__init__(f"edge {edge} points at the initial vertex")
        self.edge = edge


class InsufficientGrowth(DigraphError):
    """The accepted language is finite; there is no exponential growth rate."""


class NotConverged(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""


class NotAccepted(ValueError):
    """A word was rejected by an acceptor that required acceptance."""


def as_word(word: Union[str, Sequence[Letter]]) -> Word:
    """Coerce a word to a tuple of letters (a str is split into characters)."""
    if isinstance(word, str):
        return tuple(word)
    return tuple(word)


@dataclass(frozen=True)
class LabeledDigraph:
    vertex_count: int
    edges: tuple[tuple[int, int, Letter], ...]
    alphabet: tuple[Letter, ...]

    @cached_property
    def step_table(self) -> dict[tuple[int, Letter], int]:
        return {(src, letter): dst for src, dst, letter in self.edges}

    @cached_property
    def out_edges(self) -> tuple[tuple[tuple[Letter, int], ...], ...]:
        """Outgoing (letter, target) pairs per vertex, index 0 unused."""
        out: list[list[tuple[Letter, int]]] = [[] for _ in range(self.vertex_count + 1)]
        for src, dst, letter in self.edges:
            out[src].append((letter, dst))
        return tuple(tuple(sorted(o)) for o in out)

    def step(self, vertex: int, letter: Letter) -> Optional[int]:
        return self.step_table.get((vertex, letter))

    @cached_property
    def adjacency_rows(self) -> tuple[tuple[int, ...], ...]:
        """Integer transition matrix rows; entry (i, j) counts edges i -> j."""
        rows = [[0] * self.vertex_count for _ in range(self.vertex_count)]
        for src, dst, _ in self.edges:
            rows[src - 1][dst - 1] += 1
        return tuple(tuple(r) for r in rows)

    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)


@dataclass(frozen=True)
class DirectedPath:
    vertex_sequence: tuple[int, ...]
    label_sequence: Word

    def __len__(self) -> int:
        return len(self.label_sequence)

    @property
    def end(self) -> int:
        return self.vertex_sequence[-1]


@dataclass(frozen=True)
class Rejection:
    """A word was rejected; ``halt_index`` is the position of the first letter
    that had no matching edge."""

    halt_index: int


def build_digraph(vertex_count: int,
                  edges: Sequence[tuple[int, int, Letter]],
                  alphabet: Sequence[Letter]) -> LabeledDigraph:
    """Validate and construct a LabeledDigraph.

    Raises NondeterministicLabel, UnreachableVertex, IncomingEdgeToInitial or
    DigraphError on malformed input.
    """
    alphabet = tuple(alphabet)
    alpha_set = set(alphabet)
    if vertex_count < 1:
        raise DigraphError("vertex_count must be >= 1")
    seen: set[tuple[int, Letter]] = set()
    for edge in edges:
        src, dst, letter = edge
        if not (1 <= src <= vertex_count and 1 <= dst <= vertex_count):
            raise DigraphError(f"edge {edge} has an out-of-range endpoint")
        if letter not in alpha_set:
            raise DigraphError(f"edge {edge} uses a letter outside the alphabet")
        if dst == 1:
            raise IncomingEdgeToInitial(edge)
        if (src, letter) in seen:
            raise NondeterministicLabel(src, letter)
        seen.add((src, letter))
    dg = LabeledDigraph(vertex_count, tuple((s, d, l) for s, d, l in edges), alphabet)
    reached = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for _, w in dg.out_edges[v]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    for v in dg.vertices():
        if v not in reached:
            raise UnreachableVertex(v)
    return dg


def accept(digraph: LabeledDigraph, word: Union[str, Sequence[Letter]]):
    """Trace ``word`` from the initial vertex.

    Returns the unique DirectedPath reading the word, or a Rejection carrying
    the halt index.  The empty word yields the length-0 path at the initial
    vertex.
    """
    letters = as_word(word)
    verts = [1]
    v = 1
    for i, letter in enumerate(letters):
        nxt = digraph.step(v, letter)
        if nxt is None:
            return Rejection(halt_index=i)
        v = nxt
        verts.append(v)
    return DirectedPath(tuple(verts), letters)


def is_accepted(digraph: LabeledDigraph, word) -> bool:
    return isinstance(accept(digraph, word), DirectedPath)


def iter_words(digraph: LabeledDigraph, max_length: int) -> Iterator[tuple[Word, int]]:
    """Yield (word, end_vertex) for every accepted word of length <= max_length,
    in order of increasing length (the empty word first)."""
    frontier: list[tuple[Word, int]] = [((), 1)]
    yield (), 1
    for _ in range(max_length):
        nxt: list[tuple[Word, int]] = []
        for word, v in frontier:
            for letter, w in digraph.out_edges[v]:
                item = (word + (letter,), w)
                nxt.append(item)
                yield item
        frontier = nxt


def count_paths(digraph: LabeledDigraph, frm: int, to, n: int) -> int:
    """Number of directed paths of length ``n`` from ``frm`` to ``to``.

    ``to`` may be a vertex index or "any" to sum over all targets.  Exact
    integer arithmetic throughout.
    """
    if n < 0:
        raise ValueError("path length must be >= 0")
    rows = digraph.adjacency_rows
    nv = digraph.vertex_count
    vec = [0] * nv
    vec[frm - 1] = 1
    for _ in range(n):
        nxt = [0] * nv
        for i, c in enumerate(vec):
            if c:
                row = rows[i]
                for j in range(nv):
                    if row[j]:
                        nxt[j] += c * row[j]
        vec = nxt
    if to == "any":
        return sum(vec)
    return vec[to - 1]


def growth_counts(digraph: LabeledDigraph, n_max: int) -> list[int]:
    """Counts of accepted words (paths from the initial vertex) per length 0..n_max."""
    rows = digraph.adjacency_rows
    nv = digraph.vertex_count
    vec = [0] * nv
    vec[0] = 1
    counts = [1]
    for _ in range(n_max):
        nxt = [0] * nv
        for i, c in enumerate(vec):
            if c:
                row = rows[i]
                for j in range(nv):
                    if row[j]:
                        nxt[j] += c * row[j]
        vec = nxt
        counts.append(sum(vec))
    return counts


def perron_root(rows: Sequence[Sequence[int]], tol: float = 1e-12,
                max_iter: int = 200000) -> float:
    """Largest real eigenvalue of a nonnegative matrix by power iteration.

    Iterates with the shift A + I (so periodic components converge) and uses a
    Rayleigh quotient for the estimate; the residual ||Ax - rho*x||_1 is the
    stopping test.  Raises NotConverged past max_iter.
    """
    n = len(rows)
    if n == 0:
        return 0.0
    a = [[float(x) for x in row] for row in rows]
    if all(x == 0.0 for row in a for x in row):
        return 0.0
    x = [1.0 / n] * n

    def apply(v):
        return [sum(a[i][j] * v[j] for j in range(n)) for i in range(n)]

    for _ in range(max_iter):
        ax = apply(x)
        y = [ax[i] + x[i] for i in range(n)]
        norm = sum(abs(t) for t in y)
        if norm == 0.0:
            return 0.0
        x = [t / norm for t in y]
        ax = apply(x)
        den = sum(t * t for t in x)
        rho = sum(x[i] * ax[i] for i in range(n)) / den
        resid = sum(abs(ax[i] - rho * x[i]) for i in range(n))
        if resid <= tol * max(1.0, abs(rho)):
            return rho
    raise NotConverged(f"power iteration did not reach tol={tol}")


@dataclass(frozen=True)
class ComponentDecomposition:
    """Recurrent components (maximal strongly connected subgraphs containing a
    cycle), the acyclic DAG between them, and each component's Perron root."""

    components: tuple[frozenset[int], ...]
    component_dag: tuple[tuple[int, int], ...]
    per_component_eigenvalue: tuple[float, ...]

    def component_of(self, vertex: int) -> Optional[int]:
        for i, comp in enumerate(self.components):
            if vertex in comp:
                return i
        return None

    def reachable_pairs(self, digraph: LabeledDigraph) -> set[tuple[int, int]]:
        """(i, j) pairs of component indices with a directed path i -> j."""
        succ: dict[int, set[int]] = {v: set() for v in digraph.vertices()}
        for src, dst, _ in digraph.edges:
            succ[src].add(dst)
        pairs: set[tuple[int, int]] = set()
        for i, comp in enumerate(self.components):
            seen: set[int] = set()
            stack = list(comp)
            while stack:
                v = stack.pop()
                for w in succ[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            for j, other in enumerate(self.components):
                if i != j and seen & other:
                    pairs.add((i, j))
        return pairs


def strongly_connected_components(nodes, succ: dict) -> list[list[int]]:
    """Iterative Tarjan over an explicit successor map."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    onstack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                elif w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.remove(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def components(digraph: LabeledDigraph, tol: float = 1e-12) -> ComponentDecomposition:
    """Recurrent-component decomposition.

    A strongly connected set counts as a component only if it carries at least
    one directed cycle (a singleton without a self-loop is transient).
    """
    succ: dict[int, list[int]] = {v: [] for v in digraph.vertices()}
    for src, dst, _ in digraph.edges:
        succ[src].append(dst)
    self_loops = {src for src, dst, _ in digraph.edges if src == dst}
    comps = [frozenset(c) for c in strongly_connected_components(digraph.vertices(), succ)
             if len(c) > 1 or c[0] in self_loops]
    comps.sort(key=lambda c: min(c))
    rows = digraph.adjacency_rows
    xis = []
    for comp in comps:
        idx = sorted(comp)
        sub = [[rows[i - 1][j - 1] for j in idx] for i in idx]
        xis.append(perron_root(sub, tol=tol))
    where = {v: i for i, comp in enumerate(comps) for v in comp}
    dag_edges: set[tuple[int, int]] = set()
    for src, dst, _ in digraph.edges:
        ci, cj = where.get(src), where.get(dst)
        if ci is not None and cj is not None and ci != cj:
            dag_edges.add((ci, cj))
    return ComponentDecomposition(tuple(comps), tuple(sorted(dag_edges)), tuple(xis))


@dataclass(frozen=True)
class SemisimplicityReport:
    lambda_estimate: float
    K_estimate: float
    verdict: bool
    reason: str
    growth_samples: tuple[tuple[int, int], ...]
    log_n_coefficient: float
    lambda_spectral: float
    connected_lambda_components: Optional[tuple[int, int]]


def _fit_growth(samples: list[tuple[int, int]]):
    """Least-squares fit of log(count) = c + s*n + t*log(n) over the sample window."""
    import numpy as np

    ns = np.array([n for n, _ in samples], dtype=float)
    ys = np.array([math.log(c) for _, c in samples], dtype=float)
    design = np.column_stack([np.ones_like(ns), ns, np.log(ns)])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return coef  # (c, s, t)


def check_almost_semisimple(digraph: LabeledDigraph, n_max: int = 40,
                            lambda_tol: float = 1e-9,
                            log_n_threshold: float = 0.5) -> SemisimplicityReport:
    """Check Theta(lambda^n) growth of accepted-word counts with lambda > 1.

    Two independent verdicts must agree for a pass: (a) a growth fit on the
    window [n_max/2, n_max] where a significantly positive log(n) regressor
    coefficient signals n*lambda^n growth, and (b) a spectral criterion that
    fails iff two distinct components of maximal Perron root are joined by a
    directed path (or the root is <= 1).

    Raises InsufficientGrowth when the language is finite.
    """
    if n_max < 16:
        raise ValueError("n_max must be >= 16")
    counts = growth_counts(digraph, n_max)
    if counts[-1] == 0:
        raise InsufficientGrowth("accepted language is finite")
    samples = [(n, counts[n]) for n in range(1, n_max + 1)]
    window = [(n, c) for n, c in samples if n >= n_max // 2]
    c0, slope, tcoef = _fit_growth(window)
    lam_fit = math.exp(slope)

    decomp = components(digraph)
    lam_spec = max(decomp.per_component_eigenvalue, default=0.0)
    lam_comps = [i for i, xi in enumerate(decomp.per_component_eigenvalue)
                 if abs(xi - lam_spec) <= lambda_tol * max(lam_spec, 1.0)]
    connected: Optional[tuple[int, int]] = None
    if len(lam_comps) > 1:
        reach = decomp.reachable_pairs(digraph)
        for i in lam_comps:
            for j in lam_comps:
                if i != j and (i, j) in reach:
                    connected = (i, j)
                    break
            if connected:
                break

    lam_est = lam_fit
    k_est = 1.0
    for n, c in samples:
        ratio = c / max(lam_est, 1e-300) ** n
        k_est = max(k_est, ratio, 1.0 / ratio)

    growth_ok = tcoef <= log_n_threshold
    spectral_ok = connected is None and lam_spec > 1.0 + lambda_tol
    if lam_spec <= 1.0 + lambda_tol:
        reason = "subexponential: lambda <= 1"
        verdict = False
    elif connected is not None:
        reason = (f"components {connected[0]} and {connected[1]} both have "
                  f"Perron root {lam_spec:.6g} and are joined by a path")
        verdict = False
    elif not growth_ok:
        reason = f"growth fit prefers an n*lambda^n model (log n coefficient {tcoef:.3f})"
        verdict = False
    else:
        reason = "ok"
        verdict = True
    return SemisimplicityReport(
        lambda_estimate=lam_est,
        K_estimate=k_est * (1.0 + 1e-12),
        verdict=verdict,
        reason=reason,
        growth_samples=tuple(samples),
        log_n_coefficient=float(tcoef),
        lambda_spectral=lam_spec,
        connected_lambda_components=connected,
    )


def digraph_to_dict(digraph: LabeledDigraph) -> dict:
    return {
        "alphabet": list(digraph.alphabet),
        "vertices": digraph.vertex_count,
        "initial": 1,
        "edges": [[src, dst, letter] for src, dst, letter in digraph.edges],
    }


def digraph_from_dict(doc: dict) -> LabeledDigraph:
    if doc.get("initial", 1) != 1:
        raise DigraphError("initial vertex must be 1")
    edges = [(int(s), int(d), str(l)) for s, d, l in doc["edges"]]
    return build_digraph(int(doc["vertices"]), edges, [str(a) for a in doc["alphabet"]])


def save_digraph(digraph: LabeledDigraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(digraph_to_dict(digraph), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_digraph(path) -> LabeledDigraph:
    with open(path, "r", encoding="utf-8") as fh:
        return digraph_from_dict(json.load(fh))
