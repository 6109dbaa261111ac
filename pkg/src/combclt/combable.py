"""Combable functions: vertex weightings d-phi on a combing acceptor.

A function phi on the group is represented by an integer weight on each
vertex of a (possibly refined) acceptor digraph so that phi of an element is
the sum of weights along the accepted word's path, including the initial
vertex.  ``synthesize_dphi`` discovers such a weighting empirically from a
phi oracle by refining acceptor states with recent-increment histories; it
either verifies the result exhaustively on a ball or returns a failure
report with witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .combing import Combing, NotAccepted, OutsideVerifiedRadius
from .digraph import (DirectedPath, Word, accept, as_word, build_digraph,
                      digraph_from_dict, digraph_to_dict)
from .groups import GroupOracle


@dataclass
class CombableFunction:
    combing: Combing
    dphi: dict[int, int]
    provenance: tuple

    def evaluate_word(self, word) -> int:
        path = accept(self.combing.digraph, word)
        if not isinstance(path, DirectedPath):
            raise NotAccepted(f"word {word!r} rejected at index {path.halt_index}")
        return sum(self.dphi[v] for v in path.vertex_sequence)

    def evaluate_element(self, element) -> int:
        return self.evaluate_word(self.combing.word_of_element(element))

    def evaluate(self, word_or_element) -> int:
        """Words (str or letter tuple over the alphabet) are traced directly;
        anything else is treated as a group element."""
        if isinstance(word_or_element, (str, tuple, list)):
            letters = as_word(word_or_element)
            if all(l in self.combing.digraph.alphabet for l in letters):
                return self.evaluate_word(letters)
        return self.evaluate_element(word_or_element)

    def dphi_vector(self) -> list[int]:
        return [self.dphi[v] for v in self.combing.digraph.vertices()]

    def _combine(self, other: "CombableFunction", sign: int) -> "CombableFunction":
        if self.combing.digraph != other.combing.digraph:
            raise ValueError("functions live on different acceptor digraphs")
        merged = {v: self.dphi[v] + sign * other.dphi[v]
                  for v in self.combing.digraph.vertices()}
        return CombableFunction(self.combing, merged, ("combined",))

    def __add__(self, other):
        return self._combine(other, +1)

    def __sub__(self, other):
        return self._combine(other, -1)


def word_length_function(combing: Combing) -> CombableFunction:
    """Word length: weight 1 on every noninitial vertex."""
    dphi = {v: 1 for v in combing.digraph.vertices()}
    dphi[1] = 0
    return CombableFunction(combing, dphi, ("word-length",))


def function_to_dict(fn: CombableFunction) -> dict:
    """Function bundle: the (refined) acceptor, weight table, provenance and
    verified radius; the group reference travels separately."""
    return {
        "digraph": digraph_to_dict(fn.combing.digraph),
        "genset": fn.combing.genset_name,
        "dphi": {str(v): fn.dphi[v] for v in fn.combing.digraph.vertices()},
        "provenance": list(fn.provenance),
        "verified_radius": fn.combing.verified_radius,
    }


def function_from_dict(doc: dict, oracle: GroupOracle) -> CombableFunction:
    comb = Combing(digraph_from_dict(doc["digraph"]), oracle, doc["genset"],
                   int(doc["verified_radius"]))
    dphi = {int(v): int(x) for v, x in doc["dphi"].items()}
    return CombableFunction(comb, dphi, tuple(doc["provenance"]))


@dataclass(frozen=True)
class SynthesisFailure:
    kind: str  # "conflict" or "nonstabilizing"
    depth: int
    verify_radius: int
    witnesses: tuple
    increment_range_by_length: tuple[tuple[int, int, int], ...]
    class_count: int

    @property
    def ok(self) -> bool:
        return False

    def max_abs_increment(self, length: int) -> int:
        for ln, lo, hi in self.increment_range_by_length:
            if ln == length:
                return max(abs(lo), abs(hi))
        raise KeyError(length)


def synthesize_dphi(combing: Combing, phi_oracle: Callable,
                    refine_depth: int = 3, verify_radius: int = 6):
    """Synthesize a vertex weighting for ``phi_oracle`` on a refinement of the
    combing acceptor.

    States are (acceptor vertex, last ``refine_depth`` increments of phi along
    the word); the state reached by a word then determines the increment paid
    on arrival, which becomes the refined d-phi.  All accepted words to radius
    verify_radius + refine_depth are enumerated; the construction fails with a
    report if two words in one state disagree on a next increment (conflict)
    or if new states still appear on the outermost shell (nonstabilizing,
    e.g. unbounded increments).  On success the weighting is re-verified
    exhaustively to verify_radius.
    """
    if refine_depth < 1:
        raise ValueError("refine_depth must be >= 1")
    if verify_radius > combing.verified_radius:
        raise OutsideVerifiedRadius(
            f"verify_radius {verify_radius} exceeds the combing's verified "
            f"radius {combing.verified_radius}")
    oracle = combing.oracle
    gs = combing.genset
    enum_radius = verify_radius + refine_depth

    phi_id = int(phi_oracle(oracle.identity()))
    init_key = (1, (phi_id,))
    classes: dict = {init_key: 1}
    first_seen: dict = {init_key: 0}
    transitions: dict = {}  # (class_index, letter) -> (target_index, delta)
    witness_word: dict = {}  # (class_index, letter) -> representative word
    range_by_length: dict[int, tuple[int, int]] = {0: (phi_id, phi_id)}
    conflict: Optional[tuple] = None

    frontier = [((), 1, oracle.identity(), phi_id, init_key)]
    for length in range(enum_radius):
        nxt = []
        for word, v, el, phi, key in frontier:
            cls = classes[key]
            for letter, w in combing.digraph.out_edges[v]:
                el2 = oracle.multiply(el, gs.elements[letter])
                phi2 = int(phi_oracle(el2))
                delta = phi2 - phi
                lo, hi = range_by_length.get(length + 1, (delta, delta))
                range_by_length[length + 1] = (min(lo, delta), max(hi, delta))
                key2 = (w, (key[1] + (delta,))[-refine_depth:])
                if key2 not in classes:
                    classes[key2] = len(classes) + 1
                    first_seen[key2] = length + 1
                word2 = word + (letter,)
                prev = transitions.get((cls, letter))
                if prev is None:
                    transitions[(cls, letter)] = (classes[key2], delta)
                    witness_word[(cls, letter)] = word
                elif prev[1] != delta and conflict is None:
                    conflict = (witness_word[(cls, letter)], word, letter,
                                prev[1], delta)
                nxt.append((word2, w, el2, phi2, key2))
        frontier = nxt
        if conflict:
            break

    ranges = tuple((ln, lo, hi) for ln, (lo, hi) in sorted(range_by_length.items()))
    if conflict:
        return SynthesisFailure("conflict", refine_depth, verify_radius,
                                (conflict,), ranges, len(classes))
    fresh = tuple(key for key, ln in first_seen.items() if ln == enum_radius)
    if fresh:
        return SynthesisFailure("nonstabilizing", refine_depth, verify_radius,
                                fresh[:4], ranges, len(classes))

    edges = [(src, dst, letter)
             for (src, letter), (dst, _) in transitions.items()]
    refined = build_digraph(len(classes), sorted(edges), gs.letters)
    dphi = {classes[key]: key[1][-1] for key in classes}
    new_combing = Combing(refined, oracle, combing.genset_name,
                          verified_radius=min(combing.verified_radius, verify_radius))
    fn = CombableFunction(new_combing, dphi,
                          ("synthesized", refine_depth, verify_radius))
    mismatch = verify_conformance(fn, phi_oracle, verify_radius)
    if mismatch is not None:
        raise RuntimeError(f"synthesized weighting failed conformance at {mismatch!r}")
    return fn


def verify_conformance(fn: CombableFunction, phi_oracle: Callable,
                       radius: int) -> Optional[Word]:
    """First accepted word (length <= radius) where the path sum disagrees
    with the oracle, or None if the check passes exhaustively."""
    sums: dict[Word, int] = {}
    for word, v, el in fn.combing.iter_words(radius):
        total = fn.dphi[1] if not word else sums[word[:-1]] + fn.dphi[v]
        sums[word] = total
        if total != int(phi_oracle(el)):
            return word
    return None


@dataclass(frozen=True)
class LipschitzReport:
    left_constant: int
    right_constant: int
    left_by_shell: tuple[int, ...]
    right_by_shell: tuple[int, ...]
    trend_left: str
    trend_right: str
    radius: int


def _trend(shell_maxima: Sequence[int]) -> str:
    tail = [m for m in shell_maxima if m is not None]
    if len(tail) >= 3 and tail[-1] > tail[-2] > tail[-3] and tail[-1] > tail[0]:
        return "growing"
    return "stable"


def check_lipschitz(phi_oracle: Callable, oracle: GroupOracle, genset: str,
                    radius: int) -> LipschitzReport:
    """Exhaustive maxima of |phi(a s) - phi(a)| (left metric) and
    |phi(s a) - phi(a)| (right metric) over the ball; the reported constants
    are lower bounds for the true Lipschitz constants."""
    gs = oracle.genset(genset)
    ball = oracle.ball(genset, radius)
    left = [0] * (radius + 1)
    right = [0] * (radius + 1)
    for n in range(radius + 1):
        for a in ball.shells[n]:
            pa = int(phi_oracle(a))
            for letter in gs.letters:
                s = gs.elements[letter]
                left[n] = max(left[n], abs(int(phi_oracle(oracle.multiply(a, s))) - pa))
                right[n] = max(right[n], abs(int(phi_oracle(oracle.multiply(s, a))) - pa))
    return LipschitzReport(
        left_constant=max(left),
        right_constant=max(right),
        left_by_shell=tuple(left),
        right_by_shell=tuple(right),
        trend_left=_trend(left),
        trend_right=_trend(right),
        radius=radius,
    )


@dataclass(frozen=True)
class SubdivisionReport:
    max_defect: int
    witness: Optional[tuple]
    radius: int


def check_subdivision(fn: CombableFunction, radius: int) -> SubdivisionReport:
    """Max over accepted words w = u v (|w| <= radius) and all split points of
    |phi(w) - phi(u) - phi(v)|, the suffix evaluated through the oracle."""
    if radius > fn.combing.verified_radius:
        raise OutsideVerifiedRadius(
            f"radius {radius} exceeds the verified radius "
            f"{fn.combing.verified_radius}")
    oracle = fn.combing.oracle
    gs = fn.combing.genset
    worst = 0
    witness = None
    prefix_values: dict = {(): fn.dphi[1]}
    for word, v, _ in fn.combing.iter_words(radius):
        if word:
            prefix_values[word] = prefix_values[word[:-1]] + fn.dphi[v]
        total = prefix_values[word]
        for cut in range(1, len(word)):
            head = prefix_values[word[:cut]]
            tail_el = oracle.evaluate(word[cut:], fn.combing.genset_name)
            tail = fn.evaluate_element(tail_el)
            defect = abs(total - head - tail)
            if defect > worst:
                worst = defect
                witness = (word, cut)
    return SubdivisionReport(worst, witness, radius)
