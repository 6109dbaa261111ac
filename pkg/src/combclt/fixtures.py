"""Named fixtures: concrete groups with prebuilt combing acceptors, plus
engineered chain digraphs and a seeded random-digraph generator for property
suites.

Group fixtures: F2_standard, F2_enlarged, PSL2Z, ZxZ2_L, ZxZ2_Lprime,
F2xF2_concat.  Digraph fixtures: coin, two_component, periodic_core,
mixed_rates.  Hand-built acceptors are validated on a ball at load time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .combing import Combing, lex_first_combing, reduced_word_combing, validate_combing
from .digraph import LabeledDigraph, build_digraph
from .groups import (CyclicGroup, DirectProduct, FreeGroup, FreeProductCyclic,
                     GroupOracle)
from .quasimorphism import max_disjoint_count, max_disjoint_multi


class UnknownFixture(KeyError):
    pass


@dataclass
class Fixture:
    name: str
    oracle: GroupOracle
    genset: str
    combing: Combing
    description: str
    phi_oracle: Optional[Callable] = None  # the fixture's distinguished weight function


GROUP_FIXTURES = ("F2_standard", "F2_enlarged", "PSL2Z", "ZxZ2_L",
                  "ZxZ2_Lprime", "F2xF2_concat")
DIGRAPH_FIXTURES = ("coin", "two_component", "periodic_core", "mixed_rates")

FIXTURE_VALIDATE_RADIUS = 8


def _f2_oracle() -> FreeGroup:
    oracle = FreeGroup(2, max_ball_radius=12)
    oracle.add_genset("S2", [("a", "a"), ("A", "A"), ("b", "b"), ("B", "B"),
                             ("ab", "ab"), ("BA", "BA")])
    oracle.add_genset("S_asym", [("a", "a"), ("A", "A"), ("b", "b"), ("B", "B"),
                                 ("ab", "ab")])
    return oracle


def s2_length(element: str) -> int:
    """|g| over the enlarged letters {a, A, b, B, ab, BA} of the free group,
    computed from the reduced word: every disjoint ab/BA block contracts to a
    single letter (cross-checked exhaustively against breadth-first search)."""
    return len(element) - max_disjoint_multi(element, ("ab", "BA"))


def asym_length(element: str) -> int:
    """|g| over {a, A, b, B, ab} from the reduced word."""
    return len(element) - max_disjoint_count(element, "ab")


def asym_inverse_length(element: str) -> int:
    """|g| over the inverse set {a, A, b, B, BA} from the reduced word."""
    return len(element) - max_disjoint_count(element, "BA")


def zxz2_weight(element) -> int:
    """The fixture weight on Z x Z/2: n on a^n, 0 on a^n b."""
    word, torsion = element
    if torsion:
        return 0
    if not word:
        return 0
    return len(word) if word[0] == "a" else -len(word)


def _validated(combing: Combing, radius: int) -> Combing:
    report = validate_combing(combing, radius)
    if not report.ok:
        raise AssertionError(
            f"fixture combing failed validation: {report.first_counterexample}")
    combing.verified_radius = max(combing.verified_radius, radius)
    return combing


@lru_cache(maxsize=None)
def fixture(name: str) -> Fixture:
    if name == "F2_standard":
        oracle = _f2_oracle()
        combing = reduced_word_combing(oracle, "standard")
        return Fixture(name, oracle, "standard", combing,
                       "free group of rank 2, reduced words over a, A, b, B")
    if name == "F2_enlarged":
        oracle = _f2_oracle()
        combing = lex_first_combing(
            oracle, "S2", letter_order=("a", "A", "b", "B", "ab", "BA"),
            cone_depth=2, verify_radius=6)
        return Fixture(name, oracle, "S2", combing,
                       "free group of rank 2 over the six letters "
                       "a, A, b, B, ab, BA; lex-first geodesics",
                       phi_oracle=s2_length)
    if name == "PSL2Z":
        oracle = FreeProductCyclic((2, 3), letters=("s", "t"), max_ball_radius=24)
        dg = build_digraph(4, [
            (1, 2, "s"), (1, 3, "t"), (1, 4, "T"),
            (2, 3, "t"), (2, 4, "T"),
            (3, 2, "s"), (4, 2, "s"),
        ], ("s", "t", "T"))
        combing = _validated(Combing(dg, oracle, "standard", 0),
                             FIXTURE_VALIDATE_RADIUS)
        return Fixture(name, oracle, "standard", combing,
                       "Z/2 * Z/3 with letters s, t, T = t^2; alternating words")
    if name in ("ZxZ2_L", "ZxZ2_Lprime"):
        oracle = DirectProduct([FreeGroup(1, max_ball_radius=64),
                                CyclicGroup(2, letter="b")],
                               max_ball_radius=40)
        if name == "ZxZ2_L":
            dg = build_digraph(6, [
                (1, 2, "a"), (1, 3, "A"), (1, 4, "b"),
                (2, 2, "a"), (3, 3, "A"),
                (4, 5, "a"), (4, 6, "A"),
                (5, 5, "a"), (6, 6, "A"),
            ], ("a", "A", "b"))
            combing = _validated(Combing(dg, oracle, "standard", 0), 12)
            return Fixture(name, oracle, "standard", combing,
                           "Z x Z/2 over a, A, b; words a^n and b a^n",
                           phi_oracle=zxz2_weight)
        oracle.add_genset("Lprime", [("b", "b"), ("ab", "ab"), ("AB", "Ab")])
        dg = build_digraph(6, [
            (1, 2, "ab"), (1, 3, "AB"), (1, 4, "b"),
            (2, 2, "ab"), (3, 3, "AB"),
            (4, 5, "ab"), (4, 6, "AB"),
            (5, 5, "ab"), (6, 6, "AB"),
        ], ("b", "ab", "AB"))
        combing = _validated(Combing(dg, oracle, "Lprime", 0), 12)
        return Fixture(name, oracle, "Lprime", combing,
                       "Z x Z/2 over b, (ab), (ab)^-1; words (ab)^n and b (ab)^n",
                       phi_oracle=zxz2_weight)
    if name == "F2xF2_concat":
        oracle = DirectProduct(
            [FreeGroup(2), FreeGroup(2)],
            rename=[{}, {"a": "c", "A": "C", "b": "d", "B": "D"}],
            max_ball_radius=9)
        first = {"a": 2, "A": 3, "b": 4, "B": 5}
        second = {"c": 6, "C": 7, "d": 8, "D": 9}
        inv = {"a": "A", "A": "a", "b": "B", "B": "b",
               "c": "C", "C": "c", "d": "D", "D": "d"}
        edges = []
        for s, v in {**first, **second}.items():
            edges.append((1, v, s))
        for s, v in first.items():
            for t, w in first.items():
                if t != inv[s]:
                    edges.append((v, w, t))
            for t, w in second.items():
                edges.append((v, w, t))
        for s, v in second.items():
            for t, w in second.items():
                if t != inv[s]:
                    edges.append((v, w, t))
        dg = build_digraph(9, edges, tuple("aAbBcCdD"))
        combing = _validated(Combing(dg, oracle, "standard", 0), 7)
        return Fixture(name, oracle, "standard", combing,
                       "F2 x F2; concatenations u v of reduced words in the "
                       "two factors (a geodesic combing that is not almost "
                       "semisimple)")
    raise UnknownFixture(name)


def digraph_fixture(name: str) -> tuple[LabeledDigraph, dict[int, int]]:
    """Engineered chain fixtures: (digraph, weight vector)."""
    if name == "coin":
        dg = build_digraph(3, [
            (1, 2, "h"), (1, 3, "t"),
            (2, 2, "h"), (2, 3, "t"),
            (3, 2, "h"), (3, 3, "t"),
        ], ("h", "t"))
        return dg, {1: 0, 2: 0, 3: 1}
    if name == "two_component":
        dg = build_digraph(5, [
            (1, 2, "p"), (1, 3, "q"), (1, 4, "r"), (1, 5, "s"),
            (2, 2, "p"), (2, 3, "q"), (3, 2, "p"), (3, 3, "q"),
            (4, 4, "p"), (4, 5, "q"), (5, 4, "p"), (5, 5, "q"),
        ], ("p", "q", "r", "s"))
        return dg, {1: 0, 2: 0, 3: 1, 4: 0, 5: 1}
    if name == "periodic_core":
        dg = build_digraph(3, [
            (1, 2, "w"),
            (2, 3, "x"), (2, 3, "y"),
            (3, 2, "x"), (3, 2, "y"),
        ], ("w", "x", "y"))
        return dg, {1: 0, 2: 0, 3: 1}
    if name == "mixed_rates":
        dg = build_digraph(4, [
            (1, 2, "p"), (1, 4, "q"),
            (2, 3, "p"), (2, 3, "q"), (3, 2, "p"), (3, 2, "q"),
            (4, 4, "p"), (4, 4, "q"), (4, 4, "r"),
        ], ("p", "q", "r"))
        return dg, {1: 0, 2: 0, 3: 1, 4: 1}
    raise UnknownFixture(name)


def random_digraph(seed: int, max_vertices: int = 12,
                   alphabet: tuple[str, ...] = ("p", "q", "r", "s")) -> LabeledDigraph:
    """Seeded random valid digraph: a spanning arborescence from the initial
    vertex plus random extra edges (never back into vertex 1)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_vertices + 1))
    free_slots = {v: list(alphabet) for v in range(1, n + 1)}
    edges = []
    for v in range(2, n + 1):
        # each vertex consumes one earlier slot and brings |alphabet| fresh
        # ones, so a free earlier slot always exists
        candidates = [u for u in range(1, v) if free_slots[u]]
        u = candidates[int(rng.integers(len(candidates)))]
        letter = free_slots[u].pop(int(rng.integers(len(free_slots[u]))))
        edges.append((u, v, letter))
    extra = int(rng.integers(1, 2 * n + 1))
    for _ in range(extra):
        sources = [u for u in range(1, n + 1) if free_slots[u]]
        if not sources:
            break
        u = sources[int(rng.integers(len(sources)))]
        letter = free_slots[u].pop(int(rng.integers(len(free_slots[u]))))
        v = int(rng.integers(2, n + 1))
        edges.append((u, v, letter))
    return build_digraph(n, edges, alphabet)
