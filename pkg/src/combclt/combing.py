"""Combings: prefix-closed regular languages of geodesics in bijection with
the group.

A Combing couples a word-acceptor digraph with a group oracle and records the
radius to which the geodesic/bijection properties have been exhaustively
verified.  Downstream consumers must not claim results past that radius
without re-validating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .digraph import (DirectedPath, LabeledDigraph, NotAccepted, Word, accept,
                      as_word, build_digraph, digraph_from_dict, digraph_to_dict)
from .groups import FreeGroup, GeneratingSet, GroupOracle, WrongKind


class ConeDepthExceeded(RuntimeError):
    pass


class OutsideVerifiedRadius(ValueError):
    pass


@dataclass
class Combing:
    digraph: LabeledDigraph
    oracle: GroupOracle
    genset_name: str
    verified_radius: int
    _word_of_element: dict = field(default_factory=dict, repr=False)
    _lookup_radius: int = field(default=0, repr=False)
    _lookup_frontier: list = field(default_factory=list, repr=False)

    @property
    def genset(self) -> GeneratingSet:
        return self.oracle.genset(self.genset_name)

    def iter_words(self, max_length: int) -> Iterator[tuple[Word, int, object]]:
        """Yield (word, end_vertex, element) for accepted words of length
        <= max_length, by increasing length."""
        gs = self.genset
        frontier = [((), 1, self.oracle.identity())]
        yield frontier[0]
        for _ in range(max_length):
            nxt = []
            for word, v, el in frontier:
                for letter, w in self.digraph.out_edges[v]:
                    item = (word + (letter,), w,
                            self.oracle.multiply(el, gs.elements[letter]))
                    nxt.append(item)
                    yield item
            frontier = nxt

    def element_of_word(self, word) -> object:
        path = accept(self.digraph, word)
        if not isinstance(path, DirectedPath):
            raise NotAccepted(f"word {word!r} rejected at index {path.halt_index}")
        return self.oracle.evaluate(as_word(word), self.genset_name)

    def _grow_lookup(self) -> None:
        gs = self.genset
        if not self._word_of_element:
            ident = self.oracle.identity()
            self._word_of_element[ident] = ()
            self._lookup_frontier = [((), 1, ident)]
        nxt = []
        for word, v, el in self._lookup_frontier:
            for letter, w in self.digraph.out_edges[v]:
                el2 = self.oracle.multiply(el, gs.elements[letter])
                nxt.append((word + (letter,), w, el2))
                self._word_of_element.setdefault(el2, nxt[-1][0])
        self._lookup_frontier = nxt
        self._lookup_radius += 1

    def word_of_element(self, element) -> Word:
        """The unique accepted word evaluating to ``element`` (looked up by
        exhaustive enumeration within the verified radius)."""
        if not self._word_of_element:
            self._grow_lookup()
        if element in self._word_of_element:
            return self._word_of_element[element]
        while self._lookup_radius < self.verified_radius:
            self._grow_lookup()
            if element in self._word_of_element:
                return self._word_of_element[element]
        raise OutsideVerifiedRadius(
            f"element {self.oracle.element_str(element)} not reached within the "
            f"verified radius {self.verified_radius}")


@dataclass(frozen=True)
class CombingValidation:
    ok: bool
    geodesic_ok: bool
    bijective_ok: bool
    radius: int
    first_counterexample: Optional[tuple]
    accepted_counts: tuple[int, ...]
    ball_counts: tuple[int, ...]


def reduced_word_combing(oracle: GroupOracle, genset: str = "standard") -> Combing:
    """The last-letter acceptor for the language of reduced words of a free
    group over its standard symmetric letters."""
    if not isinstance(oracle, FreeGroup):
        raise WrongKind("reduced-word combing requires a free group oracle")
    gs = oracle.genset(genset)
    if set(gs.letters) != set(oracle.gensets["standard"].letters):
        raise WrongKind("reduced-word combing requires the standard letters")
    letters = gs.letters
    index = {letter: i + 2 for i, letter in enumerate(letters)}
    edges = [(1, index[s], s) for s in letters]
    for s in letters:
        for t in letters:
            if t != gs.inverse_letter[s]:
                edges.append((index[s], index[t], t))
    digraph = build_digraph(1 + len(letters), edges, letters)
    return Combing(digraph, oracle, genset, verified_radius=oracle.max_ball_radius)


def _lex_first_tree(oracle: GroupOracle, gs: GeneratingSet, radius: int,
                    rank: dict):
    """Rank-words of the lexicographically first geodesics on the ball, plus
    the children map of the geodesic tree."""
    ball = oracle.ball(gs.name, radius)
    inv_elements = {s: oracle.inverse(gs.elements[s]) for s in gs.letters}
    rank_word: dict = {oracle.identity(): ()}
    for n in range(1, radius + 1):
        for g in ball.shells[n]:
            best = None
            for s in gs.letters:
                h = oracle.multiply(g, inv_elements[s])
                if ball.lengths.get(h) == n - 1:
                    hw = rank_word.get(h)
                    if hw is None:
                        continue
                    cand = hw + (rank[s],)
                    if best is None or cand < best:
                        best = cand
            rank_word[g] = best
    children: dict = {g: [] for g in rank_word}
    by_rank = {r: s for s, r in rank.items()}
    for g, w in rank_word.items():
        if not w:
            continue
        s = by_rank[w[-1]]
        parent = oracle.multiply(g, inv_elements[s])
        children[parent].append((w[-1], g))
    for lst in children.values():
        lst.sort()
    return ball, rank_word, children


def lex_first_combing(oracle: GroupOracle, genset: str = "standard",
                      letter_order: Optional[Sequence[str]] = None,
                      cone_depth: int = 2, verify_radius: int = 6,
                      max_cone_depth: int = 5) -> Combing:
    """Combing by lexicographically first geodesics, built empirically.

    The lex-first geodesic tree is computed on the ball of radius
    verify_radius + k; elements are classified by the labeled isomorphism type
    of their tree descendants to depth k (their depth-k cone type), and the
    quotient by cone type is taken as the acceptor.  The result is validated
    exhaustively to verify_radius; on failure k is increased up to
    max_cone_depth before giving up with ConeDepthExceeded.
    """
    gs = oracle.genset(genset)
    order = tuple(letter_order) if letter_order else gs.letters
    if set(order) != set(gs.letters):
        raise ValueError("letter_order must be a permutation of the genset letters")
    rank = {s: i for i, s in enumerate(order)}
    by_rank = {i: s for s, i in rank.items()}
    last_failure = "no attempt made"
    for k in range(cone_depth, max_cone_depth + 1):
        build_radius = verify_radius + k
        ball, rank_word, children = _lex_first_tree(oracle, gs, build_radius, rank)
        # depth-k cone types; after round j the types are valid for elements
        # of length <= build_radius - j, ending exactly at verify_radius
        types: dict = {g: 0 for g in rank_word}
        valid = build_radius
        for _ in range(k):
            intern: dict = {}
            new_types: dict = {}
            for n in range(valid):
                for g in ball.shells[n]:
                    key = tuple((r, types[child]) for r, child in children[g])
                    new_types[g] = intern.setdefault(key, len(intern))
            types = new_types
            valid -= 1
        identity = oracle.identity()
        max_typed = verify_radius
        trans: dict = {}
        conflict = None
        for n in range(max_typed):
            for g in ball.shells[n]:
                for r, child in children[g]:
                    key = (types[g], r) if g != identity else ("initial", r)
                    tchild = types.get(child)
                    if tchild is None:
                        continue
                    if key in trans and trans[key] != tchild:
                        conflict = (key, trans[key], tchild)
                        break
                    trans[key] = tchild
            if conflict:
                break
        if conflict:
            last_failure = f"cone depth {k}: inconsistent transition at {conflict[0]}"
            continue
        seen_inner = {types[g] for n in range(1, max_typed)
                      for g in ball.shells[n]}
        seen_outer = {types[g] for g in ball.shells[max_typed]}
        fresh = seen_outer - seen_inner
        if fresh:
            raise ConeDepthExceeded(
                f"cone types did not stabilize by radius {verify_radius}: "
                f"{len(fresh)} new type(s) on the outer shell; raise verify_radius")
        state_of = {t: i + 2 for i, t in enumerate(sorted(seen_inner | seen_outer))}
        edges = []
        for (src_t, r), dst_t in trans.items():
            src = 1 if src_t == "initial" else state_of[src_t]
            edges.append((src, state_of[dst_t], by_rank[r]))
        digraph = build_digraph(1 + len(state_of), sorted(edges), gs.letters)
        combing = Combing(digraph, oracle, genset, verified_radius=verify_radius)
        report = validate_combing(combing, verify_radius)
        if report.ok:
            return combing
        last_failure = (f"cone depth {k}: validation failed with counterexample "
                        f"{report.first_counterexample}")
    raise ConeDepthExceeded(f"no cone depth <= {max_cone_depth} validated: {last_failure}")


def validate_combing(combing: Combing, radius: int) -> CombingValidation:
    """Exhaustively check geodesity and bijectivity on the ball of ``radius``.

    Prefix-closure is structural (every state accepts).  Reports the first
    counterexample word on failure instead of raising.
    """
    oracle = combing.oracle
    ball = oracle.ball(combing.genset_name, radius)
    seen: dict = {}
    accepted_counts = [0] * (radius + 1)
    geodesic_ok = True
    bijective_ok = True
    first: Optional[tuple] = None
    for word, _, el in combing.iter_words(radius):
        n = len(word)
        accepted_counts[n] += 1
        if ball.lengths.get(el) != n:
            geodesic_ok = False
            if first is None:
                first = ("non-geodesic", word)
        if el in seen:
            bijective_ok = False
            if first is None:
                first = ("duplicate", seen[el], word)
        else:
            seen[el] = word
    ball_counts = [len(s) for s in ball.shells[:radius + 1]]
    if accepted_counts != ball_counts:
        bijective_ok = False
        if first is None:
            n = next(i for i, (a, b) in enumerate(zip(accepted_counts, ball_counts))
                     if a != b)
            first = ("count-mismatch", n, accepted_counts[n], ball_counts[n])
    ok = geodesic_ok and bijective_ok
    return CombingValidation(ok, geodesic_ok, bijective_ok, radius, first,
                             tuple(accepted_counts), tuple(ball_counts))


def combing_to_dict(combing: Combing, group_doc: Optional[dict] = None) -> dict:
    doc = {
        "digraph": digraph_to_dict(combing.digraph),
        "genset": combing.genset_name,
        "verified_radius": combing.verified_radius,
    }
    if group_doc is not None:
        doc["group"] = group_doc
    return doc


def combing_from_dict(doc: dict, oracle: GroupOracle) -> Combing:
    return Combing(digraph_from_dict(doc["digraph"]), oracle,
                   doc["genset"], int(doc["verified_radius"]))
