"""Exact word arithmetic and ball enumeration for the fixture groups.

Supported kinds: free groups (elements are reduced words as str), finite
cyclic groups (elements are ints mod m), free products of finite cyclic
groups (elements are alternating syllable tuples), and direct products
(elements are tuples of factor elements).  Equality of elements is equality
of normal forms.

A generating set maps letter symbols to group elements; symbols may be
compound (a single letter standing for a product of standard generators,
e.g. "ab").  Balls are enumerated breadth-first, cached per generating set,
and never silently truncated: asking past the configured maximum radius
raises RadiusExceeded.  Oracles are immutable apart from those caches;
build the balls you need single-threaded, after which concurrent readers
are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .digraph import Word, as_word


class UnknownLetter(ValueError):
    pass


class RadiusExceeded(ValueError):
    pass


class WrongKind(TypeError):
    pass


LOWER = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GeneratingSet:
    name: str
    letters: tuple[str, ...]
    elements: dict
    inverse_letter: dict

    @property
    def symmetric(self) -> bool:
        return all(self.inverse_letter.get(s) is not None for s in self.letters)

    def element(self, letter: str):
        try:
            return self.elements[letter]
        except KeyError:
            raise UnknownLetter(f"letter {letter!r} not in generating set {self.name!r}")


class Ball:
    """Exhaustive enumeration of group elements by word length."""

    def __init__(self, genset: str):
        self.genset = genset
        self.radius = 0
        self.lengths: dict = {}
        self.shells: list[list] = []

    def shell_sizes(self) -> list[int]:
        return [len(s) for s in self.shells]


class GroupOracle:
    """Base class; subclasses implement identity/multiply/inverse."""

    kind = "abstract"

    def __init__(self, max_ball_radius: int = 12):
        self.max_ball_radius = max_ball_radius
        self.gensets: dict[str, GeneratingSet] = {}
        self._balls: dict[str, Ball] = {}

    # -- group operations -------------------------------------------------
    def identity(self):
        raise NotImplementedError

    def multiply(self, x, y):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def element_str(self, x) -> str:
        return repr(x)

    # -- generating sets ---------------------------------------------------
    def add_genset(self, name: str, letter_words: Sequence[tuple[str, Union[str, Sequence[str]]]]) -> GeneratingSet:
        """Register a generating set.

        ``letter_words`` maps each letter symbol to a word over the standard
        letters; inverse pairing between symbols is inferred from the group
        elements and recorded (a symbol without an inverse in the set is
        allowed: generation is only required as a semigroup).
        """
        elements = {}
        for symbol, word in letter_words:
            elements[symbol] = self.evaluate(word, "standard")
        inverse_letter: dict[str, Optional[str]] = {}
        by_element = {}
        for symbol, el in elements.items():
            by_element.setdefault(el, symbol)
        for symbol, el in elements.items():
            inverse_letter[symbol] = by_element.get(self.inverse(el))
        gs = GeneratingSet(name, tuple(s for s, _ in letter_words), elements, inverse_letter)
        self.gensets[name] = gs
        return gs

    def genset(self, name: str) -> GeneratingSet:
        try:
            return self.gensets[name]
        except KeyError:
            raise UnknownLetter(f"no generating set named {name!r}")

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, word: Union[str, Sequence[str]], genset: str = "standard"):
        gs = self.genset(genset)
        x = self.identity()
        for letter in as_word(word):
            x = self.multiply(x, gs.element(letter))
        return x

    def word_inverse(self, word: Union[str, Sequence[str]], genset: str = "standard") -> Word:
        """The reversed, letter-inverted word; requires every letter to have
        an inverse letter in the set."""
        gs = self.genset(genset)
        out = []
        for letter in reversed(as_word(word)):
            inv = gs.inverse_letter.get(letter)
            if inv is None:
                raise UnknownLetter(
                    f"letter {letter!r} has no inverse letter in {genset!r}")
            out.append(inv)
        return tuple(out)

    # -- balls and word length ----------------------------------------------
    def exact_length(self, element, genset: str) -> Optional[int]:
        """Closed-form word length when one is available, else None."""
        return None

    def ball(self, genset: str = "standard", radius: int = 0) -> Ball:
        if radius > self.max_ball_radius:
            raise RadiusExceeded(
                f"radius {radius} exceeds configured maximum {self.max_ball_radius}")
        ball = self._balls.get(genset)
        if ball is None:
            ball = Ball(genset)
            ident = self.identity()
            ball.lengths[ident] = 0
            ball.shells.append([ident])
            self._balls[genset] = ball
        gs = self.genset(genset)
        while ball.radius < radius:
            frontier = ball.shells[ball.radius]
            nxt = []
            r = ball.radius + 1
            for x in frontier:
                for letter in gs.letters:
                    y = self.multiply(x, gs.elements[letter])
                    if y not in ball.lengths:
                        ball.lengths[y] = r
                        nxt.append(y)
            ball.shells.append(nxt)
            ball.radius = r
        return ball

    def word_length(self, element, genset: str = "standard") -> int:
        exact = self.exact_length(element, genset)
        if exact is not None:
            return exact
        ball = self.ball(genset, 0)
        if element in ball.lengths:
            return ball.lengths[element]
        while ball.radius < self.max_ball_radius:
            ball = self.ball(genset, ball.radius + 1)
            if element in ball.lengths:
                return ball.lengths[element]
        raise RadiusExceeded(
            f"element {self.element_str(element)} not found within radius "
            f"{self.max_ball_radius} of generating set {genset!r}")


class FreeGroup(GroupOracle):
    """Free group of finite rank; elements are reduced words as strings,
    with inverse letters written in upper case."""

    kind = "free"

    def __init__(self, rank: int, max_ball_radius: int = 12):
        super().__init__(max_ball_radius)
        if not (1 <= rank <= len(LOWER)):
            raise ValueError("rank out of range")
        self.rank = rank
        self.generators = LOWER[:rank]
        letters = []
        for g in self.generators:
            letters.append((g, g))
            letters.append((g.upper(), g.upper()))
        self._standard_letters = tuple(s for s, _ in letters)
        self.gensets["standard"] = GeneratingSet(
            "standard",
            self._standard_letters,
            {s: s for s in self._standard_letters},
            {s: s.swapcase() for s in self._standard_letters},
        )

    def identity(self):
        return ""

    def multiply(self, x: str, y: str) -> str:
        i = len(x)
        j = 0
        while i > 0 and j < len(y) and x[i - 1] == y[j].swapcase():
            i -= 1
            j += 1
        return x[:i] + y[j:]

    def inverse(self, x: str) -> str:
        return x[::-1].swapcase()

    def element_str(self, x: str) -> str:
        return x if x else "e"

    def exact_length(self, element: str, genset: str) -> Optional[int]:
        if genset == "standard":
            return len(element)
        return None


class CyclicGroup(GroupOracle):
    """Z/mZ; elements are ints in range(m)."""

    kind = "cyclic"

    def __init__(self, order: int, letter: str = "x", max_ball_radius: int = 64):
        super().__init__(max_ball_radius)
        if order < 2:
            raise ValueError("order must be >= 2")
        self.order = order
        self.letter = letter
        letters = [(letter, 1)]
        if order > 2:
            letters.append((letter.upper(), order - 1))
        self.gensets["standard"] = GeneratingSet(
            "standard",
            tuple(s for s, _ in letters),
            {s: v for s, v in letters},
            {letter: (letter if order == 2 else letter.upper()),
             **({letter.upper(): letter} if order > 2 else {})},
        )

    def identity(self):
        return 0

    def multiply(self, x: int, y: int) -> int:
        return (x + y) % self.order

    def inverse(self, x: int) -> int:
        return (-x) % self.order

    def element_str(self, x: int) -> str:
        if x == 0:
            return "e"
        return self.letter if x == 1 else f"{self.letter}^{x}"


class FreeProductCyclic(GroupOracle):
    """Free product Z/m1 * Z/m2 * ...; elements are alternating syllable
    tuples ((generator_index, exponent), ...) with 1 <= exponent < order."""

    kind = "free_product_cyclic"

    def __init__(self, orders: Sequence[int], letters: Optional[Sequence[str]] = None,
                 max_ball_radius: int = 20):
        super().__init__(max_ball_radius)
        self.orders = tuple(int(m) for m in orders)
        if any(m < 2 for m in self.orders):
            raise ValueError("all orders must be >= 2")
        if letters is None:
            letters = ["s", "t", "u", "v"][:len(self.orders)]
        self.letters = tuple(letters)
        specs = []
        inv = {}
        elements = {}
        for i, (m, letter) in enumerate(zip(self.orders, self.letters)):
            elements[letter] = ((i, 1),)
            specs.append(letter)
            if m == 2:
                inv[letter] = letter
            else:
                up = letter.upper()
                elements[up] = ((i, m - 1),)
                specs.append(up)
                inv[letter] = up
                inv[up] = letter
        self.gensets["standard"] = GeneratingSet("standard", tuple(specs), elements, inv)

    def identity(self):
        return ()

    def multiply(self, x: tuple, y: tuple) -> tuple:
        left = list(x)
        right = list(y)
        while left and right and left[-1][0] == right[0][0]:
            gen = left[-1][0]
            exp = (left[-1][1] + right[0][1]) % self.orders[gen]
            left.pop()
            right.pop(0)
            if exp:
                left.append((gen, exp))
                break
        return tuple(left) + tuple(right)

    def inverse(self, x: tuple) -> tuple:
        return tuple((g, self.orders[g] - e) for g, e in reversed(x))

    def element_str(self, x: tuple) -> str:
        if not x:
            return "e"
        return "".join(self.letters[g] if e == 1 else f"{self.letters[g]}^{e}"
                       for g, e in x)


class DirectProduct(GroupOracle):
    """Direct product of oracles; elements are tuples of factor elements.

    Standard letters are the factors' standard letters embedded with identity
    in the other coordinates; ``rename`` may relabel a factor's letters to
    keep symbols distinct (e.g. the second free factor as c, C, d, D).
    """

    kind = "direct_product"

    def __init__(self, factors: Sequence[GroupOracle],
                 rename: Optional[Sequence[dict]] = None,
                 max_ball_radius: int = 12):
        super().__init__(max_ball_radius)
        self.factors = list(factors)
        renames = list(rename) if rename else [{} for _ in self.factors]
        letters = []
        elements = {}
        inv = {}
        for fi, (factor, mapping) in enumerate(zip(self.factors, renames)):
            std = factor.gensets["standard"]
            for sym in std.letters:
                new = mapping.get(sym, sym)
                if new in elements:
                    raise ValueError(f"duplicate letter {new!r} in direct product")
                letters.append(new)
                elements[new] = self._embed(fi, std.elements[sym])
            for sym in std.letters:
                new = mapping.get(sym, sym)
                partner = std.inverse_letter.get(sym)
                inv[new] = mapping.get(partner, partner) if partner else None
        self.gensets["standard"] = GeneratingSet("standard", tuple(letters), elements, inv)

    def _embed(self, factor_index: int, el) -> tuple:
        return tuple(el if i == factor_index else f.identity()
                     for i, f in enumerate(self.factors))

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def multiply(self, x: tuple, y: tuple) -> tuple:
        return tuple(f.multiply(a, b) for f, a, b in zip(self.factors, x, y))

    def inverse(self, x: tuple) -> tuple:
        return tuple(f.inverse(a) for f, a in zip(self.factors, x))

    def element_str(self, x: tuple) -> str:
        return "(" + ", ".join(f.element_str(a) for f, a in zip(self.factors, x)) + ")"


def oracle_from_dict(doc: dict) -> GroupOracle:
    """Build an oracle from a group description document."""
    kind = doc["kind"]
    radius = int(doc.get("max_ball_radius", 12))
    if kind == "free":
        oracle: GroupOracle = FreeGroup(int(doc["rank"]), max_ball_radius=radius)
    elif kind == "cyclic":
        oracle = CyclicGroup(int(doc["order"]), letter=doc.get("letter", "x"),
                             max_ball_radius=radius)
    elif kind == "free_product_cyclic":
        oracle = FreeProductCyclic([int(m) for m in doc["orders"]],
                                   letters=doc.get("letters"),
                                   max_ball_radius=radius)
    elif kind == "direct_product":
        factors = [oracle_from_dict(f) for f in doc["factors"]]
        oracle = DirectProduct(factors, rename=doc.get("rename"),
                               max_ball_radius=radius)
    else:
        raise WrongKind(f"unknown group kind {kind!r}")
    for name, letter_words in doc.get("gensets", {}).items():
        oracle.add_genset(name, [(str(s), w) for s, w in letter_words])
    return oracle
