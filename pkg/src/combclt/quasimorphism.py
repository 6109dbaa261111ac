"""Counting functions and quasimorphisms on free groups.

Small (disjoint-copy) counting follows the greedy convention: scan left to
right, count an occurrence of the pattern, resume after it.  The dynamic
program ``max_disjoint_count`` is the independent oracle for the greedy
count.  Counting quasimorphisms are phi_sigma = c_sigma - c_{sigma^-1};
generating-set quasimorphisms are psi_S = |.|_S - |.|_{S^-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .digraph import Word, as_word
from .groups import FreeGroup, GroupOracle, RadiusExceeded, WrongKind


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Pattern:
    sigma: Word
    inverse: Word

    def __post_init__(self):
        if len(self.sigma) < 2:
            raise ValueError("pattern length must be at least 2")
        if len(self.inverse) != len(self.sigma):
            raise ValueError("inverse pattern must have the same length")

    @property
    def label(self) -> str:
        return "".join(self.sigma)


def make_pattern(oracle: GroupOracle, letters, genset: str = "standard") -> Pattern:
    word = as_word(letters)
    return Pattern(word, oracle.word_inverse(word, genset))


def greedy_count(word, pattern) -> int:
    """Disjoint copies of ``pattern`` counted by the greedy scan: each time a
    copy completes, counting resumes after it."""
    w = as_word(word)
    sigma = _pattern_letters(pattern)
    L = len(sigma)
    count = 0
    i = 0
    while i + L <= len(w):
        if w[i:i + L] == sigma:
            count += 1
            i += L
        else:
            i += 1
    return count


def max_disjoint_count(word, pattern) -> int:
    """Maximal number of disjoint copies of ``pattern``, by dynamic program."""
    w = as_word(word)
    sigma = _pattern_letters(pattern)
    L = len(sigma)
    best = [0] * (len(w) + 1)
    for i in range(1, len(w) + 1):
        best[i] = best[i - 1]
        if i >= L and w[i - L:i] == sigma:
            best[i] = max(best[i], best[i - L] + 1)
    return best[-1]


def max_disjoint_multi(word, patterns: Sequence) -> int:
    """Maximal number of disjoint copies drawn from a set of patterns."""
    w = as_word(word)
    sigmas = [_pattern_letters(p) for p in patterns]
    best = [0] * (len(w) + 1)
    for i in range(1, len(w) + 1):
        best[i] = best[i - 1]
        for sigma in sigmas:
            L = len(sigma)
            if i >= L and w[i - L:i] == sigma:
                best[i] = max(best[i], best[i - L] + 1)
    return best[-1]


def big_count(word, pattern) -> int:
    """All occurrences, overlaps allowed (the big counting convention)."""
    w = as_word(word)
    sigma = _pattern_letters(pattern)
    L = len(sigma)
    return sum(1 for i in range(len(w) - L + 1) if w[i:i + L] == sigma)


def _pattern_letters(pattern) -> Word:
    if isinstance(pattern, Pattern):
        return pattern.sigma
    return as_word(pattern)


def greedy_transition_table(pattern, alphabet: Sequence[str]):
    """Transition table of the greedy scanner as a finite automaton.

    Returns (next_state, emits) dicts mapping (state, letter) for states
    0..len(sigma)-1; ``emits`` marks transitions completing a disjoint copy
    (the scanner then resets).  Built from the pattern's failure links.
    """
    sigma = _pattern_letters(pattern)
    L = len(sigma)
    pi = [0] * L
    k = 0
    for i in range(1, L):
        while k > 0 and sigma[i] != sigma[k]:
            k = pi[k - 1]
        if sigma[i] == sigma[k]:
            k += 1
        pi[i] = k
    nxt = {}
    emits = {}
    for state in range(L):
        for letter in alphabet:
            p = state
            while p > 0 and sigma[p] != letter:
                p = pi[p - 1]
            if sigma[p] == letter:
                p += 1
            if p == L:
                nxt[(state, letter)] = 0
                emits[(state, letter)] = True
            else:
                nxt[(state, letter)] = p
                emits[(state, letter)] = False
    return nxt, emits


def counting_values(oracle: FreeGroup, pattern: Pattern, slack: int,
                    radius: int, budget: int = 20_000_000) -> dict:
    """c_sigma over every element of the ball, maximized over all paths from
    the identity of length <= |element| + slack.

    The search walks the Cayley graph with the greedy scanner as extra state;
    path count per element equals |element| - path_length + copies, maximized.
    """
    if not isinstance(oracle, FreeGroup):
        raise WrongKind("counting functions are implemented for free groups")
    gs = oracle.gensets["standard"]
    ball = oracle.ball("standard", radius + slack)
    sigma = pattern.sigma
    L = len(sigma)
    nxt, emits = greedy_transition_table(pattern, gs.letters)
    ops = len(ball.lengths) * (radius + slack + 1) * L * len(gs.letters)
    if ops > budget:
        raise SearchBudgetExceeded(f"estimated {ops} transitions exceeds budget {budget}")
    # dp[element][scan_state] = max copies along some path of current length
    dp: dict = {oracle.identity(): {0: 0}}
    best: dict = {}
    for t in range(radius + slack + 1):
        for el, states in dp.items():
            if ball.lengths[el] > radius:
                continue
            target = ball.lengths[el]
            if target <= t <= target + slack:
                for copies in states.values():
                    value = target - t + copies
                    if value > best.get(el, -10**9):
                        best[el] = value
        if t == radius + slack:
            break
        ndp: dict = {}
        for el, states in dp.items():
            for letter in gs.letters:
                el2 = oracle.multiply(el, gs.elements[letter])
                if el2 not in ball.lengths:
                    continue
                slot = ndp.setdefault(el2, {})
                for state, copies in states.items():
                    s2 = nxt[(state, letter)]
                    c2 = copies + (1 if emits[(state, letter)] else 0)
                    if c2 > slot.get(s2, -1):
                        slot[s2] = c2
        dp = ndp
    return best


def counting_function(oracle: FreeGroup, pattern: Pattern, element,
                      slack: int = 0, budget: int = 20_000_000) -> int:
    """c_sigma(element).  With slack 0 this is the greedy count in the reduced
    word; with slack > 0 all paths up to |element| + slack are searched."""
    if not isinstance(oracle, FreeGroup):
        raise WrongKind("counting functions are implemented for free groups")
    if slack == 0:
        return greedy_count(element, pattern)
    n = len(element)
    if n + slack > oracle.max_ball_radius:
        raise RadiusExceeded(
            f"need ball radius {n + slack} > maximum {oracle.max_ball_radius}")
    values = counting_values(oracle, pattern, slack, n, budget=budget)
    return values[element]


class CountingQuasimorphism:
    """phi_sigma = c_sigma - c_{sigma inverse} on a free group (slack 0:
    counts taken in the reduced word)."""

    def __init__(self, oracle: FreeGroup, pattern: Pattern):
        if not isinstance(oracle, FreeGroup):
            raise WrongKind("counting quasimorphisms require a free group")
        self.oracle = oracle
        self.pattern = pattern

    def __call__(self, element) -> int:
        return (greedy_count(element, self.pattern.sigma)
                - greedy_count(element, self.pattern.inverse))

    @property
    def label(self) -> str:
        return f"phi_{self.pattern.label}"


class BigCountingQuasimorphism:
    """Big (overlapping) counting antisymmetrization; used as the Hoelder
    diagnostic's well-behaved comparison fixture."""

    def __init__(self, oracle: FreeGroup, pattern: Pattern):
        self.oracle = oracle
        self.pattern = pattern

    def __call__(self, element) -> int:
        return big_count(element, self.pattern.sigma) - big_count(element, self.pattern.inverse)

    @property
    def label(self) -> str:
        return f"bigphi_{self.pattern.label}"


def counting_qm(oracle: FreeGroup, pattern: Pattern) -> CountingQuasimorphism:
    return CountingQuasimorphism(oracle, pattern)


class GensetQuasimorphism:
    """psi_S(g) = |g|_S - |g|_{S^-1}; the second term is |g^-1|_S."""

    def __init__(self, oracle: GroupOracle, genset: str):
        self.oracle = oracle
        self.genset = genset

    def __call__(self, element) -> int:
        o = self.oracle
        return (o.word_length(element, self.genset)
                - o.word_length(o.inverse(element), self.genset))

    @property
    def label(self) -> str:
        return f"psi_{self.genset}"


def genset_qm(oracle: GroupOracle, genset: str) -> GensetQuasimorphism:
    return GensetQuasimorphism(oracle, genset)


@dataclass(frozen=True)
class DefectReport:
    lower_bound: int
    witness: Optional[tuple]
    radius: int


def defect_estimate(phi: Callable, oracle: GroupOracle, radius: int,
                    genset: str = "standard") -> DefectReport:
    """Exhaustive max of |phi(a) + phi(b) - phi(ab)| over the radius ball.

    The result is a lower bound for the true defect (which is a supremum over
    the whole group).
    """
    ball = oracle.ball(genset, radius)
    elements = [el for shell in ball.shells[:radius + 1] for el in shell]
    values = {el: int(phi(el)) for el in elements}
    worst = 0
    witness = None
    for a in elements:
        pa = values[a]
        for b in elements:
            ab = oracle.multiply(a, b)
            d = abs(pa + values[b] - int(phi(ab)))
            if d > worst:
                worst = d
                witness = (a, b)
    return DefectReport(worst, witness, radius)


def gromov_product(oracle: GroupOracle, x, y, genset: str = "standard") -> Fraction:
    """(|x| + |y| - |x^-1 y|) / 2, exactly (a half-integer)."""
    lx = oracle.word_length(x, genset)
    ly = oracle.word_length(y, genset)
    lxy = oracle.word_length(oracle.multiply(oracle.inverse(x), y), genset)
    return Fraction(lx + ly - lxy, 2)


@dataclass(frozen=True)
class HolderReport:
    a: str
    levels: tuple  # (gromov_product_level, max_difference, witness_pair)
    fitted_C: Optional[float]
    fitted_c: Optional[float]
    violation: bool
    violation_witnesses: tuple
    radius: int


def _periodic_probe_words(oracle: FreeGroup, radius: int) -> list[str]:
    """Powers of single letters and of reduced two-letter blocks; their
    prefixes populate every Gromov-product level deterministically."""
    gs = oracle.gensets["standard"]
    words = []
    for s in gs.letters:
        words.append(s * radius)
    for s in gs.letters:
        for t in gs.letters:
            if t != gs.inverse_letter[s] and t != s:
                block = s + t
                words.append((block * radius)[:radius])
    return words


def holder_diagnostic(psi: Callable, oracle: FreeGroup, a, radius: int,
                      pair_budget: int = 200, seed: int = 0) -> HolderReport:
    """Probe |Delta_a psi(x) - Delta_a psi(y)| against the Gromov product
    (x|y), where Delta_a psi(g) = psi(g) - psi(a g).

    Pairs come from deterministic periodic probes (prefix pairs along periodic
    words, which follow axes) plus seeded random splitting pairs at every
    level.  Differences must decay exponentially in the product for a Hoelder
    function; any persistent nonzero difference at top levels is a violation
    no matter how well the rest fits.
    """
    import numpy as np

    if not isinstance(oracle, FreeGroup):
        raise WrongKind("the Hoelder diagnostic is implemented for free groups")
    a_el = a if isinstance(a, str) else oracle.evaluate(a)
    rng = np.random.default_rng(seed)
    gs = oracle.gensets["standard"]
    letters = gs.letters

    def delta(x: str) -> int:
        return int(psi(x)) - int(psi(oracle.multiply(a_el, x)))

    def random_tail(prefix: str, length: int) -> str:
        w = prefix
        while len(w) < length:
            options = [s for s in letters
                       if not (w and s == gs.inverse_letter[w[-1]])]
            w = w + options[rng.integers(len(options))]
        return w

    pairs_by_level: dict[int, list] = {p: [] for p in range(radius)}
    for probe in _periodic_probe_words(oracle, radius):
        for p in range(radius):
            x = probe[:p]
            for extra in (1, 2):
                if p + extra <= radius:
                    pairs_by_level[p].append((x, probe[:p + extra]))
    for p in range(radius):
        tries = 0
        while len(pairs_by_level[p]) < pair_budget and tries < 4 * pair_budget:
            tries += 1
            u = random_tail("", p)
            succ = [s for s in letters if not (u and s == gs.inverse_letter[u[-1]])]
            if len(succ) < 2:
                continue
            i, j = rng.choice(len(succ), size=2, replace=False)
            x = random_tail(u + succ[int(i)], int(rng.integers(p + 1, radius + 1)))
            y = random_tail(u + succ[int(j)], int(rng.integers(p + 1, radius + 1)))
            pairs_by_level[p].append((x, y))

    levels = []
    for p in range(radius):
        worst = 0
        witness = None
        for x, y in pairs_by_level[p]:
            if gromov_product(oracle, x, y) != p:
                continue
            d = abs(delta(x) - delta(y))
            if d > worst:
                worst = d
                witness = (x, y)
        levels.append((p, worst, witness))

    top = [lv for lv in levels[-3:]]
    violation = any(m > 0 for _, m, _ in top)
    violation_witnesses = tuple((p, m, w) for p, m, w in top if m > 0)
    positive = [(p, m) for p, m, _ in levels if m > 0]
    fitted_C = fitted_c = None
    if positive and not violation:
        ps = np.array([p for p, _ in positive], dtype=float)
        ms = np.log(np.array([m for _, m in positive], dtype=float))
        design = np.column_stack([np.ones_like(ps), -ps])
        (logC, c), *_ = np.linalg.lstsq(design, ms, rcond=None)
        fitted_C, fitted_c = float(np.exp(logC)), float(c)
    elif not positive:
        fitted_C, fitted_c = 0.0, 0.0
    return HolderReport(oracle.element_str(a_el), tuple(levels), fitted_C,
                        fitted_c, violation, violation_witnesses, radius)
