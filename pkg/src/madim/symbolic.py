"""Subshifts of finite type over pair alphabets.

A one-step SFT is presented by a set of pair symbols (u, v) with
u < a_size, v < b_size, together with a transition relation on the
symbols.  The relation may be the complete one (the ``FULL`` token), in
which case it is never materialized.  All counting is done with exact
integer arithmetic; logs are taken only at the reporting layer.

Memory-k SFTs are supported by recoding into blocks on the caller's
side: replace the symbol set by the allowed k-blocks and let the
transition relation encode (k-1)-overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    DuplicatePair,
    EmptySubshift,
    EnumerationCapExceeded,
    InvalidSymbol,
    StateBlowup,
)

#: Token for the complete transition relation pair_symbols x pair_symbols.
FULL = "full"

ENUMERATION_WORD_CAP = 10_000_000
ENUMERATION_LENGTH_CAP = 16
STATE_CAP = 1 << 16

PairSymbol = tuple[int, int]
Word = tuple[PairSymbol, ...]


@dataclass(frozen=True)
class PairSFT:
    """Essential presentation of a one-step SFT over a pair alphabet.

    ``symbols`` is sorted; ``edges[i]`` lists successor indices of
    ``symbols[i]`` in increasing order, or is None when the relation is
    complete.
    """

    a_size: int
    b_size: int
    symbols: tuple[PairSymbol, ...]
    full: bool
    edges: tuple[tuple[int, ...], ...] | None

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    @property
    def transitions(self):
        """The relation as ``FULL`` or an explicit set of symbol pairs."""
        if self.full:
            return FULL
        return {
            (self.symbols[i], self.symbols[j])
            for i, row in enumerate(self.edges)
            for j in row
        }

    def successors(self, i: int):
        if self.full:
            return range(len(self.symbols))
        return self.edges[i]

    def index(self, sym: PairSymbol) -> int:
        return _symbol_index(self)[sym]

    def is_allowed_word(self, word: Word) -> bool:
        """True iff ``word`` is a legal block of this SFT."""
        idx = _symbol_index(self)
        if len(word) == 0:
            return False
        try:
            path = [idx[s] for s in word]
        except KeyError:
            return False
        if self.full:
            return True
        return all(q in self.edges[p] for p, q in zip(path, path[1:]))


@dataclass(frozen=True)
class WordSet:
    """Length-N words of an SFT, possibly count-only."""

    length: int
    count: int
    words: tuple[Word, ...] | None = None


@dataclass(frozen=True)
class SoficAutomaton:
    """Deterministic presentation of the projection to the B coordinate.

    States are subsets of pair symbols produced by the subset
    construction; ``transitions`` is a partial map (state index, label)
    -> state index.  State 0 is the initial state; every state accepts.
    """

    b_size: int
    states: tuple[frozenset, ...]
    initial: int
    transitions: dict

    @property
    def n_states(self) -> int:
        return len(self.states)

    def step(self, state: int, label: int):
        return self.transitions.get((state, label))

    def accepts(self, word) -> bool:
        q = self.initial
        for label in word:
            q = self.step(q, label)
            if q is None:
                return False
        return True

    def language(self, n: int) -> set:
        """All accepted words of length ``n`` (small n only)."""
        frontier = {(): self.initial}
        for _ in range(n):
            nxt = {}
            for word, q in frontier.items():
                for label in range(self.b_size):
                    q2 = self.step(q, label)
                    if q2 is not None:
                        nxt[word + (label,)] = q2
            frontier = nxt
        return set(frontier)


def make_sft(a_size, b_size, pair_symbols, transitions=FULL) -> PairSFT:
    """Build a pruned essential presentation from raw input.

    Raises InvalidSymbol for out-of-range symbols or transitions over
    undeclared pairs, DuplicatePair for repeated symbols, EmptySubshift
    if pruning removes everything.
    """
    if a_size < 1 or b_size < 1:
        raise InvalidSymbol(f"alphabet sizes must be >= 1, got ({a_size}, {b_size})")
    syms = [tuple(p) for p in pair_symbols]
    if not syms:
        raise EmptySubshift("no pair symbols given")
    seen = set()
    for p in syms:
        if len(p) != 2:
            raise InvalidSymbol(f"pair symbol {p!r} is not a (u, v) pair")
        u, v = p
        if not (isinstance(u, int) and isinstance(v, int)):
            raise InvalidSymbol(f"pair symbol {p!r} is not integer-valued")
        if not (0 <= u < a_size and 0 <= v < b_size):
            raise InvalidSymbol(f"pair symbol {p!r} out of range for sizes ({a_size}, {b_size})")
        if p in seen:
            raise DuplicatePair(f"pair symbol {p!r} declared twice")
        seen.add(p)
    symbols = tuple(sorted(seen))

    if isinstance(transitions, str):
        if transitions != FULL:
            raise InvalidSymbol(f"unknown transitions token {transitions!r}")
        return PairSFT(a_size, b_size, symbols, True, None)

    index = {s: i for i, s in enumerate(symbols)}
    adj = {i: set() for i in range(len(symbols))}
    for entry in transitions:
        p, q = tuple(entry[0]), tuple(entry[1])
        if p not in index or q not in index:
            raise InvalidSymbol(f"transition ({p!r} -> {q!r}) uses an undeclared pair symbol")
        adj[index[p]].add(index[q])

    # prune to the essential part: every kept symbol needs an outgoing
    # and an incoming transition among kept symbols
    alive = set(range(len(symbols)))
    while True:
        incoming = {i: 0 for i in alive}
        removed = set()
        for i in alive:
            outs = [j for j in adj[i] if j in alive]
            if not outs:
                removed.add(i)
            for j in outs:
                incoming[j] += 1
        removed |= {i for i in alive if incoming[i] == 0}
        if not removed:
            break
        alive -= removed
        if not alive:
            raise EmptySubshift("pruning to the essential presentation removed every symbol")

    kept = sorted(alive)
    remap = {old: new for new, old in enumerate(kept)}
    new_symbols = tuple(symbols[i] for i in kept)
    new_edges = tuple(
        tuple(sorted(remap[j] for j in adj[i] if j in alive)) for i in kept
    )
    return PairSFT(a_size, b_size, new_symbols, False, new_edges)


@lru_cache(maxsize=None)
def _symbol_index(sft: PairSFT) -> dict:
    return {s: i for i, s in enumerate(sft.symbols)}


@lru_cache(maxsize=None)
def count_words(sft: PairSFT, n: int) -> int:
    """Exact number of length-n words, by transfer products."""
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    k = sft.n_symbols
    if sft.full:
        return k ** n
    # u[p] = number of paths of the remaining length starting at p
    u = [1] * k
    for _ in range(n - 1):
        u = [sum(u[q] for q in sft.edges[p]) for p in range(k)]
    return sum(u)


@lru_cache(maxsize=None)
def enumerate_words(
    sft: PairSFT,
    n: int,
    word_cap: int = ENUMERATION_WORD_CAP,
    length_cap: int = ENUMERATION_LENGTH_CAP,
) -> WordSet:
    """Materialize all length-n words in lexicographic symbol-index order."""
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    if n > length_cap:
        raise EnumerationCapExceeded(f"length {n} exceeds enumeration length cap {length_cap}")
    total = count_words(sft, n)
    if total > word_cap:
        raise EnumerationCapExceeded(f"{total} words at length {n} exceed cap {word_cap}")
    out = []

    def extend(prefix):
        if len(prefix) == n:
            out.append(tuple(sft.symbols[i] for i in prefix))
            return
        succ = sft.successors(prefix[-1]) if prefix else range(sft.n_symbols)
        for j in succ:
            extend(prefix + (j,))

    extend(())
    assert len(out) == total
    return WordSet(length=n, count=total, words=tuple(out))


def lexmin_word(sft: PairSFT, n: int) -> Word:
    """Lexicographically smallest length-n word (exists: SFT is essential)."""
    path = []

    def extend(prefix):
        if len(prefix) == n:
            return list(prefix)
        succ = sft.successors(prefix[-1]) if prefix else range(sft.n_symbols)
        for j in succ:
            got = extend(prefix + [j])
            if got is not None:
                return got
        return None

    path = extend([])
    assert path is not None
    return tuple(sft.symbols[i] for i in path)


def project_word(word: Word) -> tuple:
    """Second-coordinate projection of a pair word."""
    return tuple(v for _, v in word)


@lru_cache(maxsize=None)
def project_automaton(sft: PairSFT, state_cap: int = STATE_CAP) -> SoficAutomaton:
    """Determinize the projection to B via the subset construction.

    The start subset is the full symbol set; because the presentation
    is essential this recognizes exactly the projected length-N
    languages for every N.  The raw subset automaton is then merged
    down to its coarsest behavior-equivalent quotient (every state
    accepts, so states are distinguished by transition behavior only);
    each quotient state keeps its first-discovered subset as the
    representative follower set.
    """
    k = sft.n_symbols
    start = frozenset(range(k))
    order = {start: 0}
    states = [start]
    transitions = {}
    frontier = [start]
    while frontier:
        nxt = []
        for subset in frontier:
            si = order[subset]
            for label in range(sft.b_size):
                target = frozenset(
                    q
                    for p in subset
                    for q in sft.successors(p)
                    if sft.symbols[q][1] == label
                )
                if not target:
                    continue
                if target not in order:
                    if len(order) >= state_cap:
                        raise StateBlowup(
                            f"subset construction exceeded state cap {state_cap}"
                        )
                    order[target] = len(states)
                    states.append(target)
                    nxt.append(target)
                transitions[(si, label)] = order[target]
        frontier = nxt

    classes, class_transitions = _moore_quotient(len(states), sft.b_size, transitions)
    representatives = {}
    for i, cls in enumerate(classes):
        representatives.setdefault(cls, states[i])
    symbol_states = tuple(
        frozenset(sft.symbols[i] for i in representatives[cls])
        for cls in range(len(representatives))
    )
    return SoficAutomaton(
        b_size=sft.b_size,
        states=symbol_states,
        initial=classes[0],
        transitions=class_transitions,
    )


def _moore_quotient(n_states: int, n_labels: int, transitions: dict):
    """Coarsest partition of an all-accepting partial DFA by behavior.

    Returns (class index per state, quotient transition map); class
    indices are numbered by first appearance in state order, so the
    quotient is deterministic in the input ordering.
    """
    classes = [0] * n_states
    while True:
        signatures = {}
        next_classes = [0] * n_states
        for s in range(n_states):
            sig = (
                classes[s],
                tuple(
                    classes[transitions[(s, label)]] if (s, label) in transitions else None
                    for label in range(n_labels)
                ),
            )
            if sig not in signatures:
                signatures[sig] = len(signatures)
            next_classes[s] = signatures[sig]
        if next_classes == classes:
            break
        classes = next_classes
    # renumber by first appearance so class 0 is the initial state's class
    seen = {}
    for s in range(n_states):
        if classes[s] not in seen:
            seen[classes[s]] = len(seen)
    classes = [seen[c] for c in classes]
    quotient = {}
    for (s, label), t in transitions.items():
        quotient[(classes[s], label)] = classes[t]
    return classes, quotient


@lru_cache(maxsize=None)
def count_projected_words(sft: PairSFT, n: int) -> int:
    """Exact number of length-n words of the projected (sofic) shift."""
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    aut = project_automaton(sft)
    return automaton_word_count(aut, n)


def automaton_word_count(aut: SoficAutomaton, n: int) -> int:
    """Number of length-n words accepted from the initial state."""
    weights = {aut.initial: 1}
    for _ in range(n):
        nxt = {}
        for q, w in weights.items():
            for label in range(aut.b_size):
                q2 = aut.step(q, label)
                if q2 is not None:
                    nxt[q2] = nxt.get(q2, 0) + w
        weights = nxt
    return sum(weights.values())


def fiber_count(sft: PairSFT, v) -> int:
    """Exact number of A-words over a given projected word v.

    Counts pair words whose second coordinates spell v; returns 0 when
    v is not in the projected language.
    """
    v = tuple(v)
    if len(v) < 1:
        raise ValueError("projected word must have length >= 1")
    for label in v:
        if not (isinstance(label, int) and 0 <= label < sft.b_size):
            raise InvalidSymbol(f"label {label!r} out of range for b_size {sft.b_size}")
    k = sft.n_symbols
    x = [1 if sft.symbols[p][1] == v[0] else 0 for p in range(k)]
    for label in v[1:]:
        if sft.full:
            total = sum(x)
            x = [total if sft.symbols[q][1] == label else 0 for q in range(k)]
        else:
            y = [0] * k
            for p in range(k):
                if x[p]:
                    for q in sft.edges[p]:
                        if sft.symbols[q][1] == label:
                            y[q] += x[p]
            x = y
        if not any(x):
            return 0
    return sum(x)


def fiber_blocks(sft: PairSFT, v, word_cap: int = ENUMERATION_WORD_CAP) -> tuple:
    """All pair words over the projected word v, in lexicographic order."""
    v = tuple(v)
    total = fiber_count(sft, v)
    if total > word_cap:
        raise EnumerationCapExceeded(f"fiber of {v} has {total} words, over cap {word_cap}")
    out = []

    def extend(prefix):
        m = len(prefix)
        if m == len(v):
            out.append(tuple(sft.symbols[i] for i in prefix))
            return
        succ = sft.successors(prefix[-1]) if prefix else range(sft.n_symbols)
        for j in succ:
            if sft.symbols[j][1] == v[m]:
                extend(prefix + (j,))

    extend(())
    assert len(out) == total
    return tuple(out)


@lru_cache(maxsize=None)
def sup_fiber_count(
    sft: PairSFT, n: int, cap: int = ENUMERATION_WORD_CAP
) -> tuple[int, tuple]:
    """Maximum fiber cardinality over projected words of length n.

    Returns (count, witness); the witness is the lexicographically
    smallest maximizer.  Explores the projected-label tree with exact
    transfer vectors, pruning dead prefixes.
    """
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    if sft.b_size ** n > cap:
        raise EnumerationCapExceeded(
            f"label tree size {sft.b_size}**{n} exceeds cap {cap}"
        )
    k = sft.n_symbols
    best = 0
    best_word = None

    def descend(depth, vec, prefix):
        nonlocal best, best_word
        if depth == n:
            total = sum(vec)
            if total > best:
                best = total
                best_word = prefix
            return
        for label in range(sft.b_size):
            if depth == 0:
                nxt = [1 if sft.symbols[p][1] == label else 0 for p in range(k)]
            elif sft.full:
                tot = sum(vec)
                nxt = [tot if sft.symbols[q][1] == label else 0 for q in range(k)]
            else:
                nxt = [0] * k
                for p in range(k):
                    if vec[p]:
                        for q in sft.edges[p]:
                            if sft.symbols[q][1] == label:
                                nxt[q] += vec[p]
            if any(nxt):
                descend(depth + 1, nxt, prefix + (label,))

    descend(0, [0] * k, ())
    assert best_word is not None  # the SFT is essential, so some word exists
    return best, best_word
