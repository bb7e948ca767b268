"""Topological, sofic-projection and conditional entropy, exact and finite-N.

Exact values come from the largest nonnegative eigenvalue of a transfer
structure (power iteration with a per-component fallback).  Finite-N
values are normalized log-counts; by submultiplicativity their minimum
is a certified upper bound for the limit, which is what the ``fekete``
fields report.  All entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, NonConvergence
from .symbolic import (
    PairSFT,
    SoficAutomaton,
    automaton_word_count,
    count_words,
    project_automaton,
    sup_fiber_count,
)

POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000
STABILIZATION_TOL = 1e-12

DEFAULT_N_RANGE = tuple(range(1, 9))


@dataclass(frozen=True)
class EntropyEstimate:
    """Per-N normalized log-counts plus exact value when available."""

    per_n: tuple[tuple[int, float], ...]
    fekete_upper: float
    spectral_exact: float | None
    method: str

    @property
    def last(self) -> float:
        return self.per_n[-1][1]

    @property
    def value(self) -> float:
        """Best available value: exact if known, else the Fekete bound."""
        return self.spectral_exact if self.spectral_exact is not None else self.fekete_upper


def fekete_extrapolate(values) -> tuple[float, float, bool]:
    """(min a_N/N, a_Nmax/Nmax, monotone flag) for a subadditive sample.

    The minimum of a_N/N certifies an upper bound on lim a_N/N.
    """
    values = sorted(values)
    if not values:
        raise EmptyInput("fekete_extrapolate needs at least one (N, a_N) entry")
    ratios = []
    for n, a in values:
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        if a < 0:
            raise ValueError(f"a_N must be >= 0, got {a}")
        ratios.append(a / n)
    upper = min(ratios)
    last = ratios[-1]
    monotone = all(x >= y - 1e-15 for x, y in zip(ratios, ratios[1:]))
    return upper, last, monotone


def _power_iteration(mat: np.ndarray, tol: float, max_iter: int) -> float:
    """Spectral radius of a nonnegative matrix via shifted power iteration.

    Iterates with I + A (primitive whenever A is irreducible) and
    returns the radius of A.  Raises NonConvergence on stagnation.
    """
    n = mat.shape[0]
    if n == 1:
        return float(mat[0, 0])
    shifted = mat + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    prev = 0.0
    for _ in range(max_iter):
        y = shifted @ x
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        x = y / lam
        if abs(lam - prev) <= tol * max(1.0, lam):
            return lam - 1.0
        prev = lam
    raise NonConvergence(f"power iteration did not converge in {max_iter} steps")


def _strongly_connected_components(adj) -> list[list[int]]:
    """Tarjan SCCs, iterative to avoid recursion limits."""
    n = len(adj)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = [0]

    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def spectral_radius(
    matrix, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER
) -> float:
    """Largest nonnegative eigenvalue of a nonnegative integer matrix.

    Falls back to per-component iteration when the whole matrix is
    reducible enough to stall the global iteration.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("spectral_radius needs a square matrix")
    if mat.shape[0] == 0:
        return 0.0
    try:
        return _power_iteration(mat, tol, max_iter)
    except NonConvergence:
        pass
    adj = [[j for j in range(mat.shape[0]) if mat[i, j] > 0] for i in range(mat.shape[0])]
    best = 0.0
    for comp in _strongly_connected_components(adj):
        sub = mat[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        best = max(best, _power_iteration(sub, tol, max_iter))
    return best


def adjacency_matrix(sft: PairSFT) -> np.ndarray:
    k = sft.n_symbols
    if sft.full:
        return np.ones((k, k))
    mat = np.zeros((k, k))
    for p in range(k):
        for q in sft.edges[p]:
            mat[p, q] = 1.0
    return mat


def automaton_matrix(aut: SoficAutomaton) -> np.ndarray:
    """Label-count adjacency of the deterministic presentation."""
    m = aut.n_states
    mat = np.zeros((m, m))
    for (q, _label), q2 in aut.transitions.items():
        mat[q, q2] += 1.0
    return mat


def topological_entropy(sft: PairSFT, n_range=DEFAULT_N_RANGE) -> EntropyEstimate:
    """Entropy of the SFT: log of the transfer spectral radius."""
    lam = spectral_radius(adjacency_matrix(sft))
    per_n = tuple((n, math.log(count_words(sft, n)) / n) for n in n_range)
    upper = min(v for _, v in per_n)
    return EntropyEstimate(
        per_n=per_n,
        fekete_upper=upper,
        spectral_exact=math.log(lam),
        method="sft-spectral",
    )


def sofic_entropy(aut: SoficAutomaton, n_range=DEFAULT_N_RANGE) -> EntropyEstimate:
    """Entropy of the projected shift from its deterministic presentation."""
    lam = spectral_radius(automaton_matrix(aut))
    per_n = tuple((n, math.log(automaton_word_count(aut, n)) / n) for n in n_range)
    upper = min(v for _, v in per_n)
    return EntropyEstimate(
        per_n=per_n,
        fekete_upper=upper,
        spectral_exact=math.log(lam),
        method="sofic-spectral",
    )


def conditional_entropy(sft: PairSFT, n_range=DEFAULT_N_RANGE) -> EntropyEstimate:
    """Growth rate of the largest projection fiber.

    The per-N sequence is a certified upper bound scheme (the counts
    are submultiplicative); an exact value is only claimed when the
    sampled values have already stabilized.
    """
    per_n = tuple(
        (n, math.log(sup_fiber_count(sft, n)[0]) / n) for n in n_range
    )
    upper = min(v for _, v in per_n)
    vals = [v for _, v in per_n]
    stabilized = max(vals) - min(vals) <= STABILIZATION_TOL
    return EntropyEstimate(
        per_n=per_n,
        fekete_upper=upper,
        spectral_exact=upper if stabilized else None,
        method="stabilized" if stabilized else "fekete-bound",
    )


def projection_entropy(sft: PairSFT, n_range=DEFAULT_N_RANGE) -> EntropyEstimate:
    """Convenience wrapper: entropy of the determinized projection."""
    return sofic_entropy(project_automaton(sft), n_range)


