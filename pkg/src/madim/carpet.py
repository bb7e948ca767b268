"""Carpet systems over pair subshifts: approximate squares and cover counts.

A carpet system couples a pair subshift with digit bases a > b >= 2.
Covers are counted in symbolic coding space: approximate squares with
distinct index prefixes are disjoint, so the minimal cover equals the
number of realized prefix classes and the product formulas below are
exact.  Digit-expansion boundary identifications on the real line are
deliberately ignored; they only perturb counts by bounded constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import (
    DEFAULT_N_RANGE,
    conditional_entropy,
    sofic_entropy,
    topological_entropy,
)
from .errors import (
    CenterBlockNotAllowed,
    ConditionalNotConverged,
    InvalidScale,
    ScaleOrder,
    ThetaOutOfRange,
)
from .symbolic import (
    PairSFT,
    Word,
    count_projected_words,
    count_words,
    enumerate_words,
    fiber_blocks,
    fiber_count,
    lexmin_word,
    project_automaton,
    project_word,
    sup_fiber_count,
)

#: scales this close (relatively) to an exact power resolve to that power
INDEX_SNAP = 1e-9

ORACLE_CAP = 10_000_000
CROSS_CHECK_CAP = 100_000

CASE1 = "case1"
CASE2 = "case2"

CLOSED_FORM_TOL = 1e-9


@dataclass(frozen=True)
class CarpetSystem:
    a: int
    b: int
    omega: PairSFT

    def __post_init__(self):
        if not (self.a > self.b >= 2):
            raise InvalidScale(f"need a > b >= 2, got a={self.a}, b={self.b}")
        if self.omega.a_size != self.a or self.omega.b_size != self.b:
            raise InvalidScale(
                "subshift alphabet sizes must match the carpet bases "
                f"({self.omega.a_size}, {self.omega.b_size}) != ({self.a}, {self.b})"
            )


@dataclass(frozen=True)
class ScaleIndices:
    l1: int
    l2: int
    r: float


@dataclass(frozen=True)
class ApproxSquare:
    """Center data of an approximate square: per-position blocks of Omega|_N."""

    n: int
    r: float
    blocks: tuple[Word, ...]


@dataclass(frozen=True)
class CoverCount:
    count: int
    log_count: float
    case_tag: str


def _log_index(r: float, base: int) -> int:
    """Smallest l with base**-l <= r, snapping exact powers.

    A scale within INDEX_SNAP (relative, in log units) of an exact
    power base**-m resolves to l = m; this is the left-closed boundary
    convention and it also absorbs float representation error of
    values like 1/9.
    """
    t = -math.log(r) / math.log(base)
    nearest = round(t)
    if abs(t - nearest) <= INDEX_SNAP * max(1.0, abs(t)):
        return int(nearest)
    return math.ceil(t)


def scale_indices(r, a: int, b: int) -> ScaleIndices:
    """Base-a and base-b scale indices of r in (0, 1]."""
    r = float(r)
    if not (0.0 < r <= 1.0):
        raise InvalidScale(f"scale must lie in (0, 1], got {r}")
    return ScaleIndices(l1=_log_index(r, a), l2=_log_index(r, b), r=r)


def approx_square(system: CarpetSystem, n: int, r, blocks) -> ApproxSquare:
    """Validated center for an approximate square of side r."""
    idx = scale_indices(r, system.a, system.b)
    blocks = tuple(tuple(w) for w in blocks)
    need = max(idx.l1, idx.l2)
    if len(blocks) < need:
        raise CenterBlockNotAllowed(
            f"center needs {need} blocks at scale {float(r)}, got {len(blocks)}"
        )
    for m, block in enumerate(blocks, start=1):
        if len(block) != n or not system.omega.is_allowed_word(block):
            raise CenterBlockNotAllowed(f"center block {m} is not an allowed length-{n} word")
    return ApproxSquare(n=n, r=float(r), blocks=blocks)


def _scale_pair(system: CarpetSystem, r, rho) -> tuple[ScaleIndices, ScaleIndices]:
    if not float(rho) < float(r):
        raise ScaleOrder(f"need rho < r, got rho={float(rho)}, r={float(r)}")
    return (
        scale_indices(r, system.a, system.b),
        scale_indices(rho, system.a, system.b),
    )


def _check_center(system: CarpetSystem, n: int, center, upto: int) -> tuple[Word, ...]:
    center = tuple(tuple(w) for w in center)
    if len(center) < upto:
        raise CenterBlockNotAllowed(
            f"center must provide blocks 1..{upto}, got {len(center)}"
        )
    for m, block in enumerate(center, start=1):
        if len(block) != n or not system.omega.is_allowed_word(block):
            raise CenterBlockNotAllowed(f"center block {m} is not an allowed length-{n} word")
    return center


def cover_count_formula(system: CarpetSystem, n: int, center, r, rho) -> CoverCount:
    """Exact prefix-class count of the minimal cover, by the product formula.

    With index pairs (l1r, l2r) for r and (l1p, l2p) for rho, the count
    multiplies the fiber sizes of the center's middle y-blocks with
    powers of the word counts; which blocks are "middle" depends on the
    interleaving of the four indices (case tag).
    """
    sft = system.omega
    idx_r, idx_p = _scale_pair(system, r, rho)
    center = _check_center(system, n, center, idx_r.l2)
    case2 = idx_p.l1 <= idx_r.l2
    count = 1
    fiber_upto = idx_p.l1 if case2 else idx_r.l2
    for m in range(idx_r.l1 + 1, fiber_upto + 1):
        count *= fiber_count(sft, project_word(center[m - 1]))
    if case2:
        count *= count_projected_words(sft, n) ** (idx_p.l2 - idx_r.l2)
        tag = CASE2
    else:
        count *= count_words(sft, n) ** (idx_p.l1 - idx_r.l2)
        count *= count_projected_words(sft, n) ** (idx_p.l2 - idx_p.l1)
        tag = CASE1
    return CoverCount(count=count, log_count=math.log(count), case_tag=tag)


def cover_count_oracle(
    system: CarpetSystem,
    n: int,
    center,
    r,
    rho,
    cap: int = ORACLE_CAP,
) -> CoverCount:
    """Brute-force prefix-class count of the minimal cover.

    Enumerates, per block position, every allowed word meeting the
    center's constraints and collects the distinct class components
    (full block up to index l1(rho), y-projection up to l2(rho)).
    Blocks at distinct positions vary independently in the coding
    space, so the class total is the product of the per-position set
    sizes; on small instances the product is cross-checked against a
    full Cartesian enumeration of class tuples.
    """
    sft = system.omega
    idx_r, idx_p = _scale_pair(system, r, rho)
    center = _check_center(system, n, center, idx_r.l2)
    case2 = idx_p.l1 <= idx_r.l2

    per_position = []
    for m in range(1, idx_p.l2 + 1):
        if m <= idx_r.l1:
            candidates = (center[m - 1],)
        elif m <= idx_r.l2:
            candidates = fiber_blocks(sft, project_word(center[m - 1]), word_cap=cap)
        else:
            candidates = enumerate_words(sft, n, word_cap=cap).words
        if m <= idx_p.l1:
            to_class = lambda block: block
        else:
            to_class = project_word
        per_position.append((candidates, to_class))

    count = 1
    for candidates, to_class in per_position:
        count *= len({to_class(block) for block in candidates})

    total_candidates = 1
    for candidates, _ in per_position:
        total_candidates *= len(candidates)
    if 0 < total_candidates <= CROSS_CHECK_CAP and per_position:
        # joint enumeration over all block choices; positions being
        # independent, this must reproduce the per-position product
        classes = {()}
        for candidates, to_class in per_position:
            classes = {
                prefix + (to_class(block),)
                for prefix in classes
                for block in candidates
            }
        assert len(classes) == count

    tag = CASE2 if case2 else CASE1
    return CoverCount(count=count, log_count=math.log(count), case_tag=tag)


def sup_cover_count(
    system: CarpetSystem, n: int, r, rho
) -> tuple[CoverCount, tuple[Word, ...]]:
    """Largest cover count over all centers, with a maximizing center.

    Blocks at distinct positions are independent, so maximizing each
    middle-block fiber independently is exact; the witness repeats the
    maximizing projected word there and pads with the lexicographically
    smallest allowed word.
    """
    sft = system.omega
    idx_r, idx_p = _scale_pair(system, r, rho)
    case2 = idx_p.l1 <= idx_r.l2
    supfib, wit_v = sup_fiber_count(sft, n)
    fiber_upto = idx_p.l1 if case2 else idx_r.l2
    n_fiber = fiber_upto - idx_r.l1

    count = supfib ** n_fiber
    if case2:
        count *= count_projected_words(sft, n) ** (idx_p.l2 - idx_r.l2)
        tag = CASE2
    else:
        count *= count_words(sft, n) ** (idx_p.l1 - idx_r.l2)
        count *= count_projected_words(sft, n) ** (idx_p.l2 - idx_p.l1)
        tag = CASE1

    pad = lexmin_word(sft, n)
    wit_block = fiber_blocks(sft, wit_v)[0]
    blocks = []
    for m in range(1, idx_r.l2 + 1):
        if idx_r.l1 < m <= fiber_upto:
            blocks.append(wit_block)
        else:
            blocks.append(pad)
    return (
        CoverCount(count=count, log_count=math.log(count), case_tag=tag),
        tuple(blocks),
    )


@dataclass(frozen=True)
class ClosedFormDims:
    """Closed-form dimensions of a carpet system.

    When the conditional entropy has not stabilized, madim and
    h_conditional are reported as intervals and the point fields are
    None; uniform_fibres is then only set if the interval is tight
    enough to decide it.
    """

    madim: float | None
    mmdim: float
    h_omega: float
    h_omega_prime: float
    h_conditional: float | None
    uniform_fibres: bool | None
    madim_interval: tuple[float, float] | None = None
    h_conditional_interval: tuple[float, float] | None = None

    @property
    def exact(self) -> bool:
        return self.madim is not None


def entropies(system: CarpetSystem, n_range=DEFAULT_N_RANGE):
    """(h_omega, h_omega_prime, conditional EntropyEstimate) for a system."""
    h = topological_entropy(system.omega, n_range)
    hp = sofic_entropy(project_automaton(system.omega), n_range)
    cond = conditional_entropy(system.omega, n_range)
    return h, hp, cond


def closed_form_dims(
    system: CarpetSystem, mode: str = "exact", n_range=DEFAULT_N_RANGE
) -> ClosedFormDims:
    """Mean Assouad dimension and metric mean dimension, in closed form.

    madim = cond/log a + h'/log b and mmdim = h/log a + (1/log b -
    1/log a) h'.  uniform_fibres records whether h = h' + cond within
    tolerance, which is exactly when the two dimensions agree.
    """
    if mode not in ("exact", "interval"):
        raise ValueError(f"mode must be 'exact' or 'interval', got {mode!r}")
    la, lb = math.log(system.a), math.log(system.b)
    h_est, hp_est, cond_est = entropies(system, n_range)
    h = h_est.spectral_exact
    hp = hp_est.spectral_exact
    mmdim = h / la + (1.0 / lb - 1.0 / la) * hp

    if cond_est.spectral_exact is not None:
        cond = cond_est.spectral_exact
        madim = cond / la + hp / lb
        uniform = abs(h - hp - cond) < CLOSED_FORM_TOL
        return ClosedFormDims(
            madim=madim,
            mmdim=mmdim,
            h_omega=h,
            h_omega_prime=hp,
            h_conditional=cond,
            uniform_fibres=uniform,
        )

    if mode == "exact":
        raise ConditionalNotConverged(
            "conditional entropy did not stabilize over the sampled N range; "
            "rerun in interval mode or extend the range"
        )
    # certified bracket: factor counting gives cond >= h - h'; the
    # Fekete minimum certifies the upper end
    cond_lo = max(0.0, h - hp)
    cond_hi = cond_est.fekete_upper
    interval = (cond_lo / la + hp / lb, cond_hi / la + hp / lb)
    if cond_hi - cond_lo < CLOSED_FORM_TOL:
        uniform = abs(h - hp - cond_lo) < CLOSED_FORM_TOL
    else:
        uniform = None
    return ClosedFormDims(
        madim=None,
        mmdim=mmdim,
        h_omega=h,
        h_omega_prime=hp,
        h_conditional=None,
        uniform_fibres=uniform,
        madim_interval=interval,
        h_conditional_interval=(cond_lo, cond_hi),
    )


def transition_theta(system: CarpetSystem) -> float:
    """Parameter where the spectrum becomes constant: log b / log a."""
    return math.log(system.b) / math.log(system.a)


def realizable_index_scales(a: int, b: int, l_max: int):
    """One representative scale per realizable index pair with l1, l2 <= l_max.

    The (l1, l2) level sets partition (0, 1] into half-open intervals;
    the representative is the geometric midpoint (or 1.0 for the top
    pair).  Returns {(l1, l2): (low, mid, high)}.
    """
    out = {}
    for l1 in range(l_max + 1):
        for l2 in range(l1, l_max + 1):
            lo = max(float(a) ** -l1, float(b) ** -l2)
            hi = min(float(a) ** (1 - l1), float(b) ** (1 - l2))
            if lo > 1.0 or lo >= hi:
                continue
            mid = 1.0 if l1 == l2 == 0 else math.sqrt(lo * min(hi, 1.0))
            out[(l1, l2)] = (lo, mid, min(hi, 1.0))
    return out


def oracle_sweep(system: CarpetSystem, n_max: int = 3, l_max: int = 4, cap: int = ORACLE_CAP):
    """Formula-vs-brute-force equivalence sweep.

    For every block length N <= n_max, every realizable scale-index
    combination with indices <= l_max and every center choice that can
    influence the count (the middle y-blocks; other blocks are padded
    canonically), compares cover_count_formula with cover_count_oracle.
    Returns one record per instance.
    """
    sft = system.omega
    levels = realizable_index_scales(system.a, system.b, l_max)
    aut = project_automaton(sft)
    records = []
    for n in range(1, n_max + 1):
        projected = sorted(aut.language(n))
        pad = lexmin_word(sft, n)
        for (t_r, scales_r) in sorted(levels.items()):
            for (t_p, scales_p) in sorted(levels.items()):
                if not (t_p[0] >= t_r[0] and t_p[1] >= t_r[1]):
                    continue
                if t_r == t_p:
                    lo, _, hi = scales_r
                    if hi <= lo:
                        continue
                    r = lo * (hi / lo) ** (2.0 / 3.0)
                    rho = lo * (hi / lo) ** (1.0 / 3.0)
                    if not rho < r:
                        continue
                else:
                    r, rho = scales_r[1], scales_p[1]
                    if not rho < r:
                        continue
                idx_r = scale_indices(r, system.a, system.b)
                idx_p = scale_indices(rho, system.a, system.b)
                assert (idx_r.l1, idx_r.l2) == t_r and (idx_p.l1, idx_p.l2) == t_p
                case2 = idx_p.l1 <= idx_r.l2
                read_lo = idx_r.l1 + 1
                read_hi = idx_p.l1 if case2 else idx_r.l2
                read_positions = list(range(read_lo, read_hi + 1))

                assignments = [()]
                for _ in read_positions:
                    assignments = [prefix + (v,) for prefix in assignments for v in projected]
                for assignment in assignments:
                    blocks = []
                    chosen = dict(zip(read_positions, assignment))
                    for m in range(1, idx_r.l2 + 1):
                        if m in chosen:
                            blocks.append(fiber_blocks(sft, chosen[m])[0])
                        else:
                            blocks.append(pad)
                    formula = cover_count_formula(system, n, blocks, r, rho)
                    oracle = cover_count_oracle(system, n, blocks, r, rho, cap=cap)
                    records.append(
                        {
                            "instance": (
                                f"N={n},l_r={t_r},l_rho={t_p},case={formula.case_tag},"
                                f"y={'|'.join(''.join(map(str, v)) for v in assignment) or '-'}"
                            ),
                            "formula": formula.count,
                            "oracle": oracle.count,
                            "case": formula.case_tag,
                            "match": formula.count == oracle.count,
                        }
                    )
    return records


def spectrum_closed_form(
    system: CarpetSystem, theta: float, dims: ClosedFormDims | None = None
) -> float:
    """Closed-form mean Assouad spectrum value at theta in (0, 1).

    Evaluates the capped-branch form min(madim, (mmdim - theta*K)/(1 -
    theta)) and, as a cross-check, the equivalent piecewise form with
    transition at log b / log a; the two must agree to 1e-9.
    """
    if not (0.0 < theta < 1.0):
        raise ThetaOutOfRange(f"theta must lie in (0, 1), got {theta}")
    if dims is None:
        dims = closed_form_dims(system, mode="exact")
    if not dims.exact:
        raise ConditionalNotConverged("spectrum closed form needs exact entropies")
    la, lb = math.log(system.a), math.log(system.b)
    h, hp, cond = dims.h_omega, dims.h_omega_prime, dims.h_conditional
    madim, mmdim = dims.madim, dims.mmdim

    k_slope = (1.0 / la - 1.0 / lb) * cond + h / lb
    branch = (mmdim - theta * k_slope) / (1.0 - theta)
    value = min(madim, branch)

    tstar = lb / la
    if theta <= tstar:
        piecewise = (mmdim - theta * (madim - (madim - mmdim) * la / lb)) / (1.0 - theta)
    else:
        piecewise = madim
    assert abs(value - piecewise) <= CLOSED_FORM_TOL, (
        f"spectrum forms disagree at theta={theta}: {value} vs {piecewise}"
    )
    return value
