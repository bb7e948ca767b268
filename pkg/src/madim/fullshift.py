"""Full shifts over finite real alphabets: 1-D covering and packing counts.

The product structure of sup-metric balls around constant sequences
reduces every count to powers of the 1-D values, so the estimators here
work with exact greedy interval covers and packings of point sets in
[0, 1].  Infinite families (such as the 1/n^lambda alphabets) are
handled by truncation together with a faithful scale window: estimates
at scales finer than the truncated set's minimal gap are flagged.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .errors import ScaleOrder, ThetaOutOfRange


@dataclass(frozen=True)
class RealAlphabet:
    """Finite strictly increasing point set in [0, 1]."""

    points: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        pts = self.points
        if not pts:
            raise ValueError("alphabet needs at least one point")
        if any(not (0.0 <= p <= 1.0) for p in pts):
            raise ValueError("alphabet points must lie in [0, 1]")
        if any(x >= y for x, y in zip(pts, pts[1:])):
            raise ValueError("alphabet points must be strictly increasing")

    @property
    def min_gap(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return min(y - x for x, y in zip(self.points, self.points[1:]))


def f_lambda_alphabet(lam: float, n_max: int) -> RealAlphabet:
    """Truncation of {0} union {1/n^lambda : n >= 1} at n <= n_max."""
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    pts = sorted({0.0} | {1.0 / n ** lam for n in range(1, n_max + 1)})
    return RealAlphabet(points=tuple(pts), label=f"f_lambda(lambda={lam}, n_max={n_max})")


def make_alphabet(points, label: str = "") -> RealAlphabet:
    return RealAlphabet(points=tuple(sorted(set(float(p) for p in points))), label=label)


def _ball(alphabet: RealAlphabet, x: float, r: float) -> tuple[float, ...]:
    lo = bisect_left(alphabet.points, x - r)
    hi = bisect_right(alphabet.points, x + r)
    return alphabet.points[lo:hi]


def interval_cover_count(alphabet: RealAlphabet, x: float, r: float, rho: float) -> int:
    """Minimal number of closed length-rho intervals covering the ball points.

    The left-to-right greedy sweep is optimal in one dimension.
    """
    if not 0.0 < rho < r:
        raise ScaleOrder(f"need 0 < rho < r, got rho={rho}, r={r}")
    pts = _ball(alphabet, x, r)
    count = 0
    i = 0
    while i < len(pts):
        count += 1
        end = pts[i] + rho
        while i < len(pts) and pts[i] <= end:
            i += 1
    return count


def interval_pack_count(alphabet: RealAlphabet, x: float, r: float, rho: float) -> int:
    """Maximal rho-separated subset of the ball points (greedy, optimal in 1-D).

    Separation is strict (> rho): a closed length-rho interval then
    holds at most one chosen point, so the packing count is a valid
    lower bound for the interval cover count even on exact ties.
    """
    if not 0.0 < rho < r:
        raise ScaleOrder(f"need 0 < rho < r, got rho={rho}, r={r}")
    pts = _ball(alphabet, x, r)
    count = 0
    last = None
    for p in pts:
        if last is None or p > last + rho:
            count += 1
            last = p
    return count


def product_cover_bounds(
    alphabet: RealAlphabet, x: float, r: float, rho: float, n: int
) -> tuple[int, int]:
    """(packing**n, cover**n): exact bracket for the product-ball cover count.

    Around a constant sequence the sup-metric ball is the n-fold product
    of the 1-D ball, so a product packing bounds the cover count from
    below and a product cover from above.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cover = interval_cover_count(alphabet, x, r, rho)
    pack = interval_pack_count(alphabet, x, r, rho)
    return pack ** n, cover ** n


@dataclass(frozen=True)
class CurvePoint:
    r: float
    rho: float
    log_ratio: float
    s_upper: float
    s_lower: float
    faithful: bool


def sinfty_curve(alphabet: RealAlphabet, theta: float, r_list, n: int = 1):
    """Normalized log cover-count bounds along rho = r**(1/theta).

    Per scale r, the bounds are maximized over centers at every
    alphabet point (constant-sequence centers).  Points with rho below
    the alphabet's minimal gap are flagged unfaithful rather than
    dropped: a finite truncation carries no information there.
    """
    if not (0.0 < theta < 1.0):
        raise ThetaOutOfRange(f"theta must lie in (0, 1), got {theta}")
    gap = alphabet.min_gap
    out = []
    for r in r_list:
        r = float(r)
        if not (0.0 < r < 1.0):
            raise ScaleOrder(f"spectrum scales need 0 < r < 1, got {r}")
        rho = r ** (1.0 / theta)
        lower_best = 0
        upper_best = 0
        for x in alphabet.points:
            lo, up = product_cover_bounds(alphabet, x, r, rho, n)
            lower_best = max(lower_best, lo)
            upper_best = max(upper_best, up)
        out.append(
            CurvePoint(
                r=r,
                rho=rho,
                log_ratio=math.log(r / rho),
                s_upper=math.log(upper_best) / n,
                s_lower=math.log(lower_best) / n if lower_best > 0 else 0.0,
                faithful=rho >= gap,
            )
        )
    return out


def f_lambda_spectrum(lam: float, theta: float) -> float:
    """Reference spectrum value min{1/((1+lambda)(1-theta)), 1}."""
    if not (0.0 < theta < 1.0):
        raise ThetaOutOfRange(f"theta must lie in (0, 1), got {theta}")
    return min(1.0 / ((1.0 + lam) * (1.0 - theta)), 1.0)
