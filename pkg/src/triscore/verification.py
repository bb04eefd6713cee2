"""Binned verification of ternary forecasts against observed categories.

Forecasts are snapped to a triangular lattice of simplex points with a
chosen denominator, and the mean score over all pairs splits exactly as

    score = uncertainty - resolution + reliability
    S     = U           - Z          + R

where the climatology is the mean of all observations.  Every term is a
mean squared plane distance under the scoring rule's triangle map, so
their square roots are root-mean-square distances and the identity is
Pythagoras' theorem in a decomposition diagram.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, InvalidDecomposition
from .scoring import ScoringRule
from .simplex import ObsCategory, TernaryProb, make_ternary

_IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class ForecastObsPair:
    """One verification case: an issued forecast and what happened."""

    forecast: TernaryProb
    obs: ObsCategory


@dataclass(frozen=True)
class Bin:
    """All pairs whose forecasts snapped to one lattice point."""

    center: TernaryProb
    count: int
    mean_obs: TernaryProb


@dataclass(frozen=True)
class BinnedStats:
    """Forecast-observation pairs grouped on the simplex lattice."""

    bins: tuple[Bin, ...]
    nbins: int

    @property
    def n_pairs(self) -> int:
        return sum(b.count for b in self.bins)


def snap_to_lattice(p: TernaryProb, nbins: int) -> tuple[int, int, int]:
    """Nearest lattice point with denominator nbins, as integer counts.

    Uses largest-remainder rounding: floor each scaled coordinate, then
    hand the remaining units to the coordinates with the largest
    fractional parts (ties broken in the order B, N, A).  The result
    sums to nbins exactly and moves no coordinate by more than 1/nbins.
    """
    scaled = [p.pB * nbins, p.pN * nbins, p.pA * nbins]
    floors = [math.floor(v) for v in scaled]
    remainders = [v - f for v, f in zip(scaled, floors)]
    missing = nbins - sum(floors)
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in range(missing):
        floors[order[i]] += 1
    return (floors[0], floors[1], floors[2])


def bin_forecasts(pairs: list[ForecastObsPair], nbins: int = 11) -> BinnedStats:
    """Group pairs by the lattice point nearest to each forecast."""
    if not pairs:
        raise EmptyDataset("no forecast-observation pairs to bin")
    if nbins < 1:
        raise EmptyDataset(f"nbins = {nbins} must be >= 1")
    counts: dict[tuple[int, int, int], np.ndarray] = {}
    for pair in pairs:
        key = snap_to_lattice(pair.forecast, nbins)
        acc = counts.get(key)
        if acc is None:
            acc = np.zeros(3)
            counts[key] = acc
        acc[pair.obs.index] += 1.0
    bins = []
    for key in sorted(counts):
        obs_counts = counts[key]
        total = int(obs_counts.sum())
        center = make_ternary(key[0] / nbins, key[1] / nbins, key[2] / nbins)
        mean_obs = make_ternary(*(obs_counts / total))
        bins.append(Bin(center, total, mean_obs))
    return BinnedStats(tuple(bins), nbins)


@dataclass(frozen=True)
class Decomposition:
    """Mean score split into uncertainty, resolution and reliability.

    All four terms are mean squared distances in the scoring rule's
    triangle; q_bar is the mean observation used as the reference
    climatology.
    """

    S: float
    U: float
    Z: float
    R: float
    q_bar: TernaryProb

    @property
    def sqrt_S(self) -> float:
        return math.sqrt(max(0.0, self.S))

    @property
    def sqrt_U(self) -> float:
        return math.sqrt(max(0.0, self.U))

    @property
    def sqrt_Z(self) -> float:
        return math.sqrt(max(0.0, self.Z))

    @property
    def sqrt_R(self) -> float:
        return math.sqrt(max(0.0, self.R))

    def identity_gap(self) -> float:
        """|S - (U - Z + R)|, which is ~0 for any valid decomposition."""
        return abs(self.S - (self.U - self.Z + self.R))


def decompose(rule: ScoringRule, binned: BinnedStats) -> Decomposition:
    """Murphy decomposition of the binned mean score.

    Within each bin the observation distribution over the three corners
    is exactly the bin's mean observation, so every term reduces to a
    count-weighted sum of squared plane distances between lattice
    centers, corner observations, conditional means and the overall
    mean observation.
    """
    if not binned.bins:
        raise EmptyDataset("no bins to decompose")
    Mhat = rule.Mhat
    corners = [Mhat @ np.eye(3)[i] for i in range(3)]
    n_total = binned.n_pairs

    q_bar_vec = np.zeros(3)
    for b in binned.bins:
        q_bar_vec += b.count * b.mean_obs.as_array()
    q_bar_vec /= n_total
    Qb = Mhat @ q_bar_vec

    S = U = Z = R = 0.0
    for b in binned.bins:
        Pk = Mhat @ b.center.as_array()
        Ok = Mhat @ b.mean_obs.as_array()
        w = b.mean_obs.as_tuple()  # observed corner frequencies in this bin
        for c in range(3):
            n_c = b.count * w[c]
            if n_c > 0.0:
                S += n_c * float((Pk - corners[c]) @ (Pk - corners[c]))
                U += n_c * float((Qb - corners[c]) @ (Qb - corners[c]))
        Z += b.count * float((Qb - Ok) @ (Qb - Ok))
        R += b.count * float((Pk - Ok) @ (Pk - Ok))
    S /= n_total
    U /= n_total
    Z /= n_total
    R /= n_total
    return Decomposition(S, U, Z, R, make_ternary(*q_bar_vec))


def skill_radius(d: Decomposition) -> float | None:
    """Relative skill (sqrt(Z) - sqrt(R)) / sqrt(Z).

    Positive values size the skill circle on a map; negative values mean
    the system did worse than climatology (no circle); None means skill
    is undefined because the resolution is zero.
    """
    if d.Z <= 0.0:
        return None
    return (d.sqrt_Z - d.sqrt_R) / d.sqrt_Z


@dataclass(frozen=True)
class DiagramGeometry:
    """Plotting primitives of the decomposition diagram.

    Everything lives in root-score units.  The semicircle has diameter
    sqrt(U) along the x-axis from the origin; the larger right triangle
    (legs sqrt(Z), sqrt(U-Z)) is inscribed with its right angle on the
    arc; the smaller right triangle (legs sqrt(R), sqrt(U-Z), hypotenuse
    sqrt(S)) shares the sqrt(U-Z) leg.  The dashed chords mark the two
    limiting root-scores: sqrt(U) for a zero-resolution system and
    sqrt(U-Z) for a perfectly reliable one.
    """

    semicircle_center: tuple[float, float]
    semicircle_radius: float
    large_triangle: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    small_triangle: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    chord_zero_resolution: tuple[tuple[float, float], tuple[float, float]]
    chord_perfect_reliability: tuple[tuple[float, float], tuple[float, float]]

    @property
    def sqrt_U(self) -> float:
        return 2.0 * self.semicircle_radius

    @property
    def sqrt_best_score(self) -> float:
        (x0, y0), (x1, y1) = self.chord_perfect_reliability
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def sqrt_score(self) -> float:
        (x0, y0) = self.small_triangle[0]
        (x1, y1) = self.small_triangle[2]
        return math.hypot(x1 - x0, y1 - y0)


def decomposition_diagram_geometry(d: Decomposition) -> DiagramGeometry:
    """Lay out the decomposition diagram for a computed decomposition."""
    if d.U < d.Z:
        raise InvalidDecomposition(f"U = {d.U} < Z = {d.Z}")
    su = d.sqrt_U
    sz = d.sqrt_Z
    sr = d.sqrt_R
    s_best = math.sqrt(max(0.0, d.U - d.Z))

    origin = (0.0, 0.0)
    diam_end = (su, 0.0)
    if su > 0.0:
        vx = s_best * s_best / su
        vy = s_best * sz / su
    else:
        vx = vy = 0.0
    vertex = (vx, vy)

    # reliability leg: perpendicular to the sqrt(U-Z) chord at its arc
    # end, towards (and possibly past) the diameter end
    if sz > 0.0:
        ux, uy = (diam_end[0] - vx) / sz, (diam_end[1] - vy) / sz
    else:
        ux, uy = 0.0, -1.0
    w = (vx + sr * ux, vy + sr * uy)

    return DiagramGeometry(
        semicircle_center=(su / 2.0, 0.0),
        semicircle_radius=su / 2.0,
        large_triangle=(origin, vertex, diam_end),
        small_triangle=(origin, vertex, w),
        chord_zero_resolution=(origin, diam_end),
        chord_perfect_reliability=(origin, vertex),
    )
