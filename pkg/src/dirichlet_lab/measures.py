"""Measure and polynomial-map specifications with empirical regularity testers.

The improvability results for points on curves and fractals need three
regularity inputs: a (C, alpha)-good bound for the relevant functions, a
Federer (doubling) constant for the measure, and nonplanarity of the map
on the support.  All three are quantified over every ball and every
sublevel threshold, which no finite computation can certify, so the
testers here are explicitly empirical: Monte Carlo estimates over finite
grids, reported with sample counts and binomial confidence half-widths,
never as proofs.

Sampling is deterministic in (spec, seed) and block-sharded through
:mod:`.rng`, so worker count never changes the stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng as _rng
from .errors import EmptySupportError, ParameterError

_TAG_BOX = 31
_TAG_IFS_ADDRESS = 37
_TAG_BALL_GEOMETRY = 41

DEFAULT_IFS_DEPTH = 20
NONPLANAR_SVD_FLOOR = 1e-8

# z-value for the reported ~95% binomial half-widths
_Z95 = 1.959963984540054


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ParameterError("coefficients must be finite")
        return Fraction(x)
    raise ParameterError("cannot convert %r to an exact rational" % (x,))


# ---------------------------------------------------------------------------
# polynomial maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapSpec:
    """Polynomial map R^d -> R^n, one exponent/coefficient list per output.

    ``coords[j]`` is a tuple of (coefficient, exponent-vector) terms; the
    coefficients are kept as exact rationals so formal differentiation
    (used by the nondegeneracy-order computation) never rounds.
    """

    d: int
    n: int
    coords: tuple

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ParameterError("map needs d >= 1 and n >= 1")
        fixed = []
        for terms in self.coords:
            clean = []
            for coeff, expo in terms:
                expo = tuple(int(e) for e in expo)
                if len(expo) != self.d or any(e < 0 for e in expo):
                    raise ParameterError("bad exponent vector %r" % (expo,))
                clean.append((_as_fraction(coeff), expo))
            fixed.append(tuple(clean))
        if len(fixed) != self.n:
            raise ParameterError("need %d coordinate polynomials" % self.n)
        object.__setattr__(self, "coords", tuple(fixed))

    @classmethod
    def veronese(cls, n: int) -> "MapSpec":
        """x -> (x, x^2, ..., x^n) on the line."""
        if n < 1:
            raise ParameterError("veronese needs n >= 1")
        coords = tuple((((Fraction(1), (i,)),)) for i in range(1, n + 1))
        return cls(1, n, coords)

    @property
    def degree(self) -> int:
        deg = 0
        for terms in self.coords:
            for coeff, expo in terms:
                if coeff != 0:
                    deg = max(deg, sum(expo))
        return deg

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[1] != self.d:
            raise ParameterError("points must have %d columns" % self.d)
        out = np.zeros((pts.shape[0], self.n))
        for j, terms in enumerate(self.coords):
            acc = np.zeros(pts.shape[0])
            for coeff, expo in terms:
                term = np.full(pts.shape[0], float(coeff))
                for axis, e in enumerate(expo):
                    if e:
                        term = term * pts[:, axis] ** e
                acc += term
            out[:, j] = acc
        return out

    def derivative_terms(self, coord: int, beta) -> tuple:
        """Formal partial derivative d^beta of coordinate ``coord``."""
        terms = self.coords[coord]
        for axis, times in enumerate(beta):
            for _ in range(times):
                new = []
                for coeff, expo in terms:
                    if expo[axis] > 0:
                        lowered = list(expo)
                        lowered[axis] -= 1
                        new.append((coeff * expo[axis], tuple(lowered)))
                terms = tuple(new)
        return terms


def _eval_terms_exact(terms, x: tuple) -> Fraction:
    total = Fraction(0)
    for coeff, expo in terms:
        val = coeff
        for xi, e in zip(x, expo):
            if e:
                val *= xi ** e
        total += val
    return total


def _fraction_rank(rows) -> int:
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    cols = len(mat[0])
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def _multi_indices(d: int, order: int):
    if d == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in _multi_indices(d - 1, order - first):
            yield (first,) + rest


def nondegeneracy_order(mapping: MapSpec, x) -> int | None:
    """Smallest order whose partial derivatives at x span R^n, or None.

    Exact arithmetic throughout: the point is converted to rationals and
    the span matrices are rank-checked over Q, so boundary cases (like
    derivatives vanishing exactly at 0) are decided correctly.
    """
    if np.isscalar(x):
        x = (x,)
    xq = tuple(_as_fraction(v) for v in x)
    if len(xq) != mapping.d:
        raise ParameterError("point must have %d coordinates" % mapping.d)
    rows = []
    for order in range(1, mapping.degree + 1):
        for beta in _multi_indices(mapping.d, order):
            row = [
                _eval_terms_exact(mapping.derivative_terms(j, beta), xq)
                for j in range(mapping.n)
            ]
            rows.append(row)
        if _fraction_rank(rows) == mapping.n:
            return order
    return None


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LebesgueBox:
    """Normalized Lebesgue measure on a product of intervals."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(np.asarray(self.lower, dtype=float)))
        hi = tuple(float(v) for v in np.atleast_1d(np.asarray(self.upper, dtype=float)))
        if len(lo) != len(hi) or not lo:
            raise ParameterError("box corners must have equal positive length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ParameterError("box must be nondegenerate (lower < upper)")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def d(self) -> int:
        return len(self.lower)


@dataclass(frozen=True, eq=False)
class SelfSimilarIFS:
    """Attractor measure of contracting similarities x -> r_i x + b_i."""

    ratios: tuple
    translations: tuple
    probs: tuple
    open_set_condition: bool = True

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratios)
        probs = tuple(float(p) for p in self.probs)
        trans = tuple(
            tuple(float(v) for v in np.atleast_1d(np.asarray(t, dtype=float)))
            for t in self.translations
        )
        if not (len(ratios) == len(trans) == len(probs)) or len(ratios) < 2:
            raise ParameterError("IFS needs >= 2 aligned (ratio, translation, prob) triples")
        if not all(0.0 < r < 1.0 for r in ratios):
            raise ParameterError("contraction ratios must lie in (0,1)")
        if any(p <= 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise ParameterError("probabilities must be positive and sum to 1")
        dims = {len(t) for t in trans}
        if len(dims) != 1:
            raise ParameterError("translations must share one dimension")
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "translations", trans)

    @property
    def d(self) -> int:
        return len(self.translations[0])

    @classmethod
    def cantor_middle_thirds(cls) -> "SelfSimilarIFS":
        return cls((1 / 3, 1 / 3), ((0.0,), (2 / 3,)), (0.5, 0.5))


@dataclass(frozen=True, eq=False)
class Pushforward:
    """Image of a base measure under a polynomial map."""

    mapping: MapSpec
    base: "MeasureSpec"

    def __post_init__(self):
        if self.mapping.d != ambient_dim(self.base):
            raise ParameterError("map domain dimension != base measure dimension")


MeasureSpec = LebesgueBox | SelfSimilarIFS | Pushforward


def ambient_dim(measure: MeasureSpec) -> int:
    if isinstance(measure, LebesgueBox):
        return measure.d
    if isinstance(measure, SelfSimilarIFS):
        return measure.d
    if isinstance(measure, Pushforward):
        return measure.mapping.n
    raise ParameterError("unknown measure spec %r" % (measure,))


def sample(
    measure: MeasureSpec,
    seed: int,
    count: int,
    depth: int = DEFAULT_IFS_DEPTH,
    workers: int = 1,
) -> np.ndarray:
    """count deterministic samples, shape (count, ambient_dim)."""
    if count < 1:
        raise ParameterError("count must be >= 1")
    if isinstance(measure, LebesgueBox):
        lo = np.array(measure.lower)
        hi = np.array(measure.upper)

        def draw_box(gen, c):
            return gen.uniform(lo, hi, size=(c, lo.size))

        return _rng.sample_batched(draw_box, count, seed, tag=_TAG_BOX, workers=workers)
    if isinstance(measure, SelfSimilarIFS):
        if depth < 1:
            raise ParameterError("depth must be >= 1")
        ratios = np.array(measure.ratios)
        trans = np.array(measure.translations)
        probs = np.array(measure.probs)
        # start at the fixed point of the deepest digit's map so an
        # eventually-constant address lands exactly on the attractor
        fixed = trans / (1.0 - ratios)[:, None]

        def draw_ifs(gen, c):
            digits = gen.choice(len(ratios), size=(c, depth), p=probs)
            x = fixed[digits[:, depth - 1]]
            for level in range(depth - 2, -1, -1):
                a = digits[:, level]
                x = ratios[a][:, None] * x + trans[a]
            return x

        return _rng.sample_batched(draw_ifs, count, seed, tag=_TAG_IFS_ADDRESS, workers=workers)
    if isinstance(measure, Pushforward):
        base_pts = sample(measure.base, seed, count, depth=depth, workers=workers)
        return measure.mapping.evaluate(base_pts)
    raise ParameterError("unknown measure spec %r" % (measure,))


# ---------------------------------------------------------------------------
# balls and empirical testers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball; in dimension one, an interval."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not c:
            raise ParameterError("ball center must be nonempty")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ParameterError("ball radius must be positive and finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Ball":
        if not lo < hi:
            raise ParameterError("interval needs lo < hi")
        return cls(((lo + hi) / 2.0,), (hi - lo) / 2.0)

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts - np.array(self.center)
        return np.sqrt(np.sum(diff * diff, axis=1)) <= self.radius


def _support_values(f, measure, ball, samples, seed, depth, workers=1):
    pts = sample(measure, seed, samples, depth=depth, workers=workers)
    mask = ball.contains(pts)
    inside = pts[mask]
    if inside.shape[0] == 0:
        raise EmptySupportError(
            "no support samples fell in the ball (center %s, radius %g, %d draws)"
            % (ball.center, ball.radius, samples)
        )
    args = inside[:, 0] if inside.shape[1] == 1 else inside
    vals = np.abs(np.asarray(f(args), dtype=float)).ravel()
    if vals.shape[0] != inside.shape[0]:
        raise ParameterError("f must return one value per sample point")
    return inside, vals


@dataclass(frozen=True)
class SupNormEstimate:
    value: float
    inside_count: int
    sample_count: int


def sup_norm_on_support(
    f,
    measure: MeasureSpec,
    ball: Ball,
    samples: int = 10_000,
    seed: int = 0,
    depth: int = DEFAULT_IFS_DEPTH,
    workers: int = 1,
) -> SupNormEstimate:
    """Monte Carlo sup of |f| over (ball intersect support).

    An under-estimate by construction: it only sees sampled points.
    """
    inside, vals = _support_values(f, measure, ball, samples, seed, depth, workers)
    return SupNormEstimate(float(vals.max()), int(inside.shape[0]), samples)


@dataclass(frozen=True)
class CGoodEstimate:
    """Smallest C consistent with the sublevel inequality on the tested grid."""

    C: float
    alpha: float
    sup_norm: float
    eps_grid: tuple
    fractions: tuple
    half_widths: tuple
    inside_count: int
    degenerate: bool


def cgood_empirical(
    f,
    measure: MeasureSpec,
    ball: Ball,
    alpha: float,
    eps_grid,
    samples: int = 100_000,
    seed: int = 0,
    depth: int = DEFAULT_IFS_DEPTH,
    workers: int = 1,
) -> CGoodEstimate:
    """Estimate the smallest C with  nu(|f| < eps)/nu(B) <= C (eps/sup|f|)^alpha.

    For each grid eps the sublevel fraction is a Monte Carlo proportion;
    the returned C is the max over the grid of fraction * (sup/eps)^alpha.
    A 95% binomial half-width accompanies each fraction.  If f vanishes
    identically on the sampled support the inequality is vacuous and the
    result is flagged degenerate (C = inf).
    """
    if not (0.0 < alpha <= 1.0):
        raise ParameterError("alpha must lie in (0, 1]")
    grid = tuple(float(e) for e in eps_grid)
    if not grid or any(e <= 0 for e in grid) or any(
        b <= a for a, b in zip(grid, grid[1:])
    ):
        raise ParameterError("eps_grid must be positive and strictly increasing")
    inside, vals = _support_values(f, measure, ball, samples, seed, depth, workers)
    count = inside.shape[0]
    sup = float(vals.max())
    fracs = []
    widths = []
    for eps in grid:
        p = float(np.count_nonzero(vals < eps)) / count
        fracs.append(p)
        widths.append(_Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / count))
    if sup == 0.0:
        return CGoodEstimate(math.inf, alpha, 0.0, grid, tuple(fracs),
                             tuple(widths), count, True)
    best = max(p * (sup / eps) ** alpha for p, eps in zip(fracs, grid))
    return CGoodEstimate(best, alpha, sup, grid, tuple(fracs), tuple(widths),
                         count, False)


@dataclass(frozen=True)
class FedererEstimate:
    """Largest observed nu(3B)/nu(B) over the tested balls."""

    ratio: float
    half_width: float
    balls_used: int
    worst_center: tuple
    worst_radius: float


def federer_empirical(
    measure: MeasureSpec,
    region: Ball,
    ball_count: int = 200,
    samples: int = 200_000,
    seed: int = 0,
    depth: int = DEFAULT_IFS_DEPTH,
    center_fraction: float = 0.2,
    radius_range: tuple = (0.8, 1.0),
    workers: int = 1,
) -> FedererEstimate:
    """Empirical doubling constant: max nu(3B)/nu(B), 3B inside the region.

    Ball centers are support samples within center_fraction of the
    region's center (so every tested 3B fits); radii are drawn inside
    radius_range times the largest admissible radius.  The estimate is a
    lower bound for the true Federer constant: only finitely many balls
    are examined.
    """
    if ball_count < 1:
        raise ParameterError("ball_count must be >= 1")
    lo_r, hi_r = radius_range
    if not (0.0 < lo_r <= hi_r <= 1.0):
        raise ParameterError("radius_range must satisfy 0 < lo <= hi <= 1")
    pts = sample(measure, seed, samples, depth=depth, workers=workers)
    if pts.ndim == 1:
        pts = pts[:, None]
    center = np.array(region.center)
    dist = np.sqrt(np.sum((pts - center) ** 2, axis=1))
    eligible = np.flatnonzero(dist <= center_fraction * region.radius)
    if eligible.size == 0:
        raise EmptySupportError(
            "no support samples near the region center to serve as ball centers"
        )
    geom = _rng.stream(seed, 0, tag=_TAG_BALL_GEOMETRY)
    picks = eligible[geom.integers(0, eligible.size, size=ball_count)]
    scales = geom.uniform(lo_r, hi_r, size=ball_count)
    best = -math.inf
    best_hw = 0.0
    best_center = region.center
    best_radius = 0.0
    used = 0
    for idx, u in zip(picks, scales):
        c = pts[idx]
        max_r = (region.radius - float(dist[idx])) / 3.0
        r = u * max_r
        if r <= 0:
            continue
        d2 = np.sum((pts - c) ** 2, axis=1)
        n1 = int(np.count_nonzero(d2 <= r * r))
        n3 = int(np.count_nonzero(d2 <= 9.0 * r * r))
        if n1 == 0:
            continue
        used += 1
        ratio = n3 / n1
        if ratio > best:
            best = ratio
            # crude delta-method spread for the nested count ratio
            best_hw = _Z95 * ratio * math.sqrt(1.0 / n1 + 1.0 / max(n3, 1))
            best_center = tuple(float(v) for v in np.atleast_1d(c))
            best_radius = float(r)
    if used == 0:
        raise EmptySupportError("every tested ball missed the sampled support")
    return FedererEstimate(best, best_hw, used, best_center, best_radius)


@dataclass(frozen=True)
class NonplanarResult:
    nonplanar: bool
    sigma_min: float
    points_used: int


def nonplanar_test(
    mapping: MapSpec,
    measure: MeasureSpec,
    ball: Ball,
    samples: int = 20_000,
    seed: int = 0,
    depth: int = DEFAULT_IFS_DEPTH,
    workers: int = 1,
) -> NonplanarResult:
    """Rank test: is (1, f_1, ..., f_n) affinely independent on the support?

    Builds the (n+1)-column moment matrix at support samples inside the
    ball and checks its smallest singular value after normalizing each
    column to unit length (raw monomial columns are badly conditioned).
    """
    pts = sample(measure, seed, samples, depth=depth, workers=workers)
    mask = ball.contains(pts)
    inside = pts[mask]
    if inside.shape[0] < mapping.n + 1:
        raise EmptySupportError(
            "need at least %d support samples in the ball, got %d"
            % (mapping.n + 1, inside.shape[0])
        )
    Y = mapping.evaluate(inside)
    M = np.hstack([np.ones((Y.shape[0], 1)), Y])
    norms = np.sqrt(np.sum(M * M, axis=0))
    if np.any(norms == 0.0):
        return NonplanarResult(False, 0.0, int(inside.shape[0]))
    sigma = np.linalg.svd(M / norms, compute_uv=False)
    smin = float(sigma[-1])
    return NonplanarResult(smin > NONPLANAR_SVD_FLOOR, smin, int(inside.shape[0]))


# ---------------------------------------------------------------------------
# explicit constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodnessParams:
    """Explicit constants used by the nondivergence machinery.

    C and alpha are the sublevel-inequality constants, D the doubling
    bound, rho the covolume lower bound on the tested ball; C1 and C2
    are decay-law fit parameters left as configuration (estimated from
    experiments, not assumed).
    """

    C: float
    alpha: float
    D: float
    rho: float
    C1: float | None = None
    C2: float | None = None

    def __post_init__(self):
        for name in ("C", "alpha", "D", "rho"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterError("%s must be positive and finite" % name)
        if self.alpha > 1.0:
            raise ParameterError("alpha must be at most 1")
        for name in ("C1", "C2"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise ParameterError("%s must be positive when given" % name)


def sublevel_measure_bound(
    degree: int,
    d: int,
    a,
    A,
    c_d: float,
    eps: float,
    sup_f: float,
) -> float:
    """Upper bound for the relative measure of {|f| < eps} on a box.

    With the l-th partials pinched between a_i and A_i, the sublevel
    fraction is at most  l * c_d * max_i (A_i/a_i)^{1/l} * (eps/sup)^{1/(d l)}.
    Used to sanity-check empirical sublevel fractions from above.
    """
    if degree < 1 or d < 1:
        raise ParameterError("degree and d must be >= 1")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    A = np.atleast_1d(np.asarray(A, dtype=float))
    if a.shape != A.shape or a.size != d:
        raise ParameterError("a and A must both have d entries")
    if not np.all((a > 0) & (a <= A)):
        raise ParameterError("need 0 < a_i <= A_i")
    if not (eps > 0 and sup_f > 0 and c_d > 0):
        raise ParameterError("eps, sup_f and c_d must be positive")
    ratio = float(np.max(A / a)) ** (1.0 / degree)
    return degree * c_d * ratio * (eps / sup_f) ** (1.0 / (d * degree))


def nondivergence_veronese(n: int) -> float:
    """Improvability threshold for (x, ..., x^n) from the nondivergence route."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return 1.0 / (n ** n * (n + 1) ** 2 * 2 ** (n * n + n))


def drv_manifolds(n: int) -> float:
    """Threshold 2^{-n/(n+1)} for nondegenerate manifolds."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return 2.0 ** (-n / (n + 1.0))


def epsilon0_registry(max_n: int = 4) -> dict:
    """Named explicit improvability thresholds, for report annotation."""
    table = {
        "davenport_schmidt_curve": 4.0 ** (-1.0 / 3.0),
        "bugeaud_veronese": 1.0 / 8.0,
        "khintchine_density": 0.5,
    }
    for n in range(1, max_n + 1):
        table["nondivergence_veronese(n=%d)" % n] = nondivergence_veronese(n)
        table["drv_manifolds(n=%d)" % n] = drv_manifolds(n)
    return table
