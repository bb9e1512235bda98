"""Simulation laboratory for paths and their least concave majorants.

Brownian bridges and motions are sampled with exact joint distribution at
the grid points t_i = i/n, with n a power of two so every grid time and
every hull segment length is a dyadic rational that floats carry exactly
(segment lengths then sum to one without rounding).  On top of the path and
hull primitives sit the distributional checks: uniformity of the covering
segment length, the excursion rescaling of the gap over one segment, the
space-time map between two standard bridges, and independence of the gap
statistics from the endpoint of an unpinned motion.  The vertex-straddle
densities of the majorant (last vertex before / first vertex after a fixed
time) are provided in closed form together with their normalization
integrals.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._stats import covariance_with_se, ks_critical, ks_distance, pearson
from .analytic import QuadratureSpec, integrate
from .excursion_max import M3Law, default_law
from .special_fns import std_normal_cdf

_STUDY_CHUNK = 64
_HALF_PI = 0.5 * math.pi


def _check_grid_n(n: int) -> None:
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError("grid size n must be a power of two, at least 2")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathGrid:
    """A path sampled on t_i = i/n.

    ``kind`` is "bridge" (endpoint pinned to ``endpoint`` exactly) or
    "motion" (free endpoint, ``endpoint`` stays None).
    """

    n: int
    values: np.ndarray
    kind: str
    endpoint: float | None = None

    def __post_init__(self) -> None:
        _check_grid_n(self.n)
        if self.kind not in ("bridge", "motion"):
            raise ValueError("kind must be 'bridge' or 'motion'")
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.shape != (self.n + 1,):
            raise ValueError("values must hold exactly n + 1 grid samples")
        if values[0] != 0.0:
            raise ValueError("paths start at zero")
        if self.kind == "bridge":
            if self.endpoint is None:
                raise ValueError("bridge paths carry their endpoint value")
            if values[self.n] != self.endpoint:
                raise ValueError("bridge endpoint must be pinned exactly")
        elif self.endpoint is not None:
            raise ValueError("motion paths have a free endpoint; pass None")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


@dataclass(frozen=True)
class MajorantHull:
    """Vertex description of a least concave majorant on a uniform grid.

    ``vertex_indices`` increase from 0 to n, slopes between consecutive
    vertices strictly decrease, and ``segment_lengths`` are the vertex-time
    differences (they sum to one exactly).
    """

    n: int
    vertex_indices: np.ndarray
    vertex_values: np.ndarray
    segment_lengths: np.ndarray

    def __post_init__(self) -> None:
        # any n >= 1 is accepted here: hulls produced from paths inherit the
        # dyadic grid, but hand-built hulls may break at arbitrary rationals
        if self.n < 1:
            raise ValueError("hull grid size must be positive")
        idx = np.ascontiguousarray(self.vertex_indices, dtype=np.int64)
        val = np.ascontiguousarray(self.vertex_values, dtype=np.float64)
        seg = np.ascontiguousarray(self.segment_lengths, dtype=np.float64)
        object.__setattr__(self, "vertex_indices", idx)
        object.__setattr__(self, "vertex_values", val)
        object.__setattr__(self, "segment_lengths", seg)
        if idx.ndim != 1 or idx.size < 2:
            raise ValueError("a hull has at least the two endpoint vertices")
        if idx[0] != 0 or idx[-1] != self.n or np.any(np.diff(idx) <= 0):
            raise ValueError("vertex indices must increase from 0 to n")
        if val.shape != idx.shape:
            raise ValueError("one value per vertex required")
        if seg.shape != (idx.size - 1,):
            raise ValueError("one segment length per vertex gap required")
        slopes = np.diff(val) / np.diff(idx)
        if np.any(np.diff(slopes) >= 0.0):
            raise ValueError("hull slopes must strictly decrease")

    @property
    def vertex_times(self) -> np.ndarray:
        return self.vertex_indices / self.n


# ---------------------------------------------------------------------------
# Path construction
# ---------------------------------------------------------------------------

def sample_bridge(n: int, b: float, rng: np.random.Generator) -> PathGrid:
    """Bridge from 0 to ``b`` with exact grid-marginal law: independent
    Gaussian increments of variance 1/n, then the linear pinning that turns
    a motion into a bridge."""
    _check_grid_n(n)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(rng.standard_normal(n) * math.sqrt(1.0 / n), out=values[1:])
    values -= (np.arange(n + 1) / n) * (values[n] - b)
    values[n] = b  # the subtraction above leaves rounding dust
    return PathGrid(n=n, values=values, kind="bridge", endpoint=float(b))


def sample_motion(n: int, rng: np.random.Generator) -> PathGrid:
    _check_grid_n(n)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(rng.standard_normal(n) * math.sqrt(1.0 / n), out=values[1:])
    return PathGrid(n=n, values=values, kind="motion")


def refine(path: PathGrid, rng: np.random.Generator) -> PathGrid:
    """Dyadic midpoint refinement keeping the coarse values: each interval
    gains its conditional midpoint, the endpoint mean plus Gaussian noise of
    variance 1/(4n).  Used to study how the discrete maximum gap grows as
    the same driving path is resolved more finely."""
    n = path.n
    v = path.values
    mids = 0.5 * (v[:-1] + v[1:]) + rng.standard_normal(n) * math.sqrt(0.25 / n)
    out = np.empty(2 * n + 1)
    out[0::2] = v
    out[1::2] = mids
    return PathGrid(n=2 * n, values=out, kind=path.kind, endpoint=path.endpoint)


# ---------------------------------------------------------------------------
# Hull primitives
# ---------------------------------------------------------------------------

def concave_majorant(path: PathGrid) -> MajorantHull:
    """Least concave majorant by a single monotone scan, O(n)."""
    idx = _kernels.upper_hull(path.values)
    return MajorantHull(
        n=path.n,
        vertex_indices=idx,
        vertex_values=path.values[idx],
        segment_lengths=np.diff(idx) / path.n,
    )


def majorant_values(path: PathGrid, hull: MajorantHull) -> np.ndarray:
    """The majorant on the full grid: linear between vertices, exact at them."""
    maj = np.interp(
        np.arange(path.n + 1, dtype=np.float64),
        hull.vertex_indices.astype(np.float64),
        hull.vertex_values,
    )
    maj[hull.vertex_indices] = hull.vertex_values
    return maj


def max_gap(path: PathGrid, hull: MajorantHull) -> tuple[float, int]:
    """Largest majorant-minus-path difference over the grid and its index."""
    gap = majorant_values(path, hull) - path.values
    arg = int(np.argmax(gap))
    return max(float(gap[arg]), 0.0), arg


def _segment_of(hull: MajorantHull, u: float) -> int:
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")
    tv = hull.vertex_times
    if np.any(tv == u):
        # measure-zero vertex hit: step half a grid cell toward the middle
        u = u + 0.5 / hull.n if u < 0.5 else u - 0.5 / hull.n
    return int(np.searchsorted(tv, u)) - 1


def covering_length(hull: MajorantHull, u: float) -> float:
    """Length of the hull segment whose time interval contains ``u``."""
    return float(hull.segment_lengths[_segment_of(hull, u)])


def brute_force_majorant(path: PathGrid) -> MajorantHull:
    """Reference majorant in exact rational arithmetic, cubic cost.

    The envelope value at grid point k is the largest chord through any two
    grid points spanning k.  Values enter as exact binary rationals over a
    common power-of-two denominator, so every chord comparison and the
    collinear-vertex merge are exact; intended as an oracle for
    :func:`concave_majorant` on small grids only.
    """
    n = path.n
    v = path.values
    ratios = [float(x).as_integer_ratio() for x in v]
    den = max(q for _, q in ratios)
    m = [p * (den // q) for p, q in ratios]
    n1 = n + 1
    touch = []
    for k in range(n1):
        best_num, best_den = m[k], 1
        for i in range(k + 1):
            for j in range(max(i + 1, k), n1):
                num = m[i] * (j - k) + m[j] * (k - i)
                d = j - i
                if num * best_den > best_num * d:
                    best_num, best_den = num, d
        if best_num == m[k] * best_den:
            touch.append(k)
    verts = [touch[0]]
    for a, k, b in zip(touch, touch[1:], touch[2:]):
        # keep k only where the slope drops; exact collinear points merge away
        if (m[k] - m[a]) * (b - k) > (m[b] - m[k]) * (k - a):
            verts.append(k)
    verts.append(touch[-1])
    idx = np.array(verts, dtype=np.int64)
    return MajorantHull(
        n=n,
        vertex_indices=idx,
        vertex_values=v[idx],
        segment_lengths=np.diff(idx) / n,
    )


def write_path_csv(path: PathGrid, hull: MajorantHull, destination) -> None:
    """Emit ``t,path,majorant`` rows ('.'-decimal, newline-terminated) to a
    file object or file path, for external plotting."""
    maj = majorant_values(path, hull)
    t = path.times
    v = path.values

    def emit(fh) -> None:
        fh.write("t,path,majorant\n")
        for i in range(path.n + 1):
            fh.write("%r,%r,%r\n" % (float(t[i]), float(v[i]), float(maj[i])))

    if hasattr(destination, "write"):
        emit(destination)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


# ---------------------------------------------------------------------------
# Vertex-straddle densities and their normalizations
# ---------------------------------------------------------------------------

def straddle_density_motion(v1: float, v2: float, t: float) -> float:
    """Joint density of the last majorant vertex before ``t`` and the first
    after it, for an unpinned motion on the half line; zero outside
    0 < v1 < t < v2."""
    if not 0.0 < v1 < t < v2:
        return 0.0
    d = v2 - v1
    r = math.sqrt(d / v1)
    return (r - math.atan(r)) / (math.pi * d * d)


def straddle_density_bridge(x: float, y: float, u: float) -> float:
    """Bridge counterpart on [0, 1]: last vertex before ``u`` at ``x``,
    first after it at ``y``; zero outside 0 < x < u < y < 1."""
    if not 0.0 < x < u < y < 1.0:
        return 0.0
    d = y - x
    r = math.sqrt(d / (x * (1.0 - y)))
    return (r - math.atan(r)) / (math.pi * d * d)


def straddle_motion_total(t: float = 1.0, quad: QuadratureSpec | None = None) -> float:
    """Mass of :func:`straddle_density_motion` over {0 < v1 < t < v2}; equals
    one.  Substitutions v1 = t sin^2(psi) and v2 = v1(1 + tan^2(phi)) flatten
    the inverse-square-root edges and map the v2 tail to a finite interval."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    inner_spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13)
    outer_spec = quad or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-11)

    def slice_mass(psi: float) -> float:
        sp = math.sin(psi)
        cp = math.cos(psi)
        v1 = t * sp * sp
        if not 0.0 < v1 < t:
            return 0.0
        s0 = math.sqrt((t - v1) / v1)

        def g(phi: float) -> float:
            tan = math.tan(phi)
            v2 = t + v1 * (tan - s0) * (tan + s0)
            return straddle_density_motion(v1, v2, t) * 2.0 * v1 * tan * (1.0 + tan * tan)

        return 2.0 * t * sp * cp * integrate(g, math.atan(s0), _HALF_PI, inner_spec)

    return integrate(slice_mass, 0.0, _HALF_PI, outer_spec)


def straddle_bridge_total(u: float = 0.5, quad: QuadratureSpec | None = None) -> float:
    """Mass of :func:`straddle_density_bridge` over {0 < x < u < y < 1};
    equals one.  Both coordinates get sin^2 substitutions so the edge
    singularities at x = 0 and y = 1 integrate smoothly."""
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")
    inner_spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13)
    outer_spec = quad or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-11)

    def slice_mass(psi: float) -> float:
        sp = math.sin(psi)
        cp = math.cos(psi)
        x = u * sp * sp
        if not 0.0 < x < u:
            return 0.0

        def g(theta: float) -> float:
            st = math.sin(theta)
            ct = math.cos(theta)
            y = 1.0 - (1.0 - u) * st * st
            return straddle_density_bridge(x, y, u) * 2.0 * (1.0 - u) * st * ct

        return 2.0 * u * sp * cp * integrate(g, 0.0, _HALF_PI, inner_spec)

    return integrate(slice_mass, 0.0, _HALF_PI, outer_spec)


def segment_length_marginal(l: float, quad: QuadratureSpec | None = None) -> float:
    """Density of the covering segment length at ``l``; identically one.

    The segment covering an independent uniform point is length-biased:
    integrating the uniform point out of the straddle density multiplies it
    by the segment length.  The diagonal integral of l * density(x, x + l)
    over the start point x then gives the covering-length density, computed
    here after x = (1 - l) sin^2(theta) to absorb both edge singularities.
    """
    if not 0.0 < l < 1.0:
        raise ValueError("l must lie strictly inside (0, 1)")
    spec = quad or QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12)

    def g(theta: float) -> float:
        st = math.sin(theta)
        ct = math.cos(theta)
        x = (1.0 - l) * st * st
        mid = x + 0.5 * l  # any point inside the segment selects it
        return l * straddle_density_bridge(x, x + l, mid) * 2.0 * (1.0 - l) * st * ct

    return integrate(g, 0.0, _HALF_PI, spec)


# ---------------------------------------------------------------------------
# Replicated studies (map-reduce, deterministic chunked seeding)
# ---------------------------------------------------------------------------

def _gap_record(values: np.ndarray, u: float, n: int) -> tuple[float, float, float]:
    """Per-replication reduction: overall max gap, covering segment length
    for the uniform point ``u``, and the segment's space-rescaled gap max."""
    idx = _kernels.upper_hull(values)
    vals = values[idx]
    maj = np.interp(np.arange(n + 1, dtype=np.float64), idx.astype(np.float64), vals)
    maj[idx] = vals
    gap = maj - values
    gmax = max(float(gap[np.argmax(gap)]), 0.0)
    tv = idx / n
    if np.any(tv == u):
        u = u + 0.5 / n if u < 0.5 else u - 0.5 / n
    j = int(np.searchsorted(tv, u))
    a = int(idx[j - 1])
    b = int(idx[j])
    seg_len = (b - a) / n
    seg_max = max(float(np.max(gap[a:b + 1])), 0.0)
    return gmax, seg_len, seg_max / math.sqrt(seg_len)


@dataclass(frozen=True)
class GapStudy:
    """Arrays of per-replication gap statistics from :func:`gap_study`."""

    kind: str
    n: int
    replications: int
    seed: int
    max_gaps: np.ndarray
    covering_lengths: np.ndarray
    rescaled_maxima: np.ndarray
    endpoints: np.ndarray

    @property
    def degenerate_count(self) -> int:
        """Replications whose selected segment showed no gap at all."""
        return int(np.sum(self.rescaled_maxima == 0.0))


def _study_chunk(args) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    kind, n, b, seed, chunk, count = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    gaps = np.empty(count)
    lengths = np.empty(count)
    rescaled = np.empty(count)
    ends = np.empty(count)
    for i in range(count):
        if kind == "bridge":
            path = sample_bridge(n, b, rng)
        else:
            path = sample_motion(n, rng)
        u = rng.random()
        gaps[i], lengths[i], rescaled[i] = _gap_record(path.values, u, n)
        ends[i] = path.values[n]
    return gaps, lengths, rescaled, ends


def gap_study(n: int, replications: int, seed: int = 0, kind: str = "bridge",
              b: float = 0.0, n_threads: int = 1) -> GapStudy:
    """Replicated (path, hull, gap) simulation.

    Work is cut into fixed chunks of 64 replications, each driven by the
    stream seeded with (seed, chunk index), so results are byte-identical
    for every ``n_threads``; threads only spread the chunks over processes.
    """
    _check_grid_n(n)
    if replications < 1:
        raise ValueError("replications must be at least 1")
    if kind not in ("bridge", "motion"):
        raise ValueError("kind must be 'bridge' or 'motion'")
    if n_threads < 1:
        raise ValueError("n_threads must be at least 1")
    seed = int(seed) % 2**64
    chunks = []
    done = 0
    index = 0
    while done < replications:
        take = min(_STUDY_CHUNK, replications - done)
        chunks.append((kind, n, float(b), seed, index, take))
        done += take
        index += 1
    if n_threads > 1:
        with ProcessPoolExecutor(max_workers=n_threads) as pool:
            parts = list(pool.map(_study_chunk, chunks, chunksize=1))
    else:
        parts = [_study_chunk(c) for c in chunks]
    return GapStudy(
        kind=kind,
        n=n,
        replications=replications,
        seed=seed,
        max_gaps=np.concatenate([p[0] for p in parts]),
        covering_lengths=np.concatenate([p[1] for p in parts]),
        rescaled_maxima=np.concatenate([p[2] for p in parts]),
        endpoints=np.concatenate([p[3] for p in parts]),
    )


# ---------------------------------------------------------------------------
# Distributional checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DoobCheck:
    probes: tuple
    ks_statistics: tuple
    ks_critical_1pct: float
    covariance: float
    covariance_se: float
    covariance_expected: float
    replications: int


def doob_transform_check(n: int, rng: np.random.Generator, u: float = 0.2,
                         u_hat: float = 0.7, replications: int = 5000,
                         probes: tuple = (0.25, 0.5, 0.75)) -> DoobCheck:
    """Map standard bridges through the two-parameter space-time transform
    and compare the image marginals with the bridge law.

    With d(v) = 1 - u - v(u_hat - u), the image of the bridge Y at v is
    X(v) = d(v)/sqrt((1-u)(1-u_hat)) * Y(v(1-u_hat)/d(v)); X is again a
    standard bridge, so X(v) ~ Normal(0, v(1-v)) and
    cov(X(v), X(w)) = v(1-w).  Returns the KS distances at the probe times
    plus the sample covariance between the first and last probes.
    """
    _check_grid_n(n)
    if not 0.0 <= u < u_hat < 1.0:
        raise ValueError("need 0 <= u < u_hat < 1")
    if replications < 2:
        raise ValueError("replications must be at least 2")
    probes = tuple(float(p) for p in probes)
    if not all(0.0 < p < 1.0 for p in probes) or len(probes) < 1:
        raise ValueError("probes must lie strictly inside (0, 1)")
    v = np.array(probes)
    d = 1.0 - u - v * (u_hat - u)
    warped = v * (1.0 - u_hat) / d
    scale = d / math.sqrt((1.0 - u) * (1.0 - u_hat))
    grid = np.arange(n + 1) / n
    image = np.empty((replications, v.size))
    for r in range(replications):
        path = sample_bridge(n, 0.0, rng)
        image[r] = scale * np.interp(warped, grid, path.values)
    sds = np.sqrt(v * (1.0 - v))
    ks = tuple(
        ks_distance(image[:, k], lambda x, s=sds[k]: std_normal_cdf(x / s))
        for k in range(v.size)
    )
    cov, cov_se = covariance_with_se(image[:, 0], image[:, -1])
    return DoobCheck(
        probes=probes,
        ks_statistics=ks,
        ks_critical_1pct=ks_critical(replications, 0.01),
        covariance=cov,
        covariance_se=cov_se,
        covariance_expected=probes[0] * (1.0 - probes[-1]),
        replications=replications,
    )


@dataclass(frozen=True)
class ExcursionCheck:
    ks_statistic: float
    ks_critical_1pct: float
    length_correlation: float
    degenerate_count: int
    replications: int


def excursion_decomposition_check(n: int, rng: np.random.Generator,
                                  replications: int = 5000,
                                  law: M3Law | None = None) -> ExcursionCheck:
    """Rescale the gap over the segment covering an independent uniform
    point by 1/sqrt(length); the maxima must follow the excursion-max law
    regardless of the length.  Returns the KS distance against f3_cdf and
    the correlation between rescaled maximum and segment length."""
    _check_grid_n(n)
    if replications < 2:
        raise ValueError("replications must be at least 2")
    law = law or default_law()
    lengths = np.empty(replications)
    rescaled = np.empty(replications)
    for r in range(replications):
        path = sample_bridge(n, 0.0, rng)
        u = rng.random()
        _, lengths[r], rescaled[r] = _gap_record(path.values, u, n)
    return ExcursionCheck(
        ks_statistic=ks_distance(rescaled, law.f3_cdf),
        ks_critical_1pct=ks_critical(replications, 0.01),
        length_correlation=pearson(rescaled, lengths),
        degenerate_count=int(np.sum(rescaled == 0.0)),
        replications=replications,
    )


@dataclass(frozen=True)
class EndpointCheck:
    gap_endpoint_correlation: float
    length_endpoint_correlation: float
    threshold: float
    replications: int


def endpoint_independence_check(n: int, rng: np.random.Generator,
                                replications: int = 10_000) -> EndpointCheck:
    """For unpinned motions, the max gap and the covering length are both
    independent of the terminal value; report the sample correlations and
    the 3/sqrt(replications) band they should sit inside."""
    _check_grid_n(n)
    if replications < 2:
        raise ValueError("replications must be at least 2")
    gaps = np.empty(replications)
    lengths = np.empty(replications)
    ends = np.empty(replications)
    for r in range(replications):
        path = sample_motion(n, rng)
        u = rng.random()
        gaps[r], lengths[r], _ = _gap_record(path.values, u, n)
        ends[r] = path.values[n]
    return EndpointCheck(
        gap_endpoint_correlation=pearson(gaps, ends),
        length_endpoint_correlation=pearson(lengths, ends),
        threshold=3.0 / math.sqrt(replications),
        replications=replications,
    )
