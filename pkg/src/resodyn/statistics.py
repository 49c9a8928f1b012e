"""Statistics of parametric width velocities in weakly open chaotic systems.

Two Monte-Carlo routes produce samples of the rescaled width velocity y:

* a *representation* route that draws the ingredients of the weak-coupling
  velocity directly (a chi-square width factor, a model spectrum, and two
  sets of independent normals), and
* a *direct-matrix* route that builds full random realizations (spectrum,
  decay amplitudes, random symmetric perturbation), evaluates the
  weak-coupling velocity formula level by level, and rescales.

The analytic side provides the Porter-Thomas width distribution, the
spectral kernels for rigid (picket-fence) and GOE level sequences, their
convolution into the velocity distribution, its large-channel-count limit,
and a chi-square goodness-of-fit report for sample/curve comparison.

Both routes draw every realization from its own counter-based RNG substream
keyed by (seed, realization index), so results are bit-identical no matter
how the realizations are scheduled across threads.
"""

from __future__ import annotations

import concurrent.futures
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats
from scipy.optimize import brentq
from scipy.special import gammaln

from .errors import TruncationWarning

__all__ = [
    "SpectrumModel",
    "EnsembleConfig",
    "VelocitySampleSet",
    "FitReport",
    "sample_goe",
    "picket_fence_spectrum",
    "sample_couplings",
    "porter_thomas_pdf",
    "phi_goe",
    "phi_pf",
    "phi_goe_cdf",
    "phi_pf_cdf",
    "velocity_pdf",
    "velocity_cdf",
    "large_m_limit_pf",
    "sample_velocities_representation",
    "sample_velocities_direct",
    "compare_histogram",
    "substream",
]

# internal mean partial width for the direct route, in units of the level
# spacing; the rescaled velocity is exactly independent of this choice
WEAK_COUPLING_GAMMA = 1e-3
DEGENERACY_SKIP_TOL = 1e-8
TRUNCATION_WARN_LEVEL = 0.05

_MAX_SEED = 2**64


def substream(seed: int, index: int) -> np.random.Generator:
    """Counter-based RNG substream for one realization of an ensemble run."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SpectrumModel:
    """Closed-system spectrum model: GOE or equidistant (picket-fence) levels.

    `spacing` is the mean level spacing at the band center; the GOE entry
    variances are normalized so that the semicircle's central spacing equals
    it exactly (sigma^2 = N * spacing^2 / pi^2 off-diagonal).
    """

    kind: str
    spacing: float = 1.0

    def __post_init__(self):
        kind = {"pf": "picket-fence"}.get(self.kind, self.kind)
        if kind not in ("goe", "picket-fence"):
            raise ValueError(f"unknown spectrum model {self.kind!r}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "kind", kind)

    @classmethod
    def goe(cls, spacing: float = 1.0) -> "SpectrumModel":
        return cls(kind="goe", spacing=spacing)

    @classmethod
    def picket_fence(cls, spacing: float = 1.0) -> "SpectrumModel":
        return cls(kind="picket-fence", spacing=spacing)

    @property
    def is_rigid(self) -> bool:
        return self.kind == "picket-fence"


@dataclass(frozen=True)
class EnsembleConfig:
    """Configuration of a velocity-sampling run."""

    n_levels: int
    n_channels: int
    realizations: int
    central_window: int
    seed: int
    model: SpectrumModel
    route: str = "direct"

    def __post_init__(self):
        route = {"direct-matrix": "direct"}.get(self.route, self.route)
        if route not in ("direct", "representation"):
            raise ValueError(f"unknown route {self.route!r}")
        object.__setattr__(self, "route", route)
        if self.n_levels < 2:
            raise ValueError("need at least two levels")
        if self.n_channels < 1:
            raise ValueError("need at least one channel")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if not 2 <= self.central_window <= self.n_levels:
            raise ValueError("central_window must lie in [2, n_levels]")
        if not 0 <= self.seed < _MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def as_dict(self) -> dict:
        return {
            "n_levels": self.n_levels,
            "n_channels": self.n_channels,
            "realizations": self.realizations,
            "central_window": self.central_window,
            "seed": self.seed,
            "model": self.model.kind,
            "spacing": self.model.spacing,
            "route": self.route,
        }


@dataclass(frozen=True)
class VelocitySampleSet:
    """Rescaled width-velocity samples with their provenance.

    `counts[r]` is the number of samples contributed by realization r
    (window size minus any degeneracy skips for the direct route, one for
    the representation route).  `truncation_deficit` estimates the relative
    variance lost to the window truncation of the representation-route sum.
    """

    values: np.ndarray
    config: EnsembleConfig
    counts: np.ndarray
    truncation_deficit: float = 0.0
    skipped_levels: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        c = np.asarray(self.counts, dtype=int)
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    @property
    def n_samples(self) -> int:
        return self.values.size

    def second_moment(self) -> tuple[float, float]:
        """Sample second moment of y and its standard error.

        Realizations are independent, so the error bar comes from the
        scatter of per-realization batch means, which is robust to the
        within-realization correlations of the direct route.
        """
        sq = self.values**2
        edges = np.concatenate(([0], np.cumsum(self.counts)))
        nonempty = self.counts > 0
        batch = np.add.reduceat(sq, edges[:-1][nonempty]) / self.counts[nonempty]
        n_batch = batch.size
        if n_batch < 2:
            return float(sq.mean()), float("inf")
        weights = self.counts[nonempty] / self.counts[nonempty].sum()
        moment = float(np.sum(weights * batch))
        se = float(np.sqrt(np.sum(weights**2 * (batch - moment) ** 2)))
        return moment, se


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------


def sample_goe(n: int, rng: np.random.Generator, spacing: float = 1.0) -> np.ndarray:
    """Draw a real symmetric GOE matrix with central level spacing `spacing`.

    Off-diagonal entries are N(0, sigma^2) and diagonal entries
    N(0, 2 sigma^2) with sigma^2 = n * spacing^2 / pi^2, which puts the
    semicircle's mean spacing at the band center exactly at `spacing`.
    """
    if n < 2:
        raise ValueError("need at least a 2x2 matrix")
    sigma = math.sqrt(n) * spacing / math.pi
    x = rng.standard_normal((n, n))
    return (x + x.T) * (sigma / math.sqrt(2.0))


def picket_fence_spectrum(n: int, spacing: float = 1.0) -> np.ndarray:
    """Equidistant levels symmetric about zero: ``(k - (n+1)/2) * spacing``.

    Odd n places one level exactly at zero; even n has none (the two central
    levels sit at +-spacing/2).
    """
    if n < 2:
        raise ValueError("need at least two levels")
    k = np.arange(1, n + 1, dtype=float)
    return (k - 0.5 * (n + 1)) * spacing


def sample_couplings(
    n: int, m: int, gamma_bar: float, rng: np.random.Generator
) -> np.ndarray:
    """I.i.d. zero-mean normal decay amplitudes with entry variance `gamma_bar`.

    The resulting widths ``Gamma_n = sum_c A_nc^2`` are `gamma_bar` times a
    chi-square variable with `m` degrees of freedom (Porter-Thomas).
    """
    if gamma_bar <= 0:
        raise ValueError("gamma_bar must be positive")
    return math.sqrt(gamma_bar) * rng.standard_normal((n, m))


def porter_thomas_pdf(kappa, m: int):
    """Porter-Thomas density of the rescaled width ``kappa = Gamma / gamma_bar``.

    ``kappa^(m/2-1) exp(-kappa/2) / (2^(m/2) Gamma(m/2))`` -- a chi-square
    density with `m` degrees of freedom (mean m, variance 2m).
    """
    if m < 1:
        raise ValueError("channel count m must be >= 1")
    k = np.asarray(kappa, dtype=float)
    if (k <= 0).any():
        raise ValueError("kappa must be positive")
    log_pdf = (0.5 * m - 1.0) * np.log(k) - 0.5 * k - 0.5 * m * math.log(2.0) - gammaln(0.5 * m)
    out = np.exp(log_pdf)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# analytic distributions
# ---------------------------------------------------------------------------


def phi_goe(y):
    """Spectral kernel of the velocity distribution for GOE level sequences:
    ``(4 + y^2) / (6 (1 + y^2)^(5/2))``.  Even, normalized, |y|^-3 tail."""
    y = np.asarray(y, dtype=float)
    out = (4.0 + y**2) / (6.0 * (1.0 + y**2) ** 2.5)
    return out if out.ndim else float(out)


def phi_pf(y):
    """Spectral kernel for an equidistant spectrum: ``pi / (2 (1 + cosh(pi y)))``.

    Evaluated as ``pi e^(-pi|y|) / (1 + e^(-pi|y|))^2``, which is the same
    function in a form that neither overflows nor loses precision for any
    representable y.
    """
    y = np.asarray(y, dtype=float)
    e = np.exp(-math.pi * np.abs(y))
    out = math.pi * e / (1.0 + e) ** 2
    return out if out.ndim else float(out)


def phi_goe_cdf(y):
    """Cumulative form of :func:`phi_goe`: ``1/2 + y (2/3 + y^2/2) / (1+y^2)^(3/2)``."""
    y = np.clip(np.asarray(y, dtype=float), -1e100, 1e100)
    out = 0.5 + y * (2.0 / 3.0 + 0.5 * y**2) / (1.0 + y**2) ** 1.5
    return out if out.ndim else float(out)


def phi_pf_cdf(y):
    """Cumulative form of :func:`phi_pf`: ``(1 + tanh(pi y / 2)) / 2``."""
    y = np.asarray(y, dtype=float)
    out = 0.5 * (1.0 + np.tanh(0.5 * math.pi * y))
    return out if out.ndim else float(out)


def _kernel(model) -> tuple:
    if isinstance(model, SpectrumModel):
        kind = model.kind
    else:
        kind = {"pf": "picket-fence"}.get(str(model), str(model))
    if kind == "goe":
        return phi_goe, phi_goe_cdf
    if kind == "picket-fence":
        return phi_pf, phi_pf_cdf
    raise ValueError(f"unknown spectrum model {model!r}")


def _mixture_quad(
    y: float,
    m: int,
    kernel,
    *,
    weight_power: int,
    epsabs: float = 0.0,
    epsrel: float = 1e-10,
) -> float:
    # substitution kappa = t^2 regularizes the kappa^(m/2-1)/sqrt(kappa) endpoint;
    # weight_power = m-2 carries the extra 1/sqrt(kappa) of the density mixture,
    # m-1 the plain chi-square weight of the cumulative mixture
    log_norm = -0.5 * m * math.log(2.0) - gammaln(0.5 * m)

    def integrand(t):
        if t <= 0.0:
            return 0.0
        log_w = weight_power * math.log(t) - 0.5 * t * t + log_norm
        return 2.0 * math.exp(log_w) * kernel(y / t)

    # the kernel factor switches on sharply around t ~ |y|; integrating the
    # two sides separately keeps the adaptive subdivision well conditioned
    split = abs(y)
    if 0.0 < split < 10.0:
        lower, _ = integrate.quad(
            integrand, 0.0, split, epsabs=epsabs, epsrel=epsrel, limit=200
        )
        upper, _ = integrate.quad(
            integrand, split, np.inf, epsabs=epsabs, epsrel=epsrel, limit=200
        )
        return lower + upper
    val, _ = integrate.quad(
        integrand, 0.0, np.inf, epsabs=epsabs, epsrel=epsrel, limit=200
    )
    return val


def velocity_pdf(y, m: int, model):
    """Velocity distribution: chi-square width mixture of the spectral kernel.

    ``P_m(y) = integral_0^inf dk k^(-1/2) PT_m(k) phi(y / sqrt(k))``,
    evaluated by adaptive quadrature after the substitution k = t^2.  For a
    single channel the density has an integrable divergence at y = 0, which
    is rejected as a singular point rather than approximated.
    """
    if m < 1:
        raise ValueError("channel count m must be >= 1")
    phi, _ = _kernel(model)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    # the single-channel density grows like log(1/|y|); below ~1e-10 the
    # quadrature is dominated by the divergence and the point is rejected
    if m == 1 and (np.abs(ys) < 1e-10).any():
        raise ValueError("singular point: the single-channel density diverges at y=0")
    out = np.array([_mixture_quad(v, m, phi, weight_power=m - 2) for v in ys])
    return out if np.ndim(y) else float(out[0])


def velocity_cdf(y, m: int, model):
    """Cumulative velocity distribution, via the same chi-square mixture."""
    if m < 1:
        raise ValueError("channel count m must be >= 1")
    _, kernel_cdf = _kernel(model)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.array(
        [
            _mixture_quad(
                v, m, kernel_cdf, weight_power=m - 1, epsabs=1e-14, epsrel=1e-12
            )
            for v in ys
        ]
    )
    return out if np.ndim(y) else float(out[0])


def large_m_limit_pf(y, m: int):
    """Many-channel limit of the rigid-spectrum velocity distribution:
    ``phi_pf(y / sqrt(m)) / sqrt(m)``."""
    if m < 1:
        raise ValueError("channel count m must be >= 1")
    root = math.sqrt(m)
    out = phi_pf(np.asarray(y, dtype=float) / root) / root
    return out if np.ndim(y) else float(out)


# ---------------------------------------------------------------------------
# Monte-Carlo sampling
# ---------------------------------------------------------------------------


def _window_offsets(window: int) -> np.ndarray:
    """Neighbor offsets (in units of levels) for a window of `window` levels
    centered on the reference; any odd neighbor goes to the positive side."""
    neg = (window - 1) // 2
    pos = window - 1 - neg
    return np.concatenate((np.arange(-neg, 0), np.arange(1, pos + 1)))


def _pf_truncation_deficit(offsets: np.ndarray) -> float:
    total = math.pi**2 / 3.0
    kept = float(np.sum(1.0 / offsets.astype(float) ** 2))
    return max(0.0, 1.0 - kept / total)


def _run_realizations(task, realizations: int, workers: int) -> list:
    if workers <= 1:
        return [task(r) for r in range(realizations)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(realizations)))


def sample_velocities_representation(
    config: EnsembleConfig, *, workers: int = 1
) -> VelocitySampleSet:
    """Sample rescaled width velocities from their weak-coupling representation.

    Each realization draws a chi-square width factor kappa, a model spectrum
    with the reference level at zero (picket fence) or nearest zero (GOE),
    and independent standard normals z_m, v_m, and returns

        y = (sqrt(kappa) / pi) * spacing * sum_m z_m v_m / (E_ref - E_m)

    with the sum truncated to the `central_window` levels around the
    reference.  The relative variance lost to the truncation is recorded
    (and warned about when it exceeds 5%).
    """
    if config.route != "representation":
        raise ValueError(f"config.route is {config.route!r}, expected 'representation'")
    model = config.model
    window = config.central_window
    offsets = _window_offsets(window)
    deficit = _pf_truncation_deficit(offsets)
    if deficit > TRUNCATION_WARN_LEVEL:
        warnings.warn(
            f"window of {window} levels truncates the velocity sum; estimated "
            f"relative variance deficit {deficit:.1%}",
            TruncationWarning,
            stacklevel=2,
        )
    pf_denominators = -offsets.astype(float) * model.spacing

    def one(r: int) -> float:
        rng = substream(config.seed, r)
        kappa = rng.chisquare(config.n_channels)
        if model.is_rigid:
            denom = pf_denominators
        else:
            levels = np.linalg.eigvalsh(sample_goe(config.n_levels, rng, model.spacing))
            keep = np.argsort(np.abs(levels), kind="stable")[:window]
            ref = keep[0]
            denom = levels[ref] - levels[keep[1:]]
        z = rng.standard_normal(window - 1)
        v = rng.standard_normal(window - 1)
        return (
            math.sqrt(kappa) / math.pi * model.spacing * float(np.sum(z * v / denom))
        )

    values = np.array(_run_realizations(one, config.realizations, workers))
    return VelocitySampleSet(
        values=values,
        config=config,
        counts=np.ones(config.realizations, dtype=int),
        truncation_deficit=deficit,
    )


def sample_velocities_direct(
    config: EnsembleConfig, *, workers: int = 1
) -> VelocitySampleSet:
    """Sample rescaled width velocities from full random-matrix realizations.

    Each realization builds the closed-system spectrum (picket fence or
    GOE), Gaussian decay amplitudes A, and a GOE-distributed symmetric
    perturbation W, evaluates the weak-coupling width velocity for the
    `central_window` levels nearest zero, and rescales each velocity by

        n_levels * spacing / (2 pi)  /  (gamma_bar * sqrt(Tr W^2)).

    The first factor makes the rescaled velocity dimensionless against the
    local density of states, so that the samples follow the same
    distribution as the representation route; dividing by the realization's
    own Tr W^2 makes the result exactly invariant under rescaling of the
    perturbation, and the choice of gamma_bar (internally 1e-3 spacing)
    cancels identically.  Levels with a neighbor closer than 1e-8 spacing
    are skipped and counted.
    """
    if config.route != "direct":
        raise ValueError(f"config.route is {config.route!r}, expected 'direct'")
    model = config.model
    n, window = config.n_levels, config.central_window
    gamma_bar = WEAK_COUPLING_GAMMA * model.spacing
    rescale_num = n * model.spacing / (2.0 * math.pi)
    skip_tol = DEGENERACY_SKIP_TOL * model.spacing

    if model.is_rigid:
        pf_levels = picket_fence_spectrum(n, model.spacing)
        pf_idx = np.sort(np.argsort(np.abs(pf_levels), kind="stable")[:window])
        with np.errstate(divide="ignore"):
            pf_inv = 1.0 / (pf_levels[pf_idx, None] - pf_levels[None, :])
        pf_inv[np.arange(window), pf_idx] = 0.0

    def one(r: int):
        rng = substream(config.seed, r)
        if model.is_rigid:
            levels, idx, inv = pf_levels, pf_idx, pf_inv
            basis = None
        else:
            levels, basis = np.linalg.eigh(sample_goe(n, rng, model.spacing))
            idx = np.sort(np.argsort(np.abs(levels), kind="stable")[:window])
            diff = levels[idx, None] - levels[None, :]
            diff[np.arange(window), idx] = np.inf
            keep_rows = np.abs(diff).min(axis=1) >= skip_tol
            inv = np.zeros_like(diff)
            np.divide(1.0, diff, out=inv, where=np.isfinite(diff))
            idx, inv = idx[keep_rows], inv[keep_rows]
        amplitudes = sample_couplings(n, config.n_channels, gamma_bar, rng)
        x = rng.standard_normal((n, n))
        pert = (x + x.T) / math.sqrt(2.0)
        tr_sq = float(np.sum(pert * pert))
        if basis is None:
            b_rows = amplitudes[idx] @ amplitudes.T
            w_rows = pert[idx]
        else:
            rotated = basis.T @ amplitudes
            b_rows = rotated[idx] @ rotated.T
            w_rows = (basis[:, idx].T @ pert) @ basis
        gdot = 2.0 * np.sum(b_rows * w_rows * inv, axis=1)
        y = gdot * (rescale_num / (gamma_bar * math.sqrt(tr_sq)))
        return y, window - idx.size

    results = _run_realizations(one, config.realizations, workers)
    values = np.concatenate([y for y, _ in results]) if results else np.empty(0)
    counts = np.array([y.size for y, _ in results], dtype=int)
    skipped = int(sum(s for _, s in results))
    return VelocitySampleSet(
        values=values, config=config, counts=counts, skipped_levels=skipped
    )


# ---------------------------------------------------------------------------
# goodness of fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitReport:
    """Chi-square and sup-norm comparison of samples against a density."""

    statistic: float
    dof: int
    p_value: float
    sup_norm: float
    n_samples: int
    n_bins: int
    coarsened: bool
    note: str
    chi_edges: np.ndarray
    observed: np.ndarray
    expected: float
    density_edges: np.ndarray
    density_counts: np.ndarray
    density_values: np.ndarray
    density_pdf: np.ndarray

    density_columns = ("bin_left", "bin_right", "bin_center", "count", "density", "pdf")

    def density_table(self) -> np.ndarray:
        centers = 0.5 * (self.density_edges[:-1] + self.density_edges[1:])
        return np.column_stack(
            [
                self.density_edges[:-1],
                self.density_edges[1:],
                centers,
                self.density_counts,
                self.density_values,
                self.density_pdf,
            ]
        )


def _evaluate_pdf(pdf, points: np.ndarray) -> np.ndarray:
    """Evaluate a density on a grid, marking singular points as NaN."""
    try:
        return np.asarray(pdf(points), dtype=float)
    except ValueError:
        out = np.empty(points.shape)
        for i, p in enumerate(points):
            try:
                out[i] = pdf(p)
            except ValueError:
                out[i] = np.nan
        return out


def _numeric_cdf(pdf, lo: float, hi: float):
    grid = np.linspace(lo, hi, 20001)
    vals = np.asarray(pdf(grid), dtype=float)
    cum = integrate.cumulative_trapezoid(vals, grid, initial=0.0)
    total = cum[-1]
    if total <= 0:
        raise ValueError("density integrates to zero over the sample range")
    cum /= total

    def cdf(y):
        return np.interp(y, grid, cum)

    return cdf


def _quantile(cdf, q: float, lo: float, hi: float) -> float:
    # expand the bracket until it encloses the quantile
    for _ in range(200):
        if cdf(lo) < q:
            break
        lo = lo - (hi - lo)
    for _ in range(200):
        if cdf(hi) > q:
            break
        hi = hi + (hi - lo)
    return float(brentq(lambda y: cdf(y) - q, lo, hi, xtol=1e-12))


def compare_histogram(
    samples,
    pdf,
    *,
    cdf=None,
    chi_bins: int = 40,
    min_expected: int = 10,
    density_bins: int = 61,
    density_range: tuple[float, float] | None = None,
) -> FitReport:
    """Goodness-of-fit report of velocity samples against an analytic density.

    The chi-square statistic uses equal-probability bins (edges are
    quantiles of the target density); bins are coarsened, with a note, if
    the expected count per bin would fall below `min_expected`.  The
    sup-norm compares an equal-width binned density against the pdf at the
    bin centers over `density_range` (central 99% of the samples by
    default); the same binning is exposed for plotting.

    `pdf` must be vectorized over y; `cdf`, if omitted, is built numerically
    from `pdf`.
    """
    values = samples.values if isinstance(samples, VelocitySampleSet) else np.asarray(samples, dtype=float)
    n = values.size
    if n < 1000:
        raise ValueError(f"need at least 1000 samples for a stable fit, got {n}")

    note = ""
    coarsened = False
    k = chi_bins
    if n / k < min_expected:
        k = max(2, n // min_expected)
        coarsened = True
        note = f"coarsened to {k} bins to keep >= {min_expected} expected counts per bin"

    span = float(np.abs(values).max())
    lo, hi = -1.1 * span - 1.0, 1.1 * span + 1.0
    cdf_fn = cdf if cdf is not None else _numeric_cdf(pdf, lo, hi)
    edges = np.array([_quantile(cdf_fn, i / k, lo, hi) for i in range(1, k)])
    observed = np.bincount(np.searchsorted(edges, values), minlength=k).astype(float)
    expected = n / k
    statistic = float(np.sum((observed - expected) ** 2) / expected)
    dof = k - 1
    p_value = float(stats.chi2.sf(statistic, dof))

    if density_range is None:
        a = float(np.quantile(np.abs(values), 0.995))
        density_range = (-a, a)
    density_counts, density_edges = np.histogram(values, bins=density_bins, range=density_range)
    density_values = density_counts / (n * np.diff(density_edges))
    centers = 0.5 * (density_edges[:-1] + density_edges[1:])
    density_pdf = _evaluate_pdf(pdf, centers)
    finite = np.isfinite(density_pdf)
    sup_norm = float(np.abs(density_values[finite] - density_pdf[finite]).max())

    return FitReport(
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        sup_norm=sup_norm,
        n_samples=n,
        n_bins=k,
        coarsened=coarsened,
        note=note,
        chi_edges=edges,
        observed=observed,
        expected=expected,
        density_edges=density_edges,
        density_counts=density_counts.astype(float),
        density_values=density_values,
        density_pdf=density_pdf,
    )
