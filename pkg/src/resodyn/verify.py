"""Numerical invariant suite behind the ``verify`` command.

The fast level re-derives the deterministic identities of the package (sum
rules, closed form vs. eigensolver, shift-formula consistency, quadrature
normalizations and moments); the full level adds the seeded Monte-Carlo
acceptance checks.  Each check is independent: a failure is recorded and
the remaining checks still run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import integrate
from scipy.stats import chi2 as chi2_dist
from scipy.stats import ks_2samp, kstest

from .perturbation import (
    InteriorPerturbation,
    finite_difference_velocities,
    first_order_shift,
    weak_coupling_width_velocity,
    width_shift_from_U,
)
from .spectral import bell_steinberger, build_effective_hamiltonian, diagonalize
from .statistics import (
    EnsembleConfig,
    SpectrumModel,
    compare_histogram,
    phi_goe,
    phi_pf,
    sample_couplings,
    sample_goe,
    sample_velocities_direct,
    sample_velocities_representation,
    velocity_cdf,
    velocity_pdf,
)
from .twolevel import (
    TwoLevelParams,
    closed_form_resonances,
    energy_velocity,
    exceptional_point_distance,
    mixing_state,
    sweep,
    two_level_U,
    two_level_system,
    width_velocity,
)

__all__ = ["CheckResult", "run_checks", "random_two_level_params", "random_open_system"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_two_level_params(
    rng: np.random.Generator, *, min_ep_distance: float = 1e-3
) -> TwoLevelParams:
    """Draw model parameters away from exceptional points."""
    while True:
        p = TwoLevelParams(
            delta=rng.uniform(0.2, 3.0),
            gamma1=rng.uniform(0.0, 2.0),
            gamma2=rng.uniform(0.0, 2.0),
            theta=rng.uniform(0.0, math.pi),
            d=rng.uniform(-2.0, 2.0),
            v=rng.uniform(-2.0, 2.0),
            alpha=rng.uniform(-2.0, 2.0),
        )
        if exceptional_point_distance(p) >= min_ep_distance:
            return p


def random_open_system(rng: np.random.Generator, n: int, m: int = 3,
                       gamma_bar: float = 0.05):
    """A moderately open random system with a well-separated spectrum."""
    while True:
        h = sample_goe(n, rng)
        a = sample_couplings(n, m, gamma_bar, rng)
        heff = build_effective_hamiltonian(h, a)
        values = np.linalg.eigvals(heff.matrix)
        sep = np.abs(values[:, None] - values[None, :])
        np.fill_diagonal(sep, np.inf)
        if sep.min() > 1e-2:
            return heff


def _sorted_pair(pair):
    a, b = pair
    key = lambda z: (round(z.real, 14), round(z.imag, 14))
    return (a, b) if key(a) <= key(b) else (b, a)


# ---------------------------------------------------------------------------
# fast checks
# ---------------------------------------------------------------------------


def _check_sum_rules() -> CheckResult:
    rng = np.random.default_rng(1002)
    grid = np.linspace(-2.0, 2.0, 201)
    worst = 0.0
    for _ in range(2000):
        p = random_two_level_params(rng)
        table = sweep(p, grid)
        scale = p.gamma1 + p.gamma2 + abs(p.delta)
        err = max(
            np.abs(table.e1 + table.e2).max(),
            np.abs(table.gamma1 + table.gamma2 - (p.gamma1 + p.gamma2)).max(),
        )
        worst = max(worst, err / scale)
    return CheckResult(
        "two_level_sum_rules", worst <= 1e-12,
        f"worst scaled defect {worst:.2e} (tol 1e-12)",
    )


def _check_closed_form_vs_eigensolver() -> CheckResult:
    rng = np.random.default_rng(1003)
    worst = 0.0
    for _ in range(2000):
        p = random_two_level_params(rng)
        exact = _sorted_pair(closed_form_resonances(p))
        numeric = _sorted_pair(tuple(diagonalize(two_level_system(p)).values))
        worst = max(worst, max(abs(exact[0] - numeric[0]), abs(exact[1] - numeric[1])))
    return CheckResult(
        "closed_form_vs_eigensolver", worst <= 1e-10,
        f"worst eigenvalue deviation {worst:.2e} (tol 1e-10)",
    )


def _check_mixing_definition() -> CheckResult:
    rng = np.random.default_rng(1004)
    worst = 0.0
    for _ in range(2000):
        p = random_two_level_params(rng)
        ms = mixing_state(p)
        defect = abs(ms.f * (ms.epsilon + ms.branch_root) - ms.nu)
        worst = max(worst, defect / max(abs(ms.nu), abs(ms.epsilon)))
    return CheckResult(
        "mixing_definition", worst <= 1e-12,
        f"worst relative defect {worst:.2e} (tol 1e-12)",
    )


def _match_branch_to_system(p: TwoLevelParams):
    """Permutation and sign map from branch labels onto diagonalize() output."""
    sys = diagonalize(two_level_system(p))
    ms = mixing_state(p)
    norm = np.sqrt(1.0 - ms.f**2)
    branch_vecs = np.array([[1.0, 1j * ms.f], [-1j * ms.f, 1.0]]) / norm
    exact = closed_form_resonances(p)
    perm = [int(np.argmin(np.abs(sys.values - e))) for e in exact]
    signs = [
        float(np.sign((sys.right_vectors[:, perm[j]] @ branch_vecs[:, j]).real))
        for j in range(2)
    ]
    return sys, ms, perm, signs


def _check_u_cross() -> CheckResult:
    rng = np.random.default_rng(1005)
    worst = 0.0
    for _ in range(300):
        p = random_two_level_params(rng, min_ep_distance=0.1)
        sys, ms, perm, signs = _match_branch_to_system(p)
        u_numeric = bell_steinberger(sys).u
        u_exact = two_level_U(ms.f).u
        for j in range(2):
            for k in range(2):
                diff = abs(
                    u_exact[j, k]
                    - signs[j] * signs[k] * u_numeric[perm[j], perm[k]]
                )
                worst = max(worst, diff)
    return CheckResult(
        "nonorthogonality_cross_check", worst <= 1e-8,
        f"worst U-entry deviation {worst:.2e} (tol 1e-8)",
    )


def _check_two_level_velocities() -> CheckResult:
    rng = np.random.default_rng(1006)
    step = 1e-6
    worst = 0.0
    for _ in range(300):
        p = random_two_level_params(rng, min_ep_distance=0.1)
        f = mixing_state(p).f
        gdot, _ = width_velocity(f, p.d, p.v)
        edot, _ = energy_velocity(f, p.d, p.v)
        base = closed_form_resonances(p)
        shifted = []
        for da in (step, -step):
            pair = closed_form_resonances(p, p.alpha + da)
            if abs(pair[0] - base[0]) + abs(pair[1] - base[1]) > abs(
                pair[1] - base[0]
            ) + abs(pair[0] - base[1]):
                pair = (pair[1], pair[0])
            shifted.append(pair[0])
        deriv = (shifted[0] - shifted[1]) / (2.0 * step)
        scale = max(abs(gdot), abs(edot), 1e-6)
        worst = max(
            worst,
            max(abs(gdot + 2.0 * deriv.imag), abs(edot - deriv.real)) / scale,
        )
    return CheckResult(
        "two_level_velocities_vs_finite_difference", worst <= 1e-4,
        f"worst relative deviation {worst:.2e} (tol 1e-4)",
    )


def _check_width_shift_consistency() -> CheckResult:
    rng = np.random.default_rng(1007)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(5, 26))
        heff = random_open_system(rng, n)
        sys = diagonalize(heff)
        u = bell_steinberger(sys)
        x = rng.standard_normal((n, n))
        pert = InteriorPerturbation(v_matrix=0.5 * (x + x.T), strength=0.37)
        scale = abs(pert.strength) * np.linalg.norm(pert.v_matrix, 2)
        for level in range(n):
            direct = first_order_shift(sys, pert, level).delta_width
            via_u = width_shift_from_U(u, sys, pert, level)
            worst = max(
                worst, abs(via_u - direct) / max(abs(direct), 1e-3 * scale)
            )
    return CheckResult(
        "width_shift_route_consistency", worst <= 1e-10,
        f"worst relative deviation {worst:.2e} (tol 1e-10)",
    )


def _check_weak_coupling() -> CheckResult:
    rng = np.random.default_rng(1008)
    worst = 0.0
    for _ in range(10):
        n = 25
        while True:
            h = sample_goe(n, rng)
            levels, basis = np.linalg.eigh(h)
            if np.diff(levels).min() > 0.2:
                break
        a = sample_couplings(n, 2, 1e-3, rng)
        x = rng.standard_normal((n, n))
        v = 0.5 * (x + x.T)
        heff = build_effective_hamiltonian(h, a)
        pert = InteriorPerturbation(v_matrix=v, strength=0.0)
        _, fd = finite_difference_velocities(heff, pert)
        formula = np.array(
            [weak_coupling_width_velocity(levels, basis, a, v, k) for k in range(n)]
        )
        worst = max(worst, np.abs(formula - fd).max() / np.abs(formula).max())
    return CheckResult(
        "weak_coupling_vs_finite_difference", worst <= 1e-3,
        f"worst scale-relative deviation {worst:.2e} (tol 1e-3)",
    )


def _check_trace_identity() -> CheckResult:
    rng = np.random.default_rng(1009)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 30))
        heff = random_open_system(rng, n)
        total = diagonalize(heff).values.sum()
        expected = np.trace(heff.hermitian_part) - 0.5j * np.trace(heff.decay_gram)
        worst = max(worst, abs(total - expected) / abs(expected))
    return CheckResult(
        "trace_identity", worst <= 1e-10,
        f"worst relative deviation {worst:.2e} (tol 1e-10)",
    )


def _check_kernel_values() -> CheckResult:
    ok = phi_goe(0.0) == 2.0 / 3.0 and phi_pf(0.0) == math.pi / 4.0
    return CheckResult(
        "kernel_spot_values", ok,
        f"phi_goe(0)={phi_goe(0.0)!r} (2/3), phi_pf(0)={phi_pf(0.0)!r} (pi/4)",
    )


def _check_kernel_normalization() -> CheckResult:
    worst = 0.0
    for kernel in (phi_goe, phi_pf):
        val, _ = integrate.quad(kernel, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        worst = max(worst, abs(val - 1.0))
    return CheckResult(
        "kernel_normalization", worst <= 1e-10,
        f"worst |integral - 1| = {worst:.2e} (tol 1e-10)",
    )


def _half_line_quad(fn) -> float:
    val, _ = integrate.quad(fn, 0.0, np.inf, epsabs=1e-10, epsrel=1e-9, limit=300)
    return 2.0 * val  # even integrand


def _check_pdf_normalization() -> CheckResult:
    worst = 0.0
    for model in ("pf", "goe"):
        for m in (2, 5, 10):
            total = _half_line_quad(lambda y: velocity_pdf(y, m, model))
            worst = max(worst, abs(total - 1.0))
    return CheckResult(
        "velocity_pdf_normalization", worst <= 1e-6,
        f"worst |integral - 1| = {worst:.2e} over M in (2,5,10), both models (tol 1e-6)",
    )


def _check_rigid_variance_quadrature() -> CheckResult:
    worst = 0.0
    for m in (1, 2, 5, 10):
        moment = _half_line_quad(lambda y: y * y * velocity_pdf(y, m, "pf"))
        worst = max(worst, abs(moment - m / 3.0))
    return CheckResult(
        "rigid_variance_quadrature", worst <= 1e-6,
        f"worst |second moment - M/3| = {worst:.2e} (tol 1e-6)",
    )


def _check_goe_tail() -> CheckResult:
    ys = np.geomspace(50.0, 500.0, 9)
    worst = 0.0
    for m in (1, 2, 5, 10):
        slope = np.polyfit(np.log(ys), np.log(velocity_pdf(ys, m, "goe")), 1)[0]
        worst = max(worst, abs(slope + 3.0))
    return CheckResult(
        "goe_tail_exponent", worst <= 0.05,
        f"worst |slope + 3| = {worst:.3f} over y in [50, 500] (tol 0.05)",
    )


def _check_kernel_fourier() -> CheckResult:
    def rigidity_product(w: float) -> float:
        return w / math.sinh(w) if w != 0.0 else 1.0

    worst = 0.0
    for y in np.linspace(-5.0, 5.0, 11):
        val, _ = integrate.quad(
            rigidity_product, 0.0, 60.0,
            weight="cos", wvar=float(y), epsabs=1e-13, epsrel=1e-12, limit=400,
        )
        worst = max(worst, abs(val / math.pi - phi_pf(y)))
    return CheckResult(
        "rigid_kernel_fourier_transform", worst <= 1e-8,
        f"worst deviation {worst:.2e} from the product-formula transform (tol 1e-8)",
    )


# ---------------------------------------------------------------------------
# full (Monte-Carlo) checks
# ---------------------------------------------------------------------------


def _direct_samples(seed: int, m: int):
    cfg = EnsembleConfig(
        n_levels=250, n_channels=m, realizations=2000, central_window=25,
        seed=seed, model=SpectrumModel.picket_fence(), route="direct",
    )
    return sample_velocities_direct(cfg)


def _check_coupling_widths(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    m = 2
    a = sample_couplings(200000, m, 0.7, rng)
    var = a.var()
    se = 0.7 * math.sqrt(2.0 / a.size)
    kappa = (a**2).sum(axis=1) / 0.7
    p_value = kstest(kappa, chi2_dist(df=m).cdf).pvalue
    ok = abs(var - 0.7) <= 3.0 * se and p_value >= 0.01
    return CheckResult(
        "coupling_width_distribution", ok,
        f"entry variance z={abs(var - 0.7) / se:.2f} (<3), "
        f"chi-square KS p={p_value:.3f} (>=0.01)",
    )


def _check_goe_spacing(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = 250
    gaps = []
    for _ in range(100):
        levels = np.linalg.eigvalsh(sample_goe(n, rng))
        central = np.sort(levels[np.abs(levels) < 10.0])
        gaps.extend(np.diff(central))
    mean_gap = float(np.mean(gaps))
    return CheckResult(
        "goe_central_spacing", abs(mean_gap - 1.0) <= 0.02,
        f"mean central spacing {mean_gap:.4f} (target 1 +- 2%)",
    )


def _check_mc_variance(samples_by_m: dict) -> CheckResult:
    detail = []
    ok = True
    for m, samples in samples_by_m.items():
        moment, se = samples.second_moment()
        z = (moment - m / 3.0) / se
        ok = ok and abs(z) <= 3.0
        detail.append(f"M={m}: z={z:+.2f}")
    return CheckResult(
        "rigid_variance_monte_carlo", ok, "; ".join(detail) + " (|z| <= 3)"
    )


def _check_mc_chi2(samples_by_m: dict) -> CheckResult:
    detail = []
    ok = True
    for m, samples in samples_by_m.items():
        report = compare_histogram(
            samples,
            partial(velocity_pdf, m=m, model="pf"),
            cdf=partial(velocity_cdf, m=m, model="pf"),
        )
        ok = ok and report.p_value >= 0.01
        detail.append(f"M={m}: p={report.p_value:.3f}")
    return CheckResult(
        "direct_route_chi_square", ok, "; ".join(detail) + " (p >= 0.01)"
    )


def _check_route_equivalence(seed: int) -> CheckResult:
    cfg_direct = EnsembleConfig(
        n_levels=250, n_channels=2, realizations=300, central_window=25,
        seed=seed, model=SpectrumModel.picket_fence(), route="direct",
    )
    cfg_rep = EnsembleConfig(
        n_levels=250, n_channels=2, realizations=7000, central_window=25,
        seed=seed + 1, model=SpectrumModel.picket_fence(), route="representation",
    )
    direct = sample_velocities_direct(cfg_direct)
    rep = sample_velocities_representation(cfg_rep)
    result = ks_2samp(direct.values, rep.values)
    return CheckResult(
        "route_equivalence", result.pvalue >= 0.01,
        f"two-sample KS p={result.pvalue:.3f} (>= 0.01), D={result.statistic:.4f}",
    )


def _check_thread_determinism(seed: int) -> CheckResult:
    cfg = EnsembleConfig(
        n_levels=250, n_channels=1, realizations=100, central_window=25,
        seed=seed, model=SpectrumModel.picket_fence(), route="direct",
    )
    serial = sample_velocities_direct(cfg, workers=1)
    threaded = sample_velocities_direct(cfg, workers=3)
    identical = np.array_equal(serial.values, threaded.values)
    return CheckResult(
        "thread_determinism", identical,
        "serial and 3-thread runs bit-identical" if identical else "runs differ",
    )


_FAST_CHECKS = (
    _check_sum_rules,
    _check_closed_form_vs_eigensolver,
    _check_mixing_definition,
    _check_u_cross,
    _check_two_level_velocities,
    _check_width_shift_consistency,
    _check_weak_coupling,
    _check_trace_identity,
    _check_kernel_values,
    _check_kernel_normalization,
    _check_pdf_normalization,
    _check_rigid_variance_quadrature,
    _check_goe_tail,
    _check_kernel_fourier,
)


def run_checks(level: str = "fast", seed: int = 7) -> list[CheckResult]:
    """Run the invariant suite; never aborts on an individual failure."""
    if level not in ("fast", "full"):
        raise ValueError(f"unknown verification level {level!r}")
    results = []

    def guarded(fn, *args):
        try:
            results.append(fn(*args))
        except Exception as exc:  # noqa: BLE001 - report, keep sweeping
            results.append(CheckResult(fn.__name__.lstrip("_"), False, f"raised {exc!r}"))

    for check in _FAST_CHECKS:
        guarded(check)

    if level == "full":
        guarded(_check_coupling_widths, seed)
        guarded(_check_goe_spacing, seed)
        try:
            samples_by_m = {m: _direct_samples(seed, m) for m in (1, 2, 5, 10)}
        except Exception as exc:  # noqa: BLE001
            results.append(CheckResult("rigid_sampling", False, f"raised {exc!r}"))
        else:
            guarded(_check_mc_variance, samples_by_m)
            guarded(_check_mc_chi2, samples_by_m)
        guarded(_check_route_equivalence, seed)
        guarded(_check_thread_determinism, seed)

    return results
