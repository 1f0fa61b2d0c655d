"""Named verification suites behind ``helmat verify``.

Each suite runs a batch of numerical checks and returns a table of
pass/fail rows with a short witness string per row.  Results are
deterministic for a fixed ``(seed, samples)`` pair: all randomness flows
through the package PRNG (see :mod:`helmat.sampling`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import barycentre, bregman, calculus, distances, legendre_cex, means
from .distances import DistanceKind
from .linalg import SpdMatrix, frobenius_norm, sqrt_entries
from .means import WeightVector
from .sampling import (
    make_rng,
    random_hermitian,
    random_orthogonal,
    random_spd,
    random_unitary,
)

#: The 2x2 triple on which the geometric-mean distance fails the triangle
#: inequality, with the reference values of the two sides (5 significant
#: digits, hence the 5e-4 comparison tolerance).
D3_TRIANGLE_TRIPLE = (
    np.array([[2.0, 5.0], [5.0, 17.0]]),
    np.array([[13.0, 8.0], [8.0, 5.0]]),
    np.array([[5.0, 3.0], [3.0, 10.0]]),
)
D3_TRIANGLE_REFERENCE = (5.0347, 4.6768)

#: The analogous triple for the log-Euclidean distance.
D4_TRIANGLE_TRIPLE = (
    np.array([[4.0, -7.0], [-7.0, 13.0]]),
    np.array([[8.0, -2.0], [-2.0, 1.0]]),
    np.array([[5.0, -4.0], [-4.0, 5.0]]),
)
D4_TRIANGLE_REFERENCE = (3.3349, 3.3146)

REFERENCE_TOL = 5e-4


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(Check(name=name, passed=bool(passed), detail=detail))


def _spd(arr: np.ndarray) -> SpdMatrix:
    return SpdMatrix(arr)


def generic_noncommuting_pair(
    rng,
    dim: int,
    min_cond: float = 12.0,
    max_cond: float = 100.0,
    min_misalignment: float = 0.45,
):
    """An SPD pair that is a robust witness against the would-be
    log-Euclidean closed form.

    The fixed-point residual of that closed form vanishes on the commuting
    set (where the form is exact) and fades like the squared normalized
    commutator times a high power of the log-spectral spreads, so weakly
    misaligned or weakly spread pairs make the refutation arbitrarily
    faint.  Witnesses are therefore drawn with log-spaced, jittered spectra
    of condition number in ``[min_cond, max_cond]`` and rejected until the
    normalized traceless commutator

        ||[A, B]||_F / (sqrt(2) ||A - tr(A)/n I||_F ||B - tr(B)/n I||_F)

    (which is |sin| of twice the eigenbasis angle for 2x2) exceeds
    ``min_misalignment``, keeping the residual well above the reporting
    threshold.
    """

    def draw():
        # endpoint levels are exact so the drawn condition number is realized;
        # per-matrix random cond keeps spectra of independent draws distinct
        cond = 10.0 ** rng.uniform(np.log10(min_cond), np.log10(max_cond))
        half = 0.5 * np.log(cond)
        levels = np.linspace(-half, half, dim)
        if dim > 2:
            levels[1:-1] += rng.uniform(-0.2, 0.2, dim - 2) * (
                2 * half / (dim - 1)
            )
        scale = np.exp(rng.uniform(-1.0, 1.0))
        lam = scale * np.exp(levels)
        basis = random_orthogonal(rng, dim)
        return SpdMatrix((basis * lam) @ basis.T)

    eye_frac = np.eye(dim)
    while True:
        a, b = draw(), draw()
        a0 = a.entries - np.trace(a.entries) / dim * eye_frac
        b0 = b.entries - np.trace(b.entries) / dim * eye_frac
        commutator = a.entries @ b.entries - b.entries @ a.entries
        misalignment = np.linalg.norm(commutator) / (
            np.sqrt(2.0) * np.linalg.norm(a0) * np.linalg.norm(b0)
        )
        if misalignment >= min_misalignment:
            return a, b


def _triangle_check(result: SuiteResult, label: str, kind: DistanceKind,
                    triple, reference) -> None:
    a, b, c = (_spd(m) for m in triple)
    direct = distances.distance(kind, a, b)
    detour = distances.distance(kind, a, c) + distances.distance(kind, c, b)
    ref_direct, ref_detour = reference
    result.add(
        f"{label}-direct-value",
        abs(direct - ref_direct) <= REFERENCE_TOL,
        f"{kind.value}(A,B) = {direct:.6f}, reference {ref_direct}",
    )
    result.add(
        f"{label}-detour-value",
        abs(detour - ref_detour) <= REFERENCE_TOL,
        f"{kind.value}(A,C) + {kind.value}(C,B) = {detour:.6f}, reference {ref_detour}",
    )
    result.add(
        f"{label}-violation",
        direct > detour,
        f"direct {direct:.6f} > detour {detour:.6f}",
    )


def counterexamples_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """Triangle-inequality failures of d3/d4, and metric sanity of d1/d2."""
    result = SuiteResult("counterexamples")
    _triangle_check(result, "d3-triangle", DistanceKind.D3,
                    D3_TRIANGLE_TRIPLE, D3_TRIANGLE_REFERENCE)
    _triangle_check(result, "d4-triangle", DistanceKind.D4,
                    D4_TRIANGLE_TRIPLE, D4_TRIANGLE_REFERENCE)

    rng = make_rng(seed)
    worst = 0.0
    for _ in range(samples):
        dim = int(rng.integers(2, 5))
        a, b, c = (random_spd(rng, dim, cond=50.0) for _ in range(3))
        for kind in (DistanceKind.D1, DistanceKind.D2):
            violation = (
                distances.distance(kind, a, b)
                - distances.distance(kind, a, c)
                - distances.distance(kind, c, b)
            )
            worst = max(worst, violation)
    result.add(
        "d1-d2-triangle-holds",
        worst <= 1e-10,
        f"max triangle violation over {samples} random triples: {worst:.3e}",
    )

    gap_polar = 0.0
    sampled_beats = True
    for _ in range(20):
        dim = int(rng.integers(2, 5))
        a, b = random_spd(rng, dim), random_spd(rng, dim)
        value, _ = distances.d2_unitary(a, b)
        gap_polar = max(gap_polar, abs(value - distances.distance(DistanceKind.D2, a, b)))
    a, b = random_spd(rng, 3), random_spd(rng, 3)
    value, _ = distances.d2_unitary(a, b)
    root_a, root_b = sqrt_entries(a), sqrt_entries(b)
    for _ in range(500):
        u = random_unitary(rng, 3)
        if np.linalg.norm(root_a - root_b @ u) < value - 1e-12:
            sampled_beats = False
    result.add(
        "d2-unitary-minimum",
        gap_polar <= 1e-9 and sampled_beats,
        f"max |min_U - d2| = {gap_polar:.3e}; no random unitary beat the polar factor",
    )
    return result


def trace_chain_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """Weak monotonicity of the four mean traces and of the squared distances."""
    result = SuiteResult("trace-chain")
    rng = make_rng(seed)
    min_chain_gap = np.inf
    min_order_gap = np.inf
    for _ in range(samples):
        dim = int(rng.integers(2, 7))
        cond = 10.0 ** rng.uniform(0.0, 4.0)
        a = random_spd(rng, dim, cond=cond)
        b = random_spd(rng, dim, cond=cond)
        chain = distances.trace_chain(a, b)
        min_chain_gap = min(min_chain_gap, float(np.min(np.diff(chain))))
        squares = [
            distances.divergence(k, a, b)
            for k in (DistanceKind.D3, DistanceKind.D4, DistanceKind.D1, DistanceKind.D2)
        ]
        min_order_gap = min(min_order_gap, float(np.min(-np.diff(squares))))
    result.add(
        "trace-chain-monotone",
        min_chain_gap >= -1e-10,
        f"min consecutive gap over {samples} pairs: {min_chain_gap:.3e}",
    )
    result.add(
        "squared-distance-ordering",
        min_order_gap >= -1e-10,
        f"min ordering gap over {samples} pairs: {min_order_gap:.3e}",
    )
    return result


def divergence_axioms_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """Divergence axioms for the d3/d4 squares plus the derivative engine."""
    result = SuiteResult("divergence-axioms")
    rng = make_rng(seed)
    n_points = max(20, samples // 10)

    worst_diag = 0.0
    worst_grad3 = 0.0
    worst_grad4 = 0.0
    worst_hessian = 0.0
    for _ in range(n_points):
        dim = int(rng.integers(2, 5))
        a = random_spd(rng, dim, cond=20.0)
        y = random_hermitian(rng, dim)
        for kind in (DistanceKind.D3, DistanceKind.D4):
            worst_diag = max(worst_diag, distances.divergence(kind, a, a))
        worst_grad3 = max(
            worst_grad3, frobenius_norm(calculus.grad_phi3(a, a))
        )

        def phi4_at(x):
            return distances.divergence(DistanceKind.D4, a, _spd(x))

        fd4 = calculus.fd_directional(phi4_at, a.entries, y.entries)
        worst_grad4 = max(worst_grad4, abs(fd4) / frobenius_norm(y))

        def phi3_at(x):
            return distances.divergence(DistanceKind.D3, a, _spd(x))

        target = calculus.hessian_phi3_diag(a, y)
        estimate = calculus.fd_hessian_quadform(phi3_at, a, y)
        worst_hessian = max(worst_hessian, abs(estimate - target) / abs(target))
    result.add("diagonal-vanishing", worst_diag <= 1e-12,
               f"max divergence on the diagonal: {worst_diag:.3e}")
    result.add("d3-gradient-diagonal", worst_grad3 <= 1e-10,
               f"max analytic gradient norm at the diagonal: {worst_grad3:.3e}")
    result.add("d4-gradient-diagonal", worst_grad4 <= 1e-6,
               f"max finite-difference directional derivative: {worst_grad4:.3e}")
    result.add("d3-hessian-identity", worst_hessian <= 1e-4,
               f"max relative Hessian error over {n_points} pairs: {worst_hessian:.3e}")

    n_frechet = max(20, samples // 10)
    worst_fd = 0.0
    for _ in range(n_frechet):
        dim = int(rng.integers(2, 5))
        x = random_spd(rng, dim, cond=20.0)
        y = random_hermitian(rng, dim)
        for name in ("sqrt", "log", "exp"):
            exact = calculus.frechet(name, x, y).entries
            approx = calculus.fd_frechet(name, x, y)
            worst_fd = max(
                worst_fd,
                float(np.linalg.norm(exact - approx) / max(np.linalg.norm(exact), 1e-30)),
            )
    result.add("frechet-finite-difference", worst_fd <= 1e-6,
               f"max relative error over {n_frechet} triples: {worst_fd:.3e}")

    worst_quad = 0.0
    for _ in range(25):
        dim = int(rng.integers(2, 5))
        a = random_spd(rng, dim)
        x = random_spd(rng, dim)
        y = random_hermitian(rng, dim)
        chain = calculus.frechet_geometric(a, x, y).entries
        quad = calculus.frechet_geometric_quadrature(a, x, y).entries
        worst_quad = max(
            worst_quad,
            float(np.linalg.norm(chain - quad) / max(np.linalg.norm(chain), 1e-30)),
        )
    result.add("geometric-derivative-quadrature", worst_quad <= 1e-7,
               f"max chain-rule vs quadrature error: {worst_quad:.3e}")

    sqrt_err = max(
        abs(calculus.quad_check("sqrt_resolvent", x) - np.sqrt(x))
        for x in (0.25, 1.0, 4.0, 9.0)
    )
    grad_const = calculus.quad_check("grad_normalization")
    hess_const = calculus.quad_check("hessian_normalization")
    result.add("integral-representations",
               sqrt_err <= 1e-8
               and abs(grad_const - 0.5) <= 1e-8
               and abs(hess_const - 0.5) <= 1e-8,
               f"sqrt error {sqrt_err:.3e}; normalisations {grad_const:.12f}, "
               f"{hess_const:.12f}")
    return result


def bregman_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """Barycentre identities of the tracial Bregman divergences."""
    result = SuiteResult("bregman")
    rng = make_rng(seed)
    n_fam = max(5, samples // 100)

    worst_right = 0.0
    worst_left = 0.0
    worst_var = 0.0
    worst_min = 0.0
    worst_scalar = 0.0
    for _ in range(n_fam):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(2, 6))
        mats = [random_spd(rng, dim, cond=20.0) for _ in range(m)]
        w = WeightVector(rng.uniform(0.5, 2.0, m))

        r_entropy = bregman.right_barycentre(bregman.ENTROPY, mats, w)
        r_square = bregman.right_barycentre(bregman.SQUARE, mats, w)
        reference = means.arithmetic_mean(mats, w)
        worst_right = max(
            worst_right,
            frobenius_norm(r_entropy.entries - r_square.entries),
            frobenius_norm(r_entropy.entries - reference.entries),
        )

        left = bregman.left_barycentre(bregman.ENTROPY, mats, w)
        log_euc = means.log_euclidean_multi(mats, w)
        worst_left = max(worst_left, frobenius_norm(left.entries - log_euc.entries))

        spread = bregman.variance(bregman.ENTROPY, mats, w)
        gap = means.arithmetic_mean(mats, w).trace() - log_euc.trace()
        worst_var = max(worst_var, abs(spread - gap))

        a, b = mats[0], mats[1]
        worst_min = max(
            worst_min,
            abs(bregman.phi4_via_min(a, b)
                - distances.divergence(DistanceKind.D4, a, b)),
        )

        scalars = rng.uniform(0.2, 5.0, m)
        ones = [SpdMatrix(np.array([[s]])) for s in scalars]
        for mother in (bregman.ENTROPY, bregman.SQUARE, bregman.power_mother(1.5)):
            left_scalar = bregman.left_barycentre(mother, ones, w)
            kolmogorov = mother.inv_dpsi(np.sum(w.weights * mother.dpsi(scalars)))
            worst_scalar = max(
                worst_scalar, abs(float(left_scalar.entries[0, 0].real) - kolmogorov)
            )
    result.add("right-barycentre-arithmetic", worst_right <= 1e-12,
               f"max deviation from the arithmetic mean: {worst_right:.3e}")
    result.add("left-barycentre-log-euclidean", worst_left <= 1e-10,
               f"max deviation over {n_fam} families: {worst_left:.3e}")
    result.add("variance-trace-identity", worst_var <= 1e-10,
               f"max |variance - trace gap|: {worst_var:.3e}")
    result.add("d4-square-as-minimum", worst_min <= 1e-9,
               f"max |min value - divergence|: {worst_min:.3e}")
    result.add("scalar-quasi-arithmetic", worst_scalar <= 1e-12,
               f"max deviation from the scalar closed form: {worst_scalar:.3e}")
    return result


def legendre_cex_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """The boundary-minimum counterexample, vector and matrix cases."""
    result = SuiteResult("legendre-cex")
    params = legendre_cex.CexParams()

    grad0 = legendre_cex.grad_psibar_vector(params, np.zeros(2))
    coeff = params.gradient_coefficient
    closed_err = float(np.max(np.abs(grad0 - coeff)))
    fd = np.array([
        (legendre_cex.psibar_vector(params, h * e_i)
         - legendre_cex.psibar_vector(params, -h * e_i)) / (2.0 * h)
        for e_i in (np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        for h in (1e-6,)
    ])
    fd_err = float(np.max(np.abs(fd - grad0)))
    result.add(
        "vector-gradient-at-zero",
        closed_err <= 1e-9 and fd_err <= 1e-6 and np.all(grad0 > 0.0),
        f"closed form {coeff:.6f}; deviation {closed_err:.3e}; FD error {fd_err:.3e}",
    )

    vec_report = legendre_cex.verify_vector_strictness(params, samples, seed=seed)
    result.add(
        "vector-strict-minimum",
        vec_report.passed and vec_report.min_margin >= -1e-10,
        f"min gap {vec_report.min_gap:.6e}, min margin {vec_report.min_margin:.3e} "
        f"over {vec_report.samples} samples",
    )

    mat_report = legendre_cex.verify_matrix_cex(params, samples, seed=seed)
    result.add(
        "matrix-gradient-positive",
        mat_report.gradient_is_positive_definite,
        f"gradient at zero = {mat_report.gradient_coefficient:.6f} x identity",
    )
    result.add(
        "matrix-strict-minimum",
        not mat_report.failures and mat_report.min_gap > 0.0,
        f"min gap {mat_report.min_gap:.6e} over {mat_report.samples} PSD samples",
    )
    result.add(
        "matrix-stationarity-unsolvable",
        mat_report.min_grid_residual > 0.0,
        f"min stationarity residual {mat_report.min_grid_residual:.6e} "
        f"over {mat_report.grid_size} grid points",
    )
    return result


def d4_guess_suite(seed: int = 42, samples: int = 1000) -> SuiteResult:
    """Two-point closed forms, their refuted log-Euclidean analogue, and
    fixed-point solver diagnostics."""
    result = SuiteResult("d4-guess")
    rng = make_rng(seed)
    n_pairs = max(10, samples // 10)
    w2 = WeightVector.uniform(2)

    worst_wass = 0.0
    worst_power = 0.0
    min_refuted = np.inf
    for _ in range(n_pairs):
        dim = int(rng.integers(2, 5))
        a, b = generic_noncommuting_pair(rng, dim)

        for kind, track in ((barycentre.WASSERSTEIN, "w"), (barycentre.PowerMean(0.5), "p")):
            x = barycentre.closed_form_m2(kind, a, b)
            res = barycentre.fixed_point_residual(kind, x, [a, b], w2)
            if track == "w":
                worst_wass = max(worst_wass, res)
            else:
                worst_power = max(worst_power, res)

        guess = barycentre.refute_d4_guess(a, b)
        if not guess.inconclusive:
            min_refuted = min(min_refuted, guess.relative_residual)
    result.add("wasserstein-closed-form", worst_wass <= 1e-8,
               f"max fixed-point residual over {n_pairs} pairs: {worst_wass:.3e}")
    result.add("power-half-closed-form", worst_power <= 1e-8,
               f"max fixed-point residual over {n_pairs} pairs: {worst_power:.3e}")

    a, b, _ = (_spd(m) for m in D3_TRIANGLE_TRIPLE)
    pinned = barycentre.refute_d4_guess(a, b)
    result.add(
        "log-euclidean-guess-refuted",
        pinned.refuted and min_refuted > 1e-6,
        f"pinned-pair relative residual {pinned.relative_residual:.6e}; "
        f"min over random pairs {min_refuted:.6e}",
    )

    worst_res = 0.0
    worst_restart = 0.0
    worst_collapse = 0.0
    brackets = True
    for kind in (barycentre.WASSERSTEIN, barycentre.PowerMean(0.5), barycentre.LOG_EUCLIDEAN):
        dim = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        mats = [random_spd(rng, dim, cond=20.0) for _ in range(m)]
        w = WeightVector(rng.uniform(0.5, 2.0, m))
        x, report = barycentre.solve(kind, mats, w)
        worst_res = max(worst_res, report.final_residual)
        brackets = brackets and report.bracket_ok and report.converged

        alpha, beta = report.spectral_bounds
        for _ in range(2):
            start = random_spd(rng, dim, cond=min(beta / alpha, 1e4),
                               scale=float(np.sqrt(alpha * beta)))
            x_again, _ = barycentre.solve(kind, mats, w, x0=start)
            worst_restart = max(
                worst_restart, frobenius_norm(x.entries - x_again.entries)
            )

        diag_mats = [
            SpdMatrix(np.diag(rng.uniform(0.3, 3.0, dim))) for _ in range(m)
        ]
        x_diag, _ = barycentre.solve(kind, diag_mats, w)
        collapse = frobenius_norm(
            x_diag.entries - means.q_half(diag_mats, w).entries
        )
        worst_collapse = max(worst_collapse, collapse)
    result.add("fixed-point-residuals", worst_res <= 1e-12 and brackets,
               f"max converged residual {worst_res:.3e}; brackets held")
    result.add("restart-agreement", worst_restart <= 1e-8,
               f"max restart deviation {worst_restart:.3e}")
    result.add("commuting-collapse", worst_collapse <= 1e-8,
               f"max deviation from the half-power mean {worst_collapse:.3e}")
    return result


SUITES: dict[str, Callable[[int, int], SuiteResult]] = {
    "counterexamples": counterexamples_suite,
    "trace-chain": trace_chain_suite,
    "divergence-axioms": divergence_axioms_suite,
    "bregman": bregman_suite,
    "legendre-cex": legendre_cex_suite,
    "d4-guess": d4_guess_suite,
}


def run_suite(name: str, seed: int = 42, samples: int = 1000) -> list[SuiteResult]:
    """Run one named suite, or all of them in a fixed order."""
    if name == "all":
        return [fn(seed, samples) for fn in SUITES.values()]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{', '.join([*SUITES, 'all'])}")
    return [SUITES[name](seed, samples)]
