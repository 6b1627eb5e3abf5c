"""Analytic overlap solutions and the zero-Bloch-vector theorem machinery.

Covers the quadrilateral family (h = 0), whose maximal product overlap is
twice the circumradius of the cyclic quadrilateral with sides (a, b, c, d);
the c = 0 family, solved by a singular value decomposition of the
correlation matrix; the generalized GHZ / W / Dicke examples for four and
more qubits; and verification campaigns for the statement that a vanishing
single-qubit Bloch vector forces a squared overlap of 1/2 on three qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _als
from .invariants import (
    bloch_vector,
    correlation_matrix,
    invariant_set,
    sextic_t_trace,
)
from .overlap import SolverConfig, nearest_product_state, quarter_form
from .states import (
    CanonicalParams,
    ProductState,
    PureState,
    ZeroBlochFamily,
    _sample_zero_bloch,
    canonical_to_state,
    ghz_state,
    haar_random_state,
    permute_qubits,
)


class InfeasibleQuadrilateralError(ValueError):
    """No valid cyclic quadrilateral solution; use the numeric solver instead."""


@dataclass(frozen=True)
class QuadrilateralParams:
    """Sides (a, b, c, d) of the state a|100> + b|010> + c|001> + d|111>."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            if getattr(self, name) < 0:
                raise ValueError(f"side {name} must be nonnegative")
        if abs(self.a**2 + self.b**2 + self.c**2 + self.d**2 - 1.0) > 1e-12:
            raise ValueError("sides must satisfy a^2 + b^2 + c^2 + d^2 = 1")

    @property
    def sides(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    @property
    def semiperimeter(self) -> float:
        return float(self.sides.sum() / 2.0)

    @property
    def is_feasible(self) -> bool:
        """Every side at most the semiperimeter (a cyclic quadrilateral exists)."""
        return bool(self.sides.max() <= self.semiperimeter)

    def to_state(self) -> PureState:
        amps = np.zeros(8, dtype=complex)
        amps[4] = self.a  # |100>
        amps[2] = self.b  # |010>
        amps[1] = self.c  # |001>
        amps[7] = self.d  # |111>
        return PureState(3, amps)


def quadrilateral_area(p: QuadrilateralParams) -> float:
    """Area of the cyclic quadrilateral with the given sides (Brahmagupta;
    reduces to Heron's triangle formula when a side vanishes)."""
    s = p.semiperimeter
    prod = (s - p.a) * (s - p.b) * (s - p.c) * (s - p.d)
    return float(math.sqrt(max(prod, 0.0)))


def quadrilateral_r_coefficients(p: QuadrilateralParams) -> np.ndarray:
    """The four nearest-product coefficients r_a, r_b, r_c, r_d."""
    a, b, c, d = p.a, p.b, p.c, p.d
    return np.array(
        [
            a * (b * b + c * c + d * d - a * a) + 2 * b * c * d,
            b * (a * a + c * c + d * d - b * b) + 2 * a * c * d,
            c * (b * b + a * a + d * d - c * c) + 2 * a * b * d,
            d * (b * b + c * c + a * a - d * d) + 2 * a * b * c,
        ]
    )


def _require_closed_form(p: QuadrilateralParams):
    if not p.is_feasible:
        raise InfeasibleQuadrilateralError(
            "a side exceeds the semiperimeter; no cyclic quadrilateral exists, "
            "use the numeric solver"
        )
    area = quadrilateral_area(p)
    if area <= 1e-12:
        raise InfeasibleQuadrilateralError(
            "degenerate (collinear) quadrilateral with zero area; "
            "use the numeric solver"
        )
    r = quadrilateral_r_coefficients(p)
    if r.min() < 0:
        raise InfeasibleQuadrilateralError(
            "a nearest-product coefficient is negative; the closed form does not "
            "apply, use the numeric solver"
        )
    return area, r


def quadrilateral_overlap(p: QuadrilateralParams) -> float:
    """Maximal product overlap g = 2R of a feasible quadrilateral state,
    R the circumradius sqrt((ab+cd)(ac+bd)(ad+bc)) / (4 S)."""
    area, _ = _require_closed_form(p)
    a, b, c, d = p.a, p.b, p.c, p.d
    return float(
        math.sqrt((a * b + c * d) * (a * c + b * d) * (a * d + b * c)) / (2.0 * area)
    )


def quadrilateral_nearest(p: QuadrilateralParams) -> ProductState:
    """Closed-form nearest product state of the quadrilateral state."""
    area, r = _require_closed_form(p)
    r_a, r_b, r_c, r_d = r
    a, b, c, d = p.a, p.b, p.c, p.d
    spinors = []
    for up, down, denom in (
        (r_a * r_d, r_b * r_c, a * d + b * c),
        (r_b * r_d, r_a * r_c, b * d + a * c),
        (r_c * r_d, r_a * r_b, c * d + a * b),
    ):
        spinor = np.array([math.sqrt(up), math.sqrt(down)], dtype=complex)
        spinor /= 4.0 * area * math.sqrt(denom)
        spinors.append(spinor / np.linalg.norm(spinor))
    return ProductState(tuple(spinors))


def random_feasible_quadrilateral(seed=None, r_margin: float = 1e-3, area_margin: float = 1e-2) -> QuadrilateralParams:
    """Rejection-sample sides on which the closed form is well conditioned."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        sides = np.abs(rng.normal(size=4))
        sides /= np.linalg.norm(sides)
        p = QuadrilateralParams(*sides)
        if not p.is_feasible:
            continue
        if quadrilateral_area(p) < area_margin:
            continue
        if quadrilateral_r_coefficients(p).min() < r_margin:
            continue
        return p


# --------------------------------------------------------------------------
# the c = 0 family: branch classification through the SVD of G


@dataclass(frozen=True, eq=False)
class BranchSolution:
    """One stationary solution, in both the SVD-rotated and original frames."""

    x_rotated: np.ndarray
    y_rotated: np.ndarray
    x: np.ndarray
    y: np.ndarray
    lam1: float
    lam2: float
    g_squared: float
    residual: float


@dataclass(frozen=True)
class MiddleBranch:
    """The middle-singular-value branch, which admits no physical solution:
    it would need b_A b_B = lam1 lam2 (z.x)(z.y) with lam1 lam2 = (2ab)^2,
    but b_A b_B exceeds (2ab)^2 while the projection product is at most 1.
    """

    bloch_product: float       # b_A * b_B
    multiplier_product: float  # (2ab)^2
    nonphysical: bool = True

    @property
    def reason(self) -> str:
        return (
            f"b_A b_B = {self.bloch_product:.6g} > (2ab)^2 = "
            f"{self.multiplier_product:.6g} while (z.x)(z.y) <= 1"
        )


@dataclass(frozen=True, eq=False)
class BranchReport:
    """Classified stationary branches for the c = 0, b_C = 0 family."""

    params: CanonicalParams
    bloch_a_length: float
    bloch_b_length: float
    mu: float
    u_matrix: np.ndarray
    v_matrix: np.ndarray
    singular_values: np.ndarray
    zero_mode: BranchSolution
    middle_branch: MiddleBranch
    main_branch: BranchSolution
    final_g_squared: float


def svd_branch_solutions(p: CanonicalParams, constraint_tol: float = 1e-10) -> BranchReport:
    """Solve the stationarity equations on the c = 0, d^2 = a^2 + b^2 + h^2 family.

    The correlation matrix factors as U diag(2 mu, 2ab, 0) V^T with rotation
    angles alpha = atan(h/a) and beta = atan(h/b).  The zero mode gives
    g_1^2 = (1 + b_A + b_B)/4, the middle branch is nonphysical, and the main
    branch has strictly positive multipliers 2(a^2 + h^2), 2(b^2 + h^2) with
    g_2^2 = 1/2; the overlap is max(g_1^2, g_2^2).
    """
    a, b, c, d, h, gamma = p.as_tuple()
    if abs(c) > constraint_tol:
        raise ValueError(f"family requires c = 0, got c = {c}")
    if abs(gamma) > constraint_tol:
        raise ValueError(f"family requires gamma = 0, got gamma = {gamma}")
    if abs(d * d - (a * a + b * b + h * h)) > constraint_tol:
        raise ValueError("family requires d^2 = a^2 + b^2 + h^2")

    alpha = math.atan2(h, a)
    beta = math.atan2(h, b)
    b_a = 2.0 * a * math.hypot(h, a)
    b_b = 2.0 * b * math.hypot(h, b)
    mu = math.hypot(h, a) * math.hypot(h, b)
    u = np.array(
        [
            [math.cos(alpha), 0.0, math.sin(alpha)],
            [0.0, 1.0, 0.0],
            [-math.sin(alpha), 0.0, math.cos(alpha)],
        ]
    )
    v = np.array(
        [
            [math.cos(beta), 0.0, math.sin(beta)],
            [0.0, 1.0, 0.0],
            [-math.sin(beta), 0.0, math.cos(beta)],
        ]
    )
    singular_values = np.array([2.0 * mu, 2.0 * a * b, 0.0])

    state = canonical_to_state(p)
    bloch_a = bloch_vector(state, 0)
    bloch_b = bloch_vector(state, 1)
    corr = correlation_matrix(state, 0, 1)
    zeta = np.array([0.0, 0.0, 1.0])

    def solution(x_rot, y_rot, lam1, lam2):
        x = u @ x_rot
        y = v @ y_rot
        residual = float(
            np.linalg.norm(corr @ y + bloch_a - lam1 * x)
            + np.linalg.norm(corr.T @ x + bloch_b - lam2 * y)
        )
        g2 = quarter_form(x, y, bloch_a, bloch_b, corr)
        return BranchSolution(
            x_rotated=x_rot, y_rotated=y_rot, x=x, y=y,
            lam1=lam1, lam2=lam2, g_squared=g2, residual=residual,
        )

    zero_mode = solution(zeta, zeta, b_a, b_b)
    main = solution(u @ zeta, v @ zeta, 2.0 * (a * a + h * h), 2.0 * (b * b + h * h))
    middle = MiddleBranch(bloch_product=b_a * b_b, multiplier_product=(2.0 * a * b) ** 2)
    return BranchReport(
        params=p,
        bloch_a_length=b_a,
        bloch_b_length=b_b,
        mu=mu,
        u_matrix=u,
        v_matrix=v,
        singular_values=singular_values,
        zero_mode=zero_mode,
        middle_branch=middle,
        main_branch=main,
        final_g_squared=float(max(zero_mode.g_squared, main.g_squared)),
    )


# --------------------------------------------------------------------------
# theorem verification


@dataclass(frozen=True, eq=False)
class TheoremCheckReport:
    """Diagnostics for one zero-Bloch sample.

    ``closed_form_path`` names the analytic route used ("quadrilateral" or
    "svd").  The zero-mode residuals are |G^T b_first| and |G b_second| for
    the two non-vanishing qubits, which must be the left and right zero
    modes of their correlation matrix.
    """

    params: CanonicalParams
    permutation: tuple[int, int, int]
    closed_form_path: str
    vanishing_qubit: int
    min_bloch_length: float
    t: float
    left_zero_residual: float
    right_zero_residual: float
    closed_form_g_squared: float
    numeric_g_squared: float
    tolerance: float
    passed: bool


def _zero_mode_residuals(state: PureState, vanishing: int) -> tuple[float, float]:
    others = [q for q in range(3) if q != vanishing]
    g = correlation_matrix(state, others[0], others[1])
    b_first = bloch_vector(state, others[0])
    b_second = bloch_vector(state, others[1])
    return float(np.linalg.norm(g.T @ b_first)), float(np.linalg.norm(g @ b_second))


def theorem_check(
    p: CanonicalParams,
    tolerance: float = 1e-7,
    solver: SolverConfig | None = None,
    permutation: tuple[int, int, int] = (0, 1, 2),
) -> TheoremCheckReport:
    """Verify that a zero-Bloch-vector sample has squared overlap 1/2.

    The sample may be relabeled through ``permutation`` so the vanishing
    Bloch vector lands on any qubit; the overlap is permutation invariant.
    """
    solver = solver or SolverConfig(restarts=16)
    state = canonical_to_state(p)
    if p.h <= 1e-14:
        closed_path = "quadrilateral"
        closed = quadrilateral_overlap(QuadrilateralParams(p.a, p.b, p.c, p.d)) ** 2
    else:
        closed_path = "svd"
        closed = svd_branch_solutions(p).final_g_squared

    state = permute_qubits(state, permutation)
    inv = invariant_set(state)
    lengths = np.array([inv.b_A, inv.b_B, inv.b_C])
    vanishing = int(np.argmin(lengths))
    left, right = _zero_mode_residuals(state, vanishing)
    numeric = nearest_product_state(state, solver).g_squared
    return TheoremCheckReport(
        params=p,
        permutation=tuple(permutation),
        closed_form_path=closed_path,
        vanishing_qubit=vanishing,
        min_bloch_length=float(lengths[vanishing]),
        t=inv.t,
        left_zero_residual=left,
        right_zero_residual=right,
        closed_form_g_squared=float(closed),
        numeric_g_squared=float(numeric),
        tolerance=tolerance,
        passed=bool(abs(numeric - 0.5) <= tolerance and abs(closed - 0.5) <= tolerance),
    )


@dataclass(frozen=True)
class CampaignFailure:
    index: int
    params: tuple[float, float, float, float, float, float]
    numeric_g_squared: float


@dataclass(frozen=True)
class CampaignReport:
    """Aggregate of a zero-Bloch verification campaign over one family."""

    family: str
    samples: int
    seed: int
    tolerance: float
    max_g2_error: float
    max_abs_t: float
    max_zero_mode_residual: float
    max_singular_value_error: float
    failures: tuple[CampaignFailure, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_g2_error": self.max_g2_error,
            "max_abs_t": self.max_abs_t,
            "max_zero_mode_residual": self.max_zero_mode_residual,
            "max_singular_value_error": self.max_singular_value_error,
            "passed": self.passed,
            "failures": [
                {
                    "index": f.index,
                    "params": {
                        k: v for k, v in zip(("a", "b", "c", "d", "h", "gamma"), f.params)
                    },
                    "numeric_g_squared": f.numeric_g_squared,
                }
                for f in self.failures
            ],
        }


def run_theorem_campaign(
    family,
    n_samples: int,
    seed: int = 0,
    tolerance: float = 1e-7,
    solver: SolverConfig | None = None,
) -> CampaignReport:
    """Sample one family, solve every state numerically and check g^2 = 1/2.

    The solver runs all samples and restarts as one batch; samples whose
    error exceeds half the tolerance are re-solved individually with a larger
    budget before being declared failures.  Structure checks (t, zero modes,
    singular values of G) run alongside.
    """
    family = ZeroBlochFamily(family)
    solver = solver or SolverConfig(restarts=16)
    rng = np.random.default_rng(seed)
    params = [_sample_zero_bloch(family, rng) for _ in range(n_samples)]
    tensors = np.stack([canonical_to_state(p).tensor for p in params])
    run = _als.power_iteration(
        tensors,
        restarts=solver.restarts,
        max_iterations=solver.max_iterations,
        tol=solver.tol,
        seed=solver.seed,
    )
    g2 = run["g_squared"].max(axis=1)

    max_t = 0.0
    max_zero = 0.0
    max_sv = 0.0
    failures = []
    retry = SolverConfig(
        restarts=4 * solver.restarts,
        max_iterations=4 * solver.max_iterations,
        tol=solver.tol,
        seed=solver.seed + 1,
    )
    for i, p in enumerate(params):
        state = canonical_to_state(p)
        if abs(g2[i] - 0.5) > 0.5 * tolerance:
            g2[i] = nearest_product_state(state, retry).g_squared
        max_t = max(max_t, abs(sextic_t_trace(state)))
        vanishing = 2  # both families have b_C = 0 by construction
        left, right = _zero_mode_residuals(state, vanishing)
        max_zero = max(max_zero, left, right)
        if family is ZeroBlochFamily.H_NONZERO:
            report = svd_branch_solutions(p)
            numeric_sv = np.linalg.svd(
                correlation_matrix(state, 0, 1), compute_uv=False
            )
            max_sv = max(max_sv, float(np.abs(numeric_sv - report.singular_values).max()))
        if abs(g2[i] - 0.5) > tolerance:
            failures.append(
                CampaignFailure(index=i, params=p.as_tuple(), numeric_g_squared=float(g2[i]))
            )
    return CampaignReport(
        family=family.value,
        samples=n_samples,
        seed=seed,
        tolerance=tolerance,
        max_g2_error=float(np.abs(g2 - 0.5).max()),
        max_abs_t=max_t,
        max_zero_mode_residual=max_zero,
        max_singular_value_error=max_sv,
        failures=tuple(failures),
    )


# --------------------------------------------------------------------------
# families beyond three qubits


def ghz_theta_state(theta: float, n: int) -> PureState:
    """cos(theta)|0...0> + sin(theta)|1...1> on n qubits."""
    if n < 2:
        raise ValueError("n must be at least 2")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = math.cos(theta)
    amps[-1] = math.sin(theta)
    if abs(amps[0]) < 1e-300 and abs(amps[-1]) < 1e-300:
        raise ValueError("degenerate angle")
    return PureState(n, amps / np.linalg.norm(amps))


def ghz_overlap(theta: float, n: int) -> float:
    """Squared overlap (1 + |cos 2 theta|)/2 of the generalized GHZ state.

    All single-qubit Bloch vectors of the state share the length |cos 2 theta|,
    so this is (1 + |b|)/2; the value is independent of n >= 2.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    return float((1.0 + abs(math.cos(2.0 * theta))) / 2.0)


def wn_state(coeffs) -> PureState:
    """Generalized W state sum_i c_i |0..1_i..0> with nonnegative c_i."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need at least two coefficients")
    if c.min() < 0:
        raise ValueError("coefficients must be nonnegative")
    if abs((c**2).sum() - 1.0) > 1e-12:
        raise ValueError("coefficients must satisfy sum c_i^2 = 1")
    n = c.size
    amps = np.zeros(2**n, dtype=complex)
    for q in range(n):
        amps[1 << (n - 1 - q)] = c[q]
    return PureState(n, amps)


@dataclass(frozen=True, eq=False)
class WnReport:
    """Whether (some Bloch vector vanishes) <=> (g^2 = 1/2) held on one instance."""

    coefficients: np.ndarray
    g_squared: float
    bloch_lengths: np.ndarray
    min_bloch_length: float
    has_zero_bloch: bool
    is_half: bool

    @property
    def equivalence_held(self) -> bool:
        return self.has_zero_bloch == self.is_half


def wn_overlap(coeffs, solver: SolverConfig | None = None) -> WnReport:
    """Numeric overlap and Bloch lengths of a generalized W state.

    The Bloch length of qubit i is |1 - 2 c_i^2|, zero exactly when
    c_i = 1/sqrt(2).
    """
    solver = solver or SolverConfig(restarts=16)
    state = wn_state(coeffs)
    c = np.asarray(coeffs, dtype=float)
    lengths = np.array([np.linalg.norm(bloch_vector(state, q)) for q in range(c.size)])
    g2 = nearest_product_state(state, solver).g_squared
    return WnReport(
        coefficients=c,
        g_squared=float(g2),
        bloch_lengths=lengths,
        min_bloch_length=float(lengths.min()),
        has_zero_bloch=bool(lengths.min() <= 1e-8),
        is_half=bool(abs(g2 - 0.5) <= 1e-6),
    )


def dicke4_state() -> PureState:
    """Equal superposition of the six two-excitation strings on four qubits."""
    amps = np.zeros(16, dtype=complex)
    for i in range(16):
        if bin(i).count("1") == 2:
            amps[i] = 1.0 / math.sqrt(6.0)
    return PureState(4, amps)


# --------------------------------------------------------------------------
# exploratory search for the inverse statement


@dataclass(frozen=True)
class InverseHit:
    index: int
    g_squared: float
    min_bloch_length: float
    is_control: bool


@dataclass(frozen=True)
class InverseSearchReport:
    """Empirical distribution of min(b_A, b_B, b_C) among states with
    g^2 close to 1/2.  Exploratory only; no claim is attached.
    """

    samples: int
    seed: int
    filter_tol: float
    hits: tuple[InverseHit, ...]
    min_bloch_quantiles: dict

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "filter_tol": self.filter_tol,
            "n_hits": len(self.hits),
            "hits": [
                {
                    "index": h.index,
                    "g_squared": h.g_squared,
                    "min_bloch_length": h.min_bloch_length,
                    "is_control": h.is_control,
                }
                for h in self.hits
            ],
            "min_bloch_quantiles": self.min_bloch_quantiles,
        }


def inverse_search(
    n_samples: int,
    seed: int = 0,
    solver: SolverConfig | None = None,
    filter_tol: float = 1e-4,
    include_controls: bool = True,
) -> InverseSearchReport:
    """Sample Haar states, keep those with |g^2 - 1/2| <= ``filter_tol`` and
    record the smallest Bloch length of each.

    With ``include_controls`` a GHZ state and one sample from each zero-Bloch
    family are appended; they must appear among the hits.
    """
    solver = solver or SolverConfig(restarts=16)
    rng = np.random.default_rng(seed)
    states = [haar_random_state(3, rng) for _ in range(n_samples)]
    control_from = len(states)
    if include_controls:
        states.append(ghz_state(3))
        states.append(canonical_to_state(_sample_zero_bloch(ZeroBlochFamily.QUADRILATERAL, rng)))
        states.append(canonical_to_state(_sample_zero_bloch(ZeroBlochFamily.H_NONZERO, rng)))
    tensors = np.stack([s.tensor for s in states])
    run = _als.power_iteration(
        tensors,
        restarts=solver.restarts,
        max_iterations=solver.max_iterations,
        tol=solver.tol,
        seed=solver.seed,
    )
    g2 = run["g_squared"].max(axis=1)
    refine = SolverConfig(
        restarts=4 * solver.restarts,
        max_iterations=4 * solver.max_iterations,
        tol=solver.tol,
        seed=solver.seed + 1,
    )
    hits = []
    for i, state in enumerate(states):
        if abs(g2[i] - 0.5) > 10.0 * filter_tol:
            continue
        value = nearest_product_state(state, refine).g_squared
        if abs(value - 0.5) > filter_tol:
            continue
        lengths = [np.linalg.norm(bloch_vector(state, q)) for q in range(3)]
        hits.append(
            InverseHit(
                index=i,
                g_squared=float(value),
                min_bloch_length=float(min(lengths)),
                is_control=i >= control_from,
            )
        )
    values = np.array([h.min_bloch_length for h in hits]) if hits else np.array([])
    quantiles = {}
    if values.size:
        for q in (0.0, 0.25, 0.5, 0.75, 1.0):
            quantiles[f"q{int(q * 100):02d}"] = float(np.quantile(values, q))
    return InverseSearchReport(
        samples=n_samples,
        seed=seed,
        filter_tol=filter_tol,
        hits=tuple(hits),
        min_bloch_quantiles=quantiles,
    )
