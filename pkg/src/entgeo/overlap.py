"""Numerical maximal product overlap for n-qubit pure states.

The solver is a multi-start alternating rank-1 approximation: cycling over
qubits, each local spinor is replaced by the normalized contraction of the
state against the other current spinors.  Each sweep is monotonically
non-decreasing in the overlap, so every restart converges to a stationary
point; the best restart is reported together with first-order diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _als
from .invariants import bloch_vector, correlation_matrix
from .states import ProductState, PureState, overlap_with_product


@dataclass(frozen=True)
class SolverConfig:
    """Multi-start solver knobs.

    ``restarts`` random initializations are run, plus one deterministic start
    at the largest-magnitude basis amplitude.  A restart counts as converged
    once its squared overlap changes by less than ``tol`` over a sweep.
    """

    restarts: int = 64
    max_iterations: int = 500
    tol: float = 1e-13
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.tol <= 0:
            raise ValueError("restarts, max_iterations and tol must be positive")


@dataclass(frozen=True, eq=False)
class OverlapResult:
    """Converged solver output.

    ``lagrange`` carries (lambda_1, lambda_2) of the two-qubit stationarity
    system for three-qubit states and is None otherwise.
    ``stationarity_residual`` is the Bloch-space first-order residual for
    three-qubit states, and the spinor-space orthogonality residual for other
    qubit counts.
    """

    g_squared: float
    product: ProductState
    lagrange: tuple[float, float] | None
    restarts_used: int
    iterations: int
    converged: bool
    stationarity_residual: float
    sweep_history: np.ndarray | None = None


def bloch_to_spinor(v) -> np.ndarray:
    """Spinor with Bloch vector ``v``, |0> component real nonnegative."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("input must be a unit 3-vector")
    phi = math.atan2(v[1], v[0])
    c0 = math.sqrt(max(1.0 + v[2], 0.0) / 2.0)
    c1 = math.sqrt(max(1.0 - v[2], 0.0) / 2.0)
    return np.array([c0, c1 * np.exp(1j * phi)])


def spinor_to_bloch(spinor) -> np.ndarray:
    """Bloch vector of a normalized spinor."""
    c = np.asarray(spinor, dtype=complex).reshape(-1)
    if c.size != 2 or abs(np.linalg.norm(c) - 1.0) > 1e-10:
        raise ValueError("input must be a normalized 2-spinor")
    cross = np.conj(c[0]) * c[1]
    return np.array([2.0 * cross.real, 2.0 * cross.imag, (abs(c[0]) ** 2 - abs(c[1]) ** 2)])


def geometric_measure(g_squared: float) -> float:
    """Entanglement measure -ln(g^2) of a squared maximal product overlap."""
    if not 0.0 < g_squared <= 1.0 + 1e-12:
        raise ValueError(f"g_squared must lie in (0, 1], got {g_squared}")
    return float(-math.log(min(g_squared, 1.0)))


def quarter_form(x, y, bloch_a, bloch_b, corr) -> float:
    """(1/4)[1 + x.b_A + y.b_B + x.(G y)] over unit Bloch vectors x, y.

    Its maximum over (x, y) is the squared maximal product overlap of the
    underlying three-qubit state; the third qubit's optimum is implicit in
    the two-qubit marginal.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > 1e-10 or abs(np.linalg.norm(y) - 1.0) > 1e-10:
        raise ValueError("x and y must be unit 3-vectors")
    return float(0.25 * (1.0 + x @ bloch_a + y @ bloch_b + x @ (np.asarray(corr) @ y)))


def maximize_quarter_form(
    bloch_a, bloch_b, corr, restarts: int = 16, max_iterations: int = 2000,
    tol: float = 1e-15, seed: int = 0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Maximize the quarter form by alternating normalized updates.

    x <- (G y + b_A)/|..|, y <- (G^T x + b_B)/|..| is an ascent step with
    positive multipliers; several deterministic and random starts are kept.
    Returns (value, x, y).
    """
    g = np.asarray(corr, dtype=float)
    b_a = np.asarray(bloch_a, dtype=float)
    b_b = np.asarray(bloch_b, dtype=float)
    rng = np.random.default_rng(seed)
    starts = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    if np.linalg.norm(b_a) > 1e-12:
        starts.append(b_a / np.linalg.norm(b_a))
    for _ in range(restarts):
        v = rng.normal(size=3)
        starts.append(v / np.linalg.norm(v))
    best = (-np.inf, starts[0], starts[0])
    for x in starts:
        x = x.copy()
        y = np.array([0.0, 0.0, 1.0])
        value = -np.inf
        for _ in range(max_iterations):
            u = g.T @ x + b_b
            norm = np.linalg.norm(u)
            if norm > 1e-300:
                y = u / norm
            u = g @ y + b_a
            norm = np.linalg.norm(u)
            if norm > 1e-300:
                x = u / norm
            new = 0.25 * (1.0 + x @ b_a + y @ b_b + x @ (g @ y))
            if abs(new - value) < tol:
                value = new
                break
            value = new
        if value > best[0]:
            best = (value, x, y)
    return float(best[0]), best[1], best[2]


def stationarity_residual(s: PureState, x, y, lam1: float, lam2: float) -> float:
    """|G y + b_A - lambda_1 x| + |G^T x + b_B - lambda_2 y| for a 3-qubit state."""
    if s.n_qubits != 3:
        raise ValueError("stationarity residual is defined for three-qubit states")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > 1e-8 or abs(np.linalg.norm(y) - 1.0) > 1e-8:
        raise ValueError("x and y must be unit 3-vectors")
    b_a = bloch_vector(s, 0)
    b_b = bloch_vector(s, 1)
    g = correlation_matrix(s, 0, 1)
    return float(
        np.linalg.norm(g @ y + b_a - lam1 * x) + np.linalg.norm(g.T @ x + b_b - lam2 * y)
    )


def _gauge_fix(spinor: np.ndarray) -> np.ndarray:
    """Remove the free phase: largest component made real nonnegative."""
    pivot = spinor[0] if abs(spinor[0]) >= abs(spinor[1]) else spinor[1]
    if abs(pivot) < 1e-300:
        return spinor
    return spinor * (np.conj(pivot) / abs(pivot))


def nearest_product_state(
    s: PureState, cfg: SolverConfig | None = None, record_history: bool = False
) -> OverlapResult:
    """Best product approximation of ``s`` over ``cfg.restarts`` + 1 starts.

    Non-convergence is reported through the ``converged`` flag, never raised;
    the best stationary value found is returned either way.
    """
    if s.n_qubits < 2:
        raise ValueError("the product overlap needs at least 2 qubits")
    cfg = cfg or SolverConfig()
    run = _als.power_iteration(
        s.tensor[None],
        restarts=cfg.restarts,
        max_iterations=cfg.max_iterations,
        tol=cfg.tol,
        seed=cfg.seed,
        record_history=record_history,
    )
    best = int(np.argmax(run["g_squared"][0]))
    spinors = [run["spinors"][q][0, best] for q in range(s.n_qubits)]
    spinors = _als.polish_stationary(s.tensor, spinors)
    product = ProductState(tuple(_gauge_fix(sp) for sp in spinors))
    g_squared = overlap_with_product(s, product) ** 2
    lagrange = None
    if s.n_qubits == 3:
        x = spinor_to_bloch(product.spinors[0])
        y = spinor_to_bloch(product.spinors[1])
        b_a = bloch_vector(s, 0)
        b_b = bloch_vector(s, 1)
        g = correlation_matrix(s, 0, 1)
        lam1 = float(x @ (g @ y + b_a))
        lam2 = float(y @ (g.T @ x + b_b))
        lagrange = (lam1, lam2)
        residual = stationarity_residual(s, x, y, lam1, lam2)
    else:
        cross, _ = _als._cross_amplitudes(s.tensor.conj(), list(product.spinors))
        residual = float(np.linalg.norm(cross))
    history = run.get("history")
    return OverlapResult(
        g_squared=float(g_squared),
        product=product,
        lagrange=lagrange,
        restarts_used=cfg.restarts + 1,
        iterations=int(run["iterations"][0, best]),
        converged=bool(run["converged"][0, best]),
        stationarity_residual=residual,
        sweep_history=None if history is None else history[:, 0, :],
    )
