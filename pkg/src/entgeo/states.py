"""Pure few-qubit states, local unitaries, partial traces and sampling.

Bit ordering is fixed throughout the package: amplitude index ``i`` is read
as an n-bit string with qubit A (qubit 0) as the most significant bit.  For
three qubits, index 3 is |011>, i.e. A=0, B=1, C=1.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _als

NORM_ATOL = 1e-12
MAX_QUBITS = 8


class StateFormatError(ValueError):
    """Raised for malformed state documents; ``field`` names the offender."""

    def __init__(self, message: str, field: str):
        super().__init__(f"{message} (field: {field})")
        self.field = field


class CanonicalizationError(RuntimeError):
    """Canonical-form search did not reach the residual tolerance."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``n_qubits`` qubits.

    ``norm_factor`` records the norm of the raw input the state was built
    from (1.0 when the input was already normalized).
    """

    n_qubits: int
    amplitudes: np.ndarray
    norm_factor: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be between 1 and {MAX_QUBITS}, got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(
                f"amplitudes are not normalized: |sum of squared magnitudes - 1| = {abs(norm_sq - 1.0):.3e}"
            )
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def tensor(self) -> np.ndarray:
        """The amplitudes reshaped to one axis per qubit, qubit A first."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def inner(self, other: "PureState") -> complex:
        """<self|other>."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "PureState") -> float:
        """|<self|other>|^2."""
        return abs(self.inner(other)) ** 2


def make_state(n: int, amplitudes) -> PureState:
    """Build a normalized ``PureState`` from raw amplitudes.

    The input is normalized and the applied factor recorded on the result.
    Raises on a length mismatch or an all-zero amplitude vector.
    """
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be between 1 and {MAX_QUBITS}, got {n}")
    if amps.size != 2**n:
        raise ValueError(f"expected {2**n} amplitudes for {n} qubits, got {amps.size}")
    norm = float(np.linalg.norm(amps))
    if norm < 1e-150:
        raise ValueError("all-zero amplitude vector")
    return PureState(n, amps / norm, norm_factor=norm)


def basis_state(n: int, index: int) -> PureState:
    """Computational basis state |index> in the fixed bit ordering."""
    if not 0 <= index < 2**n:
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return PureState(n, amps)


def ghz_state(n: int = 3) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return PureState(n, amps)


def w_state(n: int = 3) -> PureState:
    """Equal superposition of the n single-excitation basis strings."""
    amps = np.zeros(2**n, dtype=complex)
    for q in range(n):
        amps[1 << (n - 1 - q)] = 1.0 / math.sqrt(n)
    return PureState(n, amps)


# --------------------------------------------------------------------------
# canonical form


@dataclass(frozen=True)
class CanonicalParams:
    """The five nonnegative amplitudes and gauge phase of the three-qubit
    canonical form a|011> + b|101> + c|110> + d|000> + h e^{i gamma}|111>.
    """

    a: float
    b: float
    c: float
    d: float
    h: float
    gamma: float = 0.0

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d, self.h)
        for name, v in zip("abcdh", vals):
            if v < -NORM_ATOL:
                raise ValueError(f"canonical amplitude {name} must be nonnegative, got {v}")
        norm_sq = sum(v * v for v in vals)
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"canonical amplitudes not normalized: |a^2+...+h^2 - 1| = {abs(norm_sq - 1.0):.3e}")
        if not (-math.pi / 2 - 1e-12 < self.gamma <= math.pi / 2 + 1e-12):
            raise ValueError(f"gamma must lie in (-pi/2, pi/2], got {self.gamma}")

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.h, self.gamma)


def canonical_to_state(p: CanonicalParams) -> PureState:
    """Amplitude vector of the canonical form (indices 3, 5, 6, 0, 7)."""
    amps = np.zeros(8, dtype=complex)
    amps[3] = p.a
    amps[5] = p.b
    amps[6] = p.c
    amps[0] = p.d
    amps[7] = p.h * np.exp(1j * p.gamma)
    return PureState(3, amps)


# --------------------------------------------------------------------------
# local unitaries


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """One 2x2 unitary per qubit, acting as their tensor product."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(_readonly(np.asarray(m, dtype=complex)) for m in self.matrices)
        for m in mats:
            if m.shape != (2, 2):
                raise ValueError("each local unitary must be a 2x2 matrix")
            if np.abs(m @ m.conj().T - np.eye(2)).max() > NORM_ATOL:
                raise ValueError("matrix is not unitary within 1e-12")
        object.__setattr__(self, "matrices", mats)

    @property
    def n_qubits(self) -> int:
        return len(self.matrices)

    @classmethod
    def identity(cls, n: int) -> "LocalUnitary":
        return cls(tuple(np.eye(2, dtype=complex) for _ in range(n)))

    @classmethod
    def random(cls, n: int, seed=None) -> "LocalUnitary":
        """Independent Haar-random 2x2 unitaries on each qubit."""
        rng = np.random.default_rng(seed)
        return cls(tuple(haar_unitary(rng) for _ in range(n)))


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """A Haar-random 2x2 unitary (QR of a complex Gaussian, phases fixed)."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def apply_local_unitary(s: PureState, u: LocalUnitary) -> PureState:
    """Transform the state by the tensor product of per-qubit unitaries."""
    if u.n_qubits != s.n_qubits:
        raise ValueError(f"state has {s.n_qubits} qubits but {u.n_qubits} unitaries were given")
    t = s.tensor
    for q, m in enumerate(u.matrices):
        if np.abs(m @ m.conj().T - np.eye(2)).max() > 1e-10:
            raise ValueError("matrix is not unitary within 1e-10")
        t = np.moveaxis(np.tensordot(m, np.moveaxis(t, q, 0), axes=(1, 0)), 0, q)
    amps = t.reshape(-1)
    amps = amps / np.linalg.norm(amps)  # scrub rounding drift, the map is norm-preserving
    return PureState(s.n_qubits, amps)


def permute_qubits(s: PureState, perm) -> PureState:
    """Relabel qubits: new qubit k is old qubit ``perm[k]``."""
    perm = tuple(perm)
    if sorted(perm) != list(range(s.n_qubits)):
        raise ValueError(f"perm must be a permutation of 0..{s.n_qubits - 1}")
    return PureState(s.n_qubits, np.transpose(s.tensor, perm).reshape(-1))


# --------------------------------------------------------------------------
# density matrices and partial traces


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix of dimension 2 or 4."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        if np.abs(m - m.conj().T).max() > NORM_ATOL:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > NORM_ATOL:
            raise ValueError("density matrix trace differs from 1 by more than 1e-12")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def _rho_single(tensor: np.ndarray, q: int) -> np.ndarray:
    m = np.moveaxis(tensor, q, 0).reshape(2, -1)
    return m @ m.conj().T


def _rho_pair(tensor: np.ndarray, q1: int, q2: int) -> np.ndarray:
    m = np.moveaxis(tensor, (q1, q2), (0, 1)).reshape(4, -1)
    return m @ m.conj().T


def partial_trace_single(s: PureState, q: int) -> DensityMatrix:
    """Reduced density matrix of qubit ``q``."""
    if not 0 <= q < s.n_qubits:
        raise ValueError(f"qubit index {q} out of range")
    return DensityMatrix(_rho_single(s.tensor, q))


def partial_trace_pair(s: PureState, q1: int, q2: int) -> DensityMatrix:
    """Two-qubit reduced density matrix; ``q1`` is the more significant qubit."""
    if q1 == q2:
        raise ValueError("q1 and q2 must differ")
    for q in (q1, q2):
        if not 0 <= q < s.n_qubits:
            raise ValueError(f"qubit index {q} out of range")
    return DensityMatrix(_rho_pair(s.tensor, q1, q2))


# --------------------------------------------------------------------------
# sampling


def haar_random_state(n: int, seed=None) -> PureState:
    """Haar-random pure state: normalized standard complex Gaussian amplitudes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState(n, z / np.linalg.norm(z))


class ZeroBlochFamily(str, enum.Enum):
    """The two canonical-form families on which qubit C is completely mixed."""

    QUADRILATERAL = "quadrilateral"  # h = 0 with c^2 + d^2 = a^2 + b^2
    H_NONZERO = "h-nonzero"          # c = 0 with d^2 = a^2 + b^2 + h^2


# keep every sampled amplitude at least this large; exact-zero corners are
# degenerate representatives and ill-conditioned for the closed forms
_SAMPLE_FLOOR = 0.05


def _sample_zero_bloch(family: ZeroBlochFamily, rng: np.random.Generator) -> CanonicalParams:
    half = math.sqrt(0.5)
    if family is ZeroBlochFamily.QUADRILATERAL:
        lo = math.asin(_SAMPLE_FLOOR / half)
        u, v = rng.uniform(lo, math.pi / 2 - lo, size=2)
        return CanonicalParams(
            a=half * math.cos(u), b=half * math.sin(u),
            c=half * math.cos(v), d=half * math.sin(v),
            h=0.0, gamma=0.0,
        )
    while True:
        v = np.abs(rng.normal(size=3))
        v *= half / np.linalg.norm(v)
        if v.min() >= _SAMPLE_FLOOR:
            return CanonicalParams(
                a=float(v[0]), b=float(v[1]), c=0.0, d=half, h=float(v[2]), gamma=0.0
            )


def sample_zero_bloch_manifold(family, seed=None) -> CanonicalParams:
    """Draw canonical parameters from one of the two zero-Bloch families.

    Both families give b_C = 0 for the resulting state.  Each amplitude is
    kept above a small floor so the sampled states stay away from degenerate
    corners of the family.
    """
    family = ZeroBlochFamily(family)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _sample_zero_bloch(family, rng)


# --------------------------------------------------------------------------
# product states and overlaps


@dataclass(frozen=True, eq=False)
class ProductState:
    """One normalized 2-spinor per qubit."""

    spinors: tuple

    def __post_init__(self):
        sps = tuple(_readonly(np.asarray(s, dtype=complex).reshape(-1)) for s in self.spinors)
        for sp in sps:
            if sp.size != 2:
                raise ValueError("each spinor must have 2 components")
            if abs(np.linalg.norm(sp) - 1.0) > NORM_ATOL:
                raise ValueError("spinor is not normalized within 1e-12")
        object.__setattr__(self, "spinors", sps)

    @property
    def n_qubits(self) -> int:
        return len(self.spinors)

    def amplitudes(self) -> np.ndarray:
        out = np.array([1.0 + 0j])
        for sp in self.spinors:
            out = np.kron(out, sp)
        return out


def overlap_with_product(s: PureState, q: ProductState) -> float:
    """|<s | q_0 q_1 ... q_{n-1}>|."""
    if q.n_qubits != s.n_qubits:
        raise ValueError("qubit count mismatch between state and product ansatz")
    t = s.tensor.conj()
    for sp in q.spinors:
        t = np.tensordot(t, sp, axes=([0], [0]))
    return float(abs(t))


# --------------------------------------------------------------------------
# state documents (JSON)


def state_to_dict(s: PureState) -> dict:
    return {
        "n_qubits": s.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes],
    }


def state_from_dict(doc: dict, allow_unnormalized: bool = False) -> PureState:
    """Parse the state document schema, rejecting malformed fields.

    Inputs within 1e-6 of unit norm are normalized silently, within 1e-3
    with a warning; anything farther is rejected unless
    ``allow_unnormalized`` is set (it is then normalized, with a warning).
    """
    if not isinstance(doc, dict):
        raise StateFormatError("state document must be an object", field="document")
    try:
        n = doc["n_qubits"]
    except KeyError:
        raise StateFormatError("missing key", field="n_qubits") from None
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_QUBITS:
        raise StateFormatError(f"n_qubits must be an integer in 1..{MAX_QUBITS}", field="n_qubits")
    try:
        raw = doc["amplitudes"]
    except KeyError:
        raise StateFormatError("missing key", field="amplitudes") from None
    if not isinstance(raw, (list, tuple)) or len(raw) != 2**n:
        raise StateFormatError(
            f"amplitudes must be an array of length {2**n}", field="amplitudes"
        )
    amps = np.empty(2**n, dtype=complex)
    for i, pair in enumerate(raw):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise StateFormatError(
                f"amplitudes[{i}] must be a [re, im] pair of numbers", field="amplitudes"
            )
        amps[i] = pair[0] + 1j * pair[1]
    norm = float(np.linalg.norm(amps))
    if norm < 1e-150:
        raise StateFormatError("amplitudes are all zero", field="amplitudes")
    dev = abs(norm - 1.0)
    if dev > 1e-3 and not allow_unnormalized:
        raise StateFormatError(
            f"amplitudes have norm {norm:.6g}; pass allow_unnormalized to accept",
            field="amplitudes",
        )
    if dev > 1e-6:
        warnings.warn(f"state norm {norm:.6g} deviates from 1; normalizing", stacklevel=2)
    return PureState(n, amps / norm, norm_factor=norm)


def save_state(s: PureState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(s), fh, indent=1)
        fh.write("\n")


def load_state(path, allow_unnormalized: bool = False) -> PureState:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateFormatError(f"not valid JSON: {exc}", field="document") from None
    return state_from_dict(doc, allow_unnormalized=allow_unnormalized)


# --------------------------------------------------------------------------
# canonicalization

# diagonal-phase gauge: amplitude (i, j, k) picks up i*thA + j*thB + k*thC + phi,
# one row per constrained index
_PHASE_ROWS = {
    0: (0.0, 0.0, 0.0, 1.0),
    3: (0.0, 1.0, 1.0, 1.0),
    5: (1.0, 0.0, 1.0, 1.0),
    6: (1.0, 1.0, 0.0, 1.0),
    7: (1.0, 1.0, 1.0, 1.0),
}
_ZERO_AMP = 1e-10


def _solve_phase_gauge(amps: np.ndarray) -> np.ndarray:
    """Phases (thA, thB, thC, phi) making amplitudes 0, 3, 5, 6 real nonnegative.

    Gauge freedom left over by vanishing amplitudes is spent on zeroing the
    phase of amplitude 7.
    """
    constrained = [i for i in (0, 3, 5, 6) if abs(amps[i]) > _ZERO_AMP]
    rows = [_PHASE_ROWS[i] for i in constrained]
    target = [-np.angle(amps[i]) for i in constrained]
    if len(rows) < 4 and abs(amps[7]) > _ZERO_AMP:
        rows.append(_PHASE_ROWS[7])
        target.append(-np.angle(amps[7]))
    if not rows:
        return np.zeros(4)
    a = np.array(rows)
    b = np.array(target)
    if len(rows) == 4:
        return np.linalg.solve(a, b)
    return np.linalg.lstsq(a, b, rcond=None)[0]


def _phase_vector(theta: np.ndarray) -> np.ndarray:
    th_a, th_b, th_c, phi = theta
    bits = np.arange(8)
    total = (
        th_a * ((bits >> 2) & 1) + th_b * ((bits >> 1) & 1) + th_c * (bits & 1) + phi
    )
    return np.exp(1j * total)


def _canonical_rep(tensor: np.ndarray, spinors: list[np.ndarray]):
    """Canonical parameters, unitaries and residual for one stationary branch."""
    unitaries = []
    for e in spinors:
        f = np.array([-np.conj(e[1]), np.conj(e[0])])
        unitaries.append(np.vstack([e.conj(), f.conj()]))
    t = tensor
    for q, u in enumerate(unitaries):
        t = np.moveaxis(np.tensordot(u, np.moveaxis(t, q, 0), axes=(1, 0)), 0, q)
    amps = t.reshape(8)
    theta = _solve_phase_gauge(amps)
    amps = amps * _phase_vector(theta)
    gamma = float(np.angle(amps[7])) if abs(amps[7]) > _ZERO_AMP else 0.0
    if gamma > math.pi / 2 or gamma <= -math.pi / 2:
        # adding pi to every qubit phase shifts gamma by pi and leaves the
        # other constrained amplitudes fixed
        theta = theta + np.array([math.pi, math.pi, math.pi, 0.0])
        amps = t.reshape(8) * _phase_vector(theta)
        gamma = float(np.angle(amps[7])) if abs(amps[7]) > _ZERO_AMP else 0.0
    if abs(gamma) < 1e-12:
        gamma = 0.0
    residual = float(np.sum(np.abs(amps[[1, 2, 4]]) ** 2))
    for i in (0, 3, 5, 6):
        residual += float(amps[i].imag ** 2 + min(amps[i].real, 0.0) ** 2)
    vals = np.abs(amps[[3, 5, 6, 0, 7]])
    vals = vals / np.linalg.norm(vals)
    params = CanonicalParams(
        a=float(vals[0]), b=float(vals[1]), c=float(vals[2]),
        d=float(vals[3]), h=float(vals[4]), gamma=gamma,
    )
    final = []
    for q, u in enumerate(unitaries):
        d = np.diag([1.0, np.exp(1j * theta[q])]).astype(complex)
        m = d @ u
        if q == 0:
            m = np.exp(1j * theta[3]) * m
        final.append(m)
    return params, LocalUnitary(tuple(final)), residual


def canonicalize(
    s: PureState,
    restarts: int = 32,
    max_iterations: int = 3000,
    seed=0,
    residual_tol: float = 1e-9,
) -> tuple[CanonicalParams, LocalUnitary]:
    """Find local unitaries taking a three-qubit state to its canonical form.

    Every stationary product state of the overlap with nonzero value yields a
    representative; the search runs ``restarts`` random starts plus one basis
    start, Newton-polishes each converged branch, and among all
    representatives reaching ``residual_tol`` returns the lexicographically
    largest (d, h, a, b, c), breaking remaining ties toward gamma >= 0.

    The returned unitaries map ``s`` onto ``canonical_to_state(params)``
    exactly (global phase included).
    """
    if s.n_qubits != 3:
        raise ValueError("canonicalization is defined for three-qubit states")
    tensor = s.tensor
    run = _als.power_iteration(
        tensor[None], restarts=restarts, max_iterations=max_iterations, tol=1e-15, seed=seed
    )
    overlaps = run["g_squared"][0]
    order = np.argsort(-overlaps, kind="stable")
    # only branches tied with the best overlap can win the (d, ...) tie-break,
    # since d equals the overlap at the branch's stationary point
    window = max(overlaps.max() - 1e-6, 1e-12)
    candidates = []
    seen_branches = set()
    seen_params = set()
    for r in order:
        if overlaps[r] < window:
            break
        spinors = [run["spinors"][q][0, r] for q in range(3)]
        fingerprint = tuple(
            round(v, 6)
            for sp in spinors
            for v in (
                2.0 * (np.conj(sp[0]) * sp[1]).real,
                2.0 * (np.conj(sp[0]) * sp[1]).imag,
                abs(sp[0]) ** 2 - abs(sp[1]) ** 2,
            )
        )
        if fingerprint in seen_branches:
            continue
        seen_branches.add(fingerprint)
        spinors = _als.polish_stationary(tensor, spinors)
        params, lu, residual = _canonical_rep(tensor, spinors)
        if residual > residual_tol:
            continue
        key = tuple(np.round(params.as_tuple(), 7))
        if key in seen_params:
            continue
        seen_params.add(key)
        candidates.append((params, lu, residual))
    if not candidates:
        raise CanonicalizationError(
            f"no canonical representative reached residual {residual_tol:g} "
            f"after {restarts} restarts"
        )

    def sort_key(item):
        p = item[0]
        return tuple(round(v, 9) for v in (p.d, p.h, p.a, p.b, p.c)) + (p.gamma,)

    candidates.sort(key=sort_key, reverse=True)
    params, lu, _ = candidates[0]
    return params, lu
