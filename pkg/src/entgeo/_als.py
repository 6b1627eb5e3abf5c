"""Batched rank-1 power iteration on dense qubit amplitude tensors.

This is the workhorse behind the maximal-product-overlap solver and the
canonical-form search: cycling over qubits, each local spinor is replaced by
the normalized contraction of the state against all other current spinors,
which is monotonically non-decreasing in the overlap.  Many independent
restarts (and many independent states) are iterated simultaneously as one
flat batch; a restart freezes once its squared overlap changes by less than
``tol`` in a full sweep.
"""

from __future__ import annotations

import numpy as np

_AXES = "abcdefgh"  # one contraction axis per qubit, up to 8 qubits


def haar_bloch_spinors(rng: np.random.Generator, shape) -> np.ndarray:
    """Spinors whose Bloch vectors are uniform on the sphere, shape ``(*shape, 2)``."""
    z = rng.uniform(-1.0, 1.0, size=shape)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return np.stack(
        [np.sqrt((1.0 + z) / 2.0) + 0j, np.exp(1j * phi) * np.sqrt((1.0 - z) / 2.0)],
        axis=-1,
    )


def _subscripts(n: int) -> list[str]:
    # update rule for qubit q: v = einsum('p<all axes>, p<other axes>... -> p<axis q>')
    subs = []
    for q in range(n):
        operands = ["p" + _AXES[:n]] + ["p" + _AXES[k] for k in range(n) if k != q]
        subs.append(",".join(operands) + "->p" + _AXES[q])
    return subs


def _initial_spinors(psis: np.ndarray, restarts: int, seed) -> list[np.ndarray]:
    """Per-qubit start batches of shape (S, restarts + 1, 2).

    The first ``restarts`` columns are Haar-random; each restart index draws
    from its own spawned sub-seed so results do not depend on execution order.
    The last column is the deterministic start at the largest-magnitude
    computational basis amplitude of each state.
    """
    n = psis.ndim - 1
    n_states = psis.shape[0]
    children = np.random.SeedSequence(seed).spawn(restarts)
    spinors = [np.empty((n_states, restarts + 1, 2), dtype=complex) for _ in range(n)]
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        for q in range(n):
            spinors[q][:, r, :] = haar_bloch_spinors(rng, (n_states,))
    flat_index = np.argmax(np.abs(psis.reshape(n_states, -1)), axis=1)
    for q in range(n):
        bit = (flat_index >> (n - 1 - q)) & 1
        basis = np.zeros((n_states, 2), dtype=complex)
        basis[np.arange(n_states), bit] = 1.0
        spinors[q][:, -1, :] = basis
    return spinors


def power_iteration(
    psis: np.ndarray,
    restarts: int,
    max_iterations: int,
    tol: float,
    seed,
    record_history: bool = False,
):
    """Run the alternating update for a batch of states.

    Parameters
    ----------
    psis : (S, 2, ..., 2) complex array of S normalized n-qubit states.
    restarts : number of random starts per state; one extra deterministic
        basis start is always appended, so R = restarts + 1 runs per state.
    max_iterations : sweep cap per run.
    tol : freeze a run once its per-sweep change in squared overlap drops
        below this.
    seed : anything acceptable to ``numpy.random.SeedSequence``.
    record_history : keep the per-sweep squared overlaps (disables the
        compaction fast path; meant for small diagnostic runs).

    Returns
    -------
    dict with ``g_squared`` (S, R), ``spinors`` (list of n arrays (S, R, 2)),
    ``iterations`` (S, R), ``converged`` (S, R) and optionally ``history``
    ((sweeps, S, R), monotone along axis 0 for each run).
    """
    n = psis.ndim - 1
    n_states = psis.shape[0]
    n_runs = restarts + 1
    spinors = _initial_spinors(psis, restarts, seed)
    subs = _subscripts(n)
    psi_conj = np.repeat(psis.conj()[:, None], n_runs, axis=1).reshape(
        n_states * n_runs, *psis.shape[1:]
    )

    total = n_states * n_runs
    cur = [s.reshape(total, 2).copy() for s in spinors]
    cur_psi = psi_conj
    cur_g2 = np.zeros(total)
    index = np.arange(total)

    out_g2 = np.zeros(total)
    out_conv = np.zeros(total, dtype=bool)
    out_iters = np.zeros(total, dtype=int)
    out_sp = [np.empty((total, 2), dtype=complex) for _ in range(n)]
    history = [] if record_history else None

    for sweep in range(1, max_iterations + 1):
        norm = None
        for q in range(n):
            operands = [cur_psi] + [cur[k] for k in range(n) if k != q]
            v = np.einsum(subs[q], *operands)
            norm = np.linalg.norm(v, axis=-1)
            safe = norm > 1e-300
            cur[q] = np.where(safe[:, None], v.conj() / np.where(safe, norm, 1.0)[:, None], cur[q])
        new_g2 = norm**2
        delta = np.abs(new_g2 - cur_g2)
        cur_g2 = new_g2
        if record_history:
            # no compaction in this mode; every run keeps iterating until all stop
            history.append(cur_g2.copy())
            if sweep < max_iterations and np.max(delta) >= tol:
                continue
            done = np.ones(index.size, dtype=bool)
            conv_now = delta < tol
        elif sweep == max_iterations:
            done = np.ones(index.size, dtype=bool)
            conv_now = delta < tol
        else:
            done = delta < tol
            conv_now = done
        if done.any():
            frozen = index[done]
            out_g2[frozen] = cur_g2[done]
            out_conv[frozen] = conv_now[done]
            out_iters[frozen] = sweep
            for q in range(n):
                out_sp[q][frozen] = cur[q][done]
            keep = ~done
            if not keep.any():
                break
            index = index[keep]
            cur_psi = cur_psi[keep]
            cur = [c[keep] for c in cur]
            cur_g2 = cur_g2[keep]

    result = {
        "g_squared": out_g2.reshape(n_states, n_runs),
        "spinors": [s.reshape(n_states, n_runs, 2) for s in out_sp],
        "iterations": out_iters.reshape(n_states, n_runs),
        "converged": out_conv.reshape(n_states, n_runs),
    }
    if record_history:
        result["history"] = np.array(history).reshape(-1, n_states, n_runs)
    return result


def _cross_amplitudes(psi_conj: np.ndarray, spinors: list[np.ndarray]):
    """Contractions with one spinor replaced by its orthogonal complement.

    Their vanishing is first-order stationarity of the product overlap.
    Returns (residual vector of n complex numbers, overlap value).
    """
    n = psi_conj.ndim
    perp = [np.array([-np.conj(s[1]), np.conj(s[0])]) for s in spinors]
    values = np.empty(n, dtype=complex)
    for q in range(n):
        ops = [spinors[k] if k != q else perp[q] for k in range(n)]
        t = psi_conj
        for k in range(n):
            t = np.tensordot(t, ops[k], axes=([0], [0]))
        values[q] = t
    t = psi_conj
    for k in range(n):
        t = np.tensordot(t, spinors[k], axes=([0], [0]))
    return values, t


def polish_stationary(psi: np.ndarray, spinors: list[np.ndarray], max_steps: int = 12):
    """Newton-refine a near-stationary product state to machine precision.

    Each spinor moves along its orthogonal complement, e ->
    normalize(e + t * e_perp) with one complex t per qubit, and the n complex
    cross amplitudes are driven to zero.  Falls back to the input if the
    refinement does not improve.
    """
    n = psi.ndim
    psi_conj = psi.conj()
    best = [s.copy() for s in spinors]
    best_res, _ = _cross_amplitudes(psi_conj, best)
    best_norm = np.linalg.norm(best_res)
    cur = [s.copy() for s in best]
    step = 1e-7
    for _ in range(max_steps):
        f0, _ = _cross_amplitudes(psi_conj, cur)
        f_real = np.concatenate([f0.real, f0.imag])
        if np.linalg.norm(f0) < 1e-15:
            break
        jac = np.empty((2 * n, 2 * n))
        for q in range(n):
            perp = np.array([-np.conj(cur[q][1]), np.conj(cur[q][0])])
            for part in range(2):
                t = step if part == 0 else 1j * step
                trial = [c.copy() for c in cur]
                moved = cur[q] + t * perp
                trial[q] = moved / np.linalg.norm(moved)
                f1, _ = _cross_amplitudes(psi_conj, trial)
                col = (np.concatenate([f1.real, f1.imag]) - f_real) / step
                jac[:, 2 * q + part] = col
        try:
            update = np.linalg.solve(jac, -f_real)
        except np.linalg.LinAlgError:
            break
        for q in range(n):
            perp = np.array([-np.conj(cur[q][1]), np.conj(cur[q][0])])
            moved = cur[q] + (update[2 * q] + 1j * update[2 * q + 1]) * perp
            cur[q] = moved / np.linalg.norm(moved)
        res, _ = _cross_amplitudes(psi_conj, cur)
        res_norm = np.linalg.norm(res)
        if res_norm < best_norm:
            best_norm = res_norm
            best = [c.copy() for c in cur]
        else:
            break
    return best
