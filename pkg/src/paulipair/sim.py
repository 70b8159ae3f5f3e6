"""Exact statevector preparation of encoded states.

An upload sequence is an ordered tuple of atomic block names drawn from the
8-element gate library. Single-qubit blocks apply one rotation per qubit
(qubit q gets angle theta[q]); ring blocks apply one two-qubit gate per edge
of the nearest-neighbor ring. Qubit 0 is the most significant bit of the
statevector index, matching the leftmost symbol of the Pauli text form.

Conventions (fixed here, never stated by any single standard):
  RX(t) = exp(-i t X / 2), RY(t) = exp(-i t Y / 2), RZ(t) = exp(-i t Z / 2);
  controlled rotations apply the same matrix on the target conditioned on
  the control. Ring edges are (q, (q+1) mod n) for q = 0..n-1, with the
  lower qubit index acting as control. Controlled-rotation angles are the
  pair average of the two endpoint angles.
"""
from __future__ import annotations

import numpy as np

GATE_LIBRARY = (
    "RX",
    "RY",
    "RZ",
    "CZ_RING",
    "CNOT_RING",
    "CRX_RING",
    "CRY_RING",
    "CRZ_RING",
)

_ROTATION_AXIS = {"RX": "x", "RY": "y", "RZ": "z", "CRX_RING": "x", "CRY_RING": "y", "CRZ_RING": "z"}
_RING_BLOCKS = ("CZ_RING", "CNOT_RING", "CRX_RING", "CRY_RING", "CRZ_RING")

UploadSequence = tuple  # tuple[str, ...]; element-wise equality doubles as cache key


def pair_angle(theta_u: float, theta_v: float) -> float:
    """Angle used on a ring edge: the average of the two endpoint angles."""
    return (theta_u + theta_v) / 2.0


def ring_edges(n: int) -> list[tuple[int, int]]:
    """(control, target) pairs of the nearest-neighbor ring, lower index controls."""
    if n < 2:
        raise ValueError(f"ring blocks need at least 2 qubits, got n={n}")
    edges = []
    for q in range(n):
        u, v = q, (q + 1) % n
        edges.append((min(u, v), max(u, v)))
    return edges


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    """2x2 rotation exp(-i theta P / 2) about the given Pauli axis."""
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]], dtype=complex)
    raise ValueError(f"unknown rotation axis {axis!r}")


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


# ---------------------------------------------------------------------------
# Batched fast path. States are stored as (N, 2^n) with per-sample angle rows;
# the per-qubit stride update costs O(N 2^n) per gate instead of dense O(4^n).
# ---------------------------------------------------------------------------


def _rotation_coeffs(axis: str, theta: np.ndarray):
    """Per-sample 2x2 entries (m00, m01, m10, m11), each shaped like theta."""
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        return c + 0j, -1j * s, -1j * s, c + 0j
    if axis == "y":
        return c + 0j, -s + 0j, s + 0j, c + 0j
    return np.exp(-1j * half), np.zeros_like(c, dtype=complex), np.zeros_like(c, dtype=complex), np.exp(1j * half)


def _apply_rotation_batch(states: np.ndarray, axis: str, q: int, n: int, theta_q: np.ndarray) -> None:
    """In-place rotation of qubit q on every row of a (N, 2^n) state block."""
    m00, m01, m10, m11 = (m.reshape(-1, 1, 1) for m in _rotation_coeffs(axis, theta_q))
    view = states.reshape(states.shape[0], 2**q, 2, -1)
    a = view[:, :, 0, :].copy()
    b = view[:, :, 1, :]
    view[:, :, 0, :] = m00 * a + m01 * b
    view[:, :, 1, :] = m10 * a + m11 * b


def _controlled_index(n: int, control: int, target: int, c_bit: int, t_bit: int):
    idx = [slice(None)] * (n + 1)
    idx[1 + control] = c_bit
    idx[1 + target] = t_bit
    return tuple(idx)


def _apply_controlled_batch(states, kind: str, control: int, target: int, n: int, edge_theta) -> None:
    """Apply one controlled gate on every row; edge_theta is per-sample for CR blocks."""
    psi = states.reshape((states.shape[0],) + (2,) * n)
    i0 = _controlled_index(n, control, target, 1, 0)
    i1 = _controlled_index(n, control, target, 1, 1)
    if kind == "CZ_RING":
        psi[i1] = -psi[i1]
        return
    if kind == "CNOT_RING":
        a = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = a
        return
    m00, m01, m10, m11 = _rotation_coeffs(_ROTATION_AXIS[kind], edge_theta)
    bshape = (states.shape[0],) + (1,) * (n - 2)
    a = psi[i0].copy()
    b = psi[i1]
    psi[i0] = m00.reshape(bshape) * a + m01.reshape(bshape) * b
    psi[i1] = m10.reshape(bshape) * a + m11.reshape(bshape) * b


def apply_block_batch(states: np.ndarray, block: str, thetas: np.ndarray, n: int) -> None:
    """In-place application of one atomic block to a (N, 2^n) batch of states."""
    if block not in GATE_LIBRARY:
        raise ValueError(f"unknown block {block!r}; library: {GATE_LIBRARY}")
    if thetas.shape[1] != n:
        raise ValueError(f"angle rows have length {thetas.shape[1]}, expected n={n}")
    if block in ("RX", "RY", "RZ"):
        axis = _ROTATION_AXIS[block]
        for q in range(n):
            _apply_rotation_batch(states, axis, q, n, thetas[:, q])
        return
    for control, target in ring_edges(n):
        if block in ("CRX_RING", "CRY_RING", "CRZ_RING"):
            edge_theta = pair_angle(thetas[:, control], thetas[:, target])
        else:
            edge_theta = None
        _apply_controlled_batch(states, block, control, target, n, edge_theta)


def encode_batch(seq, thetas: np.ndarray, n: int) -> np.ndarray:
    """Encoded states for every angle row; returns a fresh (N, 2^n) array."""
    thetas = np.asarray(thetas, dtype=float)
    states = np.zeros((thetas.shape[0], 2**n), dtype=complex)
    states[:, 0] = 1.0
    for block in seq:
        apply_block_batch(states, block, thetas, n)
    return states


# ---------------------------------------------------------------------------
# Single-state operations (thin wrappers over the batch path so both agree
# bit for bit).
# ---------------------------------------------------------------------------


def apply_block(state: np.ndarray, block: str, angles: np.ndarray) -> np.ndarray:
    """State after one atomic block; the input state is left untouched."""
    state = np.asarray(state, dtype=complex)
    n = int(np.log2(state.shape[0]))
    if 2**n != state.shape[0]:
        raise ValueError("state length is not a power of two")
    out = state[None, :].copy()
    apply_block_batch(out, block, np.asarray(angles, dtype=float)[None, :], n)
    return out[0]


def encode(seq, angles: np.ndarray, n: int) -> np.ndarray:
    """Encoded state g_L ... g_1 |0...0>; the empty sequence returns |0...0>."""
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (n,):
        raise ValueError(f"angles must have shape ({n},), got {angles.shape}")
    state = encode_batch(tuple(seq), angles[None, :], n)[0]
    assert abs(np.linalg.norm(state) - 1.0) < 1e-10, "statevector norm drifted"
    return state


# ---------------------------------------------------------------------------
# Dense test oracle: explicit 2^n x 2^n block matrices via Kronecker products.
# Memory is O(4^n), so the oracle is capped at n <= 6.
# ---------------------------------------------------------------------------

_ID2 = np.eye(2, dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_chain(factors) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _controlled_dense(n: int, control: int, target: int, gate2: np.ndarray) -> np.ndarray:
    factors0 = [_ID2] * n
    factors0[control] = _P0
    factors1 = [_ID2] * n
    factors1[control] = _P1
    factors1[target] = gate2
    return _kron_chain(factors0) + _kron_chain(factors1)


def block_unitary(block: str, angles: np.ndarray, n: int) -> np.ndarray:
    """Dense matrix of one atomic block (oracle path only)."""
    if block in ("RX", "RY", "RZ"):
        axis = _ROTATION_AXIS[block]
        return _kron_chain([rotation_matrix(axis, angles[q]) for q in range(n)])
    mat = np.eye(2**n, dtype=complex)
    for control, target in ring_edges(n):
        if block == "CZ_RING":
            gate2 = _Z
        elif block == "CNOT_RING":
            gate2 = _X
        else:
            gate2 = rotation_matrix(_ROTATION_AXIS[block], pair_angle(angles[control], angles[target]))
        mat = _controlled_dense(n, control, target, gate2) @ mat
    return mat


def dense_unitary_oracle(seq, angles: np.ndarray, n: int) -> np.ndarray:
    """Reference encoding via explicit dense matrices; must match encode()."""
    if n > 6:
        raise ValueError(f"dense oracle supports n <= 6, got n={n}")
    angles = np.asarray(angles, dtype=float)
    state = zero_state(n)
    for block in seq:
        if block not in GATE_LIBRARY:
            raise ValueError(f"unknown block {block!r}")
        state = block_unitary(block, angles, n) @ state
    return state
