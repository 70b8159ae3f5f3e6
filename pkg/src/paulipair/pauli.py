"""Weight-truncated Pauli families, expectation features, and measurement grouping.

A Pauli string is its text form: n characters over {I, X, Y, Z}, qubit 0
leftmost. That ordering matches the statevector convention in `sim` (qubit 0
is the most significant index bit), so symbol q acts on reshape axis q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

import numpy as np

SYMBOLS = "IXYZ"


def weight(pauli: str) -> int:
    return sum(1 for s in pauli if s != "I")


def family_size(n: int, k: int) -> int:
    """Count of weight-1..k strings on n qubits: sum_j C(n,j) 3^j."""
    return sum(comb(n, j) * 3**j for j in range(1, k + 1))


@dataclass(frozen=True)
class PauliFamily:
    """Canonically ordered weight-truncated family (ascending weight, then lex)."""

    n: int
    k: int
    members: tuple[str, ...]
    excluded_qubits: frozenset[int] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight(p) for p in self.members])

    @property
    def max_weight(self) -> int:
        return max(weight(p) for p in self.members)

    def index(self, pauli: str) -> int:
        return self.members.index(pauli)


def enumerate_family(n: int, k: int, excluded_qubits=()) -> PauliFamily:
    """All weight-1..k strings whose support avoids the excluded qubits."""
    if k < 1 or k > n:
        raise ValueError(f"max weight k must satisfy 1 <= k <= n, got k={k}, n={n}")
    excluded = frozenset(int(q) for q in excluded_qubits)
    if any(q < 0 or q >= n for q in excluded):
        raise ValueError(f"excluded qubits {sorted(excluded)} outside of range(0, {n})")
    active = [q for q in range(n) if q not in excluded]
    if not active:
        raise ValueError("every qubit is excluded; the family would be empty")
    members = []
    for w in range(1, k + 1):
        for support in combinations(active, w):
            for symbols in product("XYZ", repeat=w):
                chars = ["I"] * n
                for q, s in zip(support, symbols):
                    chars[q] = s
                members.append("".join(chars))
    # I < X < Y < Z holds in ASCII, so plain string order is the canonical one.
    members.sort(key=lambda p: (weight(p), p))
    return PauliFamily(n=n, k=k, members=tuple(members), excluded_qubits=excluded)


# ---------------------------------------------------------------------------
# Expectations. A Pauli string is applied symbol-wise to the amplitudes
# (swap/phase per qubit, O(2^n) total); dense Pauli matrices exist only in
# the tests as an oracle.
# ---------------------------------------------------------------------------


def apply_pauli_batch(states: np.ndarray, pauli: str) -> np.ndarray:
    """P|psi> for every row of a (N, 2^n) block, via per-qubit swap/phase."""
    n = len(pauli)
    out = states.copy()
    for q, s in enumerate(pauli):
        if s == "I":
            continue
        view = out.reshape(out.shape[0], 2**q, 2, -1)
        if s == "Z":
            view[:, :, 1, :] = -view[:, :, 1, :]
            continue
        a = view[:, :, 0, :].copy()
        if s == "X":
            view[:, :, 0, :] = view[:, :, 1, :]
            view[:, :, 1, :] = a
        else:  # Y: |0> -> i|1>, |1> -> -i|0>
            view[:, :, 0, :] = -1j * view[:, :, 1, :]
            view[:, :, 1, :] = 1j * a
    return out.reshape(states.shape)


def expectation(state: np.ndarray, pauli: str) -> float:
    """<psi|P|psi> as a real number (the Hermitian imaginary residue is dropped)."""
    state = np.asarray(state, dtype=complex)
    transformed = apply_pauli_batch(state[None, :], pauli)[0]
    return float(np.vdot(state, transformed).real)


def feature_matrix(states: np.ndarray, family: PauliFamily) -> np.ndarray:
    """Rows = states, columns = family members, entries = Pauli expectations."""
    states = np.asarray(states, dtype=complex)
    if states.ndim == 1:
        states = states[None, :]
    if states.shape[0] == 0:
        return np.zeros((0, len(family)))
    out = np.empty((states.shape[0], len(family)))
    for j, pauli in enumerate(family.members):
        transformed = apply_pauli_batch(states, pauli)
        out[:, j] = np.einsum("ij,ij->i", states.conj(), transformed).real
    return out


# ---------------------------------------------------------------------------
# Basis-compatible measurement grouping.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementGroup:
    """Strings jointly measurable under one local basis setting.

    The basis fixes a symbol in {X, Y, Z} per qubit; qubits untouched by every
    member default to Z.
    """

    members: tuple[str, ...]
    basis: str


def compatible(p: str, q: str) -> bool:
    """True iff on every qubit the symbols agree or at least one is I."""
    if len(p) != len(q):
        raise ValueError("Pauli strings act on different qubit counts")
    return all(a == b or a == "I" or b == "I" for a, b in zip(p, q))


def greedy_group(selected) -> list[MeasurementGroup]:
    """First-fit grouping, heaviest strings first, canonical order within a weight.

    Placement checks the merged per-qubit constraints of each group, which is
    equivalent to pairwise compatibility with every member.
    """
    strings = list(selected)
    if not strings:
        raise ValueError("cannot group an empty Pauli list")
    n = len(strings[0])
    ordered = sorted(strings, key=lambda p: (-weight(p), p))
    groups: list[tuple[list[str], list[str]]] = []  # (members, per-qubit constraint)
    for pauli in ordered:
        placed = False
        for members, constraint in groups:
            ok = all(s == "I" or c == "I" or s == c for s, c in zip(pauli, constraint))
            if ok:
                members.append(pauli)
                for q, s in enumerate(pauli):
                    if s != "I":
                        constraint[q] = s
                placed = True
                break
        if not placed:
            groups.append(([pauli], list(pauli)))
    return [
        MeasurementGroup(
            members=tuple(members),
            basis="".join(c if c != "I" else "Z" for c in constraint),
        )
        for members, constraint in groups
    ]
