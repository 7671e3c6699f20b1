"""Exact density-matrix reference for small swapped chains.

Everything in this module is deliberately literal: build the full multi-qubit
state of a chain of noisy entangled pairs, perform the middle-station pair
measurements as explicit projections, apply the conditional Pauli corrections,
and read the final two-qubit state back off as a distribution over the four
maximally entangled states. It exists to certify the fast distribution-level
algebra, so it shares no code path with it. Capped at 8 qubits (4 links).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .bell import SYMBOLS, BellDiagonal, BellSymbol

# State-validity and agreement tolerance for everything density-matrix shaped.
DM_TOL = 1e-10

MAX_LINKS = 4

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def bell_state_vector(symbol: BellSymbol) -> np.ndarray:
    """Statevector of the maximally entangled state labelled by ``symbol``.

    Convention: amplitude 1/sqrt(2) on |0, bt> and (-1)**ph / sqrt(2) on
    |1, 1-bt>, with the first tensor factor as the left qubit. Basis order is
    |00>, |01>, |10>, |11>.
    """
    vec = np.zeros(4, dtype=complex)
    amp = 1.0 / math.sqrt(2.0)
    vec[symbol.bt] = amp
    vec[2 + (1 - symbol.bt)] = amp * (-1.0) ** symbol.ph
    return vec


def bell_diagonal_dm(dist: BellDiagonal) -> np.ndarray:
    """Two-qubit density matrix diagonal in the entangled basis with weights ``dist``."""
    rho = np.zeros((4, 4), dtype=complex)
    for symbol in SYMBOLS:
        vec = bell_state_vector(symbol)
        rho += dist.prob(symbol) * np.outer(vec, vec.conj())
    return rho


def validate_density_matrix(rho: np.ndarray, tol: float = DM_TOL) -> int:
    """Check Hermiticity, unit trace, and positivity; return the qubit count.

    Raises ValueError when any check fails or the dimension is not a power of
    two between 2 and 2**8.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    dim = rho.shape[0]
    n_qubits = dim.bit_length() - 1
    if dim != 2**n_qubits or not (1 <= n_qubits <= 8):
        raise ValueError(f"dimension {dim} is not 2**k for k in 1..8")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > tol:
        raise ValueError(f"trace must be 1 within tolerance, got {trace}")
    eigenvalues = np.linalg.eigvalsh(rho)
    if float(eigenvalues.min()) < -tol:
        raise ValueError(f"matrix has negative eigenvalue {eigenvalues.min()}")
    return n_qubits


@dataclass(frozen=True)
class SwapOutcome:
    """One measurement branch of a station's pair measurement.

    ``post_state`` lives on the remaining qubits, in their original order.
    ``degenerate`` marks branches of probability ~0, whose post state is set
    to the maximally mixed one purely as a placeholder.
    """

    outcome: BellSymbol
    probability: float
    post_state: np.ndarray
    degenerate: bool = False


def _as_tensor(rho: np.ndarray, n_qubits: int) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape((2,) * (2 * n_qubits))


def _project_pair(tensor: np.ndarray, n_qubits: int, pair: tuple[int, int], vec4: np.ndarray) -> np.ndarray:
    """<v| rho |v> on qubit pair ``pair``: an operator on the remaining qubits."""
    i, j = pair
    letters = _LETTERS[: 2 * n_qubits]
    kept = "".join(l for k, l in enumerate(letters) if k not in (i, j, n_qubits + i, n_qubits + j))
    spec = f"{letters},{letters[i]}{letters[j]},{letters[n_qubits + i]}{letters[n_qubits + j]}->{kept}"
    vec = vec4.reshape(2, 2)
    return np.einsum(spec, tensor, vec.conj(), vec)


def bell_swap(rho: np.ndarray, pair: tuple[int, int]) -> tuple[SwapOutcome, ...]:
    """Measure qubit pair ``pair`` in the entangled basis.

    Returns all four branches. Probabilities sum to 1; each post state is the
    normalized reduced state on the remaining qubits.
    """
    n_qubits = validate_density_matrix(rho)
    i, j = pair
    if not (0 <= i < n_qubits and 0 <= j < n_qubits) or i == j:
        raise ValueError(f"invalid qubit pair {pair} for {n_qubits} qubits")
    if n_qubits < 3:
        raise ValueError("pair measurement needs at least one unmeasured qubit")
    tensor = _as_tensor(rho, n_qubits)
    remaining_dim = 2 ** (n_qubits - 2)
    outcomes = []
    for symbol in SYMBOLS:
        reduced = _project_pair(tensor, n_qubits, pair, bell_state_vector(symbol))
        reduced = reduced.reshape(remaining_dim, remaining_dim)
        probability = float(np.trace(reduced).real)
        if probability < 1e-15:
            placeholder = np.eye(remaining_dim, dtype=complex) / remaining_dim
            outcomes.append(SwapOutcome(symbol, 0.0, placeholder, degenerate=True))
        else:
            outcomes.append(SwapOutcome(symbol, probability, reduced / probability))
    total = sum(o.probability for o in outcomes)
    if abs(total - 1.0) > DM_TOL:
        raise ValueError(f"branch probabilities sum to {total}, expected 1")
    return tuple(outcomes)


def pauli_correct(rho: np.ndarray, outcome: BellSymbol, target: int) -> np.ndarray:
    """Apply the conditional correction X**bt then Z**ph to qubit ``target``.

    Defined so that a state labelled s + outcome is mapped back to the state
    labelled s when the correction acts on either qubit of the pair.
    """
    n_qubits = validate_density_matrix(rho)
    if not (0 <= target < n_qubits):
        raise ValueError(f"target qubit {target} out of range for {n_qubits} qubits")
    gate = np.eye(2, dtype=complex)
    if outcome.bt:
        gate = _X @ gate
    if outcome.ph:
        gate = _Z @ gate
    tensor = _as_tensor(rho, n_qubits)
    letters = _LETTERS[: 2 * n_qubits]
    ket, bra = "Y", "Z"
    out_letters = list(letters)
    out_letters[target] = ket
    out_letters[n_qubits + target] = bra
    spec = f"{ket}{letters[target]},{letters},{bra}{letters[n_qubits + target]}->{''.join(out_letters)}"
    corrected = np.einsum(spec, gate, tensor, gate.conj())
    dim = 2**n_qubits
    return corrected.reshape(dim, dim)


def dm_to_bell_diagonal(rho: np.ndarray, tol: float = DM_TOL) -> BellDiagonal:
    """Decompose a two-qubit state in the entangled basis.

    Raises ValueError when any cross term exceeds ``tol`` in magnitude, i.e.
    when the state is not diagonal in that basis.
    """
    if validate_density_matrix(rho) != 2:
        raise ValueError("expected a two-qubit state")
    vecs = [bell_state_vector(s) for s in SYMBOLS]
    weights = []
    for a in range(4):
        for b in range(4):
            coeff = complex(vecs[a].conj() @ np.asarray(rho, dtype=complex) @ vecs[b])
            if a == b:
                weights.append(coeff.real)
            elif abs(coeff) > tol:
                raise ValueError(f"state is not diagonal in the entangled basis: cross term {abs(coeff)}")
    clipped = [max(0.0, w) for w in weights]
    total = sum(clipped)
    if abs(total - 1.0) > tol:
        raise ValueError(f"diagonal weights sum to {total}, expected 1")
    return BellDiagonal(tuple(w / total for w in clipped))


def simulate_chain_exact(
    links: Sequence[BellDiagonal],
    order: Sequence[int] | None = None,
) -> BellDiagonal:
    """End-to-end distribution of a swapped chain, by brute force.

    ``links[i]`` is the state of pair i; station r (1-based) holds the right
    qubit of pair r-1 and the left qubit of pair r, measures them in the
    entangled basis, and the announced outcome is corrected on the leftmost
    qubit. Branches are averaged with their Born weights. ``order`` optionally
    permutes the station schedule (default: left to right).
    """
    n_links = len(links)
    if not (1 <= n_links <= MAX_LINKS):
        raise ValueError(f"link count must be in 1..{MAX_LINKS}, got {n_links}")
    stations = list(range(1, n_links))
    if order is not None:
        if sorted(order) != stations:
            raise ValueError(f"order must permute stations {stations}, got {list(order)}")
        stations = list(order)
    rho = reduce(np.kron, [bell_diagonal_dm(d) for d in links])
    labels = list(range(2 * n_links))
    for station in stations:
        i = labels.index(2 * station - 1)
        j = labels.index(2 * station)
        n_qubits = len(labels)
        averaged = np.zeros((2 ** (n_qubits - 2),) * 2, dtype=complex)
        for branch in bell_swap(rho, (i, j)):
            if branch.degenerate:
                continue
            # Leftmost qubit keeps position 0 after any pair removal.
            corrected = pauli_correct(branch.post_state, branch.outcome, 0)
            averaged += branch.probability * corrected
        rho = averaged
        del labels[max(i, j)]
        del labels[min(i, j)]
    return dm_to_bell_diagonal(rho)
