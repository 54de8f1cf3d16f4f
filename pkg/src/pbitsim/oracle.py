"""Exact reference results for a single symmetric machine.

States are indexed big-endian by unit order: state index s encodes unit k as
bit (s >> (n-1-k)) & 1, so for three units labelled A,B,C the index equals
the monitoring word 4*A + 2*B + C.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import CLAMPED_HIGH, CLAMPED_LOW, FREE, CouplingMatrix, Wired
from .errors import CapacityError, ConfigurationError

ENUMERATION_LIMIT = 24


def state_bits(index: int, n: int) -> tuple:
    """Decode a big-endian state index into a tuple of 0/1 levels."""
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def state_index(bits) -> int:
    """Encode a sequence of 0/1 levels into its big-endian state index."""
    word = 0
    for b in bits:
        word = (word << 1) | int(b)
    return word


def _bipolar_table(n: int) -> np.ndarray:
    """All 2**n states as rows of -1/+1 spins, in index order."""
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 2.0 * bits - 1.0


def energy(coupling: CouplingMatrix, state) -> float:
    """Energy -i0 * (1/2 sum_ij J_ij m_i m_j + sum_i h_i m_i).

    ``state`` is a bipolar vector; the 1/2 compensates the symmetric double
    count in the ordered double sum.
    """
    m = np.asarray(state, dtype=float)
    if m.shape != (coupling.n,):
        raise ConfigurationError(f"state must have length {coupling.n}")
    if not np.all(np.abs(m) == 1.0):
        raise ConfigurationError("state entries must be -1 or +1")
    return float(-coupling.i0 * (0.5 * m @ coupling.j @ m + coupling.h @ m))


def all_energies(coupling: CouplingMatrix) -> np.ndarray:
    """Energies of every state, indexed big-endian. Guarded by the 2**24 cap."""
    n = coupling.n
    if n > ENUMERATION_LIMIT:
        raise CapacityError(f"enumeration limited to {ENUMERATION_LIMIT} units, got {n}")
    m = _bipolar_table(n)
    pair = 0.5 * np.einsum("si,ij,sj->s", m, coupling.j, m)
    return -coupling.i0 * (pair + m @ coupling.h)


@dataclass
class ExactDistribution:
    """Boltzmann probabilities over all 2**n states of one machine."""

    n: int
    probabilities: np.ndarray

    def prob(self, bits) -> float:
        return float(self.probabilities[state_index(bits)])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state_bits", "probability"])
            for idx, p in enumerate(self.probabilities):
                bits = "".join(str(b) for b in state_bits(idx, self.n))
                writer.writerow([bits, repr(float(p))])


def boltzmann_distribution(coupling: CouplingMatrix, modes=None) -> ExactDistribution:
    """Exact steady-state law P(state) ~ exp(-E(state)).

    Clamped units are treated as ideal: states disagreeing with a rail get
    probability exactly 0 and the rest renormalize, which equals conditioning
    the unclamped law on the clamped bits. Wired modes have no single-machine
    oracle and are rejected.
    """
    n = coupling.n
    energies = all_energies(coupling)
    mask = np.ones(1 << n, dtype=bool)
    if modes is not None:
        if len(modes) != n:
            raise ConfigurationError(f"expected {n} modes")
        idx = np.arange(1 << n, dtype=np.int64)
        for k, mode in enumerate(modes):
            if mode == FREE:
                continue
            if isinstance(mode, Wired):
                raise ConfigurationError(
                    "wired units have no single-machine Boltzmann oracle"
                )
            bit = (idx >> (n - 1 - k)) & 1
            if mode == CLAMPED_HIGH:
                mask &= bit == 1
            elif mode == CLAMPED_LOW:
                mask &= bit == 0
            else:
                raise ConfigurationError(f"unknown terminal mode {mode!r}")
    # max-shift before exponentiation keeps the enumeration overflow-free
    shifted = -(energies - energies[mask].min())
    weights = np.where(mask, np.exp(shifted), 0.0)
    return ExactDistribution(n, weights / weights.sum())


def euclidean_distance(p, q) -> float:
    """sqrt(sum_s (p_s - q_s)^2) over a shared state space."""
    pv = p.probabilities if isinstance(p, ExactDistribution) else np.asarray(p, dtype=float)
    qv = q.probabilities if isinstance(q, ExactDistribution) else np.asarray(q, dtype=float)
    if pv.shape != qv.shape:
        raise ConfigurationError(f"support mismatch: {pv.shape} vs {qv.shape}")
    return float(np.sqrt(np.sum((pv - qv) ** 2)))
