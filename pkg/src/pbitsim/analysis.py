"""Steady-state statistics, oracle comparisons and parameter sweeps."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import ConfigurationError
from .networks import NetworkSpec
from .oracle import boltzmann_distribution, euclidean_distance


def artificial_node(bits) -> int:
    """Monitoring word for a group of outputs, first bit most significant
    (three bits A,B,C give 4*A + 2*B + C)."""
    word = 0
    for b in bits:
        b = int(b)
        if b not in (0, 1):
            raise ConfigurationError("bits must be 0 or 1")
        word = (word << 1) | b
    return word


@dataclass
class EmpiricalDistribution:
    """State counts over a labelled group of visible units."""

    labels: list
    counts: np.ndarray
    total: int
    burn_in_discarded: int

    @property
    def n_bits(self) -> int:
        return len(self.labels)

    @property
    def probabilities(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros_like(self.counts, dtype=float)
        return self.counts / self.total

    def prob(self, word: int) -> float:
        return float(self.probabilities[word])

    def bit_string(self, word: int) -> str:
        return format(word, f"0{self.n_bits}b")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state", "label", "count", "probability"])
            probs = self.probabilities
            for word in range(len(self.counts)):
                writer.writerow(
                    [word, self.bit_string(word), int(self.counts[word]), repr(float(probs[word]))]
                )


def histogram(
    trace: dynamics.SimulationTrace,
    visible: dict,
    burn_in: float = 0.0,
) -> EmpiricalDistribution:
    """Aggregate refresh-instant samples into visible-state counts.

    ``visible`` maps labels to global unit ids; the first label is the most
    significant bit of the state word. The leading ``burn_in`` fraction of
    samples is discarded.
    """
    if not 0.0 <= burn_in < 1.0:
        raise ConfigurationError("burn-in fraction must lie in [0, 1)")
    discard = int(len(trace) * burn_in)
    states = trace.states[discard:]
    if states.size == 0:
        raise ConfigurationError("no samples remain after burn-in")
    labels = list(visible)
    words = np.zeros(states.size, dtype=np.int64)
    for label in labels:
        gid = visible[label]
        words = (words << 1) | ((states >> (trace.n - 1 - gid)) & 1)
    counts = np.bincount(words, minlength=1 << len(labels)).astype(np.int64)
    return EmpiricalDistribution(
        labels=labels, counts=counts, total=int(states.size), burn_in_discarded=discard
    )


def mode_report(dist: EmpiricalDistribution, k: int) -> list:
    """Top-k states: descending probability, ties by ascending state word."""
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    probs = dist.probabilities
    order = sorted(range(len(probs)), key=lambda w: (-probs[w], w))
    return [
        {"state": w, "label": dist.bit_string(w), "probability": float(probs[w])}
        for w in order[:k]
        if dist.counts[w] > 0 or k >= len(probs)
    ]


def single_machine_oracle(network: NetworkSpec):
    """Exact distribution for a one-machine network; raises on wired networks."""
    if len(network.machines) != 1 or network.has_wires():
        raise ConfigurationError(
            "the Boltzmann oracle covers single machines without wires only"
        )
    modes = [p.mode for p in network.pbits]
    return boltzmann_distribution(network.machines[0].coupling, modes)


def oracle_distance(
    network: NetworkSpec, seed: int, samples: int, burn_in: float = 0.1
) -> float:
    """Euclidean distance between a run's empirical law and the exact oracle."""
    exact = single_machine_oracle(network)
    trace = dynamics.run(network, seed, max_samples=samples)
    all_units = {f"pbit_{k}": k for k in range(network.n_total)}
    emp = histogram(trace, all_units, burn_in)
    return euclidean_distance(emp.probabilities, exact.probabilities)


def _derived_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def sweep_sampling_time(
    network: NetworkSpec,
    seed: int,
    taus_us,
    samples: int,
    burn_in: float = 0.1,
) -> list:
    """Oracle distance as a function of normalized sampling time.

    Returns one row per tau: {tau_us, tau_ratio, distance} with tau_ratio
    normalized by the smallest retention time.
    """
    single_machine_oracle(network)  # raises early on composite networks
    tau_min = min(p.retention_us for p in network.pbits)
    rows = []
    for idx, tau in enumerate(taus_us):
        net = NetworkSpec(list(network.machines), [p for p in network.pbits],
                          dict(network.visible_labels))
        net.set_tau_sample(int(tau))
        dist = oracle_distance(net, _derived_seed(seed, idx), samples, burn_in)
        rows.append({"tau_us": int(tau), "tau_ratio": tau / tau_min, "distance": dist})
    return rows


def sweep_retention_spread(
    network: NetworkSpec,
    seed: int,
    plans,
    samples: int,
    burn_in: float = 0.1,
) -> list:
    """Oracle distance for each per-unit retention-time assignment."""
    single_machine_oracle(network)
    rows = []
    for idx, plan in enumerate(plans):
        net = NetworkSpec(list(network.machines), [p for p in network.pbits],
                          dict(network.visible_labels))
        net.set_retention(plan)
        tau_sample = max(m.tau_sample_us for m in net.machines)
        tau_min = min(p.retention_us for p in net.pbits)
        if tau_sample > tau_min:
            raise ConfigurationError(
                f"sampling period {tau_sample} exceeds smallest retention {tau_min}"
            )
        dist = oracle_distance(net, _derived_seed(seed, idx), samples, burn_in)
        rows.append({"plan": list(int(x) for x in (plan if not np.isscalar(plan) else [plan] * net.n_total)),
                     "tau_ratio": tau_sample / tau_min, "distance": dist})
    return rows


def distance_rows_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau_ratio", "distance"])
        for row in rows:
            writer.writerow([repr(float(row["tau_ratio"])), repr(float(row["distance"]))])
