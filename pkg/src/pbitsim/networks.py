"""Gate Hamiltonians, their verification and synthesis, and system builders.

No coupling matrix in this package is hand-invented: every shipped gate is
either found by exhaustive search over a small coefficient grid, solved for
by a linear program that maximizes the energy gap above the truth-table
ground manifold, or composed by summing already-verified sub-gate
Hamiltonians over shared spins. Every route ends in the same exhaustive
ground-state check.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    FREE,
    CouplingMatrix,
    PBitConfig,
    QuantizationConfig,
    Wired,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    SynthesisError,
    VerificationError,
)
from .oracle import all_energies, state_bits

DEGENERACY_TOL = 1e-9


# ---------------------------------------------------------------------------
# Gate specifications


@dataclass
class GateSpec:
    """One gate Hamiltonian plus the Boolean contract it must realize.

    ``visible`` maps terminal labels to spin indices; ``truth_table`` rows
    are 0/1 tuples in the order the labels appear in ``visible``. The
    ``verified`` flag may only be set by :func:`verify_ground_states`.
    """

    name: str
    visible: dict
    inputs: list
    outputs: list
    auxiliary: list
    truth_table: list
    j: np.ndarray
    h: np.ndarray
    verified: bool = False

    def __post_init__(self):
        self.j = np.asarray(self.j, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        self.truth_table = [tuple(int(b) for b in row) for row in self.truth_table]
        labels = list(self.visible)
        if len(set(self.truth_table)) != len(self.truth_table):
            raise ConfigurationError("truth table rows must be distinct")
        for row in self.truth_table:
            if len(row) != len(labels):
                raise ConfigurationError("truth table width must match visible labels")
        spins = sorted(list(self.visible.values()) + list(self.auxiliary))
        if spins != list(range(self.n)):
            raise ConfigurationError("visible + auxiliary must cover all spins exactly once")

    @property
    def n(self) -> int:
        return self.j.shape[0]

    def coupling(self, i0: float) -> CouplingMatrix:
        return CouplingMatrix(self.j.copy(), self.h.copy(), i0)

    def visible_indices(self) -> list:
        return [self.visible[label] for label in self.visible]


def gate_to_json(gate: GateSpec) -> dict:
    return {
        "name": gate.name,
        "n": gate.n,
        "visible": dict(gate.visible),
        "inputs": list(gate.inputs),
        "outputs": list(gate.outputs),
        "auxiliary": list(gate.auxiliary),
        "truth_table": [list(row) for row in gate.truth_table],
        "j": gate.j.tolist(),
        "h": gate.h.tolist(),
        "verified": bool(gate.verified),
    }


def gate_from_json(doc: dict) -> GateSpec:
    return GateSpec(
        name=doc["name"],
        visible={str(k): int(v) for k, v in doc["visible"].items()},
        inputs=[str(s) for s in doc["inputs"]],
        outputs=[str(s) for s in doc["outputs"]],
        auxiliary=[int(i) for i in doc["auxiliary"]],
        truth_table=[tuple(row) for row in doc["truth_table"]],
        j=np.array(doc["j"], dtype=float),
        h=np.array(doc["h"], dtype=float),
        verified=bool(doc.get("verified", False)),
    )


def save_gate(gate: GateSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(gate_to_json(gate), fh, indent=1)
        fh.write("\n")


def load_gate_file(path) -> GateSpec:
    with open(path) as fh:
        return gate_from_json(json.load(fh))


def load_gate(name: str) -> GateSpec:
    """Load a shipped gate from the package's data directory."""
    from importlib import resources

    ref = resources.files("pbitsim").joinpath("gates", f"{name}.json")
    return gate_from_json(json.loads(ref.read_text()))


SHIPPED_GATES = ("and", "or", "not", "copy", "xor", "half_adder", "full_adder")


# ---------------------------------------------------------------------------
# Ground-state verification


def _visible_words(n: int, visible_indices) -> np.ndarray:
    """Big-endian word formed by the visible bits of every state index."""
    idx = np.arange(1 << n, dtype=np.int64)
    word = np.zeros(1 << n, dtype=np.int64)
    for k in visible_indices:
        word = (word << 1) | ((idx >> (n - 1 - k)) & 1)
    return word


def _truth_words(gate: GateSpec) -> set:
    words = set()
    for row in gate.truth_table:
        w = 0
        for b in row:
            w = (w << 1) | b
        words.add(w)
    return words


def ground_state_report(gate: GateSpec, i0_check: float = 1.0) -> dict:
    """Enumerate all states and compare ground projections to the truth table.

    Returns a report dict with ``ok``, the energy ``gap`` above the ground
    manifold, and any ``spurious``/``missing`` visible words.
    """
    if i0_check <= 0:
        raise ConfigurationError("i0_check must be positive")
    if gate.n > 24:
        raise CapacityError(f"gate too large to enumerate ({gate.n} spins)")
    energies = all_energies(gate.coupling(i0_check))
    emin = energies.min()
    ground = energies <= emin + DEGENERACY_TOL
    above = energies[~ground]
    gap = float(above.min() - emin) / i0_check if above.size else math.inf
    words = _visible_words(gate.n, gate.visible_indices())
    truth = _truth_words(gate)
    ground_words = set(int(w) for w in words[ground])
    spurious = sorted(ground_words - truth)
    missing = sorted(truth - ground_words)
    spurious_states = [
        state_bits(int(s), gate.n)
        for s in np.nonzero(ground)[0]
        if int(words[s]) in set(spurious)
    ]
    return {
        "ok": not spurious and not missing,
        "gap": gap,
        "ground_energy": float(emin),
        "ground_count": int(ground.sum()),
        "spurious": spurious,
        "missing": missing,
        "spurious_states": spurious_states,
    }


def verify_ground_states(gate: GateSpec, i0_check: float = 1.0) -> GateSpec:
    """Return a VERIFIED copy of ``gate`` or raise with the offending states.

    Passes iff the visible projections of the minimum-energy states equal
    the truth table exactly and the ground manifold is degenerate within
    1e-9 (everything else strictly above it).
    """
    report = ground_state_report(gate, i0_check)
    if not report["ok"]:
        raise VerificationError(
            f"gate {gate.name!r} failed ground-state check: "
            f"spurious visible words {report['spurious']}, "
            f"missing {report['missing']}",
            offending_states=report["spurious_states"],
        )
    return replace(gate, verified=True)


# ---------------------------------------------------------------------------
# Synthesis


def _pair_indices(n: int) -> list:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _feature_matrix(n: int) -> np.ndarray:
    """Phi with E(state) = -(Phi @ theta), theta = (J upper triangle, h)."""
    from .oracle import _bipolar_table

    m = _bipolar_table(n)
    pairs = _pair_indices(n)
    cols = [m[:, i] * m[:, j] for i, j in pairs] + [m[:, i] for i in range(n)]
    return np.stack(cols, axis=1)


def _theta_to_jh(theta, n: int):
    pairs = _pair_indices(n)
    j = np.zeros((n, n))
    for k, (a, b) in enumerate(pairs):
        j[a, b] = j[b, a] = theta[k]
    h = np.array(theta[len(pairs):], dtype=float)
    return j, h


def _make_gate(name, truth_table, n_aux, j, h, inputs=None, outputs=None, labels=None):
    n_vis = len(truth_table[0])
    if labels is None:
        labels = [f"V{k}" for k in range(n_vis)]
    visible = {lab: k for k, lab in enumerate(labels)}
    return GateSpec(
        name=name,
        visible=visible,
        inputs=list(inputs or labels[:-1]),
        outputs=list(outputs or labels[-1:]),
        auxiliary=list(range(n_vis, n_vis + n_aux)),
        truth_table=[tuple(r) for r in truth_table],
        j=j,
        h=h,
    )


def synthesize_gate(
    truth_table,
    n_aux: int = 0,
    search_bound: int = 1,
    name: str = "gate",
    labels=None,
    inputs=None,
    outputs=None,
    max_candidates: int = 20_000_000,
) -> GateSpec:
    """Exhaustive search for the lexicographically smallest passing J, h.

    Coefficients range over half-integers in [-search_bound, +search_bound].
    Intended for small gates (the grid grows as 9**params); raises
    SynthesisError when the grid is exhausted or over budget.
    """
    truth_table = [tuple(int(b) for b in r) for r in truth_table]
    n_vis = len(truth_table[0])
    n = n_vis + n_aux
    if n > 6:
        raise CapacityError("exhaustive synthesis limited to 6 total spins")
    n_params = len(_pair_indices(n)) + n
    values = np.arange(-2 * search_bound, 2 * search_bound + 1) / 2.0
    total = len(values) ** n_params
    if total > max_candidates:
        raise SynthesisError(
            f"grid of {total} candidates exceeds budget {max_candidates}"
        )

    phi = _feature_matrix(n)
    words = _visible_words(n, list(range(n_vis)))
    truth_words = sorted({int("".join(map(str, r)), 2) for r in truth_table})
    in_truth = np.isin(words, truth_words)
    row_masks = [words == w for w in truth_words]

    chunk = 16384
    grid = itertools.product(values, repeat=n_params)
    while True:
        block = list(itertools.islice(grid, chunk))
        if not block:
            raise SynthesisError("search exhausted without a verified gate")
        theta = np.array(block)
        energies = -(theta @ phi.T)
        emin = energies.min(axis=1, keepdims=True)
        ground = energies <= emin + DEGENERACY_TOL
        ok = ~(ground & ~in_truth[None, :]).any(axis=1)
        for mask in row_masks:
            ok &= (ground & mask[None, :]).any(axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            j, h = _theta_to_jh(theta[hits[0]], n)
            gate = _make_gate(name, truth_table, n_aux, j, h, inputs, outputs, labels)
            return verify_ground_states(gate)


def _round_to_grid(x: np.ndarray, step: float = 0.25) -> np.ndarray:
    return np.round(np.asarray(x) / step) * step


def synthesize_gate_lp(
    truth_table,
    n_aux: int = 0,
    bound: float = 2.0,
    name: str = "gate",
    labels=None,
    inputs=None,
    outputs=None,
    aux_assignments=None,
    min_gap: float = 0.25,
) -> GateSpec:
    """Gap-maximizing linear-program synthesis.

    For a fixed assignment of auxiliary bits to each truth row, requiring
    the assigned states to share energy e0 and every other state to sit at
    least ``g`` above it is linear in (J, h, e0, g); we maximize g subject
    to coefficient bounds. ``aux_assignments`` optionally lists candidate
    assignments (one aux word per truth row); otherwise all are tried in
    lexicographic order. Solutions are snapped to a quarter-integer grid
    when the snapped gate still verifies.
    """
    from scipy.optimize import linprog

    truth_table = [tuple(int(b) for b in r) for r in truth_table]
    n_vis = len(truth_table[0])
    n = n_vis + n_aux
    if n > 16:
        raise CapacityError("LP synthesis limited to 16 total spins")
    n_rows = len(truth_table)
    phi = _feature_matrix(n)
    n_params = phi.shape[1]

    if aux_assignments is None:
        aux_assignments = itertools.product(range(1 << n_aux), repeat=n_rows)

    def state_of(row, aux_word):
        bits = list(row) + [(aux_word >> (n_aux - 1 - k)) & 1 for k in range(n_aux)]
        return int("".join(map(str, bits)), 2)

    n_states = 1 << n
    best = None
    for assignment in aux_assignments:
        chosen = [state_of(row, aw) for row, aw in zip(truth_table, assignment)]
        others = np.setdiff1d(np.arange(n_states), np.array(chosen))
        # variables: theta (n_params), e0, g; maximize g
        c = np.zeros(n_params + 2)
        c[-1] = -1.0
        a_eq = np.zeros((n_rows, n_params + 2))
        a_eq[:, :n_params] = phi[chosen]
        a_eq[:, n_params] = 1.0
        b_eq = np.zeros(n_rows)
        a_ub = np.zeros((others.size, n_params + 2))
        a_ub[:, :n_params] = phi[others]
        a_ub[:, n_params] = 1.0
        a_ub[:, n_params + 1] = 1.0
        b_ub = np.zeros(others.size)
        bounds = [(-bound, bound)] * n_params + [(None, None), (0.0, 4.0 * bound)]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status == 0 and res.x[-1] >= min_gap:
            best = res.x
            break
    if best is None:
        raise SynthesisError("no feasible coupling matrix at the given bound")

    j, h = _theta_to_jh(best[:n_params], n)
    gate = _make_gate(name, truth_table, n_aux, j, h, inputs, outputs, labels)
    snapped = _make_gate(
        name, truth_table, n_aux, _round_to_grid(j), _round_to_grid(h), inputs, outputs, labels
    )
    try:
        verified = verify_ground_states(snapped)
        if ground_state_report(verified)["gap"] >= min_gap:
            return verified
    except VerificationError:
        pass
    return verify_ground_states(gate)


# ---------------------------------------------------------------------------
# Composition of verified sub-gates


class GateCircuit:
    """Sums verified sub-gate Hamiltonians over shared, named spins.

    The composite ground manifold is exactly the set of states where every
    placed gate sits in its own ground manifold, which makes composition a
    sound construction as long as the whole is re-verified afterwards.
    """

    def __init__(self, name: str):
        self.name = name
        self._labels = []
        self._index = {}
        self._j_terms = {}
        self._h_terms = {}
        self._placements = 0

    def spin(self, label: str) -> int:
        if label not in self._index:
            self._index[label] = len(self._labels)
            self._labels.append(label)
        return self._index[label]

    def place(self, gate: GateSpec, mapping: dict) -> None:
        """Add one gate instance, wiring its visible labels per ``mapping``."""
        if not gate.verified:
            raise ConfigurationError(f"gate {gate.name!r} is not verified")
        if set(mapping) != set(gate.visible):
            raise ConfigurationError(
                f"mapping must name exactly the visible labels of {gate.name!r}"
            )
        self._placements += 1
        local_to_global = {}
        for label, idx in gate.visible.items():
            local_to_global[idx] = self.spin(mapping[label])
        for k, idx in enumerate(gate.auxiliary):
            local_to_global[idx] = self.spin(f"_{gate.name}{self._placements}.aux{k}")
        for a in range(gate.n):
            ga = local_to_global[a]
            self._h_terms[ga] = self._h_terms.get(ga, 0.0) + gate.h[a]
            for b in range(a + 1, gate.n):
                gb = local_to_global[b]
                key = (min(ga, gb), max(ga, gb))
                self._j_terms[key] = self._j_terms.get(key, 0.0) + gate.j[a, b]

    def to_gate(self, name, visible_labels, inputs, outputs, truth_table) -> GateSpec:
        """Finalize into a GateSpec (call verify_ground_states afterwards)."""
        n = len(self._labels)
        j = np.zeros((n, n))
        h = np.zeros(n)
        for (a, b), val in self._j_terms.items():
            j[a, b] = j[b, a] = val
        for a, val in self._h_terms.items():
            h[a] = val
        visible = {lab: self._index[lab] for lab in visible_labels}
        auxiliary = [i for i in range(n) if i not in set(visible.values())]
        return GateSpec(
            name=name,
            visible=visible,
            inputs=list(inputs),
            outputs=list(outputs),
            auxiliary=auxiliary,
            truth_table=[tuple(r) for r in truth_table],
            j=j,
            h=h,
        )


def fold_constant(gate: GateSpec, label: str, bit: int) -> GateSpec:
    """Absorb a terminal held at a constant rail into the biases.

    Removing spin k pinned at m = 2*bit - 1 adds J_ik * m to every h_i; the
    folded gate's truth table is the original conditioned on that terminal.
    Hardware analogue: driving a terminal from a rail instead of spending a
    unit on it.
    """
    if label not in gate.visible:
        raise ConfigurationError(f"{label!r} is not a visible terminal of {gate.name!r}")
    k = gate.visible[label]
    m = 2 * int(bit) - 1
    keep = [i for i in range(gate.n) if i != k]
    j = gate.j[np.ix_(keep, keep)]
    h = gate.h[keep] + gate.j[keep, k] * m
    old_labels = list(gate.visible)
    col = old_labels.index(label)
    rows = [
        tuple(b for c, b in enumerate(row) if c != col)
        for row in gate.truth_table
        if row[col] == int(bit)
    ]
    remap = {old: new for new, old in enumerate(keep)}
    visible = {lab: remap[gate.visible[lab]] for lab in old_labels if lab != label}
    folded = GateSpec(
        name=f"{gate.name}_{label.lower()}{bit}",
        visible=visible,
        inputs=[s for s in gate.inputs if s != label],
        outputs=[s for s in gate.outputs if s != label],
        auxiliary=[remap[i] for i in gate.auxiliary],
        truth_table=rows,
        j=j,
        h=h,
    )
    return verify_ground_states(folded)


# ---------------------------------------------------------------------------
# Machines and networks

DEFAULT_RETENTION_US = 200_000
DEFAULT_TAU_SAMPLE_US = 1_000
DEFAULT_JITTER = 0.005


@dataclass
class MachineSpec:
    """One Boltzmann machine: couplings, refresh period and local labels."""

    name: str
    coupling: CouplingMatrix
    tau_sample_us: int = DEFAULT_TAU_SAMPLE_US
    quant: QuantizationConfig = field(default_factory=QuantizationConfig)
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tau_sample_us <= 0:
            raise ConfigurationError("sampling period must be positive")

    @property
    def n(self) -> int:
        return self.coupling.n


@dataclass
class NetworkSpec:
    """Machines plus directed inter-machine wires and global visible labels.

    Units are numbered globally in machine order; a wire is represented by
    the destination unit carrying a Wired mode that names its source. Wires
    must cross machine boundaries and no two machines may be wired in both
    directions.
    """

    machines: list
    pbits: list
    visible_labels: dict = field(default_factory=dict)

    @property
    def n_total(self) -> int:
        return len(self.pbits)

    def offsets(self) -> list:
        out, acc = [], 0
        for mach in self.machines:
            out.append(acc)
            acc += mach.n
        return out

    def machine_of(self, gid: int) -> int:
        acc = 0
        for k, mach in enumerate(self.machines):
            if gid < acc + mach.n:
                return k
            acc += mach.n
        raise ConfigurationError(f"unit id {gid} out of range")

    def has_wires(self) -> bool:
        return any(isinstance(p.mode, Wired) for p in self.pbits)

    def validate(self) -> None:
        if sum(m.n for m in self.machines) != len(self.pbits):
            raise ConfigurationError("unit roster does not match machine sizes")
        for gid, p in enumerate(self.pbits):
            if p.id != gid:
                raise ConfigurationError("unit ids must be consecutive from 0")
        pair_dirs = set()
        for gid, p in enumerate(self.pbits):
            if isinstance(p.mode, Wired):
                src = p.mode.source
                if not 0 <= src < self.n_total:
                    raise ConfigurationError(f"wire source {src} does not exist")
                m_src, m_dst = self.machine_of(src), self.machine_of(gid)
                if m_src == m_dst:
                    raise ConfigurationError(
                        "wires must connect units in different machines"
                    )
                if (m_dst, m_src) in pair_dirs:
                    raise ConfigurationError(
                        f"machines {m_src} and {m_dst} are wired in both directions"
                    )
                pair_dirs.add((m_src, m_dst))
        for label, gid in self.visible_labels.items():
            if not 0 <= gid < self.n_total:
                raise ConfigurationError(f"label {label!r} points at missing unit {gid}")

    # -- scenario helpers ---------------------------------------------------

    def with_clamps(self, clamp_plan: dict) -> "NetworkSpec":
        """Copy of the network with labelled units pinned to rails."""
        from .core import CLAMPED_HIGH, CLAMPED_LOW

        pbits = [replace(p) for p in self.pbits]
        for label, bit in clamp_plan.items():
            if label not in self.visible_labels:
                raise ConfigurationError(f"unknown visible label {label!r}")
            gid = self.visible_labels[label]
            pbits[gid] = replace(
                pbits[gid], mode=CLAMPED_HIGH if int(bit) else CLAMPED_LOW
            )
        return NetworkSpec(self.machines, pbits, dict(self.visible_labels))

    def set_retention(self, plan) -> None:
        """Assign retention times: a scalar or one integer per unit (us)."""
        if np.isscalar(plan):
            plan = [int(plan)] * self.n_total
        if len(plan) != self.n_total:
            raise ConfigurationError(
                f"retention plan must list {self.n_total} durations"
            )
        for gid, tau in enumerate(plan):
            self.pbits[gid] = replace(self.pbits[gid], retention_us=int(tau))

    def set_jitter(self, fraction: float) -> None:
        for gid in range(self.n_total):
            self.pbits[gid] = replace(self.pbits[gid], jitter_fraction=float(fraction))

    def set_phases(self, phases) -> None:
        if np.isscalar(phases):
            phases = [int(phases)] * self.n_total
        for gid, ph in enumerate(phases):
            self.pbits[gid] = replace(self.pbits[gid], phase_us=int(ph))

    def set_tau_sample(self, tau_us: int) -> None:
        for k, mach in enumerate(self.machines):
            self.machines[k] = replace(mach, tau_sample_us=int(tau_us))

    def set_quantization(self, quant: QuantizationConfig) -> None:
        for k, mach in enumerate(self.machines):
            self.machines[k] = replace(mach, quant=quant)


def single_machine_network(
    gate: GateSpec,
    i0: float,
    tau_sample_us: int = DEFAULT_TAU_SAMPLE_US,
    retention_us: int = DEFAULT_RETENTION_US,
    jitter: float = DEFAULT_JITTER,
    quant: QuantizationConfig = QuantizationConfig(),
    name: str = None,
) -> NetworkSpec:
    """Wrap one verified gate as a standalone network."""
    if not gate.verified:
        raise VerificationError(f"gate {gate.name!r} must be verified before use")
    mach = MachineSpec(
        name=name or gate.name,
        coupling=gate.coupling(i0),
        tau_sample_us=tau_sample_us,
        quant=quant,
        labels=dict(gate.visible),
    )
    pbits = [
        PBitConfig(id=k, retention_us=retention_us, jitter_fraction=jitter)
        for k in range(gate.n)
    ]
    net = NetworkSpec([mach], pbits, dict(gate.visible))
    net.validate()
    return net


def build_and_machine(i0: float, **kwargs) -> NetworkSpec:
    """The 3-unit AND machine (terminals A, B, C = A AND B)."""
    return single_machine_network(verify_ground_states(load_gate("and")), i0, **kwargs)


def build_full_adder(i0: float, tau_sample_us: int = 10_000, **kwargs) -> NetworkSpec:
    """The 14-unit full adder (terminals A, B, CIN, S, COUT; 9 auxiliary)."""
    gate = verify_ground_states(load_gate("full_adder"))
    if gate.n != 14:
        raise ConfigurationError(f"full adder must have 14 units, found {gate.n}")
    return single_machine_network(gate, i0, tau_sample_us=tau_sample_us, **kwargs)


def _stack_machines(parts):
    """Build a NetworkSpec from (name, gate, i0, tau_sample, quant) parts.

    Returns the network plus a {(machine, local label): global id} map.
    """
    machines, pbits, where = [], [], {}
    offset = 0
    for name, gate, i0, tau_sample_us, quant in parts:
        machines.append(
            MachineSpec(
                name=name,
                coupling=gate.coupling(i0),
                tau_sample_us=tau_sample_us,
                quant=quant,
                labels=dict(gate.visible),
            )
        )
        for local in range(gate.n):
            pbits.append(PBitConfig(id=offset + local, retention_us=DEFAULT_RETENTION_US,
                                    jitter_fraction=DEFAULT_JITTER))
        for label, local in gate.visible.items():
            where[(name, label)] = offset + local
        offset += gate.n
    return machines, pbits, where


def normal_retention_plan(
    n: int,
    seed: int,
    mean_us: int = 200_000,
    lo_us: int = 137_000,
    hi_us: int = 263_000,
    sigma_us: int = 42_000,
) -> list:
    """Per-unit retention times: clipped normal spread, deterministic in seed."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7e7e]))
    draws = rng.normal(mean_us, sigma_us, size=n)
    return [int(x) for x in np.clip(draws, lo_us, hi_us)]


def build_rca4(
    i0: float,
    retention_plan=None,
    tau_sample_us: int = 10_000,
    quant: QuantizationConfig = QuantizationConfig(),
) -> NetworkSpec:
    """4-bit ripple-carry adder: a 6-unit half adder plus three 14-unit full
    adders, chained by directed carry wires. 48 units total.

    Visible labels: A0..A3, B0..B3 (addends, LSB first) and S0..S4 (sum word).
    """
    ha = verify_ground_states(load_gate("half_adder"))
    fa = verify_ground_states(load_gate("full_adder"))
    parts = [("ha0", ha, i0, tau_sample_us, quant)]
    parts += [(f"fa{k}", fa, i0, tau_sample_us, quant) for k in (1, 2, 3)]
    machines, pbits, where = _stack_machines(parts)

    labels = {
        "A0": where[("ha0", "A")], "B0": where[("ha0", "B")], "S0": where[("ha0", "S")],
    }
    for k in (1, 2, 3):
        labels[f"A{k}"] = where[(f"fa{k}", "A")]
        labels[f"B{k}"] = where[(f"fa{k}", "B")]
        labels[f"S{k}"] = where[(f"fa{k}", "S")]
    labels["S4"] = where[("fa3", "COUT")]

    carries = [
        (where[("ha0", "C")], where[("fa1", "CIN")]),
        (where[("fa1", "COUT")], where[("fa2", "CIN")]),
        (where[("fa2", "COUT")], where[("fa3", "CIN")]),
    ]
    for src, dst in carries:
        pbits[dst] = replace(pbits[dst], mode=Wired(src))

    net = NetworkSpec(machines, pbits, labels)
    if net.n_total != 48:
        raise ConfigurationError(f"ripple-carry adder must total 48 units, got {net.n_total}")
    if retention_plan is not None:
        net.set_retention(retention_plan)
    net.validate()
    return net


def build_quad_and() -> GateSpec:
    """All four partial-product AND gates as one machine over shared inputs."""
    gate = verify_ground_states(load_gate("and"))
    circuit = GateCircuit("quad_and")
    placements = [
        ("A0", "B0", "P00"),
        ("A1", "B0", "P10"),
        ("A0", "B1", "P01"),
        ("A1", "B1", "P11"),
    ]
    for a, b, p in placements:
        circuit.place(gate, {"A": a, "B": b, "C": p})
    rows = []
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        rows.append((a0, a1, b0, b1, a0 & b0, a1 & b0, a0 & b1, a1 & b1))
    quad = circuit.to_gate(
        "quad_and",
        ["A0", "A1", "B0", "B1", "P00", "P10", "P01", "P11"],
        inputs=["A0", "A1", "B0", "B1"],
        outputs=["P00", "P10", "P01", "P11"],
        truth_table=rows,
    )
    return verify_ground_states(quad)


def build_factorizer(
    i0: float,
    tau_sample_us: int = 10_000,
    quant: QuantizationConfig = QuantizationConfig(),
) -> NetworkSpec:
    """2x2-bit multiplier run in reverse: clamp the product, read the factors.

    One machine holds all four partial-product AND gates over shared factor
    bits; the adder chain keeps its LSB-to-MSB carry wires while the wires
    between adders and AND outputs run *from* the adder terminals *to* the
    AND-gate output units. Adder terminals that a multiplier would hold at
    constant 0 are folded into biases instead of spending units on them,
    which lands the roster at exactly 46.

    Visible labels: A0, A1, B0, B1 (factors) and S0..S3 (product word).
    """
    quad = build_quad_and()
    fa = verify_ground_states(load_gate("full_adder"))
    add1 = fold_constant(fa, "CIN", 0)            # S1 = P10 xor P01
    add2 = fold_constant(fa, "B", 0)              # S2 = P11 xor carry1
    add3 = fold_constant(fold_constant(fa, "A", 0), "B", 0)  # S3 = carry2

    parts = [
        ("and_bm", quad, i0, tau_sample_us, quant),
        ("add1", add1, i0, tau_sample_us, quant),
        ("add2", add2, i0, tau_sample_us, quant),
        ("add3", add3, i0, tau_sample_us, quant),
    ]
    machines, pbits, where = _stack_machines(parts)

    wires = [
        (where[("add1", "A")], where[("and_bm", "P10")]),
        (where[("add1", "B")], where[("and_bm", "P01")]),
        (where[("add2", "A")], where[("and_bm", "P11")]),
        (where[("add1", "COUT")], where[("add2", "CIN")]),
        (where[("add2", "COUT")], where[("add3", "CIN")]),
    ]
    for src, dst in wires:
        pbits[dst] = replace(pbits[dst], mode=Wired(src))

    labels = {
        "A0": where[("and_bm", "A0")], "A1": where[("and_bm", "A1")],
        "B0": where[("and_bm", "B0")], "B1": where[("and_bm", "B1")],
        "S0": where[("and_bm", "P00")], "S1": where[("add1", "S")],
        "S2": where[("add2", "S")], "S3": where[("add3", "S")],
    }
    net = NetworkSpec(machines, pbits, labels)
    accounting = {m.name: m.n for m in machines}
    if net.n_total != 46:
        raise ConfigurationError(
            f"factorizer must total 46 units, got {net.n_total} (split {accounting})"
        )
    net.accounting = accounting
    net.validate()
    return net
