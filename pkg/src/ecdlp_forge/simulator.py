"""Sparse statevector simulation with mid-circuit measurement and dealloc checks.

The state is a table from basis bitstrings (integers over the live qubits) to
complex amplitudes, so circuits that stay close to classical-reversible cost
O(live branches) per gate regardless of total width. Dealloc removes a qubit
from the keying after verifying it is |0>; that shrinkage is what keeps wide
arithmetic circuits simulable.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate

PRUNE_THRESHOLD = 1e-12
_SQRT2_INV = 1 / math.sqrt(2)
_T_PHASE = cmath.exp(1j * math.pi / 4)


class DeallocNonZero(RuntimeError):
    pass


class NormLoss(RuntimeError):
    pass


class BranchExplosion(RuntimeError):
    pass


class TooLarge(ValueError):
    pass


class SparseState:
    """Amplitude table over the currently live qubits plus a classical-bit store."""

    def __init__(self, prune_threshold: float = PRUNE_THRESHOLD):
        self.amps: dict[int, complex] = {0: 1.0 + 0j}
        self.pos: dict[int, int] = {}      # qubit id -> bit position in keys
        self.order: list[int] = []         # bit position -> qubit id
        self.cbits: dict[int, int] = {}
        self.prune_threshold = prune_threshold
        self._graveyard = 0                # counts qubits leaked at dirty deallocs

    # -- qubit bookkeeping -------------------------------------------------

    def add_qubit(self, q: int):
        if q in self.pos:
            raise ValueError(f"qubit {q} already tracked")
        self.pos[q] = len(self.order)
        self.order.append(q)

    def one_mass(self, q: int) -> float:
        p = self.pos[q]
        return sum(abs(a) ** 2 for k, a in self.amps.items() if (k >> p) & 1)

    def remove_qubit(self, q: int):
        """Drop a |0> qubit from the keying (caller checks cleanliness)."""
        p = self.pos.pop(q)
        last = len(self.order) - 1
        if p != last:
            other = self.order[last]
            new: dict[int, complex] = {}
            for k, a in self.amps.items():
                bp, bl = (k >> p) & 1, (k >> last) & 1
                if bp != bl:
                    k ^= (1 << p) | (1 << last)
                new[k] = a
            self.amps = new
            self.order[p] = other
            self.pos[other] = p
        self.order.pop()
        self.amps = {k & ~(1 << last): a for k, a in self.amps.items()}

    def _leak_qubit(self, q: int):
        """Keep a dirty qubit's state but free its id (never deallocated)."""
        self._graveyard += 1
        ghost = -self._graveyard
        p = self.pos.pop(q)
        self.pos[ghost] = p
        self.order[p] = ghost

    @property
    def leaked_count(self) -> int:
        return self._graveyard

    # -- gate application ----------------------------------------------------

    def _prune(self):
        if self.prune_threshold > 0:
            self.amps = {k: a for k, a in self.amps.items() if abs(a) > self.prune_threshold}

    def apply(self, g: Gate, rng=None, on_dirty_dealloc: str = "raise"):
        if g.cond is not None and self.cbits.get(g.cond[0], 0) != g.cond[1]:
            return
        k = g.kind
        if k == "ALLOC":
            self.add_qubit(g.qubits[0])
            return
        if k == "DEALLOC":
            q = g.qubits[0]
            if self.one_mass(q) > 1e-9:
                if on_dirty_dealloc == "keep":
                    self._leak_qubit(q)
                    return
                raise DeallocNonZero(f"qubit {q} not |0> at dealloc")
            p = self.pos[q]
            self.amps = {key: a for key, a in self.amps.items() if not (key >> p) & 1}
            self.remove_qubit(q)
            self._renorm_check()
            return
        if k == "MEASURE":
            q = g.qubits[0]
            p1 = self.one_mass(q)
            outcome = 1 if (rng.random() if rng is not None else 0.5) < p1 else 0
            self.project(q, outcome)
            if g.cbit is not None:
                self.cbits[g.cbit] = outcome
            return
        self._apply_unitary(g)

    def project(self, q: int, outcome: int):
        p = self.pos[q]
        kept = {k: a for k, a in self.amps.items() if ((k >> p) & 1) == outcome}
        norm = math.sqrt(sum(abs(a) ** 2 for a in kept.values()))
        if norm < 1e-12:
            raise NormLoss(f"projection of qubit {q} onto |{outcome}> has no support")
        self.amps = {k: a / norm for k, a in kept.items()}

    def _apply_unitary(self, g: Gate):
        k = g.kind
        pos = self.pos
        amps = self.amps
        if k == "X":
            b = 1 << pos[g.qubits[0]]
            self.amps = {key ^ b: a for key, a in amps.items()}
        elif k == "CX":
            c, t = (1 << pos[g.qubits[0]]), (1 << pos[g.qubits[1]])
            self.amps = {(key ^ t if key & c else key): a for key, a in amps.items()}
        elif k == "CCX":
            c1, c2, t = (1 << pos[q] for q in g.qubits)
            self.amps = {(key ^ t if (key & c1 and key & c2) else key): a
                         for key, a in amps.items()}
        elif k == "SWAP":
            b1, b2 = (1 << pos[q] for q in g.qubits)
            new = {}
            for key, a in amps.items():
                if bool(key & b1) != bool(key & b2):
                    key ^= b1 | b2
                new[key] = a
            self.amps = new
        elif k == "CSWAP":
            c, b1, b2 = (1 << pos[q] for q in g.qubits)
            new = {}
            for key, a in amps.items():
                if key & c and bool(key & b1) != bool(key & b2):
                    key ^= b1 | b2
                new[key] = a
            self.amps = new
        elif k == "CZ":
            c1, c2 = (1 << pos[q] for q in g.qubits)
            self.amps = {key: (-a if (key & c1 and key & c2) else a) for key, a in amps.items()}
        elif k in ("S", "SDG", "T", "TDG"):
            ph = {"S": 1j, "SDG": -1j, "T": _T_PHASE, "TDG": _T_PHASE.conjugate()}[k]
            b = 1 << pos[g.qubits[0]]
            self.amps = {key: (a * ph if key & b else a) for key, a in amps.items()}
        elif k == "PHASE":
            ph = cmath.exp(1j * g.angle)
            b = 1 << pos[g.qubits[0]]
            self.amps = {key: (a * ph if key & b else a) for key, a in amps.items()}
        elif k == "CPHASE":
            ph = cmath.exp(1j * g.angle)
            c1, c2 = (1 << pos[q] for q in g.qubits)
            self.amps = {key: (a * ph if (key & c1 and key & c2) else a)
                         for key, a in amps.items()}
        elif k == "H":
            b = 1 << pos[g.qubits[0]]
            new: dict[int, complex] = {}
            for key, a in amps.items():
                a2 = a * _SQRT2_INV
                k0, k1 = key & ~b, key | b
                new[k0] = new.get(k0, 0) + a2
                new[k1] = new.get(k1, 0) + (-a2 if key & b else a2)
            self.amps = new
            self._prune()
            self._renorm_check()
        else:  # pragma: no cover
            raise ValueError(f"cannot simulate gate {k}")

    def _renorm_check(self):
        norm = sum(abs(a) ** 2 for a in self.amps.values())
        if abs(norm - 1.0) > 1e-6:
            raise NormLoss(f"norm drifted to {norm}")
        if abs(norm - 1.0) > 1e-12:
            s = 1 / math.sqrt(norm)
            self.amps = {k: a * s for k, a in self.amps.items()}

    # -- readout --------------------------------------------------------------

    def register_value(self, key: int, qubits) -> int:
        v = 0
        for i, q in enumerate(qubits):
            v |= ((key >> self.pos[q]) & 1) << i
        return v

    def marginal(self, qubits) -> dict[int, float]:
        out: dict[int, float] = {}
        for key, a in self.amps.items():
            v = self.register_value(key, qubits)
            out[v] = out.get(v, 0.0) + abs(a) ** 2
        return out

    def canonical_amplitudes(self, qubits=None) -> dict[tuple[int, ...], complex]:
        """Amplitudes keyed by the bit values of `qubits` (default: live ids sorted).

        Only meaningful when the omitted qubits are unentangled zeros.
        """
        if qubits is None:
            qubits = sorted(q for q in self.pos if q >= 0)
        out: dict[tuple[int, ...], complex] = {}
        for key, a in self.amps.items():
            tup = tuple((key >> self.pos[q]) & 1 for q in qubits)
            out[tup] = out.get(tup, 0) + a
        return out

    def fingerprint(self, live_cbits: frozenset[int]):
        """Canonical hashable form, invariant under global phase."""
        items = sorted(self.amps.items())
        ref = None
        for _, a in items:
            if abs(a) > 1e-9:
                ref = a / abs(a)
                break
        if ref is None:
            ref = 1.0
        cb = tuple(sorted((c, v) for c, v in self.cbits.items() if c in live_cbits))
        return (
            tuple(self.order),
            cb,
            tuple((k, round((a / ref).real, 10), round((a / ref).imag, 10)) for k, a in items),
        )

    def copy(self) -> "SparseState":
        st = SparseState(self.prune_threshold)
        st.amps = dict(self.amps)
        st.pos = dict(self.pos)
        st.order = list(self.order)
        st.cbits = dict(self.cbits)
        st._graveyard = self._graveyard
        return st


@dataclass
class RunResult:
    state: SparseState
    cbits: dict[int, int]

    def marginal(self, qubits) -> dict[int, float]:
        return self.state.marginal(qubits)


def run(circ: Circuit, seed: int = 0, on_dirty_dealloc: str = "raise",
        prune_threshold: float = PRUNE_THRESHOLD) -> RunResult:
    """Single stochastic trajectory: Born-rule measurements drawn from `seed`."""
    rng = np.random.default_rng(seed)
    st = SparseState(prune_threshold)
    for g in circ.gates:
        st.apply(g, rng=rng, on_dirty_dealloc=on_dirty_dealloc)
    return RunResult(st, dict(st.cbits))


def sample(circ: Circuit, shots: int, seed: int = 0,
           on_dirty_dealloc: str = "raise") -> dict[tuple[int, ...], int]:
    """Histogram of classical-bit outcomes over independent seeded trajectories."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    hist: dict[tuple[int, ...], int] = {}
    for i in range(shots):
        shot_seed = int(np.random.default_rng([seed, i]).integers(2 ** 63))
        res = run(circ, seed=shot_seed, on_dirty_dealloc=on_dirty_dealloc)
        key = tuple(res.cbits.get(c, 0) for c in range(circ.num_cbits))
        hist[key] = hist.get(key, 0) + 1
    return hist


BRANCH_CAP = 2 ** 16


def exact_distribution(circ: Circuit, registers, on_dirty_dealloc: str = "raise",
                       branch_cap: int = BRANCH_CAP,
                       prune_threshold: float = PRUNE_THRESHOLD) -> dict[tuple[int, ...], float]:
    """Exact joint outcome probabilities for the selected registers.

    Measurements branch the evolution with their Born weights; branches whose
    states re-converge (equal up to global phase, with identical still-relevant
    classical bits) are merged, which keeps measurement-based uncomputation
    patterns at constant width. Raises BranchExplosion past `branch_cap`.
    """
    regs = [list(r) for r in registers]
    last_use: dict[int, int] = {}
    for i, g in enumerate(circ.gates):
        if g.cond is not None:
            last_use[g.cond[0]] = i
    branches: list[tuple[float, SparseState]] = [(1.0, SparseState(prune_threshold))]
    live_cbits = set(last_use)

    for i, g in enumerate(circ.gates):
        merged_dirty = False
        if g.kind == "MEASURE":
            new_branches = []
            for w, st in branches:
                p1 = st.one_mass(g.qubits[0])
                for outcome, p in ((0, 1 - p1), (1, p1)):
                    if p < 1e-12:
                        continue
                    sub = st.copy()
                    sub.project(g.qubits[0], outcome)
                    if g.cbit is not None:
                        sub.cbits[g.cbit] = outcome
                    new_branches.append((w * p, sub))
            branches = new_branches
            merged_dirty = True
        else:
            for _, st in branches:
                st.apply(g, on_dirty_dealloc=on_dirty_dealloc)
        if g.cond is not None and last_use.get(g.cond[0]) == i:
            live_cbits.discard(g.cond[0])
            merged_dirty = True
        if merged_dirty and len(branches) > 1:
            frozen = frozenset(live_cbits)
            merged: dict = {}
            for w, st in branches:
                fp = st.fingerprint(frozen)
                if fp in merged:
                    merged[fp] = (merged[fp][0] + w, merged[fp][1])
                else:
                    merged[fp] = (w, st)
            branches = list(merged.values())
        if len(branches) > branch_cap:
            raise BranchExplosion(f"{len(branches)} branches exceed cap {branch_cap}")

    out: dict[tuple[int, ...], float] = {}
    for w, st in branches:
        for key, a in st.amps.items():
            v = tuple(st.register_value(key, reg) for reg in regs)
            out[v] = out.get(v, 0.0) + w * abs(a) ** 2
    return out


# -- dense verification oracle -------------------------------------------------

_DENSE_CAP = 14


def dense_amplitudes(circ: Circuit) -> dict[tuple[int, ...], complex]:
    """Brute-force dense simulation for unitary circuits of <= 14 qubits.

    Returns amplitudes keyed by the bit values of the live qubit ids in sorted
    order, directly comparable with SparseState.canonical_amplitudes().
    Deallocated qubits are verified |0> and traced out.
    """
    total = circ.num_qubits
    if total > _DENSE_CAP:
        raise TooLarge(f"{total} qubits exceeds the dense cap {_DENSE_CAP}")
    if total == 0:
        return {(): 1.0 + 0j}
    state = np.zeros((2,) * total, dtype=complex)
    state[(0,) * total] = 1.0
    live: list[int] = []

    mats = {
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
        "S": np.diag([1, 1j]).astype(complex),
        "SDG": np.diag([1, -1j]).astype(complex),
        "T": np.diag([1, _T_PHASE]),
        "TDG": np.diag([1, _T_PHASE.conjugate()]),
    }

    for g in circ.gates:
        k = g.kind
        if g.cond is not None or k == "MEASURE":
            raise ValueError("dense_amplitudes supports unitary circuits only")
        if k == "ALLOC":
            live.append(g.qubits[0])
            continue
        if k == "DEALLOC":
            q = g.qubits[0]
            idx = _slice(total, {q: 1})
            if np.sum(np.abs(state[idx]) ** 2) > 1e-9:
                raise DeallocNonZero(f"qubit {q} not |0> at dealloc")
            live.remove(q)
            continue
        if k in mats or k == "PHASE":
            m = mats[k] if k != "PHASE" else np.diag([1, cmath.exp(1j * g.angle)])
            q = g.qubits[0]
            state = np.moveaxis(np.tensordot(m, state, axes=([1], [q])), 0, q)
        elif k == "CX":
            sl = _slice(total, {g.qubits[0]: 1})
            state[sl] = np.flip(state[sl], axis=_sub_axis(g.qubits[:1], g.qubits[1]))
        elif k == "CZ":
            state[_slice(total, {g.qubits[0]: 1, g.qubits[1]: 1})] *= -1
        elif k == "CPHASE":
            state[_slice(total, {g.qubits[0]: 1, g.qubits[1]: 1})] *= cmath.exp(1j * g.angle)
        elif k == "SWAP":
            state = np.swapaxes(state, g.qubits[0], g.qubits[1])
        elif k == "CCX":
            sl = _slice(total, {g.qubits[0]: 1, g.qubits[1]: 1})
            state[sl] = np.flip(state[sl], axis=_sub_axis(g.qubits[:2], g.qubits[2]))
        elif k == "CSWAP":
            sl = _slice(total, {g.qubits[0]: 1})
            a2 = _sub_axis(g.qubits[:1], g.qubits[1])
            b2 = _sub_axis(g.qubits[:1], g.qubits[2])
            state[sl] = np.swapaxes(state[sl], a2, b2)
        else:  # pragma: no cover
            raise ValueError(f"cannot simulate gate {k}")

    live_sorted = sorted(live)
    out: dict[tuple[int, ...], complex] = {}
    for idx in np.ndindex(*state.shape):
        a = state[idx]
        if abs(a) <= 1e-14:
            continue
        if any(idx[q] for q in range(total) if q not in live):
            continue  # dead-axis residue below the dealloc tolerance
        out[tuple(idx[q] for q in live_sorted)] = complex(a)
    return out


def _slice(n, fixed: dict[int, int]):
    idx = [slice(None)] * n
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def _sub_axis(removed, target):
    return target - sum(1 for r in removed if r < target)
