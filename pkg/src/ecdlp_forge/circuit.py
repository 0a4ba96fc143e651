"""Gate-level circuit representation, Clifford+T decomposition and resource metrics.

Circuits are ordered gate lists over explicitly allocated qubits. Dealloc is an
assertion that the qubit is back in |0> (the simulator enforces it). Resource
accounting follows the fault-tolerant conventions used throughout this package:
T/T-dagger gates dominate, each classically conditioned CZ counts as half a CX
on average, and controlled phases that are not plain CZ are tallied separately
as rotations instead of being synthesized into T gates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

# gate kinds and their qubit arity
GATE_ARITY = {
    "X": 1, "H": 1, "S": 1, "SDG": 1, "T": 1, "TDG": 1,
    "CX": 2, "CZ": 2, "CCX": 3, "SWAP": 2, "CSWAP": 3,
    "PHASE": 1, "CPHASE": 2,
    "MEASURE": 1, "ALLOC": 1, "DEALLOC": 1,
}
ANGLED = {"PHASE", "CPHASE"}
UNITARY = {k for k in GATE_ARITY if k not in ("MEASURE", "ALLOC", "DEALLOC")}


class UnsupportedGate(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True)
class Gate:
    """One circuit operation.

    `cond` = (classical bit, trigger value) makes the gate classically
    controlled; `cbit` is the target classical bit of a MEASURE.
    """
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    cbit: int | None = None
    cond: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise UnsupportedGate(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise UnsupportedGate(f"{self.kind} expects {GATE_ARITY[self.kind]} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise UnsupportedGate(f"{self.kind} operands must be distinct: {self.qubits}")
        if self.cond is not None and self.kind not in UNITARY:
            raise UnsupportedGate("classical control wraps unitary gates only")


@dataclass(frozen=True)
class QReg:
    """Little-endian quantum register: qubits[0] is the least significant bit."""
    qubits: tuple[int, ...]
    label: str = ""

    def __len__(self):
        return len(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    def __iter__(self):
        return iter(self.qubits)


class Circuit:
    """Mutable gate-program builder. Completed circuits are treated as immutable."""

    def __init__(self):
        self.gates: list[Gate] = []
        self.labels: dict[int, str] = {}
        self._next_qubit = 0
        self._next_cbit = 0
        self._alive: set[int] = set()

    # -- allocation ------------------------------------------------------

    def alloc_qubit(self, label: str = "q") -> int:
        q = self._next_qubit
        self._next_qubit += 1
        self.labels[q] = label
        self._alive.add(q)
        self.gates.append(Gate("ALLOC", (q,)))
        return q

    def alloc_register(self, n: int, label: str) -> QReg:
        if n < 1:
            raise ValueError("register width must be >= 1")
        return QReg(tuple(self.alloc_qubit(f"{label}[{i}]") for i in range(n)), label)

    def revive_qubit(self, q: int):
        """Re-allocate a previously deallocated qubit id (used by inverse emission)."""
        if q in self._alive:
            raise ValueError(f"qubit {q} is already alive")
        if q >= self._next_qubit:
            raise ValueError(f"qubit {q} was never allocated")
        self._alive.add(q)
        self.gates.append(Gate("ALLOC", (q,)))

    def dealloc(self, q: int):
        self._check_alive((q,))
        self._alive.remove(q)
        self.gates.append(Gate("DEALLOC", (q,)))

    def dealloc_register(self, reg: QReg):
        for q in reg:
            self.dealloc(q)

    def new_cbit(self) -> int:
        c = self._next_cbit
        self._next_cbit += 1
        return c

    @property
    def num_qubits(self) -> int:
        return self._next_qubit

    @property
    def num_cbits(self) -> int:
        return self._next_cbit

    # -- gate emission ---------------------------------------------------

    def _check_alive(self, qubits):
        for q in qubits:
            if q not in self._alive:
                raise ValueError(f"qubit {q} is not allocated")

    def append(self, gate: Gate):
        if gate.kind == "ALLOC":
            if gate.qubits[0] in self._alive:
                raise ValueError(f"qubit {gate.qubits[0]} already alive")
            self._alive.add(gate.qubits[0])
            self._next_qubit = max(self._next_qubit, gate.qubits[0] + 1)
            self.labels.setdefault(gate.qubits[0], "q")
        elif gate.kind == "DEALLOC":
            self._check_alive(gate.qubits)
            self._alive.remove(gate.qubits[0])
        else:
            self._check_alive(gate.qubits)
            if gate.cbit is not None:
                self._next_cbit = max(self._next_cbit, gate.cbit + 1)
        self.gates.append(gate)

    def x(self, q): self.append(Gate("X", (q,)))
    def h(self, q): self.append(Gate("H", (q,)))
    def s(self, q): self.append(Gate("S", (q,)))
    def sdg(self, q): self.append(Gate("SDG", (q,)))
    def t(self, q): self.append(Gate("T", (q,)))
    def tdg(self, q): self.append(Gate("TDG", (q,)))
    def cx(self, a, b): self.append(Gate("CX", (a, b)))
    def cz(self, a, b): self.append(Gate("CZ", (a, b)))
    def ccx(self, a, b, c): self.append(Gate("CCX", (a, b, c)))
    def swap(self, a, b): self.append(Gate("SWAP", (a, b)))
    def cswap(self, c, a, b): self.append(Gate("CSWAP", (c, a, b)))
    def phase(self, q, theta): self.append(Gate("PHASE", (q,), angle=float(theta)))
    def cphase(self, a, b, theta): self.append(Gate("CPHASE", (a, b), angle=float(theta)))

    def measure(self, q) -> int:
        c = self.new_cbit()
        self.append(Gate("MEASURE", (q,), cbit=c))
        return c

    def classically_controlled(self, gate: Gate, cbit: int, value: int):
        self.append(replace(gate, cond=(cbit, int(value))))

    # convenience: X-load an integer constant into a register
    def load_const(self, reg: QReg, value: int):
        for i, q in enumerate(reg):
            if (value >> i) & 1:
                self.x(q)


def mcx(circ: Circuit, controls, target: int, ctrl_state: str | None = None):
    """Multi-controlled X with up to 3 controls.

    `ctrl_state` is index-aligned with `controls`; '0' marks a negative control,
    realized by X-conjugation. Three controls are lowered through one clean
    ancilla and Toffoli gates.
    """
    controls = list(controls)
    if ctrl_state is None:
        ctrl_state = "1" * len(controls)
    if len(ctrl_state) != len(controls):
        raise ValueError("ctrl_state length mismatch")
    if len(controls) > 3:
        raise UnsupportedGate("more than 3 controls not supported")
    flips = [q for q, st in zip(controls, ctrl_state) if st == "0"]
    for q in flips:
        circ.x(q)
    if len(controls) == 0:
        circ.x(target)
    elif len(controls) == 1:
        circ.cx(controls[0], target)
    elif len(controls) == 2:
        circ.ccx(controls[0], controls[1], target)
    else:
        anc = circ.alloc_qubit("mcx_anc")
        circ.ccx(controls[0], controls[1], anc)
        circ.ccx(anc, controls[2], target)
        circ.ccx(controls[0], controls[1], anc)
        circ.dealloc(anc)
    for q in flips:
        circ.x(q)


# -- Clifford+T decomposition ------------------------------------------------

def _emit_ccx(out: Circuit, a, b, t, cond=None):
    # standard 7-T / 6-CX / 2-H network
    seq = [
        Gate("H", (t,)), Gate("CX", (b, t)), Gate("TDG", (t,)), Gate("CX", (a, t)),
        Gate("T", (t,)), Gate("CX", (b, t)), Gate("TDG", (t,)), Gate("CX", (a, t)),
        Gate("T", (b,)), Gate("T", (t,)), Gate("H", (t,)), Gate("CX", (a, b)),
        Gate("T", (a,)), Gate("TDG", (b,)), Gate("CX", (a, b)),
    ]
    for g in seq:
        out.append(replace(g, cond=cond))


_PHASE_LOWERING = {  # single-qubit Phase angles with exact T/S/Z-family forms
    1: ("T",), 2: ("S",), 4: ("S", "S"), -1: ("TDG",), -2: ("SDG",), -4: ("SDG", "SDG"),
}


def _angle_as_pi4(theta: float):
    """Return k with theta = k*(pi/4) for k in {+-1,+-2,+-4}, else None."""
    red = math.remainder(theta, 2 * math.pi)
    for k in (1, 2, 4, -1, -2, -4):
        if abs(red - k * math.pi / 4) < 1e-12:
            return k
    return None


def decompose_to_clifford_t(circ: Circuit, swap_policy: str = "cx") -> Circuit:
    """Lower a circuit to the Clifford+T set plus residual rotation gates.

    CCX becomes the 7-T network, CSWAP becomes CX.CCX.CX, SWAP becomes 3 CX
    (or stays free with swap_policy='free'). Single-qubit phases at multiples
    of pi/4 become T/S/Z-family gates; CPHASE(pi) becomes CZ; every other
    phase is preserved and later counted as a rotation.
    """
    if swap_policy not in ("cx", "free"):
        raise ValueError("swap_policy must be 'cx' or 'free'")
    out = Circuit()
    out._next_qubit = circ._next_qubit
    out._next_cbit = circ._next_cbit
    out.labels = dict(circ.labels)
    out._alive = set()
    for g in circ.gates:
        k = g.kind
        if k == "CCX":
            _emit_ccx(out, *g.qubits, cond=g.cond)
        elif k == "CSWAP":
            c, a, b = g.qubits
            out.append(Gate("CX", (b, a), cond=g.cond))
            _emit_ccx(out, c, a, b, cond=g.cond)
            out.append(Gate("CX", (b, a), cond=g.cond))
        elif k == "SWAP" and swap_policy == "cx":
            a, b = g.qubits
            for pair in ((a, b), (b, a), (a, b)):
                out.append(Gate("CX", pair, cond=g.cond))
        elif k == "PHASE":
            k4 = _angle_as_pi4(g.angle)
            if k4 is None:
                out.append(g)
            else:
                for name in _PHASE_LOWERING[k4]:
                    out.append(Gate(name, g.qubits, cond=g.cond))
        elif k == "CPHASE":
            k4 = _angle_as_pi4(g.angle)
            if k4 in (4, -4):
                out.append(Gate("CZ", g.qubits, cond=g.cond))
            else:
                # controlled phases below pi stay as rotations (see resource notes)
                out.append(g)
        else:
            out.append(g)
    return out


# -- resource metrics ---------------------------------------------------------

@dataclass
class ResourceReport:
    """Gate-count summary of a decomposed circuit.

    cx_count is exact with denominator 1 or 2: plain CX/CZ count 1, each
    classically conditioned CZ counts 1/2 (average over its 50/50 trigger).
    t_depth layers only T/T-dagger gates under ASAP scheduling; total_depth
    layers every gate. rotation_count tallies surviving PHASE/CPHASE gates.
    """
    qubit_count: int
    t_count: int
    cx_count: Fraction
    t_depth: int
    rotation_count: int
    total_depth: int

    def as_dict(self):
        return {
            "qubit_count": self.qubit_count,
            "t_count": self.t_count,
            "cx_count": float(self.cx_count),
            "t_depth": self.t_depth,
            "rotation_count": self.rotation_count,
            "total_depth": self.total_depth,
        }


def resource_report(circ: Circuit, swap_policy: str = "cx",
                    assume_decomposed: bool = False) -> ResourceReport:
    """Count T gates, CX gates, T-depth and peak live qubits.

    Decomposes to Clifford+T first unless told the circuit already is.
    """
    c = circ if assume_decomposed else decompose_to_clifford_t(circ, swap_policy)
    t_count = 0
    cx_count = Fraction(0)
    rotations = 0
    live = 0
    peak = 0
    tdepth: dict = {}   # qubit/cbit -> current T layer
    gdepth: dict = {}   # qubit/cbit -> current total-depth layer
    t_depth_max = 0
    total_depth_max = 0
    for g in c.gates:
        if g.kind == "ALLOC":
            live += 1
            peak = max(peak, live)
            tdepth[g.qubits[0]] = 0
            gdepth[g.qubits[0]] = 0
            continue
        if g.kind == "DEALLOC":
            live -= 1
            continue
        wires = list(g.qubits)
        if g.cond is not None:
            wires.append(("c", g.cond[0]))
        if g.kind == "MEASURE":
            wires.append(("c", g.cbit))
        base_t = max(tdepth.get(w, 0) for w in wires)
        base_g = max(gdepth.get(w, 0) for w in wires)
        if g.kind in ("T", "TDG"):
            t_count += 1
            base_t += 1
        for w in wires:
            tdepth[w] = base_t
            gdepth[w] = base_g + 1
        t_depth_max = max(t_depth_max, base_t)
        total_depth_max = max(total_depth_max, base_g + 1)
        if g.kind == "CX":
            cx_count += 1
        elif g.kind == "CZ":
            cx_count += Fraction(1, 2) if g.cond is not None else 1
        elif g.kind == "SWAP":  # only present under swap_policy='free'
            pass
        elif g.kind in ("PHASE", "CPHASE"):
            if abs(math.remainder(g.angle, 2 * math.pi)) > 1e-12:
                rotations += 1
    return ResourceReport(
        qubit_count=peak,
        t_count=t_count,
        cx_count=cx_count,
        t_depth=t_depth_max,
        rotation_count=rotations,
        total_depth=total_depth_max,
    )


# -- gate-list serialization ---------------------------------------------------

def export_gatelist(circ: Circuit, header: tuple[str, ...] = ()) -> str:
    """One gate per line: `KIND q[i] q[j] ... [angle] [-> c[k]] [?c[k]=v]`."""
    lines = [f"# {h}" for h in header]
    for g in circ.gates:
        parts = [g.kind] + [f"q[{q}]" for q in g.qubits]
        if g.angle is not None:
            parts.append(repr(g.angle))
        if g.cbit is not None:
            parts.append(f"-> c[{g.cbit}]")
        if g.cond is not None:
            parts.append(f"?c[{g.cond[0]}]={g.cond[1]}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_gatelist(text: str) -> Circuit:
    """Parse the export_gatelist format back into a Circuit.

    parse(export(c)) reproduces the gate sequence exactly.
    """
    circ = Circuit()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kind = tokens[0].upper()
        if kind not in GATE_ARITY:
            raise ParseError(lineno, f"unknown gate {tokens[0]!r}")
        qubits = []
        angle = None
        cbit = None
        cond = None
        i = 1
        while i < len(tokens):
            tok = tokens[i]
            if tok.startswith("q[") and tok.endswith("]"):
                try:
                    qubits.append(int(tok[2:-1]))
                except ValueError:
                    raise ParseError(lineno, f"bad qubit token {tok!r}")
            elif tok == "->":
                i += 1
                if i >= len(tokens) or not tokens[i].startswith("c["):
                    raise ParseError(lineno, "expected classical bit after '->'")
                try:
                    cbit = int(tokens[i][2:-1])
                except ValueError:
                    raise ParseError(lineno, f"bad classical bit {tokens[i]!r}")
            elif tok.startswith("?c["):
                try:
                    bit, val = tok[1:].split("=")
                    cond = (int(bit[2:-1]), int(val))
                except (ValueError, IndexError):
                    raise ParseError(lineno, f"bad condition token {tok!r}")
            else:
                try:
                    angle = float(tok)
                except ValueError:
                    raise ParseError(lineno, f"unexpected token {tok!r}")
            i += 1
        if len(qubits) != GATE_ARITY[kind]:
            raise ParseError(lineno, f"{kind} expects {GATE_ARITY[kind]} qubits, got {len(qubits)}")
        if kind in ANGLED and angle is None:
            raise ParseError(lineno, f"{kind} requires an angle")
        if kind == "MEASURE" and cbit is None:
            raise ParseError(lineno, "MEASURE requires '-> c[k]'")
        try:
            if kind == "ALLOC":
                q = qubits[0]
                if q in circ._alive:
                    raise ParseError(lineno, f"qubit {q} already alive")
                circ._alive.add(q)
                circ._next_qubit = max(circ._next_qubit, q + 1)
                circ.labels.setdefault(q, "q")
                circ.gates.append(Gate("ALLOC", (q,)))
            else:
                circ.append(Gate(kind, tuple(qubits), angle=angle, cbit=cbit, cond=cond))
        except (UnsupportedGate, ValueError) as exc:
            raise ParseError(lineno, str(exc))
    return circ
