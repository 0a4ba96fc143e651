"""Uncomputation combinators: conjugated regions and replay-based uncompute.

conjugate(compute, body) emits U, V, U^-1 where U^-1 is the exact gate-reversed,
gate-inverted recording of U. Qubits allocated by U live through the body and
are released by U^-1, so intermediate values computed by U (including garbage
arrays filled by it) return to |0> without extra bookkeeping.
"""
from __future__ import annotations

from dataclasses import replace

from .circuit import Circuit, Gate


class NonInvertibleRegion(ValueError):
    pass


class InputsNoLongerLive(ValueError):
    pass


_INVERSE_KIND = {
    "X": "X", "H": "H", "CX": "CX", "CZ": "CZ", "CCX": "CCX",
    "SWAP": "SWAP", "CSWAP": "CSWAP",
    "S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T",
    "ALLOC": "DEALLOC", "DEALLOC": "ALLOC",
}


def invert_gate(g: Gate) -> Gate:
    """Inverse of a single recorded gate. Measurements have no inverse."""
    if g.kind == "MEASURE" or g.cond is not None:
        raise NonInvertibleRegion(
            "regions containing measurements or classically controlled gates "
            "cannot be inverted")
    if g.kind in ("PHASE", "CPHASE"):
        return replace(g, angle=-g.angle)
    return replace(g, kind=_INVERSE_KIND[g.kind])


def invert_gates(gates) -> list[Gate]:
    return [invert_gate(g) for g in reversed(list(gates))]


def emit_inverse(circ: Circuit, gates):
    """Append the inverse of a recorded gate slice.

    ALLOC becomes DEALLOC and vice versa; qubit ids deallocated inside the
    slice are revived when the inverse re-allocates them.
    """
    for g in invert_gates(gates):
        if g.kind == "ALLOC":
            circ.revive_qubit(g.qubits[0])
        else:
            circ.append(g)


def conjugate(circ: Circuit, compute, body):
    """Emit compute, body, then the exact inverse of compute.

    `compute` and `body` are builder callables taking the circuit. Raises
    NonInvertibleRegion if the compute region records a measurement or a
    classically controlled gate.
    """
    start = len(circ.gates)
    compute(circ)
    segment = list(circ.gates[start:])
    for g in segment:  # fail before running the body
        if g.kind == "MEASURE" or g.cond is not None:
            raise NonInvertibleRegion(
                "compute region contains a measurement or classically "
                "controlled gate")
    body(circ)
    emit_inverse(circ, segment)


def uncompute_by_replay(circ: Circuit, recorded_gates):
    """Append the inverted recording, verifying its inputs are still live.

    This realizes same-way-as-computed uncomputation for flags whose computing
    gates were kept; it fails with InputsNoLongerLive when a needed qubit was
    deallocated in the meantime (the situation where automatic uncomputation
    breaks down).
    """
    recorded = list(recorded_gates)
    for g in recorded:
        if g.kind in ("ALLOC", "DEALLOC"):
            continue
        for q in g.qubits:
            if q not in circ._alive:
                raise InputsNoLongerLive(f"qubit {q} required for replay is deallocated")
    emit_inverse(circ, [g for g in recorded if g.kind not in ("ALLOC", "DEALLOC")])
