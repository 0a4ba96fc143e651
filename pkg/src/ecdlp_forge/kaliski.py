"""Modular inversion: the classical swap-based Kaliski loop (oracle and
reference trace) and its quantum in-place realization.

The quantum routine runs exactly 2n rounds for reversibility. A stop flag f
(initially |1>) is cleared by the first round that sees v = 0; from then on a
round only doubles r modularly and performs bookkeeping. Each round leaves one
garbage flag m[i]; everything else is uncomputed in-round, the a-flag through
the conserved parity of s (r*v + s*u = p keeps s odd exactly when no swap
happened).
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, QReg, mcx
from .montgomery import to_montgomery_qm, to_standard_qm
from .qarith import (CUCCARO, AdderBackend, ModReg, alloc_modreg, build_adder,
                     build_comparator_gt, build_cyclic_shift, inpl_rsub,
                     mod_double, multi_controlled_x)


class NotInvertible(ValueError):
    pass


def kaliski_classical(v: int, p: int, trace: list | None = None) -> int:
    """v^-1 mod p via the 2n-round swap-based loop.

    Mirrors the quantum round exactly (stop flag, swap flag, modular doubling
    with reduction); appends per-round register snapshots to `trace` when
    given. The 2n surplus doublings leave r with p - r = v^-1 * 2^(2n) mod p.
    """
    if not 1 <= v < p:
        raise NotInvertible(f"v = {v} not invertible mod {p}")
    n = p.bit_length()
    u, r, s = p, 0, 1
    f = True
    for i in range(2 * n):
        m_i = f and v == 0
        f = f and not m_i
        a_flag = sub = False
        if f:
            u_even = u % 2 == 0
            v_even = v % 2 == 0
            a_flag = u_even or (not v_even and u > v)
            sub = not u_even and not v_even
            # garbage flag: halve-without-swap or subtract-with-swap round
            m_i = (not u_even and v_even) or (sub and u > v)
        if a_flag:
            u, v = v, u
            r, s = s, r
        if sub:
            v -= u
            s += r
        if f:
            v //= 2
        r *= 2
        if r > p:
            r -= p
        if a_flag:
            u, v = v, u
            r, s = s, r
        if trace is not None:
            trace.append({"u": u, "v": v, "r": r, "s": s, "f": int(f), "m": int(m_i)})
    inv = (p - r) * pow(2, -2 * n, p) % p
    return inv


@dataclass
class KaliskiWorkspace:
    """Registers of the quantum loop: v is the register being inverted, m the
    caller-provided garbage array (one flag per round)."""
    v: ModReg
    u: QReg
    r: ModReg
    s: ModReg
    a: int
    b: int
    add: int
    f: int
    m: QReg
    p: int
    backend: AdderBackend


def make_workspace(circ: Circuit, v: ModReg, m: QReg,
                   backend: AdderBackend = CUCCARO) -> KaliskiWorkspace:
    p = v.modulus
    n = p.bit_length()
    if len(m) != 2 * n:
        raise ValueError(f"garbage array needs {2 * n} qubits, got {len(m)}")
    u = circ.alloc_register(n, "u")
    circ.load_const(u, p)
    r = alloc_modreg(circ, 2 * p, "r")
    s = alloc_modreg(circ, 2 * p, "s")
    circ.x(s[0])
    a = circ.alloc_qubit("a")
    b = circ.alloc_qubit("b")
    add = circ.alloc_qubit("add")
    f = circ.alloc_qubit("f")
    circ.x(f)
    return KaliskiWorkspace(v, u, r, s, a, b, add, f, m, p, backend)


def build_kaliski_round(circ: Circuit, ws: KaliskiWorkspace, i: int):
    """One loop iteration (round i), exactly the published round circuit."""
    v, u, r, s = ws.v, ws.u, ws.r, ws.s
    a, b, add, f, mi = ws.a, ws.b, ws.add, ws.f, ws.m[i]
    be = ws.backend

    # stop detection: m[i] ^= f AND (v == 0); f ^= m[i]
    for q in v:
        circ.x(q)
    is_zero = circ.alloc_qubit("is_zero")
    multi_controlled_x(circ, list(v), is_zero)
    circ.ccx(f, is_zero, mi)
    multi_controlled_x(circ, list(v), is_zero)
    circ.dealloc(is_zero)
    for q in v:
        circ.x(q)
    circ.cx(mi, f)

    # step 1: parity logic into a, m[i], b
    mcx(circ, [f, u[0]], a, "10")
    mcx(circ, [f, a, v[0]], mi, "100")
    circ.cx(a, b)
    circ.cx(mi, b)

    # step 2: comparator folded into a and m[i], then uncomputed
    gt = circ.alloc_qubit("u_gt_v")
    build_comparator_gt(circ, list(u), list(v), gt, be)
    mcx(circ, [f, gt, b], a, "110")
    mcx(circ, [f, gt, b], mi, "110")
    build_comparator_gt(circ, list(u), list(v), gt, be)  # self-inverse
    circ.dealloc(gt)

    # step 3: conditional swap into the operating frame
    for x_, y_ in zip(u, v):
        circ.cswap(a, x_, y_)
    for x_, y_ in zip(r, s):
        circ.cswap(a, x_, y_)

    # step 4: derived flag gates the subtraction/addition pair
    mcx(circ, [f, b], add, "10")
    build_adder(circ, be, list(u), list(v), ctrl=add, invert=True)  # v -= u
    build_adder(circ, be, list(r), list(s), ctrl=add)               # s += r
    # step 5: clear add and b by replaying their computing gates
    mcx(circ, [f, b], add, "10")
    circ.cx(mi, b)
    circ.cx(a, b)

    # halve v while running
    build_cyclic_shift(circ, v, "right", ctrl=f)
    # double r mod p (with in-line reduction and flag fix)
    mod_double(circ, r, ws.p, be)

    # swap back, then clear a through s's conserved parity
    for x_, y_ in zip(u, v):
        circ.cswap(a, x_, y_)
    for x_, y_ in zip(r, s):
        circ.cswap(a, x_, y_)
    mcx(circ, [s[0]], a, "0")


def kaliski_quantum(circ: Circuit, v: ModReg, m: QReg,
                    backend: AdderBackend = CUCCARO, cleanup: bool = True):
    """In-place modular inversion: v <- v^-1 mod p (standard representation).

    m must hold 2n clean flag qubits; they come back polluted (callers clear
    them by conjugation). With cleanup=True the workspace registers are
    uncomputed and deallocated here, per the standalone contract; inside a
    conjugated region pass cleanup=False so the inverse pass releases them.
    The default backend is cuccaro: fully unitary, safe to invert.
    """
    p = v.modulus
    n = p.bit_length()
    to_montgomery_qm(circ, v, 0, backend)  # entry shift 0: the identity map
    ws = make_workspace(circ, v, m, backend)
    for i in range(2 * n):
        build_kaliski_round(circ, ws, i)
    if cleanup:
        circ.dealloc(ws.a)
        circ.dealloc(ws.add)
        circ.dealloc(ws.b)
    inpl_rsub(circ, ws.r, p, backend)
    for i in range(n):
        circ.swap(v[i], ws.r[i])
    # the register now encodes v^-1 * 2^(2n)
    v.montgomery_shift = 2 * n
    if cleanup:
        circ.dealloc(ws.f)
        circ.x(ws.u[0])
        circ.dealloc_register(ws.u)
        circ.dealloc_register(ws.r.reg)
        build_adder(circ, backend, p, list(ws.s), invert=True)  # s -= p -> 0
        circ.dealloc_register(ws.s.reg)
    to_standard_qm(circ, v, backend)
    return ws
