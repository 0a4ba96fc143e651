"""Quantum integer and modular arithmetic circuit builders.

Two in-place adder backends share one calling convention, b <- (a + b) mod
2^width(b) with a either a register (width <= width(b)) or a classical
constant:

* gidney — ripple-carry over temporary AND ancillas, erased by the
  measurement-based pattern (H, measure, classically conditioned CZ), so each
  carry costs 4 T going up and none coming down;
* cuccaro — the MAJ/UMA ripple adder, fully unitary, safe inside conjugated
  (compute/uncompute) regions.

On top of the adders: a borrow-chain comparator, cyclic shifts, the
backend-agnostic modular adder with its sign/reduction-flag dance, modular
doubling, and the two's-complement right-subtraction used by the inversion
routine. Every builder accepts invert=True and emits its exact mirror, with
AND and its erasure trading places, so subtraction really is the reversed
adder circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import Circuit, Gate, QReg


class WidthMismatch(ValueError):
    pass


class ValueOutOfRange(ValueError):
    """Raised by classical-side validation when an encoded value breaks a
    modulus contract; in-circuit violations surface as dirty deallocs."""


@dataclass(frozen=True)
class AdderBackend:
    name: str

    @property
    def measured_uncompute(self) -> bool:
        return self.name == "gidney"


GIDNEY = AdderBackend("gidney")
CUCCARO = AdderBackend("cuccaro")
BACKENDS = {"gidney": GIDNEY, "cuccaro": CUCCARO}


@dataclass
class ModReg:
    """Quantum register carrying a modulus and a Montgomery-shift attribute.

    The shift is classical metadata only: it never influences emitted gates by
    itself, it records which power of two the encoded value is scaled by.
    """
    reg: QReg
    modulus: int
    montgomery_shift: int = 0

    def __len__(self):
        return len(self.reg)

    def __getitem__(self, i):
        return self.reg[i]

    def __iter__(self):
        return iter(self.reg)

    @property
    def label(self):
        return self.reg.label


def alloc_modreg(circ: Circuit, modulus: int, label: str, width: int | None = None) -> ModReg:
    if width is None:
        width = (modulus - 1).bit_length()
    return ModReg(circ.alloc_register(width, label), modulus)


# -- plan machinery ------------------------------------------------------------
#
# Builders below produce abstract op lists ("plans") whose ancillas are symbolic
# slots; a plan is emitted forward or mechanically inverted (reverse order,
# AND <-> unAND, alloc <-> dealloc), which is how every subtractor here is the
# reversed adder.

_INV_OP = {"and": "unand", "unand": "and", "alloc": "dealloc", "dealloc": "alloc"}


class _ConstBit:
    """Classical addend bit marker (distinct from qubit ids, which are ints)."""
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __repr__(self):
        return f"bit{self.v}"


ZERO = _ConstBit(0)
ONE = _ConstBit(1)


def _const_items(value: int, w: int):
    return [ONE if (value >> i) & 1 else ZERO for i in range(w)]


def _invert_plan(plan):
    return [(_INV_OP.get(op[0], op[0]),) + op[1:] for op in reversed(plan)]


def emit_and(circ: Circuit, a: int, b: int, t: int):
    """t (fresh |0>) <- a AND b: 4 T spread over all three qubits (T-depth 2).

    Phase-exact on t=|0> inputs.
    """
    if a == b:
        circ.cx(a, t)
        return
    circ.h(t)
    circ.t(t)
    circ.cx(a, t)
    circ.cx(b, t)
    circ.cx(t, a)
    circ.cx(t, b)
    circ.t(t)
    circ.tdg(a)
    circ.tdg(b)
    circ.cx(t, a)
    circ.cx(t, b)
    circ.h(t)
    circ.s(t)


def emit_and_inverse(circ: Circuit, a: int, b: int, t: int):
    """Unitary erasure of t = a AND b: the exact inverse of emit_and."""
    if a == b:
        circ.cx(a, t)
        return
    circ.sdg(t)
    circ.h(t)
    circ.cx(t, b)
    circ.cx(t, a)
    circ.t(b)
    circ.t(a)
    circ.tdg(t)
    circ.cx(t, b)
    circ.cx(t, a)
    circ.cx(b, t)
    circ.cx(a, t)
    circ.tdg(t)
    circ.h(t)


def emit_unand_measured(circ: Circuit, a: int, b: int, t: int):
    """Erase t = a AND b by measurement: the conditioned CZ repairs the phase
    and the conditioned X resets t for a clean dealloc."""
    if a == b:
        circ.cx(a, t)
        return
    circ.h(t)
    c = circ.measure(t)
    circ.classically_controlled(Gate("CZ", (a, b)), c, 1)
    circ.classically_controlled(Gate("X", (t,)), c, 1)


def _emit_plan(circ: Circuit, plan, measured: bool):
    slots: dict[str, int] = {}

    def res(r):
        return slots[r] if isinstance(r, str) else r

    for op in plan:
        k = op[0]
        if k == "alloc":
            slots[op[1]] = circ.alloc_qubit(op[2] if len(op) > 2 else "anc")
        elif k == "dealloc":
            circ.dealloc(slots.pop(op[1]))
        elif k == "x":
            circ.x(res(op[1]))
        elif k == "cx":
            circ.cx(res(op[1]), res(op[2]))
        elif k == "ccx":
            circ.ccx(res(op[1]), res(op[2]), res(op[3]))
        elif k == "and":
            emit_and(circ, res(op[1]), res(op[2]), res(op[3]))
        elif k == "unand":
            a, b, t = res(op[1]), res(op[2]), res(op[3])
            if measured:
                emit_unand_measured(circ, a, b, t)
            else:
                emit_and_inverse(circ, a, b, t)
        else:  # pragma: no cover
            raise ValueError(f"unknown plan op {k}")


def _carry_blocks(items, b_bits, alloc_label):
    """Shared Gidney carry logic. Yields (i, carry_in, slot, block_plan) with
    block_plan computing the carry-out of position i into `slot`.

    The chain starts at position 0 even when low constant bits are zero (the
    first carry slot then simply stays |0>): the circuit shape, and with it
    every resource count, depends only on the operand widths, never on the
    constant's bit pattern.
    """
    carry = None
    out = []
    for i, it in enumerate(items):
        if carry is None:
            slot = f"t{i}"
            if it is ZERO:
                block = [("alloc", slot, alloc_label)]
            elif it is ONE:
                block = [("alloc", slot, alloc_label), ("cx", b_bits[i], slot)]
            else:
                block = [("alloc", slot, alloc_label), ("and", it, b_bits[i], slot)]
            out.append((i, None, slot, block))
            carry = slot
        else:
            slot = f"t{i}"
            if it is ZERO:
                block = [("cx", carry, b_bits[i]), ("alloc", slot, alloc_label),
                         ("and", carry, b_bits[i], slot), ("cx", carry, slot)]
            elif it is ONE:
                block = [("cx", carry, b_bits[i]), ("x", carry), ("alloc", slot, alloc_label),
                         ("and", carry, b_bits[i], slot), ("x", carry), ("cx", carry, slot)]
            else:
                block = [("cx", carry, it), ("cx", carry, b_bits[i]), ("alloc", slot, alloc_label),
                         ("and", it, b_bits[i], slot), ("cx", carry, slot)]
            out.append((i, carry, slot, block))
            carry = slot
    return out, carry


def _gidney_plan(items, b_bits):
    """In-place b += addend mod 2^len(b); items[i] is 0, 1 or a qubit."""
    n = len(b_bits)
    plan: list = []
    if n == 0:
        return plan
    if n == 1:
        it = items[0]
        if it is ONE:
            plan.append(("x", b_bits[0]))
        elif it is not ZERO:
            plan.append(("cx", it, b_bits[0]))
        return plan
    blocks, carry = _carry_blocks(items[:-1], b_bits, "add_carry")
    for _, _, _, block in blocks:
        plan.extend(block)
    it = items[n - 1]
    if carry is not None:
        plan.append(("cx", carry, b_bits[n - 1]))
    if it is ONE:
        plan.append(("x", b_bits[n - 1]))
    elif it is not ZERO:
        plan.append(("cx", it, b_bits[n - 1]))
    for i, cin, slot, _ in reversed(blocks):
        it = items[i]
        if slot is None:
            continue
        if cin is None:
            if it is ZERO:
                plan += [("dealloc", slot)]
            elif it is ONE:
                plan += [("cx", b_bits[i], slot), ("dealloc", slot), ("x", b_bits[i])]
            else:
                plan += [("unand", it, b_bits[i], slot), ("dealloc", slot),
                         ("cx", it, b_bits[i])]
        elif it is ZERO:
            plan += [("cx", cin, slot), ("unand", cin, b_bits[i], slot), ("dealloc", slot)]
        elif it is ONE:
            plan += [("cx", cin, slot), ("x", cin), ("unand", cin, b_bits[i], slot),
                     ("x", cin), ("dealloc", slot), ("x", b_bits[i])]
        else:
            plan += [("cx", cin, slot), ("unand", it, b_bits[i], slot), ("dealloc", slot),
                     ("cx", cin, it), ("cx", it, b_bits[i])]
    return plan


def _cuccaro_plan(a_bits, b_bits):
    """Register-register MAJ/UMA ripple adder; equal widths."""
    n = len(b_bits)
    if n == 1:
        return [("cx", a_bits[0], b_bits[0])]
    plan: list = [("alloc", "c0", "cuccaro_c")]
    chain = ["c0"] + list(a_bits[:-1])
    for i in range(n - 1):
        plan += [("cx", a_bits[i], b_bits[i]), ("cx", a_bits[i], chain[i]),
                 ("ccx", chain[i], b_bits[i], a_bits[i])]
    plan += [("cx", a_bits[n - 1], b_bits[n - 1]), ("cx", chain[n - 1], b_bits[n - 1])]
    for i in range(n - 2, -1, -1):
        plan += [("ccx", chain[i], b_bits[i], a_bits[i]), ("cx", a_bits[i], chain[i]),
                 ("cx", chain[i], b_bits[i])]
    plan.append(("dealloc", "c0"))
    return plan


def _emit_register_add(circ, backend, a_bits, b_bits, invert):
    if backend.name == "gidney":
        items = list(a_bits) + [ZERO] * (len(b_bits) - len(a_bits))
        plan = _gidney_plan(items, b_bits)
        _emit_plan(circ, _invert_plan(plan) if invert else plan, measured=True)
    else:
        pad = [circ.alloc_qubit("pad") for _ in range(len(b_bits) - len(a_bits))]
        plan = _cuccaro_plan(list(a_bits) + pad, b_bits)
        _emit_plan(circ, _invert_plan(plan) if invert else plan, measured=False)
        for q in pad:
            circ.dealloc(q)


def build_adder(circ: Circuit, backend: AdderBackend, a, b, ctrl: int | None = None,
                invert: bool = False):
    """b <- (b + a) mod 2^width(b) (or - a with invert=True); a unchanged.

    a is an int constant, a QReg/ModReg or a qubit list no wider than b. With
    ctrl only the effective addend is gated: constants load into a scratch
    register through CXes from ctrl, registers are AND-copied with ctrl.
    """
    b_bits = list(b)
    w = len(b_bits)
    if isinstance(a, int):
        aval = a % (1 << w)
        if ctrl is None:
            if backend.name == "gidney":
                plan = _gidney_plan(_const_items(aval, w), b_bits)
                _emit_plan(circ, _invert_plan(plan) if invert else plan, measured=True)
            else:
                scratch = circ.alloc_register(w, "cval")
                circ.load_const(scratch, aval)
                _emit_register_add(circ, backend, list(scratch), b_bits, invert)
                circ.load_const(scratch, aval)
                circ.dealloc_register(scratch)
        else:
            scratch = circ.alloc_register(w, "cval")
            for i in range(w):
                if (aval >> i) & 1:
                    circ.cx(ctrl, scratch[i])
            _emit_register_add(circ, backend, list(scratch), b_bits, invert)
            for i in range(w):
                if (aval >> i) & 1:
                    circ.cx(ctrl, scratch[i])
            circ.dealloc_register(scratch)
        return
    a_bits = list(a)
    if len(a_bits) > w:
        raise WidthMismatch(f"addend width {len(a_bits)} exceeds target width {w}")
    if ctrl is None:
        _emit_register_add(circ, backend, a_bits, b_bits, invert)
        return
    scratch = circ.alloc_register(len(a_bits), "acopy")
    for aq, sq in zip(a_bits, scratch):
        if aq == ctrl:
            circ.cx(ctrl, sq)
        else:
            emit_and(circ, ctrl, aq, sq)
    _emit_register_add(circ, backend, list(scratch), b_bits, invert)
    for aq, sq in zip(a_bits, scratch):
        if aq == ctrl:
            circ.cx(ctrl, sq)
        elif backend.name == "gidney":
            emit_unand_measured(circ, ctrl, aq, sq)
        else:
            emit_and_inverse(circ, ctrl, aq, sq)
    circ.dealloc_register(scratch)


def build_subtractor(circ: Circuit, backend: AdderBackend, a, b, ctrl: int | None = None):
    """b <- (b - a) mod 2^width(b): the reversed adder circuit."""
    build_adder(circ, backend, a, b, ctrl=ctrl, invert=True)


def build_comparator_gt(circ: Circuit, u, v, out: int, backend: AdderBackend):
    """out ^= (u > v) as unsigned integers; u, v restored, chain uncomputed.

    v may be a register of u's width or an int constant. Computes the borrow
    chain of u + NOT(v) and copies out the top carry. Self-inverse.
    """
    u_bits = list(u)
    w = len(u_bits)
    if isinstance(v, int):
        if v < 0:
            raise ValueOutOfRange("comparator constant must be non-negative")
        if v >= (1 << w) - 1:
            return  # u > v is identically false at this width
        items = _const_items((1 << w) - 1 - v, w)
        conj = []
    else:
        v_bits = list(v)
        if len(v_bits) != w:
            raise WidthMismatch("comparator operands must have equal widths")
        items = v_bits
        conj = v_bits
    for q in conj:
        circ.x(q)
    blocks, top = _carry_blocks(items, u_bits, "cmp_carry")
    chain: list = []
    for _, _, _, block in blocks:
        chain.extend(block)
    if top is not None:
        plan = chain + [("cx", top, out)] + _invert_plan(chain)
        _emit_plan(circ, plan, measured=backend.measured_uncompute)
    for q in conj:
        circ.x(q)


def multi_controlled_x(circ: Circuit, controls, target: int):
    """Clean multi-controlled X on positive controls, any arity.

    Three controls use one ancilla and Toffolis; wider fans reduce pairwise
    through temporary ANDs, uncomputed unitarily.
    """
    cs = list(controls)
    if len(cs) == 0:
        circ.x(target)
    elif len(cs) == 1:
        circ.cx(cs[0], target)
    elif len(cs) == 2:
        circ.ccx(cs[0], cs[1], target)
    elif len(cs) == 3:
        anc = circ.alloc_qubit("mcx_anc")
        circ.ccx(cs[0], cs[1], anc)
        circ.ccx(anc, cs[2], target)
        circ.ccx(cs[0], cs[1], anc)
        circ.dealloc(anc)
    else:
        anc = circ.alloc_qubit("mcx_anc")
        emit_and(circ, cs[0], cs[1], anc)
        multi_controlled_x(circ, [anc] + cs[2:], target)
        emit_and_inverse(circ, cs[0], cs[1], anc)
        circ.dealloc(anc)


def build_cyclic_shift(circ: Circuit, reg, direction: str, ctrl: int | None = None):
    """Double (left) or halve (right) via a qubit rotation network of SWAPs.

    Left shifts require the top bit clear in every branch, right shifts an even
    value; the simulator's dealloc checks catch violations downstream.
    """
    bits = list(reg)
    pairs = [(bits[i], bits[i + 1]) for i in range(len(bits) - 1)]
    if direction == "left":
        pairs.reverse()
    elif direction != "right":
        raise ValueError("direction must be 'left' or 'right'")
    for a, b in pairs:
        if ctrl is None:
            circ.swap(a, b)
        else:
            circ.cswap(ctrl, a, b)


def _run_steps(steps, invert):
    if invert:
        for fn, base in reversed(steps):
            fn(not base)
    else:
        for fn, base in steps:
            fn(base)


def mod_adder(circ: Circuit, a, b: ModReg, backend: AdderBackend,
              ctrl: int | None = None, invert: bool = False):
    """b <- (a + b) mod b.modulus for a a constant or register with value < N.

    Temporarily appends a sign qubit to b, then: add a; subtract N; latch the
    sign into the reduction flag and conditionally re-add N; subtract a to
    recompute the sign for the flag fix; flip the flag; re-add a. With ctrl
    supplied only the three a-additions are controlled.
    """
    N = b.modulus
    if isinstance(a, int):
        a = a % N
    elif len(list(a)) > len(b):
        raise WidthMismatch("mod_adder addend wider than target")
    sign = circ.alloc_qubit("sign")
    flag = circ.alloc_qubit("reduction_not_necessary")
    b_ext = list(b) + [sign]

    def a_add(inv):
        build_adder(circ, backend, a, b_ext, ctrl=ctrl, invert=inv)

    def n_add(inv):
        build_adder(circ, backend, N, b_ext, invert=inv)

    def n_add_flag(inv):
        build_adder(circ, backend, N, b_ext, ctrl=flag, invert=inv)

    def cx_sf(_):
        circ.cx(sign, flag)

    def flip(_):
        circ.x(flag)

    steps = [(a_add, False), (n_add, True), (cx_sf, False), (n_add_flag, False),
             (a_add, True), (cx_sf, False), (flip, False), (a_add, False)]
    _run_steps(steps, invert)
    circ.dealloc(sign)
    circ.dealloc(flag)


def mod_sub(circ: Circuit, a, b: ModReg, backend: AdderBackend, ctrl: int | None = None):
    """b <- (b - a) mod b.modulus; for constants this is the complement add."""
    if isinstance(a, int):
        mod_adder(circ, (b.modulus - a) % b.modulus, b, backend, ctrl=ctrl)
    else:
        mod_adder(circ, a, b, backend, ctrl=ctrl, invert=True)


def mod_double(circ: Circuit, reg, p: int, backend: AdderBackend, invert: bool = False):
    """reg <- (2*reg) mod p via shift, compare, conditional subtract.

    Value contract: reg < p and the top bit free. The comparison flag is
    cleared through the parity of the result (2r is even, 2r-p odd).
    """
    bits = list(reg)
    larger = circ.alloc_qubit("larger")

    def shift(inv):
        build_cyclic_shift(circ, bits, "right" if inv else "left")

    def cmp(_):
        build_comparator_gt(circ, bits, p, larger, backend)

    def csub(inv):
        build_adder(circ, backend, p, bits, ctrl=larger, invert=not inv)

    def cxf(_):
        circ.cx(bits[0], larger)

    _run_steps([(shift, False), (cmp, False), (csub, False), (cxf, False)], invert)
    circ.dealloc(larger)


def inpl_rsub(circ: Circuit, reg: ModReg, p: int, backend: AdderBackend,
              ctrl: int | None = None, invert: bool = False):
    """reg <- (p - reg) mod reg.modulus.

    Two's-complement negation (bitwise NOT, then add modulus+1 non-modularly)
    followed by a modular addition of p.
    """
    N = reg.modulus
    w = len(reg)

    def nots(_):
        for q in reg:
            if ctrl is None:
                circ.x(q)
            else:
                circ.cx(ctrl, q)

    def add_np1(inv):
        build_adder(circ, backend, (N + 1) % (1 << w), list(reg), ctrl=ctrl, invert=inv)

    def madd(inv):
        mod_adder(circ, p % N, reg, backend, ctrl=ctrl, invert=inv)

    _run_steps([(nots, False), (add_np1, False), (madd, False)], invert)
