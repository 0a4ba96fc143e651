"""Quantum elliptic-curve point addition of a classical point, its controlled
form, and the scalar multiply-accumulate built from classically doubled points.

The in-place addition follows the seven-step slope construction: subtract the
constant coordinates, derive the slope with a conjugated Kaliski inversion,
rotate the coordinates through x2 - x3 / y2 + y3, re-derive the slope to clear
it, and fix up the constants. Only the generic case is supported: every basis
branch must differ from +-G in x, and stay off -2G (else an inversion of zero
is attempted and the simulator flags dirty ancillas).
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .classical_ec import INFINITY, Curve, Point, ec_add
from .kaliski import kaliski_quantum
from .montgomery import montgomery_mul, to_standard_qm
from .qarith import CUCCARO, GIDNEY, AdderBackend, ModReg, inpl_rsub, mod_adder, mod_sub
from .uncompute import conjugate


@dataclass
class EcPointRegs:
    """The two coordinate registers of the quantum point."""
    x: ModReg
    y: ModReg


def alloc_point(circ: Circuit, p: int, value: tuple | None = None) -> EcPointRegs:
    n = p.bit_length()
    from .qarith import alloc_modreg
    x = alloc_modreg(circ, p, "ecp_x", width=n)
    y = alloc_modreg(circ, p, "ecp_y", width=n)
    if value is not None:
        circ.load_const(x.reg, value[0])
        circ.load_const(y.reg, value[1])
    return EcPointRegs(x, y)


def exceptional_inputs(curve: Curve, T: Point, branches) -> list:
    """Branch points for which adding the classical point T is not generic.

    A branch Q breaks the construction when Q shares T's x-coordinate
    (Q = +-T: doubling or inverse pair) or Q = -2T (the re-derivation step
    would invert zero). Used by callers to validate instances.
    """
    from .classical_ec import ec_neg
    bad = []
    m2t = ec_neg(curve, ec_add(curve, T, T))
    for Q in branches:
        if Q is INFINITY or Q[0] == T[0] or Q == m2t:
            bad.append(Q)
    return bad


def _mul_into_fresh(circ, xr: ModReg, yr: ModReg, backend) -> ModReg:
    z = montgomery_mul(circ, xr, yr, backend)
    to_standard_qm(circ, z, backend)  # shift is x.m + y.m, zero on this path
    return z


def _unmul(circ, xr: ModReg, yr: ModReg, z: ModReg, backend):
    montgomery_mul(circ, xr, yr, backend, out=z, invert=True)
    circ.dealloc_register(z.reg)


def ell_add_inpl(circ: Circuit, pt: EcPointRegs, G: Point, p: int,
                 ctrl: int | None = None, backend: AdderBackend = GIDNEY):
    """pt <- pt + G (classical G) in place; identity when ctrl is |0>.

    Multiplications and constant arithmetic run on `backend`; the two Kaliski
    inversions always run on the unitary cuccaro backend inside conjugated
    regions, with their garbage arrays restored by the inverse pass.
    """
    if G is INFINITY:
        raise ValueError("cannot add the neutral element with this circuit")
    Gx, Gy = G
    n = p.bit_length()
    lam = ModReg(circ.alloc_register(n, "lambda"), p)

    # step 1: y -= Gy (controlled), x -= Gx
    mod_sub(circ, Gy % p, pt.y, backend, ctrl=ctrl)
    mod_sub(circ, Gx % p, pt.x, backend)

    # step 2: lambda = y / x, then y -= lambda * x  (clears y)
    m = circ.alloc_register(2 * n, "m")

    def invert_x(c):
        kaliski_quantum(c, pt.x, m, backend=CUCCARO, cleanup=False)

    def derive_slope(c):
        t0 = _mul_into_fresh(c, pt.y, pt.x, backend)
        for i in range(n):
            c.cx(t0[i], lam[i])
        _unmul(c, pt.y, pt.x, t0, backend)

    conjugate(circ, invert_x, derive_slope)
    circ.dealloc_register(m)

    t0 = _mul_into_fresh(circ, lam, pt.x, backend)
    mod_sub(circ, t0, pt.y, backend)
    _unmul(circ, lam, pt.x, t0, backend)

    # step 3: x += 3*Gx, x -= lambda^2 (both controlled)
    mod_adder(circ, 3 * Gx % p, pt.x, backend, ctrl=ctrl)
    t0 = _mul_into_fresh(circ, lam, lam, backend)
    mod_sub(circ, t0, pt.x, backend, ctrl=ctrl)
    _unmul(circ, lam, lam, t0, backend)

    # step 4: y += lambda * x
    t0 = _mul_into_fresh(circ, lam, pt.x, backend)
    mod_adder(circ, t0, pt.y, backend)
    _unmul(circ, lam, pt.x, t0, backend)

    # step 5: re-derive the slope to clear lambda
    m2 = circ.alloc_register(2 * n, "m")

    def invert_x2(c):
        kaliski_quantum(c, pt.x, m2, backend=CUCCARO, cleanup=False)

    def clear_slope(c):
        t = _mul_into_fresh(c, pt.y, pt.x, backend)
        for i in range(n):
            c.cx(t[i], lam[i])
        _unmul(c, pt.y, pt.x, t, backend)

    conjugate(circ, invert_x2, clear_slope)
    circ.dealloc_register(m2)

    # step 6: release lambda, y -= Gy (controlled)
    circ.dealloc_register(lam.reg)
    mod_sub(circ, Gy % p, pt.y, backend, ctrl=ctrl)

    # step 7: controlled negate brings x2 - x3 to x3 - x2, then x += Gx
    # restores the input exactly when ctrl is |0>
    inpl_rsub(circ, pt.x, p, backend, ctrl=ctrl)
    mod_adder(circ, Gx % p, pt.x, backend)


def ctrl_ell_mult_add(circ: Circuit, P: Point, pt: EcPointRegs, k,
                      curve: Curve, backend: AdderBackend = GIDNEY):
    """pt <- pt + k*P with k read from a quantum register.

    One controlled addition of the classically precomputed 2^i * P per bit.
    """
    power = P
    bits = list(k)
    for i, bit in enumerate(bits):
        ell_add_inpl(circ, pt, power, curve.p, ctrl=bit, backend=backend)
        if i + 1 < len(bits):
            power = ec_add(curve, power, power)
            if power is INFINITY:
                raise ValueError("classical doubling reached the neutral element")
