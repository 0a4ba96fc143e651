"""Montgomery-form representation and shift-aware modular multiplication.

A register with montgomery_shift k encodes the field element value * 2^-k
mod p; the shift lives on the register handle only, never in quantum state.
Conversions multiply in place by the matching power of two. The quantum-
quantum multiplier is a plain double-and-add over the encoded values, so its
output shift is exactly the sum of the input shifts (zero extra factor); the
cross-shift adder makes registers with different shifts interoperable without
converting first.
"""
from __future__ import annotations

import math

from .circuit import Circuit
from .qarith import AdderBackend, ModReg, alloc_modreg, mod_adder, mod_double, _run_steps


class NotInvertible(ValueError):
    pass


class ShiftAlreadySet(ValueError):
    pass


class ModulusMismatch(ValueError):
    pass


def to_montgomery_classical(a: int, k: int, p: int) -> int:
    """a * 2^k mod p."""
    return a * pow(2, k, p) % p


def from_montgomery_classical(a: int, k: int, p: int) -> int:
    return a * pow(2, -k, p) % p


def inplace_mul_const(circ: Circuit, x: ModReg, c: int, backend: AdderBackend,
                      invert: bool = False):
    """x <- c*x mod p in place.

    Multiply-accumulates c*x into a fresh register, swaps it in, then clears
    the old value with the inverse multiply by c^-1.
    """
    p = x.modulus
    c %= p
    if math.gcd(c, p) != 1:
        raise NotInvertible(f"{c} is not invertible mod {p}")
    if c == 1:
        return
    cinv = pow(c, -1, p)
    z = alloc_modreg(circ, p, "mul_tmp", width=len(x))

    def accumulate(inv):
        for i in range(len(x)):
            mod_adder(circ, (c << i) % p, z, backend, ctrl=x[i], invert=inv)

    def swap_in(_):
        for xi, zi in zip(x, z):
            circ.swap(xi, zi)

    def clear_old(inv):
        for i in range(len(x)):
            mod_adder(circ, (cinv << i) % p, z, backend, ctrl=x[i], invert=not inv)

    _run_steps([(accumulate, False), (swap_in, False), (clear_old, False)], invert)
    circ.dealloc_register(z.reg)


def to_montgomery_qm(circ: Circuit, x: ModReg, k: int, backend: AdderBackend):
    """Multiply x in place by 2^k mod p and record the shift."""
    if x.montgomery_shift != 0:
        raise ShiftAlreadySet(f"register already carries shift {x.montgomery_shift}")
    inplace_mul_const(circ, x, pow(2, k, x.modulus), backend)
    x.montgomery_shift = k


def to_standard_qm(circ: Circuit, x: ModReg, backend: AdderBackend):
    """Multiply x in place by 2^-shift mod p and reset the shift to zero."""
    k = x.montgomery_shift
    if k != 0:
        inplace_mul_const(circ, x, pow(2, -k, x.modulus), backend)
    x.montgomery_shift = 0


def montgomery_mul(circ: Circuit, x: ModReg, y: ModReg, backend: AdderBackend,
                   out: ModReg | None = None, invert: bool = False) -> ModReg:
    """Fresh register z with decode(z) = decode(x) * decode(y) mod p.

    Double-and-add over the encodings, most significant bit of x first, with
    controlled modular additions of y; net Montgomery shift of the output is
    x.montgomery_shift + y.montgomery_shift. invert=True consumes `out`
    (a register produced by the forward call) back to |0>; the caller
    deallocates it.
    """
    p = x.modulus
    if y.modulus != p:
        raise ModulusMismatch(f"{x.modulus} vs {y.modulus}")
    n = len(x)
    if invert:
        if out is None:
            raise ValueError("invert requires the forward product register")
        z = out
    else:
        z = out if out is not None else alloc_modreg(circ, p, "t0", width=len(y))

    steps = []
    for idx, i in enumerate(reversed(range(n))):
        if idx > 0:
            def dbl(inv, _z=z):
                head = circ.alloc_qubit("dbl_head")
                mod_double(circ, list(_z) + [head], p, backend, invert=inv)
                circ.dealloc(head)
            steps.append((dbl, False))

        def add_y(inv, _i=i):
            mod_adder(circ, y, z, backend, ctrl=x[_i], invert=inv)
        steps.append((add_y, False))
    _run_steps(steps, invert)
    if not invert:
        z.montgomery_shift = x.montgomery_shift + y.montgomery_shift
    return z


def montgomery_addition(circ: Circuit, a: ModReg, b: ModReg, backend: AdderBackend):
    """decode(b) += decode(a), keeping b's shift; shifts may differ.

    Realized as one controlled modular constant-addition per bit of a, with
    the constant rescaled between the two shift frames.
    """
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"{a.modulus} vs {b.modulus}")
    p = a.modulus
    k, l = a.montgomery_shift, b.montgomery_shift
    for i in range(len(a)):
        mod_adder(circ, pow(2, i - k + l, p), b, backend, ctrl=a[i])
