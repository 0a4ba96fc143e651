"""Classical short-Weierstrass elliptic curve arithmetic over F_p.

Ground-truth oracle for every quantum circuit in this package: curves
y^2 = x^3 + ax + b over a prime field, affine points plus the neutral
element O (represented as None-like Infinity), group law with the full
case analysis, scalar multiples, point orders and brute-force logs.
All functions are pure; moduli here are tiny so trial division and
repeated addition are deliberate choices.
"""
from __future__ import annotations

from dataclasses import dataclass


class NotPrime(ValueError):
    pass


class Singular(ValueError):
    pass


class DegenerateDoubling(ValueError):
    pass


class NotInSubgroup(ValueError):
    pass


class _Infinity:
    """The neutral element O. A singleton; compares equal only to itself."""
    __slots__ = ()

    def __repr__(self):
        return "Infinity"


INFINITY = _Infinity()

# a point is either INFINITY or an (x, y) tuple of field elements
Point = _Infinity | tuple


@dataclass(frozen=True)
class Curve:
    p: int
    a: int
    b: int

    def __repr__(self):
        return f"Curve(y^2 = x^3 + {self.a}x + {self.b} mod {self.p})"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def curve_new(p: int, a: int, b: int) -> Curve:
    """Validated curve with coefficients reduced mod p."""
    if not is_prime(p) or p <= 3:
        raise NotPrime(f"p = {p} is not a prime > 3")
    a, b = a % p, b % p
    if (4 * a ** 3 + 27 * b ** 2) % p == 0:
        raise Singular(f"4a^3 + 27b^2 = 0 mod {p}")
    return Curve(p, a, b)


def mod_inverse(x: int, p: int) -> int:
    """Extended-Euclid modular inverse (the non-Kaliski reference inverter)."""
    x %= p
    if x == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    old_r, r = x, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % p


def is_on_curve(c: Curve, P: Point) -> bool:
    if P is INFINITY:
        return True
    x, y = P
    return (y * y - (x ** 3 + c.a * x + c.b)) % c.p == 0


def ec_neg(c: Curve, P: Point) -> Point:
    if P is INFINITY:
        return INFINITY
    x, y = P
    return (x, (c.p - y) % c.p)


def ec_add(c: Curve, P: Point, Q: Point) -> Point:
    """Group addition with the full case analysis (total on valid points)."""
    if P is INFINITY:
        return Q
    if Q is INFINITY:
        return P
    p = c.p
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return INFINITY  # inverse pair (covers y1 = y2 = 0 doubling)
    if P == Q:
        lam = (3 * x1 * x1 + c.a) * mod_inverse(2 * y1, p) % p
    else:
        lam = (y2 - y1) * mod_inverse(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p  # chord point mirrored across the x-axis
    return (x3, y3)


def ec_double(c: Curve, P: Point) -> Point:
    """2P for affine P with y != 0; use ec_add for the total function."""
    if P is INFINITY or P[1] == 0:
        raise DegenerateDoubling(f"cannot double {P}")
    return ec_add(c, P, P)


def ec_scalar_mul(c: Curve, k: int, P: Point) -> Point:
    """kP by repeated addition; 0P = O and (-k)P = k(-P)."""
    if k < 0:
        return ec_scalar_mul(c, -k, ec_neg(c, P))
    R: Point = INFINITY
    for _ in range(k):
        R = ec_add(c, R, P)
    return R


def point_order(c: Curve, P: Point) -> int:
    """Smallest r >= 1 with rP = O."""
    r = 1
    R = P
    while R is not INFINITY:
        R = ec_add(c, R, P)
        r += 1
    return r


def discrete_log_bruteforce(c: Curve, G: Point, P: Point) -> int:
    """The unique l in {1..ord(G)} with lG = P, by exhaustive scan."""
    order = point_order(c, G)
    R: Point = INFINITY
    for l in range(1, order + 1):
        R = ec_add(c, R, G)
        if R == P or (R is INFINITY and P is INFINITY):
            return l
    raise NotInSubgroup(f"{P} is not a power of {G}")


def all_points(c: Curve) -> list[Point]:
    """Every point of E(F_p) including O (exhaustive; toy moduli only)."""
    pts: list[Point] = [INFINITY]
    for x in range(c.p):
        rhs = (x ** 3 + c.a * x + c.b) % c.p
        for y in range(c.p):
            if (y * y) % c.p == rhs:
                pts.append((x, y))
    return pts
