"""End-to-end discrete-logarithm pipeline: superposed scalars, two controlled
multiply-accumulates computing P0 + x1*G - x2*P on the point register, inverse
QFT on both scalar registers, and the classical post-processing
l = -y2 * y1^-1 mod r, plus the exact-order analytic distribution the
interference algebra predicts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, QReg
from .classical_ec import (INFINITY, Curve, Point, discrete_log_bruteforce,
                           ec_neg, ec_scalar_mul, is_on_curve, point_order)
from .ec_circuit import EcPointRegs, alloc_point, ctrl_ell_mult_add, exceptional_inputs
from .qarith import GIDNEY, AdderBackend
from .simulator import exact_distribution


@dataclass(frozen=True)
class ShorInstance:
    curve: Curve
    G: Point
    P: Point
    P0: Point
    n: int       # scalar-register width = bit length of p
    r: int       # order of G
    l_true: int  # brute-force log, verification only


def shor_instance(curve: Curve, G: Point, P: Point, P0: Point) -> ShorInstance:
    for label, pt in (("G", G), ("P", P), ("P0", P0)):
        if not is_on_curve(curve, pt):
            raise ValueError(f"{label} = {pt} is not on {curve}")
        if pt is INFINITY:
            raise ValueError(f"{label} must be an affine point")
    r = point_order(curve, G)
    l_true = discrete_log_bruteforce(curve, G, P)
    return ShorInstance(curve, G, P, P0, curve.p.bit_length(), r, l_true)


def build_qft(circ: Circuit, reg, inverse: bool = False):
    """Standard QFT network: H plus controlled-phase ladder, final bit reversal."""
    bits = list(reg)
    n = len(bits)
    ops: list[tuple] = []
    for j in range(n - 1, -1, -1):
        ops.append(("h", bits[j]))
        for k in range(j - 1, -1, -1):
            ops.append(("cp", bits[k], bits[j], math.pi / 2 ** (j - k)))
    for i in range(n // 2):
        ops.append(("swap", bits[i], bits[n - 1 - i]))
    if inverse:
        ops.reverse()
    for op in ops:
        if op[0] == "h":
            circ.h(op[1])
        elif op[0] == "swap":
            circ.swap(op[1], op[2])
        else:
            circ.cphase(op[1], op[2], -op[3] if inverse else op[3])


def instance_branch_report(inst: ShorInstance) -> dict:
    """Classically walk every (x1, x2) branch through the addition sequence,
    classifying it clean (all additions generic) or garbage."""
    curve, n = inst.curve, inst.n
    steps: list[Point] = []
    power = inst.G
    for i in range(n):
        steps.append(power)
        if i + 1 < n:
            power = ec_scalar_mul(curve, 2, power)
    power = ec_neg(curve, inst.P)
    for i in range(n):
        steps.append(power)
        if i + 1 < n:
            power = ec_scalar_mul(curve, 2, power)
    from .classical_ec import ec_add
    clean: dict[tuple[int, int], Point] = {}
    garbage: list[tuple[int, int]] = []
    for a in range(2 ** n):
        for b in range(2 ** n):
            bits = [(a >> i) & 1 for i in range(n)] + [(b >> i) & 1 for i in range(n)]
            Q = inst.P0
            ok = True
            for bit, T in zip(bits, steps):
                if Q is INFINITY or Q[0] == T[0]:
                    ok = False  # x-collision: doubling or inverse pair
                    break
                if bit:
                    R = ec_add(curve, Q, T)
                    if R is INFINITY or R[0] == T[0]:
                        ok = False  # result lands on +-T: slope re-derivation fails
                        break
                    Q = R
            if ok:
                clean[(a, b)] = Q
            else:
                garbage.append((a, b))
    return {"clean": clean, "garbage": garbage, "steps": steps}


def build_shor_circuit(inst: ShorInstance, include_measure: bool = True,
                       backend: AdderBackend = GIDNEY):
    """The full pipeline circuit.

    Returns (circuit, registers) with registers x1, x2 and the point register;
    when include_measure is set, x1 then x2 are measured into classical bits.
    """
    circ = Circuit()
    pt = alloc_point(circ, inst.curve.p, inst.P0)
    x1 = circ.alloc_register(inst.n, "x1")
    x2 = circ.alloc_register(inst.n, "x2")
    for q in list(x1) + list(x2):
        circ.h(q)
    ctrl_ell_mult_add(circ, inst.G, pt, x1, inst.curve, backend=backend)
    ctrl_ell_mult_add(circ, ec_neg(inst.curve, inst.P), pt, x2, inst.curve, backend=backend)
    build_qft(circ, x1, inverse=True)
    build_qft(circ, x2, inverse=True)
    cbits = {}
    if include_measure:
        cbits["x1"] = [circ.measure(q) for q in x1]
        cbits["x2"] = [circ.measure(q) for q in x2]
    return circ, {"x1": x1, "x2": x2, "pt": pt, "cbits": cbits}


def postprocess(y1: int, y2: int, r: int) -> int | None:
    """Recover the logarithm candidate -y2 * y1^-1 mod r, if y1 is invertible."""
    if r < 2:
        raise ValueError("r must be >= 2")
    y1r, y2r = y1 % r, y2 % r
    if math.gcd(y1r, r) != 1:
        return None
    return (-y2r * pow(y1r, -1, r)) % r


def ideal_distribution(r: int, l: int) -> dict[tuple[int, int], float]:
    """Exact-order QPE outcome law: uniform 1/r on {(y1, -l*y1 mod r)}.

    This is the analytic limit of the interference sum for registers that hold
    exactly r values; off-support amplitudes cancel as full geometric sums.
    """
    if r < 2 or not 0 <= l < r:
        raise ValueError("need r >= 2 and 0 <= l < r")
    return {(y1, (-l * y1) % r): 1.0 / r for y1 in range(r)}


def ideal_success_probability(r: int, l: int) -> float:
    """Mass of ideal_distribution outcomes whose postprocess recovers l."""
    dist = ideal_distribution(r, l)
    return sum(pr for (y1, y2), pr in dist.items() if postprocess(y1, y2, r) == l)


@dataclass
class ShorRunReport:
    instance: ShorInstance
    distribution: dict[tuple[int, int], float]
    candidates: dict[int | None, float]
    recovery_mass: float
    modal_candidate: int | None
    recovered: bool
    histogram: dict[tuple[int, int], int] = field(default_factory=dict)

    def as_dict(self):
        inst = self.instance
        return {
            "curve": {"p": inst.curve.p, "a": inst.curve.a, "b": inst.curve.b},
            "G": list(inst.G), "P": list(inst.P), "P0": list(inst.P0),
            "n": inst.n, "r": inst.r, "l_true": inst.l_true,
            "distribution": {f"{y1},{y2}": pr for (y1, y2), pr in sorted(self.distribution.items())},
            "candidates": {("none" if c is None else str(c)): m
                           for c, m in sorted(self.candidates.items(), key=lambda kv: -kv[1])},
            "recovery_mass": self.recovery_mass,
            "modal_candidate": self.modal_candidate,
            "recovered": self.recovered,
            "histogram": {f"{y1},{y2}": n for (y1, y2), n in sorted(self.histogram.items())},
        }


def run_shor(inst: ShorInstance, shots: int = 0, seed: int = 0,
             backend: AdderBackend = GIDNEY) -> ShorRunReport:
    """Exact (y1, y2) distribution of the pipeline plus recovery statistics.

    Exceptional-branch garbage (unavoidable on toy instances) is kept alive
    rather than crashing dealloc verification, which is physically exact.
    The histogram draws outcome-level samples from the exact law.
    """
    circ, regs = build_shor_circuit(inst, include_measure=False, backend=backend)
    dist = exact_distribution(circ, [regs["x1"], regs["x2"]], on_dirty_dealloc="keep")
    candidates: dict[int | None, float] = {}
    for (y1, y2), pr in dist.items():
        cand = postprocess(y1, y2, inst.r)
        candidates[cand] = candidates.get(cand, 0.0) + pr
    recovery = candidates.get(inst.l_true % inst.r, 0.0)
    ranked = sorted(((m, c) for c, m in candidates.items() if c is not None), reverse=True)
    modal = ranked[0][1] if ranked else None
    hist: dict[tuple[int, int], int] = {}
    if shots:
        rng = np.random.default_rng(seed)
        outcomes = sorted(dist.items())
        probs = np.array([pr for _, pr in outcomes])
        probs = probs / probs.sum()
        draws = rng.choice(len(outcomes), size=shots, p=probs)
        for d in draws:
            key = outcomes[int(d)][0]
            hist[key] = hist.get(key, 0) + 1
    return ShorRunReport(
        instance=inst,
        distribution=dist,
        candidates=candidates,
        recovery_mass=recovery,
        modal_candidate=modal,
        recovered=(modal == inst.l_true % inst.r),
        histogram=hist,
    )
