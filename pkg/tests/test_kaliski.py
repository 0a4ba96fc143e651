import pytest

from ecdlp_forge.circuit import Circuit
from ecdlp_forge.classical_ec import mod_inverse
from ecdlp_forge.kaliski import (NotInvertible, build_kaliski_round, kaliski_classical,
                                 kaliski_quantum, make_workspace)
from ecdlp_forge.qarith import CUCCARO, GIDNEY, alloc_modreg
from ecdlp_forge.simulator import exact_distribution, run
from ecdlp_forge.uncompute import conjugate

from .conftest import basis_value


def test_classical_examples():
    assert kaliski_classical(3, 7) == 5
    assert kaliski_classical(1, 7) == 1


def test_classical_vs_extended_euclid():
    for p in (5, 7, 11, 13):
        for v in range(1, p):
            assert kaliski_classical(v, p) == mod_inverse(v, p), (p, v)


def test_classical_rejects_zero():
    with pytest.raises(NotInvertible):
        kaliski_classical(0, 7)


def test_round_matches_classical_trace():
    p = 7
    n = p.bit_length()
    for v0 in range(1, p):
        trace = []
        kaliski_classical(v0, p, trace=trace)
        c = Circuit()
        v = alloc_modreg(c, p, "v")
        m = c.alloc_register(2 * n, "m")
        c.load_const(v.reg, v0)
        ws = make_workspace(c, v, m, CUCCARO)
        for i in range(2 * n):
            build_kaliski_round(c, ws, i)
            st = run(c).state
            got = {"u": basis_value(st, ws.u), "v": basis_value(st, ws.v),
                   "r": basis_value(st, ws.r), "s": basis_value(st, ws.s),
                   "f": basis_value(st, [ws.f]), "m": basis_value(st, [ws.m[i]])}
            assert got == trace[i], (v0, i, got, trace[i])
            # a, b, add clean after every round
            for flag in (ws.a, ws.b, ws.add):
                assert basis_value(st, [flag]) == 0


def test_stopped_rounds_only_double_r():
    # after v hits zero, each further round doubles r mod p and nothing else
    trace = []
    kaliski_classical(1, 7, trace=trace)  # stops early (v=1 -> 0 after round 0)
    stop = next(i for i, row in enumerate(trace) if row["f"] == 0)
    for i in range(stop + 1, len(trace)):
        prev, cur = trace[i - 1], trace[i]
        assert cur["r"] == (2 * prev["r"]) % 7
        assert (cur["u"], cur["v"], cur["s"]) == (prev["u"], prev["v"], prev["s"])
        assert cur["m"] == 0


@pytest.mark.parametrize("p", [5, 7])
def test_quantum_kaliski_exhaustive(p):
    n = p.bit_length()
    for v0 in range(1, p):
        c = Circuit()
        v = alloc_modreg(c, p, "v")
        m = c.alloc_register(2 * n, "m")
        c.load_const(v.reg, v0)
        kaliski_quantum(c, v, m, CUCCARO, cleanup=True)
        st = run(c).state  # dealloc checks enforce cleanliness
        assert basis_value(st, v) == mod_inverse(v0, p), (p, v0)


def test_quantum_kaliski_self_inverse_value():
    c = Circuit()
    v = alloc_modreg(c, 7, "v")
    m = c.alloc_register(6, "m")
    c.load_const(v.reg, 1)
    kaliski_quantum(c, v, m, CUCCARO)
    assert basis_value(run(c).state, v) == 1


def test_superposition_branches_and_garbage_determinism():
    # superposed input: each branch ends holding its inverse, entangled with a
    # single deterministic garbage string (one state key per branch)
    p = 7
    n = p.bit_length()
    c2 = Circuit()
    v = alloc_modreg(c2, p, "v")
    m = c2.alloc_register(2 * n, "m")
    c2.x(v[0])
    c2.h(v[1])  # v in {1, 3}
    kaliski_quantum(c2, v, m, CUCCARO)
    st = run(c2).state
    joint = st.marginal(list(v) + list(m))
    assert len(joint) == 2  # garbage is branch-deterministic
    vals = {key & 7 for key in joint}
    assert vals == {mod_inverse(1, 7), mod_inverse(3, 7)}


def test_involution_at_decode_level():
    # applying the inversion twice (fresh garbage each time, both conjugated)
    # is the identity on v
    p = 7
    n = p.bit_length()
    for v0 in (2, 5):
        c = Circuit()
        v = alloc_modreg(c, p, "v")
        c.load_const(v.reg, v0)
        for _ in range(2):
            m = c.alloc_register(2 * n, "m")
            conjugate(c, lambda circ, mm=m: kaliski_quantum(circ, v, mm, CUCCARO,
                                                            cleanup=False),
                      lambda circ: None)
            c.dealloc_register(m)
        assert basis_value(run(c).state, v) == v0


def test_conjugated_uncompute_factorizes_garbage():
    # superposed input: after conjugation m is |0...0> exactly (disentangled)
    p = 7
    n = p.bit_length()
    c = Circuit()
    v = alloc_modreg(c, p, "v")
    m = c.alloc_register(2 * n, "m")
    c.x(v[0])
    c.h(v[1])  # v in {1, 3}
    copy = c.alloc_register(n, "copy")

    def body(circ):
        for i in range(n):
            circ.cx(v[i], copy[i])

    conjugate(c, lambda circ: kaliski_quantum(circ, v, m, CUCCARO, cleanup=False), body)
    c.dealloc_register(m)  # exact |0> check via dealloc
    st = run(c).state
    # copy holds the inverses, v restored
    joint = st.marginal(list(v) + list(copy))
    assert set(joint) == {1 | (1 << n), 3 | (5 << n)}
