import itertools

import pytest

from ecdlp_forge.circuit import Circuit
from ecdlp_forge.qarith import (CUCCARO, GIDNEY, WidthMismatch, alloc_modreg,
                                build_adder, build_comparator_gt, build_cyclic_shift,
                                build_subtractor, inpl_rsub, mod_adder, mod_double,
                                mod_sub, multi_controlled_x)
from ecdlp_forge.simulator import DeallocNonZero, run

from .conftest import basis_value

BACKENDS = (GIDNEY, CUCCARO)


def _prep(width, value, label="r"):
    c = Circuit()
    r = c.alloc_register(width, label)
    c.load_const(r, value)
    return c, r


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_adder_exhaustive_width4(backend):
    for a, b in itertools.product(range(16), repeat=2):
        c = Circuit()
        ra = c.alloc_register(4, "a")
        rb = c.alloc_register(4, "b")
        c.load_const(ra, a)
        c.load_const(rb, b)
        build_adder(c, backend, ra, rb)
        st = run(c).state
        assert basis_value(st, rb) == (a + b) % 16, (a, b)
        assert basis_value(st, ra) == a


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_adder_examples(backend):
    c = Circuit()
    ra = c.alloc_register(4, "a")
    rb = c.alloc_register(4, "b")
    c.load_const(ra, 3)
    c.load_const(rb, 5)
    build_adder(c, backend, ra, rb)
    assert basis_value(run(c).state, rb) == 8
    # a = 0 acts as the identity on b
    c2 = Circuit()
    ra = c2.alloc_register(4, "a")
    rb = c2.alloc_register(4, "b")
    c2.load_const(rb, 9)
    build_adder(c2, backend, ra, rb)
    assert basis_value(run(c2).state, rb) == 9


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_subtractor_exhaustive_width4(backend):
    for a, b in itertools.product(range(16), repeat=2):
        c = Circuit()
        ra = c.alloc_register(4, "a")
        rb = c.alloc_register(4, "b")
        c.load_const(ra, a)
        c.load_const(rb, b)
        build_subtractor(c, backend, ra, rb)
        assert basis_value(run(c).state, rb) == (b - a) % 16, (a, b)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_subtract_then_add_identity(backend):
    for val in (0, 3, 11):
        c = Circuit()
        ra = c.alloc_register(4, "a")
        rb = c.alloc_register(4, "b")
        c.load_const(ra, 6)
        c.load_const(rb, val)
        build_subtractor(c, backend, ra, rb)
        build_adder(c, backend, ra, rb)
        assert basis_value(run(c).state, rb) == val


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_adder_mixed_width_and_constants(backend):
    for a in range(8):
        for b in range(16):
            c = Circuit()
            ra = c.alloc_register(3, "a")
            rb = c.alloc_register(4, "b")
            c.load_const(ra, a)
            c.load_const(rb, b)
            build_adder(c, backend, ra, rb)
            assert basis_value(run(c).state, rb) == (a + b) % 16
            c2, rb2 = _prep(4, b)
            build_adder(c2, backend, a, rb2)
            assert basis_value(run(c2).state, rb2) == (a + b) % 16


def test_adder_width_mismatch():
    c = Circuit()
    ra = c.alloc_register(5, "a")
    rb = c.alloc_register(4, "b")
    with pytest.raises(WidthMismatch):
        build_adder(c, GIDNEY, ra, rb)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
@pytest.mark.parametrize("ctl", [0, 1])
def test_controlled_adders(backend, ctl):
    for a in range(8):
        for b in range(8):
            for const in (False, True):
                c = Circuit()
                rb = c.alloc_register(3, "b")
                c.load_const(rb, b)
                cq = c.alloc_qubit("ctl")
                if ctl:
                    c.x(cq)
                if const:
                    build_adder(c, backend, a, rb, ctrl=cq)
                else:
                    ra = c.alloc_register(3, "a")
                    c.load_const(ra, a)
                    build_adder(c, backend, ra, rb, ctrl=cq)
                st = run(c).state
                want = (a + b) % 8 if ctl else b
                assert basis_value(st, rb) == want, (backend.name, a, b, ctl, const)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_comparator_exhaustive(backend):
    for u, v in itertools.product(range(8), repeat=2):
        c = Circuit()
        ru = c.alloc_register(3, "u")
        rv = c.alloc_register(3, "v")
        out = c.alloc_qubit("out")
        c.load_const(ru, u)
        c.load_const(rv, v)
        build_comparator_gt(c, ru, rv, out, backend)
        st = run(c).state
        assert basis_value(st, [out]) == int(u > v)
        assert basis_value(st, ru) == u and basis_value(st, rv) == v
        # self-inverse: running again clears out
        build_comparator_gt(c, ru, rv, out, backend)
        assert basis_value(run(c).state, [out]) == 0


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_comparator_constant(backend):
    for u in range(16):
        for v in range(18):
            c, ru = _prep(4, u, "u")
            out = c.alloc_qubit("out")
            build_comparator_gt(c, ru, v, out, backend)
            assert basis_value(run(c).state, [out]) == int(u > v), (u, v)


def test_comparator_width_mismatch():
    c = Circuit()
    ru = c.alloc_register(3, "u")
    rv = c.alloc_register(4, "v")
    out = c.alloc_qubit("out")
    with pytest.raises(WidthMismatch):
        build_comparator_gt(c, ru, rv, out, GIDNEY)


def test_cyclic_shift_examples():
    c, r = _prep(4, 3)
    build_cyclic_shift(c, r, "left")
    assert basis_value(run(c).state, r) == 6
    c2, r2 = _prep(4, 6)
    build_cyclic_shift(c2, r2, "right")
    assert basis_value(run(c2).state, r2) == 3


def test_cyclic_shift_roundtrip():
    for val in range(8):  # top bit clear
        c, r = _prep(4, val)
        build_cyclic_shift(c, r, "left")
        build_cyclic_shift(c, r, "right")
        assert basis_value(run(c).state, r) == val


def test_cyclic_shift_controlled():
    for ctl in (0, 1):
        c, r = _prep(4, 6)
        cq = c.alloc_qubit("ctl")
        if ctl:
            c.x(cq)
        build_cyclic_shift(c, r, "right", ctrl=cq)
        assert basis_value(run(c).state, r) == 3 if ctl else 6


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
@pytest.mark.parametrize("N", [5, 7])
def test_mod_adder_exhaustive(backend, N):
    for a, b in itertools.product(range(N), repeat=2):
        for ctl in (None, 0, 1):
            c = Circuit()
            ra = alloc_modreg(c, N, "a")
            rb = alloc_modreg(c, N, "b")
            c.load_const(ra.reg, a)
            c.load_const(rb.reg, b)
            cq = None
            if ctl is not None:
                cq = c.alloc_qubit("ctl")
                if ctl:
                    c.x(cq)
            mod_adder(c, ra, rb, backend, ctrl=cq)
            st = run(c).state
            want = (a + b) % N if ctl in (None, 1) else b
            assert basis_value(st, rb) == want, (backend.name, N, a, b, ctl)
            assert basis_value(st, ra) == a


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_mod_adder_constant_and_examples(backend):
    c = Circuit()
    rb = alloc_modreg(c, 7, "b")
    c.load_const(rb.reg, 5)
    mod_adder(c, 3, rb, backend)
    assert basis_value(run(c).state, rb) == 1  # 8 mod 7
    # a = 0 identity with clean ancillas
    c2 = Circuit()
    rb2 = alloc_modreg(c2, 7, "b")
    c2.load_const(rb2.reg, 4)
    mod_adder(c2, 0, rb2, backend)
    assert basis_value(run(c2).state, rb2) == 4


def test_mod_adder_backend_interchangeable():
    for a, b in itertools.product(range(7), repeat=2):
        outs = []
        for backend in BACKENDS:
            c = Circuit()
            rb = alloc_modreg(c, 7, "b")
            c.load_const(rb.reg, b)
            mod_adder(c, a, rb, backend)
            outs.append(run(c).state.marginal(rb))
        assert {k: round(v, 9) for k, v in outs[0].items()} == \
               {k: round(v, 9) for k, v in outs[1].items()}


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_mod_adder_reversible(backend):
    for a, b in itertools.product(range(7), repeat=2):
        c = Circuit()
        rb = alloc_modreg(c, 7, "b")
        c.load_const(rb.reg, b)
        mod_adder(c, a, rb, backend)
        mod_adder(c, a, rb, backend, invert=True)
        assert basis_value(run(c).state, rb) == b


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_mod_sub(backend):
    for a, b in itertools.product(range(7), repeat=2):
        c = Circuit()
        rb = alloc_modreg(c, 7, "b")
        c.load_const(rb.reg, b)
        mod_sub(c, a, rb, backend)
        assert basis_value(run(c).state, rb) == (b - a) % 7


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_mod_double_exhaustive(backend):
    for p in (5, 7):
        for r in range(p):
            c = Circuit()
            rr = alloc_modreg(c, 2 * p, "r")
            c.load_const(rr.reg, r)
            mod_double(c, rr, p, backend)
            assert basis_value(run(c).state, rr) == (2 * r) % p, (p, r)
            mod_double(c, rr, p, backend, invert=True)
            assert basis_value(run(c).state, rr) == r


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_inpl_rsub_exhaustive(backend):
    p = 7
    # N = 14: r = 0 maps to the out-of-range pattern N (see boundary test)
    for N, values in ((14, range(1, 14)), (16, range(16))):
        for r in values:
            c = Circuit()
            rr = alloc_modreg(c, N, "r")
            c.load_const(rr.reg, r)
            inpl_rsub(c, rr, p, backend)
            assert basis_value(run(c).state, rr) == (p - r) % N, (N, r)


def test_inpl_rsub_zero_boundary_modulus14():
    # two's-complement negation of 0 yields the bit pattern N = 14, outside
    # the modular adder's b < N contract; the reduction flag ends dirty
    c = Circuit()
    rr = alloc_modreg(c, 14, "r")
    inpl_rsub(c, rr, 7, GIDNEY)
    with pytest.raises(DeallocNonZero):
        run(c)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_inpl_rsub_controlled(backend):
    for ctl in (0, 1):
        for r in range(1, 14):
            c = Circuit()
            rr = alloc_modreg(c, 14, "r")
            c.load_const(rr.reg, r)
            cq = c.alloc_qubit("ctl")
            if ctl:
                c.x(cq)
            inpl_rsub(c, rr, 7, backend, ctrl=cq)
            want = (7 - r) % 14 if ctl else r
            assert basis_value(run(c).state, rr) == want


def test_multi_controlled_x_wide():
    for n in (3, 4, 5):
        for state in (2 ** n - 1, 2 ** n - 2):
            c = Circuit()
            qs = [c.alloc_qubit(f"c{i}") for i in range(n)]
            tgt = c.alloc_qubit("t")
            for i in range(n):
                if (state >> i) & 1:
                    c.x(qs[i])
            multi_controlled_x(c, qs, tgt)
            st = run(c).state
            assert basis_value(st, [tgt]) == int(state == 2 ** n - 1)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.name)
def test_builders_reversible_on_superpositions(backend):
    # builder followed by its formal inverse is the identity
    c = Circuit()
    ra = c.alloc_register(3, "a")
    rb = c.alloc_register(3, "b")
    for q in list(ra)[:2] + list(rb)[:2]:
        c.h(q)
    build_adder(c, backend, ra, rb)
    build_adder(c, backend, ra, rb, invert=True)
    st = run(c, seed=3).state
    joint = st.marginal(list(ra) + list(rb))
    for key, pr in joint.items():
        assert key in (a | (b << 3) for a in range(4) for b in range(4))
        assert abs(pr - 1 / 16) < 1e-9
