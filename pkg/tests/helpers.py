"""Shared fixtures and property-check helpers for the test suite."""

import random

from effhom.chains import Chain
from effhom.simplicial import from_facets

# minimal 6-vertex triangulation of the real projective plane
RP2_FACETS = [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6),
]

# 7-vertex (Csaszar) triangulation of the torus
TORUS_FACETS = [tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7)))
                for i in range(7)] + \
               [tuple(sorted(((i) % 7, (i + 2) % 7, (i + 3) % 7)))
                for i in range(7)]


def rp2():
    return from_facets(RP2_FACETS)


def torus_complex():
    return from_facets(TORUS_FACETS)


def random_chain(C, k, rng, size=3, max_coeff=4):
    """Random degree-k chain supported on the finite basis of C."""
    basis = C.basis(k)
    if not basis:
        return Chain.zero(k)
    out = Chain(k)
    for _ in range(min(size, len(basis))):
        cell = rng.choice(basis)
        coeff = rng.randint(-max_coeff, max_coeff)
        out._add(cell, coeff)
    return out


def assert_dd_zero(C, max_deg):
    for k in range(max_deg + 1):
        for cell in C.basis(k):
            z = C.diff(C.diff_cell(cell))
            assert z.is_zero(), f"d.d != 0 at {cell!r}: {z!r}"


def assert_reduction_axioms(red, max_deg, seed=0, samples=20):
    """Check the five reduction axioms on seeded random chains per degree."""
    rng = random.Random(seed)
    C, D = red.source, red.target
    f, g, h = red.f, red.g, red.h
    for k in range(max_deg + 1):
        for _ in range(samples):
            if D.is_effective:
                y = random_chain(D, k, rng)
                fg = f(g(y)) - y
                assert fg.is_zero(), f"fg != id at degree {k}: {fg!r}"
                hgy = h(g(y))
                assert hgy.is_zero(), f"hg != 0 at degree {k}: {hgy!r}"
            x = random_chain(C, k, rng)
            lhs = x - g(f(x))
            rhs = C.diff(h(x)) + h(C.diff(x))
            assert (lhs - rhs).is_zero(), f"id - gf != dh + hd at degree {k}"
            fh = f(h(x))
            assert fh.is_zero(), f"fh != 0 at degree {k}: {fh!r}"
            hh = h(h(x))
            assert hh.is_zero(), f"hh != 0 at degree {k}: {hh!r}"


def assert_chain_map(m, max_deg, seed=0, samples=10):
    """f(dx) = d(f(x)) on random chains (degree-0 maps only)."""
    rng = random.Random(seed)
    for k in range(1, max_deg + 1):
        for _ in range(samples):
            x = random_chain(m.source, k, rng)
            diff = m(m.source.diff(x)) - m.target.diff(m(x))
            assert diff.is_zero(), f"not a chain map at degree {k}: {diff!r}"
