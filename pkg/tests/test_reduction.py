import random

import pytest

from effhom.abgroup import AbGroup, Z, ZERO_GROUP
from effhom.chains import (CCx, Chain, ChainMap, TensorCell, homology_groups,
                           identity_chain_map, normalized_chains, tensor,
                           z_complex)
from effhom.reduction import (Equipped, Reduction, StrongEq,
                              basic_perturbation, compose_reductions,
                              compose_strong_equivalences, easy_perturbation,
                              equipped_homology, identity_reduction,
                              iso_as_reduction, morse_reduction,
                              perturb_strong_equivalence, perturbed_complex,
                              reduction_as_equivalence, trivial_equipment,
                              trivial_equivalence, zero_map)
from effhom.simplicial import sphere, standard_simplex
from helpers import assert_dd_zero, assert_reduction_axioms, random_chain


def cone_field(X, apex=0):
    """Discrete vector field collapsing a cone-like complex toward `apex`.

    Pairs a cell sigma not containing the apex with apex*sigma when the
    latter is present; cells containing the apex are the targets.
    """
    cells = set(X.all_cells())

    def field(s):
        c = s.base
        if apex in c:
            rest = tuple(v for v in c if v != apex)
            if rest:
                from effhom.simplicial import nondeg
                return ("t", nondeg(rest, len(rest) - 1))
            return None
        up = tuple(sorted((apex,) + c))
        if up in cells:
            from effhom.simplicial import nondeg
            return ("s", nondeg(up, len(up) - 1))
        return None

    return field


def sphere_morse_reduction(n=2):
    X = sphere(n)
    C = normalized_chains(X)
    return morse_reduction(C, cone_field(X))


def small_reduction():
    """Four-cell complex collapsed onto two critical cells.

    w (deg 2) -> x (deg 1); y (deg 1) and z (deg 0) critical.
    """
    dims = {"w": 2, "x": 1, "y": 1, "z": 0}

    def diff_cell(c):
        if c == "w":
            return Chain.single("x", 1)
        return Chain.zero(dims[c] - 1)

    def basis(k):
        return [c for c, d in dims.items() if d == k]

    C = CCx(lambda c: dims[c], diff_cell, basis, name="small")
    field = {"w": ("t", "x"), "x": ("s", "w"), "y": None, "z": None}
    return C, morse_reduction(C, field.get)


def test_identity_and_trivial():
    C = normalized_chains(sphere(1))
    r = identity_reduction(C)
    assert_reduction_axioms(r, 2)
    assert compose_reductions(r, r).f.on_cell(C.basis(1)[0]) == \
        Chain.single(C.basis(1)[0], 1)
    eq = trivial_equivalence(C)
    assert eq.big is C and eq.small is C


def test_morse_reduction_on_simplex():
    X = standard_simplex(3)
    C = normalized_chains(X)
    red = morse_reduction(C, cone_field(X))
    assert_reduction_axioms(red, 4, samples=15)
    assert [len(red.target.basis(k)) for k in range(4)] == [1, 0, 0, 0]
    assert homology_groups(red.target, 3) == [Z, ZERO_GROUP, ZERO_GROUP,
                                              ZERO_GROUP]


def test_morse_reduction_on_sphere():
    red = sphere_morse_reduction(2)
    assert_reduction_axioms(red, 3, samples=15)
    # critical cells: the apex vertex and the top cell not containing it
    assert [len(red.target.basis(k)) for k in range(3)] == [1, 0, 1]
    assert homology_groups(red.target, 2) == [Z, ZERO_GROUP, Z]
    assert_dd_zero(red.target, 3)


def test_compose_two_step_formula():
    r1 = sphere_morse_reduction(2)
    r2 = identity_reduction(r1.target)
    comp = compose_reductions(r1, r2)
    rng = random.Random(1)
    for k in range(3):
        x = random_chain(r1.source, k, rng)
        # h = h1 + g1 h2 f1 with h2 = 0 here
        assert (comp.h(x) - r1.h(x)).is_zero()
        assert (comp.f(x) - r2.f(r1.f(x))).is_zero()
    assert_reduction_axioms(comp, 3, samples=10)


def test_compose_strong_equivalences():
    r = sphere_morse_reduction(2)
    C = r.source
    e1 = StrongEq(C, identity_reduction(C), r)          # C <= C => crit
    e_back = StrongEq(C, r, identity_reduction(C))      # crit <= C => C
    comp = compose_strong_equivalences(e1, e_back)
    assert_dd_zero(comp.middle, 4)
    assert_reduction_axioms(comp.left, 3, samples=10)
    assert_reduction_axioms(comp.right, 3, samples=10)
    # homology of the double mapping cylinder = homology of the sphere
    assert homology_groups(comp.middle, 2) == [Z, ZERO_GROUP, Z]


def test_compose_strong_equivalences_trivial():
    C = normalized_chains(sphere(1))
    comp = compose_strong_equivalences(trivial_equivalence(C),
                                       trivial_equivalence(C))
    assert homology_groups(comp.middle, 1) == [Z, Z]
    rng = random.Random(2)
    z = random_chain(C, 1, rng)
    assert (comp.left.f(comp.left.g(z)) - z).is_zero()


def test_basic_perturbation_zero_delta():
    C, red = small_reduction()
    out = basic_perturbation(red, zero_map(C, C, shift=-1))
    rng = random.Random(3)
    for k in range(3):
        x = random_chain(C, k, rng)
        assert (out.f(x) - red.f(x)).is_zero()
        assert (out.h(x) - red.h(x)).is_zero()
    assert_reduction_axioms(out, 2)


def test_basic_perturbation_two_term_series():
    # two collapse pairs; delta(w2) = x1 feeds one pair into the other,
    # so the series has exactly two nonzero terms
    dims = {"w1": 2, "w2": 2, "x1": 1, "x2": 1, "z": 0}

    def diff_cell(c):
        if c == "w1":
            return Chain.single("x1", 1)
        if c == "w2":
            return Chain.single("x2", 1)
        return Chain.zero(dims[c] - 1)

    C = CCx(lambda c: dims[c], diff_cell,
            lambda k: [c for c, d in dims.items() if d == k])
    field = {"w1": ("t", "x1"), "x1": ("s", "w1"),
             "w2": ("t", "x2"), "x2": ("s", "w2"), "z": None}
    red = morse_reduction(C, field.get)
    assert_reduction_axioms(red, 3)

    def delta_cell(c):
        if c == "w2":
            return Chain.single("x1", 1)
        return Chain.zero(dims[c] - 1)

    delta = ChainMap(C, C, delta_cell, shift=-1)
    out = basic_perturbation(red, delta, bound=3)
    assert_dd_zero(out.source, 3)
    assert_dd_zero(out.target, 3)
    assert_reduction_axioms(out, 3)
    assert homology_groups(out.target, 2) == [Z, ZERO_GROUP, ZERO_GROUP]


def test_basic_perturbation_detects_non_nilpotent():
    C, red = small_reduction()

    def delta_cell(c):
        if c == "w":
            return Chain.single("x", 1)
        return Chain.zero(C.cell_dim(c) - 1)

    delta = ChainMap(C, C, delta_cell, shift=-1)
    with pytest.raises(ArithmeticError):
        out = basic_perturbation(red, delta, bound=5)
        out.h(Chain.single("x", 1))


def test_easy_perturbation():
    C, red = small_reduction()

    def delta_small(c):
        if c == "y":
            return Chain.single("z", 0, 2)
        return Chain.zero(red.target.cell_dim(c) - 1)

    out = easy_perturbation(red, ChainMap(red.target, red.target,
                                          delta_small, shift=-1))
    assert_dd_zero(out.source, 2)
    assert_reduction_axioms(out, 2)
    assert homology_groups(out.source, 1) == [AbGroup((2,)), ZERO_GROUP]
    assert homology_groups(out.target, 1) == [AbGroup((2,)), ZERO_GROUP]


def test_perturb_strong_equivalence():
    C, red = small_reduction()
    eq = StrongEq(C, identity_reduction(C), red)

    def delta_cell(c):
        if c == "y":
            return Chain.single("z", 0, 2)
        return Chain.zero(C.cell_dim(c) - 1)

    out = perturb_strong_equivalence(
        eq, ChainMap(C, C, delta_cell, shift=-1), bound=3)
    assert_dd_zero(out.middle, 2)
    assert_reduction_axioms(out.left, 2)
    assert_reduction_axioms(out.right, 2)
    assert homology_groups(out.small, 1) == [AbGroup((2,)), ZERO_GROUP]


def test_iso_as_reduction_swap_factors():
    C = normalized_chains(sphere(1))
    T = tensor([C, C], name="T")
    T2 = tensor([C, C], name="T2")

    def swap(sign_from):
        def on_cell(cell):
            a, b = cell.parts
            p, q = cell.dims
            return Chain.single(TensorCell((b, a), (q, p)), p + q,
                                (-1) ** (p * q))
        return on_cell

    fwd = ChainMap(T, T2, swap(T))
    bwd = ChainMap(T2, T, swap(T2))
    red = iso_as_reduction(T, T2, fwd, bwd)
    assert_reduction_axioms(red, 2)
    rng = random.Random(5)
    for k in range(1, 3):
        x = random_chain(T, k, rng)
        assert (fwd(T.diff(x)) - T2.diff(fwd(x))).is_zero()


def test_equipped_homology_trivial_and_morse():
    C = normalized_chains(sphere(2))
    E = trivial_equipment(sphere(2), C)
    eh = equipped_homology(E, 2)
    assert eh.group == Z
    rep = eh.rep_of((1,))
    assert C.diff(rep).is_zero()
    assert eh.class_of(rep) == (1,)

    red = sphere_morse_reduction(2)
    E2 = Equipped(sphere(2), red.source, reduction_as_equivalence(red))
    eh2 = equipped_homology(E2, 2)
    assert eh2.group == Z
    rep2 = eh2.rep_of((1,))
    assert red.source.diff(rep2).is_zero()
    assert eh2.class_of(rep2) == (1,)


def test_perturbed_complex_shares_basis():
    C, _ = small_reduction()
    P = perturbed_complex(C, zero_map(C, C, shift=-1))
    assert P.basis(1) == C.basis(1)
    assert (P.diff_cell("w") - C.diff_cell("w")).is_zero()


def test_cone_equipment_multiplication_map():
    # cone of (x m): Z -> Z has H_0 = Z/m
    C, D = z_complex("c"), z_complex("d")
    phi = ChainMap(C, D, lambda c: Chain.single("d", 0, 3))
    from effhom.reduction import cone_equipment
    eq = cone_equipment(phi, trivial_equivalence(C), trivial_equivalence(D))
    assert_dd_zero(eq.middle, 2)
    assert_reduction_axioms(eq.left, 2)
    assert_reduction_axioms(eq.right, 2)
    assert homology_groups(eq.small, 1) == [AbGroup((3,)), ZERO_GROUP]


def test_cone_equipment_nontrivial_legs():
    from effhom.chains import induced_chain_map
    from effhom.reduction import cone_equipment
    from effhom.simplicial import vertex_map
    X = sphere(2)
    red = sphere_morse_reduction(2)
    CX = red.source
    eqX = reduction_as_equivalence(red)
    pt = standard_simplex(0)
    Cpt = normalized_chains(pt)
    eqY = trivial_equivalence(Cpt)
    phi = induced_chain_map(vertex_map(X, pt, {v: 0 for v in range(4)}),
                            CX, Cpt)
    eq = cone_equipment(phi, eqX, eqY)
    assert_dd_zero(eq.middle, 4)
    assert_reduction_axioms(eq.left, 3, samples=10)
    assert_reduction_axioms(eq.right, 3, samples=10)
    # cone of S^2 -> pt kills H_0 and shifts H_2 up
    assert homology_groups(eq.small, 3) == [ZERO_GROUP, ZERO_GROUP,
                                            ZERO_GROUP, Z]


def test_normalize_effective():
    from effhom.reduction import normalize_effective
    C = normalized_chains(sphere(1))      # 3 vertices, 3 edges
    eq = trivial_equivalence(C)
    out = normalize_effective(eq)
    E = out.small
    assert len(E.basis(0)) == 1
    assert all(E.diff_cell(c).is_zero() for c in E.basis(1))
    assert homology_groups(E, 1) == [Z, Z]
    assert_reduction_axioms(out.right, 2)
    # transported classes still round-trip
    eh = Equipped(sphere(1), C, out)
    h1 = equipped_homology(eh, 1)
    rep = h1.rep_of((1,))
    assert C.diff(rep).is_zero()
    assert h1.class_of(rep) == (1,)
