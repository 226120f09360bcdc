"""Twisted cartesian products, the bar construction, and twisted division.

A twisted product G x_tau B glues a simplicial group G over a base B by
redefining the 0-th face through a twisting operator tau.  Equipment for
such products is obtained by perturbing the equipment of the untwisted
product (the twist only changes the differential, not the cells).  Going
the other way -- recovering equipment for B from equipment of the total
space and the fibre -- is "twisted division": run the bar construction of
A = C(G) over the (perturbed) total tensor complex and collapse it back
onto C(B) with the standard bar contraction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import (CCx, Chain, ChainMap, Tag, TensorCell, normalized_chains,
                     tensor, z_complex)
from .ez import (_shuffles, ez_reduction, product_equivalence,
                 tensor_of_reductions)
from .reduction import (Equipped, Reduction, StrongEq, basic_perturbation,
                        compose_strong_equivalences, cone_equipment,
                        conjugate_big, conjugate_small, identity_reduction,
                        iso_as_reduction, morse_reduction, normalize_effective,
                        perturb_strong_equivalence, trivial_equivalence)
from .simplicial import ProductSSet, Simplex, product


# ---------------------------------------------------------------------------
# twisted cartesian products
# ---------------------------------------------------------------------------

def check_twist_axioms(G, B, tau, simplices):
    """Verify the four twisting-operator identities on the given B-simplices.

    tau sends an l-simplex of B to an (l-1)-simplex of the simplicial
    group G; in additive notation the conditions are
        d0 tau(b) = tau(d1 b) - tau(d0 b),
        di tau(b) = tau(d_{i+1} b)   (i >= 1),
        si tau(b) = tau(s_{i+1} b),
        tau(s0 b) = unit.
    """
    for s in simplices:
        m = s.dim
        if m < 1:
            continue
        t = G.uncanon(tau(s))
        if m >= 2:
            lhs = G.raw_face(0, t)
            rhs = G.raw_add(G.uncanon(tau(B.face(1, s))),
                            G.raw_neg(G.uncanon(tau(B.face(0, s)))))
            if lhs != rhs:
                raise ValueError(f"twist axiom (i) fails on {s!r}")
            for i in range(1, m - 1):
                if G.raw_face(i, t) != G.uncanon(tau(B.face(i + 1, s))):
                    raise ValueError(f"twist axiom (ii) fails on {s!r}, i={i}")
        for i in range(m - 1):
            if G.raw_degeneracy(i, t) != G.uncanon(tau(B.degeneracy(i + 1, s))):
                raise ValueError(f"twist axiom (iii) fails on {s!r}, i={i}")
        if G.uncanon(tau(B.degeneracy(0, s))) != G.raw_unit(m):
            raise ValueError(f"twist axiom (iv) fails on {s!r}")


class TwistedProductSSet(ProductSSet):
    """G x_tau B: the cartesian product with the 0-face twisted by tau.

    d0(g, b) = (d0(g) + tau(b), d0 b); every other operator is the plain
    componentwise one, so the cells coincide with those of G x B.
    """

    def __init__(self, G, B, tau):
        super().__init__(G, B)
        self.tau = tau

    def base_face(self, i, base) -> Simplex:
        if i != 0:
            return super().base_face(i, base)
        G, B = self.X, self.Y
        rg = G.raw_face(0, G.uncanon(base.a))
        rt = G.uncanon(self.tau(base.b))
        return self.pair(G.canon(G.raw_add(rg, rt)), B.face(0, base.b))


def _relabel_iso(C: CCx, D: CCx) -> Reduction:
    """Identity-on-cells isomorphism between complexes sharing a basis."""
    fwd = ChainMap(C, D, lambda c: Chain.single(c, C.cell_dim(c)))
    bwd = ChainMap(D, C, lambda c: Chain.single(c, D.cell_dim(c)))
    return iso_as_reduction(C, D, fwd, bwd, name="relabel")


def twisted_product_equivalence(F_eq: Equipped, B_eq: Equipped, tau,
                                TP=None, CTP=None) -> Equipped:
    """Equip G x_tau B by perturbing the equipment of the plain product.

    The twist changes only the differential; its difference with the
    untwisted one is a perturbation that strictly drops the base filtration,
    so the series are nilpotent within degree + 1 steps.
    """
    TP = TP if TP is not None else TwistedProductSSet(F_eq.obj, B_eq.obj, tau)
    CTP = CTP if CTP is not None else normalized_chains(TP)
    un = product_equivalence([F_eq, B_eq])
    CP = un.chains

    def tw_cell(cell):
        return CTP.diff_cell(cell) - CP.diff_cell(cell)

    delta = ChainMap(CP, CP, tw_cell, shift=-1)
    eq = perturb_strong_equivalence(un.eq, delta, bound=lambda k: k + 2)
    eq = conjugate_big(eq, _relabel_iso(eq.big, CTP))
    return Equipped(TP, CTP, eq)


def pullback_fibration(P_eq: Equipped, f, fiber_eq: Equipped) -> Equipped:
    """Equip the pullback of the path-loop fibration along f: P -> K(pi,n+1).

    The pullback is modelled as the twisted product K(pi,n) x_{tau o f} P;
    the literal pullback {(p, e): f(p) = delta(e)} is isomorphic to it via
    (g, p) -> (psi(f(p)) + g, p).
    """
    from .em import twisting_tau
    Kn = fiber_eq.obj
    Kn1 = f.target

    def tau(s: Simplex) -> Simplex:
        return Kn.canon(twisting_tau(Kn, Kn1.uncanon(f(s))))

    return twisted_product_equivalence(fiber_eq, P_eq, tau)


# ---------------------------------------------------------------------------
# the Eilenberg-MacLane product (C(G) as a dg-algebra)
# ---------------------------------------------------------------------------

@dataclass
class DGA:
    """A chain complex with an associative product and a unit cell."""
    C: CCx
    unit: Simplex
    mul_cells: object     # (cell, cell) -> Chain

    def mul(self, x: Chain, y: Chain) -> Chain:
        out = Chain(x.degree + y.degree)
        for a, ca in x.items():
            for b, cb in y.items():
                for cell, c in self.mul_cells(a, b).items():
                    out._add(cell, ca * cb * c)
        return out

    def aug(self, x: Chain):
        """Augmentation: coefficient sum in degree 0."""
        return sum(x.terms.values()) if x.degree == 0 else 0


def em_product(G, C: CCx = None) -> DGA:
    """The shuffle product on C(G) for an abelian simplicial group G.

    a.b is the sum over (p,q)-shuffles of the signed pointwise group sum of
    the two degenerated factors; degenerate results drop out.
    """
    C = C if C is not None else normalized_chains(G)
    unit = G.canon(G.raw_unit(0))
    cache = {}

    def mul_cells(a: Simplex, b: Simplex) -> Chain:
        hit = cache.get((a, b))
        if hit is not None:
            return hit
        p, q = a.dim, b.dim
        ra, rb = G.uncanon(a), G.uncanon(b)
        out = Chain(p + q)
        for alpha, beta, sign in _shuffles(p, q):
            sa = ra
            for i in alpha:
                sa = G.raw_degeneracy(i, sa)
            sb = rb
            for i in beta:
                sb = G.raw_degeneracy(i, sb)
            cell = G.canon(G.raw_add(sa, sb))
            if not cell.is_degenerate():
                out._add(cell, sign)
        cache[(a, b)] = out
        return out

    return DGA(C, unit, mul_cells)


# ---------------------------------------------------------------------------
# the suspended augmentation ideal and its equipment
# ---------------------------------------------------------------------------

def augmentation(A: CCx, Zc: CCx = None) -> ChainMap:
    """eps: A -> Z, assuming A is 0-reduced (all vertices map to 1)."""
    Zc = Zc if Zc is not None else z_complex()

    def on_cell(cell):
        k = A.cell_dim(cell)
        return Chain.single("*", 0) if k == 0 else Chain.zero(k)

    return ChainMap(A, Zc, on_cell, name="aug")


def suspended_ideal(A: CCx, name=None) -> CCx:
    """Cells of A in degrees >= 1, shifted up one degree, differential -d.

    Well defined when A is 0-reduced: the degree-1 cells of A are cycles, so
    the differential never exits the ideal.
    """

    def dim_fn(cell):
        return A.cell_dim(cell) + 1

    def diff_cell(cell):
        d = A.diff_cell(cell)
        if A.cell_dim(cell) == 1 and not d.is_zero():
            raise ValueError("complex is not 0-reduced: d does not vanish in degree 1")
        return Chain(d.degree + 1, [(c, -v) for c, v in d.items()])

    basis_fn = None
    if A.is_effective:
        def basis_fn(k):
            return A.basis(k - 1) if k >= 2 else []

    return CCx(dim_fn, diff_cell, basis_fn,
               name=name or (f"{A.name}^" if A.name else "Abar"),
               degree_cap=A.degree_cap)


def suspended_ideal_equivalence(eqA: StrongEq, vertex) -> "tuple[CCx, StrongEq]":
    """Equip the suspended augmentation ideal of A = eqA.big.

    Route: normalize the effective end so that its degree-0 part is one
    cell with d_1 = 0, equip the cone of the augmentation, then collapse
    the contractible (vertex, augmentation target) pair on both ends.
    """
    eqA = normalize_effective(eqA)
    A, E = eqA.big, eqA.small
    Zc = z_complex()
    eps = augmentation(A, Zc)
    eqC = cone_equipment(eps, eqA, trivial_equivalence(Zc))
    cone_big, cone_eff = eqC.big, eqC.small
    Abar = suspended_ideal(A)

    # big side: Cone(eps) = Abar (+) the acyclic pair (a:vertex, b:*)
    def f_cell(cell):
        if cell.tag == "a" and A.cell_dim(cell.cell) >= 1:
            return Chain.single(cell.cell, A.cell_dim(cell.cell) + 1)
        return Chain.zero(cone_big.cell_dim(cell))

    def g_cell(cell):
        return Chain.single(Tag("a", cell), A.cell_dim(cell) + 1)

    def h_cell(cell):
        if cell.tag == "b":
            return Chain.single(Tag("a", vertex), 1)
        return Chain.zero(cone_big.cell_dim(cell) + 1)

    collapse_big = Reduction(
        cone_big, Abar,
        ChainMap(cone_big, Abar, f_cell),
        ChainMap(Abar, cone_big, g_cell),
        ChainMap(cone_big, cone_big, h_cell, shift=1), name="ideal-collapse")

    # effective side: the same collapse, by a one-pair vector field
    vE = E.basis(0)[0]

    def field(cell):
        if cell.tag == "b":
            return ("s", Tag("a", vE))
        if cell.tag == "a" and cell.cell == vE:
            return ("t", Tag("b", "*"))
        return None

    collapse_eff = morse_reduction(cone_eff, field, name="ideal-collapse")
    eq = conjugate_small(conjugate_big(eqC, collapse_big), collapse_eff)
    return Abar, eq


# ---------------------------------------------------------------------------
# the bar construction
# ---------------------------------------------------------------------------

def _strata(abar: CCx, N: CCx):
    """n -> the tensor complex abar^(x)n (x) N, cached."""
    cache = {}

    def stratum(n):
        t = cache.get(n)
        if t is None:
            t = tensor([abar] * n + [N])
            cache[n] = t
        return t

    return stratum


def external_differential(mul_cells, act):
    """The part of the bar differential that shortens the word.

    On a1 (x) ... (x) an (x) y it merges consecutive entries through the
    algebra product and lets the last entry act on y.  A merge of two
    (suspended) entries carries the sign of the shifted prefix including
    the left operand; the action on the (unsuspended) coefficient slot
    additionally picks up the parity of the acting entry, which compensates
    the suspension sign of the entry differentials.
    """

    def ext_cell(cell: TensorCell) -> Chain:
        parts, dims = cell.parts, cell.dims
        n = len(parts) - 1
        out = Chain(cell.degree - 1)
        pref = 0
        for i in range(1, n):
            pref += dims[i - 1]
            sign = -1 if pref % 2 else 1
            for c, v in mul_cells(parts[i - 1], parts[i]).items():
                out._add(TensorCell(parts[:i - 1] + (c,) + parts[i + 1:],
                                    dims[:i - 1] + (c.dim + 1,) + dims[i + 1:]),
                         sign * v)
        if n >= 1:
            # inclusive prefix plus the degree of the acting entry
            sign = 1 if sum(dims[:n - 1]) % 2 else -1
            ya = act(parts[n - 1], parts[n])
            for c, v in ya.items():
                out._add(TensorCell(parts[:n - 1] + (c,),
                                    dims[:n - 1] + (ya.degree,)), sign * v)
        return out

    return ext_cell


def bar_complex(abar: CCx, N: CCx, mul_cells, act, name=None,
                external=True) -> CCx:
    """Bar complex with entries from the suspended ideal and coefficients N.

    Cells are tensor words (a1, ..., an, y); the differential is the
    stratified tensor differential plus (optionally) the external part.
    Basis enumeration relies on the entries having degree >= 2, which the
    normalized effective ideal guarantees.
    """
    stratum = _strata(abar, N)
    ext = external_differential(mul_cells, act)

    def diff_cell(cell):
        n = len(cell.parts) - 1
        d = stratum(n).diff_cell(cell)
        if external and n >= 1:
            d = d + ext(cell)
        return d

    basis_fn = None
    if abar.is_effective and N.is_effective:
        def basis_fn(k):
            out = []
            for n in range(k // 2 + 1):
                out.extend(stratum(n).basis(k))
            return out

    return CCx(lambda c: c.degree, diff_cell, basis_fn,
               name=name or "Bar", degree_cap=N.degree_cap)


def _stratified_reduction(get_red, src: CCx, tgt: CCx) -> Reduction:
    """Glue per-stratum reductions along the word-length decomposition."""

    def part(attr, shift, source, target):
        def on_cell(cell):
            red = get_red(len(cell.parts) - 1)
            return getattr(red, attr).on_cell(cell)
        return ChainMap(source, target, on_cell, shift=shift)

    return Reduction(src, tgt, part("f", 0, src, tgt), part("g", 0, tgt, src),
                     part("h", 1, src, src))


def bar_equivalence(entry_eq: StrongEq, N_eq: StrongEq, mul_cells, act,
                    bar: CCx = None, name=None) -> StrongEq:
    """Strong equivalence from a bar complex to an effective one.

    Tensor the entry and coefficient equivalences stratum by stratum, then
    carry the external differential across as a perturbation; it lowers the
    word length, so the series stop within degree + 1 steps.
    """
    stratum_big = _strata(entry_eq.big, N_eq.big)
    stratum_mid = _strata(entry_eq.middle, N_eq.middle)
    stratum_small = _strata(entry_eq.small, N_eq.small)

    def disum(stratum, basis=False, nm=None):
        basis_fn = None
        if basis:
            def basis_fn(k):
                out = []
                for n in range(k // 2 + 1):
                    out.extend(stratum(n).basis(k))
                return out
        return CCx(lambda c: c.degree,
                   lambda c: stratum(len(c.parts) - 1).diff_cell(c),
                   basis_fn, name=nm, degree_cap=N_eq.big.degree_cap)

    big = disum(stratum_big, nm="BarT")
    mid = disum(stratum_mid, nm="BarTmid")
    small = disum(stratum_small, basis=True, nm="EBar")

    lefts, rights = {}, {}

    def leg(table, pair_left, n):
        red = table.get(n)
        if red is None:
            legs = [entry_eq.left if pair_left else entry_eq.right] * n \
                + [N_eq.left if pair_left else N_eq.right]
            red = tensor_of_reductions(legs, source=stratum_mid(n),
                                       target=(stratum_big if pair_left
                                               else stratum_small)(n))
            table[n] = red
        return red

    left = _stratified_reduction(lambda n: leg(lefts, True, n), mid, big)
    right = _stratified_reduction(lambda n: leg(rights, False, n), mid, small)
    eq = StrongEq(mid, left, right)

    ext = external_differential(mul_cells, act)

    def ext_or_zero(cell):
        if len(cell.parts) == 1:
            return Chain.zero(cell.degree - 1)
        return ext(cell)

    delta = ChainMap(big, big, ext_or_zero, shift=-1)
    eq = perturb_strong_equivalence(eq, delta, bound=lambda k: k + 2)
    if bar is not None:
        eq = conjugate_big(eq, _relabel_iso(eq.big, bar))
    return eq


def bar_inverse_reduction(bar: CCx, M: CCx, unit: Simplex) -> Reduction:
    """Reduction Bar(Z, A (x) M) => M for the free A-module A (x) M.

    f keeps words with an empty bar part and unit algebra coordinate; g
    includes through the unit; h shifts the algebra coordinate of the
    coefficient into the bar word, with the usual bar sign.
    """

    def f_cell(cell):
        parts = cell.parts
        if len(parts) == 1 and parts[0].parts[0] == unit:
            return Chain.single(parts[0].parts[1], cell.degree)
        return Chain.zero(cell.degree)

    def g_cell(x):
        k = M.cell_dim(x)
        y = TensorCell((unit, x), (0, k))
        return Chain.single(TensorCell((y,), (k,)), k)

    def h_cell(cell):
        parts, dims = cell.parts, cell.dims
        n = len(parts) - 1
        ac, xc = parts[n].parts
        if ac == unit:
            return Chain.zero(cell.degree + 1)
        adeg, xdeg = parts[n].dims
        expo = sum(dims[:n]) + 1
        y = TensorCell((unit, xc), (0, xdeg))
        newc = TensorCell(parts[:n] + (ac, y),
                          dims[:n] + (adeg + 1, xdeg))
        return Chain.single(newc, cell.degree + 1, -1 if expo % 2 else 1)

    return Reduction(bar, M,
                     ChainMap(bar, M, f_cell),
                     ChainMap(M, bar, g_cell),
                     ChainMap(bar, bar, h_cell, shift=1), name="bar-inv")


# ---------------------------------------------------------------------------
# twisted division
# ---------------------------------------------------------------------------

def twisted_division(G_eq: Equipped, total_eq: Equipped, tau, B,
                     CB: CCx = None) -> Equipped:
    """Recover equipment for the base of a twisted product G x_tau B.

    Steps: perturb the Eilenberg-Zilber reduction of C(G x B) by the twist
    to reach Q = A (x) C(B) with a twisted differential; run the bar
    construction of A over Q and over the untwisted tensor complex; the
    difference of the two bar differentials perturbs the standard bar
    contraction onto C(B), and the induced perturbation on C(B) vanishes
    (a structural fact that is asserted at runtime).
    """
    G = G_eq.obj
    A = G_eq.chains
    CB = CB if CB is not None else normalized_chains(B)
    CTP = total_eq.chains

    P_un = product(G, B)
    CP = normalized_chains(P_un)
    T0 = tensor([A, CB])
    ezred = ez_reduction(G, B, CX=A, CY=CB, P=P_un, CP=CP, T=T0)

    def tw_cell(cell):
        return CTP.diff_cell(cell) - CP.diff_cell(cell)

    red2 = basic_perturbation(ezred, ChainMap(CP, CP, tw_cell, shift=-1),
                              bound=lambda k: k + 2)
    Q = red2.target
    eq_Q = compose_strong_equivalences(
        StrongEq(red2.source, red2, identity_reduction(red2.source)),
        conjugate_big(total_eq.eq, _relabel_iso(CTP, red2.source)))

    dga = em_product(G, A)
    unit = dga.unit

    def act(a, ycell):
        ac, xc = ycell.parts
        out = Chain(a.dim + ycell.degree)
        for c, v in dga.mul_cells(a, ac).items():
            out._add(TensorCell((c, xc), (c.dim, ycell.dims[1])), v)
        return out

    Abar, entry_eq = suspended_ideal_equivalence(G_eq.eq, unit)
    barQ = bar_complex(Abar, Q, dga.mul_cells, act, name="BarQ")
    bar_eq = bar_equivalence(entry_eq, eq_Q, dga.mul_cells, act, bar=barQ)

    bar0 = bar_complex(Abar, T0, dga.mul_cells, act, name="Bar0")
    inv = bar_inverse_reduction(bar0, CB, unit)

    def dbar_cell(cell):
        return barQ.diff_cell(cell) - bar0.diff_cell(cell)

    red4 = basic_perturbation(inv, ChainMap(bar0, bar0, dbar_cell, shift=-1),
                              bound=lambda k: k + 2,
                              check_zero_small_delta=True)
    eq = compose_strong_equivalences(
        StrongEq(red4.source, red4, identity_reduction(red4.source)),
        conjugate_big(bar_eq, _relabel_iso(barQ, red4.source)))
    eq = conjugate_big(eq, _relabel_iso(eq.big, CB))
    return Equipped(B, CB, eq)
