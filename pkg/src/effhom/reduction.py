"""Reductions, strong equivalences, perturbation lemmas, equipped objects.

A reduction (f, g, h): C => D is the basic unit of effective homology:
f: C -> D and g: D -> C are chain maps with fg = id, id - gf = dh + hd,
and the side conditions fh = 0, hg = 0, hh = 0.  A strong equivalence is
a roof C <= M => E of two reductions out of a common middle complex.
Everything downstream (products, fibrations, Postnikov stages) is built
by composing and perturbing these.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import (CCx, Chain, ChainMap, Tag, compose_chain_maps,
                     complex_homology, diff_matrix, identity_chain_map,
                     mapping_cone, zero_map)
from .smith import smith_normal_form

# hard cap on perturbation-series length when no bound is declared
_SERIES_CAP = 10_000


@dataclass
class Reduction:
    source: CCx           # the big complex
    target: CCx           # the small complex
    f: ChainMap           # source -> target
    g: ChainMap           # target -> source
    h: ChainMap           # source -> source, degree +1
    name: str = None


def identity_reduction(C: CCx, name=None) -> Reduction:
    ident = identity_chain_map(C)
    return Reduction(C, C, ident, ident, zero_map(C, C, shift=1),
                     name=name or "id")


def iso_as_reduction(C: CCx, D: CCx, fwd: ChainMap, bwd: ChainMap,
                     name=None) -> Reduction:
    """An isomorphism of complexes as a reduction with h = 0."""
    return Reduction(C, D, fwd, bwd, zero_map(C, C, shift=1), name=name)


def compose_reductions(*reductions) -> Reduction:
    """(f1,g1,h1): A => B then (f2,g2,h2): B => C gives A => C with
    (f2 f1, g1 g2, h1 + g1 h2 f1)."""
    if len(reductions) == 1 and not isinstance(reductions[0], Reduction):
        reductions = tuple(reductions[0])
    out = reductions[0]
    for r in reductions[1:]:
        if r.source is not out.target:
            raise ValueError("reductions do not chain: target/source mismatch")
        f = compose_chain_maps(r.f, out.f)
        g = compose_chain_maps(out.g, r.g)
        h_extra = compose_chain_maps(out.g, r.h, out.f)

        def on_cell(cell, h1=out.h, h2=h_extra):
            return h1.on_cell(cell) + h2.on_cell(cell)

        h = ChainMap(out.source, out.source, on_cell, shift=1)
        out = Reduction(out.source, r.target, f, g, h)
    return out


@dataclass
class StrongEq:
    """Roof big <= middle => small of two reductions."""
    middle: CCx
    left: Reduction       # middle => big
    right: Reduction      # middle => small

    def __post_init__(self):
        if self.left.source is not self.middle or self.right.source is not self.middle:
            raise ValueError("legs must share the middle complex")

    @property
    def big(self) -> CCx:
        return self.left.target

    @property
    def small(self) -> CCx:
        return self.right.target

    def push(self, z: Chain) -> Chain:
        """Transport a cycle of the big complex to the small one."""
        return self.right.f(self.left.g(z))

    def pull(self, z: Chain) -> Chain:
        """Transport a cycle of the small complex to the big one."""
        return self.left.f(self.right.g(z))


def trivial_equivalence(C: CCx) -> StrongEq:
    return StrongEq(C, identity_reduction(C), identity_reduction(C))


def reduction_as_equivalence(r: Reduction) -> StrongEq:
    """big <= big => small with the identity as left leg."""
    return StrongEq(r.source, identity_reduction(r.source), r)


def compose_strong_equivalences(e1: StrongEq, e2: StrongEq) -> StrongEq:
    """Glue C <= A => E and E <= A' => E' along the shared E.

    The new middle is the double mapping cylinder
        D_k = A_k + E_{k-1} + A'_k,
        d(a, c, a') = (da - g(c), -dc, da' + g'(c)),
    with (g, f, h) the E-side maps of the first roof and (g', f', h') of
    the second.  The two projections of D are reductions onto A and A',
    composed with the outer legs.
    """
    if e1.small is not e2.big:
        raise ValueError("equivalences do not share the middle target")
    A, A2, E = e1.middle, e2.middle, e1.small
    r, r2 = e1.right, e2.left          # A => E and A' => E

    def dim_fn(cell):
        if cell.tag == "a":
            return A.cell_dim(cell.cell)
        if cell.tag == "c":
            return E.cell_dim(cell.cell) + 1
        return A2.cell_dim(cell.cell)

    def diff_cell(cell):
        if cell.tag == "a":
            da = A.diff_cell(cell.cell)
            return da.map_cells(lambda x: Tag("a", x))
        if cell.tag == "c":
            k = E.cell_dim(cell.cell)
            gc = r.g.on_cell(cell.cell)
            out = (-gc).map_cells(lambda x: Tag("a", x))
            dc = E.diff_cell(cell.cell)
            out = out + (-dc).map_cells(lambda x: Tag("c", x), degree=k)
            g2c = r2.g.on_cell(cell.cell)
            return out + g2c.map_cells(lambda x: Tag("p", x))
        da = A2.diff_cell(cell.cell)
        return da.map_cells(lambda x: Tag("p", x))

    basis_fn = None
    if A.is_effective and A2.is_effective and E.is_effective:
        def basis_fn(k):
            return ([Tag("a", c) for c in A.basis(k)]
                    + [Tag("c", c) for c in E.basis(k - 1)]
                    + [Tag("p", c) for c in A2.basis(k)])

    D = CCx(dim_fn, diff_cell, basis_fn, name="DblCyl",
            degree_cap=min((c for c in (A.degree_cap, A2.degree_cap)
                            if c is not None), default=None))

    def split(chain):
        a = Chain(chain.degree)
        c = Chain(chain.degree - 1)
        p = Chain(chain.degree)
        for cell, v in chain.items():
            (a if cell.tag == "a" else c if cell.tag == "c" else p)._add(cell.cell, v)
        return a, c, p

    # reduction D => A:  F(a,c,a') = a + g f'(a'), G(a) = (a,0,0),
    #                    H(a,c,a') = (0, f'(a'), h'(a'))
    def F_cell(cell):
        if cell.tag == "a":
            return Chain.single(cell.cell, A.cell_dim(cell.cell))
        if cell.tag == "p":
            return r.g(r2.f.on_cell(cell.cell))
        return Chain.zero(dim_fn(cell))

    def H_cell(cell):
        if cell.tag == "p":
            k = A2.cell_dim(cell.cell)
            out = r2.f.on_cell(cell.cell).map_cells(lambda x: Tag("c", x),
                                                    degree=k + 1)
            return out + r2.h.on_cell(cell.cell).map_cells(lambda x: Tag("p", x))
        return Chain.zero(dim_fn(cell) + 1)

    red_left = Reduction(
        D, A,
        ChainMap(D, A, F_cell),
        ChainMap(A, D, lambda c: Chain.single(Tag("a", c), A.cell_dim(c))),
        ChainMap(D, D, H_cell, shift=1))

    # reduction D => A': F'(a,c,a') = a' + g' f(a), G'(a') = (0,0,a'),
    #                    H'(a,c,a') = (h(a), -f(a), 0)
    def F2_cell(cell):
        if cell.tag == "p":
            return Chain.single(cell.cell, A2.cell_dim(cell.cell))
        if cell.tag == "a":
            return r2.g(r.f.on_cell(cell.cell))
        return Chain.zero(dim_fn(cell))

    def H2_cell(cell):
        if cell.tag == "a":
            k = A.cell_dim(cell.cell)
            out = r.h.on_cell(cell.cell).map_cells(lambda x: Tag("a", x))
            fa = r.f.on_cell(cell.cell)
            return out + (-fa).map_cells(lambda x: Tag("c", x), degree=k + 1)
        return Chain.zero(dim_fn(cell) + 1)

    red_right = Reduction(
        D, A2,
        ChainMap(D, A2, F2_cell),
        ChainMap(A2, D, lambda c: Chain.single(Tag("p", c), A2.cell_dim(c))),
        ChainMap(D, D, H2_cell, shift=1))

    return StrongEq(D,
                    compose_reductions(red_left, e1.left),
                    compose_reductions(red_right, e2.right))


# ---------------------------------------------------------------------------
# perturbation lemmas
# ---------------------------------------------------------------------------

def perturbed_complex(C: CCx, delta: ChainMap, name=None) -> CCx:
    """The complex with the same basis and differential d + delta."""

    def diff_cell(cell):
        return C.diff_cell(cell) + delta.on_cell(cell)

    return CCx(C.cell_dim, diff_cell, C._basis_fn,
               name=name or (f"{C.name}'" if C.name else None),
               degree_cap=C.degree_cap)


def _series(step, x: Chain, bound) -> Chain:
    """sum_i (-1)^i step^i (x), stopping at the first zero term.

    `bound` may be None (use the global cap), an int, or a callable taking
    the chain degree (for per-degree nilpotency declarations).
    """
    acc = Chain(x.degree, dict(x.terms))
    term = x
    sign = -1
    if bound is None:
        cap = _SERIES_CAP
    elif callable(bound):
        cap = bound(x.degree)
    else:
        cap = bound
    for _ in range(cap):
        term = step(term)
        if term.is_zero():
            return acc
        acc = acc + sign * term
        sign = -sign
    raise ArithmeticError(
        f"perturbation series did not terminate within {cap} steps "
        "(declared nilpotency bound violated)")


def basic_perturbation(red: Reduction, delta: ChainMap, bound=None,
                       name=None, check_zero_small_delta=False) -> Reduction:
    """Perturb the big complex of a reduction by delta (degree -1).

    Requires h.delta locally nilpotent.  With phi = sum (-1)^i (h delta)^i
    and psi = sum (-1)^i (delta h)^i, the new reduction is
    (f psi, phi g, phi h) between (source, d + delta) and
    (target, d + f psi delta g).

    With check_zero_small_delta the induced perturbation on the small
    complex is asserted to vanish on every cell it is evaluated on (this
    is a structural fact in some constructions, not a generic one).
    """
    C, D, f, g, h = red.source, red.target, red.f, red.g, red.h

    def phi(x):
        return _series(lambda t: h(delta(t)), x, bound)

    def psi(x):
        return _series(lambda t: delta(h(t)), x, bound)

    Cp = perturbed_complex(C, delta)

    if check_zero_small_delta:
        def small_delta_cell(cell):
            out = f(psi(delta(g.on_cell(cell))))
            if not out.is_zero():
                raise AssertionError(
                    f"induced perturbation expected to vanish on {cell!r}, "
                    f"got {out!r}")
            return out
    else:
        def small_delta_cell(cell):
            return f(psi(delta(g.on_cell(cell))))

    small_delta = ChainMap(D, D, small_delta_cell, shift=-1)
    Dp = perturbed_complex(D, small_delta, name=name)

    f2 = ChainMap(Cp, Dp, lambda c: f(psi(Chain.single(c, C.cell_dim(c)))))
    g2 = ChainMap(Dp, Cp, lambda c: phi(g.on_cell(c)))
    h2 = ChainMap(Cp, Cp, lambda c: phi(h.on_cell(c)), shift=1)
    return Reduction(Cp, Dp, f2, g2, h2, name=name)


def easy_perturbation(red: Reduction, delta_small: ChainMap,
                      name=None) -> Reduction:
    """Perturb the small complex; the big one gets d + g delta f, maps unchanged."""
    C, D, f, g, h = red.source, red.target, red.f, red.g, red.h

    def big_delta_cell(cell):
        return g(delta_small(f.on_cell(cell)))

    Cp = perturbed_complex(C, ChainMap(C, C, big_delta_cell, shift=-1))
    Dp = perturbed_complex(D, delta_small)
    return Reduction(Cp, Dp,
                     ChainMap(Cp, Dp, f.on_cell),
                     ChainMap(Dp, Cp, g.on_cell),
                     ChainMap(Cp, Cp, h.on_cell, shift=1), name=name)


def perturb_strong_equivalence(eq: StrongEq, delta: ChainMap, bound=None) -> StrongEq:
    """Carry a perturbation of the big complex across a strong equivalence.

    The middle is perturbed by g_L delta f_L (easy lemma on the left leg),
    and that induced perturbation is pushed through the right leg with the
    basic lemma.
    """
    left = easy_perturbation(eq.left, delta)
    fL, gL = eq.left.f, eq.left.g

    def mid_delta_cell(cell):
        return gL(delta(fL.on_cell(cell)))

    mid_delta = ChainMap(eq.middle, eq.middle, mid_delta_cell, shift=-1)
    right = basic_perturbation(
        Reduction(left.source, eq.right.target, eq.right.f, eq.right.g,
                  eq.right.h),
        mid_delta, bound=bound)
    # rebind the legs to one shared perturbed middle complex
    mid = left.source
    left = Reduction(mid, left.target, left.f, left.g, left.h)
    right = Reduction(mid, right.target,
                      ChainMap(mid, right.target, right.f.on_cell),
                      ChainMap(right.target, mid, right.g.on_cell),
                      ChainMap(mid, mid, right.h.on_cell, shift=1))
    return StrongEq(mid, left, right)


# ---------------------------------------------------------------------------
# discrete vector fields
# ---------------------------------------------------------------------------

def morse_reduction(C: CCx, field, name=None) -> Reduction:
    """Reduction of C onto the span of its critical cells.

    `field(cell)` classifies each basis element: None for critical,
    ("s", tau) when the cell is a source paired with target tau, and
    ("t", sigma) when it is the target paired with source sigma.  The
    pairing must be admissible: the coefficient of sigma in d(tau) is
    +-1 and the induced flow terminates.
    """
    h_cache = {}

    def h_cell(cell):
        hit = h_cache.get(cell)
        if hit is not None:
            return hit
        cls = field(cell)
        if cls is None or cls[0] == "t":
            out = Chain.zero(C.cell_dim(cell) + 1)
        else:
            tau = cls[1]
            dtau = C.diff_cell(tau)
            eps = dtau.coeff(cell)
            if eps not in (1, -1):
                raise ValueError(
                    f"inadmissible pairing: incidence {eps} of {cell!r} in d({tau!r})")
            rest = dtau - Chain.single(cell, dtau.degree, eps)
            out = eps * (Chain.single(tau, C.cell_dim(tau)) - h_chain(rest))
        h_cache[cell] = out
        return out

    def h_chain(chain):
        out = Chain(chain.degree + 1)
        for cell, c in chain.items():
            for icell, ic in h_cell(cell).items():
                out._add(icell, c * ic)
        return out

    h = ChainMap(C, C, h_cell, shift=1)

    def p_chain(chain):
        return chain - C.diff(h_chain(chain)) - h_chain(C.diff(chain))

    def crit_part(chain):
        out = Chain(chain.degree)
        for cell, c in chain.items():
            if field(cell) is None:
                out._add(cell, c)
        return out

    def g_cell(cell):
        return p_chain(Chain.single(cell, C.cell_dim(cell)))

    def f_cell(cell):
        return crit_part(p_chain(Chain.single(cell, C.cell_dim(cell))))

    basis_fn = None
    if C.is_effective:
        def basis_fn(k):
            return [c for c in C.basis(k) if field(c) is None]

    g = ChainMap(None, C, g_cell)     # source patched below

    def small_diff(cell):
        return crit_part(C.diff(g.on_cell(cell)))

    small = CCx(C.cell_dim, small_diff, basis_fn,
                name=name or (f"{C.name}crit" if C.name else "crit"),
                degree_cap=C.degree_cap)
    g.source = small
    g.target = C
    f = ChainMap(C, small, f_cell)
    return Reduction(C, small, f, g, h, name=name)


# ---------------------------------------------------------------------------
# equipped objects
# ---------------------------------------------------------------------------

@dataclass
class Equipped:
    """A space/complex together with a strong equivalence to an effective one."""
    obj: object                 # SimplicialSet or CCx, for reference
    chains: CCx                 # its chain complex (the big end of eq)
    eq: StrongEq

    def __post_init__(self):
        if self.eq.big is not self.chains:
            raise ValueError("equipment must start at the object's chains")
        if not self.eq.small.is_effective:
            raise ValueError("effective end of the equipment has no basis")

    @property
    def effective(self) -> CCx:
        return self.eq.small


def trivial_equipment(obj, C: CCx) -> Equipped:
    """A finite complex is equipped with itself via identity reductions."""
    return Equipped(obj, C, trivial_equivalence(C))


class EquippedHomology:
    """H_k of an equipped object, with class/representative transport."""

    def __init__(self, E: Equipped, k: int):
        self.E = E
        self.k = k
        self._solver = complex_homology(E.effective, k)
        self.group = self._solver.group

    def class_of(self, z: Chain):
        return self._solver.class_of(self.E.eq.push(z))

    def rep_of(self, elt) -> Chain:
        return self.E.eq.pull(self._solver.rep_of(elt))


def equipped_homology(E: Equipped, k: int) -> EquippedHomology:
    if E.effective.degree_cap is not None and k + 1 > E.effective.degree_cap:
        raise ValueError(f"degree {k} beyond the equipment's cap")
    return EquippedHomology(E, k)


# ---------------------------------------------------------------------------
# relocating the ends of a strong equivalence
# ---------------------------------------------------------------------------

def conjugate_big(eq: StrongEq, red: Reduction) -> StrongEq:
    """Extend the left leg by a further reduction eq.big => C'."""
    if red.source is not eq.big:
        raise ValueError("reduction must start at the big end")
    return StrongEq(eq.middle, compose_reductions(eq.left, red), eq.right)


def conjugate_small(eq: StrongEq, red: Reduction) -> StrongEq:
    """Extend the right leg by a further reduction eq.small => E'."""
    if red.source is not eq.small:
        raise ValueError("reduction must start at the small end")
    return StrongEq(eq.middle, eq.left, compose_reductions(eq.right, red))


# ---------------------------------------------------------------------------
# mapping cones over a strong equivalence
# ---------------------------------------------------------------------------

def _cone_maps(cone_src, cone_tgt, on_a, on_b):
    """Chain map between two cones given its action per tag."""

    def on_cell(cell):
        if cell.tag == "a":
            return on_a(cell.cell)
        return on_b(cell.cell)

    return ChainMap(cone_src, cone_tgt, on_cell)


def _retag(chain, tag, degree=None):
    return chain.map_cells(lambda x: Tag(tag, x), degree=degree)


def cone_reduction_left(red: Reduction, phi: ChainMap, cone_src, cone_tgt):
    """Cone(phi.f: M -> Y) => Cone(phi: X -> Y) from a reduction M => X.

    F(m, y) = (f m, y); G(x, y) = (g x, y); H(m, y) = (-h m, 0).
    """
    f, g, h = red.f, red.g, red.h

    F = _cone_maps(cone_src, cone_tgt,
                   lambda m: _retag(f.on_cell(m), "a",
                                    red.source.cell_dim(m) + 1),
                   lambda y: Chain.single(Tag("b", y), phi.target.cell_dim(y)))
    G = _cone_maps(cone_tgt, cone_src,
                   lambda x: _retag(g.on_cell(x), "a",
                                    red.target.cell_dim(x) + 1),
                   lambda y: Chain.single(Tag("b", y), phi.target.cell_dim(y)))

    def H_cell(cell):
        if cell.tag == "a":
            m = cell.cell
            return _retag(-h.on_cell(m), "a", red.source.cell_dim(m) + 2)
        return Chain.zero(cone_src.cell_dim(cell) + 1)

    return Reduction(cone_src, cone_tgt, F, G,
                     ChainMap(cone_src, cone_src, H_cell, shift=1))


def cone_reduction_right(red: Reduction, psi: ChainMap, cone_src, cone_tgt):
    """Cone(psi: W -> M) => Cone(f.psi: W -> Y) from a reduction M => Y.

    F(w, m) = (w, f m); G(w, y) = (w, g y - h psi w); H(w, m) = (0, h m).
    """
    f, g, h = red.f, red.g, red.h
    W = psi.source

    F = _cone_maps(cone_src, cone_tgt,
                   lambda w: Chain.single(Tag("a", w), W.cell_dim(w) + 1),
                   lambda m: _retag(f.on_cell(m), "b"))

    def G_cell(cell):
        if cell.tag == "a":
            w = cell.cell
            out = Chain.single(Tag("a", w), W.cell_dim(w) + 1)
            return out + _retag(-h(psi.on_cell(w)), "b")
        return _retag(g.on_cell(cell.cell), "b")

    def H_cell(cell):
        if cell.tag == "b":
            return _retag(h.on_cell(cell.cell), "b")
        return Chain.zero(cone_src.cell_dim(cell) + 1)

    return Reduction(cone_src, cone_tgt, F,
                     ChainMap(cone_tgt, cone_src, G_cell),
                     ChainMap(cone_src, cone_src, H_cell, shift=1))


def cone_reduction_push(red: Reduction, psi: ChainMap, cone_src, cone_tgt):
    """Cone(psi: M -> N) => Cone(psi.g: E -> N) from a reduction M => E.

    F(m, n) = (f m, n + psi h m); G(e, n) = (g e, n); H(m, n) = (-h m, 0).
    """
    f, g, h = red.f, red.g, red.h

    def F_cell(cell):
        if cell.tag == "a":
            m = cell.cell
            out = _retag(f.on_cell(m), "a", red.source.cell_dim(m) + 1)
            return out + _retag(psi(h.on_cell(m)), "b")
        return Chain.single(Tag("b", cell.cell),
                            psi.target.cell_dim(cell.cell))

    G = _cone_maps(cone_tgt, cone_src,
                   lambda e: _retag(g.on_cell(e), "a",
                                    red.target.cell_dim(e) + 1),
                   lambda n: Chain.single(Tag("b", n),
                                          psi.target.cell_dim(n)))

    def H_cell(cell):
        if cell.tag == "a":
            m = cell.cell
            return _retag(-h.on_cell(m), "a", red.source.cell_dim(m) + 2)
        return Chain.zero(cone_src.cell_dim(cell) + 1)

    return Reduction(cone_src, cone_tgt,
                     ChainMap(cone_src, cone_tgt, F_cell), G,
                     ChainMap(cone_src, cone_src, H_cell, shift=1))


def cone_equipment(phi: ChainMap, eqX: StrongEq, eqY: StrongEq) -> StrongEq:
    """Equip Cone(phi: X -> Y) given equipments of X and Y.

    The middle is the cone of phi lifted to the middles through the left
    legs; both projections factor through the three one-sided cone lemmas
    above.
    """
    if phi.source is not eqX.big or phi.target is not eqY.big:
        raise ValueError("phi must run between the big ends")
    LX, LY, RX, RY = eqX.left, eqY.left, eqX.right, eqY.right
    phi1 = compose_chain_maps(phi, LX.f)               # M_X -> Y
    phi2 = compose_chain_maps(LY.g, phi1)              # M_X -> M_Y
    phiE = compose_chain_maps(RY.f, phi2, RX.g)        # E_X -> E_Y

    cone_mid = mapping_cone(phi2)
    cone_big = mapping_cone(phi)
    cone_1 = mapping_cone(phi1)
    cone_er = mapping_cone(compose_chain_maps(RY.f, phi2))
    cone_eff = mapping_cone(phiE)

    left = compose_reductions(
        cone_reduction_right(LY, phi2, cone_mid, cone_1),
        cone_reduction_left(LX, phi, cone_1, cone_big))
    right = compose_reductions(
        cone_reduction_right(RY, phi2, cone_mid, cone_er),
        cone_reduction_push(RX, compose_chain_maps(RY.f, phi2),
                            cone_er, cone_eff))
    return StrongEq(cone_mid, left, right)


# ---------------------------------------------------------------------------
# normalizing the degree-0 part of an effective complex
# ---------------------------------------------------------------------------

def normalize_effective(eq: StrongEq) -> StrongEq:
    """Reduce the effective end to a single degree-0 cell with d_1 = 0.

    Change bases in degrees 0 and 1 so the boundary matrix becomes its
    Smith form, then collapse the unit pivots.  Requires H_0 = Z (torsion
    would leave nontrivial diagonal entries).
    """
    E = eq.small
    b0, b1 = E.basis(0), E.basis(1)
    if len(b0) == 1 and all(E.diff_cell(c).is_zero() for c in b1):
        return eq
    snf = smith_normal_form(diff_matrix(E, 1))
    r = snf.rank
    if len(b0) - r != 1 or any(d not in (0, 1) for d in snf.diagonal):
        raise ValueError("effective complex does not have H_0 = Z")

    def cb(k, i):
        return Tag(f"cb{k}", i)

    def dim_fn(cell):
        if isinstance(cell, Tag) and cell.tag in ("cb0", "cb1"):
            return 0 if cell.tag == "cb0" else 1
        return E.cell_dim(cell)

    def col_chain(mat, j, k):
        return Chain(k, [(cb(k, i), mat.get(i, j)) for i in range(mat.rows)])

    def fwd_chain(chain):
        """Rewrite a chain through the degree-0/1 base change."""
        if chain.degree == 0:
            out = Chain(0)
            for cell, c in chain.items():
                out = out + c * col_chain(snf.U, b0.index(cell), 0)
            return out
        if chain.degree == 1:
            out = Chain(1)
            for cell, c in chain.items():
                out = out + c * col_chain(snf.Vinv, b1.index(cell), 1)
            return out
        return chain

    def diff_cell(cell):
        if isinstance(cell, Tag) and cell.tag == "cb0":
            return Chain.zero(-1)
        if isinstance(cell, Tag) and cell.tag == "cb1":
            i = cell.cell
            return Chain.single(cb(0, i), 0, 1) if i < r else Chain.zero(0)
        return fwd_chain(E.diff_cell(cell))

    def basis_fn(k):
        if k == 0:
            return [cb(0, i) for i in range(len(b0))]
        if k == 1:
            return [cb(1, i) for i in range(len(b1))]
        return E.basis(k)

    Ecb = CCx(dim_fn, diff_cell, basis_fn, name=f"{E.name}~",
              degree_cap=E.degree_cap)

    def bwd_cell(cell):
        if isinstance(cell, Tag) and cell.tag == "cb0":
            return Chain(0, [(b0[j], snf.Uinv.get(j, cell.cell))
                             for j in range(len(b0))])
        if isinstance(cell, Tag) and cell.tag == "cb1":
            return Chain(1, [(b1[j], snf.V.get(j, cell.cell))
                             for j in range(len(b1))])
        return Chain.single(cell, E.cell_dim(cell))

    iso = iso_as_reduction(E, Ecb,
                           ChainMap(E, Ecb, lambda c: fwd_chain(
                               Chain.single(c, E.cell_dim(c)))),
                           ChainMap(Ecb, E, bwd_cell))

    def field(cell):
        if isinstance(cell, Tag) and cell.tag == "cb0" and cell.cell < r:
            return ("s", cb(1, cell.cell))
        if isinstance(cell, Tag) and cell.tag == "cb1" and cell.cell < r:
            return ("t", cb(0, cell.cell))
        return None

    collapse = morse_reduction(Ecb, field, name=f"{E.name}norm")
    return conjugate_small(eq, compose_reductions(iso, collapse))
