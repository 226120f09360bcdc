"""Standard simplicial Eilenberg-MacLane models K(pi,n) and E(pi,n).

An m-simplex of K(pi,n) is an n-cocycle on Delta^m with coefficients in
pi; E(pi,n) carries all n-cochains.  A simplex is stored as a raw value
(m, labels) with labels a sorted tuple of (ascending (n+1)-tuple, nonzero
pi-element); faces and degeneracies act by pulling back cochains along
the coface/codegeneracy vertex maps.  On top of the models live the
fibration delta: E(pi,n) -> K(pi,n+1), its twisting operator tau and
pseudo-section psi, the classifying-space construction WBar with its
isomorphism to K(pi,n+1), and the equipment constructors for K(Z,1),
K(Z/m,1) and general K(pi,n).
"""

from __future__ import annotations

from itertools import combinations

from .abgroup import AbGroup, Z, cyclic
from .chains import (Chain, ChainMap, Cochain, circle_complex,
                     induced_chain_map, normalized_chains, z_complex)
from .reduction import (Equipped, Reduction, compose_reductions,
                        conjugate_big, iso_as_reduction, morse_reduction,
                        reduction_as_equivalence)
from .simplicial import RawSSet, Simplex, SMap, nondeg


def _label(raw, t):
    """The label of a raw simplex at the tuple t (group zero left to caller)."""
    for tt, v in raw[1]:
        if tt == t:
            return v
    return None


class EMSpace(RawSSet):
    """K(pi,n) (kind "K") or E(pi,n) (kind "E")."""

    def __init__(self, group: AbGroup, n: int, kind: str = "K", name=None):
        self.group = group
        self.n = n
        self.kind = kind
        self.name = name or f"{kind}({group.render()},{n})"

    def make_raw(self, m, label_items):
        """Canonical raw value from an iterable of (tuple, value) pairs."""
        acc = {}
        for t, v in label_items:
            v = self.group.reduce(v)
            if t in acc:
                v = self.group.add(acc[t], v)
            acc[t] = v
        labels = tuple(sorted((t, v) for t, v in acc.items()
                              if not self.group.is_zero(v)))
        return (m, labels)

    def label(self, raw, t):
        v = _label(raw, t)
        return self.group.zero() if v is None else v

    def raw_dim(self, raw):
        return raw[0]

    def raw_face(self, i, raw):
        m, labels = raw
        out = []
        for t, v in labels:
            if i in t:
                continue
            out.append((tuple(j if j < i else j - 1 for j in t), v))
        return (m - 1, tuple(sorted(out)))

    def raw_degeneracy(self, i, raw):
        m, labels = raw
        out = []
        for t, v in labels:
            shifted = tuple(j if j < i else j + 1 for j in t)
            if i in t:
                # the i slot lifts to either i or i+1
                k = t.index(i)
                out.append((shifted[:k] + (i,) + shifted[k + 1:], v))
                out.append((shifted[:k] + (i + 1,) + shifted[k + 1:], v))
            else:
                out.append((shifted, v))
        return self.make_raw(m + 1, out)

    # -- abelian simplicial group structure -------------------------------

    def raw_unit(self, m):
        return (m, ())

    def raw_add(self, x, y):
        if x[0] != y[0]:
            raise ValueError("dimension mismatch in simplex addition")
        return self.make_raw(x[0], list(x[1]) + list(y[1]))

    def raw_neg(self, x):
        return (x[0], tuple(sorted((t, self.group.neg(v)) for t, v in x[1])))

    def is_cocycle(self, raw):
        """Check the coboundary of a raw simplex vanishes."""
        return not _delta_raw(self, raw)[1]

    def zero_simplex(self, m) -> Simplex:
        return self.canon(self.raw_unit(m))


def _delta_raw(space: EMSpace, raw):
    """Coboundary: an n-cochain on Delta^m as an (n+1)-cochain."""
    m, labels = raw
    out = []
    for t, v in labels:
        for w in range(m + 1):
            if w in t:
                continue
            pos = sum(1 for x in t if x < w)
            nt = t[:pos] + (w,) + t[pos:]
            out.append((nt, space.group.scale((-1) ** pos, v)))
    return space.make_raw(m, out)


def delta_map(E: EMSpace, K: EMSpace) -> SMap:
    """The fibration projection E(pi,n) -> K(pi,n+1), z -> delta z."""
    if E.kind != "E" or K.kind != "K" or K.n != E.n + 1:
        raise ValueError("delta runs E(pi,n) -> K(pi,n+1)")
    return SMap(E, K, lambda raw: K.canon(_delta_raw(E, raw)), name="delta")


def twisting_tau(space_down: EMSpace, raw):
    """tau(z)(i_0..i_n) = z(0, i_0+1, ..) - z(1, i_0+1, ..), raw level.

    Takes a raw simplex of K(pi,n+1) of dimension l >= 1 and produces a raw
    simplex of K(pi,n) of dimension l - 1; `space_down` is the target model.
    """
    m, labels = raw
    out = []
    for t, v in labels:
        if t[0] == 0:
            out.append((tuple(x - 1 for x in t[1:]), v))
        elif t[0] == 1:
            out.append((tuple(x - 1 for x in t[1:]), space_down.group.neg(v)))
    return space_down.make_raw(m - 1, out)


def pseudo_section_psi(space_E: EMSpace, raw):
    """psi(z)(i_0,..,i_n) = z(0, i_0, .., i_n), and 0 whenever i_0 = 0.

    A raw simplex of K(pi,n+1) becomes a raw simplex of E(pi,n) of the same
    dimension, with delta(psi(z)) = z for cocycles z.
    """
    m, labels = raw
    out = [(t[1:], v) for t, v in labels if t[0] == 0]
    return space_E.make_raw(m, out)


def ev(space: EMSpace, chain: Chain):
    """Evaluate a degree-n chain on the fundamental cochain; values in pi."""
    if chain.degree != space.n and not chain.is_zero():
        raise ValueError(f"ev needs degree {space.n}, got {chain.degree}")
    top = tuple(range(space.n + 1))
    acc = space.group.zero()
    for cell, c in chain.items():
        acc = space.group.add(acc,
                              space.group.scale(c, space.label(cell.base, top)))
    return acc


def cochain_to_map(kappa: Cochain, X, target: EMSpace) -> SMap:
    """The simplicial map adjoint to a pi-valued cochain on X.

    The image of a simplex carries, at each (n+1)-tuple of its vertices,
    the value of kappa on the corresponding face (zero on degenerate
    faces).  Lands in the K model exactly when kappa is a cocycle.
    """
    n = target.n

    def on_base(base):
        m = X.dim_of(base)
        s0 = nondeg(base, m)
        items = []
        for t in combinations(range(m + 1), n + 1):
            face = s0
            for i in sorted(set(range(m + 1)) - set(t), reverse=True):
                face = X.face(i, face)
            if face.is_degenerate():
                continue
            items.append((t, kappa.eval_cell(face)))
        return target.canon(target.make_raw(m, items))

    return SMap(X, target, on_base)


def map_to_cochain(f: SMap, space: EMSpace) -> Cochain:
    """Read back the cochain of a simplicial map into E(pi,n) or K(pi,n)."""
    top = tuple(range(space.n + 1))

    def eval_cell(cell):
        img = f(cell)
        if img.is_degenerate():
            return space.group.zero()
        return space.label(img.base, top)

    return Cochain(space.group, space.n, eval_cell)


# ---------------------------------------------------------------------------
# the classifying-space construction
# ---------------------------------------------------------------------------

class WBar(RawSSet):
    """W-bar of an abelian simplicial group given by raw operators.

    An m-simplex is a tuple (g_{m-1}, ..., g_0) of raw simplices of G with
    the displayed dimensions; the tuple is stored top-degree first.
    """

    def __init__(self, G, name=None):
        self.G = G
        self.name = name or f"WBar({getattr(G, 'name', G)})"

    def raw_dim(self, w):
        return len(w)

    def raw_face(self, i, w):
        m = len(w)
        if i == 0:
            return w[1:]
        i -= 1
        out = [self.G.raw_face(i - j, w[j]) for j in range(i)]
        if i < m - 1:
            out.append(self.G.raw_add(self.G.raw_face(0, w[i]), w[i + 1]))
            out.extend(w[i + 2:])
        return tuple(out)

    def raw_degeneracy(self, i, w):
        m = len(w)
        if i == 0:
            return (self.G.raw_unit(m),) + w
        i -= 1
        out = [self.G.raw_degeneracy(i - j, w[j]) for j in range(i + 1)]
        out.append(self.G.raw_unit(m - i - 1))
        out.extend(w[i + 1:])
        return tuple(out)

    # componentwise group structure
    def raw_unit(self, m):
        return tuple(self.G.raw_unit(j) for j in range(m - 1, -1, -1))

    def raw_add(self, x, y):
        return tuple(self.G.raw_add(a, b) for a, b in zip(x, y))

    def raw_neg(self, x):
        return tuple(self.G.raw_neg(a) for a in x)


def wbar_twist(W: WBar):
    """The canonical twisting of the universal bundle: top coordinate."""

    def tau_s(s: Simplex) -> Simplex:
        raw = W.uncanon(s)
        return W.G.canon(raw[0])

    return tau_s


def wbar_iso(G: EMSpace, K: EMSpace, W: WBar):
    """Simplicial isomorphism K(pi,n+1) <-> WBar K(pi,n) (both directions).

    Forward: z -> (tau(z), tau(d0 z), tau(d0^2 z), ...).  The inverse is
    solved dimension by dimension: labels with i_0 >= 1 come from the
    inverted d0-tail, labels with i_0 = 0 from the top tuple entry plus a
    correction read off the tail.
    """
    width = K.n + 1     # number of entries in a label tuple of K

    def raw_fwd(z):
        m = z[0]
        cur = z
        out = []
        for _ in range(m):
            out.append(twisting_tau(G, cur))
            cur = K.raw_face(0, cur)
        return tuple(out)

    def raw_bwd(w):
        m = len(w)
        if m == 0:
            return (0, ())
        zp = raw_bwd(w[1:])
        items = []
        for t in combinations(range(m + 1), width):
            if t[0] >= 1:
                v = _label(zp, tuple(x - 1 for x in t))
                if v is not None:
                    items.append((t, v))
                continue
            rest = tuple(x - 1 for x in t[1:])
            v = G.label(w[0], rest)
            if t[1] >= 2:
                v2 = _label(zp, (0,) + rest)
                if v2 is not None:
                    v = K.group.add(v, v2)
            items.append((t, v))
        return K.make_raw(m, items)

    fwd = SMap(K, W, lambda z: W.canon(raw_fwd(z)), name="wbar-iso")
    bwd = SMap(W, K, lambda w: K.canon(raw_bwd(w)), name="wbar-iso-inv")
    return fwd, bwd


# ---------------------------------------------------------------------------
# bar coordinates on K(Z,1) and the circle equipment
# ---------------------------------------------------------------------------

def _bars_of(space: EMSpace, cell: Simplex):
    """[b_1|...|b_m] coordinates of a nondegenerate simplex of K(pi,1)."""
    return [space.label(cell.base, (i - 1, i)) for i in range(1, cell.dim + 1)]


def _cell_from_bars(space: EMSpace, bars) -> Simplex:
    m = len(bars)
    items = []
    for i in range(m):
        acc = space.group.zero()
        for j in range(i, m):
            acc = space.group.add(acc, bars[j])
            items.append(((i, j + 1), acc))
    return nondeg(space.make_raw(m, items), m)


def kz1_field(space: EMSpace):
    """Collapse of K(Z,1) onto the circle, in bar coordinates.

    Critical cells: [] and [1].  A cell ending in 1 (length >= 2) is a
    collapse target; its source merges the trailing 1 into the previous
    entry.  Every other cell is a source, splitting a 1 off its last entry.
    """
    def field(cell):
        m = cell.dim
        if m == 0:
            return None
        bars = [b[0] for b in _bars_of(space, cell)]
        if m == 1 and bars == [1]:
            return None
        if m >= 2 and bars[-1] == 1:
            c = bars[:-1]
            if c[-1] >= 1:
                src = c[:-1] + [c[-1] + 1]
            else:
                src = c
            return ("t", _cell_from_bars(space, [(b,) for b in src]))
        b = bars[-1]
        if b >= 2:
            tgt = bars[:-1] + [b - 1, 1]
        else:
            tgt = bars + [1]
        return ("s", _cell_from_bars(space, [(x,) for x in tgt]))

    return field


def kz1_equivalence() -> Equipped:
    """Equip K(Z,1) with the circle complex via the bar-coordinate collapse."""
    K = EMSpace(Z, 1)
    C = normalized_chains(K, name="C(K(Z,1))")
    red = morse_reduction(C, kz1_field(K), name="kz1")
    circ = circle_complex()

    def fwd(cell):
        return Chain.single("e1" if cell.dim == 1 else "e0", cell.dim)

    def bwd(cell):
        if cell == "e0":
            return Chain.single(K.zero_simplex(0), 0)
        return Chain.single(_cell_from_bars(K, [(1,)]), 1)

    iso = iso_as_reduction(red.target, circ,
                           ChainMap(red.target, circ, fwd),
                           ChainMap(circ, red.target, bwd))
    eq = reduction_as_equivalence(compose_reductions(red, iso))
    return Equipped(K, C, eq)


# ---------------------------------------------------------------------------
# potential coordinates (used for the cyclic-group quotient fibration)
# ---------------------------------------------------------------------------

def potential_to_raw(space: EMSpace, vals):
    """Raw simplex of K(pi,1) from a vertex potential (a_1,..,a_m), a_0=0."""
    m = len(vals)
    full = (space.group.zero(),) + tuple(space.group.reduce(v) for v in vals)
    items = []
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            items.append(((i, j), space.group.sub(full[j], full[i])))
    return space.make_raw(m, items)


def raw_to_potential(space: EMSpace, raw):
    m = raw[0]
    return [space.label(raw, (0, i)) for i in range(1, m + 1)]


# ---------------------------------------------------------------------------
# equipment of the cyclic and general Eilenberg-MacLane spaces
# ---------------------------------------------------------------------------

def kzm1_twist(G: EMSpace, Bm: EMSpace):
    """Twisting operator of the quotient fibration K(Z,1) -> K(Z/m,1).

    In potential coordinates the entries t_i = (iota(b_{i+1}) - iota(b_1)
    - iota(b_{i+1} - b_1)) / m land in {0,-1}, with iota: Z/m -> {0..m-1}.
    """
    m = Bm.group.mm[0]

    def iota(v):
        return v[0] % m

    def tau(s: Simplex) -> Simplex:
        raw = Bm.uncanon(s)
        pots = raw_to_potential(Bm, raw)
        vals = []
        for i in range(1, raw[0]):
            t = (iota(pots[i]) - iota(pots[0])
                 - iota(Bm.group.sub(pots[i], pots[0]))) // m
            vals.append((t,))
        return G.canon(potential_to_raw(G, vals))

    return tau


def kzm1_equivalence(m: int) -> Equipped:
    """Equip K(Z/m,1) by dividing the quotient fibration K(Z,1) -> K(Z/m,1).

    K(Z,1) x_tau K(Z/m,1) is simplicially isomorphic to K(Z,1) in potential
    coordinates via c_i = m a_i + iota(b_i) (iota: Z/m -> {0..m-1}); the
    twisting entries t_i = (iota(b_{i+1}) - iota(b_1) - iota(b_{i+1}-b_1))/m
    lie in {0,-1}.  Transport the circle equipment through the isomorphism
    and divide.
    """
    if m < 2:
        raise ValueError("the cyclic order must be at least 2")
    from .bar import TwistedProductSSet, twisted_division
    kz1 = kz1_equivalence()
    G = kz1.obj
    Bm = EMSpace(cyclic(m), 1)
    tau = kzm1_twist(G, Bm)

    def iota(v):
        return v[0] % m

    TP = TwistedProductSSet(G, Bm, tau)
    CTP = normalized_chains(TP, name=f"C(K(Z,1)x_tK(Z/{m},1))")

    def phi_base(base):
        s = TP.simplex(base)
        a_s, b_s = TP.components(s)
        pa = raw_to_potential(G, G.uncanon(a_s))
        pb = raw_to_potential(Bm, Bm.uncanon(b_s))
        return G.canon(potential_to_raw(
            G, [(m * a[0] + iota(b),) for a, b in zip(pa, pb)]))

    def phi_inv_base(raw):
        pc = raw_to_potential(G, raw)
        a_vals = [(c[0] - c[0] % m) // m for c in pc]
        b_vals = [c[0] % m for c in pc]
        return TP.pair(G.canon(potential_to_raw(G, [(a,) for a in a_vals])),
                       Bm.canon(potential_to_raw(Bm, [(b,) for b in b_vals])))

    fwd = SMap(TP, G, phi_base, name="quot-iso")
    bwd = SMap(G, TP, phi_inv_base, name="quot-iso-inv")
    total = Equipped(TP, CTP, conjugate_big(
        kz1.eq, iso_as_reduction(kz1.chains, CTP,
                                 induced_chain_map(bwd, kz1.chains, CTP),
                                 induced_chain_map(fwd, CTP, kz1.chains))))
    CB = normalized_chains(Bm, name=f"C(K(Z/{m},1))")
    return twisted_division(kz1, total, tau, Bm, CB=CB)


def _split_raw(space: EMSpace, raw, j, sub: EMSpace):
    """Project a raw simplex of K(pi,n) to its j-th cyclic component."""
    m, labels = raw
    return sub.make_raw(m, [(t, (v[j],)) for t, v in labels])


def _merge_raws(space: EMSpace, raws):
    """Assemble a raw simplex of K(pi,n) from per-component raws."""
    m = raws[0][0]
    items = {}
    for j, raw in enumerate(raws):
        for t, v in raw[1]:
            cur = items.get(t)
            if cur is None:
                cur = list(space.group.zero())
                items[t] = cur
            cur[j] = v[0]
    return space.make_raw(m, [(t, tuple(v)) for t, v in items.items()])


def _em1_equivalence(pi: AbGroup) -> Equipped:
    from .ez import product_equivalence
    from .simplicial import ProductSSet
    K = EMSpace(pi, 1)
    if pi.ngens == 0:
        C = normalized_chains(K, name="C(K(0,1))")
        Zc = z_complex()
        red = iso_as_reduction(
            C, Zc,
            ChainMap(C, Zc, lambda c: Chain.single("*", 0)),
            ChainMap(Zc, C, lambda c: Chain.single(K.zero_simplex(0), 0)))
        return Equipped(K, C, reduction_as_equivalence(red))
    if pi.ngens == 1:
        return kz1_equivalence() if pi.mm[0] == 0 else kzm1_equivalence(pi.mm[0])

    subs = [EMSpace(AbGroup((mj,)), 1) for mj in pi.mm]
    factors = [kz1_equivalence() if mj == 0 else kzm1_equivalence(mj)
               for mj in pi.mm]
    prod = product_equivalence(factors)

    def embed(sset, js, raws):
        if isinstance(sset, ProductSSet) and len(js) > 1:
            a = embed(sset.X, js[:1], raws)
            b = embed(sset.Y, js[1:], raws)
            return sset.pair(a, b)
        return sset.canon(raws[js[0]])

    def fwd_base(raw):
        raws = [_split_raw(K, raw, j, subs[j]) for j in range(len(subs))]
        return embed(prod.obj, list(range(len(subs))), raws)

    def components_of(sset, s):
        if isinstance(sset, ProductSSet):
            a, b = sset.components(s)
            return [(sset.X, a)] + components_of(sset.Y, b)
        return [(sset, s)]

    def bwd_base(base):
        s = prod.obj.simplex(base)
        comps = components_of(prod.obj, s)
        raws = [space.uncanon(cs) for space, cs in comps]
        return K.canon(_merge_raws(K, raws))

    fwd = SMap(K, prod.obj, fwd_base, name="split")
    bwd = SMap(prod.obj, K, bwd_base, name="merge")
    C = normalized_chains(K, name=f"C(K({pi.render()},1))")
    eq = conjugate_big(prod.eq, iso_as_reduction(
        prod.chains, C,
        induced_chain_map(bwd, prod.chains, C),
        induced_chain_map(fwd, C, prod.chains)))
    return Equipped(K, C, eq)


def _em_step(prev: Equipped) -> Equipped:
    """Equip K(pi,n+1) from equipped K(pi,n) via the universal bundle.

    The total space K(pi,n) x_tau WBar is contractible, with an explicit
    contraction whose homotopy prepends the fibre coordinate to the base
    word; twisted division then equips WBar, and the classifying-space
    isomorphism carries the result to the standard model.
    """
    from .bar import TwistedProductSSet, twisted_division
    G = prev.obj
    pi, n = G.group, G.n
    W = WBar(G)
    tau = wbar_twist(W)
    TP = TwistedProductSSet(G, W, tau)
    CTP = normalized_chains(TP, name=f"C(K({pi.render()},{n})xW)")
    Zc = z_complex()
    vertex = TP.pair(G.zero_simplex(0), W.canon(()))

    def f_cell(cell):
        k = cell.dim
        return Chain.single("*", 0) if k == 0 else Chain.zero(k)

    def h_cell(cell):
        ell = cell.dim
        a_s, b_s = TP.components(cell)
        gamma = G.uncanon(a_s)
        omega = W.uncanon(b_s)
        out = TP.pair(G.canon(G.raw_unit(ell + 1)),
                      W.canon((gamma,) + omega))
        if out.is_degenerate():
            return Chain.zero(ell + 1)
        return Chain.single(out, ell + 1)

    contraction = Reduction(
        CTP, Zc,
        ChainMap(CTP, Zc, f_cell),
        ChainMap(Zc, CTP, lambda c: Chain.single(vertex, 0)),
        ChainMap(CTP, CTP, h_cell, shift=1), name="bundle-contraction")
    total = Equipped(TP, CTP, reduction_as_equivalence(contraction))
    CW = normalized_chains(W, name=f"C(WK({pi.render()},{n}))")
    div = twisted_division(prev, total, tau, W, CB=CW)

    K1 = EMSpace(pi, n + 1)
    CK1 = normalized_chains(K1, name=f"C(K({pi.render()},{n + 1}))")
    fwd, bwd = wbar_iso(G, K1, W)
    eq = conjugate_big(div.eq, iso_as_reduction(
        CW, CK1,
        induced_chain_map(bwd, CW, CK1),
        induced_chain_map(fwd, CK1, CW)))
    return Equipped(K1, CK1, eq)


_em_cache = {}


def em_equivalence(pi: AbGroup, n: int) -> Equipped:
    """Equipped standard model K(pi,n) for a finitely generated abelian pi."""
    if n < 1:
        raise ValueError("em_equivalence needs n >= 1")
    key = (pi.mm, n)
    hit = _em_cache.get(key)
    if hit is not None:
        return hit
    out = _em1_equivalence(pi) if n == 1 else _em_step(em_equivalence(pi, n - 1))
    _em_cache[key] = out
    return out
