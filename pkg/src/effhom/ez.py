"""Eilenberg-Zilber machinery for Cartesian products.

C(X x Y) reduces onto C(X) (x) C(Y): f is the Alexander-Whitney map, g the
shuffle (Eilenberg-MacLane) map, and the homotopy h comes from a discrete
vector field on product cells.  A nondegenerate m-cell (a, b) of X x Y is
encoded by a word over {U, R, D}: position j is U when j is a stall of a,
R when it is a stall of b, and D otherwise (a "diagonal" step).  Critical
cells are the staircase words R...RU...U, which biject with the tensor
basis; every other cell is matched with a partner by splitting its first
defect (a D step, or a UR corner) into the corresponding UR pair.
"""

from __future__ import annotations

from itertools import combinations

from .chains import (Chain, ChainMap, TensorCCx, TensorCell,
                     normalized_chains, tensor)
from .reduction import (Equipped, Reduction, StrongEq,
                        compose_strong_equivalences, morse_reduction,
                        reduction_as_equivalence)
from .simplicial import PairCell, Simplex, nondeg, product


def _word(base: PairCell, m: int) -> str:
    da, db = set(base.a.degs), set(base.b.degs)
    return "".join("U" if j in da else "R" if j in db else "D"
                   for j in range(m))


def ez_field(P):
    """The product discrete vector field, on nondegenerate product simplices."""

    def field(s: Simplex):
        base = s.base
        m = s.dim
        w = _word(base, m)
        for j in range(m):
            if w[j] == "D":
                # source: split the diagonal step into U then R
                ta = P.X.degeneracy(j, base.a)
                tb = P.Y.degeneracy(j + 1, base.b)
                return ("s", nondeg(PairCell(ta, tb), m + 1))
            if w[j] == "U" and j + 1 < m and w[j + 1] == "R":
                # target: its source is the (j+1)-st face (merge UR into D)
                f = P.face(j + 1, s)
                return ("t", f)
        return None

    return field


def _front_face(X, s: Simplex, j: int) -> Simplex:
    """d_{j+1} ... d_k s (the front j-face)."""
    while s.dim > j:
        s = X.face(s.dim, s)
    return s


def _back_face(Y, s: Simplex, j: int) -> Simplex:
    """d_0^j s (the back face of codimension j)."""
    for _ in range(j):
        s = Y.face(0, s)
    return s


def aw(P, CP, T) -> ChainMap:
    """Alexander-Whitney map C(X x Y) -> C(X) (x) C(Y).

    AW(sigma, tau) = sum_j (front j-face of sigma) (x) (back face of tau).
    """

    def on_cell(s: Simplex):
        a, b = P.components(s)
        k = s.dim
        out = Chain(k)
        for j in range(k + 1):
            front = _front_face(P.X, a, j)
            back = _back_face(P.Y, b, j)
            if front.is_degenerate() or back.is_degenerate():
                continue
            out._add(TensorCell((front, back), (j, k - j)), 1)
        return out

    return ChainMap(CP, T, on_cell, name="AW")


def _shuffles(p, q):
    """(alpha, beta, sign) over all (p, q)-shuffles of {0..p+q-1}.

    alpha (|alpha| = q) collects the stall positions of the first factor,
    beta those of the second; the sign is the shuffle parity, counted as
    pairs (u in alpha, v in beta) with v > u.
    """
    idx = range(p + q)
    for alpha in combinations(idx, q):
        aset = set(alpha)
        beta = tuple(j for j in idx if j not in aset)
        inv = sum(1 for u in alpha for v in beta if v > u)
        yield alpha, beta, -1 if inv % 2 else 1


def eml(P, CP, T) -> ChainMap:
    """Shuffle map C(X) (x) C(Y) -> C(X x Y)."""

    def on_cell(cell: TensorCell):
        x, y = cell.parts
        p, q = cell.dims
        m = p + q
        out = Chain(m)
        for alpha, beta, sign in _shuffles(p, q):
            a = Simplex(x.base, alpha, m) if alpha else x
            b = Simplex(y.base, beta, m) if beta else y
            out._add(nondeg(PairCell(a, b), m), sign)
        return out

    return ChainMap(T, CP, on_cell, name="EML")


def ez_reduction(X, Y, CX=None, CY=None, P=None, CP=None, T=None) -> Reduction:
    """The Eilenberg-Zilber reduction C(X x Y) => C(X) (x) C(Y)."""
    P = P if P is not None else product(X, Y)
    CP = CP if CP is not None else normalized_chains(P)
    CX = CX if CX is not None else normalized_chains(X)
    CY = CY if CY is not None else normalized_chains(Y)
    T = T if T is not None else tensor([CX, CY])
    mred = morse_reduction(CP, ez_field(P), name="EZ")
    f = aw(P, CP, T)
    g = eml(P, CP, T)
    return Reduction(CP, T, f, g, mred.h, name="EZ")


def morse_ez_reduction(X, Y):
    """The raw Morse reduction onto critical product cells (for testing)."""
    P = product(X, Y)
    CP = normalized_chains(P)
    return P, morse_reduction(CP, ez_field(P))


# ---------------------------------------------------------------------------
# tensor products of reductions and strong equivalences
# ---------------------------------------------------------------------------

def tensor_of_reductions(reds, source=None, target=None) -> Reduction:
    """F = (x)f_i, G = (x)g_i, H telescopes:

        H = h1 (x) id (x) ... + g1 f1 (x) h2 (x) id ... + ...

    with the Koszul sign (-1)^(degree left of the h slot) on each summand.
    """
    reds = list(reds)
    source = source if source is not None else tensor([r.source for r in reds])
    target = target if target is not None else tensor([r.target for r in reds])

    def combine(chains_per_slot, degree, coeff=1):
        """Expand a tuple of per-slot chains into a chain of tensor cells."""
        out = Chain(degree)

        def rec(i, parts, dims, c):
            if i == len(chains_per_slot):
                out._add(TensorCell(tuple(parts), tuple(dims)), c)
                return
            for cell, v in chains_per_slot[i].items():
                rec(i + 1, parts + [cell], dims + [chains_per_slot[i].degree],
                    c * v)

        rec(0, [], [], coeff)
        return out

    def F_cell(cell):
        per = [r.f.on_cell(p) for r, p in zip(reds, cell.parts)]
        return combine(per, cell.degree)

    def G_cell(cell):
        per = [r.g.on_cell(p) for r, p in zip(reds, cell.parts)]
        return combine(per, cell.degree)

    def H_cell(cell):
        out = Chain(cell.degree + 1)
        left_deg = 0
        for i, r in enumerate(reds):
            per = []
            ok = True
            for j, (rj, p) in enumerate(zip(reds, cell.parts)):
                if j < i:
                    c = rj.g(rj.f.on_cell(p))
                elif j == i:
                    c = rj.h.on_cell(p)
                else:
                    c = Chain.single(p, cell.dims[j])
                if c.is_zero():
                    ok = False
                    break
                per.append(c)
            if ok:
                sign = -1 if left_deg % 2 else 1
                out = out + combine(per, cell.degree + 1, sign)
            left_deg += cell.dims[i]
        return out

    return Reduction(source, target,
                     ChainMap(source, target, F_cell),
                     ChainMap(target, source, G_cell),
                     ChainMap(source, source, H_cell, shift=1))


def tensor_of_equivalences(eqs, big=None, small=None) -> StrongEq:
    """Slotwise tensor of strong equivalences."""
    eqs = list(eqs)
    middle = tensor([e.middle for e in eqs])
    big = big if big is not None else tensor([e.big for e in eqs])
    small = small if small is not None else tensor([e.small for e in eqs])
    left = tensor_of_reductions([e.left for e in eqs], source=middle, target=big)
    right = tensor_of_reductions([e.right for e in eqs], source=middle,
                                 target=small)
    return StrongEq(middle, left, right)


# ---------------------------------------------------------------------------
# equipped products
# ---------------------------------------------------------------------------

def product_equivalence(factors) -> Equipped:
    """Equip X1 x ... x Xn (right-associated) given equipped factors."""
    factors = list(factors)
    if not factors:
        raise ValueError("empty product")
    if len(factors) == 1:
        return factors[0]
    head, rest = factors[0], product_equivalence(factors[1:])
    P = product(head.obj, rest.obj)
    CP = normalized_chains(P)
    T = tensor([head.chains, rest.chains])
    ez = ez_reduction(head.obj, rest.obj, CX=head.chains, CY=rest.chains,
                      P=P, CP=CP, T=T)
    teq = tensor_of_equivalences([head.eq, rest.eq], big=T)
    eq = compose_strong_equivalences(reduction_as_equivalence(ez), teq)
    return Equipped(P, CP, eq)
