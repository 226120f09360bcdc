"""Exact integer linear algebra: Smith normal form and homology solvers.

Everything here is deterministic: the same input matrix always produces the
same transforms, so repeated homology computations fix the same isomorphism
H_k -> Z^r + Z/m_1 + ... (the Postnikov engine depends on that).
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroup import AbGroup


class IntMatrix:
    """Sparse integer matrix with explicit shape.

    Entries are stored in a dict (i, j) -> nonzero int.  Dense row lists are
    produced on demand for elimination-style algorithms.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                if v:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise IndexError((i, j))
                    self.entries[(i, j)] = int(v)

    @classmethod
    def from_rows(cls, rows_data, cols=None):
        rows_data = [list(r) for r in rows_data]
        rows = len(rows_data)
        if cols is None:
            cols = len(rows_data[0]) if rows_data else 0
        e = {}
        for i, row in enumerate(rows_data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    e[(i, j)] = int(v)
        return cls(rows, cols, e)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    def get(self, i, j):
        return self.entries.get((i, j), 0)

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         {(j, i): v for (i, j), v in self.entries.items()})

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (i, j), v in self.entries.items():
            by_row.setdefault(i, []).append((j, v))
        out = {}
        other_rows = {}
        for (j, k), w in other.entries.items():
            other_rows.setdefault(j, []).append((k, w))
        for i, terms in by_row.items():
            acc = {}
            for j, v in terms:
                for k, w in other_rows.get(j, ()):
                    acc[k] = acc.get(k, 0) + v * w
            for k, s in acc.items():
                if s:
                    out[(i, k)] = s
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec):
        """Matrix-vector product over int tuples/lists."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] += v * vec[j]
        return out

    def column(self, j):
        return [self.get(i, j) for i in range(self.rows)]

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        raise TypeError("IntMatrix is mutable-ish; not hashable")

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


@dataclass
class SNF:
    """D = U * A * V with U, V unimodular; D diagonal with d_1 | d_2 | ..."""

    D: IntMatrix
    U: IntMatrix
    Uinv: IntMatrix
    V: IntMatrix
    Vinv: IntMatrix

    @property
    def diagonal(self):
        n = min(self.D.rows, self.D.cols)
        return [self.D.get(i, i) for i in range(n)]

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: IntMatrix) -> SNF:
    """Diagonalize A over Z, tracking all four transforms.

    Pivoting picks the nonzero entry of minimal absolute value (first in
    row-major order on ties), which keeps coefficient growth tame at the
    matrix sizes arising here and makes the output deterministic.
    """
    m, n = A.rows, A.cols
    M = A.to_rows()
    U = IntMatrix.identity(m).to_rows()
    Ui = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()
    Vi = IntMatrix.identity(n).to_rows()

    # Row op on M and U: row_i -= q * row_s   <=>   Uinv: col_s += q * col_i.
    def row_sub(i, s, q):
        Mi, Ms = M[i], M[s]
        for j in range(n):
            Mi[j] -= q * Ms[j]
        Uii, Us = U[i], U[s]
        for j in range(m):
            Uii[j] -= q * Us[j]
        for r in range(m):
            Ui[r][s] += q * Ui[r][i]

    def col_sub(j, s, q):
        for r in range(m):
            M[r][j] -= q * M[r][s]
        for r in range(n):
            V[r][j] -= q * V[r][s]
        Vs = Vi[s]
        Vj = Vi[j]
        for c in range(n):
            Vs[c] += q * Vj[c]

    def row_swap(i, s):
        M[i], M[s] = M[s], M[i]
        U[i], U[s] = U[s], U[i]
        for r in range(m):
            Ui[r][i], Ui[r][s] = Ui[r][s], Ui[r][i]

    def col_swap(j, s):
        for r in range(m):
            M[r][j], M[r][s] = M[r][s], M[r][j]
        for r in range(n):
            V[r][j], V[r][s] = V[r][s], V[r][j]
        Vi[j], Vi[s] = Vi[s], Vi[j]

    def row_negate(i):
        for j in range(n):
            M[i][j] = -M[i][j]
        for j in range(m):
            U[i][j] = -U[i][j]
        for r in range(m):
            Ui[r][i] = -Ui[r][i]

    t = 0
    while True:
        # locate pivot: min |value| over the trailing block
        pivot = None
        best = None
        for i in range(t, m):
            Mi = M[i]
            for j in range(t, n):
                v = Mi[j]
                if v:
                    a = abs(v)
                    if best is None or a < best:
                        best = a
                        pivot = (i, j)
                        if a == 1:
                            break
            if best == 1:
                break
        if pivot is None:
            break
        i, j = pivot
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        if M[t][t] < 0:
            row_negate(t)

        # clear row and column t; restart pivot search if residues pop up
        dirty = False
        for i in range(t + 1, m):
            if M[i][t]:
                q = M[i][t] // M[t][t]
                row_sub(i, t, q)
                if M[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if M[t][j]:
                q = M[t][j] // M[t][t]
                col_sub(j, t, q)
                if M[t][j]:
                    dirty = True
        if dirty:
            continue

        # enforce divisibility of the remaining block by the pivot
        d = M[t][t]
        bad = None
        for i in range(t + 1, m):
            Mi = M[i]
            for j in range(t + 1, n):
                if Mi[j] % d:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            # fold the offending row into row t and re-eliminate
            row_sub(t, bad, -1)
            continue
        t += 1

    D = IntMatrix.from_rows(M, cols=n)
    return SNF(D=D,
               U=IntMatrix.from_rows(U, cols=m),
               Uinv=IntMatrix.from_rows(Ui, cols=m),
               V=IntMatrix.from_rows(V, cols=n),
               Vinv=IntMatrix.from_rows(Vi, cols=n))


def kernel_basis_and_complement(d: IntMatrix):
    """Integer basis of ker(d), extended unimodularly to the full module.

    Returns (kernel_vectors, complement_vectors); stacking them in that
    order gives a square matrix of determinant +-1.
    """
    s = smith_normal_form(d)
    diag = s.diagonal
    kernel, complement = [], []
    for j in range(d.cols):
        v = tuple(s.V.get(i, j) for i in range(d.cols))
        if j < len(diag) and diag[j] != 0:
            complement.append(v)
        else:
            kernel.append(v)
    return kernel, complement


class HomologySolver:
    """H_k = ker(d_k) / im(d_{k+1}) with class / representative / witness maps.

    Works on integer coordinate vectors over the degree-k basis; chain-level
    wrappers live with the chain-complex code.
    """

    def __init__(self, d_k: IntMatrix, d_k1: IntMatrix):
        if d_k.cols != d_k1.rows:
            raise ValueError("boundary matrices have incompatible shapes")
        if not d_k.mul(d_k1).is_zero():
            raise ValueError("d_k . d_{k+1} != 0")
        self.n = d_k.cols
        self._snf1 = smith_normal_form(d_k)
        diag1 = self._snf1.diagonal
        self._ker_pos = [j for j in range(self.n)
                         if j >= len(diag1) or diag1[j] == 0]
        z = len(self._ker_pos)

        # express the image of d_{k+1} in kernel coordinates
        b_rows = [[0] * d_k1.cols for _ in range(z)]
        for c in range(d_k1.cols):
            y = self._snf1.Vinv.apply(d_k1.column(c))
            for j in range(self.n):
                if j not in self._ker_pos and y[j]:
                    raise ValueError("image of d_{k+1} is not contained in ker d_k")
            for r, j in enumerate(self._ker_pos):
                b_rows[r][c] = y[j]
        self._B = IntMatrix.from_rows(b_rows, cols=d_k1.cols)
        self._snf2 = smith_normal_form(self._B)
        diag2 = self._snf2.diagonal

        self._free_idx = []
        self._tor_idx = []
        mm_free, mm_tor = [], []
        for i in range(z):
            d = diag2[i] if i < len(diag2) else 0
            if d == 0:
                self._free_idx.append(i)
                mm_free.append(0)
            elif d >= 2:
                self._tor_idx.append((i, d))
                mm_tor.append(d)
            # d == 1: trivial summand, dropped
        self.group = AbGroup(tuple(mm_free + mm_tor))

    # -- coordinate plumbing ----------------------------------------------

    def _kernel_coords(self, x):
        """cycle vector -> coordinates in the kernel basis (checked)."""
        y = self._snf1.Vinv.apply(x)
        for j in range(self.n):
            if j not in self._ker_pos and y[j]:
                raise ValueError("vector is not a cycle")
        return [y[j] for j in self._ker_pos]

    def class_of(self, x):
        """Homology class of a cycle, as an element tuple of self.group."""
        w = self._snf2.U.apply(self._kernel_coords(x))
        elt = [w[i] for i in self._free_idx] + \
              [w[i] % d for i, d in self._tor_idx]
        return self.group.reduce(elt)

    def rep_of(self, elt):
        """A representing cycle (coordinate vector) for a group element."""
        elt = self.group.reduce(elt)
        z = len(self._ker_pos)
        w = [0] * z
        for pos, i in enumerate(self._free_idx):
            w[i] = elt[pos]
        for pos, (i, _d) in enumerate(self._tor_idx):
            w[i] = elt[len(self._free_idx) + pos]
        yk = self._snf2.Uinv.apply(w)
        x = [0] * self.n
        for r, j in enumerate(self._ker_pos):
            x[j] = yk[r]
        return self._snf1.V.apply(x)

    def boundary_witness(self, x):
        """Solve d_{k+1}(w) = x for a null-homologous cycle x."""
        w = self._snf2.U.apply(self._kernel_coords(x))
        diag2 = self._snf2.diagonal
        t = [0] * self._B.cols
        for i in range(len(w)):
            d = diag2[i] if i < len(diag2) else 0
            if d == 0:
                if w[i]:
                    raise ValueError("cycle is not a boundary")
            else:
                if w[i] % d:
                    raise ValueError("cycle is not a boundary")
                if i < len(t):
                    t[i] = w[i] // d
        return self._snf2.V.apply(t)


def homology(d_k: IntMatrix, d_k1: IntMatrix) -> HomologySolver:
    return HomologySolver(d_k, d_k1)
