"""Exact integer linear algebra: Smith normal form, kernels, subquotients.

Matrices are plain lists of lists of Python ints, so entries never overflow.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd

Matrix = list[list[int]]


class LinalgError(ArithmeticError):
    pass


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = 1
    return out


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = zeros(len(A), n)
    for i, row in enumerate(A):
        acc = out[i]
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        acc[j] += a * b
    return out


def matvec(A: Matrix, x: list[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x) if a) for row in A]


def transpose(A: Matrix, ncols: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def determinant(A: Matrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass
class SmithForm:
    """``U @ M @ V == D`` with ``D`` diagonal and ``d_1 | d_2 | ...``."""

    U: Matrix
    D: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(M: Matrix, ncols: int | None = None) -> SmithForm:
    """Smith normal form with unimodular transforms and their inverses.

    Pivoting picks the smallest nonzero absolute value in the active block,
    which keeps coefficient growth down on the boundary matrices we see.
    """
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    A = [list(row) for row in M]
    U, Ui = identity(m), identity(m)
    V, Vi = identity(n), identity(n)

    def row_addmul(dst, src, q):
        # row_dst -= q * row_src, on A and U; inverse gets col_src += q * col_dst
        if not q:
            return
        ra, rs = A[dst], A[src]
        for j in range(n):
            if rs[j]:
                ra[j] -= q * rs[j]
        ua, us = U[dst], U[src]
        for j in range(m):
            if us[j]:
                ua[j] -= q * us[j]
        for row in Ui:
            if row[dst]:
                row[src] += q * row[dst]

    def col_addmul(dst, src, q):
        # col_dst -= q * col_src, on A and V; inverse gets row_src += q * row_dst
        if not q:
            return
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]
        vd, vs = Vi[dst], Vi[src]
        for j in range(n):
            if vd[j]:
                vs[j] += q * vd[j]

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = A[i]
                for j in range(t, n):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_addmul(i, t, A[i][t] // p)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    col_addmul(j, t, A[t][j] // p)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, -1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for row in Ui:
                row[t] = -row[t]
    return SmithForm(U, A, V, Ui, Vi)


def kernel_basis(M: Matrix, ncols: int) -> Matrix:
    """A basis of the integer kernel of ``M`` (returned as a list of vectors).

    Unimodular column operations bring ``M`` to column echelon form; the
    tracked transforms of the columns that become zero span the kernel, and
    the basis is saturated.
    """
    if not M:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    rows = len(M)
    cols = [{i: M[i][j] for i in range(rows) if M[i][j]} for j in range(ncols)]
    track = [{j: 1} for j in range(ncols)]
    active = set(range(ncols))
    by_row: dict[int, set[int]] = {}
    for j, c in enumerate(cols):
        for i in c:
            by_row.setdefault(i, set()).add(j)
    for i in range(rows):
        while True:
            hit = [j for j in by_row.get(i, ()) if j in active]
            if len(hit) <= 1:
                active.difference_update(hit)
                break
            p = min(hit, key=lambda j: (abs(cols[j][i]), len(cols[j]), j))
            pv = cols[p][i]
            for j in hit:
                if j != p:
                    _col_sub(cols, track, by_row, j, p, cols[j][i] // pv)
    return [[track[j].get(i, 0) for i in range(ncols)] for j in sorted(active) if not cols[j]]


def _col_sub(cols, track, by_row, dst: int, src: int, q: int) -> None:
    """Column ``dst -= q * src`` on the matrix and the tracked transform."""
    c = cols[dst]
    for i, v in cols[src].items():
        w = c.get(i, 0) - q * v
        if w:
            if i not in c:
                by_row.setdefault(i, set()).add(dst)
            c[i] = w
        elif i in c:
            del c[i]
            by_row[i].discard(dst)
    t = track[dst]
    for i, v in track[src].items():
        w = t.get(i, 0) - q * v
        if w:
            t[i] = w
        else:
            t.pop(i, None)


def solve(M: Matrix, b: list[int], ncols: int) -> list[int] | None:
    """An integer solution of ``M x = b``, or ``None``."""
    sf = smith_normal_form(M, ncols)
    return _solve_with(sf, b, ncols)


def _solve_with(sf: SmithForm, b: list[int], ncols: int) -> list[int] | None:
    Ub = matvec(sf.U, b)
    diag = sf.diagonal
    y = [0] * ncols
    for i, v in enumerate(Ub):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if v:
                return None
        else:
            if v % d:
                return None
            y[i] = v // d
    return matvec(sf.V, y) if ncols else []


# -- sparse elimination (invariants only) ------------------------------------


def elementary_divisors(columns: list[dict[int, int]]) -> list[int]:
    """Nonzero diagonal entries after integer elimination of a sparse matrix.

    ``columns[j]`` maps row index to entry.  The entries describe the cokernel
    up to isomorphism; use :func:`invariant_factors` to normalize them.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for j, col in enumerate(columns):
        c = {i: v for i, v in col.items() if v}
        if c:
            cols[j] = c
            for i, v in c.items():
                rows.setdefault(i, {})[j] = v

    def set_entry(i, j, v):
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, {})[i] = v
        else:
            r = rows.get(i)
            if r is not None and j in r:
                del r[j]
                if not r:
                    del rows[i]
            c = cols.get(j)
            if c is not None and i in c:
                del c[i]
                if not c:
                    del cols[j]

    def row_sub(dst, src, q):
        # column j keeps its entry in row src, so it never empties here
        rd = rows.setdefault(dst, {})
        for j, v in rows[src].items():
            w = rd.get(j, 0) - q * v
            if w:
                rd[j] = w
                cols[j][dst] = w
            else:
                rd.pop(j, None)
                cols[j].pop(dst, None)
        if not rd:
            del rows[dst]

    def col_sub(dst, src, q):
        for i, v in list(cols[src].items()):
            set_entry(i, dst, cols.get(dst, {}).get(i, 0) - q * v)

    def drop(r, j):
        for c in list(rows.get(r, {})):
            set_entry(r, c, 0)
        for i in list(cols.get(j, {})):
            set_entry(i, j, 0)

    # pivot on the shortest column holding a unit, else the shortest column (lazy heap);
    # unit pivots clear without column operations and keep fill-in low
    big = len(rows) + 1

    def key(c):
        return len(c) if any(v == 1 or v == -1 for v in c.values()) else big + len(c)

    current = {j: key(c) for j, c in cols.items()}
    heap = [(k, j) for j, k in current.items()]
    heapq.heapify(heap)
    pivots: list[int] = []
    while cols:
        while True:
            if not heap:
                j = next(iter(cols))
                break
            k, j = heapq.heappop(heap)
            if j in cols and current.get(j) == k:
                del current[j]
                break
        while True:
            col = cols[j]
            r = min(col, key=lambda i: (abs(col[i]), len(rows[i])))
            p = col[r]
            dirty = False
            for i in [i for i in col if i != r]:
                q = cols[j][i] // p
                row_sub(i, r, q)
                if cols.get(j, {}).get(i):
                    dirty = True
            if dirty:
                continue
            # once the column is cleared, column operations only touch row r
            if all(v % p == 0 for v in rows[r].values()):
                break
            for c in [c for c in rows[r] if c != j]:
                q = rows[r][c] // p
                col_sub(c, j, q)
            rest = [c for c in rows[r] if c != j]
            if not rest:
                break
            j = min(rest, key=lambda c: abs(rows[r][c]))
        pivots.append(abs(p))
        touched = [c for c in rows.get(r, {}) if c != j]
        drop(r, j)
        current.pop(j, None)
        for c in touched:
            if c in cols:
                k = key(cols[c])
                if current.get(c) != k:
                    current[c] = k
                    heapq.heappush(heap, (k, c))
    return pivots


def invariant_factors(diagonal: list[int]) -> list[int]:
    """Normalize a diagonal presentation into a divisibility chain (units dropped)."""
    ds = [abs(d) for d in diagonal if d]
    # repeatedly replace (a, b) by (gcd, lcm) until the chain divides
    changed = True
    while changed:
        changed = False
        ds.sort()
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                a, b = ds[i], ds[j]
                if b % a:
                    g = gcd(a, b)
                    ds[i], ds[j] = g, a * b // g
                    changed = True
    return [d for d in sorted(ds) if d != 1]


# -- finitely generated abelian groups ---------------------------------------


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^rank + Z/t_1 + ... + Z/t_k`` with ``t_1 | t_2 | ...``."""

    torsion: tuple[int, ...] = ()
    rank: int = 0

    @classmethod
    def from_diagonal(cls, diagonal: list[int], ngens: int) -> "AbelianGroup":
        nz = [d for d in diagonal if d]
        return cls(tuple(invariant_factors(nz)), ngens - len(nz))

    @classmethod
    def from_presentation(cls, ngens: int, relations: Matrix) -> "AbelianGroup":
        """Cokernel of the ``ngens x r`` relation matrix."""
        cols = [dict((i, relations[i][j]) for i in range(ngens) if relations[i][j])
                for j in range(len(relations[0]) if relations else 0)]
        return cls.from_diagonal(elementary_divisors(cols), ngens)

    @property
    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def is_zero(self) -> bool:
        return not self.rank and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass
class SubQuotient:
    """The group ``Z / B`` for a lattice ``Z`` (basis given) and ``B`` inside it.

    Elements are ambient integer vectors lying in ``Z``; :meth:`coords` gives
    reproducible coordinates against the invariant-factor decomposition.
    """

    ambient: int
    basis: Matrix  # list of ambient vectors
    boundaries: Matrix  # list of ambient vectors
    group: AbelianGroup = field(init=False)

    def __post_init__(self):
        r = len(self.basis)
        self._r = r
        if r:
            Zmat = transpose(self.basis)
            self._zsnf = smith_normal_form(Zmat, r)
        bounds = self.boundaries
        if len(bounds) > 2 * max(r, 1):
            bounds = echelon_basis(bounds)
        C_cols = [self._to_basis(b) for b in bounds]
        if any(c is None for c in C_cols):
            raise LinalgError("boundary generator outside the cycle lattice")
        if r and C_cols:
            C = transpose(C_cols)
            self._csnf = smith_normal_form(C, len(C_cols))
            diag = self._csnf.diagonal
        else:
            self._csnf = SmithForm(identity(r), zeros(r, 0), [], identity(r), [])
            diag = []
        self._diag = [diag[i] if i < len(diag) else 0 for i in range(r)]
        self._keep = [i for i, d in enumerate(self._diag) if d != 1]
        self.group = AbelianGroup(tuple(d for d in self._diag if d > 1),
                                  sum(1 for d in self._diag if d == 0))

    def _to_basis(self, x: list[int]) -> list[int] | None:
        if not self._r:
            return [] if not any(x) else None
        return _solve_with(self._zsnf, x, self._r)

    def contains(self, x: list[int]) -> bool:
        return self._to_basis(x) is not None

    def coords(self, x: list[int]) -> tuple[int, ...]:
        """Coordinates of the class of ``x`` (torsion components reduced)."""
        y = self._to_basis(x)
        if y is None:
            raise LinalgError("vector is not in the cycle lattice")
        z = matvec(self._csnf.U, y) if self._r else []
        out = []
        for i in self._keep:
            d = self._diag[i]
            out.append(z[i] % d if d else z[i])
        return tuple(out)

    @property
    def moduli(self) -> tuple[int, ...]:
        """Modulus per coordinate; 0 marks a free coordinate."""
        return tuple(self._diag[i] for i in self._keep)

    def lift(self, coords: tuple[int, ...]) -> list[int]:
        """An ambient representative with the given coordinates."""
        z = [0] * self._r
        for c, i in zip(coords, self._keep):
            z[i] = c
        y = matvec(self._csnf.U_inv, z) if self._r else []
        out = [0] * self.ambient
        for coef, vec in zip(y, self.basis):
            if coef:
                for k, v in enumerate(vec):
                    if v:
                        out[k] += coef * v
        return out

    def is_zero(self, x: list[int]) -> bool:
        return all(c == 0 for c in self.coords(x))

    def elements(self):
        """All coordinate tuples (finite groups only)."""
        if self.group.rank:
            raise LinalgError("infinite group")
        from itertools import product as _product

        yield from _product(*(range(d) for d in self.moduli))


def subquotient_of(cocycle_map: Matrix, ambient: int, boundary_gens: Matrix,
                   relation_target: Matrix | None = None) -> SubQuotient:
    """``ker(cocycle_map mod relation_target) / boundary_gens`` inside ``Z^ambient``.

    ``cocycle_map`` is a matrix ``Z^ambient -> Z^m``; an ambient vector counts
    as a cycle when its image lies in the column span of ``relation_target``.
    """
    m = len(cocycle_map)
    extra = len(relation_target[0]) if relation_target and relation_target[0] else 0
    if m == 0:
        ker = [[1 if i == j else 0 for i in range(ambient)] for j in range(ambient)]
    else:
        big = [list(cocycle_map[i]) + ([relation_target[i][j] for j in range(extra)] if extra else [])
               for i in range(m)]
        full = kernel_basis(big, ambient + extra)
        proj = [v[:ambient] for v in full]
        # the projection may be rank deficient; reduce to a basis
        ker = echelon_basis(proj) if extra else proj
    return SubQuotient(ambient, ker, boundary_gens)


def lattice_basis(vectors: Matrix, ambient: int) -> Matrix:
    """A basis of the lattice spanned by ``vectors``."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    # Hermite-style: SNF of the generator matrix, basis = U^{-1} D columns
    G = transpose(vecs)  # ambient x k
    sf = smith_normal_form(G, len(vecs))
    out = []
    for j, d in enumerate(sf.diagonal):
        if d:
            out.append([sf.U_inv[i][j] * d for i in range(ambient)])
    return out


def echelon_basis(vectors: Matrix) -> Matrix:
    """Echelon basis of the lattice spanned by ``vectors`` (sparse, incremental)."""
    piv: dict[int, dict[int, int]] = {}
    for vec in vectors:
        v = {i: a for i, a in enumerate(vec) if a}
        while v:
            p = min(v)
            w = piv.get(p)
            if w is None:
                if v[p] < 0:
                    v = {i: -a for i, a in v.items()}
                piv[p] = v
                break
            a, b = w[p], v[p]
            if b % a == 0:
                q = b // a
                v = _axpy(v, w, -q)
                continue
            g, x, y = _xgcd(a, b)
            # [w'; v'] = [[x, y], [-b/g, a/g]] [w; v]
            new_w = _axpy({i: x * c for i, c in w.items()}, v, y)
            v = _axpy({i: (-b // g) * c for i, c in w.items()}, v, a // g)
            piv[p] = new_w
    n = len(vectors[0]) if vectors else 0
    out = []
    for p in sorted(piv):
        row = [0] * n
        for i, a in piv[p].items():
            row[i] = a
        out.append(row)
    return out


def _axpy(v: dict[int, int], w: dict[int, int], q: int) -> dict[int, int]:
    out = dict(v)
    for i, a in w.items():
        c = out.get(i, 0) + q * a
        if c:
            out[i] = c
        else:
            out.pop(i, None)
    return out


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0
