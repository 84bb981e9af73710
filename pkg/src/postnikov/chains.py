"""Integer chain complexes, local systems and twisted (co)homology."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .linalg import (AbelianGroup, LinalgError, Matrix, SubQuotient, _solve_with, elementary_divisors,
                     identity, lattice_basis, matmul, matvec, smith_normal_form, subquotient_of, transpose)
from .sset import Simplex, SimplicialError, SimplicialMap, SimplicialSet, ident

SparseCol = dict[int, int]


# -- chain complexes ------------------------------------------------------------


class ChainComplex:
    """Free modules ``Z^{ranks[k]}`` with sparse boundaries ``d[k]: C_k -> C_{k-1}``.

    ``d[k]`` is a list of columns (one per basis element of ``C_k``), each a
    dict from row index to coefficient; ``d[0]`` is empty.
    """

    def __init__(self, ranks: list[int], d: list[list[SparseCol]], name: str = ""):
        self.ranks = list(ranks)
        self.d = [list(cols) for cols in d]
        while len(self.d) < len(self.ranks):
            self.d.append([{} for _ in range(self.ranks[len(self.d)])])
        self.name = name

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, k: int) -> int:
        """Rank in degree ``k`` (zero outside the complex)."""
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    @classmethod
    def from_dense(cls, ranks: list[int], mats: dict[int, Matrix]) -> "ChainComplex":
        d = []
        for k, r in enumerate(ranks):
            M = mats.get(k)
            if M is None or k == 0:
                d.append([{} for _ in range(r)])
                continue
            d.append([{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(r)])
        return cls(ranks, d)

    def dense(self, k: int) -> Matrix:
        rows = self.ranks[k - 1] if k >= 1 else 0
        M = [[0] * self.ranks[k] for _ in range(rows)]
        for j, col in enumerate(self.d[k]):
            for i, v in col.items():
                M[i][j] = v
        return M

    def check(self) -> list[str]:
        """Nonzero entries of ``d d``."""
        bad = []
        for k in range(2, len(self.ranks)):
            for j, col in enumerate(self.d[k]):
                acc: dict[int, int] = {}
                for i, v in col.items():
                    for r, w in self.d[k - 1][i].items():
                        acc[r] = acc.get(r, 0) + v * w
                if any(acc.values()):
                    bad.append(f"d{k - 1} d{k} nonzero on basis element {j}")
        return bad

    @cached_property
    def _divisors(self) -> list[list[int]]:
        return [elementary_divisors([dict(c) for c in self.d[k]]) if k else [] for k in range(len(self.ranks))]

    def rank_of_boundary(self, k: int) -> int:
        return len(self._divisors[k]) if 0 < k < len(self.ranks) else 0

    def homology(self, k: int) -> AbelianGroup:
        """``H_k``; degrees at or above the top are unreliable unless the complex is bounded there."""
        if k < 0 or k >= len(self.ranks):
            return AbelianGroup((), 0)
        out_div = self._divisors[k + 1] if k + 1 < len(self.ranks) else []
        free = self.ranks[k] - self.rank_of_boundary(k) - len(out_div)
        return AbelianGroup.from_diagonal(out_div + [0] * free, len(out_div) + free)

    def homology_all(self, upto: int | None = None) -> list[AbelianGroup]:
        d = self.top if upto is None else upto
        return [self.homology(k) for k in range(d + 1)]

    def euler(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))

    def truncated(self, top: int) -> "ChainComplex":
        return ChainComplex(self.ranks[: top + 1], self.d[: top + 1], self.name)

    def to_json(self) -> dict:
        return {"ranks": self.ranks,
                "matrices": {str(k): [[str(v) for v in row] for row in self.dense(k)] for k in range(1, len(self.ranks))}}

    @classmethod
    def from_json(cls, data: dict) -> "ChainComplex":
        try:
            ranks = [int(r) for r in data["ranks"]]
            mats = {int(k): [[int(v) for v in row] for row in M] for k, M in data.get("matrices", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed chain complex: {exc}") from None
        for k, M in mats.items():
            if not 0 < k < len(ranks):
                raise ValueError(f"matrix for degree {k} outside the complex")
            if len(M) != ranks[k - 1] or any(len(row) != ranks[k] for row in M):
                raise ValueError(f"matrix for degree {k} has the wrong shape")
        C = cls.from_dense(ranks, mats)
        if C.check():
            raise ValueError("boundary maps do not square to zero")
        return C


def homology(C: ChainComplex, k: int) -> AbelianGroup:
    return C.homology(k)


def chains_of(X: SimplicialSet, upto: int | None = None) -> ChainComplex:
    """Normalized chains: basis = nondegenerate simplices, degenerate faces dropped."""
    top = X.top_dim if upto is None else min(upto, X.top_dim)
    if upto is not None and upto > X.top_dim:
        top = upto
    ranks = [X.count(k) for k in range(top + 1)]
    d: list[list[SparseCol]] = [[{} for _ in range(ranks[0])]]
    for k in range(1, top + 1):
        cols = []
        for x in range(ranks[k]):
            col: SparseCol = {}
            for i, (eta, y) in enumerate(X.faces[k][x]):
                if eta[-1] == k - 1:
                    col[y] = col.get(y, 0) + (-1) ** i
            cols.append({a: b for a, b in col.items() if b})
        d.append(cols)
    return ChainComplex(ranks, d, name=X.name)


def ordinary_homology(X: SimplicialSet, upto: int | None = None) -> list[AbelianGroup]:
    """``H_0..H_upto`` (default: every degree the data determines)."""
    if upto is None:
        upto = X.top_dim if not X.truncated else X.max_dim - 1
    C = chains_of(X, upto + 1 if X.known(upto + 1) else upto)
    return [C.homology(k) for k in range(upto + 1)]


def relative_chains(X: SimplicialSet, A: dict[int, set[int]]) -> ChainComplex:
    keep = [[x for x in range(X.count(k)) if x not in A.get(k, ())] for k in range(X.top_dim + 1)]
    pos = [{x: i for i, x in enumerate(lv)} for lv in keep]
    d: list[list[SparseCol]] = [[{} for _ in keep[0]]]
    for k in range(1, X.top_dim + 1):
        cols = []
        for x in keep[k]:
            col: SparseCol = {}
            for i, (eta, y) in enumerate(X.faces[k][x]):
                if eta[-1] == k - 1 and y in pos[k - 1]:
                    r = pos[k - 1][y]
                    col[r] = col.get(r, 0) + (-1) ** i
            cols.append({a: b for a, b in col.items() if b})
        d.append(cols)
    return ChainComplex([len(lv) for lv in keep], d)


# -- presented abelian groups -------------------------------------------------------


class Presentation:
    """``Z^ngens / span(relations)`` with an injective relation matrix."""

    def __init__(self, ngens: int, relations: Matrix = ()):
        self.ngens = ngens
        self.relations = lattice_basis([list(r) for r in relations], ngens) if ngens else []
        self._sq = SubQuotient(ngens, [[int(i == j) for i in range(ngens)] for j in range(ngens)], self.relations)
        # cyclic fast path: Z/m (m > 0) or Z
        self._mod = abs(self.relations[0][0]) if ngens == 1 and self.relations else (0 if ngens == 1 else None)

    @property
    def group(self) -> AbelianGroup:
        return self._sq.group

    def coords(self, v: list[int]) -> tuple[int, ...]:
        if self._mod is not None:
            return () if self._mod == 1 else ((v[0] % self._mod,) if self._mod else (v[0],))
        return self._sq.coords(list(v))

    def is_zero(self, v: list[int]) -> bool:
        if self._mod is not None:
            return v[0] % self._mod == 0 if self._mod else v[0] == 0
        return self._sq.is_zero(list(v))

    def equal(self, a: list[int], b: list[int]) -> bool:
        return self.is_zero([x - y for x, y in zip(a, b)])

    def elements(self) -> list[list[int]]:
        """Canonical representatives of every element (finite groups)."""
        return [self._sq.lift(c) for c in self._sq.elements()]

    def normal(self, v: list[int]) -> tuple[int, ...]:
        """Canonical representative vector (as a tuple) of the class of ``v``."""
        if self._mod is not None:
            return (v[0] % self._mod,) if self._mod else (v[0],)
        if not self.ngens:
            return ()
        return tuple(self._sq.lift(self.coords(v)))

    def key(self) -> tuple:
        return (self.ngens, tuple(tuple(r) for r in self.relations))

    def preserves(self, M: Matrix, target: "Presentation") -> bool:
        return all(target.is_zero(matvec(M, r)) for r in self.relations)

    @classmethod
    def cyclic(cls, m: int) -> "Presentation":
        return cls(1, [[m]] if m else [])

    @classmethod
    def free(cls, n: int) -> "Presentation":
        return cls(n, [])

    def direct_sum(self, other: "Presentation") -> "Presentation":
        n = self.ngens + other.ngens
        rels = [list(r) + [0] * other.ngens for r in self.relations] + [[0] * self.ngens + list(r) for r in other.relations]
        return Presentation(n, rels)

    def __repr__(self):
        return f"<Presentation {self.group}>"


def block_diag(A: Matrix, B: Matrix, na: int, nb: int, ma: int, mb: int) -> Matrix:
    out = [[0] * (na + nb) for _ in range(ma + mb)]
    for i in range(ma):
        for j in range(na):
            out[i][j] = A[i][j]
    for i in range(mb):
        for j in range(nb):
            out[ma + i][na + j] = B[i][j]
    return out


# -- local systems -----------------------------------------------------------------


class LocalSystem:
    """Covariant functor from the edge-path groupoid of ``Y`` to abelian groups.

    ``edge[e]`` is the matrix ``A(s) -> A(t)`` of the nondegenerate edge ``e``
    from ``s = d1 e`` to ``t = d0 e``; ``edge_inv[e]`` is a two-sided inverse
    modulo relations.  Over a triangle ``t``: ``A(d1 t) = A(d0 t) A(d2 t)``.
    """

    def __init__(self, Y: SimplicialSet, fibers: list[Presentation], edge: list[Matrix], edge_inv: list[Matrix],
                 name: str = ""):
        self.Y = Y
        self.fibers = fibers
        self.edge = edge
        self.edge_inv = edge_inv
        self.name = name

    # construction

    @classmethod
    def constant(cls, Y: SimplicialSet, P: Presentation, name: str = "") -> "LocalSystem":
        I = identity(P.ngens)
        return cls(Y, [P] * Y.count(0), [I] * Y.count(1), [I] * Y.count(1), name or str(P.group))

    @classmethod
    def from_edges(cls, Y: SimplicialSet, P: Presentation, fn, name: str = "") -> "LocalSystem":
        """Shared fiber ``P``; ``fn(edge simplex) -> (matrix, inverse matrix)``."""
        mats = [fn(s) for s in Y.nondegenerate(1)] if Y.top_dim >= 1 else []
        return cls(Y, [P] * Y.count(0), [m for m, _ in mats], [mi for _, mi in mats], name)

    @classmethod
    def from_representation(cls, Y: SimplicialSet, P: Presentation, edge_element, rho: dict[int, Matrix],
                            inverse, name: str = "") -> "LocalSystem":
        """Transport ``rho[g]`` along an edge of class ``g``; ``rho(g h) = rho(h) rho(g)``."""
        return cls.from_edges(Y, P, lambda s: (rho[edge_element(s)], rho[inverse(edge_element(s))]), name)

    def pullback(self, f: SimplicialMap) -> "LocalSystem":
        if f.codomain is not self.Y and f.codomain.presentation() != self.Y.presentation():
            raise SimplicialError("local system base mismatch")
        Y2 = f.domain
        fibers = [self.fibers[f.on_vertex(v)] for v in range(Y2.count(0))]
        edge, inv = [], []
        for s in Y2.nondegenerate(1):
            img = f(s)
            edge.append(self.transport(img))
            inv.append(self.transport_inv(img))
        return LocalSystem(Y2, fibers, edge, inv, self.name)

    # evaluation

    def transport(self, e: Simplex) -> Matrix:
        eta, y = e
        if eta[-1] == 0:
            return identity(self.fibers[y].ngens)
        return self.edge[y]

    def transport_inv(self, e: Simplex) -> Matrix:
        eta, y = e
        if eta[-1] == 0:
            return identity(self.fibers[y].ngens)
        return self.edge_inv[y]

    def fiber(self, v: int) -> Presentation:
        return self.fibers[v]

    def check(self) -> list[str]:
        Y = self.Y
        bad = []
        for e, s in enumerate(Y.nondegenerate(1) if Y.top_dim >= 1 else []):
            src, tgt = Y.faces[1][e][1][1], Y.faces[1][e][0][1]
            Ps, Pt = self.fibers[src], self.fibers[tgt]
            M, Mi = self.edge[e], self.edge_inv[e]
            if not Ps.preserves(M, Pt) or not Pt.preserves(Mi, Ps):
                bad.append(f"edge {e}: transport does not respect relations")
                continue
            for j in range(Ps.ngens):
                ej = [int(i == j) for i in range(Ps.ngens)]
                if not Ps.equal(matvec(Mi, matvec(M, ej)), ej):
                    bad.append(f"edge {e}: inverse witness fails")
                    break
            for j in range(Pt.ngens):
                ej = [int(i == j) for i in range(Pt.ngens)]
                if not Pt.equal(matvec(M, matvec(Mi, ej)), ej):
                    bad.append(f"edge {e}: inverse witness fails")
                    break
        for t in range(Y.count(2)):
            d0, d1, d2 = Y.faces[2][t]
            v0 = Y.vertices(Y.nd(2, t))[0]
            P0 = self.fibers[v0]
            lhs = self.transport(d1)
            rhs = matmul(self.transport(d0), self.transport(d2)) if P0.ngens else lhs
            v2 = Y.vertices(Y.nd(2, t))[2]
            for j in range(P0.ngens):
                if not self.fibers[v2].equal([row[j] for row in lhs], [row[j] for row in rhs]):
                    bad.append(f"triangle {t}: transport not functorial")
                    break
        return bad

    def direct_sum(self, other: "LocalSystem") -> "LocalSystem":
        if other.Y is not self.Y:
            raise SimplicialError("direct sum needs a common base")
        fibers = [a.direct_sum(b) for a, b in zip(self.fibers, other.fibers)]
        edge, inv = [], []
        Y = self.Y
        for e in range(Y.count(1)):
            s, t = Y.faces[1][e][1][1], Y.faces[1][e][0][1]
            na, nb = self.fibers[s].ngens, other.fibers[s].ngens
            ma, mb = self.fibers[t].ngens, other.fibers[t].ngens
            edge.append(block_diag(self.edge[e], other.edge[e], na, nb, ma, mb))
            inv.append(block_diag(self.edge_inv[e], other.edge_inv[e], ma, mb, na, nb))
        return LocalSystem(Y, fibers, edge, inv, f"{self.name}+{other.name}")

    def is_constant(self) -> bool:
        return all(M == identity(len(M)) for M in self.edge)


# -- twisted complexes ---------------------------------------------------------------


class PresentedComplex:
    """A (co)chain complex of presented modules, one block per simplex.

    ``blocks[n][b]`` is the fiber presentation of block ``b`` in degree ``n``;
    ``block_maps[n][b]`` lists ``(target block, matrix)`` pairs describing the
    differential (degree ``n`` to ``n + step``) on that block.
    """

    def __init__(self, blocks: list[list[Presentation]], block_maps: dict[int, list[list[tuple[int, Matrix]]]],
                 step: int):
        self.blocks = blocks
        self.block_maps = block_maps
        self.step = step
        self.offsets = []
        self.size = []
        for lvl in blocks:
            offs, acc = [], 0
            for P in lvl:
                offs.append(acc)
                acc += P.ngens
            self.offsets.append(offs)
            self.size.append(acc)
        self.diff: dict[int, list[SparseCol]] = {}
        for n, bm in block_maps.items():
            tgt = n + step
            cols: list[SparseCol] = []
            for b, entries in enumerate(bm):
                P = blocks[n][b]
                for j in range(P.ngens):
                    col: SparseCol = {}
                    for tb, M in entries:
                        base = self.offsets[tgt][tb]
                        for i, row in enumerate(M):
                            if row[j]:
                                col[base + i] = col.get(base + i, 0) + row[j]
                    cols.append({a: v for a, v in col.items() if v})
            self.diff[n] = cols

    @property
    def degrees(self) -> int:
        return len(self.blocks)

    def relations(self, n: int) -> Matrix:
        """Relation vectors in degree ``n`` (ambient coordinates)."""
        out = []
        for off, P in zip(self.offsets[n], self.blocks[n]):
            for r in P.relations:
                v = [0] * self.size[n]
                for i, a in enumerate(r):
                    v[off + i] = a
                out.append(v)
        return out

    def dense_diff(self, n: int) -> Matrix:
        tgt = n + self.step
        rows = self.size[tgt] if 0 <= tgt < self.degrees else 0
        M = [[0] * self.size[n] for _ in range(rows)]
        for j, col in enumerate(self.diff.get(n, [])):
            for i, v in col.items():
                M[i][j] = v
        return M

    def apply(self, n: int, v: list[int]) -> list[int]:
        tgt = n + self.step
        out = [0] * (self.size[tgt] if 0 <= tgt < self.degrees else 0)
        for j, a in enumerate(v):
            if a:
                for i, c in self.diff[n][j].items():
                    out[i] += a * c
        return out

    def reduce(self, n: int, v: list[int]) -> tuple:
        """Canonical form of ``v`` modulo relations, block by block."""
        out: list[int] = []
        for off, P in zip(self.offsets[n], self.blocks[n]):
            out.extend(P.normal(v[off: off + P.ngens]))
        return tuple(out)

    def is_zero_mod_relations(self, n: int, v: list[int]) -> bool:
        return all(P.is_zero(v[off: off + P.ngens]) for off, P in zip(self.offsets[n], self.blocks[n]))

    def check(self) -> list[str]:
        """Degrees where the differential squared is nonzero modulo relations."""
        bad = []
        for n in range(self.degrees):
            m = n + self.step
            if n not in self.diff or m not in self.diff or not 0 <= m + self.step < self.degrees:
                continue
            for j in range(self.size[n]):
                v = [int(i == j) for i in range(self.size[n])]
                if not self.is_zero_mod_relations(m + self.step, self.apply(m, self.apply(n, v))):
                    bad.append(f"differential squared nonzero from degree {n} generator {j}")
        return bad

    # free model -------------------------------------------------------------

    def _rel_layout(self, n: int) -> tuple[list[int], int]:
        offs, acc = [], 0
        for P in self.blocks[n]:
            offs.append(acc)
            acc += len(P.relations)
        return offs, acc

    def _lift(self, n: int, rel_offs: dict[int, list[int]], cache: dict) -> list[SparseCol]:
        """``d'`` on relation generators of degree ``n`` with ``d R = R d'``."""
        tgt = n + self.step
        cols: list[SparseCol] = []
        for b, P in enumerate(self.blocks[n]):
            for r in P.relations:
                col: SparseCol = {}
                for tb, M in self.block_maps[n][b]:
                    Q = self.blocks[tgt][tb]
                    img = matvec(M, r)
                    if not any(img):
                        continue
                    key = (Q.key(), tuple(img))
                    sol = cache.get(key)
                    if sol is None:
                        skey = ("snf", Q.key())
                        sf = cache.get(skey)
                        if sf is None and Q.relations:
                            sf = smith_normal_form(transpose(Q.relations), len(Q.relations))
                            cache[skey] = sf
                        sol = _solve_with(sf, img, len(Q.relations)) if Q.relations else None
                        if sol is None:
                            raise LinalgError("differential does not preserve relations")
                        cache[key] = sol
                    base = rel_offs[tgt][tb]
                    for i, a in enumerate(sol):
                        if a:
                            col[base + i] = col.get(base + i, 0) + a
                cols.append({a: v for a, v in col.items() if v})
        return cols

    def _square_correction(self, n: int, m: int, m2: int, cols: list[SparseCol], rel_offs, cache) -> None:
        """Where ``d d`` is zero only modulo relations, send the generator to
        ``-R^{-1} d d`` on the relation generators of degree ``m2``."""
        shift = self.size[m]
        for j, col in enumerate(cols[: self.size[n]]):
            dd: dict[int, int] = {}
            for i, a in col.items():
                for i2, c in self.diff[m][i].items():
                    dd[i2] = dd.get(i2, 0) + a * c
            dd = {i: v for i, v in dd.items() if v}
            if not dd:
                continue
            for tb, (off, Q) in enumerate(zip(self.offsets[m2], self.blocks[m2])):
                img = [dd.get(off + i, 0) for i in range(Q.ngens)]
                if not any(img):
                    continue
                sol = None
                if Q.relations:
                    skey = ("snf", Q.key())
                    sf = cache.get(skey)
                    if sf is None:
                        sf = cache[skey] = smith_normal_form(transpose(Q.relations), len(Q.relations))
                    sol = _solve_with(sf, img, len(Q.relations))
                if sol is None:
                    raise LinalgError("differential squared is not zero modulo relations")
                base = shift + rel_offs[m2][tb]
                for i, a in enumerate(sol):
                    if a:
                        col[base + i] = col.get(base + i, 0) - a
                        if not col[base + i]:
                            del col[base + i]

    def total(self) -> tuple[ChainComplex, list[int]]:
        """Free complex quasi-isomorphic to the module complex.

        Returns the complex in homological grading together with the module
        degree sitting at each homological index.
        """
        order = list(range(self.degrees)) if self.step == -1 else list(reversed(range(self.degrees)))
        layouts = {n: self._rel_layout(n) for n in order}
        rel_offs = {n: layouts[n][0] for n in order}
        cache: dict = {}
        ranks, d = [], []
        for t in range(len(order) + 1):
            n = order[t] if t < len(order) else None
            prev = order[t - 1] if t >= 1 else None
            gsize = self.size[n] if n is not None else 0
            ranks.append(gsize + (layouts[prev][1] if prev is not None else 0))
            cols: list[SparseCol] = []
            for j in range(gsize):
                cols.append(dict(self.diff[n][j]) if prev is not None and n in self.diff else {})
            if t >= 2 and n in self.diff and prev in self.diff:
                self._square_correction(n, prev, order[t - 2], cols, rel_offs, cache)
            if prev is not None:
                lift = self._lift(prev, rel_offs, cache) if t >= 2 and prev in self.block_maps else None
                ridx = 0
                for off, P in zip(self.offsets[prev], self.blocks[prev]):
                    for r in P.relations:
                        col = {off + i: a for i, a in enumerate(r) if a}
                        if lift is not None:
                            shift = self.size[prev]
                            for i, a in lift[ridx].items():
                                col[shift + i] = -a
                        cols.append(col)
                        ridx += 1
            d.append(cols)
        return ChainComplex(ranks, d), order


def _first_edge(Y: SimplicialSet, s: Simplex) -> Simplex:
    return Y.edge(s, 0, 1)


def twisted_chain_complex(Y: SimplicialSet, A: LocalSystem, top: int) -> PresentedComplex:
    """Chains ``sigma (x) a`` with ``a`` in ``A(v0 sigma)``; ``d0`` transports along the first edge."""
    if A.Y is not Y and A.Y.presentation() != Y.presentation():
        raise SimplicialError("local system base mismatch")
    top = min(top, Y.top_dim) if not Y.truncated else min(top, Y.max_dim)
    blocks = [[A.fibers[Y.base_vertex(s)] for s in Y.nondegenerate(n)] for n in range(top + 1)]
    maps: dict[int, list[list[tuple[int, Matrix]]]] = {}
    for n in range(1, top + 1):
        lvl = []
        for x in range(Y.count(n)):
            s = Y.nd(n, x)
            g = A.fibers[Y.base_vertex(s)].ngens
            entries = []
            for i, (eta, y) in enumerate(Y.faces[n][x]):
                if eta[-1] != n - 1:
                    continue
                if i == 0:
                    entries.append((y, A.transport(_first_edge(Y, s))))
                else:
                    sign = -1 if i % 2 else 1
                    entries.append((y, [[sign * int(a == b) for b in range(g)] for a in range(g)]))
            lvl.append(_merge_entries(entries))
        maps[n] = lvl
    maps[0] = [[] for _ in range(Y.count(0))]
    return PresentedComplex(blocks, maps, -1)


def _merge_entries(entries: list[tuple[int, Matrix]]) -> list[tuple[int, Matrix]]:
    acc: dict[int, Matrix] = {}
    for tb, M in entries:
        if tb in acc:
            acc[tb] = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc[tb], M)]
        else:
            acc[tb] = [list(r) for r in M]
    return [(tb, M) for tb, M in sorted(acc.items()) if any(any(r) for r in M)]


def twisted_cochain_complex(Y: SimplicialSet, A: LocalSystem, top: int) -> PresentedComplex:
    """Cochains valued in ``A(v0 sigma)``; ``d0`` pulled back along the first edge."""
    if A.Y is not Y and A.Y.presentation() != Y.presentation():
        raise SimplicialError("local system base mismatch")
    top = min(top, Y.top_dim) if not Y.truncated else min(top, Y.max_dim)
    blocks = [[A.fibers[Y.base_vertex(s)] for s in Y.nondegenerate(n)] for n in range(top + 1)]
    maps: dict[int, list[list[tuple[int, Matrix]]]] = {}
    for n in range(top + 1):
        lvl: list[list[tuple[int, Matrix]]] = [[] for _ in range(Y.count(n))]
        if n + 1 <= top:
            for t in range(Y.count(n + 1)):
                tau = Y.nd(n + 1, t)
                g = A.fibers[Y.base_vertex(tau)].ngens
                for i, (eta, y) in enumerate(Y.faces[n + 1][t]):
                    if eta[-1] != n:
                        continue
                    if i == 0:
                        lvl[y].append((t, A.transport_inv(_first_edge(Y, tau))))
                    else:
                        sign = -1 if i % 2 else 1
                        lvl[y].append((t, [[sign * int(a == b) for b in range(g)] for a in range(g)]))
            lvl = [_merge_entries(e) for e in lvl]
        maps[n] = lvl
    return PresentedComplex(blocks, maps, +1)


def _group_at(P: PresentedComplex, n: int) -> AbelianGroup:
    C, order = P.total()
    return C.homology(order.index(n))


def twisted_homology(Y: SimplicialSet, A: LocalSystem, n: int) -> AbelianGroup:
    if Y.truncated and n + 1 > Y.max_dim:
        raise SimplicialError(f"H_{n} needs simplices through dimension {n + 1}")
    return _group_at(twisted_chain_complex(Y, A, n + 1), n)


def twisted_homology_all(Y: SimplicialSet, A: LocalSystem, upto: int) -> list[AbelianGroup]:
    C, order = twisted_chain_complex(Y, A, upto + 1).total()
    return [C.homology(order.index(n)) for n in range(upto + 1)]


def twisted_cohomology_group(Y: SimplicialSet, A: LocalSystem, n: int) -> AbelianGroup:
    """Group only, via a sparse free model (no representatives)."""
    if Y.truncated and n + 1 > Y.max_dim:
        raise SimplicialError(f"H^{n} needs simplices through dimension {n + 1}")
    return _group_at(twisted_cochain_complex(Y, A, n + 1), n)


class NotACocycle(ValueError):
    def __init__(self, simplex: int, degree: int):
        super().__init__(f"coboundary nonzero on the nondegenerate {degree}-simplex {simplex}")
        self.simplex = simplex
        self.degree = degree


@dataclass
class CohomologyClass:
    degree: int
    cocycle: list[int]
    coords: tuple[int, ...]
    group: "TwistedCohomology" = field(repr=False)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        return self.group.class_of([a + b for a, b in zip(self.cocycle, other.cocycle)])

    def __neg__(self) -> "CohomologyClass":
        return self.group.class_of([-a for a in self.cocycle])

    def __eq__(self, other) -> bool:
        return isinstance(other, CohomologyClass) and self.group is other.group and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def values(self) -> list[list[int]]:
        """Cocycle value per nondegenerate simplex."""
        P = self.group.complex
        n = self.degree
        return [self.cocycle[o: o + B.ngens] for o, B in zip(P.offsets[n], P.blocks[n])]


class TwistedCohomology:
    """``H^n(Y; A)`` with class arithmetic and reproducible coordinates."""

    def __init__(self, Y: SimplicialSet, A: LocalSystem, n: int):
        if Y.truncated and n + 1 > Y.max_dim:
            raise SimplicialError(f"H^{n} needs simplices through dimension {n + 1}")
        self.Y, self.A, self.n = Y, A, n
        P = twisted_cochain_complex(Y, A, n + 1)
        self.complex = P
        delta = P.dense_diff(n)
        rel_next = P.relations(n + 1) if n + 1 < P.degrees else []
        rel_target = transpose(rel_next, P.size[n + 1]) if rel_next else None
        bounds = []
        if n >= 1:
            D = P.dense_diff(n - 1)
            for j in range(P.size[n - 1]):
                col = [D[i][j] for i in range(P.size[n])]
                if any(col):
                    bounds.append(col)
        bounds += P.relations(n)
        self.sq = subquotient_of(delta, P.size[n], bounds, rel_target)

    @property
    def group(self) -> AbelianGroup:
        return self.sq.group

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.sq.moduli

    def size(self) -> int:
        return self.complex.size[self.n]

    def coboundary(self, z: list[int]) -> list[int]:
        return self.complex.apply(self.n, z)

    def check_cocycle(self, z: list[int]) -> None:
        P, n = self.complex, self.n
        dz = P.apply(n, z)
        if n + 1 >= P.degrees:
            return
        for t, (off, B) in enumerate(zip(P.offsets[n + 1], P.blocks[n + 1])):
            if not B.is_zero(dz[off: off + B.ngens]):
                raise NotACocycle(t, n + 1)

    def class_of(self, z: list[int]) -> CohomologyClass:
        self.check_cocycle(z)
        return CohomologyClass(self.n, list(z), self.sq.coords(list(z)), self)

    def from_values(self, values: dict[int, list[int]] | list[list[int]]) -> list[int]:
        """Flat cochain from per-simplex values (missing simplices are zero)."""
        P, n = self.complex, self.n
        z = [0] * P.size[n]
        items = values.items() if isinstance(values, dict) else enumerate(values)
        for x, v in items:
            off = P.offsets[n][x]
            for i, a in enumerate(v):
                z[off + i] = a
        return z

    def representative(self, coords: tuple[int, ...]) -> CohomologyClass:
        z = self.sq.lift(tuple(coords))
        return CohomologyClass(self.n, z, self.sq.coords(z), self)

    def classes(self) -> list[CohomologyClass]:
        return [self.representative(c) for c in self.sq.elements()]

    def zero(self) -> CohomologyClass:
        return self.representative(tuple(0 for _ in self.moduli))


def twisted_cohomology(Y: SimplicialSet, A: LocalSystem, n: int) -> TwistedCohomology:
    return TwistedCohomology(Y, A, n)


def pullback_cocycle(f: SimplicialMap, z_values: list[list[int]], n: int) -> list[list[int]]:
    """``f^* z`` per nondegenerate simplex of the domain (values are fiber vectors)."""
    out = []
    Y = f.codomain
    for s in f.domain.nondegenerate(n):
        img = f(s)
        if Y.is_degenerate(img):
            g = len(z_values[0]) if z_values else 0
            out.append(None)
        else:
            out.append(list(z_values[img[1]]))
    return out
