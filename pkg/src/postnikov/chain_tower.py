"""Postnikov towers of connective integer chain complexes.

Stages are good truncations ``tau_{<=a} C``: ``C`` in degrees ``<= a`` and the
boundaries ``B_a`` in degree ``a + 1``.  The square at stage ``a``

    tau_{<=a} C   ---t--->  tau_{<=0} C
        | f                    | zero
    tau_{<=a-1} C ---k--->  K_a = tau_{<=0} C (+) cone(f)

commutes up to the explicit homotopy ``H(w) = (0, (0, w))``.  Both the
homotopy pullback and the homotopy pushout comparisons are certified as
quasi-isomorphisms by exact homology of their mapping cones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .chains import ChainComplex
from .linalg import Matrix, identity, kernel_basis, lattice_basis, matmul, smith_normal_form, _solve_with, zeros
from .tower import HOMOLOGY, STRICT, LedgerEntry, TowerBundle


class NonConnective(ValueError):
    pass


def _dense(C: ChainComplex, k: int) -> Matrix:
    """``d_k`` as a ``ranks[k-1] x ranks[k]`` matrix (empty outside the range)."""
    if k <= 0 or k > C.top:
        return zeros(C.rank(k - 1) if k >= 1 else 0, C.rank(k))
    return C.dense(k)


def from_blocks(ranks: list[int], mats: dict[int, Matrix], name: str = "") -> ChainComplex:
    while len(ranks) > 1 and ranks[-1] == 0:
        ranks = ranks[:-1]
    C = ChainComplex.from_dense(ranks, mats)
    C.name = name
    return C


@dataclass
class ChainMap:
    """Degree-``degree`` map; ``maps[k]`` is ``target.rank(k + degree) x source.rank(k)``."""

    source: ChainComplex
    target: ChainComplex
    maps: dict[int, Matrix]
    degree: int = 0
    name: str = ""

    def at(self, k: int) -> Matrix:
        M = self.maps.get(k)
        if M is None:
            return zeros(self.target.rank(k + self.degree), self.source.rank(k))
        return M

    def check(self) -> list[str]:
        """``d f = f d`` (degree 0 maps only)."""
        bad = []
        top = max(self.source.top, self.target.top) + 1
        for k in range(1, top + 1):
            lhs = matmul(_dense(self.target, k), self.at(k)) if self.target.rank(k - 1) else []
            rhs = matmul(self.at(k - 1), _dense(self.source, k)) if self.target.rank(k - 1) else []
            if _nz(_sub(lhs, rhs)):
                bad.append(f"{self.name or 'map'} fails to commute with d in degree {k}")
        return bad


def _sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def _add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def _neg(A: Matrix) -> Matrix:
    return [[-a for a in r] for r in A]


def _nz(A: Matrix) -> bool:
    return any(any(r) for r in A)


def _mm(A: Matrix, B: Matrix, rows: int, cols: int) -> Matrix:
    if not rows or not cols:
        return zeros(rows, cols)
    if not A or not A[0] or not B:
        return zeros(rows, cols)
    return matmul(A, B)


def _blocks(rows: list[int], cols: list[int], entries: dict[tuple[int, int], Matrix]) -> Matrix:
    """Assemble a block matrix; missing blocks are zero."""
    M = zeros(sum(rows), sum(cols))
    r0 = 0
    for bi, r in enumerate(rows):
        c0 = 0
        for bj, c in enumerate(cols):
            B = entries.get((bi, bj))
            if B is not None:
                for i in range(r):
                    for j in range(c):
                        M[r0 + i][c0 + j] = B[i][j]
            c0 += c
        r0 += r
    return M


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    maps = {}
    for k in range(f.source.top + 1):
        maps[k] = _mm(g.at(k + f.degree), f.at(k), g.target.rank(k + f.degree + g.degree), f.source.rank(k))
    return ChainMap(f.source, g.target, maps, f.degree + g.degree)


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {k: identity(C.ranks[k]) for k in range(C.top + 1)}, name="id")


def mapping_cone(f: ChainMap) -> ChainComplex:
    """``cone(f)_k = Y_k (+) X_{k-1}`` with ``d(y, x) = (dy + f x, -dx)``."""
    X, Y = f.source, f.target
    top = max(Y.top, X.top + 1)
    ranks = [Y.rank(k) + X.rank(k - 1) for k in range(top + 1)]
    mats = {}
    for k in range(1, top + 1):
        rows, cols = [Y.rank(k - 1), X.rank(k - 2)], [Y.rank(k), X.rank(k - 1)]
        mats[k] = _blocks(rows, cols, {(0, 0): _dense(Y, k), (0, 1): f.at(k - 1), (1, 1): _neg(_dense(X, k - 1))})
    return from_blocks(ranks, mats, "cone")


def is_acyclic(C: ChainComplex) -> bool:
    return all(C.homology(k).is_zero() for k in range(C.top + 1))


def is_quasi_iso(f: ChainMap) -> bool:
    return is_acyclic(mapping_cone(f))


def homology_signature(C: ChainComplex, upto: int | None = None) -> list[str]:
    return [str(h) for h in C.homology_all(upto)]


# -- good truncation ------------------------------------------------------------------


def _boundary_basis(C: ChainComplex, a: int) -> Matrix:
    """Basis of ``im d_{a+1}`` inside ``C_a`` (list of vectors)."""
    if a + 1 > C.top:
        return []
    D = C.dense(a + 1)
    return lattice_basis([[D[i][j] for i in range(C.ranks[a])] for j in range(C.ranks[a + 1])], C.ranks[a])


def _coords_in(basis: Matrix, vectors: Matrix, ambient: int) -> Matrix:
    """Matrix whose column ``j`` expresses ``vectors[j]`` in ``basis`` (``len(basis) x len(vectors)``)."""
    if not basis:
        if any(any(v) for v in vectors):
            raise ValueError("vector outside the empty lattice")
        return zeros(0, len(vectors))
    G = [[b[i] for b in basis] for i in range(ambient)]
    sf = smith_normal_form(G, len(basis))
    cols = []
    for v in vectors:
        x = _solve_with(sf, list(v), len(basis))
        if x is None:
            raise ValueError("vector outside the boundary lattice")
        cols.append(x)
    return [[c[i] for c in cols] for i in range(len(basis))]


@dataclass
class Truncation:
    complex: ChainComplex
    boundary_basis: Matrix
    a: int


def good_truncation(C: ChainComplex, a: int) -> Truncation:
    if a < 0:
        raise NonConnective("truncation degree must be nonnegative")
    B = _boundary_basis(C, a)
    ranks = [C.rank(k) for k in range(a + 1)] + [len(B)]
    mats = {k: C.dense(k) for k in range(1, min(a, C.top) + 1)}
    if B:
        mats[a + 1] = [[b[i] for b in B] for i in range(C.ranks[a])]
    return Truncation(from_blocks(ranks, mats, f"tau<={a}"), B, a)


def truncation_map(C: ChainComplex, T: Truncation) -> ChainMap:
    """``C -> tau_{<=a} C``: identity below ``a + 1`` and ``d`` onto the boundaries."""
    a = T.a
    maps = {k: identity(C.ranks[k]) for k in range(min(a, C.top) + 1)}
    if a + 1 <= C.top and T.complex.top >= a + 1:
        D = C.dense(a + 1)
        maps[a + 1] = _coords_in(T.boundary_basis, [[D[i][j] for i in range(C.ranks[a])]
                                                     for j in range(C.ranks[a + 1])], C.ranks[a])
    return ChainMap(C, T.complex, maps, name=f"C->tau<={a}")


def structure_map(C: ChainComplex, upper: Truncation, lower: Truncation) -> ChainMap:
    """``tau_{<=a} C -> tau_{<=a-1} C``."""
    a = upper.a
    maps = {k: identity(C.rank(k)) for k in range(a)}
    if lower.complex.top >= a:
        D = _dense(C, a)
        maps[a] = _coords_in(lower.boundary_basis, [[D[i][j] for i in range(C.rank(a - 1))]
                                                     for j in range(C.rank(a))], C.rank(a - 1))
    return ChainMap(upper.complex, lower.complex, maps, name=f"tau<={a}->tau<={a - 1}")


# -- direct sums, pullbacks and pushouts ---------------------------------------------------


def direct_sum(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    top = max(X.top, Y.top)
    ranks = [X.rank(k) + Y.rank(k) for k in range(top + 1)]
    mats = {k: _blocks([X.rank(k - 1), Y.rank(k - 1)], [X.rank(k), Y.rank(k)],
                       {(0, 0): _dense(X, k), (1, 1): _dense(Y, k)}) for k in range(1, top + 1)}
    return from_blocks(ranks, mats, "sum")


@dataclass
class ChainSquare:
    """``top: P -> Y``, ``left: P -> X``, ``bottom: X -> Z``, ``right: Y -> Z`` and a homotopy
    ``H: P -> Z`` (degree 1) with ``dH + Hd = bottom.left - right.top``."""

    stage: int
    P: ChainComplex
    X: ChainComplex
    Y: ChainComplex
    Z: ChainComplex
    left: ChainMap
    top: ChainMap
    bottom: ChainMap
    right: ChainMap
    H: ChainMap
    certificates: dict = field(default_factory=dict)

    def homotopy_ok(self) -> bool:
        P, Z = self.P, self.Z
        for k in range(P.top + 1):
            rows, cols = Z.rank(k), P.rank(k)
            lhs = _add(_mm(_dense(Z, k + 1), self.H.at(k), rows, cols),
                       _mm(self.H.at(k - 1), _dense(P, k), rows, cols))
            rhs = _sub(_mm(self.bottom.at(k), self.left.at(k), rows, cols),
                       _mm(self.right.at(k), self.top.at(k), rows, cols))
            if _nz(_sub(lhs, rhs)):
                return False
        return True

    def homotopy_pullback(self) -> tuple[ChainComplex, ChainMap]:
        """``X (+) Y (+) Z[1]`` with ``d(x, y, z) = (dx, dy, fx - gy - dz)`` and the comparison from ``P``.

        Everything is suspended once so the ``Z_0`` term, which sits in degree -1, fits in a
        nonnegatively graded complex. The returned map is ``sP -> s(holim)``.
        """
        X, Y, Z, P = self.X, self.Y, self.Z, self.P
        top = max(X.top, Y.top, Z.top - 1, P.top)
        ranks = [Z.rank(0)] + [X.rank(k) + Y.rank(k) + Z.rank(k + 1) for k in range(top + 1)]
        mats = {1: _blocks([Z.rank(0)], [X.rank(0), Y.rank(0), Z.rank(1)],
                           {(0, 0): self.bottom.at(0), (0, 1): _neg(self.right.at(0)),
                            (0, 2): _neg(_dense(Z, 1))})}
        for k in range(1, top + 1):
            rows = [X.rank(k - 1), Y.rank(k - 1), Z.rank(k)]
            cols = [X.rank(k), Y.rank(k), Z.rank(k + 1)]
            mats[k + 1] = _blocks(rows, cols, {(0, 0): _dense(X, k), (1, 1): _dense(Y, k),
                                               (2, 0): self.bottom.at(k), (2, 1): _neg(self.right.at(k)),
                                               (2, 2): _neg(_dense(Z, k + 1))})
        Q = from_blocks(ranks, mats, "s holim")
        sP = from_blocks([0] + [P.rank(k) for k in range(P.top + 1)],
                         {k + 1: _dense(P, k) for k in range(1, P.top + 1)}, "s P")
        maps = {0: _blocks([Z.rank(0)], [0], {})}
        for k in range(P.top + 1):
            maps[k + 1] = _blocks([X.rank(k), Y.rank(k), Z.rank(k + 1)], [P.rank(k)],
                                  {(0, 0): self.left.at(k), (1, 0): self.top.at(k), (2, 0): self.H.at(k)})
        return Q, ChainMap(sP, Q, maps, name="P->holim")

    def homotopy_pushout(self) -> tuple[ChainComplex, ChainMap]:
        """``cone(P -> X (+) Y)`` with ``d(x, y, w) = (dx + lw, dy - tw, -dw)`` and the comparison to ``Z``."""
        X, Y, Z, P = self.X, self.Y, self.Z, self.P
        top = max(X.top, Y.top, P.top + 1)
        ranks = [X.rank(k) + Y.rank(k) + P.rank(k - 1) for k in range(top + 1)]
        mats = {}
        for k in range(1, top + 1):
            rows = [X.rank(k - 1), Y.rank(k - 1), P.rank(k - 2)]
            cols = [X.rank(k), Y.rank(k), P.rank(k - 1)]
            mats[k] = _blocks(rows, cols, {(0, 0): _dense(X, k), (1, 1): _dense(Y, k),
                                           (0, 2): self.left.at(k - 1), (1, 2): _neg(self.top.at(k - 1)),
                                           (2, 2): _neg(_dense(P, k - 1))})
        Q = from_blocks(ranks, mats, "hocolim")
        maps = {}
        for k in range(Q.top + 1):
            maps[k] = _blocks([Z.rank(k)], [X.rank(k), Y.rank(k), P.rank(k - 1)],
                              {(0, 0): self.bottom.at(k), (0, 1): self.right.at(k), (0, 2): self.H.at(k - 1)})
        return Q, ChainMap(Q, Z, maps, name="hocolim->Z")

    def certify(self) -> dict:
        out = {"homotopy": self.homotopy_ok()}
        for name in ("left", "top", "bottom", "right"):
            out[name] = not getattr(self, name).check()
        Q, cmp_ = self.homotopy_pullback()
        out["pullback-map"] = not cmp_.check() and not Q.check()
        out["pullback"] = out["pullback-map"] and is_quasi_iso(cmp_)
        Q2, cmp2 = self.homotopy_pushout()
        out["pushout-map"] = not cmp2.check() and not Q2.check()
        out["pushout"] = out["pushout-map"] and is_quasi_iso(cmp2)
        self.certificates = out
        return out

    def recheck(self) -> list[LedgerEntry]:
        c = self.certify()
        return [LedgerEntry(self.stage, "square commutes up to homotopy", STRICT, c["homotopy"]),
                LedgerEntry(self.stage, "pullback", HOMOLOGY, c["pullback"]),
                LedgerEntry(self.stage, "pushout", HOMOLOGY, c["pushout"])]


def _corner(C: ChainComplex, T0: Truncation, f: ChainMap, upper: Truncation, lower: Truncation, a: int) -> ChainSquare:
    cone = mapping_cone(f)
    Z = direct_sum(T0.complex, cone)
    X, P, Y = lower.complex, upper.complex, T0.complex
    top = _to_tau0(P, T0, C, "t")
    trunc_low = _to_tau0(X, T0, C, "t")
    incl = {}
    for k in range(X.top + 1):
        incl[k] = _blocks([X.rank(k), P.rank(k - 1)], [X.rank(k)], {(0, 0): identity(X.rank(k))})
    bottom = {}
    for k in range(X.top + 1):
        bottom[k] = _blocks([Y.rank(k), cone.rank(k)], [X.rank(k)],
                            {(0, 0): trunc_low.at(k), (1, 0): incl[k]})
    bottom_map = ChainMap(X, Z, bottom, name="k")
    right = {k: _blocks([Y.rank(k), cone.rank(k)], [Y.rank(k)], {(0, 0): identity(Y.rank(k))})
             for k in range(Y.top + 1)}
    right_map = ChainMap(Y, Z, right, name="zero")
    H = {}
    for k in range(P.top + 1):
        # H(w) = (0, (0, w)) in Z_{k+1} = Y_{k+1} (+) X_{k+1} (+) P_k
        H[k] = _blocks([Y.rank(k + 1), X.rank(k + 1), P.rank(k)], [P.rank(k)], {(2, 0): identity(P.rank(k))})
    return ChainSquare(a, P, X, Y, Z, f, top, bottom_map, right_map, ChainMap(P, Z, H, 1, "H"))


def _columns(M: Matrix) -> Matrix:
    if not M:
        return []
    return [[M[i][j] for i in range(len(M))] for j in range(len(M[0]))]


def _to_tau0(S: ChainComplex, T0: Truncation, C: ChainComplex, name: str) -> ChainMap:
    """A truncation ``S`` of ``C`` (degree ``>= 0``) onto ``tau_{<=0} C``."""
    f = ChainMap(S, T0.complex, {0: identity(C.rank(0))}, name=name)
    if T0.complex.top >= 1 and S.top >= 1:
        f.maps[1] = _coords_in(T0.boundary_basis, _columns(_dense(S, 1)), C.rank(0))
    return f


def chain_postnikov_tower(C: ChainComplex, S: int) -> TowerBundle:
    """Good truncations ``tau_{<=a} C`` for ``0 <= a <= S`` with certified squares for ``a >= 1``."""
    if C.check():
        raise ValueError("boundary maps do not square to zero")
    if S < 0:
        raise NonConnective("top stage must be nonnegative")
    T = TowerBundle(C, "chain", S)
    truncs = {a: good_truncation(C, a) for a in range(S + 1)}
    for a, tr in truncs.items():
        T.stages[a] = tr.complex
        cone = truncation_map(C, tr)
        T.cone[a] = cone
        want = [str(C.homology(k)) if k <= a else "0" for k in range(a + 2)]
        got = homology_signature(tr.complex, a + 1)
        T.record(a, "stage homology", HOMOLOGY, got[: a + 2] == want, f"H_* = {got}")
        T.record(a, "cone map", STRICT, not cone.check())
    for a in range(1, S + 1):
        f = structure_map(C, truncs[a], truncs[a - 1])
        T.structure[a] = f
        comm = compose(f, T.cone[a])
        same = all(comm.at(k) == T.cone[a - 1].at(k) for k in range(C.top + 1))
        T.record(a, "structure map", STRICT, not f.check() and same, "chain map commuting with cone maps")
        sq = _corner(C, truncs[0], f, truncs[a], truncs[a - 1], a)
        cert = sq.certify()
        T.squares[a] = sq
        h = homology_signature(sq.Z, a + 2)
        want = [str(C.homology(0))] + ["0"] * a + [str(C.homology(a))] + ["0"]
        if a == 0:
            want = [str(C.homology(0))]
        T.record(a, "corner homology", HOMOLOGY, h == want[: len(h)], f"H_*(K_{a}) = {h}")
        T.record(a, "square commutes up to homotopy", STRICT, cert["homotopy"])
        T.record(a, "pullback", HOMOLOGY, cert["pullback"], "comparison into the homotopy pullback is a quasi-iso")
        T.record(a, "pushout", HOMOLOGY, cert["pushout"], "comparison from the homotopy pushout is a quasi-iso")
    return T


# -- random complexes ------------------------------------------------------------------------


def random_chain_complex(rng: random.Random, max_rank: int = 6, max_entry: int = 9, max_top: int = 4,
                         tries: int = 200) -> ChainComplex:
    """Connective complex with ranks ``<= max_rank`` and boundary entries in ``[-max_entry, max_entry]``.

    Each boundary is a small combination of a kernel basis of the previous one;
    candidates with large entries are rejected.
    """
    top = rng.randint(1, max_top)
    ranks = [rng.randint(1, max_rank)]
    mats: dict[int, Matrix] = {}
    for k in range(1, top + 1):
        r = rng.randint(0, max_rank)
        if k == 1:
            M = [[rng.randint(-max_entry, max_entry) for _ in range(r)] for _ in range(ranks[0])]
        else:
            prev = mats.get(k - 1)
            K = kernel_basis(prev, ranks[k - 1]) if prev is not None and ranks[k - 2] else \
                [[int(i == j) for i in range(ranks[k - 1])] for j in range(ranks[k - 1])]
            M = None
            for _ in range(tries):
                cols = []
                for _ in range(r):
                    c = [0] * ranks[k - 1]
                    for v in K:
                        t = rng.randint(-2, 2)
                        if t:
                            c = [a + t * b for a, b in zip(c, v)]
                    cols.append(c)
                if all(abs(x) <= max_entry for c in cols for x in c):
                    M = [[c[i] for c in cols] for i in range(ranks[k - 1])]
                    break
            if M is None:
                M = zeros(ranks[k - 1], r)
        ranks.append(r)
        mats[k] = M
    C = ChainComplex.from_dense(ranks, mats)
    return C
