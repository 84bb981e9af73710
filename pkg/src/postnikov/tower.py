"""Postnikov towers of simplicial sets.

Stages are coskeleta ``P_a = cosk_{a+1} X``.  The k-invariant at ``a = 2`` is
read off the universal cover: a 3-simplex of ``cosk_2 X`` is a hollow
tetrahedron in ``X``, and its boundary, lifted to the cover, is a 2-cycle whose
class lies in ``pi_2 = H_2(cover)``.  Reconstruction goes the other way: a
twisted cocycle ``beta`` on a base gives the twisted product ``E_beta``, built as
the strict pullback of ``beta: B -> K(A, a+1)`` along the path fibration
``delta: W K(A, a) -> K(A, a+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from .chains import (ChainComplex, LocalSystem, PresentedComplex, Presentation, TwistedCohomology, chains_of,
                     twisted_chain_complex)
from .constructions import CoskeletonResult, coskeleton, product as sset_product, pullback
from .em import (GroupoidModule, InfiniteCoefficients, MinimalEMModel, OverBase, ParametrizedSpectrumData,
                 PathEMModel, cochain_coboundary, cocycle_to_map, cocycle_values, em_minimal_model, faces_of_dim,
                 heart_membership, pullback_values, square_zero_product)
from .groupoid import FiniteGroupoid, NerveModel, nerve
from .linalg import SubQuotient, kernel_basis, matvec
from .pi1 import CoverData, FundamentalGroupoid, NotCertified, certify_finite, fundamental_groupoid, universal_cover
from .sset import (BudgetExceeded, LevelModel, Materialized, Simplex, SimplicialError, SimplicialMap, SimplicialSet,
                   codegeneracy, coface, compose_eta, ident, materialize)

STRICT = "strict-pullback"
HOMOLOGY = "homology-certified"
FORMAL = "formal"


class HurewiczError(SimplicialError):
    """The universal cover has nonzero H_1, so H_2 of it is not pi_2."""


@dataclass
class LedgerEntry:
    stage: int
    item: str
    level: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        mark = "ok" if self.ok else "FAIL"
        return f"[{mark}] stage {self.stage} {self.item} ({self.level}) {self.detail}".rstrip()


# -- twisted products ------------------------------------------------------------------


class TwistedProductModel(LevelModel):
    """Keys ``(base simplex, values)`` where the values form a normalized
    a-cochain ``c`` on ``Delta^k`` with ``delta c = beta`` restricted to the base simplex."""

    def __init__(self, base: OverBase, A: GroupoidModule, a: int, beta: list[tuple[int, ...]],
                 window: int | None = None):
        self.base, self.A, self.a, self.beta, self.window = base, A, a, beta, window
        self.em = MinimalEMModel(A, a, window)
        self._chain: dict = {}

    def chain(self, s: Simplex):
        hit = self._chain.get(s)
        if hit is None:
            hit = self._chain[s] = self.base.chain(s)
        return hit

    def target(self, s: Simplex) -> dict[tuple[int, ...], tuple[int, ...]]:
        Y, A = self.base.Y, self.A
        xs, _ = self.chain(s)
        k = len(xs) - 1
        out = {}
        for w in faces_of_dim(k, self.a + 1):
            f = Y.act(s, w)
            out[w] = A.zero_vec(xs[0]) if Y.is_degenerate(f) else A.normal(xs[w[0]], self.beta[f[1]])
        return out

    def solutions(self, s: Simplex):
        """Every cochain over ``s``: free values on faces through 0, the rest solved."""
        A, a = self.A, self.a
        xs, gs = self.chain(s)
        k = len(xs) - 1
        faces = faces_of_dim(k, a)
        if not faces:
            yield ()
            return
        free = [f for f in faces if f[0] == 0]
        fixed = [f for f in faces if f[0] != 0]
        tgt = self.target(s) if fixed else {}
        for choice in iproduct(A.elements(xs[0], self.window), repeat=len(free)):
            vals = dict(zip(free, choice))
            ok = True
            for f in fixed:
                v = self.em.solve_face(xs, gs, f, vals, tgt[(0,) + f])
                if not A.in_window(xs[0], v, self.window):
                    ok = False
                    break
                vals[f] = v
            if ok:
                yield tuple(vals[f] for f in faces)

    def contains(self, key) -> bool:
        """Membership test usable for infinite coefficients."""
        s, vals = key
        xs, gs = self.chain(s)
        k = len(xs) - 1
        if len(vals) != len(faces_of_dim(k, self.a)):
            return False
        if k <= self.a:
            return True
        dc = cochain_coboundary(self.A, self.a, xs, gs, vals)
        tgt = self.target(s)
        return all(v == tgt[w] for v, w in zip(dc, faces_of_dim(k, self.a + 1)))

    def level(self, k):
        for s in self.base.Y.full_level(k):
            for vals in self.solutions(s):
                yield (s, vals)

    def face(self, key, i):
        s, vals = key
        k = len(s[0]) - 1
        zero = self.A.zero_vec(self.chain(s)[0][0])
        return (self.base.Y.face(s, i), pullback_values(k, self.a, vals, coface(k, i), zero))

    def degeneracy(self, key, j):
        s, vals = key
        k = len(s[0]) - 1
        zero = self.A.zero_vec(self.chain(s)[0][0])
        return (self.base.Y.degeneracy(s, j), pullback_values(k, self.a, vals, codegeneracy(k, j), zero))


@dataclass
class TwistedProduct:
    """``E_beta -> B``: fiber ``K(A(x), a)``, twisted by the (a+1)-cocycle ``beta``.

    ``beta`` holds one value per nondegenerate (a+1)-simplex of the base, in
    the fiber over its first vertex.
    """

    base: OverBase
    A: GroupoidModule
    a: int
    beta: list[tuple[int, ...]]
    name: str = "E"
    _mats: dict = field(default_factory=dict, repr=False)

    def model(self, window: int | None = None) -> TwistedProductModel:
        return TwistedProductModel(self.base, self.A, self.a, self.beta, window)

    def materialize(self, D: int, budget: int | None = None, window: int | None = None) -> Materialized:
        key = (D, window)
        if key in self._mats:
            return self._mats[key]
        if not self.A.is_finite() and window is None:
            raise InfiniteCoefficients(f"{self.name} is levelwise infinite; pass a window or use the formula route")
        model = self.model(window)
        mat = materialize(model, D, budget, kan=self.base.Y.kan and window is None, truncated=True, name=self.name)
        mat.model = model
        self._mats[key] = mat
        return mat

    def projection(self, mat: Materialized) -> SimplicialMap:
        return SimplicialMap(mat.sset, self.base.Y, [[key[0] for key in lvl] for lvl in mat.keys], "projection")

    def zero_values(self, s: Simplex) -> tuple:
        xs, _ = self.base.chain(s)
        k = len(xs) - 1
        return tuple(self.A.zero_vec(xs[f[0]]) for f in faces_of_dim(k, self.a))

    def section_key(self, s: Simplex):
        """``(s, 0)``; a simplex whenever ``beta`` vanishes on ``s`` (always below a+1)."""
        return (s, self.zero_values(s))

    def fiber_key(self, x: int, v) -> tuple:
        """The a-simplex over the degenerate base simplex at ``x`` with top value ``v``."""
        Y = self.base.Y
        s = Y.act(Y.nd(0, x), (0,) * (self.a + 1))
        return (s, (self.A.normal(self.base.chain(Y.nd(0, x))[0][0], v),))

    def obstruction(self, sigma: Simplex, tops: list[tuple[int, ...]]) -> tuple[int, ...]:
        """``beta(sigma) - delta c`` for the hollow (a+1)-simplex whose face ``i`` carries ``tops[i]``.

        This is the k-invariant value of the sphere in the fiber coordinates
        of ``A``; it vanishes exactly when the sphere bounds in ``E_beta``.
        """
        a, A = self.a, self.A
        xs, gs = self.base.chain(sigma)
        vals = []
        for f in faces_of_dim(a + 1, a):
            missing = next(i for i in range(a + 2) if i not in f)
            vals.append(tops[missing])
        dc = cochain_coboundary(A, a, xs, gs, tuple(vals))[0]
        Y = self.base.Y
        b = A.zero_vec(xs[0]) if Y.is_degenerate(sigma) else self.beta[sigma[1]]
        return A.normal(xs[0], [p - q for p, q in zip(b, dc)])

    def carrier(self, mat: Materialized) -> "Carrier":
        """The base, mapped into ``cosk_2 E`` by ``sigma -> (sigma, 0)`` on 2-skeleta."""
        if self.a != 2:
            raise SimplicialError("the section carrier is set up for a = 2")
        Y = self.base.Y
        images = [[mat.normal_form(self.section_key(s)) for s in Y.nondegenerate(k)] for k in range(3)]
        return Carrier(Y, SimplicialMap(Y, mat.sset, images, "section"))

    def local_system(self) -> LocalSystem:
        return self.base.local_system(self.A)

    def cohomology(self, degree: int | None = None) -> TwistedCohomology:
        return TwistedCohomology(self.base.Y, self.local_system(), self.a + 1 if degree is None else degree)

    def beta_vector(self, H: TwistedCohomology | None = None) -> list[int]:
        H = H or self.cohomology()
        return H.from_values(self.beta)


def twisted_product(base: OverBase, A: GroupoidModule, a: int, beta, name: str = "E") -> TwistedProduct:
    """``beta`` may be a flat cocycle vector or per-simplex values."""
    Y = base.Y
    if beta and isinstance(beta[0], int):
        H = TwistedCohomology(Y, base.local_system(A), a + 1)
        H.check_cocycle(list(beta))
        vals = [tuple(v) for v in cocycle_values(H, list(beta))]
    else:
        vals = [tuple(v) for v in beta]
    if len(vals) != Y.count(a + 1):
        raise SimplicialError(f"beta needs one value per nondegenerate {a + 1}-simplex of the base")
    return TwistedProduct(base, A, a, vals, name)


def nerve_base(A: GroupoidModule, D: int) -> tuple[OverBase, Materialized]:
    """The nerve of ``A``'s groupoid as a base over itself."""
    N = nerve(A.groupoid, D)
    model = NerveModel(A.groupoid)
    return OverBase(N.sset, lambda s: N.key_of(s, model)), N


# -- reconstruction --------------------------------------------------------------------------


@dataclass
class PullbackSquare:
    """``E -> W`` over ``B -> K``; ``right`` plays the zero section's role."""

    stage: int
    corner: SimplicialSet
    left: SimplicialMap    # E -> B
    top: SimplicialMap     # E -> W
    bottom: SimplicialMap  # B -> K(A, a+1), classifying the k-invariant
    right: SimplicialMap   # W -> K(A, a+1)
    level: str = FORMAL
    detail: str = ""
    parts: dict = field(default_factory=dict, repr=False)

    def commutes(self, upto: int | None = None) -> list[str]:
        E = self.corner
        d = E.max_dim if upto is None else upto
        bad = []
        for k in range(min(d, E.top_dim) + 1):
            for s in E.nondegenerate(k):
                if self.bottom(self.left(s)) != self.right(self.top(s)):
                    bad.append(f"dim {k} simplex {s[1]}")
        return bad

    def check_pullback(self, upto: int | None = None, budget: int | None = None) -> tuple[bool, str]:
        """Compare the corner with the pullback computed from scratch, level by level."""
        d = self.corner.max_dim if upto is None else upto
        bad = self.commutes(d)
        if bad:
            return False, f"square does not commute at stage {self.stage}: {bad[0]}"
        P = pullback(self.bottom, self.right, d, budget)
        E = self.corner
        for k in range(d + 1):
            imgs = set()
            for s in E.nondegenerate(k):
                p = P.pair(self.left(s), self.top(s))
                if P.sset.is_degenerate(p):
                    return False, f"stage {self.stage}: degenerate comparison image in dim {k}"
                imgs.add(p[1])
            if len(imgs) != E.count(k) or len(imgs) != P.sset.count(k):
                return False, (f"stage {self.stage}: dim {k} has {E.count(k)} corner simplices "
                               f"but the pullback has {P.sset.count(k)}")
        return True, f"corner equals the pullback through dim {d} (counts {E.counts(d)})"


@dataclass
class Reconstruction:
    total: TwistedProduct
    mat: Materialized | None
    square: PullbackSquare | None
    window: int | None = None

    @property
    def sset(self) -> SimplicialSet:
        if self.mat is None:
            raise InfiniteCoefficients("reconstruction is intensional")
        return self.mat.sset


def reconstruct(base: OverBase, A: GroupoidModule, a: int, k, D: int, budget: int | None = None,
                window: int | None = None, certify_dim: int | None = None) -> Reconstruction:
    """Pull the k-invariant back along the path fibration of ``K(A, a)``.

    ``k`` is a :class:`KInvariant` on ``base`` or a cocycle (flat vector or per
    simplex values) in ``C^{a+1}(base; A)``.  For infinite ``A`` the total space
    is intensional; the square is then certified on the sub-object of cochains
    with entries in ``[-window, window]`` (pass ``window``).
    """
    if isinstance(k, KInvariant):
        if k.carrier.Y is not base.Y:
            raise SimplicialError("k-invariant lives on a different base")
        values = [tuple(v) for v in k.cls.values()]
    else:
        values = k
    T = twisted_product(base, A, a, values, name=f"E{a}")
    finite = A.is_finite()
    if not finite and window is None:
        return Reconstruction(T, None, None)
    dc = min(D, a + 1) if certify_dim is None else certify_dim
    mat = T.materialize(D, budget, None if finite else window)
    sq = _pullback_square(T, mat, a, dc, budget, None if finite else window)
    return Reconstruction(T, mat, sq, window)


def _pullback_square(T: TwistedProduct, mat: Materialized, stage: int, D: int, budget, window) -> PullbackSquare:
    A, a, base = T.A, T.a, T.base
    kwin = None
    if window is not None:
        kwin = max([(a + 2) * window] + [abs(t) for v in T.beta for t in v])
    Wm = PathEMModel(A, a, window)
    W = materialize(Wm, D, budget, name="W")
    K = em_minimal_model(A, a + 1, D, budget, window=kwin)
    H = TwistedCohomology(base.Y, base.local_system(A), a + 1) if base.Y.known(a + 2) else None
    if H is not None:
        bottom = cocycle_to_map(K, base, H.from_values(T.beta), H)
    else:
        bottom = _classifying_map(T, K, D)
    right = SimplicialMap(W.sset, K.sset, [[K.simplex(Wm.delta(key)) for key in lvl] for lvl in W.keys], "delta")
    E = mat.sset.restricted(D) if mat.sset.max_dim > D else mat.sset
    left = SimplicialMap(E, base.Y, [[key[0] for key in lvl] for lvl in mat.keys[: D + 1]], "projection")
    top_imgs = []
    for lvl in mat.keys[: D + 1]:
        row = []
        for s, vals in lvl:
            xs, gs = base.chain(s)
            row.append(W.normal_form((xs, gs, vals)))
        top_imgs.append(row)
    top = SimplicialMap(E, W.sset, top_imgs, "forget")
    sq = PullbackSquare(stage, E, left, top, bottom, right, parts={"W": W, "Wm": Wm, "K": K})
    ok, detail = sq.check_pullback(D, budget)
    sq.level = STRICT if ok else FORMAL
    sq.detail = detail + ("" if window is None else f" (entries bounded by {window})")
    return sq


def _classifying_map(T: TwistedProduct, K, D: int) -> SimplicialMap:
    """``Y -> K(A, a+1)`` from per-simplex values (when ``Y`` stops below a+2)."""
    Y, A, n = T.base.Y, T.A, T.a + 1

    def image(s: Simplex) -> Simplex:
        xs, gs = T.base.chain(s)
        out = []
        for f in faces_of_dim(len(xs) - 1, n):
            face = Y.act(s, f)
            out.append(A.zero_vec(xs[f[0]]) if Y.is_degenerate(face) else A.normal(xs[f[0]], T.beta[face[1]]))
        return K.simplex((xs, gs, tuple(out)))

    return SimplicialMap.from_function(Y, K.sset, image, upto=D, name="classifying")


def translated_square(square: PullbackSquare, N: Materialized) -> PullbackSquare:
    """Negative control over a nerve base ``N``: ``right`` becomes ``delta + beta``.

    The translated map is still simplicial, but the square with the same
    corner no longer commutes wherever ``beta`` is nonzero.
    """
    K, Wm, W = square.parts["K"], square.parts["Wm"], square.parts["W"]
    A = K.A
    imgs = []
    for lvl in W.keys:
        row = []
        for key in lvl:
            xs, gs, _ = key
            d = Wm.delta(key)[2]
            b = K.key(square.bottom(N.normal_form((xs, gs))))[2]
            vals = tuple(A.add(xs[f[0]], p, q) for f, p, q in zip(faces_of_dim(len(xs) - 1, K.n), d, b))
            row.append(K.simplex((xs, gs, vals)))
        imgs.append(row)
    right = SimplicialMap(square.right.domain, square.right.codomain, imgs, "delta+beta")
    return PullbackSquare(square.stage, square.corner, square.left, square.top, square.bottom, right, FORMAL,
                          "translated", dict(square.parts))


# -- pi_2 and k-invariants ------------------------------------------------------------------


@dataclass
class Carrier:
    """A simplicial set ``Y`` with a map into ``X`` on 2-skeleta.

    A 3-simplex of ``Y`` then determines a hollow tetrahedron in ``X``, i.e. a
    3-simplex of ``cosk_2 X``.
    """

    Y: SimplicialSet
    low: SimplicialMap

    def sphere(self, tau: Simplex) -> list[Simplex]:
        return [self.low(self.Y.face(tau, i)) for i in range(4)]


@dataclass
class Pi2:
    """``pi_2`` of a connected ``X`` with finite fundamental group, as ``H_2`` of the cover."""

    X: SimplicialSet
    P: FundamentalGroupoid
    cover: CoverData
    sq: SubQuotient
    presentation: Presentation
    module: GroupoidModule

    @property
    def group(self):
        return self.presentation.group

    def coords(self, vec: list[int]) -> tuple[int, ...]:
        return tuple(self.sq.coords(vec))

    def lift_vector(self, terms: list[tuple[Simplex, int, int]]) -> list[int]:
        """Chain on the cover from ``(simplex, label, coefficient)`` terms."""
        vec = [0] * self.cover.sset.count(2)
        for s, g, c in terms:
            t = self.cover.lift(s, g)
            if not self.cover.sset.is_degenerate(t):
                vec[t[1]] += c
        return vec

    def sphere_class(self, faces: list[Simplex]) -> tuple[int, ...]:
        """Class of the hollow tetrahedron with faces ``faces``, based at its first vertex."""
        g01 = self.P.edge_class(self.X.edge(faces[3], 0, 1))
        terms = [(faces[0], g01, 1)] + [(faces[i], 0, (-1) ** i) for i in range(1, 4)]
        return self.coords(self.lift_vector(terms))

    def simplex_class(self, t: Simplex) -> tuple[int, ...]:
        """Class of a 2-simplex whose boundary is degenerate."""
        return self.coords(self.lift_vector([(t, 0, 1)]))

    def local_system(self, Y: SimplicialSet, chain) -> LocalSystem:
        return self.module.local_system(Y, chain)


def extract_pi2(X: SimplicialSet, P: FundamentalGroupoid | None = None, bound: int = 64) -> Pi2:
    """``pi_2`` as a module over the fundamental groupoid (deck action on ``H_2`` of the cover)."""
    if not X.known(3):
        raise SimplicialError("pi_2 extraction needs X through dimension 3")
    P = P or fundamental_groupoid(X)
    if not P.certified:
        certify_finite(P, bound)
    if len(P.roots) != 1:
        raise SimplicialError("pi_2 extraction needs a connected input")
    cov = universal_cover(X.restricted(3) if X.max_dim > 3 else X, P, P.roots[0])
    C = chains_of(cov.sset, 3)
    if not C.homology(1).is_zero():
        raise HurewiczError(f"H_1 of the universal cover is {C.homology(1)}, not 0")
    n2 = C.ranks[2]
    Z = kernel_basis(C.dense(2), n2) if C.ranks[1] else [[int(i == j) for i in range(n2)] for j in range(n2)]
    B = [[col.get(i, 0) for i in range(n2)] for col in C.d[3] if col] if len(C.ranks) > 3 else []
    sq = SubQuotient(n2, Z, B)
    moduli = sq.moduli
    pres = Presentation(len(moduli), [[m if i == j else 0 for j in range(len(moduli))]
                                     for i, m in enumerate(moduli) if m])
    G = cov.group
    gens = [sq.lift(tuple(int(i == j) for i in range(len(moduli)))) for j in range(len(moduli))]
    rho = {}
    for g in G.elements():
        h = G.inverse(g)
        cols = []
        for v in gens:
            w = [0] * n2
            for z, c in enumerate(v):
                if c:
                    w[cov.deck_on_chain_index(2, z, h)] += c
            cols.append(list(sq.coords(w)))
        rho[g] = [[cols[j][i] for j in range(len(cols))] for i in range(len(moduli))]
    groupoid = P.as_finite_groupoid()
    module = GroupoidModule(groupoid, [pres], [rho], "pi2")
    return Pi2(X, P, cov, sq, pres, module)


@dataclass
class KInvariant:
    """``k_a`` as a twisted cocycle on a carrier of ``P_{a-1}``, valued in ``pi_a``."""

    stage: int
    module: GroupoidModule
    carrier: Carrier
    base: OverBase
    cohomology: TwistedCohomology
    cls: object  # CohomologyClass
    realization: SimplicialMap | None = None
    certification: str = FORMAL
    vanishing: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def coords(self) -> tuple[int, ...]:
        return self.cls.coords

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.cohomology.moduli

    def is_zero(self) -> bool:
        return self.cls.is_zero()

    def describe(self) -> str:
        return f"({', '.join(map(str, self.coords))}) in {self.cohomology.group}"


def nerve_section(X: SimplicialSet, P: FundamentalGroupoid, D: int = 4) -> Carrier | None:
    """Map ``N(Pi_1 X) -> X`` on 2-skeleta, if edges and triangles can be chosen strictly."""
    G = P.as_finite_groupoid()
    N = nerve(G, D)
    model = NerveModel(G)
    edges: dict = {}
    for s in X.nondegenerate(1):
        u, v = X.vertices(s)
        edges.setdefault((u, P.edge_class(s), v), s)
    for v in range(X.count(0)):
        edges[(v, 0, v)] = X.act(X.nd(0, v), (0, 0))
    tri: dict = {}
    for t in X.full_level(2):
        tri.setdefault(tuple(X.face(t, i) for i in range(3)), t)
    images: list[list[Simplex]] = [[], [], []]
    for s in N.sset.nondegenerate(0):
        images[0].append(X.nd(0, N.key_of(s, model)[0][0]))
    for s in N.sset.nondegenerate(1):
        (u, v), (g,) = N.key_of(s, model)
        e = edges.get((u, g, v))
        if e is None:
            return None
        images[1].append(e)
    for s in N.sset.nondegenerate(2):
        (u, v, w), (g, h) = N.key_of(s, model)
        grp = G.group_of(u)
        fs = (edges.get((v, h, w)), edges.get((u, grp.mul(g, h), w)), edges.get((u, g, v)))
        t = tri.get(fs)
        if t is None:
            return None
        images[2].append(t)
    return Carrier(N.sset, SimplicialMap(N.sset, X, images, "section"))


def coskeleton_carrier(X: SimplicialSet, budget: int | None = None) -> Carrier:
    """``cosk_2 X`` itself through dimension 4."""
    C = coskeleton(X, 2, 4, budget, with_unit=False)
    m = C.model
    images = [[m.simplices[k][C.mat.key_of(s, m)[1]] for s in C.sset.nondegenerate(k)] for k in range(3)]
    return Carrier(C.sset, SimplicialMap(C.sset, X, images, "identity"))


def carrier_chain(carrier: Carrier, P: FundamentalGroupoid):
    """Nerve chain of a carrier simplex: first-vertex objects and edge classes in ``X``."""
    Y, low, X = carrier.Y, carrier.low, carrier.low.codomain

    def chain(s: Simplex):
        k = len(s[0]) - 1
        xs = tuple(low(Y.act(s, (j,)))[1] for j in range(k + 1))
        gs = tuple(P.edge_class(low(Y.edge(s, j, j + 1))) for j in range(k))
        return xs, gs

    return chain


def extract_k_invariant(X: SimplicialSet, a: int = 2, D: int = 4, carrier: Carrier | None = None,
                        pi2: Pi2 | None = None, bound: int = 64, budget: int | None = None,
                        realize: bool = True, check_vanishing: bool = True) -> KInvariant:
    """k_2 of ``X`` as a twisted 3-cocycle on a carrier of ``cosk_2 X``.

    The value on a hollow tetrahedron is minus the class of its lifted
    boundary in ``pi_2``.  Without a Kan flag the cocycle is returned but only
    as a formal object.
    """
    if a != 2:
        raise SimplicialError("general k-invariant extraction is implemented at stage 2; "
                              "use twisted_product_k_invariant for library-built inputs")
    pi2 = pi2 or extract_pi2(X, bound=bound)
    notes = []
    if carrier is None:
        carrier = nerve_section(X, pi2.P, D)
        if carrier is None:
            notes.append("no strict section of the nerve; carrier is cosk_2 X")
            carrier = coskeleton_carrier(X, budget)
    Y = carrier.Y
    chain = carrier_chain(carrier, pi2.P)
    base = OverBase(Y, chain)
    LS = pi2.local_system(Y, chain)
    H = TwistedCohomology(Y, LS, 3)
    values = []
    pres = pi2.presentation
    for tau in Y.nondegenerate(3):
        c = pi2.sphere_class(carrier.sphere(tau))
        values.append(pres.normal([-t for t in c]))
    z = H.from_values(values)
    cls = H.class_of(z)
    vanishing = None
    if check_vanishing:
        vanishing = all(not any(pi2.sphere_class([X.face(s, i) for i in range(4)]))
                        for s in X.nondegenerate(3))
    realization = None
    if realize and pi2.module.is_finite() and Y.known(4):
        K = em_minimal_model(pi2.module, 3, min(D, Y.max_dim), budget)
        realization = cocycle_to_map(K, base, z, H)
    level = "kan-certified" if X.kan else FORMAL
    if not X.kan:
        notes.append("input not Kan-flagged: formal cocycle, uncertified")
    return KInvariant(2, pi2.module, carrier, base, H, cls, realization, level, vanishing, notes)


# -- comparing with the coefficients of a twisted product ----------------------------------------


@dataclass
class FiberIdentification:
    """``phi_x: A(x) -> pi_2`` from fiber spheres, with its inverse on finite groups."""

    forward: dict[int, dict[tuple, tuple]]
    backward: dict[int, dict[tuple, tuple]]
    bijective: bool
    equivariant: bool


def fiber_identification(T: TwistedProduct, mat: Materialized, pi2: Pi2) -> FiberIdentification:
    A, Y, base = T.A, T.base.Y, T.base
    pres = pi2.presentation
    fwd, bwd = {}, {}
    bij = True
    obj = [base.chain(Y.nd(0, v))[0][0] for v in range(Y.count(0))]
    for v in range(Y.count(0)):
        f = {}
        for e in A.elements(obj[v]):
            f[tuple(e)] = pres.normal(list(pi2.simplex_class(mat.normal_form(T.fiber_key(v, e)))))
        fwd[v] = f
        bwd[v] = {c: e for e, c in f.items()}
        bij = bij and len(bwd[v]) == len(f) == _order(pres)
    eq = True
    if Y.top_dim >= 1 and T.a == 2:
        LS = pi2.local_system(Y, carrier_chain(T.carrier(mat), pi2.P))
        for e, s in enumerate(Y.nondegenerate(1)):
            u, w = Y.vertices(s)
            g = base.chain(s)[1][0]
            for val, c in fwd[u].items():
                lhs = fwd[w].get(A.normal(obj[w], A.act(obj[u], g, val)))
                if lhs != pres.normal(matvec(LS.edge[e], list(c))):
                    eq = False
    return FiberIdentification(fwd, bwd, bij, eq)


def _order(P: Presentation) -> int:
    o = P.group.order
    return -1 if o is None else o


@dataclass
class RoundTrip:
    expected: tuple[int, ...]
    recovered: tuple[int, ...]
    group: str
    identification_ok: bool
    vanishing: bool | None
    square: str

    @property
    def ok(self) -> bool:
        return self.identification_ok and self.expected == self.recovered and self.vanishing is not False


def k_invariant_in_coefficients(T: TwistedProduct, mat: Materialized, kinv: KInvariant, pi2: Pi2):
    """Transport the extracted cocycle on the base into ``A`` via fiber spheres."""
    ident_ = fiber_identification(T, mat, pi2)
    Y = T.base.Y
    vals = []
    for tau, v in zip(Y.nondegenerate(3), kinv.cls.values()):
        x0 = Y.vertices(tau)[0]
        vals.append(ident_.backward[x0][pi2.presentation.normal(list(v))])
    H = T.cohomology()
    return H.class_of(H.from_values(vals)), ident_


def round_trip(A: GroupoidModule, beta, D: int = 4, budget: int | None = None, base: OverBase | None = None):
    """``extract(reconstruct(beta))`` against ``beta``, in the coordinates of ``H^3(B; A)``."""
    if base is None:
        base, _ = nerve_base(A, D)
    R = reconstruct(base, A, 2, beta, 3, budget)
    T, mat = R.total, R.mat
    pi2 = extract_pi2(mat.sset)
    kinv = extract_k_invariant(mat.sset, 2, D, carrier=T.carrier(mat), pi2=pi2, budget=budget)
    got, ident_ = k_invariant_in_coefficients(T, mat, kinv, pi2)
    H = got.group
    want = H.class_of(T.beta_vector(H))
    return RoundTrip(want.coords, got.coords, str(H.group), ident_.bijective and ident_.equivariant,
                     kinv.vanishing, R.square.level if R.square else FORMAL), R, kinv


def reduced_module(A: GroupoidModule, m: int) -> GroupoidModule:
    """``A / m A`` for free fibers, with the same transports."""
    fibers = []
    for P in A.fibers:
        if P.relations:
            raise SimplicialError("reduction is defined here for free fibers")
        fibers.append(Presentation(P.ngens, [[m * int(i == j) for j in range(P.ngens)] for i in range(P.ngens)]))
    return GroupoidModule(A.groupoid, fibers, A.rho, f"{A.name}/{m}")


@dataclass
class IntegralRoundTrip:
    expected: tuple[int, ...]
    recovered: tuple[int, ...]
    group: str
    square: str
    square_detail: str
    reduction: RoundTrip
    reduction_injective: bool

    @property
    def ok(self) -> bool:
        return (self.expected == self.recovered and self.square == STRICT and self.reduction.ok
                and self.reduction_injective)


def round_trip_integral(A: GroupoidModule, beta, m: int = 4, window: int = 1, D: int = 4,
                        budget: int | None = None) -> IntegralRoundTrip:
    """Round trip for free coefficients.

    The class is read off intensionally (the obstruction of section spheres),
    the square is certified on the sub-object of bounded cochains, and the
    cover route is run on the reduction mod ``m``, where ``H^3`` must embed.
    """
    base, _ = nerve_base(A, D)
    R = reconstruct(base, A, 2, beta, 3, budget, window=window)
    T = R.total
    H = T.cohomology()
    want = H.class_of(T.beta_vector(H))
    got = twisted_product_k_invariant(T)
    Am = reduced_module(A, m)
    base_m, _ = nerve_base(Am, D)
    Hm = TwistedCohomology(base_m.Y, base_m.local_system(Am), 3)
    red = Hm.from_values([tuple(t % m for t in v) for v in T.beta])
    rt, _, _ = round_trip(Am, red, D, budget, base_m)
    images = {Hm.class_of(Hm.from_values([tuple(t % m for t in v) for v in c.values()])).coords
              for c in H.classes()} if not H.group.rank else set()
    injective = not H.group.rank and len(images) == len(H.classes())
    sq = R.square
    return IntegralRoundTrip(want.coords, got.coords, str(H.group), sq.level, sq.detail, rt, injective)


def twisted_product_k_invariant(T: TwistedProduct, carrier_spheres=None) -> object:
    """Formula route: the obstruction ``beta - delta c`` on section spheres of ``cosk_{a} E``.

    Works intensionally, so it applies to infinite coefficients; returns the
    class in ``H^{a+1}(B; A)``.
    """
    Y, a = T.base.Y, T.a
    H = T.cohomology()
    vals = []
    for sigma in Y.nondegenerate(a + 1):
        tops = [T.section_key(Y.face(sigma, i))[1] for i in range(a + 2)]
        tops = [t[0] if t else T.A.zero_vec(0) for t in tops]
        vals.append(T.obstruction(sigma, tops))
    return H.class_of(H.from_values(vals))


def sphere_obstruction_agrees(T: TwistedProduct, mat: Materialized, pi2: Pi2, limit: int | None = None) -> bool:
    """The formula value equals minus the cover class on hollow tetrahedra of ``E`` (a = 2)."""
    ident_ = fiber_identification(T, mat, pi2)
    X, Y = mat.sset, T.base.Y
    model = mat.model
    from itertools import islice
    count = 0
    for sigma in Y.full_level(3):
        faces_b = [Y.face(sigma, i) for i in range(4)]
        options = [list(model.solutions(f)) for f in faces_b]
        for combo in iproduct(*options):
            tops = [c[0] for c in combo]
            faces = [mat.normal_form((f, c)) for f, c in zip(faces_b, combo)]
            cover_cls = pi2.sphere_class(faces)
            x0 = Y.vertices(sigma)[0]
            val = T.obstruction(sigma, tops)
            neg = pi2.presentation.normal([-t for t in cover_cls])
            if ident_.backward[x0].get(neg) != T.A.normal(0, val):
                return False
            count += 1
            if limit is not None and count >= limit:
                return True
    return True


# -- towers ----------------------------------------------------------------------------------------


@dataclass
class TowerBundle:
    """Stages with structure maps, cone maps from the source, k-invariant data and a ledger."""

    source: object
    kind: str  # "space" or "chain"
    D: int
    stages: dict[int, object] = field(default_factory=dict)
    structure: dict[int, object] = field(default_factory=dict)  # a -> (P_a -> P_{a-1})
    cone: dict[int, object] = field(default_factory=dict)       # a -> (X -> P_a)
    spectra: dict[int, ParametrizedSpectrumData] = field(default_factory=dict)
    kinvariants: dict[int, KInvariant] = field(default_factory=dict)
    squares: dict[int, object] = field(default_factory=dict)
    ledger: list[LedgerEntry] = field(default_factory=list)
    extras: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.ledger)

    def record(self, stage: int, item: str, level: str, ok: bool, detail: str = "") -> None:
        self.ledger.append(LedgerEntry(stage, item, level, ok, detail))

    def report(self) -> str:
        return "\n".join(str(e) for e in self.ledger)


def coskeletal_map(domain: SimplicialSet, target: CoskeletonResult, low, upto: int, name: str = "") -> SimplicialMap:
    """Map into ``cosk_n`` determined by ``low`` on simplices of dimension ``<= n``."""
    n = target.model.n
    images: list[list[Simplex]] = []

    def img(s: Simplex) -> Simplex:
        eta, x = s
        e2, y = images[eta[-1]][x]
        return (compose_eta(e2, eta), y)

    for k in range(min(upto, domain.top_dim) + 1):
        row = []
        for s in domain.nondegenerate(k):
            if k <= n:
                row.append(low(s))
            else:
                row.append(target.from_faces(tuple(img(domain.face(s, i)) for i in range(k + 1))))
        images.append(row)
    return SimplicialMap(domain, target.sset, images, name)


def _cosk_structure_map(upper: CoskeletonResult, lower: CoskeletonResult, D: int) -> SimplicialMap:
    um = upper.model

    def low(s: Simplex) -> Simplex:
        k, y = upper.mat.key_of(s, um)
        return lower.simplex_of(um.simplices[k][y])

    return coskeletal_map(upper.sset, lower, low, D, "structure")


def build_space_tower(X: SimplicialSet, S: int, D: int, budget: int | None = None, extract: bool = True,
                      bound: int = 64, certify_squares: bool = True) -> TowerBundle:
    """Stages ``P_a = cosk_{a+1} X`` for ``1 <= a <= S`` materialized through ``D``."""
    if S < 1:
        raise ValueError("top stage must be at least 1")
    T = TowerBundle(X, "space", D)
    results: dict[int, CoskeletonResult] = {}
    for a in range(1, S + 1):
        res = coskeleton(X, a + 1, D, budget)
        results[a] = res
        T.stages[a] = res.sset
        T.cone[a] = res.unit
        if a >= 2:
            T.structure[a] = _cosk_structure_map(res, results[a - 1], D)
    T.extras["coskeleta"] = results
    _check_space_structure(T)
    if extract and S >= 2:
        try:
            kinv = extract_k_invariant(X, 2, min(D, 4) if D >= 4 else 4, bound=bound, budget=budget)
            T.kinvariants[2] = kinv
            T.spectra[2] = ParametrizedSpectrumData(kinv.module, shift=3, degrees=(0,))
            T.record(2, "k-invariant", kinv.certification, bool(kinv.vanishing is not False),
                     f"class {kinv.describe()}; vanishing clause {'holds' if kinv.vanishing else 'fails'}")
            if certify_squares:
                _certify_space_square(T, kinv, budget)
        except (NotCertified, HurewiczError, BudgetExceeded, SimplicialError) as exc:
            T.record(2, "k-invariant", FORMAL, True, f"not attached: {exc}")
    return T


def _check_space_structure(T: TowerBundle) -> None:
    X, D = T.source, T.D
    for a, P in T.stages.items():
        f = T.cone[a]
        lim = min(a + 1, D)
        T.record(a, "levelwise limit", STRICT, f.is_bijective(lim), f"cone map bijective through dim {lim}")
        if a in T.structure:
            g = T.structure[a]
            bad = g.validate()
            T.record(a, "structure map", STRICT, not bad, "simplicial" if not bad else str(bad[0]))
            comm = all(g(f(s)) == T.cone[a - 1](s) for k in range(min(D, X.top_dim) + 1)
                       for s in X.nondegenerate(k))
            T.record(a, "cone commutes", STRICT, comm)


def _certify_space_square(T: TowerBundle, kinv: KInvariant, budget) -> None:
    """Homology of ``P_2`` against the reconstruction from ``k_2`` over the carrier."""
    if 2 not in T.stages:
        return
    mod = kinv.module
    if not mod.is_finite():
        T.record(2, "square", FORMAL, True, "infinite pi_2: homology certificate skipped")
        return
    d = min(T.D, 4)
    try:
        R = reconstruct(kinv.base, mod, 2, kinv, d, budget)
    except BudgetExceeded as exc:
        T.record(2, "square", FORMAL, True, f"reconstruction over budget: {exc}")
        return
    h1 = [str(h) for h in chains_of(R.sset, d).homology_all(d - 1)]
    h2 = [str(h) for h in chains_of(T.stages[2], d).homology_all(d - 1)]
    T.squares[2] = R.square
    T.extras["reconstruction"] = R
    T.record(2, "square", HOMOLOGY, h1 == h2, f"H_*(reconstruction) {h1} vs H_*(P_2) {h2}")
    T.record(2, "pullback", R.square.level, R.square.level == STRICT, R.square.detail)


def validate_tower(T: TowerBundle, D: int | None = None, heart: bool = True) -> list[LedgerEntry]:
    """Re-run the checks behind the ledger; returns fresh entries."""
    D = T.D if D is None else D
    out: list[LedgerEntry] = []
    if T.kind == "space":
        X = T.source
        for a, f in T.cone.items():
            lim = min(a + 1, D)
            out.append(LedgerEntry(a, "levelwise limit", STRICT, f.is_bijective(lim)))
            if a in T.structure:
                g = T.structure[a]
                comm = all(g(f(s)) == T.cone[a - 1](s) for k in range(min(D, X.top_dim) + 1)
                           for s in X.nondegenerate(k))
                out.append(LedgerEntry(a, "cone commutes", STRICT, comm and not g.validate()))
        for a, sq in T.squares.items():
            if isinstance(sq, PullbackSquare):
                ok, detail = sq.check_pullback(min(D, sq.corner.max_dim))
                out.append(LedgerEntry(a, "pullback", STRICT, ok, detail))
    else:
        for a, sq in T.squares.items():
            out.extend(sq.recheck())
        for a, C in T.stages.items():
            out.append(LedgerEntry(a, "stage complex", STRICT, not C.check()))
    if heart:
        for a, spec in T.spectra.items():
            if spec.A.is_finite():
                cert = heart_membership(spec, min(D, 4) + 1 if D < 4 else D, degrees=spec.degrees)
                out.append(LedgerEntry(a, "heart", HOMOLOGY, cert.granted,
                                       "" if cert.granted else f"failures {cert.failures}"))
    return out


# -- multiplicativity -------------------------------------------------------------------------------


def product_twisted(T1: TwistedProduct, T2: TwistedProduct, D: int) -> tuple[TwistedProduct, dict]:
    """``E1 x E2`` as a twisted product over ``B1 x B2`` with ``p1^* A (+) p2^* B``."""
    if T1.a != T2.a:
        raise SimplicialError("product of twisted products needs equal fiber degrees")
    a = T1.a
    P1 = ParametrizedSpectrumData(T1.A, 0)
    P2 = ParametrizedSpectrumData(T2.A, 0)
    sz = square_zero_product(P1, P2)
    G = sz.data.A.groupoid
    Bp = sset_product(T1.base.Y, T2.base.Y, D)
    obj_index = {o: i for i, o in enumerate(sz.objects)}
    H2 = [T2.A.groupoid.groups[c].order for c in range(len(T2.A.groupoid.groups))]

    def chain(s: Simplex):
        x1, g1 = T1.base.chain(Bp.pr1(s))
        x2, g2 = T2.base.chain(Bp.pr2(s))
        c2 = T2.A.groupoid.component[x2[0]]
        xs = tuple(obj_index[(u, v)] for u, v in zip(x1, x2))
        gs = tuple(g * H2[c2] + h for g, h in zip(g1, g2))
        return xs, gs

    base = OverBase(Bp.sset, chain)
    A = sz.data.A
    n1 = T1.A.fiber(0).ngens
    vals = []
    for s in Bp.sset.nondegenerate(a + 1):
        s1, s2 = Bp.pr1(s), Bp.pr2(s)
        v1 = T1.A.zero_vec(T1.base.chain(s1)[0][0]) if T1.base.Y.is_degenerate(s1) else T1.beta[s1[1]]
        v2 = T2.A.zero_vec(T2.base.chain(s2)[0][0]) if T2.base.Y.is_degenerate(s2) else T2.beta[s2[1]]
        vals.append(tuple(v1) + tuple(v2))
    info = {"product": Bp, "square_zero": sz, "split": n1}
    return TwistedProduct(base, A, a, vals, f"{T1.name}x{T2.name}"), info


@dataclass
class MultiplicativityReport:
    stagewise: dict[int, bool]
    expected: tuple[int, ...]
    recovered: tuple[int, ...]
    components: dict[str, tuple[tuple[int, ...], tuple[int, ...]]]
    group: str
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (all(self.stagewise.values()) and self.expected == self.recovered
                and all(a == b for a, b in self.components.values()))


def check_multiplicativity(T1: TwistedProduct, T2: TwistedProduct, a: int = 2, D: int = 3,
                           budget: int | None = None, stages: tuple[int, ...] = (1, 2)) -> MultiplicativityReport:
    """(i) ``cosk_{s+1}(X x Y) = cosk_{s+1} X x cosk_{s+1} Y``; (ii) ``k(X x Y) = (p1^* k_X, p2^* k_Y)``."""
    if a != 2:
        raise SimplicialError("multiplicativity is checked at stage 2")
    M1, M2 = T1.materialize(3, budget), T2.materialize(3, budget)
    XY = sset_product(M1.sset, M2.sset, 3, budget)
    stagewise = {}
    for s in stages:
        stagewise[s] = _cosk_product_iso(M1.sset, M2.sset, XY, s + 1, D, budget)
    Tp, info = product_twisted(T1, T2, 4)
    Bp = info["product"]
    pi2 = extract_pi2(XY.sset)
    Y = Bp.sset
    images = []
    for k in range(3):
        row = []
        for s in Y.nondegenerate(k):
            e1 = M1.normal_form(T1.section_key(Bp.pr1(s)))
            e2 = M2.normal_form(T2.section_key(Bp.pr2(s)))
            row.append(XY.pair(e1, e2))
        images.append(row)
    car = Carrier(Y, SimplicialMap(Y, XY.sset, images, "section"))
    kinv = extract_k_invariant(XY.sset, 2, 4, carrier=car, pi2=pi2, budget=budget, realize=False,
                               check_vanishing=False)
    # fiber spheres of the product are pairs of fiber spheres
    A = Tp.A
    n1 = info["split"]
    back = {}
    for v in range(Y.count(0)):
        u1, u2 = Bp.pr1(Y.nd(0, v))[1], Bp.pr2(Y.nd(0, v))[1]
        m = {}
        for e in A.elements(Tp.base.chain(Y.nd(0, v))[0][0]):
            s1 = M1.normal_form(T1.fiber_key(u1, e[:n1]))
            s2 = M2.normal_form(T2.fiber_key(u2, e[n1:]))
            c = pi2.presentation.normal(list(pi2.simplex_class(XY.pair(s1, s2))))
            m[c] = tuple(e)
        back[v] = m
    notes = []
    if any(len(m) != _order(pi2.presentation) for m in back.values()):
        notes.append("fiber spheres do not identify pi_2 with the direct sum")
    vals = []
    for tau, v in zip(Y.nondegenerate(3), kinv.cls.values()):
        vals.append(back[Y.vertices(tau)[0]].get(pi2.presentation.normal(list(v)), tuple(v)))
    H = Tp.cohomology()
    got = H.class_of(H.from_values(vals))
    want = H.class_of(Tp.beta_vector(H))
    comps = {}
    for label, sl, mod in (("first", slice(0, n1), info["square_zero"].first),
                           ("second", slice(n1, None), info["square_zero"].second)):
        Hc = TwistedCohomology(Y, mod.local_system(Y, Tp.base.chain), 3)
        g = Hc.class_of(Hc.from_values([v[sl] for v in vals]))
        w = Hc.class_of(Hc.from_values([v[sl] for v in Tp.beta]))
        comps[label] = (w.coords, g.coords)
    return MultiplicativityReport(stagewise, want.coords, got.coords, comps, str(H.group), notes)


def _cosk_product_iso(X: SimplicialSet, Y: SimplicialSet, XY, n: int, D: int, budget) -> bool:
    """Canonical comparison ``cosk_n(X x Y) -> cosk_n X x cosk_n Y`` is bijective through ``D``."""
    C = coskeleton(XY.sset, n, D, budget, with_unit=False)
    CX = coskeleton(X, n, D, budget, with_unit=False)
    CY = coskeleton(Y, n, D, budget, with_unit=False)
    PC = sset_product(CX.sset, CY.sset, D, budget)
    cm = C.model

    def proj(which, target):
        def low(s):
            k, y = C.mat.key_of(s, cm)
            p = cm.simplices[k][y]
            comp = XY.pr1(p) if which == 1 else XY.pr2(p)
            return target.simplex_of(comp)
        return coskeletal_map(C.sset, target, low, D)

    f1, f2 = proj(1, CX), proj(2, CY)
    cmp_ = SimplicialMap.from_function(C.sset, PC.sset, lambda s: PC.pair(f1(s), f2(s)), upto=D)
    return cmp_.is_bijective(D)


# -- algebraic model of a twisted product in low degrees ---------------------------------------------------


def serre_model(T: TwistedProduct, top: int = 4, cap: str = "front", sign: int = 1) -> PresentedComplex:
    """``C_*(B) (+) C_{*-a}(B; A)`` with ``d(x, y) = (dx, dy + x cap beta)``.

    For the fiber ``K(A, 2)`` (``H_3 = 0``) its homology agrees with
    ``H_*(E_beta)`` through degree 3.  The default cap evaluates ``beta`` on the
    front face and transports the value forward to the back face's first
    vertex; the other variant (``cap="back"``) only squares to zero for
    trivial actions.
    """
    Y, A, a = T.base.Y, T.A, T.a
    LS = T.local_system()
    n = a + 1
    tw = twisted_chain_complex(Y, LS, top)
    Z = Presentation.free(1)
    blocks = []
    for k in range(top + 1):
        lvl = [Z] * Y.count(k)
        if k - a >= 0:
            lvl = lvl + list(tw.blocks[k - a])
        blocks.append(lvl)
    maps: dict[int, list[list[tuple[int, list[list[int]]]]]] = {}
    for k in range(top + 1):
        rows = []
        nb = Y.count(k - 1) if k >= 1 else 0
        for x in range(Y.count(k)):
            entries = []
            if k >= 1:
                for i, (eta, y) in enumerate(Y.faces[k][x]):
                    if eta[-1] == k - 1:
                        entries.append((y, [[(-1) ** i]]))
            if k - 1 - a >= 0:
                s = Y.nd(k, x)
                if cap == "back":
                    cochain_face = Y.act(s, tuple(range(k - n, k + 1)))
                    chain_face = Y.act(s, tuple(range(0, k - n + 1)))
                    edge = Y.edge(s, 0, k - n)
                else:
                    cochain_face = Y.act(s, tuple(range(0, n + 1)))
                    chain_face = Y.act(s, tuple(range(n, k + 1)))
                    edge = Y.edge(s, 0, n)
                if not Y.is_degenerate(cochain_face) and not Y.is_degenerate(chain_face):
                    b = list(T.beta[cochain_face[1]])
                    M = LS.transport_inv(edge) if cap == "back" else LS.transport(edge)
                    v = [sign * t for t in matvec(M, b)]
                    entries.append((nb + chain_face[1], [[t] for t in v]))
            rows.append(_merge(entries))
        if k - a >= 0:
            for y, ent in enumerate(tw.block_maps.get(k - a, [])):
                rows.append(_merge([(nb + tb, M) for tb, M in ent]))
        maps[k] = rows
    return PresentedComplex(blocks, maps, -1)


def _merge(entries):
    acc: dict = {}
    for tb, M in entries:
        if tb in acc:
            acc[tb] = [[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(acc[tb], M)]
        else:
            acc[tb] = [list(r) for r in M]
    return [(tb, M) for tb, M in sorted(acc.items()) if any(any(r) for r in M)]


def serre_homology(T: TwistedProduct, upto: int = 3, cap: str = "front", sign: int = 1):
    P = serre_model(T, upto + 1, cap, sign)
    bad = P.check()
    if bad:
        raise SimplicialError(f"algebraic model is not a complex: {bad[0]}")
    C, order = P.total()
    return [C.homology(order.index(k)) for k in range(upto + 1)]
