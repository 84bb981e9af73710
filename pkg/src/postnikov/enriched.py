"""Strict simplicially enriched categories, hom-wise Postnikov towers and Dwyer-Kan certificates.

Composition is a levelwise map ``Map(y, z)_k x Map(x, y)_k -> Map(x, z)_k`` on
normal-form simplices.  Weak equivalences of hom spaces are certificates at a
level ``L``: a bijection on components, an isomorphism of finite fundamental
groups and a mapping cone of universal-cover chains acyclic through degree
``L``.  Isofibrations are tested in the homotopy category; the hom-wise Kan
fibration condition is checked separately by horn filling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable

from .chain_tower import ChainMap, mapping_cone
from .chains import Presentation, chains_of
from .constructions import CoskeletonResult, ProductResult, coskeleton, pullback
from .em import GroupoidModule
from .groupoid import FiniteGroup, FiniteGroupoid, nerve
from .linalg import identity, matmul
from .pi1 import CoverData, NotCertified, certify_finite, components, fundamental_groupoid, universal_cover
from .sset import (BudgetExceeded, Materialized, Simplex, SimplicialError, SimplicialMap, SimplicialSet,
                   compose_eta, ident)
from .tower import (FORMAL, HOMOLOGY, STRICT, KInvariant, LedgerEntry, Pi2, TwistedProduct, _cosk_structure_map,
                    extract_k_invariant, extract_pi2, k_invariant_in_coefficients)

Compose = Callable[[int, int, int, Simplex, Simplex], Simplex]
INF = 1 << 30


class PreconditionNotCertified(SimplicialError):
    pass


def point_vertex(v: int, k: int) -> Simplex:
    """The totally degenerate ``k``-simplex on vertex ``v``."""
    return ((0,) * (k + 1), v)


def degenerate(s: Simplex, eta: tuple[int, ...]) -> Simplex:
    return (compose_eta(s[0], eta), s[1])


def empty_sset(D: int) -> SimplicialSet:
    return SimplicialSet([[]], max_dim=D, truncated=False, name="empty")


def point_sset(D: int) -> SimplicialSet:
    return SimplicialSet([[()]], max_dim=D, kan=True, truncated=False, name="pt")


def known_top(X: SimplicialSet) -> int:
    return X.max_dim if X.truncated else INF


def dim(s: Simplex) -> int:
    return len(s[0]) - 1


# -- categories and functors ---------------------------------------------------------------------


class SimplicialCategory:
    """Finite object set, a hom simplicial set per ordered pair and strict composition."""

    def __init__(self, objects: list[str], homs: dict[tuple[int, int], SimplicialSet], compose: Compose,
                 ids: list[int], D: int, name: str = ""):
        self.objects = list(objects)
        self.homs = homs
        self._compose = compose
        self.ids = ids
        self.D = D
        self.name = name
        self._cache: dict = {}

    @property
    def n(self) -> int:
        return len(self.objects)

    def hom(self, x: int, y: int) -> SimplicialSet:
        return self.homs[(x, y)]

    def compose(self, x: int, y: int, z: int, g: Simplex, f: Simplex) -> Simplex:
        """``g . f`` for ``f`` in ``Map(x, y)`` and ``g`` in ``Map(y, z)``."""
        key = (x, y, z, g, f)
        hit = self._cache.get(key)
        if hit is None:
            if dim(g) != dim(f):
                raise SimplicialError("composition needs simplices of equal dimension")
            hit = self._compose(x, y, z, g, f)
            self._cache[key] = hit
        return hit

    def identity(self, x: int, k: int = 0) -> Simplex:
        return point_vertex(self.ids[x], k)

    def pairs(self):
        return [(x, y) for x in range(self.n) for y in range(self.n)]

    def check(self, upto: int | None = None, limit: int = 400000) -> list[str]:
        """Simpliciality, associativity and unit laws on every tuple of simplices through ``upto``."""
        d = min(self.D, upto if upto is not None else self.D)
        bad: list[str] = []
        levels = {p: [X.full_level(k) for k in range(d + 1)] for p, X in self.homs.items()}
        n = self.n
        for x, y, z in iproduct(range(n), repeat=3):
            for k in range(d + 1):
                G, F = levels[(y, z)][k], levels[(x, y)][k]
                if len(G) * len(F) > limit:
                    raise BudgetExceeded(f"composition check: {len(G) * len(F)} pairs at dim {k}")
                for g, f in iproduct(G, F):
                    c = self.compose(x, y, z, g, f)
                    if dim(c) != k:
                        bad.append(f"({x},{y},{z}) dim {k}: composite has dimension {dim(c)}")
                        continue
                    for i in range(k + 1 if k else 0):
                        if self.hom(x, z).face(c, i) != self.compose(x, y, z, self.hom(y, z).face(g, i),
                                                                     self.hom(x, y).face(f, i)):
                            bad.append(f"({x},{y},{z}) dim {k}: composition does not commute with d{i}")
                    if k < d:
                        for j in range(k + 1):
                            lhs = self.compose(x, y, z, self.hom(y, z).degeneracy(g, j),
                                               self.hom(x, y).degeneracy(f, j))
                            if lhs != self.hom(x, z).degeneracy(c, j):
                                bad.append(f"({x},{y},{z}) dim {k}: composition does not commute with s{j}")
            if bad:
                return bad
        for x, y in self.pairs():
            for k in range(d + 1):
                for f in levels[(x, y)][k]:
                    if self.compose(x, y, y, self.identity(y, k), f) != f:
                        bad.append(f"left unit fails on Map({x},{y}) dim {k}")
                    if self.compose(x, x, y, f, self.identity(x, k)) != f:
                        bad.append(f"right unit fails on Map({x},{y}) dim {k}")
        for w, x, y, z in iproduct(range(n), repeat=4):
            for k in range(d + 1):
                H, G, F = levels[(y, z)][k], levels[(x, y)][k], levels[(w, x)][k]
                if len(H) * len(G) * len(F) > limit:
                    raise BudgetExceeded(f"associativity check: {len(H) * len(G) * len(F)} triples at dim {k}")
                for h, g, f in iproduct(H, G, F):
                    if self.compose(w, y, z, h, self.compose(w, x, y, g, f)) != \
                            self.compose(w, x, z, self.compose(x, y, z, h, g), f):
                        bad.append(f"associativity fails at ({w},{x},{y},{z}) dim {k}")
                        break
        return bad


@dataclass
class SimplicialFunctor:
    source: SimplicialCategory
    target: SimplicialCategory
    on_objects: list[int]
    on_homs: dict[tuple[int, int], SimplicialMap]
    name: str = ""

    def __call__(self, x: int, y: int, s: Simplex) -> Simplex:
        return self.on_homs[(x, y)](s)

    def hom_map(self, x: int, y: int) -> SimplicialMap:
        return self.on_homs[(x, y)]

    def is_identity_on_objects(self) -> bool:
        return self.source.n == self.target.n and self.on_objects == list(range(self.source.n))

    def check(self, upto: int | None = None) -> list[str]:
        C, E, F = self.source, self.target, self.on_objects
        d = min(C.D, E.D, upto if upto is not None else C.D)
        bad = []
        for (x, y), phi in self.on_homs.items():
            bad += [f"Map({x},{y}): {v}" for v in phi.validate(d)]
        for x in range(C.n):
            if self(x, x, C.identity(x)) != E.identity(F[x]):
                bad.append(f"identity of {x} not preserved")
        for x, y, z in iproduct(range(C.n), repeat=3):
            for k in range(d + 1):
                for g, f in iproduct(C.hom(y, z).full_level(k), C.hom(x, y).full_level(k)):
                    lhs = self(x, z, C.compose(x, y, z, g, f))
                    rhs = E.compose(F[x], F[y], F[z], self(y, z, g), self(x, y, f))
                    if lhs != rhs:
                        bad.append(f"composition not preserved at ({x},{y},{z}) dim {k}")
                        break
        return bad

    def then(self, other: "SimplicialFunctor") -> "SimplicialFunctor":
        """``other . self``."""
        F, G = self.on_objects, other.on_objects
        homs = {(x, y): other.on_homs[(F[x], F[y])].compose(phi) for (x, y), phi in self.on_homs.items()}
        return SimplicialFunctor(self.source, other.target, [G[F[x]] for x in range(self.source.n)], homs,
                                 f"{other.name}.{self.name}")


def identity_functor(C: SimplicialCategory) -> SimplicialFunctor:
    homs = {p: SimplicialMap.from_function(X, X, lambda s: s, name="id") for p, X in C.homs.items()}
    return SimplicialFunctor(C, C, list(range(C.n)), homs, "id")


def functor_from_keys(C: SimplicialCategory, E: SimplicialCategory, on_objects: list[int],
                      fn: Callable[[int, int, Simplex], Simplex], name: str = "") -> SimplicialFunctor:
    homs = {}
    for (x, y), X in C.homs.items():
        homs[(x, y)] = SimplicialMap.from_function(X, E.hom(on_objects[x], on_objects[y]),
                                                   lambda s, x=x, y=y: fn(x, y, s), upto=min(C.D, E.D))
    return SimplicialFunctor(C, E, on_objects, homs, name)


# -- library categories ------------------------------------------------------------------------------


def _model_op(mat: Materialized, model, fn):
    """Lift a key-level operation to normal-form simplices of ``mat``."""

    def op(*simplices):
        return mat.normal_form(fn(*[mat.key_of(s, model) for s in simplices]))

    return op


def group_category(G: FiniteGroup, n_objects: int = 1, D: int = 4, name: str = "") -> SimplicialCategory:
    """Every hom is ``N(G)`` and composition is the levelwise product (``G`` abelian)."""
    if not G.is_abelian():
        raise SimplicialError("the levelwise product on N(G) is simplicial only for abelian G")
    mat = nerve(FiniteGroupoid.from_group(G), D)
    from .groupoid import NerveModel
    model = NerveModel(mat.groupoid)
    mul = _model_op(mat, model, lambda a, b: (a[0], tuple(G.mul(p, q) for p, q in zip(a[1], b[1]))))
    N = mat.sset
    N.name = f"N(Z/{G.order})" if not G.name else f"N({G.name})"
    homs = {(x, y): N for x in range(n_objects) for y in range(n_objects)}
    C = SimplicialCategory([f"o{i}" for i in range(n_objects)], homs, lambda x, y, z, g, f: mul(g, f),
                           [mat.nf[((0,), ())][1]] * n_objects, D, name or f"B{N.name}")
    C.nerve = mat
    return C


def total_group_category(G: FiniteGroup, D: int = 4, n_objects: int = 1) -> tuple[SimplicialCategory, Materialized]:
    """Every hom is ``EG`` (``k``-simplices ``G^(k+1)``) under the levelwise product."""
    codisc = FiniteGroupoid.codiscrete(G.order)
    mat = nerve(codisc, D)
    from .groupoid import NerveModel
    model = NerveModel(codisc)
    mul = _model_op(mat, model, lambda a, b: (tuple(G.mul(p, q) for p, q in zip(a[0], b[0])), a[1]))
    mat.sset.name = f"E(Z/{G.order})"
    homs = {(x, y): mat.sset for x in range(n_objects) for y in range(n_objects)}
    C = SimplicialCategory([f"o{i}" for i in range(n_objects)], homs, lambda x, y, z, g, f: mul(g, f),
                           [mat.nf[((0,), ())][1]] * n_objects, D, f"E(Z/{G.order})")
    C.nerve = mat
    return C, mat


def quotient_functor(E: SimplicialCategory, B: SimplicialCategory, G: FiniteGroup) -> SimplicialFunctor:
    """``EG -> BG``, ``(x_0..x_k) -> (x_0^-1 x_1, ..., x_{k-1}^-1 x_k)``: a Kan fibration of homs."""
    from .groupoid import NerveModel
    em, bm = E.nerve, B.nerve
    emod = NerveModel(em.groupoid)

    def fn(x, y, s):
        xs, _ = em.key_of(s, emod)
        k = len(xs) - 1
        gs = tuple(G.mul(G.inverse(xs[i]), xs[i + 1]) for i in range(k))
        return bm.normal_form(((0,) * (k + 1), gs))

    return functor_from_keys(E, B, list(range(E.n)), fn, "quotient")


def point_category(D: int = 4, n_objects: int = 1, codiscrete: bool = True) -> SimplicialCategory:
    """Homs are points (codiscrete) or points on the diagonal and empty elsewhere (discrete)."""
    pt = point_sset(D)
    empty = empty_sset(D)
    homs = {(x, y): pt if (codiscrete or x == y) else empty for x in range(n_objects) for y in range(n_objects)}
    return SimplicialCategory([f"o{i}" for i in range(n_objects)], homs, lambda x, y, z, g, f: g, [0] * n_objects,
                              D, "codisc" if codiscrete else "disc")


def unit_functor(C: SimplicialCategory, x: int = 0) -> SimplicialFunctor:
    """The one-object point category picking the identity of ``x``."""
    P = point_category(C.D)
    return functor_from_keys(P, C, [x], lambda a, b, s: C.identity(x, dim(s)), f"unit{x}")


def disjoint_union(X: SimplicialSet, Y: SimplicialSet, name: str = "") -> SimplicialSet:
    """``X`` followed by ``Y``; ids of ``Y`` are shifted by the counts of ``X``."""
    top = max(X.top_dim, Y.top_dim)
    faces = []
    for k in range(top + 1):
        level = list(X.faces[k]) if k <= X.top_dim else []
        if k <= Y.top_dim:
            for fs in Y.faces[k]:
                level.append(tuple((eta, y + X.count(eta[-1])) for eta, y in fs))
        faces.append(level)
    return SimplicialSet(faces, max_dim=min(X.max_dim, Y.max_dim), kan=X.kan and Y.kan,
                         truncated=X.truncated or Y.truncated, name=name or f"{X.name}+{Y.name}")


def augmented_monoid_category(X: SimplicialSet, name: str = "") -> SimplicialCategory:
    """One object with hom ``X`` plus a disjoint unit vertex; ``g . f = g`` on ``X`` (left-zero product)."""
    M = disjoint_union(X, point_sset(X.max_dim), f"{X.name}+1")
    unit = X.count(0)

    def is_unit(s):
        return s[0][-1] == 0 and s[1] == unit

    def comp(x, y, z, g, f):
        if is_unit(f):
            return g
        if is_unit(g):
            return f
        return g

    return SimplicialCategory(["o"], {(0, 0): M}, comp, [unit], X.max_dim, name or f"{X.name}+")


def bimodule_category(X: SimplicialSet, G: FiniteGroup, D: int | None = None, name: str = "") -> SimplicialCategory:
    """Objects 0, 1 with ``Map(i, i) = N(G)``, ``Map(0, 1) = X``, ``Map(1, 0)`` empty; ``N(G)`` acts trivially."""
    D = X.max_dim if D is None else D
    B = group_category(G, 1, D)
    N = B.hom(0, 0)
    e = B.ids[0]
    homs = {(0, 0): N, (1, 1): N, (0, 1): X, (1, 0): empty_sset(D)}

    def comp(x, y, z, g, f):
        if x == y == z:
            return B.compose(0, 0, 0, g, f)
        return g if (y, z) == (0, 1) else f

    C = SimplicialCategory(["0", "1"], homs, comp, [e, e], D, name or f"bimod({X.name})")
    C.nerve = B.nerve
    return C


def full_subcategory(C: SimplicialCategory, objs: list[int]) -> tuple[SimplicialCategory, SimplicialFunctor]:
    homs = {(i, j): C.hom(x, y) for i, x in enumerate(objs) for j, y in enumerate(objs)}
    S = SimplicialCategory([C.objects[x] for x in objs], homs,
                           lambda a, b, c, g, f: C.compose(objs[a], objs[b], objs[c], g, f),
                           [C.ids[x] for x in objs], C.D, f"{C.name}|{objs}")
    inc = {p: SimplicialMap.from_function(X, X, lambda s: s, name="incl") for p, X in homs.items()}
    return S, SimplicialFunctor(S, C, list(objs), inc, "inclusion")


# -- hom-wise coskeleta --------------------------------------------------------------------------------


def _cosk_compose(C: SimplicialCategory, cosks: dict, m: int) -> Compose:
    def comp(x, y, z, g, f):
        R, Rg, Rf = cosks[(x, z)], cosks[(y, z)], cosks[(x, y)]
        k = dim(g)
        if k <= m:
            gx = Rg.model.simplices[k][Rg.mat.key_of(g, Rg.model)[1]]
            fx = Rf.model.simplices[k][Rf.mat.key_of(f, Rf.model)[1]]
            return R.simplex_of(C.compose(x, y, z, gx, fx))
        faces = tuple(comp(x, y, z, Rg.sset.face(g, i), Rf.sset.face(f, i)) for i in range(k + 1))
        return R.from_faces(faces)

    return comp


def homotopy_mn(C: SimplicialCategory, m: int, budget: int | None = None) -> SimplicialCategory:
    """``cosk_m`` applied hom-wise; coskeleta preserve products so composition is induced."""
    if m < 1:
        raise SimplicialError("homotopy_mn needs m >= 1")
    cosks = {p: coskeleton(X, min(m, C.D), C.D, budget) for p, X in C.homs.items()}
    homs = {p: R.sset for p, R in cosks.items()}
    for p, R in cosks.items():
        R.sset.name = f"cosk{m}({C.hom(*p).name})"
    ids = [cosks[(x, x)].simplex_of(C.identity(x))[1] for x in range(C.n)]
    H = SimplicialCategory(C.objects, homs, _cosk_compose(C, cosks, min(m, C.D)), ids, C.D, f"h{m}({C.name})")
    H.cosks = cosks
    H.level = m
    H.parent = C
    return H


def coskeleton_unit(C: SimplicialCategory, H: SimplicialCategory) -> SimplicialFunctor:
    homs = {p: R.unit for p, R in H.cosks.items()}
    return SimplicialFunctor(C, H, list(range(C.n)), homs, f"unit{H.level}")


def coskeleton_structure(upper: SimplicialCategory, lower: SimplicialCategory) -> SimplicialFunctor:
    """``homotopy_mn(C, m + 1) -> homotopy_mn(C, m)``, identity on objects."""
    homs = {p: _cosk_structure_map(upper.cosks[p], lower.cosks[p], min(upper.D, lower.D)) for p in upper.homs}
    return SimplicialFunctor(upper, lower, list(range(upper.n)), homs, f"p{lower.level}")


# -- homotopy category ---------------------------------------------------------------------------


@dataclass
class HomotopyCategory:
    """Hom-sets are component labels (smallest vertex) of ``Map(x, y)``."""

    n: int
    homs: dict[tuple[int, int], list[int]]
    label: dict[tuple[int, int], list[int]]
    table: dict[tuple[int, int, int, int, int], int]
    ids: list[int]

    def compose(self, x: int, y: int, z: int, g: int, f: int) -> int:
        return self.table[(x, y, z, g, f)]

    def inverses(self, x: int, y: int, u: int) -> list[int]:
        return [v for v in self.homs[(y, x)]
                if self.compose(x, y, x, v, u) == self.ids[x] and self.compose(y, x, y, u, v) == self.ids[y]]

    def isomorphisms(self, x: int, y: int) -> list[int]:
        return [u for u in self.homs[(x, y)] if self.inverses(x, y, u)]

    def is_monoid_trivial(self) -> bool:
        return self.n == 1 and len(self.homs[(0, 0)]) == 1


def homotopy_category(C: SimplicialCategory) -> HomotopyCategory:
    label = {p: components(X) if X.count(0) else [] for p, X in C.homs.items()}
    homs = {p: sorted(set(lab)) for p, lab in label.items()}
    table = {}
    for x, y, z in iproduct(range(C.n), repeat=3):
        for g in homs[(y, z)]:
            for f in homs[(x, y)]:
                c = C.compose(x, y, z, (ident(0), g), (ident(0), f))
                table[(x, y, z, g, f)] = label[(x, z)][c[1]]
    ids = [label[(x, x)][C.ids[x]] for x in range(C.n)]
    return HomotopyCategory(C.n, homs, label, table, ids)


def _on_classes(F: SimplicialFunctor, hc_t: HomotopyCategory, x: int, y: int, u: int) -> int:
    v = F.on_homs[(x, y)].on_vertex(u)
    return hc_t.label[(F.on_objects[x], F.on_objects[y])][v]


# -- components, covers and hom-wise certificates ---------------------------------------------------------


@dataclass
class HomComponent:
    """The component of ``root`` in ``X`` as its own simplicial set."""

    X: SimplicialSet
    root: int
    sset: SimplicialSet
    ids: list[list[int]]
    index: list[dict[int, int]]

    def to_sub(self, s: Simplex) -> Simplex:
        return (s[0], self.index[s[0][-1]][s[1]])

    def from_sub(self, s: Simplex) -> Simplex:
        return (s[0], self.ids[s[0][-1]][s[1]])

    def contains(self, s: Simplex) -> bool:
        return s[1] in self.index[s[0][-1]] if s[0][-1] < len(self.index) else False


def hom_components(X: SimplicialSet) -> list[HomComponent]:
    if not X.count(0):
        return []
    lab = components(X)
    out = []
    for r in sorted(set(lab)):
        ids, index = [], []
        for k in range(X.top_dim + 1):
            keep = [x for x in range(X.count(k)) if lab[X.base_vertex(X.nd(k, x))] == r]
            ids.append(keep)
            index.append({x: i for i, x in enumerate(keep)})
        while len(ids) > 1 and not ids[-1]:
            ids.pop()
            index.pop()
        faces = [[tuple((eta, index[eta[-1]][y]) for eta, y in X.faces[k][x]) for x in ids[k]]
                 for k in range(len(ids))]
        sub = SimplicialSet(faces, max_dim=X.max_dim, kan=X.kan, truncated=X.truncated, name=f"{X.name}[{r}]")
        out.append(HomComponent(X, r, sub, ids, index))
    return out


def component_of(comps: list[HomComponent], v: int) -> HomComponent:
    for c in comps:
        if v in c.index[0]:
            return c
    raise SimplicialError(f"vertex {v} lies in no component")


def restrict_map(phi: SimplicialMap, src: HomComponent, dst: HomComponent, upto: int) -> SimplicialMap:
    return SimplicialMap.from_function(src.sset, dst.sset, lambda s: dst.to_sub(phi(src.from_sub(s))),
                                       upto=min(upto, src.sset.max_dim))


@dataclass
class CoverLift:
    """The lift ``~Y -> ~Z`` of ``phi`` sending the point over ``base`` labelled 0 to label 0."""

    phi: SimplicialMap
    src: CoverData
    dst: CoverData
    vertex: dict[int, int]

    def label(self, p: int) -> int:
        return self.vertex[p] % self.dst.group.order

    def simplex(self, t: Simplex) -> Simplex:
        s, _ = self.src.unlift(t)
        p = self.src.sset.vertices(t)[0]
        return self.dst.lift(self.phi(s), self.label(p))

    def theta(self, base: int, g: int) -> int:
        return self.label(self.src.point(base, g))


def lift_to_covers(phi: SimplicialMap, cy: CoverData, cz: CoverData, base: int) -> CoverLift:
    Yt, Z = cy.sset, phi.codomain
    Gz, Pz = cz.group, cz.groupoid
    n = Gz.order
    start = cy.point(base, 0)
    vertex = {start: cz.point(phi.on_vertex(base), 0)}
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for z in range(Yt.count(1)):
        (_, v_end), (_, v_start) = Yt.faces[1][z]
        s, _ = cy.unlift((ident(1), z))
        e = phi(s)
        m = 0 if Z.is_degenerate(e) else Pz.edge_class(e)
        adj.setdefault(v_start, []).append((v_end, m, 1))
        adj.setdefault(v_end, []).append((v_start, m, -1))
    stack = [start]
    while stack:
        p = stack.pop()
        w, h = divmod(vertex[p], n)
        for q, m, sgn in adj.get(p, ()):
            if q in vertex:
                continue
            qv = cy.unlift((ident(0), q))[0][1]
            h2 = Gz.mul(h, m) if sgn > 0 else Gz.mul(h, Gz.inverse(m))
            vertex[q] = cz.point(phi.on_vertex(qv), h2)
            stack.append(q)
    if len(vertex) != Yt.count(0):
        raise SimplicialError("cover of the source is not connected")
    return CoverLift(phi, cy, cz, vertex)


def pi2_matrix(lift: CoverLift, pY: Pi2, pZ: Pi2) -> list[list[int]]:
    """``phi_*: pi_2(Y) -> pi_2(Z)`` in presentation coordinates (columns are generator images)."""
    ny, nz = pY.presentation.ngens, pZ.presentation.ngens
    cols = []
    for j in range(ny):
        vec = pY.sq.lift(tuple(int(i == j) for i in range(ny)))
        terms = []
        for z, c in enumerate(vec):
            if c:
                t = (ident(2), z)
                s, _ = lift.src.unlift(t)
                p = lift.src.sset.vertices(t)[0]
                terms.append((lift.phi(s), lift.label(p), c))
        cols.append(list(pZ.coords(pZ.lift_vector(terms))))
    return [[cols[j][i] for j in range(ny)] for i in range(nz)]


@dataclass
class Certificate:
    """``ok`` is ``None`` when the data does not reach the requested level."""

    name: str
    ok: bool | None
    level: int
    details: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok is True

    def describe(self) -> str:
        state = {True: "certified", False: "refuted", None: "inconclusive"}[self.ok]
        extra = f": {'; '.join(self.details)}" if self.details else ""
        return f"{self.name} {state} at level {self.level}{extra}"


def _groupoid(X: SimplicialSet, bound: int):
    P = fundamental_groupoid(X)
    certify_finite(P, bound)
    return P


def weak_equivalence(phi: SimplicialMap, D: int, bound: int = 64) -> Certificate:
    """Level-``D`` certificate for a map of hom spaces (components, pi_1, cover homology)."""
    Y, Z = phi.domain, phi.codomain
    cy_all, cz_all = hom_components(Y), hom_components(Z)
    det = []
    level = min(D, known_top(Y), known_top(Z) - 1)
    img = [component_of(cz_all, phi.on_vertex(c.root)).root for c in cy_all]
    if len(set(img)) != len(img) or len(img) != len(cz_all):
        return Certificate("weak equivalence", False, level,
                           [f"pi_0: {len(cy_all)} -> {len(cz_all)} components, image {sorted(set(img))}"])
    for c in cy_all:
        d = component_of(cz_all, phi.on_vertex(c.root))
        sub = restrict_map(phi, c, d, level + 1)
        try:
            PY, PZ = _groupoid(c.sset, bound), _groupoid(d.sset, bound)
        except (NotCertified, SimplicialError) as exc:
            return Certificate("weak equivalence", None, level, [f"component {c.root}: {exc}"])
        cov_y = universal_cover(c.sset, PY, 0)
        cov_z = universal_cover(d.sset, PZ, 0)
        lift = lift_to_covers(sub, cov_y, cov_z, 0)
        Gy, Gz = cov_y.group, cov_z.group
        th = [lift.theta(0, g) for g in Gy.elements()]
        if Gy.order != Gz.order or len(set(th)) != Gy.order:
            return Certificate("weak equivalence", False, level,
                               [f"component {c.root}: pi_1 orders {Gy.order} -> {Gz.order}, not an iso"])
        CY = chains_of(cov_y.sset, min(level, cov_y.sset.top_dim) if level < INF else None)
        top_z = level + 1 if level < INF else None
        CZ = chains_of(cov_z.sset, top_z)
        hi = max(CY.top, CZ.top) if level >= INF else level
        maps = {}
        for k in range(CY.top + 1):
            M = [[0] * CY.rank(k) for _ in range(CZ.rank(k))]
            for z in range(CY.rank(k)):
                eta, w = lift.simplex((ident(k), z))
                if eta == ident(k):
                    M[w][z] += 1
            maps[k] = M
        cone = mapping_cone(ChainMap(CY, CZ, maps, name="cover"))
        for k in range(min(hi, cone.top) + 1):
            if not cone.homology(k).is_zero():
                return Certificate("weak equivalence", False, level,
                                   [f"component {c.root}: cover homology differs, cone H_{k} = {cone.homology(k)}"])
        det.append(f"component {c.root}: pi_1 order {Gy.order}")
    ok = True if level >= D else None
    if ok is None:
        det.append(f"hom data reaches level {level} < {D}")
    return Certificate("weak equivalence", ok, min(level, D), det)


# -- Dwyer-Kan predicates -----------------------------------------------------------------------------


def is_fully_faithful(F: SimplicialFunctor, D: int, bound: int = 64) -> Certificate:
    det, state, lvl = [], True, D
    for (x, y), phi in sorted(F.on_homs.items()):
        c = weak_equivalence(phi, D, bound)
        lvl = min(lvl, c.level)
        if c.ok is False:
            return Certificate("fully faithful", False, lvl, [f"Map({x},{y}): {d}" for d in c.details])
        if c.ok is None:
            state = None
            det += [f"Map({x},{y}): {d}" for d in c.details]
    return Certificate("fully faithful", state, lvl, det)


def is_essentially_surjective(F: SimplicialFunctor) -> Certificate:
    hc = homotopy_category(F.target)
    missing = []
    for c in range(F.target.n):
        if not any(hc.isomorphisms(F.on_objects[a], c) for a in range(F.source.n)):
            missing.append(F.target.objects[c])
    return Certificate("essentially surjective", not missing, 0,
                       [f"no object equivalent to {m}" for m in missing])


def is_isofibration(F: SimplicialFunctor) -> Certificate:
    """Every equivalence ``F(a) -> c`` of the homotopy category lifts to one out of ``a``."""
    hs, ht = homotopy_category(F.source), homotopy_category(F.target)
    bad = []
    for a in range(F.source.n):
        for c in range(F.target.n):
            for u in ht.isomorphisms(F.on_objects[a], c):
                lifted = any(F.on_objects[b] == c and _on_classes(F, ht, a, b, v) == u
                             for b in range(F.source.n) for v in hs.isomorphisms(a, b))
                if not lifted:
                    bad.append(f"equivalence {u}: {F.target.objects[F.on_objects[a]]} -> "
                               f"{F.target.objects[c]} has no lift from {F.source.objects[a]}")
    return Certificate("isofibration", not bad, 0, bad)


def _horns(Y: SimplicialSet, k: int, j: int, level: list[Simplex]):
    """Compatible families ``(y_i)_{i != j}`` of ``(k-1)``-simplices."""
    slots = [i for i in range(k + 1) if i != j]
    chosen: dict[int, Simplex] = {}

    def rec(p):
        if p == len(slots):
            yield dict(chosen)
            return
        i2 = slots[p]
        for y in level:
            if all(Y.face(chosen[i], i2 - 1) == Y.face(y, i) for i in slots[:p]):
                chosen[i2] = y
                yield from rec(p + 1)
                del chosen[i2]

    if k == 1:
        for y in level:
            yield {1 - j: y}
        return
    yield from rec(0)


def is_local_fibration(F: SimplicialFunctor, D: int) -> Certificate:
    """Hom-wise Kan fibration: every horn over a simplex of the target fills, through dimension ``D``."""
    bad = []
    for (x, y), phi in sorted(F.on_homs.items()):
        Y, Z = phi.domain, phi.codomain
        top = min(D, Y.max_dim, Z.max_dim)
        for k in range(1, top + 1):
            low = Y.full_level(k - 1)
            Zk = Z.full_level(k)
            Yk = Y.full_level(k)
            for j in range(k + 1):
                idx_y = {(tuple(Y.face(s, i) for i in range(k + 1) if i != j), phi(s)) for s in Yk}
                idx_z: dict = {}
                for s in Zk:
                    idx_z.setdefault(tuple(Z.face(s, i) for i in range(k + 1) if i != j), []).append(s)
                for horn in _horns(Y, k, j, low):
                    faces = tuple(horn[i] for i in range(k + 1) if i != j)
                    image = tuple(phi(f) for f in faces)
                    for z in idx_z.get(image, ()):
                        if (faces, z) not in idx_y:
                            bad.append(f"Map({x},{y}): horn ({k},{j}) over a {k}-simplex does not fill")
                            break
                    if bad:
                        break
                if bad:
                    return Certificate("local fibration", False, k, bad)
    return Certificate("local fibration", True, D)


def is_dk_equivalence(F: SimplicialFunctor, D: int, bound: int = 64) -> Certificate:
    ff = is_fully_faithful(F, D, bound)
    es = is_essentially_surjective(F)
    if ff.ok is False or es.ok is False:
        ok = False
    elif ff.ok is None:
        ok = None
    else:
        ok = True
    return Certificate("DK equivalence", ok, ff.level, [ff.describe(), es.describe()])


def is_fibration(F: SimplicialFunctor, D: int) -> Certificate:
    iso, loc = is_isofibration(F), is_local_fibration(F, D)
    ok = iso.ok and loc.ok
    return Certificate("fibration", ok, D, [iso.describe(), loc.describe()])


# -- pullbacks, cube and tower lemmas -----------------------------------------------------------------


def pullback_categories(f: SimplicialFunctor, g: SimplicialFunctor,
                        budget: int | None = None) -> tuple[SimplicialCategory, SimplicialFunctor, SimplicialFunctor]:
    """Strict pullback ``A x_C B`` object-wise and hom-wise, with its two projections."""
    A, B = f.source, g.source
    if f.target is not g.target:
        raise SimplicialError("pullback needs a common target category")
    objs = [(a, b) for a in range(A.n) for b in range(B.n) if f.on_objects[a] == g.on_objects[b]]
    D = min(A.D, B.D)
    prods: dict[tuple[int, int], ProductResult] = {}
    for i, (a, b) in enumerate(objs):
        for j, (a2, b2) in enumerate(objs):
            prods[(i, j)] = pullback(f.on_homs[(a, a2)], g.on_homs[(b, b2)], D, budget)

    def comp(x, y, z, u, v):
        R, Ru, Rv = prods[(x, z)], prods[(y, z)], prods[(x, y)]
        (a, b), (a1, b1), (a2, b2) = objs[x], objs[y], objs[z]
        first = A.compose(a, a1, a2, Ru.pr1(u), Rv.pr1(v))
        second = B.compose(b, b1, b2, Ru.pr2(u), Rv.pr2(v))
        return R.pair(first, second)

    ids = [prods[(i, i)].pair(A.identity(a), B.identity(b))[1] for i, (a, b) in enumerate(objs)]
    homs = {p: R.sset for p, R in prods.items()}
    P = SimplicialCategory([f"({A.objects[a]},{B.objects[b]})" for a, b in objs], homs, comp, ids, D,
                           f"{A.name}x{B.name}")
    P.pairs_of = objs
    P.prods = prods
    p1 = SimplicialFunctor(P, A, [a for a, _ in objs], {p: R.pr1 for p, R in prods.items()}, "pr1")
    p2 = SimplicialFunctor(P, B, [b for _, b in objs], {p: R.pr2 for p, R in prods.items()}, "pr2")
    return P, p1, p2


def induced_on_pullbacks(P: SimplicialCategory, Q: SimplicialCategory, alpha: SimplicialFunctor,
                         beta: SimplicialFunctor) -> SimplicialFunctor:
    """``(a, b) -> (alpha a, beta b)`` from ``A x_C B`` to ``A' x_C' B'``."""
    where = {ab: i for i, ab in enumerate(Q.pairs_of)}
    obj = []
    for a, b in P.pairs_of:
        key = (alpha.on_objects[a], beta.on_objects[b])
        if key not in where:
            raise PreconditionNotCertified("the comparison square does not commute on objects")
        obj.append(where[key])
    homs = {}
    for (i, j), R in P.prods.items():
        (a, b), (a2, b2) = P.pairs_of[i], P.pairs_of[j]
        Rq = Q.prods[(obj[i], obj[j])]
        fa, fb = alpha.on_homs[(a, a2)], beta.on_homs[(b, b2)]
        homs[(i, j)] = SimplicialMap.from_function(
            R.sset, Rq.sset, lambda s, R=R, Rq=Rq, fa=fa, fb=fb: Rq.pair(fa(R.pr1(s)), fb(R.pr2(s))),
            upto=min(P.D, Q.D))
    return SimplicialFunctor(P, Q, obj, homs, "comparison")


def _commutes(u: SimplicialFunctor, v: SimplicialFunctor, w: SimplicialFunctor, z: SimplicialFunctor,
              D: int) -> bool:
    """``v . u == z . w`` on objects and on every simplex through ``D``."""
    C = u.source
    if [v.on_objects[u.on_objects[x]] for x in range(C.n)] != [z.on_objects[w.on_objects[x]] for x in range(C.n)]:
        return False
    for (x, y), X in C.homs.items():
        ux, uy, wx, wy = u.on_objects[x], u.on_objects[y], w.on_objects[x], w.on_objects[y]
        for k in range(min(D, X.max_dim) + 1):
            for s in X.nondegenerate(k):
                if v.on_homs[(ux, uy)](u.on_homs[(x, y)](s)) != z.on_homs[(wx, wy)](w.on_homs[(x, y)](s)):
                    return False
    return True


@dataclass
class LemmaReport:
    name: str
    hypotheses: dict[str, Certificate]
    conclusion: Certificate | None
    comparison: SimplicialFunctor | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(c.ok is True for c in self.hypotheses.values())

    @property
    def ok(self) -> bool:
        """The implication holds: hypotheses certified and conclusion certified."""
        return self.hypotheses_hold and self.conclusion is not None and self.conclusion.ok is True

    def describe(self) -> str:
        lines = [f"{self.name}:"]
        lines += [f"  hypothesis {k}: {c.describe()}" for k, c in self.hypotheses.items()]
        if self.conclusion is not None:
            lines.append(f"  conclusion: {self.conclusion.describe()}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


@dataclass
class CospanSquare:
    f: SimplicialFunctor      # A -> C
    g: SimplicialFunctor      # B -> C (the fibration leg)


def check_cube_lemma(first: CospanSquare, second: CospanSquare, alpha: SimplicialFunctor, beta: SimplicialFunctor,
                     gamma: SimplicialFunctor, D: int = 3, bound: int = 64, strict: bool = True) -> LemmaReport:
    """Compare ``A x_C B -> A' x_C' B'`` given DK equivalences ``alpha, beta, gamma`` and fibration legs.

    With ``strict`` a failed hypothesis raises; otherwise the conclusion is computed anyway (negative controls).
    """
    hyp = {
        "g fibration": is_fibration(first.g, D),
        "g' fibration": is_fibration(second.g, D),
        "alpha DK": is_dk_equivalence(alpha, D, bound),
        "beta DK": is_dk_equivalence(beta, D, bound),
        "gamma DK": is_dk_equivalence(gamma, D, bound),
    }
    comm = _commutes(first.f, gamma, alpha, second.f, D) and _commutes(first.g, gamma, beta, second.g, D)
    hyp["cube commutes"] = Certificate("commutation", comm, D)
    rep = LemmaReport("cube lemma", hyp, None)
    if strict and not rep.hypotheses_hold:
        raise PreconditionNotCertified(rep.describe())
    if not comm:
        rep.notes.append("cube does not commute; no comparison functor")
        return rep
    P, _, _ = pullback_categories(first.f, first.g)
    Q, _, _ = pullback_categories(second.f, second.g)
    try:
        cmp_ = induced_on_pullbacks(P, Q, alpha, beta)
    except PreconditionNotCertified as exc:
        rep.notes.append(str(exc))
        return rep
    rep.comparison = cmp_
    bad = cmp_.check(min(D, 2))
    if bad:
        rep.notes.append(f"comparison is not a strict functor: {bad[0]}")
    rep.conclusion = is_dk_equivalence(cmp_, D, bound)
    rep.notes.append(f"pullbacks have {P.n} and {Q.n} objects")
    return rep


@dataclass
class CategoryTower:
    """Stages indexed ``lo..hi`` with structure functors ``maps[a]: stages[a + 1] -> stages[a]``."""

    stages: dict[int, SimplicialCategory]
    maps: dict[int, SimplicialFunctor]

    @property
    def top(self) -> int:
        return max(self.stages)


def coskeleton_tower(C: SimplicialCategory, lo: int, hi: int, budget: int | None = None) -> CategoryTower:
    stages = {m: homotopy_mn(C, m, budget) for m in range(lo, hi + 1)}
    maps = {m: coskeleton_structure(stages[m + 1], stages[m]) for m in range(lo, hi)}
    return CategoryTower(stages, maps)


def induced_on_coskeleta(F: SimplicialFunctor, HC: SimplicialCategory, HE: SimplicialCategory) -> SimplicialFunctor:
    """``homotopy_mn(F, m)``: apply ``F`` to the faces of coskeletal simplices."""
    m = HC.level
    homs = {}
    for (x, y), R in HC.cosks.items():
        Rt = HE.cosks[(F.on_objects[x], F.on_objects[y])]
        phi = F.on_homs[(x, y)]

        def img(s, R=R, Rt=Rt, phi=phi):
            k = dim(s)
            if k <= m:
                return Rt.simplex_of(phi(R.model.simplices[k][R.mat.key_of(s, R.model)[1]]))
            return Rt.from_faces(tuple(img(R.sset.face(s, i)) for i in range(k + 1)))

        homs[(x, y)] = SimplicialMap.from_function(R.sset, Rt.sset, img, upto=min(HC.D, HE.D))
    return SimplicialFunctor(HC, HE, F.on_objects, homs, f"h{m}({F.name})")


def check_tower_lemma(TA: CategoryTower, TB: CategoryTower, comps: dict[int, SimplicialFunctor], D: int = 3,
                      bound: int = 64, strict: bool = True) -> LemmaReport:
    """``lim A -> lim B`` is DK when all ``p_i`` are fibrations and all ``g_i`` DK equivalences.

    The limit is the top stage once the last structure functor is bijective on simplices through ``D``.
    """
    hyp: dict[str, Certificate] = {}
    for a, p in sorted(TA.maps.items()):
        hyp[f"p{a} fibration"] = is_fibration(p, D)
    for a, q in sorted(TB.maps.items()):
        hyp[f"q{a} fibration"] = is_fibration(q, D)
    for a, g in sorted(comps.items()):
        hyp[f"g{a} DK"] = is_dk_equivalence(g, D, bound)
    for a in sorted(TA.maps):
        hyp[f"square {a} commutes"] = Certificate(
            "commutation", _commutes(TA.maps[a], comps[a], comps[a + 1], TB.maps[a], D), D)
    for name, T in (("A", TA), ("B", TB)):
        top = T.top
        stable = top - 1 in T.maps and all(phi.is_bijective(D) for phi in T.maps[top - 1].on_homs.values())
        hyp[f"{name} stabilizes"] = Certificate("levelwise stabilization", stable, D)
    rep = LemmaReport("tower lemma", hyp, None)
    if strict and not rep.hypotheses_hold:
        raise PreconditionNotCertified(rep.describe())
    g = comps[TA.top]
    rep.comparison = g
    rep.conclusion = is_dk_equivalence(g, D, bound)
    rep.notes.append(f"limit taken at stage {TA.top}")
    return rep


def negative_cube_control(D: int = 3) -> tuple[CospanSquare, CospanSquare, SimplicialFunctor, SimplicialFunctor,
                                             SimplicialFunctor]:
    """``pt -> BZ/2 <- pt`` against ``pt -> BZ/2 <- EZ/2``: the first leg is not a fibration.

    Every comparison is a DK equivalence, yet the strict pullbacks have homs ``pt`` and ``Z/2``.
    """
    G = FiniteGroup.cyclic(2)
    B = group_category(G, 1, D + 1)
    E, _ = total_group_category(G, D + 1)
    f = unit_functor(B)
    g = unit_functor(B)
    q = quotient_functor(E, B, G)
    beta = functor_from_keys(g.source, E, [0], lambda a, b, s: E.identity(0, dim(s)), "unitE")
    return CospanSquare(f, g), CospanSquare(f, q), identity_functor(f.source), beta, identity_functor(B)


# -- categorical local systems and the hom-wise tower -------------------------------------------------------


@dataclass
class HomSlot:
    """One component of a hom space with its ``pi_2`` module (``None`` when the component is not examined)."""

    pair: tuple[int, int]
    component: HomComponent
    pi2: Pi2 | None
    presentation: Presentation

    @property
    def ngens(self) -> int:
        return self.presentation.ngens

    @property
    def is_zero(self) -> bool:
        return self.presentation.group.order == 1


@dataclass
class CatLocalSystem:
    """``pi_2`` local systems per hom component and composition morphisms ``m_{x,y,z}``.

    ``m`` at a vertex pair ``(g, f)`` is the matrix ``[c(-, f)_* | c(g, -)_*]`` from
    ``pi_2(Map(y,z), g) + pi_2(Map(x,y), f)`` to ``pi_2(Map(x,z), g f)``.
    """

    base: SimplicialCategory
    slots: dict[tuple[int, int], list[HomSlot]]
    bound: int = 64
    morphisms: dict = field(default_factory=dict)
    _lifts: dict = field(default_factory=dict, repr=False)

    def slot(self, x: int, y: int, v: int) -> HomSlot:
        for s in self.slots[(x, y)]:
            if v in s.component.index[0]:
                return s
        raise SimplicialError(f"vertex {v} of Map({x},{y}) lies in no slot")

    def _pushforward(self, src: HomSlot, dst: HomSlot, fn, base: int):
        """Matrix and pi_1 map of ``fn`` from the component of ``src`` based at ``base``."""
        if src.is_zero or dst.is_zero:
            return [[0] * src.ngens for _ in range(dst.ngens)], None
        cs, cd = src.component, dst.component
        phi = SimplicialMap.from_function(cs.sset, cd.sset, lambda s: cd.to_sub(fn(cs.from_sub(s))), upto=2)
        lift = lift_to_covers(phi, src.pi2.cover, dst.pi2.cover, cs.index[0][base])
        return pi2_matrix(lift, src.pi2, dst.pi2), lift

    def morphism(self, x: int, y: int, z: int, g: int, f: int):
        """``(matrix, (theta_g, theta_f), slots)`` at the vertex pair ``(g, f)``."""
        key = (x, y, z, g, f)
        if key in self.morphisms:
            return self.morphisms[key]
        C = self.base
        gf = C.compose(x, y, z, (ident(0), g), (ident(0), f))[1]
        sg, sf, st = self.slot(y, z, g), self.slot(x, y, f), self.slot(x, z, gf)
        M1, l1 = self._pushforward(sg, st, lambda s: C.compose(x, y, z, s, point_vertex(f, dim(s))), g)
        M0, l0 = self._pushforward(sf, st, lambda s: C.compose(x, y, z, point_vertex(g, dim(s)), s), f)
        M = [r1 + r0 for r1, r0 in zip(M1, M0)] if st.ngens else []
        out = (M, (l1, l0), (sg, sf, st))
        self.morphisms[key] = out
        return out

    def _equal(self, P: Presentation, A, B, ncols: int) -> bool:
        return all(P.equal([r[j] for r in A], [r[j] for r in B]) for j in range(ncols)) if P.ngens else True

    def check_equivariance(self) -> list[str]:
        bad = []
        for x, y, z in iproduct(range(self.base.n), repeat=3):
            for sg in self.slots[(y, z)]:
                for sf in self.slots[(x, y)]:
                    g, f = sg.component.root, sf.component.root
                    M, (l1, l0), (_, _, st) = self.morphism(x, y, z, g, f)
                    for lift, src, off in ((l1, sg, 0), (l0, sf, sg.ngens)):
                        if lift is None:
                            continue
                        block = [r[off:off + src.ngens] for r in M]
                        b = src.component.index[0][src.component.root]
                        for h in lift.src.group.elements():
                            lhs = matmul(block, src.pi2.module.rho[0][h])
                            rhs = matmul(st.pi2.module.rho[0][lift.theta(b, h)], block)
                            if not self._equal(st.presentation, lhs, rhs, src.ngens):
                                bad.append(f"m({x},{y},{z}) at ({g},{f}) is not equivariant for {h}")
        return bad

    def check_associativity(self, vertices: str = "roots") -> list[str]:
        """``m . (id + m) == m . (m + id)`` at every triple of component roots (or of all vertices)."""
        C = self.base
        bad = []
        for w, x, y, z in iproduct(range(C.n), repeat=4):
            def verts(p):
                if vertices == "all":
                    return list(range(C.hom(*p).count(0)))
                return [s.component.root for s in self.slots[p]]
            for h, g, f in iproduct(verts((y, z)), verts((x, y)), verts((w, x))):
                gf = C.compose(w, x, y, (ident(0), g), (ident(0), f))[1]
                hg = C.compose(x, y, z, (ident(0), h), (ident(0), g))[1]
                M_gf, _, (sg, sf, s_gf) = self.morphism(w, x, y, g, f)
                M_h_gf, _, (sh, _, st) = self.morphism(w, y, z, h, gf)
                M_hg, _, (_, _, s_hg) = self.morphism(x, y, z, h, g)
                M_hg_f, _, _ = self.morphism(w, x, z, hg, f)
                nh, ng, nf = sh.ngens, sg.ngens, sf.ngens
                left_inner = _block_diag(identity(nh), M_gf, nh, s_gf.ngens, nh, ng + nf)
                right_inner = _block_diag(M_hg, identity(nf), s_hg.ngens, nf, nh + ng, nf)
                lhs = _mm(M_h_gf, left_inner, st.ngens, nh + ng + nf)
                rhs = _mm(M_hg_f, right_inner, st.ngens, nh + ng + nf)
                if not self._equal(st.presentation, lhs, rhs, nh + ng + nf):
                    bad.append(f"associativity fails at ({w},{x},{y},{z}) vertices ({h},{g},{f})")
        return bad

    def check_units(self) -> list[str]:
        C = self.base
        bad = []
        for x, y in C.pairs():
            for s in self.slots[(x, y)]:
                f = s.component.root
                M, _, (sg, sf, st) = self.morphism(x, y, y, C.ids[y], f)
                if not self._equal(st.presentation, [r[sg.ngens:] for r in M], identity(sf.ngens), sf.ngens):
                    bad.append(f"left unit at Map({x},{y}) vertex {f}")
                M, _, (sg, sf, st) = self.morphism(x, x, y, f, C.ids[x])
                if not self._equal(st.presentation, [r[:sg.ngens] for r in M], identity(sg.ngens), sg.ngens):
                    bad.append(f"right unit at Map({x},{y}) vertex {f}")
        return bad

    def check(self) -> list[str]:
        return self.check_equivariance() + self.check_units() + self.check_associativity()

    def support(self) -> list[tuple[int, int]]:
        return sorted(p for p, slots in self.slots.items() if any(not s.is_zero for s in slots))


def _block_diag(A, B, ra: int, rb: int, ca: int, cb: int):
    out = [[0] * (ca + cb) for _ in range(ra + rb)]
    for i in range(ra):
        for j in range(ca):
            out[i][j] = A[i][j]
    for i in range(rb):
        for j in range(cb):
            out[ra + i][ca + j] = B[i][j]
    return out


def _mm(A, B, rows: int, cols: int):
    if not rows or not cols:
        return [[0] * cols for _ in range(rows)]
    if not B:
        return [[0] * cols for _ in range(rows)]
    return matmul(A, B)


def cat_local_system(C: SimplicialCategory, bound: int = 64) -> CatLocalSystem:
    slots = {}
    for p, X in C.homs.items():
        row = []
        for c in hom_components(X):
            pi2 = extract_pi2(c.sset, bound=bound)
            row.append(HomSlot(p, c, pi2, pi2.presentation))
        slots[p] = row
    return CatLocalSystem(C, slots, bound)


@dataclass
class HomHint:
    """A hom component known to be the twisted product ``T`` (enables coefficient comparison)."""

    pair: tuple[int, int]
    root: int
    T: TwistedProduct
    mat: Materialized


@dataclass
class CatTower:
    source: SimplicialCategory
    stages: dict[int, SimplicialCategory]
    structure: dict[int, SimplicialFunctor]
    units: dict[int, SimplicialFunctor]
    system: CatLocalSystem
    kinvariants: dict[tuple[int, int, int], KInvariant]
    recovered: dict[tuple[int, int, int], tuple[tuple[int, ...], tuple[int, ...]]]
    ledger: list[LedgerEntry]
    errors: dict[tuple[int, int, int], str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.ledger)

    def report(self) -> str:
        return "\n".join(str(e) for e in self.ledger)


def catwise_tower(C: SimplicialCategory, S: int = 2, D: int | None = None, hints: list[HomHint] | None = None,
                  bound: int = 64, budget: int | None = None, check_upto: int = 2) -> CatTower:
    """Stages ``homotopy_mn(C, a + 1)`` for ``a = 1..S`` with the assembled pi_2 system and hom-wise k_2."""
    D = C.D if D is None else D
    ledger: list[LedgerEntry] = []
    notes: list[str] = []
    stages = {a: homotopy_mn(C, a + 1, budget) for a in range(1, S + 1)}
    structure = {a: coskeleton_structure(stages[a + 1], stages[a]) for a in range(1, S)}
    units = {a: coskeleton_unit(C, H) for a, H in stages.items()}
    for a, H in stages.items():
        bad = H.check(min(check_upto, D))
        ledger.append(LedgerEntry(a, "stage composition strict", STRICT, not bad,
                                  f"checked through dim {min(check_upto, D)}" + (f"; {bad[0]}" if bad else "")))
    for a, p in structure.items():
        ledger.append(LedgerEntry(a, "structure functor identity on objects", STRICT, p.is_identity_on_objects()))
        bad = p.check(min(check_upto, D))
        ledger.append(LedgerEntry(a, "structure functor strict", STRICT, not bad, bad[0] if bad else ""))
        iso = is_isofibration(p)
        ledger.append(LedgerEntry(a, "structure functor isofibration", STRICT, bool(iso), iso.describe()))
        loc = is_local_fibration(p, min(D, 3))
        notes.append(f"stage {a} structure functor hom-wise Kan fibration: {loc.describe()}")
    system = cat_local_system(C, bound)
    for name, bad in (("equivariance", system.check_equivariance()), ("units", system.check_units()),
                      ("associativity", system.check_associativity())):
        ledger.append(LedgerEntry(2, f"local system {name}", STRICT, not bad, bad[0] if bad else ""))
    hints = hints or []
    kinvs, recovered, errors = {}, {}, {}
    for p, slots in system.slots.items():
        for s in slots:
            if s.is_zero:
                continue
            key = (p[0], p[1], s.component.root)
            hint = next((h for h in hints if h.pair == p and h.root == s.component.root), None)
            try:
                carrier = hint.T.carrier(hint.mat) if hint else None
                X = s.component.sset
                kinv = extract_k_invariant(X, 2, min(D + 1, 4), carrier=carrier, pi2=s.pi2, bound=bound,
                                           budget=budget, realize=False, check_vanishing=False)
            except (SimplicialError, BudgetExceeded) as exc:
                errors[key] = str(exc)
                ledger.append(LedgerEntry(2, f"k-invariant of Map{p}[{s.component.root}]", FORMAL, False, str(exc)))
                continue
            kinvs[key] = kinv
            level = kinv.certification
            ledger.append(LedgerEntry(2, f"k-invariant of Map{p}[{s.component.root}]", level, True, kinv.describe()))
            if hint is not None:
                if hint.mat.sset.faces != X.faces:
                    raise SimplicialError("hint does not describe this hom component")
                cls, ident_ = k_invariant_in_coefficients(hint.T, hint.mat, kinv, s.pi2)
                H = cls.group
                want = tuple(H.class_of(hint.T.beta_vector(H)).coords)
                got = tuple(cls.coords)
                recovered[key] = (want, got)
                ledger.append(LedgerEntry(2, f"hom-wise class recovered on Map{p}", HOMOLOGY,
                                          got == want and ident_.bijective and ident_.equivariant,
                                          f"expected {want}, recovered {got}"))
    return CatTower(C, stages, structure, units, system, kinvs, recovered, ledger, errors, notes)
