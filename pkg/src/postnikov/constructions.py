"""Limits, colimits, skeleta and coskeleta of finite simplicial sets."""

from __future__ import annotations

from dataclasses import dataclass
from .sset import (BudgetExceeded, LevelModel, Materialized, Simplex, SimplicialError,
                   SimplicialMap, SimplicialSet, degeneracy_positions, ident, materialize,
                   surjections)


@dataclass
class PointedSpaceModel:
    sset: SimplicialSet
    basepoint: int = 0
    quotient_map: SimplicialMap | None = None

    def __post_init__(self):
        if not 0 <= self.basepoint < self.sset.count(0):
            raise SimplicialError(f"basepoint {self.basepoint} is not a vertex")


def _need(X: SimplicialSet, D: int, what: str):
    if not X.known(D):
        raise SimplicialError(f"{what}: input {X.name or X!r} only known through dimension {X.max_dim}")


# -- products and pullbacks --------------------------------------------------


class _PairModel(LevelModel):
    def __init__(self, X: SimplicialSet, Y: SimplicialSet, f=None, g=None):
        self.X, self.Y, self.f, self.g = X, Y, f, g

    def level(self, k):
        X, Y = self.X, self.Y
        xs = X.full_level(k)
        ys = Y.full_level(k)
        if self.f is None:
            for a in xs:
                pa = degeneracy_positions(a[0])
                for b in ys:
                    if not (pa & degeneracy_positions(b[0])):
                        yield (a, b)
            return
        by_image: dict = {}
        for a in xs:
            by_image.setdefault(self.f(a), []).append(a)
        for b in ys:
            pb = degeneracy_positions(b[0])
            for a in by_image.get(self.g(b), ()):
                if not (pb & degeneracy_positions(a[0])):
                    yield (a, b)

    def face(self, key, i):
        return (self.X.face(key[0], i), self.Y.face(key[1], i))

    def degeneracy(self, key, j):
        return (self.X.degeneracy(key[0], j), self.Y.degeneracy(key[1], j))


@dataclass
class ProductResult:
    sset: SimplicialSet
    pr1: SimplicialMap
    pr2: SimplicialMap
    model: Materialized

    def pair(self, a: Simplex, b: Simplex) -> Simplex:
        """The simplex of the product with components ``a`` and ``b``."""
        return self.model.normal_form((a, b))

    def lift(self, f: SimplicialMap, g: SimplicialMap) -> SimplicialMap:
        """Universal map ``T -> X x Y`` induced by a cone ``(f, g)``."""
        return SimplicialMap.from_function(f.domain, self.sset, lambda s: self.pair(f(s), g(s)),
                                           upto=min(f.domain.max_dim, self.sset.max_dim))


def _projections(mat: Materialized, A: SimplicialSet, B: SimplicialSet):
    P = mat.sset
    p1 = SimplicialMap(P, A, [[key[0] for key in lvl] for lvl in mat.keys], "pr1")
    p2 = SimplicialMap(P, B, [[key[1] for key in lvl] for lvl in mat.keys], "pr2")
    return p1, p2


def product(X: SimplicialSet, Y: SimplicialSet, D: int | None = None, budget: int | None = None) -> ProductResult:
    if D is None:
        D = X.top_dim + Y.top_dim if not (X.truncated or Y.truncated) else min(X.max_dim, Y.max_dim)
    _need(X, D, "product")
    _need(Y, D, "product")
    finite = not (X.truncated or Y.truncated) and D >= X.top_dim + Y.top_dim
    mat = materialize(_PairModel(X, Y), D, budget, kan=X.kan and Y.kan, truncated=not finite,
                      name=f"{X.name or 'X'}x{Y.name or 'Y'}")
    p1, p2 = _projections(mat, X, Y)
    return ProductResult(mat.sset, p1, p2, mat)


def pullback(f: SimplicialMap, g: SimplicialMap, D: int | None = None, budget: int | None = None) -> ProductResult:
    if f.codomain is not g.codomain:
        raise SimplicialError("pullback needs a common codomain")
    A, B = f.domain, g.domain
    if D is None:
        D = min(A.max_dim, B.max_dim)
    _need(A, D, "pullback")
    _need(B, D, "pullback")
    mat = materialize(_PairModel(A, B, f, g), D, budget, truncated=True, name="pullback")
    p1, p2 = _projections(mat, A, B)
    return ProductResult(mat.sset, p1, p2, mat)


# -- subcomplexes, quotients, smash -------------------------------------------


def closure(X: SimplicialSet, generators: dict[int, set[int]]) -> dict[int, set[int]]:
    """Smallest subcomplex containing the given nondegenerate simplices."""
    sub = {k: set(v) for k, v in generators.items()}
    for k in sorted(sub, reverse=True):
        for x in list(sub[k]):
            stack = [(k, x)]
            while stack:
                kk, xx = stack.pop()
                for eta, y in X.faces[kk][xx]:
                    m = eta[-1]
                    if y not in sub.setdefault(m, set()):
                        sub[m].add(y)
                        stack.append((m, y))
    return sub


def check_subcomplex(X: SimplicialSet, A: dict[int, set[int]]) -> None:
    for k, xs in A.items():
        for x in xs:
            if not 0 <= x < X.count(k):
                raise SimplicialError(f"not a subcomplex: ({k}, {x}) is not a simplex")
            for i, (eta, y) in enumerate(X.faces[k][x]):
                if y not in A.get(eta[-1], ()):
                    raise SimplicialError(f"not a subcomplex: face {i} of ({k}, {x}) leaves it")


def quotient(X: SimplicialSet, A: dict[int, set[int]], name: str = "") -> PointedSpaceModel:
    """Collapse the subcomplex ``A`` (nonempty) to a basepoint; ``A`` maps dims to id sets."""
    check_subcomplex(X, A)
    if not A.get(0):
        raise SimplicialError("quotient by an empty subcomplex is not pointed")
    remap: list[dict[int, int]] = []
    faces: list[list] = []
    for k in range(X.top_dim + 1):
        keep = [x for x in range(X.count(k)) if x not in A.get(k, ())]
        if k == 0:
            keep = [None] + keep
        remap.append({x: i for i, x in enumerate(keep)})
        faces.append(keep)

    def image(s: Simplex) -> Simplex:
        eta, y = s
        m = eta[-1]
        if y in A.get(m, ()):
            return ((0,) * len(eta), 0)
        return (eta, remap[m][y])

    out_faces = []
    for k, keep in enumerate(faces):
        if k == 0:
            out_faces.append([() for _ in keep])
        else:
            out_faces.append([tuple(image(f) for f in X.faces[k][x]) for x in keep])
    Q = SimplicialSet(out_faces, max_dim=X.max_dim, truncated=X.truncated, name=name or f"{X.name}/A")
    q = SimplicialMap(X, Q, [[image((ident(k), x)) for x in range(X.count(k))] for k in range(X.top_dim + 1)], "quotient")
    return PointedSpaceModel(Q, 0, q)


def wedge_subcomplex(S: PointedSpaceModel, T: PointedSpaceModel, prod: ProductResult) -> dict[int, set[int]]:
    """Simplices of ``S x T`` lying in ``S v T``."""
    sub: dict[int, set[int]] = {}
    for k, level in enumerate(prod.model.keys):
        for x, (a, b) in enumerate(level):
            if (a[0][-1] == 0 and a[1] == S.basepoint) or (b[0][-1] == 0 and b[1] == T.basepoint):
                sub.setdefault(k, set()).add(x)
    return sub


def smash(S: PointedSpaceModel, T: PointedSpaceModel, budget: int | None = None) -> PointedSpaceModel:
    prod = product(S.sset, T.sset, budget=budget)
    W = wedge_subcomplex(S, T, prod)
    return quotient(prod.sset, W, name=f"{S.sset.name}^{T.sset.name}")


def skeleton(X: SimplicialSet, n: int) -> SimplicialSet:
    return SimplicialSet(X.faces[: n + 1], name=f"sk{n}{X.name}")


# -- coskeleta ----------------------------------------------------------------


class CoskeletonModel(LevelModel):
    """``cosk_n X``: keys are ``(k, id)``; ids index X's full level for k <= n
    and compatible tuples of (k-1)-ids above."""

    def __init__(self, X: SimplicialSet, n: int, budget: int | None = None):
        _need(X, n, "coskeleton")
        self.X, self.n, self.budget = X, n, budget
        self.simplices: list[list] = []   # k <= n: X simplices; k > n: tuples of ids
        self.index: list[dict] = []
        self.face_ids: list[list[tuple[int, ...]]] = []
        self._degen: list[dict] = []
        self.total = 0

    def _ensure(self, k: int) -> None:
        while len(self.simplices) <= k:
            self._build(len(self.simplices))

    def _build(self, k: int) -> None:
        X = self.X
        if k <= self.n:
            sims = X.full_level(k)
            idx = {s: i for i, s in enumerate(sims)}
            if k:
                prev = self.index[k - 1]
                fids = [tuple(prev[X.face(s, i)] for i in range(k + 1)) for s in sims]
            else:
                fids = [() for _ in sims]
        else:
            sims, fids = self._enumerate(k)
            idx = {s: i for i, s in enumerate(sims)}
        self.total += len(sims)
        if self.budget is not None and self.total > self.budget:
            raise BudgetExceeded(f"coskeleton: more than {self.budget} simplices through dim {k}")
        self.simplices.append(sims)
        self.index.append(idx)
        self.face_ids.append(fids)
        self._degen.append({})

    def _enumerate(self, k: int):
        """Compatible (k+1)-tuples of (k-1)-simplices: d_i y_j = d_{j-1} y_i for i < j."""
        lower = self.face_ids[k - 1]
        n_lower = len(lower)
        prefix: list[dict] = [dict() for _ in range(k + 1)]
        for y in range(n_lower):
            fs = lower[y]
            for j in range(1, k + 1):
                prefix[j].setdefault(fs[:j], []).append(y)
        out = []
        budget = None if self.budget is None else self.budget - self.total
        chosen: list[int] = []

        def rec(j: int):
            if j == k + 1:
                out.append(tuple(chosen))
                if budget is not None and len(out) > budget:
                    raise BudgetExceeded(f"coskeleton: more than {self.budget} simplices in dim {k}")
                return
            if j == 0:
                cands = range(n_lower)
            else:
                need = tuple(lower[chosen[i]][j - 1] for i in range(j))
                cands = prefix[j].get(need, ())
            for y in cands:
                chosen.append(y)
                rec(j + 1)
                chosen.pop()

        rec(0)
        return out, out

    def degen_id(self, k: int, y: int, j: int) -> int:
        """Id of ``s_j`` applied to the ``k``-simplex ``y`` (lands in level k+1)."""
        self._ensure(k + 1)
        cache = self._degen[k]
        hit = cache.get((y, j))
        if hit is not None:
            return hit
        if k + 1 <= self.n:
            out = self.index[k + 1][self.X.degeneracy(self.simplices[k][y], j)]
        else:
            fs = self.face_ids[k][y]
            t = []
            for i in range(k + 2):
                if i < j:
                    t.append(self.degen_id(k - 1, fs[i], j - 1))
                elif i in (j, j + 1):
                    t.append(y)
                else:
                    t.append(self.degen_id(k - 1, fs[i - 1], j))
            out = self.index[k + 1][tuple(t)]
        cache[(y, j)] = out
        return out

    # LevelModel protocol
    def level(self, k):
        self._ensure(k)
        return [(k, i) for i in range(len(self.simplices[k]))]

    def face(self, key, i):
        k, y = key
        return (k - 1, self.face_ids[k][y][i])

    def degeneracy(self, key, j):
        k, y = key
        return (k + 1, self.degen_id(k, y, j))

    def unit_id(self, s: Simplex) -> int:
        k = len(s[0]) - 1
        self._ensure(k)
        if k <= self.n:
            return self.index[k][s]
        t = tuple(self.unit_id(self.X.face(s, i)) for i in range(k + 1))
        return self.index[k][t]


@dataclass
class CoskeletonResult:
    sset: SimplicialSet
    unit: SimplicialMap | None
    model: CoskeletonModel
    mat: Materialized

    def simplex_of(self, s: Simplex) -> Simplex:
        """Image of a simplex of X under the unit."""
        return self.mat.nf[(len(s[0]) - 1, self.model.unit_id(s))]

    def from_faces(self, faces: tuple[Simplex, ...]) -> Simplex:
        """The simplex whose faces are ``faces`` (above the coskeletal dimension)."""
        k = len(faces)
        m = self.model
        ids = tuple(self.mat.key_of(f, m)[1] for f in faces)
        return self.mat.nf[(k - 1, m.index[k - 1][ids])]


def coskeleton(X: SimplicialSet, n: int, D: int, budget: int | None = None, with_unit: bool = True) -> CoskeletonResult:
    if D < n:
        raise SimplicialError("coskeleton needs D >= n")
    model = CoskeletonModel(X, n, budget)
    mat = materialize(model, D, budget, kan=X.kan, truncated=True, name=f"cosk{n}{X.name}")
    unit = None
    if with_unit:
        d = min(D, X.max_dim if X.truncated else D)
        images = []
        for k in range(min(d, X.top_dim) + 1):
            images.append([mat.nf[(k, model.unit_id(s))] for s in X.nondegenerate(k)])
        unit = SimplicialMap(X, mat.sset, images, "unit")
    return CoskeletonResult(mat.sset, unit, model, mat)
