"""Parametrized Eilenberg-MacLane spaces over nerves of finite groupoids.

Two models of ``K(A, n) -> N(Gamma)``:

* ``minimal``: a k-simplex is a chain ``x0 -> ... -> xk`` together with a
  normalized twisted n-cocycle on ``Delta^k`` whose value on a face lies in
  ``A(x_min)``;
* ``bar``: a k-simplex is a chain together with an element of the reduced
  free ``A(x0)``-module on the k-simplices of ``S^n = Delta^n / boundary``
  (the surjections ``[k] -> [n]``); ``d0`` transports along the first arrow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product as iproduct

from .chains import LocalSystem, Presentation, TwistedCohomology, chains_of, twisted_homology_all
from .groupoid import FiniteGroup, FiniteGroupoid, NerveModel, nerve
from .linalg import AbelianGroup, Matrix, identity, matmul, matvec
from .sset import (LevelModel, Materialized, Simplex, SimplicialError, SimplicialMap, SimplicialSet,
                   coface, codegeneracy, materialize, surjections)


class InfiniteCoefficients(ValueError):
    """Materialization requested for a coefficient group that is not finite."""


class GroupoidModule:
    """A covariant functor ``A`` from a finite groupoid to abelian groups.

    Every object of a component has the fiber ``fibers[c]``; the arrow
    ``(u, g, v)`` acts by ``rho[c][g]``, with ``rho(g h) = rho(h) rho(g)``.
    """

    def __init__(self, groupoid: FiniteGroupoid, fibers: list[Presentation], rho: list[dict[int, Matrix]],
                 name: str = ""):
        self.groupoid = groupoid
        self.fibers = fibers
        self.rho = rho
        self.name = name
        self._elements: dict[int, list[tuple[int, ...]]] = {}

    @classmethod
    def trivial(cls, groupoid: FiniteGroupoid, P: Presentation, name: str = "") -> "GroupoidModule":
        rho = [{g: identity(P.ngens) for g in G.elements()} for G in groupoid.groups]
        return cls(groupoid, [P] * len(groupoid.groups), rho, name or str(P.group))

    @classmethod
    def sign(cls, G: FiniteGroup, sign_of, P: Presentation | None = None, name: str = "") -> "GroupoidModule":
        """One-object module on which ``g`` acts by ``sign_of(g)`` (``+-1``)."""
        P = P or Presentation.free(1)
        rho = {g: [[sign_of(g) * int(i == j) for j in range(P.ngens)] for i in range(P.ngens)] for g in G.elements()}
        return cls(FiniteGroupoid.from_group(G), [P], [rho], name or f"{P.group}_sign")

    @classmethod
    def zero(cls, groupoid: FiniteGroupoid) -> "GroupoidModule":
        return cls.trivial(groupoid, Presentation.free(0), "0")

    def fiber(self, x: int) -> Presentation:
        return self.fibers[self.groupoid.component[x]]

    def is_finite(self) -> bool:
        return all(P.group.rank == 0 for P in self.fibers)

    def check(self) -> list[str]:
        bad = []
        for c, G in enumerate(self.groupoid.groups):
            P = self.fibers[c]
            for g in G.elements():
                if not P.preserves(self.rho[c][g], P):
                    bad.append(f"component {c}: rho({g}) does not preserve relations")
                for h in G.elements():
                    lhs = self.rho[c][G.mul(g, h)]
                    rhs = matmul(self.rho[c][h], self.rho[c][g]) if P.ngens else lhs
                    for j in range(P.ngens):
                        if not P.equal([r[j] for r in lhs], [r[j] for r in rhs]):
                            bad.append(f"component {c}: rho({g}{h}) != rho({h}) rho({g})")
                            break
        return bad

    def act(self, x: int, g: int, v) -> tuple[int, ...]:
        """Covariant transport of ``v`` in ``A(x)`` along the arrow of element ``g``."""
        c = self.groupoid.component[x]
        P = self.fibers[c]
        return P.normal(matvec(self.rho[c][g], list(v)))

    def act_inv(self, x: int, g: int, v) -> tuple[int, ...]:
        """Transport back along the arrow of ``g`` (into the source fiber)."""
        G = self.groupoid.group_of(x)
        return self.act(x, G.inverse(g), v)

    def elements(self, x: int, window: int | None = None) -> list[tuple[int, ...]]:
        """All elements of ``A(x)``; for an infinite fiber, those with entries in ``[-window, window]``."""
        c = self.groupoid.component[x]
        P = self.fibers[c]
        if window is not None and P.group.rank:
            key = (c, window)
            if key not in self._elements:
                self._elements[key] = sorted({P.normal(list(v)) for v in
                                              iproduct(range(-window, window + 1), repeat=P.ngens)})
            return self._elements[key]
        if c not in self._elements:
            P = self.fibers[c]
            if P.group.rank:
                raise InfiniteCoefficients(f"A at component {c} is {P.group}, not finite")
            self._elements[c] = [tuple(e) for e in P.elements()]
        return self._elements[c]

    def in_window(self, x: int, v, window: int | None) -> bool:
        if window is None or not self.fiber(x).group.rank:
            return True
        return all(abs(t) <= window for t in v)

    def preserves_windows(self) -> bool:
        """Every transport is a signed permutation, so bounded windows are stable."""
        for c, G in enumerate(self.groupoid.groups):
            if self.fibers[c].relations:
                if self.fibers[c].group.rank:
                    return False
                continue
            for M in self.rho[c].values():
                for row in M:
                    if sorted(abs(t) for t in row) != [0] * (len(row) - 1) + [1]:
                        return False
        return True

    def zero_vec(self, x: int) -> tuple[int, ...]:
        return (0,) * self.fiber(x).ngens

    def add(self, x: int, a, b) -> tuple[int, ...]:
        return self.fiber(x).normal([p + q for p, q in zip(a, b)])

    def scale(self, x: int, k: int, a) -> tuple[int, ...]:
        return self.fiber(x).normal([k * p for p in a])

    def normal(self, x: int, a) -> tuple[int, ...]:
        return self.fiber(x).normal(list(a))

    def local_system(self, Y: SimplicialSet, chain_of) -> LocalSystem:
        """Pull back along a classifying assignment ``chain_of(simplex) -> (objects, elements)``."""
        fibers = [self.fiber(chain_of(Y.nd(0, v))[0][0]) for v in range(Y.count(0))]
        edge, inv = [], []
        for s in (Y.nondegenerate(1) if Y.top_dim >= 1 else []):
            xs, gs = chain_of(s)
            c = self.groupoid.component[xs[0]]
            edge.append(self.rho[c][gs[0]])
            inv.append(self.rho[c][self.groupoid.groups[c].inverse(gs[0])])
        return LocalSystem(Y, fibers, edge, inv, self.name)

    def direct_sum(self, other: "GroupoidModule") -> "GroupoidModule":
        if other.groupoid is not self.groupoid:
            raise SimplicialError("direct sum needs a common groupoid")
        from .chains import block_diag
        fibers, rho = [], []
        for c, G in enumerate(self.groupoid.groups):
            P, Q = self.fibers[c], other.fibers[c]
            fibers.append(P.direct_sum(Q))
            rho.append({g: block_diag(self.rho[c][g], other.rho[c][g], P.ngens, Q.ngens, P.ngens, Q.ngens)
                        for g in G.elements()})
        return GroupoidModule(self.groupoid, fibers, rho, f"{self.name}+{other.name}")

    def pullback(self, groupoid: FiniteGroupoid, obj_map, comp_map, elem_map) -> "GroupoidModule":
        """Restrict along a functor given on objects, components and group elements."""
        fibers, rho = [], []
        for c, G in enumerate(groupoid.groups):
            c2 = comp_map(c)
            fibers.append(self.fibers[c2])
            rho.append({g: self.rho[c2][elem_map(c, g)] for g in G.elements()})
        return GroupoidModule(groupoid, fibers, rho, self.name)


# -- helpers on Delta^k ------------------------------------------------------------


@lru_cache(maxsize=None)
def faces_of_dim(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    """The n-dimensional faces of ``Delta^k`` as sorted vertex tuples."""
    return tuple(combinations(range(k + 1), n + 1))


@lru_cache(maxsize=None)
def face_index(k: int, n: int) -> dict[tuple[int, ...], int]:
    return {f: i for i, f in enumerate(faces_of_dim(k, n))}


def chain_element(G: FiniteGroup, gs: tuple[int, ...], a: int, b: int) -> int:
    """Composite element of the arrows from position ``a`` to ``b`` (``a <= b``)."""
    g = 0
    for i in range(a, b):
        g = G.mul(g, gs[i])
    return g


@lru_cache(maxsize=None)
def _pullback_plan(k: int, n: int, theta: tuple[int, ...]) -> tuple[int, ...]:
    """Source face index for each n-face of ``[j]``, or -1 where ``theta`` collapses it."""
    idx = face_index(k, n)
    plan = []
    for f in faces_of_dim(len(theta) - 1, n):
        img = tuple(theta[v] for v in f)
        plan.append(idx[img] if len(set(img)) == n + 1 else -1)
    return tuple(plan)


def pullback_values(k: int, n: int, vals: tuple, theta: tuple[int, ...], zero) -> tuple:
    """Values of ``theta^* z`` for a monotone ``theta: [j] -> [k]``."""
    return tuple(zero if i < 0 else vals[i] for i in _pullback_plan(k, n, tuple(theta)))


# -- minimal model ---------------------------------------------------------------------


class MinimalEMModel(LevelModel):
    """Keys ``(objects, elements, values)`` with one value per n-face of ``Delta^k``."""

    def __init__(self, A: GroupoidModule, n: int, window: int | None = None):
        if n < 1:
            raise ValueError("EM degree must be at least 1")
        if window is not None and not A.preserves_windows():
            raise ValueError("windowed enumeration needs signed-permutation transports")
        self.A, self.n, self.window = A, n, window
        self.nerve = NerveModel(A.groupoid)

    def cocycles(self, xs: tuple[int, ...], gs: tuple[int, ...]):
        """All normalized twisted n-cocycles on the chain (values free on faces through 0)."""
        A, n = self.A, self.n
        k = len(xs) - 1
        faces = faces_of_dim(k, n)
        free = [f for f in faces if f[0] == 0]
        fixed = [f for f in faces if f[0] != 0]
        elems = A.elements(xs[0], self.window)
        if not faces:
            yield ()
            return
        for choice in iproduct(elems, repeat=len(free)):
            vals = dict(zip(free, choice))
            ok = True
            for f in fixed:
                vals[f] = v = self.solve_face(xs, gs, f, vals)
                if not A.in_window(xs[0], v, self.window):
                    ok = False
                    break
            if ok:
                yield tuple(vals[f] for f in faces)

    def solve_face(self, xs, gs, f, vals, target=None) -> tuple[int, ...]:
        """Value on a face avoiding 0 forced by ``delta z = target`` on ``{0} + f`` (target 0 by default)."""
        A = self.A
        G = A.groupoid.group_of(xs[0])
        w = (0,) + f
        acc = [-t for t in target] if target is not None else list(A.zero_vec(xs[0]))
        for i in range(1, len(w)):
            sub = w[:i] + w[i + 1:]
            sign = -1 if i % 2 else 1
            acc = [a + sign * b for a, b in zip(acc, vals[sub])]
        # rho(0 -> f0)^{-1} z(f) = -acc  =>  z(f) = -rho(0 -> f0) acc
        g = chain_element(G, gs, 0, f[0])
        return A.act(xs[0], g, [-a for a in acc])

    def level(self, k):
        for xs, gs in self._chains(k):
            for vals in self.cocycles(xs, gs):
                yield (xs, gs, vals)

    def _chains(self, k):
        G = self.A.groupoid
        by_comp: dict[int, list[int]] = {}
        for x in range(G.n_objects()):
            by_comp.setdefault(G.component[x], []).append(x)
        for c, objs in sorted(by_comp.items()):
            grp = G.groups[c]
            for xs in iproduct(objs, repeat=k + 1):
                for gs in iproduct(range(grp.order), repeat=k):
                    yield xs, gs

    def face(self, key, i):
        xs, gs, vals = key
        k = len(xs) - 1
        xs2, gs2 = self.nerve.face((xs, gs), i)
        theta = coface(k, i)
        zero = self.A.zero_vec(xs2[0])
        return (xs2, gs2, pullback_values(k, self.n, vals, theta, zero))

    def degeneracy(self, key, j):
        xs, gs, vals = key
        k = len(xs) - 1
        xs2, gs2 = self.nerve.degeneracy((xs, gs), j)
        return (xs2, gs2, pullback_values(k, self.n, vals, codegeneracy(k, j), self.A.zero_vec(xs[0])))

    def zero_key(self, xs, gs):
        k = len(xs) - 1
        return (xs, gs, tuple(self.A.zero_vec(xs[f[0]]) for f in faces_of_dim(k, self.n)))


# -- bar model -------------------------------------------------------------------------


class BarEMModel(LevelModel):
    """Keys ``(objects, elements, coefficients)``: one ``A(x0)`` coefficient per surjection ``[k] -> [n]``."""

    def __init__(self, A: GroupoidModule, n: int):
        if n < 1:
            raise ValueError("EM degree must be at least 1")
        self.A, self.n = A, n
        self.nerve = NerveModel(A.groupoid)

    @staticmethod
    @lru_cache(maxsize=None)
    def gens(k: int, n: int) -> tuple[tuple[int, ...], ...]:
        return tuple(surjections(k, n)) if k >= n else ()

    @staticmethod
    @lru_cache(maxsize=None)
    def gen_index(k: int, n: int) -> dict:
        return {a: i for i, a in enumerate(BarEMModel.gens(k, n))}

    def level(self, k):
        A, n = self.A, self.n
        gens = self.gens(k, n)
        for xs, gs in MinimalEMModel._chains(self, k):
            elems = A.elements(xs[0])
            for coeffs in iproduct(elems, repeat=len(gens)):
                yield (xs, gs, coeffs)

    @staticmethod
    @lru_cache(maxsize=None)
    def pushforward(k: int, n: int, theta: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
        """Pairs ``(source generator, target generator)`` with ``alpha . theta`` still surjective."""
        tgt = BarEMModel.gen_index(len(theta) - 1, n)
        out = []
        for i, alpha in enumerate(BarEMModel.gens(k, n)):
            beta = tuple(alpha[t] for t in theta)
            if len(set(beta)) == n + 1:
                out.append((i, tgt[beta]))
        return tuple(out)

    def _act(self, key, theta, xs2, gs2, transport):
        xs, gs, coeffs = key
        k = len(xs) - 1
        A = self.A
        out = [list(A.zero_vec(xs2[0])) for _ in self.gens(len(theta) - 1, self.n)]
        for i, pos in self.pushforward(k, self.n, theta):
            out[pos] = [a + b for a, b in zip(out[pos], coeffs[i])]
        vals = []
        for v in out:
            if transport is not None:
                vals.append(A.act(xs[0], transport, v))
            else:
                vals.append(A.normal(xs2[0], v))
        return (xs2, gs2, tuple(vals))

    def face(self, key, i):
        xs, gs, coeffs = key
        k = len(xs) - 1
        xs2, gs2 = self.nerve.face((xs, gs), i)
        return self._act(key, coface(k, i), xs2, gs2, gs[0] if i == 0 else None)

    def degeneracy(self, key, j):
        xs, gs, coeffs = key
        k = len(xs) - 1
        xs2, gs2 = self.nerve.degeneracy((xs, gs), j)
        return self._act(key, codegeneracy(k, j), xs2, gs2, None)

    def zero_key(self, xs, gs):
        k = len(xs) - 1
        return (xs, gs, tuple(self.A.zero_vec(xs[0]) for _ in self.gens(k, self.n)))


# -- the parametrized object ---------------------------------------------------------------


@dataclass
class ParametrizedEM:
    """``K(A, n)`` over the nerve of ``A``'s groupoid, materialized through ``D``."""

    A: GroupoidModule
    n: int
    model: str
    D: int
    budget: int | None = None
    window: int | None = None
    mat: Materialized = field(init=False, repr=False)
    base: Materialized = field(init=False, repr=False)
    levels: LevelModel = field(init=False, repr=False)

    def __post_init__(self):
        if self.model not in ("minimal", "bar"):
            raise ValueError("model must be 'minimal' or 'bar'")
        if not self.A.is_finite() and (self.window is None or self.model != "minimal"):
            raise InfiniteCoefficients("materialization needs finite coefficient groups (or a window)")
        if self.model == "minimal":
            self.levels = MinimalEMModel(self.A, self.n, self.window)
        else:
            self.levels = BarEMModel(self.A, self.n)
        self.mat = materialize(self.levels, self.D, self.budget, kan=True, truncated=True,
                               name=f"K({self.A.name},{self.n})")
        self.base = nerve(self.A.groupoid, self.D)
        self.mat.sset.kan = True

    @property
    def sset(self) -> SimplicialSet:
        return self.mat.sset

    def key(self, s: Simplex):
        return self.mat.key_of(s, self.levels)

    def simplex(self, key) -> Simplex:
        return self.mat.normal_form(key)

    @property
    def projection(self) -> SimplicialMap:
        images = [[self.base.nf[(key[0], key[1])] for key in lvl] for lvl in self.mat.keys]
        return SimplicialMap(self.sset, self.base.sset, images, "projection")

    @property
    def zero_section(self) -> SimplicialMap:
        images = [[self.mat.nf[self.levels.zero_key(*key)] for key in lvl] for lvl in self.base.keys]
        return SimplicialMap(self.base.sset, self.sset, images, "zero")

    def fiber(self, x: int) -> SimplicialSet:
        """The fiber over the object ``x`` (simplices over the constant chain at ``x``)."""
        from .constructions import pullback
        pt = _object_inclusion(self.base, x)
        return pullback(pt, self.projection, self.D).sset

    def fiber_homology(self, x: int) -> list[AbelianGroup]:
        F = self.fiber(x)
        C = chains_of(F, self.D)
        return [C.homology(k) for k in range(self.D)]

    def homology(self) -> list[AbelianGroup]:
        C = chains_of(self.sset, self.D)
        return [C.homology(k) for k in range(self.D)]


def _object_inclusion(N: Materialized, x: int) -> SimplicialMap:
    from .models import point
    P = point().restricted(N.sset.max_dim)
    P.truncated = False
    return SimplicialMap(P, N.sset, [[N.nf[((x,), ())]]], f"obj{x}")


def em_minimal_model(A: GroupoidModule, n: int, D: int, budget: int | None = None,
                     window: int | None = None) -> ParametrizedEM:
    return ParametrizedEM(A, n, "minimal", D, budget, window)


def em_paper_model(A: GroupoidModule, n: int, D: int, budget: int | None = None) -> ParametrizedEM:
    return ParametrizedEM(A, n, "bar", D, budget)


# -- maps into the minimal model ------------------------------------------------------------


class NotACocycle(ValueError):
    pass


@dataclass
class OverBase:
    """A simplicial set ``Y`` with a chain assignment into the nerve of ``A``'s groupoid."""

    Y: SimplicialSet
    chain: object  # callable: simplex -> (objects, elements)

    def local_system(self, A: GroupoidModule) -> LocalSystem:
        return A.local_system(self.Y, self.chain)


def over_nerve(f: SimplicialMap, N: Materialized) -> OverBase:
    """``Y`` over a nerve through a simplicial map into its materialization."""
    model = NerveModel(_groupoid_of(N))
    return OverBase(f.domain, lambda s: N.key_of(f(s), model))


def _groupoid_of(N: Materialized) -> FiniteGroupoid:
    G = getattr(N, "groupoid", None)
    if G is None:
        raise SimplicialError("materialized nerve does not record its groupoid")
    return G


def cocycle_values(H: TwistedCohomology, z: list[int]) -> list[tuple[int, ...]]:
    P, n = H.complex, H.n
    return [tuple(z[o: o + B.ngens]) for o, B in zip(P.offsets[n], P.blocks[n])]


def cocycle_to_map(K: ParametrizedEM, base: OverBase, z: list[int], H: TwistedCohomology | None = None) -> SimplicialMap:
    """The map ``Y -> K(A, n)`` over the base classified by the twisted cocycle ``z``."""
    if K.model != "minimal":
        raise ValueError("cocycle_to_map uses the minimal model")
    Y, n, A = base.Y, K.n, K.A
    H = H or TwistedCohomology(Y, base.local_system(A), n)
    try:
        H.check_cocycle(z)
    except Exception as exc:
        raise NotACocycle(str(exc)) from None
    vals = cocycle_values(H, z)

    def image(s: Simplex) -> Simplex:
        xs, gs = base.chain(s)
        k = len(xs) - 1
        out = []
        for f in faces_of_dim(k, n):
            face = Y.act(s, f)
            if Y.is_degenerate(face):
                out.append(A.zero_vec(xs[f[0]]))
            else:
                out.append(A.normal(xs[f[0]], vals[face[1]]))
        return K.simplex((xs, gs, tuple(out)))

    return SimplicialMap.from_function(Y, K.sset, image, upto=min(Y.max_dim, K.D), name="classifying")


def map_to_cocycle(K: ParametrizedEM, f: SimplicialMap, H: TwistedCohomology) -> list[int]:
    """Evaluate the fundamental class: the value of each n-simplex's image on its top face."""
    n = K.n
    z: list[int] = []
    for s in f.domain.nondegenerate(n):
        key = K.key(f(s))
        z.extend(key[2][0])
    return z


def enumerate_maps_over(K: ParametrizedEM, base: OverBase, limit: int = 1 << 20) -> list[list[list[Simplex]]]:
    """Every simplicial map ``Y -> K`` over the base (images per nondegenerate simplex)."""
    Y, n = base.Y, K.n
    top = min(Y.top_dim, K.D)
    model = K.levels
    cand_cache: dict = {}

    def candidates(s: Simplex):
        key = base.chain(s)
        if key not in cand_cache:
            cand_cache[key] = [K.simplex((key[0], key[1], v)) for v in model.cocycles(*key)]
        return cand_cache[key]

    images: list[list[Simplex | None]] = [[None] * Y.count(k) for k in range(top + 1)]

    def img(s: Simplex) -> Simplex:
        eta, y = s
        e2, w = images[eta[-1]][y]
        return (tuple(e2[t] for t in eta), w)

    def fits(k: int, x: int, c: Simplex) -> bool:
        s = Y.nd(k, x)
        return all(K.sset.face(c, i) == img(Y.face(s, i)) for i in range(k + 1)) if k else True

    # below n every simplex has a unique candidate
    for k in range(min(n, top + 1)):
        for x in range(Y.count(k)):
            cs = [c for c in candidates(Y.nd(k, x)) if fits(k, x, c)]
            if len(cs) != 1:
                raise SimplicialError("unexpected lifting data below the EM degree")
            images[k][x] = cs[0]
    if n > top:
        return [[list(l) for l in images]]
    nd_n = Y.count(n)
    watch: dict[int, list[int]] = {}
    if n + 1 <= top:
        for t in range(Y.count(n + 1)):
            last = max(f[1] for f in Y.faces[n + 1][t] if not Y.is_degenerate(f)) if any(
                not Y.is_degenerate(f) for f in Y.faces[n + 1][t]) else -1
            watch.setdefault(last, []).append(t)
    pre = [t for t in watch.get(-1, [])]
    results = []

    def complete() -> list[list[Simplex]] | None:
        full = [list(l) for l in images]
        saved = [list(l) for l in images]
        try:
            for k in range(n + 1, top + 1):
                for x in range(Y.count(k)):
                    cs = [c for c in candidates(Y.nd(k, x)) if fits(k, x, c)]
                    if len(cs) != 1:
                        return None
                    images[k][x] = cs[0]
            return [list(l) for l in images]
        finally:
            for k in range(len(images)):
                images[k] = saved[k]

    def check_upper(ts) -> bool:
        for t in ts:
            cs = [c for c in candidates(Y.nd(n + 1, t)) if fits(n + 1, t, c)]
            if not cs:
                return False
        return True

    def rec(x: int):
        if x == nd_n:
            out = complete()
            if out is not None:
                results.append(out)
                if len(results) > limit:
                    raise SimplicialError("map enumeration limit exceeded")
            return
        for c in candidates(Y.nd(n, x)):
            if fits(n, x, c):
                images[n][x] = c
                if check_upper(watch.get(x, [])):
                    rec(x + 1)
        images[n][x] = None

    if not check_upper(pre):
        return []
    rec(0)
    return results


# -- path fibration and loops ----------------------------------------------------------------


class PathEMModel(LevelModel):
    """``W K(A, n)``: chains with arbitrary normalized n-cochains on ``Delta^k``."""

    def __init__(self, A: GroupoidModule, n: int, window: int | None = None):
        self.A, self.n, self.window = A, n, window
        self.minimal = MinimalEMModel(A, n, window)
        self.nerve = self.minimal.nerve

    def level(self, k):
        A, n = self.A, self.n
        for xs, gs in self.minimal._chains(k):
            faces = faces_of_dim(k, n)
            for vals in iproduct(*[A.elements(xs[f[0]], self.window) for f in faces]):
                yield (xs, gs, tuple(vals))

    face = MinimalEMModel.face
    degeneracy = MinimalEMModel.degeneracy

    def zero_key(self, xs, gs):
        return self.minimal.zero_key(xs, gs)

    def delta(self, key):
        """Coboundary: the image in ``K(A, n + 1)``."""
        xs, gs, vals = key
        return (xs, gs, cochain_coboundary(self.A, self.n, xs, gs, vals))


def cochain_coboundary(A: GroupoidModule, n: int, xs, gs, vals) -> tuple:
    """Twisted coboundary of an n-cochain on the chain ``(xs, gs)``."""
    k = len(xs) - 1
    G = A.groupoid.group_of(xs[0])
    idx = face_index(k, n)
    out = []
    for w in faces_of_dim(k, n + 1):
        acc = list(A.act_inv(xs[w[0]], chain_element(G, gs, w[0], w[1]), vals[idx[w[1:]]]))
        for i in range(1, len(w)):
            v = vals[idx[w[:i] + w[i + 1:]]]
            sign = -1 if i % 2 else 1
            acc = [a + sign * b for a, b in zip(acc, v)]
        out.append(A.normal(xs[w[0]], acc))
    return tuple(out)


@dataclass
class LoopsCertificate:
    granted: bool
    loop_homology: list[str]
    reference_homology: list[str]
    detail: str = ""


def loops_comparison(A: GroupoidModule, n: int, D: int, budget: int | None = None) -> LoopsCertificate:
    """Fiberwise loops of ``K(A, n + 1)``: zero-section pullback of the path fibration, against ``K(A, n)``."""
    from .constructions import pullback
    W = materialize(PathEMModel(A, n), D, budget, name="W")
    K1 = em_minimal_model(A, n + 1, D, budget)
    Wm = PathEMModel(A, n)
    delta = SimplicialMap(W.sset, K1.sset, [[K1.simplex(Wm.delta(key)) for key in lvl] for lvl in W.keys], "delta")
    zero = K1.zero_section
    Om = pullback(delta, zero, D, budget).sset
    ref = em_paper_model(A, n, D, budget)
    h1 = [str(h) for h in chains_of(Om, D).homology_all(D - 1)]
    h2 = [str(h) for h in chains_of(ref.sset, D).homology_all(D - 1)]
    return LoopsCertificate(h1 == h2, h1, h2, f"loop object counts {Om.counts()}")


# -- spectra and square-zero products ------------------------------------------------------------


@dataclass
class ParametrizedSpectrumData:
    """``Sigma^shift H A`` over the groupoid, presented by its EM spaces in degrees ``>= shift``."""

    A: GroupoidModule
    shift: int = 0
    degrees: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        if self.shift < 0:
            raise ValueError("shift must be nonnegative")

    @property
    def groupoid(self) -> FiniteGroupoid:
        return self.A.groupoid

    def member(self, n: int, D: int, model: str = "minimal", budget: int | None = None) -> ParametrizedEM:
        return ParametrizedEM(self.A, n + self.shift, model, D, budget)


@dataclass
class SquareZeroProduct:
    data: ParametrizedSpectrumData
    objects: list[tuple[int, int]]
    components: list[tuple[int, int]]
    first: GroupoidModule   # p1^* A
    second: GroupoidModule  # p2^* B


def square_zero_product(P: ParametrizedSpectrumData, Q: ParametrizedSpectrumData) -> SquareZeroProduct:
    """Base ``Pi x Psi`` with coefficients ``p1^* A (+) p2^* B`` acting componentwise."""
    if P.shift != Q.shift:
        raise ValueError("square-zero product needs matching shifts")
    G1, G2 = P.groupoid, Q.groupoid
    prod, info = G1.product(G2)
    comps = info["components"]
    orders = [G2.groups[b].order for _, b in comps]
    first = P.A.pullback(prod, None, lambda c: comps[c][0], lambda c, g: g // orders[c])
    second = Q.A.pullback(prod, None, lambda c: comps[c][1], lambda c, g: g % orders[c])
    total = first.direct_sum(second)
    total.name = f"{P.A.name}+{Q.A.name}"
    return SquareZeroProduct(ParametrizedSpectrumData(total, P.shift, P.degrees), info["objects"], comps, first, second)


# -- heart membership ------------------------------------------------------------------------------


@dataclass
class HeartCertificate:
    granted: bool
    failures: list[tuple[int, int, str]]  # (object, degree, found group)
    checked_through: int


def fiber_concentration(fibers: dict[int, SimplicialSet], expected: dict[int, AbelianGroup], n: int,
                        D: int) -> HeartCertificate:
    """Fibers must have ``H_n = A(x)`` and no other positive homology below ``D``."""
    failures = []
    for x, F in sorted(fibers.items()):
        C = chains_of(F, D)
        for k in range(1, D):
            h = C.homology(k)
            want = expected[x] if k == n else AbelianGroup((), 0)
            if (h.torsion, h.rank) != (want.torsion, want.rank):
                failures.append((x, k, str(h)))
    return HeartCertificate(not failures, failures, D - 1)


def heart_membership(P: ParametrizedSpectrumData, D: int, model: str = "minimal",
                     degrees: tuple[int, ...] | None = None, budget: int | None = None) -> HeartCertificate:
    failures = []
    for n in degrees or P.degrees:
        K = P.member(n, D, model, budget)
        fibers = {x: K.fiber(x) for x in range(P.groupoid.n_objects())}
        expected = {x: P.A.fiber(x).group for x in fibers}
        cert = fiber_concentration(fibers, expected, n + P.shift, D)
        failures.extend(cert.failures)
    return HeartCertificate(not failures, failures, D - 1)
