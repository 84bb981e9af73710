"""Finite groups, finite groupoids and their nerves."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from .sset import LevelModel, Materialized, SimplicialError, materialize


class FiniteGroup:
    """Elements ``0..n-1`` with ``0`` the identity and a multiplication table."""

    def __init__(self, table: list[list[int]], labels: list[str] | None = None, name: str = ""):
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("group table must be square and nonempty")
        if table[0] != list(range(n)) or [row[0] for row in table] != list(range(n)):
            raise ValueError("element 0 must be the identity")
        self.table = [list(r) for r in table]
        self.order = n
        self.inv = [row.index(0) for row in table]
        self.labels = labels or [str(i) for i in range(n)]
        self.name = name

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def check(self) -> bool:
        t = self.table
        n = self.order
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n))

    def power(self, a: int, k: int) -> int:
        out = 0
        base = a if k >= 0 else self.inv[a]
        for _ in range(abs(k)):
            out = self.table[out][base]
        return out

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)], name=f"Z/{n}")

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls([[0]], name="1")

    @classmethod
    def from_elements(cls, elements: list, mul, name: str = "") -> "FiniteGroup":
        """Table from explicit elements (the first must be the identity)."""
        idx = {e: i for i, e in enumerate(elements)}
        return cls([[idx[mul(a, b)] for b in elements] for a in elements],
                   labels=[str(e) for e in elements], name=name)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        from itertools import permutations
        els = list(permutations(range(n)))
        return cls.from_elements(els, lambda p, q: tuple(p[q[i]] for i in range(n)), name=f"S{n}")

    def direct_product(self, other: "FiniteGroup") -> "FiniteGroup":
        els = list(iproduct(range(self.order), range(other.order)))
        return FiniteGroup.from_elements(els, lambda x, y: (self.mul(x[0], y[0]), other.mul(x[1], y[1])),
                                         name=f"{self.name}x{other.name}")

    def __repr__(self):
        return f"<FiniteGroup {self.name or ''} order={self.order}>"


@dataclass(frozen=True)
class Morphism:
    src: int
    elem: int
    dst: int


@dataclass
class FiniteGroupoid:
    """Connected components, each with one vertex group shared by all its objects.

    The morphisms ``u -> v`` between objects of one component are the elements
    of that component's group, composed as ``(u, g, v)(v, h, w) = (u, gh, w)``.
    """

    objects: list[int]
    component: list[int]
    groups: list[FiniteGroup]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.component) != len(self.objects):
            raise ValueError("component list must match objects")
        if any(not 0 <= c < len(self.groups) for c in self.component):
            raise ValueError("component index out of range")
        for g in self.groups:
            if not isinstance(g, FiniteGroup):
                raise SimplicialError("groupoid hom-sets must be finite groups")

    @classmethod
    def from_group(cls, G: FiniteGroup) -> "FiniteGroupoid":
        return cls([0], [0], [G])

    @classmethod
    def discrete(cls, n: int) -> "FiniteGroupoid":
        return cls(list(range(n)), list(range(n)), [FiniteGroup.trivial() for _ in range(n)])

    @classmethod
    def codiscrete(cls, n: int) -> "FiniteGroupoid":
        return cls(list(range(n)), [0] * n, [FiniteGroup.trivial()])

    def group_of(self, x: int) -> FiniteGroup:
        return self.groups[self.component[x]]

    def hom(self, u: int, v: int) -> list[Morphism]:
        if self.component[u] != self.component[v]:
            return []
        return [Morphism(u, g, v) for g in self.group_of(u).elements()]

    def compose(self, f: Morphism, g: Morphism) -> Morphism:
        """``f`` then ``g``."""
        if f.dst != g.src:
            raise ValueError("morphisms are not composable")
        return Morphism(f.src, self.group_of(f.src).mul(f.elem, g.elem), g.dst)

    def identity(self, x: int) -> Morphism:
        return Morphism(x, 0, x)

    def inverse(self, f: Morphism) -> Morphism:
        return Morphism(f.dst, self.group_of(f.src).inverse(f.elem), f.src)

    def n_objects(self) -> int:
        return len(self.objects)

    def product(self, other: "FiniteGroupoid") -> tuple["FiniteGroupoid", dict]:
        objs = list(iproduct(range(len(self.objects)), range(len(other.objects))))
        comps = list(iproduct(range(len(self.groups)), range(len(other.groups))))
        cidx = {c: i for i, c in enumerate(comps)}
        P = FiniteGroupoid(list(range(len(objs))), [cidx[(self.component[a], other.component[b])] for a, b in objs],
                           [self.groups[a].direct_product(other.groups[b]) for a, b in comps])
        return P, {"objects": objs, "components": comps}


class NerveModel(LevelModel):
    """k-simplices are ``(x0..xk, g1..gk)`` with ``g_i: x_{i-1} -> x_i``."""

    def __init__(self, G: FiniteGroupoid):
        self.G = G

    def level(self, k):
        G = self.G
        by_comp: dict[int, list[int]] = {}
        for x in range(G.n_objects()):
            by_comp.setdefault(G.component[x], []).append(x)
        for c, objs in sorted(by_comp.items()):
            grp = G.groups[c]
            for xs in iproduct(objs, repeat=k + 1):
                for gs in iproduct(range(grp.order), repeat=k):
                    if any(gs[i] == 0 and xs[i] == xs[i + 1] for i in range(k)):
                        continue
                    yield (xs, gs)

    def face(self, key, i):
        xs, gs = key
        k = len(gs)
        if i == 0:
            return (xs[1:], gs[1:])
        if i == k:
            return (xs[:-1], gs[:-1])
        grp = self.G.group_of(xs[0])
        return (xs[:i] + xs[i + 1:], gs[: i - 1] + (grp.mul(gs[i - 1], gs[i]),) + gs[i + 1:])

    def degeneracy(self, key, j):
        xs, gs = key
        return (xs[: j + 1] + xs[j:], gs[:j] + (0,) + gs[j:])


def nerve(G: FiniteGroupoid, D: int, budget: int | None = None) -> Materialized:
    """Nerve through dimension ``D``; keys are ``(objects, elements)`` chains."""
    out = materialize(NerveModel(G), D, budget, kan=True, truncated=True, name="N")
    out.groupoid = G
    return out


def nerve_of_group(G: FiniteGroup, D: int, budget: int | None = None) -> Materialized:
    return nerve(FiniteGroupoid.from_group(G), D, budget)
