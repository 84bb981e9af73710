"""Fundamental groupoids, finiteness certificates, universal covers."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .groupoid import FiniteGroup, FiniteGroupoid, nerve
from .sset import Materialized, Simplex, SimplicialError, SimplicialMap, SimplicialSet, compose_eta, ident
from .todd_coxeter import EnumerationExhausted, enumerate_cosets, free_reduce, simplify


class NotCertified(RuntimeError):
    """Fundamental group finiteness was not certified within the bound."""


def components(X: SimplicialSet) -> list[int]:
    """Component label (smallest vertex) per vertex."""
    parent = list(range(X.count(0)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for fs in X.faces[1] if X.top_dim >= 1 else []:
        a, b = find(fs[0][1]), find(fs[1][1])
        if a != b:
            parent[max(a, b)] = min(a, b)
    return [find(v) for v in range(X.count(0))]


@dataclass
class FundamentalGroupoid:
    """Edge-path presentation of the fundamental groupoid of ``X``.

    Generator ``e`` is the nondegenerate edge ``e`` from ``d1 e`` to ``d0 e``.
    A triangle ``t`` gives ``d1 t = d2 t . d0 t`` (first ``d2 t``, then ``d0 t``).
    Words are lists of signed letters ``+-(e+1)``.
    """

    X: SimplicialSet
    sources: list[int]
    targets: list[int]
    relations: list[tuple[list[int], list[int]]]
    component: list[int]
    roots: list[int]
    tree_path: list[list[int]]          # word from the component root to each vertex
    # filled by certify_finite
    group: list[FiniteGroup] = field(default_factory=list)
    edge_element: list[int] = field(default_factory=list)
    element_words: list[list[list[int]]] = field(default_factory=list)
    bound: int | None = None

    @property
    def certified(self) -> bool:
        return bool(self.group)

    def n_objects(self) -> int:
        return len(self.component)

    def comp_index(self, v: int) -> int:
        return self.roots.index(self.component[v])

    def edge_word(self, s: Simplex) -> list[int]:
        """Generator word of a (possibly degenerate) edge."""
        eta, y = s
        return [] if eta[-1] == 0 else [y + 1]

    def loop_relators(self) -> dict[int, list[list[int]]]:
        """Relators per component, as loops at the root through the spanning tree."""
        out: dict[int, list[list[int]]] = {r: [] for r in self.roots}
        for lhs, rhs in self.relations:
            if not lhs and not rhs:
                continue
            v = self._start(lhs or rhs)
            w = self.tree_path[v] + lhs + [-a for a in reversed(rhs)] + [-a for a in reversed(self.tree_path[v])]
            out[self.component[v]].append(free_reduce(w))
        return out

    def _start(self, word: list[int]) -> int:
        a = word[0]
        return self.sources[a - 1] if a > 0 else self.targets[-a - 1]

    def word_element(self, word: list[int]) -> int:
        """Group element (at the component root) of an edge word, via the tree."""
        if not self.certified:
            raise NotCertified("groupoid not certified")
        if not word:
            return 0
        v = self._start(word)
        G = self.group[self.comp_index(v)]
        g = 0
        for a in word:
            e = abs(a) - 1
            m = self.edge_element[e]
            g = G.mul(g, m if a > 0 else G.inverse(m))
        return g

    def edge_class(self, s: Simplex) -> int:
        """Group element of an edge simplex (0 for degenerate edges)."""
        eta, y = s
        return 0 if eta[-1] == 0 else self.edge_element[y]

    def as_finite_groupoid(self) -> FiniteGroupoid:
        if not self.certified:
            raise NotCertified("groupoid not certified")
        return FiniteGroupoid(list(range(self.n_objects())), [self.comp_index(v) for v in range(self.n_objects())],
                              list(self.group))

    def to_json(self) -> dict:
        out = {"objects": list(range(self.n_objects())),
               "component": [self.comp_index(v) for v in range(self.n_objects())],
               "generators": [[s, t] for s, t in zip(self.sources, self.targets)],
               "relations": [[l, r] for l, r in self.relations]}
        if self.certified:
            out["groups"] = [{"order": G.order, "table": G.table, "elements": ws}
                             for G, ws in zip(self.group, self.element_words)]
            out["edge_elements"] = self.edge_element
        return out


def fundamental_groupoid(X: SimplicialSet) -> FundamentalGroupoid:
    if X.max_dim < 2 and X.truncated:
        raise SimplicialError("fundamental groupoid needs data through dimension 2")
    nv = X.count(0)
    edges = X.faces[1] if X.top_dim >= 1 else []
    sources = [fs[1][1] for fs in edges]
    targets = [fs[0][1] for fs in edges]
    relations = []
    for fs in (X.faces[2] if X.top_dim >= 2 else []):
        d0, d1, d2 = fs
        e = lambda s: [] if s[0][-1] == 0 else [s[1] + 1]
        relations.append((e(d1), e(d2) + e(d0)))
    comp = components(X)
    roots = sorted(set(comp))
    tree: list[list[int] | None] = [None] * nv
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for i, (s, t) in enumerate(zip(sources, targets)):
        adj[s].append((t, i + 1))
        adj[t].append((s, -(i + 1)))
    for r in roots:
        tree[r] = []
        q = deque([r])
        while q:
            u = q.popleft()
            for v, a in adj[u]:
                if tree[v] is None:
                    tree[v] = tree[u] + [a]
                    q.append(v)
    return FundamentalGroupoid(X, sources, targets, relations, comp, roots, tree)


def certify_finite(P: FundamentalGroupoid, bound: int, workspace: int | None = None) -> FundamentalGroupoid:
    """Attach finite vertex-group tables of order at most ``bound``.

    Raises :class:`NotCertified` when the enumeration does not close within
    its workspace or the group is larger than ``bound``.
    """
    ws = workspace if workspace is not None else max(64 * bound, 2048)
    nE = len(P.sources)
    groups: list[FiniteGroup] = []
    words_per: list[list[list[int]]] = []
    edge_element = [0] * nE
    tree_edges = {abs(a) for w in P.tree_path for a in w}
    rels = P.loop_relators()
    for r in P.roots:
        comp_edges = [e for e in range(nE) if P.component[P.sources[e]] == r]
        # loop generator for each edge: tree(s) e tree(t)^-1 ; tree edges are trivial
        gens = [e for e in comp_edges if e + 1 not in tree_edges]
        gpos = {e: i + 1 for i, e in enumerate(gens)}

        def rewrite(word):
            out = []
            for a in word:
                e = abs(a) - 1
                if e in gpos:
                    out.append(gpos[e] if a > 0 else -gpos[e])
            return out

        relators = [rewrite(w) for w in rels[r]]
        alive, red, subst = simplify(len(gens), relators)
        apos = {g: i + 1 for i, g in enumerate(alive)}

        def to_alive(letter):
            g = abs(letter)
            w = [apos[g]] if g in apos else [(apos[abs(b)] if b > 0 else -apos[abs(b)]) for b in subst[g]]
            return w if letter > 0 else [-b for b in reversed(w)]

        red_alive = [[b for a in w for b in to_alive(a)] for w in red]
        try:
            table = enumerate_cosets(len(alive), red_alive, ws)
        except EnumerationExhausted:
            raise NotCertified(f"not certified within bound {bound} (coset enumeration exhausted)") from None
        order = len(table)
        if order > bound:
            raise NotCertified(f"not certified within bound {bound} (group order {order})")
        # element c <-> coset c; word to reach it by BFS
        reach: list[list[int] | None] = [None] * order
        reach[0] = []
        q = deque([0])
        while q:
            c = q.popleft()
            for x in range(2 * len(alive)):
                d = table[c][x]
                if reach[d] is None:
                    reach[d] = reach[c] + [(x // 2 + 1) * (1 if x % 2 == 0 else -1)]
                    q.append(d)

        def act(c, word):
            for a in word:
                c = table[c][2 * (a - 1) if a > 0 else 2 * (-a - 1) + 1]
            return c

        mul = [[act(a, reach[b]) for b in range(order)] for a in range(order)]
        G = FiniteGroup(mul, name=f"pi1({r})")
        groups.append(G)
        inv_alive = {i + 1: g for i, g in enumerate(alive)}
        inv_gpos = {i: e for e, i in gpos.items()}
        words_per.append([[(inv_gpos[inv_alive[abs(a)]] + 1) * (1 if a > 0 else -1) for a in reach[c]]
                          for c in range(order)])
        for e in comp_edges:
            edge_element[e] = act(0, to_alive(gpos[e])) if e in gpos else 0
    P.group = groups
    P.edge_element = edge_element
    P.element_words = words_per
    P.bound = bound
    return P


def pi1_at(P: FundamentalGroupoid, v: int) -> FiniteGroup:
    return P.group[P.comp_index(v)]


# -- universal cover ------------------------------------------------------------


@dataclass
class CoverData:
    """Universal cover of the component of ``base``.

    The lift ``(s, g)`` of a simplex ``s`` starts at the point over its first
    vertex labelled ``g``; ``d_0`` moves the label by the class of the first edge.
    """

    sset: SimplicialSet
    projection: SimplicialMap
    group: FiniteGroup
    groupoid: FundamentalGroupoid
    base: int
    index: list[dict[int, int]]       # per dim: X nondegenerate id -> dense component id
    ids: list[list[int]]              # per dim: dense component id -> X id

    def lift(self, s: Simplex, g: int) -> Simplex:
        eta, y = s
        m = eta[-1]
        return (eta, self.index[m][y] * self.group.order + g)

    def point(self, v: int, g: int) -> int:
        return self.index[0][v] * self.group.order + g

    def unlift(self, s: Simplex) -> tuple[Simplex, int]:
        eta, z = s
        m = eta[-1]
        q, g = divmod(z, self.group.order)
        return (eta, self.ids[m][q]), g

    def deck(self, h: int) -> SimplicialMap:
        G = self.group
        images = []
        for k in range(self.sset.top_dim + 1):
            row = []
            for z in range(self.sset.count(k)):
                q, g = divmod(z, G.order)
                row.append((ident(k), q * G.order + G.mul(h, g)))
            images.append(row)
        return SimplicialMap(self.sset, self.sset, images, f"deck{h}")

    def deck_on_chain_index(self, k: int, z: int, h: int) -> int:
        q, g = divmod(z, self.group.order)
        return q * self.group.order + self.group.mul(h, g)


def universal_cover(X: SimplicialSet, P: FundamentalGroupoid, base: int = 0) -> CoverData:
    if not P.certified:
        raise NotCertified("universal cover needs a certified fundamental groupoid")
    comp = P.component[base]
    G = P.group[P.comp_index(base)]
    n = G.order
    index: list[dict[int, int]] = []
    ids: list[list[int]] = []
    for k in range(X.top_dim + 1):
        keep = [x for x in range(X.count(k)) if P.component[X.base_vertex(X.nd(k, x))] == comp]
        ids.append(keep)
        index.append({x: i for i, x in enumerate(keep)})
    faces = []
    for k in range(X.top_dim + 1):
        level = []
        for x in ids[k]:
            fs = X.faces[k][x]
            for g in range(n):
                if k == 0:
                    level.append(())
                    continue
                g0 = G.mul(g, P.edge_class(X.edge(X.nd(k, x), 0, 1)))
                out = []
                for i, (eta, y) in enumerate(fs):
                    lab = g0 if i == 0 else g
                    out.append((eta, index[eta[-1]][y] * n + lab))
                level.append(tuple(out))
        faces.append(level)
    Xt = SimplicialSet(faces, max_dim=X.max_dim, kan=X.kan, truncated=X.truncated, name=f"~{X.name}")
    proj = SimplicialMap(Xt, X, [[(ident(k), ids[k][z // n]) for z in range(len(faces[k]))]
                                 for k in range(len(faces))], "cover")
    return CoverData(Xt, proj, G, P, base, index, ids)


# -- classifying map --------------------------------------------------------------


@dataclass
class Classifying:
    nerve: Materialized
    map: SimplicialMap
    groupoid: FiniteGroupoid


def chain_of(X: SimplicialSet, P: FundamentalGroupoid, s: Simplex) -> tuple:
    """Nerve key ``(vertices, edge classes)`` of a simplex."""
    vs = X.vertices(s)
    k = len(vs) - 1
    return (vs, tuple(P.edge_class(X.edge(s, i, i + 1)) for i in range(k)))


def classifying_map(X: SimplicialSet, P: FundamentalGroupoid, D: int | None = None,
                    budget: int | None = None) -> Classifying:
    if not P.certified:
        raise NotCertified("classifying map needs a certified fundamental groupoid")
    D = X.max_dim if D is None else D
    G = P.as_finite_groupoid()
    N = nerve(G, D, budget)
    images = [[N.nf[chain_of(X, P, s)] for s in X.nondegenerate(k)] for k in range(min(D, X.top_dim) + 1)]
    return Classifying(N, SimplicialMap(X, N.sset, images, "classify"), G)


def groupoid_json(P: FundamentalGroupoid) -> str:
    return json.dumps(P.to_json())
