"""Independent oracles: group (co)homology from the unnormalized bar resolution.

The module ``M = Z^r / R`` carries a right action ``v . g = rho[g] v`` with
``rho[g h] = rho[h] rho[g]`` (the convention of :class:`GroupoidModule`).
Cochains are arbitrary functions ``G^n -> M`` (no normalization), so nothing
here shares code with the simplicial cochain engine.
"""
from __future__ import annotations

from itertools import product as _product

from .chains import Presentation
from .groupoid import FiniteGroup
from .linalg import AbelianGroup, Matrix, matvec, subquotient_of, transpose

__all__ = ["bar_cohomology", "bar_homology", "bar_cohomology_of", "bar_homology_of"]


def _tuples(G: FiniteGroup, n: int) -> list[tuple[int, ...]]:
    return list(_product(G.elements(), repeat=n))


def _relation_columns(P: Presentation, blocks: int) -> Matrix:
    """Relations of ``M^blocks`` as ambient vectors."""
    r = P.ngens
    out = []
    for b in range(blocks):
        for rel in P.relations:
            v = [0] * (r * blocks)
            v[b * r: (b + 1) * r] = rel
            out.append(v)
    return out


def _add(vec: list[int], block: int, r: int, val: list[int], sign: int = 1) -> None:
    base = block * r
    for i, a in enumerate(val):
        vec[base + i] += sign * a


def _coboundary(G: FiniteGroup, left: dict[int, Matrix], r: int, n: int) -> Matrix:
    """``delta: C^n -> C^{n+1}`` as a ``(r |G|^{n+1}) x (r |G|^n)`` matrix."""
    src = {t: i for i, t in enumerate(_tuples(G, n))}
    dst = _tuples(G, n + 1)
    cols = []
    for t, j in src.items():
        for a in range(r):
            e = [int(i == a) for i in range(r)]
            col = [0] * (r * len(dst))
            for k, g in enumerate(dst):
                # (delta f)(g) = g1 f(g2..) + sum (-1)^i f(..g_i g_{i+1}..) + (-1)^{n+1} f(g1..gn)
                if g[1:] == t:
                    _add(col, k, r, matvec(left[g[0]], e))
                for i in range(1, n + 1):
                    merged = g[:i - 1] + (G.mul(g[i - 1], g[i]),) + g[i + 1:]
                    if merged == t:
                        _add(col, k, r, e, -1 if i % 2 else 1)
                if g[:-1] == t:
                    _add(col, k, r, e, -1 if (n + 1) % 2 else 1)
            cols.append(col)
    return transpose(cols, r * len(dst)) if cols else [[] for _ in range(r * len(dst))]


def _boundary(G: FiniteGroup, rho: dict[int, Matrix], r: int, n: int) -> Matrix:
    """``d: C_n -> C_{n-1}`` on ``M (x) Z[G^n]`` as a matrix."""
    dst = {t: i for i, t in enumerate(_tuples(G, n - 1))}
    src = _tuples(G, n)
    rows = r * len(dst)
    cols = []
    for g in src:
        for a in range(r):
            e = [int(i == a) for i in range(r)]
            col = [0] * rows
            # d(m [g1..gn]) = m.g1 [g2..] + sum (-1)^i m [..g_i g_{i+1}..] + (-1)^n m [g1..g_{n-1}]
            _add(col, dst[g[1:]], r, matvec(rho[g[0]], e))
            for i in range(1, n):
                merged = g[:i - 1] + (G.mul(g[i - 1], g[i]),) + g[i + 1:]
                _add(col, dst[merged], r, e, -1 if i % 2 else 1)
            _add(col, dst[g[:-1]], r, e, -1 if n % 2 else 1)
            cols.append(col)
    return transpose(cols, rows) if cols else [[] for _ in range(rows)]


def _columns(M: Matrix, ncols: int) -> Matrix:
    return [[M[i][j] for i in range(len(M))] for j in range(ncols)]


def bar_cohomology(G: FiniteGroup, rho: dict[int, Matrix], P: Presentation, n: int) -> AbelianGroup:
    """``H^n(G; M)`` from inhomogeneous cochains ``G^n -> M``."""
    r = P.ngens
    left = {g: rho[G.inverse(g)] for g in G.elements()}
    size = lambda k: r * G.order ** k
    delta = _coboundary(G, left, r, n)
    rel_next = _relation_columns(P, G.order ** (n + 1))
    rel_target = transpose(rel_next, size(n + 1)) if rel_next else None
    bounds = []
    if n >= 1:
        prev = _coboundary(G, left, r, n - 1)
        bounds = [c for c in _columns(prev, size(n - 1)) if any(c)]
    bounds += _relation_columns(P, G.order ** n)
    return subquotient_of(delta, size(n), bounds, rel_target).group


def bar_homology(G: FiniteGroup, rho: dict[int, Matrix], P: Presentation, n: int) -> AbelianGroup:
    """``H_n(G; M)`` from ``M (x) Z[G^n]``."""
    r = P.ngens
    size = lambda k: r * G.order ** k
    if n >= 1:
        d = _boundary(G, rho, r, n)
        rel_prev = _relation_columns(P, G.order ** (n - 1))
        rel_target = transpose(rel_prev, size(n - 1)) if rel_prev else None
    else:
        d, rel_target = [], None
    nxt = _boundary(G, rho, r, n + 1)
    bounds = [c for c in _columns(nxt, size(n + 1)) if any(c)]
    bounds += _relation_columns(P, G.order ** n)
    return subquotient_of(d, size(n), bounds, rel_target).group


def _one_object(A) -> tuple[FiniteGroup, dict[int, Matrix], Presentation]:
    if len(A.groupoid.groups) != 1:
        raise ValueError("the bar oracle needs a connected groupoid (a group)")
    return A.groupoid.groups[0], A.rho[0], A.fibers[0]


def bar_cohomology_of(A, n: int) -> AbelianGroup:
    """:func:`bar_cohomology` for a one-component :class:`GroupoidModule`."""
    return bar_cohomology(*_one_object(A), n)


def bar_homology_of(A, n: int) -> AbelianGroup:
    return bar_homology(*_one_object(A), n)
