"""Standard finite simplicial sets."""

from __future__ import annotations

from itertools import combinations

from .constructions import PointedSpaceModel, quotient, skeleton
from .sset import SimplicialSet, ident

RP2_TRIANGLES = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
                 (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]


def from_simplicial_complex(facets, name: str = "") -> SimplicialSet:
    """Ordered simplicial complex on integer vertices (each simplex sorted)."""
    simplices: set[tuple[int, ...]] = set()
    for f in facets:
        f = tuple(sorted(set(f)))
        for r in range(1, len(f) + 1):
            simplices.update(combinations(f, r))
    top = max(len(s) for s in simplices) - 1
    levels = [sorted(s for s in simplices if len(s) == k + 1) for k in range(top + 1)]
    index = [{s: i for i, s in enumerate(lvl)} for lvl in levels]
    faces = []
    for k, lvl in enumerate(levels):
        if k == 0:
            faces.append([() for _ in lvl])
            continue
        e = ident(k - 1)
        faces.append([tuple((e, index[k - 1][s[:i] + s[i + 1:]]) for i in range(k + 1)) for s in lvl])
    return SimplicialSet(faces, labels=[[str(s) for s in lvl] for lvl in levels], name=name)


def simplex(n: int) -> SimplicialSet:
    return from_simplicial_complex([tuple(range(n + 1))], name=f"D{n}")


def boundary(n: int) -> SimplicialSet:
    return skeleton(simplex(n), n - 1)


def point() -> SimplicialSet:
    return simplex(0)


def sphere(n: int) -> PointedSpaceModel:
    """``Delta^n / boundary``: one vertex and one nondegenerate n-simplex."""
    D = simplex(n)
    sub = {k: set(range(D.count(k))) for k in range(n)}
    P = quotient(D, sub, name=f"S{n}")
    return P


def circle() -> SimplicialSet:
    return sphere(1).sset


def rp2() -> SimplicialSet:
    """Six-vertex real projective plane (ordered)."""
    return from_simplicial_complex(RP2_TRIANGLES, name="RP2")


def torus() -> SimplicialSet:
    """Minimal triangulation with 7 vertices."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return from_simplicial_complex(tris, name="T2")


def pointed(X: SimplicialSet, basepoint: int = 0) -> PointedSpaceModel:
    return PointedSpaceModel(X, basepoint)
