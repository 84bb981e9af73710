"""JSON formats: simplicial sets, chain complexes, twisted products, categories, functors, tower bundles.

Loading reports malformed input as :class:`InputError` with a line or field
location.  Group-valued data (classes, coordinates) is written as decimal
strings so that arbitrary-size integers survive any JSON toolchain.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chains import ChainComplex, Presentation, TwistedCohomology
from .em import GroupoidModule
from .groupoid import FiniteGroup, FiniteGroupoid
from .sset import Simplex, SimplicialError, SimplicialMap, SimplicialSet, degeneracy_positions, eta_to_word, word_to_eta

__all__ = ["InputError", "load_json", "detect_kind", "load_sset", "builtin_sset", "BUILTIN_SPACES",
           "TwistedProductSpec", "category_to_json", "category_from_json", "functor_to_json", "functor_from_json",
           "TowerRecord", "tower_record", "simplex_to_json", "simplex_from_json"]


class InputError(ValueError):
    """Malformed input; the message carries the location."""


def load_json(path: str | Path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{p}: cannot read: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{p}: top level must be a JSON object")
    return data


def detect_kind(data: dict) -> str:
    kind = data.get("type")
    if kind is not None:
        if kind not in ("sset", "chain-complex", "twisted-product", "category", "functor", "cube", "tower"):
            raise InputError(f"field 'type': unknown kind {kind!r}")
        return kind
    if "builtin" in data:
        return "sset"
    if "faces" in data:
        return "sset"
    if "ranks" in data:
        return "chain-complex"
    raise InputError("cannot tell the input kind: expected 'type', 'faces', 'ranks' or 'builtin'")


def _field(data: dict, name: str, kind=int, default=None, where: str = ""):
    if name not in data:
        if default is None:
            raise InputError(f"{where}missing field {name!r}")
        return default
    try:
        return kind(data[name])
    except (TypeError, ValueError):
        raise InputError(f"{where}field {name!r}: expected {kind.__name__}, got {data[name]!r}") from None


# -- spaces ------------------------------------------------------------------------------------


def _builtins():
    from .constructions import product
    from .groupoid import nerve_of_group
    from .models import boundary, circle, point, rp2, simplex, sphere, torus

    return {
        "point": lambda D: point(),
        "circle": lambda D: circle(),
        "rp2": lambda D: rp2(),
        "torus": lambda D: torus(),
        "torus-min": lambda D: product(circle(), circle()).sset,
        "sphere2": lambda D: sphere(2).sset,
        "sphere3": lambda D: sphere(3).sset,
        "simplex2": lambda D: simplex(2),
        "boundary3": lambda D: boundary(3),
        "nerve-z2": lambda D: nerve_of_group(FiniteGroup.cyclic(2), D).sset,
        "nerve-z3": lambda D: nerve_of_group(FiniteGroup.cyclic(3), D).sset,
    }


BUILTIN_SPACES = sorted(_builtins())


def builtin_sset(name: str, D: int = 4) -> SimplicialSet:
    table = _builtins()
    if name not in table:
        raise InputError(f"field 'builtin': unknown space {name!r} (known: {', '.join(sorted(table))})")
    return table[name](D)


def load_sset(data: dict, D: int = 4) -> SimplicialSet:
    if "builtin" in data:
        return builtin_sset(str(data["builtin"]), D)
    try:
        return SimplicialSet.from_json(data)
    except SimplicialError as exc:
        raise InputError(f"field 'faces': {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"field 'faces': malformed entry ({exc})") from None


def load_chain_complex(data: dict) -> ChainComplex:
    try:
        C = ChainComplex.from_json(data)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    bad = C.check()
    if bad:
        raise InputError(f"field 'matrices': {bad[0]}")
    return C


# -- twisted products over nerves of cyclic groups ----------------------------------------------


@dataclass
class TwistedProductSpec:
    """``E_beta`` over ``N(Z/group)`` with fiber ``K(A, degree)``; ``A = Z/coefficients`` (0 means ``Z``)."""

    group: int
    coefficients: int
    action: str = "trivial"
    degree: int = 2
    beta: tuple[int, ...] = ()
    max_dim: int = 4
    name: str = "E"

    @classmethod
    def from_json(cls, data: dict) -> "TwistedProductSpec":
        w = "twisted-product: "
        group = _field(data, "group", int, where=w)
        coeff = _field(data, "coefficients", int, where=w)
        action = _field(data, "action", str, "trivial", where=w)
        if action not in ("trivial", "sign"):
            raise InputError(f"{w}field 'action': expected 'trivial' or 'sign', got {action!r}")
        if group < 1 or coeff < 0:
            raise InputError(f"{w}fields 'group'/'coefficients' must be positive (coefficients 0 means Z)")
        if action == "sign" and group % 2:
            raise InputError(f"{w}field 'action': the sign action needs an even group order")
        degree = _field(data, "degree", int, 2, where=w)
        if degree != 2:
            raise InputError(f"{w}field 'degree': only degree 2 fibers are supported")
        raw = data.get("beta", [])
        if not isinstance(raw, list):
            raise InputError(f"{w}field 'beta': expected a list of class coordinates")
        try:
            beta = tuple(int(c) for c in raw)
        except (TypeError, ValueError):
            raise InputError(f"{w}field 'beta': coordinates must be integers") from None
        return cls(group, coeff, action, degree, beta, _field(data, "max_dim", int, 4, where=w),
                   str(data.get("name", "E")))

    def to_json(self) -> dict:
        return {"type": "twisted-product", "group": self.group, "coefficients": self.coefficients,
                "action": self.action, "degree": self.degree, "beta": [str(c) for c in self.beta],
                "max_dim": self.max_dim, "name": self.name}

    def module(self) -> GroupoidModule:
        G = FiniteGroup.cyclic(self.group)
        P = Presentation.cyclic(self.coefficients)
        if self.action == "sign":
            return GroupoidModule.sign(G, lambda g: -1 if g % 2 else 1, P)
        return GroupoidModule.trivial(FiniteGroupoid.from_group(G), P)

    def build(self, D: int | None = None):
        """The :class:`TwistedProduct` and the cohomology group its class lives in."""
        from .tower import nerve_base, twisted_product

        A = self.module()
        base, _ = nerve_base(A, max(D or self.max_dim, 4))
        H = TwistedCohomology(base.Y, base.local_system(A), self.degree + 1)
        coords = self.beta or tuple(0 for _ in H.moduli)
        if len(coords) != len(H.moduli):
            raise InputError(f"twisted-product: field 'beta': H^{self.degree + 1} = {H.group} needs "
                             f"{len(H.moduli)} coordinates, got {len(coords)}")
        rep = H.representative(tuple(c % m if m else c for c, m in zip(coords, H.moduli)))
        return twisted_product(base, A, self.degree, rep.cocycle, self.name), H


# -- simplices and categories -------------------------------------------------------------------


def simplex_to_json(s: Simplex) -> list:
    return [eta_to_word(s[0]), s[1]]


def simplex_from_json(rec, k: int, X: SimplicialSet, where: str) -> Simplex:
    if not (isinstance(rec, list) and len(rec) == 2 and isinstance(rec[0], list)):
        raise InputError(f"{where}: expected [degeneracy word, id]")
    try:
        eta = word_to_eta([int(w) for w in rec[0]], k)
        y = int(rec[1])
    except (SimplicialError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None
    m = eta[-1]
    if not 0 <= y < X.count(m):
        raise InputError(f"{where}: no nondegenerate {m}-simplex {y}")
    return (eta, y)


def _generic_pairs(G: SimplicialSet, F: SimplicialSet, k: int):
    """Pairs of ``k``-simplices with no common degeneracy position."""
    for g in G.full_level(k):
        dg = degeneracy_positions(g[0])
        for f in F.full_level(k):
            if not dg & degeneracy_positions(f[0]):
                yield g, f


def category_to_json(C, upto: int | None = None) -> dict:
    """Composition tables on pairs without a common degeneracy, through level ``upto``."""
    top = min(C.D, upto if upto is not None else C.D)
    homs = [{"source": x, "target": y, "sset": C.hom(x, y).restricted(top).to_json()}
            for (x, y) in C.pairs()]
    comp = []
    for x in range(C.n):
        for y in range(C.n):
            for z in range(C.n):
                rows = []
                for k in range(top + 1):
                    for g, f in _generic_pairs(C.hom(y, z), C.hom(x, y), k):
                        rows.append([k, simplex_to_json(g), simplex_to_json(f),
                                     simplex_to_json(C.compose(x, y, z, g, f))])
                comp.append({"objects": [x, y, z], "table": rows})
    return {"type": "category", "name": C.name, "objects": list(C.objects), "max_dim": top,
            "identities": list(C.ids), "homs": homs, "composition": comp}


def category_from_json(data: dict):
    from .enriched import SimplicialCategory

    w = "category: "
    objects = data.get("objects")
    if not isinstance(objects, list) or not objects:
        raise InputError(f"{w}field 'objects': expected a nonempty list")
    n = len(objects)
    D = _field(data, "max_dim", int, where=w)
    homs: dict[tuple[int, int], SimplicialSet] = {}
    for i, rec in enumerate(data.get("homs", [])):
        try:
            x, y = int(rec["source"]), int(rec["target"])
            X = SimplicialSet.from_json(rec["sset"])
        except (KeyError, TypeError, ValueError, SimplicialError) as exc:
            raise InputError(f"{w}homs[{i}]: {exc}") from None
        if not (0 <= x < n and 0 <= y < n):
            raise InputError(f"{w}homs[{i}]: object out of range")
        X.max_dim, X.truncated = D, True
        homs[(x, y)] = X
    missing = [(x, y) for x in range(n) for y in range(n) if (x, y) not in homs]
    if missing:
        raise InputError(f"{w}field 'homs': no hom for {missing[0]}")
    ids = data.get("identities")
    if not isinstance(ids, list) or len(ids) != n:
        raise InputError(f"{w}field 'identities': expected one vertex per object")
    for x, v in enumerate(ids):
        if not 0 <= int(v) < homs[(x, x)].count(0):
            raise InputError(f"{w}identities[{x}]: no vertex {v} in Map({x},{x})")
    tables: dict[tuple[int, int, int], dict] = {}
    for i, rec in enumerate(data.get("composition", [])):
        try:
            x, y, z = (int(o) for o in rec["objects"])
            rows = rec["table"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{w}composition[{i}]: {exc}") from None
        t = {}
        for r, row in enumerate(rows):
            where = f"{w}composition[{i}].table[{r}]"
            if not (isinstance(row, list) and len(row) == 4):
                raise InputError(f"{where}: expected [k, g, f, g.f]")
            k = int(row[0])
            g = simplex_from_json(row[1], k, homs[(y, z)], where + " g")
            f = simplex_from_json(row[2], k, homs[(x, y)], where + " f")
            t[(g, f)] = simplex_from_json(row[3], k, homs[(x, z)], where + " g.f")
        tables[(x, y, z)] = t

    def compose(x, y, z, g, f):
        common = degeneracy_positions(g[0]) & degeneracy_positions(f[0])
        if common:
            j = min(common)
            G, F, H = homs[(y, z)], homs[(x, y)], homs[(x, z)]
            return H.degeneracy(C.compose(x, y, z, G.face(g, j), F.face(f, j)), j)
        try:
            return tables[(x, y, z)][(g, f)]
        except KeyError:
            raise InputError(f"{w}composition table for {(x, y, z)} has no entry for {g} . {f}") from None

    C = SimplicialCategory([str(o) for o in objects], homs, compose, [int(v) for v in ids], D,
                           str(data.get("name", "")))
    return C


def functor_to_json(F, upto: int | None = None) -> dict:
    """Images of nondegenerate simplices per hom; source and target embedded as categories."""
    top = min(F.source.D, F.target.D, upto if upto is not None else F.source.D)
    homs = []
    for (x, y), phi in sorted(F.on_homs.items()):
        X = F.source.hom(x, y)
        imgs = [[simplex_to_json(phi(X.nd(k, i))) for i in range(X.count(k))] for k in range(min(top, X.top_dim) + 1)]
        homs.append({"source": x, "target": y, "images": imgs})
    return {"type": "functor", "name": F.name, "source": category_to_json(F.source, top),
            "target": category_to_json(F.target, top), "objects": list(F.on_objects), "homs": homs}


def functor_from_json(data: dict):
    from .enriched import SimplicialFunctor

    w = "functor: "
    if "source" not in data or "target" not in data:
        raise InputError(f"{w}needs 'source' and 'target' categories")
    C, E = category_from_json(data["source"]), category_from_json(data["target"])
    objs = data.get("objects")
    if not isinstance(objs, list) or len(objs) != C.n or any(not 0 <= int(o) < E.n for o in objs):
        raise InputError(f"{w}field 'objects': expected one target object per source object")
    objs = [int(o) for o in objs]
    on_homs = {}
    for i, rec in enumerate(data.get("homs", [])):
        x, y = int(rec["source"]), int(rec["target"])
        X, Y = C.hom(x, y), E.hom(objs[x], objs[y])
        images = []
        for k, lvl in enumerate(rec.get("images", [])):
            if len(lvl) != X.count(k):
                raise InputError(f"{w}homs[{i}].images[{k}]: expected {X.count(k)} images")
            images.append([simplex_from_json(r, k, Y, f"{w}homs[{i}].images[{k}][{j}]") for j, r in enumerate(lvl)])
        on_homs[(x, y)] = SimplicialMap(X, Y, images, f"F{(x, y)}")
    if len(on_homs) != C.n * C.n:
        raise InputError(f"{w}field 'homs': expected a map for every pair of objects")
    return SimplicialFunctor(C, E, objs, on_homs, str(data.get("name", "F")))


# -- tower bundles ----------------------------------------------------------------------------


@dataclass
class TowerRecord:
    """The serializable part of a tower: stages, ledger and k-invariant classes."""

    kind: str
    top: int
    stages: dict[int, dict]
    ledger: list[dict]
    kinvariants: dict[int, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"type": "tower", "kind": self.kind, "top": self.top,
                "stages": {str(a): s for a, s in sorted(self.stages.items())},
                "ledger": self.ledger,
                "kinvariants": {str(a): k for a, k in sorted(self.kinvariants.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "TowerRecord":
        try:
            return cls(str(data["kind"]), int(data["top"]), {int(a): s for a, s in data["stages"].items()},
                       list(data["ledger"]), {int(a): k for a, k in data.get("kinvariants", {}).items()})
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"tower: malformed bundle ({exc})") from None

    def stage(self, a: int):
        s = self.stages[a]
        return ChainComplex.from_json(s) if self.kind == "chain" else SimplicialSet.from_json(s)


def tower_record(T) -> TowerRecord:
    stages = {a: P.to_json() for a, P in T.stages.items()}
    ledger = [{"stage": e.stage, "item": e.item, "level": e.level, "ok": e.ok, "detail": e.detail}
              for e in T.ledger]
    kinv = {a: {"class": [str(c) for c in k.coords], "group": str(k.cohomology.group),
                "certification": k.certification} for a, k in T.kinvariants.items()}
    return TowerRecord(T.kind, max(T.stages) if T.stages else 0, stages, ledger, kinv)
