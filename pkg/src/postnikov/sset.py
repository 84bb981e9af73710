"""Finite simplicial sets in Eilenberg-Zilber normal form.

A simplex is a pair ``(eta, x)``: ``x`` indexes a nondegenerate simplex of
dimension ``m`` and ``eta`` is a monotone surjection ``[k] -> [m]`` stored as a
tuple of length ``k + 1``.  Nondegenerate simplices carry ``eta = (0, 1, ..., m)``.
Every operator is applied through :meth:`SimplicialSet.act`, which takes a
monotone map ``theta: [j] -> [k]`` (a tuple) and returns the normal form of
``sigma . theta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Iterable

Simplex = tuple[tuple[int, ...], int]


class BudgetExceeded(RuntimeError):
    """An enumeration went past its simplex budget or dimension bound."""


class SimplicialError(ValueError):
    pass


def ident(m: int) -> tuple[int, ...]:
    return tuple(range(m + 1))


def coface(n: int, i: int) -> tuple[int, ...]:
    """The injection ``[n-1] -> [n]`` skipping ``i``."""
    return tuple(j for j in range(n + 1) if j != i)


def codegeneracy(n: int, j: int) -> tuple[int, ...]:
    """The surjection ``[n+1] -> [n]`` hitting ``j`` twice."""
    return tuple(i if i <= j else i - 1 for i in range(n + 2))


def surjections(k: int, m: int):
    """All monotone surjections ``[k] -> [m]``."""
    for jumps in combinations(range(1, k + 1), m):
        out = [0] * (k + 1)
        level = 0
        js = set(jumps)
        for i in range(1, k + 1):
            if i in js:
                level += 1
            out[i] = level
        yield tuple(out)


def degeneracy_positions(eta: tuple[int, ...]) -> frozenset[int]:
    return frozenset(j for j in range(len(eta) - 1) if eta[j] == eta[j + 1])


def eta_to_word(eta: tuple[int, ...]) -> list[int]:
    return sorted(degeneracy_positions(eta), reverse=True)


def word_to_eta(word: list[int], k: int) -> tuple[int, ...]:
    """Surjection of ``s_{j1} ... s_{jr}`` (``j1 > ... > jr``) landing in dimension ``k``."""
    if any(a <= b for a, b in zip(word, word[1:])):
        raise SimplicialError(f"degeneracy word {word} is not strictly decreasing")
    m = k - len(word)
    if m < 0 or any(j < 0 or j >= k for j in word):
        raise SimplicialError(f"degeneracy word {word} out of range for dimension {k}")
    eta = ident(m)
    d = m
    for j in reversed(word):
        if j > d:
            raise SimplicialError(f"degeneracy word {word} is not canonical")
        eta = tuple(eta[i if i <= j else i - 1] for i in range(d + 2))
        d += 1
    return eta


def compose_eta(eta: tuple[int, ...], theta: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(eta[t] for t in theta)


@dataclass
class Violation:
    kind: str
    dim: int
    simplex: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at dim {self.dim} simplex {self.simplex}: {self.detail}"


class SimplicialSet:
    """Nondegenerate simplices plus face references in normal form.

    ``faces[k][x]`` holds the ``k + 1`` faces of the ``x``-th nondegenerate
    ``k``-simplex.  Data is known through ``max_dim``; when ``truncated`` is
    false the set has no nondegenerate simplices above ``max_dim`` at all.
    """

    def __init__(self, faces: list[list[tuple[Simplex, ...]]], max_dim: int | None = None,
                 kan: bool = False, truncated: bool = False, labels: list[list[Any]] | None = None,
                 name: str = ""):
        self.faces = [list(level) for level in faces]
        while len(self.faces) > 1 and not self.faces[-1] and (max_dim is None or len(self.faces) - 1 > max_dim):
            self.faces.pop()
        top = len(self.faces) - 1
        self.max_dim = top if max_dim is None else max_dim
        if self.max_dim < top:
            raise SimplicialError("max_dim below the top stored dimension")
        self.kan = kan
        self.truncated = truncated
        self.labels = labels
        self.name = name
        self._inj_cache: dict = {}

    # -- basic queries -------------------------------------------------------

    @property
    def top_dim(self) -> int:
        return len(self.faces) - 1

    def count(self, k: int) -> int:
        return len(self.faces[k]) if 0 <= k < len(self.faces) else 0

    def counts(self, upto: int | None = None) -> list[int]:
        d = self.max_dim if upto is None else upto
        return [self.count(k) for k in range(d + 1)]

    def known(self, k: int) -> bool:
        return k <= self.max_dim or not self.truncated

    def nd(self, k: int, x: int) -> Simplex:
        return (ident(k), x)

    def nondegenerate(self, k: int) -> list[Simplex]:
        e = ident(k)
        return [(e, x) for x in range(self.count(k))]

    def full_level(self, k: int) -> list[Simplex]:
        """Every ``k``-simplex, degenerate ones included."""
        out = []
        for m in range(min(k, self.top_dim) + 1):
            n = self.count(m)
            if not n:
                continue
            for eta in surjections(k, m):
                out.extend((eta, x) for x in range(n))
        return out

    def total_nondegenerate(self) -> int:
        return sum(len(level) for level in self.faces)

    # -- simplicial operators ------------------------------------------------

    def act(self, s: Simplex, theta: tuple[int, ...]) -> Simplex:
        eta, x = s
        comp = compose_eta(eta, theta)
        m = eta[-1]
        img = sorted(set(comp))
        if len(img) == m + 1:
            return (comp, x)
        pos = {v: i for i, v in enumerate(img)}
        sigma = tuple(pos[c] for c in comp)
        eta_y, y = self._face_inj(m, x, tuple(img))
        return (compose_eta(eta_y, sigma), y)

    def _face_inj(self, m: int, x: int, img: tuple[int, ...]) -> Simplex:
        key = (m, x, img)
        hit = self._inj_cache.get(key)
        if hit is not None:
            return hit
        missing = max(i for i in range(m + 1) if i not in img)
        f = self.faces[m][x][missing]
        theta = tuple(v if v < missing else v - 1 for v in img)
        out = self.act(f, theta)
        self._inj_cache[key] = out
        return out

    def face(self, s: Simplex, i: int) -> Simplex:
        return self.act(s, coface(len(s[0]) - 1, i))

    def degeneracy(self, s: Simplex, j: int) -> Simplex:
        return self.act(s, codegeneracy(len(s[0]) - 1, j))

    def vertices(self, s: Simplex) -> tuple[int, ...]:
        return tuple(self.act(s, (j,))[1] for j in range(len(s[0])))

    def edge(self, s: Simplex, a: int, b: int) -> Simplex:
        return self.act(s, (a, b))

    @staticmethod
    def dim(s: Simplex) -> int:
        return len(s[0]) - 1

    @staticmethod
    def is_degenerate(s: Simplex) -> bool:
        return len(s[0]) - 1 != s[0][-1]

    def base_vertex(self, s: Simplex) -> int:
        return self.act(s, (0,))[1]

    # -- misc ----------------------------------------------------------------

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<SimplicialSet{tag} counts={self.counts()} max_dim={self.max_dim}>"

    def summary(self) -> dict:
        return {"name": self.name, "counts": self.counts(), "max_dim": self.max_dim,
                "kan": self.kan, "truncated": self.truncated}

    def restricted(self, upto: int) -> "SimplicialSet":
        """Forget data above ``upto`` (the result is truncated)."""
        return SimplicialSet(self.faces[: upto + 1], max_dim=upto, kan=False,
                             truncated=self.truncated or upto < self.top_dim,
                             labels=self.labels[: upto + 1] if self.labels else None,
                             name=self.name)

    # -- interchange ---------------------------------------------------------

    def to_json(self) -> dict:
        dims = []
        faces = []
        for k, level in enumerate(self.faces):
            dims.append(list(range(len(level))) if not self.labels else [str(l) for l in self.labels[k]])
            faces.append([[[eta_to_word(f[0]), f[1]] for f in fs] for fs in level])
        return {"dims": dims, "faces": faces, "max_dim": self.max_dim, "kan": self.kan,
                "truncated": self.truncated, "name": self.name}

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialSet":
        if not isinstance(data, dict) or "faces" not in data:
            raise SimplicialError("simplicial set JSON needs a 'faces' field")
        raw = data["faces"]
        faces: list[list[tuple[Simplex, ...]]] = []
        for k, level in enumerate(raw):
            out_level = []
            for idx, fs in enumerate(level):
                if len(fs) != (k + 1 if k else 0):
                    raise SimplicialError(f"faces[{k}][{idx}]: expected {k + 1 if k else 0} faces, got {len(fs)}")
                refs = []
                for i, rec in enumerate(fs):
                    if not (isinstance(rec, list) and len(rec) == 2):
                        raise SimplicialError(f"faces[{k}][{idx}][{i}]: expected [deg_word, target]")
                    word, target = rec
                    try:
                        eta = word_to_eta([int(w) for w in word], k - 1)
                    except SimplicialError as exc:
                        raise SimplicialError(f"faces[{k}][{idx}][{i}]: {exc}") from None
                    m = eta[-1]
                    if not (0 <= int(target) < len(raw[m]) if m < len(raw) else False):
                        raise SimplicialError(f"faces[{k}][{idx}][{i}]: target {target} missing in dim {m}")
                    refs.append((eta, int(target)))
                out_level.append(tuple(refs))
            faces.append(out_level)
        labels = None
        if "dims" in data and any(isinstance(x, str) for lvl in data["dims"] for x in lvl):
            labels = [list(lvl) for lvl in data["dims"]]
        return cls(faces, max_dim=data.get("max_dim"), kan=bool(data.get("kan", False)),
                   truncated=bool(data.get("truncated", False)), labels=labels,
                   name=data.get("name", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def presentation(self) -> tuple:
        """Hashable canonical form of the stored data (for equality checks)."""
        return (tuple(tuple(level) for level in self.faces), self.max_dim)


# -- validation --------------------------------------------------------------


def validate(X: SimplicialSet) -> list[Violation]:
    """Every violated structural condition or simplicial identity."""
    report: list[Violation] = []
    for k, level in enumerate(X.faces):
        for x, fs in enumerate(level):
            if k == 0:
                if fs:
                    report.append(Violation("arity", 0, x, "vertex with faces"))
                continue
            if len(fs) != k + 1:
                report.append(Violation("arity", k, x, f"{len(fs)} faces"))
                continue
            for i, (eta, y) in enumerate(fs):
                m = eta[-1] if eta else -1
                ok = (len(eta) == k and eta[0] == 0 and all(b - a in (0, 1) for a, b in zip(eta, eta[1:]))
                      and 0 <= y < X.count(m))
                if not ok:
                    report.append(Violation("face-reference", k, x, f"face {i} = {(eta, y)}"))
    if report:
        return report
    for k in range(2, X.top_dim + 1):
        for x in range(X.count(k)):
            s = X.nd(k, x)
            fs = [X.face(s, i) for i in range(k + 1)]
            for j in range(1, k + 1):
                for i in range(j):
                    lhs = X.face(fs[j], i)
                    rhs = X.face(fs[i], j - 1)
                    if lhs != rhs:
                        report.append(Violation("identity", k, x, f"d{i} d{j} != d{j - 1} d{i}"))
    return report


# -- maps --------------------------------------------------------------------


class SimplicialMap:
    """Images of nondegenerate domain simplices, in codomain normal form."""

    def __init__(self, domain: SimplicialSet, codomain: SimplicialSet, images: list[list[Simplex]],
                 name: str = ""):
        self.domain = domain
        self.codomain = codomain
        self.images = images
        self.name = name

    def __call__(self, s: Simplex) -> Simplex:
        eta, x = s
        img_eta, y = self.images[eta[-1]][x]
        return (compose_eta(img_eta, eta), y)

    def on_vertex(self, v: int) -> int:
        return self.images[0][v][1]

    @classmethod
    def from_function(cls, domain: SimplicialSet, codomain: SimplicialSet,
                      fn: Callable[[Simplex], Simplex], upto: int | None = None, name: str = ""):
        d = domain.max_dim if upto is None else upto
        images = [[fn(s) for s in domain.nondegenerate(k)] for k in range(min(d, domain.top_dim) + 1)]
        return cls(domain, codomain, images, name)

    def validate(self, upto: int | None = None) -> list[Violation]:
        d = min(self.domain.max_dim, self.codomain.max_dim) if upto is None else upto
        report = []
        for k in range(min(d, self.domain.top_dim) + 1):
            for x in range(self.domain.count(k)):
                img = self.images[k][x]
                if len(img[0]) != k + 1:
                    report.append(Violation("map-dimension", k, x, f"image {img}"))
                    continue
                s = self.domain.nd(k, x)
                for i in range(k + 1 if k else 0):
                    if self(self.domain.face(s, i)) != self.codomain.face(img, i):
                        report.append(Violation("map-face", k, x, f"face {i}"))
        return report

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """``self . other``."""
        return SimplicialMap.from_function(other.domain, self.codomain, lambda s: self(other(s)),
                                           upto=min(other.domain.max_dim, self.domain.max_dim))

    def is_identity_like(self) -> bool:
        return all(img == (ident(k), x) for k, level in enumerate(self.images) for x, img in enumerate(level))

    def is_bijective(self, upto: int | None = None) -> bool:
        """Bijective on nondegenerate simplices through ``upto`` (hence an isomorphism there)."""
        d = min(self.domain.max_dim, self.codomain.max_dim) if upto is None else upto
        for k in range(d + 1):
            imgs = self.images[k] if k < len(self.images) else []
            if any(SimplicialSet.is_degenerate(img) for img in imgs):
                return False
            if sorted(i[1] for i in imgs) != list(range(self.codomain.count(k))):
                return False
        return True


def identity_map(X: SimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, [X.nondegenerate(k) for k in range(X.top_dim + 1)], "id")


# -- generic materialization -------------------------------------------------


class LevelModel:
    """A simplicial object given by procedures.

    ``level(k)`` must yield every nondegenerate ``k``-simplex (it may also
    yield degenerate ones); ``face`` and ``degeneracy`` act on keys.
    """

    def level(self, k: int) -> Iterable[Hashable]:
        raise NotImplementedError

    def face(self, key, i: int):
        raise NotImplementedError

    def degeneracy(self, key, j: int):
        raise NotImplementedError


@dataclass
class Materialized:
    sset: SimplicialSet
    nf: dict = field(repr=False)
    keys: list[list[Hashable]] = field(repr=False)
    groupoid: Any = field(default=None, repr=False)

    def normal_form(self, key) -> Simplex:
        try:
            return self.nf[key]
        except KeyError:
            raise SimplicialError(f"{key!r} is not a simplex of the materialized model") from None

    def key_of(self, s: Simplex, model: "LevelModel"):
        """Model key of a normal-form simplex."""
        eta, y = s
        key = self.keys[eta[-1]][y]
        for j in sorted(degeneracy_positions(eta)):
            key = model.degeneracy(key, j)
        return key


def materialize(model: LevelModel, D: int, budget: int | None = None, *, kan: bool = False,
                truncated: bool = True, name: str = "", dim_offset: int = 0) -> Materialized:
    """Build the normal-form presentation of ``model`` through dimension ``D``."""
    nf: dict = {}
    keys: list[list] = []
    faces: list[list[tuple[Simplex, ...]]] = []
    total = 0
    prev: list = []
    for k in range(D + 1):
        level_keys = list(model.level(k))
        degen_keys = []
        for s in prev:
            base_eta, rid = nf[s]
            for j in range(k):
                t = model.degeneracy(s, j)
                if t not in nf:
                    nf[t] = (tuple(base_eta[i if i <= j else i - 1] for i in range(k + 1)), rid)
                    degen_keys.append(t)
        nd_keys = []
        level_faces = []
        e = ident(k)
        for key in level_keys:
            if key in nf:
                if len(nf[key][0]) != k + 1:
                    raise SimplicialError(f"model key {key!r} listed in two dimensions")
                continue
            nf[key] = (e, len(nd_keys))
            nd_keys.append(key)
        for key in nd_keys:
            if k:
                fs = []
                for i in range(k + 1):
                    f = model.face(key, i)
                    try:
                        fs.append(nf[f])
                    except KeyError:
                        raise SimplicialError(f"face {i} of {key!r} is missing from level {k - 1}") from None
                level_faces.append(tuple(fs))
            else:
                level_faces.append(())
        total += len(nd_keys)
        if budget is not None and total > budget:
            raise BudgetExceeded(f"{name or 'model'}: more than {budget} nondegenerate simplices by dim {k}")
        prev = nd_keys + degen_keys if k < D else []
        keys.append(nd_keys)
        faces.append(level_faces)
    X = SimplicialSet(faces, max_dim=D, kan=kan, truncated=truncated, name=name)
    return Materialized(X, nf, keys)


class SSetModel(LevelModel):
    """View a :class:`SimplicialSet` as a level model (keys are simplices)."""

    def __init__(self, X: SimplicialSet):
        self.X = X

    def level(self, k):
        return self.X.nondegenerate(k)

    def face(self, key, i):
        return self.X.face(key, i)

    def degeneracy(self, key, j):
        return self.X.degeneracy(key, j)
