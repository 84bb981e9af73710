"""Bounded coset enumeration (HLT strategy) for finite group presentations.

Generators are ``0..n-1``; a word is a list of nonzero integers where ``i+1``
stands for generator ``i`` and ``-(i+1)`` for its inverse.
"""

from __future__ import annotations


class EnumerationExhausted(RuntimeError):
    """The coset table outgrew its bound before closing."""


def _col(letter: int) -> int:
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _inv(col: int) -> int:
    return col ^ 1


def free_reduce(word: list[int]) -> list[int]:
    out: list[int] = []
    for a in word:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return out


def cyclic_reduce(word: list[int]) -> list[int]:
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def simplify(ngens: int, relators: list[list[int]]) -> tuple[list[int], list[list[int]], dict[int, list[int]]]:
    """Eliminate generators occurring exactly once in some relator.

    Returns surviving generators, rewritten relators, and for each eliminated
    generator its expression in the other generators.
    """
    rels = [cyclic_reduce(r) for r in relators]
    rels = [r for r in rels if r]
    subst: dict[int, list[int]] = {}
    alive = set(range(1, ngens + 1))
    changed = True
    while changed:
        changed = False
        rels.sort(key=len)
        for idx, r in enumerate(rels):
            counts: dict[int, int] = {}
            for a in r:
                counts[abs(a)] = counts.get(abs(a), 0) + 1
            cand = [g for g, c in counts.items() if c == 1]
            if not cand:
                continue
            g = min(cand)
            pos = next(i for i, a in enumerate(r) if abs(a) == g)
            rest = r[pos + 1:] + r[:pos]
            # r = ... g^e rest  =>  g^e = rest^-1
            expr = [-a for a in reversed(rest)]
            if r[pos] < 0:
                expr = [-a for a in reversed(expr)]
            subst[g] = expr
            alive.discard(g)
            del rels[idx]
            rels = [cyclic_reduce(_substitute(w, g, expr)) for w in rels]
            rels = [w for w in rels if w]
            for h in list(subst):
                if h != g:
                    subst[h] = free_reduce(_substitute(subst[h], g, expr))
            changed = True
            break
    return sorted(alive), rels, subst


def _substitute(word: list[int], g: int, expr: list[int]) -> list[int]:
    out: list[int] = []
    for a in word:
        if a == g:
            out.extend(expr)
        elif a == -g:
            out.extend(-b for b in reversed(expr))
        else:
            out.append(a)
    return free_reduce(out)


class CosetTable:
    def __init__(self, ngens: int, relators: list[list[int]], max_cosets: int):
        self.ncols = 2 * ngens
        self.rels = [[_col(a) for a in r] for r in relators if r]
        self.max_cosets = max_cosets
        self.table: list[list[int | None]] = [[None] * self.ncols]
        self.parent = [0]
        self.live = 1

    def _define(self, c: int, x: int) -> int:
        if self.live >= self.max_cosets:
            raise EnumerationExhausted(f"more than {self.max_cosets} cosets")
        d = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.table[c][x] = d
        self.table[d][_inv(x)] = c
        return d

    def _rep(self, c: int) -> int:
        p = self.parent
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self._rep(a), self._rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.live -= 1
        queue.append(b)

    def _coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            row = self.table[e]
            for x in range(self.ncols):
                f = row[x]
                if f is None:
                    continue
                self.table[f][_inv(x)] = None
                e1, f1 = self._rep(e), self._rep(f)
                if self.table[e1][x] is not None:
                    self._merge(f1, self.table[e1][x], queue)
                elif self.table[f1][_inv(x)] is not None:
                    self._merge(e1, self.table[f1][_inv(x)], queue)
                else:
                    self.table[e1][x] = f1
                    self.table[f1][_inv(x)] = e1

    def _alive(self, c: int) -> bool:
        return self.parent[c] == c

    def _scan_and_fill(self, c: int, w: list[int]) -> None:
        t = self.table
        n = len(w)
        while True:
            f, i = c, 0
            b, j = c, n - 1
            while i <= j and t[f][w[i]] is not None:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != c:
                    self._coincidence(f, c)
                return
            while j >= i and t[b][_inv(w[j])] is not None:
                b = t[b][_inv(w[j])]
                j -= 1
            if j < i:
                self._coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][_inv(w[i])] = f
                return
            self._define(f, w[i])

    def run(self) -> None:
        c = 0
        while c < len(self.table):
            for w in self.rels:
                if not self._alive(c):
                    break
                self._scan_and_fill(c, w)
            if self._alive(c):
                for x in range(self.ncols):
                    if self._alive(c) and self.table[c][x] is None:
                        self._define(c, x)
            c += 1

    def compact(self) -> list[list[int]]:
        """Standardized table: rows are live cosets renumbered in order, coset 0 first."""
        live = [c for c in range(len(self.table)) if self._alive(c)]
        ren = {c: i for i, c in enumerate(live)}
        return [[ren[self._rep(x)] for x in self.table[c]] for c in live]


def enumerate_cosets(ngens: int, relators: list[list[int]], max_cosets: int) -> list[list[int]]:
    """Regular coset table (trivial subgroup) or :class:`EnumerationExhausted`."""
    if ngens == 0:
        return [[]]
    ct = CosetTable(ngens, relators, max_cosets)
    ct.run()
    return ct.compact()
