"""The acceptance suite: one function per criterion, shared by the CLI and the tests.

Every function returns a :class:`CriterionResult`; ``ok`` includes the time limit.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .chain_tower import chain_postnikov_tower, homology_signature, random_chain_complex
from .chains import ChainComplex, Presentation, TwistedCohomology, chains_of, twisted_cochain_complex
from .constructions import coskeleton, product, skeleton
from .em import (GroupoidModule, OverBase, cocycle_to_map, em_minimal_model, em_paper_model,
                 enumerate_maps_over, map_to_cocycle, over_nerve)
from .groupoid import FiniteGroup, FiniteGroupoid, nerve_of_group
from .linalg import determinant, matmul, smith_normal_form
from .models import boundary, circle, from_simplicial_complex, rp2, simplex, sphere
from .oracles import bar_cohomology_of
from .pi1 import certify_finite, fundamental_groupoid, pi1_at, universal_cover
from .sset import SimplicialMap, SimplicialSet
from .tower import (STRICT, check_multiplicativity, extract_pi2, nerve_base, round_trip,
                    round_trip_integral, serre_homology, twisted_product, validate_tower)

SEED = 20240607


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    seconds: float
    limit: float
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        state = "PASS" if self.ok else "FAIL"
        return f"[{state}] criterion {self.number:2d} {self.name} ({self.seconds:.1f}s, limit {self.limit:.0f}s)"


def _timed(number: int, name: str, limit: float):
    def wrap(fn):
        def run(*args, **kwargs) -> CriterionResult:
            t = time.perf_counter()
            ok, details = fn(*args, **kwargs)
            dt = time.perf_counter() - t
            if dt >= limit:
                details.append(f"time limit exceeded: {dt:.1f}s >= {limit:.0f}s")
            return CriterionResult(number, name, bool(ok) and dt < limit, dt, limit, details)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# -- coefficient systems used throughout ------------------------------------------------------


def z2() -> FiniteGroup:
    return FiniteGroup.cyclic(2)


def sign_module(P: Presentation | None = None) -> GroupoidModule:
    return GroupoidModule.sign(z2(), lambda g: -1 if g else 1, P)


def trivial_module(G: FiniteGroup, m: int) -> GroupoidModule:
    return GroupoidModule.trivial(FiniteGroupoid.from_group(G), Presentation.cyclic(m))


def e_beta(D: int = 4):
    """The nontrivial two-stage object over ``N(Z/2)`` with fiber ``K(Z/2, 2)``."""
    A = trivial_module(z2(), 2)
    base, _ = nerve_base(A, D)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    return twisted_product(base, A, 2, H.representative((1,)).cocycle, "E")


# -- criteria ---------------------------------------------------------------------------------


@_timed(1, "twisted group cohomology vs bar resolution", 10)
def criterion_1(top: int = 5):
    A = sign_module()
    base, _ = nerve_base(A, top + 1)
    L = base.local_system(A)
    details, ok = [], True
    for n in range(top + 1):
        engine = TwistedCohomology(base.Y, L, n).group
        oracle = bar_cohomology_of(A, n)
        expected = "Z/2" if n % 2 else "0"
        same = engine == oracle and str(engine) == expected
        ok &= same
        details.append(f"H^{n}: engine {engine}, bar oracle {oracle}")
    return ok, details


@_timed(2, "EM cross-model agreement", 120)
def criterion_2(dim: int = 4):
    """Both models built through simplicial dimension ``dim`` (exact H_0..H_{dim-1}), and one
    dimension further (adding H_dim) except for Z/3, n = 2 over N(Z/2), whose next level is
    out of the time budget."""
    cases = []
    for m in (2, 3):
        cases.append((f"Z/{m} over a point", GroupoidModule.trivial(
            FiniteGroupoid.from_group(FiniteGroup.trivial()), Presentation.cyclic(m)), False))
        cases.append((f"Z/{m} trivial over Z/2", trivial_module(z2(), m), True))
        cases.append((f"Z/{m} sign over Z/2", sign_module(Presentation.cyclic(m)), True))
    ok, details = True, []
    for label, A, twisted_base in cases:
        for n in (1, 2):
            heavy = twisted_base and n == 2 and A.fibers[0].group.order == 3
            D = dim if heavy else dim + 1
            a = [str(h) for h in em_minimal_model(A, n, D).homology()]
            b = [str(h) for h in em_paper_model(A, n, D).homology()]
            ok &= a == b
            details.append(f"{label}, n={n}, built through dim {D}: minimal {a} | bar {b}")
    return ok, details


def bijection_suite() -> list[tuple[str, OverBase, GroupoidModule, int]]:
    """Small bases over nerves with at most 30 nondegenerate simplices."""
    pt = FiniteGroupoid.from_group(FiniteGroup.trivial())

    def over_point(Y: SimplicialSet) -> OverBase:
        return OverBase(Y, lambda s: ((0,) * len(s[0]), (0,) * (len(s[0]) - 1)))

    N = nerve_of_group(z2(), 4)
    suite = []
    for label, Y in (("circle", circle()), ("2-simplex", simplex(2)), ("boundary of 3-simplex", boundary(3)),
                     ("S2", sphere(2).sset), ("torus", product(circle(), circle()).sset)):
        for m in (2, 3):
            A = GroupoidModule.trivial(pt, Presentation.cyclic(m))
            for n in (1, 2):
                if n <= Y.top_dim:
                    suite.append((f"{label}, Z/{m}, n={n}", over_point(Y), A, n))
    for k in (2, 3):
        Y = skeleton(N.sset, k)
        inc = SimplicialMap.from_function(Y, N.sset, lambda s: s, upto=k)
        base = over_nerve(inc, N)
        for label, A in (("Z/2 trivial", trivial_module(z2(), 2)), ("Z/3 sign", sign_module(Presentation.cyclic(3))),
                         ("Z/4 sign", sign_module(Presentation.cyclic(4)))):
            for n in (1, 2):
                if n <= k:
                    suite.append((f"sk{k} N(Z/2), {label}, n={n}", base, A, n))
    return suite


def _cocycles(H: TwistedCohomology, A: GroupoidModule, Y: SimplicialSet, base: OverBase, n: int) -> list[list[int]]:
    choices = []
    for s in Y.nondegenerate(n):
        x0 = base.chain(s)[0][0]
        choices.append([list(v) for v in A.fiber(x0).elements()])
    out = []
    for vals in itertools.product(*choices):
        z = [a for v in vals for a in v]
        try:
            H.check_cocycle(z)
        except Exception:
            continue
        out.append(z)
    return out


def _images(f: SimplicialMap, Y: SimplicialSet, top: int) -> list[list]:
    return [[f(Y.nd(k, x)) for x in range(Y.count(k))] for k in range(top + 1)]


@_timed(3, "cocycle/map bijection", 120)
def criterion_3():
    ok, details = True, []
    for label, base, A, n in bijection_suite():
        Y = base.Y
        size = sum(Y.counts())
        if size > 30:
            raise ValueError(f"{label} has {size} nondegenerate simplices")
        top = Y.top_dim
        K = em_minimal_model(A, n, max(top, n + 1))
        H = TwistedCohomology(Y, base.local_system(A), n)
        zs = _cocycles(H, A, Y, base, n)
        maps = enumerate_maps_over(K, base)
        from_maps = [map_to_cocycle(K, SimplicialMap(Y, K.sset, imgs), H) for imgs in maps]
        forward = all(map_to_cocycle(K, cocycle_to_map(K, base, z, H), H) == z for z in zs)
        backward = all(_images(cocycle_to_map(K, base, z, H), Y, min(top, K.D)) == [list(r) for r in imgs]
                       for z, imgs in zip(from_maps, maps))
        biject = len(maps) == len(zs) and sorted(map(tuple, from_maps)) == sorted(map(tuple, zs))
        good = forward and backward and biject
        ok &= good
        details.append(f"{label}: {len(maps)} maps, {len(zs)} cocycles, round trips {forward and backward}")
    return ok, details


@_timed(4, "k-invariant round trip", 300)
def criterion_4():
    ok, details = True, []
    A = trivial_module(FiniteGroup.cyclic(3), 3)
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    for cls in H.classes():
        rt, R, _ = round_trip(A, cls.cocycle, 4)
        good = rt.ok and rt.square == STRICT and R.square.detail is not None
        ok &= good
        details.append(f"Z/3 over N(Z/3): beta {rt.expected} -> recovered {rt.recovered}, square {rt.square}")
    A = sign_module()
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    for cls in H.classes():
        r = round_trip_integral(A, cls.cocycle)
        ok &= r.ok
        details.append(f"Z_sign over N(Z/2): beta {r.expected} -> recovered {r.recovered}, square {r.square} "
                       f"({r.square_detail}); mod 4 route {r.reduction.expected} -> {r.reduction.recovered}, "
                       f"reduction injective {r.reduction_injective}")
    return ok, details


@_timed(5, "nontriviality separation", 300)
def criterion_5():
    ok, details = True, []
    A = sign_module()
    base, _ = nerve_base(A, 6)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    beta = H.representative((1,)).cocycle
    Eb = [str(h) for h in serre_homology(twisted_product(base, A, 2, beta), 4)]
    E0 = [str(h) for h in serre_homology(twisted_product(base, A, 2, H.zero().cocycle), 4)]
    ok &= Eb != E0
    details.append(f"Z_sign: H_*(E_beta) = {Eb}, H_*(E_0) = {E0}")
    A = trivial_module(z2(), 2)
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    mats = {}
    for label, cls in (("beta", H.representative((1,))), ("0", H.zero())):
        T = twisted_product(base, A, 2, cls.cocycle)
        mat = T.materialize(4)
        direct = [str(h) for h in chains_of(mat.sset, 4).homology_all(3)]
        model = [str(h) for h in serre_homology(T, 3)]
        ok &= direct == model
        mats[label] = direct
        details.append(f"Z/2, E_{label}: simplicial {direct}, algebraic model {model}")
    ok &= mats["beta"] != mats["0"]
    return ok, details


@_timed(6, "RP2 pipeline", 30)
def criterion_6():
    X = rp2()
    P = certify_finite(fundamental_groupoid(X), 8)
    orders = [pi1_at(P, v).order for v in range(X.count(0))]
    cover = universal_cover(X, P)
    Hc = [str(h) for h in chains_of(cover.sset, 3).homology_all(2)]
    pi2 = extract_pi2(X, P)
    G = pi2.module.groupoid.groups[0]
    action = {g: pi2.module.rho[0][g] for g in G.elements()}
    sign = all(action[g] == [[-1 if g != 0 else 1]] for g in G.elements())
    ok = P.certified and orders == [2] * X.count(0) and Hc == ["Z", "0", "Z"] and str(pi2.group) == "Z" and sign
    return ok, [f"pi_1 orders {orders}", f"H_*(cover) = {Hc}", f"pi_2 = {pi2.group}, action {action}"]


@_timed(7, "chain-complex towers", 60)
def criterion_7(count: int = 24, seed: int = SEED):
    rng = random.Random(seed)
    ok, details = True, []
    for i in range(count):
        C = random_chain_complex(rng, 6, 9)
        if max(C.ranks) > 6 or any(abs(v) > 9 for k in range(1, C.top + 1) for row in C.dense(k) for v in row):
            raise ValueError("generator left the stated range")
        T = chain_postnikov_tower(C, C.top + 1)
        good = T.ok and all(e.ok for e in validate_tower(T, heart=False))
        for a, sq in T.squares.items():
            cert = sq.certify()
            want = [str(C.homology(0))] + ["0"] * a + [str(C.homology(a))] + ["0"]
            got = homology_signature(sq.Z, a + 2)
            good &= cert["pullback"] and cert["pushout"] and cert["homotopy"] and got == want[: len(got)]
        ok &= good
        details.append(f"complex {i}: ranks {C.ranks}, {len(T.squares)} squares, ok {good}")
    return ok, details


@_timed(8, "multiplicativity", 300)
def criterion_8():
    E = e_beta()
    Z = GroupoidModule.zero(FiniteGroupoid.from_group(FiniteGroup.cyclic(3)))
    b3, _ = nerve_base(Z, 4)
    N3 = twisted_product(b3, Z, 2, [() for _ in range(b3.Y.count(3))], "N")
    ok, details = True, []
    for label, pair in (("E_beta x N(Z/3)", (E, N3)), ("E_beta x E_beta", (E, E))):
        r = check_multiplicativity(*pair)
        ok &= r.ok
        details.append(f"{label}: stages {r.stagewise}, class {r.expected} -> {r.recovered}, "
                       f"components {r.components}")
    return ok, details


@_timed(9, "enriched tower", 300)
def criterion_9():
    from .enriched import HomHint, augmented_monoid_category, catwise_tower, is_isofibration
    T = e_beta()
    mat = T.materialize(3)
    C = augmented_monoid_category(mat.sset)
    CT = catwise_tower(C, 2, 3, hints=[HomHint((0, 0), 0, T, mat)])
    assoc = CT.system.check_associativity("all")
    iso = {a: bool(is_isofibration(p)) for a, p in CT.structure.items()}
    recovered = all(w == g for w, g in CT.recovered.values()) and bool(CT.recovered)
    beta_nonzero = all(any(w) for w, _ in CT.recovered.values())
    ok = CT.ok and not assoc and all(iso.values()) and recovered and beta_nonzero
    details = [f"associativity failures (all vertices): {len(assoc)}", f"isofibrations {iso}",
               f"recovered {CT.recovered}"] + CT.report().splitlines()
    return ok, details


@_timed(10, "cube and tower lemma checkers", 120)
def criterion_10():
    from .enriched import (CospanSquare, check_cube_lemma, check_tower_lemma, coskeleton_tower, functor_from_keys,
                           group_category, induced_on_coskeleta, negative_cube_control, quotient_functor,
                           total_group_category, unit_functor)
    G = z2()
    C1, C2 = group_category(G, 1, 4), group_category(G, 2, 4)
    E1, _ = total_group_category(G, 4, 1)
    E2, _ = total_group_category(G, 4, 2)
    q1, q2 = quotient_functor(E1, C1, G), quotient_functor(E2, C2, G)
    gamma = functor_from_keys(C1, C2, [0], lambda x, y, s: s)
    beta = functor_from_keys(E1, E2, [0], lambda x, y, s: s)
    a1, a2 = unit_functor(C1), unit_functor(C2)
    alpha = functor_from_keys(a1.source, a2.source, [0], lambda x, y, s: s)
    cube = check_cube_lemma(CospanSquare(a1, q1), CospanSquare(a2, q2), alpha, beta, gamma, D=3)
    TA, TB = coskeleton_tower(C1, 2, 4), coskeleton_tower(C2, 2, 4)
    comps = {m: induced_on_coskeleta(gamma, TA.stages[m], TB.stages[m]) for m in TA.stages}
    tower = check_tower_lemma(TA, TB, comps, D=3)
    neg = check_cube_lemma(*negative_cube_control(3), D=3, strict=False)
    negative_fails = not neg.ok and neg.conclusion is not None and neg.conclusion.ok is False
    ok = cube.ok and cube.conclusion.level == 3 and tower.ok and tower.conclusion.level == 3 and negative_fails
    return ok, cube.describe().splitlines() + tower.describe().splitlines() + neg.describe().splitlines()


# -- invariant suites -------------------------------------------------------------------------


def random_sset(rng: random.Random, vertices: int = 5, facets: int = 4, dim: int = 2) -> SimplicialSet:
    fs = [rng.sample(range(vertices), rng.randint(1, dim + 1)) for _ in range(facets)]
    return from_simplicial_complex(fs, "R")


def simplicial_identity_violations(X: SimplicialSet, upto: int) -> int:
    """Count failures of all five families of identities over full levels."""
    bad = 0
    for k in range(upto + 1):
        for s in X.full_level(k):
            for j in range(k + 1):
                t = X.degeneracy(s, j)
                for i in range(k + 2):
                    # d_i s_j = s_{j-1} d_i (i < j), id (i = j, j + 1), s_j d_{i-1} (i > j + 1)
                    lhs = X.face(t, i)
                    if i < j:
                        rhs = X.degeneracy(X.face(s, i), j - 1)
                    elif i in (j, j + 1):
                        rhs = s
                    else:
                        rhs = X.degeneracy(X.face(s, i - 1), j)
                    bad += lhs != rhs
                for i in range(j + 1):
                    bad += X.degeneracy(X.degeneracy(s, j), i) != X.degeneracy(X.degeneracy(s, i), j + 1)
            if k >= 2:
                for j in range(1, k + 1):
                    for i in range(j):
                        bad += X.face(X.face(s, j), i) != X.face(X.face(s, i), j - 1)
    return bad


def _random_input(rng: random.Random) -> SimplicialSet:
    kind = rng.randrange(4)
    if kind == 0:
        return random_sset(rng)
    if kind == 1:
        return nerve_of_group(FiniteGroup.cyclic(rng.randint(1, 3)), 3).sset
    if kind == 2:
        return product(random_sset(rng, 3, 2, 1), random_sset(rng, 3, 2, 1), 3).sset
    return coskeleton(random_sset(rng, 4, 3, 1), 1, 2, with_unit=False).sset


def suite_simplicial_identities(rng: random.Random, cases: int) -> tuple[int, int]:
    fails = 0
    for _ in range(cases):
        X = _random_input(rng)
        top = min(X.max_dim - 1, 2) if X.truncated else min(X.top_dim + 1, 3)
        fails += simplicial_identity_violations(X, max(top, 0)) > 0
    return cases, fails


def suite_delta_squared(rng: random.Random, cases: int) -> tuple[int, int]:
    fails = 0
    for _ in range(cases):
        if rng.random() < 0.5:
            Y = random_sset(rng, 5, 4, 3)
            from .chains import LocalSystem
            L = LocalSystem.constant(Y, Presentation.cyclic(rng.choice([0, 2, 3, 4, 6])))
        else:
            m = rng.choice([0, 3, 4, 5])
            A = sign_module(Presentation.cyclic(m)) if rng.random() < 0.5 else trivial_module(z2(), m)
            base, _ = nerve_base(A, 4)
            Y, L = base.Y, base.local_system(A)
        P = twisted_cochain_complex(Y, L, 4)
        fails += bool(P.check())
        C = chains_of(Y, 4)
        fails += bool(C.check())
    return cases, fails


def suite_snf(rng: random.Random, cases: int) -> tuple[int, int]:
    fails = 0
    for _ in range(cases):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        sf = smith_normal_form(M, n)
        good = matmul(matmul(sf.U, M), sf.V) == sf.D
        good &= abs(determinant(sf.U)) == 1 and abs(determinant(sf.V)) == 1
        good &= matmul(sf.U, sf.U_inv) == [[int(i == j) for j in range(m)] for i in range(m)]
        good &= matmul(sf.V, sf.V_inv) == [[int(i == j) for j in range(n)] for i in range(n)]
        good &= all(sf.D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        d = sf.diagonal
        good &= all(x >= 0 for x in d)
        good &= all((d[i + 1] % d[i] == 0) if d[i] else d[i + 1] == 0 for i in range(len(d) - 1))
        fails += not good
    return cases, fails


def suite_cosk_stabilization(rng: random.Random, cases: int) -> tuple[int, int]:
    """The unit ``X -> cosk_n X`` is bijective through level ``n``; nerves are 2-coskeletal."""
    fails = 0
    for i in range(cases):
        if i % 2:
            X = nerve_of_group(FiniteGroup.cyclic(rng.randint(1, 3)), 3).sset
            n, upto = 2, 3
        else:
            X = random_sset(rng, 5, 4, 2)
            n = rng.randint(1, 2)
            upto = n
        R = coskeleton(X, n, upto)
        good = R.unit.is_bijective(upto)
        good &= [len(R.sset.full_level(k)) for k in range(upto + 1)] == [len(X.full_level(k)) for k in range(upto + 1)]
        fails += not good
    return cases, fails


def suite_cosk_products(rng: random.Random, cases: int) -> tuple[int, int]:
    """``cosk_n(X x Y) -> cosk_n X x cosk_n Y`` is bijective through level ``n + 1``."""
    from .tower import _cosk_product_iso
    fails = 0
    for _ in range(cases):
        X = random_sset(rng, 3, 2, 1)
        Y = random_sset(rng, 3, 2, rng.randint(1, 2))
        n = 1
        XY = product(X, Y, n + 1)
        fails += not _cosk_product_iso(X, Y, XY, n, n + 1, None)
    return cases, fails


SUITES = {
    "simplicial identities": suite_simplicial_identities,
    "delta squared": suite_delta_squared,
    "Smith normal form unimodularity": suite_snf,
    "coskeleton stabilization": suite_cosk_stabilization,
    "coskeleton products": suite_cosk_products,
}


@_timed(11, "invariant suites", 120)
def criterion_11(cases: int = 100, seed: int = SEED):
    ok, details = True, []
    for name, suite in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        n, fails = suite(rng, cases)
        ok &= n >= 100 and fails == 0
        details.append(f"{name}: {n} cases, {fails} failures")
    return ok, details


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11]


SEEDED = {7, 11}


def run_criterion(number: int, seed: int = SEED) -> CriterionResult:
    fn = CRITERIA[number - 1]
    return fn(seed=seed) if number in SEEDED else fn()


def run_all(select: list[int] | None = None, seed: int = SEED) -> list[CriterionResult]:
    return [run_criterion(i, seed) for i in range(1, len(CRITERIA) + 1) if select is None or i in select]
