"""Command-line front door.

Exit status: 0 success, 1 malformed input, 2 certificate refusal (or a failed
certificate), 3 budget exhausted.  Flags override ``POSTNIKOV_*`` environment
variables, which override the defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

from .io import (InputError, TowerRecord, TwistedProductSpec, category_from_json, detect_kind, functor_from_json,
                 load_chain_complex, load_json, load_sset, tower_record)
from .sset import BudgetExceeded, SimplicialError

EXIT_OK, EXIT_MALFORMED, EXIT_REFUSED, EXIT_BUDGET = 0, 1, 2, 3
ENV_PREFIX = "POSTNIKOV_"


class Refused(RuntimeError):
    """A certificate could not be granted."""


@dataclass
class RunConfig:
    max_dim: int = 4
    budget: int = 500_000
    group_bound: int = 64
    format: str = "text"
    seed: int = 20240607

    def __post_init__(self):
        if self.max_dim < 2:
            raise InputError("max dimension must be at least 2")
        if self.budget <= 0 or self.group_bound <= 0:
            raise InputError("budget and group bound must be positive")
        if self.format not in ("text", "json"):
            raise InputError("format must be 'text' or 'json'")

    @classmethod
    def resolve(cls, args: argparse.Namespace, env: dict | None = None) -> "RunConfig":
        env = os.environ if env is None else env
        values = {}
        for name, kind in (("max_dim", int), ("budget", int), ("group_bound", int), ("format", str), ("seed", int)):
            flag = getattr(args, name, None)
            raw = env.get(ENV_PREFIX + name.upper())
            if flag is not None:
                values[name] = flag
            elif raw is not None:
                try:
                    values[name] = kind(raw)
                except ValueError:
                    raise InputError(f"environment {ENV_PREFIX + name.upper()}: expected {kind.__name__}") from None
        return cls(**values)


# -- helpers ----------------------------------------------------------------------------------


def _groups(gs) -> str:
    return " ".join(f"H{k}={g}" for k, g in enumerate(gs))


def _load_space(path: str, cfg: RunConfig):
    data = load_json(path)
    kind = detect_kind(data)
    if kind == "sset":
        return load_sset(data, cfg.max_dim)
    if kind == "twisted-product":
        spec = TwistedProductSpec.from_json(data)
        T, _ = spec.build(cfg.max_dim)
        return T.materialize(min(cfg.max_dim, spec.max_dim), cfg.budget).sset
    raise InputError(f"{path}: expected a simplicial set, got {kind}")


def _certified_groupoid(X, cfg: RunConfig):
    from .pi1 import NotCertified, certify_finite, fundamental_groupoid

    P = fundamental_groupoid(X)
    try:
        certify_finite(P, cfg.group_bound)
    except NotCertified as exc:
        raise Refused(f"fundamental groupoid not certified: {exc}") from None
    return P


# -- commands ---------------------------------------------------------------------------------


def cmd_validate(args, cfg):
    from .sset import validate

    data = load_json(args.file)
    kind = detect_kind(data)
    if kind == "sset":
        X = load_sset(data, cfg.max_dim)
        bad = validate(X)
        if bad:
            raise InputError(f"{args.file}: {bad[0]}")
        return {"kind": kind, "counts": X.counts(), "valid": True}, f"valid simplicial set, counts {X.counts()}"
    if kind == "chain-complex":
        C = load_chain_complex(data)
        return {"kind": kind, "ranks": C.ranks, "valid": True}, f"valid chain complex, ranks {C.ranks}"
    if kind == "twisted-product":
        spec = TwistedProductSpec.from_json(data)
        T, H = spec.build(cfg.max_dim)
        return ({"kind": kind, "group": str(H.group), "valid": True},
                f"valid twisted product, class in H^{spec.degree + 1} = {H.group}")
    if kind == "category":
        C = category_from_json(data)
        bad = C.check()
        if bad:
            raise InputError(f"{args.file}: {bad[0]}")
        return {"kind": kind, "objects": C.n, "valid": True}, f"valid simplicial category on {C.n} objects"
    if kind == "functor":
        F = functor_from_json(data)
        bad = F.check()
        if bad:
            raise InputError(f"{args.file}: {bad[0]}")
        return {"kind": kind, "valid": True}, "valid simplicial functor"
    if kind == "tower":
        TowerRecord.from_json(data)
        return {"kind": kind, "valid": True}, "valid tower bundle"
    return {"kind": kind, "valid": True}, f"valid {kind}"


def cmd_homology(args, cfg):
    data = load_json(args.file)
    if detect_kind(data) == "chain-complex":
        C = load_chain_complex(data)
        gs = C.homology_all()
    else:
        X = _load_space(args.file, cfg)
        gs = _space_homology(X, cfg)
    return {"homology": [str(g) for g in gs]}, _groups(gs)


def _space_homology(X, cfg):
    from .chains import chains_of

    top = X.max_dim - 1 if X.truncated else X.top_dim
    top = min(top, cfg.max_dim)
    return chains_of(X, min(top + 1, X.max_dim)).homology_all(top)


def _sign_local_system(X, P_, cfg):
    from .chains import LocalSystem

    P = _certified_groupoid(X, cfg)
    if len(P.roots) != 1:
        raise Refused("twisted coefficients need a connected space")
    G = P.group[0]
    if G.order != 2:
        raise Refused(f"the sign system needs pi_1 of order 2, got order {G.order}")
    n = P_.ngens
    rho = {g: [[(-1 if g else 1) * int(i == j) for j in range(n)] for i in range(n)] for g in G.elements()}
    return LocalSystem.from_representation(X, P_, P.edge_class, rho, G.inverse, "sign")


def cmd_cohomology(args, cfg):
    from .chains import LocalSystem, Presentation, TwistedCohomology

    X = _load_space(args.file, cfg)
    if args.coefficients < 0:
        raise InputError("--coefficients must be non-negative (0 means Z)")
    P_ = Presentation.cyclic(args.coefficients) if args.coefficients else Presentation.free(1)
    L = _sign_local_system(X, P_, cfg) if args.twisted else LocalSystem.constant(X, P_)
    top = X.max_dim - 1 if X.truncated else X.top_dim
    degrees = [args.degree] if args.degree is not None else list(range(min(top, cfg.max_dim - 1) + 1))
    if any(n < 0 or n > top for n in degrees):
        raise InputError(f"degree out of range 0..{top}")
    gs = [TwistedCohomology(X, L, n).group for n in degrees]
    text = " ".join(f"H^{n}={g}" for n, g in zip(degrees, gs))
    return {"cohomology": {str(n): str(g) for n, g in zip(degrees, gs)}, "twisted": bool(args.twisted)}, text


def cmd_pi1(args, cfg):
    from .pi1 import pi1_at

    X = _load_space(args.file, cfg)
    P = _certified_groupoid(X, cfg)
    orders = [pi1_at(P, v).order for v in range(X.count(0))]
    comps = sorted({P.comp_index(v) for v in range(X.count(0))})
    text = f"components={len(comps)} " + " ".join(f"|pi1(v{v})|={o}" for v, o in enumerate(orders))
    return {"components": len(comps), "orders": orders, "groupoid": P.to_json()}, text


def cmd_cover(args, cfg):
    from .pi1 import universal_cover

    X = _load_space(args.file, cfg)
    P = _certified_groupoid(X, cfg)
    if not 0 <= args.base < X.count(0):
        raise InputError(f"--base must be a vertex 0..{X.count(0) - 1}")
    cov = universal_cover(X, P, args.base)
    gs = _space_homology(cov.sset, cfg)
    return ({"counts": cov.sset.counts(), "homology": [str(g) for g in gs], "group_order": cov.group.order},
            f"cover counts {cov.sset.counts()}; {_groups(gs)}")


def _parse_group(text: str) -> int:
    """``Z/m``, ``m`` or ``Z`` (returned as 0)."""
    t = text.strip().replace(" ", "")
    if t == "Z":
        return 0
    try:
        m = int(t[2:] if t.startswith("Z/") else t)
    except ValueError:
        raise InputError(f"--group: expected Z/m, m or Z, got {text!r}") from None
    if m < 1:
        raise InputError("--group: the order must be positive")
    return m


def _groupoid_from_json(data: dict):
    from .groupoid import FiniteGroup, FiniteGroupoid

    objects = data.get("objects")
    groups = data.get("groups")
    if not isinstance(objects, list) or not isinstance(groups, list) or not groups:
        raise InputError("groupoid: fields 'objects' and 'groups' (with tables) are required")
    component = data.get("component", [0] * len(objects))
    try:
        gs = [FiniteGroup([[int(x) for x in row] for row in g["table"]]) for g in groups]
        component = [int(c) for c in component]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"groupoid: field 'groups': bad table ({exc})") from None
    if len(component) != len(objects) or any(not 0 <= c < len(gs) for c in component):
        raise InputError("groupoid: field 'component' must index 'groups' once per object")
    return FiniteGroupoid(list(range(len(objects))), component, gs)


def _em_module(base: str, m: int, action: str):
    from .chains import Presentation
    from .em import GroupoidModule

    P_ = Presentation.cyclic(m) if m else Presentation.free(1)
    try:
        order = int(base)
    except ValueError:
        order = None
    if order is not None:
        if order < 1:
            raise InputError("--base: the group order must be positive")
        if action == "sign" and order % 2:
            raise InputError("the sign action needs an even base order")
        return TwistedProductSpec(order, m, action).module()
    G = _groupoid_from_json(load_json(base))
    if action == "trivial":
        return GroupoidModule.trivial(G, P_)
    if any(H.order != 2 for H in G.groups):
        raise InputError("--action sign on a groupoid file needs every vertex group of order 2")
    n = P_.ngens
    rho = [{g: [[(-1 if g else 1) * int(i == j) for j in range(n)] for i in range(n)] for g in H.elements()}
           for H in G.groups]
    return GroupoidModule(G, [P_] * len(G.groups), rho, f"{P_.group}_sign")


def cmd_em(args, cfg):
    from .em import em_minimal_model, em_paper_model

    if args.degree < 1:
        raise InputError("--degree must be positive")
    A = _em_module(args.base, _parse_group(args.group), args.action)
    build = em_paper_model if args.model == "bar" else em_minimal_model
    K = build(A, args.degree, cfg.max_dim, cfg.budget)
    gs = K.homology()
    return ({"model": args.model, "counts": K.sset.counts(), "homology": [str(g) for g in gs]},
            f"K({A.fibers[0].group}, {args.degree}) over {args.base} [{args.model}]: "
            f"counts {K.sset.counts()}; {_groups(gs)}")


def cmd_tower(args, cfg):
    from .chain_tower import chain_postnikov_tower
    from .tower import build_space_tower

    data = load_json(args.file)
    if detect_kind(data) == "chain-complex":
        C = load_chain_complex(data)
        T = chain_postnikov_tower(C, args.stages if args.stages is not None else C.top + 1)
    else:
        X = _load_space(args.file, cfg)
        T = build_space_tower(X, args.stages or 2, cfg.max_dim, cfg.budget, bound=cfg.group_bound)
    rec = tower_record(T)
    if args.save:
        with open(args.save, "w") as fh:
            json.dump(rec.to_json(), fh)
    if not T.ok:
        raise Refused(T.report())
    return rec.to_json() if args.save is None else {"saved": args.save, "ok": True}, T.report()


def cmd_chain_tower(args, cfg):
    data = load_json(args.file)
    if detect_kind(data) != "chain-complex":
        raise InputError(f"{args.file}: expected a chain complex")
    return cmd_tower(args, cfg)


def _kinv_twisted(spec: TwistedProductSpec, cfg: RunConfig):
    from .tower import extract_k_invariant, extract_pi2, k_invariant_in_coefficients, twisted_product_k_invariant

    T, H = spec.build(cfg.max_dim)
    if not T.A.is_finite():
        k = twisted_product_k_invariant(T)
        return tuple(k.coords), str(k.group.group), "intensional"
    D = 4
    mat = T.materialize(D, cfg.budget)
    pi2 = extract_pi2(mat.sset, bound=cfg.group_bound)
    kinv = extract_k_invariant(mat.sset, 2, D, carrier=T.carrier(mat), pi2=pi2, budget=cfg.budget)
    cls, ident = k_invariant_in_coefficients(T, mat, kinv, pi2)
    if not (ident.bijective and ident.equivariant):
        raise Refused("fiber identification of pi_2 with the coefficients failed")
    return tuple(cls.coords), str(cls.group.group), kinv.certification


def cmd_kinv(args, cfg):
    from .tower import HurewiczError, extract_k_invariant

    if args.stage != 2:
        raise InputError("k-invariants are extracted at stage 2")
    data = load_json(args.file)
    try:
        if detect_kind(data) == "twisted-product":
            coords, group, level = _kinv_twisted(TwistedProductSpec.from_json(data), cfg)
        else:
            X = load_sset(data, cfg.max_dim)
            k = extract_k_invariant(X, 2, max(4, cfg.max_dim), bound=cfg.group_bound, budget=cfg.budget)
            coords, group, level = tuple(k.coords), str(k.cohomology.group), k.certification
    except HurewiczError as exc:
        raise Refused(str(exc)) from None
    text = f"({', '.join(map(str, coords))}) in {group}"
    return {"stage": 2, "class": [str(c) for c in coords], "group": group, "certification": level}, text


def cmd_reconstruct(args, cfg):
    from .chains import chains_of
    from .tower import FORMAL, STRICT, reconstruct

    data = load_json(args.file)
    if detect_kind(data) != "twisted-product":
        raise InputError(f"{args.file}: expected a twisted-product specification")
    spec = TwistedProductSpec.from_json(data)
    T, H = spec.build(cfg.max_dim)
    D = min(cfg.max_dim, 3)
    window = None if T.A.is_finite() else 1
    R = reconstruct(T.base, T.A, 2, T.beta, D, cfg.budget, window=window)
    gs = chains_of(R.sset, D).homology_all(D - 1)
    level = R.square.level if R.square else FORMAL
    out = {"square": level, "detail": R.square.detail if R.square else "", "homology": [str(g) for g in gs]}
    if level != STRICT:
        raise Refused(f"square not certified: {out['detail']}")
    return out, f"square {level} ({out['detail']}); {_groups(gs)}"


def cmd_check_mult(args, cfg):
    from .tower import check_multiplicativity

    specs = [TwistedProductSpec.from_json(load_json(p)) for p in (args.first, args.second)]
    T1, _ = specs[0].build(4)
    T2, _ = specs[1].build(4)
    r = check_multiplicativity(T1, T2, budget=cfg.budget)
    out = {"stagewise": {str(k): v for k, v in r.stagewise.items()}, "expected": list(map(str, r.expected)),
           "recovered": list(map(str, r.recovered)), "group": r.group, "ok": r.ok}
    text = (f"stages {r.stagewise}; class in {r.group}: expected {r.expected}, recovered {r.recovered}; "
            f"components {r.components}")
    if not r.ok:
        raise Refused(text)
    return out, text


# -- categories ------------------------------------------------------------------------------------


def _builtin_category(name: str, D: int):
    from .enriched import (HomHint, augmented_monoid_category, bimodule_category, group_category,
                           total_group_category)
    from .groupoid import FiniteGroup

    G = FiniteGroup.cyclic(2)
    if name in ("augmented-e-beta", "bimodule-e-beta"):
        spec = TwistedProductSpec(2, 2, beta=(1,))
        T, _ = spec.build(4)
        mat = T.materialize(3)
        if name == "augmented-e-beta":
            return augmented_monoid_category(mat.sset), [HomHint((0, 0), 0, T, mat)]
        return bimodule_category(mat.sset, G, 3), [HomHint((0, 1), 0, T, mat)]
    if name == "nerve-z2":
        return group_category(G, 1, max(D, 3)), []
    if name == "total-z2":
        return total_group_category(G, max(D, 3))[0], []
    raise InputError(f"field 'builtin': unknown category {name!r}")


def _load_category(data: dict, D: int):
    if "builtin" in data:
        return _builtin_category(str(data["builtin"]), D)
    return category_from_json(data), []


def cmd_cat_tower(args, cfg):
    from .enriched import catwise_tower

    data = load_json(args.file)
    if detect_kind(data) != "category":
        raise InputError(f"{args.file}: expected a category")
    C, hints = _load_category(data, cfg.max_dim)
    CT = catwise_tower(C, args.stages, min(C.D, 3), hints=hints, bound=cfg.group_bound, budget=cfg.budget)
    out = {"ok": CT.ok, "ledger": [str(e) for e in CT.ledger], "notes": CT.notes,
           "recovered": {str(k): [list(map(str, w)), list(map(str, g))] for k, (w, g) in CT.recovered.items()}}
    text = "\n".join([CT.report()] + [f"note: {n}" for n in CT.notes])
    if not CT.ok:
        raise Refused(text)
    return out, text


def _builtin_functor(name: str):
    from .enriched import full_subcategory, group_category, identity_functor
    from .groupoid import FiniteGroup

    G = FiniteGroup.cyclic(2)
    if name == "identity-nerve-z2":
        return identity_functor(group_category(G, 1, 4))
    if name == "inclusion-nerve-z2":
        return full_subcategory(group_category(G, 2, 4), [0])[1]
    raise InputError(f"field 'builtin': unknown functor {name!r}")


def cmd_dk_check(args, cfg):
    from .enriched import is_dk_equivalence

    data = load_json(args.file)
    if detect_kind(data) != "functor":
        raise InputError(f"{args.file}: expected a functor")
    F = _builtin_functor(str(data["builtin"])) if "builtin" in data else functor_from_json(data)
    level = args.level if args.level is not None else min(3, cfg.max_dim)
    cert = is_dk_equivalence(F, level, cfg.group_bound)
    out = {"ok": cert.ok, "level": cert.level, "details": cert.details}
    if cert.ok is not True:
        raise Refused(cert.describe())
    return out, cert.describe()


def _cube_builtin(name: str):
    from .enriched import (CospanSquare, check_cube_lemma, check_tower_lemma, coskeleton_tower, functor_from_keys,
                           group_category, induced_on_coskeleta, negative_cube_control, quotient_functor,
                           total_group_category, unit_functor)
    from .groupoid import FiniteGroup

    G = FiniteGroup.cyclic(2)
    C1, C2 = group_category(G, 1, 4), group_category(G, 2, 4)
    gamma = functor_from_keys(C1, C2, [0], lambda x, y, s: s)
    if name == "positive":
        E1, _ = total_group_category(G, 4, 1)
        E2, _ = total_group_category(G, 4, 2)
        a1, a2 = unit_functor(C1), unit_functor(C2)
        return check_cube_lemma(CospanSquare(a1, quotient_functor(E1, C1, G)),
                                CospanSquare(a2, quotient_functor(E2, C2, G)),
                                functor_from_keys(a1.source, a2.source, [0], lambda x, y, s: s),
                                functor_from_keys(E1, E2, [0], lambda x, y, s: s), gamma, D=3)
    if name == "negative":
        return check_cube_lemma(*negative_cube_control(3), D=3, strict=False)
    if name == "tower":
        TA, TB = coskeleton_tower(C1, 2, 4), coskeleton_tower(C2, 2, 4)
        comps = {m: induced_on_coskeleta(gamma, TA.stages[m], TB.stages[m]) for m in TA.stages}
        return check_tower_lemma(TA, TB, comps, D=3)
    raise InputError(f"field 'builtin': unknown cube {name!r} (known: positive, negative, tower)")


def cmd_cube_check(args, cfg):
    data = load_json(args.file)
    if detect_kind(data) != "cube" or "builtin" not in data:
        raise InputError(f"{args.file}: expected {{\"type\": \"cube\", \"builtin\": ...}}")
    rep = _cube_builtin(str(data["builtin"]))
    out = {"ok": rep.ok, "hypotheses_hold": rep.hypotheses_hold, "report": rep.describe().splitlines()}
    if not rep.ok:
        raise Refused(rep.describe())
    return out, rep.describe()


def cmd_selftest(args, cfg):
    from .acceptance import CRITERIA, run_criterion

    try:
        select = [int(x) for x in args.only.split(",")] if args.only else None
    except ValueError:
        raise InputError("--only: expected comma-separated criterion numbers") from None
    if select and any(not 1 <= i <= len(CRITERIA) for i in select):
        raise InputError(f"--only: criteria are numbered 1..{len(CRITERIA)}")
    results = []
    lines = []
    for i in range(1, len(CRITERIA) + 1):
        if select is not None and i not in select:
            continue
        r = run_criterion(i, cfg.seed)
        results.append(r)
        lines.append(r.line())
        if args.verbose or not r.ok:
            lines += [f"    {d}" for d in r.details]
        if cfg.format == "json":
            print(r.line(), file=sys.stderr, flush=True)
    out = {"criteria": [{"number": r.number, "name": r.name, "ok": r.ok, "seconds": round(r.seconds, 3),
                         "details": r.details} for r in results]}
    if not all(r.ok for r in results):
        raise Refused("\n".join(lines))
    return out, "\n".join(lines)


# -- parser ---------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-dim", dest="max_dim", type=int, default=argparse.SUPPRESS, help="maximal simplicial dimension D")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="simplex budget")
    common.add_argument("--group-bound", dest="group_bound", type=int, default=argparse.SUPPRESS,
                        help="largest fundamental group order to certify")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="postnikov", description="Postnikov towers and k-invariants", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        q = sub.add_parser(name, help=help_, parents=[common])
        q.set_defaults(fn=fn)
        return q

    add("validate", cmd_validate, "check an input file").add_argument("file")
    add("homology", cmd_homology, "integral homology").add_argument("file")
    q = add("cohomology", cmd_cohomology, "cohomology with Z/m coefficients (0 means Z)")
    q.add_argument("file")
    q.add_argument("--degree", type=int, default=None)
    q.add_argument("--coefficients", type=int, default=0)
    q.add_argument("--twisted", action="store_true", help="sign local system through pi_1 of order 2")
    add("pi1", cmd_pi1, "certified fundamental groups").add_argument("file")
    q = add("cover", cmd_cover, "universal cover")
    q.add_argument("file")
    q.add_argument("--base", type=int, default=0)
    q = add("em", cmd_em, "parametrized Eilenberg-MacLane space over N(Z/m)")
    q.add_argument("--group", default="Z/2", help="coefficient group Z/m")
    q.add_argument("--degree", type=int, default=1)
    q.add_argument("--base", default="1", help="order of a cyclic base group, or a groupoid JSON file")
    q.add_argument("--action", choices=("trivial", "sign"), default="trivial")
    q.add_argument("--model", choices=("minimal", "bar"), default="minimal")
    for name, fn, help_ in (("tower", cmd_tower, "Postnikov tower of a space or chain complex"),
                            ("chain-tower", cmd_chain_tower, "Postnikov tower of a chain complex")):
        q = add(name, fn, help_)
        q.add_argument("file")
        q.add_argument("--stages", type=int, default=None)
        q.add_argument("--save", default=None, help="write the tower bundle JSON here")
    q = add("kinv", cmd_kinv, "k-invariant at a stage")
    q.add_argument("file")
    q.add_argument("--stage", type=int, default=2)
    add("reconstruct", cmd_reconstruct, "two-stage object from a class").add_argument("file")
    q = add("check-mult", cmd_check_mult, "multiplicativity on a product")
    q.add_argument("first")
    q.add_argument("second")
    q = add("cat-tower", cmd_cat_tower, "hom-wise tower of a simplicial category")
    q.add_argument("file")
    q.add_argument("--stages", type=int, default=2)
    q = add("dk-check", cmd_dk_check, "Dwyer-Kan certificate for a functor")
    q.add_argument("file")
    q.add_argument("--level", type=int, default=None)
    add("cube-check", cmd_cube_check, "cube and tower lemma checkers").add_argument("file")
    q = add("selftest", cmd_selftest, "run the acceptance suite")
    q.add_argument("--only", default=None, help="comma-separated criterion numbers")
    q.add_argument("--verbose", action="store_true")
    return p


def _emit(payload: dict, text: str, cfg: RunConfig | None, status: int, stream) -> None:
    if cfg is not None and cfg.format == "json":
        payload = dict(payload)
        payload["status"] = status
        print(json.dumps(payload, sort_keys=True, default=str), file=stream)
    elif text:
        print(text, file=stream)


def dispatch(argv: list[str] | None = None, env: dict | None = None) -> int:
    from .em import InfiniteCoefficients
    from .enriched import PreconditionNotCertified
    from .pi1 import NotCertified
    from .tower import HurewiczError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    cfg = None
    try:
        cfg = RunConfig.resolve(args, env)
        payload, text = args.fn(args, cfg)
        _emit({"command": args.command, "config": asdict(cfg), **payload}, text, cfg, EXIT_OK, sys.stdout)
        return EXIT_OK
    except InputError as exc:
        _emit({"error": str(exc)}, f"error: {exc}", cfg, EXIT_MALFORMED, sys.stderr)
        return EXIT_MALFORMED
    except BudgetExceeded as exc:
        _emit({"error": str(exc)}, f"budget exhausted: {exc}", cfg, EXIT_BUDGET, sys.stderr)
        return EXIT_BUDGET
    except (Refused, NotCertified, PreconditionNotCertified, HurewiczError) as exc:
        _emit({"error": str(exc)}, f"refused: {exc}", cfg, EXIT_REFUSED, sys.stdout)
        return EXIT_REFUSED
    except (SimplicialError, InfiniteCoefficients) as exc:
        _emit({"error": str(exc)}, f"error: {exc}", cfg, EXIT_MALFORMED, sys.stderr)
        return EXIT_MALFORMED


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
