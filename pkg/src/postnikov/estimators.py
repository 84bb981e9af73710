"""Estimator-style wrappers: configure, ``fit`` an input, read fitted attributes.

Parameters live in ``__init__`` unchanged; everything learned from the input
ends in an underscore.  ``fit`` records extraction failures in ``errors_``
instead of raising, so a tower without k-invariants is still usable.
"""
from __future__ import annotations

import inspect

from .chains import ChainComplex
from .io import detect_kind, load_chain_complex, load_json, load_sset
from .sset import SimplicialSet

__all__ = ["PostnikovTower", "ChainPostnikovTower"]


class _Params:
    def get_params(self) -> dict:
        names = [p for p in inspect.signature(type(self).__init__).parameters if p != "self"]
        return {n: getattr(self, n) for n in names}

    def set_params(self, **params) -> "_Params":
        valid = self.get_params()
        for k, v in params.items():
            if k not in valid:
                raise ValueError(f"unknown parameter {k!r} for {type(self).__name__}")
            setattr(self, k, v)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    def _check_fitted(self) -> None:
        if not hasattr(self, "tower_"):
            raise RuntimeError(f"{type(self).__name__} is not fitted yet; call fit first")

    @property
    def ok_(self) -> bool:
        self._check_fitted()
        return self.tower_.ok and not self.errors_

    def report(self) -> str:
        self._check_fitted()
        return "\n".join([self.tower_.report()] + [f"error: {e}" for e in self.errors_])


class PostnikovTower(_Params):
    """Coskeletal tower of a finite simplicial set with stage-2 k-invariant."""

    def __init__(self, stages: int = 2, max_dim: int = 4, budget: int | None = None, group_bound: int = 64,
                 extract: bool = True):
        self.stages = stages
        self.max_dim = max_dim
        self.budget = budget
        self.group_bound = group_bound
        self.extract = extract

    def fit(self, X) -> "PostnikovTower":
        from .tower import HurewiczError, build_space_tower

        if isinstance(X, (str, dict)):
            X = load_sset(load_json(X) if isinstance(X, str) else X, self.max_dim)
        if not isinstance(X, SimplicialSet):
            raise TypeError("fit expects a SimplicialSet, a JSON dict or a path")
        self.errors_: list[str] = []
        try:
            T = build_space_tower(X, self.stages, self.max_dim, self.budget, self.extract, self.group_bound)
        except HurewiczError as exc:
            self.errors_.append(f"k-invariant extraction: {exc}")
            T = build_space_tower(X, self.stages, self.max_dim, self.budget, False, self.group_bound)
        if self.extract:
            self.errors_ += [f"stage {e.stage} k-invariant: {e.detail}" for e in T.ledger
                             if e.item == "k-invariant" and e.stage not in T.kinvariants]
        self.tower_ = T
        self.stages_ = T.stages
        self.kinvariants_ = T.kinvariants
        self.ledger_ = T.ledger
        return self

    def k_invariant(self, a: int = 2):
        self._check_fitted()
        if a not in self.kinvariants_:
            raise KeyError(f"no k-invariant at stage {a}")
        return self.kinvariants_[a]


class ChainPostnikovTower(_Params):
    """Good-truncation tower of a connective integer chain complex."""

    def __init__(self, stages: int | None = None):
        self.stages = stages

    def fit(self, C) -> "ChainPostnikovTower":
        from .chain_tower import chain_postnikov_tower

        if isinstance(C, (str, dict)):
            data = load_json(C) if isinstance(C, str) else C
            if detect_kind(data) != "chain-complex":
                raise TypeError("fit expects a chain complex")
            C = load_chain_complex(data)
        if not isinstance(C, ChainComplex):
            raise TypeError("fit expects a ChainComplex, a JSON dict or a path")
        self.errors_: list[str] = []
        S = self.stages if self.stages is not None else C.top + 1
        T = chain_postnikov_tower(C, S)
        self.tower_ = T
        self.stages_ = T.stages
        self.squares_ = T.squares
        self.ledger_ = T.ledger
        return self
