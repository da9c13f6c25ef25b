"""Alternatives, weak orders and profiles.

Weak orders are stored as boolean matrices ``rel[x, y]`` meaning "x is at
least as good as y".  The canonical enumeration sorts relations by their
off-diagonal bits read row by row, largest first, with strict (tie-free)
orders placed before orders containing ties.  With this convention order 0
on three alternatives is a > b > c.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LETTERS = "abcdefgh"

DEFAULT_MAX_VOTERS = 3
DEFAULT_MAX_ALTERNATIVES = 4
GUARD_ENV = "ARROWLAB_GUARD_OVERRIDE"


class ParameterError(ValueError):
    """Raised when voters/alternatives fall outside the allowed range."""


def guard_overridden() -> bool:
    return os.environ.get(GUARD_ENV, "") == "1"


@dataclass(frozen=True)
class Config:
    voters: int = 2
    alternatives: int = 3
    override_guard: bool = False

    def __post_init__(self):
        if self.voters < 2:
            raise ParameterError(f"need at least 2 voters, got {self.voters}")
        if self.alternatives < 3:
            raise ParameterError(f"need at least 3 alternatives, got {self.alternatives}")
        if self.alternatives > len(LETTERS):
            raise ParameterError(f"at most {len(LETTERS)} alternatives are nameable")
        if not (self.override_guard or guard_overridden()):
            if self.voters > DEFAULT_MAX_VOTERS or self.alternatives > DEFAULT_MAX_ALTERNATIVES:
                raise ParameterError(
                    f"(n={self.voters}, m={self.alternatives}) exceeds the default guard "
                    f"n<={DEFAULT_MAX_VOTERS}, m<={DEFAULT_MAX_ALTERNATIVES}; "
                    f"set {GUARD_ENV}=1 to lift it"
                )

    @property
    def n(self) -> int:
        return self.voters

    @property
    def m(self) -> int:
        return self.alternatives


def voter_name(k: int) -> str:
    # p, q, r as in the two/three voter societies; beyond that v3, v4, ...
    return "pqr"[k] if k < 3 else f"v{k}"


def alt_name(x: int) -> str:
    return LETTERS[x]


def alt_index(letter: str) -> int:
    idx = LETTERS.find(letter)
    if idx < 0 or len(letter) != 1:
        raise ValueError(f"unknown alternative {letter!r}")
    return idx


def ordered_pairs(m: int) -> list[tuple[int, int]]:
    """Ordered pairs (x, y), x != y, in lexicographic order."""
    return [(x, y) for x in range(m) for y in range(m) if x != y]


def unordered_pairs(m: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(m), 2))


@dataclass(frozen=True)
class WeakOrder:
    rel: tuple[tuple[bool, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rel)

    def prefers(self, x: int, y: int) -> bool:
        """Weak preference: x is at least as good as y."""
        return self.rel[x][y]

    def matrix(self) -> np.ndarray:
        return np.array(self.rel, dtype=bool)

    def rows(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.rel]

    def is_strict(self) -> bool:
        m = self.size
        return not any(self.rel[x][y] and self.rel[y][x] for x in range(m) for y in range(m) if x != y)

    def describe(self) -> str:
        """Render as e.g. ``c>a~b``."""
        m = self.size
        # rank = number of alternatives strictly above
        above = [sum(1 for y in range(m) if strict_prefers(self, y, x)) for x in range(m)]
        levels: dict[int, list[int]] = {}
        for x in range(m):
            levels.setdefault(above[x], []).append(x)
        return ">".join("~".join(alt_name(x) for x in levels[k]) for k in sorted(levels))

    @classmethod
    def from_matrix(cls, rel) -> "WeakOrder":
        arr = np.asarray(rel, dtype=bool)
        return cls(tuple(tuple(bool(v) for v in row) for row in arr))

    @classmethod
    def from_ranking(cls, text: str) -> "WeakOrder":
        """Parse ``a>b~c`` style rankings (every alternative listed once)."""
        levels = [lvl.split("~") for lvl in text.replace(" ", "").split(">")]
        flat = [alt_index(a) for lvl in levels for a in lvl]
        m = len(flat)
        if sorted(flat) != list(range(m)):
            raise ValueError(f"ranking {text!r} must list each of the first m letters once")
        pos = {}
        for rank, lvl in enumerate(levels):
            for a in lvl:
                pos[alt_index(a)] = rank
        return cls(tuple(tuple(pos[x] <= pos[y] for y in range(m)) for x in range(m)))


def is_weak_order(rel) -> bool:
    """True iff the square boolean matrix is reflexive, complete and transitive."""
    r = np.asarray(rel, dtype=bool)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        return False
    if not r.diagonal().all():
        return False
    if not (r | r.T).all():
        return False
    # R(x,y) & R(y,z) -> R(x,z), via boolean matrix product
    composed = (r.astype(np.int64) @ r.astype(np.int64)) > 0
    return bool(not (composed & ~r).any())


def strict_prefers(o: WeakOrder, x: int, y: int) -> bool:
    return o.rel[x][y] and not o.rel[y][x]


def _check_m(m: int, override: bool = False) -> None:
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    if m > DEFAULT_MAX_ALTERNATIVES and not (override or guard_overridden()):
        raise ParameterError(f"m={m} exceeds the default guard m<={DEFAULT_MAX_ALTERNATIVES}")


def _offdiag_key(o: WeakOrder) -> tuple[int, ...]:
    m = o.size
    return tuple(int(o.rel[x][y]) for x in range(m) for y in range(m) if x != y)


@lru_cache(maxsize=None)
def _weak_orders(m: int) -> tuple[WeakOrder, ...]:
    # every weak order is "rank by a surjection onto 0..k-1"; enumerate those
    found = set()
    for ranks in itertools.product(range(m), repeat=m):
        used = sorted(set(ranks))
        if used != list(range(len(used))):
            continue
        found.add(tuple(tuple(ranks[x] <= ranks[y] for y in range(m)) for x in range(m)))
    orders = [WeakOrder(rel) for rel in found]
    orders.sort(key=lambda o: (not o.is_strict(), tuple(-b for b in _offdiag_key(o))))
    return tuple(orders)


def enumerate_weak_orders(m: int, override: bool = False) -> list[WeakOrder]:
    _check_m(m, override)
    return list(_weak_orders(m))


def fingerprint(m: int) -> str:
    """SHA-256 over the canonical enumeration; ties ProfileIds to this ordering."""
    h = hashlib.sha256()
    for o in _weak_orders(m):
        h.update(("/".join(o.rows()) + "\n").encode())
    return h.hexdigest()


def order_index(o: WeakOrder) -> int:
    return _weak_orders(o.size).index(o)


# Order numbers (1-based) that the two-voter walkthrough names explicitly.
REFERENCE_ORDER_RANKINGS = {
    1: "a>b>c",
    2: "a>c>b",
    4: "b>c>a",
    5: "c>a>b",
    6: "c>b>a",
    8: "c>a~b",
}


def reference_order_remap() -> dict[int, int]:
    """Map attested 1-based order numbers to canonical 0-based OrderIds (m=3)."""
    orders = _weak_orders(3)
    return {k: orders.index(WeakOrder.from_ranking(v)) for k, v in REFERENCE_ORDER_RANKINGS.items()}


def profile_count(cfg: Config) -> int:
    return len(_weak_orders(cfg.m)) ** cfg.n


@dataclass(frozen=True)
class Profile:
    orders: tuple[int, ...]

    def voter(self, k: int, m: int) -> WeakOrder:
        return _weak_orders(m)[self.orders[k]]


def profile_id(orders, m: int) -> int:
    """Row-major index: voter 0 is the most significant digit."""
    base = len(_weak_orders(m))
    pid = 0
    for o in orders:
        if not 0 <= o < base:
            raise ValueError(f"order id {o} out of range for m={m}")
        pid = pid * base + o
    return pid


def profile_orders(pid: int, cfg: Config) -> tuple[int, ...]:
    base = len(_weak_orders(cfg.m))
    digits = []
    for _ in range(cfg.n):
        pid, d = divmod(pid, base)
        digits.append(d)
    if pid:
        raise ValueError("profile id out of range")
    return tuple(reversed(digits))


def enumerate_profiles(cfg: Config):
    base = len(_weak_orders(cfg.m))
    for orders in itertools.product(range(base), repeat=cfg.n):
        yield Profile(orders)


@lru_cache(maxsize=None)
def profile_table(n: int, m: int) -> np.ndarray:
    """int array (profiles, n) of OrderIds in ProfileId order."""
    base = len(_weak_orders(m))
    grids = np.indices((base,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


@lru_cache(maxsize=None)
def order_tensor(m: int) -> np.ndarray:
    """bool array (orders, m, m) of relation matrices."""
    return np.array([o.rel for o in _weak_orders(m)], dtype=bool).reshape(-1, m, m)


def pair_state(o: WeakOrder, x: int, y: int) -> tuple[bool, bool]:
    return (o.rel[x][y], o.rel[y][x])


def profiles_agree_on_pair(X: Profile, Y: Profile, x: int, y: int, m: int) -> bool:
    if len(X.orders) != len(Y.orders):
        raise ValueError("profiles come from different societies")
    return all(
        pair_state(X.voter(k, m), x, y) == pair_state(Y.voter(k, m), x, y)
        for k in range(len(X.orders))
    )


def unanimous_strict(P: Profile, x: int, y: int, m: int) -> bool:
    return all(strict_prefers(P.voter(k, m), x, y) for k in range(len(P.orders)))


def order_to_json(i: int, o: WeakOrder) -> dict:
    return {"id": i, "ranking": o.describe(), "rows": o.rows()}


def orders_text(m: int) -> str:
    return "".join(f"{i} {o.describe()} {'/'.join(o.rows())}\n" for i, o in enumerate(_weak_orders(m)))


def orders_json(m: int) -> str:
    data = {
        "alternatives": m,
        "fingerprint": fingerprint(m),
        "orders": [order_to_json(i, o) for i, o in enumerate(_weak_orders(m))],
    }
    return json.dumps(data, indent=2) + "\n"


def profiles_text(cfg: Config) -> str:
    orders = _weak_orders(cfg.m)
    out = []
    for pid, row in enumerate(profile_table(cfg.n, cfg.m)):
        voters = " ".join(f"{voter_name(k)}:{orders[o].describe()}" for k, o in enumerate(row))
        out.append(f"{pid} {voters}\n")
    return "".join(out)


def profiles_json(cfg: Config) -> str:
    orders = _weak_orders(cfg.m)
    data = {
        "voters": cfg.n,
        "alternatives": cfg.m,
        "fingerprint": fingerprint(cfg.m),
        "profiles": [
            {"id": pid, "orders": [int(o) for o in row], "rows": [orders[o].rows() for o in row]}
            for pid, row in enumerate(profile_table(cfg.n, cfg.m))
        ],
    }
    return json.dumps(data) + "\n"
