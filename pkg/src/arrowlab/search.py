"""Case-split refutation of non-dictatorship, and model enumeration."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .axioms import (
    UNKNOWN,
    CellAssignment,
    Conflict,
    Constraints,
    StateError,
    Step,
    build_constraints,
    detect_dictators,
    initial_assignment,
    propagate_to_fixpoint,
)
from .core import Config, fingerprint, unordered_pairs


class TheoremFalsified(RuntimeError):
    """A branch reached a complete assignment with no falsified constraint."""


@dataclass
class SearchNode:
    depth: int
    decision: tuple[int, bool]
    snapshot: tuple[int, int]


@dataclass
class Branch:
    """One node of a refutation tree.

    ``cell``/``value`` is the decision taken on entry (None at the root),
    ``steps`` the propagation run after it, ``propagated`` whether that run
    happened at all (not for the first half of a pair split, nor for a case
    that opens the next pattern split), and ``conflict`` closes a leaf.
    """

    cell: int | None = None
    value: bool | None = None
    steps: list[Step] = field(default_factory=list)
    conflict: Conflict | None = None
    children: list["Branch"] = field(default_factory=list)
    propagated: bool = False

    def leaves(self, path=()):
        here = path if self.cell is None else path + ((self.cell, self.value),)
        if not self.children:
            yield here, self
        for ch in self.children:
            yield from ch.leaves(here)

    def count(self) -> int:
        return 1 + sum(ch.count() for ch in self.children)


@dataclass
class Refutation:
    cfg: Config
    root: Branch
    fingerprint: str
    unanimity: bool = True

    def leaves(self):
        return list(self.root.leaves())

    def top_cases(self) -> list[tuple[tuple[tuple[int, bool], ...], Branch]]:
        """Leaves of the root split (its one or two decision levels)."""
        out = []
        for ch in self.root.children:
            if ch.children and ch.conflict is None and not ch.steps:
                for g in ch.children:
                    out.append((((ch.cell, ch.value), (g.cell, g.value)), g))
            else:
                out.append((((ch.cell, ch.value),), ch))
        return out


@dataclass
class Model:
    states: list[int]
    dictators: set[int]


@lru_cache(maxsize=None)
def _opposed_cells(n: int, m: int) -> tuple[int, ...]:
    """Cells of pairs where one voter alone strictly prefers the lower letter
    and every other voter strictly prefers the higher one, in profile order."""
    cons = _plain_constraints(Config(n, m, override_guard=True))
    out = []
    for pid in range(cons.nprofiles):
        for x, y in unordered_pairs(m):
            fwd = cons.strict_mask[:, cons.cell(pid, x, y)]
            bwd = cons.strict_mask[:, cons.cell(pid, y, x)]
            if fwd.sum() == 1 and bwd.sum() == n - 1:
                out.append(cons.cell(pid, x, y))
                out.append(cons.cell(pid, y, x))
    return tuple(out)


@lru_cache(maxsize=None)
def _plain_constraints(cfg: Config) -> Constraints:
    return build_constraints(cfg, non_dict=False)


def pick_split_cell(a: CellAssignment, cfg: Config) -> int:
    states = a.states
    for c in _opposed_cells(cfg.n, cfg.m):
        if states[c] == UNKNOWN:
            return c
    try:
        return states.index(UNKNOWN)
    except ValueError:
        raise StateError("every cell is already determined") from None


def _snapshot(a: CellAssignment) -> tuple[int, int]:
    return (len(a.trail), a.propagated)


def _restore(a: CellAssignment, snap: tuple[int, int]) -> None:
    a.truncate(snap[0])
    a.propagated = snap[1]


@lru_cache(maxsize=None)
def pattern_profiles(n: int, m: int) -> tuple[int, ...]:
    """ProfileIds R_k: voter k holds order 0, every other voter order 1.

    For m=3 these are the profiles where k alone ranks b above c while the
    rest rank c above b (order 0 is a>b>c, order 1 is a>c>b).
    """
    out = []
    for k in range(n):
        pid = 0
        for j in range(n):
            pid = pid * _order_count(m) + (0 if j == k else 1)
        out.append(pid)
    return tuple(out)


def _order_count(m: int) -> int:
    from .core import enumerate_weak_orders

    return len(enumerate_weak_orders(m, override=True))


def _pattern_cells(cons: Constraints, pid: int) -> tuple[int, int]:
    """The (lower, higher) and (higher, lower) cells of the opposed pair of R_k."""
    for x, y in unordered_pairs(cons.cfg.m):
        c = cons.cell(pid, x, y)
        if cons.strict_mask[:, c].sum() == 1 and cons.strict_mask[:, cons.cell(pid, y, x)].sum() == cons.cfg.n - 1:
            return c, cons.cell(pid, y, x)
    raise ValueError(f"profile {pid} has no opposed pair")


def refute(cfg: Config, unanimity: bool = True, cons: Constraints | None = None, nest: bool | None = None) -> Refutation:
    """Drive every case of the canonical split to a classified conflict.

    The split is taken on both cells of the chosen pair before propagating,
    giving the four social states of the pair; a cell whose mirror is
    already determined is split alone.  With ``nest`` (default for n >= 3)
    a case where the lone voter of pattern profile R_k is overruled opens
    the split on R_{k+1} before any propagation, so the pattern profiles
    are cased on in a chain R_0, R_1, ...
    """
    if cons is None:
        cons = build_constraints(cfg, non_dict=True, unanimity=unanimity)
    if nest is None:
        nest = cfg.n >= 3
    patterns = [_pattern_cells(cons, pid) for pid in pattern_profiles(cfg.n, cfg.m)]
    pattern_of = {cells[0]: k for k, cells in enumerate(patterns)}
    pattern_of.update({cells[1]: k for k, cells in enumerate(patterns)})
    a = initial_assignment(cons)
    _, _, conflict = propagate_to_fixpoint(a, cons)
    root = Branch(steps=list(a.trail), conflict=conflict, propagated=True)
    stack: list[SearchNode] = []

    def close(node: Branch) -> None:
        _, steps, conflict = propagate_to_fixpoint(a, cons)
        node.steps = steps
        node.propagated = True
        if conflict is not None:
            node.conflict = conflict
            return
        if a.is_complete():
            raise TheoremFalsified(
                f"conflict-free complete assignment reached at depth {len(stack)}; "
                "the encoding admits a non-dictatorial social welfare function"
            )
        split(node, pick_split_cell(a, cfg))

    def settle(node: Branch, c: int) -> None:
        k = pattern_of.get(c)
        if nest and k is not None and k + 1 < cfg.n:
            lo, hi = patterns[k]
            nxt = patterns[k + 1][0]
            if a.states[lo] == 0 and a.states[hi] == 1 and a.states[nxt] == UNKNOWN:
                split(node, nxt)
                return
        close(node)

    def split(node: Branch, c: int) -> None:
        mirror = cons.mirror(c)
        pair_split = a.states[mirror] == UNKNOWN
        for v in (True, False):
            stack.append(SearchNode(len(stack) + 1, (c, v), _snapshot(a)))
            a.decide(c, v)
            child = Branch(c, v)
            node.children.append(child)
            if pair_split:
                for w in (True, False):
                    stack.append(SearchNode(len(stack) + 1, (mirror, w), _snapshot(a)))
                    a.decide(mirror, w)
                    grand = Branch(mirror, w)
                    child.children.append(grand)
                    settle(grand, c)
                    _restore(a, stack.pop().snapshot)
            else:
                settle(child, c)
            _restore(a, stack.pop().snapshot)

    if conflict is None:
        split(root, pick_split_cell(a, cfg))
    return Refutation(cfg, root, fingerprint(cfg.m), unanimity)


def enumerate_models(cfg: Config, limit: int | None = None) -> list[Model]:
    """All complete assignments satisfying completeness, transitivity,
    unanimity and IIA (no non-dictatorship), in depth-first order."""
    if limit is not None and limit <= 0:
        return []
    cons = _plain_constraints(cfg)
    a = initial_assignment(cons)
    models: list[Model] = []

    def walk() -> bool:
        _, _, conflict = propagate_to_fixpoint(a, cons)
        if conflict is not None:
            return True
        if a.is_complete():
            models.append(Model(list(a.states), detect_dictators(a, cons)))
            return limit is None or len(models) < limit
        c = pick_split_cell(a, cfg)
        for v in (True, False):
            snap = _snapshot(a)
            a.decide(c, v)
            go_on = walk()
            _restore(a, snap)
            if not go_on:
                return False
        return True

    walk()
    return models


def replay_branch(ref: Refutation, path, cons: Constraints) -> CellAssignment:
    """Rebuild the assignment at the end of a root-to-leaf path of decisions,
    propagating exactly where the search did."""
    a = initial_assignment(cons)
    propagate_to_fixpoint(a, cons)
    node = ref.root
    for c, v in path:
        node = next((ch for ch in node.children if (ch.cell, ch.value) == (c, v)), None)
        if node is None:
            raise ValueError(f"path leaves the refutation tree at cell {c}")
        a.decide(c, v)
        if node.propagated:
            propagate_to_fixpoint(a, cons)
    return a
