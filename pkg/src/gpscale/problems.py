"""Expression of program trees and the ORDER/TRAP fitness functions.

Expression walks the leaves left to right: junk leaves are dropped, a leaf
under a NEG_JOIN ancestor flips polarity once, and the first surviving
occurrence of either terminal of a pair decides that pair's bit.  Pairs that
never occur express their negative terminal, i.e. bit False.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .primitives import NEG_JOIN, PrimitiveSet
from .trees import Node


@dataclass(frozen=True)
class TrapParams:
    """Group size ``k`` and signal ``delta`` of the deceptive trap."""

    k: int
    delta: float

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"trap group size k must be >= 2, got {self.k}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


@dataclass(frozen=True)
class ProblemSpec:
    """A fitness landscape: ORDER when ``trap`` is None, TRAP otherwise."""

    primitives: PrimitiveSet
    trap: TrapParams | None = None

    def __post_init__(self) -> None:
        if self.trap is not None and self.primitives.num_pairs % self.trap.k:
            raise ValueError(
                f"num_pairs {self.primitives.num_pairs} is not divisible by "
                f"trap group size {self.trap.k}"
            )

    @property
    def family(self) -> str:
        return "order" if self.trap is None else "trap"

    @cached_property
    def optimum_fitness(self) -> float:
        l = self.primitives.num_pairs
        return float(l) if self.trap is None else float(l // self.trap.k)

    def fitness(self, bits: list[bool]) -> float:
        if self.trap is None:
            return order_fitness(bits)
        return trap_fitness(bits, self.trap)


def order_problem(num_pairs: int, num_junk: int = 0, neg_join: bool = False) -> ProblemSpec:
    return ProblemSpec(PrimitiveSet(num_pairs, num_junk, neg_join))


def trap_problem(
    num_pairs: int,
    k: int = 3,
    delta: float = 1.0,
    num_junk: int = 0,
    neg_join: bool = False,
) -> ProblemSpec:
    return ProblemSpec(PrimitiveSet(num_pairs, num_junk, neg_join), TrapParams(k, delta))


def express(tree: Node, ps: PrimitiveSet) -> list[bool]:
    """Expressed bit vector of a tree: bits[i] is True iff X_{i+1} wins pair i."""
    num_pairs = ps.num_pairs
    bits = [False] * num_pairs
    seen = [False] * num_pairs
    remaining = num_pairs
    leaf_info = ps.leaf_info
    if ps.neg_join:
        stack: list[tuple[Node, bool]] = [(tree, False)]
        while stack:
            node, negated = stack.pop()
            children = node.children
            if children:
                flag = negated or node.symbol == NEG_JOIN
                stack.append((children[1], flag))
                stack.append((children[0], flag))
            else:
                info = leaf_info[node.symbol]
                if info is None:
                    continue
                index, positive = info
                if not seen[index]:
                    seen[index] = True
                    bits[index] = positive != negated
                    remaining -= 1
                    if not remaining:
                        break
        return bits
    # JOIN-only fast path: no negation flags to carry
    plain: list[Node] = [tree]
    pop = plain.pop
    push = plain.append
    while plain:
        node = pop()
        children = node.children
        if children:
            push(children[1])
            push(children[0])
        else:
            info = leaf_info[node.symbol]
            if info is None:
                continue
            index, positive = info
            if not seen[index]:
                seen[index] = True
                bits[index] = positive
                remaining -= 1
                if not remaining:
                    break
    return bits


def order_fitness(bits: list[bool]) -> float:
    """One fitness unit per expressed positive terminal."""
    return float(sum(bits))


def trap_subfunction(u: int, tp: TrapParams) -> float:
    """Deceptive trap over one k-bit group: 1 at u=k, else (1-delta)(1-u/(k-1))."""
    if not 0 <= u <= tp.k:
        raise ValueError(f"u must be in 0..{tp.k}, got {u}")
    if u == tp.k:
        return 1.0
    return (1.0 - tp.delta) * (1.0 - u / (tp.k - 1))


def trap_fitness(bits: list[bool], tp: TrapParams) -> float:
    """Sum of the trap subfunction over consecutive k-bit groups."""
    if len(bits) % tp.k:
        raise ValueError(f"bit count {len(bits)} is not divisible by k={tp.k}")
    total = 0.0
    for start in range(0, len(bits), tp.k):
        total += trap_subfunction(sum(bits[start : start + tp.k]), tp)
    return total


def evaluate(tree: Node, problem: ProblemSpec) -> float:
    """Fitness of one tree (pure; see :class:`Evaluator` for counted calls)."""
    return problem.fitness(express(tree, problem.primitives))


class Evaluator:
    """Fitness function of one run; every call bumps the evaluation counter."""

    __slots__ = ("problem", "evaluations")

    def __init__(self, problem: ProblemSpec) -> None:
        self.problem = problem
        self.evaluations = 0

    def __call__(self, tree: Node) -> float:
        self.evaluations += 1
        return self.problem.fitness(express(tree, self.problem.primitives))


def optimum_reachable(trees: list[Node], ps: PrimitiveSet) -> bool:
    """Whether the all-positive optimum is still constructible from the symbols
    present anywhere in ``trees``.

    Variation only rearranges existing symbols (subtree swaps and prototype
    sampling both draw from what the population contains), so once pair i has
    neither X_i nor, with NEG_JOIN available, ~X_i anywhere, the optimum is
    permanently out of reach.
    """
    num_pairs = ps.num_pairs
    leaf_info = ps.leaf_info
    have_pos = [False] * num_pairs
    if not ps.neg_join:
        remaining = num_pairs
        for tree in trees:
            stack = [tree]
            while stack:
                node = stack.pop()
                children = node.children
                if children:
                    stack.append(children[1])
                    stack.append(children[0])
                    continue
                info = leaf_info[node.symbol]
                if info is None or not info[1]:
                    continue
                index = info[0]
                if not have_pos[index]:
                    have_pos[index] = True
                    remaining -= 1
                    if not remaining:
                        return True
        return False
    have_neg = [False] * num_pairs
    have_neg_join = False
    for tree in trees:
        stack = [tree]
        while stack:
            node = stack.pop()
            children = node.children
            if children:
                if node.symbol == NEG_JOIN:
                    have_neg_join = True
                stack.append(children[1])
                stack.append(children[0])
                continue
            info = leaf_info[node.symbol]
            if info is None:
                continue
            index, positive = info
            if positive:
                have_pos[index] = True
            else:
                have_neg[index] = True
    return all(
        have_pos[i] or (have_neg_join and have_neg[i]) for i in range(num_pairs)
    )
