"""Generational GP: binary tournament, subtree crossover at rate 1, whole
population replacement, no mutation and no elitism."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .problems import Evaluator, ProblemSpec, optimum_reachable
from .trees import Node, ramped_half_and_half

# Generations between checks that the optimum is still reachable from the
# symbols left in the population (a lost symbol can never reappear).
REACHABILITY_CHECK_PERIOD = 5


@dataclass(frozen=True)
class GpConfig:
    """Run parameters shared by the GP and prototype-tree engines."""

    pop_size: int
    max_depth: int
    max_generations: int = 200
    crossover_retries: int = 10
    internal_node_bias: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValueError(f"pop_size must be even and >= 2, got {self.pop_size}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.max_generations < 0:
            raise ValueError(f"max_generations must be >= 0, got {self.max_generations}")
        if not 0.0 <= self.internal_node_bias <= 1.0:
            raise ValueError(
                f"internal_node_bias must be in [0, 1], got {self.internal_node_bias}"
            )


@dataclass(frozen=True, slots=True)
class Individual:
    tree: Node
    fitness: float


@dataclass(frozen=True)
class RunResult:
    success: bool
    evaluations: int
    generations_used: int
    best_fitness: float


def binary_tournament(pop: list[Individual], rng: random.Random) -> Individual:
    """Draw two individuals uniformly with replacement; the fitter one wins,
    ties decided by a fair coin."""
    n = len(pop)
    a = pop[rng.randrange(n)]
    b = pop[rng.randrange(n)]
    if a.fitness > b.fitness:
        return a
    if b.fitness > a.fitness:
        return b
    return a if rng.random() < 0.5 else b


# In a tree whose functions all have arity 2, a subtree of size s holds
# (s-1)/2 internal nodes and (s+1)/2 leaves; picks descend on those counts.


def _pick_internal(tree: Node, k: int) -> tuple[Node, int, list[int]]:
    """k-th internal node in preorder: (node, root distance, child-index path)."""
    path: list[int] = []
    node = tree
    while True:
        if k == 0:
            return node, len(path), path
        k -= 1
        left, right = node.children
        left_internal = (left.size - 1) // 2
        if k < left_internal:
            path.append(0)
            node = left
        else:
            k -= left_internal
            path.append(1)
            node = right


def _pick_leaf(tree: Node, k: int) -> tuple[Node, int, list[int]]:
    """k-th leaf in preorder: (node, root distance, child-index path)."""
    path: list[int] = []
    node = tree
    while node.children:
        left, right = node.children
        left_leaves = (left.size + 1) // 2
        if k < left_leaves:
            path.append(0)
            node = left
        else:
            k -= left_leaves
            path.append(1)
            node = right
    return node, len(path), path


def _pick_point(tree: Node, bias: float, rng: random.Random) -> tuple[Node, int, list[int]]:
    internal_count = (tree.size - 1) // 2
    if internal_count and rng.random() < bias:
        return _pick_internal(tree, rng.randrange(internal_count))
    return _pick_leaf(tree, rng.randrange((tree.size + 1) // 2))


def _graft(tree: Node, path: list[int], replacement: Node) -> Node:
    """New tree with the subtree at ``path`` replaced; everything off the
    path is shared with the original."""

    def rebuild(node: Node, i: int) -> Node:
        if i == len(path):
            return replacement
        left, right = node.children
        if path[i] == 0:
            return Node(node.symbol, (rebuild(left, i + 1), right))
        return Node(node.symbol, (left, rebuild(right, i + 1)))

    return rebuild(tree, 0)


def subtree_crossover(
    p1: Node, p2: Node, cfg: GpConfig, rng: random.Random
) -> tuple[Node, Node]:
    """Swap one randomly chosen subtree between the parents.

    Each pick favours internal nodes with probability ``internal_node_bias``
    (uniform within the chosen class).  A pick that would push either
    offspring past ``max_depth`` is redrawn, ``crossover_retries`` times at
    most; after that the parents come back unchanged.
    """
    bias = cfg.internal_node_bias
    max_depth = cfg.max_depth
    for _ in range(cfg.crossover_retries + 1):
        sub1, dist1, path1 = _pick_point(p1, bias, rng)
        sub2, dist2, path2 = _pick_point(p2, bias, rng)
        if dist1 + sub2.depth <= max_depth and dist2 + sub1.depth <= max_depth:
            return _graft(p1, path1, sub2), _graft(p2, path2, sub1)
    return p1, p2


def _evolve(
    problem: ProblemSpec,
    cfg: GpConfig,
    make_offspring: Callable[[int, list[Individual], random.Random], list[Node] | None],
    rng: random.Random,
    evaluator: Evaluator,
    observer: Callable[[int, list[Individual]], None] | None = None,
) -> RunResult:
    """Shared generational loop; engines differ only in ``make_offspring``.

    Termination: optimum found (success), generation cap hit, or the optimum
    has become unreachable from the symbols left in the population (checked
    every few generations; failure either way).
    """
    optimum = problem.optimum_fitness
    ps = problem.primitives
    # the reachability cut presumes only the all-positive vector is optimal,
    # which fails for the degenerate trap at delta=0 (all-false ties it)
    check_reachability = problem.trap is None or problem.trap.delta > 0.0
    trees = ramped_half_and_half(ps, cfg.pop_size, cfg.max_depth, rng)
    pop = [Individual(t, evaluator(t)) for t in trees]
    best = max(ind.fitness for ind in pop)
    generation = 0
    while True:
        if observer is not None:
            observer(generation, pop)
        if best >= optimum:
            return RunResult(True, evaluator.evaluations, generation, best)
        if generation >= cfg.max_generations:
            return RunResult(False, evaluator.evaluations, generation, best)
        if (
            check_reachability
            and generation % REACHABILITY_CHECK_PERIOD == 0
            and not optimum_reachable([ind.tree for ind in pop], ps)
        ):
            return RunResult(False, evaluator.evaluations, generation, best)
        offspring = make_offspring(generation, pop, rng)
        if offspring is None:  # variation hit a provably absorbing state
            return RunResult(False, evaluator.evaluations, generation, best)
        pop = [Individual(t, evaluator(t)) for t in offspring]
        generation += 1
        gen_best = max(ind.fitness for ind in pop)
        if gen_best > best:
            best = gen_best


def run_gp(
    problem: ProblemSpec,
    cfg: GpConfig,
    observer: Callable[[int, list[Individual]], None] | None = None,
) -> RunResult:
    """One seeded GP run; crossover applies to every selected pair."""

    def make_offspring(
        generation: int, pop: list[Individual], rng: random.Random
    ) -> list[Node]:
        parents = [binary_tournament(pop, rng) for _ in range(cfg.pop_size)]
        offspring: list[Node] = []
        for i in range(0, cfg.pop_size, 2):
            c1, c2 = subtree_crossover(parents[i].tree, parents[i + 1].tree, cfg, rng)
            offspring.append(c1)
            offspring.append(c2)
        return offspring

    return _evolve(
        problem, cfg, make_offspring, random.Random(cfg.seed), Evaluator(problem), observer
    )
