"""Fermionic swap networks: chain, distance-minimizing, and composite
schedules that reorder modes so required interaction terms become adjacent."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms.approximation import steiner_tree

Term = tuple[int, ...]

DEFAULT_P = 0.5


def _norm_term(term) -> Term:
    t = tuple(int(x) for x in term)
    if len(t) not in (1, 2, 4):
        raise ValueError("terms touch 1, 2, or 4 modes")
    return t


class ModeGraph:
    """Fixed positions joined by swap edges, plus a live mode permutation.

    Edges are between positions and never change; fswaps exchange the modes
    sitting at two adjacent positions.
    """

    def __init__(self, n_modes: int, edges, order=None):
        self.n = n_modes
        self.edges = tuple(
            sorted({tuple(sorted((int(a), int(b)))) for a, b in edges})
        )
        g = nx.Graph()
        g.add_nodes_from(range(n_modes))
        g.add_edges_from(self.edges)
        self.graph = g
        self._dist = dict(nx.all_pairs_shortest_path_length(g))
        self.order = list(range(n_modes)) if order is None else list(order)
        if sorted(self.order) != list(range(n_modes)):
            raise ValueError("order must be a permutation of the modes")
        self.position = {m: p for p, m in enumerate(self.order)}

    @classmethod
    def chain(cls, n_modes: int, order=None) -> "ModeGraph":
        return cls(n_modes, [(i, i + 1) for i in range(n_modes - 1)], order)

    def copy(self) -> "ModeGraph":
        new = object.__new__(ModeGraph)
        new.n = self.n
        new.edges = self.edges
        new.graph = self.graph
        new._dist = self._dist
        new.order = list(self.order)
        new.position = dict(self.position)
        return new

    def position_distance(self, p: int, q: int) -> float:
        return self._dist[p].get(q, math.inf)

    def mode_distance(self, a: int, b: int) -> float:
        if a == b:
            return 0
        return self.position_distance(self.position[a], self.position[b])

    def swap_positions(self, p: int, q: int) -> tuple[int, int]:
        """Fswap the modes at positions ``p`` and ``q``; returns the mode
        pair that moved (in position order before the swap)."""
        if tuple(sorted((p, q))) not in set(self.edges):
            raise ValueError(f"positions {p},{q} are not joined by an edge")
        a, b = self.order[p], self.order[q]
        self.order[p], self.order[q] = b, a
        self.position[a], self.position[b] = q, p
        return (a, b)


def _pair_distance(graph: ModeGraph, a: int, b: int) -> float:
    """Distance between the Majorana sites of two modes: each mode holds two
    Majoranas, so a mode-path of length d spans 2d-1 Majorana steps."""
    if a == b:
        return 0
    d = graph.mode_distance(a, b)
    return math.inf if math.isinf(d) else 2 * d - 1


def term_distance(term, graph: ModeGraph) -> float:
    """Minimum routing distance of a term: pair distance for a mode pair,
    and for quartic terms the best of the three pairings (sum of the two
    pair distances).  A pair at distance 1 is implementable in place."""
    t = _norm_term(term)
    if len(t) == 1:
        return 0
    if len(t) == 2:
        return _pair_distance(graph, *t)
    a, b, c, d = t
    return min(
        _pair_distance(graph, a, b) + _pair_distance(graph, c, d),
        _pair_distance(graph, a, c) + _pair_distance(graph, b, d),
        _pair_distance(graph, a, d) + _pair_distance(graph, b, c),
    )


def implementable(term, graph: ModeGraph) -> bool:
    """True when every pair of some pairing is on-mode or adjacent."""
    t = _norm_term(term)
    if len(t) == 1:
        return True
    if len(t) == 2:
        return _pair_distance(graph, *t) <= 1
    a, b, c, d = t
    return any(
        _pair_distance(graph, x, y) <= 1 and _pair_distance(graph, z, w) <= 1
        for (x, y), (z, w) in (
            ((a, b), (c, d)),
            ((a, c), (b, d)),
            ((a, d), (b, c)),
        )
    )


def total_cost(terms, graph: ModeGraph, p: float = DEFAULT_P) -> float:
    """l_p aggregate of term distances: (sum d(t)^p)^(1/p)."""
    if p <= 0:
        raise ValueError("p must be positive")
    dists = [term_distance(t, graph) for t in terms]
    if not dists:
        return 0.0
    if any(math.isinf(d) for d in dists):
        return math.inf
    return sum(d**p for d in dists) ** (1.0 / p)


def greedy_swap_layer(graph: ModeGraph, terms, p: float = DEFAULT_P):
    """Build one fswap layer by repeatedly applying the edge swap that most
    reduces the total cost (strict decrease; lexicographic position-pair tie
    break).  When no swap strictly decreases the cost and the layer is still
    empty, falls back to a swap that reduces some single term's distance.

    Mutates ``graph``; returns (mode_pairs, used_fallback).
    """
    terms = [_norm_term(t) for t in terms]
    layer: list[tuple[int, int]] = []
    used: set[int] = set()
    fallback = False
    while True:
        current = total_cost(terms, graph, p)
        best = None
        for pq in graph.edges:
            if used & set(pq):
                continue
            trial = graph.copy()
            trial.swap_positions(*pq)
            cost = total_cost(terms, trial, p)
            if cost < current and (best is None or cost < best[0]):
                best = (cost, pq)
        if best is None:
            if not layer:
                for pq in graph.edges:
                    if used & set(pq):
                        continue
                    trial = graph.copy()
                    trial.swap_positions(*pq)
                    if any(
                        term_distance(t, trial) < term_distance(t, graph)
                        for t in terms
                    ):
                        best = (current, pq)
                        fallback = True
                        break
            if best is None:
                return layer, fallback
        _, pq = best
        layer.append(graph.swap_positions(*pq))
        used.update(pq)
        if fallback:
            return layer, fallback


@dataclass
class SwapSchedule:
    """Ordered fswap/interaction layers plus bookkeeping.

    Each layer is ("fswap", mode_pairs) or ("interact", terms).  ``fswap_log``
    records the same fswaps as position pairs, for permutation checks and
    restore phases.
    """

    n_modes: int
    layers: list = field(default_factory=list)
    fswap_log: list = field(default_factory=list)
    remaining: list = field(default_factory=list)
    merged: bool = False
    final_order: list = field(default_factory=list)

    @property
    def fswap_layer_count(self) -> int:
        return sum(1 for kind, _ in self.layers if kind == "fswap")

    @property
    def complete(self) -> bool:
        return not self.remaining

    def implemented_terms(self) -> list[Term]:
        out = []
        for kind, payload in self.layers:
            if kind == "interact":
                out.extend(payload)
        return out

    def add_fswap_layer(self, mode_pairs, position_pairs):
        self.layers.append(("fswap", tuple(mode_pairs)))
        self.fswap_log.append(tuple(position_pairs))

    def add_interaction_layer(self, terms):
        self.layers.append(("interact", tuple(sorted(terms))))

    def dump(self) -> str:
        lines = []
        for i, (kind, payload) in enumerate(self.layers):
            lines.append(f"LAYER {i} {kind.upper()}")
            for entry in payload:
                if kind == "fswap":
                    lines.append(f"FSWAP {entry[0]} {entry[1]}")
                else:
                    lines.append("TERM " + ",".join(str(m) for m in entry))
        return "\n".join(lines)


def _collect_implementable(graph, pending):
    ready = [t for t in pending if implementable(t, graph)]
    for t in ready:
        pending.remove(t)
    return ready


def chain_network(m: int, terms, merge_interactions: bool = False) -> SwapSchedule:
    """Chain fswap network on ``m`` linearly arranged modes: alternating
    even-edge/odd-edge transposition layers, with terms picked up greedily as
    they become adjacent.  All mode pairs meet within ``m`` fswap layers, at
    which point the order is fully reversed.

    With ``merge_interactions`` the schedule is marked as absorbing each
    pair interaction into its fswap (unit depth per layer downstream).
    """
    graph = ModeGraph.chain(m)
    sched = SwapSchedule(n_modes=m, merged=merge_interactions)
    pending = [_norm_term(t) for t in terms]
    ready = _collect_implementable(graph, pending)
    if ready:
        sched.add_interaction_layer(ready)
    k = 0
    while pending and k < m:
        parity = k % 2
        position_pairs = [
            (i, i + 1) for i in range(parity, m - 1, 2)
        ]
        mode_pairs = [graph.swap_positions(p, q) for p, q in position_pairs]
        sched.add_fswap_layer(mode_pairs, position_pairs)
        k += 1
        ready = _collect_implementable(graph, pending)
        if ready:
            sched.add_interaction_layer(ready)
    sched.remaining = pending
    sched.final_order = list(graph.order)
    return sched


def steiner_reduce(graph: ModeGraph, terms) -> ModeGraph:
    """Approximate Steiner tree over the positions touched by any term;
    returned only when strictly smaller than the input graph."""
    touched = sorted(
        {graph.position[m] for t in terms for m in _norm_term(t)}
    )
    if not touched:
        return graph
    tree = steiner_tree(graph.graph, touched)
    if tree.number_of_nodes() >= graph.n:
        return graph
    nodes = sorted(tree.nodes)
    relabel = {pos: i for i, pos in enumerate(nodes)}
    sub = ModeGraph(
        len(nodes),
        [(relabel[a], relabel[b]) for a, b in tree.edges],
        order=[graph.order[pos] for pos in nodes],
    )
    return sub


def _euler_position_order(g: nx.Graph):
    """Node order of an Euler path, or None if the graph has none."""
    if g.number_of_edges() == 0 or not nx.has_eulerian_path(g):
        return None
    path = list(nx.eulerian_path(g))
    order = [path[0][0]]
    for _, b in path:
        if b not in order:
            order.append(b)
    if len(order) != g.number_of_nodes():
        return None
    return order


def composite_network(
    graph: ModeGraph,
    terms,
    p: float = DEFAULT_P,
    budget: int | None = None,
) -> SwapSchedule:
    """Full pipeline: Steiner-reduce, chain phase on an Euler path when one
    exists, distance-minimizing phase for the remainder, then a restore phase
    reversing every fswap so the initial permutation returns."""
    pending = [_norm_term(t) for t in terms]
    sched = SwapSchedule(n_modes=graph.n)
    if not pending:
        sched.final_order = list(graph.order)
        return sched
    if budget is None:
        budget = 4 * graph.n * graph.n
    work = graph.copy()

    ready = _collect_implementable(work, pending)
    if ready:
        sched.add_interaction_layer(ready)

    # Chain phase: when the Steiner tree of the touched positions is a path,
    # run alternating even/odd transposition layers along it.
    chain_positions = None
    if pending:
        touched_positions = sorted(
            {work.position[m] for t in pending for m in t}
        )
        tree = steiner_tree(work.graph, touched_positions)
        order = _euler_position_order(tree)
        if order is not None:
            chain_positions = order
    if chain_positions is not None:
        m_sub = len(chain_positions)
        for k in range(m_sub):
            if not pending:
                break
            parity = k % 2
            position_pairs = [
                (chain_positions[i], chain_positions[i + 1])
                for i in range(parity, m_sub - 1, 2)
            ]
            if not position_pairs:
                continue
            mode_pairs = [work.swap_positions(pq[0], pq[1]) for pq in position_pairs]
            sched.add_fswap_layer(mode_pairs, position_pairs)
            ready = _collect_implementable(work, pending)
            if ready:
                sched.add_interaction_layer(ready)

    # Distance-minimizing phase for whatever the chain could not reach.
    while pending and sched.fswap_layer_count < budget:
        before = list(work.order)
        mode_pairs, _ = greedy_swap_layer(work, pending, p)
        if not mode_pairs:
            break
        position_pairs = [
            tuple(sorted((before.index(a), before.index(b))))
            for a, b in mode_pairs
        ]
        sched.add_fswap_layer(mode_pairs, position_pairs)
        ready = _collect_implementable(work, pending)
        if ready:
            sched.add_interaction_layer(ready)

    sched.remaining = pending

    # Restore phase: undo every fswap layer in reverse order.
    for position_pairs in reversed(list(sched.fswap_log)):
        mode_pairs = [work.swap_positions(pq[0], pq[1]) for pq in position_pairs]
        sched.layers.append(("fswap", tuple(mode_pairs)))
    sched.final_order = list(work.order)
    return sched
