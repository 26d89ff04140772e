"""Compiler driver: decomposition passes over the term set, unit-cell tiling
verification, explicit population of long-range terms, and assembly of the
final circuit IR with depth accounting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from . import costing, pauli_core as pc, swapnet

ONSITE_NN = "onsite/NN"
NNN_PLUS = "NNN+"


@dataclass(frozen=True)
class HamTerm:
    """A Majorana Hamiltonian term annotated with the cells it touches."""

    factors: tuple[int, ...]
    coeff: complex = 1.0
    cells: tuple = ()
    tag: str = ONSITE_NN

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(sorted({f // 2 for f in self.factors}))

    @property
    def mode_tuple(self) -> tuple[int, ...]:
        """Modes with multiplicity, as the swap-network term signature."""
        ms = tuple(f // 2 for f in self.factors)
        if len(ms) in (1, 2, 4):
            return ms
        if len(ms) == 3:
            # A weight-3 monomial cannot be hermitian; not expected here.
            raise ValueError("3-factor term has no pairing signature")
        return ms


def jw_pauli(factors, position_of_mode) -> pc.PauliString:
    """JW image of a Majorana factor product on a chain whose qubit q hosts
    the mode at position q: gamma_m -> Z...Z X_q, gamma-bar_m -> -Z...Z Y_q."""
    parts = []
    for f in factors:
        mode, bar = divmod(f, 2)
        q = position_of_mode[mode]
        ops = {k: "Z" for k in range(q)}
        ops[q] = "Y" if bar else "X"
        parts.append(pc.PauliString.from_ops(ops, phase_exp=2 if bar else 0))
    return pc.product(parts)


def term_pauli(term: HamTerm, order) -> pc.PauliString:
    positions = {m: p for p, m in enumerate(order)}
    return jw_pauli(term.factors, positions)


def term_cost(pauli: pc.PauliString) -> int:
    return costing.rotation_depth(pauli.weight)


@dataclass
class TermGroup:
    terms: list
    site_signature: tuple
    tag: str = ONSITE_NN


def pass_common_sites(terms) -> list[TermGroup]:
    """Partition terms by the exact cell set they touch, in lexicographic
    signature order."""
    buckets: dict[tuple, list] = {}
    for t in terms:
        sig = tuple(sorted(set(t.cells)))
        buckets.setdefault(sig, []).append(t)
    return [
        TermGroup(terms=buckets[sig], site_signature=sig,
                  tag=buckets[sig][0].tag)
        for sig in sorted(buckets)
    ]


def _dsatur_classes(n: int, conflicts) -> list[list[int]]:
    """Color item indices 0..n-1 with DSATUR; conflicts is an iterable of
    index pairs.  Returns color classes in color order."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(conflicts)
    coloring = nx.coloring.greedy_color(g, strategy="saturation_largest_first")
    classes: dict[int, list[int]] = {}
    for idx in range(n):
        classes.setdefault(coloring[idx], []).append(idx)
    return [classes[c] for c in sorted(classes)]


def pass_commuting(terms, paulis=None, order=None) -> list[TermGroup]:
    """Group terms into mutually commuting classes via DSATUR coloring of
    the anticommutation graph."""
    terms = list(terms)
    if paulis is None:
        order = order if order is not None else _default_order(terms)
        paulis = [term_pauli(t, order) for t in terms]
    conflicts = [
        (i, j)
        for i, j in itertools.combinations(range(len(terms)), 2)
        if not pc.commutes(paulis[i], paulis[j])
    ]
    out = []
    for cls in _dsatur_classes(len(terms), conflicts):
        members = [terms[i] for i in cls]
        sig = tuple(sorted({c for t in members for c in t.cells}))
        out.append(TermGroup(terms=members, site_signature=sig,
                             tag=members[0].tag))
    return out


def pass_disjoint_qubits(paulis, merge_two_qubit: bool = True) -> list[list[int]]:
    """Split encoded terms into sublayers with pairwise-disjoint qubit
    support.  Terms on an identical 2-qubit support may share a sublayer
    (merged as one 2-qubit gate) when ``merge_two_qubit`` is set."""
    supports = [frozenset(p.support) for p in paulis]
    conflicts = []
    for i, j in itertools.combinations(range(len(paulis)), 2):
        if not (supports[i] & supports[j]):
            continue
        if (
            merge_two_qubit
            and supports[i] == supports[j]
            and len(supports[i]) == 2
        ):
            continue
        conflicts.append((i, j))
    return _dsatur_classes(len(paulis), conflicts)


def _default_order(terms):
    n_modes = 1 + max((f // 2 for t in terms for f in t.factors), default=0)
    return list(range(n_modes))


@dataclass
class IRLayer:
    kind: str  # "interact" | "fswap"
    instructions: list
    depth: int


@dataclass
class CircuitIR:
    layers: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return sum(layer.depth for layer in self.layers)

    def depth_by_kind(self, kind: str) -> int:
        return sum(l.depth for l in self.layers if l.kind == kind)

    def dump(self) -> str:
        lines = []
        for i, layer in enumerate(self.layers):
            lines.append(f"LAYER {i} depth={layer.depth}")
            lines.extend(layer.instructions)
        return "\n".join(lines)


def _interaction_layers(ir: CircuitIR, terms, paulis, merge_pairs: bool):
    """Sublayer the given encoded terms and append them to the IR."""
    if not terms:
        return
    for cls in pass_disjoint_qubits(paulis, merge_two_qubit=merge_pairs):
        depth = max(term_cost(paulis[i]) for i in cls)
        instructions = [
            f"ROT {pc.render(paulis[i].bare())} theta=<t{j}>"
            for j, i in enumerate(cls)
        ]
        ir.layers.append(IRLayer("interact", instructions, depth))


def compile_terms(
    graph: swapnet.ModeGraph,
    terms,
    pauli_fn,
    fswap_cost_fn=None,
    merge_pairs: bool = False,
    p: float = swapnet.DEFAULT_P,
    ir: CircuitIR | None = None,
) -> CircuitIR:
    """Composite compile of a term batch over a mode graph.

    Strategy: implement everything already adjacent; run alternating
    even/odd fswap layers along the Euler path of the Steiner reduction when
    one exists; finish stragglers with greedy distance-minimizing layers;
    then reverse all fswaps.  ``pauli_fn(term, graph)`` encodes a term at the
    live assignment; ``fswap_cost_fn(pos_pair)`` prices one fswap (default 1).
    """
    ir = ir if ir is not None else CircuitIR()
    pending = list(terms)
    if not pending:
        return ir
    if fswap_cost_fn is None:
        fswap_cost_fn = lambda pq: costing.CostModel().fswap_plain

    def flush():
        ready = [
            t for t in pending
            if swapnet.implementable(t.mode_tuple, graph)
        ]
        for t in ready:
            pending.remove(t)
        if ready:
            ready.sort(key=lambda t: t.factors)
            _interaction_layers(
                ir, ready, [pauli_fn(t, graph) for t in ready], merge_pairs
            )

    def emit_fswaps(position_pairs):
        mode_pairs = [graph.swap_positions(*pq) for pq in position_pairs]
        ir.layers.append(IRLayer(
            "fswap",
            [f"FSWAP {a} {b}" for a, b in mode_pairs],
            max(fswap_cost_fn(pq) for pq in position_pairs),
        ))
        return position_pairs

    flush()
    fswap_log: list[list] = []

    if pending:
        touched = sorted({
            graph.position[m] for t in pending for m in t.mode_tuple
        })
        from networkx.algorithms.approximation import steiner_tree

        tree = steiner_tree(graph.graph, touched)
        path = swapnet._euler_position_order(tree)
        if path is not None:
            m_sub = len(path)
            for k in range(m_sub):
                if not pending:
                    break
                pairs = [
                    tuple(sorted((path[i], path[i + 1])))
                    for i in range(k % 2, m_sub - 1, 2)
                ]
                if not pairs:
                    continue
                fswap_log.append(emit_fswaps(pairs))
                flush()

    budget = 4 * graph.n * graph.n
    while pending and len(fswap_log) < budget:
        before = list(graph.order)
        mode_pairs, _ = swapnet.greedy_swap_layer(
            graph, sorted(t.mode_tuple for t in pending), p
        )
        if not mode_pairs:
            break
        pairs = [
            tuple(sorted((before.index(a), before.index(b))))
            for a, b in mode_pairs
        ]
        # greedy_swap_layer already applied the swaps; undo and replay so the
        # emission path is uniform.
        for a, b in reversed(mode_pairs):
            pa, pb = graph.position[a], graph.position[b]
            graph.swap_positions(*sorted((pa, pb)))
        fswap_log.append(emit_fswaps(pairs))
        flush()
    if pending:
        raise RuntimeError(
            "swap budget exhausted with terms left: "
            + ", ".join(str(t.factors) for t in pending)
        )
    for pairs in reversed(fswap_log):
        emit_fswaps(pairs)
    return ir


def compile_cell(
    terms,
    n_modes: int | None = None,
    use_swaps: bool = True,
    algorithm: str = "VQE",
    merge_pairs: bool = False,
    p: float = swapnet.DEFAULT_P,
) -> CircuitIR:
    """Compile a term set living on a single JW chain.

    Pass order: (TDS) commuting grouping first; then either direct
    disjoint-qubit sublayering, or a composite swap network whose
    interaction layers are sublayered at the live mode order.
    """
    terms = list(terms)
    ir = CircuitIR()
    if not terms:
        return ir
    if n_modes is None:
        n_modes = 1 + max(f // 2 for t in terms for f in t.factors)
    order = list(range(n_modes))

    if algorithm.upper() == "TDS":
        batches = [g.terms for g in pass_commuting(terms, order=order)]
    elif algorithm.upper() == "VQE":
        batches = [terms]
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    pauli_fn = lambda t, g: term_pauli(t, g.order)
    for batch in batches:
        if not use_swaps:
            batch = sorted(batch, key=lambda t: t.factors)
            _interaction_layers(
                ir, batch, [term_pauli(t, order) for t in batch], merge_pairs
            )
            continue
        graph = swapnet.ModeGraph.chain(n_modes, order=list(order))
        compile_terms(graph, batch, pauli_fn, merge_pairs=merge_pairs,
                      p=p, ir=ir)
        assert graph.order == order
    return ir


def compile_allpairs_chain(m: int) -> int:
    """Depth of the all-pairs quadratic compile on an m-mode chain with
    interactions merged into the fswaps at unit cost: the full alternating
    network runs m layers and meets every pair, so the depth is exactly m."""
    terms = list(itertools.combinations(range(m), 2))
    graph = swapnet.ModeGraph.chain(m)
    met = {(a, a) for a in range(m)}
    for pos in range(m - 1):
        met.add(tuple(sorted((graph.order[pos], graph.order[pos + 1]))))
    depth = 0
    for k in range(m):
        for i in range(k % 2, m - 1, 2):
            graph.swap_positions(i, i + 1)
        depth += 1
        for pos in range(m - 1):
            met.add(tuple(sorted((graph.order[pos], graph.order[pos + 1]))))
    missing = [t for t in terms if tuple(sorted(t)) not in met]
    if missing:
        raise RuntimeError(f"pairs never adjacent: {missing}")
    if graph.order != list(reversed(range(m))):
        raise RuntimeError("chain network did not reverse the order")
    return depth


def populate_nnn(terms_nnn, dims) -> list[HamTerm]:
    """Translate each beyond-nearest-neighbour term (referenced to the
    central cell) to every lattice site, keeping only translates whose cells
    all stay inside the lattice."""
    lx, ly, lz = dims
    out = []
    for term in terms_nnn:
        cells = [tuple(c) for c in term.cells]
        if not cells:
            continue
        base = cells[0]
        offsets = [tuple(c[i] - base[i] for i in range(3)) for c in cells]
        for sx in range(lx):
            for sy in range(ly):
                for sz in range(lz):
                    placed = [
                        (sx + ox, sy + oy, sz + oz) for ox, oy, oz in offsets
                    ]
                    if all(
                        0 <= x < lx and 0 <= y < ly and 0 <= z < lz
                        for x, y, z in placed
                    ):
                        out.append(HamTerm(
                            factors=term.factors,
                            coeff=term.coeff,
                            cells=tuple(placed),
                            tag=NNN_PLUS,
                        ))
    return out


@dataclass(frozen=True)
class TilingCertificate:
    phases: int
    pattern: tuple
    multiplier: int


def tile_unit_cell(group_supports, dims) -> TilingCertificate:
    """Check that translated copies of a group can run in parallel.

    ``group_supports`` maps each source cell (3-tuple) to the qubit set its
    translated copy touches (data plus face qubits).  Source cells whose
    supports overlap are pushed into different phases by greedy coloring;
    the certificate records the resulting phase count (the depth multiplier).
    """
    cells = sorted(group_supports)
    conflicts = [
        (i, j)
        for i, j in itertools.combinations(range(len(cells)), 2)
        if group_supports[cells[i]] & group_supports[cells[j]]
    ]
    classes = _dsatur_classes(len(cells), conflicts)
    pattern = tuple(
        tuple(cells[i] for i in cls) for cls in classes
    )
    return TilingCertificate(
        phases=len(classes), pattern=pattern, multiplier=len(classes)
    )
