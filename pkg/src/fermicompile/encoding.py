"""Qubit layouts and operator tables for Jordan-Wigner and the planar/volumetric
hybrid compact encodings, plus Majorana-monomial to Pauli-string translation.

Layout structure
----------------
Every complex mode owns one data qubit; modes of a cell are contiguous.  In the
hybrid layouts, each cell's modes form one (2D) or two (3D) local JW segments,
and designated segment-endpoint "port" modes host the specified inter-cell edge
operators.  Ancilla ("face") qubits sit on a checkerboard sublattice of the
inter-cell faces.  Edge Pauli letters are forced by the local JW strings: a
gamma-type edge factor reads Y on a segment-top port and X on a segment-bottom
port, and every pair of edges meeting at a port is reconciled by anticommuting
letters on a shared ancilla face.  Edge signs are gauge-fixed at build time by
solving a GF(2) system so that every face loop that composes to a scalar equals
+identity; non-scalar face loops become the stabilizer generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .pauli_core import (
    MajoranaMonomial,
    PauliString,
    commutes,
    multiply,
    render,
)

JW = "JW"
HYBRID_2D = "Hybrid2D"
HYBRID_3D = "Hybrid3D"


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cartesian motif
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CartesianMotif:
    """Integer-grid bounding box of a real-space motif."""

    dims: tuple[int, int, int]
    active_cells: frozenset
    mode_multiplier: int = 1

    @property
    def n_cells(self) -> int:
        lx, ly, lz = self.dims
        return lx * ly * lz

    @property
    def n_active(self) -> int:
        return len(self.active_cells)

    @property
    def n_dummy(self) -> int:
        return self.n_cells - self.n_active


def build_cartesian_motif(spec, order: int) -> CartesianMotif:
    """Bounding box of the order-n neighbour shell on the integer grid."""
    from .hamiltonian import neighbor_shells

    shell = neighbor_shells(spec, order)
    mins = [min(v[i] for v in shell) for i in range(3)]
    maxs = [max(v[i] for v in shell) for i in range(3)]
    dims = tuple(maxs[i] - mins[i] + 1 for i in range(3))
    active = frozenset(
        (v[0] - mins[0], v[1] - mins[1], v[2] - mins[2]) for v in shell
    )
    return CartesianMotif(dims=dims, active_cells=active)


def grid_motif(dims: tuple[int, int, int]) -> CartesianMotif:
    """Motif with every cell of a dims grid active."""
    lx, ly, lz = dims
    cells = frozenset(
        (x, y, z) for x in range(lx) for y in range(ly) for z in range(lz)
    )
    return CartesianMotif(dims=dims, active_cells=cells)


def collapse_3d_to_2d(motif: CartesianMotif, axis: str) -> CartesianMotif:
    """Merge cells along one axis; modes per cell scale by the axis length."""
    try:
        ax = {"x": 0, "y": 1, "z": 2}[axis]
    except KeyError:
        raise ValueError("axis must be one of x, y, z") from None
    length = motif.dims[ax]
    if length == 1:
        return motif
    new_dims = list(motif.dims)
    new_dims[ax] = 1
    collapsed = frozenset(
        tuple(0 if i == ax else c[i] for i in range(3))
        for c in motif.active_cells
    )
    # Put the flattened axis last so the remaining grid is an x-y plane.
    order = [i for i in range(3) if i != ax] + [ax]
    dims = tuple(new_dims[i] for i in order)
    cells = frozenset(tuple(c[i] for i in order) for c in collapsed)
    return CartesianMotif(
        dims=dims,
        active_cells=cells,
        mode_multiplier=motif.mode_multiplier * length,
    )


# ---------------------------------------------------------------------------
# Layout
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecifiedEdge:
    """An explicitly specified edge operator encoding -i m_tu m_tv.

    ``tu``/``tv`` are typed Majorana indices (2*mode for gamma, 2*mode+1 for
    gamma-bar); ``u``/``v`` are the corresponding modes.
    """

    u: int  # source mode
    v: int  # target mode
    tu: int  # typed source Majorana
    tv: int  # typed target Majorana
    pauli: PauliString
    kind: str  # "x" | "y" | "z" | "fix"


@dataclass(frozen=True)
class EncodingLayout:
    kind: str
    dims: tuple[int, int, int]
    modes_per_cell: int
    n_modes: int
    n_qubits: int
    face_qubits: dict  # face key -> qubit id
    segments: tuple  # (start_mode, end_mode) half-open, sorted
    edges: tuple  # SpecifiedEdge, deterministic order
    stabilizer_generators: tuple
    motif: CartesianMotif | None = None
    _segment_of: dict = field(default_factory=dict, repr=False)
    _edge_index: dict = field(default_factory=dict, repr=False)

    @property
    def n_faces(self) -> int:
        return len(self.face_qubits)

    @property
    def n_cells(self) -> int:
        lx, ly, lz = self.dims
        return lx * ly * lz

    def cell_index(self, cell) -> int:
        x, y, z = cell
        lx, ly, lz = self.dims
        if not (0 <= x < lx and 0 <= y < ly and 0 <= z < lz):
            raise ValueError(f"cell {cell} outside grid {self.dims}")
        return (x * ly + y) * lz + z

    def mode_of(self, cell, local: int) -> int:
        if not 0 <= local < self.modes_per_cell:
            raise ValueError("local mode index out of range")
        return self.cell_index(cell) * self.modes_per_cell + local

    def cell_of_mode(self, mode: int):
        lx, ly, lz = self.dims
        cell_id, local = divmod(mode, self.modes_per_cell)
        x, rest = divmod(cell_id, ly * lz)
        y, z = divmod(rest, lz)
        return (x, y, z), local

    def vertex_op(self, mode: int) -> PauliString:
        if not 0 <= mode < self.n_modes:
            raise ValueError("mode out of range")
        return PauliString.from_ops({mode: "Z"}, 2)

    def segment_of(self, mode: int) -> int:
        return self._segment_of[mode]

    def edge_between(self, seg_a: int, seg_b: int):
        return self._edge_index.get((seg_a, seg_b))


def _face_keys(dims):
    """Deterministic enumeration of all inter-cell faces as (plane, fx, fy, fz)."""
    lx, ly, lz = dims
    keys = []
    for fx in range(lx - 1):
        for fy in range(ly - 1):
            for fz in range(lz):
                keys.append(("xy", fx, fy, fz))
    for fx in range(lx - 1):
        for fy in range(ly):
            for fz in range(lz - 1):
                keys.append(("xz", fx, fy, fz))
    for fx in range(lx):
        for fy in range(ly - 1):
            for fz in range(lz - 1):
                keys.append(("yz", fx, fy, fz))
    return keys


def _is_ancilla(key) -> bool:
    _, fx, fy, fz = key
    return (fx + fy + fz) % 2 == 0


def face_count(dims) -> int:
    """Number of ancilla faces on the checkerboard sublattice."""
    return sum(1 for k in _face_keys(dims) if _is_ancilla(k))


def _even_face(candidates, face_qubits):
    """The even-parity (ancilla) face among candidate keys, if present."""
    for key in candidates:
        if key in face_qubits and _is_ancilla(key):
            return key
    return None


class _Builder:
    """Mutable scaffolding used to assemble an immutable EncodingLayout."""

    def __init__(self, kind, dims, modes_per_cell, motif):
        self.kind = kind
        self.dims = dims
        self.m = modes_per_cell
        self.motif = motif
        lx, ly, lz = dims
        self.n_modes = lx * ly * lz * modes_per_cell
        keys = [k for k in _face_keys(dims) if _is_ancilla(k)]
        self.face_qubits = {
            key: self.n_modes + i for i, key in enumerate(sorted(keys))
        }
        self.n_qubits = self.n_modes + len(self.face_qubits)
        self.segments = []
        self.edges = []  # list of dicts, later signed

    def cell_index(self, cell):
        x, y, z = cell
        lx, ly, lz = self.dims
        return (x * ly + y) * lz + z

    def mode(self, cell, local):
        return self.cell_index(cell) * self.m + local

    def add_edge(self, tu, tv, letters, kind):
        """tu/tv: typed Majorana endpoints; letters: {qubit: letter} on data
        ports and ancilla faces."""
        self.edges.append(
            {
                "tu": tu,
                "tv": tv,
                "u": tu // 2,
                "v": tv // 2,
                "letters": dict(letters),
                "kind": kind,
                "sign": 0,
            }
        )


def _build_segments(builder, per_cell_segments):
    lx, ly, lz = builder.dims
    segs = []
    for x in range(lx):
        for y in range(ly):
            for z in range(lz):
                base = builder.mode((x, y, z), 0)
                for lo, hi in per_cell_segments:
                    segs.append((base + lo, base + hi))
    builder.segments = sorted(segs)


def build_layout(motif: CartesianMotif, modes_per_cell: int, kind: str) -> EncodingLayout:
    """Construct an encoding layout over the motif's full cell grid."""
    effective = modes_per_cell * motif.mode_multiplier
    if effective % 2 != 0:
        raise EncodingError("modes_per_cell must be even (spin pairing)")
    dims = motif.dims
    lx, ly, lz = dims

    if kind == JW:
        builder = _Builder(JW, dims, effective, motif)
        builder.face_qubits = {}
        builder.n_qubits = builder.n_modes
        builder.segments = [(0, builder.n_modes)]
        return _finalize(builder)

    if kind == HYBRID_2D:
        if lz > 1:
            raise EncodingError(
                "Hybrid2D requires a flat grid; collapse the third axis first"
            )
        if effective < 2:
            raise EncodingError("Hybrid2D needs at least 2 modes per cell")
        builder = _Builder(HYBRID_2D, dims, effective, motif)
        _build_segments(builder, [(0, effective)])
        _add_planar_edges(
            builder,
            top_of=lambda parity: effective - 1,
            bottom_of=lambda parity: 0,
        )
        return _finalize(builder)

    if kind == HYBRID_3D:
        if effective < 4 or effective % 2:
            raise EncodingError("Hybrid3D needs an even modes_per_cell >= 4")
        if lz > 1 and lx == 1 and ly == 1:
            raise EncodingError(
                "Hybrid3D needs a transverse extent to place mediating faces"
            )
        h = effective // 2
        builder = _Builder(HYBRID_3D, dims, effective, motif)
        _build_segments(builder, [(0, h), (h, effective)])
        # Two chains per cell: A over locals [0, h), B over [h, m).  x/y
        # edges use the inner chain ends (top of A, bottom of B) with the
        # same face structure as the 2D layout; the outer ends (bottom of A,
        # top of B) each host one z edge, which therefore needs no mediating
        # ancilla and is a bare two-qubit operator.
        _add_planar_edges(
            builder,
            top_of=lambda parity: h - 1,
            bottom_of=lambda parity: h,
        )
        _add_volumetric_edges(builder, h)
        _repair_connectivity(builder)
        return _finalize(builder)

    raise EncodingError(f"unknown layout kind {kind!r}")


def _add_planar_edges(builder, top_of, bottom_of):
    """x/y inter-cell edges shared by the 2D and 3D layouts.

    ``top_of``/``bottom_of`` map a cell parity to the local index of the
    chain end hosting that cell's x/y edges.
    The top port carries letter Y, the bottom port X.  +x edges always run
    top(c) -> bottom(c+x); +y edges run top->top from even-parity cells and
    bottom->bottom from odd-parity cells, so that each pair of edges meeting
    at a port shares the ancilla (even-parity) face between them.  x edges
    put X on their ancilla face, y edges Z.
    """
    lx, ly, lz = builder.dims
    fq = builder.face_qubits
    for x in range(lx):
        for y in range(ly):
            for z in range(lz):
                cell = (x, y, z)
                parity = (x + y + z) % 2
                if x + 1 < lx:
                    u = builder.mode(cell, top_of(parity))
                    v = builder.mode((x + 1, y, z), bottom_of(1 - parity))
                    letters = {u: "Y", v: "X"}
                    face = _even_face(
                        [("xy", x, y - 1, z), ("xy", x, y, z)], fq
                    )
                    if face is not None:
                        letters[fq[face]] = "X"
                    builder.add_edge(2 * u, 2 * v, letters, "x")
                if y + 1 < ly:
                    if parity == 0:
                        u = builder.mode(cell, top_of(0))
                        v = builder.mode((x, y + 1, z), top_of(1))
                        letters = {u: "Y", v: "Y"}
                    else:
                        u = builder.mode(cell, bottom_of(1))
                        v = builder.mode((x, y + 1, z), bottom_of(0))
                        letters = {u: "X", v: "X"}
                    face = _even_face(
                        [("xy", x - 1, y, z), ("xy", x, y, z)], fq
                    )
                    if face is not None:
                        letters[fq[face]] = "Z"
                    builder.add_edge(2 * u, 2 * v, letters, "y")


def _port_letter(mode: int, segment, bar: bool) -> str:
    """Forced Pauli letter of a lone Majorana sitting on a chain-end port.

    Commutation with the intra-chain pair images leaves exactly one choice:
    gamma reads X at the chain bottom and Y at the top; gamma-bar the
    opposite.
    """
    lo, hi = segment
    if mode == hi - 1:
        return "X" if bar else "Y"
    if mode == lo:
        return "Y" if bar else "X"
    raise EncodingError("specified edges may only attach to chain-end ports")


def _add_volumetric_edges(builder, h):
    """z edges between the outer chain ends of vertically adjacent cells.

    The outer ends (top of chain B, local m-1, and bottom of chain A,
    local 0) host no x/y edge, so a z edge needs no mediating ancilla and
    is a bare two-qubit operator.  Each such port hosts exactly one z edge
    (two edges on a port cannot be reconciled without a shared ancilla, and
    vertically stacked edges share none).  Columns with even x+y use the
    crossed pattern, B-top of the lower cell to A-bottom of the upper; odd
    columns alternate straight A-to-A and B-to-B rungs by height.  Mixing
    the two kills every conserved chain-type parity that a uniform pattern
    would impose, keeping the chain graph in one piece.
    """
    lx, ly, lz = builder.dims
    m = builder.m
    a_bot, b_top = 0, m - 1
    for x in range(lx):
        for y in range(ly):
            crossed = (x + y) % 2 == 0
            for z in range(lz - 1):
                if crossed:
                    lo_port, hi_port = b_top, a_bot
                elif z % 2 == 0:
                    lo_port, hi_port = a_bot, a_bot
                else:
                    lo_port, hi_port = b_top, b_top
                u = builder.mode((x, y, z), lo_port)
                v = builder.mode((x, y, z + 1), hi_port)
                letters = {
                    u: "Y" if lo_port == b_top else "X",
                    v: "Y" if hi_port == a_bot else "X",
                }
                builder.add_edge(2 * u, 2 * v + 1, letters, "z")


def _repair_connectivity(builder):
    """Join stranded chains to the rest of the graph with extra edges.

    Boundary cells can lose every x/y/z edge of one of their chains to the
    lattice edge.  Any chain-end port hosting no edge may take exactly one
    more (pairing its gamma with a free port's gamma-bar satisfies all
    pairwise commutation by the forced port letters), so greedily connect
    components through free port pairs, preferring nearby cells.
    """
    segs = builder.segments
    if len(segs) <= 1:
        return
    seg_of = _segment_lookup(tuple(segs))
    parent = list(range(len(segs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    used = set()
    for e in builder.edges:
        used.update((e["u"], e["v"]))
        ra, rb = find(seg_of[e["u"]]), find(seg_of[e["v"]])
        if ra != rb:
            parent[rb] = ra
    if len({find(i) for i in range(len(segs))}) == 1:
        return

    def cell_of(mode):
        cell_id = mode // builder.m
        _, ly, lz = builder.dims
        x, rest = divmod(cell_id, ly * lz)
        y, z = divmod(rest, lz)
        return (x, y, z)

    free = sorted(
        p
        for lo, hi in segs
        for p in {lo, hi - 1}
        if p not in used
    )
    while True:
        roots = {find(i) for i in range(len(segs))}
        if len(roots) == 1:
            return
        best = None
        for i, p in enumerate(free):
            for q in free[i + 1:]:
                if find(seg_of[p]) == find(seg_of[q]):
                    continue
                ca, cb = cell_of(p), cell_of(q)
                dist = max(abs(a - b) for a, b in zip(ca, cb))
                key = (dist, p, q)
                if best is None or key < best:
                    best = key
        if best is None:
            raise EncodingError(
                "chain graph is disconnected and no free ports remain"
            )
        _, p, q = best
        sp = segs[seg_of[p]]
        sq = segs[seg_of[q]]
        letters = {
            p: _port_letter(p, sp, bar=False),
            q: _port_letter(q, sq, bar=True),
        }
        builder.add_edge(2 * p, 2 * q + 1, letters, "fix")
        free.remove(p)
        free.remove(q)
        parent[find(seg_of[q])] = find(seg_of[p])


# ---------------------------------------------------------------------------
# Finalization: gauge fixing, stabilizers, validation
# ---------------------------------------------------------------------------


def _segment_lookup(segments):
    lookup = {}
    for idx, (lo, hi) in enumerate(segments):
        for mode in range(lo, hi):
            lookup[mode] = idx
    return lookup


def _jw_local(typed: int, segment) -> PauliString:
    """Exact local JW string of one Majorana within its segment."""
    mode, bar = divmod(typed, 2)
    lo, hi = segment
    ops = {q: "Z" for q in range(lo, mode)}
    if bar:
        ops[mode] = "Y"
        return PauliString.from_ops(ops, 2)
    ops[mode] = "X"
    return PauliString.from_ops(ops, 0)


def _fundamental_cycles(edges, seg_of, n_segments):
    """Cycle basis of the chain graph as edge traversals.

    Builds a BFS spanning forest over chains; every non-tree specified edge
    closes exactly one independent cycle, returned as an ordered list of
    (edge, forward) steps.  Also reports unreachable chains per root so the
    caller can enforce connectivity.
    """
    adjacency = {}
    for e in edges:
        sa, sb = seg_of[e["u"]], seg_of[e["v"]]
        if sa == sb:
            raise EncodingError("specified edge must join distinct chains")
        adjacency.setdefault(sa, []).append((sb, e))
        adjacency.setdefault(sb, []).append((sa, e))
    for k in adjacency:
        adjacency[k].sort(key=lambda item: (item[0], item[1]["u"], item[1]["v"]))

    parent = {}
    tree_edge = {}
    components = []
    for root in range(n_segments):
        if root in parent:
            continue
        parent[root] = None
        comp = [root]
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for other, e in adjacency.get(cur, ()):
                if other not in parent:
                    parent[other] = cur
                    tree_edge[other] = e
                    comp.append(other)
                    queue.append(other)
        components.append(comp)

    def tree_path(node, ancestor_set):
        path = []
        while node not in ancestor_set:
            path.append((node, tree_edge[node]))
            node = parent[node]
        return node, path

    cycles = []
    seen_tree = {id(e) for e in tree_edge.values()}
    for e in edges:
        if id(e) in seen_tree:
            continue
        sa, sb = seg_of[e["u"]], seg_of[e["v"]]
        # Walk both endpoints up to their lowest common ancestor.
        ancestors = {sa}
        node = sa
        while parent[node] is not None:
            node = parent[node]
            ancestors.add(node)
        meet, up_b = tree_path(sb, ancestors)
        _, up_a = tree_path(sa, {meet})
        # Traversal: e from sa to sb, then sb -> meet, then meet -> sa.
        steps = [(e, seg_of[e["u"]] == sa)]
        cur = sb
        for node, te in up_b:
            fwd = seg_of[te["u"]] == cur
            steps.append((te, fwd))
            cur = parent[node]
        down_a = list(reversed(up_a))
        for node, te in down_a:
            fwd = seg_of[te["u"]] == cur
            steps.append((te, fwd))
            cur = node
        cycles.append(steps)
    return cycles, components


class _Composer:
    """Composes ordered Majorana-pair products through segments and edges."""

    def __init__(self, segments, seg_of, edge_pauli, adjacency):
        self.segments = segments
        self.seg_of = seg_of
        self.edge_pauli = edge_pauli  # (u, v) -> PauliString, directed keys
        self.adjacency = adjacency  # segment -> sorted [(other_seg, (u, v))]

    def jw_pair(self, a: int, b: int) -> PauliString:
        seg = self.segments[self.seg_of[a // 2]]
        return multiply(_jw_local(a, seg), _jw_local(b, seg))

    def edge_factor(self, tu: int, tv: int, forward: bool) -> PauliString:
        """Encoded m_tu m_tv (forward) or m_tv m_tu for a specified edge."""
        p = self.edge_pauli[(tu, tv)]
        return p.with_phase((p.phase_exp + (1 if forward else 3)) % 4)

    def segment_path(self, seg_a: int, seg_b: int):
        """Shortest edge path between segments (BFS, deterministic)."""
        if seg_a == seg_b:
            return []
        prev = {seg_a: None}
        queue = deque([seg_a])
        while queue:
            cur = queue.popleft()
            for other, pair in self.adjacency.get(cur, ()):
                if other not in prev:
                    prev[other] = (cur, pair)
                    if other == seg_b:
                        queue.clear()
                        break
                    queue.append(other)
        if seg_b not in prev:
            raise EncodingError(
                f"no edge path between segments {seg_a} and {seg_b}"
            )
        path = []
        node = seg_b
        while prev[node] is not None:
            cur, pair = prev[node]
            path.append((cur, node, pair))
            node = cur
        return list(reversed(path))

    def encode_pair(self, a: int, b: int) -> PauliString:
        seg_a = self.seg_of[a // 2]
        seg_b = self.seg_of[b // 2]
        acc = PauliString.identity()
        current = a
        for seg_from, seg_to, (tu, tv) in self.segment_path(seg_a, seg_b):
            # Orient the specified edge along the walk.
            if self.seg_of[tu // 2] == seg_from:
                enter, leave, forward = tu, tv, True
            else:
                enter, leave, forward = tv, tu, False
            if current != enter:
                acc = multiply(acc, self.jw_pair(current, enter))
            acc = multiply(acc, self.edge_factor(tu, tv, forward))
            current = leave
        if current != b:
            acc = multiply(acc, self.jw_pair(current, b))
        return acc

    def loop_value(self, traversal) -> PauliString:
        """Pauli value of a closed loop of specified edges."""
        acc = PauliString.identity()
        current = None
        start = None
        for (tu, tv), forward in traversal:
            enter, leave = (tu, tv) if forward else (tv, tu)
            if current is None:
                start = enter
            elif current != enter:
                acc = multiply(acc, self.jw_pair(current, enter))
            acc = multiply(acc, self.edge_factor(tu, tv, forward))
            current = leave
        if current != start:
            acc = multiply(acc, self.jw_pair(current, start))
        return acc


def _solve_gf2(rows, targets, n_vars):
    """Solve rows . x = targets over GF(2); returns one solution."""
    aug = [
        (row | (t << n_vars)) for row, t in zip(rows, targets)
    ]
    pivots = []
    for col in range(n_vars):
        pivot_row = None
        for i, r in enumerate(aug):
            if i in [p[0] for p in pivots]:
                continue
            if (r >> col) & 1:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        pivots.append((pivot_row, col))
        for i, r in enumerate(aug):
            if i != pivot_row and (r >> col) & 1:
                aug[i] = r ^ aug[pivot_row]
    x = 0
    for i, col in pivots:
        if (aug[i] >> n_vars) & 1:
            x |= 1 << col
    for i, r in enumerate(aug):
        if i not in [p[0] for p in pivots] and (r >> n_vars) & 1:
            raise EncodingError("inconsistent loop-sign system")
    return x


def _symplectic_bits(p: PauliString) -> int:
    v = 0
    for q, letter in p.ops:
        if letter in ("X", "Y"):
            v |= 1 << (2 * q)
        if letter in ("Y", "Z"):
            v |= 1 << (2 * q + 1)
    return v


def _scalar_combinations(entries):
    """GF(2)-reduce (pauli, edge_row) pairs; returns scalar-combination
    constraints as (edge_row, phase_bit) plus the independent residuals."""
    bits = _symplectic_bits
    basis = []  # (pivot, pauli, row), kept fully reduced
    constraints = []
    residuals = []
    for p, row in entries:
        cur, r = p, row
        for pivot, b, br in basis:
            if (bits(cur) >> pivot) & 1:
                cur = multiply(cur, b)
                r ^= br
        vec = bits(cur)
        if vec == 0:
            if cur.phase_exp % 2:
                raise EncodingError("loop combination composed to +/-i")
            constraints.append((r, cur.phase_exp // 2))
            continue
        pivot = (vec & -vec).bit_length() - 1
        basis = [
            (pv, multiply(b, cur), br ^ r) if (bits(b) >> pivot) & 1
            else (pv, b, br)
            for pv, b, br in basis
        ]
        basis.append((pivot, cur, r))
        residuals.append((cur, r))
    return constraints, basis


def _reduce_stabilizers(paulis):
    """Independent generating set via GF(2) elimination with exact phases.

    Raises if the group would contain -identity (or +/-i identity).
    """
    basis = []  # list of (pivot_bit, PauliString)
    bits = _symplectic_bits

    for p in paulis:
        cur = p
        vec = bits(cur)
        # The basis is kept fully reduced, so one pass eliminates every pivot.
        for pivot, b in basis:
            if (vec >> pivot) & 1:
                cur = multiply(cur, b)
                vec = bits(cur)
        if vec == 0:
            if cur.phase_exp != 0:
                raise EncodingError(
                    "contradictory loop constraints: stabilizer group "
                    "contains a non-identity scalar"
                )
            continue
        pivot = (vec & -vec).bit_length() - 1
        basis = [
            (pv, multiply(b, cur) if (bits(b) >> pivot) & 1 else b)
            for pv, b in basis
        ]
        basis.append((pivot, cur))
    return [b for _, b in basis]


def _finalize(builder) -> EncodingLayout:
    segments = tuple(builder.segments)
    seg_of = _segment_lookup(segments)

    def pauli_of(e):
        ops = {q: letter for q, letter in e["letters"].items()}
        return PauliString.from_ops(ops, 2 * e["sign"])

    def composer():
        edge_pauli = {}
        adjacency = {}
        for e in builder.edges:
            tu, tv = e["tu"], e["tv"]
            edge_pauli[(tu, tv)] = pauli_of(e)
            sa, sb = seg_of[e["u"]], seg_of[e["v"]]
            adjacency.setdefault(sa, []).append((sb, (tu, tv)))
            adjacency.setdefault(sb, []).append((sa, (tu, tv)))
        for k in adjacency:
            adjacency[k].sort()
        return _Composer(segments, seg_of, edge_pauli, adjacency)

    loops, components = _fundamental_cycles(
        builder.edges, seg_of, len(segments)
    )
    if len(segments) > 1 and len(components) > 1:
        raise EncodingError(
            "chain graph is disconnected; monomials across components "
            "cannot be encoded"
        )
    edge_ids = {id(e): i for i, e in enumerate(builder.edges)}

    def cycle_entries():
        comp = composer()
        out = []
        for traversal in loops:
            value = comp.loop_value(
                [((e["tu"], e["tv"]), fwd) for e, fwd in traversal]
            )
            row = 0
            for e, _ in traversal:
                row ^= 1 << edge_ids[id(e)]
            out.append((value, row))
        return out

    if loops:
        # Every cycle-space combination composing to a scalar must equal
        # +identity; solve for edge sign flips satisfying all of them.
        constraints, _ = _scalar_combinations(cycle_entries())
        if constraints:
            solution = _solve_gf2(
                [r for r, _ in constraints],
                [t for _, t in constraints],
                len(builder.edges),
            )
            for e in builder.edges:
                if (solution >> edge_ids[id(e)]) & 1:
                    e["sign"] ^= 1

    # Recompute loop values with the fixed gauge; non-scalar ones generate
    # the stabilizer group (the reduction re-raises on any leftover -1).
    stabilizers = []
    if loops:
        raw = []
        for value, _ in cycle_entries():
            if value.weight == 0:
                if value.phase_exp != 0:
                    raise EncodingError(
                        "a chain-graph loop composes to a non-identity scalar"
                    )
            else:
                if value.phase_exp % 2:
                    raise EncodingError("a chain-graph loop is not hermitian")
                raw.append(value)
        stabilizers = _reduce_stabilizers(raw)

    edges = tuple(
        SpecifiedEdge(
            u=e["u"],
            v=e["v"],
            tu=e["tu"],
            tv=e["tv"],
            pauli=pauli_of(e),
            kind=e["kind"],
        )
        for e in builder.edges
    )
    edge_index = {}
    for e in edges:
        sa, sb = seg_of[e.u], seg_of[e.v]
        edge_index.setdefault((sa, sb), e)
        edge_index.setdefault((sb, sa), e)

    layout = EncodingLayout(
        kind=builder.kind,
        dims=builder.dims,
        modes_per_cell=builder.m,
        n_modes=builder.n_modes,
        n_qubits=builder.n_qubits,
        face_qubits=dict(builder.face_qubits),
        segments=segments,
        edges=edges,
        stabilizer_generators=tuple(stabilizers),
        motif=builder.motif,
        _segment_of=seg_of,
        _edge_index=edge_index,
    )
    _validate_contract(layout)
    return layout


def _fermionic_anticommute(factors_a, factors_b) -> bool:
    """Whether two even Majorana products anticommute."""
    shared = len(set(factors_a) & set(factors_b))
    return shared % 2 == 1


def _validate_contract(layout: EncodingLayout) -> None:
    """Pauli-level validation of the specified operator tables."""
    items = []
    for mode in range(layout.n_modes):
        items.append(((2 * mode, 2 * mode + 1), layout.vertex_op(mode)))
    for e in layout.edges:
        items.append(((e.tu, e.tv), e.pauli))
    for i in range(len(items)):
        fa, pa = items[i]
        for j in range(i + 1, len(items)):
            fb, pb = items[j]
            want_anti = _fermionic_anticommute(fa, fb)
            if commutes(pa, pb) == want_anti:
                raise EncodingError(
                    f"operator table violates the commutation contract: "
                    f"{fa} vs {fb}"
                )
    for e in layout.edges:
        for t in (e.tu, e.tv):
            mode, bar = divmod(t, 2)
            seg = layout.segments[layout.segment_of(mode)]
            if e.pauli.letter(mode) != _port_letter(mode, seg, bar=bool(bar)):
                raise EncodingError(
                    "edge port letter contradicts the local chain images"
                )
    for s in layout.stabilizer_generators:
        for _, p in items:
            if not commutes(s, p):
                raise EncodingError("stabilizer clashes with a specified operator")
    for i, s in enumerate(layout.stabilizer_generators):
        for t in layout.stabilizer_generators[i + 1:]:
            if not commutes(s, t):
                raise EncodingError("stabilizer generators do not commute")


# ---------------------------------------------------------------------------
# Encoding of monomials
# ---------------------------------------------------------------------------


def _composer_for(layout: EncodingLayout) -> _Composer:
    edge_pauli = {(e.tu, e.tv): e.pauli for e in layout.edges}
    adjacency = {}
    for e in layout.edges:
        sa, sb = layout._segment_of[e.u], layout._segment_of[e.v]
        adjacency.setdefault(sa, []).append((sb, (e.tu, e.tv)))
        adjacency.setdefault(sb, []).append((sa, (e.tu, e.tv)))
    for k in adjacency:
        adjacency[k].sort()
    return _Composer(layout.segments, layout._segment_of, edge_pauli, adjacency)


def encode(monomial, layout: EncodingLayout) -> PauliString:
    """Pauli string of the ordered product of a monomial's Majorana factors.

    Accepts a MajoranaMonomial (coefficient ignored) or a plain sequence of
    typed Majorana indices.  The monomial must have even weight; factors in
    the same segment multiply exactly, factors in different segments compose
    through the shortest path of specified edges.
    """
    if isinstance(monomial, MajoranaMonomial):
        factors = monomial.factors
    else:
        factors = tuple(monomial)
    if len(factors) % 2 != 0:
        raise EncodingError("odd-weight monomials violate parity superselection")
    for f in factors:
        if not 0 <= f < 2 * layout.n_modes:
            raise EncodingError(f"Majorana index {f} out of range")
    comp = _composer_for(layout)
    acc = PauliString.identity()
    for i in range(0, len(factors), 2):
        a, b = factors[i], factors[i + 1]
        if a == b:
            continue
        if comp.seg_of[a // 2] == comp.seg_of[b // 2]:
            acc = multiply(acc, comp.jw_pair(a, b))
        else:
            acc = multiply(acc, comp.encode_pair(a, b))
    return acc


def stabilizers(layout: EncodingLayout) -> list:
    """Stabilizer generators (one per non-trivial face loop); empty for JW."""
    return list(layout.stabilizer_generators)


def dump_layout(layout: EncodingLayout) -> str:
    """Textual dump: qubit roles, vertex/edge tables, stabilizers."""
    lines = [
        f"kind {layout.kind}",
        f"dims {layout.dims[0]} {layout.dims[1]} {layout.dims[2]}",
        f"modes_per_cell {layout.modes_per_cell}",
        f"qubits {layout.n_qubits}",
    ]
    for mode in range(layout.n_modes):
        cell, local = layout.cell_of_mode(mode)
        lines.append(
            f"qubit {mode} data cell={cell[0]},{cell[1]},{cell[2]} mode={local}"
        )
    for key, q in sorted(layout.face_qubits.items(), key=lambda kv: kv[1]):
        plane, fx, fy, fz = key
        lines.append(f"qubit {q} face plane={plane} key={fx},{fy},{fz}")
    for mode in range(layout.n_modes):
        lines.append(f"vertex {mode} {render(layout.vertex_op(mode))}")
    for e in layout.edges:
        lines.append(f"edge {e.kind} {e.u} {e.v} {render(e.pauli)}")
    for s in layout.stabilizer_generators:
        lines.append(f"stabilizer {render(s)}")
    return "\n".join(lines) + "\n"
