"""Unit-cell motif compiler for periodic multi-band lattice models.

Compiles one translation-invariant motif of a materials Hamiltonian into
depth totals that tile to arbitrarily large lattices.  Terms are split into
three groups:

* onsite — intra-cell densities and exchange, compiled on the cell's local
  mode chain with disjoint-qubit sublayering;
* nearest-neighbour bonds — compiled per axis with a seat-level simulation
  of fermionic-swap choreography between the two cells of a bond (crossing
  swaps across an inter-cell boundary, cost-1 staging within a cell);
* beyond-nearest-neighbour hoppings — costed directly from the encoded
  operator weights of the 3D layout, packed into disjoint-support sublayers.

Bond groups whose translated copies touch shared cells receive a phase
multiplier from a tiling certificate; everything else runs in parallel
across translates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

from . import costing, encoding, hamiltonian as ham, measurement, passes

AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
_AXIS_KIND = {(1, 0, 0): "x", (0, 1, 0): "y", (0, 0, 1): "z"}


def load_fixture(name: str = "srvo3") -> ham.HamiltonianInput:
    """Load a packaged coefficient document by name."""
    text = (resources.files(__package__) / "data" / f"{name}.json").read_text()
    return ham.load_input(text)


def _canonical(r: tuple[int, int, int]) -> bool:
    """True for displacement vectors whose first nonzero entry is positive
    (one representative per hermitian-conjugate pair)."""
    for x in r:
        if x:
            return x > 0
    return True


def classify_hoppings(inp: ham.HamiltonianInput):
    """Split screened hopping entries into onsite, per-axis NN, and
    beyond-NN lists, keeping one representative per conjugate pair."""
    onsite, nn, far = [], {axis: [] for axis in AXES}, []
    tau = inp.tau0 or 0.0
    for h in inp.hoppings:
        if abs(h.value) < tau:
            continue
        if h.R == (0, 0, 0):
            if (h.m, h.n) <= (h.n, h.m):
                onsite.append(h)
        elif not _canonical(h.R):
            continue
        elif h.R in nn:
            nn[h.R].append(h)
        else:
            far.append(h)
    return onsite, nn, far


def _local(orb: int, spin: int) -> int:
    """Cell-local mode index: orbital-major, spin fastest (orbitals are
    1-based)."""
    return 2 * (orb - 1) + spin


def _mode(spec: ham.LatticeSpec, cell, orb: int, spin: int) -> int:
    return ham.flatten_index(spec, cell, orb, spin) - 1


# ---------------------------------------------------------------------------
# Onsite group


def onsite_terms(inp: ham.HamiltonianInput) -> list[passes.HamTerm]:
    """Cell-local Majorana terms: diagonal densities, intra-cell hopping
    monomials, and spinful density-density pairs from all-onsite Coulomb
    entries.  Mode indices are cell-local (0..2*orbitals-1)."""
    onsite, _, _ = classify_hoppings(inp)
    terms: list[passes.HamTerm] = []
    for h in onsite:
        for spin in (0, 1):
            i, j = _local(h.m, spin), _local(h.n, spin)
            if i == j:
                terms.append(passes.HamTerm((2 * i, 2 * i + 1), h.value))
            else:
                terms.append(passes.HamTerm((2 * i + 1, 2 * j), h.value))
                terms.append(passes.HamTerm((2 * j + 1, 2 * i), h.value))
    seen = set()
    for c in inp.coulombs:
        if any(s != (0, 0, 0) for s in c.sites):
            continue
        a, b = c.orbitals[0], c.orbitals[1]
        if c.orbitals != (a, b, b, a):
            continue
        spin_pairs = (
            [(0, 1)] if a == b else [(0, 0), (0, 1), (1, 0), (1, 1)]
        )
        for sa, sb in spin_pairs:
            i, j = _local(a, sa), _local(b, sb)
            if i == j:
                continue
            key = tuple(sorted((i, j)))
            if key in seen:
                continue
            seen.add(key)
            i, j = key
            terms.append(
                passes.HamTerm((2 * i, 2 * i + 1, 2 * j, 2 * j + 1), c.value)
            )
    return terms


def compile_onsite(inp: ham.HamiltonianInput) -> passes.CircuitIR:
    terms = onsite_terms(inp)
    n_modes = 2 * inp.spec.orbitals_per_cell
    return passes.compile_cell(terms, n_modes=n_modes, use_swaps=False)


# ---------------------------------------------------------------------------
# Nearest-neighbour bond choreography

_CROSSING_DEPTH = costing.fswap_depth(crossing=True, dim=3)


class _BondArena:
    """Seat-level simulation of one NN bond: two cell chains A and B with a
    boundary between A's last seat and B's first seat.  Every adjacent
    transposition within a cell is a depth-1 swap layer (A and B move in
    lockstep); an exchange across the boundary is a crossing swap."""

    def __init__(self, n: int):
        self.n = n
        self.a = list(range(n))  # seat -> mode
        self.b = list(range(n))
        self.ir = passes.CircuitIR()

    def _route(self, seats, mode, target):
        pos = seats.index(mode)
        steps = []
        while pos != target:
            nxt = pos + (1 if target > pos else -1)
            steps.append((pos, nxt))
            seats[pos], seats[nxt] = seats[nxt], seats[pos]
            pos = nxt
        return steps

    def stage(self, a_mode=None, a_seat=None, b_mode=None, b_seat=None):
        """Move one mode in each cell to a target seat; lockstep layers."""
        sa = self._route(self.a, a_mode, a_seat) if a_mode is not None else []
        sb = self._route(self.b, b_mode, b_seat) if b_mode is not None else []
        for k in range(max(len(sa), len(sb))):
            ins = []
            if k < len(sa):
                ins.append(f"fswap A{sa[k][0]} A{sa[k][1]}")
            if k < len(sb):
                ins.append(f"fswap B{sb[k][0]} B{sb[k][1]}")
            self.ir.layers.append(passes.IRLayer("fswap", ins, 1))

    def cross(self):
        last = self.n - 1
        self.a[last], self.b[0] = self.b[0], self.a[last]
        self.ir.layers.append(
            passes.IRLayer(
                "fswap", [f"fswap A{last} B0 crossing"], _CROSSING_DEPTH
            )
        )

    def interact(self, pairs, depth):
        """One rotation sublayer acting on disjoint seat pairs."""
        ins = [f"rotate {p} {q}" for p, q in pairs]
        self.ir.layers.append(passes.IRLayer("interact", ins, depth))

    def restore(self):
        """Bubble both chains back to sorted order, lockstep layers."""
        while self.a != sorted(self.a) or self.b != sorted(self.b):
            ins = []
            for seats, name in ((self.a, "A"), (self.b, "B")):
                for k in range(len(seats) - 1):
                    if seats[k] > seats[k + 1]:
                        seats[k], seats[k + 1] = seats[k + 1], seats[k]
                        ins.append(f"fswap {name}{k} {name}{k + 1}")
                        break
            if not ins:
                break
            self.ir.layers.append(passes.IRLayer("fswap", ins, 1))


def compile_bond_crossing(pair_locals, n_modes: int) -> passes.CircuitIR:
    """Bond choreography with visitor crossings: each round ferries one
    mode of each cell across the boundary, interacts both served pairs in
    parallel inside their host cells, then returns the visitors."""
    arena = _BondArena(n_modes)
    last = n_modes - 1
    pairs = sorted(pair_locals)
    half = len(pairs) // 2
    in_b, in_a = pairs[:half], pairs[::-1][:len(pairs) - half]
    for (ta, _), (tb, _) in itertools.zip_longest(
        in_a, in_b, fillvalue=(None, None)
    ):
        # Visitors to the boundary seats: B's copy of ta enters A, A's copy
        # of tb enters B.
        arena.stage(
            a_mode=tb, a_seat=(last if tb is not None else None),
            b_mode=ta, b_seat=(0 if ta is not None else None),
        )
        arena.cross()
        # Partners next to the visitors.
        arena.stage(
            a_mode=ta, a_seat=(last - 1 if ta is not None else None),
            b_mode=tb, b_seat=(1 if tb is not None else None),
        )
        served = []
        if ta is not None:
            served.append((f"A{last - 1}", f"A{last}"))
        if tb is not None:
            served.append(("B0", "B1"))
        arena.interact(served, 1)
        arena.interact(served, 1)
        arena.cross()
    arena.restore()
    assert arena.a == sorted(arena.a) and arena.b == sorted(arena.b)
    return arena.ir


def compile_bond_boundary(
    pair_locals, n_modes: int, junction_cost: int
) -> passes.CircuitIR:
    """Bond choreography without crossings: each pair is staged to the two
    boundary seats and rotated directly across the junction."""
    arena = _BondArena(n_modes)
    last = n_modes - 1
    for la, lb in sorted(pair_locals, key=lambda p: -p[0]):
        arena.stage(a_mode=la, a_seat=last, b_mode=lb, b_seat=0)
        arena.interact([(f"A{last}", "B0")], junction_cost)
        arena.interact([(f"A{last}", "B0")], junction_cost)
    arena.restore()
    assert arena.a == sorted(arena.a) and arena.b == sorted(arena.b)
    return arena.ir


def junction_weight(layout: encoding.EncodingLayout, axis) -> int:
    """Smallest encoded weight of a quadratic across the designated edge of
    the given bond direction."""
    kind = _AXIS_KIND[axis]
    weights = [e.pauli.weight for e in layout.edges if e.kind == kind]
    if not weights:
        return 2
    return min(weights)


def nn_certificate(
    spec: ham.LatticeSpec, axis
) -> passes.TilingCertificate:
    """Tiling certificate for one bond direction: supports are the mode
    sets of the two cells of each in-lattice bond."""
    dims = spec.dims
    n_orb = spec.orbitals_per_cell

    def cell_modes(cell):
        return frozenset(
            _mode(spec, cell, m, s)
            for m in range(1, n_orb + 1)
            for s in (0, 1)
        )

    supports = {}
    for src in itertools.product(*(range(d) for d in dims)):
        dst = tuple(c + a for c, a in zip(src, axis))
        if all(0 <= x < d for x, d in zip(dst, dims)):
            supports[src] = cell_modes(src) | cell_modes(dst)
    return passes.tile_unit_cell(supports, dims)


# ---------------------------------------------------------------------------
# Beyond-nearest-neighbour hoppings


def far_monomials(
    inp: ham.HamiltonianInput, layout: encoding.EncodingLayout
):
    """Encoded Pauli operators of every in-lattice translate of the
    beyond-NN hoppings (two hermitian monomials per hopping)."""
    spec = inp.spec
    _, _, far = classify_hoppings(inp)
    paulis = []
    for h in far:
        for src in itertools.product(*(range(d) for d in spec.dims)):
            dst = tuple(c + r for c, r in zip(src, h.R))
            if not all(0 <= x < d for x, d in zip(dst, spec.dims)):
                continue
            for spin in (0, 1):
                i = _mode(spec, src, h.m, spin)
                j = _mode(spec, dst, h.n, spin)
                for factors in ((2 * i + 1, 2 * j), (2 * j + 1, 2 * i)):
                    paulis.append(
                        encoding.encode(tuple(sorted(factors)), layout)
                    )
    return paulis


def compile_far(inp: ham.HamiltonianInput, layout) -> tuple[int, int]:
    """(interaction depth, monomial count) of the beyond-NN group: encoded
    rotations packed into disjoint-support sublayers, no swaps."""
    paulis = far_monomials(inp, layout)
    if not paulis:
        return 0, 0
    classes = passes.pass_disjoint_qubits(paulis, merge_two_qubit=False)
    depth = sum(
        max(costing.rotation_depth(paulis[i].weight) for i in cls)
        for cls in classes
    )
    return depth, len(paulis)


# ---------------------------------------------------------------------------
# Measurement term set and report


def motif_terms(inp: ham.HamiltonianInput) -> list[passes.HamTerm]:
    """Hamiltonian terms of one motif cell and its outgoing bonds, over
    global mode indices; beyond-NN hoppings carry the far tag."""
    spec = inp.spec
    center = tuple(d // 2 for d in spec.dims)
    onsite, nn, far = classify_hoppings(inp)
    terms: list[passes.HamTerm] = []

    def glob(local_term, cell):
        remap = {}
        for f in local_term.factors:
            loc = f // 2
            orb, spin = divmod(loc, 2)
            remap[loc] = _mode(spec, cell, orb + 1, spin)
        factors = tuple(2 * remap[f // 2] + (f % 2) for f in local_term.factors)
        return passes.HamTerm(factors, local_term.coeff, cells=(cell,))

    for t in onsite_terms(inp):
        terms.append(glob(t, center))
    for axis, entries in nn.items():
        dst = tuple(c + a for c, a in zip(center, axis))
        for h in entries:
            for spin in (0, 1):
                i = _mode(spec, center, h.m, spin)
                j = _mode(spec, dst, h.n, spin)
                for factors in ((2 * i + 1, 2 * j), (2 * j + 1, 2 * i)):
                    terms.append(
                        passes.HamTerm(
                            tuple(sorted(factors)), h.value,
                            cells=(center, dst),
                        )
                    )
    for h in far:
        dst = tuple(c + r for c, r in zip(center, h.R))
        for spin in (0, 1):
            i = _mode(spec, center, h.m, spin)
            j = _mode(spec, dst, h.n, spin)
            for factors in ((2 * i + 1, 2 * j), (2 * j + 1, 2 * i)):
                terms.append(
                    passes.HamTerm(
                        tuple(sorted(factors)), h.value,
                        cells=(center, dst), tag=passes.NNN_PLUS,
                    )
                )
    return terms


@dataclass(frozen=True)
class MotifReport:
    material: str
    qubits: int
    faces: int
    onsite_interactions: int
    nn_interactions: int
    nn_swaps: int
    far_interactions: int
    far_terms: int
    certificates: dict
    measurement: dict

    @property
    def local_interactions(self) -> int:
        return self.onsite_interactions + self.nn_interactions

    @property
    def local_swaps(self) -> int:
        return self.nn_swaps

    @property
    def total(self) -> int:
        return self.local_interactions + self.local_swaps + self.far_interactions

    def rows(self):
        return [
            ("qubits", self.qubits),
            ("face_qubits", self.faces),
            ("onsite_nn_interactions", self.local_interactions),
            ("onsite_nn_swaps", self.local_swaps),
            ("far_interactions", self.far_interactions),
            ("far_swaps", 0),
            ("far_terms", self.far_terms),
            ("total_depth", self.total),
        ] + [
            (f"measurement_{k.lower()}_rounds", v)
            for k, v in sorted(self.measurement.items())
        ]


def compile_motif(
    inp: ham.HamiltonianInput,
    material: str = "input",
    with_measurement: bool = True,
) -> MotifReport:
    """Compile the motif of a coefficient document into tiled depth totals
    and measurement round counts."""
    spec = inp.spec
    layout = encoding.build_layout(
        encoding.grid_motif(spec.dims), 2 * spec.orbitals_per_cell, "Hybrid3D"
    )
    n_modes = 2 * spec.orbitals_per_cell

    onsite_ir = compile_onsite(inp)
    onsite_int = onsite_ir.depth_by_kind("interact")

    _, nn, _ = classify_hoppings(inp)
    nn_int = nn_swap = 0
    certificates = {}
    for axis, entries in nn.items():
        if not entries:
            continue
        pairs = [
            (_local(h.m, s), _local(h.n, s)) for h in entries for s in (0, 1)
        ]
        cost = costing.rotation_depth(junction_weight(layout, axis))
        if cost <= 1:
            ir = compile_bond_boundary(pairs, n_modes, junction_cost=1)
        else:
            ir = compile_bond_crossing(pairs, n_modes)
        cert = nn_certificate(spec, axis)
        certificates[_AXIS_KIND[axis]] = cert
        nn_int += ir.depth_by_kind("interact") * cert.multiplier
        nn_swap += ir.depth_by_kind("fswap") * cert.multiplier

    far_int, far_terms = compile_far(inp, layout)

    meas = {}
    if with_measurement:
        meas = measurement.plan_counts(motif_terms(inp))

    return MotifReport(
        material=material,
        qubits=layout.n_qubits,
        faces=layout.n_faces,
        onsite_interactions=onsite_int,
        nn_interactions=nn_int,
        nn_swaps=nn_swap,
        far_interactions=far_int,
        far_terms=far_terms,
        certificates=certificates,
        measurement=meas,
    )


def srvo3_report(with_measurement: bool = True) -> MotifReport:
    return compile_motif(
        load_fixture("srvo3"), "SrVO3", with_measurement=with_measurement
    )
