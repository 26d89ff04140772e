"""Measurement-round planning for quadratic/quartic Majorana term sets.

Three strategies are supported:

* QWC  — qubitwise-commuting grouping of the encoded Pauli strings.
* NC   — non-crossing pair protocols: each round applies a two-qubit basis
         change on the endpoints of a non-crossing matching of the modes and
         then measures in the computational basis.
* COM  — general commuting grouping (round circuits are not synthesized;
         only counts and memberships are produced).

The module also provides the analytic constructions behind the round-count
bounds: circle matchings covering all mode pairs, recursive block
constructions covering all quadruples, the binary-partition plan for
three-mode terms, and an explicit pairwise-QWC-incompatible witness family.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from . import pauli_core as pc
from . import passes

# Per-pair basis tags.  Each tag names the commuting two-qubit operators the
# basis diagonalizes: the basis change before a computational-basis readout
# makes all of them simultaneously accessible (the product of the first two
# always equals +/-ZZ, so ZZ comes for free).
XXYYZZ = "XXYYZZ-basis"
XYYXZZ = "XYYXZZ-basis"
ZZ = "ZZ-basis"


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Matching:
    """Disjoint mode-index pairs over {1..M}, optionally basis-tagged."""

    pairs: tuple[tuple[int, int], ...]
    bases: tuple[str, ...] | None = None

    def __post_init__(self):
        seen = set()
        for a, b in self.pairs:
            if a == b or a in seen or b in seen:
                raise ValueError("pairs must be pairwise disjoint")
            seen.update((a, b))
        if self.bases is not None and len(self.bases) != len(self.pairs):
            raise ValueError("one basis tag per pair required")

    @property
    def modes(self) -> frozenset[int]:
        return frozenset(m for p in self.pairs for m in p)

    def noncrossing(self) -> bool:
        return all(
            noncrossing_compatible(p, q)
            for p, q in itertools.combinations(self.pairs, 2)
        )


def noncrossing_compatible(t1, t2, types1=None, types2=None) -> bool:
    """Whether two quadratic index pairs can share a non-crossing round.

    Pairs must be disjoint and non-interleaved (fully separated or nested),
    or have equal support with matching endpoint-type sets ({XX, YY} versus
    {XY, YX}); interleaved i < k <= l < j being violated both ways is a
    crossing, and sharing exactly one endpoint is a conflict.
    """
    i, j = min(t1), max(t1)
    k, l = min(t2), max(t2)
    if (i, j) == (k, l):
        if types1 is None or types2 is None:
            return True
        return frozenset(types1) == frozenset(types2)
    return j < k or l < i or i < k <= l < j or k < i <= j < l


def _pairs_of(matching_like):
    if isinstance(matching_like, Matching):
        return matching_like.pairs
    return tuple(tuple(sorted(p)) for p in matching_like)


def _as_matching(pairs) -> Matching:
    return Matching(tuple(sorted(tuple(sorted(p)) for p in pairs)))


# ---------------------------------------------------------------------------
# Pair-covering subroutines
# ---------------------------------------------------------------------------

def circle_matchings(M: int, modes=None) -> list[Matching]:
    """M matchings of parallel circle chords covering every pair.

    The j-th matching pairs positions (i, j-i mod M); a position with
    j-i = i mod M stays unpaired.  All matchings are non-crossing.
    """
    if M < 2 and modes is None:
        raise ValueError("need at least two modes")
    labels = list(modes) if modes is not None else list(range(1, M + 1))
    s = len(labels)
    out = []
    for j in range(1, s + 1):
        pairs = set()
        for i in range(s):
            partner = (j - i) % s
            if partner != i:
                pairs.add(tuple(sorted((labels[i], labels[partner]))))
        out.append(_as_matching(pairs))
    return out


def all_pairs_matchings(items) -> list[list[tuple[int, int]]]:
    """Round-robin schedule: |S|-1 perfect matchings covering all pairs."""
    items = list(items)
    n = len(items)
    if n < 2:
        return []
    if n % 2:
        raise ValueError("even set required")
    # circle method: fix items[-1], rotate the others
    ring = list(range(n - 1))
    out = []
    for _ in range(n - 1):
        pairs = [tuple(sorted((items[ring[0]], items[n - 1])))]
        for i in range(1, n // 2):
            pairs.append(tuple(sorted(
                (items[ring[i]], items[ring[n - 1 - i]]))))
        out.append(sorted(pairs))
        ring = [ring[-1]] + ring[:-1]
    return out


def bipartite_matchings(left, right) -> list[list[tuple[int, int]]]:
    """|A| perfect matchings covering all cross pairs of two equal sets."""
    left, right = list(left), list(right)
    s = len(left)
    if s != len(right):
        raise ValueError("equal block sizes required")
    return [
        sorted(tuple(sorted((left[i], right[(i + k) % s])))
               for i in range(s))
        for k in range(s)
    ]


# ---------------------------------------------------------------------------
# Quadruple-covering constructions
# ---------------------------------------------------------------------------

def _blocks(M: int, n: int) -> list[list[int]]:
    size = 1 << n
    return [list(range(m * size + 1, (m + 1) * size + 1))
            for m in range(M // size)]


def _check_pow2(M: int, minimum: int = 4):
    if M < minimum or M & (M - 1):
        raise ValueError(f"M must be a power of 2, at least {minimum}")


def quadruples_covered(matching: Matching) -> set[frozenset[int]]:
    return {
        frozenset(p + q)
        for p, q in itertools.combinations(matching.pairs, 2)
        if not set(p) & set(q)
    }


def com_quadruple_matchings(M: int) -> list[Matching]:
    """Recursive block construction covering all quadruples of {1..M}.

    Intra-block: for every block level, products of all-pairs schedules of
    the two halves, run in parallel across blocks.  Inter-block: block pairs
    from a complete-graph edge coloring; within a block pair, bipartite
    matchings between chosen halves extended by all-pairs matchings of the
    complementary halves.  Count <= 5M^2/6.
    """
    _check_pow2(M)
    K = M.bit_length() - 1
    out: list[Matching] = []
    seen = set()

    def emit(pairs):
        m = _as_matching(pairs)
        if m.pairs and m.pairs not in seen:
            seen.add(m.pairs)
            out.append(m)

    for n in range(1, K + 1):
        halves = _blocks(M, n - 1)
        lefts = [all_pairs_matchings(halves[2 * m])
                 for m in range(len(halves) // 2)]
        rights = [all_pairs_matchings(halves[2 * m + 1])
                  for m in range(len(halves) // 2)]
        t = (1 << (n - 1)) - 1
        for i in range(t):
            for j in range(t):
                pairs = []
                for m in range(len(halves) // 2):
                    pairs += lefts[m][i] + rights[m][j]
                emit(pairs)

    for n in range(1, K):
        n_blocks = M >> n
        halves = _blocks(M, n - 1)
        ext = (1 << (n - 1)) - 1
        for mu in all_pairs_matchings(range(n_blocks)):
            for c, d in itertools.product((0, 1), repeat=2):
                for s in range(1 << (n - 1)):
                    for k in range(ext):
                        pairs = []
                        for a, b in mu:
                            pairs += bipartite_matchings(
                                halves[2 * a + c], halves[2 * b + d])[s]
                            pairs += all_pairs_matchings(
                                halves[2 * a + 1 - c])[k]
                            pairs += all_pairs_matchings(
                                halves[2 * b + 1 - d])[k]
                        emit(pairs)
    return out


def nc_quadruple_matchings(M: int) -> list[Matching]:
    """Non-crossing quadruple cover: the block construction with circle
    matchings substituted for every all-pairs step and with the cross-block
    bipartite step replaced by circle matchings on the union of the two
    chosen halves.  The candidate list is pruned by greedy set cover; the
    result covers all quadruples in <= 7M^2/6 non-crossing matchings, each
    of which expands to two measurement rounds (XX/YY and XY/YX bases)."""
    _check_pow2(M)
    K = M.bit_length() - 1
    candidates: list[Matching] = []
    seen = set()

    def emit(pairs):
        m = _as_matching(pairs)
        if m.pairs and m.pairs not in seen:
            seen.add(m.pairs)
            candidates.append(m)

    for n in range(2, K + 1):
        halves = _blocks(M, n - 1)
        lefts = [circle_matchings(0, modes=halves[2 * m])
                 for m in range(len(halves) // 2)]
        rights = [circle_matchings(0, modes=halves[2 * m + 1])
                  for m in range(len(halves) // 2)]
        t = 1 << (n - 1)
        for i in range(t):
            for j in range(t):
                pairs = []
                for m in range(len(halves) // 2):
                    pairs += lefts[m][i].pairs + rights[m][j].pairs
                emit(pairs)

    for n in range(1, K):
        n_blocks = M >> n
        halves = _blocks(M, n - 1)
        ext = max(1 << (n - 1), 1)
        for mu in circle_matchings(0, modes=range(n_blocks)):
            if not mu.pairs:
                continue
            for c, d in itertools.product((0, 1), repeat=2):
                for s in range(1 << n):
                    for k in range(ext):
                        pairs = []
                        ok = True
                        for a, b in mu.pairs:
                            union = sorted(
                                halves[2 * a + c] + halves[2 * b + d])
                            pairs += circle_matchings(0, modes=union)[s].pairs
                            if len(halves[0]) > 1:
                                pairs += circle_matchings(
                                    0, modes=halves[2 * a + 1 - c])[k].pairs
                                pairs += circle_matchings(
                                    0, modes=halves[2 * b + 1 - d])[k].pairs
                        if ok:
                            emit(pairs)

    candidates = [m for m in candidates if m.noncrossing()]
    return _greedy_cover(M, candidates)


def _greedy_cover(M: int, candidates: list[Matching]) -> list[Matching]:
    """Greedy set cover of all quadruples of {1..M} by the candidates."""
    target = {frozenset(q) for q in itertools.combinations(
        range(1, M + 1), 4)}
    cover = [quadruples_covered(m) for m in candidates]
    chosen: list[Matching] = []
    remaining = set(target)
    while remaining:
        best, best_gain = None, 0
        for idx, quads in enumerate(cover):
            gain = len(quads & remaining)
            if gain > best_gain:
                best, best_gain = idx, gain
        if best is None:
            raise RuntimeError("candidate pool does not cover all quadruples")
        chosen.append(candidates[best])
        remaining -= cover[best]
    return chosen


# ---------------------------------------------------------------------------
# Measurement rounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementRound:
    """Per-pair entangled bases plus per-qubit Z readout of everything else.

    ``pairs``/``bases`` give the two-mode basis changes; ``singles`` are the
    unpaired modes (computational basis); ``covered`` lists term ids."""

    pairs: tuple[tuple[int, int], ...]
    bases: tuple[str, ...]
    singles: tuple[int, ...] = ()
    covered: tuple = ()
    qubit_letters: tuple[tuple[int, str], ...] = ()

    def generators(self) -> list[pc.PauliString]:
        """The commuting Pauli set the round diagonalizes (modes 1-based,
        qubit q = mode - 1)."""
        gens = []
        for (a, b), basis in zip(self.pairs, self.bases):
            qa, qb = a - 1, b - 1
            if basis == XXYYZZ:
                gens.append(pc.PauliString.from_ops({qa: "X", qb: "X"}))
                gens.append(pc.PauliString.from_ops({qa: "Z", qb: "Z"}))
            elif basis == XYYXZZ:
                gens.append(pc.PauliString.from_ops({qa: "X", qb: "Y"}))
                gens.append(pc.PauliString.from_ops({qa: "Z", qb: "Z"}))
            elif basis == ZZ:
                gens.append(pc.PauliString.from_ops({qa: "Z"}))
                gens.append(pc.PauliString.from_ops({qb: "Z"}))
            else:
                raise ValueError(f"unknown basis tag {basis!r}")
        for m in self.singles:
            gens.append(pc.PauliString.from_ops({m - 1: "Z"}))
        for q, letter in self.qubit_letters:
            gens.append(pc.PauliString.from_ops({q: letter}))
        return gens


def _symplectic(p: pc.PauliString, n: int) -> int:
    """Bit vector (x | z) of a Pauli string as one integer."""
    v = 0
    for q, letter in p.ops:
        if letter in ("X", "Y"):
            v |= 1 << q
        if letter in ("Z", "Y"):
            v |= 1 << (n + q)
    return v


def round_covers(rnd: MeasurementRound, pauli: pc.PauliString,
                 n_modes: int) -> bool:
    """Whether the round's basis diagonalizes the given Pauli: true iff the
    string lies in the GF(2) span of the round's measured generators."""
    basis: list[int] = []
    for g in rnd.generators():
        v = _symplectic(g, n_modes)
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    v = _symplectic(pauli, n_modes)
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


def three_mode_plan(M: int) -> list[MeasurementRound]:
    """Non-crossing rounds measuring every correlated-hopping term
    (a quadratic pair string times one extra Z) in <= 2M log2(M/2) rounds.

    For each circle matching, pairs get binary labels; for every label bit
    there are two rounds, one measuring label-0 pairs in the XY/YX basis and
    label-1 pairs in the computational basis, and one inverted — so any two
    distinct pairs are split between the bases in some round."""
    _check_pow2(M, minimum=2)
    m_bits = M.bit_length() - 1
    rounds: list[MeasurementRound] = []
    if M <= 2:
        return rounds
    for matching in circle_matchings(M):
        paired = matching.modes
        singles = tuple(x for x in range(1, M + 1) if x not in paired)
        for j in range(m_bits - 1):
            for invert in (0, 1):
                bases = tuple(
                    XYYXZZ if ((idx >> j) & 1) ^ invert == 0 else ZZ
                    for idx in range(len(matching.pairs))
                )
                rounds.append(MeasurementRound(
                    matching.pairs, bases, singles))
    return rounds


def three_mode_terms(M: int) -> list[pc.PauliString]:
    """All terms X_i Z..Z Y_j Z_k and Y_i Z..Z X_j Z_k (modes 1-based,
    qubit q = mode - 1): 2 C(M,2) (M-2) strings."""
    out = []
    for i, j in itertools.combinations(range(1, M + 1), 2):
        for k in range(1, M + 1):
            if k in (i, j):
                continue
            for a, b in (("X", "Y"), ("Y", "X")):
                ops = {i - 1: a, j - 1: b}
                for l in range(i + 1, j):
                    ops[l - 1] = "Z"
                q = k - 1
                ops[q] = "I" if ops.get(q) == "Z" else "Z"
                ops = {p: o for p, o in ops.items() if o != "I"}
                out.append(pc.PauliString.from_ops(ops))
    return out


def qwc_witness(M: int) -> list[pc.PauliString]:
    """A family of >= M^4/16 pairwise qubitwise-incompatible quartic strings.

    Index quadruples i <= M/4 < j < k <= 3M/4 < l with letters in {X, Y} at
    the four endpoints and Z strings on (i,j) and (k,l): any two distinct
    members disagree qubitwise somewhere (a Z against an X/Y)."""
    if M % 4:
        raise ValueError("M must be a multiple of 4")
    q1, q3 = M // 4, 3 * M // 4
    out = []
    for i in range(1, q1 + 1):
        for j, k in itertools.combinations(range(q1 + 1, q3 + 1), 2):
            for l in range(q3 + 1, M + 1):
                for letters in itertools.product("XY", repeat=4):
                    ops = {}
                    for pos, letter in zip((i, j, k, l), letters):
                        ops[pos - 1] = letter
                    for z in itertools.chain(range(i + 1, j),
                                             range(k + 1, l)):
                        ops[z - 1] = "Z"
                    out.append(pc.PauliString.from_ops(ops))
    return out


def bound_table(M: int) -> dict[str, list[float]]:
    """Analytic [lower, upper] round-count bounds per strategy."""
    if M < 4:
        raise ValueError("M >= 4 required")
    return {
        "qwc": [M ** 4 / 16, (14 / 15) * M ** 4 / 3],
        "nc": [2 * M ** 2 / 3, 7 * M ** 2 / 3],
        "com": [2 * M ** 2 / 3, 5 * M ** 2 / 3],
    }


# ---------------------------------------------------------------------------
# Planning
# ---------------------------------------------------------------------------

@dataclass
class _TermView:
    idx: int
    factors: tuple[int, ...]
    tag: str | None
    pauli_x: int = 0          # X-component bitmask of the JW string
    pauli_z: int = 0          # Z-component bitmask
    pairs: tuple = ()         # NC decomposition: entangled mode pairs
    types: tuple = ()         # per-pair endpoint parity types
    zmodes: tuple = ()        # NC decomposition: single-Z modes


def _decompose(factors, fixed) -> tuple[tuple, tuple, tuple]:
    """Split a Majorana monomial into single-Z modes and entangled mode
    pairs, choosing the quartic pairing with the fewest crossings against
    already-fixed pairs (non-crossing option preferred, ties sequential)."""
    by_mode: dict[int, list[int]] = {}
    for f in factors:
        by_mode.setdefault(f // 2, []).append(f % 2)
    zmodes = tuple(sorted(m for m, ts in by_mode.items() if len(ts) == 2))
    loose = sorted(m for m, ts in by_mode.items() if len(ts) == 1)
    ptype = {m: by_mode[m][0] for m in loose}

    def typed(pair):
        return (ptype[pair[0]], ptype[pair[1]])

    if len(loose) == 0:
        return (), (), zmodes
    if len(loose) == 2:
        pair = (loose[0], loose[1])
        return (pair,), (typed(pair),), zmodes
    a, b, c, d = loose
    options = [((a, b), (c, d)), ((a, d), (b, c))]  # crossing (a,c),(b,d) out

    def conflicts(option):
        return sum(
            0 if noncrossing_compatible(p, q) else 1
            for p in option for q in fixed
        )

    best = min(options, key=conflicts)
    return best, tuple(typed(p) for p in best), zmodes


def _nc_conflict(t1: _TermView, t2: _TermView) -> bool:
    for p, tp in zip(t1.pairs, t1.types):
        for q, tq in zip(t2.pairs, t2.types):
            if not noncrossing_compatible(p, q, (tp,), (tq,)):
                return True
    for z in t1.zmodes:
        if any(z in q for q in t2.pairs):
            return True
    for z in t2.zmodes:
        if any(z in p for p in t1.pairs):
            return True
    return False


def _dsatur_bitmask(n: int, adj: list[int]) -> list[int]:
    """DSATUR coloring over bitmask adjacency; returns color per vertex."""
    color = [-1] * n
    sat = [0] * n          # bitmask of neighbor colors
    degree = [a.bit_count() for a in adj]
    for _ in range(n):
        pick = max(
            (v for v in range(n) if color[v] < 0),
            key=lambda v: (sat[v].bit_count(), degree[v], -v),
        )
        c = 0
        while (sat[pick] >> c) & 1:
            c += 1
        color[pick] = c
        nb = adj[pick]
        while nb:
            v = (nb & -nb).bit_length() - 1
            sat[v] |= 1 << c
            nb &= nb - 1
    return color


def _views(terms) -> list[_TermView]:
    views = []
    for i, t in enumerate(terms):
        factors = tuple(t.factors)
        views.append(_TermView(i, factors, getattr(t, "tag", None)))
    return views


def _jw_masks(view: _TermView):
    p = passes.jw_pauli(
        view.factors, {f // 2: f // 2 for f in view.factors})
    view.pauli_x = sum(1 << q for q, l in p.ops if l in "XY")
    view.pauli_z = sum(1 << q for q, l in p.ops if l in "ZY")


def _color_classes(views, conflict) -> list[list[_TermView]]:
    n = len(views)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if conflict(views[i], views[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    colors = _dsatur_bitmask(n, adj)
    classes: dict[int, list[_TermView]] = {}
    for v, c in zip(views, colors):
        classes.setdefault(c, []).append(v)
    return [classes[c] for c in sorted(classes)]


def _qwc_conflict(a: _TermView, b: _TermView) -> bool:
    shared = (a.pauli_x | a.pauli_z) & (b.pauli_x | b.pauli_z)
    return bool(shared & ((a.pauli_x ^ b.pauli_x) | (a.pauli_z ^ b.pauli_z)))


def _com_conflict(a: _TermView, b: _TermView) -> bool:
    shared = len(set(a.factors) & set(b.factors))
    return (len(a.factors) * len(b.factors) - shared) % 2 == 1


def _nc_round(cls: list[_TermView], n_modes: int) -> MeasurementRound:
    basis_by_pair: dict[tuple[int, int], str] = {}
    for v in cls:
        for pair, tp in zip(v.pairs, v.types):
            # gamma-gamma / gbar-gbar pairs encode to XY/YX-type strings,
            # mixed-type pairs to XX/YY-type strings
            tag = XYYXZZ if tp[0] == tp[1] else XXYYZZ
            basis_by_pair.setdefault((pair[0] + 1, pair[1] + 1), tag)
    pairs = tuple(sorted(basis_by_pair))
    paired = {m for p in pairs for m in p}
    return MeasurementRound(
        pairs=pairs,
        bases=tuple(basis_by_pair[p] for p in pairs),
        singles=tuple(m for m in range(1, n_modes + 1) if m not in paired),
        covered=tuple(v.idx for v in cls),
    )


def _qwc_round(cls: list[_TermView], n_modes: int) -> MeasurementRound:
    """A per-qubit basis round: valid for any strategy, since single-qubit
    readout is trivially non-crossing and commuting."""
    letters: dict[int, str] = {}
    for v in cls:
        p = passes.jw_pauli(v.factors, {f // 2: f // 2 for f in v.factors})
        for q, letter in p.ops:
            letters[q] = letter
    for q in range(n_modes):
        letters.setdefault(q, "Z")
    return MeasurementRound(
        pairs=(), bases=(),
        covered=tuple(v.idx for v in cls),
        qubit_letters=tuple(sorted(letters.items())),
    )


def plan(terms, strategy: str, heuristic: str = "dsatur",
         z_first: bool = True) -> list[MeasurementRound]:
    """Group terms into measurement rounds under the chosen strategy.

    Terms are Majorana monomial carriers (``.factors`` of typed indices,
    optional ``.tag``).  All-Z (diagonal) terms share one computational
    round up front when ``z_first``.  Terms tagged long-range hybrid
    (NNN+) inside an NC plan are split off into a QWC subplan.  Round
    counts always satisfy COM <= NC <= QWC for a fixed term set because a
    finer-compatibility coloring is reused whenever it beats the coarser
    one."""
    strategy = strategy.upper()
    if strategy not in ("QWC", "NC", "COM"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if heuristic.lower() != "dsatur":
        raise ValueError(f"unknown coloring heuristic {heuristic!r}")
    views = _views(terms)
    if not views:
        return []

    rounds: list[MeasurementRound] = []
    if z_first:
        diagonal = [v for v in views
                    if all(f ^ 1 in v.factors for f in v.factors)]
        if diagonal:
            modes = sorted({f // 2 + 1 for v in diagonal for f in v.factors})
            rounds.append(MeasurementRound(
                pairs=(), bases=(), singles=tuple(modes),
                covered=tuple(v.idx for v in diagonal)))
            views = [v for v in views if v not in diagonal]
    if not views:
        return rounds

    deferred: list[_TermView] = []
    if strategy == "NC":
        deferred = [v for v in views if v.tag == passes.NNN_PLUS]
        views = [v for v in views if v.tag != passes.NNN_PLUS]

    n_modes = 1 + max(f // 2 for v in views + deferred for f in v.factors)
    for v in views:
        _jw_masks(v)
    qwc_classes = _color_classes(views, _qwc_conflict) if views else []

    per_qubit = True  # emit classes as per-qubit rounds (QWC style)
    if strategy == "QWC":
        classes = qwc_classes
    else:
        fixed: list = []
        for v in views:
            v.pairs, v.types, v.zmodes = _decompose(v.factors, fixed)
            fixed.extend(v.pairs)
        conflict = _nc_conflict if strategy == "NC" else _com_conflict
        classes = _color_classes(views, conflict)
        per_qubit = False
        # Compatibility is nested (COM <= NC <= QWC conflicts), so any
        # grouping valid for a finer strategy is valid here too; take the
        # smaller of the two and keep the round structure it came from.
        if strategy == "NC" and len(qwc_classes) < len(classes):
            classes, per_qubit = qwc_classes, True
        if strategy == "COM":
            nc_classes = _color_classes(views, _nc_conflict)
            for alt in (nc_classes, qwc_classes):
                if len(alt) < len(classes):
                    classes = alt

    for cls in classes:
        if strategy == "COM":
            rounds.append(MeasurementRound(
                pairs=(), bases=(), covered=tuple(v.idx for v in cls)))
        elif per_qubit:
            rounds.append(_qwc_round(cls, n_modes))
        else:
            rounds.append(_nc_round(cls, n_modes))

    if deferred:
        for v in deferred:
            _jw_masks(v)
        for cls in _color_classes(deferred, _qwc_conflict):
            rounds.append(_qwc_round(cls, n_modes))
    return rounds


def plan_counts(terms, heuristic: str = "dsatur") -> dict[str, int]:
    return {s: len(plan(terms, s, heuristic)) for s in ("COM", "NC", "QWC")}


def dump_plan(rounds: list[MeasurementRound]) -> str:
    lines = []
    for i, rnd in enumerate(rounds):
        pair_txt = " ".join(
            f"({a},{b}):{basis}" for (a, b), basis in zip(rnd.pairs, rnd.bases)
        ) or "-"
        single_txt = ",".join(map(str, rnd.singles)) or "-"
        cov = ",".join(map(str, rnd.covered)) or "-"
        lines.append(f"ROUND {i} pairs=[{pair_txt}] "
                     f"singlesZ=[{single_txt}] covers=[{cov}]")
    return "\n".join(lines) + "\n"
