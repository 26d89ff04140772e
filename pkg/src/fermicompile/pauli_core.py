"""Phase-exact sparse Pauli-string algebra and Majorana monomials.

Pauli strings are stored sparsely (qubit index -> letter) with the global
phase tracked as an integer exponent of i modulo 4, so that all operator
products are exact.  Majorana monomials store ordered lists of Majorana
indices: mode ``j`` owns index ``2j`` for the first Majorana (gamma) and
``2j + 1`` for the second (gamma-bar).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

_PHASES = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}
_PHASE_TOKEN = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TOKEN_PHASE = {v: k for k, v in _PHASE_TOKEN.items()}

# Single-qubit products: (a, b) -> (i-exponent, letter).
_PRODUCT = {
    ("X", "X"): (0, "I"),
    ("Y", "Y"): (0, "I"),
    ("Z", "Z"): (0, "I"),
    ("X", "Y"): (1, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"),
    ("Z", "Y"): (3, "X"),
    ("X", "Z"): (3, "Y"),
}


@dataclass(frozen=True)
class PauliString:
    """A sparse Pauli operator with an exact global phase.

    ``ops`` maps qubit index to a letter in {X, Y, Z}; ``phase_exp`` is the
    exponent of i (mod 4) multiplying the bare tensor product.
    """

    ops: tuple[tuple[int, str], ...] = ()
    phase_exp: int = 0

    @staticmethod
    def from_ops(ops: Mapping[int, str] | Iterable[tuple[int, str]],
                 phase_exp: int = 0) -> "PauliString":
        items = dict(ops).items() if isinstance(ops, Mapping) else dict(ops).items()
        cleaned = []
        for q, letter in sorted(items):
            if letter == "I":
                continue
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"bad Pauli letter {letter!r}")
            cleaned.append((q, letter))
        return PauliString(tuple(cleaned), phase_exp % 4)

    @staticmethod
    def identity() -> "PauliString":
        return PauliString((), 0)

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp % 4]

    @property
    def weight(self) -> int:
        return len(self.ops)

    def letter(self, qubit: int) -> str:
        for q, letter in self.ops:
            if q == qubit:
                return letter
        return "I"

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q for q, _ in self.ops)

    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def with_phase(self, phase_exp: int) -> "PauliString":
        return PauliString(self.ops, phase_exp % 4)

    def bare(self) -> "PauliString":
        """The same letters with phase +1."""
        return PauliString(self.ops, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"PauliString({render(self)!r})"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product a*b, including phase."""
    ops_a = dict(a.ops)
    phase = a.phase_exp + b.phase_exp
    for q, letter_b in b.ops:
        letter_a = ops_a.pop(q, "I")
        if letter_a == "I":
            ops_a[q] = letter_b
            continue
        extra, letter = _PRODUCT[(letter_a, letter_b)]
        phase += extra
        if letter != "I":
            ops_a[q] = letter
    return PauliString(tuple(sorted(ops_a.items())), phase % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the number of shared qubits with different letters is even."""
    ops_b = dict(b.ops)
    clashes = 0
    for q, letter in a.ops:
        other = ops_b.get(q, "I")
        if other != "I" and other != letter:
            clashes += 1
    return clashes % 2 == 0


def qubitwise_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff on every shared qubit the letters are equal."""
    ops_b = dict(b.ops)
    for q, letter in a.ops:
        other = ops_b.get(q, "I")
        if other != "I" and other != letter:
            return False
    return True


def render(p: PauliString) -> str:
    """Textual rendering, e.g. '+ X0 Z3 Y7', '-i Y1', '+ I'."""
    token = _PHASE_TOKEN[p.phase_exp % 4]
    if not p.ops:
        return f"{token} I"
    body = " ".join(f"{letter}{q}" for q, letter in p.ops)
    return f"{token} {body}"


def parse(text: str) -> PauliString:
    """Inverse of :func:`render`."""
    parts = text.split()
    if not parts:
        raise ValueError("empty Pauli string")
    if parts[0] in _TOKEN_PHASE:
        phase = _TOKEN_PHASE[parts[0]]
        parts = parts[1:]
    else:
        phase = 0
    ops: dict[int, str] = {}
    for tok in parts:
        if tok == "I":
            continue
        letter, idx = tok[0], int(tok[1:])
        ops[idx] = letter
    return PauliString.from_ops(ops, phase)


def product(strings: Iterable[PauliString]) -> PauliString:
    return reduce(multiply, strings, PauliString.identity())


# ---------------------------------------------------------------------------
# Majorana monomials
# ---------------------------------------------------------------------------

def gamma_index(mode: int) -> int:
    """Majorana index of gamma_mode."""
    return 2 * mode


def gamma_bar_index(mode: int) -> int:
    """Majorana index of gamma-bar_mode."""
    return 2 * mode + 1


@dataclass(frozen=True)
class MajoranaMonomial:
    """coeff times an ordered product of Majorana factors.

    ``factors`` are Majorana indices in the order the product is written;
    a normalized monomial has strictly ascending factors.
    """

    factors: tuple[int, ...]
    coeff: complex = 1.0

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(sorted({f // 2 for f in self.factors}))

    def is_sorted(self) -> bool:
        return all(a < b for a, b in zip(self.factors, self.factors[1:]))

    def hermitian_coeff(self) -> complex:
        """Coefficient relative to the hermitian form of the sorted product.

        The hermitian normalization of an ascending product of k Majoranas is
        i^(k(k-1)/2) times the bare product; for a hermitian term this value
        is real.
        """
        if not self.is_sorted():
            raise ValueError("hermitian_coeff requires a sorted monomial")
        k = len(self.factors)
        return self.coeff / _PHASES[(k * (k - 1) // 2) % 4]


def monomial_sort(m: MajoranaMonomial) -> MajoranaMonomial:
    """Normal-order the factors, flipping sign once per transposition."""
    factors = list(m.factors)
    if len(set(factors)) != len(factors):
        raise ValueError("repeated Majorana factor; contract before sorting")
    sign = 1
    # Insertion sort, counting inversions exactly.
    for i in range(1, len(factors)):
        j = i
        while j > 0 and factors[j - 1] > factors[j]:
            factors[j - 1], factors[j] = factors[j], factors[j - 1]
            sign = -sign
            j -= 1
    return MajoranaMonomial(tuple(factors), m.coeff * sign)


def monomial_multiply(a: MajoranaMonomial, b: MajoranaMonomial) -> MajoranaMonomial:
    """Product of two monomials, contracting repeated factors (gamma^2 = 1)."""
    factors = list(a.factors) + list(b.factors)
    coeff = a.coeff * b.coeff
    # Bubble to ascending order counting transpositions of *distinct* factors,
    # contracting equal neighbours.
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(factors):
            if factors[i] == factors[i + 1]:
                del factors[i:i + 2]
                changed = True
            elif factors[i] > factors[i + 1]:
                factors[i], factors[i + 1] = factors[i + 1], factors[i]
                coeff = -coeff
                changed = True
                i += 1
            else:
                i += 1
    return MajoranaMonomial(tuple(factors), coeff)
