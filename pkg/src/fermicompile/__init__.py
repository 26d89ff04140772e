"""Fermionic-to-qubit circuit compiler for periodic materials Hamiltonians."""

__all__ = [
    "pauli_core",
    "oracle",
    "encoding",
    "hamiltonian",
    "swapnet",
    "costing",
    "passes",
    "measurement",
    "cli",
]

__version__ = "1.0.0"
