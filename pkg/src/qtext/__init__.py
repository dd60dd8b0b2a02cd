"""Quantum-kernel text classification on a classical statevector simulator."""

__version__ = "0.1.0"
