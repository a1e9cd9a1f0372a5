"""Simulation and bound checks for the quantum noisy-linear-problem solver
with epsilon-net sample reduction."""

__version__ = "0.1.0"
