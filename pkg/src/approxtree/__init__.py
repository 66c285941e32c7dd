"""Evolutionary design-space exploration for approximate decision-tree circuits.

Trains a CART classifier, quantizes its comparators at per-node precision
with small integer threshold offsets, scores candidates on (error, circuit
area) with NSGA-II, and emits synthesizable Verilog for chosen trade-offs.
"""

__version__ = "0.1.0"
