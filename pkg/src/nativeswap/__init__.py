"""
Native-gate SWAP lowering and optimization for directed cross-resonance devices.

Contains:
    - circuit: gate/circuit IR, text format, moment scheduling, 1q canonical forms
    - unitary: dense unitaries and global-phase equivalence
    - decomp: CNOT/NOTC/SWAP lowerings and the CR echo expansion
    - passes: verified rewrite passes and the optimization pipeline
    - device: device model, runtime metrics and analytic speedups
    - noise, clifford, rb: density simulation and interleaved RB
    - bench, report: application benchmarks, the improvement model, report files
"""

__version__ = "0.1.0"
