"""Central numerical tolerances.

Every guard and invariant threshold used across the library lives in one
frozen record so property tests can tighten them in a single place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    unitary: float = 1e-10            # ||U*U - I||_F on freshly factored unitaries
    unitary_global: float = 1e-9      # drift bound for transports anywhere downstream
    symmetric: float = 1e-10          # ||M - M^T||_F on symmetric unitaries
    branch_cut: float = 1e-8          # eigenphase distance to +-pi for principal logs
    takagi_recon: float = 1e-9        # ||O e^{2i Theta} O^T - M||_F
    same_lagrangian: float = 1e-8     # ||B(F) - B(G)||_F identifying Lagrangians
    intersection_phase: float = 1e-7  # eigenphase window counting intersection dims
    transverse_angle: float = 1e-7    # positive-path angle distance to 0 mod pi
    winding_guard: float = math.pi / 2   # max per-step principal phase increment
    winding_residual: float = 1e-9    # |raw - rounded| for closed sampled loops
    face_angle_guard: float = math.pi / 2  # per-plaquette branch guard
    frame_step_sv: float = 0.5        # min singular value in frame alignment
    eig_gap: float = 1e-10            # eigenvalue separation in joint diagonalization
    skew: float = 1e-10               # skew-Hermitian defect of connection values

    def tightened(self, **kw) -> "Tolerances":
        return replace(self, **kw)


TOL = Tolerances()
