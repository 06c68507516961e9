"""Discrete curvature integration and the Chern-Weil Maslov index.

Edge transports are midpoint-rule path-ordered exponentials of a connection
form; each quad face contributes the principal argument of the determinant
of its plaquette holonomy.  Summing face angles over the mesh in fixed
row-major order and dividing by pi gives the raw index, which is rounded to
a caller-declared quantum.  Only the abelianized (trace) part of the
curvature enters, so per-edge determinant phases are accumulated exactly
from the generators and faces only wrap them once through the principal
branch, guarded at pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .connections import ConnectionSpec
from .errors import NonUnitaryConnection, Undersampled, Unrefined
from .loops import BundlePairSpec, FrameLoop, winding
from .mesh import Mesh2D
from .tolerances import TOL, Tolerances


@dataclass(eq=False)
class DiscreteConnection:
    """Parallel transports of a connection along every directed mesh edge.

    Transports are stored for the canonical edge direction (outward radial,
    increasing angle); the reverse transport is the conjugate transpose.
    ``edge_logdet`` carries log det of each transport accumulated from the
    generators, so the per-edge determinant phase is unwrapped exactly.
    """

    mesh: Mesh2D
    spec: ConnectionSpec
    substeps: int
    transports: np.ndarray      # (E, n, n)
    edge_logdet: np.ndarray     # (E,) complex
    unitary: bool
    max_unitary_defect: float

    @property
    def n(self) -> int:
        return self.spec.n

    def transport(self, edge_id: int, sign: int = +1) -> np.ndarray:
        T = self.transports[edge_id]
        return T if sign > 0 else T.conj().T

    def conjugated(self) -> "DiscreteConnection":
        return replace(
            self,
            transports=self.transports.conj(),
            edge_logdet=self.edge_logdet.conj(),
        )

    def on_reversed_mesh(self) -> "DiscreteConnection":
        return replace(self, mesh=self.mesh.reversed())


def edge_transports(
    spec: ConnectionSpec,
    mesh: Mesh2D,
    substeps: int = 1,
    allow_non_unitary: bool = False,
    tol: Tolerances = TOL,
) -> DiscreteConnection:
    """Integrate the connection along every edge by the midpoint rule.

    Each substep contributes exp(-A(midpoint)(step)); products are
    re-unitarized.  Unitary specs are checked for skew-Hermitian values at
    every sampled point; a non-unitary spec is rejected unless explicitly
    allowed (the norm-drift demonstration does that, rank 1 only).
    """
    r_mid, t_mid, dr, dt = mesh.edge_quadrature(substeps)
    E, s = r_mid.shape
    n = spec.n
    Ar, At = spec.coeffs(r_mid.ravel(), t_mid.ravel())
    Ar = np.asarray(Ar, dtype=complex).reshape(E, s, n, n)
    At = np.asarray(At, dtype=complex).reshape(E, s, n, n)

    if spec.unitary:
        skew = max(
            float(np.max(np.abs(Ar + Ar.conj().transpose(0, 1, 3, 2)))) if Ar.size else 0.0,
            float(np.max(np.abs(At + At.conj().transpose(0, 1, 3, 2)))) if At.size else 0.0,
        )
        if skew > tol.skew:
            raise NonUnitaryConnection(
                f"connection values have skew-Hermitian defect {skew:.3g}"
            )
    elif not allow_non_unitary:
        raise NonUnitaryConnection(
            f"spec {spec.tag!r} is tagged non-unitary; only the norm-drift "
            "pipeline accepts it"
        )

    G = -(Ar * dr[:, :, None, None] + At * dt[:, :, None, None])
    edge_logdet = np.trace(G.sum(axis=1), axis1=-2, axis2=-1)

    if spec.unitary:
        T = _kernels.transport_chain(G)
        eye = np.eye(n)
        defect = float(
            np.max(np.linalg.norm(np.swapaxes(T, -1, -2).conj() @ T - eye, axis=(-2, -1)))
        )
    else:
        if n != 1:
            raise NonUnitaryConnection("non-unitary transports implemented for rank 1 only")
        T = np.exp(G.sum(axis=1))
        defect = float("nan")
    return DiscreteConnection(
        mesh=mesh,
        spec=spec,
        substeps=substeps,
        transports=T,
        edge_logdet=edge_logdet,
        unitary=spec.unitary,
        max_unitary_defect=defect,
    )


def face_holonomy(D: DiscreteConnection, face_index: int) -> np.ndarray:
    """Ordered product of the four edge transports around one face boundary."""
    ids, signs = D.mesh.face_edges()
    T = np.eye(D.n, dtype=complex)
    for e, sg in zip(ids[face_index], signs[face_index]):
        T = D.transport(int(e), int(sg)) @ T
    return T


def face_angle_array(D: DiscreteConnection) -> np.ndarray:
    """Arg det of every plaquette holonomy, principal branch, face order."""
    ids, signs = D.mesh.face_edges()
    phases = np.imag(D.edge_logdet)
    alpha = (phases[ids] * signs).sum(axis=1)
    return (alpha + np.pi) % (2.0 * np.pi) - np.pi


def complex_face_logsum(D: DiscreteConnection) -> np.ndarray:
    """Per-face log det holonomy with principal imaginary part (any rank-1 spec)."""
    ids, signs = D.mesh.face_edges()
    z = (D.edge_logdet[ids] * signs).sum(axis=1)
    im = (z.imag + np.pi) % (2.0 * np.pi) - np.pi
    return z.real + 1j * im


@dataclass(eq=False)
class CurvatureReport:
    """Outcome of one curvature integration."""

    raw: float
    rounded: Fraction
    residual: float
    quantum: Fraction
    max_face_angle: float
    unitarity_defect: float
    orthogonality_defect: Optional[float]
    mesh_domain: str
    n_r: int
    n_t: int
    face_angles: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "raw": self.raw,
            "rounded": float(self.rounded),
            "rounded_exact": {"num": self.rounded.numerator, "den": self.rounded.denominator},
            "residual": self.residual,
            "quantum": {"num": self.quantum.numerator, "den": self.quantum.denominator},
            "max_face_angle": self.max_face_angle,
            "unitarity_defect": self.unitarity_defect,
            "orthogonality_defect": self.orthogonality_defect,
            "mesh": {"domain": self.mesh_domain, "Nr": self.n_r, "Nt": self.n_t},
        }

    def faces_csv(self, path: str) -> None:
        """Per-face angle sidecar with columns face_i, face_j, alpha_f."""
        n_t = self.n_t
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("face_i,face_j,alpha_f\n")
            for idx, a in enumerate(self.face_angles):
                fh.write(f"{idx // n_t},{idx % n_t},{float(a)!r}\n")


def chern_weil_index(
    D: DiscreteConnection,
    quantum: Fraction = Fraction(1),
    loop: Optional[FrameLoop] = None,
    tol: Tolerances = TOL,
) -> CurvatureReport:
    """Curvature integral (i/pi) integral tr F as a rounded index.

    raw = (1/pi) sum of face angles (fixed row-major order, exact
    accumulation); rounded to the nearest multiple of ``quantum``.  Raises
    Unrefined when any face angle reaches the pi/2 branch guard.
    """
    if not D.unitary:
        raise NonUnitaryConnection("chern_weil_index requires a unitary connection")
    quantum = Fraction(quantum)
    alpha = face_angle_array(D)
    max_face = float(np.max(np.abs(alpha))) if alpha.size else 0.0
    if max_face >= tol.face_angle_guard:
        raise Unrefined(
            f"face angle {max_face:.3f} rad >= guard {tol.face_angle_guard:.3f}; "
            "refine the mesh"
        )
    raw = math.fsum(alpha.tolist()) / math.pi
    rounded = Fraction(round(raw / quantum)) * quantum
    residual = abs(raw - float(rounded))
    defect = None
    probe = loop if loop is not None else D.spec.boundary_loop
    if probe is not None and D.mesh.wrap:
        defect = orthogonality_defect(D, probe)
    return CurvatureReport(
        raw=raw,
        rounded=rounded,
        residual=residual,
        quantum=quantum,
        max_face_angle=max_face,
        unitarity_defect=D.max_unitary_defect,
        orthogonality_defect=defect,
        mesh_domain=D.mesh.domain,
        n_r=D.mesh.n_r,
        n_t=D.mesh.n_t,
        face_angles=alpha,
    )


def orthogonality_defect(D: DiscreteConnection, loop: FrameLoop) -> float:
    """How far boundary transport strays from preserving the Lagrangian frames.

    Transports the frame at the base boundary vertex around the outer rim and
    measures, at every vertex, the distance of (transported)^* (loop frame)
    from the real orthogonal group.  Requires the loop samples to align with
    the rim vertices (sample count divisible by the angular resolution).
    """
    mesh = D.mesh
    if not mesh.wrap:
        raise Undersampled("boundary transport defect needs a closed rim")
    N = len(loop)
    if N % mesh.n_t:
        raise Undersampled(
            f"loop samples ({N}) must be divisible by the angular resolution ({mesh.n_t})"
        )
    stride = N // mesh.n_t
    rim = mesh.boundary_angular_ids()
    n = loop.n
    P = np.eye(n, dtype=complex)
    start = loop.samples[0]
    worst = 0.0
    for j, e in enumerate(rim):
        P = D.transports[e] @ P
        M = (P @ start).conj().T @ loop.samples[((j + 1) * stride) % N]
        sv = np.linalg.svd(np.real(M), compute_uv=False)
        d2 = float(np.linalg.norm(M) ** 2 + n - 2.0 * sv.sum())
        worst = max(worst, math.sqrt(max(d2, 0.0)))
    return worst


def double_degree(pair: BundlePairSpec, tol: Tolerances = TOL) -> int:
    """Degree of the doubled bundle from overlap-map windings.

    Per boundary component the doubling overlap map is B(t) = u(t) u(t)^T;
    the degree is the sum of the windings of det B, computed directly from
    the assembled symmetric matrices.
    """
    total = 0
    for L in pair.loops:
        B = L.samples @ L.samples.transpose(0, 2, 1)
        total += winding(np.linalg.det(B), tol)
    return total


def complex_curvature_value(D: DiscreteConnection) -> complex:
    """(i/pi) integral tr F without assuming unitarity (rank 1).

    The real part carries the angle content of the plaquette holonomies; a
    nonzero imaginary part means |det| of the transports drifts from 1, i.e.
    the connection fails the metric condition.
    """
    z = complex_face_logsum(D)
    re = math.fsum(z.imag.tolist()) / math.pi
    im = -math.fsum(z.real.tolist()) / math.pi
    return complex(re, im)


def norm_drift_demo(resolution: int = 128, substeps: int = 1):
    """Run the real-valued connection d + r d(theta) through the complex pipeline.

    Returns (real part, imaginary part) of (i/pi) integral tr F.  The whole
    integral lands on the imaginary axis (near 2i): transports here rescale
    sections instead of rotating them, so no index can be read off.  This is
    why the index pipeline insists on unitarity.
    """
    from .connections import builtin_connection

    spec = builtin_connection("example_4_3_nonunitary")
    mesh = Mesh2D("disc", resolution, resolution)
    D = edge_transports(spec, mesh, substeps, allow_non_unitary=True)
    val = complex_curvature_value(D)
    return val.real, val.imag
