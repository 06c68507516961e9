"""Unitary connection 1-forms on meshed domains.

A ConnectionSpec evaluates the polar coefficients (A_r, A_theta) of a
skew-Hermitian-valued 1-form at batches of points.  Collar connections
extend a boundary frame loop inward through a radial cutoff so that parallel
transport along the boundary preserves the Lagrangian frames; the analytic
built-ins cover the standard disc example, the flat connection, and the
non-unitary counterexample used by the norm-drift demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnknownName
from .loops import FrameLoop, aligned_frames
from .tolerances import TOL, Tolerances

# Cutoff profiles rise 0 -> 1 on [0, sat] and plateau at 1 afterwards, so the
# form has an exact product structure near the boundary.  Both have zero
# slope at the ends of the ramp.
_SATURATION = 0.9


def _ramp_cubic(x: np.ndarray) -> np.ndarray:
    return x * x * (3.0 - 2.0 * x)


def _ramp_quintic(x: np.ndarray) -> np.ndarray:
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x * x)


_CUTOFFS = {"cubic": _ramp_cubic, "quintic": _ramp_quintic}


def cutoff_profile(x: np.ndarray, kind: str = "cubic", saturation: float = _SATURATION):
    if kind not in _CUTOFFS:
        raise UnknownName(f"unknown cutoff {kind!r}; choose from {sorted(_CUTOFFS)}")
    x = np.clip(np.asarray(x, dtype=float) / saturation, 0.0, 1.0)
    return _CUTOFFS[kind](x)


@dataclass(eq=False)
class ConnectionSpec:
    """Evaluator of a connection 1-form in polar coefficients.

    ``coeffs(r, t)`` takes flat arrays and returns (A_r, A_theta), each of
    shape r.shape + (n, n).  ``unitary`` tags whether the values are
    skew-Hermitian; non-unitary specs are only accepted by the norm-drift
    pipeline.
    """

    n: int
    coeffs: Callable[[np.ndarray, np.ndarray], tuple]
    tag: str
    unitary: bool = True
    boundary_loop: Optional[FrameLoop] = None


def builtin_connection(name: str, n: int = 1) -> ConnectionSpec:
    """Named analytic connections on the unit disc.

    ``example_2_7``: d - i r d(theta) on the trivial line bundle, the
    orthogonal connection for the circle-tangent boundary loop.
    ``example_4_3_nonunitary``: d + r d(theta), real-valued, preserves the
    Lagrangian data but not the metric.  ``flat``: d.
    """
    if name == "example_2_7":

        def coeffs(r, t):
            z = np.zeros(r.shape + (1, 1), dtype=complex)
            at = (-1j * r)[..., None, None].astype(complex)
            return z, at

        return ConnectionSpec(1, coeffs, tag=name)
    if name == "example_4_3_nonunitary":

        def coeffs(r, t):
            z = np.zeros(r.shape + (1, 1), dtype=complex)
            at = r[..., None, None].astype(complex)
            return z, at

        return ConnectionSpec(1, coeffs, tag=name, unitary=False)
    if name == "flat":

        def coeffs(r, t):
            z = np.zeros(r.shape + (n, n), dtype=complex)
            return z, z.copy()

        return ConnectionSpec(n, coeffs, tag=name)
    raise UnknownName(f"unknown builtin connection {name!r}")


# ---------------------------------------------------------------------------
# boundary 1-form of a frame loop and interpolation helpers
# ---------------------------------------------------------------------------

def loop_boundary_form(loop: FrameLoop, tol: Tolerances = TOL):
    """Per-sample values of A(t) = w dw*/dt in the aligned frame gauge.

    Fourth-order centered differences on the aligned frames; the wrap
    monodromy extends the stencil across the seam.  Values are projected to
    exact skew-Hermitian.  Returns (A values (N, n, n), aligned frames).
    """
    w, o_wrap = aligned_frames(loop.samples, tol)
    N = len(loop)
    ext = np.concatenate([w[-2:] @ o_wrap.T, w, w[:2] @ o_wrap], axis=0)
    ws = ext.conj().transpose(0, 2, 1)
    d = (ws[0:N] - 8.0 * ws[1 : N + 1] + 8.0 * ws[3 : N + 3] - ws[4 : N + 4]) * (N / 12.0)
    A = w @ d
    A = 0.5 * (A - A.conj().transpose(0, 2, 1))
    return A, w


def open_path_form(samples: np.ndarray):
    """Same derivative for an open frame path (one-sided stencils at ends)."""
    u = np.asarray(samples, dtype=complex)
    N = u.shape[0]
    h = 1.0 / (N - 1)
    ws = u.conj().transpose(0, 2, 1)
    d = np.empty_like(ws)
    d[2 : N - 2] = (ws[0 : N - 4] - 8 * ws[1 : N - 3] + 8 * ws[3 : N - 1] - ws[4:N]) / (12 * h)
    for k in (0, 1):
        d[k] = (-25 * ws[k] + 48 * ws[k + 1] - 36 * ws[k + 2] + 16 * ws[k + 3] - 3 * ws[k + 4]) / (12 * h)
    for k in (N - 2, N - 1):
        d[k] = (25 * ws[k] - 48 * ws[k - 1] + 36 * ws[k - 2] - 16 * ws[k - 3] + 3 * ws[k - 4]) / (12 * h)
    A = u @ d
    return 0.5 * (A - A.conj().transpose(0, 2, 1))


def _interp_periodic(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linear interpolation of samples A_k at fractional index x (mod N)."""
    N = A.shape[0]
    x = np.mod(x, N)
    i0 = np.floor(x).astype(int) % N
    fr = (x - np.floor(x))[..., None, None]
    return (1.0 - fr) * A[i0] + fr * A[(i0 + 1) % N]


def _interp_open(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    N = A.shape[0]
    x = np.clip(x, 0.0, N - 1.0)
    i0 = np.minimum(np.floor(x).astype(int), N - 2)
    fr = (x - i0)[..., None, None]
    return (1.0 - fr) * A[i0] + fr * A[i0 + 1]


def build_collar_connection(
    loop: FrameLoop,
    width: float = 0.3,
    cutoff: str = "cubic",
    saturation: float = _SATURATION,
    tol: Tolerances = TOL,
) -> ConnectionSpec:
    """Collar extension of a boundary loop over the disc.

    A(r, theta) = rho((r - (1 - w))/w) A_boundary(theta) d(theta), zero for
    r <= 1 - w.  The resulting connection is flat away from the collar and
    its boundary transport preserves the loop's Lagrangian frames.
    """
    if not (0.0 < width < 1.0):
        raise ValueError("collar width must lie in (0, 1)")
    A, _ = loop_boundary_form(loop, tol)
    N = len(loop)
    n = loop.n

    def coeffs(r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        rho = cutoff_profile((r - (1.0 - width)) / width, cutoff, saturation)
        a_theta = _interp_periodic(A, (t / (2.0 * np.pi)) * N)
        at = rho[..., None, None] * a_theta / (2.0 * np.pi)
        return np.zeros(r.shape + (n, n), dtype=complex), at

    return ConnectionSpec(n, coeffs, tag=f"collar(w={width},{cutoff})", boundary_loop=loop)


def build_arc_collar_connection(
    path: np.ndarray,
    t_span: float,
    width: float = 0.3,
    cutoff: str = "cubic",
    saturation: float = _SATURATION,
) -> ConnectionSpec:
    """Collar of an open frame path over an arc of angular span ``t_span``."""
    path = np.asarray(path, dtype=complex)
    A = open_path_form(path)
    N = path.shape[0]
    n = path.shape[1]

    def coeffs(r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        rho = cutoff_profile((r - (1.0 - width)) / width, cutoff, saturation)
        a_theta = _interp_open(A, (t / t_span) * (N - 1))
        at = rho[..., None, None] * a_theta / t_span
        return np.zeros(r.shape + (n, n), dtype=complex), at

    return ConnectionSpec(n, coeffs, tag=f"arc_collar(w={width})")


def build_annulus_collar_connection(
    outer: FrameLoop,
    inner: FrameLoop,
    r_inner: float,
    width: float = 0.2,
    cutoff: str = "cubic",
    saturation: float = _SATURATION,
    tol: Tolerances = TOL,
) -> ConnectionSpec:
    """Collars at both rims of an annulus.

    Both loops are given in the orientation induced by the surface: the outer
    rim runs counterclockwise, the inner rim clockwise (theta = -2 pi t).
    """
    if outer.n != inner.n:
        raise ValueError("rank mismatch between the two rims")
    if not (0 < width <= 0.5 * (1.0 - r_inner)):
        raise ValueError("collar width exceeds half the annulus thickness")
    A_out, _ = loop_boundary_form(outer, tol)
    A_in, _ = loop_boundary_form(inner, tol)
    N_out, N_in, n = len(outer), len(inner), outer.n

    def coeffs(r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        rho_out = cutoff_profile((r - (1.0 - width)) / width, cutoff, saturation)
        rho_in = cutoff_profile(((r_inner + width) - r) / width, cutoff, saturation)
        a_out = _interp_periodic(A_out, (t / (2 * np.pi)) * N_out)
        a_in = _interp_periodic(A_in, (-t / (2 * np.pi)) * N_in)
        at = (
            rho_out[..., None, None] * a_out / (2 * np.pi)
            - rho_in[..., None, None] * a_in / (2 * np.pi)
        )
        return np.zeros(r.shape + (n, n), dtype=complex), at

    return ConnectionSpec(
        n, coeffs, tag=f"annulus_collar(w={width})", boundary_loop=outer
    )


def radial_gauge_transform(
    spec: ConnectionSpec, generator: np.ndarray, amplitude: float = 1.0
) -> ConnectionSpec:
    """Gauge-transform by g(r) = exp(c s(r) S) with s(1) = 0.

    S is a constant skew-Hermitian generator and s(r) = (1 - r^2)^2, so g is
    the identity on the boundary and smooth at the origin.  The transformed
    form is A' = c s'(r) S dr + g^{-1} A g; its trace curvature integral must
    match the original up to quadrature error.
    """
    S = np.asarray(generator, dtype=complex)
    S = 0.5 * (S - S.conj().T)
    lam, V = np.linalg.eigh(-1j * S)
    base = spec.coeffs
    c = float(amplitude)

    def coeffs(r, t):
        r = np.asarray(r, dtype=float)
        s = (1.0 - r**2) ** 2
        s_prime = -4.0 * r * (1.0 - r**2)
        ph = np.exp(1j * np.multiply.outer(c * s, lam))
        g = np.einsum("ij,...j,kj->...ik", V, ph, V.conj())
        g_inv = np.einsum("ij,...j,kj->...ik", V, 1.0 / ph, V.conj())
        Ar, At = base(r, t)
        Ar2 = (c * s_prime)[..., None, None] * S + g_inv @ Ar @ g
        At2 = g_inv @ At @ g
        return Ar2, At2

    return ConnectionSpec(
        spec.n, coeffs, tag=f"gauge({spec.tag})", unitary=spec.unitary,
        boundary_loop=spec.boundary_loop,
    )
