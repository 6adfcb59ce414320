"""Lattice Green's functions from contour integrals of wave differentials.

Everything is built from the differential

    omega_tilde(z; m, n, mt, nt) = psi(z, m, n) * psi_dual(z, mt, nt) * Omega

integrated over C-contours.  The kernel ``K = contour integral of
omega_tilde`` is annihilated by the five-point operator L in (mu, nu) and
vanishes whenever mu - nu = mt - nt.  From it,

    g0 = sgn((mu - nu) - (mt - nt)) * K / (4 pi)

solves L g0 = delta for any C-contour, and the normalized function

    green(lam) = 1/(4 pi) * integral over C_lam of
                 [sgn(m - mt) + sgn(im_p_m(lam) - im_p_m(z))] * omega_tilde

keeps the delta property while growing no faster than
``exp((mu - mt) im_p_mu(lam) + (nu - nt) im_p_nu(lam))`` with
im_p_mu = im_p_n + im_p_m and im_p_nu = im_p_n - im_p_m (for almost every
lam; levels through the marked points are deformed, see the backend).

The sign convention is sgn(0) = 0 throughout: sign changes happen on a
measure-zero subset of the contour and the weighted integrand is taken
pointwise.  Numerically the contour is split at the sign changes so each
arc carries an analytic integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .contour_quadrature import (
    DEFAULT_NODES,
    QUAD_DTYPE,
    Contour,
    PoleOnContourError,
    _component_rule,
    residue,
    split_at_sign_changes,
)
from .lattice_core import coefficients_from_f, from_sublattice
from .sphere_backend import SPHERE, SphereBackend, SpherePoint

__all__ = [
    "WaveDifferential",
    "GreenTable",
    "kernel_K",
    "g0",
    "green",
    "z_correction",
    "green_table",
    "verify_delta",
    "growth_check",
    "residue_lemma_Q",
    "residue_lemma_P",
]

FOUR_PI = 4.0 * math.pi

Window = Union[int, Tuple[Tuple[int, int], Tuple[int, int]]]


@dataclass(frozen=True)
class WaveDifferential:
    """The differential psi(z, m, n) psi_dual(z, mt, nt) Omega as an evaluator."""

    backend: SphereBackend
    m: int
    n: int
    m_t: int
    n_t: int

    @classmethod
    def from_sublattice(cls, backend, mu: int, nu: int, mu_t: int, nu_t: int):
        m, n = from_sublattice(mu, nu)
        mt, nt = from_sublattice(mu_t, nu_t)
        return cls(backend, m, n, mt, nt)

    def __call__(self, z):
        b = self.backend
        return (
            b.psi(z, self.m, self.n)
            * b.psi_dual(z, self.m_t, self.n_t)
            * b.omega_coeff(z)
        )


def _window_bounds(window: Window, target: Tuple[int, int]) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    if isinstance(window, int):
        if window < 0:
            raise ValueError("window half-size must be nonnegative")
        mu_t, nu_t = target
        return (mu_t - window, mu_t + window), (nu_t - window, nu_t + window)
    (mu_lo, mu_hi), (nu_lo, nu_hi) = window
    if mu_lo > mu_hi or nu_lo > nu_hi:
        raise ValueError("empty window")
    return (int(mu_lo), int(mu_hi)), (int(nu_lo), int(nu_hi))


class _ContourEvaluator:
    """Cached contour samples for one target; values per (mu, nu) on demand.

    The target-dependent factor psi_dual * Omega * velocity * quadrature
    weights is sampled once; each table entry then costs a single psi
    evaluation (O(log |m| + log |n|) array products) and a dot product.
    For the normalized kernel the index-independent part of the sign
    weight is also precomputed.
    """

    def __init__(
        self,
        backend,
        contour: Contour,
        target: Tuple[int, int],
        kind: str,
        lam: Optional[SpherePoint] = None,
        nodes: Optional[int] = None,
    ):
        if kind not in ("green", "g0"):
            raise ValueError(f"unknown kind {kind!r}")
        self.backend = backend
        self.kind = kind
        self.mu_t, self.nu_t = target
        self.m_t, self.n_t = from_sublattice(self.mu_t, self.nu_t)
        n = int(nodes) if nodes is not None else contour.nodes_per_component
        if kind == "green":
            if lam is None:
                raise ValueError("normalized green needs lambda")
            h_lam = backend.im_p_m(lam)
            contour = split_at_sign_changes(
                contour, lambda z: h_lam - backend.im_p_m(z)
            )
        self._z: List[np.ndarray] = []
        self._base: List[np.ndarray] = []
        self._sgn_level: List[np.ndarray] = []
        for comp in contour.components:
            t, w = _component_rule(comp, n)
            z = comp.point(t)
            base = (
                np.asarray(backend.psi_dual(z, self.m_t, self.n_t), dtype=QUAD_DTYPE)
                * backend.omega_coeff(z)
                * comp.velocity(t)
                * w
                * contour.orientation_sign
            )
            if not np.all(np.isfinite(base.astype(complex))):
                raise PoleOnContourError("non-finite integrand sample on the contour")
            self._z.append(z)
            self._base.append(base)
            if kind == "green":
                self._sgn_level.append(np.sign(h_lam - backend.im_p_m(z)))

    def kernel(self, mu: int, nu: int) -> complex:
        """Bare contour integral of the wave differential (kind g0 only)."""
        m, n = from_sublattice(mu, nu)
        total = QUAD_DTYPE(0)
        for i, z in enumerate(self._z):
            total = total + np.sum(self.backend.psi(z, m, n) * self._base[i])
        return complex(total)

    def value(self, mu: int, nu: int) -> complex:
        m, n = from_sublattice(mu, nu)
        dm = np.sign(m - self.m_t)
        if self.kind == "g0":
            return complex(dm * self.kernel(mu, nu) / FOUR_PI)
        total = QUAD_DTYPE(0)
        for i, z in enumerate(self._z):
            weight = dm + self._sgn_level[i]
            total = total + np.sum(weight * self.backend.psi(z, m, n) * self._base[i])
        return complex(total / FOUR_PI)


def kernel_K(
    contour: Contour,
    mu: int,
    nu: int,
    mu_t: int,
    nu_t: int,
    backend: SphereBackend = SPHERE,
    nodes: Optional[int] = None,
) -> complex:
    """Kernel K: the contour integral of the wave differential.

    Vanishes on the diagonal sublattice mu - nu = mu_t - nu_t and is
    annihilated by the five-point operator in (mu, nu).
    """
    ev = _ContourEvaluator(backend, contour, (mu_t, nu_t), "g0", nodes=nodes)
    return ev.kernel(mu, nu)


def g0(
    contour: Contour,
    mu: int,
    nu: int,
    mu_t: int,
    nu_t: int,
    backend: SphereBackend = SPHERE,
    nodes: Optional[int] = None,
) -> complex:
    """Unnormalized Green's function sgn(m - mt) K / (4 pi) on the contour."""
    ev = _ContourEvaluator(backend, contour, (mu_t, nu_t), "g0", nodes=nodes)
    return ev.value(mu, nu)


def green(
    lam: SpherePoint,
    mu: int,
    nu: int,
    mu_t: int,
    nu_t: int,
    nodes: int = DEFAULT_NODES,
    backend: SphereBackend = SPHERE,
) -> complex:
    """Normalized Green's function at lambda by direct weighted quadrature."""
    contour = backend.c_contour(lam, nodes)
    ev = _ContourEvaluator(backend, contour, (mu_t, nu_t), "green", lam=lam, nodes=nodes)
    return ev.value(mu, nu)


def z_correction(
    lam: SpherePoint,
    mu: int,
    nu: int,
    mu_t: int,
    nu_t: int,
    nodes: int = DEFAULT_NODES,
    backend: SphereBackend = SPHERE,
) -> complex:
    """The correction term with weight sgn(im_p_m(lam) - im_p_m(z)) only.

    Its integration path does not depend on the lattice indices, so L
    annihilates it; green = g0 + z_correction on the same contour.
    """
    contour = backend.c_contour(lam, nodes)
    h_lam = backend.im_p_m(lam)
    split = split_at_sign_changes(contour, lambda z: h_lam - backend.im_p_m(z))
    ev = _ContourEvaluator(backend, split, (mu_t, nu_t), "g0", nodes=nodes)
    m, n = from_sublattice(mu, nu)
    total = QUAD_DTYPE(0)
    for i, z in enumerate(ev._z):
        weight = np.sign(h_lam - backend.im_p_m(z))
        total = total + np.sum(weight * backend.psi(z, m, n) * ev._base[i])
    return complex(total / FOUR_PI)


@dataclass
class GreenTable:
    """Computed Green's-function values over a lattice window.

    ``values`` maps (mu, nu) to the complex value for the fixed target
    (mu_t, nu_t); ``metadata`` records lambda, node counts, the contour
    and the node-halving error estimate when requested.
    """

    target: Tuple[int, int]
    mu_range: Tuple[int, int]
    nu_range: Tuple[int, int]
    values: Dict[Tuple[int, int], complex]
    metadata: Dict = field(default_factory=dict)

    def __getitem__(self, key: Tuple[int, int]) -> complex:
        return self.values[key]

    def rows(self) -> List[Tuple[int, int, int, int, float, float]]:
        mu_t, nu_t = self.target
        out = []
        for (mu, nu) in sorted(self.values):
            v = self.values[(mu, nu)]
            out.append((mu, nu, mu_t, nu_t, v.real, v.imag))
        return out

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["mu", "nu", "mu_t", "nu_t", "re", "im"])
            for row in self.rows():
                writer.writerow([row[0], row[1], row[2], row[3], repr(row[4]), repr(row[5])])

    def write_json(self, path) -> None:
        import json

        payload = {
            "metadata": self.metadata,
            "target": list(self.target),
            "mu_range": list(self.mu_range),
            "nu_range": list(self.nu_range),
            "values": [
                {"mu": r[0], "nu": r[1], "mu_t": r[2], "nu_t": r[3], "re": r[4], "im": r[5]}
                for r in self.rows()
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _lambda_meta(lam: Optional[SpherePoint]) -> Dict:
    if lam is None:
        return {"lambda": None}
    try:
        z = complex(lam)
    except TypeError:
        return {"lambda": "inf"}
    return {"lambda_re": z.real, "lambda_im": z.imag}


def green_table(
    window: Window,
    target: Tuple[int, int] = (0, 0),
    lam: Optional[SpherePoint] = None,
    kind: str = "green",
    nodes: int = DEFAULT_NODES,
    backend: SphereBackend = SPHERE,
    contour: Optional[Contour] = None,
    error_estimate: bool = False,
) -> GreenTable:
    """Tabulate g0 or the normalized green over a rectangular window.

    ``window`` is either a half-size (centered at the target) or explicit
    ((mu_lo, mu_hi), (nu_lo, nu_hi)) bounds.  For kind="g0" without an
    explicit contour, C_lambda is used when lam is given and the default
    separating contour otherwise.  ``error_estimate`` recomputes the table
    at half the node count and stores the max difference in the metadata.
    """
    (mu_lo, mu_hi), (nu_lo, nu_hi) = _window_bounds(window, target)
    contour_info: Dict = {}

    def build(n: int) -> Dict[Tuple[int, int], complex]:
        if kind == "green":
            ctr = backend.c_contour(lam, n) if contour is None else contour
            ev = _ContourEvaluator(backend, ctr, target, "green", lam=lam, nodes=n)
        else:
            if contour is not None:
                ctr = contour
            elif lam is not None:
                ctr = backend.c_contour(lam, n)
            else:
                ctr = backend.default_kernel_contour(n)
            ev = _ContourEvaluator(backend, ctr, target, "g0", nodes=n)
        for key in ("chart_radius", "deformed", "critical_level", "default_kernel"):
            if key in ctr.metadata:
                contour_info[key] = ctr.metadata[key]
        vals: Dict[Tuple[int, int], complex] = {}
        for mu in range(mu_lo, mu_hi + 1):
            for nu in range(nu_lo, nu_hi + 1):
                vals[(mu, nu)] = ev.value(mu, nu)
        return vals

    values = build(nodes)
    meta: Dict = {"kind": kind, "nodes": nodes, "contour": contour_info}
    meta.update(_lambda_meta(lam))
    if error_estimate:
        coarse = build(max(16, nodes // 2))
        meta["est_error"] = max(abs(values[k] - coarse[k]) for k in values)
    table = GreenTable(
        target=tuple(target),
        mu_range=(mu_lo, mu_hi),
        nu_range=(nu_lo, nu_hi),
        values=values,
        metadata=meta,
    )
    return table


def _apply_L(table: GreenTable, backend, mu: int, nu: int) -> complex:
    co = coefficients_from_f(backend.f, mu, nu)
    v = table.values
    return (
        co.a_right * v[(mu + 1, nu)]
        + co.a_left * v[(mu - 1, nu)]
        + co.b_up * v[(mu, nu + 1)]
        + co.b_down * v[(mu, nu - 1)]
        - co.c * v[(mu, nu)]
    )


def verify_delta(
    lam: SpherePoint,
    window: Window,
    nodes: int = DEFAULT_NODES,
    kind: str = "green",
    target: Tuple[int, int] = (0, 0),
    backend: SphereBackend = SPHERE,
) -> float:
    """Max over the window of |L G - delta| for G at lambda.

    The table is computed on a window enlarged by one so the stencil stays
    inside; L is applied at every point of the requested window.
    """
    (mu_lo, mu_hi), (nu_lo, nu_hi) = _window_bounds(window, target)
    table = green_table(
        ((mu_lo - 1, mu_hi + 1), (nu_lo - 1, nu_hi + 1)),
        target=target,
        lam=lam,
        kind=kind,
        nodes=nodes,
        backend=backend,
    )
    worst = 0.0
    for mu in range(mu_lo, mu_hi + 1):
        for nu in range(nu_lo, nu_hi + 1):
            lg = _apply_L(table, backend, mu, nu)
            want = 1.0 if (mu, nu) == tuple(target) else 0.0
            worst = max(worst, abs(lg - want))
    return worst


def growth_check(
    lam: SpherePoint,
    window: Window,
    nodes: int = DEFAULT_NODES,
    cap: float = math.inf,
    kind: str = "green",
    target: Tuple[int, int] = (0, 0),
    backend: SphereBackend = SPHERE,
) -> Tuple[float, int]:
    """Fit the growth-bound constant over a window.

    Returns ``(fitted_r1, violations)``: the max over the window of
    |G| / exp((mu - mu_t) rate_mu + (nu - nu_t) rate_nu) with
    rate_mu = im_p_n(lam) + im_p_m(lam) and rate_nu = im_p_n(lam) -
    im_p_m(lam), plus the count of ratios exceeding ``cap``.  For the
    normalized green the fit stabilizes as the window grows; the bare g0
    has no such bound and the fit diverges with the window size.
    """
    (mu_lo, mu_hi), (nu_lo, nu_hi) = _window_bounds(window, target)
    rate_mu = backend.im_p_n(lam) + backend.im_p_m(lam)
    rate_nu = backend.im_p_n(lam) - backend.im_p_m(lam)
    mu_t, nu_t = target
    table = green_table(window, target=target, lam=lam, kind=kind, nodes=nodes, backend=backend)
    fitted = 0.0
    violations = 0
    for (mu, nu), v in table.values.items():
        envelope = math.exp((mu - mu_t) * rate_mu + (nu - nu_t) * rate_nu)
        ratio = abs(v) / envelope
        fitted = max(fitted, ratio)
        if ratio > cap:
            violations += 1
    return fitted, violations


def residue_lemma_Q(
    mu: int,
    nu: int,
    backend: SphereBackend = SPHERE,
    radius: Optional[float] = None,
    nodes: int = 256,
) -> complex:
    """Residue at Q+ of a[mu, nu] * omega_tilde(mu+1, nu; mu, nu); expected i."""
    a = coefficients_from_f(backend.f, mu, nu).a_right
    ev = WaveDifferential.from_sublattice(backend, mu + 1, nu, mu, nu)
    return residue(
        lambda z: a * ev(z),
        backend.Q_plus,
        radius=radius,
        nodes=nodes,
        isolation_points=_finite_points(backend.marked_points()),
    )


def residue_lemma_P(
    mu: int,
    nu: int,
    mu_t: int,
    nu_t: int,
    backend: SphereBackend = SPHERE,
    radius: Optional[float] = None,
    nodes: int = 256,
) -> float:
    """Residual of the P+ cancellation on the diagonal sublattice.

    For mu - nu = mu_t - nu_t the residues at P+ of
    a[mu, nu] omega_tilde(mu+1, nu; mu_t, nu_t) and
    b[mu, nu-1] omega_tilde(mu, nu-1; mu_t, nu_t) cancel; returns the
    modulus of their sum.  Violating the hypothesis is a contract error.
    """
    if mu - nu != mu_t - nu_t:
        raise ValueError(
            f"diagonal hypothesis violated: mu - nu = {mu - nu} but "
            f"mu_t - nu_t = {mu_t - nu_t}"
        )
    co = coefficients_from_f(backend.f, mu, nu)
    ev1 = WaveDifferential.from_sublattice(backend, mu + 1, nu, mu_t, nu_t)
    ev2 = WaveDifferential.from_sublattice(backend, mu, nu - 1, mu_t, nu_t)
    total = residue(
        lambda z: co.a_right * ev1(z) + co.b_down * ev2(z),
        backend.P_plus,
        radius=radius,
        nodes=nodes,
        isolation_points=_finite_points(backend.marked_points()),
    )
    return abs(total)


def _finite_points(points: Iterable) -> List[complex]:
    out = []
    for p in points:
        try:
            out.append(complex(p))
        except TypeError:
            continue
    return out
