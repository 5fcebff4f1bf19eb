"""Spatial field samplers on R^3 assembled from radial profiles or synthesis.

A sampler is a pure evaluation map x -> (Higgs value, gauge-invariant
densities); samplers are immutable after construction and safe to evaluate
concurrently.  The energy density convention throughout is

    e = |F_A|^2 + |d_A Phi|^2
      = (a^2-1)^2/(4r^4) + a'^2/(2r^2) + phi'^2 + 2 a^2 phi^2 / r^2

for spherically symmetric data.  The geometer's Laplacian (nonnegative
spectrum, Delta = d*d) is used everywhere, so "subharmonic" means
Delta f <= 0.
"""

from __future__ import annotations

import numpy as np

from .bps import RadialProfile
from .errors import ConfigurationError, PunctureError, UnsupportedDensityError

_PUNCTURE_EPS = 1e-12


def as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError("expected a finite 3-vector")
    return v


def radial_energy_density(profile: RadialProfile, r):
    """Generic radial energy density assembled from a profile.

    Uses the cancellation-free a - 1 accessor when the profile provides one,
    so the curvature term (a^2-1)^2/(4r^4) stays accurate near the regular
    origin.
    """
    r = np.asarray(r, dtype=float)
    a = profile.a(r)
    if profile.a_minus_one is not None:
        a_sq_m1 = profile.a_minus_one(r) * (a + 1.0)
    else:
        a_sq_m1 = a * a - 1.0
    ad = profile.a_dot(r)
    phi = profile.phi(r)
    phid = profile.phi_dot(r)
    e = (a_sq_m1 ** 2 / (4.0 * r ** 4)
         + ad * ad / (2.0 * r * r)
         + phid * phid
         + 2.0 * (a * phi / r) ** 2)
    return e if np.ndim(e) else float(e)


def radial_covariant_sq(profile: RadialProfile, r):
    """|d_A Phi|^2 = phi'^2 + 2 a^2 phi^2 / r^2 on a radial profile."""
    r = np.asarray(r, dtype=float)
    phid = profile.phi_dot(r)
    a = profile.a(r)
    phi = profile.phi(r)
    out = phid * phid + 2.0 * (a * phi / r) ** 2
    return out if np.ndim(out) else float(out)


class FieldSampler:
    """Base sampler: Higgs map plus optional gauge-invariant densities.

    Subclasses fill in ``mass``, ``charge`` and ``kind`` and override the
    evaluation methods.  ``kind`` is one of ``closed-form``,
    ``grid-interpolated`` or ``synthetic-higgs-only``; the latter rejects
    density queries.
    """

    mass: float = 0.0
    charge: int = 0
    kind: str = "synthetic-higgs-only"

    #: Center of radial symmetry, or None for non-radial samplers.
    radial_center: np.ndarray | None = None

    def higgs(self, x) -> np.ndarray:
        raise NotImplementedError

    def higgs_norm(self, x) -> float:
        return float(np.linalg.norm(self.higgs(x)))

    def energy_density(self, x) -> float:
        raise UnsupportedDensityError(
            f"{self.kind} sampler does not carry an energy density")

    def covariant_sq(self, x) -> float:
        """|d_A Phi|^2 at x."""
        raise UnsupportedDensityError(
            f"{self.kind} sampler does not carry derivative densities")

    @property
    def supports_density(self) -> bool:
        return self.kind != "synthetic-higgs-only"

    # Radial fast paths (valid when radial_center is not None).
    def radial_energy(self, r):
        raise UnsupportedDensityError("sampler is not radial")

    def radial_covariant(self, r):
        raise UnsupportedDensityError("sampler is not radial")

    def radial_higgs_norm(self, r):
        raise UnsupportedDensityError("sampler is not radial")


class HedgehogSampler(FieldSampler):
    """Spherically symmetric configuration Phi = phi(r) * (radial direction).

    The Higgs field points along the radial su(2) direction with magnitude
    |phi(|x - center|)|; densities come from the generic radial assembly of
    the profile.  Non-regular profiles carry a puncture at the center.
    """

    def __init__(self, profile: RadialProfile, center=(0.0, 0.0, 0.0)):
        self.profile = profile
        self.center = as_vec3(center)
        self.radial_center = self.center
        self.mass = profile.mass
        self.charge = 1 if profile.representation != "closed-form-flat" else 0
        self.kind = ("grid-interpolated" if profile.representation == "grid"
                     else "closed-form")

    def _radius(self, x) -> float:
        r = float(np.linalg.norm(as_vec3(x) - self.center))
        if r <= _PUNCTURE_EPS and not self.profile.regular:
            raise PunctureError("query at the puncture of a singular profile")
        return r

    def higgs(self, x) -> np.ndarray:
        d = as_vec3(x) - self.center
        r = float(np.linalg.norm(d))
        if r <= _PUNCTURE_EPS:
            if not self.profile.regular:
                raise PunctureError(
                    "query at the puncture of a singular profile")
            return np.zeros(3)
        return float(self.profile.phi(r)) * (d / r)

    def higgs_norm(self, x) -> float:
        r = self._radius(x)
        if r <= _PUNCTURE_EPS:
            return 0.0
        return abs(float(self.profile.phi(r)))

    def energy_density(self, x) -> float:
        return float(self.radial_energy(self._radius(x)))

    def covariant_sq(self, x) -> float:
        return float(self.radial_covariant(self._radius(x)))

    # the density extends continuously over a regular origin; evaluate just
    # off it to dodge the 0/0 in the assembled formula
    def _floor(self, r):
        floor = 1e-9 / (1.0 + abs(self.mass))
        return np.maximum(np.asarray(r, dtype=float), floor)

    def radial_energy(self, r):
        return radial_energy_density(self.profile, self._floor(r))

    def radial_covariant(self, r):
        return radial_covariant_sq(self.profile, self._floor(r))

    def radial_higgs_norm(self, r):
        return np.abs(self.profile.phi(self._floor(r)))


def hedgehog_field(profile: RadialProfile, center=(0.0, 0.0, 0.0)) -> HedgehogSampler:
    """Assemble the spherically symmetric sampler of a radial profile."""
    return HedgehogSampler(profile, center)


# ---------------------------------------------------------------------------
# Synthetic multi-center Higgs fields
# ---------------------------------------------------------------------------

_AXIS_CANDIDATES = (
    np.array([0.28108465, 0.53925968, 0.79379879]),
    np.array([0.80308828, 0.16903085, 0.57133936]),
    np.array([0.10690450, 0.88401254, 0.45501857]),
    np.array([0.57735027, 0.57735027, 0.57735027]),
)


def _choose_frame(centers: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal frame whose axis avoids every inter-center direction."""
    for axis in _AXIS_CANDIDATES:
        ok = True
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                d = centers[j] - centers[i]
                d = d / np.linalg.norm(d)
                if abs(float(np.dot(axis, d))) > 1.0 - 1e-8:
                    ok = False
        if ok:
            n = axis / np.linalg.norm(axis)
            helper = np.array([1.0, 0.0, 0.0])
            if abs(np.dot(helper, n)) > 0.9:
                helper = np.array([0.0, 1.0, 0.0])
            e1 = np.cross(helper, n)
            e1 /= np.linalg.norm(e1)
            e2 = np.cross(n, e1)
            return e1, e2, n
    raise ConfigurationError("could not find a generic chart axis")  # pragma: no cover


def _ramp(s):
    """C^2 magnitude ramp: 0 -> 1 on [0, 1], slope 1 at 0, flat at 1."""
    s = np.clip(s, 0.0, 1.0)
    return s * (1.0 + s * (3.0 + s * (-5.0 + 2.0 * s)))


class MultiCenterSampler(FieldSampler):
    """Synthetic Higgs-only field with prescribed zeros of local degree one.

    The direction field is the inverse stereographic image of the product of
    the per-center hedgehog charts, so the local degree at each center is 1
    and the degree over a sphere enclosing p centers is p (winding
    additivity).  The norm equals ``mass`` outside every ball
    B_scale(center) and vanishes linearly exactly at the centers.  No
    energy density is defined.
    """

    def __init__(self, centers, scale: float, mass: float):
        centers = np.asarray(centers, dtype=float).reshape(-1, 3)
        if mass <= 0.0:
            raise ConfigurationError("mass must be positive")
        if scale <= 0.0:
            raise ConfigurationError("scale must be positive")
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                dist = float(np.linalg.norm(centers[i] - centers[j]))
                if dist == 0.0:
                    raise ConfigurationError("centers must be pairwise distinct")
                if scale >= 0.5 * dist:
                    raise ConfigurationError(
                        "balls of radius scale around the centers overlap")
        self.centers = centers
        self.scale = float(scale)
        self.mass = float(mass)
        self.charge = len(centers)
        self.kind = "synthetic-higgs-only"
        if len(centers):
            self._e1, self._e2, self._axis = _choose_frame(centers)
        else:
            self._e1, self._e2, self._axis = np.eye(3)

    def _direction(self, x: np.ndarray) -> np.ndarray:
        # product of stereographic charts, kept projective as (A, B) in C^2
        A, B = 1.0 + 0.0j, 1.0 + 0.0j
        for c in self.centers:
            d = x - c
            r = np.linalg.norm(d)
            u = d / r
            ux = float(np.dot(u, self._e1))
            uy = float(np.dot(u, self._e2))
            uz = float(np.dot(u, self._axis))
            if uz <= 0.0:
                fa, fb = complex(ux, uy), complex(1.0 - uz, 0.0)
            else:
                fa, fb = complex(1.0 + uz, 0.0), complex(ux, -uy)
            A, B = A * fa, B * fb
            scale = max(abs(A), abs(B))
            if scale > 1e100 or (0.0 < scale < 1e-100):
                A, B = A / scale, B / scale
        n = abs(A) ** 2 + abs(B) ** 2
        w = 2.0 * A * B.conjugate() / n
        uz = (abs(A) ** 2 - abs(B) ** 2) / n
        return w.real * self._e1 + w.imag * self._e2 + uz * self._axis

    def higgs(self, x) -> np.ndarray:
        x = as_vec3(x)
        mag = self.mass
        for c in self.centers:
            d = float(np.linalg.norm(x - c))
            if d == 0.0:
                return np.zeros(3)
            mag *= float(_ramp(d / self.scale))
        return mag * self._direction(x)

    def higgs_norm(self, x) -> float:
        x = as_vec3(x)
        mag = self.mass
        for c in self.centers:
            mag *= float(_ramp(float(np.linalg.norm(x - c)) / self.scale))
        return mag


def multi_center_higgs(centers, scale: float, mass: float) -> MultiCenterSampler:
    """Synthetic Higgs-only sampler whose zero set is exactly ``centers``."""
    return MultiCenterSampler(centers, scale, mass)


# ---------------------------------------------------------------------------
# Finite-difference Laplacian
# ---------------------------------------------------------------------------

_SCALAR_CHOICES = {
    "higgs_norm_sq_half": lambda s, y: 0.5 * s.higgs_norm(y) ** 2,
    "higgs_norm": lambda s, y: s.higgs_norm(y),
    "energy_density": lambda s, y: s.energy_density(y),
    "covariant_sq": lambda s, y: s.covariant_sq(y),
}


def finite_diff_laplacian(sampler: FieldSampler, f, x, h: float) -> float:
    """Geometer's Laplacian (Delta = d*d) of a scalar field by a 7-point stencil.

    ``f`` is a key of the built-in scalar choices (e.g.
    ``"higgs_norm_sq_half"``) or a callable y -> float.  O(h^2) accurate;
    stencils touching the puncture of a singular sampler raise.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    x = as_vec3(x)
    if callable(f):
        def val(y):
            return float(f(y))
    else:
        try:
            choice = _SCALAR_CHOICES[f]
        except KeyError:
            raise ValueError(f"unknown scalar field choice {f!r}") from None

        def val(y):
            return float(choice(sampler, y))

    center = val(x)
    acc = 0.0
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = h
        acc += val(x + step) - 2.0 * center + val(x - step)
    return -acc / (h * h)
