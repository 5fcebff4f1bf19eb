"""Energy quadrature on balls and all of space; normalized measures.

The object of study is the family of Radon measures mu = m^-1 e H^3 with
e the energy density of a sampler and m its mass.  Ball energies on radial
samplers reduce to 1-D quadrature: concentric balls directly, off-center
balls through the exact sphere/ball intersection cap area per shell (no
Monte Carlo anywhere).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DivergenceError, DomainError, UnsupportedDensityError
from .fields import FieldSampler, as_vec3


@dataclass(frozen=True)
class QuadratureSettings:
    """Accuracy knobs for all 1-D quadratures in this module.

    Loosening ``epsrel`` beyond 1e-6 also collapses the subdivision limit,
    so a loosened setting genuinely degrades the integrator instead of
    merely relabelling it.
    """

    epsabs: float = 1e-13
    epsrel: float = 1e-12
    limit: int = 200

    def quad_kwargs(self) -> dict:
        limit = self.limit if self.epsrel <= 1e-6 else 1
        return {"epsabs": self.epsabs, "epsrel": self.epsrel, "limit": limit}


DEFAULT_QUADRATURE = QuadratureSettings()


def _radial_quad(f, lo: float, hi: float, scale: float,
                 settings: QuadratureSettings) -> float:
    if hi <= lo:
        return 0.0
    pts = [p for p in (scale, 3.0 * scale, 10.0 * scale) if lo < p < hi]
    kw = settings.quad_kwargs()
    if kw["limit"] == 1:
        pts = []
    val, _ = quad(f, lo, hi, points=pts or None, **kw)
    return val


def _require_density(sampler: FieldSampler) -> None:
    if not sampler.supports_density:
        raise UnsupportedDensityError(
            "sampler carries a Higgs field only; energy queries unsupported")
    if sampler.radial_center is None:
        raise UnsupportedDensityError(
            "energy quadrature requires a radially symmetric density")


def _inner_radius(sampler: FieldSampler) -> float:
    profile = getattr(sampler, "profile", None)
    return float(getattr(profile, "r_min", 0.0) or 0.0)


def _cap_fraction(s: np.ndarray, d: float, radius: float) -> np.ndarray:
    """Fraction of the sphere of radius s about the sampler center lying in
    the ball B_radius at center distance d."""
    cos_t = (s * s + d * d - radius * radius) / (2.0 * s * d)
    return 0.5 * (1.0 - np.clip(cos_t, -1.0, 1.0))


def ball_energy(sampler: FieldSampler, center, radius: float,
                settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Energy of the sampler in the ball B_radius(center).

    Exact radial quadrature for balls concentric with the sampler,
    cap-area-weighted shell quadrature otherwise.
    """
    if radius <= 0.0:
        raise DomainError("ball radius must be positive")
    _require_density(sampler)
    center = as_vec3(center)
    d = float(np.linalg.norm(center - sampler.radial_center))
    lo = _inner_radius(sampler)
    scale = 1.0 / max(abs(sampler.mass), 1e-6)

    def shell(s):
        return 4.0 * np.pi * s * s * float(sampler.radial_energy(s))

    if d <= 1e-12:
        return _radial_quad(shell, lo, radius, scale, settings)

    total = 0.0
    full_hi = radius - d
    if full_hi > lo:
        total += _radial_quad(shell, lo, full_hi, scale, settings)
    cap_lo = max(lo, abs(radius - d))
    cap_hi = d + radius
    if cap_hi > cap_lo:
        def weighted(s):
            return shell(s) * float(_cap_fraction(np.asarray(s), d, radius))
        total += _radial_quad(weighted, cap_lo, cap_hi, scale, settings)
    return total


def total_energy(sampler: FieldSampler,
                 settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Improper radial energy integral over all of R^3.

    The tail is mapped to [0, 1) by r = A + S tan(pi u / 2) (exponentially
    or polynomially decaying tails are handled by the same rule); a decay
    estimate on r^2 e(r) guards against divergent tails.
    """
    _require_density(sampler)
    lo = _inner_radius(sampler)
    scale = 1.0 / max(abs(sampler.mass), 1e-6)
    A = max(lo * 2.0, scale, 1.0)

    def shell(s):
        return 4.0 * np.pi * s * s * float(sampler.radial_energy(s))

    # decay estimate: r^2 e must decay faster than 1/r for convergence
    r1, r2 = 50.0 * A, 500.0 * A
    v1, v2 = shell(r1), shell(r2)
    if v1 > 0.0 and v2 > 0.0:
        p = np.log(v2 / v1) / np.log(r2 / r1)
        if p > -1.001:
            raise DivergenceError(
                f"tail decay exponent {p:.3f} of r^2 e is not integrable")
    head = _radial_quad(shell, lo, A, scale, settings)

    S = max(1.0, A)
    half_pi = 0.5 * np.pi

    def tail(u):
        tn = np.tan(half_pi * u)
        r = A + S * tn
        return shell(r) * S * half_pi * (1.0 + tn * tn)

    kw = settings.quad_kwargs()
    tail_val, _ = quad(tail, 0.0, 1.0, **kw)
    return head + tail_val


@dataclass(frozen=True)
class EnergyMeasure:
    """The normalized measure mu = m^-1 e H^3 of one configuration."""

    sampler: FieldSampler
    normalization: float
    settings: QuadratureSettings = DEFAULT_QUADRATURE

    @classmethod
    def of(cls, sampler: FieldSampler,
           settings: QuadratureSettings = DEFAULT_QUADRATURE) -> "EnergyMeasure":
        if sampler.mass <= 0.0:
            raise DomainError("normalized measure needs a positive mass")
        return cls(sampler, float(sampler.mass), settings)

    def ball(self, center, radius: float) -> float:
        return ball_energy(self.sampler, center, radius, self.settings) \
            / self.normalization

    def total(self) -> float:
        return total_energy(self.sampler, self.settings) / self.normalization


# ---------------------------------------------------------------------------
# Test functions and weak convergence
# ---------------------------------------------------------------------------

def _smoothstep(v):
    v = np.clip(v, 0.0, 1.0)
    return v * v * v * (10.0 + v * (-15.0 + 6.0 * v))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class RadialBump:
    """Compactly supported C^2 bump: height at its center, 0 outside.

    Radially nonincreasing, so limit-theorem error sequences decrease
    monotonically in the mass.
    """

    center: np.ndarray
    radius: float
    height: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vec3(self.center))
        if self.radius <= 0.0:
            raise DomainError("bump radius must be positive")

    def __call__(self, x) -> float:
        return self.profile(float(np.linalg.norm(as_vec3(x) - self.center)))

    def profile(self, w: float) -> float:
        if w >= self.radius:
            return 0.0
        return self.height * float(1.0 - _smoothstep(w / self.radius))

    @property
    def support_radius(self) -> float:
        return self.radius

    def spherical_mean(self, s: float, d: float) -> float:
        """Mean over the sphere of radius s whose center is at distance d
        from the bump center: (2sd)^-1 int_{|s-d|}^{s+d} w beta(w) dw."""
        if d <= 1e-14:
            return self.profile(s)
        lo, hi = abs(s - d), min(s + d, self.radius)
        if hi <= lo:
            return 0.0
        w = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
        vals = np.array([ww * self.profile(float(ww)) for ww in w])
        integral = 0.5 * (hi - lo) * float(np.dot(_GL_WEIGHTS, vals))
        return integral / (2.0 * s * d)


def integrate_against(measure: EnergyMeasure, test_fn: RadialBump) -> float:
    """int test_fn dmu for a radial sampler and a radial bump."""
    sampler = measure.sampler
    _require_density(sampler)
    d = float(np.linalg.norm(test_fn.center - sampler.radial_center))
    lo = max(_inner_radius(sampler), d - test_fn.support_radius)
    hi = d + test_fn.support_radius
    scale = 1.0 / max(abs(sampler.mass), 1e-6)

    def shell(s):
        return (4.0 * np.pi * s * s * float(sampler.radial_energy(s))
                * test_fn.spherical_mean(float(s), d))

    return _radial_quad(shell, lo, hi, scale, measure.settings) \
        / measure.normalization


@dataclass(frozen=True)
class ConvergenceReport:
    masses: list
    integrals: list
    target: float
    errors: list
    monotone_decreasing: bool
    limit_estimate: float
    limit_error: float
    verdict: str


def weak_convergence_test(sequence: list[EnergyMeasure], test_fn: RadialBump,
                          limit: list[tuple]) -> ConvergenceReport:
    """Compare int test_fn dmu_i against the atomic limit sum w delta_x.

    ``limit`` is a list of (point, weight) pairs.  The per-mass integrals
    converge like O(1/m) (polynomial Higgs tails), so the reported
    ``limit_estimate`` Richardson-extrapolates the last two masses in 1/m.
    """
    if not sequence:
        raise DomainError("empty measure sequence")
    masses = [m.normalization for m in sequence]
    if any(b <= a for a, b in zip(masses, masses[1:])):
        raise DomainError("sequence must be ordered by increasing mass")

    integrals = [integrate_against(m, test_fn) for m in sequence]
    target = float(sum(w * test_fn(p) for p, w in limit))
    errors = [abs(v - target) for v in integrals]
    monotone = all(b <= a + 1e-14 for a, b in zip(errors, errors[1:]))
    if len(sequence) >= 2:
        m1, m2 = masses[-2], masses[-1]
        i1, i2 = integrals[-2], integrals[-1]
        limit_estimate = (m2 * i2 - m1 * i1) / (m2 - m1)
    else:
        limit_estimate = integrals[-1]
    limit_error = abs(limit_estimate - target)
    if errors[-1] <= errors[0] and monotone:
        verdict = "converging"
    elif errors[-1] <= errors[0]:
        verdict = "decreasing-overall"
    else:
        verdict = "not-converging"
    return ConvergenceReport(masses, integrals, target, errors, monotone,
                             float(limit_estimate), float(limit_error), verdict)


# ---------------------------------------------------------------------------
# Density function Theta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityEstimate:
    point: np.ndarray
    theta: float
    radii_used: list
    per_radius: list
    extrapolation_error: float
    k_x: int
    is_multiple_of_4pi_kappa: bool


def tail_indices(n: int) -> list[int]:
    """Indices of the deterministic 'tail third' of a sequence of length n."""
    return list(range(n - max(1, n // 3), n))


def density_theta(sequence: list[EnergyMeasure], point, radii,
                  kappa: float | None = None,
                  multiple_tol: float = 0.05) -> DensityEstimate:
    """Estimate Theta(x) = lim_{r->0} lim_i mu_i(B_r(x)).

    The i -> infinity limit at each radius is the minimum over the tail
    third of the sequence (a liminf estimator); Theta extrapolates the two
    smallest radii linearly in r.  ``is_multiple_of_4pi_kappa`` flags
    whether Theta lands within ``multiple_tol`` (relative) of 4 pi kappa Z.
    """
    point = as_vec3(point)
    radii = [float(r) for r in radii]
    if any(r <= 0.0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly decreasing and positive")
    if len(sequence) < 3:
        raise DomainError("sequence too short for a tail estimate")
    if kappa is None:
        from .calibration import measured_kappa
        kappa = measured_kappa()

    tail = tail_indices(len(sequence))
    per_radius = []
    for r in radii:
        vals = [sequence[i].ball(point, r) for i in tail]
        per_radius.append(min(vals))

    if len(radii) >= 2:
        r1, r2 = radii[-2], radii[-1]
        t1, t2 = per_radius[-2], per_radius[-1]
        theta = t2 - r2 * (t1 - t2) / (r1 - r2)
    else:
        theta = per_radius[-1]
    theta = max(theta, 0.0)
    extrapolation_error = abs(theta - per_radius[-1])

    unit = 4.0 * np.pi * kappa
    k_x = int(round(theta / unit))
    is_multiple = abs(theta - unit * k_x) <= multiple_tol * unit and theta >= 0.0
    return DensityEstimate(point, float(theta), radii, per_radius,
                           float(extrapolation_error), k_x, bool(is_multiple))


def cardinality_bound_check(report, k: int) -> str:
    """Verdict on H^0(S) <= k / min k_x; 'escaped' when S is empty, k != 0.

    ``report`` is any object with ``blow_up_set`` and ``k_x`` attributes.
    """
    S = report.blow_up_set
    if len(S) == 0:
        return "escaped" if k != 0 else "true"
    min_kx = min(report.k_x)
    if min_kx < 1:
        raise DomainError("blow-up points must carry charges k_x >= 1")
    return "true" if len(S) <= k / min_kx else "false"
