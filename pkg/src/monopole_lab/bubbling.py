"""Rescaling engine and scenario generation for mass-unbounded sequences.

The zoom at a base point x0 by factor m sends a configuration to

    Phi'(y) = m^-1 Phi(x0 + y/m),      e'(y) = m^-4 e(x0 + y/m),

so masses divide by m, ball energies obey E'(B_{m r}) = m^-1 E(B_r), and
zooming the mass-m closed form at its own zero by m reproduces the mass-1
closed form exactly (realized structurally below, so the comparison
distance is exactly zero, not merely small).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import calibration
from .analysis import DegreeResult, degree, find_zeros
from .bps import RadialProfile, bps_profile
from .errors import ConfigurationError, DomainError
from .fields import (FieldSampler, HedgehogSampler, MultiCenterSampler,
                     as_vec3, hedgehog_field)
from .measures import (DEFAULT_QUADRATURE, QuadratureSettings, ball_energy,
                       total_energy)
from .solver import bogomolnyi_residual, solve_for_mass


@dataclass(frozen=True)
class ScalingTransform:
    """Zoom by ``zoom`` at ``base_point`` (equivalently lambda = 1/zoom)."""

    zoom: float
    base_point: np.ndarray = None

    def __post_init__(self):
        if self.zoom == 0.0 or not np.isfinite(self.zoom) or self.zoom < 0.0:
            raise DomainError("zoom factor must be positive")
        base = np.zeros(3) if self.base_point is None else as_vec3(self.base_point)
        object.__setattr__(self, "base_point", base)

    @classmethod
    def from_lambda(cls, lam: float, base_point=None) -> "ScalingTransform":
        if lam == 0.0:
            raise DomainError("lambda must be nonzero")
        return cls(zoom=1.0 / abs(lam), base_point=base_point)


def _rescaled_profile(profile: RadialProfile, zoom: float) -> RadialProfile:
    """Profile of the zoomed configuration: a'(r) = a(r/z), phi' = phi(r/z)/z."""
    z = float(zoom)
    return dataclasses.replace(
        profile,
        a=lambda r: profile.a(np.asarray(r, dtype=float) / z),
        phi=lambda r: profile.phi(np.asarray(r, dtype=float) / z) / z,
        a_dot=lambda r: profile.a_dot(np.asarray(r, dtype=float) / z) / z,
        phi_dot=lambda r: profile.phi_dot(np.asarray(r, dtype=float) / z) / (z * z),
        a_minus_one=None if profile.a_minus_one is None
        else (lambda r: profile.a_minus_one(np.asarray(r, dtype=float) / z)),
        mass=profile.mass / z,
        r_max=profile.r_max * z if np.isfinite(profile.r_max) else np.inf,
        r_min=profile.r_min * z,
    )


class RescaledSampler(FieldSampler):
    """Generic zoom wrapper for samplers without a radial structure."""

    def __init__(self, base: FieldSampler, transform: ScalingTransform):
        self.base = base
        self.transform = transform
        self.mass = base.mass / transform.zoom
        self.charge = base.charge
        self.kind = base.kind

    def _pull(self, y) -> np.ndarray:
        return self.transform.base_point + as_vec3(y) / self.transform.zoom

    def higgs(self, y) -> np.ndarray:
        return self.base.higgs(self._pull(y)) / self.transform.zoom

    def higgs_norm(self, y) -> float:
        return self.base.higgs_norm(self._pull(y)) / self.transform.zoom

    def energy_density(self, y) -> float:
        return self.base.energy_density(self._pull(y)) / self.transform.zoom ** 4

    def covariant_sq(self, y) -> float:
        return self.base.covariant_sq(self._pull(y)) / self.transform.zoom ** 4


def rescale(sampler: FieldSampler, transform: ScalingTransform) -> FieldSampler:
    """Zoomed configuration (masses divide by zoom; energies scale exactly).

    Hedgehog samplers stay hedgehogs around the mapped center; the
    closed-form family is scale covariant, so zooming the mass-m member at
    its center returns the closed-form member of mass m/zoom exactly.
    Composes: rescaling by m1 then m2 equals rescaling by m1*m2 (up to base
    point bookkeeping).
    """
    z = transform.zoom
    if z == 1.0 and not np.any(transform.base_point):
        return sampler
    if isinstance(sampler, HedgehogSampler):
        new_center = (sampler.center - transform.base_point) * z
        profile = sampler.profile
        if profile.representation == "closed-form-bps":
            return hedgehog_field(bps_profile(profile.mass / z), new_center)
        return hedgehog_field(_rescaled_profile(profile, z), new_center)
    if isinstance(sampler, MixedSampler):
        return MixedSampler(
            rescale(sampler.monopole, transform),
            [(c - transform.base_point) * z for c in sampler.far_zeros],
            sampler.far_scale * z,
        )
    return RescaledSampler(sampler, transform)


# ---------------------------------------------------------------------------
# Mixed sampler: one exact monopole plus synthetic far zeros
# ---------------------------------------------------------------------------

class MixedSampler(FieldSampler):
    """One exact hedgehog monopole with extra synthetic zeros bolted on.

    The Higgs field multiplies the hedgehog magnitude by a C^2 ramp
    vanishing at each far zero and twists the direction through the same
    stereographic product as the synthetic multi-center field, so the zero
    set is {monopole center} union far_zeros and each zero has local degree
    one.  Densities are those of the exact monopole alone (the far zeros
    are degree bookkeeping, not energy carriers).
    """

    def __init__(self, monopole: HedgehogSampler, far_zeros, far_scale: float):
        self.monopole = monopole
        self.far_zeros = [as_vec3(z) for z in far_zeros]
        self.far_scale = float(far_scale)
        self.mass = monopole.mass
        self.charge = 1 + len(self.far_zeros)
        self.kind = monopole.kind
        self.radial_center = monopole.radial_center
        # the energy fast paths remain valid (density is the monopole's);
        # the Higgs norm is not radial, so that fast path is switched off
        self.profile = dataclasses.replace(monopole.profile,
                                           higgs_norm_increasing=False)
        all_centers = [monopole.center] + self.far_zeros
        self._product = MultiCenterSampler.__new__(MultiCenterSampler)
        self._product.centers = np.array(all_centers)
        self._product.scale = self.far_scale
        self._product.mass = 1.0
        self._product.charge = self.charge
        self._product.kind = "synthetic-higgs-only"
        from .fields import _choose_frame
        (self._product._e1, self._product._e2,
         self._product._axis) = _choose_frame(self._product.centers)

    def _magnitude(self, x) -> float:
        x = as_vec3(x)
        mag = self.monopole.higgs_norm(x)
        from .fields import _ramp
        for z in self.far_zeros:
            mag *= float(_ramp(float(np.linalg.norm(x - z)) / self.far_scale))
        return mag

    def higgs(self, x) -> np.ndarray:
        x = as_vec3(x)
        mag = self._magnitude(x)
        if mag == 0.0:
            return np.zeros(3)
        return mag * self._product._direction(x)

    def higgs_norm(self, x) -> float:
        return self._magnitude(x)

    def energy_density(self, x) -> float:
        return self.monopole.energy_density(x)

    def covariant_sq(self, x) -> float:
        return self.monopole.covariant_sq(x)

    def radial_energy(self, r):
        return self.monopole.radial_energy(r)

    def radial_covariant(self, r):
        return self.monopole.radial_covariant(r)

    def radial_higgs_norm(self, r):
        return self.monopole.radial_higgs_norm(r)


# ---------------------------------------------------------------------------
# Scenario generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioSequence:
    """A family of configurations indexed by strictly increasing masses."""

    masses: list
    configs: list
    center_schedule: list
    charge: int
    kind: str

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.masses, self.masses[1:])):
            raise DomainError("masses must be strictly increasing")
        if len(self.masses) != len(self.configs):
            raise DomainError("one configuration per mass required")


def perturbed_bps_profile(m: float, amplitude: float) -> RadialProfile:
    """Closed-form profile with a compact bump added to a (not a solution).

    The bump is supported on r in [0.5, 2]/m, so mass and charge data are
    untouched and the energy-formula defect is a finite quadrature.
    """
    base = bps_profile(m)
    lo, hi = 0.5 / m, 2.0 / m

    def bump(r):
        r = np.asarray(r, dtype=float)
        s = np.clip((r - lo) / (hi - lo), 0.0, 1.0)
        return 16.0 * (s * (1.0 - s)) ** 2

    def bump_dot(r):
        r = np.asarray(r, dtype=float)
        s = np.clip((r - lo) / (hi - lo), 0.0, 1.0)
        return 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (hi - lo)

    return dataclasses.replace(
        base,
        a=lambda r: base.a(r) + amplitude * bump(r),
        a_dot=lambda r: base.a_dot(r) + amplitude * bump_dot(r),
        a_minus_one=lambda r: base.a_minus_one(r) + amplitude * bump(r),
        representation="grid",
    )


def make_scenario(kind: str, k: int, masses, centers=None, direction=None,
                  base_sampler: FieldSampler | None = None,
                  profile_source: str = "closed-form",
                  solver_tol: float = 1e-8,
                  perturb_a: float = 0.0) -> ScenarioSequence:
    """Build one of the example families of mass-unbounded sequences.

    kinds: ``fixed-center`` (one exact charge-1 monopole at a fixed point),
    ``drifting-center`` (center at m_i * direction, escaping through the
    end), ``mixed`` (one fixed exact monopole plus a synthetic drifting
    zero for degree bookkeeping, k = 2), ``coincident-rescale`` (pure
    rescalings of a fixed base configuration).  Exact interacting
    multi-monopoles are out of scope and rejected.
    """
    masses = [float(m) for m in masses]

    def _profile(m: float) -> RadialProfile:
        if perturb_a:
            return perturbed_bps_profile(m, perturb_a)
        if profile_source == "ode":
            return solve_for_mass(m, tol=solver_tol).profile
        return bps_profile(m)

    if kind == "fixed-center":
        if centers is None or len(centers) != 1:
            if centers is not None and len(centers) > 1:
                raise ConfigurationError(
                    "exact interacting multi-monopoles are unsupported; "
                    "use the mixed or synthetic kinds")
            raise ConfigurationError("fixed-center needs exactly one center")
        if k != 1:
            raise ConfigurationError("exact monopole kinds carry k = 1 per center")
        p = as_vec3(centers[0])
        configs = [hedgehog_field(_profile(m), p) for m in masses]
        schedule = [[p] for _ in masses]
        return ScenarioSequence(masses, configs, schedule, k, kind)

    if kind == "drifting-center":
        if direction is None:
            raise ConfigurationError("drifting-center needs a direction")
        if k != 1:
            raise ConfigurationError("exact monopole kinds carry k = 1 per center")
        e = as_vec3(direction)
        configs, schedule = [], []
        for m in masses:
            c = m * e
            configs.append(hedgehog_field(_profile(m), c))
            schedule.append([c])
        return ScenarioSequence(masses, configs, schedule, k, kind)

    if kind == "mixed":
        if centers is None or len(centers) != 1 or direction is None:
            raise ConfigurationError("mixed needs one fixed center and a direction")
        if k != 2:
            raise ConfigurationError("the mixed example carries charge 2")
        p = as_vec3(centers[0])
        e = as_vec3(direction)
        configs, schedule = [], []
        for m in masses:
            far = m * e
            configs.append(MixedSampler(hedgehog_field(_profile(m), p),
                                        [far], far_scale=1.0))
            schedule.append([p, far])
        return ScenarioSequence(masses, configs, schedule, k, kind)

    if kind == "coincident-rescale":
        if base_sampler is None:
            if k == 1:
                base_sampler = hedgehog_field(bps_profile(1.0))
            else:
                base_sampler = MultiCenterSampler(
                    np.zeros((1, 3)) if k == 1 else _coincident_seed(k), 0.25, 1.0)
        base_mass = base_sampler.mass
        configs, schedule = [], []
        for m in masses:
            z = m / base_mass
            configs.append(rescale(base_sampler, ScalingTransform(zoom=z)))
            schedule.append([np.zeros(3)])
        return ScenarioSequence(masses, configs, schedule, k, kind)

    raise ConfigurationError(f"unknown scenario kind {kind!r}")


def _coincident_seed(k: int) -> np.ndarray:
    """k distinct seed zeros on a tiny ring (collapse under rescaling)."""
    th = 2.0 * np.pi * np.arange(k) / k
    return 1.0 * np.column_stack([np.cos(th), np.sin(th), np.zeros(k)])


def validate_scenario(scenario: ScenarioSequence, tol: float = 1e-6) -> dict:
    """Check the monopole invariant: every config labeled exact must have
    Bogomolnyi residual below tol.  Returns per-config residuals."""
    residuals = []
    ok = True
    for sampler in scenario.configs:
        profile = getattr(sampler, "profile", None)
        if profile is None:
            residuals.append(None)
            continue
        grid = np.geomspace(0.05 / sampler.mass, 6.0 / sampler.mass, 80)
        res = bogomolnyi_residual(profile, grid)
        residuals.append(res)
        if res > tol:
            ok = False
    return {"ok": ok, "residuals": residuals, "tolerance": tol}


# ---------------------------------------------------------------------------
# Bubble comparison and the energy-formula audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BubbleComparison:
    point: np.ndarray
    sup_distance: dict
    limit_charge: int
    limit_mass: float
    bubble_found: bool


def _sup_ball_diff(s1: FieldSampler, s2: FieldSampler, radius: float,
                   n_dirs: int = 64, n_shells: int = 8) -> float:
    from .analysis import fibonacci_sphere
    dirs = fibonacci_sphere(n_dirs)
    worst = abs(s1.higgs_norm(np.zeros(3)) - s2.higgs_norm(np.zeros(3)))
    for rho in np.linspace(1.0 / n_shells, 1.0, n_shells):
        for u in dirs:
            p = rho * radius * u
            worst = max(worst, abs(s1.higgs_norm(p) - s2.higgs_norm(p)))
    return worst


def bubble_compare(scenario: ScenarioSequence, point, ball_radii) -> BubbleComparison:
    """Zoom each configuration at the point by its mass and compare the
    Higgs norm against the candidate mass-1 bubble centered at the rescaled
    zero.

    With no zero near the point along the tail, the report carries the sup
    distances to the vacuum instead and ``bubble_found`` is False;
    ``limit_mass`` extrapolates the boundary sup of the final rescaled
    configuration over the two largest radii.
    """
    point = as_vec3(point)
    if len(scenario.masses) < 3:
        raise DomainError("scenario tail too short for a bubble comparison")
    radii = sorted(float(R) for R in ball_radii)
    sup_distance = {}
    bubble_found = False
    vacuum = _Vacuum()
    for m, cfg in zip(scenario.masses, scenario.configs):
        box = (point - 0.75, point + 0.75)
        zeros = find_zeros(cfg, box, grid_n=8)
        zoomed = rescale(cfg, ScalingTransform(zoom=m, base_point=point))
        if zeros:
            z = min(zeros, key=lambda q: np.linalg.norm(q - point))
            bubble = hedgehog_field(bps_profile(1.0), (z - point) * m)
            bubble_found = True
            for R in radii:
                sup_distance[(m, R)] = _sup_ball_diff(zoomed, bubble, R)
        else:
            for R in radii:
                sup_distance[(m, R)] = _sup_ball_diff(zoomed, vacuum, R)

    last = rescale(scenario.configs[-1],
                   ScalingTransform(zoom=scenario.masses[-1], base_point=point))
    if bubble_found:
        k_last = degree(last, np.zeros(3), radii[-1]).value
        R1, R2 = radii[-2] if len(radii) > 1 else 0.5 * radii[-1], radii[-1]
        v1 = _sup_sphere_norm(last, R1)
        v2 = _sup_sphere_norm(last, R2)
        limit_mass = (R2 * v2 - R1 * v1) / (R2 - R1)
    else:
        k_last = 0
        limit_mass = _sup_sphere_norm(last, radii[-1])
    return BubbleComparison(point, sup_distance, int(k_last), float(limit_mass),
                            bubble_found)


class _Vacuum(FieldSampler):
    mass = 0.0
    charge = 0
    kind = "synthetic-higgs-only"

    def higgs(self, x) -> np.ndarray:
        return np.zeros(3)

    def higgs_norm(self, x) -> float:
        return 0.0


def _sup_sphere_norm(sampler: FieldSampler, radius: float) -> float:
    from .analysis import fibonacci_sphere
    return max(sampler.higgs_norm(radius * u) for u in fibonacci_sphere(128))


def defect_density(profile: RadialProfile, r):
    """Pointwise Bogomolnyi defect density

        D = (phi' - (a^2-1)/(2r^2))^2 + (a' - 2 a phi)^2 / (2 r^2),

    which satisfies total_energy = 4 pi m k + integral of D exactly for
    profiles with the monopole boundary behavior."""
    r = np.asarray(r, dtype=float)
    a = profile.a(r)
    if profile.a_minus_one is not None:
        a_sq_m1 = profile.a_minus_one(r) * (a + 1.0)
    else:
        a_sq_m1 = a * a - 1.0
    d1 = profile.phi_dot(r) - a_sq_m1 / (2.0 * r * r)
    d2 = profile.a_dot(r) - 2.0 * a * profile.phi(r)
    out = d1 * d1 + d2 * d2 / (2.0 * r * r)
    return out if np.ndim(out) else float(out)


def energy_formula_audit(scenario: ScenarioSequence,
                         settings: QuadratureSettings = DEFAULT_QUADRATURE) -> list[dict]:
    """Per configuration: total energy, the prediction 4 pi kappa m k, their
    difference, the normalized energy m^-1 E, and (when a profile is
    available) the quadrature of the Bogomolnyi defect density."""
    from scipy.integrate import quad
    kappa = calibration.measured_kappa()
    out = []
    for m, cfg in zip(scenario.masses, scenario.configs):
        total = total_energy(cfg, settings)
        predicted = 4.0 * np.pi * kappa * m * scenario.charge
        rec = {
            "mass": m,
            "total_energy": total,
            "predicted": predicted,
            "difference": total - predicted,
            "normalized": total / m,
        }
        profile = getattr(cfg, "profile", None)
        if profile is not None:
            kw = settings.quad_kwargs()
            val, _ = quad(lambda r: 4.0 * np.pi * r * r * defect_density(profile, r),
                          profile.r_min, 16.0 / m,
                          points=None if kw["limit"] == 1 else [1.0 / m, 4.0 / m],
                          **kw)
            rec["defect_quadrature"] = val
        out.append(rec)
    return out
