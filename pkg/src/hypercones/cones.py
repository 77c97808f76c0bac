"""Cones of real-rooted directions: membership, relaxations, nesting.

A `HyperCone` bundles a homogeneous polynomial with a distinguished
interior direction and caches the directional-derivative tower, since
every membership question reduces to signs of those derivatives or to
roots of the line restriction.  Membership is three-valued (In / Out /
Boundary-ambiguous): every property suite downstream quantifies only over
points with a tolerance margin, which is what keeps the checks
deterministic instead of flaky.
"""

from __future__ import annotations

import numpy as np

from . import spectrum
from .poly import (
    HomoPoly,
    UniPoly,
    as_vector,
    is_exact_vector,
    restrict_line,
)
from .report import CheckReport, InconclusiveError, Membership, Verdict


class HyperCone:
    """A cone of points whose restriction roots along e are all nonnegative.

    `minimality_assumed` and `rog_flag` are documented metadata, not
    verified claims; the automorphism machinery states explicitly which of
    its verdicts are conditional on them.
    """

    def __init__(
        self,
        p: HomoPoly,
        e,
        label: str = "",
        minimality_assumed: bool = False,
        rog_flag: bool = False,
        gallery=None,
    ):
        e = as_vector(e)
        if len(e) != p.nvars:
            raise ValueError("direction has wrong dimension")
        if p.degree < 1:
            raise ValueError("need a polynomial of degree at least 1")
        pe = p.eval(e)
        if pe <= 0:
            raise ValueError("p(e) must be positive")
        self.p = p
        self.e = e
        self.d = p.degree
        self.pe = pe
        self.label = label or "cone"
        self.minimality_assumed = minimality_assumed
        self.rog_flag = rog_flag
        self.gallery = gallery
        self._derivs = None
        self._deriv_cones = {}
        self._e_float = np.array([float(v) for v in e])

    # -- cached derivative tower -------------------------------------------------

    @property
    def derivs(self):
        if self._derivs is None:
            from .poly import derivatives_along

            self._derivs = derivatives_along(self.p, self.e)
        return self._derivs

    @property
    def nvars(self) -> int:
        return self.p.nvars

    @property
    def e_float(self) -> np.ndarray:
        return self._e_float

    def restrict(self, x) -> UniPoly:
        """Exact restriction q(t) = p(t e - x) for a rational point."""
        return restrict_line(self.p, self.e, as_vector(x), derivs=self.derivs)

    def restriction_coeffs_float(self, points: np.ndarray) -> np.ndarray:
        """(npts, d+1) ascending coefficient rows of the restriction."""
        return spectrum._coeff_matrix(self.derivs, np.asarray(points, dtype=float))

    def eigenvalues(self, x, **kw) -> spectrum.Spectrum:
        return spectrum.eigenvalues(self, x, **kw)

    def lambda_min(self, points: np.ndarray):
        """Batched smallest eigenvalue; returns (lambda_min, residuals)."""
        eigs, residuals = spectrum.batch_eigenvalues(self, points)
        return eigs[:, -1], residuals

    def derivative_cone(self, k: int) -> "DerivedCone":
        if k not in self._deriv_cones:
            self._deriv_cones[k] = DerivedCone(self, k)
        return self._deriv_cones[k]

    def descriptor_json(self) -> dict:
        return {
            "label": self.label,
            "polynomial": self.p.to_json_dict(),
            "e": [str(v) for v in self.e],
        }

    def __repr__(self):
        return f"HyperCone({self.label}, degree {self.d}, {self.nvars} vars)"


class DerivedCone:
    """The k-th relaxation: same direction, k-fold derivative polynomial."""

    def __init__(self, base: HyperCone, k: int):
        if not 0 <= k <= base.d - 1:
            raise ValueError(f"relaxation order {k} outside 0..{base.d - 1}")
        self.base = base
        self.k = k
        self.p_k = base.derivs[k]
        if k == 0:
            self.as_cone = base
        else:
            self.as_cone = HyperCone(
                self.p_k,
                base.e,
                label=f"{base.label}^({k})",
                minimality_assumed=_derived_minimality(base, k),
                rog_flag=False,
                gallery=base.gallery,
            )

    @property
    def d(self) -> int:
        return self.base.d - self.k

    @property
    def e(self):
        return self.base.e

    @property
    def nvars(self) -> int:
        return self.base.nvars

    @property
    def label(self) -> str:
        return self.as_cone.label

    def restrict(self, x) -> UniPoly:
        return self.as_cone.restrict(x)

    def restriction_coeffs_float(self, points) -> np.ndarray:
        return self.as_cone.restriction_coeffs_float(points)

    def lambda_min(self, points):
        return self.as_cone.lambda_min(points)

    def eigenvalues(self, x, **kw):
        return spectrum.eigenvalues(self.as_cone, x, **kw)

    def derivative_cone(self, j: int) -> "DerivedCone":
        return self.base.derivative_cone(self.k + j)

    def descriptor_json(self) -> dict:
        out = self.base.descriptor_json()
        out["k"] = self.k
        return out

    def __repr__(self):
        return f"DerivedCone({self.base.label}, k={self.k})"


def _derived_minimality(base: HyperCone, k: int) -> bool:
    # The derivative polynomial of a rank-one-generated cone stays minimal
    # through order d-2; at order d-1 any degree-1 generator of a halfspace
    # is trivially minimal.
    if k == base.d - 1:
        return True
    return base.rog_flag and base.minimality_assumed


def cone_view(cone) -> HyperCone:
    return cone.as_cone if isinstance(cone, DerivedCone) else cone


def derivative_cone(cone, k: int) -> DerivedCone:
    if isinstance(cone, DerivedCone):
        return cone.derivative_cone(k)
    return cone.derivative_cone(k)


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def contains(cone, x, tol: float = 1e-8) -> Membership:
    """Eigenvalue-route membership with a tolerance band at the boundary.

    The root residual widens the band: a repeated boundary root smears the
    companion eigenvalues, so decisions require a margin beyond both the
    tolerance and the observed residual.  Restrictions that look genuinely
    non-real-rooted raise InconclusiveError.
    """
    spec = spectrum.eigenvalues(cone, x)
    scale = 1.0 + abs(spec.lambda_max)
    if spec.residual > 0.05 * scale:
        raise InconclusiveError(
            f"restriction roots have residual {spec.residual}; "
            "not real-rooted within tolerance",
            payload=spec,
        )
    band = tol + spec.residual
    lmin = spec.lambda_min
    if lmin > band:
        return Membership.IN
    if lmin < -band:
        return Membership.OUT
    return Membership.BOUNDARY


def in_interior(cone, x, tol: float = 1e-8) -> bool:
    return contains(cone, x, tol) is Membership.IN


def membership_exact(cone, x) -> Membership:
    """Exact membership of a rational point via derivative signs.

    IN means interior (all derivative values strictly positive), OUT means
    outside the closed cone, BOUNDARY means on the boundary exactly.
    """
    if not is_exact_vector(x):
        raise TypeError("membership_exact needs a rational point")
    x = as_vector(x)
    if isinstance(cone, DerivedCone):
        base, k = cone.base, cone.k
    else:
        base, k = cone, 0
    boundary = False
    for i in range(k, base.d):
        v = base.derivs[i].eval(x)
        if v < 0:
            return Membership.OUT
        if v == 0:
            boundary = True
    return Membership.BOUNDARY if boundary else Membership.IN


def in_interior_exact(cone, x) -> bool:
    return membership_exact(cone, x) is Membership.IN


def contains_by_inequalities(cone, k: int, x, tol: float = 1e-8) -> Membership:
    """Membership in the k-th relaxation via the derivative-sign description.

    For rational points the verdict is exact closed-cone membership: In
    when every derivative value is nonnegative (boundary included), Out
    otherwise.  For float points each value is compared against a
    documented normalization scale_i = max|coefficient|(D^i p) *
    ||x||^(d-i), and anything inside the band comes back
    Boundary-ambiguous.
    """
    base = cone.base if isinstance(cone, DerivedCone) else cone
    if not 0 <= k <= base.d - 1:
        raise ValueError(f"relaxation order {k} outside 0..{base.d - 1}")
    if is_exact_vector(x):
        verdict = membership_exact(base.derivative_cone(k), x)
        return Membership.IN if verdict is Membership.BOUNDARY else verdict
    pt = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(pt))
    boundary = False
    for i in range(k, base.d):
        q = base.derivs[i]
        scale = float(q.max_abs_coeff()) * max(norm, 1e-300) ** (base.d - i)
        v = float(q.eval_float(pt))
        if v < -tol * scale:
            return Membership.OUT
        if v <= tol * scale:
            boundary = True
    return Membership.BOUNDARY if boundary else Membership.IN


# ---------------------------------------------------------------------------
# Strict nesting witnesses
# ---------------------------------------------------------------------------


def strict_containment_witness(
    cone: HyperCone,
    k: int,
    budget: int = 4096,
    seed: int = 0,
    tol: float = 1e-8,
) -> CheckReport:
    """Search for a point separating relaxation k from relaxation k-1.

    The witness x lies in the k-th relaxation and outside the (k-1)-th,
    with two-sided eigenvalue margins of at least 10*tol, re-verified both
    by fresh spectra and by exact derivative signs at a rational snap of
    the point.  Failure to find one is reported as Inconclusive, never as
    a refutation.
    """
    if not 1 <= k <= cone.d - 1:
        raise ValueError(f"relaxation order {k} outside 1..{cone.d - 1}")
    if not (cone.rog_flag and cone.minimality_assumed):
        raise ValueError(
            "strict-nesting search expects a rank-one-generated cone with "
            "an assumed-minimal polynomial"
        )
    inner = cone.derivative_cone(k - 1)
    outer = cone.derivative_cone(k)
    rng = np.random.default_rng(seed)
    margin_req = 10 * tol
    tried = 0
    batch = 256
    while tried < budget:
        n = min(batch, budget - tried)
        tried += n
        y = rng.standard_normal((n, cone.nvars))
        lam_in, res_in = inner.lambda_min(y)
        lam_out, res_out = outer.lambda_min(y)
        ok = (res_in < spectrum.RESIDUAL_GATE) & (res_out < spectrum.RESIDUAL_GATE)
        gap = np.where(ok, lam_out - lam_in, -np.inf)
        order = np.argsort(gap)[::-1]
        for idx in order[:8]:
            if gap[idx] < max(40 * tol, 1e-4):
                break
            shift = (lam_in[idx] + lam_out[idx]) / 2.0
            xf = y[idx] - shift * cone.e_float
            x_exact = as_vector(spectrum._dyadic(xf))
            if membership_exact(outer, x_exact) is not Membership.IN:
                continue
            if membership_exact(inner, x_exact) is not Membership.OUT:
                continue
            spec_in = spectrum.eigenvalues(inner, x_exact)
            spec_out = spectrum.eigenvalues(outer, x_exact)
            if spec_out.lambda_min >= margin_req and spec_in.lambda_min <= -margin_req:
                return CheckReport(
                    verdict=Verdict.HOLDS,
                    witness=x_exact,
                    samples=tried,
                    tolerances={"tol": tol, "margin": margin_req},
                    details={
                        "k": k,
                        "lambda_min_outer": spec_out.lambda_min,
                        "lambda_min_inner": spec_in.lambda_min,
                    },
                    tier="exact",
                )
    return CheckReport(
        verdict=Verdict.INCONCLUSIVE,
        samples=tried,
        tolerances={"tol": tol, "margin": margin_req},
        details={"k": k, "reason": "budget exhausted without a certified witness"},
    )
