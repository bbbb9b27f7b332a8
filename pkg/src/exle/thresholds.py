"""Exact threshold algebra for the coupled power-law reaction system.

The system under study is

    -Lap(u) = lambda * (v+1)**p,    -Lap(v) = gamma * (u+1)**theta

on a ball with zero Dirichlet data, where p, theta >= 1 and p*theta > 1.
Everything in this module is scalar algebra on the exponent pair.  Two
quartic polynomials carry the structure:

* the energy quartic  L(s) = s^4 - c2*s^2 + c1*s - c0  (coefficients
  below), whose negativity at s marks integrability exponents for which
  stable solutions obey uniform energy bounds, and
* the dimension quartic  H(x), the same object after the substitution
  x = s*(theta+1)/(p*theta-1), so that  H(x) = k^4 * L(s)  with
  k = (theta+1)/(p*theta-1).

The largest root s0 of L in (2, inf) is therefore mapped to the largest
root x0 = k*s0 of H, and space dimensions N < 2 + 2*x0 support no
singular set for the stable solutions targeted here.  The classical
comparison value is 2 + 4*(theta+1)*t0/(p*theta-1) built from the
explicit constant t0; since 2*t0 <= s0 (strictly unless p == theta) the
quartic-root threshold is never worse.

The energy quartic is not symmetric in (p, theta); all L-based
quantities use the canonical order p <= theta.  The dimension quartic is
fully symmetric, so the threshold itself does not depend on the order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

_BRACKET_CAP = 2.0 ** 60


@dataclass(frozen=True)
class ExponentPair:
    """Validated reaction exponents (p, theta).

    The pair is stored in the user's order; use canonical() where the
    asymmetric formulas require p <= theta.  p = theta = 1 is rejected
    because p*theta = 1 degenerates every formula in this module.
    """

    p: float
    theta: float

    def __post_init__(self):
        for name, value in (("p", self.p), ("theta", self.theta)):
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
        if self.p < 1 or self.theta < 1:
            raise DomainError(
                f"exponents must satisfy p >= 1 and theta >= 1, got ({self.p}, {self.theta})"
            )
        if self.p * self.theta <= 1:
            raise DomainError("p*theta must exceed 1")

    def canonical(self) -> tuple[float, float]:
        """Return (p, theta) with p <= theta."""
        p, theta = float(self.p), float(self.theta)
        return (p, theta) if p <= theta else (theta, p)

    @property
    def is_symmetric(self) -> bool:
        return self.p == self.theta


@dataclass(frozen=True)
class ThresholdReport:
    """Threshold summary for one exponent pair.

    n_cowan is the classical dimension threshold 2 + 4*(theta+1)*t0 /
    (p*theta - 1); n_new = 2 + 2*x0 is the quartic-root threshold.
    improvement = n_new - n_cowan is >= 0 up to root-finder tolerance,
    with equality exactly on the diagonal p == theta.
    """

    t0: float
    s0: float
    x0: float
    n_cowan: float
    n_new: float
    improvement: float


@dataclass(frozen=True)
class ScalingExponents:
    """Blow-up scaling powers (alpha, beta) for the pair, user order."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class IdentityReport:
    """Residuals (relative to the largest monomial) and sign checks.

    residuals keys:
      rescale          -- H(k*s) - k^4 * L(s) over sampled s
      value_at_2t0     -- L(2*t0) against its closed form
      symmetric_split  -- L(s) against the two-quadratic factorization
                          (only present when p == theta)
      value_at_p_plus_1 -- L(p+1) against its closed form
    signs keys:
      negative_at_2, negative_at_p_plus_1, negative_at_mid,
      mid_below_root   -- L(2) < 0, L(p+1) < 0, L(m) < 0 and m < s0
                          for the interior point m = 2*theta*(p+1)/(theta+1)
    """

    s0: float
    residuals: dict
    signs: dict

    def worst_residual(self) -> tuple[str, float]:
        name = max(self.residuals, key=lambda k: self.residuals[k])
        return name, self.residuals[name]

    def ok(self, tol: float = 1e-9) -> bool:
        return all(r <= tol for r in self.residuals.values()) and all(
            self.signs.values()
        )


def _canon(e: ExponentPair) -> tuple[float, float]:
    return e.canonical()


def _energy_coeffs(p: float, theta: float) -> tuple[float, float, float]:
    # Common factor 16*p*theta*(p+1)/(theta+1)^2 extracted for stability.
    f = 16.0 * p * theta * (p + 1.0) / (theta + 1.0) ** 2
    return f * (theta + 1.0), f * (p + theta + 2.0), f * (p + 1.0)


def eval_t0(e: ExponentPair) -> float:
    """Closed-form constant t0 = sqrt(m) + sqrt(m - sqrt(m)) with
    m = p*theta*(p+1)/(theta+1), canonical order.

    m > 1 holds throughout the validity domain, so the inner radicand
    sqrt(m)*(sqrt(m)-1) is positive.
    """
    p, theta = _canon(e)
    m = p * theta * (p + 1.0) / (theta + 1.0)
    root_m = math.sqrt(m)
    return root_m + math.sqrt(m - root_m)


def eval_L(e: ExponentPair, s: float) -> float:
    """Energy quartic L(s) = s^4 - c2*s^2 + c1*s - c0, canonical order.

    c2 = 16 p th (p+1)/(th+1), c1 = 16 p th (p+1)(p+th+2)/(th+1)^2,
    c0 = 16 p th (p+1)^2/(th+1)^2.
    """
    p, theta = _canon(e)
    c2, c1, c0 = _energy_coeffs(p, theta)
    return ((s * s) - c2) * (s * s) + c1 * s - c0


def _eval_L_prime(e: ExponentPair, s: float) -> float:
    p, theta = _canon(e)
    c2, c1, _ = _energy_coeffs(p, theta)
    return 4.0 * s ** 3 - 2.0 * c2 * s + c1


def eval_H(e: ExponentPair, x: float) -> float:
    """Dimension quartic H(x); fully symmetric under p <-> theta."""
    p, theta = e.p, e.theta
    d = p * theta - 1.0
    g = 16.0 * p * theta * (p + 1.0) * (theta + 1.0) / (d * d)
    return (
        (x * x) * (x * x)
        - g * (x * x)
        + g * (p + theta + 2.0) / d * x
        - g * (p + 1.0) * (theta + 1.0) / (d * d)
    )


def _monomial_scale_L(e: ExponentPair, s: float) -> float:
    p, theta = _canon(e)
    c2, c1, c0 = _energy_coeffs(p, theta)
    s2 = s * s
    return max(s2 * s2, c2 * s2, c1 * abs(s), c0, 1.0)


def largest_root_L(e: ExponentPair, tol: float = 1e-12) -> float:
    """Largest root s0 of the energy quartic, located in (2, inf).

    L(2) < 0 throughout the domain and L is eventually positive, so a
    sign change exists beyond 2; L'' = 12 s^2 - 2 c2 is increasing, which
    makes the root unique there.  Bracketing bisection with safeguarded
    Newton steps; returns the bracket midpoint once the bracket width is
    at most tol.
    """
    if not (tol > 0):
        raise DomainError(f"tol must be positive, got {tol}")
    p, theta = _canon(e)
    c2, c1, c0 = _energy_coeffs(p, theta)

    def f(s: float) -> float:
        return ((s * s) - c2) * (s * s) + c1 * s - c0

    f_lo = f(2.0)
    if not f_lo < 0:
        raise NumericalError(f"expected L(2) < 0, got {f_lo}; pair {e}")
    lo = 2.0
    hi = 4.0
    while f(hi) <= 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NumericalError("no sign change of the energy quartic below 2^60")
    for _ in range(500):
        width = hi - lo
        if width <= tol:
            return 0.5 * (lo + hi)
        # Newton from the midpoint, clipped to the bracket.
        x = 0.5 * (lo + hi)
        d = 4.0 * x ** 3 - 2.0 * c2 * x + c1
        if d != 0.0:
            x_newton = x - f(x) / d
            if lo < x_newton < hi:
                x = x_newton
        if f(x) < 0.0:
            lo = x
        else:
            hi = x
        # Force at least a halving per iteration so progress is geometric
        # even when Newton keeps landing next to one endpoint.
        if hi - lo > 0.5 * width:
            mid = 0.5 * (lo + hi)
            if f(mid) < 0.0:
                lo = mid
            else:
                hi = mid
    raise NumericalError("root refinement did not reach the requested width")


def threshold_report(e: ExponentPair, tol: float = 1e-12) -> ThresholdReport:
    """Full threshold summary: t0, s0, x0 and both dimension thresholds."""
    p, theta = _canon(e)
    k = (theta + 1.0) / (p * theta - 1.0)
    t0 = eval_t0(e)
    s0 = largest_root_L(e, tol)
    x0 = k * s0
    n_cowan = 2.0 + 4.0 * t0 * k
    n_new = 2.0 + 2.0 * x0
    return ThresholdReport(
        t0=t0,
        s0=s0,
        x0=x0,
        n_cowan=n_cowan,
        n_new=n_new,
        improvement=n_new - n_cowan,
    )


def hausdorff_bound(e: ExponentPair, dim: int, tol: float = 1e-12) -> float:
    """Upper bound max(N - (2 + 2*x0), 0) on the singular-set dimension."""
    _check_dim(dim)
    rep = threshold_report(e, tol)
    return max(float(dim) - rep.n_new, 0.0)


def hausdorff_bound_proof_form(e: ExponentPair, dim: int, tol: float = 1e-12) -> float:
    """Diagnostic variant max(N - (2N/(N-2))*x0, 0).

    This is the expression the dimension-reduction argument produces
    before it is weakened to the statement form; it degenerates at
    N <= 2, where no singular set can occur anyway, so 0 is returned.
    """
    _check_dim(dim)
    if dim <= 2:
        return 0.0
    rep = threshold_report(e, tol)
    return max(float(dim) - (2.0 * dim / (dim - 2.0)) * rep.x0, 0.0)


def _check_dim(dim: int) -> None:
    if not isinstance(dim, (int, np.integer)) or isinstance(dim, bool):
        raise DomainError(f"dim must be an integer, got {dim!r}")
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")


def scaling_exponents(e: ExponentPair) -> ScalingExponents:
    """alpha = 2(p+1)/(p*theta-1), beta = 2(theta+1)/(p*theta-1).

    Computed in the user's order: alpha scales the component forced by
    (v+1)^p, beta the other.  Exact identities beta*p = alpha + 2 and
    alpha*theta = beta + 2 hold; 0 < alpha <= beta when p <= theta.
    """
    d = e.p * e.theta - 1.0
    return ScalingExponents(alpha=2.0 * (e.p + 1.0) / d, beta=2.0 * (e.theta + 1.0) / d)


def stability_product(e: ExponentPair, s: float) -> float:
    """Product a1*a2 of the two one-sided stability coefficients.

    With r = s - 1 and q + 1 = (theta+1)(r+1)/(p+1) (canonical order),
    a1 = 4 q sqrt(p theta)/(q+1)^2 and a2 = 4 r sqrt(p theta)/(r+1)^2.
    Algebraically a1*a2 - 1 = -L(s)/s^4, so the product exceeds 1
    exactly where the energy quartic is negative.
    """
    p, theta = _canon(e)
    if not (s > p + 1.0):
        raise DomainError(f"s must exceed p+1 = {p + 1.0}, got {s}")
    r = s - 1.0
    q = (theta + 1.0) * s / (p + 1.0) - 1.0
    root_pt = math.sqrt(p * theta)
    a1 = 4.0 * q * root_pt / ((q + 1.0) * (q + 1.0))
    a2 = 4.0 * r * root_pt / ((r + 1.0) * (r + 1.0))
    return a1 * a2


def _k_certificate(p: float, theta: float) -> float:
    """Cubic certificate K = (3p^2-1)th^3 + (2p^2-p)th^2 - 2(p^2+p)th + p.

    Positive for theta >= p > 1; certifies L(2 theta (p+1)/(theta+1)) < 0
    through -((theta+1)^4 / (16 theta (p+1)^2)) L(m) = K.
    """
    return (
        (3.0 * p * p - 1.0) * theta ** 3
        + (2.0 * p * p - p) * theta ** 2
        - 2.0 * (p * p + p) * theta
        + p
    )


def check_polynomial_identities(
    e: ExponentPair, sample_count: int = 64, seed: int = 0, tol: float = 1e-12
) -> IdentityReport:
    """Verify the algebraic identities tying the two quartics together.

    Residuals are normalized by the largest monomial magnitude at the
    evaluation point, so the pass threshold is scale-free.  Sample
    points are drawn uniformly from [0, 2*s0] with a seeded generator;
    identical inputs give identical reports.
    """
    if sample_count < 1:
        raise DomainError(f"sample_count must be >= 1, got {sample_count}")
    p, theta = _canon(e)
    canon = ExponentPair(p, theta)
    s0 = largest_root_L(canon, tol)
    k = (theta + 1.0) / (p * theta - 1.0)
    rng = np.random.default_rng(seed)
    samples = rng.uniform(0.0, 2.0 * s0, size=sample_count)

    res_rescale = 0.0
    res_split = 0.0
    for s in samples:
        ls = eval_L(canon, s)
        scale = _monomial_scale_L(canon, s)
        res_rescale = max(res_rescale, abs(eval_H(canon, k * s) - k ** 4 * ls) / scale)
        if e.is_symmetric:
            split = (s * s + 4.0 * p * s - 4.0 * p) * (s * s - 4.0 * p * s + 4.0 * p)
            res_split = max(res_split, abs(ls - split) / scale)

    t0 = eval_t0(canon)
    two_t0 = 2.0 * t0
    rhs_2t0 = (
        16.0 * p * theta * (p + 1.0) * (theta - p) * (1.0 - two_t0) / (theta + 1.0) ** 2
    )
    res_2t0 = abs(eval_L(canon, two_t0) - rhs_2t0) / _monomial_scale_L(canon, two_t0)

    closed_p1 = (
        (p + 1.0) ** 2
        * (5.0 * p * theta + theta + p + 1.0)
        * (3.0 * p * theta - theta - p - 1.0)
        / (theta + 1.0) ** 2
    )
    res_p1 = abs(eval_L(canon, p + 1.0) + closed_p1) / _monomial_scale_L(canon, p + 1.0)

    mid = 2.0 * theta * (p + 1.0) / (theta + 1.0)
    residuals = {
        "rescale": res_rescale,
        "value_at_2t0": res_2t0,
        "value_at_p_plus_1": res_p1,
    }
    if e.is_symmetric:
        residuals["symmetric_split"] = res_split
    signs = {
        "negative_at_2": eval_L(canon, 2.0) < 0.0,
        "negative_at_p_plus_1": eval_L(canon, p + 1.0) < 0.0,
        "negative_at_mid": eval_L(canon, mid) < 0.0,
        "mid_below_root": mid < s0,
    }
    return IdentityReport(s0=s0, residuals=residuals, signs=signs)
