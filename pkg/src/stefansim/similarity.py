"""Closed-form similarity reduction of the melting problem.

With theta(x, t) = theta_f + (theta0 - theta_f) * y(eta), eta = x / (2 a
sqrt(t)) and s(t) = 2 a lam sqrt(t), the PDE problem collapses to a
two-point ODE problem for y on [0, lam]:

    2 eta (1 + delta y^p) y' + [(1 + delta y^p) y']' = r(eta),
    y(0) = 1,   y(lam) = 0,   y'(lam) = -2 lam / Ste,

where r = (4/Ste) beta(eta) for the bulk similarity source, r = A y'(0)
for the flux-feedback source (A the feedback coupling) and r = 0 without a
source.  One integration with the factor exp(eta^2) and a second from 0 to
eta turn this into a scalar transcendental equation for lam plus an
explicit formula for the integrated profile

    Psi(eta) = Phi(y(eta)),    Phi(x) = x + delta/(p+1) * x^(p+1),

so the profile itself is y = Phi^{-1}(Psi).  Everything in this module
works at the dimensionless level (Ste, delta, p, beta or A); the mapping
to physical quantities lives in reconstruct.

The y'(0) formulas drop out of the first integration evaluated at lam:

    (1 + delta) y'(0) = -(2/Ste) (lam e^{lam^2} + 2 I[beta e^{xi^2}](lam))
    y'(0) = -2 lam e^{lam^2} / (Ste (1 + delta + A E(lam)))   (flux feedback)

with E(x) the integral of e^{z^2} from 0 to x.  For the exponential source
beta(eta) = e^{-eta^2}/2 every integral collapses:

    lam solves   (sqrt(pi)/Ste) x erf(x) (e^{x^2} + 1)
                  - (1 - e^{-x^2})/Ste = 1 + delta/(p+1),
    Psi(eta) = 1 + delta/(p+1)
               - (sqrt(pi) lam (e^{lam^2} + 1)/Ste) erf(eta)
               + (1 - e^{-eta^2})/Ste.

Each reduced equation has a strictly increasing left-hand side, so lam is
the unique root and bracketed bisection is a proof of existence in the
computed interval.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInput, NonConvergence, OutOfRange, StefanError
from .model import (
    BoundaryData,
    ExponentialSource,
    FluxFeedbackSource,
    Material,
    NoSource,
    SimilaritySource,
    SourceSpec,
    Dimensionless,
    dimensionless_groups,
)
from .numerics import (
    DEFAULT_TOL,
    SQRT_PI,
    Bracket,
    Tolerance,
    erf,
    find_root_increasing,
    integrate,
    integrate_cumulative,
)

# Chebyshev-Lobatto node count of the cached profile table.
PROFILE_TABLE_NODES = 129

# Psi values may stray this far outside [0, Phi(1)] from rounding before
# inversion rejects them; strays inside the band clamp to the boundary.
PSI_CLAMP_SLACK = 1e-9

# Seed bracket for every front-coefficient solve; find_root_increasing
# expands it as needed.
LAMBDA_SEED = Bracket(1e-8, 1.0)

# exp(x^2) overflows a double past x^2 ~ 709; treat anything near that as
# +inf so root bracketing sees a clean, monotone blow-up.
_EXP_ARG_LIMIT = 700.0

# Quadrature budget used inside profile kernels and equation evaluations.
_QUAD_TOL = Tolerance(abs_tol=1e-13, rel_tol=1e-13, max_iter=200)


def _check_groups(ste: float, delta: float, p: float) -> None:
    for name, value in (("ste", ste), ("delta", delta), ("p", p)):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
            raise InvalidInput(f"{name} must be a finite positive number, got {value!r}")


def phi_map(delta: float, p: float, x):
    """Phi(x) = x + delta/(p+1) * x^(p+1), the nonlinear profile map.

    Strictly increasing on x >= 0; Psi(eta) = Phi(y(eta)).

    Args:
        delta: Coefficient amplitude, > 0.
        p: Coefficient exponent, > 0.
        x: Point or array of points, >= 0.

    Returns:
        Phi(x), matching the shape of x.
    """
    _check_groups(1.0, delta, p)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise InvalidInput("phi_map is defined for x >= 0")
    out = xa * (1.0 + (delta / (p + 1.0)) * xa**p)
    return float(out) if np.isscalar(x) else out


def phi_map_deriv(delta: float, p: float, x):
    """Derivative Phi'(x) = 1 + delta * x^p (positive, so Phi is invertible)."""
    _check_groups(1.0, delta, p)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise InvalidInput("phi_map_deriv is defined for x >= 0")
    out = 1.0 + delta * xa**p
    return float(out) if np.isscalar(x) else out


def phi_inverse_quadratic(delta: float, w):
    """Closed-form Phi^{-1} for p = 1, where Phi(x) = x + delta x^2 / 2.

    Uses the cancellation-free root form y = 2 w / (1 + sqrt(1 + 2 delta w)),
    which stays accurate for delta or w near zero.
    """
    _check_groups(1.0, delta, 1.0)
    wa = np.asarray(w, dtype=float)
    if np.any(1.0 + 2.0 * delta * wa < 0.0):
        raise OutOfRange("phi_inverse_quadratic: argument below the map's range")
    out = 2.0 * wa / (1.0 + np.sqrt(1.0 + 2.0 * delta * wa))
    return float(out) if np.isscalar(w) else out


def _phi_inverse_many(delta: float, p: float, w: np.ndarray, clamp: bool) -> np.ndarray:
    """Vectorized Phi^{-1} on [0, Phi(1)].

    With clamp=True, values within PSI_CLAMP_SLACK of the range boundary
    clamp to it and values further out raise OutOfRange.  With clamp=False
    the inverse is extended linearly beyond both ends (slope 1/Phi'(0) = 1
    below, 1/Phi'(1) above), which finite-difference checks at the front
    rely on: the extension keeps the composed profile smooth across the
    tiny negative Psi values a rounded root residual can produce.
    """
    top = 1.0 + delta / (p + 1.0)
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    if clamp:
        if np.any(w < -PSI_CLAMP_SLACK) or np.any(w > top + PSI_CLAMP_SLACK):
            worst = float(w.min()) if np.any(w < -PSI_CLAMP_SLACK) else float(w.max())
            raise OutOfRange(
                f"profile value {worst!r} outside [0, {top!r}] beyond the clamp slack"
            )
        w = np.clip(w, 0.0, top)
        mid = np.ones_like(w, dtype=bool)
    else:
        low = w < 0.0
        high = w > top
        out[low] = w[low]
        out[high] = 1.0 + (w[high] - top) / (1.0 + delta)
        mid = ~(low | high)
    wm = w[mid]
    if p == 1.0:
        out[mid] = 2.0 * wm / (1.0 + np.sqrt(1.0 + 2.0 * delta * wm))
        return out
    # Newton from above: Phi is convex, so starting at min(w, 1) >= root
    # gives monotone, globally convergent iterates.
    c = delta / (p + 1.0)
    x = np.minimum(wm, 1.0)
    for _ in range(100):
        xp = x**p
        f = x * (1.0 + c * xp) - wm
        if not np.any(np.abs(f) > 1e-14 * top):
            break
        x = x - f / (1.0 + delta * xp)
        np.clip(x, 0.0, 1.0, out=x)
    else:
        raise NonConvergence("phi inverse Newton did not reach tolerance in 100 sweeps")
    out[mid] = x
    return out


def phi_inverse(delta: float, p: float, w: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Generic Phi^{-1}(w) on [0, 1] via safeguarded Newton.

    Args:
        delta: Coefficient amplitude, > 0.
        p: Coefficient exponent, > 0.
        w: Value in [0, Phi(1)]; values straying beyond by at most
            tol.abs_tol clamp to the endpoint.
        tol: Residual tolerance |Phi(x) - w| <= abs_tol.

    Returns:
        x with Phi(x) = w.

    Raises:
        OutOfRange: w outside [0, Phi(1)] beyond abs_tol.
    """
    from .numerics import invert_increasing

    _check_groups(1.0, delta, p)
    return invert_increasing(
        lambda x: phi_map(delta, p, x),
        lambda x: phi_map_deriv(delta, p, x),
        w,
        Bracket(0.0, 1.0),
        tol,
    )


def _vectorized_beta(beta: Callable) -> Callable:
    """Return beta as an array-capable callable (wrapping if necessary)."""
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(beta(probe), dtype=float)
        if out.shape == probe.shape:
            return beta
    except (TypeError, ValueError):
        pass
    return np.vectorize(beta, otypes=[float])


@dataclass(frozen=True)
class LambdaEquation:
    """Reduced transcendental equation phi(x) = target for the front coefficient.

    Attributes:
        evaluate: Strictly increasing left-hand side on x > 0.
        target: Right-hand side 1 + delta/(p+1).
        label: Human-readable equation name for error messages.
    """

    evaluate: Callable[[float], float]
    target: float
    label: str


def lambda_equation_nosource(ste: float, delta: float, p: float) -> LambdaEquation:
    """Reduced equation (sqrt(pi)/Ste) x erf(x) e^{x^2} = 1 + delta/(p+1)."""
    _check_groups(ste, delta, p)

    def evaluate(x: float) -> float:
        if x * x > _EXP_ARG_LIMIT:
            return math.inf
        return (SQRT_PI / ste) * x * math.erf(x) * math.exp(x * x)

    return LambdaEquation(evaluate, 1.0 + delta / (p + 1.0), "front equation (no source)")


def lambda_equation_exponential(ste: float, delta: float, p: float) -> LambdaEquation:
    """Closed-form reduced equation for beta(eta) = e^{-eta^2}/2.

    LHS = (sqrt(pi)/Ste) x erf(x) (e^{x^2} + 1) - (1 - e^{-x^2})/Ste.
    """
    _check_groups(ste, delta, p)

    def evaluate(x: float) -> float:
        if x * x > _EXP_ARG_LIMIT:
            return math.inf
        return (SQRT_PI / ste) * x * math.erf(x) * (math.exp(x * x) + 1.0) + math.expm1(
            -x * x
        ) / ste

    return LambdaEquation(
        evaluate, 1.0 + delta / (p + 1.0), "front equation (exponential source)"
    )


def lambda_equation_source1(
    ste: float, delta: float, p: float, beta: Callable | None
) -> LambdaEquation:
    """Reduced equation for a general similarity-form source.

    LHS = (sqrt(pi)/Ste) x erf(x) e^{x^2}
          + (2 sqrt(pi)/Ste) * integral_0^x e^{xi^2} erf(xi) beta(xi) dxi.

    beta=None means no source and reuses the closed form.
    """
    if beta is None:
        return lambda_equation_nosource(ste, delta, p)
    _check_groups(ste, delta, p)
    beta_v = _vectorized_beta(beta)

    def integrand(z: np.ndarray) -> np.ndarray:
        return np.exp(z * z) * erf(z) * beta_v(z)

    def evaluate(x: float) -> float:
        if x * x > _EXP_ARG_LIMIT:
            return math.inf
        head = (SQRT_PI / ste) * x * math.erf(x) * math.exp(x * x)
        return head + (2.0 * SQRT_PI / ste) * integrate(integrand, 0.0, x, _QUAD_TOL)

    return LambdaEquation(
        evaluate, 1.0 + delta / (p + 1.0), "front equation (similarity source)"
    )


def lambda_equation_source2(
    ste: float, delta: float, p: float, feedback: float
) -> LambdaEquation:
    """Reduced equation for the flux-feedback source with coupling A = feedback.

    LHS = sqrt(pi) x e^{x^2} * (A J(x) + (1 + delta) erf(x))
          / (Ste (1 + delta + A E(x))),
    E(x) = integral_0^x e^{z^2} dz,
    J(x) = integral_0^x e^{z^2} (erf(x) - erf(z)) dz = erf(x) E(x) - I(x),
    I(x) = integral_0^x e^{z^2} erf(z) dz.
    """
    _check_groups(ste, delta, p)
    if not (isinstance(feedback, (int, float)) and math.isfinite(feedback) and feedback > 0.0):
        raise InvalidInput(f"feedback must be a finite positive number, got {feedback!r}")

    def evaluate(x: float) -> float:
        if x * x > _EXP_ARG_LIMIT:
            return math.inf
        big_e = integrate(lambda z: np.exp(z * z), 0.0, x, _QUAD_TOL)
        big_i = integrate(lambda z: np.exp(z * z) * erf(z), 0.0, x, _QUAD_TOL)
        ex = math.erf(x)
        j = ex * big_e - big_i
        num = SQRT_PI * x * math.exp(x * x) * (feedback * j + (1.0 + delta) * ex)
        return num / (ste * (1.0 + delta + feedback * big_e))

    return LambdaEquation(
        evaluate, 1.0 + delta / (p + 1.0), "front equation (flux-feedback source)"
    )


def solve_lambda(eq: LambdaEquation, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of a reduced equation, bracketed from the standard seed.

    Failures are re-raised with the equation's label attached so callers
    (and CLI users) see which reduced equation could not be solved.
    """
    try:
        return find_root_increasing(eq.evaluate, eq.target, LAMBDA_SEED, tol)
    except StefanError as exc:
        raise type(exc)(f"solving {eq.label}: {exc}") from exc


def solve_lambda_source1(
    ste: float,
    delta: float,
    p: float,
    beta: Callable | None,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Front coefficient for a similarity-form source (beta=None for none)."""
    return solve_lambda(lambda_equation_source1(ste, delta, p, beta), tol)


def solve_lambda_source2(
    ste: float,
    delta: float,
    p: float,
    feedback: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Front coefficient for the flux-feedback source with coupling feedback."""
    return solve_lambda(lambda_equation_source2(ste, delta, p, feedback), tol)


@dataclass(frozen=True)
class PsiProfile:
    """Integrated profile Psi(eta) = Phi(y(eta)) on [0, lam].

    Decreases strictly from target = Phi(1) = 1 + delta/(p+1) at eta = 0
    to (up to the front-equation residual) 0 at eta = lam.

    evaluate_many computes every requested point in one batched pass whose
    quadrature segments are shared between neighboring points, so
    differences of nearby values stay accurate; always use a single
    evaluate_many call (not repeated evaluate calls) when finite
    differencing the result.
    """

    lam: float
    ste: float
    delta: float
    p: float
    target: float
    _kernel: Callable[[np.ndarray], np.ndarray]

    def evaluate_many(self, etas) -> np.ndarray:
        arr = np.asarray(etas, dtype=float)
        flat = arr.ravel()
        if flat.size == 0:
            return arr.astype(float).copy()
        slack = 1e-9 * max(1.0, self.lam)
        if np.any(flat < -slack) or np.any(flat > self.lam + slack):
            raise InvalidInput(
                f"profile query outside [0, {self.lam!r}] beyond the rounding slack"
            )
        flat = np.clip(flat, 0.0, self.lam)
        order = np.argsort(flat, kind="stable")
        vals = np.empty_like(flat)
        vals[order] = self._kernel(flat[order])
        return vals.reshape(arr.shape)

    def evaluate(self, eta: float) -> float:
        return float(self.evaluate_many(np.array([eta]))[0])


def _psi_nosource(lam: float, ste: float, delta: float, p: float) -> PsiProfile:
    target = 1.0 + delta / (p + 1.0)
    coeff = (SQRT_PI / ste) * lam * math.exp(lam * lam)

    def kernel(pts: np.ndarray) -> np.ndarray:
        return target - coeff * erf(pts)

    return PsiProfile(lam, ste, delta, p, target, kernel)


def _psi_exponential(lam: float, ste: float, delta: float, p: float) -> PsiProfile:
    target = 1.0 + delta / (p + 1.0)
    coeff = (SQRT_PI / ste) * lam * (math.exp(lam * lam) + 1.0)

    def kernel(pts: np.ndarray) -> np.ndarray:
        return target - coeff * erf(pts) - np.expm1(-pts * pts) / ste

    return PsiProfile(lam, ste, delta, p, target, kernel)


def _psi_source1(
    lam: float,
    ste: float,
    delta: float,
    p: float,
    beta: Callable,
    front_term_sign: float = 1.0,
    tol: Tolerance = _QUAD_TOL,
) -> PsiProfile:
    """Profile for a general similarity-form source.

    Psi(eta) = target - (sqrt(pi)/Ste) erf(eta) B
               + (2 sqrt(pi)/Ste) (erf(eta) Ibe(eta) - Ibee(eta)),
    Ibe(x)  = integral_0^x beta e^{xi^2} dxi,
    Ibee(x) = integral_0^x beta e^{xi^2} erf(xi) dxi,
    B = front_term_sign * lam e^{lam^2} + 2 Ibe(lam).

    front_term_sign is +1; the -1 variant reproduces a circulated but
    internally inconsistent transcription and exists only for the errata
    regression tests (see errata module).
    """
    target = 1.0 + delta / (p + 1.0)
    beta_v = _vectorized_beta(beta)

    def f_be(z: np.ndarray) -> np.ndarray:
        return beta_v(z) * np.exp(z * z)

    def f_bee(z: np.ndarray) -> np.ndarray:
        return beta_v(z) * np.exp(z * z) * erf(z)

    ibe_lam = integrate(f_be, 0.0, lam, tol)
    b_coeff = front_term_sign * lam * math.exp(lam * lam) + 2.0 * ibe_lam

    def kernel(pts: np.ndarray) -> np.ndarray:
        nodes = np.concatenate([[0.0], pts])
        ibe = integrate_cumulative(f_be, nodes, tol)[1:]
        ibee = integrate_cumulative(f_bee, nodes, tol)[1:]
        er = erf(pts)
        return (
            target
            - (SQRT_PI / ste) * er * b_coeff
            + (2.0 * SQRT_PI / ste) * (er * ibe - ibee)
        )

    return PsiProfile(lam, ste, delta, p, target, kernel)


def _psi_source2(
    lam: float,
    ste: float,
    delta: float,
    p: float,
    feedback: float,
    tol: Tolerance = _QUAD_TOL,
) -> PsiProfile:
    """Profile for the flux-feedback source.

    Psi(eta) = target - C (A J(eta) + (1 + delta) erf(eta)),
    C = sqrt(pi) lam e^{lam^2} / (Ste (1 + delta + A E(lam))),
    J(eta) = erf(eta) E(eta) - I(eta)  as in lambda_equation_source2.
    """
    target = 1.0 + delta / (p + 1.0)

    def f_e(z: np.ndarray) -> np.ndarray:
        return np.exp(z * z)

    def f_i(z: np.ndarray) -> np.ndarray:
        return np.exp(z * z) * erf(z)

    e_lam = integrate(f_e, 0.0, lam, tol)
    c_coeff = SQRT_PI * lam * math.exp(lam * lam) / (ste * (1.0 + delta + feedback * e_lam))

    def kernel(pts: np.ndarray) -> np.ndarray:
        nodes = np.concatenate([[0.0], pts])
        big_e = integrate_cumulative(f_e, nodes, tol)[1:]
        big_i = integrate_cumulative(f_i, nodes, tol)[1:]
        er = erf(pts)
        j = er * big_e - big_i
        return target - c_coeff * (feedback * j + (1.0 + delta) * er)

    return PsiProfile(lam, ste, delta, p, target, kernel)


def psi_profile(
    lam: float,
    ste: float,
    delta: float,
    p: float,
    source: SourceSpec,
    tol: Tolerance = _QUAD_TOL,
) -> PsiProfile:
    """Integrated profile for any source model at a given front coefficient."""
    _check_groups(ste, delta, p)
    if isinstance(source, NoSource):
        return _psi_nosource(lam, ste, delta, p)
    if isinstance(source, ExponentialSource):
        return _psi_exponential(lam, ste, delta, p)
    if isinstance(source, SimilaritySource):
        return _psi_source1(lam, ste, delta, p, source.beta, tol=tol)
    if isinstance(source, FluxFeedbackSource):
        raise InvalidInput(
            "flux-feedback profiles need the dimensionless coupling; "
            "use psi_profile_feedback or solve_problem"
        )
    raise InvalidInput(f"unknown source spec {source!r}")


def psi_profile_feedback(
    lam: float, ste: float, delta: float, p: float, feedback: float
) -> PsiProfile:
    """Integrated profile for the flux-feedback source at coupling feedback."""
    _check_groups(ste, delta, p)
    return _psi_source2(lam, ste, delta, p, feedback)


def y_from_psi(psi: PsiProfile, etas, clamp: bool = True) -> np.ndarray:
    """Profile values y = Phi^{-1}(Psi(eta)) for an array of eta."""
    w = psi.evaluate_many(etas)
    return _phi_inverse_many(psi.delta, psi.p, w, clamp)


def y_profile_source1(
    lam: float, ste: float, delta: float, p: float, beta: Callable | None, eta
):
    """Profile y(eta) for a similarity-form source at front coefficient lam.

    Accepts a scalar or array eta; beta=None means no source.
    """
    if beta is None:
        psi = _psi_nosource(lam, ste, delta, p)
    else:
        psi = _psi_source1(lam, ste, delta, p, beta)
    out = y_from_psi(psi, np.atleast_1d(np.asarray(eta, dtype=float)))
    return float(out[0]) if np.isscalar(eta) else out.reshape(np.shape(eta))


def y_profile_source2(
    lam: float, ste: float, delta: float, p: float, feedback: float, eta
):
    """Profile y(eta) for the flux-feedback source at front coefficient lam."""
    psi = _psi_source2(lam, ste, delta, p, feedback)
    out = y_from_psi(psi, np.atleast_1d(np.asarray(eta, dtype=float)))
    return float(out[0]) if np.isscalar(eta) else out.reshape(np.shape(eta))


def y_prime_at_zero(
    lam: float,
    ste: float,
    delta: float,
    beta: Callable | None = None,
    feedback: float | None = None,
    tol: Tolerance = _QUAD_TOL,
) -> float:
    """Fixed-face slope y'(0) of the similarity profile.

    Exactly one source may be given: beta for a similarity-form source,
    feedback for the flux-feedback source, neither for no source.  The
    exponent p does not enter: y'(0) follows from the first integration
    alone.

    Returns:
        (1+delta) y'(0) = -(2/Ste)(lam e^{lam^2} + 2 Ibe(lam))   [beta]
        y'(0) = -2 lam e^{lam^2} / (Ste (1+delta+A E(lam)))      [feedback]
    """
    if beta is not None and feedback is not None:
        raise InvalidInput("give at most one of beta and feedback")
    if feedback is not None:
        e_lam = integrate(lambda z: np.exp(z * z), 0.0, lam, tol)
        return -2.0 * lam * math.exp(lam * lam) / (ste * (1.0 + delta + feedback * e_lam))
    ibe_lam = 0.0
    if beta is not None:
        beta_v = _vectorized_beta(beta)
        ibe_lam = integrate(lambda z: beta_v(z) * np.exp(z * z), 0.0, lam, tol)
    return -(2.0 / (ste * (1.0 + delta))) * (lam * math.exp(lam * lam) + 2.0 * ibe_lam)


@dataclass(frozen=True)
class _BarycentricTable:
    """Psi sampled at Chebyshev-Lobatto nodes with barycentric weights."""

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, psi: PsiProfile, n: int) -> "_BarycentricTable":
        k = np.arange(n)
        nodes = 0.5 * psi.lam * (1.0 - np.cos(np.pi * k / (n - 1)))
        nodes[0] = 0.0
        nodes[-1] = psi.lam
        weights = np.where(k % 2 == 0, 1.0, -1.0)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return cls(nodes=nodes, values=psi.evaluate_many(nodes), weights=weights)

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        out = np.empty(pts.shape, dtype=float)
        # Chunked so the (m, n) distance matrix stays small.
        for start in range(0, pts.size, 4096):
            chunk = pts[start : start + 4096]
            diff = chunk[:, None] - self.nodes[None, :]
            exact_rows, exact_cols = np.nonzero(diff == 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = self.weights[None, :] / diff
                vals = (t @ self.values) / t.sum(axis=1)
            vals[exact_rows] = self.values[exact_cols]
            out[start : start + 4096] = vals
        return out


@dataclass(frozen=True)
class SimilaritySolution:
    """Explicit solution of a melting problem in similarity variables.

    Attributes:
        material, boundary, source: The problem definition.
        dimensionless: Its dimensionless groups.
        lam: Front coefficient; s(t) = 2 a lam sqrt(t).
        y_prime0: Fixed-face slope y'(0) (negative).
        equation: Reduced equation whose root lam is.
        psi: Exact integrated profile.
    """

    material: Material
    boundary: BoundaryData
    source: SourceSpec
    dimensionless: Dimensionless
    lam: float
    y_prime0: float
    equation: LambdaEquation
    psi: PsiProfile
    _table: _BarycentricTable

    def lambda_residual(self) -> float:
        """Signed defect of lam in its reduced equation."""
        return self.equation.evaluate(self.lam) - self.equation.target

    def y_many(self, etas, exact: bool = False, clamp: bool = True) -> np.ndarray:
        """Profile y at an array of similarity coordinates in [0, lam].

        The default path interpolates the cached Chebyshev table of Psi and
        inverts pointwise, which is what bulk reconstruction wants.
        exact=True reevaluates Psi from its defining integrals instead;
        verification paths use it so table error never enters a check.
        """
        arr = np.asarray(etas, dtype=float)
        flat = arr.ravel()
        if exact:
            w = self.psi.evaluate_many(flat)
        else:
            slack = 1e-9 * max(1.0, self.lam)
            if np.any(flat < -slack) or np.any(flat > self.lam + slack):
                raise InvalidInput(
                    f"profile query outside [0, {self.lam!r}] beyond the rounding slack"
                )
            w = self._table.evaluate_many(np.clip(flat, 0.0, self.lam))
        return _phi_inverse_many(self.psi.delta, self.psi.p, w, clamp).reshape(arr.shape)

    def y(self, eta: float, exact: bool = False) -> float:
        """Profile y at a single similarity coordinate."""
        return float(self.y_many(np.array([eta]), exact=exact)[0])


def solve_problem(
    material: Material,
    boundary: BoundaryData,
    source: SourceSpec,
    tol: Tolerance = DEFAULT_TOL,
    table_nodes: int = PROFILE_TABLE_NODES,
) -> SimilaritySolution:
    """Solve a melting problem in similarity form.

    Args:
        material: Liquid-phase constants.
        boundary: Fixed-face and phase-change temperatures.
        source: One of the four source models.
        tol: Root tolerance for the front coefficient.
        table_nodes: Chebyshev node count of the cached profile table.

    Returns:
        The assembled SimilaritySolution.

    Raises:
        InvalidInput: Malformed problem data.
        BracketExpansionFailed / NotBracketed / NonConvergence: Front
            coefficient could not be bracketed or resolved.
    """
    if table_nodes < 8:
        raise InvalidInput(f"table_nodes must be >= 8, got {table_nodes}")
    groups = dimensionless_groups(material, boundary, source)
    ste, delta, p = groups.ste, material.delta, material.p
    if isinstance(source, NoSource):
        eq = lambda_equation_nosource(ste, delta, p)
    elif isinstance(source, ExponentialSource):
        eq = lambda_equation_exponential(ste, delta, p)
    elif isinstance(source, SimilaritySource):
        eq = lambda_equation_source1(ste, delta, p, source.beta)
    elif isinstance(source, FluxFeedbackSource):
        eq = lambda_equation_source2(ste, delta, p, groups.feedback)
    else:
        raise InvalidInput(f"unknown source spec {source!r}")
    lam = solve_lambda(eq, tol)
    if isinstance(source, NoSource):
        psi = _psi_nosource(lam, ste, delta, p)
        yp0 = y_prime_at_zero(lam, ste, delta)
    elif isinstance(source, ExponentialSource):
        psi = _psi_exponential(lam, ste, delta, p)
        yp0 = -(2.0 / (ste * (1.0 + delta))) * lam * (math.exp(lam * lam) + 1.0)
    elif isinstance(source, SimilaritySource):
        psi = _psi_source1(lam, ste, delta, p, source.beta)
        yp0 = y_prime_at_zero(lam, ste, delta, beta=source.beta)
    else:
        psi = _psi_source2(lam, ste, delta, p, groups.feedback)
        yp0 = y_prime_at_zero(lam, ste, delta, feedback=groups.feedback)
    table = _BarycentricTable.build(psi, table_nodes)
    return SimilaritySolution(
        material=material,
        boundary=boundary,
        source=source,
        dimensionless=groups,
        lam=lam,
        y_prime0=yp0,
        equation=eq,
        psi=psi,
        _table=table,
    )


def solve_exponential_case(
    ste: float, delta: float, p: float, tol: Tolerance = DEFAULT_TOL
) -> tuple[float, Callable]:
    """Closed-form solve of the exponential-source case at the dimensionless level.

    Returns:
        (lam, y) where y maps similarity coordinates (scalar or array) in
        [0, lam] to profile values through the closed-form Psi.
    """
    _check_groups(ste, delta, p)
    lam = solve_lambda(lambda_equation_exponential(ste, delta, p), tol)
    psi = _psi_exponential(lam, ste, delta, p)

    def y(eta):
        out = y_from_psi(psi, np.atleast_1d(np.asarray(eta, dtype=float)))
        return float(out[0]) if np.isscalar(eta) else out.reshape(np.shape(eta))

    return lam, y
