"""Exact lambda(alpha) = E m^alpha, its derivative and the Cramer root."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import minimize_scalar, root_scalar

from .const import _LOGGER, KAPPA_BRACKET_MAX, KAPPA_TOL, LATTICE_TOL
from .data import CramerReport
from .exceptions import DomainError, NoCramerRootError, NotSubcriticalError

if TYPE_CHECKING:
    from .env_model import EnvironmentModel

_MAX_LATTICE_DENOMINATOR = 1000


def _check_alpha(alpha: float) -> None:
    if not (alpha >= 0.0 and math.isfinite(alpha)):
        msg = f"alpha must be finite and nonnegative: {alpha!r}"
        raise DomainError(msg)


def cramer_lambda(model: EnvironmentModel, alpha: float) -> float:
    """
    Return lambda(alpha) = sum_i p_i m_i^alpha.

    0^0 is taken as 1, so lambda(0) = 1 for every model.
    """
    _check_alpha(alpha)
    return float(np.dot(model.probs_array, np.power(model.means, alpha)))


def lambda_prime(model: EnvironmentModel, alpha: float) -> float:
    """Return lambda'(alpha) = sum_i p_i m_i^alpha ln m_i (natural log)."""
    _check_alpha(alpha)
    means = model.means
    positive = means > 0.0
    if alpha == 0.0 and not positive.all():
        msg = "lambda'(0) is -inf for a model with m = 0 atoms"
        raise DomainError(msg)
    terms = np.zeros_like(means)
    terms[positive] = np.power(means[positive], alpha) * np.log(means[positive])
    return float(np.dot(model.probs_array, terms))


def mean_log_m(model: EnvironmentModel) -> float:
    """E log m(xi); -inf when an atom with m = 0 has positive probability."""
    live = model.probs_array > 0.0
    means = model.means[live]
    if (means <= 0.0).any():
        return -math.inf
    return float(np.dot(model.probs_array[live], np.log(means)))


def min_lambda(model: EnvironmentModel, upper: float) -> tuple[float, float]:
    """
    Minimize lambda over (0, upper].

    :return: (alpha_star, lambda(alpha_star))
    """
    if upper <= 0.0:
        msg = f"upper end must be positive: {upper!r}"
        raise DomainError(msg)
    res = minimize_scalar(
        lambda a: cramer_lambda(model, a),
        bounds=(min(KAPPA_TOL, upper / 2), upper),
        method="bounded",
        options={"xatol": 1e-10},
    )
    alpha_star, value = float(res.x), float(res.fun)
    # bounded search never lands exactly on the endpoint
    at_upper = cramer_lambda(model, upper)
    if at_upper <= value:
        alpha_star, value = upper, at_upper
    return alpha_star, value


def lattice_span(model: EnvironmentModel, tol: float = LATTICE_TOL) -> float | None:
    """
    Span h when every log m_i lies on hZ, else None.

    Ratios of the log-means to the smallest one are matched against
    fractions with small denominators; atoms with m = 0 are ignored.
    """
    means = model.means
    logs = np.log(means[means > 0.0])
    nonzero = logs[np.abs(logs) > tol]
    if nonzero.size == 0:
        return None
    ref = float(np.min(np.abs(nonzero)))
    fracs = []
    for x in nonzero:
        ratio = float(x) / ref
        frac = Fraction(ratio).limit_denominator(_MAX_LATTICE_DENOMINATOR)
        if abs(ratio - float(frac)) > tol * max(1.0, abs(ratio)):
            return None
        fracs.append(frac)
    denom = math.lcm(*(f.denominator for f in fracs))
    numerators = [int(f * denom) for f in fracs]
    return ref * math.gcd(*numerators) / denom


def solve_kappa(model: EnvironmentModel, tol: float = KAPPA_TOL) -> CramerReport:
    """
    Find the Cramer root kappa > 0 of lambda(kappa) = 1.

    log lambda is convex with value 0 and negative slope at 0, so it has at
    most one positive root. The root is bracketed by doubling from 1 and
    then located by Brent's method on log lambda.

    :raises NotSubcriticalError: if E log m >= 0
    :raises NoCramerRootError: if every m_i <= 1 or the root exceeds the
        bracket limit
    """
    mlm = mean_log_m(model)
    if mlm >= 0.0:
        msg = f"E log m = {mlm!r} is not negative; the chain is not subcritical"
        raise NotSubcriticalError(msg)
    if float(model.means.max()) <= 1.0:
        msg = "every atom has m <= 1, so lambda(alpha) < 1 for all alpha > 0"
        raise NoCramerRootError(msg)

    def log_lambda(alpha: float) -> float:
        return math.log(cramer_lambda(model, alpha))

    def log_lambda_prime(alpha: float) -> float:
        return lambda_prime(model, alpha) / cramer_lambda(model, alpha)

    lo, hi = tol, 1.0
    while log_lambda(hi) < 0.0:
        lo, hi = hi, hi * 2.0
        if hi > KAPPA_BRACKET_MAX:
            msg = f"no Cramer root in (0, {KAPPA_BRACKET_MAX:g}]"
            raise NoCramerRootError(msg)
    if log_lambda(hi) == 0.0:
        kappa = hi
    else:
        sol = root_scalar(log_lambda, bracket=(lo, hi), method="brentq", xtol=1e-15)
        kappa = float(sol.root)
        # one Newton polish step on the convex function
        step = log_lambda(kappa) / log_lambda_prime(kappa)
        if lo < kappa - step < hi:
            kappa -= step
    if abs(cramer_lambda(model, kappa) - 1.0) > tol:
        msg = f"root finder stalled at kappa={kappa!r}"
        raise NoCramerRootError(msg)

    span = lattice_span(model)
    report = CramerReport(
        kappa=kappa,
        lambda_prime_at_kappa=lambda_prime(model, kappa),
        mean_log_m=mlm,
        subcritical=True,
        nonarithmetic_hint=span is None,
        lattice_span=span,
    )
    _LOGGER.debug("solve_kappa: %s", report)
    if span is not None:
        _LOGGER.info(
            "log m is arithmetic with span %.6g; tail constants are period averages",
            span,
        )
    return report


def moment_condition_check(model: EnvironmentModel, alpha: float) -> bool:
    """
    True iff lambda(alpha) < 1 and the alpha-moments of A and B are finite.

    Every law variant has moments of all orders, so only lambda is checked.
    """
    if alpha <= 0.0:
        return False
    return cramer_lambda(model, alpha) < 1.0
