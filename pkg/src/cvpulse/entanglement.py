"""Separability witnesses and entanglement measures for two-mode Gaussian states.

All quantities are evaluated directly on 4x4 covariance matrices in the
(X_A, P_A, X_B, P_B) ordering of :mod:`cvpulse.gaussian`, in shot-noise units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    Matrix,
    SourceSpec,
    apply_transform,
    loss_channel,
    phase_rotation,
    physicality_check,
    source_covariance,
)

#: A sum variance below this value certifies nonseparability.
SEPARABILITY_THRESHOLD = 2.0

#: Conditional-variance product below this value certifies EPR correlations.
EPR_THRESHOLD = 1.0

_SYMMETRIC_FORM_TOL = 1e-9


def _require_two_mode(gamma: Matrix) -> Matrix:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-mode covariance, got shape {gamma.shape}")
    return gamma


def duan_simon(gamma: Matrix) -> float:
    """Sum variance [var(X_A - X_B) + var(P_A + P_B)] / 2 of a two-mode state.

    Values below :data:`SEPARABILITY_THRESHOLD` witness nonseparability for
    states with X-correlated / P-anticorrelated structure.
    """
    g = _require_two_mode(gamma)
    var_x_diff = g[0, 0] + g[2, 2] - 2.0 * g[0, 2]
    var_p_sum = g[1, 1] + g[3, 3] + 2.0 * g[1, 3]
    return float(0.5 * (var_x_diff + var_p_sum))


def reid_epr_product(gamma: Matrix) -> float:
    """Product of conditional variances var(X_B | X_A) * var(P_B | P_A).

    Each factor is the residual variance of the best linear inference of one
    beam's quadrature from the other's.  A product below
    :data:`EPR_THRESHOLD` demonstrates EPR-type correlations.
    """
    g = _require_two_mode(gamma)
    if g[0, 0] <= _SYMMETRIC_FORM_TOL or g[1, 1] <= _SYMMETRIC_FORM_TOL:
        raise ValueError("conditioning quadrature has (near-)singular variance")
    cond_x = g[2, 2] - g[0, 2] ** 2 / g[0, 0]
    cond_p = g[3, 3] - g[1, 3] ** 2 / g[1, 1]
    return float(cond_x * cond_p)


@dataclass(frozen=True)
class WitnessResult:
    """Joint verdict of both separability witnesses on one state."""

    duan_simon: float
    nonseparable: bool
    reid_product: float
    reid_satisfied: bool


def evaluate_witnesses(gamma: Matrix) -> WitnessResult:
    """Evaluate both witnesses and their threshold verdicts."""
    ds = duan_simon(gamma)
    reid = reid_epr_product(gamma)
    return WitnessResult(
        duan_simon=ds,
        nonseparable=ds < SEPARABILITY_THRESHOLD,
        reid_product=reid,
        reid_satisfied=reid < EPR_THRESHOLD,
    )


def formation_entropy(x: float) -> float:
    """Entropy of formation, in ebits, of a symmetric state with squeezed variance ``x``.

    The argument is the geometric mean of the two sum/difference variances;
    x >= 1 means no certified entanglement and returns 0.
    """
    if x <= 0.0:
        raise ValueError(f"variance argument must be positive, got {x}")
    if x >= 1.0:
        return 0.0
    c_plus = (x**-0.5 + x**0.5) ** 2 / 4.0
    c_minus = (x**-0.5 - x**0.5) ** 2 / 4.0
    low = c_minus * math.log2(c_minus) if c_minus > 0.0 else 0.0
    return c_plus * math.log2(c_plus) - low


@dataclass(frozen=True)
class EntanglementMeasure:
    """Entropy of formation together with the variance argument it was evaluated at."""

    ebits: float
    argument: float


def _symmetric_form_params(gamma: Matrix) -> tuple[float, float, float]:
    """Extract (v, k_x, k_p) from a symmetric-form covariance, or raise."""
    g = _require_two_mode(gamma)
    if np.max(np.abs(g - g.T)) > _SYMMETRIC_FORM_TOL:
        raise ValueError("covariance matrix is not symmetric")
    diag = np.diag(g)
    zeros = [g[0, 1], g[0, 3], g[1, 2], g[2, 3]]
    if np.max(np.abs(diag - diag.mean())) > _SYMMETRIC_FORM_TOL or np.max(
        np.abs(zeros)
    ) > _SYMMETRIC_FORM_TOL:
        raise ValueError(
            "state is not in symmetric form (equal diagonal, correlations only "
            "between like quadratures)"
        )
    return float(diag.mean()), float(g[0, 2]), float(-g[1, 3])


def entropy_of_formation(gamma: Matrix) -> EntanglementMeasure:
    """Entropy of formation of a symmetric two-mode Gaussian state.

    Parameters
    ----------
    gamma : Matrix
        Physical covariance in symmetric form: equal diagonal variances,
        X quadratures correlated, P quadratures anticorrelated, no
        cross-quadrature terms.

    Returns
    -------
    EntanglementMeasure
        Ebits of formation and the variance argument; the measure is zero
        when the argument reaches 1 (separable boundary).
    """
    v, k_x, k_p = _symmetric_form_params(gamma)
    verdict = physicality_check(gamma)
    if not verdict.passed:
        raise ValueError(
            f"unphysical covariance (min eigenvalue {verdict.min_eigenvalue:.3e})"
        )
    x = math.sqrt((v - k_x) * (v - k_p))
    if x >= 1.0:
        return EntanglementMeasure(ebits=0.0, argument=x)
    return EntanglementMeasure(ebits=formation_entropy(x), argument=x)


def entropy_from_duan_simon(sum_variance: float) -> float:
    """Entropy of formation implied by a measured sum variance, for symmetric states.

    For states in symmetric form with equal X and P correlations the witness
    and the measure carry the same information: the variance argument is half
    the sum variance.
    """
    if sum_variance <= 0.0:
        raise ValueError(f"sum variance must be positive, got {sum_variance}")
    return formation_entropy(sum_variance / 2.0)


def variance_to_db(variance: float) -> float:
    """Express a variance in dB relative to the shot-noise level."""
    if variance <= 0.0:
        raise ValueError(f"variance must be positive, got {variance}")
    return 10.0 * math.log10(variance)


def random_symmetric_state(
    rng: np.random.Generator,
    r_max: float = 1.5,
    eta_range: tuple[float, float] = (0.3, 1.0),
) -> Matrix:
    """Draw a random physical two-mode covariance in symmetric form.

    A pure two-mode squeezed state is dressed with equal-and-opposite phase
    rotations of the two modes (which preserve both the state and the
    symmetric form) and then degraded by a common loss channel.  Physicality
    holds by construction.
    """
    r = rng.uniform(0.0, r_max)
    alpha = rng.uniform(0.0, 2.0 * math.pi)
    eta = rng.uniform(*eta_range)
    gamma = source_covariance(SourceSpec.pure_nopa(r))
    opposite = phase_rotation(alpha, 0) @ phase_rotation(-alpha, 1)
    gamma = apply_transform(opposite, gamma)
    return loss_channel(gamma, eta)
