"""Left-edge large deviations for the Laguerre unitary ensemble.

The smallest eigenvalue of the LUE with rectangular parameter alpha sits at
the hard-won Marchenko-Pastur edge lambda_- = (sqrt(alpha+1) - 1)^2.  Pushing
it to t > lambda_- costs a rate Phi(t) N^2; the subleading constant Psi(t)
rides along.  Both come from the planar-gas free energy through the change of
variables (a, c) = (sqrt(t/alpha), 1/alpha): conditioning the smallest
eigenvalue above t is the radial slice of conditioning a planar charge at
radius a, and t > lambda_- lands exactly in the simply connected droplet
phase.  An independent route to the same leading order is the constrained
Coulomb gas action S(t) built from the conditioned spectral density on
[t, U(t)]; Phi(t) = S(t) - S(lambda_-) is checked numerically, never assumed.

Pulled to t < lambda_- the probability is 1 - o(1); the exact finite-n column
reports log P = 0 for t <= 0, where the gap event is almost sure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp

from .errors import DomainError
from .exactfiniten import lue_gap_probability
from .freeenergy import ZETA_PRIME_MINUS_ONE, energy_post, energy_pre, fconst
from .geometry import Regime

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


@dataclass(frozen=True)
class LUEParams:
    """Rectangular parameter and the spectral edges it induces."""

    alpha: float
    lambda_minus: float
    lambda_plus: float

    @classmethod
    def from_alpha(cls, alpha: float) -> "LUEParams":
        if alpha < 0.0:
            raise DomainError(f"alpha must be nonnegative, got {alpha}")
        root = math.sqrt(alpha + 1.0)
        return cls(alpha=alpha, lambda_minus=(root - 1.0) ** 2,
                   lambda_plus=(root + 1.0) ** 2)


def mp_density(params: LUEParams, x: float) -> float:
    """Equilibrium density (1/2pi) sqrt((l+ - x)(x - l-))/x; zero off-support."""
    if x <= 0.0 or x <= params.lambda_minus or x >= params.lambda_plus:
        return 0.0
    return math.sqrt((params.lambda_plus - x) * (x - params.lambda_minus)) / (
        2.0 * math.pi * x)


def mp_total_mass(params: LUEParams, nodes: int = 96) -> float:
    """Integral of mp_density via x = l- + (l+ - l-) sin^2(phi).

    The substitution absorbs both inverse-square-root edges; the remaining
    integrand is analytic in phi, so fixed Gauss-Legendre converges fast.
    """
    lo, hi = params.lambda_minus, params.lambda_plus
    width = hi - lo
    phi_nodes = 0.25 * math.pi * (_GL_NODES + 1.0)
    sin2 = np.sin(phi_nodes) ** 2
    x = lo + width * sin2
    integrand = (width ** 2 / math.pi) * sin2 * np.cos(phi_nodes) ** 2 / x
    return float(0.25 * math.pi * _GL_WEIGHTS @ integrand)


def _planar_args(t: float, alpha: float) -> tuple[float, float]:
    # radial slice: insertion radius a = sqrt(t/alpha), inverse charge c = 1/alpha
    if alpha <= 0.0:
        raise DomainError(f"rate functions need alpha > 0, got {alpha}")
    lam_minus = LUEParams.from_alpha(alpha).lambda_minus
    if t <= lam_minus:
        raise DomainError(
            f"pushed regime needs t > lambda_- = {lam_minus}, got t = {t}")
    return math.sqrt(t / alpha), 1.0 / alpha


def phi(t: float, alpha: float) -> float:
    """Rate of the pushed gap event: alpha^2 times the planar energy excess."""
    a, c = _planar_args(t, alpha)
    return alpha * alpha * (energy_pre(a, c) - energy_post(a, c))


def psi(t: float, alpha: float) -> float:
    """Constant-order correction: the planar free-energy constant across phases."""
    a, c = _planar_args(t, alpha)
    return fconst(a, c, Regime.PRE) - fconst(a, c, Regime.POST)


def kc_theta(t: float, alpha: float) -> float:
    """Auxiliary angle of the constrained-gas cubic."""
    if alpha <= 0.0:
        raise DomainError(f"constrained action needs alpha > 0, got {alpha}")
    if t <= 0.0:
        raise DomainError(f"constrained action needs t > 0, got {t}")
    shifted = t + 2.0 * (alpha + 2.0)
    radicand = (shifted ** 3 - 27.0 * alpha * alpha * t) / (27.0 * alpha * alpha * t)
    if radicand < 0.0:
        raise DomainError(f"angle radicand negative at t = {t}, alpha = {alpha}")
    return math.atan(math.sqrt(radicand))


def kc_U(t: float, alpha: float) -> float:
    """Right edge of the spectral density conditioned on the gap (t, infinity)."""
    theta = kc_theta(t, alpha)
    shifted = t + 2.0 * (alpha + 2.0)
    return (4.0 / 3.0) * shifted * math.cos((theta + 2.0 * math.pi) / 3.0) ** 2


def kc_action(t: float, alpha: float) -> float:
    """Constrained Coulomb gas action S(t); Phi(t) = S(t) - S(lambda_-)."""
    u = kc_U(t, alpha)
    sqrt_u, sqrt_t = math.sqrt(u), math.sqrt(t)
    return ((u + t) / 2.0 - (u - t) ** 2 / 32.0
            + (alpha / 4.0) * (sqrt_u - sqrt_t) ** 2
            - math.log((u - t) / 4.0)
            + (alpha * alpha / 4.0) * math.log(t * u)
            - alpha * (alpha + 2.0) * math.log((sqrt_u + sqrt_t) / 2.0))


def constrained_support(t: float, alpha: float) -> tuple[float, float]:
    """Support [t, U(t)] of the density conditioned on the gap."""
    lam_minus = LUEParams.from_alpha(alpha).lambda_minus
    if t <= lam_minus:
        raise DomainError(
            f"constrained support needs t > lambda_- = {lam_minus}, got t = {t}")
    return t, kc_U(t, alpha)


def constrained_density(t: float, alpha: float, x: float) -> float:
    """Spectral density on [t, U(t)] conditioned on the gap event."""
    lo, hi = constrained_support(t, alpha)
    if not lo < x < hi:
        raise DomainError(f"x = {x} outside the constrained support ({lo}, {hi})")
    return (math.sqrt(hi - x) / (2.0 * math.pi * math.sqrt(x - lo))
            * (x - alpha * math.sqrt(t / hi)) / x)


def constrained_mass(t: float, alpha: float, nodes: int = 96) -> float:
    """Integral of constrained_density via x = t + (U - t) sin^2(phi)."""
    lo, hi = constrained_support(t, alpha)
    width = hi - lo
    phi_nodes = 0.25 * math.pi * (_GL_NODES + 1.0)
    x = lo + width * np.sin(phi_nodes) ** 2
    integrand = (width / math.pi) * np.cos(phi_nodes) ** 2 * (
        x - alpha * math.sqrt(t / hi)) / x
    return float(0.25 * math.pi * _GL_WEIGHTS @ integrand)


def phi_large_t(t: float, alpha: float) -> float:
    """Far-field asymptote t - alpha log t of the rate function."""
    return t - alpha * math.log(t)


def ldp_log_probability(n: int, alpha: float, t: float,
                        with_constant: bool = True) -> float:
    """log P[smallest eigenvalue > t] through constant order at size n.

    with_constant=False keeps only the leading -Phi n^2, the constrained
    Coulomb gas order.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    value = -phi(t, alpha) * n * n
    if with_constant:
        value += -math.log(alpha * n) / 12.0 + ZETA_PRIME_MINUS_ONE + psi(t, alpha)
    return value


def exact_log_gap_probability(n: int, alpha: float, t: float,
                              precision_bits: int = 256) -> float:
    """Finite-n log P[smallest eigenvalue > t], exact up to final rounding.

    Needs alpha*n to be an integer (the weight exponent counts zero modes).
    For t <= 0 the gap event is almost sure, so log P = 0 exactly.
    """
    if t <= 0.0:
        return 0.0
    alpha_n = alpha * n
    nearest = round(alpha_n)
    if abs(alpha_n - nearest) > 1e-9:
        raise DomainError(
            f"exact comparison needs integer alpha*n, got {alpha_n}")
    prob = lue_gap_probability(n, int(nearest), Fraction(t), n,
                               precision_bits=precision_bits)
    return float(mp.log(prob))
