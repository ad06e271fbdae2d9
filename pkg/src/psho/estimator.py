"""Assemble the filtered-state energy from measured moments.

The squared norm and energy numerator of ``sin^n(H tau)|phi0>`` expand
binomially over the moments:

    B_n = sum_{k=0}^{n-1} (-1)^k 2 C(2n,k) c_{n-k}  +  (-1)^n C(2n,n)
    A_n = sum_{k=0}^{n-1} (-1)^k 2 C(2n,k) h_{n-k}  +  (-1)^n C(2n,n) h_0

with E_n = A_n / B_n, and <phi_n|phi_n> = (-1/4)^n B_n, hence
Q_n = -B_n / (4 B_{n-1}) and the inverse-filter energy
E'_n = sign * arcsin(sqrt(Q_n)) / tau.

The alternating sums cancel catastrophically: individual products reach
~2^{2n} while the result is O(4^n * max sin^{2n}).  Binomials are exact
integers and the accumulation runs in arbitrary-precision floats with a
significand of at least 2n + 128 bits, so the only uncertainty left is
the measurement error in the moments themselves.  That error is
amplified by at most ``|delta_max| * (4^n - C(2n,n))``, which is
reported alongside every estimate and drives the noise-dominance
diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .sigma import MomentTable

QN_RANGE_TOL = 1e-9


def binomial(n: int, k: int) -> int:
    """Exact C(n, k) as an arbitrary-precision integer."""
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got ({n}, {k})")
    return math.comb(n, k)


def required_precision(n: int) -> int:
    """Significand bits needed to assemble power ``n`` losslessly."""
    return max(256, 2 * n + 128)


def assemble_ab(
    table: MomentTable, n: int, width: int | None = None
) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(A_n, B_n) accumulated in extended precision.

    ``width`` defaults to ``required_precision(n)``; passing a narrower
    width is rejected rather than silently losing the cancellation.
    """
    if n < 0:
        raise ValueError("power must be nonnegative")
    if table.max_m < n:
        raise ValueError(
            f"moment table depth {table.max_m} insufficient for power {n}"
        )
    needed = required_precision(n)
    if width is None:
        width = needed
    elif width < needed:
        raise ValueError(
            f"significand width {width} < required {needed} for power {n}"
        )
    with mpmath.workprec(width):
        a_n = mpmath.mpf(0)
        b_n = mpmath.mpf(0)
        for k in range(n):
            coeff = 2 * binomial(2 * n, k)
            if k & 1:
                coeff = -coeff
            b_n += coeff * mpmath.mpf(float(table.c[n - k]))
            a_n += coeff * mpmath.mpf(float(table.h[n - k]))
        center = binomial(2 * n, n) if n % 2 == 0 else -binomial(2 * n, n)
        b_n += center
        a_n += center * mpmath.mpf(float(table.h[0]))
        return +a_n, +b_n


def energy_of_power(table: MomentTable, n: int, width: int | None = None) -> float:
    """E_n = A_n / B_n rounded to double precision.

    A vanishing B_n (tau at a sine node, or noise that destroyed the
    information term) is an error, never a silent skip.
    """
    a_n, b_n = assemble_ab(table, n, width)
    if b_n == 0:
        raise ValueError(f"B_{n} vanished; tau at a sine node or noise-dominated")
    with mpmath.workprec(width or required_precision(n)):
        return float(a_n / b_n)


def qn_of_power(table: MomentTable, n: int, width: int | None = None) -> float:
    """Norm ratio Q_n = <phi_n|phi_n>/<phi_{n-1}|phi_{n-1}> = -B_n/(4 B_{n-1}).

    Values outside [0, 1] beyond tolerance signal the noise-dominated
    regime; they are returned as-is for the caller to flag.
    """
    if n < 1:
        raise ValueError("Q_n needs n >= 1")
    _, b_n = assemble_ab(table, n, width)
    _, b_prev = assemble_ab(table, n - 1, width)
    if b_prev == 0:
        raise ValueError(f"B_{n-1} vanished; Q_{n} undefined")
    with mpmath.workprec(width or required_precision(n)):
        return float(-b_n / (4 * b_prev))


def energy_from_qn(q: float, tau: float, sign: int) -> float:
    """Invert Q = sin^2(E tau) on the principal branch: sign*arcsin(sqrt(q))/tau.

    Valid when |E tau| <= pi/2.  q may stray outside [0, 1] by at most
    1e-9 (clamped); farther out is an error.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    if q < -QN_RANGE_TOL or q > 1.0 + QN_RANGE_TOL:
        raise ValueError(f"Q = {q} outside [0, 1] beyond tolerance")
    q = min(1.0, max(0.0, q))
    return sign * math.asin(math.sqrt(q)) / tau


def error_amplification_bound(n: int, delta_max: float) -> float:
    """Worst-case noise amplification ``|delta_max| * (2^{2n} - C(2n,n))``.

    Evaluated exactly in integers; the double conversion may overflow to
    inf for huge n, which is the honest answer there.
    """
    if delta_max < 0:
        raise ValueError("delta_max must be nonnegative")
    if n < 0:
        raise ValueError("power must be nonnegative")
    amplification = (1 << (2 * n)) - binomial(2 * n, n)
    return float(mpmath.mpf(delta_max) * amplification)


@dataclass
class PshoEstimate:
    """One power's worth of outputs plus diagnostics."""

    n: int
    e_n: float  # A_n / B_n
    q_n: float  # norm ratio
    e_prime_n: float  # arcsin route
    a_n: mpmath.mpf
    b_n: mpmath.mpf
    error_bound: float
    b_vanished: bool = False
    qn_out_of_range: bool = False
    noise_dominated: bool = False

    @property
    def flags(self) -> list[str]:
        out = []
        if self.b_vanished:
            out.append("b-vanished")
        if self.qn_out_of_range:
            out.append("qn-out-of-range")
        if self.noise_dominated:
            out.append("noise-dominated")
        return out


def estimate_series(
    table: MomentTable,
    powers,
    sign_default: int = -1,
    delta_max: float | None = None,
) -> list[PshoEstimate]:
    """Run both estimators for each requested power.

    The arcsin branch sign is taken from the concurrently computed
    E_n when available, else from ``sign_default``.  ``delta_max``
    defaults to the table's own noise scale; the noise-dominated flag
    fires once the amplification bound reaches the measured |B_n|, i.e.
    once the alternating sum may be pure noise.  Out-of-range Q_n is
    reported, never clamped into a fake energy.
    """
    if delta_max is None:
        delta_max = table.noise.delta_max()
    estimates = []
    prev_b: mpmath.mpf | None = None
    prev_n: int | None = None
    for n in sorted(powers):
        if n < 1:
            raise ValueError("powers must be >= 1")
        width = required_precision(n)
        a_n, b_n = assemble_ab(table, n, width)
        bound = error_amplification_bound(n, delta_max)
        est = PshoEstimate(
            n=n,
            e_n=math.nan,
            q_n=math.nan,
            e_prime_n=math.nan,
            a_n=a_n,
            b_n=b_n,
            error_bound=bound,
        )
        if b_n == 0:
            est.b_vanished = True
        else:
            with mpmath.workprec(width):
                est.e_n = float(a_n / b_n)
        if delta_max > 0 and abs(b_n) <= mpmath.mpf(delta_max) * (
            (1 << (2 * n)) - binomial(2 * n, n)
        ):
            est.noise_dominated = True

        if prev_n == n - 1 and prev_b is not None and prev_b != 0:
            with mpmath.workprec(width):
                est.q_n = float(-b_n / (4 * prev_b))
        else:
            _, b_prev = assemble_ab(table, n - 1, required_precision(n - 1))
            if b_prev != 0:
                with mpmath.workprec(width):
                    est.q_n = float(-b_n / (4 * b_prev))
        if not math.isnan(est.q_n):
            if est.q_n < -QN_RANGE_TOL or est.q_n > 1.0 + QN_RANGE_TOL:
                est.qn_out_of_range = True
            else:
                sign = sign_default
                if not math.isnan(est.e_n) and est.e_n != 0:
                    sign = -1 if est.e_n < 0 else 1
                est.e_prime_n = energy_from_qn(est.q_n, table.tau, sign)
        estimates.append(est)
        prev_b, prev_n = b_n, n
    return estimates


def estimates_to_csv(estimates: list[PshoEstimate]) -> str:
    lines = ["n,E_n,Q_n,E_prime_n,error_bound"]
    for est in estimates:
        lines.append(
            f"{est.n},{est.e_n!r},{est.q_n!r},{est.e_prime_n!r},{est.error_bound!r}"
        )
    return "\n".join(lines) + "\n"
