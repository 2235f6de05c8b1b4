"""Chebyshev-T expansion and truncation of the power function x^k.

The expansion used throughout is

    x^k = 2^(1-k) * sum_{j=0}^{floor(k/2)} a_j C(k, j) T_{k-2j}(x),

with a_j = 1/2 when k is even and j = k/2, else a_j = 1. All coefficients
are nonnegative and sum to 1, so every truncation is bounded by 1 on
[-1, 1] -- the admissibility condition required by the eigenvalue
transform in :mod:`powertrace.qsvt`. Dropping the modes above m leaves a
tail bounded by the binomial Chernoff estimate 2*exp(-m^2 / (2k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

# binomial terms below this are dropped as exact zeros (log-space underflow)
COEFF_FLOOR = 1e-300

MAX_POWER = 1024


@dataclass(frozen=True)
class ChebyshevPoly:
    """Sparse polynomial in the Chebyshev-T basis.

    ``coeffs`` maps basis index n >= 0 to the real coefficient of T_n.
    ``parity`` is "even", "odd", or "none"; an even/odd tag asserts that
    every odd/even-index coefficient is exactly zero.
    """

    coeffs: dict[int, float]
    parity: str = "none"

    def __post_init__(self):
        if self.parity not in ("even", "odd", "none"):
            raise ValidationError(f"unknown parity tag {self.parity!r}")
        clean = {}
        for n, c in self.coeffs.items():
            n = int(n)
            if n < 0:
                raise ValidationError(f"negative basis index {n}")
            c = float(c)
            if not math.isfinite(c):
                raise ValidationError(f"non-finite coefficient at index {n}")
            if c != 0.0:
                clean[n] = c
        if self.parity == "even" and any(n % 2 for n in clean):
            raise ValidationError("parity=even but an odd-index coefficient is set")
        if self.parity == "odd" and any(n % 2 == 0 for n in clean):
            raise ValidationError("parity=odd but an even-index coefficient is set")
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        """Largest index with a nonzero coefficient (-1 for the zero poly)."""
        return max(self.coeffs) if self.coeffs else -1

    def coefficient_sum(self) -> float:
        return float(sum(self.coeffs.values()))

    def abs_coefficient_sum(self) -> float:
        return float(sum(abs(c) for c in self.coeffs.values()))

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "coeffs": {str(n): float(c) for n, c in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChebyshevPoly":
        return cls(
            coeffs={int(n): float(c) for n, c in obj["coeffs"].items()},
            parity=obj["parity"],
        )


@dataclass(frozen=True)
class TruncationReport:
    """Result of truncating an expansion at maximum index m.

    ``tail_exact`` is the sum of the dropped (nonnegative) coefficients and
    bounds the sup-norm truncation error exactly; ``tail_chernoff`` is the
    closed-form bound 2*exp(-m^2/(2k)) when the source power k is known
    (NaN otherwise).
    """

    kept: ChebyshevPoly
    tail_exact: float
    tail_chernoff: float
    degree: int


def power_expansion(k: int) -> ChebyshevPoly:
    """Chebyshev-T expansion of x^k on [-1, 1].

    Each coefficient is the exact integer ratio a_j C(k, j) / 2^(k-1)
    evaluated with arbitrary-precision integers, so nothing overflows for
    k up to 1024 and dyadic values (such as the 1/2's at k = 2) come out
    exact; terms below 1e-300 are dropped as exact zeros.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"power must be a positive integer, got {k!r}")
    if k > MAX_POWER:
        raise ValidationError(f"power {k} exceeds supported maximum {MAX_POWER}")
    k = int(k)
    coeffs: dict[int, float] = {}
    for j in range(k // 2 + 1):
        n = k - 2 * j
        numerator = math.comb(k, j)
        shift = k - 1
        if k % 2 == 0 and j == k // 2:
            shift = k  # the central mode carries an extra factor 1/2
        c = numerator / (1 << shift)
        if c < COEFF_FLOOR:
            continue
        coeffs[n] = c
    return ChebyshevPoly(coeffs=coeffs, parity="odd" if k % 2 else "even")


def required_degree(k: int, eps: float) -> int:
    """Truncation degree for approximating x^k to sup error eps.

    Smallest integer at least sqrt(2 k ln(2/eps)) sharing the parity of k,
    from inverting the Chernoff tail bound 2*exp(-m^2/(2k)) <= eps. The
    parity round-up keeps the truncated polynomial admissible for the
    eigenvalue transform even when it adds one degree.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"power must be a positive integer, got {k!r}")
    if not 0.0 < eps <= 1.0:
        raise ValidationError(f"eps must lie in (0, 1], got {eps!r}")
    value = math.sqrt(2.0 * k * math.log(2.0 / eps))
    m = math.ceil(value)
    if m % 2 != k % 2:
        m += 1
    return m


def truncate(expansion: ChebyshevPoly, m: int, k: int | None = None) -> TruncationReport:
    """Keep the modes with index <= m; report the dropped-coefficient tail.

    ``k`` is the power behind ``expansion`` when the caller has it; it only
    feeds the closed-form Chernoff tail in the report.
    """
    if m < 0:
        raise ValidationError(f"truncation index must be >= 0, got {m}")
    kept = {n: c for n, c in expansion.coeffs.items() if n <= m}
    dropped = [c for n, c in expansion.coeffs.items() if n > m]
    tail_exact = float(math.fsum(dropped))
    if k is not None:
        tail_chernoff = 2.0 * math.exp(-(m ** 2) / (2.0 * k))
    else:
        tail_chernoff = math.nan
    kept_poly = ChebyshevPoly(coeffs=kept, parity=expansion.parity)
    return TruncationReport(
        kept=kept_poly,
        tail_exact=tail_exact,
        tail_chernoff=tail_chernoff,
        degree=kept_poly.degree,
    )


def clenshaw_eval(p: ChebyshevPoly, x):
    """Evaluate sum_n c_n T_n(x) by the backward (Clenshaw) recurrence.

    ``x`` may be a scalar or an array; every entry must lie in [-1, 1].
    """
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x_arr) > 1.0):
        raise ValidationError("clenshaw_eval requires |x| <= 1")
    deg = p.degree
    if deg < 0:
        out = np.zeros_like(x_arr)
        return float(out) if np.isscalar(x) else out
    dense = np.zeros(deg + 1)
    for n, c in p.coeffs.items():
        dense[n] = c
    b1 = np.zeros_like(x_arr)
    b2 = np.zeros_like(x_arr)
    for n in range(deg, 0, -1):
        b1, b2 = dense[n] + 2.0 * x_arr * b1 - b2, b1
    out = dense[0] + x_arr * b1 - b2
    return float(out) if np.isscalar(x) else out


def _scan_grid(grid_size: int) -> np.ndarray:
    # Chebyshev nodes plus both endpoints: error extrema concentrate at +-1
    j = np.arange(grid_size)
    nodes = np.cos(np.pi * (j + 0.5) / grid_size)
    return np.concatenate(([-1.0], np.sort(nodes), [1.0]))


def sup_error_scan(p: ChebyshevPoly, k: int, grid_size: int) -> float:
    """Max of |x^k - p(x)| over a Chebyshev-node grid with endpoints.

    A grid scan lower-bounds the true sup-norm; with the nonnegative
    power-expansion coefficients the maximum sits exactly at x = 1.
    """
    if grid_size < 2:
        raise ValidationError(f"grid_size must be >= 2, got {grid_size}")
    xs = _scan_grid(grid_size)
    return float(np.max(np.abs(xs ** int(k) - clenshaw_eval(p, xs))))


def minimal_empirical_degree(k: int, eps: float, grid_size: int = 4096) -> int:
    """Smallest parity-respecting truncation degree with measured sup error <= eps.

    Binary search over degrees of the parity of k, using
    :func:`sup_error_scan`; deterministic and reproducible.
    """
    expansion = power_expansion(k)

    def err(m: int) -> float:
        return sup_error_scan(truncate(expansion, m).kept, k, grid_size)

    lo_t, hi_t = 0, (k - k % 2) // 2  # m = 2t + (k mod 2)
    parity_bit = k % 2
    if err(2 * hi_t + parity_bit) > eps:
        raise NumericalError(f"full expansion of x^{k} misses eps={eps}")
    while lo_t < hi_t:
        mid = (lo_t + hi_t) // 2
        if err(2 * mid + parity_bit) <= eps:
            hi_t = mid
        else:
            lo_t = mid + 1
    return 2 * lo_t + parity_bit


def degree_lower_bound_solve(k: int, eps: float, max_iter: int = 10_000) -> float:
    """Solve d^2 = 2k [ln(pi^2/(2 eps)) - ln(pi^2 + ln d)] by fixed point.

    This transcendental equation arises when the near-best Chebyshev
    truncation error is converted into a lower bound on the degree any
    polynomial needs to reach sup error eps. Iterates
    d <- sqrt(2k [ln(pi^2/(2 eps)) - ln(pi^2 + ln d)]) from the leading-order
    seed d0 = sqrt(2k ln(pi^2/(2 eps))) until the step is below 1e-9.
    """
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ValidationError(f"k must be an integer >= 2, got {k!r}")
    if not 0.0 < eps <= 0.1:
        raise ValidationError(f"eps must lie in (0, 0.1], got {eps!r}")
    a = math.log(math.pi ** 2 / (2.0 * eps))
    d = math.sqrt(2.0 * k * a)
    for _ in range(max_iter):
        inner = a - math.log(math.pi ** 2 + math.log(d))
        if inner <= 0:
            raise NumericalError(
                f"degree lower bound iteration left its domain (k={k}, eps={eps})"
            )
        d_next = math.sqrt(2.0 * k * inner)
        if abs(d_next - d) < 1e-9:
            return d_next
        d = d_next
    raise NumericalError(
        f"degree lower bound iteration did not converge in {max_iter} steps"
    )
