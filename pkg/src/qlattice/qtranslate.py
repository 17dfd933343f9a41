"""q-translation operators and the q-binomial algebra.

On a geometric lattice the ordinary shift ``x -> x + a`` has no good
discrete analogue, so translation is defined spectrally: the shifted
function value ``f(a (+) x)`` is the q-Taylor series in the shift
parameter, with Jackson derivatives supplying the coefficients.  The
module evaluates that series, the q-binomial theorem it reduces to on
monomials, and the q-inversion ``(-) x`` that inverts translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .jackson import d_q_n
from .qcore import CompensatedSum, _qval, q_binomial, q_factorial, q_power

__all__ = [
    "NonDecayError",
    "TranslationSpec",
    "q_translate",
    "q_shifted_power",
    "q_inversion_power",
]


class NonDecayError(ArithmeticError):
    """Raised when a truncated q-Taylor series shows no terminal decay."""


@dataclass(frozen=True)
class TranslationSpec:
    """Describes one application of a q-translation operator.

    Attributes
    ----------
    shift
        The translation amount ``a``.
    side
        ``"left"`` expands ``f(a (+) x)``, ``"right"`` expands
        ``f(x (+) a)``.  For scalar shifts the two sums coincide term
        by term (the q-binomial coefficients are symmetric), so the
        field records intent rather than selecting a different
        algorithm.
    inverted
        When true the shift enters as ``(-) a``, replacing the weight
        ``a**k`` by ``q**(k*(k-1)/2) * (-a)**k``.  Composing an
        inverted translation with the plain one recovers the original
        function.
    truncation
        Number of series terms retained (orders ``0 .. truncation``).
    """

    shift: complex
    side: str = "left"
    inverted: bool = False
    truncation: int = 40

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.truncation < 0:
            raise ValueError("truncation order must be nonnegative")


def q_translate(f: Callable[[complex], complex], spec: TranslationSpec, x: float, q) -> complex:
    r"""Evaluate a q-translated function by its q-Taylor series.

    Computes the truncated sum

    .. math::

        f(a \oplus x) = \sum_{k=0}^{K} \frac{a^k}{[[k]]_q!}\,
                        (D_q^k f)(x)

    where :math:`D_q` is the Jackson derivative and ``K`` is
    ``spec.truncation``.  With ``spec.inverted`` the weights become
    :math:`q^{k(k-1)/2}(-a)^k/[[k]]_q!`, which realises the inverse
    operator: translating by ``a`` and then by the inverted ``a``
    returns the original function values.

    Each derivative order is evaluated through the explicit single-sum
    formula rather than by repeated differencing, so one term costs
    ``O(k)`` function evaluations and no error compounds across orders.

    The explicit formula extracts the order-``k`` coefficient from
    function samples that are all of comparable size, with a prefactor
    of magnitude ``q**(-k*(k-1)/2)``, so rounding noise in the samples
    is amplified superexponentially in ``k``.  The series therefore
    behaves like an asymptotic expansion in floating point: terms
    decay to a noise floor and then rise without bound.  The sum
    stops as soon as two consecutive terms fall below rounding scale.
    Failing that, when three successive magnitude increases occur
    after the terms have already descended well below their peak, the
    sum is truncated at the smallest term seen; the result then
    carries that noise-floor accuracy.  Terms that are still growing
    at the truncation order (no descent ever happened, as for a shift
    outside the series' domain) raise :class:`NonDecayError`, as does
    any non-finite term.

    For a polynomial of degree ``d`` every term beyond order ``d``
    vanishes and the result is exact up to rounding.

    **Examples**

    Shifting a quadratic reproduces the q-binomial expansion
    ``a**2 + (1+q)*a*x + x**2``::

        >>> from qlattice.qtranslate import TranslationSpec, q_translate
        >>> spec = TranslationSpec(shift=1.0, truncation=10)
        >>> round(q_translate(lambda t: t * t, spec, 1.0, 0.5), 12)
        3.5

    A zero shift is the identity for any side::

        >>> q_translate(lambda t: t ** 3, TranslationSpec(shift=0.0), 2.0, 0.5)
        8.0
    """
    qv = _qval(q)
    a = spec.shift
    if a == 0:
        return f(x)
    terms: list[complex] = [complex(f(x))]
    mags = [abs(terms[0])]
    rises = 0
    prev_nonzero = mags[0]
    converged = False
    for k in range(1, spec.truncation + 1):
        term = _q_taylor_weight(a, k, qv, spec.inverted) * d_q_n(f, x, qv, k)
        size = abs(term)
        if not math.isfinite(size):
            raise NonDecayError(f"q-Taylor term of order {k} is not finite")
        terms.append(complex(term))
        mags.append(size)
        scale = max(mags)
        if size <= 1e-14 * scale and mags[-2] <= 1e-14 * scale:
            converged = True
            break
        if size != 0.0:
            rises = rises + 1 if size > prev_nonzero else 0
            prev_nonzero = size
            if rises >= 3:
                floor_at = _noise_floor_index(mags)
                ramp_peak = max(mags[: floor_at + 1])
                peak_at = mags.index(ramp_peak)
                if floor_at > peak_at and mags[floor_at] <= 1e-3 * ramp_peak:
                    terms = terms[: floor_at + 1]
                    converged = True
                    break
    if not converged:
        tail = [m for m in mags if m != 0.0][-3:]
        if len(tail) == 3 and tail[0] < tail[1] < tail[2]:
            raise NonDecayError(
                "q-Taylor terms still growing at truncation order "
                f"{spec.truncation}: last magnitudes {tail[0]:.3e}, "
                f"{tail[1]:.3e}, {tail[2]:.3e}"
            )
    total = CompensatedSum()
    for term in terms:
        total.add(term)
    out = total.value
    if isinstance(out, complex) and out.imag == 0.0:
        return out.real
    return out


def _noise_floor_index(mags: list[float]) -> int:
    """Index of the smallest nonzero magnitude, preferring later indices."""
    best = len(mags) - 1
    best_size = mags[best]
    for j in range(len(mags) - 1, 0, -1):
        if mags[j] != 0.0 and mags[j] < best_size:
            best, best_size = j, mags[j]
    return best


def q_shifted_power(a: complex, x: complex, n: int, q) -> complex:
    r"""Evaluate the q-shifted power ``(a (+) x)**n``.

    Uses the q-binomial theorem

    .. math::

        (a \oplus x)^n = \sum_{k=0}^{n} \binom{n}{k}_q a^{n-k} x^k,

    a finite sum that is exact for every nonnegative integer ``n``.
    Setting ``x = 0`` collapses the sum to ``a**n``; ``n = 1`` gives
    the ordinary ``a + x``.

    **Examples**

        >>> from qlattice.qtranslate import q_shifted_power
        >>> q_shifted_power(1.0, 1.0, 3, 0.5)
        5.5
        >>> q_shifted_power(2.0, 0.0, 4, 0.5)
        16.0
        >>> q_shifted_power(0.25, 0.75, 1, 0.5)
        1.0
    """
    qv = _qval(q)
    if n < 0:
        raise ValueError("q_shifted_power requires n >= 0")
    total = CompensatedSum()
    for k in range(n + 1):
        total.add(q_binomial(n, k, qv) * a ** (n - k) * x**k)
    out = total.value
    if isinstance(out, complex) and out.imag == 0.0:
        return out.real
    return out


def q_inversion_power(x: complex, n: int, q) -> complex:
    r"""Evaluate the q-inversion of a power, ``((-) x)**n``.

    The inversion of a monomial has the closed form

    .. math::

        (\ominus x)^n = q^{n(n-1)/2} (-x)^n,

    exact for every nonnegative ``n``.  It is what the inverted
    q-Taylor operator produces when applied to ``t**n`` at ``t = 0``.

    **Examples**

        >>> from qlattice.qtranslate import q_inversion_power
        >>> q_inversion_power(1.0, 2, 0.5)
        0.5
        >>> q_inversion_power(3.0, 1, 0.5)
        -3.0
        >>> q_inversion_power(7.0, 0, 0.5)
        1.0
    """
    qv = _qval(q)
    if n < 0:
        raise ValueError("q_inversion_power requires n >= 0")
    return q_power(qv, n * (n - 1) / 2.0) * (-x) ** n


def _q_taylor_weight(a: complex, k: int, qv: float, inverted: bool) -> complex:
    """Series weight of order ``k`` for a shift ``a`` (tests and helpers)."""
    w = a**k / q_factorial(k, qv)
    if inverted:
        w *= q_power(qv, k * (k - 1) / 2.0) * (-1.0) ** k
    return w
