"""Combinatorial q-objects: q-numbers, q-factorials, q-binomials, and
q-Pochhammer symbols.

Everything downstream (derivatives, exponentials, integrals, transforms)
consumes these primitives, so they are kept pure, deterministic, and as
exactly evaluated as double precision allows. Lattice powers q**m are always
computed as exp(m * log q) so the relative error stays uniform over the
window |m| <= 200 instead of growing linearly with |m|.

The ``*_exact`` helpers at the bottom evaluate the same objects over
``fractions.Fraction`` and exist solely to generate frozen oracle values for
the test suite.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "DeformationParameter",
    "QInteger",
    "CompensatedSum",
    "q_number",
    "q_factorial",
    "q_binomial",
    "q_pochhammer",
    "q_pochhammer_infinite",
    "q_pochhammer_log",
    "gaussian_binomial_sum",
    "q_power",
    "q_number_exact",
    "q_factorial_exact",
    "q_binomial_exact",
    "q_pochhammer_exact",
]

# Construction rejects q this close to 1: every (1 - q) division below would
# lose all significance past this point.
_Q_UPPER_GUARD = 1.0 - 1e-6


@dataclass(frozen=True)
class DeformationParameter:
    """The global deformation parameter, validated once at construction.

    Fields:
        q: the deformation parameter itself, required to satisfy
           0 < q < 1 strictly (values above ``1 - 1e-6`` are rejected
           because (1 - q) divisions lose all significance there).
        log_q: cached natural logarithm of q, precomputed so that lattice
           powers can be taken as exp(m * log_q).

    The inverse base 1/q and the half-step base q**(1/2) are derived on
    demand through :meth:`inverse` and :meth:`sqrt` (raw floats) or
    :meth:`sqrt_parameter` (a new validated instance); they are never stored,
    so the two can not drift out of sync with ``q``.
    """

    q: float
    log_q: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        q = float(self.q)
        if not (0.0 < q < 1.0):
            raise ValueError(f"deformation parameter must lie in (0, 1), got {q!r}")
        if q > _Q_UPPER_GUARD:
            raise ValueError(
                f"deformation parameter {q!r} is too close to 1; "
                f"values above {_Q_UPPER_GUARD} are rejected"
            )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "log_q", math.log(q))

    @property
    def one_minus_q(self) -> float:
        return 1.0 - self.q

    def inverse(self) -> float:
        """The raw inverse base 1/q (> 1), for the inverse-parameter calculus."""
        return 1.0 / self.q

    def sqrt(self) -> float:
        """The raw half-step base q**(1/2)."""
        return math.sqrt(self.q)

    def sqrt_parameter(self) -> "DeformationParameter":
        """A validated parameter for the half-step lattice, base q**(1/2)."""
        return DeformationParameter(math.sqrt(self.q))

    def power(self, m: float) -> float:
        """q**m as exp(m * log q); m may be fractional (half-lattice steps)."""
        return math.exp(m * self.log_q)


@dataclass(frozen=True)
class QInteger:
    """An integer index with the validation the q-combinatorics needs.

    Fields:
        n: the index. Lattice exponents may be any integer; the factorial
           and binomial constructors below reject negative ``n`` (and
           ``k > n``) before arithmetic starts.
    """

    n: int

    @staticmethod
    def for_factorial(n: int) -> "QInteger":
        if n < 0:
            raise ValueError(f"factorial index must be >= 0, got {n}")
        return QInteger(n)

    @staticmethod
    def for_binomial(n: int, k: int) -> tuple["QInteger", "QInteger"]:
        if n < 0 or k < 0:
            raise ValueError(f"binomial indices must be >= 0, got n={n}, k={k}")
        if k > n:
            raise ValueError(f"binomial requires k <= n, got n={n}, k={k}")
        return QInteger(n), QInteger(k)


class CompensatedSum:
    """Kahan compensated accumulator for float or complex terms.

    Keeps a running compensation term so that long alternating or graded
    series lose far less precision than a bare ``+=`` loop. Works unchanged
    for complex values because the correction algebra only uses addition and
    subtraction.

    >>> acc = CompensatedSum()
    >>> for k in range(10**5):
    ...     acc.add(0.1)
    >>> acc.value
    10000.0
    """

    __slots__ = ("_sum", "_carry")

    def __init__(self, start: complex = 0.0) -> None:
        self._sum = start
        self._carry = 0.0 * start

    def add(self, term: complex) -> None:
        y = term - self._carry
        t = self._sum + y
        self._carry = (t - self._sum) - y
        self._sum = t

    @property
    def value(self) -> complex:
        return self._sum


def _qval(q) -> float:
    """Accept either a DeformationParameter or a raw positive base.

    Raw floats are allowed (and may exceed 1) so the same arithmetic can run
    with the inverse base 1/q; only positivity and base != 1 are enforced.
    """
    if isinstance(q, DeformationParameter):
        return q.q
    qv = float(q)
    if qv <= 0.0 or qv == 1.0:
        raise ValueError(f"base must be positive and != 1, got {qv!r}")
    return qv


def q_power(q, m: float) -> float:
    """q**m via exp(m * log q), uniform relative error over |m| <= 200."""
    if isinstance(q, DeformationParameter):
        return math.exp(m * q.log_q)
    return math.exp(m * math.log(_qval(q)))


def q_number(alpha: float, q) -> float:
    r"""Evaluates the symmetric-free q-number

    .. math ::

        [[\alpha]]_q = \frac{1 - q^\alpha}{1 - q}

    which interpolates the integers: as q -> 1 the value tends to alpha
    itself. The implementation computes the numerator as ``-expm1(alpha *
    log q)`` so nothing cancels even when ``q**alpha`` is within an ulp
    of 1.

    **Examples**

    Integer arguments reproduce the geometric partial sums
    1 + q + ... + q**(n-1)::

        >>> q_number(0, 0.5)
        0.0
        >>> q_number(2, 0.5)
        1.5
        >>> q_number(3, 0.5)
        1.75

    The base may exceed 1, which is how the inverse-parameter calculus
    enters; for example [[2]] at base 1/q with q = 0.5::

        >>> q_number(2, 2.0)
        3.0

    As q -> 1 the classical number returns::

        >>> round(q_number(7, 0.999999), 4)
        7.0
    """
    qv = _qval(q)
    if alpha == 0:
        return 0.0
    return -math.expm1(alpha * math.log(qv)) / (1.0 - qv)


def q_factorial(n: int, q) -> float:
    r"""Evaluates the q-factorial

    .. math ::

        [[n]]_q! = [[1]]_q \, [[2]]_q \cdots [[n]]_q, \qquad [[0]]_q! = 1

    tied to the q-Pochhammer symbol by ``(q; q)_n / (1-q)**n``.

    **Examples**

    ::

        >>> q_factorial(0, 0.5)
        1.0
        >>> q_factorial(3, 0.5)
        2.625

    The Pochhammer bridge (checked to n = 30 in the test suite)::

        >>> from qlattice.qcore import q_pochhammer
        >>> q = 0.5
        >>> abs(q_factorial(5, q) * (1 - q)**5 - q_pochhammer(q, q, 5)) < 1e-15
        True
    """
    QInteger.for_factorial(n)
    qv = _qval(q)
    out = 1.0
    for j in range(1, n + 1):
        out *= q_number(j, qv)
    return out


def q_binomial(n: int, k: int, q) -> float:
    r"""Evaluates the q-binomial (Gaussian) coefficient

    .. math ::

        \genfrac{[}{]}{0pt}{}{n}{k}_q =
        \frac{[[n]]_q!}{[[n-k]]_q! \; [[k]]_q!}

    a polynomial in q with nonnegative integer coefficients, symmetric
    under k <-> n-k.

    **Examples**

    ::

        >>> q_binomial(4, 0, 0.5)
        1.0
        >>> q_binomial(4, 2, 0.5)
        2.1875

    The polynomial identity behind the second value is
    1 + q + 2 q**2 + q**3 + q**4 at q = 1/2::

        >>> 1 + 0.5 + 2*0.25 + 0.125 + 0.0625
        2.1875
    """
    QInteger.for_binomial(n, k)
    qv = _qval(q)
    # Multiply ratio-wise ([[n-k+j]]/[[j]]) so intermediates stay O(result).
    out = 1.0
    for j in range(1, k + 1):
        out *= q_number(n - k + j, qv) / q_number(j, qv)
    return out


def q_pochhammer(a: complex, q, n: int) -> complex:
    r"""Evaluates the finite q-Pochhammer symbol (q-shifted factorial)

    .. math ::

        (a; q)_n = \prod_{j=0}^{n-1} (1 - a q^j)

    with the empty-product convention ``(a; q)_0 = 1``.

    **Examples**

    ::

        >>> q_pochhammer(2.0, 0.5, 0)
        1.0
        >>> q_pochhammer(1.0, 0.5, 4)
        0.0
        >>> q_pochhammer(0.25, 0.5, 2)
        0.65625

    The inversion identity relating the two bases q and 1/q,

    .. math ::

        (a; q)_n = (a^{-1}; q^{-1})_n \, (-a)^n \, q^{n(n-1)/2}

    is verified for random complex a in the test suite.
    """
    QInteger.for_factorial(n)
    qv = _qval(q)
    out = 1.0 if not isinstance(a, complex) else (1.0 + 0.0j)
    qj = 1.0
    for _ in range(n):
        out *= 1.0 - a * qj
        qj *= qv
    return out


def q_pochhammer_infinite(a: complex, q, tol: float = 1e-15) -> complex:
    r"""Evaluates the infinite q-Pochhammer symbol

    .. math ::

        (a; q)_\infty = \prod_{j=0}^{\infty} (1 - a q^j)

    convergent for 0 < q < 1. The product is truncated at the first index n
    with ``|a| * q**n < tol * (1 - q)``; past that point the log of the
    remaining product is bounded by the geometric tail
    ``|a| q**n / (1 - q)``, so the truncation is below ``tol`` and the
    truncation index is a deterministic function of (a, q, tol).

    **Examples**

    The Euler function (q; q)_oo at q = 1/2::

        >>> round(q_pochhammer_infinite(0.5, 0.5), 15)
        0.288788095086603

    Trivial endpoints::

        >>> q_pochhammer_infinite(0.0, 0.5)
        1.0
        >>> q_pochhammer_infinite(1.0, 0.5)
        0.0
    """
    qv = _qval(q)
    if not (0.0 < qv < 1.0):
        raise ValueError(f"infinite product requires 0 < q < 1, got {qv!r}")
    if a == 0:
        return 1.0
    out = 1.0 if not isinstance(a, complex) else (1.0 + 0.0j)
    scale = abs(a)
    cutoff = tol * (1.0 - qv)
    aq = a
    # Hard ceiling keeps a malformed tol from spinning; the geometric decay
    # of |a q^n| reaches any representable cutoff long before this.
    for _ in range(100000):
        out *= 1.0 - aq
        aq *= qv
        scale *= qv
        if scale < cutoff:
            break
    return out


def q_pochhammer_log(a: complex, q, tol: float = 1e-15) -> complex:
    r"""The principal-branch logarithm of the infinite q-Pochhammer symbol,

    .. math ::

        \log (a; q)_\infty = \sum_{j=0}^{\infty} \log(1 - a q^j)

    accumulated factor by factor in log space. This is the overflow-safe
    route: for |a| of order 1e3 and beyond the plain product over- or
    underflows double precision while the log sum stays of order
    ``log|a| * (number of large factors)``. Truncation follows the same
    ``|a| q**n < tol (1-q)`` rule as :func:`q_pochhammer_infinite`.

    The imaginary part is a sum of principal branches, not itself reduced
    mod 2 pi; exponentiating it reproduces the product's phase exactly.

    >>> import cmath
    >>> abs(cmath.exp(q_pochhammer_log(0.5, 0.5)) - q_pochhammer_infinite(0.5, 0.5)) < 1e-15
    True
    """
    qv = _qval(q)
    if not (0.0 < qv < 1.0):
        raise ValueError(f"infinite product requires 0 < q < 1, got {qv!r}")
    if a == 0:
        return 0.0 + 0.0j
    acc = CompensatedSum(0.0 + 0.0j)
    scale = abs(a)
    cutoff = tol * (1.0 - qv)
    aq = complex(a)
    for _ in range(100000):
        fac = 1.0 - aq
        if fac == 0:
            raise ZeroDivisionError(f"exact zero factor in (a; q)_oo at a q^j = {aq!r}")
        acc.add(cmath.log(fac))
        aq *= qv
        scale *= qv
        if scale < cutoff:
            break
    return acc.value


def gaussian_binomial_sum(z: complex, q, n: int) -> complex:
    r"""Evaluates the Gaussian binomial expansion of the finite Pochhammer
    product,

    .. math ::

        (z; q)_n = \sum_{m=0}^{n} \genfrac{[}{]}{0pt}{}{n}{m}_q
        (-z)^m q^{m(m-1)/2}

    by compensated summation. This is the sum-route twin of
    :func:`q_pochhammer`; the two must agree to relative 1e-12 for n <= 20,
    and the test suite holds them to that.

    **Examples**

    ::

        >>> gaussian_binomial_sum(0.3, 0.5, 0)
        (1+0j)
        >>> abs(gaussian_binomial_sum(1.0, 0.5, 3)) < 1e-12  # (1; q)_n = 0, n >= 1
        True
    """
    QInteger.for_factorial(n)
    qv = _qval(q)
    acc = CompensatedSum(0.0 + 0.0j)
    for m in range(n + 1):
        term = (
            q_binomial(n, m, qv)
            * (-z) ** m
            * q_power(qv, m * (m - 1) / 2.0)
        )
        acc.add(term)
    return acc.value


# ---------------------------------------------------------------------------
# Exact (Fraction) twins, used only to freeze DERIVED oracle values in tests.
# ---------------------------------------------------------------------------

def q_number_exact(alpha: int, q: Fraction) -> Fraction:
    """[[alpha]]_q over Fractions; alpha any integer."""
    q = Fraction(q)
    if alpha == 0:
        return Fraction(0)
    return (1 - q**alpha) / (1 - q)


def q_factorial_exact(n: int, q: Fraction) -> Fraction:
    """[[n]]_q! over Fractions."""
    out = Fraction(1)
    for j in range(1, n + 1):
        out *= q_number_exact(j, q)
    return out


def q_binomial_exact(n: int, k: int, q: Fraction) -> Fraction:
    """q-binomial over Fractions."""
    QInteger.for_binomial(n, k)
    return q_factorial_exact(n, q) / (q_factorial_exact(n - k, q) * q_factorial_exact(k, q))


def q_pochhammer_exact(a: Fraction, q: Fraction, n: int) -> Fraction:
    """(a; q)_n over Fractions."""
    a, q = Fraction(a), Fraction(q)
    out = Fraction(1)
    for j in range(n):
        out *= 1 - a * q**j
    return out
