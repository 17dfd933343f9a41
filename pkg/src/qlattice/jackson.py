"""The Jackson derivative in single, iterated, explicit-formula, and
inverse-parameter forms.

The derivative at x = 0 is deliberately not defined here: on the geometric
lattice, the origin is a limit point and any value there is a statement about
continuity which the distribution layer handles explicitly. Callers needing
the x -> 0 limit must take it themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .qcore import (
    CompensatedSum,
    DeformationParameter,
    _qval,
    q_binomial,
    q_power,
)

__all__ = ["RealFunction", "d_q", "d_q_n", "d_q_inverse_param"]


@dataclass(frozen=True)
class RealFunction:
    """A deterministic evaluation rule with the one piece of metadata the
    distribution layer cares about.

    Fields:
        fn: the evaluation rule, mapping a real (or complex) argument to a
            complex value; evaluating the same argument twice must give the
            same value.
        continuous_at_zero: whether the two one-sided lattice limits at the
            origin agree; only consumed by pairing code, never enforced here.
    """

    fn: Callable[[complex], complex]
    continuous_at_zero: bool = False

    def __call__(self, x: complex) -> complex:
        return self.fn(x)


def d_q(f: Callable[[complex], complex], x: float, q) -> complex:
    r"""Evaluates the Jackson derivative

    .. math ::

        D_q f(x) = \frac{f(x) - f(qx)}{(1 - q)\, x}

    the difference quotient along the geometric lattice. On power functions
    it acts as an exact ladder, ``D_q x^a = [[a]]_q x^(a-1)``, and the
    deformed exponential is its eigenfunction.

    **Examples**

    The power rule at a = 2, q = 1/2, x = 1 gives [[2]]_q = 1.5::

        >>> d_q(lambda t: t * t, 1.0, 0.5)
        1.5

    Constants are annihilated::

        >>> d_q(lambda t: 7.0, 0.3, 0.5)
        0.0

    As q -> 1 the classical derivative returns (f = sin at x = 1)::

        >>> import math
        >>> round(d_q(math.sin, 1.0, 0.999), 3)
        0.541

    The origin is rejected, since the quotient is undefined there::

        >>> d_q(lambda t: t, 0.0, 0.5)
        Traceback (most recent call last):
            ...
        ValueError: Jackson derivative is undefined at x = 0
    """
    if x == 0:
        raise ValueError("Jackson derivative is undefined at x = 0")
    qv = _qval(q)
    return (f(x) - f(qv * x)) / ((1.0 - qv) * x)


def d_q_n(f: Callable[[complex], complex], x: float, q, n: int) -> complex:
    r"""Evaluates the n-th Jackson derivative through the closed formula

    .. math ::

        D_q^n f(x) = \frac{(-1)^n q^{-n(n-1)/2}}{(1-q)^n x^n}
        \sum_{m=0}^{n} \genfrac{[}{]}{0pt}{}{n}{m}_q
        (-1)^m q^{m(m-1)/2} f(q^{n-m} x)

    which touches f at the n+1 lattice points x, qx, ..., q**n x only, with
    no nested recursion. At n = 1 the sum collapses to the plain difference
    quotient. The alternating q-binomial terms cancel heavily, so they are
    accumulated with compensated summation.

    **Examples**

    ::

        >>> d_q_n(lambda t: t**3, 1.0, 0.5, 2)   # [[3]]_q [[2]]_q
        2.625
        >>> d_q_n(lambda t: t**3, 2.0, 0.5, 0)   # n = 0 is evaluation
        8.0
    """
    if n < 0:
        raise ValueError(f"derivative order must be >= 0, got {n}")
    if n == 0:
        return f(x)
    if x == 0:
        raise ValueError("Jackson derivative is undefined at x = 0")
    qv = _qval(q)
    acc = CompensatedSum(0.0 + 0.0j)
    for m in range(n + 1):
        weight = q_binomial(n, m, qv) * q_power(qv, m * (m - 1) / 2.0)
        term = weight * f(q_power(qv, n - m) * x)
        acc.add(-term if m % 2 else term)
    sign = -1.0 if n % 2 else 1.0
    prefactor = sign * q_power(qv, -n * (n - 1) / 2.0) / ((1.0 - qv) ** n * x**n)
    out = prefactor * acc.value
    if out.imag == 0.0:
        return out.real
    return out


def d_q_inverse_param(f: Callable[[complex], complex], x: float, q, k: int) -> complex:
    r"""Evaluates the k-th Jackson derivative with the inverse base,
    ``D_{q^{-1}}^k f`` at x, by running :func:`d_q_n` with parameter q**(-1).

    The bridge back to the direct-base derivative,

    .. math ::

        (D_q^k f)(q^{-k} x) = q^{k(k-1)/2} \, D_{q^{-1}}^k f(x)

    is verified in the test suite for k <= 4.

    >>> d_q_inverse_param(lambda t: t * t, 1.0, 0.5, 1)   # [[2]] at base 2
    3.0
    """
    if isinstance(q, DeformationParameter):
        base = q.inverse()
    else:
        base = 1.0 / _qval(q)
    return d_q_n(f, x, base, k)
