r"""Distribution theory on the geometric lattice.

Functions on the two-sided lattice ``{+-x0 q^m} U {0}`` pair through
the lattice scalar product, and distributions are defined by what
they do to test functions rather than by pointwise values: the
q-delta evaluates at the origin through symmetric lattice limits,
step functions pair as one-sided improper integrals, and derivatives
act through the transfer rule

.. math::

    (D_q^k l)(g) = l\bigl((-q^{-1} D_{q^{-1}})^k g\bigr),

so every object here is pairing-first.  Lattice-weight tables (the
shifted deltas) are derived views of those pairings, and the smooth
bump is the interpolating function whose lattice restriction is the
indicator family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from .qcore import (
    CompensatedSum,
    DeformationParameter,
    q_binomial,
    q_factorial,
    q_power,
)

__all__ = [
    "GeometricLattice",
    "LatticeFunction",
    "OriginContinuityError",
    "QDistribution",
    "scalar_product",
    "seminorm",
    "indicator_phi",
    "pair",
    "distribution_derivative",
    "shifted_delta_weights",
    "bump_phi",
    "scale_action",
]

_DEFAULT_WINDOW = 60


class OriginContinuityError(ValueError):
    """Raised when a pairing needs origin continuity the function lacks."""


@dataclass(frozen=True)
class GeometricLattice:
    """The two-sided geometric lattice ``{+-x0 s^m : m in Z} U {0}``.

    Attributes
    ----------
    q
        The deformation parameter (a raw float in ``(0, 1)`` is
        accepted and wrapped).
    x0
        Positive anchor; the lattice point at ``(sign=+1, m=0)``.
    half_step
        When false the lattice step ``s`` is ``q`` itself; when true
        it is ``sqrt(q)``, which doubles the point density and is the
        momentum-side lattice of the half-step Fourier transform.
    """

    q: DeformationParameter
    x0: float
    half_step: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.q, DeformationParameter):
            object.__setattr__(self, "q", DeformationParameter(float(self.q)))
        if not self.x0 > 0:
            raise ValueError(f"lattice anchor x0 must be positive, got {self.x0}")

    @property
    def step(self) -> float:
        """The lattice ratio between consecutive points."""
        return math.sqrt(self.q.q) if self.half_step else self.q.q

    def point(self, sign: int, m: int) -> float:
        """The lattice point ``sign * x0 * step**m`` (index-exact)."""
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        return sign * self.x0 * q_power(self.step, m)

    def weight(self, m: int) -> float:
        """Jackson weight ``(1 - step) * x0 * step**m`` of index ``m``."""
        return (1.0 - self.step) * self.x0 * q_power(self.step, m)


@dataclass(frozen=True)
class LatticeFunction:
    """A function known through its values on a lattice window.

    Attributes
    ----------
    lattice
        The underlying geometric lattice.
    window
        Half-width ``W``; values are stored for ``m in [-W, W]``.
    values
        Mapping ``(sign, m) -> complex``.  Missing keys read as 0, so
        sparse tables (indicators, delta weights) stay sparse.
    value_at_zero
        Optional value at the origin, for functions continuous there.
    closed_form
        Optional callable the stored values were sampled from; when
        present the stored values are validated against it (1e-13
        relative) so the table and the formula cannot drift apart.
    """

    lattice: GeometricLattice
    window: int
    values: Mapping[tuple[int, int], complex]
    value_at_zero: complex | None = None
    closed_form: Callable[[float], complex] | None = None

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.closed_form is not None:
            for (sign, m), stored in self.values.items():
                want = self.closed_form(self.lattice.point(sign, m))
                if abs(stored - want) > 1e-13 * max(1.0, abs(want)):
                    raise ValueError(
                        f"stored value at (sign={sign}, m={m}) is {stored!r} "
                        f"but the closed form gives {want!r}"
                    )

    @classmethod
    def sample(
        cls,
        lattice: GeometricLattice,
        fn: Callable[[float], complex],
        window: int = _DEFAULT_WINDOW,
        value_at_zero: complex | None = None,
    ) -> "LatticeFunction":
        """Tabulate ``fn`` on the window, keeping it as the closed form."""
        values = {
            (sign, m): fn(lattice.point(sign, m))
            for sign in (1, -1)
            for m in range(-window, window + 1)
        }
        return cls(lattice, window, values, value_at_zero, fn)

    def value(self, sign: int, m: int) -> complex:
        """Stored value, the closed form off the table, or 0."""
        key = (sign, m)
        if key in self.values:
            return self.values[key]
        if self.closed_form is not None:
            return self.closed_form(self.lattice.point(sign, m))
        return 0.0


def _forward_d_at(g: LatticeFunction, sign: int, m: int, n: int) -> complex:
    """Jackson derivative ``(D_q^n g)`` at lattice index ``(sign, m)``.

    Uses the explicit order-``n`` formula; the samples slide toward
    the origin (indices ``m .. m+n``).
    """
    if n == 0:
        return g.value(sign, m)
    qv = g.lattice.step
    x = g.lattice.point(sign, m)
    total = CompensatedSum()
    for j in range(n + 1):
        w = q_binomial(n, j, qv) * (-1.0) ** j * q_power(qv, j * (j - 1) / 2.0)
        total.add(w * g.value(sign, m + n - j))
    pref = (-1.0) ** n * q_power(qv, -n * (n - 1) / 2.0) / ((1.0 - qv) ** n * x**n)
    return pref * total.value


def _inverse_d_at(g: LatticeFunction, sign: int, m: int, n: int) -> complex:
    """Inverse-base derivative ``(D_{q^{-1}}^n g)`` at ``(sign, m)``.

    The samples slide away from the origin (indices ``m-n .. m``).
    """
    return _inverse_d_at_bounded(g, sign, m, n)[0]


def _inverse_d_at_bounded(
    g: LatticeFunction, sign: int, m: int, n: int
) -> tuple[complex, float]:
    """Inverse-base derivative plus its rounding-noise bound.

    The explicit formula is a cancelling sum scaled by ``x**(-n)``,
    so near the origin the rounding residue of the sum can dwarf a
    small true value; the bound tracks that residue.
    """
    if n == 0:
        return g.value(sign, m), 0.0
    qv = g.lattice.step
    r = 1.0 / qv
    x = g.lattice.point(sign, m)
    total = CompensatedSum()
    spread = 0.0
    for j in range(n + 1):
        w = q_binomial(n, j, r) * (-1.0) ** j * q_power(r, j * (j - 1) / 2.0)
        term = w * g.value(sign, m - n + j)
        total.add(term)
        spread += abs(term)
    pref = (-1.0) ** n * q_power(r, -n * (n - 1) / 2.0) / ((1.0 - r) ** n * x**n)
    return pref * total.value, abs(pref) * spread * 1e-14


def scalar_product(f: LatticeFunction, g: LatticeFunction) -> complex:
    r"""The lattice scalar product, conjugate-linear in ``f``.

    .. math::

        (f, g)_q = \sum_{\epsilon = \pm} \sum_{m}
                   (1-q)\, q^m x_0\, \overline{f(\epsilon x_0 q^m)}\,
                   g(\epsilon x_0 q^m)

    which is the full-line Jackson integral of ``conj(f) * g``.  The
    sum runs over the overlap of the two windows, accumulated from
    the innermost lattice points outward per sign with compensated
    summation.

    **Examples**

        >>> from qlattice.qdist import GeometricLattice, indicator_phi, scalar_product
        >>> lat = GeometricLattice(0.5, 1.0)
        >>> phi = indicator_phi(3, 1, lat)
        >>> round(scalar_product(phi, phi) - (1 - 0.5) * 0.5 ** 3, 15)
        0.0
    """
    if f.lattice != g.lattice:
        raise ValueError("scalar_product requires both functions on one lattice")
    w = min(f.window, g.window)
    total = CompensatedSum()
    for sign in (1, -1):
        for m in range(w, -w - 1, -1):
            weight = f.lattice.weight(m)
            total.add(weight * _conj(f.value(sign, m)) * g.value(sign, m))
    return total.value


def _conj(v: complex) -> complex:
    return v.conjugate() if isinstance(v, complex) else v


def seminorm(f: LatticeFunction, k: int, l: int) -> float:
    r"""The test-function seminorm ``max |x^k (D_q^l f)(x)|``.

    Finite values over a grid of ``(k, l)`` certify that a sampled
    function behaves like a test function on its window; this is a
    necessary check only, since the full space demands bounds for
    every order.

    **Examples**

        >>> from qlattice.qdist import GeometricLattice, indicator_phi, seminorm
        >>> lat = GeometricLattice(0.5, 1.0)
        >>> seminorm(indicator_phi(0, 1, lat), 0, 0)
        1.0
    """
    if k < 0 or l < 0:
        raise ValueError("seminorm orders must be nonnegative")
    best = 0.0
    for sign in (1, -1):
        for m in range(-f.window, f.window - l + 1):
            x = f.lattice.point(sign, m)
            size = abs(x**k * _forward_d_at(f, sign, m, l))
            if size > best:
                best = size
    return best


def indicator_phi(m: int, sign: int, lattice: GeometricLattice) -> LatticeFunction:
    """The lattice indicator: 1 at ``(sign, m)``, 0 elsewhere."""
    window = max(_DEFAULT_WINDOW, abs(m) + 1)
    return LatticeFunction(lattice, window, {(sign, m): 1.0})


@dataclass(frozen=True)
class QDistribution:
    """A distribution on the lattice, defined by its pairing rule.

    ``kind`` selects the representation:

    ``regular``
        Pairing is the scalar product against ``kernel``.
    ``delta``
        The q-delta at the origin (``center is None``) or the shifted
        delta at a lattice point ``center = (sign, m)``.  ``power``
        attaches a Laurent monomial factor ``x**power``; the origin
        delta pairs any positive-power monomial factor to 0 and pairs
        ``x**(-n)`` through the inverse-base derivative rule.
    ``step``
        The step function supported on the ``step_sign`` half-axis;
        ``shift_index`` restricts it to lattice indices ``<= shift_index``.

    ``derivative_order`` applies the transfer rule that many times,
    and ``coefficient`` scales the whole pairing.
    """

    kind: str
    lattice: GeometricLattice
    coefficient: complex = 1.0
    kernel: LatticeFunction | None = None
    center: tuple[int, int] | None = None
    derivative_order: int = 0
    side: str = "both"
    step_sign: int = 1
    shift_index: int | None = None
    power: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("regular", "delta", "step"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "regular" and self.kernel is None:
            raise ValueError("regular distributions need a kernel")
        if self.side not in ("+", "-", "both"):
            raise ValueError(f"side must be '+', '-' or 'both', got {self.side!r}")
        if self.step_sign not in (1, -1):
            raise ValueError("step_sign must be +1 or -1")
        if self.derivative_order < 0:
            raise ValueError("derivative_order must be nonnegative")
        if self.kind != "delta" and self.power != 0:
            raise ValueError("monomial powers only attach to deltas")

    @classmethod
    def regular(cls, kernel: LatticeFunction) -> "QDistribution":
        return cls("regular", kernel.lattice, kernel=kernel)

    @classmethod
    def delta(
        cls,
        lattice: GeometricLattice,
        order: int = 0,
        side: str = "both",
        power: int = 0,
        center: tuple[int, int] | None = None,
    ) -> "QDistribution":
        return cls(
            "delta",
            lattice,
            derivative_order=order,
            side=side,
            power=power,
            center=center,
        )

    @classmethod
    def step(
        cls, lattice: GeometricLattice, sign: int, shift_index: int | None = None
    ) -> "QDistribution":
        return cls("step", lattice, step_sign=sign, shift_index=shift_index)


def _edge_value(g: LatticeFunction, sign: int, tol: float) -> complex:
    """One-sided origin limit from the two innermost window samples."""
    qv = g.lattice.step
    m = g.window
    v1 = g.value(sign, m)
    v0 = g.value(sign, m - 1)
    if abs(v1 - v0) > math.sqrt(tol) * max(1.0, abs(v1)):
        raise OriginContinuityError(
            f"lattice values on the {'+' if sign > 0 else '-'} side keep moving "
            f"at the window edge: {v0!r} -> {v1!r}"
        )
    return (v1 - qv * v0) / (1.0 - qv)


def _edge_inverse_derivative(g: LatticeFunction, sign: int, n: int, tol: float) -> complex:
    """Origin limit of ``(D_{q^{-1}}^n g)`` along one lattice side.

    Evaluated at a moderate depth chosen to balance the ``q^{-n M}``
    rounding amplification of the explicit derivative formula against
    the ``q^M`` convergence of the limit, then Richardson-corrected
    with the depth-``(M-1)`` value.  Exact for polynomial samples,
    whose depth dependence vanishes.
    """
    if n == 0:
        return _edge_value(g, sign, tol)
    qv = g.lattice.step
    depth = max(n + 2, min(g.window - 1, round(36.8 / ((n + 2) * -math.log(qv)))))
    v1, noise1 = _inverse_d_at_bounded(g, sign, depth, n)
    v0, noise0 = _inverse_d_at_bounded(g, sign, depth - 1, n)
    if abs(v1) <= noise1 and abs(v0) <= noise0:
        return 0.0
    return (v1 - qv * v0) / (1.0 - qv)


def _origin_limit(
    g: LatticeFunction, side: str, n: int, tol: float
) -> complex:
    if n == 0 and side == "both" and g.value_at_zero is not None:
        return g.value_at_zero
    if side == "+":
        return _edge_inverse_derivative(g, 1, n, tol)
    if side == "-":
        return _edge_inverse_derivative(g, -1, n, tol)
    plus = _edge_inverse_derivative(g, 1, n, tol)
    minus = _edge_inverse_derivative(g, -1, n, tol)
    return 0.5 * (plus + minus)


def _check_origin_continuity(g: LatticeFunction, tol: float) -> None:
    m = g.window
    v_plus = g.value(1, m)
    v_minus = g.value(-1, m)
    if abs(v_plus - v_minus) > tol * max(1.0, abs(v_plus), abs(v_minus)):
        raise OriginContinuityError(
            "pairing needs continuity at the lattice origin, but the one-sided "
            f"values differ: {v_plus!r} vs {v_minus!r}"
        )


def _step_lattice_sum(
    g: LatticeFunction, sign: int, upper_index: int | None
) -> complex:
    lat = g.lattice
    top = g.window if upper_index is None else min(upper_index, g.window)
    total = CompensatedSum()
    for m in range(top, -g.window - 1, -1):
        total.add(lat.weight(m) * g.value(sign, m))
    return total.value


def pair(d: QDistribution, g: LatticeFunction, tol: float = 1e-9) -> complex:
    r"""Apply a distribution to a test function.

    The pairing rules per representation:

    * regular ``f``: the scalar product ``(f, g)_q``; a derivative
      order ``k`` first replaces ``g`` by the transfer-rule image
      ``(-q^{-1} D_{q^{-1}})^k g`` on a window shrunk by ``k``.
    * step on the ``epsilon`` half-axis: the improper integral
      ``int_0^inf g(epsilon z) d_q z`` as a lattice sum (restricted
      to indices ``<= shift_index`` for shifted steps).  Its first
      derivative pairs as ``epsilon * g(0^epsilon)`` (or ``epsilon``
      times the shifted-delta sift), higher ones continue through
      the transfer rule.
    * delta at the origin: ``g(0)`` through the symmetric lattice
      limit, with derivative order ``n`` pairing as

      .. math::

          (D_q^n \delta_q)(g)
              = (-q^{-1})^n\,(D_{q^{-1}}^n g)(0),

      and a Laurent factor ``x**(-n)`` pairing as
      ``q^{n(n-1)/2} (D_{q^{-1}}^n g)(0) / [[n]]_q!``; positive
      monomial factors annihilate the origin delta.  A shifted delta
      (``center`` set) sifts the value or inverse-base derivative at
      its center directly.

    Pairings that touch the origin from both sides check origin
    continuity (``|g(x0 q^W) - g(-x0 q^W)|`` against ``tol``) and
    raise :class:`OriginContinuityError` when it fails.

    **Examples**

        >>> from qlattice.qdist import (GeometricLattice, LatticeFunction,
        ...                             QDistribution, pair)
        >>> lat = GeometricLattice(0.5, 1.0)
        >>> g = LatticeFunction.sample(lat, lambda x: x * x + 2.0, value_at_zero=2.0)
        >>> pair(QDistribution.delta(lat), g)
        2.0
    """
    if d.lattice != g.lattice:
        raise ValueError("distribution and test function live on different lattices")
    qv = d.lattice.step
    if d.kind == "regular":
        if d.derivative_order == 0:
            return d.coefficient * scalar_product(d.kernel, g)
        k = d.derivative_order
        w = g.window - k
        factor = (-1.0 / qv) ** k
        transferred = LatticeFunction(
            g.lattice,
            w,
            {
                (sign, m): factor * _inverse_d_at(g, sign, m, k)
                for sign in (1, -1)
                for m in range(-w, w + 1)
            },
        )
        return d.coefficient * scalar_product(d.kernel, transferred)
    if d.kind == "step":
        eps = d.step_sign
        k = d.derivative_order
        if k == 0:
            return d.coefficient * _step_lattice_sum(g, eps, d.shift_index)
        factor = eps * (-1.0 / qv) ** (k - 1)
        if d.shift_index is None:
            limit = _edge_inverse_derivative(g, eps, k - 1, tol)
            return d.coefficient * factor * limit
        return d.coefficient * factor * _inverse_d_at(g, eps, d.shift_index, k - 1)
    # delta
    if d.power > 0:
        return 0.0j * d.coefficient
    n_extra = -d.power
    n_total = d.derivative_order + n_extra
    base = d.coefficient * (-1.0 / qv) ** d.derivative_order
    if n_extra:
        base *= q_power(qv, n_extra * (n_extra - 1) / 2.0) / q_factorial(n_extra, qv)
    if d.center is not None:
        sign, m = d.center
        return base * _inverse_d_at(g, sign, m, n_total)
    if d.side == "both":
        _check_origin_continuity(g, tol)
    return base * _origin_limit(g, d.side, n_total, tol)


def distribution_derivative(d: QDistribution, k: int) -> QDistribution:
    """The ``k``-th Jackson derivative of a distribution.

    Raises the derivative order; the pairing of the result follows
    the transfer rule automatically.  ``k = 0`` returns the input.
    """
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if k == 0:
        return d
    return replace(d, derivative_order=d.derivative_order + k)


def shifted_delta_weights(
    a: tuple[int, int], lattice: GeometricLattice
) -> LatticeFunction:
    r"""Lattice-weight view of the delta shifted to the point ``a``.

    The shifted delta is an honest lattice function: a single weight

    .. math::

        \frac{1}{(1-q)\, x_0 q^m}

    at ``a = (sign, m)``, which is the scaled indicator.  Pairing any
    ``f`` against it through the scalar product reproduces ``f(a)``.
    The origin has no such representation; use the origin delta.
    """
    sign, m = a
    if sign not in (1, -1):
        raise ValueError("lattice point sign must be +1 or -1")
    weight = 1.0 / ((1.0 - lattice.step) * lattice.x0 * q_power(lattice.step, m))
    window = max(_DEFAULT_WINDOW, abs(m) + 1)
    return LatticeFunction(lattice, window, {(sign, m): weight})


def bump_phi(x: float, y: float, q) -> float:
    r"""The smooth bump that interpolates the lattice indicators.

    Built as the x-derivative of a smoothed ramp: with
    ``b = (1-q) |y| / 2`` (half the gap between ``y`` and its inner
    lattice neighbor) and ``u = x - y``,

    .. math::

        \varphi_q(x, y) = \partial_x \psi(x - y, b), \qquad
        \psi(u, b) = b^2 e\, \exp\!\bigl(-\exp(u / (u^2 - b^2))\bigr)

    on ``|u| < b``, with the ramp constant outside.  The bump is
    supported on ``(y - b, y + b)``, reaches exactly 1 at ``x = y``,
    and neighboring lattice points fall outside each other's support,
    so on lattice arguments it reduces to the Kronecker indicator.

    **Examples**

        >>> from qlattice.qdist import bump_phi
        >>> bump_phi(0.25, 0.25, 0.5)
        1.0
        >>> bump_phi(0.2, 0.25, 0.5)
        0.0
        >>> bump_phi(0.5, 0.25, 0.5)
        0.0
    """
    qv = q.q if isinstance(q, DeformationParameter) else float(q)
    if y == 0:
        raise ValueError("bump_phi is undefined at y = 0 (support degenerates)")
    b = 0.5 * (1.0 - qv) * abs(y)
    u = x - y
    if abs(u) >= b:
        return 0.0
    r = u / (u * u - b * b)
    inner = math.exp(r) if r < 700.0 else float("inf")
    if inner == float("inf"):
        return 0.0
    log_mag = (
        math.log(b * b) + 1.0 + r - inner + math.log(u * u + b * b)
        - 2.0 * math.log(b * b - u * u)
    )
    if log_mag < -745.0:
        return 0.0
    return math.exp(log_mag)


def scale_action(d: QDistribution, n: int) -> QDistribution:
    r"""The lattice dilation ``x -> q^n x`` acting on a distribution.

    The delta rescales, ``\delta_q(q^n x) = q^{-n} \delta_q(x)``, so
    its pairing weight gains ``q^{-n}``; steps are dilation-invariant
    and pass through unchanged; a regular kernel is reindexed
    (``f(q^n x)`` reads the value ``n`` indices deeper).
    """
    if n == 0:
        return d
    qv = d.lattice.step
    if d.kind == "delta":
        return replace(d, coefficient=d.coefficient * q_power(qv, -n))
    if d.kind == "step":
        return d
    w = d.kernel.window - abs(n)
    if w < 1:
        raise ValueError("kernel window too small to reindex by that scale")
    reindexed = LatticeFunction(
        d.lattice,
        w,
        {
            (sign, m): d.kernel.value(sign, m + n)
            for sign in (1, -1)
            for m in range(-w, w + 1)
        },
        value_at_zero=d.kernel.value_at_zero,
    )
    return replace(d, kernel=reindexed)
