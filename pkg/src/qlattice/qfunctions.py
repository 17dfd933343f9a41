"""The q-exponential family and the eight q-trigonometric variants.

Three exponentials live here. ``exp_q`` carries the factorial-normalized
series sum z**k / [[k]]_q! and is the one whose Jackson derivative reproduces
itself; ``small_e_q`` and ``big_E_q`` are the classical pair

    e_q(z) = 1 / (z; q)_oo        (poles at z = q**-k),
    E_q(z) = (-z; q)_oo           (entire),

related by exp_q(z) = e_q((1-q) z) and exp_q at inverse base
= E_q((1-q) z). Every product is evaluated in log space so arguments of
magnitude 1e3 and beyond neither overflow nor underflow; values whose
magnitude genuinely exceeds double range saturate to an infinite magnitude
with the phase dropped.

The trigonometric variants come in four families (lower/upper crossed with
tilde/plain); ``TrigKind`` picks one, ``q_trig`` evaluates it, and
``q_trig_bound_check`` reports the four amplitude-bound margins. The margins
are reported exactly as the bounding statements read; two of the four bound
statements are numerically false (see the bound check's docstring), and the
margins simply come out negative there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .qcore import (
    CompensatedSum,
    DeformationParameter,
    _qval,
    q_number,
    q_pochhammer_infinite,
    q_pochhammer_log,
    q_power,
)

__all__ = [
    "PoleError",
    "QExpEvaluation",
    "TrigKind",
    "exp_q",
    "small_e_q",
    "big_E_q",
    "e_q_partial_fraction",
    "q_trig",
    "q_trig_bound_check",
    "TrigBoundReport",
]

# Below this relative distance to a pole q**-k the quotient 1/(z; q)_oo has
# lost more than half its mantissa; evaluation is refused instead.
_POLE_PROXIMITY = 1e-9

# Series/product switch for exp_q: series while |(1-q) z| <= 0.75 keeps the
# series terms decaying at least geometrically with ratio 0.75.
_SERIES_SWITCH = 0.75


class PoleError(ValueError):
    """Raised when an argument lands within the pole guard of e_q."""


@dataclass(frozen=True)
class QExpEvaluation:
    """One evaluated q-exponential together with how it was computed.

    Fields:
        value: the evaluation result.
        method: which route produced it, one of "series", "product",
            "partial_fraction". Routes agree within 1e-10 relative on their
            common domain (held to that in the test suite).
        terms_used: series terms summed, product factors multiplied, or
            partial fractions added, depending on the method.
    """

    value: complex
    method: str
    terms_used: int


@dataclass(frozen=True)
class TrigKind:
    """Selector for one of the eight q-trigonometric variants.

    Fields:
        kind: "sin" or "cos".
        family: "tilde_lower" (series in e_q, unscaled argument),
            "tilde_upper" (series in E_q, unscaled argument),
            "plain_lower" (argument scaled by (1-q), base q; the family
            with the classical q -> 1 limit), or
            "plain_upper" (argument scaled by (1-q), base q**-1).
    """

    kind: str
    family: str

    _KINDS = ("sin", "cos")
    _FAMILIES = ("tilde_lower", "tilde_upper", "plain_lower", "plain_upper")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}, got {self.kind!r}")
        if self.family not in self._FAMILIES:
            raise ValueError(
                f"family must be one of {self._FAMILIES}, got {self.family!r}"
            )


def _exp_clamped(lg: complex) -> complex:
    """exp() of a complex log, saturating instead of raising out of range.

    Magnitudes above double range come back as an infinite magnitude with
    phase dropped; magnitudes below the subnormal floor come back as 0.
    """
    if lg.real > 709.0:
        return complex(math.inf, 0.0)
    if lg.real < -745.0:
        return 0.0 + 0.0j
    return cmath.exp(lg)


def _check_pole(a: complex, qv: float) -> None:
    """Refuse evaluation when a is within the pole guard of some q**-k.

    The poles q**-k are all >= 1, so only |a| >= 1 - guard can be close to
    one; the relative distance |a q^k - 1| is tested for every k with q**-k
    in range of |a|.
    """
    mag = abs(a)
    if mag < 1.0 - 1e-6:
        return
    k_max = int(math.log(mag * (1.0 + 1e-6)) / -math.log(qv)) + 2
    qk = 1.0
    for k in range(k_max + 1):
        if abs(a * qk - 1.0) < _POLE_PROXIMITY:
            raise PoleError(
                f"argument {a!r} is within {_POLE_PROXIMITY} (relative) of the "
                f"pole q**-{k}"
            )
        qk *= qv


def _series_exp_q(z: complex, qv: float, tol: float) -> tuple[complex, int]:
    """Sum z**k / [[k]]_q! until the term is negligible three times running."""
    acc = CompensatedSum(0.0 + 0.0j)
    term: complex = 1.0
    acc.add(term)
    small_streak = 0
    k = 0
    while k < 10000:
        k += 1
        term = term * z / q_number(k, qv)
        acc.add(term)
        if abs(term) < tol * max(abs(acc.value), 1e-300):
            small_streak += 1
            if small_streak >= 3:
                break
        else:
            small_streak = 0
    return acc.value, k + 1


def exp_q(z: complex, q, tol: float = 1e-15) -> QExpEvaluation:
    r"""Evaluates the factorial-normalized q-exponential

    .. math ::

        \exp_q(z) = \sum_{k=0}^{\infty} \frac{z^k}{[[k]]_q!}
                  = \operatorname{e}_q((1-q)\hspace{0.05em} z)

    the eigenfunction of the Jackson derivative. The series converges for
    |z| < 1/(1-q); the implementation sums it while |(1-q) z| <= 0.75 and
    otherwise switches to the infinite-product form of e_q at the rescaled
    argument. Poles sit where (1-q) z = q**-k; arguments within 1e-9
    relative of one raise :class:`PoleError` instead of returning garbage.

    **Examples**

    Normalization and the classical limit::

        >>> exp_q(0.0, 0.5).value
        (1+0j)
        >>> import math
        >>> abs(exp_q(1.0, 0.999).value - math.e) < abs(exp_q(1.0, 0.9).value - math.e)
        True

    The reported method follows the switch rule::

        >>> exp_q(1.0, 0.5).method
        'series'
        >>> exp_q(1.9, 0.5).method
        'product'

    A real argument on a pole is rejected ((1-q) z = 1 at z = 2, q = 0.5)::

        >>> exp_q(2.0, 0.5)
        Traceback (most recent call last):
            ...
        qlattice.qfunctions.PoleError: argument (1+0j) is within 1e-09 (relative) of the pole q**-0
    """
    qv = _qval(q)
    a = complex(z) * (1.0 - qv)
    if abs(a) <= _SERIES_SWITCH:
        value, used = _series_exp_q(complex(z), qv, tol)
        return QExpEvaluation(value, "series", used)
    ev = small_e_q(a, qv, tol)
    return QExpEvaluation(ev.value, "product", ev.terms_used)


def small_e_q(z: complex, q, tol: float = 1e-15, method: str = "product") -> QExpEvaluation:
    r"""Evaluates the unnormalized q-exponential

    .. math ::

        \operatorname{e}_q(z) = \frac{1}{(z; q)_\infty}
                              = \sum_{k=0}^{\infty} \frac{z^k}{(q; q)_k}

    whose poles are the points q**-k on the positive real axis. The product
    form (the default) is valid everywhere off the poles and is computed in
    log space, so enormous arguments underflow gracefully to 0 rather than
    overflowing an intermediate. The series form (``method="series"``) only
    converges for |z| < 1 and exists as the cross-check route.

    **Examples**

    ::

        >>> small_e_q(0.0, 0.5).value
        (1+0j)
        >>> ev = small_e_q(-1.0, 0.5)
        >>> ev.method
        'product'

    The reciprocal pairing with the entire partner E_q::

        >>> v = small_e_q(0.3, 0.5).value * big_E_q(-0.3, 0.5).value
        >>> abs(v - 1.0) < 1e-14
        True
    """
    qv = _qval(q)
    if not (0.0 < qv < 1.0):
        raise ValueError(f"e_q requires 0 < q < 1, got {qv!r}")
    zc = complex(z)
    if method == "series":
        if abs(zc) >= 1.0:
            raise ValueError(f"series form of e_q requires |z| < 1, got |z| = {abs(zc)}")
        acc = CompensatedSum(0.0 + 0.0j)
        term: complex = 1.0
        acc.add(term)
        small_streak = 0
        k = 0
        while k < 10000:
            k += 1
            term = term * zc / (1.0 - q_power(qv, k))
            acc.add(term)
            if abs(term) < tol * max(abs(acc.value), 1e-300):
                small_streak += 1
                if small_streak >= 3:
                    break
            else:
                small_streak = 0
        return QExpEvaluation(acc.value, "series", k + 1)
    if method != "product":
        raise ValueError(f"method must be 'product' or 'series', got {method!r}")
    _check_pole(zc, qv)
    if zc == 0:
        return QExpEvaluation(1.0 + 0.0j, "product", 0)
    lg = q_pochhammer_log(zc, qv, tol)
    # Factor count mirrors the truncation rule of the log accumulator.
    used = max(1, int(math.log(tol * (1.0 - qv) / max(abs(zc), 1e-300)) / math.log(qv)) + 1)
    return QExpEvaluation(_exp_clamped(-lg), "product", used)


def big_E_q(z: complex, q, tol: float = 1e-15, method: str = "product") -> QExpEvaluation:
    r"""Evaluates the entire q-exponential

    .. math ::

        \operatorname{E}_q(z) = (-z; q)_\infty
        = \sum_{k=0}^{\infty} \frac{q^{k(k-1)/2} z^k}{(q; q)_k}

    which has no poles; the graded q**(k(k-1)/2) weights make the series
    converge for every z, and the product form is a finite log-space sum.
    For arguments so large that the true magnitude exceeds double range the
    value saturates to an infinite magnitude (phase dropped).

    **Examples**

    ::

        >>> big_E_q(0.0, 0.5).value
        (1+0j)
        >>> ev_p = big_E_q(2.5, 0.5)
        >>> ev_s = big_E_q(2.5, 0.5, method="series")
        >>> abs(ev_p.value - ev_s.value) / abs(ev_p.value) < 1e-12
        True
    """
    qv = _qval(q)
    if not (0.0 < qv < 1.0):
        raise ValueError(f"E_q requires 0 < q < 1, got {qv!r}")
    zc = complex(z)
    if method == "series":
        acc = CompensatedSum(0.0 + 0.0j)
        term: complex = 1.0
        acc.add(term)
        small_streak = 0
        k = 0
        qk = 1.0  # q**(k-1) entering the ratio q^{k-1} z / (1 - q^k)
        while k < 10000:
            k += 1
            term = term * qk * zc / (1.0 - q_power(qv, k))
            qk *= qv
            acc.add(term)
            if abs(term) < tol * max(abs(acc.value), 1e-300):
                small_streak += 1
                if small_streak >= 3:
                    break
            else:
                small_streak = 0
        return QExpEvaluation(acc.value, "series", k + 1)
    if method != "product":
        raise ValueError(f"method must be 'product' or 'series', got {method!r}")
    if zc == 0:
        return QExpEvaluation(1.0 + 0.0j, "product", 0)
    lg = q_pochhammer_log(-zc, qv, tol)
    used = max(1, int(math.log(tol * (1.0 - qv) / max(abs(zc), 1e-300)) / math.log(qv)) + 1)
    return QExpEvaluation(_exp_clamped(lg), "product", used)


def e_q_partial_fraction(z: complex, q, K: int = 60) -> complex:
    r"""Evaluates e_q(z) through its partial fraction decomposition

    .. math ::

        \operatorname{e}_q(z) = \sum_{k=0}^{\infty} \frac{c_k}{1 - z q^k},
        \qquad
        c_k = \frac{(-1)^k q^{k(k+1)/2}}{(q; q)_\infty (q; q)_k}

    truncated after K + 1 terms. The coefficients are generated by the
    ratio recursion ``c_{k+1} / c_k = -q^{k+1} / (1 - q^{k+1})``, which
    reproduces the closed form exactly.

    .. note ::
        This route is opt-in and never auto-selected. Its conditioning
        degrades sharply as q -> 1: the alternating coefficients reach a
        peak magnitude near k ~ ln 2 / ln(1/q) before the Gaussian decay
        sets in, and the cancellation amplifies roundoff by roughly
        ``eps * max_k |c_k| / (q; q)_oo``. At q = 0.5 that is machine
        precision; at q = 0.9 the error floor is ~1e-8; at q = 0.99 the
        sum is numerically meaningless. Use :func:`small_e_q` when you just
        need the value.

    **Examples**

    ::

        >>> abs(e_q_partial_fraction(0.0, 0.5, 60) - 1.0) < 1e-14
        True
        >>> v = e_q_partial_fraction(-1.0, 0.5, 60)
        >>> abs(v - small_e_q(-1.0, 0.5).value) < 1e-10
        True
    """
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    qv = _qval(q)
    zc = complex(z)
    # Pole guard: 1 - z q^k vanishing for some k <= K.
    qk = 1.0
    for k in range(K + 1):
        if abs(zc * qk - 1.0) < _POLE_PROXIMITY:
            raise PoleError(
                f"argument {zc!r} is within {_POLE_PROXIMITY} (relative) of the "
                f"pole q**-{k}"
            )
        qk *= qv
    euler = q_pochhammer_infinite(qv, qv)
    c = 1.0 / euler
    acc = CompensatedSum(0.0 + 0.0j)
    qk = 1.0
    for k in range(K + 1):
        acc.add(c / (1.0 - zc * qk))
        c *= -q_power(qv, k + 1) / (1.0 - q_power(qv, k + 1))
        qk *= qv
    return acc.value


def _eval_pair(x: complex, qv: float, family: str) -> tuple[complex, complex]:
    """(sin-type, cos-type) values of the requested family at x."""
    if family == "tilde_lower":
        wp = small_e_q(1j * x, qv).value
        wm = small_e_q(-1j * x, qv).value
    elif family == "tilde_upper":
        wp = big_E_q(1j * x, qv).value
        wm = big_E_q(-1j * x, qv).value
    elif family == "plain_lower":
        a = (1.0 - qv) * x
        wp = small_e_q(1j * a, qv).value
        wm = small_e_q(-1j * a, qv).value
    elif family == "plain_upper":
        a = (1.0 - qv) * x
        wp = big_E_q(1j * a, qv).value
        wm = big_E_q(-1j * a, qv).value
    else:  # pragma: no cover - TrigKind already validated
        raise ValueError(family)
    return (wp - wm) / 2j, (wp + wm) / 2.0


def q_trig(spec: TrigKind, x: complex, q) -> complex:
    r"""Evaluates one q-trigonometric variant.

    The tilde families combine e_q or E_q at +- i x directly; the plain
    families do the same at the rescaled argument (1 - q) x, which is what
    gives them the classical q -> 1 limit. The plain upper family
    (base q**-1) satisfies Sin_q(x) = sin at inverse base, realized here as
    E_q at the rescaled argument.

    For real x the lower-family values are taken as the real and imaginary
    parts of a single e_q(i (1-q) x) evaluation, so the Euler-style split

    .. math ::

        \exp_q(\mathrm{i} x) = \cos_q(x) + \mathrm{i} \sin_q(x)

    holds exactly by construction, not merely to rounding.

    **Examples**

    ::

        >>> q_trig(TrigKind("sin", "plain_lower"), 0.0, 0.5)
        0.0
        >>> q_trig(TrigKind("cos", "plain_lower"), 0.0, 0.5)
        1.0
        >>> import math
        >>> abs(q_trig(TrigKind("sin", "plain_lower"), 1.0, 0.999) - math.sin(1.0)) < 2e-3
        True
    """
    if not isinstance(spec, TrigKind):
        raise TypeError(f"spec must be a TrigKind, got {type(spec).__name__}")
    qv = _qval(q)
    xc = complex(x)
    if xc.imag == 0.0:
        # Real argument: one evaluation, exact Euler split.
        xr = xc.real
        if spec.family in ("tilde_lower", "plain_lower"):
            a = xr if spec.family == "tilde_lower" else (1.0 - qv) * xr
            w = small_e_q(1j * a, qv).value
        else:
            a = xr if spec.family == "tilde_upper" else (1.0 - qv) * xr
            w = big_E_q(1j * a, qv).value
        return w.imag if spec.kind == "sin" else w.real
    s, c = _eval_pair(xc, qv, spec.family)
    return s if spec.kind == "sin" else c


@dataclass(frozen=True)
class TrigBoundReport:
    """The four amplitude-bound margins at one (x, q) point.

    Each margin is (bound) - |value|; a nonnegative margin means the bound
    statement holds at this point. Fields:

        x, q: the evaluation point.
        margin_sin_tilde: (-1; q)_oo |x| / ((q; q)_oo (1 + x^2)) - |sin-tilde(x)|.
        margin_cos_tilde: (-1/q; q)_oo / ((q; q)_oo (1 + x^2)) - |cos-tilde(x)|.
            The constant here is the one the series estimate actually
            produces, E_q at argument 1/q; the often-quoted smaller constant
            (-q; q)_oo is falsified numerically (margin -5.1e-3 at
            q = 0.3, x = -5.4).
        margin_sin_upper: |x| - |Sin-tilde(x)|. This bound statement is
            numerically FALSE near small x (the ratio reaches 1/(1-q)); the
            margin goes negative there and is reported as computed.
        margin_cos_upper: 1 - |Cos-tilde(x)|. Numerically FALSE for large
            x (the entire E_q grows superpolynomially); reported as computed.
    """

    x: float
    q: float
    margin_sin_tilde: float
    margin_cos_tilde: float
    margin_sin_upper: float
    margin_cos_upper: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.margin_sin_tilde,
            self.margin_cos_tilde,
            self.margin_sin_upper,
            self.margin_cos_upper,
        )


def q_trig_bound_check(x: float, q) -> TrigBoundReport:
    r"""Evaluates the four amplitude-bound margins at a real point.

    The two tilde-lower bounds come from the partial fraction forms

    .. math ::

        \widetilde{\sin}_q(x) = \frac{x}{(q;q)_\infty} \sum_k
        \frac{(-1)^k q^{k(k+3)/2}}{(q;q)_k (1 + x^2 q^{2k})}

    (and its cosine twin with weight q**(k(k+1)/2)); bounding each term by
    its k-th numerator over (1 + x^2) gives bound constants E_q(1) =
    (-1; q)_oo for the sine and E_q(1/q) = (-1/q; q)_oo for the cosine.
    The upper-family statements |Sin-tilde| <= |x| and |Cos-tilde| <= 1 are
    evaluated verbatim; see :class:`TrigBoundReport` for which of the four
    statements actually hold.

    >>> rep = q_trig_bound_check(0.0, 0.5)
    >>> rep.margin_sin_upper, rep.margin_cos_upper
    (0.0, 0.0)
    >>> rep.margin_sin_tilde
    0.0
    """
    qv = _qval(q)
    xf = float(x)
    euler = q_pochhammer_infinite(qv, qv).real
    minus_one = q_pochhammer_infinite(-1.0, qv).real
    minus_inv_q = q_pochhammer_infinite(-1.0 / qv, qv).real
    one_plus_x2 = 1.0 + xf * xf

    sin_tilde = abs(q_trig(TrigKind("sin", "tilde_lower"), xf, qv))
    cos_tilde = abs(q_trig(TrigKind("cos", "tilde_lower"), xf, qv))
    sin_upper = abs(q_trig(TrigKind("sin", "tilde_upper"), xf, qv))
    cos_upper = abs(q_trig(TrigKind("cos", "tilde_upper"), xf, qv))

    return TrigBoundReport(
        x=xf,
        q=qv,
        margin_sin_tilde=minus_one * abs(xf) / (euler * one_plus_x2) - sin_tilde,
        margin_cos_tilde=minus_inv_q / (euler * one_plus_x2) - cos_tilde,
        margin_sin_upper=abs(xf) - sin_upper,
        margin_cos_upper=1.0 - cos_upper,
    )
