"""Closed-form quantities for G(n, p) localization: regimes, sensor bounds, shell estimates.

All logarithms are natural.  ``d = p * n`` is the expected average degree
and ``i`` the sphere exponent; ``c = d**i / n``.

The ``A``/``B`` parameters of the near-threshold cases are limits and cannot
be read off a finite ``n``.  :func:`compute_regime` therefore only *suggests*
a :class:`CaseTag` from the following finite-n proxies, and every case
formula takes ``A`` or ``B`` explicitly:

* ``SUBCRITICAL`` if ``c < 1/log n``
* ``FINITE_A`` if ``1/log n <= c <= log log n``
* otherwise, with ``gap = c - (log d - log log d)`` and ``h = log log n``:
  ``LARGE_C_SMALL_B`` if ``gap < -h``, ``FINITE_B`` if ``|gap| <= h``,
  ``LARGE_B`` if ``gap > h``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import CaseMismatch, DegenerateRegime, EpsOutOfRange


class CaseTag(str, enum.Enum):
    SUBCRITICAL = "subcritical"        # c -> 0
    FINITE_A = "finite-A"              # c -> A in (0, inf)
    LARGE_C_SMALL_B = "large-c-small-B"  # c -> inf, B -> -inf
    FINITE_B = "finite-B"              # c - (log d - log log d) -> B
    LARGE_B = "large-B"                # B -> inf, c <= 3 log n


I_RULES = ("sparse", "dense", "dense-literal")


@dataclass(frozen=True)
class RegimeParams:
    n: float
    d: float
    i: int
    c: float
    x: float
    omega: float
    omega_prime: float
    case: CaseTag
    i_rule: str = "sparse"

    @property
    def log_n(self) -> float:
        return math.log(self.n)

    @property
    def loglog_n(self) -> float:
        return math.log(math.log(self.n))

    @property
    def log_d(self) -> float:
        return math.log(self.d)

    @property
    def d_pow_i(self) -> float:
        return self.d ** self.i

    def b_gap(self) -> float:
        """``c - (log d - log log d)``: the finite-n stand-in for ``B``."""
        return self.c - (self.log_d - math.log(self.log_d))


def _largest_power(d: float, limit: float) -> int:
    """Largest integer ``i >= 0`` with ``d**i <= limit`` (relative slack 1e-12)."""
    i = max(0, int(math.floor(math.log(limit) / math.log(d))))
    tol = 1 + 1e-12
    while d ** (i + 1) <= limit * tol:
        i += 1
    while i > 0 and d ** i > limit * tol:
        i -= 1
    return i


def suggest_case(n: float, d: float, c: float) -> CaseTag:
    log_n = math.log(n)
    h = math.log(log_n)
    if c < 1 / log_n:
        return CaseTag.SUBCRITICAL
    if c <= h:
        return CaseTag.FINITE_A
    gap = c - (math.log(d) - math.log(math.log(d)))
    if gap < -h:
        return CaseTag.LARGE_C_SMALL_B
    if gap <= h:
        return CaseTag.FINITE_B
    return CaseTag.LARGE_B


def omega_main(n: float, d: float, i: int) -> float:
    log_n = math.log(n)
    return min(d / log_n, n / d ** i, log_n ** 4 * math.log(log_n) ** 2)


def omega_case(n: float, d: float, i: int, case: CaseTag) -> float:
    """Error-scale function of the near-threshold cases; case (iii)'s form is reused for (ii) and (iv)."""
    log_n = math.log(n)
    h = math.log(log_n)
    if case is CaseTag.SUBCRITICAL:
        return omega_main(n, d, i)
    if case is CaseTag.FINITE_A:
        return min(d / log_n ** 3, log_n ** 2 / h ** 2)
    return min(d / log_n ** 3, h)


def compute_regime(n: float, d: float, i_override: int | None = None,
                   i_rule: str = "sparse", case: CaseTag | None = None) -> RegimeParams:
    """Fill in ``i, c, x, omega, omega'`` and a suggested case tag.

    ``i_rule`` picks the default exponent: ``"sparse"`` is the largest ``i``
    with ``d**i <= n``; ``"dense"`` the largest with ``d**i / n <= 3 log n``;
    ``"dense-literal"`` the largest with ``d**i <= 3 log n``.
    """
    if n < 3:
        raise DegenerateRegime(f"need n >= 3 so that log log n > 0, got n={n}")
    if not 1 < d < n:
        raise DegenerateRegime(f"need 1 < d < n, got d={d}, n={n}")
    if i_override is not None:
        i = int(i_override)
    elif i_rule == "sparse":
        i = _largest_power(d, n)
    elif i_rule == "dense":
        i = _largest_power(d, 3 * n * math.log(n))
    elif i_rule == "dense-literal":
        i = _largest_power(d, 3 * math.log(n))
    else:
        raise DegenerateRegime(f"unknown i rule {i_rule!r}; expected one of {I_RULES}")
    if i < 1:
        raise DegenerateRegime(f"no exponent i >= 1 fits rule {i_rule!r} for n={n}, d={d}")
    c = d ** i / n
    tag = case if case is not None else suggest_case(n, d, c)
    return RegimeParams(
        n=float(n), d=float(d), i=i, c=c, x=math.log(d) / math.log(n),
        omega=omega_main(n, d, i), omega_prime=omega_case(n, d, i, tag),
        case=tag, i_rule=i_rule if i_override is None else "override",
    )


class LowerBound(NamedTuple):
    value: float
    vacuous: bool


def lower_bound_sensors(r: RegimeParams) -> LowerBound:
    """``(log d - 3 log log n) n / d**i``; flagged vacuous when not positive.

    A log factor within rounding of zero (``d = log**3 n``) is snapped to 0.
    """
    factor = r.log_d - 3 * r.loglog_n
    if abs(factor) <= 1e-12 * r.log_d:
        factor = 0.0
    value = factor * r.n / r.d_pow_i
    return LowerBound(value, value <= 0)


def _log_factor(r: RegimeParams) -> float:
    return r.log_d + 2 * r.loglog_n


def upper_bound_sensors_main(r: RegimeParams, corrected: bool = True) -> float:
    """Sensor count for the random cop below the threshold: ``(1 + omega**(-1/3)) (log d + 2 log log n) n / d**i``.

    ``corrected=False`` drops the ``(1 + omega**(-1/3))`` factor (its limit).
    """
    corr = 1 + r.omega ** (-1 / 3) if corrected else 1.0
    return corr * _log_factor(r) * r.n / r.d_pow_i


def case_factor(case: CaseTag, r: RegimeParams, A: float | None = None, B: float | None = None) -> float:
    """Case-specific multiplier of ``log d + 2 log log n`` in the near-threshold bounds."""
    _check_case_args(case, A, B)
    if case is CaseTag.FINITE_A:
        return math.exp(A) / -math.expm1(-A)
    if case is CaseTag.LARGE_C_SMALL_B:
        return math.exp(r.c)
    if case is CaseTag.FINITE_B:
        return math.exp(r.c) / (math.exp(B) + 1)
    if case is CaseTag.LARGE_B:
        return r.n / r.d ** (r.i - 1)
    raise CaseMismatch("the subcritical case uses upper_bound_sensors_main")


def _check_case_args(case: CaseTag, A: float | None, B: float | None) -> None:
    if case is CaseTag.FINITE_A:
        if A is None or B is not None or A <= 0:
            raise CaseMismatch("case finite-A needs A > 0 and no B")
    elif case is CaseTag.FINITE_B:
        if B is None or A is not None:
            raise CaseMismatch("case finite-B needs B and no A")
    elif A is not None or B is not None:
        raise CaseMismatch(f"case {case.value} takes neither A nor B")


def upper_bound_sensors_cases(r: RegimeParams, A: float | None = None, B: float | None = None,
                              case: CaseTag | None = None, corrected: bool = True) -> float:
    """Near-threshold sensor count ``(1 + omega'**(-1/3)) (log d + 2 log log n) * case_factor``."""
    case = r.case if case is None else case
    omega_p = r.omega_prime if case is r.case else omega_case(r.n, r.d, r.i, case)
    corr = 1 + omega_p ** (-1 / 3) if corrected else 1.0
    return corr * _log_factor(r) * case_factor(case, r, A, B)


class SpherePrediction(NamedTuple):
    value: float
    band: float


def predicted_sphere_size(r: RegimeParams, j: int, set_size: int = 1) -> SpherePrediction:
    """Leading-order ``|S(V', j)| ~ d**j |V'|`` with relative band ``1/sqrt(omega) + d**j / n``."""
    if set_size not in (1, 2):
        raise ValueError("sphere estimates cover sets of one or two vertices")
    return SpherePrediction(r.d ** j * set_size, 1 / math.sqrt(r.omega) + r.d ** j / r.n)


class SymmdiffPrediction(NamedTuple):
    value: float
    branch: str  # "main" or "polylog"


def predicted_symmdiff(r: RegimeParams, c: float | None = None) -> SymmdiffPrediction:
    """``|S(x,i) \\ S(y,i)| ~ n (1 - e**-c) e**-c``; beyond ``c = log n - 4 log log n`` only an ``O(log**4 n)`` ceiling."""
    c = r.c if c is None else c
    if c <= r.log_n - 4 * r.loglog_n:
        return SymmdiffPrediction(r.n * -math.expm1(-c) * math.exp(-c), "main")
    return SymmdiffPrediction(r.log_n ** 4, "polylog")


def predicted_s_case(r: RegimeParams, A: float | None = None, B: float | None = None,
                     case: CaseTag | None = None) -> float:
    """Leading-order size of a distinguishing set in each of the five regimes."""
    case = r.case if case is None else case
    if case is CaseTag.SUBCRITICAL:
        if A is not None or B is not None:
            raise CaseMismatch("case subcritical takes neither A nor B")
        return 2 * r.d_pow_i
    _check_case_args(case, A, B)
    if case is CaseTag.FINITE_A:
        return 2 * r.n * -math.expm1(-A) * math.exp(-A)
    if case is CaseTag.LARGE_C_SMALL_B:
        return 2 * r.n * math.exp(-r.c)
    if case is CaseTag.FINITE_B:
        return 2 * r.d ** (r.i - 1) * (1 + math.exp(-B))
    return 2 * r.d ** (r.i - 1)


def chernoff_tail(mean: float, eps: float) -> float:
    """Two-sided binomial tail bound ``2 exp(-eps**2 mean / 3)``, valid for ``0 < eps < 3/2``."""
    if not 0 < eps < 1.5:
        raise EpsOutOfRange(f"eps must lie in (0, 3/2), got {eps}")
    if mean <= 0:
        raise EpsOutOfRange(f"mean must be positive, got {mean}")
    return 2 * math.exp(-eps * eps * mean / 3)


def r_value(n: float, d: float) -> float:
    """``n log**3 n / d``: the guaranteed size scale of the robber's far class."""
    if n < 3 or d <= 0:
        raise DegenerateRegime("r needs n >= 3 and d > 0")
    return n * math.log(n) ** 3 / d


def t_f(n: float) -> float:
    """``log n / log log n``: rounds within which the random cop should capture."""
    if n <= math.e:
        raise DegenerateRegime("t_F needs n > e")
    return math.log(n) / math.log(math.log(n))


K_RULES = {
    "thm51": "lower bound (log d - 3 log log n) n / d^i",
    "thm61": "random-cop sensors with (1 + omega^-1/3) correction",
    "thm61-limit": "random-cop sensors without correction",
    "thm64-i": "near-threshold, finite A",
    "thm64-ii": "near-threshold, c large and B -> -inf",
    "thm64-iii": "near-threshold, finite B",
    "thm64-iv": "near-threshold, B -> inf",
}

_RULE_CASES = {
    "thm64-i": CaseTag.FINITE_A,
    "thm64-ii": CaseTag.LARGE_C_SMALL_B,
    "thm64-iii": CaseTag.FINITE_B,
    "thm64-iv": CaseTag.LARGE_B,
}


def k_rule_value(rule: str, r: RegimeParams, A: float | None = None, B: float | None = None) -> float:
    if rule == "thm51":
        return lower_bound_sensors(r).value
    if rule == "thm61":
        return upper_bound_sensors_main(r)
    if rule == "thm61-limit":
        return upper_bound_sensors_main(r, corrected=False)
    if rule in _RULE_CASES:
        return upper_bound_sensors_cases(r, A, B, case=_RULE_CASES[rule])
    raise CaseMismatch(f"unknown k rule {rule!r}; known: {sorted(K_RULES)}")


def k_from_rule(rule: str, r: RegimeParams, A: float | None = None, B: float | None = None) -> int:
    """Integer sensor count for a formula: the value rounded up, at least 1, at most n."""
    value = k_rule_value(rule, r, A, B)
    return int(min(r.n, max(1, math.ceil(value))))


def bounds_table(r: RegimeParams, A: float | None = None, B: float | None = None) -> list[dict]:
    """Every formula evaluated at ``r``; rows carry a flag when a value is vacuous or inapplicable."""
    rows: list[dict] = []

    def add(name: str, fn) -> None:
        try:
            value, flag = fn()
        except (CaseMismatch, DegenerateRegime, ValueError) as exc:
            value, flag = None, f"n/a: {exc}"
        rows.append({"quantity": name, "value": value, "flag": flag})

    lb = lower_bound_sensors(r)
    add("lower_bound_sensors", lambda: (lb.value, "vacuous" if lb.vacuous else ""))
    add("upper_bound_sensors_main", lambda: (upper_bound_sensors_main(r), ""))
    add("upper_bound_sensors_main_limit", lambda: (upper_bound_sensors_main(r, corrected=False), ""))
    for rule, case in _RULE_CASES.items():
        a = A if case is CaseTag.FINITE_A else None
        b = B if case is CaseTag.FINITE_B else None
        add(f"upper_bound_{rule}", lambda case=case, a=a, b=b: (upper_bound_sensors_cases(r, a, b, case=case), ""))
    for j in range(1, r.i + 1):
        if r.d ** j <= r.n:
            sp_ = predicted_sphere_size(r, j)
            add(f"sphere_size_j{j}", lambda sp_=sp_: (sp_.value, f"band={sp_.band:.6g}"))
    sd = predicted_symmdiff(r)
    add("predicted_symmdiff", lambda: (sd.value, sd.branch))
    a = A if r.case is CaseTag.FINITE_A else None
    b = B if r.case is CaseTag.FINITE_B else None
    add("predicted_s", lambda: (predicted_s_case(r, a, b), r.case.value))
    add("r_value", lambda: (r_value(r.n, r.d), ""))
    add("t_F", lambda: (t_f(r.n), ""))
    return rows
