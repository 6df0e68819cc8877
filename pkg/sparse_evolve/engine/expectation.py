"""
Expected extension counts.

The nested integral

    I_n = int_{tau0 < t_1 < ... < t_n < T} t_1^(-a_1) ... t_n^(-a_n)

has the closed form sum_j C_j^n * T^((n-j) - (a_{j+1}+...+a_n)) *
tau0^(j - (a_1+...+a_j)). Coefficient tables are exact Fractions; powers are
evaluated with mpmath at `settings.MP_DPS` digits and returned as floats.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

import mpmath

from sparse_evolve.core.config import settings
from sparse_evolve.core.exceptions import (
    DegeneracyError,
    DomainError,
    InfeasibleOracleError,
    PreconditionError,
)
from sparse_evolve.engine.calculus import classify, d_value, delta
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.expectation import (
    AsymptoticExponent,
    ClosedExpectation,
    CoefficientTable,
    ExponentVector,
    Regime,
    SandwichBounds,
    ThetaForm,
    ThetaTerm,
)
from sparse_evolve.schemas.extension import RootedExtension

logger = logging.getLogger(__name__)

Exponents = Union[ExponentVector, Sequence[Fraction]]


def _vector(alphas: Exponents) -> Tuple[Fraction, ...]:
    if isinstance(alphas, ExponentVector):
        return alphas.alphas
    return ExponentVector.of(alphas).alphas


def _require_nondegenerate(alphas: Tuple[Fraction, ...]) -> None:
    hit = ExponentVector(alphas=alphas).degenerate_window()
    if hit is not None:
        start, length = hit
        raise DegeneracyError(
            f"vanishing denominator {length} - (alpha_{start + 1} + ... + alpha_{start + length}) = 0",
            context={"start": start + 1, "length": length},
        )


def _exponents(alphas: Tuple[Fraction, ...]) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    n = len(alphas)
    total = sum(alphas, Fraction(0))
    T_exp, tau0_exp = [], []
    head = Fraction(0)
    for j in range(n + 1):
        if j:
            head += alphas[j - 1]
        T_exp.append((n - j) - (total - head))
        tau0_exp.append(j - head)
    return tuple(T_exp), tuple(tau0_exp)


def _table(alphas: Tuple[Fraction, ...], c: Sequence[Fraction]) -> CoefficientTable:
    T_exp, tau0_exp = _exponents(alphas)
    return CoefficientTable(n=len(alphas), c=tuple(c), T_exponents=T_exp, tau0_exponents=tau0_exp)


def _check_order(n: int, alphas: Tuple[Fraction, ...]) -> None:
    if n < 1:
        raise DomainError(f"order must be at least 1, got {n}")
    if len(alphas) != n:
        raise DomainError(f"expected {n} exponents, got {len(alphas)}")


def _window(alphas: Tuple[Fraction, ...], start: int, length: int) -> Fraction:
    return length - sum(alphas[start:start + length], Fraction(0))


@lru_cache(maxsize=4096)
def _closed(alphas: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    n = len(alphas)
    out = []
    for j in range(n + 1):
        denom = Fraction(1)
        for k in range(1, n - j + 1):
            denom *= _window(alphas, j, k)
        for i in range(1, j + 1):
            denom *= _window(alphas, j - i, i)
        out.append(Fraction((-1) ** j) / denom)
    return tuple(out)


def coeff_C_closed(n: int, alphas: Exponents) -> CoefficientTable:
    vec = _vector(alphas)
    _check_order(n, vec)
    _require_nondegenerate(vec)
    return _table(vec, _closed(vec))


@lru_cache(maxsize=4096)
def _recur(alphas: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    if len(alphas) == 1:
        c0 = 1 / _window(alphas, 0, 1)
        return (c0, -c0)
    # C_{j+1}^{n+1}[a_1..] = -C_j^n[a_2..] / ((j+1) - (a_1 + ... + a_{j+1}))
    shorter = _recur(alphas[1:])
    rest = [-shorter[j] / _window(alphas, 0, j + 1) for j in range(len(shorter))]
    return (-sum(rest, Fraction(0)), *rest)


def coeff_C_recur(n: int, alphas: Exponents) -> CoefficientTable:
    vec = _vector(alphas)
    _check_order(n, vec)
    _require_nondegenerate(vec)
    return _table(vec, _recur(vec))


def coeff_D(n: int, tail: Exponents) -> CoefficientTable:
    """
    Coefficients of J_n[tau0, a_2..a_n], the integral with a_1 = 0, built
    from the order n-1 table C' of the tail. The returned exponents are
    those of the vector (0, a_2, ..., a_n).
    """
    rest = _vector(tail)
    if n < 1:
        raise DomainError(f"order must be at least 1, got {n}")
    if len(rest) != n - 1:
        raise DomainError(f"expected {n - 1} tail exponents, got {len(rest)}")
    full = (Fraction(0),) + rest
    _require_nondegenerate(full)

    prev = _closed(rest) if rest else (Fraction(1),)
    # D_0 = C'_0 + sum_{j>=1} C'_j / ((j+1) - (a_2 + ... + a_{j+1}))
    d0 = prev[0] + sum(
        (prev[j] / ((j + 1) - sum(rest[:j], Fraction(0))) for j in range(1, n)),
        Fraction(0),
    )
    d = [d0, -prev[0]]
    for j in range(2, n + 1):
        d.append(-prev[j - 1] / (j - sum(rest[:j - 1], Fraction(0))))
    return _table(full, d)


def _mpf(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def _evaluate(table: CoefficientTable, tau0, T) -> mpmath.mpf:
    t0, t1 = mpmath.mpf(tau0), mpmath.mpf(T)
    return mpmath.fsum(
        _mpf(c) * mpmath.power(t1, _mpf(te)) * mpmath.power(t0, _mpf(se))
        for c, te, se in zip(table.c, table.T_exponents, table.tau0_exponents)
    )


def _check_range(tau0, T) -> None:
    if tau0 <= 0:
        raise DomainError(f"tau0 must be positive, got {tau0}")
    if tau0 > T:
        raise DomainError(f"tau0={tau0} exceeds T={T}")


def integral_I_symbolic(alphas: Exponents) -> CoefficientTable:
    vec = _vector(alphas)
    return coeff_C_closed(len(vec), vec)


def integral_I(tau0, T, alphas: Exponents) -> float:
    _check_range(tau0, T)
    table = integral_I_symbolic(alphas)
    with mpmath.workdps(settings.MP_DPS):
        return float(_evaluate(table, tau0, T))


def integral_J(tau0, T, tail: Exponents) -> float:
    _check_range(tau0, T)
    rest = _vector(tail)
    table = coeff_D(len(rest) + 1, rest)
    with mpmath.workdps(settings.MP_DPS):
        return float(_evaluate(table, tau0, T))


def _back_edges(ext: RootedExtension, order: Sequence[int]) -> Tuple[int, ...]:
    """e_i: edges from the i-th placed vertex to the root and to earlier-placed vertices."""
    placed = set()
    out = []
    for v in order:
        e = len(ext.root_neighbors(v)) + len(ext.ext_neighbors(v) & placed)
        out.append(e)
        placed.add(v)
    return tuple(out)


def _check_orderings(ext: RootedExtension) -> None:
    if ext.ext_size < 1:
        raise PreconditionError("expectations need at least one extension vertex")
    if ext.ext_size > settings.MAX_ORDERINGS_ORDER:
        raise PreconditionError(
            f"ext_size {ext.ext_size} exceeds the ordering limit {settings.MAX_ORDERINGS_ORDER}"
        )


def theta_form(ext: RootedExtension, alpha: Alpha) -> ThetaForm:
    _check_orderings(ext)
    n = ext.ext_size
    a = alpha.value
    coeffs: Dict[FrozenSet[int], Fraction] = {}
    exps: Dict[FrozenSet[int], Tuple[Fraction, Fraction]] = {}
    for order in permutations(range(n)):
        alphas = tuple(a * e for e in _back_edges(ext, order))
        if ext.root_size == 0:
            table = coeff_D(n, alphas[1:])
        else:
            table = coeff_C_closed(n, alphas)
        for j in range(n + 1):
            key = frozenset(order[:j])
            coeffs[key] = coeffs.get(key, Fraction(0)) + table.c[j]
            exps.setdefault(key, (table.T_exponents[j], table.tau0_exponents[j]))

    terms = [
        ThetaTerm(subset=sorted(s), coefficient=coeffs[s], T_exponent=exps[s][0], tau0_exponent=exps[s][1])
        for s in sorted(coeffs, key=lambda s: (len(s), sorted(s)))
    ]
    proper = [t for t in terms if len(t.subset) < n]
    dominant = max(t.T_exponent for t in proper)
    regime = Regime.TAIL_DECAYS if classify(ext, alpha).is_rigid else Regime.GROWS_WITH_T
    return ThetaForm(
        terms=terms,
        dominant_T_exponent=dominant,
        dominant_subsets=[t.subset for t in proper if t.T_exponent == dominant],
        regime=regime,
    )


def expected_count_closed(ext: RootedExtension, alpha: Alpha, tau0: int, T) -> ClosedExpectation:
    """
    Expected number of induced embeddings of H/R landing in G(T) minus
    G(tau0), in the continuous approximation that drops the non-edge
    factors. Sums the nested integral over every ordering of the extension
    vertices.
    """
    _check_range(tau0, T)
    theta = theta_form(ext, alpha)
    with mpmath.workdps(settings.MP_DPS):
        t0, t1 = mpmath.mpf(tau0), mpmath.mpf(T)
        value = mpmath.fsum(
            _mpf(term.coefficient) * mpmath.power(t1, _mpf(term.T_exponent)) * mpmath.power(t0, _mpf(term.tau0_exponent))
            for term in theta.terms
        )
        return ClosedExpectation(value=float(value), theta=theta)


def _oracle_sum(e: Tuple[int, ...], root_size: int, alpha: Alpha, tau0: int, T: int) -> mpmath.mpf:
    # S_i(t) = f_i(t) * sum_{tau0 < s < t} S_{i-1}(s)
    a = _mpf(alpha.value)
    times = range(tau0 + 1, T + 1)
    edge = {t: (mpmath.power(t, -a) if t > 1 else mpmath.mpf(1)) for t in times}
    prev = None
    for i, ei in enumerate(e, start=1):
        gaps = root_size + i - 1 - ei
        current = {}
        running = mpmath.mpf(0)
        for t in times:
            if t == 1:
                # vertex 1 has no predecessors
                factor = mpmath.mpf(1) if root_size + i - 1 == 0 else mpmath.mpf(0)
            else:
                factor = edge[t] ** ei * (1 - edge[t]) ** gaps
            if prev is None:
                current[t] = factor
            else:
                current[t] = factor * running
                running += prev[t]
        prev = current
    return mpmath.fsum(prev.values())


def exact_expectation_oracle(ext: RootedExtension, alpha: Alpha, tau0: int, T: int) -> float:
    """
    Exact expected number of induced rooted embeddings of H/R whose images
    arrive in (tau0, T], with the root already present in G(tau0).
    """
    _check_orderings(ext)
    if tau0 < ext.root_size:
        raise DomainError(f"tau0={tau0} is too small to hold {ext.root_size} root vertices")
    if tau0 > T:
        raise DomainError(f"tau0={tau0} exceeds T={T}")
    n = ext.ext_size
    work = factorial(n) * n * (T - tau0)
    if work > settings.ORACLE_WORK_BUDGET:
        raise InfeasibleOracleError(
            f"oracle needs about {work} terms, over the budget {settings.ORACLE_WORK_BUDGET}",
            context={"work": work, "budget": settings.ORACLE_WORK_BUDGET},
        )
    if work > settings.ORACLE_WORK_BUDGET // 2:
        logger.warning(f"exact oracle near its budget: {work} of {settings.ORACLE_WORK_BUDGET}")
    if T - tau0 < n:
        return 0.0

    cache: Dict[Tuple[int, ...], mpmath.mpf] = {}
    with mpmath.workdps(settings.MP_DPS):
        total = mpmath.mpf(0)
        for order in permutations(range(n)):
            e = _back_edges(ext, order)
            if e not in cache:
                cache[e] = _oracle_sum(e, ext.root_size, alpha, tau0, T)
            total += cache[e]
        return float(total)


def clique_probability(k: int, alpha: Alpha) -> float:
    """Probability that the first k arrivals form a k-clique."""
    if k < 1:
        raise DomainError(f"clique size must be positive, got {k}")
    return exact_expectation_oracle(RootedExtension.clique(k), alpha, 0, k) / factorial(k)


def asymptotic_exponent(ext: RootedExtension, alpha: Alpha) -> AsymptoticExponent:
    cls = classify(ext, alpha)
    if cls.is_degenerate:
        raise DegeneracyError("extension is degenerate; the growth regime needs strict signs")
    if ext.ext_size == 0:
        raise PreconditionError("asymptotics need at least one extension vertex")
    if cls.is_rigid:
        # total count in G(infinity) is positive and finite
        return AsymptoticExponent(regime=Regime.TAIL_DECAYS, exponent=delta(ext, alpha))
    return AsymptoticExponent(regime=Regime.GROWS_WITH_T, exponent=d_value(ext, alpha))


def sandwich_bounds(beta: Fraction, tau0: int, T: int) -> SandwichBounds:
    beta = Fraction(beta)
    if tau0 < 1:
        raise DomainError(f"tau0 must be at least 1, got {tau0}")
    if tau0 > T:
        raise DomainError(f"tau0={tau0} exceeds T={T}")
    upper = integral_I(tau0, T, (beta,))
    lower = integral_I(tau0 + 1, T + 1, (beta,))
    with mpmath.workdps(settings.MP_DPS):
        b = _mpf(beta)
        exact = float(mpmath.fsum(mpmath.power(s, -b) for s in range(tau0 + 1, T + 1)))
        scaled = float(mpmath.power(2, -b) * mpmath.mpf(upper))
    return SandwichBounds(upper=upper, exact=exact, lower=lower, scaled_lower=scaled)
