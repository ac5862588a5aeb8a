"""Truncated X-series of rational functions, comparison against the coset
oracle, and recovery of numerators from oracle prefixes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .poly import MultiPoly, RationalFunction, product, var
from .sym_table import (
    KTable, build_Q, build_rf4, check_remark_relation,
    siegel_project,
)
from .oracle.spherical import spherical_T

FROM_RF = "from-rational-function"
FROM_ORACLE = "from-oracle"

# Laurent window in p used when fitting the genus-2 numerator, and the primes
GENUS2_PPOW_RANGE = (-6, 1)
GENUS2_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)


class SeriesError(ArithmeticError):
    pass


@dataclass
class SeriesPrefix:
    genus: int
    coeffs: List[MultiPoly]
    provenance: str = FROM_RF

    @property
    def max_delta(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, delta: int) -> MultiPoly:
        return self.coeffs[delta]

    def as_poly(self) -> MultiPoly:
        out = MultiPoly()
        for d, c in enumerate(self.coeffs):
            out = out + c.shift(X=d)
        return out


def _x_coeffs(f: MultiPoly, n: int) -> List[MultiPoly]:
    by = f.coefficients("X")
    if by and min(by) < 0:
        raise SeriesError("negative power of X")
    return [by.get(k, MultiPoly()) for k in range(n + 1)]


def _inverse_series(f: MultiPoly, dmax: int) -> List[MultiPoly]:
    c = _x_coeffs(f, dmax)
    if c[0] != MultiPoly.const(1):
        raise SeriesError("denominator constant term in X must be 1")
    inv = [MultiPoly.const(1)]
    for k in range(1, dmax + 1):
        acc = MultiPoly()
        for j in range(1, k + 1):
            if c[j]:
                acc = acc + c[j] * inv[k - j]
        inv.append(-acc)
    return inv


def _mul_trunc(a: Sequence[MultiPoly], b: Sequence[MultiPoly], dmax: int) -> List[MultiPoly]:
    out = [MultiPoly() for _ in range(dmax + 1)]
    for i, ai in enumerate(a[:dmax + 1]):
        if not ai:
            continue
        for j in range(dmax + 1 - i):
            if b[j]:
                out[i + j] = out[i + j] + ai * b[j]
    return out


def expand(rf: RationalFunction, max_delta: int, genus: int = 0) -> SeriesPrefix:
    """Coefficients of X^0..X^max_delta of numerator / prod(factors)."""
    series = _x_coeffs(rf.numerator.truncate("X", max_delta), max_delta)
    for f in rf.denominator_factors:
        series = _mul_trunc(series, _inverse_series(f, max_delta), max_delta)
    return SeriesPrefix(genus, series, FROM_RF)


def genus_rf(genus: int, kt: Optional[KTable] = None, convention: str = "orbit") -> RationalFunction:
    """P/Q for the supported genera: 4 from the table, 3 by projection, 1 as 1/Q_1."""
    if genus == 4:
        return build_rf4(kt, convention)
    if genus == 3:
        return siegel_project(build_rf4(kt, convention))
    if genus == 1:
        return RationalFunction(MultiPoly.const(1), build_Q(1))
    raise ValueError(f"no closed form shipped for genus {genus}")


def oracle_prefix(genus: int, p: int, max_delta: int, workers: int = 1,
                  budget: Optional[int] = None, normalization=None) -> SeriesPrefix:
    coeffs = [spherical_T(genus, p, d, workers=workers, budget=budget,
                          normalization=normalization) for d in range(max_delta + 1)]
    return SeriesPrefix(genus, coeffs, FROM_ORACLE)


def compare_prefixes(expected: SeriesPrefix, oracle: SeriesPrefix) -> Dict[int, MultiPoly]:
    return {d: expected[d] - oracle[d] for d in range(len(oracle.coeffs))}


def compare_with_oracle(genus: int, p: int, max_delta: int, kt: Optional[KTable] = None,
                        rf: Optional[RationalFunction] = None, convention: str = "orbit",
                        workers: int = 1, budget: Optional[int] = None,
                        normalization=None) -> Dict[int, MultiPoly]:
    """Residual per delta between the series of P/Q at p and the oracle."""
    if rf is None:
        rf = genus_rf(genus, kt, convention)
    expected = expand(rf.specialize(p=p), max_delta, genus)
    oracle = oracle_prefix(genus, p, max_delta, workers, budget, normalization)
    return compare_prefixes(expected, oracle)


def verify_siegel(max_delta: int, p: int, kt: Optional[KTable] = None, workers: int = 1,
                  budget: Optional[int] = None) -> Dict[int, MultiPoly]:
    return compare_with_oracle(3, p, max_delta, kt=kt, workers=workers, budget=budget)


def reconstruct_numerator(genus: int, factors: Sequence[MultiPoly], prefix: SeriesPrefix,
                          degP: int) -> MultiPoly:
    """P = Q * series truncated at degP; any further known coefficients must vanish."""
    dmax = prefix.max_delta
    if dmax < degP:
        raise ValueError(f"prefix of length {dmax + 1} cannot determine a degree-{degP} numerator")
    q = _x_coeffs(product(factors), dmax)
    prod = _mul_trunc(q, prefix.coeffs, dmax)
    for d in range(degP + 1, dmax + 1):
        if prod[d]:
            raise SeriesError(f"inconsistent series / wrong degree bound (X^{d} coefficient nonzero)")
    out = MultiPoly()
    for d in range(degP + 1):
        out = out + prod[d].shift(X=d)
    return out


def numeric_numerator(genus: int, p: int, max_delta: int, degP: int, workers: int = 1,
                      budget: Optional[int] = None) -> MultiPoly:
    prefix = oracle_prefix(genus, p, max_delta, workers, budget)
    factors = [f.specialize(p=p) for f in build_Q(genus)]
    return reconstruct_numerator(genus, factors, prefix, degP)


def _solve(rows: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Exact Gaussian elimination for a square nonsingular system."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SeriesError("singular interpolation system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [u - f * v for u, v in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def interpolate_in_p(samples: Mapping[int, MultiPoly], ppow_range=GENUS2_PPOW_RANGE,
                     check_primes: Sequence[int] = ()) -> MultiPoly:
    """Fit a Laurent polynomial in p, term by term in the other variables.

    ``samples`` maps a prime to a polynomial with numeric coefficients.  The
    fit uses the primes not in ``check_primes``; those are then compared.
    """
    lo, hi = ppow_range
    width = hi - lo + 1
    fit = [q for q in sorted(samples) if q not in check_primes]
    if len(fit) != width:
        raise ValueError(f"need exactly {width} fitting primes, got {len(fit)}")
    keys = set()
    for f in samples.values():
        if "p" in f.variables():
            raise ValueError("samples must not contain p")
        keys.update(f.terms)
    rows = [[Fraction(q) ** (lo + j) for j in range(width)] for q in fit]
    pvar = var("p")
    out = MultiPoly()
    for e in sorted(keys):
        mono = MultiPoly({e: 1})
        vals = [samples[q].terms.get(e, Fraction(0)) for q in fit]
        sol = _solve(rows, vals)
        for j, c in enumerate(sol):
            if c:
                out = out + mono * (pvar ** (lo + j)) * c
    for q in check_primes:
        if out.specialize(p=q) != samples[q]:
            raise SeriesError(f"interpolated numerator disagrees with the sample at p={q}")
    return out


@dataclass
class Genus2Result:
    P: MultiPoly
    numeric: Dict[int, MultiPoly] = field(default_factory=dict)
    tail_checked: Dict[int, int] = field(default_factory=dict)
    remark_passed: bool = False


# deepest prefix used for the vanishing-tail check at the small primes
GENUS2_TAIL_DEPTH = {2: 4, 3: 3}


def reconstruct_genus2(primes: Sequence[int] = GENUS2_PRIMES, check_prime: Optional[int] = None,
                       workers: int = 1, budget: Optional[int] = None,
                       tail_depth: Mapping[int, int] = GENUS2_TAIL_DEPTH) -> Genus2Result:
    """Symbolic P_2 from numeric numerators at several primes.

    Each prime contributes the degree-2 numerator from a delta <= 2 prefix;
    primes in ``tail_depth`` are expanded further so that the X^3.. tail of
    Q*series is checked to vanish.  The last prime (or ``check_prime``) is
    held out of the fit and compared afterwards.
    """
    primes = sorted(primes)
    if check_prime is None:
        check_prime = primes[-1]
    numeric: Dict[int, MultiPoly] = {}
    tails: Dict[int, int] = {}
    for q in primes:
        depth = max(2, tail_depth.get(q, 2))
        numeric[q] = numeric_numerator(2, q, depth, 2, workers, budget)
        tails[q] = depth
    P = interpolate_in_p(numeric, GENUS2_PPOW_RANGE, check_primes=(check_prime,))
    remark = check_remark_relation(P, 2).passed
    return Genus2Result(P, numeric, tails, remark)


__all__ = [
    "FROM_ORACLE", "FROM_RF", "GENUS2_PRIMES", "Genus2Result", "SeriesError", "SeriesPrefix",
    "compare_prefixes", "compare_with_oracle", "expand", "genus_rf", "interpolate_in_p",
    "numeric_numerator", "oracle_prefix", "reconstruct_genus2", "reconstruct_numerator",
    "verify_siegel",
]
