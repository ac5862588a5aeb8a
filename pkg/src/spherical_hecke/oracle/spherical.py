"""Spherical images of Hecke operators at a numeric prime, summed coset by coset.

For a coset with row-HNF diagonal exponents a_1..a_2n, the first n of them
are the diagonal exponents of an upper triangular A in a block representative
(A B; 0 D).  The image is

    omega = x0^delta * p^(-delta*n(n+1)/2) * prod_i (x_i * p^(n+1-i))^(a_i).

The weight on x_i decreases with i.  The increasing choice p^i (the other
natural member of the family) breaks the symmetry of the image already for
T(p) in genus 2; it is available as ``Normalization.ascending`` for the
discrimination tests.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, TextIO, Tuple

from ..poly import INDEX, NVARS, MultiPoly
from .enumerate import HNFRep, count_by_pattern, enumerate_cosets
from .lattice import DivisorChain, smith_symplectic


@dataclass(frozen=True)
class Normalization:
    """omega = x0^delta p^(x0_shift*delta) prod (x_i p^(weights[i-1]))^(a_i)."""

    x0_shift: int
    weights: Tuple[int, ...]
    name: str = "custom"

    @classmethod
    def descending(cls, n: int) -> "Normalization":
        return cls(-(n * (n + 1) // 2), tuple(range(n, 0, -1)), "descending")

    @classmethod
    def ascending(cls, n: int) -> "Normalization":
        return cls(-(n * (n + 1) // 2), tuple(range(1, n + 1)), "ascending")

    @classmethod
    def named(cls, name: str, n: int) -> "Normalization":
        try:
            return {"descending": cls.descending, "ascending": cls.ascending}[name](n)
        except KeyError:
            raise ValueError(f"unknown normalization {name!r}") from None


NORMALIZATIONS = ("descending", "ascending")


def _norm(n: int, normalization) -> Normalization:
    if normalization is None:
        return Normalization.descending(n)
    if isinstance(normalization, str):
        return Normalization.named(normalization, n)
    return normalization


def omega_exponents(n: int, p: int, delta: int, a: Iterable[int],
                    normalization: Optional[Normalization] = None) -> Tuple[Tuple[int, ...], Fraction]:
    """Exponent vector over (p, x0.., X) and numeric coefficient of omega."""
    norm = _norm(n, normalization)
    a = tuple(a)[:n]
    e = [0] * NVARS
    e[INDEX["x0"]] = delta
    ppow = norm.x0_shift * delta
    for i, ai in enumerate(a):
        e[INDEX[f"x{i + 1}"]] = ai
        ppow += norm.weights[i] * ai
    return tuple(e), Fraction(p) ** ppow


def omega(rep: HNFRep, normalization: Optional[Normalization] = None,
          symbolic_p: bool = False) -> MultiPoly:
    """Image of one coset; with ``symbolic_p`` the p-power stays a variable."""
    a = rep.diagonal_exponents()
    if symbolic_p:
        norm = _norm(rep.n, normalization)
        exps = {"x0": rep.delta, "p": norm.x0_shift * rep.delta}
        for i in range(rep.n):
            exps[f"x{i + 1}"] = a[i]
            exps["p"] += norm.weights[i] * a[i]
        return MultiPoly.monomial(1, **exps)
    e, c = omega_exponents(rep.n, rep.p, rep.delta, a, normalization)
    return MultiPoly({e: c})


def spherical_T(n: int, p: int, delta: int, workers: int = 1, budget: Optional[int] = None,
                normalization: Optional[Normalization] = None) -> MultiPoly:
    """Sum of omega over all left cosets of similitude p^delta."""
    counts = count_by_pattern(n, p, delta, workers=workers, budget=budget)
    terms: Dict[tuple, Fraction] = {}
    for pattern, c in counts.items():
        e, coeff = omega_exponents(n, p, delta, pattern, normalization)
        terms[e] = terms.get(e, 0) + c * coeff
    return MultiPoly(terms)


def spherical_T_stream(n: int, p: int, delta: int, budget: Optional[int] = None,
                       normalization: Optional[Normalization] = None) -> MultiPoly:
    """Same as :func:`spherical_T` but summing omega over the streamed cosets."""
    terms: Dict[tuple, Fraction] = {}
    for rep in enumerate_cosets(n, p, delta, budget=budget):
        e, coeff = omega_exponents(n, p, delta, rep.diagonal_exponents(), normalization)
        terms[e] = terms.get(e, 0) + coeff
    return MultiPoly(terms)


def generator_chains(n: int, p: int) -> Dict[str, DivisorChain]:
    """T(p) and T_i(p^2) = T(1^(n-i), p^i; (p^2)^(n-i), p^i) for i = 0..n."""
    out = {"T(p)": DivisorChain((1,) * n, (p,) * n)}
    for i in range(n + 1):
        out[f"T_{i}(p^2)"] = DivisorChain((1,) * (n - i) + (p,) * i,
                                          (p * p,) * (n - i) + (p,) * i)
    return out


def classify_cosets(n: int, p: int, delta: int, budget: Optional[int] = None,
                    normalization: Optional[Normalization] = None) -> Dict[DivisorChain, Tuple[int, MultiPoly]]:
    """Coset count and summed image of every double coset of similitude p^delta."""
    mu = p ** delta
    counts: Counter = Counter()
    images: Dict[DivisorChain, Dict[tuple, Fraction]] = {}
    for rep in enumerate_cosets(n, p, delta, budget=budget):
        chain = smith_symplectic(rep.matrix, mu)
        counts[chain] += 1
        e, c = omega_exponents(n, p, delta, rep.diagonal_exponents(), normalization)
        bucket = images.setdefault(chain, {})
        bucket[e] = bucket.get(e, 0) + c
    order = sorted(counts, key=lambda ch: (ch.d, ch.e))
    return {ch: (counts[ch], MultiPoly(images[ch])) for ch in order}


def spherical_generators(n: int, p: int, budget: Optional[int] = None,
                         normalization: Optional[Normalization] = None,
                         progress: Optional[TextIO] = None) -> Dict[str, MultiPoly]:
    """Images of T(p), T_0(p^2), ..., T_n(p^2).

    With ``progress`` set (e.g. ``sys.stderr``) one line
    ``class=<d1,..;e1,..> count=<cosets>`` is written per double coset.
    """
    names = {ch: name for name, ch in generator_chains(n, p).items()}
    out: Dict[str, MultiPoly] = {}
    for delta in (1, 2):
        for chain, (count, image) in classify_cosets(n, p, delta, budget, normalization).items():
            if progress is not None:
                print(f"class={chain.label()} count={count}", file=progress)
            if chain not in names:
                raise ArithmeticError(f"unexpected double coset {chain.label()}")
            out[names[chain]] = image
    return {name: out[name] for name in generator_chains(n, p) if name in out}


__all__ = [
    "NORMALIZATIONS", "Normalization", "classify_cosets", "generator_chains", "omega",
    "omega_exponents", "spherical_T", "spherical_T_stream", "spherical_generators",
]

if __name__ == "__main__":  # pragma: no cover
    n, p = int(sys.argv[1]), int(sys.argv[2])
    for name, img in spherical_generators(n, p, progress=sys.stderr).items():
        print(name, img)
