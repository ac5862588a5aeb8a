"""Exact sparse Laurent polynomials over Q in the fixed variables
``p, x0, x1, x2, x3, x4, X``.

A polynomial is a mapping from exponent tuples (one signed int per variable,
in the order of :data:`VARS`) to nonzero :class:`fractions.Fraction`
coefficients.  Values are never mutated after construction.

    >>> x0, x1 = var("x0"), var("x1")
    >>> str((x0 + x1) * (x0 - x1))
    'x0^2 - x1^2'
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

VARS: Tuple[str, ...] = ("p", "x0", "x1", "x2", "x3", "x4", "X")
NVARS = len(VARS)
INDEX: Dict[str, int] = {name: i for i, name in enumerate(VARS)}
P, X = INDEX["p"], INDEX["X"]

# Exponents must fit a signed 32-bit integer in the JSON interchange format.
EXP_LIMIT = 2**31 - 1

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]
ZERO_EXP: Exponent = (0,) * NVARS


class PoleError(ZeroDivisionError):
    """Raised when a substitution or evaluation divides by zero."""


def _check_exp(e: Exponent) -> Exponent:
    for v in e:
        if v > EXP_LIMIT or v < -EXP_LIMIT:
            raise OverflowError(f"exponent {v} out of range")
    return e


class MultiPoly:
    """Immutable sparse Laurent polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Scalar] | None = None):
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != NVARS:
                        raise ValueError(f"exponent {e!r} must have {NVARS} entries")
                    clean[_check_exp(tuple(e))] = Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Exponent, Fraction]) -> "MultiPoly":
        # terms already normalized: tuple keys, Fraction values, no zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Scalar) -> "MultiPoly":
        return cls({ZERO_EXP: c})

    @classmethod
    def monomial(cls, c: Scalar = 1, **exps: int) -> "MultiPoly":
        e = [0] * NVARS
        for name, k in exps.items():
            e[INDEX[name]] = k
        return cls({tuple(e): c})

    # -- container protocol -------------------------------------------------

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[Exponent, Fraction]]:
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for e, c in b.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s += c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly()
            return MultiPoly._raw({e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "MultiPoly":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (Fraction(1) / other)

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for monomials")
            (e, c), = self._terms.items()
            return MultiPoly._raw({_check_exp(tuple(k * v for v in e)): Fraction(c) ** k})
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- structure ----------------------------------------------------------

    def degree(self, name: str) -> int:
        """Largest exponent of ``name``; raises on the zero polynomial."""
        i = INDEX[name]
        return max(e[i] for e in self._terms)

    def min_degree(self, name: str) -> int:
        i = INDEX[name]
        return min(e[i] for e in self._terms)

    def variables(self) -> Tuple[str, ...]:
        used = [False] * NVARS
        for e in self._terms:
            for i, v in enumerate(e):
                if v:
                    used[i] = True
        return tuple(name for name, u in zip(VARS, used) if u)

    def coeff(self, name: str, k: int) -> "MultiPoly":
        """Coefficient of ``name^k``, as a polynomial in the other variables."""
        i = INDEX[name]
        out = {}
        for e, c in self._terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return MultiPoly._raw(out)

    def coefficients(self, name: str) -> Dict[int, "MultiPoly"]:
        i = INDEX[name]
        buckets: Dict[int, Dict[Exponent, Fraction]] = {}
        for e, c in self._terms.items():
            buckets.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly._raw(v) for k, v in sorted(buckets.items())}

    def truncate(self, name: str, kmax: int) -> "MultiPoly":
        i = INDEX[name]
        return MultiPoly._raw({e: c for e, c in self._terms.items() if e[i] <= kmax})

    def shift(self, **exps: int) -> "MultiPoly":
        """Multiply by the monomial ``prod(v**k)``."""
        d = [0] * NVARS
        for name, k in exps.items():
            d[INDEX[name]] = k
        return MultiPoly._raw(
            {_check_exp(tuple(a + b for a, b in zip(e, d))): c for e, c in self._terms.items()})

    def constant_term(self) -> Fraction:
        return self._terms.get(ZERO_EXP, Fraction(0))

    def is_constant(self) -> bool:
        return all(e == ZERO_EXP for e in self._terms)

    # -- evaluation and substitution ----------------------------------------

    def substitute(self, bindings: Mapping[str, "MultiPoly | Scalar"]) -> "MultiPoly":
        """Image under the ring map sending each bound variable to a polynomial.

        Negative exponents need the image to be an invertible monomial (or a
        nonzero scalar); a zero image there raises :class:`PoleError`.
        """
        idx = []
        images = []
        for name, img in bindings.items():
            idx.append(INDEX[name])
            images.append(img if isinstance(img, MultiPoly) else MultiPoly.const(img))
        if not idx:
            return self
        power_cache: Dict[Tuple[int, int], MultiPoly] = {}

        def power(j: int, k: int) -> MultiPoly:
            key = (j, k)
            got = power_cache.get(key)
            if got is None:
                img = images[j]
                if k < 0 and img.is_zero():
                    raise PoleError("pole at substitution")
                if k < 0 and len(img) != 1:
                    raise ValueError("negative power of a non-monomial image")
                got = img ** k
                power_cache[key] = got
            return got

        out = MultiPoly()
        groups: Dict[Tuple[int, ...], Dict[Exponent, Fraction]] = {}
        for e, c in self._terms.items():
            key = tuple(e[i] for i in idx)
            rest = list(e)
            for i in idx:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        for key, rest in groups.items():
            factor = MultiPoly._raw(rest)
            for j, k in enumerate(key):
                if k:
                    factor = factor * power(j, k)
            out = out + factor
        return out

    def eval(self, point: Mapping[str, Scalar]) -> Fraction:
        """Exact rational value; every variable occurring must be bound."""
        vals = [None] * NVARS
        for name, v in point.items():
            vals[INDEX[name]] = Fraction(v)
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    v = vals[i]
                    if v is None:
                        raise KeyError(f"variable {VARS[i]} is not bound")
                    if k < 0 and v == 0:
                        raise PoleError("pole at evaluation")
                    term *= v ** k
            total += term
        return total

    def specialize(self, **values: Scalar) -> "MultiPoly":
        """Bind some variables to numbers, keeping the others symbolic."""
        return self.substitute({k: MultiPoly.const(v) for k, v in values.items()})

    # -- serialization ------------------------------------------------------

    def sorted_terms(self) -> Iterator[Tuple[Exponent, Fraction]]:
        """Terms in canonical order: lexicographic over VARS, descending."""
        return iter(sorted(self._terms.items(), reverse=True))

    def to_json_obj(self) -> list:
        out = []
        for e, c in self.sorted_terms():
            _check_exp(e)
            out.append({"c": [c.numerator, c.denominator],
                        "e": {name: k for name, k in zip(VARS, e)}})
        return out

    @classmethod
    def from_json_obj(cls, obj: Sequence[Mapping]) -> "MultiPoly":
        terms: Dict[Exponent, Fraction] = {}
        for t in obj:
            num, den = t["c"]
            e = [0] * NVARS
            for name, k in t.get("e", {}).items():
                e[INDEX[name]] = int(k)
            key = tuple(e)
            if key in terms:
                raise ValueError(f"duplicate monomial {key}")
            terms[key] = Fraction(int(num), int(den))
        return cls(terms)

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "MultiPoly":
        return cls.from_json_obj(json.loads(text))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(VARS, e) if k)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"


_SIGN_SPLIT = re.compile(r"(?<!\^)\s*([+-])\s*")


def parse(text: str) -> MultiPoly:
    """Inverse of ``str(MultiPoly)``.

    Accepts terms like ``-3/2*p^-2*x0^2*X`` joined by ``+``/``-``.
    """
    text = text.strip()
    pieces = _SIGN_SPLIT.split(text)
    # pieces alternate: [lead, sign, body, sign, body, ...]
    signed = [("+", pieces[0])] if pieces[0] else []
    signed += list(zip(pieces[1::2], pieces[2::2]))
    terms: Dict[Exponent, Fraction] = {}
    for sign, body in signed:
        body = body.strip()
        if not body:
            raise ValueError(f"cannot parse polynomial {text!r}")
        coeff = Fraction(1)
        e = [0] * NVARS
        for factor in body.split("*"):
            factor = factor.strip()
            if factor in INDEX:
                e[INDEX[factor]] += 1
            elif "^" in factor:
                name, k = factor.split("^")
                e[INDEX[name]] += int(k)
            else:
                coeff *= Fraction(factor)
        if sign == "-":
            coeff = -coeff
        key = tuple(e)
        terms[key] = terms.get(key, 0) + coeff
    return MultiPoly(terms)


def var(name: str) -> MultiPoly:
    return MultiPoly.monomial(1, **{name: 1})


def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a + b


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a * b


def substitute(a: MultiPoly, bindings: Mapping[str, MultiPoly | Scalar]) -> MultiPoly:
    return a.substitute(bindings)


def evaluate(a: MultiPoly, point: Mapping[str, Scalar]) -> Fraction:
    return a.eval(point)


def product(factors: Iterable[MultiPoly]) -> MultiPoly:
    out = MultiPoly.const(1)
    for f in factors:
        out = out * f
    return out


class RationalFunction:
    """``numerator / prod(denominator_factors)`` with the factors kept apart."""

    __slots__ = ("numerator", "denominator_factors")

    def __init__(self, numerator: MultiPoly, denominator_factors: Sequence[MultiPoly] = ()):
        for f in denominator_factors:
            if f.is_zero():
                raise ZeroDivisionError("zero denominator factor")
        self.numerator = numerator
        self.denominator_factors = tuple(denominator_factors)

    def denominator(self) -> MultiPoly:
        return product(self.denominator_factors)

    def substitute(self, bindings: Mapping[str, MultiPoly | Scalar]) -> "RationalFunction":
        return RationalFunction(
            self.numerator.substitute(bindings),
            [f.substitute(bindings) for f in self.denominator_factors])

    def specialize(self, **values: Scalar) -> "RationalFunction":
        return RationalFunction(
            self.numerator.specialize(**values),
            [f.specialize(**values) for f in self.denominator_factors])

    def to_json_obj(self) -> dict:
        return {"numerator": self.numerator.to_json_obj(),
                "denominator_factors": [f.to_json_obj() for f in self.denominator_factors]}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "RationalFunction":
        return cls(MultiPoly.from_json_obj(obj["numerator"]),
                   [MultiPoly.from_json_obj(f) for f in obj["denominator_factors"]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.numerator == other.numerator
                and self.denominator_factors == other.denominator_factors)

    def __repr__(self) -> str:
        den = "".join(f"({f})" for f in self.denominator_factors)
        return f"RationalFunction(({self.numerator}) / {den or '1'})"
