"""The genus-4 numerator data: monomial symmetric polynomials in x1..x4,
the denominator factors Q_n, the K-table and its identity checks.

``sym_{i1 i2 i3 i4}`` is the orbit sum: every *distinct* monomial
``x1^a1 x2^a2 x3^a3 x4^a4`` whose exponents are a rearrangement of the
partition, each with coefficient 1.  This convention is not stated in the
source table; it is forced by the palindromic relation between ``K_0 = 1``
and ``K_14``, which fails by a factor 24 under the full S4 sum.  The full
sum is kept behind ``convention="full"`` so that failure can be exhibited.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import MultiPoly, RationalFunction, product, var

KTABLE_RESOURCE = "ktable-genus4.json"
CONVENTIONS = ("orbit", "full")
NUM_DEGREE = 14


class TableError(ValueError):
    pass


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown sym convention {convention!r}; expected one of {CONVENTIONS}")


@dataclass(frozen=True, order=True)
class Partition4:
    parts: Tuple[int, int, int, int]

    def __post_init__(self):
        a = self.parts
        if len(a) != 4 or any(v < 0 for v in a) or list(a) != sorted(a, reverse=True):
            raise ValueError(f"not a non-increasing 4-part partition: {a!r}")

    @classmethod
    def of(cls, value) -> "Partition4":
        if isinstance(value, str):
            value = [int(ch) for ch in value]
        return cls(tuple(value))

    def complement(self, m: int) -> "Partition4":
        """``m - parts`` re-sorted; the image of sym_part under x_i -> 1/x_i times (x1..x4)^m."""
        return Partition4(tuple(sorted((m - v for v in self.parts), reverse=True)))

    def label(self) -> str:
        return "".join(str(v) for v in self.parts)


def sym_expand(part: Partition4 | Sequence[int] | str, convention: str = "orbit") -> MultiPoly:
    """Monomial symmetric polynomial in x1..x4.

    With ``convention="full"`` every one of the 24 permutations contributes,
    so each distinct monomial gets the size of the partition's stabilizer.
    """
    _check_convention(convention)
    if not isinstance(part, Partition4):
        part = Partition4.of(part)
    return _sym_expand(part.parts, convention)


@lru_cache(maxsize=None)
def _sym_expand(parts: Tuple[int, ...], convention: str) -> MultiPoly:
    perms = list(itertools.permutations(parts))
    counts: Dict[tuple, int] = {}
    for a in perms:
        counts[a] = counts.get(a, 0) + 1
    terms = {}
    for a, mult in counts.items():
        e = (0, 0) + tuple(a) + (0,)
        terms[e] = mult if convention == "full" else 1
    return MultiPoly(terms)


def elementary_symmetric(polys: Sequence[MultiPoly], k: int) -> MultiPoly:
    out = MultiPoly()
    for combo in itertools.combinations(polys, k):
        out = out + product(combo)
    return out


# -- denominators -------------------------------------------------------------

def satake_roots(genus: int) -> List[MultiPoly]:
    """The 2^genus monomials ``x0 * prod_{i in S} x_i``, ordered by subset
    size then lexicographically (the order of the printed Q_4 product)."""
    if not 1 <= genus <= 4:
        raise ValueError(f"genus must be in 1..4, got {genus}")
    roots = []
    x0 = var("x0")
    for size in range(genus + 1):
        for subset in itertools.combinations(range(1, genus + 1), size):
            m = x0
            for i in subset:
                m = m * var(f"x{i}")
            roots.append(m)
    return roots


def build_Q(genus: int) -> List[MultiPoly]:
    """Denominator factors ``1 - root*X``."""
    X = var("X")
    return [1 - r * X for r in satake_roots(genus)]


def drop_unit_factors(factors: Sequence[MultiPoly]) -> List[MultiPoly]:
    return [f for f in factors if f != 1]


# -- the K-table ---------------------------------------------------------------

@dataclass(frozen=True)
class SymTerm:
    pcoeff: MultiPoly                     # Laurent polynomial in p only
    partition: Optional[Partition4]       # None: the constant 1, no sym factor


@dataclass(frozen=True)
class SymPoly:
    """``sign * x0^x0pow * p^ppow * sum(pcoeff * sym_partition)``."""

    k: int
    sign: int
    x0pow: int
    ppow: int
    terms: Tuple[SymTerm, ...] = field(default_factory=tuple)

    def is_zero(self) -> bool:
        return not self.terms

    def expand(self, convention: str = "orbit") -> MultiPoly:
        if not self.terms:
            return MultiPoly()
        body = MultiPoly()
        for t in self.terms:
            s = MultiPoly.const(1) if t.partition is None else sym_expand(t.partition, convention)
            body = body + t.pcoeff * s
        return (body * self.sign).shift(x0=self.x0pow, p=self.ppow)

    def to_json_obj(self) -> dict:
        return {
            "k": self.k, "sign": self.sign, "x0pow": self.x0pow, "ppow": self.ppow,
            "terms": [{"pcoeff": t.pcoeff.to_json_obj(),
                       "partition": [] if t.partition is None else list(t.partition.parts)}
                      for t in self.terms],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SymPoly":
        terms = []
        for t in obj["terms"]:
            pc = MultiPoly.from_json_obj(t["pcoeff"])
            if set(pc.variables()) - {"p"}:
                raise TableError(f"K_{obj['k']}: pcoeff must involve p only")
            part = Partition4.of(t["partition"]) if t["partition"] else None
            terms.append(SymTerm(pc, part))
        return cls(int(obj["k"]), int(obj.get("sign", 1)), int(obj["x0pow"]),
                   int(obj["ppow"]), tuple(terms))


@dataclass(frozen=True)
class KTable:
    entries: Tuple[SymPoly, ...]
    digest: str = ""

    def __post_init__(self):
        if len(self.entries) != NUM_DEGREE + 1:
            raise TableError(f"expected {NUM_DEGREE + 1} entries, got {len(self.entries)}")
        for k, e in enumerate(self.entries):
            if e.k != k:
                raise TableError(f"entry {k} is labelled K_{e.k}")

    def __getitem__(self, k: int) -> SymPoly:
        return self.entries[k]

    def __len__(self) -> int:
        return len(self.entries)

    def K(self, k: int, convention: str = "orbit") -> MultiPoly:
        return self.entries[k].expand(convention)

    def to_json_obj(self) -> dict:
        return {"format": "ktable", "version": 1, "genus": 4,
                "entries": [e.to_json_obj() for e in self.entries]}

    @classmethod
    def from_json_obj(cls, obj: dict, digest: str = "") -> "KTable":
        entries = sorted((SymPoly.from_json_obj(e) for e in obj["entries"]), key=lambda e: e.k)
        return cls(tuple(entries), digest)

    def replace(self, k: int, entry: SymPoly) -> "KTable":
        entries = list(self.entries)
        entries[k] = entry
        return KTable(tuple(entries), digest="modified")


def git_blob_hash(data: bytes) -> str:
    """Content hash in the style of ``git hash-object``."""
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def ktable_bytes() -> bytes:
    return resources.files("spherical_hecke.data").joinpath(KTABLE_RESOURCE).read_bytes()


@lru_cache(maxsize=1)
def load_ktable() -> KTable:
    data = ktable_bytes()
    return KTable.from_json_obj(json.loads(data), git_blob_hash(data))


def load_ktable_file(path) -> KTable:
    with open(path, "rb") as fh:
        data = fh.read()
    return KTable.from_json_obj(json.loads(data), git_blob_hash(data))


def perturb(kt: KTable, k: int, index: int, delta: int = 1) -> KTable:
    """Copy of the table with the constant term of one p-coefficient shifted by ``delta``."""
    entry = kt[k]
    terms = list(entry.terms)
    t = terms[index]
    terms[index] = SymTerm(t.pcoeff + delta, t.partition)
    return kt.replace(k, SymPoly(entry.k, entry.sign, entry.x0pow, entry.ppow, tuple(terms)))


def build_P4(kt: KTable | None = None, convention: str = "orbit") -> MultiPoly:
    kt = kt or load_ktable()
    out = MultiPoly()
    for k in range(len(kt)):
        out = out + kt.K(k, convention).shift(X=k)
    return out


def build_rf4(kt: KTable | None = None, convention: str = "orbit") -> RationalFunction:
    return RationalFunction(build_P4(kt, convention), build_Q(4))


# -- identity checks --------------------------------------------------------------

@dataclass
class CheckResult:
    passed: bool
    residuals: Dict[int, MultiPoly]

    def failures(self) -> List[int]:
        return [k for k, r in sorted(self.residuals.items()) if not r.is_zero()]


def _dual_bindings() -> Dict[str, MultiPoly]:
    s = var("x1") * var("x2") * var("x3") * var("x4")
    return {
        "p": var("p") ** -1,
        "x0": var("x0") * s,
        "x1": var("x1") ** -1,
        "x2": var("x2") ** -1,
        "x3": var("x3") ** -1,
        "x4": var("x4") ** -1,
    }


def check_functional_equation(kt: KTable | None = None, convention: str = "orbit",
                              ks: Iterable[int] | None = None) -> CheckResult:
    """K_{14-k}(p, x) == -p^-6 (x0^2 x1x2x3x4)^(7-k) K_k(1/p, x0x1x2x3x4, 1/x1..1/x4).

    ``ks`` restricts the check to some k (a change to K_j only affects the
    residuals at j and 14 - j).
    """
    kt = kt or load_ktable()
    w = var("x0") ** 2 * var("x1") * var("x2") * var("x3") * var("x4")
    bind = _dual_bindings()
    residuals = {}
    for k in sorted(set(range(NUM_DEGREE + 1) if ks is None else ks)):
        dual = kt.K(k, convention).substitute(bind)
        rhs = -(dual * w ** (7 - k) if k <= 7 else dual * (w ** -1) ** (k - 7)).shift(p=-6)
        residuals[k] = kt.K(NUM_DEGREE - k, convention) - rhs
    return CheckResult(all(r.is_zero() for r in residuals.values()), residuals)


def check_weyl_symmetry(kt: KTable | None = None, convention: str = "orbit") -> CheckResult:
    """Each K_k = x0^k F_k must satisfy F_k(x) = (x1x2x3x4)^k F_k(1/x).

    This is invariance under x0 -> x0 x1..x4, x_i -> 1/x_i with p fixed,
    which every spherical image enjoys.
    """
    kt = kt or load_ktable()
    bind = _dual_bindings()
    del bind["p"]
    residuals = {}
    for k in range(NUM_DEGREE + 1):
        K = kt.K(k, convention)
        residuals[k] = K - K.substitute(bind)
    return CheckResult(all(r.is_zero() for r in residuals.values()), residuals)


class DegreeError(ValueError):
    pass


def remark_image(P: MultiPoly, genus: int, invert_p: bool = False) -> MultiPoly:
    """Right-hand side of the conjectured all-genus relation

        P(x0..xn, X) = (-1)^(n-1) (x0^2 x1..xn X^2)^(2^(n-1)-1) p^(-n(n-1)/2) P(1/x0..1/xn, p/X)

    With ``invert_p`` the image uses ``P(1/p; 1/x0..1/xn, 1/X)`` instead of
    ``P(p; 1/x0..1/xn, p/X)``.
    """
    n = genus
    bind: Dict[str, MultiPoly] = {f"x{i}": var(f"x{i}") ** -1 for i in range(n + 1)}
    if invert_p:
        bind["p"] = var("p") ** -1
        bind["X"] = var("X") ** -1
    else:
        bind["X"] = var("p") * var("X") ** -1
    w = var("x0") ** 2 * var("X") ** 2
    for i in range(1, n + 1):
        w = w * var(f"x{i}")
    image = P.substitute(bind) * w ** (2 ** (n - 1) - 1)
    return (image * (-1) ** (n - 1)).shift(p=-(n * (n - 1) // 2))


def check_remark_relation(P: MultiPoly, genus: int, invert_p: bool = False) -> CheckResult:
    """Verify the all-genus relation; residual keyed by X-degree."""
    if not 1 <= genus <= 4:
        raise ValueError(f"genus must be in 1..4, got {genus}")
    bound = 2 ** genus - 2
    if not P.is_zero() and P.degree("X") > bound:
        raise DegreeError(f"numerator degree {P.degree('X')} exceeds 2^{genus}-2 = {bound}")
    diff = P - remark_image(P, genus, invert_p)
    residuals = diff.coefficients("X") if diff else {}
    return CheckResult(diff.is_zero(), residuals)


def siegel_project(rf: RationalFunction) -> RationalFunction:
    """Set x4 = 0 in numerator and factors and drop factors that became 1."""
    out = rf.substitute({"x4": 0})
    return RationalFunction(out.numerator, drop_unit_factors(out.denominator_factors))


# -- LaTeX -------------------------------------------------------------------------

def _latex_pcoeff(pc: MultiPoly) -> str:
    parts = []
    for e, c in pc.sorted_terms():
        k = e[0]
        mag = abs(c)
        mono = "" if k == 0 else ("p" if k == 1 else f"p^{{{k}}}" if k < 0 or k > 9 else f"p^{k}")
        if mono and mag == 1:
            body = mono
        else:
            body = f"{mag}{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += sign + body
    return text


def _latex_prefactor(entry: SymPoly) -> str:
    sign = "-" if entry.sign < 0 else ""
    x0 = "x_0" if entry.x0pow == 1 else f"x_0^{{{entry.x0pow}}}"
    if entry.ppow == 0:
        return f"{sign}{x0}"
    den = "p" if entry.ppow == -1 else f"p^{{{-entry.ppow}}}"
    return f"{sign}{{\\displaystyle\\frac{{{x0}}}{{{den}}}}}"


def latex_block(entry: SymPoly) -> str:
    """One boxed K_k block; consecutive terms sharing a p-coefficient are grouped."""
    head = f"K_{{{entry.k}}} = "
    if entry.is_zero():
        return head + "0"
    if len(entry.terms) == 1 and entry.terms[0].partition is None and entry.x0pow == 0:
        return head + _latex_pcoeff(entry.terms[0].pcoeff * entry.sign)
    groups: List[Tuple[MultiPoly, List[str]]] = []
    for t in entry.terms:
        name = "1" if t.partition is None else f"sym_{{{t.partition.label()}}}"
        if groups and groups[-1][0] == t.pcoeff:
            groups[-1][1].append(name)
        else:
            groups.append((t.pcoeff, [name]))
    lines = []
    for pc, names in groups:
        coeff = _latex_pcoeff(pc)
        if coeff == "1":
            coeff = ""
        elif coeff == "-1":
            coeff = "-"
        elif len(pc) > 1:
            coeff = f"({coeff})"
        inner = "+".join(names)
        body = f"{coeff}({inner})" if len(names) > 1 and coeff not in ("", "-") else \
            f"{coeff}\\,{inner}" if coeff not in ("", "-") else f"{coeff}{inner}"
        lines.append(body)
    rows = " + \\\\\n".join(lines)
    return (head + _latex_prefactor(entry) + " \\times\n\\left(\\begin{array}{l}\n"
            + rows + "\n\\end{array}\\right)")


def latex_table(kt: KTable | None = None) -> str:
    kt = kt or load_ktable()
    blocks = []
    for entry in kt.entries:
        blocks.append("\\hline\n\\begin{math}\n" + latex_block(entry) + "\n\\end{math}\\\\")
    return ("\\begin{tabular}{|p{12cm}|}\n" + "\n".join(blocks)
            + "\n\\hline\n\\end{tabular}\n")
