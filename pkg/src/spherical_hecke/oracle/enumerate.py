"""Enumeration of left cosets Gamma\\{integral similitude-p^delta matrices}.

A left coset is identified with the row lattice L = Z^2n M of any of its
matrices; the canonical representative is the row Hermite normal form H of
L.  Two similitude-mu matrices generate the same lattice exactly when they
differ by a symplectic factor on the left, so the cosets are in bijection
with the lattices L satisfying

* <u, v> = u J tv is divisible by mu for all u, v in L, and
* [Z^2n : L] = mu^n,

and these conditions are read off H directly.  H itself is in general *not*
a similitude matrix.

The search fixes the diagonal exponents first (one shard per pattern) and
then fills rows bottom-up.  Row i only interacts with the rows below it
through linear congruences, and every entry is pruned as soon as a
congruence closes:

* mu e_i lies in L, so (mu / h_ii) * tail(h_i) reduces to 0 modulo the lower
  rows; this fixes each entry modulo a power of p;
* <h_i, h_k> = 0 mod mu for every k > i is checked at the last column that
  enters it.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .lattice import Matrix, as_matrix, smith_diagonal

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "SPHERICAL_HECKE_BUDGET"

Pattern = Tuple[int, ...]


class BudgetExceeded(RuntimeError):
    pass


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else default


@dataclass(frozen=True)
class HNFRep:
    """Row-HNF of a coset lattice of similitude p^delta."""

    n: int
    p: int
    delta: int
    matrix: Matrix

    @property
    def mu(self) -> int:
        return self.p ** self.delta

    def diagonal_exponents(self) -> Tuple[int, ...]:
        out = []
        for i in range(2 * self.n):
            h, v = self.matrix[i][i], 0
            while h % self.p == 0:
                h //= self.p
                v += 1
            out.append(v)
        return tuple(out)

    def dump_line(self) -> str:
        return " ".join(str(v) for row in self.matrix for v in row)

    @classmethod
    def from_line(cls, line: str, n: int, p: int, delta: int) -> "HNFRep":
        vals = [int(t) for t in line.split()]
        N = 2 * n
        if len(vals) != N * N:
            raise ValueError(f"expected {N * N} integers, got {len(vals)}")
        return cls(n, p, delta, as_matrix([vals[r * N:(r + 1) * N] for r in range(N)]))


def diagonal_patterns(n: int, delta: int) -> List[Pattern]:
    """Exponent vectors of the HNF diagonal: entries in 0..delta summing to n*delta."""
    N = 2 * n
    return [e for e in itertools.product(range(delta + 1), repeat=N) if sum(e) == n * delta]


# -- streaming enumeration ------------------------------------------------------------

def _coef(H, n: int, k: int, j: int) -> int:
    # <u, h_k> = sum_j u_j * coef(k, j)
    return H[k][n + j] if j < n else -H[k][j - n]


def _refine_py(t0: int, step: int, cnt: int, A: int, B: int, mu: int) -> Tuple[int, int, int]:
    a, b = (A * step) % mu, (-(B + A * t0)) % mu
    if a == 0:
        return (t0, step, cnt) if b == 0 else (t0, step, 0)
    g = gcd(a, mu)
    if b % g:
        return t0, step, 0
    mod = mu // g
    m0 = (b // g) * pow(a // g, -1, mod) % mod if mod > 1 else 0
    if m0 >= cnt:
        return t0, step, 0
    return t0 + m0 * step, step * mod, (cnt - m0 + mod - 1) // mod


def _pattern_stream(n: int, p: int, delta: int, pattern: Pattern) -> Iterator[Matrix]:
    N = 2 * n
    mu = p ** delta
    piv = [p ** v for v in pattern]
    H = [[0] * N for _ in range(N)]
    for i in range(N):
        H[i][i] = piv[i]

    def row(i: int) -> Iterator[Matrix]:
        if i < 0:
            yield as_matrix(H)
            return
        below = range(i + 1, N)
        coefs = {k: [_coef(H, n, k, j) for j in range(N)] for k in below}
        last = {}
        for k in below:
            cols = [j for j in range(i + 1, N) if coefs[k][j]]
            last[k] = cols[-1] if cols else -1
        S0 = {k: piv[i] * coefs[k][i] for k in below}
        if any(S0[k] % mu for k in below if last[k] < 0):
            return
        closing = {j: [k for k in below if last[k] == j] for j in range(i + 1, N)}
        s = mu // piv[i]

        def fill(j: int, R: List[int], S: Dict[int, int]) -> Iterator[Matrix]:
            if j == N:
                yield from row(i - 1)
                return
            hj, rj = piv[j], R[j]
            if s >= hj:
                if rj % hj:
                    return
                t0, step, cnt = 0, 1, hj
            else:
                if rj % s:
                    return
                step = hj // s
                t0, cnt = (-(rj // s)) % step, s
            for k in closing[j]:
                t0, step, cnt = _refine_py(t0, step, cnt, coefs[k][j], S[k], mu)
            for m in range(cnt):
                t = t0 + m * step
                S2 = {k: S[k] + t * coefs[k][j] for k in below}
                if any(S2[k] % mu for k in closing[j]):
                    continue
                c = (s * t + rj) // hj
                R2 = R[:]
                for jj in range(j, N):
                    R2[jj] -= c * H[j][jj]
                H[i][j] = t
                yield from fill(j + 1, R2, S2)
            H[i][j] = 0

        yield from fill(i + 1, [0] * N, S0)

    yield from row(N - 1)


def enumerate_cosets(n: int, p: int, delta: int, budget: Optional[int] = None) -> Iterator[HNFRep]:
    """Every left coset of similitude p^delta exactly once, as its HNF.

    Order: diagonal patterns lexicographically, then rows bottom-up, entries
    left to right, values ascending.
    """
    _check_args(n, p, delta)
    check_budget(n, p, delta, budget)
    for pattern in diagonal_patterns(n, delta):
        for H in _pattern_stream(n, p, delta, pattern):
            yield HNFRep(n, p, delta, H)


def _check_args(n: int, p: int, delta: int) -> None:
    if not 1 <= n <= 4:
        raise ValueError(f"genus must be in 1..4, got {n}")
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    if delta < 0:
        raise ValueError("delta must be non-negative")


# -- counting kernel ------------------------------------------------------------

@njit(cache=True)
def _inv_mod(a, m):  # pragma: no cover - compiled
    r0, r1, x0, x1 = a % m, m, 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
    return x0 % m


@njit(cache=True)
def _refine(t0, step, cnt, A, B, mu):  # pragma: no cover - compiled
    """Restrict t = t0 + m*step (0 <= m < cnt) to B + A*t = 0 mod mu."""
    a = (A * step) % mu
    b = (-(B + A * t0)) % mu
    if a == 0:
        if b == 0:
            return t0, step, cnt
        return t0, step, 0
    g = mu
    x, y = a, mu
    while y:
        x, y = y, x % y
    g = x
    if b % g != 0:
        return t0, step, 0
    mod = mu // g
    m0 = ((b // g) * _inv_mod(a // g, mod)) % mod if mod > 1 else 0
    if m0 >= cnt:
        return t0, step, 0
    return t0 + m0 * step, step * mod, (cnt - m0 + mod - 1) // mod


@njit(cache=True)
def _count_pattern_kernel(n, mu, piv):  # pragma: no cover - compiled
    N = 2 * n
    H = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        H[i, i] = piv[i]
    nslots = N * (N - 1) // 2
    slot_i = np.empty(nslots, dtype=np.int64)
    slot_j = np.empty(nslots, dtype=np.int64)
    L = 0
    for i in range(N - 2, -1, -1):
        for j in range(i + 1, N):
            slot_i[L] = i
            slot_j[L] = j
            L += 1
    R = np.zeros((nslots + 1, N), dtype=np.int64)
    S = np.zeros((nslots + 1, N), dtype=np.int64)
    coef = np.zeros((N, N), dtype=np.int64)
    last = np.full(N, -1, dtype=np.int64)
    t0 = np.zeros(nslots, dtype=np.int64)
    step = np.zeros(nslots, dtype=np.int64)
    cnt = np.zeros(nslots, dtype=np.int64)
    m = np.zeros(nslots, dtype=np.int64)
    if nslots == 0:
        return 1
    count = 0
    L = 0
    enter = True
    while L >= 0:
        if enter:
            enter = False
            if L == nslots:
                count += 1
                L -= 1
                continue
            i = slot_i[L]
            j = slot_j[L]
            if j == i + 1:
                # new row: constraints against the fixed rows below
                ok = True
                for k in range(i + 1, N):
                    lk = -1
                    for jj in range(N):
                        if jj < n:
                            c = H[k, n + jj]
                        else:
                            c = -H[k, jj - n]
                        coef[k, jj] = c
                        if jj > i and c != 0:
                            lk = jj
                    last[k] = lk
                    S[L, k] = piv[i] * coef[k, i]
                    if lk < 0 and S[L, k] % mu != 0:
                        ok = False
                for jj in range(N):
                    R[L, jj] = 0
                if not ok:
                    L -= 1
                    continue
            s = mu // piv[i]
            hj = piv[j]
            rj = R[L, j]
            if s >= hj:
                if rj % hj != 0:
                    L -= 1
                    continue
                t0[L] = 0
                step[L] = 1
                cnt[L] = hj
            else:
                if rj % s != 0:
                    L -= 1
                    continue
                st = hj // s
                t0[L] = (-(rj // s)) % st
                step[L] = st
                cnt[L] = s
            for k in range(i + 1, N):
                if last[k] == j and cnt[L] > 0:
                    a, b, c = _refine(t0[L], step[L], cnt[L], coef[k, j], S[L, k], mu)
                    t0[L] = a
                    step[L] = b
                    cnt[L] = c
            m[L] = 0
        i = slot_i[L]
        j = slot_j[L]
        if m[L] >= cnt[L]:
            H[i, j] = 0
            L -= 1
            continue
        t = t0[L] + m[L] * step[L]
        m[L] += 1
        ok = True
        for k in range(i + 1, N):
            v = S[L, k] + t * coef[k, j]
            S[L + 1, k] = v
            if last[k] == j and v % mu != 0:
                ok = False
        if not ok:
            continue
        s = mu // piv[i]
        c = (s * t + R[L, j]) // piv[j]
        for jj in range(N):
            R[L + 1, jj] = R[L, jj]
        for jj in range(j, N):
            R[L + 1, jj] -= c * H[j, jj]
        H[i, j] = t
        L += 1
        enter = True
    return count


def count_pattern(n: int, p: int, delta: int, pattern: Pattern) -> int:
    piv = np.array([p ** v for v in pattern], dtype=np.int64)
    return int(_count_pattern_kernel(n, p ** delta, piv))


def _count_task(args) -> int:
    return count_pattern(*args)


def count_by_pattern(n: int, p: int, delta: int, workers: int = 1,
                     budget: Optional[int] = None) -> Dict[Pattern, int]:
    """Coset counts per HNF diagonal pattern (zero-count patterns dropped).

    Shards are diagonal patterns; the merge is a sum of integers, so the
    result does not depend on ``workers``.
    """
    _check_args(n, p, delta)
    check_budget(n, p, delta, budget)
    patterns = diagonal_patterns(n, delta)
    tasks = [(n, p, delta, e) for e in patterns]
    if workers <= 1 or len(tasks) < 2:
        counts = [_count_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_count_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    return {e: c for e, c in zip(patterns, counts) if c}


def count_cosets(n: int, p: int, delta: int, workers: int = 1, budget: Optional[int] = None) -> int:
    return sum(count_by_pattern(n, p, delta, workers, budget).values())


# -- budget projection ------------------------------------------------------------

def _sublattices_containing(n: int, mu: int, p: int) -> Iterator[List[List[int]]]:
    """Row-HNF bases D of lattices with mu Z^n <= Z^n D <= Z^n."""
    delta = 0
    while p ** delta < mu:
        delta += 1
    for pattern in itertools.product(range(delta + 1), repeat=n):
        piv = [p ** v for v in pattern]
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = piv[i]

        def fill(i: int, j: int, R: List[int]):
            if i < 0:
                yield [r[:] for r in rows]
                return
            if j == n:
                yield from fill(i - 1, i, [0] * n)
                return
            s = mu // piv[i]
            hj, rj = piv[j], R[j]
            for t in range(hj):
                v = s * t + rj
                if v % hj:
                    continue
                c = v // hj
                R2 = R[:]
                for jj in range(j, n):
                    R2[jj] -= c * rows[j][jj]
                rows[i][j] = t
                yield from fill(i, j + 1, R2)
            rows[i][j] = 0

        yield from fill(n - 1, n, [0] * n)


def projected_count(n: int, p: int, delta: int) -> int:
    """Number of left cosets, from the block form (A B; 0 D): a class of D
    with Smith exponents e carries p^(sum_{i<=j} min(e_i, e_j)) choices of B."""
    mu = p ** delta
    total = 0
    for D in _sublattices_containing(n, mu, p):
        exps = []
        for s in smith_diagonal(D):
            v = 0
            while s % p == 0:
                s //= p
                v += 1
            exps.append(v)
        total += p ** sum(min(exps[i], exps[j]) for i in range(n) for j in range(i, n))
    return total


def check_budget(n: int, p: int, delta: int, budget: Optional[int]) -> int:
    cap = budget_from_env() if budget is None else budget
    projected = projected_count(n, p, delta)
    if projected > cap:
        raise BudgetExceeded(
            f"(n={n}, p={p}, delta={delta}) needs {projected} cosets, over the budget of {cap}; "
            f"raise it with --budget or {BUDGET_ENV}")
    return projected
