"""Integer matrix utilities for similitude cosets: the symplectic form,
Hermite and Smith normal forms, and symplectic bases.

Matrices are tuples (or lists) of rows of Python ints.  Row operations act
on the left, matching left cosets ``Gamma M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import List, Optional, Sequence, Tuple

Matrix = Tuple[Tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def symplectic_form(n: int) -> Matrix:
    """J_n = (0 I; -I 0)."""
    N = 2 * n
    rows = [[0] * N for _ in range(N)]
    for i in range(n):
        rows[i][n + i] = 1
        rows[n + i][i] = -1
    return as_matrix(rows)


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*a))


def det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def is_power_of(x: int, p: int) -> Optional[int]:
    if x <= 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v if x == 1 else None


def is_symplectic_similitude(M: Sequence[Sequence[int]], p: int) -> Optional[int]:
    """Return delta with tM J M = p^delta J, or None if M is not such a matrix."""
    N = len(M)
    if N % 2 or any(len(r) != N for r in M):
        raise ValueError("expected a square matrix of even size")
    J = symplectic_form(N // 2)
    G = matmul(matmul(transpose(M), J), M)
    mu = G[0][N // 2]
    for i in range(N):
        for j in range(N):
            if G[i][j] != mu * J[i][j]:
                return None
    return is_power_of(mu, p)


def hnf(M: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form of a nonsingular square integer matrix:
    upper triangular, positive diagonal, ``0 <= m[i][j] < m[j][j]`` for i < j.
    """
    rows = [list(r) for r in M]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("expected a square matrix")
    for col in range(n):
        # gcd-combine column entries of rows col.. into row col
        for r in range(col + 1, n):
            a, b = rows[col][col], rows[r][col]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            top = [x * u + y * v for u, v in zip(rows[col], rows[r])]
            bot = [-bg * u + ag * v for u, v in zip(rows[col], rows[r])]
            rows[col], rows[r] = top, bot
        if rows[col][col] == 0:
            raise ValueError("matrix is singular")
        if rows[col][col] < 0:
            rows[col] = [-v for v in rows[col]]
        d = rows[col][col]
        for r in range(col):
            q = rows[r][col] // d
            if q:
                rows[r] = [u - q * v for u, v in zip(rows[r], rows[col])]
    return as_matrix(rows)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def lattice_hnf(vectors: Sequence[Sequence[int]]) -> List[List[int]]:
    """Echelon basis (HNF rows, zero rows dropped) of the lattice spanned by
    ``vectors``; works for any number of generators."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    out: List[List[int]] = []
    for col in range(ncols):
        piv = None
        for i, r in enumerate(rows):
            if r[col]:
                if piv is None:
                    piv = i
                else:
                    a, b = rows[piv][col], r[col]
                    g, x, y = _xgcd(a, b)
                    ag, bg = a // g, b // g
                    top = [x * u + y * v for u, v in zip(rows[piv], r)]
                    bot = [-bg * u + ag * v for u, v in zip(rows[piv], r)]
                    rows[piv], rows[i] = top, bot
        if piv is None:
            continue
        prow = rows.pop(piv)
        if prow[col] < 0:
            prow = [-v for v in prow]
        for r in out:
            q = r[col] // prow[col]
            if q:
                r[:] = [u - q * v for u, v in zip(r, prow)]
        out.append(prow)
        rows = [r for r in rows if any(r)]
    return out


def smith_diagonal(M: Sequence[Sequence[int]]) -> List[int]:
    """Elementary divisors s_1 | s_2 | ... of a nonsingular square matrix."""
    a = [list(r) for r in M]
    n = len(a)
    for t in range(n):
        while True:
            # move a nonzero entry of least absolute value to (t, t)
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                raise ValueError("matrix is singular")
            i, j = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
            piv = a[t][t]
            done = True
            for i in range(t + 1, n):
                q = a[i][t] // piv
                if q:
                    a[i] = [u - q * v for u, v in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // piv
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [u + v for u, v in zip(a[t], a[bad[0]])]
    return [abs(a[i][i]) for i in range(n)]


@dataclass(frozen=True)
class DivisorChain:
    """diag(d_1..d_n; e_1..e_n) with d_i | d_{i+1}, d_n | e_n, e_{i+1} | e_i, d_i e_i = mu."""

    d: Tuple[int, ...]
    e: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.d)
        if len(self.e) != n or n == 0:
            raise ValueError("d and e must have the same positive length")
        mu = self.d[0] * self.e[0]
        ok = all(self.d[i] * self.e[i] == mu for i in range(n))
        ok = ok and all(self.d[i + 1] % self.d[i] == 0 for i in range(n - 1))
        ok = ok and self.e[n - 1] % self.d[n - 1] == 0
        ok = ok and all(self.e[i] % self.e[i + 1] == 0 for i in range(n - 1))
        if not ok:
            raise ValueError(f"not a symplectic divisor chain: {self.d};{self.e}")

    @property
    def mu(self) -> int:
        return self.d[0] * self.e[0]

    def label(self) -> str:
        return ",".join(map(str, self.d)) + ";" + ",".join(map(str, self.e))


def smith_symplectic(M: Sequence[Sequence[int]], mu: int) -> DivisorChain:
    """Pair the Smith divisors s_1..s_2n of a similitude-mu matrix as
    (s_1..s_n; s_2n..s_n+1)."""
    s = smith_diagonal(M)
    N = len(s)
    n = N // 2
    d = tuple(s[:n])
    e = tuple(s[N - 1 - i] for i in range(n))
    if any(d[i] * e[i] != mu for i in range(n)):
        raise ArithmeticError(f"Smith divisors {s} do not pair to {mu}")
    return DivisorChain(d, e)


def is_coset_lattice(H: Sequence[Sequence[int]], mu: int) -> bool:
    """True when the row lattice of H is the row lattice of some similitude-mu
    matrix: the symplectic form is 0 mod mu on it and its index is mu^n."""
    N = len(H)
    n = N // 2
    G = matmul(matmul(H, symplectic_form(n)), transpose(H))
    if any(v % mu for row in G for v in row):
        return False
    return abs(det(H)) == mu ** n


def symplectic_basis(G: Sequence[Sequence[int]]) -> Matrix:
    """Rows B with B G tB = J for a unimodular alternating integer matrix G."""
    N = len(G)
    n = N // 2

    def form(u, v):
        return sum(u[i] * G[i][j] * v[j] for i in range(N) for j in range(N) if G[i][j])

    basis = [list(r) for r in identity(N)]
    es, fs = [], []
    while basis:
        e = basis[0]
        vals = [form(e, w) for w in basis]
        # e pairs to 1 with some f since the restricted form is unimodular
        g, coeffs = 0, [0] * len(basis)
        for i, v in enumerate(vals):
            if v == 0:
                continue
            g2, x, y = _xgcd(g, v)
            coeffs = [c * x for c in coeffs]
            coeffs[i] += y
            g = g2
        if g != 1:
            raise ValueError("form is not unimodular")
        f = [sum(c * w[k] for c, w in zip(coeffs, basis)) for k in range(N)]
        es.append(e)
        fs.append(f)
        proj = []
        for w in basis:
            a, b = form(w, f), form(w, e)
            proj.append([w[k] - a * e[k] + b * f[k] for k in range(N)])
        basis = lattice_hnf(proj)
    if len(es) != n:
        raise ValueError("form is degenerate")
    return as_matrix(es + fs)


def inverse_unimodular(U: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a matrix with determinant +-1."""
    n = len(U)
    aug = [list(U[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        for r in range(col + 1, n):
            a, b = aug[col][col], aug[r][col]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            top = [x * u + y * v for u, v in zip(aug[col], aug[r])]
            bot = [-bg * u + ag * v for u, v in zip(aug[col], aug[r])]
            aug[col], aug[r] = top, bot
        if abs(aug[col][col]) != 1:
            raise ValueError("matrix is not unimodular")
    for col in range(n - 1, -1, -1):
        if aug[col][col] == -1:
            aug[col] = [-v for v in aug[col]]
        for r in range(col):
            q = aug[r][col]
            if q:
                aug[r] = [u - q * v for u, v in zip(aug[r], aug[col])]
    return as_matrix([row[n:] for row in aug])


def similitude_representative(H: Sequence[Sequence[int]], mu: int) -> Matrix:
    """A genuine similitude-mu matrix M with the same row lattice as H."""
    n = len(H) // 2
    G = matmul(matmul(H, symplectic_form(n)), transpose(H))
    if any(v % mu for row in G for v in row):
        raise ValueError("row lattice is not isotropic modulo mu")
    G = tuple(tuple(v // mu for v in row) for row in G)
    B = symplectic_basis(G)
    # B G tB = J, so M = B H has M J tM = mu J
    return matmul(B, H)
