from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from spherical_hecke.oracle.enumerate import (
    BudgetExceeded, HNFRep, check_budget, count_by_pattern, count_cosets, count_pattern,
    diagonal_patterns, enumerate_cosets, projected_count,
)
from spherical_hecke.oracle.lattice import (
    DivisorChain, as_matrix, det, hnf, identity, inverse_unimodular, is_coset_lattice,
    is_symplectic_similitude, matmul, similitude_representative, smith_diagonal,
    smith_symplectic,
)
from spherical_hecke.oracle.spherical import (
    Normalization, classify_cosets, generator_chains, omega, spherical_T, spherical_T_stream,
    spherical_generators,
)
from spherical_hecke.poly import MultiPoly, var
from spherical_hecke.sym_table import build_Q, elementary_symmetric, satake_roots

x0, x1 = var("x0"), var("x1")


def diag(*v):
    return as_matrix([[v[i] if i == j else 0 for j in range(len(v))] for i in range(len(v))])


def brute_force_cosets(n, p, delta):
    """Every row-HNF with p-power diagonal and determinant mu^n whose lattice
    is isotropic mod mu; no pruning at all."""
    mu, N = p ** delta, 2 * n
    out = set()
    for pattern in itertools.product(range(delta + 1), repeat=N):
        if sum(pattern) != n * delta:
            continue
        piv = [p ** v for v in pattern]
        slots = [(i, j) for j in range(N) for i in range(j)]
        for vals in itertools.product(*[range(piv[j]) for i, j in slots]):
            rows = [[0] * N for _ in range(N)]
            for i in range(N):
                rows[i][i] = piv[i]
            for (i, j), v in zip(slots, vals):
                rows[i][j] = v
            if is_coset_lattice(rows, mu):
                out.add(as_matrix(rows))
    return out


# -- lattice helpers -------------------------------------------------------------------

def test_is_symplectic_similitude_examples():
    p = 3
    assert is_symplectic_similitude(diag(1, 1, 1, 1, p, p, p, p), p) == 1
    assert is_symplectic_similitude(diag(*[p] * 8), p) == 2
    assert is_symplectic_similitude(((1, 1), (0, 1)), p) == 0
    assert is_symplectic_similitude(diag(1, 1, 1, p), p) is None
    assert is_symplectic_similitude(diag(1, 5), p) is None
    with pytest.raises(ValueError):
        is_symplectic_similitude(((1, 2, 3),), p)


def test_hnf_shape_and_invariance():
    rng = random.Random(7)
    for _ in range(40):
        N = rng.randint(2, 5)
        M = [[rng.randint(-6, 6) for _ in range(N)] for _ in range(N)]
        if det(M) == 0:
            continue
        H = hnf(M)
        for i in range(N):
            assert H[i][i] > 0
            for j in range(N):
                if i > j:
                    assert H[i][j] == 0
                elif i < j:
                    assert 0 <= H[i][j] < H[j][j]
        assert abs(det(H)) == abs(det(M))
        U = [[rng.randint(-2, 2) for _ in range(N)] for _ in range(N)]
        if abs(det(U)) == 1:
            assert hnf(matmul(U, M)) == H


def test_smith_matches_sympy():
    rng = random.Random(11)
    for _ in range(30):
        N = rng.randint(2, 4)
        M = [[rng.randint(-9, 9) for _ in range(N)] for _ in range(N)]
        if det(M) == 0:
            continue
        S = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
        assert smith_diagonal(M) == sorted(abs(int(S[i, i])) for i in range(N))


def test_det_matches_sympy():
    rng = random.Random(3)
    for _ in range(20):
        M = [[rng.randint(-20, 20) for _ in range(5)] for _ in range(5)]
        assert det(M) == sympy.Matrix(M).det()


def test_inverse_unimodular():
    U = ((2, 1, 0), (1, 1, 0), (3, 4, 1))
    assert matmul(U, inverse_unimodular(U)) == identity(3)
    with pytest.raises(ValueError):
        inverse_unimodular(((2, 0), (0, 1)))


def test_divisor_chain_validation():
    assert DivisorChain((1, 2), (4, 2)).mu == 4
    with pytest.raises(ValueError):
        DivisorChain((2, 1), (2, 4))
    with pytest.raises(ValueError):
        DivisorChain((1,), (3, 3))


def test_smith_symplectic_examples():
    p = 2
    assert smith_symplectic(((1, 1), (0, p)), p) == DivisorChain((1,), (p,))
    assert smith_symplectic(diag(*[p] * 8), p * p) == DivisorChain((p,) * 4, (p,) * 4)
    M = diag(1, 1, 1, p, p * p, p * p, p * p, p)
    assert is_symplectic_similitude(M, p) == 2
    assert smith_symplectic(M, p * p) == DivisorChain((1, 1, 1, p), (p * p, p * p, p * p, p))


# -- enumeration -------------------------------------------------------------------------

def test_genus1_hand_enumeration():
    got = {r.matrix for r in enumerate_cosets(1, 2, 1)}
    assert got == {((1, 0), (0, 2)), ((1, 1), (0, 2)), ((2, 0), (0, 1))}


@pytest.mark.parametrize("n,p,delta", [(1, 2, 1), (1, 3, 2), (1, 2, 3), (2, 2, 1), (2, 3, 1), (2, 2, 2)])
def test_stream_equals_brute_force(n, p, delta):
    stream = [r.matrix for r in enumerate_cosets(n, p, delta)]
    assert len(stream) == len(set(stream))
    assert set(stream) == brute_force_cosets(n, p, delta)


@pytest.mark.parametrize("n,p,delta", [(1, 5, 2), (2, 3, 2), (2, 2, 3), (3, 2, 1), (3, 2, 2)])
def test_every_rep_is_a_coset_of_a_similitude(n, p, delta):
    mu = p ** delta
    seen = set()
    for rep in enumerate_cosets(n, p, delta):
        H = rep.matrix
        assert H not in seen
        seen.add(H)
        assert is_coset_lattice(H, mu)
        M = similitude_representative(H, mu)
        assert is_symplectic_similitude(M, p) == delta
        assert hnf(M) == H
    assert len(seen) == projected_count(n, p, delta)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_degree_one_count_law(n, p):
    expected = 1
    for i in range(1, n + 1):
        expected *= p ** i + 1
    assert count_cosets(n, p, 1) == expected


def test_degree_one_count_law_genus4_p2():
    assert count_cosets(4, 2, 1) == 2295


@pytest.mark.parametrize("n,p,delta", [(1, 7, 3), (2, 3, 2), (2, 5, 2), (3, 2, 2), (3, 3, 1), (4, 2, 1)])
def test_kernel_matches_stream_per_pattern(n, p, delta):
    streamed = {}
    for rep in enumerate_cosets(n, p, delta):
        e = rep.diagonal_exponents()
        streamed[e] = streamed.get(e, 0) + 1
    assert count_by_pattern(n, p, delta) == streamed


@pytest.mark.parametrize("n,p,delta", [(1, 3, 4), (2, 2, 3), (2, 7, 2), (3, 2, 3), (3, 3, 2)])
def test_projected_count_matches_enumeration(n, p, delta):
    assert count_cosets(n, p, delta) == projected_count(n, p, delta)


def test_genus1_counts_are_divisor_sums():
    # left cosets of det p^d in GL_2 with the form condition automatic: sigma_1(p^d)
    for p in (2, 3, 5):
        for d in range(5):
            assert count_cosets(1, p, d) == sum(p ** i for i in range(d + 1))


def test_diagonal_patterns():
    pats = diagonal_patterns(2, 1)
    assert all(sum(e) == 2 and max(e) <= 1 for e in pats)
    assert len(pats) == 6
    assert count_pattern(1, 2, 1, (0, 1)) == 2


def test_budget_guard(monkeypatch):
    with pytest.raises(BudgetExceeded):
        count_cosets(4, 2, 2, budget=10 ** 5)
    with pytest.raises(BudgetExceeded):
        list(enumerate_cosets(3, 2, 2, budget=1000))
    monkeypatch.setenv("SPHERICAL_HECKE_BUDGET", "30")
    with pytest.raises(BudgetExceeded):
        count_cosets(2, 3, 1)
    assert check_budget(2, 3, 1, budget=40) == 40


def test_bad_arguments():
    with pytest.raises(ValueError):
        count_cosets(5, 2, 1)
    with pytest.raises(ValueError):
        count_cosets(2, 4, 1)
    with pytest.raises(ValueError):
        list(enumerate_cosets(2, 2, -1))


def test_dump_line_round_trip():
    for rep in enumerate_cosets(2, 2, 1):
        assert HNFRep.from_line(rep.dump_line(), 2, 2, 1) == rep


# -- spherical map -------------------------------------------------------------------------

def test_omega_genus1_examples():
    p = 5
    rep = HNFRep(1, p, 1, ((1, 3), (0, p)))
    assert omega(rep) == MultiPoly.monomial(Fraction(1, p), x0=1)
    assert omega(HNFRep(1, p, 1, ((p, 0), (0, 1)))) == x0 * x1
    assert omega(HNFRep(1, p, 2, ((p, 0), (0, p)))) == MultiPoly.monomial(Fraction(1, p), x0=2, x1=1)
    sym = omega(HNFRep(1, p, 2, ((p, 0), (0, p))), symbolic_p=True)
    assert sym == MultiPoly.monomial(1, x0=2, x1=1, p=-1)


def test_omega_weights():
    desc, asc = Normalization.descending(3), Normalization.ascending(3)
    assert desc.weights == (3, 2, 1) and desc.x0_shift == -6
    assert asc.weights == (1, 2, 3)
    assert Normalization.named("ascending", 2) == Normalization.ascending(2)
    with pytest.raises(ValueError):
        Normalization.named("sideways", 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_spherical_T_genus1(p):
    assert spherical_T(1, p, 1) == x0 * (1 + x1)
    assert spherical_T(1, p, 0) == MultiPoly.const(1)


def test_spherical_T_genus1_degree2():
    assert spherical_T(1, 2, 2) == x0 ** 2 * (1 + x1 + x1 ** 2)


def test_spherical_T_genus4_degree1_is_root_sum():
    # K_1 = 0 makes the X^1 coefficient the first elementary function of the roots
    e1 = elementary_symmetric(satake_roots(4), 1)
    assert spherical_T(4, 2, 1) == e1
    assert spherical_T(4, 3, 1) == e1


def test_ascending_weights_break_symmetry():
    img = spherical_T(2, 3, 1, normalization=Normalization.ascending(2))
    swapped = img.substitute({"x1": var("x2"), "x2": var("x1")})
    assert img != swapped
    good = spherical_T(2, 3, 1)
    assert good == good.substitute({"x1": var("x2"), "x2": var("x1")})


@pytest.mark.parametrize("n,p,delta", [(2, 3, 2), (3, 2, 2), (1, 5, 3)])
def test_stream_and_kernel_images_agree(n, p, delta):
    assert spherical_T(n, p, delta) == spherical_T_stream(n, p, delta)


@pytest.mark.parametrize("n,p,delta", [(2, 3, 2), (3, 2, 2)])
def test_spherical_T_independent_of_workers(n, p, delta):
    one = spherical_T(n, p, delta, workers=1)
    assert spherical_T(n, p, delta, workers=2) == one
    assert spherical_T(n, p, delta, workers=2).to_json() == one.to_json()


def test_generators_genus1_p2():
    gens = spherical_generators(1, 2)
    assert gens["T(p)"] == x0 * (1 + x1)
    assert gens["T_1(p^2)"] == MultiPoly.monomial(Fraction(1, 2), x0=2, x1=1)
    assert gens["T_0(p^2)"] == x0 ** 2 + x0 ** 2 * x1 ** 2 + Fraction(1, 2) * x0 ** 2 * x1


@pytest.mark.parametrize("n,p", [(1, 3), (2, 2), (2, 3), (3, 2)])
def test_generators_partition_degree_two(n, p):
    classes = classify_cosets(n, p, 2)
    assert sum(c for c, _ in classes.values()) == count_cosets(n, p, 2)
    total = MultiPoly()
    for _, img in classes.values():
        total = total + img
    assert total == spherical_T(n, p, 2)
    chains = generator_chains(n, p)
    assert set(classes) == {ch for name, ch in chains.items() if name != "T(p)"}


def test_generators_progress_lines(capsys):
    import sys
    spherical_generators(1, 3, progress=sys.stderr)
    err = capsys.readouterr().err.splitlines()
    assert err == ["class=1;3 count=4", "class=1;9 count=12", "class=3;3 count=1"]


def test_scalar_image_is_root_product_over_p():
    # the two roots multiply to x0^2 x1 = p * omega(p I)
    r = satake_roots(1)
    scalar = omega(HNFRep(1, 3, 2, ((3, 0), (0, 3))))
    assert r[0] * r[1] == scalar * 3
    assert [1 - f for f in build_Q(1)] == [q * var("X") for q in r]
