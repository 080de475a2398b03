import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from oracles import GroebnerAlgebra, rank_oracle
from wlpkit.errors import PreconditionFailed, UndeterminedOverQ
from wlpkit.exactfield import GF, QQ
from wlpkit.gorenstein import SkewPolyMatrix, annihilator, compressed_random, pfaffian_ideal
from wlpkit.gradedquot import GradedIdeal, hvector
from wlpkit.lefschetz import (JordanPartition, LinearForm, QuotientAlgebra, all_normalized_forms, general_jordan,
                              green_restriction_dim, injectivity_inheritance_check, jordan_partition,
                              mult_map_rank, rank_sequence, slp_check, wlp_check)
from wlpkit.multipoly import DualForm, Polynomial, monomials_of_degree, parse_polynomial

EXCEPTIONAL = ["x^2*y", "x^2*z", "y^3", "z^3", "x^4+y^2*z^2"]


def ideal(texts, field):
    return GradedIdeal([parse_polynomial(t, field) for t in texts], field, 3)


@pytest.fixture(scope="module")
def exceptional():
    return ideal(EXCEPTIONAL, GF(3))


@pytest.fixture(scope="module")
def groebner_oracle():
    x, y, z = sympy.symbols("x y z")
    return GroebnerAlgebra([x**2 * y, x**2 * z, y**3, z**3, x**4 + y**2 * z**2], 3)


def test_normalized_forms_count():
    assert len(list(all_normalized_forms(GF(3)))) == 13
    assert len(list(all_normalized_forms(GF(2)))) == 7
    forms = list(all_normalized_forms(GF(3)))
    assert all(next(c for c in L.coefficients if c) == 1 for L in forms)


def test_linear_form_parse_normalizes():
    L = LinearForm.parse("2*y + z", GF(3))
    assert str(L) == "y + 2*z"


def test_middle_rank_generic(exceptional):
    r, a, b = mult_map_rank(exceptional, "x + y + 2*z", 2)
    assert (r, a, b) == (5, 6, 6)


def test_middle_rank_of_x(exceptional):
    # the (6, 2^7) Jordan type of x forces rank 4 on the middle map
    assert mult_map_rank(exceptional, "x", 2)[0] == 4


def test_rank_beyond_socle(exceptional):
    assert mult_map_rank(exceptional, "x + y", 6)[0] == 0
    assert mult_map_rank(exceptional, "x + y", 5)[0] == 0


def test_middle_ranks_over_all_forms(exceptional, groebner_oracle):
    """rank of x L: A_2 -> A_3 for each of the 13 forms, cross-checked with the Groebner oracle."""
    x, y, z = sympy.symbols("x y z")
    O = groebner_oracle
    deg2 = [i for i, m in enumerate(O.basis) if sum(m) == 2]
    deg3 = [i for i, m in enumerate(O.basis) if sum(m) == 3]
    table = {}
    for L in all_normalized_forms(GF(3)):
        a, b, c = L.coefficients
        M = O.mult_matrix(a * x + b * y + c * z)
        block = [[M[r][col] for col in deg2] for r in deg3]
        ref = rank_oracle(block, "GF(3)")
        got = mult_map_rank(exceptional, L, 2)[0]
        assert got == ref
        table[str(L)] = got
    assert sorted(table.values()) == [4] * 5 + [5] * 8
    assert {k for k, v in table.items() if v == 4} == {"x", "y", "z", "y + z", "y + 2*z"}


def test_wlp_of_ci233():
    assert wlp_check(ideal(["x^2", "y^3", "z^3"], GF(3)), strategy="exhaustive").verdict == "fails"
    assert wlp_check(ideal(["x^2", "y^3", "z^3"], GF(5)), strategy="random", trials=20).verdict == "holds"


def test_wlp_exceptional(exceptional):
    rep = wlp_check(exceptional, strategy="exhaustive")
    assert rep.verdict == "fails"
    assert rep.certificate["deficient_maps"] == [{"i": 2, "m": 1, "max_rank": 6}]
    middle = [r for (i, m, r, a, b) in rep.per_degree_ranks if i == 2]
    assert middle == [5]
    assert len(rep.form_table) == 13


@pytest.mark.parametrize("p", [2, 5, 7, 101])
def test_wlp_exceptional_other_characteristics(p):
    assert wlp_check(ideal(EXCEPTIONAL, GF(p)), strategy="exhaustive").verdict == "holds"


def test_wlp_over_q():
    assert wlp_check(ideal(EXCEPTIONAL, QQ), trials=20).verdict == "holds"


def test_undetermined_over_q_raises():
    # x^2, y^2, z^2 in char 0 has WLP, but a "trial budget" of zero finds no witness
    with pytest.raises(UndeterminedOverQ) as err:
        wlp_check(ideal(["x^2", "y^2", "z^2"], QQ), trials=0)
    assert err.value.report.verdict == "undetermined"


def test_random_strategy_reports_undetermined_on_finite_field():
    rep = wlp_check(ideal(["x^2", "y^3", "z^3"], GF(3)), strategy="random", trials=10)
    assert rep.verdict == "undetermined"


def test_slp():
    F = GF(31991)
    _, I = compressed_random(5, F, seed=3)
    assert slp_check(I, trials=5).verdict == "holds"
    assert slp_check(ideal(EXCEPTIONAL, GF(3)), strategy="exhaustive").verdict == "fails"
    assert slp_check(ideal(["x", "y", "z"], GF(7)), strategy="exhaustive").verdict == "holds"


def test_jordan_partitions(exceptional, groebner_oracle):
    x, y, z = sympy.symbols("x y z")
    assert jordan_partition(exceptional, "x") == (6, 2, 2, 2, 2, 2, 2, 2)
    assert jordan_partition(exceptional, "y + z") == (3, 3, 3, 3, 3, 3, 1, 1)
    assert jordan_partition(exceptional, "y + 2*z") == (3, 3, 3, 3, 3, 3, 1, 1)
    for L, expr in [("x", x), ("y + 2*z", y + 2 * z), ("x + y + 2*z", x + y + 2 * z), ("x + z", x + z)]:
        assert list(jordan_partition(exceptional, L)) == groebner_oracle.jordan(expr)


def test_general_jordan(exceptional):
    parts, table = general_jordan(exceptional, seeds=range(10))
    assert parts == (6, 3, 3, 3, 3, 1, 1)
    assert len(table) == 10
    assert sum(parts) == 20


def test_green_bound():
    F = GF(101)
    I = GradedIdeal([], F, 3)
    assert green_restriction_dim(I, "x + y + z", 3) == 4
    assert green_restriction_dim(ideal(EXCEPTIONAL, GF(3)), "x + y + 2*z", 3) == 1


def test_green_bound_on_random_prefix():
    F = GF(101)
    rng = random.Random(11)
    for _ in range(5):
        _, I = compressed_random(5, F, seed=rng.randrange(10**6))
        L = LinearForm.random(F, 3, rng)
        assert green_restriction_dim(I, L, 3) in (0, 1)


def test_injectivity_inheritance():
    F = GF(101)
    rng = random.Random(2)
    Is = [annihilator(DualForm.random(F, 3, 5, rng)) for _ in range(2)]
    L = LinearForm.random(F, 3, rng)
    assert injectivity_inheritance_check(Is, L, 2)
    assert injectivity_inheritance_check(Is[:1], L, 2)


def test_injectivity_inheritance_complete_intersections():
    F = GF(31991)
    rng = random.Random(4)
    Is = []
    for _ in range(3):
        a, b, c = (rng.randint(2, 4) for _ in range(3))
        Is.append(ideal([f"x^{a}", f"y^{b}", f"z^{c}"], F))
    assert injectivity_inheritance_check(Is, LinearForm.random(F, 3, rng), 1)


def test_injectivity_precondition():
    with pytest.raises(PreconditionFailed):
        injectivity_inheritance_check([ideal(["x^2", "y^3", "z^3"], GF(3))], "x", 2)


def test_partition_counts_for_witness_and_failure(exceptional):
    F = GF(101)
    _, I = compressed_random(5, F, seed=9)
    rep = wlp_check(I)
    assert len(jordan_partition(I, rep.witness)) == 6
    assert len(general_jordan(exceptional)[0]) == 7


def pfaffian_instances(field, count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        I = pfaffian_ideal(SkewPolyMatrix.random_be(field, rng))
        try:
            if hvector(I, 8) == (1, 3, 6, 6, 3, 1):
                out.append(I)
        except Exception:
            continue
    return out


def test_rank_symmetry_on_gorenstein_instances():
    F = GF(101)
    rng = random.Random(8)
    for I in pfaffian_instances(F, 4, seed=1) + [ideal(EXCEPTIONAL, GF(3))]:
        A = QuotientAlgebra(I)
        e = A.socle_degree
        for _ in range(3):
            L = LinearForm.random(A.field, 3, rng)
            for i in range(e):
                assert A.map_rank(L, i)[0] == A.map_rank(L, e - i - 1)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([2, 3]))
def test_jordan_conservation_and_power_monotonicity(seed, p):
    rng = random.Random(seed)
    F = GF(p)
    a, b, c = (rng.randint(2, 4) for _ in range(3))
    gens = [parse_polynomial(f"x^{a}", F), parse_polynomial(f"y^{b}", F), parse_polynomial(f"z^{c}", F)]
    gens.append(Polynomial(F, 3, {m: F.random_element(rng) for m in monomials_of_degree(3, 2)}))
    I = GradedIdeal([g for g in gens if not g.is_zero()], F, 3)
    A = QuotientAlgebra(I)
    L = LinearForm.random(F, 3, rng)
    assert jordan_partition(I, L).total == sum(A.hvector)
    e = A.socle_degree
    for i in range(e + 1):
        ranks = [A.map_rank(L, i, m)[0] for m in range(1, e - i + 1)]
        assert ranks == sorted(ranks, reverse=True)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([2, 3]))
def test_random_and_exhaustive_strategies_agree(seed, p):
    rng = random.Random(seed)
    F = GF(p)
    a, b, c = (rng.randint(2, 3) for _ in range(3))
    gens = [parse_polynomial(t, F) for t in (f"x^{a}", f"y^{b}", f"z^{c}")]
    gens.append(Polynomial(F, 3, {m: F.random_element(rng) for m in monomials_of_degree(3, 3)}))
    I = GradedIdeal([g for g in gens if not g.is_zero()], F, 3)
    ex = wlp_check(I, strategy="exhaustive").verdict
    rnd = wlp_check(I, strategy="random", trials=20, seed=seed).verdict
    if rnd == "holds":
        assert ex == "holds"
    if ex == "fails":
        assert rnd != "holds"


def test_jordan_partition_type():
    J = JordanPartition((1, 3, 2))
    assert J.parts == (3, 2, 1)
    assert J.total == 6
    assert J == (3, 2, 1)


def test_rank_sequence(exceptional):
    A = QuotientAlgebra(exceptional)
    seq = rank_sequence(A, LinearForm.parse("x", GF(3)))
    assert seq[0] == 20 and seq[-1] == 0
