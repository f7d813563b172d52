from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from egsplit.oracles import brute_force_matchings, car_sign, count_nonempty_proper_subsets
from egsplit.wick import (
    BOSE,
    FERMI,
    ContractionPattern,
    FieldSpec,
    Vertex,
    WickError,
    check_partners,
    dirac_conjugate,
    dirac_field,
    enumerate_contractions,
    epstein_glaser_sums,
    fermi_sign,
    patterns_from_json,
    patterns_to_json,
    photon,
    qed_vertex,
    scalar_field,
    singularity_degree,
)


@pytest.fixture
def qed_patterns():
    return enumerate_contractions(qed_vertex(1), qed_vertex(2))


def test_qed_pattern_count_per_q(qed_patterns):
    counts = {}
    for p in qed_patterns:
        counts[p.q] = counts.get(p.q, 0) + 1
    assert counts == {0: 1, 1: 3, 2: 3, 3: 1}


def test_q0_pattern_is_unit(qed_patterns):
    first = qed_patterns[0]
    assert first.q == 0 and first.scalar_factor_id == "unit"
    assert len(first.residual) == 6


def test_sorted_by_q_then_pairs(qed_patterns):
    keys = [(p.q, p.pairs) for p in qed_patterns]
    assert keys == sorted(keys)


def test_matches_brute_force(qed_patterns):
    v = qed_vertex(1)
    names = [f.name for f in v.factors]
    partners = [f.partner for f in v.factors]
    assert brute_force_matchings(names, partners, names) == {p.pairs for p in qed_patterns}


def test_pairs_respect_partner_map(qed_patterns):
    v1, v2 = qed_vertex(1), qed_vertex(2)
    for p in qed_patterns:
        for i, j in p.pairs:
            assert v1.factors[i].partner == v2.factors[j].name


def test_degrees(qed_patterns):
    by_pairs = {p.pairs: p.omega for p in qed_patterns}
    assert by_pairs[((1, 1),)] == -2
    assert by_pairs[((0, 2),)] == -1
    assert by_pairs[((2, 0),)] == -1
    assert by_pairs[((0, 2), (2, 0))] == 2
    assert by_pairs[((0, 2), (1, 1))] == 1
    assert by_pairs[((0, 2), (1, 1), (2, 0))] == 4
    assert by_pairs[()] is None


def test_degree_formula_for_three_pairs():
    # 2 (0 + 0 - 1/2) + 3 * 3 - 4
    assert singularity_degree([dirac_conjugate(), photon(), dirac_field()]) == 4


def test_sing_index_must_be_half_integer():
    scalar = FieldSpec("chi", BOSE, 1.0, 1, Fraction(-1, 2), "chi")
    spinor = FieldSpec("eta", FERMI, 1.0, 4, Fraction(0), "eta")
    assert singularity_degree([scalar, spinor]) == 1
    with pytest.raises(WickError):
        FieldSpec("bad", BOSE, 1.0, 1, Fraction(1, 3), "bad")


def test_fermi_signs_agree_with_car_oracle(qed_patterns):
    v1, v2 = qed_vertex(1), qed_vertex(2)
    fermion_slots = [k for k, f in enumerate(list(v1.factors) + list(v2.factors)) if f.is_fermion]
    rank = {k: n for n, k in enumerate(fermion_slots)}
    for p in qed_patterns:
        pairs = [(rank[i], rank[3 + j]) for i, j in p.pairs if v1.factors[i].is_fermion]
        assert p.fermi_sign == car_sign(len(fermion_slots), pairs)
        assert p.fermi_sign == 1


def _random_fermion_vertex(draw_names):
    fields = {"a": FieldSpec("a", FERMI, 1.0, 1, 0, "b"), "b": FieldSpec("b", FERMI, 1.0, 1, 0, "a"),
              "s": scalar_field("s")}
    return Vertex(tuple(fields[n] for n in draw_names))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abs"), min_size=1, max_size=4),
       st.lists(st.sampled_from("abs"), min_size=1, max_size=4))
def test_fermi_sign_matches_car_for_random_vertices(n1, n2):
    assume(("a" in n1 + n2) == ("b" in n1 + n2))
    v1, v2 = _random_fermion_vertex(n1), _random_fermion_vertex(n2)
    everything = list(v1.factors) + list(v2.factors)
    fermion_slots = [k for k, f in enumerate(everything) if f.is_fermion]
    rank = {k: n for n, k in enumerate(fermion_slots)}
    for p in enumerate_contractions(v1, v2):
        pairs = [(rank[i], rank[len(n1) + j]) for i, j in p.pairs if v1.factors[i].is_fermion]
        assert fermi_sign(p, v1, v2) == car_sign(len(fermion_slots), pairs)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from("abs"), min_size=1, max_size=4),
       st.lists(st.sampled_from("abs"), min_size=1, max_size=4))
def test_enumeration_equals_brute_force(n1, n2):
    assume(("a" in n1 + n2) == ("b" in n1 + n2))
    v1, v2 = _random_fermion_vertex(n1), _random_fermion_vertex(n2)
    names = lambda v: [f.name for f in v.factors]
    expected = brute_force_matchings(names(v1), [f.partner for f in v1.factors], names(v2))
    assert {p.pairs for p in enumerate_contractions(v1, v2)} == expected


def test_bosonic_toy_vertex_has_two_patterns():
    v1, v2 = Vertex((scalar_field(),), 1), Vertex((scalar_field(),), 2)
    assert [p.q for p in enumerate_contractions(v1, v2)] == [0, 1]


def test_json_round_trip(qed_patterns):
    back = patterns_from_json(patterns_to_json(qed_patterns))
    assert back == qed_patterns
    assert patterns_to_json(back) == patterns_to_json(qed_patterns)


def test_missing_partner_is_rejected():
    lonely = FieldSpec("u", FERMI, 1.0, 4, 0, "ubar")
    with pytest.raises(WickError):
        check_partners([lonely])
    with pytest.raises(WickError):
        enumerate_contractions(Vertex((lonely,)), Vertex((lonely,)))


def test_non_involutive_partner_map():
    a = FieldSpec("a", BOSE, 0.0, 1, 0, "b")
    b = FieldSpec("b", BOSE, 0.0, 1, 0, "c")
    c = FieldSpec("c", BOSE, 0.0, 1, 0, "a")
    with pytest.raises(WickError):
        check_partners([a, b, c])


def test_pattern_dict_fields():
    d = ContractionPattern(1, ((1, 1),), 1, -2, ((1, 0), (2, 0)), "k1:A1-A1").to_dict()
    assert list(d) == ["q", "pairs", "sign", "omega", "residual", "scalar_id"]


@pytest.mark.parametrize("n", range(2, 13))
def test_partition_counts(n):
    A, R, D = epstein_glaser_sums(n)
    assert len(R) == len(A) == count_nonempty_proper_subsets(n) == 2 ** (n - 1) - 1
    assert len(D) == 2 * len(R)


def test_partition_orderings_and_signs():
    A, R, D = epstein_glaser_sums(3)
    assert {t.ordering for t in R.terms} == {"S(Y,xn)Sbar(X)"}
    assert {t.ordering for t in A.terms} == {"Sbar(X)S(Y,xn)"}
    assert sum(t.sign for t in D.terms) == 0
    for t in R.terms:
        assert t.X and set(t.X) | set(t.Y) == {"x1", "x2"} and not set(t.X) & set(t.Y)


def test_order_below_two_rejected():
    with pytest.raises(WickError):
        epstein_glaser_sums(1)
