import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from red_qaoa.graphs import (Graph, GraphError, generate_complete, generate_connected_erdos_renyi,
                             generate_cycle, generate_erdos_renyi)
from red_qaoa.simulator import (ParamVector, SimulationGuardError, bitstring, check_guard, cut_moments,
                                cut_spectrum, edge_expectations, edge_gradients, local_edge_expectation,
                                max_cut_bruteforce, qaoa_expectation, qaoa_gradient,
                                qaoa_probabilities, qaoa_sample_counts, qaoa_state)

from conftest import dense_cost_diagonal, dense_expectation

EDGE = Graph(2, [(0, 1)])
angles = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def small_cases(draw, max_n=7, max_p=3):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))
    p = draw(st.integers(1, max_p))
    gs = draw(st.lists(angles, min_size=p, max_size=p))
    bs = draw(st.lists(angles, min_size=p, max_size=p))
    return Graph(n, edges), ParamVector(tuple(gs), tuple(bs))


def single_edge_closed_form(gamma, beta):
    # independently checked against the dense-matrix oracle
    return 0.5 + 0.5 * math.sin(4 * beta) * math.sin(gamma)


def test_param_vector_validation():
    with pytest.raises(ValueError):
        ParamVector((0.1,), (0.1, 0.2))
    with pytest.raises(ValueError):
        ParamVector((math.nan,), (0.0,))
    with pytest.raises(ValueError):
        ParamVector((), ())
    v = ParamVector((1.0, 2.0), (3.0, 4.0))
    assert ParamVector.from_array(v.to_array()) == v and v.p == 2


def test_cut_spectrum_examples():
    assert cut_spectrum(EDGE).tolist() == [0, 1, 1, 0]
    tri = cut_spectrum(generate_cycle(3))
    assert tri.max() == 2 and int((tri == 2).sum()) == 6
    assert not cut_spectrum(Graph(4, [])).any()


@given(small_cases())
def test_cut_spectrum_oracle_and_flip_symmetry(case):
    g, _ = case
    spec = cut_spectrum(g)
    assert np.array_equal(spec, dense_cost_diagonal(g.node_count, g.edges))
    full = (1 << g.node_count) - 1
    assert np.array_equal(spec, spec[full ^ np.arange(full + 1)])


def test_max_cut_examples():
    assert max_cut_bruteforce(generate_cycle(4))[0] == 4
    assert max_cut_bruteforce(generate_cycle(5))[0] == 4
    assert max_cut_bruteforce(generate_complete(4))[0] == 4


def test_max_cut_witness_is_smallest():
    value, witness = max_cut_bruteforce(generate_cycle(4))
    spec = cut_spectrum(generate_cycle(4))
    assert spec[witness] == value and witness == int(np.flatnonzero(spec == value)[0])


def test_bitstring_little_endian():
    assert bitstring(1, 3) == "001"


def test_guard(monkeypatch):
    big = Graph(25, [(0, 1)])
    with pytest.raises(SimulationGuardError):
        qaoa_expectation(big, ParamVector.zeros(1))
    monkeypatch.setenv("RED_QAOA_GUARD", "4")
    with pytest.raises(SimulationGuardError):
        check_guard(generate_cycle(5))


def test_zero_angles():
    for g in (generate_cycle(5), generate_complete(6), EDGE):
        assert abs(qaoa_expectation(g, ParamVector.zeros(2)) - g.edge_count / 2) < 1e-12


def test_empty_graph_zero_energy():
    assert qaoa_expectation(Graph(3, []), ParamVector((0.4,), (0.3,))) == 0.0


def test_single_edge_optimum():
    e = qaoa_expectation(EDGE, ParamVector((math.pi / 2,), (math.pi / 8,)))
    assert e == pytest.approx(1.0, abs=1e-12)
    assert dense_expectation(2, EDGE.edges, [math.pi / 2], [math.pi / 8]) == pytest.approx(1.0, abs=1e-12)


@given(angles, angles)
def test_single_edge_closed_form(g, b):
    assert qaoa_expectation(EDGE, ParamVector((g,), (b,))) == pytest.approx(single_edge_closed_form(g, b), abs=1e-10)


def test_cycle_per_edge_equivalence():
    for g, b in [(0.3, 0.7), (2.0, 1.1), (5.5, 0.2)]:
        prm = ParamVector((g,), (b,))
        assert qaoa_expectation(generate_cycle(7), prm) / 7 == pytest.approx(
            qaoa_expectation(generate_cycle(10), prm) / 10, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(small_cases(max_n=6))
def test_dense_oracle(case):
    g, prm = case
    got = qaoa_expectation(g, prm)
    assert abs(got - dense_expectation(g.node_count, g.edges, prm.gammas, prm.betas)) < 1e-10


@given(small_cases())
def test_normalisation(case):
    g, prm = case
    assert abs(np.linalg.norm(qaoa_state(g, prm)) - 1) < 1e-9
    assert qaoa_probabilities(g, prm).sum() == pytest.approx(1.0, abs=1e-9)


@given(small_cases())
def test_periodicity_and_conjugation(case):
    g, prm = case
    e = qaoa_expectation(g, prm)
    shift_g = ParamVector(tuple(x + 2 * math.pi for x in prm.gammas), prm.betas)
    shift_b = ParamVector(prm.gammas, tuple(x + math.pi for x in prm.betas))
    neg = ParamVector(tuple(-x for x in prm.gammas), tuple(-x for x in prm.betas))
    for other in (shift_g, shift_b, neg):
        assert abs(qaoa_expectation(g, other) - e) < 1e-9


@given(small_cases(), st.randoms(use_true_random=False))
def test_permutation_invariance(case, r):
    g, prm = case
    perm = list(range(g.node_count))
    r.shuffle(perm)
    assert abs(qaoa_expectation(g.relabel(perm), prm) - qaoa_expectation(g, prm)) < 1e-9


@given(small_cases())
def test_local_energy_sum(case):
    g, prm = case
    per_edge = edge_expectations(g, prm)
    assert np.all((per_edge > -1e-12) & (per_edge < 1 + 1e-12))
    assert abs(per_edge.sum() - qaoa_expectation(g, prm)) < 1e-9
    u, v = g.edges[0]
    assert local_edge_expectation(g, (v, u), prm) == pytest.approx(per_edge[0], abs=1e-12)


def test_local_edge_examples():
    g = generate_cycle(6)
    assert np.allclose(edge_expectations(g, ParamVector.zeros(1)), 0.5)
    vals = edge_expectations(g, ParamVector((0.8, 1.9), (0.3, 2.2)))
    assert np.ptp(vals) < 1e-9
    with pytest.raises(GraphError):
        local_edge_expectation(g, (0, 3), ParamVector.zeros(1))


def test_moments():
    g = generate_cycle(5)
    prm = ParamVector((0.7,), (0.4,))
    probs = qaoa_probabilities(g, prm)
    spec = cut_spectrum(g)
    first, second = cut_moments(g, prm)
    assert first == pytest.approx(probs @ spec) and second == pytest.approx(probs @ spec ** 2)


def test_gradient_single_edge():
    grad = qaoa_gradient(EDGE, ParamVector((0.0,), (math.pi / 8,)))
    assert grad[0] == pytest.approx(0.5, abs=1e-4)


def test_gradient_at_grid_optimum():
    g = generate_cycle(6)
    gs = np.linspace(0, math.pi, 121)
    bs = np.linspace(0, math.pi / 2, 121)
    best = max(((qaoa_expectation(g, ParamVector((a,), (b,))), a, b) for a in gs for b in bs))
    from scipy.optimize import minimize
    res = minimize(lambda x: -qaoa_expectation(g, ParamVector((x[0],), (x[1],))), [best[1], best[2]],
                   method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    assert np.linalg.norm(qaoa_gradient(g, ParamVector((res.x[0],), (res.x[1],)))) < 1e-3


@settings(max_examples=20)
@given(small_cases(max_n=5, max_p=2))
def test_gradient_linearity(case):
    g, prm = case
    assert np.allclose(qaoa_gradient(g, prm), edge_gradients(g, prm).sum(axis=0), atol=1e-6)


def test_sample_counts():
    g = generate_erdos_renyi(8, 0.5, 1)
    counts = qaoa_sample_counts(g, ParamVector.zeros(1), 20000, seed=3)
    assert sum(counts.values()) == 20000
    spec = cut_spectrum(g)
    mean = sum(spec[int(b, 2)] * c for b, c in counts.items()) / 20000
    sd = math.sqrt(g.edge_count / 4 / 20000) * 2  # loose: edges are not independent
    assert abs(mean - g.edge_count / 2) < 3 * sd
    one = qaoa_sample_counts(g, ParamVector.zeros(1), 1, seed=0)
    assert list(one.values()) == [1] and len(next(iter(one))) == 8
    assert counts == qaoa_sample_counts(g, ParamVector.zeros(1), 20000, seed=3)


def test_er_graph_consistency_with_oracle():
    g = generate_connected_erdos_renyi(6, 0.5, 4)
    prm = ParamVector((0.4, 1.3), (2.1, 0.6))
    assert abs(qaoa_expectation(g, prm) - dense_expectation(6, g.edges, prm.gammas, prm.betas)) < 1e-10
