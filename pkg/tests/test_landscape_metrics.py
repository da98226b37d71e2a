import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from red_qaoa.graphs import Graph, generate_cycle, generate_connected_erdos_renyi
from red_qaoa.landscape import EnergyLandscape, LandscapeSpec, load_landscape, sample_landscape
from red_qaoa.metrics import (DegenerateLandscapeError, LandscapeMismatchError, approximation_ratio,
                              compare_landscapes, mse, normalize_energies, normalize_landscape,
                              optimal_point_distance, torus_distance)
from red_qaoa.simulator import ParamVector, max_cut_bruteforce, qaoa_expectation


def test_grid_layout():
    spec = LandscapeSpec.grid(30)
    pts = spec.points(1)
    assert pts.shape == (900, 2)
    # gamma outer, beta inner; inclusive ranges
    assert pts[0].tolist() == [0.0, 0.0] and pts[1, 0] == 0.0 and pts[1, 1] > 0
    assert pts[-1].tolist() == pytest.approx([2 * math.pi, math.pi])
    with pytest.raises(ValueError):
        spec.points(2)
    with pytest.raises(ValueError):
        LandscapeSpec.grid(1)


def test_random_points_reproducible():
    a = LandscapeSpec.random(1024, 1).points(2)
    assert a.shape == (1024, 4)
    assert np.array_equal(a, LandscapeSpec.random(1024, 1).points(2))
    assert not np.array_equal(a, LandscapeSpec.random(1024, 2).points(2))
    assert a[:, :2].max() < 2 * math.pi and a[:, 2:].max() < math.pi and a.min() >= 0


def test_sample_landscape_values():
    g = generate_cycle(5)
    land = sample_landscape(g, 1, LandscapeSpec.random(20, 0))
    for row, e in zip(land.params, land.energies):
        assert e == pytest.approx(qaoa_expectation(g, ParamVector.from_array(row)))
    assert np.all((land.energies >= 0) & (land.energies <= g.edge_count))
    threaded = sample_landscape(g, 1, LandscapeSpec.random(20, 0), workers=4)
    assert np.array_equal(threaded.energies, land.energies)


def test_empty_graph_landscape():
    land = sample_landscape(Graph(3, []), 1, LandscapeSpec.grid(4))
    assert not land.energies.any()


def test_json_csv_roundtrip(tmp_path):
    land = sample_landscape(generate_cycle(4), 2, LandscapeSpec.random(10, 3))
    path = tmp_path / "l.json"
    path.write_text(json.dumps(land.to_json()))
    back = load_landscape(path)
    assert np.array_equal(back.params, land.params) and np.array_equal(back.energies, land.energies)
    assert back.spec == land.spec and back.graph_fingerprint == land.graph_fingerprint
    rows = land.to_csv().strip().split("\n")
    assert rows[0] == "gamma_1,gamma_2,beta_1,beta_2,energy" and len(rows) == 11


def _land(energies):
    e = np.asarray(energies, dtype=float)
    params = LandscapeSpec.random(len(e), 0).points(1)
    return EnergyLandscape(params, e, LandscapeSpec.random(len(e), 0), 1)


def test_normalize_examples():
    assert normalize_energies([1, 3, 5]).tolist() == [0, 0.5, 1]
    assert normalize_energies([0, 0.25, 1]).tolist() == [0, 0.25, 1]
    with pytest.raises(DegenerateLandscapeError):
        normalize_energies([2, 2, 2])
    assert normalize_landscape(_land([1, 3, 5])).energies.tolist() == [0, 0.5, 1]


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(finite, min_size=3, max_size=30).filter(lambda x: max(x) - min(x) > 1e-3),
       st.floats(1e-2, 1e2), finite)
def test_affine_invariance(e, scale, shift):
    e = np.array(e)
    assert np.allclose(normalize_energies(scale * e + shift), normalize_energies(e), atol=1e-9)
    a, b = _land(e), _land(scale * e + shift)
    assert mse(a, b) < 1e-12


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=30)
       .filter(lambda x: len({p for p, _ in x}) > 1 and len({q for _, q in x}) > 1))
def test_mse_properties(pairs):
    a = _land([p for p, _ in pairs])
    b = _land([q for _, q in pairs])
    assert mse(a, b) == mse(b, a) and mse(a, b) >= 0 and mse(a, a) == 0


def test_mse_mismatch():
    a = _land([0, 1, 2])
    b = EnergyLandscape(a.params + 0.1, a.energies, a.spec, 1)
    with pytest.raises(LandscapeMismatchError):
        mse(a, b)
    with pytest.raises(LandscapeMismatchError):
        mse(a, _land([0, 1, 2, 3]))


def test_cycle_mse_small():
    spec = LandscapeSpec.grid(12)
    assert mse(sample_landscape(generate_cycle(7), 1, spec), sample_landscape(generate_cycle(10), 1, spec)) <= 1e-3


def test_approximation_ratio():
    assert approximation_ratio(4.0, 4) == 1.0
    assert approximation_ratio(2.0, 4) == 0.5
    c5 = generate_cycle(5)
    assert approximation_ratio(qaoa_expectation(c5, ParamVector.zeros(1)), max_cut_bruteforce(c5)[0]) == pytest.approx(0.625, abs=1e-12)
    with pytest.raises(ValueError):
        approximation_ratio(0.0, 0)


def test_witness_ratio_is_one():
    g = generate_connected_erdos_renyi(9, 0.4, 2)
    from red_qaoa.simulator import cut_spectrum
    value, z = max_cut_bruteforce(g)
    assert approximation_ratio(float(cut_spectrum(g)[z]), value) == 1.0


def test_torus_distance():
    assert torus_distance([0.1, 0.1], [2 * math.pi - 0.1, math.pi - 0.1]) == pytest.approx(math.hypot(0.2, 0.2))
    assert torus_distance([1.0, 1.0, 0.5, 0.5], [1.0, 1.0 + 2 * math.pi, 0.5 + math.pi, 0.5]) == pytest.approx(0)


def test_optimal_point_distance():
    land = sample_landscape(generate_cycle(5), 1, LandscapeSpec.random(200, 4))
    assert optimal_point_distance(land, land) == 0
    neg = land.with_energies(-land.energies)
    assert optimal_point_distance(land, neg) > 0
    assert optimal_point_distance(land, land, top_k=5) == 0
    with pytest.raises(ValueError):
        optimal_point_distance(land, land, top_k=0)


def test_compare_report():
    land = sample_landscape(generate_cycle(5), 1, LandscapeSpec.random(50, 4))
    rep = compare_landscapes(land, land)
    assert rep.mse == 0 and rep.point_count == 50 and rep.optimal_distance == 0
    assert rep.to_json()["mse_percent"] == 0
