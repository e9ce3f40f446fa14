import math

import numpy as np
import pytest

from evotrace.problems import (
    evaluate,
    get_problem,
    random_population,
    sample_reference_set,
)


def test_dtlz2_center_point():
    problem = get_problem("dtlz2", n=12)
    f = evaluate(problem, [0.5] * 12)
    assert f[0] == pytest.approx(0.5, abs=1e-12)
    assert f[1] == pytest.approx(0.5, abs=1e-12)
    assert f[2] == pytest.approx(math.sqrt(2) / 2, abs=1e-12)


def test_zdt1_zero_vector():
    problem = get_problem("zdt1")
    assert evaluate(problem, [0.0] * 30) == (0.0, 1.0)


def test_dtlz2_front_membership():
    problem = get_problem("dtlz2", n=12)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = np.full(12, 0.5)
        x[:2] = rng.uniform(0, 1, size=2)
        f = evaluate(problem, x)
        assert np.linalg.norm(f) == pytest.approx(1.0, abs=1e-12)


def test_evaluate_is_pure():
    problem = get_problem("dtlz3")
    x = np.linspace(0.1, 0.9, problem.n)
    assert evaluate(problem, x) == evaluate(problem, x)


def test_evaluate_rejects_out_of_bounds():
    problem = get_problem("dtlz1")
    with pytest.raises(ValueError):
        evaluate(problem, [1.5] + [0.5] * (problem.n - 1))
    with pytest.raises(ValueError):
        evaluate(problem, [0.5] * (problem.n + 1))


def test_dtlz1_lattice_h2():
    problem = get_problem("dtlz1")
    objectives, _ = sample_reference_set(problem, 6)
    assert len(objectives) == 6
    for point in objectives:
        assert sum(point) == pytest.approx(0.5, abs=1e-12)
    assert (0.5, 0.0, 0.0) in objectives
    assert (0.25, 0.25, 0.0) in objectives


def test_zdt1_reference_three_points():
    problem = get_problem("zdt1")
    objectives, decisions = sample_reference_set(problem, 3)
    assert objectives[0] == (0.0, 1.0)
    assert objectives[1] == (0.5, 1.0 - math.sqrt(0.5))
    assert objectives[2] == (1.0, 0.0)
    for x, f in zip(decisions, objectives):
        assert evaluate(problem, x) == pytest.approx(f, abs=1e-12)


def test_dtlz2_reference_on_unit_sphere():
    problem = get_problem("dtlz2")
    objectives, decisions = sample_reference_set(problem, 50)
    assert len(objectives) >= 50
    for point in objectives:
        assert np.linalg.norm(point) == pytest.approx(1.0, abs=1e-12)
    # the paired decisions evaluate back onto the sampled points
    for x, f in zip(decisions[:10], objectives[:10]):
        assert evaluate(problem, x) == pytest.approx(f, abs=1e-9)


def test_dtlz1_front_residual_and_pairing():
    problem = get_problem("dtlz1")
    objectives, decisions = sample_reference_set(problem, 30)
    for x, f in zip(decisions, objectives):
        assert evaluate(problem, x) == pytest.approx(f, abs=1e-9)
        assert abs(sum(f) - 0.5) < 1e-9


def test_default_reference_count_for_m3():
    problem = get_problem("dtlz2")
    objectives, _ = sample_reference_set(problem, 990)
    assert len(objectives) == 990  # H=43 lattice


def test_reference_count_validation():
    problem = get_problem("dtlz2")
    with pytest.raises(ValueError):
        sample_reference_set(problem, 2)


def test_random_population_reproducible():
    problem = get_problem("zdt1")
    a = random_population(problem, 5, np.random.default_rng(42))
    b = random_population(problem, 5, np.random.default_rng(42))
    assert a == b
    for vector in a:
        assert len(vector) == problem.n
        assert all(0.0 <= v <= 1.0 for v in vector)


def test_random_population_uniform_mean():
    problem = get_problem("zdt1", n=2)
    samples = random_population(problem, 10_000, np.random.default_rng(7))
    mean = np.mean([s[0] for s in samples])
    assert abs(mean - 0.5) < 0.02


def test_random_population_size_validation():
    problem = get_problem("zdt1")
    with pytest.raises(ValueError):
        random_population(problem, 0, np.random.default_rng(0))
    assert len(random_population(problem, 1, np.random.default_rng(0))) == 1


def test_problem_name_validation():
    with pytest.raises(ValueError):
        get_problem("dtlz9")
    spec = get_problem("dtlz3")
    assert (spec.n, spec.m) == (10, 3)
    assert get_problem("dtlz3", n=12).n == 12
