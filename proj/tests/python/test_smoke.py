import math

import pytest

import binpat


def test_counts():
    assert binpat.count_pattern("10", "0100101") == 4
    assert binpat.count_pattern("01", "01011") == 5
    assert binpat.count_all("0100101", 2) == {"0": 4, "1": 3, "00": 6, "01": 8, "10": 4, "11": 3}
    assert binpat.density("11", "111") == 1.0
    # exact beyond 64 bits
    assert binpat.count_pattern("1", "1" * 200) == 200
    assert binpat.count_pattern("11111111", "1" * 400) == math.comb(400, 8)


def test_relations_and_blocks():
    assert all(r[3] for r in binpat.check_relations("10100110"))
    assert binpat.block_counts_polynomial("1010", [13, 13, 13, 13]) == 28561
    pats = ["1", "10", "100", "110", "1000", "1100", "1110"]
    assert binpat.independence_rank(pats, [1.1, 2.3, 0.7, 1.9, 3.1, 0.5, 2.2, 1.3]) == 7


def test_measures():
    a = binpat.StepMeasure([(0.5, 1.0), (0.5, 0.0)])
    b = binpat.StepMeasure([(0.5, 0.0), (0.5, 1.0)])
    assert binpat.wasserstein(a, b) == pytest.approx(0.25, abs=1e-15)
    assert binpat.density_of_measure("1010", binpat.StepMeasure.constant(0.5)) == pytest.approx(1 / 16)
    assert binpat.entropy(binpat.StepMeasure.constant(0.5)) == pytest.approx(math.log(2))
    assert binpat.measure_of_word("10").cells == [(0.5, 1.0), (0.5, 0.0)]


def test_feasibility():
    assert binpat.c_closed_form("1010") == pytest.approx(12 / math.e**2)
    c, g = binpat.c_numeric("1010", 400)
    assert c == pytest.approx(12 / math.e**2, rel=5e-3)
    assert g.total_mass() == pytest.approx(1.0)
    f = binpat.extremal_density_1010(0.5, 2000)
    assert binpat.density_of_measure("1010", f) == pytest.approx(3 / (4 * math.e**2), abs=1e-4)
    assert binpat.feasible_interval("10", 0.3) == pytest.approx((0.0, 0.42))


def test_limit_shape():
    coeffs, f, s = binpat.solve_limit_shape("rho1=0.5,rho110=0.3333333333333333")
    assert binpat.density_of_measure("110", f) == pytest.approx(1 / 3, abs=1e-6)
    assert coeffs[0] < 0 and s > 0
    rho1, dens = binpat.phi_forward(coeffs)
    assert rho1 == pytest.approx(0.5, abs=1e-9)
    assert binpat.phi_jacobian([-1.0, 2.0]).shape == (2, 2)
    with pytest.raises(binpat.BoundaryReached):
        binpat.solve_limit_shape("rho1=0.5,rho10=0.4999")
    with pytest.raises(binpat.InfeasibleExponent):
        binpat.phi_forward([1.0, 2.0])


def test_heisenberg():
    assert binpat.matrix_of_word("01", "01101") == [[1, 2, 4], [0, 1, 3], [0, 0, 1]]
    assert binpat.min_minor("0101", "0110100111010", 2) >= 0


def test_sampler_and_deck():
    word, means, acc = binpat.mcmc_sample(200, ["1"], [0.0], seed=3, sweeps=50)
    assert len(word) == 200 and abs(means[0] - 0.5) < 0.05 and 0 < acc <= 1
    best, count, dens = binpat.optimize_deck(8, 4, "10", "exhaustive")
    assert (best, count) == ("11110000", 16)


def test_errors():
    with pytest.raises(ValueError):
        binpat.count_pattern("12", "0101")
    with pytest.raises(binpat.InvalidArgument):
        binpat.count_pattern("", "0101")
