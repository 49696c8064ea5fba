#include <doctest.h>

#include <cmath>

#include "agg/oracle.hpp"
#include "agg/rng.hpp"
#include "agg/sim.hpp"

using namespace agg;

namespace {

Dictionary orthonormal_pair() {
    Eigen::MatrixXd v(4, 2);
    v << 1, 1, 1, -1, 1, 1, 1, -1;
    return Dictionary(v, 1.0);
}

Dictionary random_dict(int n, int m, std::uint64_t seed) {
    auto eng = make_engine(seed);
    Eigen::MatrixXd v(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) v(i, j) = standard_normal(eng);
    return Dictionary(v, v.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("ms_oracle") {
    Dictionary dict = orthonormal_pair();
    OracleResult res = ms_oracle(dict, dict.column(1));
    CHECK(res.value == 0.0);
    CHECK(res.argmin.support() == std::vector<int>{1});
    CHECK(res.kind == RateKind::MS);

    // Equidistant target: the smallest index wins.
    OracleResult tie = ms_oracle(dict, Eigen::VectorXd::Zero(4));
    CHECK(tie.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tie.argmin.support() == std::vector<int>{0});

    CHECK_THROWS_AS(ms_oracle(dict, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("s_oracle") {
    Dictionary dict = orthonormal_pair();
    Eigen::VectorXd f = dict.column(0) + dict.column(1);

    OracleResult d1 = s_oracle(dict, f, 1);
    CHECK(d1.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d1.argmin.m_of_lambda() == 1);

    OracleResult d2 = s_oracle(dict, f, 2);
    CHECK(d2.value == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(d2.argmin.coeffs()(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d2.argmin.coeffs()(1) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(s_oracle(dict, f, 0), DomainError);
    CHECK_THROWS_AS(s_oracle(dict, f, 3), DomainError);
}

TEST_CASE("l_oracle") {
    Dictionary dict = orthonormal_pair();
    Eigen::VectorXd f = 3.0 * dict.column(0) - 2.0 * dict.column(1);
    OracleResult res = l_oracle(dict, f);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.argmin.coeffs()(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.argmin.coeffs()(1) == doctest::Approx(-2.0).epsilon(1e-12));

    // Target orthogonal to the span keeps its full norm.
    Eigen::VectorXd g(4);
    g << 1, 0, -1, 0;  // orthogonal to both columns
    CHECK(l_oracle(dict, g).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("c_oracle exact cases") {
    Dictionary dict = orthonormal_pair();

    // Target inside the hull: risk 0.
    Eigen::VectorXd f = 0.25 * dict.column(0) + 0.5 * dict.column(1);
    OracleResult inside = c_oracle(dict, f);
    CHECK(inside.value <= 1e-8);
    CHECK(inside.certificate <= 1e-8);

    // Target at a vertex.
    OracleResult vertex = c_oracle(dict, dict.column(0));
    CHECK(vertex.value <= 1e-8);

    // Zero target: lambda = 0, gap 0 at the first iterate.
    OracleResult zero = c_oracle(dict, Eigen::VectorXd::Zero(4));
    CHECK(zero.value == 0.0);
    CHECK(zero.argmin.m_of_lambda() == 0);

    CHECK_THROWS_AS(c_oracle(dict, f, 0.0), DomainError);
}

TEST_CASE("c_oracle projects outside targets onto the hull boundary") {
    Dictionary dict = orthonormal_pair();
    // 1.5*f1 lies outside {sum lambda <= 1}: the best convex fit is f1,
    // with risk ||0.5 f1||_n^2 = 0.25.
    OracleResult res = c_oracle(dict, Eigen::VectorXd(1.5 * dict.column(0)), 1e-10);
    CHECK(res.value == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(res.argmin.coeffs()(0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("c_oracle matches a fine grid search on a 3-column dictionary") {
    Dictionary dict = random_dict(12, 3, 5);
    Eigen::VectorXd f = 0.8 * dict.column(0) + 0.7 * dict.column(2);  // outside the hull
    OracleResult res = c_oracle(dict, f, 1e-10);

    double grid_best = empirical_norm_sq(f, 12);
    const int steps = 200;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j + i <= steps; ++j)
            for (int k = 0; k + i + j <= steps; ++k) {
                Eigen::VectorXd lam(3);
                lam << i / double(steps), j / double(steps), k / double(steps);
                grid_best = std::min(
                    grid_best,
                    empirical_norm_sq(dict.values() * lam - f, 12));
            }
    CHECK(res.value <= grid_best + 1e-9);
    CHECK(res.value >= grid_best - 1e-3);  // grid is only 1/200-accurate
}

TEST_CASE("oracle nesting: L <= C <= MS and L <= S(d) <= S(1) <= MS-risk scale") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Dictionary dict = random_dict(20, 5, seed);
        auto eng = make_engine(seed + 100);
        Eigen::VectorXd f(20);
        for (int i = 0; i < 20; ++i) f(i) = standard_normal(eng);

        const double ms = ms_oracle(dict, f).value;
        const double c = c_oracle(dict, f).value;
        const double l = l_oracle(dict, f).value;
        CHECK(l <= c + 1e-9);
        CHECK(c <= ms + 1e-9);

        double prev = ms + 1e-9;
        for (int d = 1; d <= 5; ++d) {
            const double s = s_oracle(dict, f, d).value;
            CHECK(s <= prev + 1e-12);  // S(d) decreasing, S(1) <= MS
            prev = s;
        }
        CHECK(std::abs(s_oracle(dict, f, 5).value - l) <= 1e-10);
    }
}

TEST_CASE("maurey_round basics") {
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    WeightVector lam(p);

    WeightVector rounded = maurey_round(lam, 4, 42);
    // Frequencies over 4 draws: multiples of 1/4 summing to <= 1.
    double sum = 0.0;
    for (int j = 0; j < 2; ++j) {
        const double c = rounded.coeffs()(j) * 4.0;
        CHECK(c == doctest::Approx(std::round(c)).epsilon(1e-12));
        CHECK(rounded.coeffs()(j) >= 0.0);
        sum += rounded.coeffs()(j);
    }
    CHECK(sum <= 1.0 + 1e-12);

    // Deterministic in the seed.
    WeightVector again = maurey_round(lam, 4, 42);
    CHECK((again.coeffs() - rounded.coeffs()).norm() == 0.0);
    WeightVector other = maurey_round(lam, 1000, 43);
    CHECK((other.coeffs() - maurey_round(lam, 1000, 42).coeffs()).norm() != 0.0);

    CHECK_THROWS_AS(maurey_round(lam, 0, 1), DomainError);
    Eigen::VectorXd bad(2);
    bad << 0.9, 0.9;
    CHECK_THROWS_AS(maurey_round(WeightVector(bad), 1, 1), DomainError);
    bad << -0.1, 0.5;
    CHECK_THROWS_AS(maurey_round(WeightVector(bad), 1, 1), DomainError);
}

TEST_CASE("maurey expected risk: hand value and exact 1/m scaling") {
    Dictionary dict = orthonormal_pair();
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    WeightVector lam(p);
    Eigen::VectorXd f = dict.values() * p;  // zero bias

    // Variance term: sum lambda_j ||f_j||^2 - ||f_lambda||^2 = 1 - 0.5.
    CHECK(maurey_expected_risk(dict, f, lam, 1) == doctest::Approx(0.5).epsilon(1e-14));
    const double r1 = maurey_expected_risk(dict, f, lam, 1);
    for (int m = 2; m <= 64; m *= 2) {
        CHECK(maurey_expected_risk(dict, f, lam, m) ==
              doctest::Approx(r1 / m).epsilon(1e-12));
    }

    // Biased target adds the bias once, not per draw.
    Eigen::VectorXd g = f + Eigen::VectorXd::Constant(4, 0.1);
    const double bias = empirical_norm_sq(g - f, 4);
    CHECK(maurey_expected_risk(dict, g, lam, 8) ==
          doctest::Approx(bias + 0.5 / 8.0).epsilon(1e-12));
}

TEST_CASE("maurey expected risk matches the Monte Carlo average") {
    Dictionary dict = orthonormal_pair();
    Eigen::VectorXd p(2);
    p << 0.3, 0.4;
    WeightVector lam(p);
    Eigen::VectorXd f = 0.9 * dict.column(0);

    const int m = 3;
    const double expect = maurey_expected_risk(dict, f, lam, m);
    const int reps = 200000;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        WeightVector bar = maurey_round(lam, m, 1000 + r);
        acc += empirical_norm_sq(dict.values() * bar.coeffs() - f, 4);
    }
    const double mc = acc / reps;
    CHECK(mc == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("maurey bound: expectation <= convex risk + L^2/m") {
    Dictionary dict = orthonormal_pair();  // bound L = 1
    auto eng = make_engine(9);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd f(4);
        for (int i = 0; i < 4; ++i) f(i) = standard_normal(eng);
        OracleResult c = c_oracle(dict, f, 1e-10);
        for (int m = 1; m <= 8; ++m) {
            const double e = maurey_expected_risk(dict, f, c.argmin, m);
            CHECK(e <= c.value + 1.0 / m + 1e-6);
        }
    }
}
