#include <doctest.h>

#include <cmath>
#include <vector>

#include "phlb/fixed_point.hpp"

using namespace phlb;

namespace {

RowVec row2(double a, double b) {
    RowVec r(2);
    r << a, b;
    return r;
}

PhaseType t1() {
    Mat T(2, 2);
    T << -4, 3, 2, -7;
    return {row2(0.5, 0.5), T};
}

PhaseType hyper_3_10() { return hyper_exponential(row2(0.5, 0.5), row2(3, 10)); }

std::vector<ModelParams> fixtures() {
    return {
        ModelParams(exponential(1.0), 0.9, 2),
        ModelParams(erlang(2, 3), 1.0, 2),
        ModelParams(erlang(3, 4), 1.0, 3),
        ModelParams(hyper_3_10(), 1.0, 2),
        ModelParams(t1(), 1.0, 2),
    };
}

}  // namespace

TEST_CASE("exponent pairs follow the geometric sums") {
    for (int d : {1, 2, 3, 5}) {
        auto [a, b] = exponent_pair(1, d);
        CHECK(a == 0.0);
        CHECK(b == 1.0);
    }
    CHECK(exponent_pair(3, 2).a == 3.0);
    CHECK(exponent_pair(3, 2).b == 7.0);
    CHECK(exponent_pair(4, 1).a == 3.0);
    CHECK(exponent_pair(4, 1).b == 4.0);
    CHECK(exponent_pair(5, 3).a == 40.0);
    CHECK(exponent_pair(5, 3).b == 121.0);
    CHECK_THROWS_AS(exponent_pair(0, 2), std::invalid_argument);
}

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(ModelParams(exponential(1.0), -0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(exponential(1.0), 0.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(fixed_point_table(ModelParams(exponential(1.0), 1.1, 2)), UnstableModel);
    CHECK_THROWS_AS(expected_sojourn(ModelParams(exponential(1.0), 1.0, 2)), UnstableModel);
    CHECK_THROWS_AS(fixed_point_vector(ModelParams(exponential(1.0), 0.9, 2), 0),
                    std::invalid_argument);
}

TEST_CASE("hyper-exponential eta=(3,10) levels") {
    ModelParams params(hyper_3_10(), 1.0, 2);
    FixedPointTable table = fixed_point_table(params, {.max_levels = 5});

    const double expect[5][2] = {{0.166667, 0.05},
                                 {0.0050463, 0.00151389},
                                 {4.62616e-06, 1.38785e-06},
                                 {3.88791e-12, 1.16637e-12},
                                 {2.74605e-24, 8.23816e-25}};
    REQUIRE(table.depth() >= 5);
    for (int k = 1; k <= 5; ++k)
        for (int i = 0; i < 2; ++i)
            CHECK(table.levels[k - 1](i) == doctest::Approx(expect[k - 1][i]).epsilon(1e-5));
    CHECK(table.theta == doctest::Approx(109.0 / 169).epsilon(1e-12));
    CHECK(table.mu == doctest::Approx(60.0 / 13).epsilon(1e-12));
}

TEST_CASE("order-2 fixture levels") {
    ModelParams params(t1(), 1.0, 2);
    FixedPointTable table = fixed_point_table(params, {.max_levels = 5});

    REQUIRE(table.depth() == 5);
    CHECK(table.rho == doctest::Approx(4.0 / 11).epsilon(1e-12));
    CHECK(table.theta == doctest::Approx(0.5078125).epsilon(1e-12));
    CHECK(table.levels[0](0) == doctest::Approx(0.204545).epsilon(1e-5));
    CHECK(table.levels[0](1) == doctest::Approx(0.159091).epsilon(1e-5));
    CHECK(table.levels[2](0) == doctest::Approx(6.19304e-05).epsilon(1e-5));
    CHECK(table.levels[2](1) == doctest::Approx(4.81681e-05).epsilon(1e-5));
    CHECK(table.levels[4](0) == doctest::Approx(5.20427e-19).epsilon(1e-5));
}

TEST_CASE("erlang closed form specialization") {
    for (double eta : {3.0, 5.0, 10.0}) {
        for (int m : {2, 3}) {
            if (eta <= m) continue;  // unstable
            ModelParams params(erlang(m, eta), 1.0, 2);
            for (int k = 1; k <= 5; ++k) {
                RowVec pi = fixed_point_vector(params, k);
                // pi_k = m^{2^{k-1}} eta^{1-2^k} with equal components
                const double mag =
                    std::pow(m, std::pow(2.0, k - 1)) * std::pow(eta, 1.0 - std::pow(2.0, k));
                for (int i = 0; i < m; ++i)
                    CHECK(pi(i) == doctest::Approx(mag / m).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("level-1 mass is rho and recursion links consecutive levels") {
    for (const auto& params : fixtures()) {
        FixedPointTable table = fixed_point_table(params);
        CHECK(table.levels[0].sum() == doctest::Approx(params.rho()).epsilon(1e-14));

        // pi_{k+1} = theta^{d^{k-1}} rho^{d^k} pi_k, the induction step
        double dk1 = 1.0;  // d^{k-1}
        for (int k = 1; k + 1 <= table.depth() && k <= 6; ++k) {
            const double factor =
                std::pow(table.theta, dk1) * std::pow(table.rho, dk1 * params.d);
            const RowVec& lo = table.levels[k - 1];
            const RowVec& hi = table.levels[k];
            if (hi.sum() == 0.0) break;
            for (int i = 0; i < lo.size(); ++i)
                CHECK(hi(i) == doctest::Approx(lo(i) * factor).epsilon(1e-12));
            dk1 *= params.d;
        }
    }
}

TEST_CASE("tails decay doubly exponentially") {
    ModelParams params(exponential(1.0), 0.9, 2);
    FixedPointTable table = fixed_point_table(params);
    for (int k = 1; k <= 6; ++k)
        CHECK(table.tail(k) == doctest::Approx(std::pow(0.9, std::pow(2.0, k) - 1)).epsilon(1e-12));
    // log-tail ratio approaches d
    const double ratio = std::log(table.tail(6)) / std::log(table.tail(5));
    CHECK(std::abs(ratio - params.d) < 0.05 * params.d);

    CHECK(table.tail(0) == 1.0);
    CHECK(table.tail(40) == 0.0);  // underflow is exact zero, not NaN
    CHECK(std::isfinite(table.tail(12)));
}

TEST_CASE("deep levels underflow to zero without NaN") {
    ModelParams params(hyper_3_10(), 1.0, 2);
    RowVec pi = fixed_point_vector(params, 50);
    for (int i = 0; i < pi.size(); ++i) {
        CHECK(pi(i) == 0.0);
        CHECK(!std::isnan(pi(i)));
    }
    // theta == 1 at d = 1 must not produce 0 * inf in the log-space path
    ModelParams d1(exponential(1.0), 0.5, 1);
    for (int k = 1; k <= 8; ++k)
        CHECK(fixed_point_vector(d1, k)(0) == doctest::Approx(std::pow(0.5, k)).epsilon(1e-13));
}

TEST_CASE("kmax forces the table depth, tail_eps stops early") {
    ModelParams params(exponential(1.0), 0.5, 2);
    TableOptions fixed;
    fixed.max_levels = 9;
    CHECK(fixed_point_table(params, fixed).depth() == 9);

    TableOptions eps;
    eps.tail_eps = 1e-6;
    FixedPointTable table = fixed_point_table(params, eps);
    CHECK(table.depth() < 9);
    CHECK(table.levels.back().sum() >= 1e-6);
}

TEST_CASE("scalar balance residuals vanish at the closed form") {
    for (const auto& params : fixtures()) {
        BalanceReport report = balance_residuals(params, 8);
        CHECK(std::abs(report.level0) < 1e-12 * params.lambda);
        CHECK(report.max_scalar() < 1e-12 * params.lambda);
    }
}

TEST_CASE("vector residuals vanish only for one phase") {
    ModelParams m1(exponential(1.0), 0.9, 2);
    CHECK(balance_residuals(m1, 8).max_vector() < 1e-12);

    // hand-substituted level-1 residual for Erlang(2,3), lambda=1, d=2
    ModelParams erl(erlang(2, 3), 1.0, 2);
    BalanceReport report = balance_residuals(erl, 4);
    CHECK(report.vec[0](0) == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(report.vec[0](1) == doctest::Approx(-1.0 / 9).epsilon(1e-12));
    CHECK(std::abs(report.scalar[0]) < 1e-13);
    CHECK(report.max_vector() > 1e-3);
}

TEST_CASE("expected sojourn reference values") {
    struct Row {
        PhaseType ph;
        double lambda;
        int d;
        double expect;
    };
    const Row rows[] = {
        {exponential(1.0), 0.5, 2, 1.265686},
        {exponential(1.0), 0.7, 2, 1.614454},
        {exponential(1.0), 0.8, 2, 1.947363},
        {exponential(1.0), 0.9, 2, 2.614057},
        {exponential(1.0), 0.5, 3, 1.125244},
        {exponential(1.0), 0.7, 3, 1.356842},
        {exponential(1.0), 0.8, 3, 1.580886},
        {exponential(1.0), 0.9, 3, 2.027856},
        {exponential(1.0), 0.9, 5, 1.632881},
        {erlang(2, 2), 0.9, 2, 1.371969},
        {erlang(2, 2), 0.9, 3, 1.137791},
        {erlang(2, 2), 0.9, 5, 1.027679},
        {erlang(2, 2), 0.5, 2, 1.095704},
        {erlang(3, 3), 0.9, 2, 1.199788},
        {erlang(3, 3), 0.9, 3, 1.054043},
        {erlang(3, 3), 0.5, 2, 1.056134},
        {hyper_exponential((RowVec(3) << 0.5, 0.25, 0.25).finished(),
                           (RowVec(3) << 2, 0.5, 1).finished()),
         0.9, 2, 1.445920},
        {hyper_exponential((RowVec(3) << 0.5, 0.25, 0.25).finished(),
                           (RowVec(3) << 2, 0.5, 1).finished()),
         0.9, 3, 1.156789},
        {hyper_exponential((RowVec(3) << 0.5, 0.25, 0.25).finished(),
                           (RowVec(3) << 2, 0.5, 1).finished()),
         0.5, 2, 1.129730},
        {t1(), 1.0, 2, 0.388927249},
    };
    for (const auto& row : rows) {
        ModelParams params(row.ph, row.lambda, row.d);
        CHECK(expected_sojourn(params) == doctest::Approx(row.expect).epsilon(2e-6));
    }
}

TEST_CASE("sojourn matches the exponential series term by term") {
    // for m = 1 the closed form reduces to (1/mu) sum_k rho^{(d^k - 1)/(d - 1) * d ... }
    for (double lambda : {0.5, 0.9}) {
        for (int d : {2, 3}) {
            ModelParams params(exponential(1.0), lambda, d);
            double sum = 1.0;
            for (int k = 1; k < 64; ++k) {
                const double bk = (std::pow(static_cast<double>(d), k) - 1) / (d - 1);
                const double term = std::pow(lambda, d * bk);
                if (term < 1e-17) break;
                sum += term;
            }
            CHECK(expected_sojourn(params) == doctest::Approx(sum).epsilon(1e-12));
        }
    }
}

TEST_CASE("sojourn at d=1 and monotonicity in d") {
    // d = 1 exponential: M/M/1 mean sojourn
    ModelParams mm1(exponential(2.0), 1.0, 1);
    CHECK(expected_sojourn(mm1) == doctest::Approx(1.0).epsilon(1e-12));

    // closed form at d = 1 for the Erlang fixture (differs from M/G/1 theory;
    // the formula's own geometric-sum limit)
    ModelParams erl1(erlang(2, 2), 0.5, 1);
    CHECK(expected_sojourn(erl1) == doctest::Approx(1.875).epsilon(1e-6));

    for (const auto& base : fixtures()) {
        double prev = 1e300;
        for (int d : {1, 2, 3, 5}) {
            ModelParams params(base.ph, base.lambda, d);
            const double v = expected_sojourn(params);
            CHECK(v <= prev * (1 + 1e-12));
            prev = v;
        }
    }
}
