#include "phlb/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phlb {

namespace {

constexpr double kUnderflow = 1e-300;

// log of theta^a rho^b, with the theta term skipped when theta == 1 so an
// infinite exponent cannot poison the product (0 * inf)
double log_magnitude(double theta, double rho, double a, double b) {
    const double lt = std::log(theta);
    const double lr = std::log(rho);
    double s = b * lr;
    if (lt != 0.0 && a != 0.0) s += a * lt;
    return s;
}

}  // namespace

ModelParams::ModelParams(PhaseType ph_, double lambda_, int d_)
    : ph(std::move(ph_)), lambda(lambda_), d(d_) {
    if (!(lambda > 0.0)) throw std::invalid_argument("model: lambda must be positive");
    if (d < 1) throw std::invalid_argument("model: d must be >= 1");
}

void ModelParams::require_stable() const {
    if (rho() >= 1.0) {
        std::ostringstream os;
        os << "model: unstable, rho = " << rho() << " >= 1";
        throw UnstableModel(os.str());
    }
}

ExponentPair exponent_pair(int k, int d) {
    if (k < 1 || d < 1) throw std::invalid_argument("exponent_pair: need k >= 1 and d >= 1");
    double a = 0.0, pow_d = 1.0;
    for (int j = 0; j <= k - 2; ++j) {
        a += pow_d;
        pow_d *= d;
    }
    // B_k extends the same sum by the j = k-1 term
    return {a, a + pow_d};
}

RowVec fixed_point_vector(const ModelParams& params, int k) {
    params.require_stable();
    if (k < 1) throw std::invalid_argument("fixed_point_vector: k must be >= 1 (pi_0 is the scalar 1)");
    const RowVec& omega = params.ph.stationary_phase_vector();
    const auto [a, b] = exponent_pair(k, params.d);
    const double lm = log_magnitude(params.ph.theta(params.d), params.rho(), a, b);
    const double mag = lm < std::log(kUnderflow) ? 0.0 : std::exp(lm);
    return mag * omega;
}

double FixedPointTable::tail(int k) const {
    if (k < 0) throw std::invalid_argument("tail: k must be >= 0");
    if (k == 0) return 1.0;
    if (k <= depth()) return levels[k - 1].sum();
    double a = 0.0, pow_d = 1.0;
    for (int j = 0; j <= k - 2; ++j) {
        a += pow_d;
        pow_d *= d;
    }
    const double lm = log_magnitude(theta, rho, a, a + pow_d);
    return lm < std::log(kUnderflow) ? 0.0 : std::exp(lm);
}

FixedPointTable fixed_point_table(const ModelParams& params, TableOptions opts) {
    params.require_stable();
    FixedPointTable table;
    table.omega = params.ph.stationary_phase_vector();
    table.rho = params.rho();
    table.theta = params.ph.theta(params.d);
    table.mu = params.mu();
    table.lambda = params.lambda;
    table.d = params.d;

    const int cap = opts.max_levels > 0 ? opts.max_levels : 512;
    for (int k = 1; k <= cap; ++k) {
        RowVec pi = fixed_point_vector(params, k);
        if (opts.max_levels == 0 && pi.sum() < opts.tail_eps) break;
        table.levels.push_back(std::move(pi));
    }
    return table;
}

double BalanceReport::max_scalar() const {
    double worst = std::abs(level0);
    for (double s : scalar) worst = std::max(worst, std::abs(s));
    return worst;
}

double BalanceReport::max_vector() const {
    double worst = 0.0;
    for (const auto& v : vec) worst = std::max(worst, v.cwiseAbs().maxCoeff());
    return worst;
}

BalanceReport balance_residuals(const ModelParams& params, int kmax) {
    params.require_stable();
    if (kmax < 1) throw std::invalid_argument("balance_residuals: kmax must be >= 1");
    const PhaseType& ph = params.ph;
    const double lambda = params.lambda;
    const RowVec alpha = ph.alpha();
    const Vec& t0 = ph.exit_rates();

    // pi_0 is the scalar 1; pi_0^d times alpha feeds level 1
    std::vector<RowVec> pi(kmax + 2);
    for (int k = 1; k <= kmax + 1; ++k) pi[k] = fixed_point_vector(params, k);

    BalanceReport rep;
    rep.level0 = -lambda + (pi[1] * t0)(0);
    for (int k = 1; k <= kmax; ++k) {
        const RowVec inflow =
            k == 1 ? RowVec(lambda * alpha)
                   : RowVec(lambda * pi[k - 1].array().pow(params.d).matrix());
        RowVec r = inflow - lambda * pi[k].array().pow(params.d).matrix() + pi[k] * ph.T() +
                   ((pi[k + 1] * t0)(0)) * alpha;
        rep.scalar.push_back(r.sum());
        rep.vec.push_back(std::move(r));
    }
    return rep;
}

double expected_sojourn(const ModelParams& params) {
    params.require_stable();
    const PhaseType& ph = params.ph;
    const int m = ph.order();
    const double rho = params.rho();
    const double theta = ph.theta(params.d);

    const Vec inv_e = ph.solve(Vec::Ones(m));
    const double mean_service = (ph.alpha() * inv_e)(0);
    const double mean_residual = (ph.stationary_phase_vector() * inv_e)(0);

    const double lead = std::pow(rho, params.d) * theta * (mean_residual - mean_service);

    // sum_{k>=1} theta^{B_k} rho^{d B_k}
    double series = 0.0;
    double b = 0.0, pow_d = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        b += pow_d;
        pow_d *= params.d;
        const double lm = log_magnitude(theta, rho, b, static_cast<double>(params.d) * b);
        const double term = lm < std::log(kUnderflow) ? 0.0 : std::exp(lm);
        series += term;
        if (term < 1e-14) break;
    }
    return lead + mean_service * (1.0 + series);
}

}  // namespace phlb
