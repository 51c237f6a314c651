#pragma once

#include <stdexcept>
#include <vector>

#include "phlb/phase_type.hpp"

namespace phlb {

struct UnstableModel : std::domain_error {
    using std::domain_error::domain_error;
};

struct ModelParams {
    PhaseType ph;
    double lambda;
    int d;

    ModelParams(PhaseType ph_, double lambda_, int d_);

    double mu() const { return ph.service_rate(); }
    double rho() const { return lambda / mu(); }
    void require_stable() const;
};

// (A_k, B_k) with A_k = sum_{j=0}^{k-2} d^j and B_k = sum_{j=0}^{k-1} d^j,
// evaluated as sums so d=1 gives (k-1, k)
struct ExponentPair {
    double a, b;
};
ExponentPair exponent_pair(int k, int d);

// pi_k = theta^{A_k} rho^{B_k} omega, k >= 1, computed in log space;
// magnitudes below 1e-300 underflow to exact zero
RowVec fixed_point_vector(const ModelParams& params, int k);

struct FixedPointTable {
    std::vector<RowVec> levels;  // levels[i] = pi_{i+1}
    RowVec omega;
    double rho, theta, mu, lambda;
    int d;

    int depth() const { return static_cast<int>(levels.size()); }
    // pi_k e; k = 0 gives 1, k beyond depth recomputes from the formula
    double tail(int k) const;
};

struct TableOptions {
    double tail_eps = 1e-16;
    int max_levels = 0;  // 0: stop on tail_eps only (hard cap 512)
};

FixedPointTable fixed_point_table(const ModelParams& params, TableOptions opts = {});

// Residuals of the stationary balance equations evaluated at the closed-form
// pi. level0 is the scalar equation -lambda + pi_1 T0; vec[k-1] is the level-k
// vector equation and scalar[k-1] its sum across phases. The closed form
// satisfies the scalar equations; the vector equations vanish only for m = 1.
struct BalanceReport {
    double level0;
    std::vector<double> scalar;
    std::vector<RowVec> vec;

    double max_scalar() const;
    double max_vector() const;
};

BalanceReport balance_residuals(const ModelParams& params, int kmax);

// E[T_d]: residual-service lead term plus the mean-service series
double expected_sojourn(const ModelParams& params);

}  // namespace phlb
