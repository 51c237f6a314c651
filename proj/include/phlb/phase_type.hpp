#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "phlb/rng.hpp"

namespace phlb {

using RowVec = Eigen::RowVectorXd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Phase-type distribution (alpha, T): absorption time of a Markov chain with
// initial law alpha over m transient phases and subgenerator T. Exit rates
// T0 = -T e. Construction validates the representation; accessors derived
// from (alpha, T) are cheap because m is small.
class PhaseType {
public:
    PhaseType(RowVec alpha, Mat T);

    int order() const { return static_cast<int>(alpha_.size()); }
    const RowVec& alpha() const { return alpha_; }
    const Mat& T() const { return T_; }
    const Vec& exit_rates() const { return exit_; }

    double mean() const;
    // n-th raw moment, n! alpha (-T)^{-n} e
    double moment(int n) const;

    // stationary law omega of the generator T + T0 alpha; zero on phases
    // unreachable from the support of alpha
    const RowVec& stationary_phase_vector() const;

    // mu = omega T0 = 1/mean
    double service_rate() const;

    // theta = sum_i omega_i^d
    double theta(int d) const;

    // residual-service representation (omega, T)
    PhaseType residual() const;

    double sample(Philox& rng) const;

    // (-T)^{-1} rhs
    Vec solve(const Vec& rhs) const;

private:
    RowVec alpha_;
    Mat T_;
    Vec exit_;
    Eigen::FullPivLU<Mat> lu_;  // of -T
    RowVec omega_;
};

PhaseType erlang(int m, double rate);
PhaseType hyper_exponential(const RowVec& weights, const RowVec& rates);
PhaseType exponential(double rate);
// canonical order-2 representation: alpha=(eta, 1-eta), upper-bidiagonal T
// with rates xi1 <= xi2
PhaseType coxian2(double eta, double xi1, double xi2);

}  // namespace phlb
