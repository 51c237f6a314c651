#include "phlb/phase_type.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace phlb {

namespace {

constexpr double kTol = 1e-9;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("phase type: " + msg); }

// reachable phases from the support of alpha under T jumps and exits
// recycled through alpha
std::vector<bool> reachable_set(const RowVec& alpha, const Mat& T, const Vec& exit) {
    const int m = static_cast<int>(alpha.size());
    std::vector<std::vector<int>> adj(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            if (T(i, j) > 0.0 || (exit(i) > 0.0 && alpha(j) > 0.0)) adj[i].push_back(j);
        }
    std::vector<bool> seen(m, false);
    std::vector<int> stack;
    for (int i = 0; i < m; ++i)
        if (alpha(i) > 0.0) {
            seen[i] = true;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j : adj[i])
            if (!seen[j]) {
                seen[j] = true;
                stack.push_back(j);
            }
    }
    return seen;
}

}  // namespace

PhaseType::PhaseType(RowVec alpha, Mat T) : alpha_(std::move(alpha)), T_(std::move(T)) {
    const int m = static_cast<int>(alpha_.size());
    if (m == 0) fail("empty representation");
    if (T_.rows() != m || T_.cols() != m) fail("alpha and T sizes disagree");
    if (!alpha_.allFinite() || !T_.allFinite()) fail("non-finite entries");

    double asum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (alpha_(i) < -kTol) fail("negative initial probability");
        if (alpha_(i) < 0.0) alpha_(i) = 0.0;
        asum += alpha_(i);
    }
    if (std::abs(asum - 1.0) > kTol) fail("initial probabilities must sum to 1");

    for (int i = 0; i < m; ++i) {
        if (T_(i, i) >= 0.0) fail("diagonal of T must be negative");
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            if (T_(i, j) < -kTol) fail("negative off-diagonal rate");
            if (T_(i, j) < 0.0) T_(i, j) = 0.0;
        }
    }

    exit_ = -T_ * Vec::Ones(m);
    double exit_max = 0.0;
    for (int i = 0; i < m; ++i) {
        if (exit_(i) < -kTol) fail("row sum of T exceeds 0");
        if (exit_(i) < 0.0) exit_(i) = 0.0;
        exit_max = std::max(exit_max, exit_(i));
    }
    if (exit_max <= kTol) fail("no exit rate: absorption impossible");

    lu_.compute(-T_);
    if (!lu_.isInvertible()) fail("T is singular: absorption not certain from every phase");

    // omega: stationary law of T + T0 alpha, solved on the reachable set and
    // zero elsewhere (unreachable phases are harmless but carry no mass)
    const std::vector<bool> reach = reachable_set(alpha_, T_, exit_);
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
        if (reach[i]) idx.push_back(i);
    const int r = static_cast<int>(idx.size());

    Mat Q = T_ + exit_ * alpha_;
    Mat A(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) A(a, b) = (b == r - 1) ? 1.0 : Q(idx[a], idx[b]);
    Vec rhs = Vec::Zero(r);
    rhs(r - 1) = 1.0;
    Eigen::FullPivLU<Mat> qlu(A.transpose());
    if (!qlu.isInvertible()) fail("reducible representation: no unique stationary phase law");
    const Vec w = qlu.solve(rhs);

    omega_ = RowVec::Zero(m);
    for (int a = 0; a < r; ++a) {
        if (w(a) < -kTol) fail("reducible representation: stationary law not positive");
        omega_(idx[a]) = std::max(w(a), 0.0);
    }
}

double PhaseType::mean() const { return moment(1); }

double PhaseType::moment(int n) const {
    if (n < 1 || n > 170) throw std::invalid_argument("moment order must be in [1, 170]");
    Vec v = Vec::Ones(order());
    double factorial = 1.0;
    for (int i = 1; i <= n; ++i) {
        v = lu_.solve(v);
        factorial *= i;
    }
    return factorial * (alpha_ * v)(0);
}

const RowVec& PhaseType::stationary_phase_vector() const { return omega_; }

double PhaseType::service_rate() const { return omega_ * exit_; }

double PhaseType::theta(int d) const {
    if (d < 1) throw std::invalid_argument("theta: d must be >= 1");
    double s = 0.0;
    for (int i = 0; i < order(); ++i) s += std::pow(omega_(i), d);
    return s;
}

PhaseType PhaseType::residual() const { return PhaseType(omega_, T_); }

double PhaseType::sample(Philox& rng) const {
    const int m = order();
    double u = rng.uniform();
    int phase = -1;
    double cum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (alpha_(i) <= 0.0) continue;
        cum += alpha_(i);
        phase = i;
        if (u <= cum) break;
    }
    double t = 0.0;
    while (true) {
        const double rate = -T_(phase, phase);
        t += rng.exponential(rate);
        u = rng.uniform() * rate;
        double acc = 0.0;
        int next = -1;
        for (int j = 0; j < m; ++j) {
            if (j == phase || T_(phase, j) <= 0.0) continue;
            acc += T_(phase, j);
            if (u <= acc) {
                next = j;
                break;
            }
        }
        if (next < 0) {
            if (exit_(phase) > 0.0) return t;
            // no exit here: rounding pushed u past the jump mass
            for (int j = m - 1; j >= 0; --j)
                if (j != phase && T_(phase, j) > 0.0) {
                    next = j;
                    break;
                }
        }
        phase = next;
    }
}

Vec PhaseType::solve(const Vec& rhs) const { return lu_.solve(rhs); }

PhaseType erlang(int m, double rate) {
    if (m < 1) throw std::invalid_argument("erlang: need at least one phase");
    if (rate <= 0.0) throw std::invalid_argument("erlang: rate must be positive");
    RowVec a = RowVec::Zero(m);
    a(0) = 1.0;
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = -rate;
        if (i + 1 < m) T(i, i + 1) = rate;
    }
    return {a, T};
}

PhaseType hyper_exponential(const RowVec& weights, const RowVec& rates) {
    if (weights.size() != rates.size() || weights.size() == 0)
        throw std::invalid_argument("hyper_exponential: weights and rates sizes disagree");
    const int m = static_cast<int>(weights.size());
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        if (rates(i) <= 0.0) throw std::invalid_argument("hyper_exponential: rates must be positive");
        T(i, i) = -rates(i);
    }
    return {weights, T};
}

PhaseType exponential(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
    RowVec a(1);
    a(0) = 1.0;
    Mat T(1, 1);
    T(0, 0) = -rate;
    return {a, T};
}

PhaseType coxian2(double eta, double xi1, double xi2) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("coxian2: eta must be in [0, 1]");
    if (xi1 <= 0.0 || xi2 <= 0.0) throw std::invalid_argument("coxian2: rates must be positive");
    if (xi1 > xi2) throw std::invalid_argument("coxian2: canonical form needs xi1 <= xi2");
    RowVec a(2);
    a << eta, 1.0 - eta;
    Mat T(2, 2);
    T << -xi1, xi1, 0.0, -xi2;
    return {a, T};
}

}  // namespace phlb
