#include "phlb/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phlb {

namespace {

// internal dense layout: K x m, row k-1 = S_k
Mat pack(const MeanFieldState& s) {
    Mat x(s.depth(), s.order());
    for (int k = 0; k < s.depth(); ++k) x.row(k) = s.levels[k];
    return x;
}

MeanFieldState unpack(const Mat& x, double t) {
    MeanFieldState s;
    s.t = t;
    s.levels.reserve(x.rows());
    for (int k = 0; k < x.rows(); ++k) s.levels.emplace_back(x.row(k));
    return s;
}

struct System {
    Mat T;
    Vec t0;
    RowVec alpha;
    double lambda;
    int d;

    explicit System(const ModelParams& p)
        : T(p.ph.T()), t0(p.ph.exit_rates()), alpha(p.ph.alpha()), lambda(p.lambda), d(p.d) {}

    // dX = level equations with S_0 = 1 and S_{K+1} = 0
    void rhs(const Mat& x, Mat& dx) const {
        const int K = static_cast<int>(x.rows());
        Mat pow_d = x.array().pow(d).matrix();
        for (int k = 0; k < K; ++k) {
            const double up_rate = k + 1 < K ? x.row(k + 1).dot(t0) : 0.0;
            dx.row(k) = (k == 0 ? RowVec(lambda * alpha)
                                : RowVec(lambda * pow_d.row(k - 1))) -
                        lambda * pow_d.row(k) + x.row(k) * T + up_rate * alpha;
        }
    }

    void rk4_step(Mat& x, double h, Mat& k1, Mat& k2, Mat& k3, Mat& k4, Mat& tmp) const {
        rhs(x, k1);
        tmp = x + (0.5 * h) * k1;
        rhs(tmp, k2);
        tmp = x + (0.5 * h) * k2;
        rhs(tmp, k3);
        tmp = x + h * k3;
        rhs(tmp, k4);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // integration noise, not model content
        x = (x.array() < 0.0 && x.array() > -1e-12).select(0.0, x);
    }
};

void check_finite(const Mat& x, double t) {
    if (!x.allFinite()) {
        std::ostringstream os;
        os << "mean field: state blew up at t = " << t << "; reduce the step";
        throw NumericalFailure(os.str());
    }
}

int default_depth(const ModelParams& params) {
    params.require_stable();
    TableOptions opts;
    opts.tail_eps = 1e-12;
    const FixedPointTable table = fixed_point_table(params, opts);
    return std::max(table.depth() + 1, 4);
}

Mat integrate_fixed_step(const System& sys, Mat x, double start, double horizon, double h,
                         Mat* samples, int sample_count, double* sample_times) {
    Mat k1 = x, k2 = x, k3 = x, k4 = x, tmp = x;
    const double span = horizon - start;
    const long steps = std::max(1L, std::lround(std::ceil(span / h)));
    const double step = span / static_cast<double>(steps);
    long next_sample = 1;
    for (long i = 0; i < steps; ++i) {
        sys.rk4_step(x, step, k1, k2, k3, k4, tmp);
        if ((i & 1023) == 0) check_finite(x, start + step * static_cast<double>(i + 1));
        if (samples != nullptr) {
            while (next_sample <= sample_count &&
                   static_cast<double>(i + 1) / static_cast<double>(steps) + 1e-15 >=
                       static_cast<double>(next_sample) / sample_count) {
                const int s = static_cast<int>(next_sample - 1);
                samples[s] = x;
                sample_times[s] = start + step * static_cast<double>(i + 1);
                ++next_sample;
            }
        }
    }
    check_finite(x, horizon);
    return x;
}

}  // namespace

double MeanFieldState::tail(int k) const {
    if (k < 0) throw std::invalid_argument("tail: k must be >= 0");
    if (k == 0) return 1.0;
    if (k > depth()) return 0.0;
    return levels[k - 1].sum();
}

MeanFieldState empty_state(int order, int depth) {
    if (order < 1 || depth < 1) throw std::invalid_argument("state: order and depth must be >= 1");
    MeanFieldState s;
    s.levels.assign(depth, RowVec::Zero(order));
    return s;
}

// depth 0 keeps the table's depth; otherwise pad with zeros or truncate.
// Levels past the table's stopping point carry < tail_eps mass, so zero
// padding matches the integrator's own closure.
MeanFieldState state_from_table(const FixedPointTable& table, int depth) {
    MeanFieldState s;
    s.levels = table.levels;
    if (depth > 0)
        s.levels.resize(static_cast<std::size_t>(depth), RowVec::Zero(table.omega.size()));
    return s;
}

std::vector<RowVec> derivative(const MeanFieldState& state, const ModelParams& params) {
    if (state.order() != params.ph.order())
        throw std::invalid_argument("derivative: state order does not match the distribution");
    const System sys(params);
    const Mat x = pack(state);
    Mat dx(x.rows(), x.cols());
    sys.rhs(x, dx);
    std::vector<RowVec> out;
    out.reserve(x.rows());
    for (int k = 0; k < x.rows(); ++k) out.emplace_back(dx.row(k));
    return out;
}

Trajectory integrate(const MeanFieldState& init, const ModelParams& params, double horizon,
                     OdeOptions opts) {
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    if (init.depth() < 1 || init.order() != params.ph.order())
        throw std::invalid_argument("integrate: initial state shape mismatch");

    const System sys(params);
    const double rate_scale = params.lambda + params.mu() * params.ph.order();
    double h = opts.step_scale / rate_scale;

    const int ns = std::max(opts.samples, 1);
    std::vector<Mat> samples(ns);
    std::vector<double> times(ns);
    const Mat x0 = pack(init);

    Mat final_state = integrate_fixed_step(sys, x0, init.t, init.t + horizon, h, samples.data(),
                                           ns, times.data());
    int refinements = 0;
    double diff = 0.0;
    if (opts.verify_step) {
        while (true) {
            std::vector<Mat> fine_samples(ns);
            std::vector<double> fine_times(ns);
            const Mat fine = integrate_fixed_step(sys, x0, init.t, init.t + horizon, h / 2.0,
                                                  fine_samples.data(), ns, fine_times.data());
            diff = (fine - final_state).cwiseAbs().maxCoeff();
            final_state = fine;
            samples = std::move(fine_samples);
            times = std::move(fine_times);
            h /= 2.0;
            ++refinements;
            if (diff < opts.halving_tol) break;
            if (refinements >= opts.max_halvings) {
                std::ostringstream os;
                os << "mean field: step refinement stalled, last change " << diff;
                throw NumericalFailure(os.str());
            }
        }
    }

    Trajectory traj;
    traj.step = h;
    traj.halvings = refinements;
    traj.halving_diff = diff;
    traj.samples.reserve(ns + 1);
    traj.samples.push_back(init);
    for (int s = 0; s < ns; ++s) traj.samples.push_back(unpack(samples[s], times[s]));
    return traj;
}

MeanFieldState stationary_solve(const ModelParams& params, double tol, OdeOptions opts) {
    params.require_stable();
    const int depth = opts.depth > 0 ? opts.depth : default_depth(params);
    const System sys(params);
    const double rate_scale = params.lambda + params.mu() * params.ph.order();
    const double h = opts.step_scale / rate_scale;
    const double t_max = 1e4 / (params.lambda + params.mu());
    const double chunk = std::min(t_max, 20.0 / (params.lambda + params.mu()) + 100.0 * h);

    Mat x = Mat::Zero(depth, params.ph.order());
    Mat dx = x;
    double t = 0.0;
    while (t < t_max) {
        const double next = std::min(t + chunk, t_max);
        x = integrate_fixed_step(sys, x, t, next, h, nullptr, 0, nullptr);
        t = next;
        sys.rhs(x, dx);
        if (dx.cwiseAbs().maxCoeff() < tol) return unpack(x, t);
    }
    std::ostringstream os;
    os << "mean field: no stationary point within t = " << t_max << " (derivative sup-norm "
       << dx.cwiseAbs().maxCoeff() << " > " << tol << ")";
    throw NumericalFailure(os.str());
}

double lyapunov_distance(const MeanFieldState& state, const FixedPointTable& table) {
    const int K = std::max(state.depth(), table.depth());
    double phi = 0.0;
    for (int k = 1; k <= K; ++k) phi += table.tail(k) - state.tail(k);
    return phi;
}

int ordering_violation_count(const MeanFieldState& state, const FixedPointTable& table) {
    const int K = std::max(state.depth(), table.depth());
    int count = 0;
    for (int k = 1; k <= K; ++k)
        if (state.tail(k) > table.tail(k) + 1e-12) ++count;
    return count;
}

bool ordering_holds(const MeanFieldState& a, const MeanFieldState& b) {
    if (a.order() != b.order()) throw std::invalid_argument("ordering_holds: phase counts disagree");
    const int K = std::max(a.depth(), b.depth());
    const int m = a.order();
    for (int k = 1; k <= K; ++k) {
        for (int i = 0; i < m; ++i) {
            const double av = k <= a.depth() ? a.levels[k - 1](i) : 0.0;
            const double bv = k <= b.depth() ? b.levels[k - 1](i) : 0.0;
            if (av > bv + 1e-9) return false;
        }
    }
    return true;
}

}  // namespace phlb
