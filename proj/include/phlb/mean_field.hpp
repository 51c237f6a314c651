#pragma once

#include <stdexcept>
#include <vector>

#include "phlb/fixed_point.hpp"
#include "phlb/phase_type.hpp"

namespace phlb {

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fractions S_k of queues with >= k customers in a given phase, k = 1..K.
// S_0 == 1 is implicit and never integrated.
struct MeanFieldState {
    double t = 0.0;
    std::vector<RowVec> levels;

    int depth() const { return static_cast<int>(levels.size()); }
    int order() const { return levels.empty() ? 0 : static_cast<int>(levels[0].size()); }
    double tail(int k) const;  // S_k e, 1 for k = 0, 0 beyond depth
};

MeanFieldState empty_state(int order, int depth);
MeanFieldState state_from_table(const FixedPointTable& table, int depth = 0);

// Right side of the level equations with S_0 = 1 and S_{K+1} = 0 closure
std::vector<RowVec> derivative(const MeanFieldState& state, const ModelParams& params);

struct OdeOptions {
    double step_scale = 0.01;  // h = step_scale / (lambda + mu m)
    bool verify_step = true;   // halve h until horizon states differ < halving_tol
    double halving_tol = 1e-8;
    int max_halvings = 12;
    int samples = 512;  // trajectory sample count (plus initial state)
    int depth = 0;      // truncation K; 0: smallest K with pi_K e < 1e-12
};

struct Trajectory {
    std::vector<MeanFieldState> samples;
    double step = 0.0;         // accepted step size
    int halvings = 0;          // refinements performed
    double halving_diff = 0.0; // sup-norm difference of the last refinement
};

Trajectory integrate(const MeanFieldState& init, const ModelParams& params, double horizon,
                     OdeOptions opts = {});

// Integrate from empty until sup-norm of the derivative drops below tol;
// errors out past max time 1e4/(lambda+mu).
MeanFieldState stationary_solve(const ModelParams& params, double tol = 1e-10,
                                OdeOptions opts = {});

// Phi = sum_k (pi_k - S_k) e with unit weights; per-level negative terms are
// allowed and counted by ordering_violation_count
double lyapunov_distance(const MeanFieldState& state, const FixedPointTable& table);
int ordering_violation_count(const MeanFieldState& state, const FixedPointTable& table);

// a_k <= b_k componentwise within 1e-9 slack; levels beyond either depth are 0
bool ordering_holds(const MeanFieldState& a, const MeanFieldState& b);

}  // namespace phlb
