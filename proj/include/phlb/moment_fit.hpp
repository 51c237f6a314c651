#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "phlb/phase_type.hpp"

namespace phlb {

struct MomentTriple {
    double m1, m2, m3;
};

// Clamp steps, in application order: a1 repairs low variance (m2 floor),
// a2/a3 clamp m3 into its feasible band when 0.5 <= cx2 <= 1, a4 raises m3
// to the hyper-exponential floor when cx2 > 1.
enum class ClampFlag { a1, a2, a3, a4 };

std::string to_string(ClampFlag f);

struct ClampResult {
    MomentTriple moments;
    std::vector<ClampFlag> flags;
    double scv;  // squared coefficient of variation after clamping
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Repairs an arbitrary positive moment triple into the PH(2)-feasible region.
// Throws std::invalid_argument for non-positive moments.
ClampResult feasibility_clamp(const MomentTriple& raw);

struct Ph2Fit {
    MomentTriple used;  // the clamped triple that was actually matched
    std::vector<ClampFlag> flags;
    double eta, xi1, xi2;
    PhaseType dist;
};

// Exact three-moment fit on an already clamped triple; throws FitError with
// diagnostic intermediates when the triple is not PH(2)-representable.
Ph2Fit fit_ph2(const MomentTriple& clamped, std::vector<ClampFlag> flags = {});

// feasibility_clamp followed by fit_ph2
Ph2Fit fit_moments(const MomentTriple& raw);

// max_{n=1..3} relative error between moments of the fitted law and the
// clamped targets
double verify_fit(const Ph2Fit& fit);

}  // namespace phlb
