#include "phlb/moment_fit.hpp"

#include <cmath>
#include <sstream>

namespace phlb {

std::string to_string(ClampFlag f) {
    switch (f) {
        case ClampFlag::a1: return "a1";
        case ClampFlag::a2: return "a2";
        case ClampFlag::a3: return "a3";
        case ClampFlag::a4: return "a4";
    }
    return "?";
}

ClampResult feasibility_clamp(const MomentTriple& raw) {
    if (!(raw.m1 > 0.0) || !(raw.m2 > 0.0) || !(raw.m3 > 0.0))
        throw std::invalid_argument("moment fit: moments must be positive");

    ClampResult res{raw, {}, 0.0};
    auto& m = res.moments;

    // a1: variance repair, m2 >= 1.5 m1^2 (cx2 >= 0.5)
    if (m.m2 < 1.5 * m.m1 * m.m1) {
        m.m2 = 1.5 * m.m1 * m.m1;
        res.flags.push_back(ClampFlag::a1);
    }
    const double cx2 = m.m2 / (m.m1 * m.m1) - 1.0;
    res.scv = cx2;

    const double m1c = m.m1 * m.m1 * m.m1;
    if (cx2 <= 1.0) {
        // a2/a3: m3 band for the moderate-variability region
        const double lo = 3.0 * m1c * (3.0 * cx2 - 1.0 + std::sqrt(2.0) * std::pow(1.0 - cx2, 1.5));
        const double hi = 6.0 * m1c * cx2;
        if (m.m3 < lo) {
            m.m3 = lo;
            res.flags.push_back(ClampFlag::a2);
        } else if (m.m3 > hi) {
            m.m3 = hi;
            res.flags.push_back(ClampFlag::a3);
        }
    } else {
        // a4: hyper-exponential floor
        const double lo = 1.5 * m1c * (1.0 + cx2) * (1.0 + cx2);
        if (m.m3 < lo) {
            m.m3 = lo;
            res.flags.push_back(ClampFlag::a4);
        }
    }
    return res;
}

Ph2Fit fit_ph2(const MomentTriple& t, std::vector<ClampFlag> flags) {
    const double m1 = t.m1, m2 = t.m2, m3 = t.m3;
    if (!(m1 > 0.0) || !(m2 > 0.0) || !(m3 > 0.0))
        throw std::invalid_argument("moment fit: moments must be positive");

    const double c = 3.0 * m2 * m2 - 2.0 * m1 * m3;
    const double d = 2.0 * m1 * m1 - m2;
    const double b = 3.0 * m1 * m2 - m3;
    const double a = b * b - 6.0 * c * d;

    auto diag = [&](const char* what) {
        std::ostringstream os;
        os << "moment fit: " << what << " (m1=" << m1 << ", m2=" << m2 << ", m3=" << m3
           << ", c=" << c << ", d=" << d << ", b=" << b << ", a=" << a << ")";
        return os.str();
    };

    double eta, xi1, xi2;
    if (std::abs(c) <= 1e-12 * std::max(3.0 * m2 * m2, std::abs(2.0 * m1 * m3))) {
        // exponential in law; xi1 = xi2 keeps the representation canonical
        eta = 0.0;
        xi2 = 1.0 / m1;
        xi1 = xi2;
    } else {
        double disc = a;
        if (disc < 0.0) {
            if (disc < -1e-10 * (b * b + std::abs(6.0 * c * d)))
                throw FitError(diag("negative discriminant"));
            disc = 0.0;  // roundoff at the double-root locus
        }
        const double sa = std::sqrt(disc);
        // (b - sa)(b + sa) = 6cd, so the root that would cancel is recovered
        // from the product; feasible triples have sign(b) = sign(c)
        if (c > 0.0) {
            if (b >= 0.0) {
                const double q = b + sa;
                xi1 = 6.0 * d / q;
                xi2 = q / c;
                eta = xi1 * (m1 - c / q);
            } else {
                eta = (-b + 6.0 * m1 * d + sa) / (b + sa);
                xi1 = (b - sa) / c;
                xi2 = (b + sa) / c;
            }
        } else {
            if (b <= 0.0) {
                const double q = sa - b;
                xi1 = -6.0 * d / q;
                xi2 = q / (-c);
                eta = xi1 * (m1 + c / q);
            } else {
                eta = (b - 6.0 * m1 * d + sa) / (-b + sa);
                xi1 = (b + sa) / c;
                xi2 = (b - sa) / c;
            }
        }
        if (eta < 0.0) {
            if (eta < -1e-9) throw FitError(diag("branch probability below 0"));
            eta = 0.0;
        }
        if (eta > 1.0) {
            if (eta > 1.0 + 1e-9) throw FitError(diag("branch probability above 1"));
            eta = 1.0;
        }
        if (!(xi1 > 0.0) || !(xi2 > 0.0)) throw FitError(diag("non-positive rate"));
        if (xi1 > xi2) {
            if (xi1 > xi2 * (1.0 + 1e-12)) throw FitError(diag("rates out of order"));
            xi1 = xi2;
        }
    }
    return {t, std::move(flags), eta, xi1, xi2, coxian2(eta, xi1, xi2)};
}

Ph2Fit fit_moments(const MomentTriple& raw) {
    ClampResult clamped = feasibility_clamp(raw);
    return fit_ph2(clamped.moments, std::move(clamped.flags));
}

double verify_fit(const Ph2Fit& fit) {
    const double targets[3] = {fit.used.m1, fit.used.m2, fit.used.m3};
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n)
        worst = std::max(worst, std::abs(fit.dist.moment(n) - targets[n - 1]) / targets[n - 1]);
    return worst;
}

}  // namespace phlb
