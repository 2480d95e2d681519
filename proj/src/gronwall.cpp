#include "blowuplab/gronwall.hpp"

#include <cmath>

namespace blowuplab::gronwall {

CaseTag case_classifier(const GronwallParams& p) {
    p.validate();
    if (p.beta >= 1.0) return CaseTag::BetaOne;
    const double expo = 2.0 * p.beta + p.a * (1.0 - p.beta);
    if (std::fabs(expo - 1.0) <= 1e-12) return CaseTag::LogCritical;
    return CaseTag::PowerGeneric;
}

double gronwall_bound(const GronwallParams& p, double t) {
    p.validate();
    if (!(t >= 0.0)) throw InvalidParams("gronwall_bound: t must be nonnegative");
    const double s = t + 1.0;

    switch (case_classifier(p)) {
    case CaseTag::BetaOne:
        return p.f0 * std::exp(p.b) * std::pow(s, p.a);

    case CaseTag::LogCritical: {
        // Integrating the transformed linear inequality across the critical
        // exponent gives the b(1-beta) log coefficient.
        const double om = 1.0 - p.beta;
        const double g0 = std::pow(p.f0, om);
        const double g = g0 * std::pow(s, 1.0 - 2.0 * p.beta) +
                         p.b * om * std::pow(s, 1.0 - 2.0 * p.beta) * std::log(s);
        return std::pow(g, 1.0 / om);
    }

    case CaseTag::PowerGeneric: {
        const double om = 1.0 - p.beta;
        const double expo = 2.0 * p.beta + p.a * om;
        const double g0 = std::pow(p.f0, om);
        const double g = g0 * std::pow(s, p.a * om) +
                         p.b * om / (1.0 - expo) *
                             (std::pow(s, 1.0 - 2.0 * p.beta) - std::pow(s, p.a * om));
        return std::pow(g, 1.0 / om);
    }
    }
    return 0.0;
}

namespace {

inline double rhs(const GronwallParams& p, double t, double f) {
    if (f < 0.0) f = 0.0;
    const double s = t + 1.0;
    return p.a * f / s + p.b * std::pow(f, p.beta) / std::pow(s, 2.0 * p.beta);
}

inline double rk4_step(const GronwallParams& p, double t, double f, double h) {
    const double k1 = rhs(p, t, f);
    const double k2 = rhs(p, t + 0.5 * h, f + 0.5 * h * k1);
    const double k3 = rhs(p, t + 0.5 * h, f + 0.5 * h * k2);
    const double k4 = rhs(p, t + h, f + h * k3);
    return f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One accepted step: full step vs two half steps, advance with the halves.
inline double rk4_doubled(const GronwallParams& p, double t, double f, double h,
                          double err_tol) {
    const double full = rk4_step(p, t, f, h);
    const double half = rk4_step(p, t + 0.5 * h, rk4_step(p, t, f, 0.5 * h), 0.5 * h);
    const double err = std::fabs(full - half) / (1.0 + std::fabs(half));
    if (err > err_tol)
        throw StepTooLarge("gronwall ode_oracle: local error " + std::to_string(err) +
                           " exceeds tolerance; reduce dt");
    return half;
}

} // namespace

std::vector<TrajectoryPoint> ode_oracle(const GronwallParams& p, double t_end, double dt,
                                        double err_tol) {
    p.validate();
    if (!(dt > 0.0)) throw InvalidParams("ode_oracle: dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidParams("ode_oracle: t_end must be nonnegative");

    std::vector<TrajectoryPoint> out;
    out.push_back({0.0, p.f0});
    double t = 0.0, f = p.f0;
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        f = rk4_doubled(p, t, f, h, err_tol);
        t += h;
        out.push_back({t, f});
    }
    return out;
}

double ode_solve_at(const GronwallParams& p, double t, double dt, double err_tol) {
    p.validate();
    if (!(t >= 0.0)) throw InvalidParams("ode_solve_at: t must be nonnegative");
    double tt = 0.0, f = p.f0;
    while (tt < t) {
        const double h = std::min(dt, t - tt);
        f = rk4_doubled(p, tt, f, h, err_tol);
        tt += h;
    }
    return f;
}

} // namespace blowuplab::gronwall
