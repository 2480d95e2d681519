#pragma once

#include <vector>

#include "blowuplab/errors.hpp"

namespace blowuplab::gronwall {

// Coefficients of the saturating differential inequality
//   f' <= a f / (t+1) + b f^beta / (t+1)^(2 beta),  f(0) = f0.
// b = 0 and f0 = 0 are accepted as continuous extensions.
struct GronwallParams {
    double a = 1.0;
    double b = 1.0;
    double beta = 1.0;
    double f0 = 1.0;

    void validate() const {
        if (!(a > 0.0)) throw InvalidParams("gronwall: a must be positive");
        if (!(b >= 0.0)) throw InvalidParams("gronwall: b must be nonnegative");
        if (!(beta > 0.0)) throw InvalidParams("gronwall: beta must be positive");
        if (beta > 1.0) throw InvalidParams("gronwall: beta > 1 is outside the lemma");
        if (!(f0 >= 0.0)) throw InvalidParams("gronwall: f0 must be nonnegative");
    }
};

enum class CaseTag { BetaOne, LogCritical, PowerGeneric };

/// Case split on the exponent 2 beta + a (1 - beta); the critical value 1 is
/// detected within absolute tolerance 1e-12.
CaseTag case_classifier(const GronwallParams& p);

/// Closed-form upper bound for f itself (the (1-beta)-th root is applied for
/// beta < 1):
///   BetaOne:      f0 e^b (t+1)^a
///   LogCritical:  [f0^(1-b') (t+1)^(1-2b') + b(1-b')(t+1)^(1-2b') ln(t+1)]^(1/(1-b'))
///   PowerGeneric: [f0^(1-b') (t+1)^(a(1-b'))
///                  + b(1-b')/(1-E) ((t+1)^(1-2b') - (t+1)^(a(1-b')))]^(1/(1-b'))
/// with b' = beta and E = 2 beta + a (1 - beta). For beta < 1 these equal the
/// exact solution of the equality ODE.
double gronwall_bound(const GronwallParams& p, double t);

struct TrajectoryPoint {
    double t;
    double f;
};

/// Fourth-order Runge-Kutta solution of the equality ODE
///   f' = a f/(t+1) + b f^beta/(t+1)^(2 beta),  f(0) = f0,
/// advanced by step doubling; throws StepTooLarge when the per-step error
/// estimate exceeds err_tol. Output is nondecreasing for f0 >= 0.
std::vector<TrajectoryPoint> ode_oracle(const GronwallParams& p, double t_end, double dt,
                                        double err_tol = 1e-8);

/// Value of the oracle at a single time.
double ode_solve_at(const GronwallParams& p, double t, double dt = 1e-3,
                    double err_tol = 1e-8);

} // namespace blowuplab::gronwall
