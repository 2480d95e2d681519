#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/field.hpp"
#include "blowuplab/model.hpp"

namespace blowuplab::criteria {

enum class SystemKind { VlasovNS, IsentropicNS, TwoPhase, ThickSprays };

struct SystemSpec {
    SystemKind kind = SystemKind::VlasovNS;
    std::optional<double> rho_max; // thick sprays L-infinity density bound
};

const char* system_name(SystemKind k);

enum class TheoremId { Auto, Thm21, Thm22, Cor21, Thm41, Thm42, Thm43 };
enum class BranchId { General, DeltaEqGamma, PowerBranch, ConstantVisc, Alpha };

const char* theorem_name(TheoremId t);
const char* branch_name(BranchId b);

// Explicit constants of the selected theorem. C1, C2 are the coefficients of
// the inertia path I(t) <= I0 + C1 t + C2 t^2 actually used by that theorem
// (the Lemma 3.2 pair for the viscous theorems, W0 and max{1,q} E0 for the
// constant-viscosity corollary, the alpha-weighted pair for thick sprays).
struct ConstantsBundle {
    double C0 = 0;
    double C1 = 0, C2 = 0;
    std::optional<double> C3;      // J0 + (M_mu/2 + d M_lambda/4)/(1 - d(gamma-1))
    std::optional<double> C4;      // power-branch constant, isentropic system
    std::optional<double> C5;      // power-branch constant, two-phase system
    std::optional<double> K_power; // power-branch constant of the active system
    std::optional<double> C0_alpha;
    double M_mu = 0, M_lambda = 0;
    std::optional<double> nu;      // (1 + d(delta-1)) / 2
    double J0 = 0;
    std::string J0_kind = "J0";    // J0 | J0_tilde | J0_1 | J0_alpha

    // inputs the envelopes and bounds are built from
    int d = 1;
    double gamma = 0;
    double delta = 1;
    double visc_c = 0;             // power-law viscosity coefficient
    double m_rho = 0, m_f = 0;
    double I0 = 0, W0 = 0, E0 = 0; // system-appropriate variants
    std::optional<double> p_max;   // rho_max^gamma

    double q() const { return 0.5 * d * (gamma - 1.0); }
};

struct LifespanBound {
    double t_star = 0;
    double bracket_lo = 0;
    double bracket_hi = 0;
};

struct CriterionReport {
    std::string system;
    std::string theorem;
    std::string branch;
    ConstantsBundle constants;
    bool gate = false;
    double margin = 0; // left-hand side minus right-hand side of the criterion
    std::optional<LifespanBound> lifespan;
    std::vector<std::string> notes;
};

/// C0 = (pi^(d/2)/Gamma(d/2+1))^(1-gamma) * (m/2)^(((d+2)gamma-d)/2) / (gamma-1).
/// Zero iff m_rho = 0; scales as m^(((d+2)gamma-d)/2).
double const_C0(double m_rho, int d, double gamma);

/// Resolves the theorem branch the model parameters select for this system.
BranchId resolve_branch(const ModelParams& params, const SystemSpec& sys);

/// Fills the bundle for the given branch. Under power-law viscosity M_mu
/// defaults to the interpolation bound
///   M_mu = c m^((gamma-delta)/(gamma-1)) (gamma-1)^((delta-1)/(gamma-1)) E0^((delta-1)/(gamma-1))
/// and M_lambda = 2(delta-1) M_mu; explicit values may override (a smaller
/// admissible M_mu sharpens every gate). C3 is filled only when d(gamma-1) < 1.
ConstantsBundle const_envelope_pack(const MomentVector& mv0, const ModelParams& params,
                                    const SystemSpec& sys, BranchId branch,
                                    std::optional<double> m_mu_override = {},
                                    std::optional<double> m_lambda_override = {});

/// Convenience overload resolving the branch from the parameters.
ConstantsBundle const_envelope_pack(const MomentVector& mv0, const ModelParams& params,
                                    const SystemSpec& sys,
                                    std::optional<double> m_mu_override = {},
                                    std::optional<double> m_lambda_override = {});

/// Upper envelope for J (J_alpha in the Alpha branch) at time t.
double envelope_J(BranchId branch, const ConstantsBundle& c, double t);

/// I0 + C1 t + C2 t^2.
double inertia_path(const ConstantsBundle& c, double t);

/// C0 / I_path^(d(gamma-1)/2).
double lower_bound_Ei(double C0, double q, double I_path_at_t);
double lower_bound_Ei(const ConstantsBundle& c, BranchId branch, double t);

struct GateOptions {
    TheoremId theorem = TheoremId::Auto;
    std::optional<BranchId> branch;
    std::optional<double> m_mu_override;
    std::optional<double> m_lambda_override;
    bool solve_lifespan = true;
};

/// Evaluates the selected theorem's strict inequality exactly as printed and,
/// when the gate fires, solves for the lifespan upper bound T*.
CriterionReport gate(const SystemSpec& sys, const ModelParams& params,
                     const MomentVector& mv0, const GateOptions& opt = {});

struct LifespanProblem {
    double C0 = 0; // effective constant (C0_alpha for thick sprays)
    double q = 0;
    double I0 = 0, A1 = 0, A2 = 0;
    std::function<double(double)> envelope; // J upper bound at t
    double horizon = 1e12;
};

/// T* = the last time at which the necessary inequality
///   C0 / (I0 + A1 t + A2 t^2)^q <= envelope(t) / (t+1)^2
/// can hold. Bisects the final sign change to |bracket| <= 1e-9 (1 + T*) and
/// certifies failure on a sampled grid of (T*, 10 T*]. Throws NoCrossing when
/// the inequality holds through the horizon.
LifespanBound lifespan_upper_bound(const LifespanProblem& p);

std::string report_to_json(const CriterionReport& r);

} // namespace blowuplab::criteria
