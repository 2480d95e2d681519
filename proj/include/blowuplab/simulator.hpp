#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/criteria.hpp"
#include "blowuplab/field.hpp"
#include "blowuplab/model.hpp"

namespace blowuplab::sim {

struct SimConfig {
    double cfl = 0.4;
    double t_end = 1.0;
    std::uint64_t max_steps = 2000000;
    double dt_max = std::numeric_limits<double>::infinity(); // fixed-step cap
    double dt_floor = 1e-12; // blow-up sentinel on the stability-limited dt
    std::uint64_t sample_stride = 10;
    double sample_dt = 0.0; // > 0: sample at this fixed time interval instead
    double gradient_threshold = 0.25; // per-face |du| between gas cells; inf disables
    int drag_substeps = 1;
    double vacuum_rho = 1e-12;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidParams("CFL must be in (0, 1]");
        if (!(dt_floor > 0.0)) throw InvalidParams("dt floor must be positive");
        if (!(t_end >= 0.0)) throw InvalidParams("t_end must be nonnegative");
        if (drag_substeps < 1) throw InvalidParams("drag substeps must be >= 1");
        if (sample_stride < 1) throw InvalidParams("sample stride must be >= 1");
    }
};

// Accumulated absolute boundary fluxes; conservation identities on the
// truncated domain are checked leakage-corrected.
struct Leakage {
    double mass = 0, mom = 0, energy = 0, inertia = 0;
};

struct SimState {
    double t = 0;
    FluidField fluid;
    ParticleCloud particles;
    Leakage leak_fluid, leak_particles;
    double vacuum_mom = 0; // momentum retired when cells drop below the vacuum floor
    double max_du = 0;     // largest per-face velocity jump between gas cells
    double max_rho = 0;
    double dt_last = 0;
    std::uint64_t steps = 0;
};

struct StepDiag {
    double t = 0;
    double max_du = 0;
    double dt_stable = 0; // stability-limited dt before end-time capping
    bool negative_density = false;
};

struct MomentSample {
    MomentVector mv;
    double J = 0;
    std::optional<double> J_alpha;
    Leakage leak_fluid, leak_particles;
    double vacuum_mom = 0;
};

struct Verdict {
    enum class Kind { CompletedSmooth, BlowupDetected, Aborted };
    Kind kind = Kind::CompletedSmooth;
    double t_detect = 0;
    std::string trigger; // gradient-threshold | dt-floor | negative-density
    std::string reason;  // for Aborted
};

struct IdentityTolerances {
    double mass_rel = 1e-12;
    double momentum_scale = 1e-10; // * (1 + |M0|)
    double energy_rel = 1e-8;      // * E(0) per sample pair
    double lemma33_rel = 1e-6;
    double envelope_slack = 0.05;
    double lower_bound_rel = 1e-9;
    double inertia_path_rel = 1e-9;
};

struct EnvelopeCheck {
    criteria::ConstantsBundle constants;
    criteria::BranchId branch = criteria::BranchId::General;
};

struct IdentityReport {
    double max_mass_drift_rel = 0;
    double max_momentum_drift = 0;
    double max_energy_increase_rel = 0;
    double max_dI_minus_W = 0;  // virial residual, reported (discretization error)
    double max_dW_residual = 0; // W' identity residual, Euler mode only
    double min_lemma33_ratio = std::numeric_limits<double>::infinity();
    double max_envelope_ratio = 0;
    double min_lower_bound_ratio = std::numeric_limits<double>::infinity();
    double max_inertia_path_ratio = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

struct RunResult {
    std::vector<MomentSample> series;
    std::vector<StepDiag> diags;
    IdentityReport identities;
    Verdict verdict;
    SimState state;
};

/// Stability-limited step from the acoustic CFL condition and the explicit
/// viscous constraint; does not include end-time capping.
double stable_dt(const SimState& s, const ModelParams& params, const SimConfig& cfg);

/// Conservative MUSCL(minmod)/Rusanov update of (rho, rho u) with the explicit
/// viscous stress (2 mu + lambda) u_x added to the momentum flux. Boundary
/// fluxes are accumulated into the leakage ledger; mass is conserved to
/// round-off up to that ledger. Throws CflViolation when dt exceeds dx over
/// the largest face wave speed, NegativeDensity if the positivity limiter
/// fails.
void step_fluid(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt);

/// Momentum exchange between particles and host cells; exactly antisymmetric
/// per substep. Linear-in-relative-velocity drag uses the exact exponential
/// integrator, other laws an RK2 substep.
void couple_drag(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt);

/// Collision operators (Q1 pairwise alignment, Q2 local mean relaxation)
/// followed by the free-streaming push x += v dt; leavers are retired into
/// the particle leakage ledger.
void step_particles(SimState& s, const ModelParams& params, const SimConfig& cfg, double dt);

/// Earliest trigger over the step diagnostics.
Verdict detect_blowup(const std::vector<StepDiag>& diags, const SimConfig& cfg);

IdentityReport check_identities(const std::vector<MomentSample>& series,
                                const ModelParams& params,
                                const IdentityTolerances& tol = {},
                                const std::optional<EnvelopeCheck>& envelope = {});

/// Observed convergence order of the virial residual from a paired
/// (dx, dt) -> (dx/2, dt/2) run: log2 of the residual ratio.
double virial_convergence_order(const IdentityReport& coarse, const IdentityReport& fine);

/// Throws the first violation as IdentityViolation.
void require_identities(const IdentityReport& rep);

RunResult run_scenario(const InitialDataSpec& init, const ModelParams& params,
                       const SimConfig& cfg,
                       const criteria::SystemSpec& sys = {},
                       const std::optional<EnvelopeCheck>& envelope = {},
                       const IdentityTolerances& tol = {});

/// Same, starting from prebuilt state.
RunResult run_scenario(FluidField field, ParticleCloud cloud, const ModelParams& params,
                       const SimConfig& cfg,
                       const criteria::SystemSpec& sys = {},
                       const std::optional<EnvelopeCheck>& envelope = {},
                       const IdentityTolerances& tol = {});

/// Moment series CSV body: t,m_rho,m_f,M,W,I,E_k,E_i,E_f,J,leak_mass,leak_mom
/// (alpha columns appended when present).
std::string series_to_csv(const std::vector<MomentSample>& series);

std::string identities_to_json(const IdentityReport& rep, const Verdict& v);

} // namespace blowuplab::sim
