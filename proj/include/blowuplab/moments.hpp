#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowuplab/field.hpp"
#include "blowuplab/model.hpp"

namespace blowuplab::moments {

/// Fluid functionals by midpoint quadrature over cells:
///   m_rho = int rho, M_rho = int rho u, W_rho = int rho u x,
///   I_rho = 1/2 int rho x^2, E_k = 1/2 int rho u^2,
///   E_i = (gamma-1)^-1 int rho^gamma.
/// When alpha is present the alpha-weighted variants use alpha*rho
/// (and alpha*rho^gamma for the internal energy).
MomentVector fluid_moments(const FluidField& field, const ModelParams& params, double t);

/// Kinetic sums: m_f = sum w, M_f = sum w v, W_f = sum w x v,
/// I_f = 1/2 sum w x^2, E_f = 1/2 sum w v^2.
MomentVector particle_moments(const ParticleCloud& cloud, double t);

/// Fluid and particle parts merged into one sample.
MomentVector combined_moments(const FluidField& field, const ParticleCloud& cloud,
                              const ModelParams& params, double t);

struct HypothesisCheck {
    std::string name;   // "H1", "H2", "H3"
    bool holds = true;
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    bool all_hold() const {
        for (const auto& c : checks)
            if (!c.holds) return false;
        return true;
    }
};

/// (H1) D(x,y).y >= 0 on a sampled (rho, y) grid; (H2) holds by construction
/// for {None, Q1, Q2}; (H3) lambda = 2 rho mu' - 2 mu checked on samples.
HypothesisReport check_hypotheses(const ModelParams& params);

/// Throws HypothesisViolated on the first failing check.
void require_hypotheses(const ModelParams& params);

/// Deterministic given the seed. Tabulated families ingest the CSV formats
/// `x,rho,u[,alpha]` and `x,v,w`. When params.thick is set, alpha is derived
/// from the particle number density: alpha = 1 - (m_p / rho_p) n(x).
std::pair<FluidField, ParticleCloud> build_initial_data(const InitialDataSpec& spec,
                                                        const ModelParams& params);

} // namespace blowuplab::moments
