#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/errors.hpp"
#include "blowuplab/gamma.hpp"

namespace blowuplab {

enum class ViscosityKind { None, PowerLaw, Constants };

// Lame coefficients. Under PowerLaw, mu(rho) = c rho^delta and (H3) forces
// lambda(rho) = 2 rho mu'(rho) - 2 mu(rho) = 2 (delta - 1) c rho^delta.
struct ViscosityLaw {
    ViscosityKind kind = ViscosityKind::None;
    double c = 0.0;        // PowerLaw coefficient, >= 0
    double delta = 1.0;    // PowerLaw exponent, >= 1
    double mu = 0.0;       // Constants
    double lambda = 0.0;   // Constants

    double mu_of(double rho) const {
        switch (kind) {
        case ViscosityKind::None: return 0.0;
        case ViscosityKind::PowerLaw: return c * std::pow(rho, delta);
        case ViscosityKind::Constants: return mu;
        }
        return 0.0;
    }
    double lambda_of(double rho) const {
        switch (kind) {
        case ViscosityKind::None: return 0.0;
        case ViscosityKind::PowerLaw: return 2.0 * (delta - 1.0) * c * std::pow(rho, delta);
        case ViscosityKind::Constants: return lambda;
        }
        return 0.0;
    }
    // d = 1 stress coefficient: S = (2 mu + lambda) u_x.
    double stress_coeff(double rho) const { return 2.0 * mu_of(rho) + lambda_of(rho); }
};

enum class DragKind { None, Linear, DensityLinear, PowerLaw, AntiLinear };
enum class DragH { One, Rho };

// Drag force D(rho, y), y = u - v. AntiLinear (D = -y) deliberately violates
// (H1); it exists so tests can confirm the dissipation checks are live.
struct DragLaw {
    DragKind kind = DragKind::None;
    DragH h = DragH::One;
    double beta = 1.0; // PowerLaw exponent, >= 0

    double h_of(double rho) const { return h == DragH::One ? 1.0 : rho; }

    double force(double rho, double y) const {
        switch (kind) {
        case DragKind::None: return 0.0;
        case DragKind::Linear: return y;
        case DragKind::DensityLinear: return rho * y;
        case DragKind::AntiLinear: return -y;
        case DragKind::PowerLaw: {
            if (y == 0.0) return 0.0;
            return h_of(rho) * std::pow(std::fabs(y), beta - 1.0) * y;
        }
        }
        return 0.0;
    }

    // Linear-in-relative-velocity family: dv/dt = rate * (u - v), solvable
    // exactly by an exponential integrator. AntiLinear has rate -1.
    bool linear_in_rel() const {
        return kind == DragKind::Linear || kind == DragKind::DensityLinear ||
               kind == DragKind::AntiLinear || kind == DragKind::None ||
               (kind == DragKind::PowerLaw && beta == 1.0);
    }
    double rate(double rho) const {
        switch (kind) {
        case DragKind::None: return 0.0;
        case DragKind::Linear: return 1.0;
        case DragKind::DensityLinear: return rho;
        case DragKind::AntiLinear: return -1.0;
        case DragKind::PowerLaw: return beta == 1.0 ? h_of(rho) : 0.0;
        }
        return 0.0;
    }
};

enum class CollisionKind { None, GlobalAlignment, LocalAlignment };
enum class PsiKind { Constant, Gaussian };

// Communication weight for the global alignment operator Q1; nonnegative and
// even by construction.
struct CommunicationWeight {
    PsiKind kind = PsiKind::Constant;
    double value = 1.0;
    double length = 1.0;
    double operator()(double r) const {
        if (kind == PsiKind::Constant) return value;
        return value * std::exp(-r * r / (2.0 * length * length));
    }
};

struct CollisionLaw {
    CollisionKind kind = CollisionKind::None;
    CommunicationWeight psi;
};

// Thick-sprays constants: m_p = |B(0, r)| rho_p.
struct ThickSprayConstants {
    double rho_p = 1.0;
    double r = 1.0;
    double m_p(int d) const {
        const double ball = std::pow(std::numbers::pi, 0.5 * d) /
                            gamma_half_integer(d + 2) * std::pow(r, d);
        return ball * rho_p;
    }
};

struct ModelParams {
    int d = 1;
    double gamma = 1.5;
    ViscosityLaw viscosity;
    DragLaw drag;
    CollisionLaw collision;
    std::optional<ThickSprayConstants> thick;

    void validate() const {
        if (d < 1) throw InvalidParams("spatial dimension must be a positive integer");
        if (!(gamma > 1.0)) throw InvalidParams("adiabatic exponent gamma must exceed 1");
        if (viscosity.kind == ViscosityKind::PowerLaw) {
            if (viscosity.c < 0.0) throw InvalidParams("viscosity coefficient must be >= 0");
            if (!(viscosity.delta >= 1.0 && viscosity.delta <= gamma))
                throw InvalidParams("power-law viscosity requires 1 <= delta <= gamma");
        }
        if (viscosity.kind == ViscosityKind::Constants) {
            if (viscosity.mu < 0.0 || 2.0 * viscosity.mu + d * viscosity.lambda < 0.0)
                throw InvalidParams("constant viscosities require mu >= 0 and 2 mu + d lambda >= 0");
        }
        if (drag.kind == DragKind::PowerLaw && drag.beta < 0.0)
            throw InvalidParams("drag exponent must be >= 0");
        if (collision.kind == CollisionKind::GlobalAlignment && collision.psi.value < 0.0)
            throw InvalidParams("communication weight must be nonnegative");
        if (thick && (thick->rho_p <= 0.0 || thick->r <= 0.0))
            throw InvalidParams("thick-spray constants rho_p, r must be positive");
    }
};

} // namespace blowuplab
