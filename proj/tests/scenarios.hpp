#pragma once

// Frozen test scenarios shared by the unit and acceptance suites.

#include <cmath>
#include <numbers>

#include "blowuplab/field.hpp"
#include "blowuplab/model.hpp"
#include "blowuplab/simulator.hpp"

namespace scenarios {

using namespace blowuplab;

inline double cosine_cut(double ax, double a, double b) {
    if (ax <= a) return 1.0;
    if (ax >= b) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (ax - a) / (b - a)));
}

// Gate-true Euler datum that also steepens numerically: a concentrated core
// with outward velocity u = x (which minimizes J0) and a thin pedestal whose
// velocity rolls off to zero, so that characteristics cross in resolved gas.
struct BlowupBump {
    double gamma = 1.8;
    double h_core = 0.05, r1 = 0.25, w1 = 0.10;
    double h_ped = 0.005, r2 = 0.85, w2 = 0.12;
    double ru1 = 0.50, ru2 = 0.65;
    double half_domain = 1.5;

    FluidField build(std::size_t n) const {
        FluidField f;
        f.x_lo = -half_domain;
        f.x_hi = half_domain;
        f.rho.assign(n, 0.0);
        f.u.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = f.x_center(i);
            const double ax = std::fabs(x);
            double rho = h_ped * cosine_cut(ax, r2, r2 + w2);
            rho += (h_core - h_ped) * cosine_cut(ax, r1, r1 + w1) *
                   cosine_cut(ax, r2, r2 + w2);
            f.rho[i] = rho;
            f.u[i] = x * cosine_cut(ax, ru1, ru2);
        }
        return f;
    }

    ModelParams params() const {
        ModelParams p;
        p.gamma = gamma;
        p.viscosity.kind = ViscosityKind::None;
        return p;
    }

    sim::SimConfig config() const {
        sim::SimConfig cfg;
        cfg.t_end = 2.0;
        cfg.sample_dt = 0.01;
        cfg.gradient_threshold = 0.20;
        cfg.cfl = 0.4;
        return cfg;
    }
};

// Reference coupled run: over-damped viscous Gaussian + Maxwellian particles
// with linear drag and local alignment; the boundary stays quiet through
// 10^4 steps so the conservation ledgers are exercised at full precision.
struct ReferenceCoupledRun {
    ModelParams params() const {
        ModelParams p;
        p.gamma = 1.5;
        p.viscosity = {ViscosityKind::PowerLaw, 0.5, 1.5, 0, 0};
        p.drag.kind = DragKind::Linear;
        p.collision.kind = CollisionKind::LocalAlignment;
        return p;
    }
    InitialDataSpec initial() const {
        InitialDataSpec init;
        init.grid = {-12.0, 12.0, 1024};
        init.fluid.family = FluidInit::Family::GaussianBump;
        init.fluid.amplitude = 1.0;
        init.fluid.sigma = 1.0;
        init.particles.family = ParticleInit::Family::Maxwellian;
        init.particles.count = 10000;
        init.particles.mass = 0.5;
        init.particles.x_sigma = 1.0;
        init.particles.temperature = 0.25;
        init.seed = 20240817;
        return init;
    }
    sim::SimConfig config() const {
        sim::SimConfig cfg;
        cfg.t_end = 2.0;
        cfg.max_steps = 10000;
        cfg.sample_stride = 10;
        cfg.gradient_threshold = std::numeric_limits<double>::infinity();
        return cfg;
    }
};

// Smooth viscous run for the virial convergence study; dt_max pins the time
// step so halving N literally halves (dx, dt).
struct VirialPair {
    ModelParams params() const {
        ModelParams p;
        p.gamma = 1.5;
        p.viscosity = {ViscosityKind::PowerLaw, 0.1, 1.5, 0, 0};
        return p;
    }
    InitialDataSpec initial(std::size_t n) const {
        InitialDataSpec init;
        init.grid = {-8.0, 8.0, n};
        init.fluid.family = FluidInit::Family::GaussianBump;
        init.fluid.amplitude = 1.0;
        init.fluid.sigma = 1.0;
        init.fluid.velocity_slope = 0.2;
        init.fluid.velocity_window = 4.0;
        init.fluid.velocity_rolloff = 2.0;
        return init;
    }
    sim::SimConfig config(std::size_t n) const {
        sim::SimConfig cfg;
        cfg.t_end = 0.5;
        cfg.sample_dt = 0.0125;
        cfg.gradient_threshold = std::numeric_limits<double>::infinity();
        cfg.dt_max = n == 512 ? 2.5e-4 : 1.25e-4;
        return cfg;
    }
};

} // namespace scenarios
