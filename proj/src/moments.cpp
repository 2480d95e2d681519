#include "blowuplab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blowuplab/csv.hpp"
#include "blowuplab/kernels.hpp"
#include "blowuplab/rng.hpp"

namespace blowuplab::moments {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double pow_sum(const std::vector<double>& rho, double gamma) {
    double s = 0.0;
    for (double r : rho) s += std::pow(r, gamma);
    return s;
}

double pow_sum_weighted(const std::vector<double>& a, const std::vector<double>& rho,
                        double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += a[i] * std::pow(rho[i], gamma);
    return s;
}

} // namespace

MomentVector fluid_moments(const FluidField& field, const ModelParams& params, double t) {
    if (!all_finite(field.rho) || !all_finite(field.u))
        throw NonFiniteField("fluid field contains NaN or infinity");
    if (field.has_alpha() && !all_finite(field.alpha))
        throw NonFiniteField("alpha contains NaN or infinity");

    const auto& k = kernels::active();
    const double dx = field.dx();
    const double x0 = field.x_center(0);
    const auto s = k.fluid_sums(field.rho.data(), field.u.data(), field.cells(), x0, dx);

    MomentVector mv;
    mv.t = t;
    mv.m_rho = dx * s.mass;
    mv.M_rho = dx * s.mom;
    mv.W_rho = dx * s.momw;
    mv.I_rho = 0.5 * dx * s.xx;
    mv.E_k = 0.5 * dx * s.uu;
    mv.E_i = dx / (params.gamma - 1.0) * pow_sum(field.rho, params.gamma);

    if (field.has_alpha()) {
        std::vector<double> arho(field.cells());
        for (std::size_t i = 0; i < arho.size(); ++i) arho[i] = field.alpha[i] * field.rho[i];
        const auto sa = k.fluid_sums(arho.data(), field.u.data(), arho.size(), x0, dx);
        AlphaMoments am;
        am.m = dx * sa.mass;
        am.M = dx * sa.mom;
        am.W = dx * sa.momw;
        am.I = 0.5 * dx * sa.xx;
        am.E_k = 0.5 * dx * sa.uu;
        am.E_i = dx / (params.gamma - 1.0) *
                 pow_sum_weighted(field.alpha, field.rho, params.gamma);
        mv.alpha = am;
    }
    return mv;
}

MomentVector particle_moments(const ParticleCloud& cloud, double t) {
    if (!all_finite(cloud.x) || !all_finite(cloud.v) || !all_finite(cloud.w))
        throw NonFiniteParticle("particle cloud contains NaN or infinity");

    const auto s = kernels::active().particle_sums(cloud.x.data(), cloud.v.data(),
                                                   cloud.w.data(), cloud.size());
    MomentVector mv;
    mv.t = t;
    mv.m_f = s.w;
    mv.M_f = s.wv;
    mv.W_f = s.wxv;
    mv.I_f = 0.5 * s.wxx;
    mv.E_f = 0.5 * s.wvv;
    return mv;
}

MomentVector combined_moments(const FluidField& field, const ParticleCloud& cloud,
                              const ModelParams& params, double t) {
    MomentVector mv = fluid_moments(field, params, t);
    const MomentVector p = particle_moments(cloud, t);
    mv.m_f = p.m_f;
    mv.M_f = p.M_f;
    mv.W_f = p.W_f;
    mv.I_f = p.I_f;
    mv.E_f = p.E_f;
    return mv;
}

HypothesisReport check_hypotheses(const ModelParams& params) {
    HypothesisReport rep;

    // (H1): D(rho, y) . y >= 0 sampled over rho >= 0 and relative velocities.
    {
        HypothesisCheck c{"H1", true, "D(rho,y).y >= 0 on sampled grid"};
        const double rhos[] = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
        for (double rho : rhos) {
            for (int i = -12; i <= 12 && c.holds; ++i) {
                const double y = 0.25 * i;
                const double dy = params.drag.force(rho, y) * y;
                if (dy < -1e-15 * (1.0 + std::fabs(dy))) {
                    c.holds = false;
                    c.detail = "D(rho,y).y = " + csv::format(dy) + " < 0 at rho=" +
                               csv::format(rho) + ", y=" + csv::format(y);
                }
            }
            if (!c.holds) break;
        }
        rep.checks.push_back(c);
    }

    // (H2): conservation of mass/momentum and kinetic-energy dissipation hold
    // by construction for the implemented operators.
    {
        HypothesisCheck c{"H2", true, ""};
        switch (params.collision.kind) {
        case CollisionKind::None:
            c.detail = "no collision operator";
            break;
        case CollisionKind::GlobalAlignment:
            c.holds = params.collision.psi.value >= 0.0;
            c.detail = c.holds ? "Q1 with nonnegative even psi"
                               : "communication weight is negative";
            break;
        case CollisionKind::LocalAlignment:
            c.detail = "Q2 relaxation toward the local mean velocity";
            break;
        }
        rep.checks.push_back(c);
    }

    // (H3): lambda(rho) = 2 rho mu'(rho) - 2 mu(rho), mu >= 0.
    {
        HypothesisCheck c{"H3", true, ""};
        switch (params.viscosity.kind) {
        case ViscosityKind::None:
            c.detail = "mu = lambda = 0";
            break;
        case ViscosityKind::PowerLaw: {
            const double cc = params.viscosity.c;
            const double delta = params.viscosity.delta;
            for (double rho : {0.1, 0.5, 1.0, 2.0, 7.5}) {
                const double mup = cc * delta * std::pow(rho, delta - 1.0);
                const double want = 2.0 * rho * mup - 2.0 * cc * std::pow(rho, delta);
                const double have = params.viscosity.lambda_of(rho);
                if (std::fabs(want - have) > 1e-12 * (1.0 + std::fabs(want))) {
                    c.holds = false;
                    c.detail = "lambda mismatch at rho=" + csv::format(rho);
                    break;
                }
            }
            if (c.holds)
                c.detail = "lambda(rho) = 2(delta-1) c rho^delta confirmed";
            break;
        }
        case ViscosityKind::Constants:
            c.holds = params.viscosity.mu >= 0.0 &&
                      2.0 * params.viscosity.mu + params.d * params.viscosity.lambda >= 0.0;
            c.detail = c.holds ? "constant coefficients; (H3) replaced by mu >= 0, 2mu + d lambda >= 0"
                               : "2 mu + d lambda < 0";
            break;
        }
        rep.checks.push_back(c);
    }

    return rep;
}

void require_hypotheses(const ModelParams& params) {
    const auto rep = check_hypotheses(params);
    for (const auto& c : rep.checks)
        if (!c.holds) throw HypothesisViolated(c.name, c.detail);
}

namespace {

// Velocity window cutoff: 1 inside |x| <= window, cosine taper to 0 over the
// rolloff width, 0 beyond.
double window_cut(double x, double window, double rolloff) {
    const double ax = std::fabs(x);
    if (ax <= window) return 1.0;
    if (rolloff <= 0.0 || ax >= window + rolloff) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (ax - window) / rolloff));
}

FluidField build_fluid(const InitialDataSpec& spec) {
    FluidField f;
    const auto& fi = spec.fluid;

    if (fi.family == FluidInit::Family::Tabulated) {
        const auto tab = csv::read(fi.file);
        const int cx = tab.column("x"), cr = tab.column("rho"), cu = tab.column("u");
        const int ca = tab.column("alpha");
        if (cx < 0 || cr < 0 || cu < 0)
            throw BadSpec("tabulated field needs columns x,rho,u");
        if (tab.rows.size() < 2) throw BadSpec("tabulated field needs >= 2 rows");
        const double dx = tab.rows[1][cx] - tab.rows[0][cx];
        if (!(dx > 0)) throw BadSpec("tabulated x must be strictly increasing");
        for (std::size_t i = 1; i < tab.rows.size(); ++i) {
            const double step = tab.rows[i][cx] - tab.rows[i - 1][cx];
            if (std::fabs(step - dx) > 1e-9 * dx)
                throw BadSpec("tabulated x must be uniformly spaced");
        }
        f.x_lo = tab.rows.front()[cx] - 0.5 * dx;
        f.x_hi = tab.rows.back()[cx] + 0.5 * dx;
        for (const auto& row : tab.rows) {
            f.rho.push_back(row[cr]);
            f.u.push_back(row[cu]);
            if (ca >= 0) f.alpha.push_back(row[ca]);
        }
        f.validate();
        return f;
    }

    f.x_lo = spec.grid.x_lo;
    f.x_hi = spec.grid.x_hi;
    f.rho.assign(spec.grid.cells, 0.0);
    f.u.assign(spec.grid.cells, 0.0);
    for (std::size_t i = 0; i < f.cells(); ++i) {
        const double x = f.x_center(i);
        double rho = 0.0, u = 0.0;
        switch (fi.family) {
        case FluidInit::Family::Zero:
            break;
        case FluidInit::Family::GaussianBump:
            rho = fi.amplitude * std::exp(-x * x / (2.0 * fi.sigma * fi.sigma));
            u = fi.velocity_slope * x * window_cut(x, fi.velocity_window, fi.velocity_rolloff);
            break;
        case FluidInit::Family::UniformBump:
            if (std::fabs(x) <= fi.radius) {
                rho = fi.height;
                u = fi.velocity_slope * x *
                    window_cut(x, fi.velocity_window, fi.velocity_rolloff);
            }
            break;
        case FluidInit::Family::Tabulated:
            break;
        }
        f.rho[i] = rho;
        f.u[i] = u;
    }
    f.validate();
    return f;
}

ParticleCloud build_particles(const InitialDataSpec& spec) {
    ParticleCloud c;
    const auto& pi = spec.particles;

    switch (pi.family) {
    case ParticleInit::Family::None:
        break;
    case ParticleInit::Family::Maxwellian: {
        if (pi.count == 0) break;
        Rng rng(spec.seed);
        const double w = pi.mass / static_cast<double>(pi.count);
        c.mode = ParticleCloud::Mode::Kinetic;
        c.x.reserve(pi.count);
        for (std::size_t i = 0; i < pi.count; ++i) {
            c.x.push_back(pi.x_center + pi.x_sigma * rng.gaussian());
            c.v.push_back(pi.mean_velocity + std::sqrt(pi.temperature) * rng.gaussian());
            c.w.push_back(w);
        }
        break;
    }
    case ParticleInit::Family::MonoKinetic: {
        if (pi.count == 0) break;
        // Deterministic quadrature nodes over +-4 sigma, Gaussian weights
        // normalized to the requested mass.
        c.mode = ParticleCloud::Mode::MonoKinetic;
        const double lo = std::max(spec.grid.x_lo, pi.x_center - 4.0 * pi.x_sigma);
        const double hi = std::min(spec.grid.x_hi, pi.x_center + 4.0 * pi.x_sigma);
        const double dxp = (hi - lo) / static_cast<double>(pi.count);
        double total = 0.0;
        for (std::size_t i = 0; i < pi.count; ++i) {
            const double x = lo + (static_cast<double>(i) + 0.5) * dxp;
            const double g = std::exp(-(x - pi.x_center) * (x - pi.x_center) /
                                      (2.0 * pi.x_sigma * pi.x_sigma));
            c.x.push_back(x);
            c.v.push_back(pi.mean_velocity + pi.velocity_slope * x);
            c.w.push_back(g);
            total += g;
        }
        if (total > 0.0)
            for (double& w : c.w) w *= pi.mass / total;
        break;
    }
    case ParticleInit::Family::Tabulated: {
        const auto tab = csv::read(pi.file);
        const int cx = tab.column("x"), cv = tab.column("v"), cw = tab.column("w");
        if (cx < 0 || cv < 0 || cw < 0)
            throw BadSpec("tabulated particles need columns x,v,w");
        c.mode = pi.mode;
        for (const auto& row : tab.rows) {
            c.x.push_back(row[cx]);
            c.v.push_back(row[cv]);
            c.w.push_back(row[cw]);
        }
        break;
    }
    }
    c.validate();
    return c;
}

} // namespace

std::pair<FluidField, ParticleCloud> build_initial_data(const InitialDataSpec& spec,
                                                        const ModelParams& params) {
    if (spec.grid.cells < 2) throw BadSpec("grid needs at least 2 cells");
    if (!(spec.grid.x_hi > spec.grid.x_lo)) throw BadSpec("grid domain is empty");

    FluidField field = build_fluid(spec);
    ParticleCloud cloud = build_particles(spec);

    // Thick sprays: alpha follows from the particle number density,
    // 1 - alpha = (m_p / rho_p) n(x).
    if (params.thick && !field.has_alpha()) {
        const double factor = params.thick->m_p(params.d) / params.thick->rho_p;
        const double dx = field.dx();
        std::vector<double> n(field.cells(), 0.0);
        for (std::size_t p = 0; p < cloud.size(); ++p) {
            const double rel = (cloud.x[p] - field.x_lo) / dx;
            if (rel < 0.0 || rel >= static_cast<double>(field.cells())) continue;
            n[static_cast<std::size_t>(rel)] += cloud.w[p] / dx;
        }
        field.alpha.resize(field.cells());
        for (std::size_t i = 0; i < n.size(); ++i) {
            const double a = 1.0 - factor * n[i];
            if (a < 0.0)
                throw BadSpec("particle volume fraction exceeds 1; reduce mass or m_p");
            field.alpha[i] = std::min(a, 1.0);
        }
        field.validate();
    }

    return {std::move(field), std::move(cloud)};
}

} // namespace blowuplab::moments
