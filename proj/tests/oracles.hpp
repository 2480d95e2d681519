#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blowuplab/field.hpp"
#include "blowuplab/rng.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// High-resolution midpoint quadrature with one Richardson step (midpoint is
// second order, so R = (4 I_2N - I_N) / 3).
// ---------------------------------------------------------------------------
inline double richardson_quadrature(const std::function<double(double)>& f, double a,
                                    double b, std::size_t n) {
    auto mid = [&](std::size_t m) {
        const double h = (b - a) / static_cast<double>(m);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            s += f(a + (static_cast<double>(i) + 0.5) * h);
        return s * h;
    };
    const double In = mid(n);
    const double I2n = mid(2 * n);
    return (4.0 * I2n - In) / 3.0;
}

// ---------------------------------------------------------------------------
// Golden-section minimizer on [a, b] for unimodal f.
// ---------------------------------------------------------------------------
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         int iters = 200) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Dense-scan + golden-section lifespan oracle: last t in [0, horizon] where
// phi(t) >= 0, refined by golden-section on |phi| around the located change.
// Returns a negative value when no sign change exists.
// ---------------------------------------------------------------------------
inline double lifespan_scan_oracle(const std::function<double(double)>& phi,
                                   double horizon = 1e12) {
    const int K = 20000;
    const double lo = 1e-9;
    double last_ok = phi(0.0) >= 0.0 ? 0.0 : -1.0;
    double first_bad_after = -1.0;
    for (int i = 0; i <= K; ++i) {
        const double t = lo * std::pow(horizon / lo, static_cast<double>(i) / K);
        if (phi(t) >= 0.0) {
            last_ok = t;
            first_bad_after = -1.0;
        } else if (first_bad_after < 0.0) {
            first_bad_after = t;
        }
    }
    if (last_ok < 0.0) return 0.0;     // fails from the start
    if (first_bad_after < 0.0) return -1.0; // no crossing up to horizon
    // refine the root of phi between last_ok and first_bad_after
    double a = last_ok, b = first_bad_after;
    const double tstar = golden_min([&phi](double t) { return std::fabs(phi(t)); },
                                    a, b, 300);
    return tstar;
}

// ---------------------------------------------------------------------------
// Exact Riemann solver for 1D isentropic gas dynamics, p = rho^gamma.
// Two genuinely nonlinear fields; the star state solves
//   f_L(rho*) + f_R(rho*) + (uR - uL) = 0
// with the shock branch from Rankine-Hugoniot and the rarefaction branch from
// the Riemann invariants u -+ 2c/(gamma-1).
// ---------------------------------------------------------------------------
struct IsentropicRiemann {
    double gamma;
    double rhoL, uL, rhoR, uR;
    double rho_star = 0, u_star = 0;

    double c(double rho) const { return std::sqrt(gamma * std::pow(rho, gamma - 1.0)); }
    double p(double rho) const { return std::pow(rho, gamma); }

    double f_branch(double rho, double rhoK) const {
        if (rho > rhoK) {
            const double dp = p(rho) - p(rhoK);
            const double drho = rho - rhoK;
            return std::sqrt(dp * drho / (rho * rhoK));
        }
        return 2.0 * (c(rho) - c(rhoK)) / (gamma - 1.0);
    }

    void solve() {
        auto F = [this](double rho) {
            return f_branch(rho, rhoL) + f_branch(rho, rhoR) + (uR - uL);
        };
        double a = 1e-12, b = std::max(rhoL, rhoR);
        while (F(b) < 0.0) b *= 2.0;
        if (F(a) > 0.0) throw std::runtime_error("riemann: vacuum forms");
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            (F(m) < 0.0 ? a : b) = m;
        }
        rho_star = 0.5 * (a + b);
        u_star = uL - f_branch(rho_star, rhoL);
    }

    // self-similar solution at xi = x / t
    void sample(double xi, double& rho, double& u) const {
        // left wave
        if (rho_star > rhoL) { // 1-shock
            const double j = std::sqrt((p(rho_star) - p(rhoL)) * rho_star * rhoL /
                                       (rho_star - rhoL));
            const double s = uL - j / rhoL;
            if (xi < s) {
                rho = rhoL;
                u = uL;
                return;
            }
        } else { // 1-rarefaction
            const double head = uL - c(rhoL);
            const double tail = u_star - c(rho_star);
            if (xi < head) {
                rho = rhoL;
                u = uL;
                return;
            }
            if (xi < tail) {
                const double w = uL + 2.0 * c(rhoL) / (gamma - 1.0);
                const double cf = (gamma - 1.0) / (gamma + 1.0) * (w - xi);
                u = xi + cf;
                rho = std::pow(cf * cf / gamma, 1.0 / (gamma - 1.0));
                return;
            }
        }
        // right wave
        if (rho_star > rhoR) { // 2-shock
            const double j = std::sqrt((p(rho_star) - p(rhoR)) * rho_star * rhoR /
                                       (rho_star - rhoR));
            const double s = uR + j / rhoR;
            if (xi > s) {
                rho = rhoR;
                u = uR;
                return;
            }
        } else { // 2-rarefaction
            const double head = uR + c(rhoR);
            const double tail = u_star + c(rho_star);
            if (xi > head) {
                rho = rhoR;
                u = uR;
                return;
            }
            if (xi > tail) {
                const double w = uR - 2.0 * c(rhoR) / (gamma - 1.0);
                const double cf = (gamma - 1.0) / (gamma + 1.0) * (xi - w);
                u = xi - cf;
                rho = std::pow(cf * cf / gamma, 1.0 / (gamma - 1.0));
                return;
            }
        }
        rho = rho_star;
        u = u_star;
    }

    double shock_speed_right() const {
        const double j = std::sqrt((p(rho_star) - p(rhoR)) * rho_star * rhoR /
                                   (rho_star - rhoR));
        return uR + j / rhoR;
    }
    double raref_head_left() const { return uL - c(rhoL); }
    double raref_tail_left() const { return u_star - c(rho_star); }
};

// ---------------------------------------------------------------------------
// Random nonnegative density fields for property tests: mixtures of bumps,
// Gaussians and per-cell noise.
// ---------------------------------------------------------------------------
inline blowuplab::FluidField random_density_field(blowuplab::Rng& rng, std::size_t cells,
                                                  double x_lo = -4.0, double x_hi = 4.0) {
    blowuplab::FluidField f;
    f.x_lo = x_lo;
    f.x_hi = x_hi;
    f.rho.assign(cells, 0.0);
    f.u.assign(cells, 0.0);
    const int kind = static_cast<int>(rng.next_u64() % 3);
    const double A = 0.1 + 4.0 * rng.uniform();
    const double sig = 0.2 + 1.5 * rng.uniform();
    const double x0 = -2.0 + 4.0 * rng.uniform();
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = f.x_center(i);
        double r = 0.0;
        switch (kind) {
        case 0: r = A * std::exp(-(x - x0) * (x - x0) / (2.0 * sig * sig)); break;
        case 1: r = std::fabs(x - x0) < sig ? A : 0.0; break;
        case 2: r = A * rng.uniform() * std::exp(-x * x / 8.0); break;
        }
        f.rho[i] = r;
        f.u[i] = -1.0 + 2.0 * rng.uniform();
    }
    return f;
}

} // namespace oracles
