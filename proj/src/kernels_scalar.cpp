#include "blowuplab/kernels.hpp"

#include <cmath>

// Scalar reference kernels. The reductions run four interleaved accumulators
// (lane j holds indices 4k+j) and combine them as (l0+l1)+(l2+l3) with the
// tail added afterwards -- the exact addition schedule of the vector kernels.

namespace blowuplab::kernels {

namespace {

FluidSums fluid_sums_scalar(const double* rho, const double* u, std::size_t n,
                            double x0, double dx) {
    double mass[4] = {0, 0, 0, 0};
    double mom[4] = {0, 0, 0, 0};
    double momw[4] = {0, 0, 0, 0};
    double xx[4] = {0, 0, 0, 0};
    double uu[4] = {0, 0, 0, 0};

    const std::size_t n4 = n - (n % 4);
    for (std::size_t i = 0; i < n4; i += 4) {
        for (int j = 0; j < 4; ++j) {
            const double r = rho[i + j];
            const double uv = u[i + j];
            const double xi = x0 + static_cast<double>(i + j) * dx;
            const double ru = r * uv;
            const double rx = r * xi;
            mass[j] += r;
            mom[j] += ru;
            momw[j] += ru * xi;
            xx[j] += rx * xi;
            uu[j] += ru * uv;
        }
    }

    FluidSums s;
    s.mass = (mass[0] + mass[1]) + (mass[2] + mass[3]);
    s.mom = (mom[0] + mom[1]) + (mom[2] + mom[3]);
    s.momw = (momw[0] + momw[1]) + (momw[2] + momw[3]);
    s.xx = (xx[0] + xx[1]) + (xx[2] + xx[3]);
    s.uu = (uu[0] + uu[1]) + (uu[2] + uu[3]);

    for (std::size_t i = n4; i < n; ++i) {
        const double r = rho[i];
        const double uv = u[i];
        const double xi = x0 + static_cast<double>(i) * dx;
        const double ru = r * uv;
        const double rx = r * xi;
        s.mass += r;
        s.mom += ru;
        s.momw += ru * xi;
        s.xx += rx * xi;
        s.uu += ru * uv;
    }
    return s;
}

ParticleSums particle_sums_scalar(const double* x, const double* v,
                                  const double* w, std::size_t n) {
    double sw[4] = {0, 0, 0, 0};
    double swv[4] = {0, 0, 0, 0};
    double swxv[4] = {0, 0, 0, 0};
    double swxx[4] = {0, 0, 0, 0};
    double swvv[4] = {0, 0, 0, 0};

    const std::size_t n4 = n - (n % 4);
    for (std::size_t i = 0; i < n4; i += 4) {
        for (int j = 0; j < 4; ++j) {
            const double wi = w[i + j];
            const double xi = x[i + j];
            const double vi = v[i + j];
            const double wv = wi * vi;
            const double wx = wi * xi;
            sw[j] += wi;
            swv[j] += wv;
            swxv[j] += wv * xi;
            swxx[j] += wx * xi;
            swvv[j] += wv * vi;
        }
    }

    ParticleSums s;
    s.w = (sw[0] + sw[1]) + (sw[2] + sw[3]);
    s.wv = (swv[0] + swv[1]) + (swv[2] + swv[3]);
    s.wxv = (swxv[0] + swxv[1]) + (swxv[2] + swxv[3]);
    s.wxx = (swxx[0] + swxx[1]) + (swxx[2] + swxx[3]);
    s.wvv = (swvv[0] + swvv[1]) + (swvv[2] + swvv[3]);

    for (std::size_t i = n4; i < n; ++i) {
        const double wi = w[i];
        const double xi = x[i];
        const double vi = v[i];
        const double wv = wi * vi;
        const double wx = wi * xi;
        s.w += wi;
        s.wv += wv;
        s.wxv += wv * xi;
        s.wxx += wx * xi;
        s.wvv += wv * vi;
    }
    return s;
}

double rusanov_faces_scalar(const double* rhoL, const double* uL, const double* pL,
                            const double* cL, const double* rhoR, const double* uR,
                            const double* pR, const double* cR, std::size_t nfaces,
                            double* f_rho, double* f_mom) {
    double amax = 0.0;
    for (std::size_t i = 0; i < nfaces; ++i) {
        const double aL = std::fabs(uL[i]) + cL[i];
        const double aR = std::fabs(uR[i]) + cR[i];
        const double a = aL > aR ? aL : aR;
        const double mL = rhoL[i] * uL[i];
        const double mR = rhoR[i] * uR[i];
        f_rho[i] = 0.5 * (mL + mR) - 0.5 * (a * (rhoR[i] - rhoL[i]));
        f_mom[i] = 0.5 * ((mL * uL[i] + pL[i]) + (mR * uR[i] + pR[i])) -
                   0.5 * (a * (mR - mL));
        if (a > amax) amax = a;
    }
    return amax;
}

void minmod_slopes_scalar(const double* q, std::size_t n, double* slope) {
    if (n == 0) return;
    slope[0] = 0.0;
    if (n > 1) slope[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dl = q[i] - q[i - 1];
        const double dr = q[i + 1] - q[i];
        if (dl * dr <= 0.0) {
            slope[i] = 0.0;
        } else {
            slope[i] = std::fabs(dl) < std::fabs(dr) ? dl : dr;
        }
    }
}

const Kernels scalar_table = {
    "scalar",
    fluid_sums_scalar,
    particle_sums_scalar,
    rusanov_faces_scalar,
    minmod_slopes_scalar,
};

} // namespace

const Kernels& scalar() { return scalar_table; }

} // namespace blowuplab::kernels
