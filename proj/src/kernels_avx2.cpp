#include "blowuplab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <cmath>
#include <immintrin.h>

// AVX2 kernels. Lane j of each vector accumulator matches lane j of the
// scalar reference; the final combine and the tail loop are written exactly
// like the scalar kernel so the results agree bit for bit.

namespace blowuplab::kernels {

namespace {

inline double combine4(__m256d acc) {
    alignas(32) double l[4];
    _mm256_store_pd(l, acc);
    return (l[0] + l[1]) + (l[2] + l[3]);
}

inline __m256d abs_pd(__m256d x) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(signmask, x);
}

FluidSums fluid_sums_avx2(const double* rho, const double* u, std::size_t n,
                          double x0, double dx) {
    __m256d mass = _mm256_setzero_pd();
    __m256d mom = _mm256_setzero_pd();
    __m256d momw = _mm256_setzero_pd();
    __m256d xx = _mm256_setzero_pd();
    __m256d uu = _mm256_setzero_pd();

    const __m256d x0v = _mm256_set1_pd(x0);
    const __m256d dxv = _mm256_set1_pd(dx);
    const __m256d four = _mm256_set1_pd(4.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

    const std::size_t n4 = n - (n % 4);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d r = _mm256_loadu_pd(rho + i);
        const __m256d uv = _mm256_loadu_pd(u + i);
        const __m256d xi = _mm256_add_pd(x0v, _mm256_mul_pd(idx, dxv));
        const __m256d ru = _mm256_mul_pd(r, uv);
        const __m256d rx = _mm256_mul_pd(r, xi);
        mass = _mm256_add_pd(mass, r);
        mom = _mm256_add_pd(mom, ru);
        momw = _mm256_add_pd(momw, _mm256_mul_pd(ru, xi));
        xx = _mm256_add_pd(xx, _mm256_mul_pd(rx, xi));
        uu = _mm256_add_pd(uu, _mm256_mul_pd(ru, uv));
        idx = _mm256_add_pd(idx, four);
    }

    FluidSums s;
    s.mass = combine4(mass);
    s.mom = combine4(mom);
    s.momw = combine4(momw);
    s.xx = combine4(xx);
    s.uu = combine4(uu);

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

ParticleSums particle_sums_avx2(const double* x, const double* v,
                                const double* w, std::size_t n) {
    __m256d sw = _mm256_setzero_pd();
    __m256d swv = _mm256_setzero_pd();
    __m256d swxv = _mm256_setzero_pd();
    __m256d swxx = _mm256_setzero_pd();
    __m256d swvv = _mm256_setzero_pd();

    const std::size_t n4 = n - (n % 4);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d wi = _mm256_loadu_pd(w + i);
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d vi = _mm256_loadu_pd(v + i);
        const __m256d wv = _mm256_mul_pd(wi, vi);
        const __m256d wx = _mm256_mul_pd(wi, xi);
        sw = _mm256_add_pd(sw, wi);
        swv = _mm256_add_pd(swv, wv);
        swxv = _mm256_add_pd(swxv, _mm256_mul_pd(wv, xi));
        swxx = _mm256_add_pd(swxx, _mm256_mul_pd(wx, xi));
        swvv = _mm256_add_pd(swvv, _mm256_mul_pd(wv, vi));
    }

    ParticleSums s;
    s.w = combine4(sw);
    s.wv = combine4(swv);
    s.wxv = combine4(swxv);
    s.wxx = combine4(swxx);
    s.wvv = combine4(swvv);

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

double rusanov_faces_avx2(const double* rhoL, const double* uL, const double* pL,
                          const double* cL, const double* rhoR, const double* uR,
                          const double* pR, const double* cR, std::size_t nfaces,
                          double* f_rho, double* f_mom) {
    const __m256d half = _mm256_set1_pd(0.5);
    __m256d amaxv = _mm256_setzero_pd();

    const std::size_t n4 = nfaces - (nfaces % 4);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d rl = _mm256_loadu_pd(rhoL + i);
        const __m256d rr = _mm256_loadu_pd(rhoR + i);
        const __m256d ul = _mm256_loadu_pd(uL + i);
        const __m256d ur = _mm256_loadu_pd(uR + i);
        const __m256d pl = _mm256_loadu_pd(pL + i);
        const __m256d pr = _mm256_loadu_pd(pR + i);
        const __m256d sl = _mm256_loadu_pd(cL + i);
        const __m256d sr = _mm256_loadu_pd(cR + i);

        const __m256d aL = _mm256_add_pd(abs_pd(ul), sl);
        const __m256d aR = _mm256_add_pd(abs_pd(ur), sr);
        const __m256d a = _mm256_max_pd(aL, aR);

        const __m256d mL = _mm256_mul_pd(rl, ul);
        const __m256d mR = _mm256_mul_pd(rr, ur);

        const __m256d frho = _mm256_sub_pd(
            _mm256_mul_pd(half, _mm256_add_pd(mL, mR)),
            _mm256_mul_pd(half, _mm256_mul_pd(a, _mm256_sub_pd(rr, rl))));
        const __m256d fmom = _mm256_sub_pd(
            _mm256_mul_pd(half,
                          _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(mL, ul), pl),
                                        _mm256_add_pd(_mm256_mul_pd(mR, ur), pr))),
            _mm256_mul_pd(half, _mm256_mul_pd(a, _mm256_sub_pd(mR, mL))));

        _mm256_storeu_pd(f_rho + i, frho);
        _mm256_storeu_pd(f_mom + i, fmom);
        amaxv = _mm256_max_pd(amaxv, a);
    }

    alignas(32) double l[4];
    _mm256_store_pd(l, amaxv);
    double amax = l[0];
    if (l[1] > amax) amax = l[1];
    if (l[2] > amax) amax = l[2];
    if (l[3] > amax) amax = l[3];

    for (std::size_t i = n4; i < nfaces; ++i) {
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

void minmod_slopes_avx2(const double* q, std::size_t n, double* slope) {
    if (n == 0) return;
    slope[0] = 0.0;
    if (n > 1) slope[n - 1] = 0.0;
    if (n < 3) return;

    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        const __m256d qm = _mm256_loadu_pd(q + i - 1);
        const __m256d qc = _mm256_loadu_pd(q + i);
        const __m256d qp = _mm256_loadu_pd(q + i + 1);
        const __m256d dl = _mm256_sub_pd(qc, qm);
        const __m256d dr = _mm256_sub_pd(qp, qc);
        const __m256d opposed = _mm256_cmp_pd(_mm256_mul_pd(dl, dr), zero, _CMP_LE_OQ);
        const __m256d takeleft = _mm256_cmp_pd(abs_pd(dl), abs_pd(dr), _CMP_LT_OQ);
        __m256d s = _mm256_blendv_pd(dr, dl, takeleft);
        s = _mm256_andnot_pd(opposed, s);
        _mm256_storeu_pd(slope + i, s);
    }
    for (; i + 1 < n; ++i) {
        const double dl = q[i] - q[i - 1];
        const double dr = q[i + 1] - q[i];
        if (dl * dr <= 0.0) {
            slope[i] = 0.0;
        } else {
            slope[i] = std::fabs(dl) < std::fabs(dr) ? dl : dr;
        }
    }
}

const Kernels avx2_table = {
    "avx2",
    fluid_sums_avx2,
    particle_sums_avx2,
    rusanov_faces_avx2,
    minmod_slopes_avx2,
};

} // namespace

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2"); }

const Kernels& avx2() { return avx2_table; }

} // namespace blowuplab::kernels

#endif // x86_64
