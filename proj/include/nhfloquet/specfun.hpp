#pragma once

// Special functions of complex order and argument. Series are summed in
// binary128 with Kahan compensation whatever the caller's scalar type, so
// double results keep full accuracy where the Maclaurin terms cancel.
// Multi-valued functions take the argument together with a winding number
// k: the point is z e^{2 pi i k} and powers use log z + 2 pi i k.

#include "error.hpp"
#include "scalar.hpp"

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <sstream>

namespace nhfloquet::specfun {

inline constexpr double Z_MAX = 60.0;
inline constexpr int MAX_TERMS = 5000;

struct SeriesResult {
    cquad value{0, 0};
    double est_error = 0;  // absolute
    int terms_used = 0;
};

// A point on the Riemann surface of log: z together with a chosen log z.
struct LogPoint {
    cquad z;
    cquad lz;
    static LogPoint from(const cquad& z, int winding = 0) {
        cquad lz = std::log(z) + cquad(0, 2 * winding) * pi_v<quad>();
        return {z, lz};
    }
    static LogPoint from_log(const cquad& lz) { return {std::exp(lz), lz}; }
    LogPoint negated_half_turn(int dir) const {
        // -z reached by a half turn in the given direction
        return {-z, lz + cquad(0, dir) * pi_v<quad>()};
    }
};

namespace detail {

inline const quad& eps_q() {
    static const quad e = std::numeric_limits<quad>::epsilon();
    return e;
}

inline bool near_integer(const cquad& x, double tol, long* n = nullptr) {
    using std::abs;
    using std::round;
    quad r = round(x.real());
    bool hit = abs(x.real() - r) <= quad(tol) && abs(x.imag()) <= quad(tol);
    if (n) *n = static_cast<long>(r);
    return hit;
}

inline void guard_argument(const cquad& z) {
    if (std::abs(to_double(z)) > Z_MAX) {
        std::ostringstream os;
        os << "|z| = " << std::abs(to_double(z)) << " exceeds " << Z_MAX;
        throw Error(ErrorCode::ArgumentOutOfRange, os.str());
    }
}

// ln Gamma(w) by Stirling's series, accurate to binary128 for Re w >= 30.
inline cquad lgamma_stirling_large(const cquad& w) {
    static const quad B[] = {quad(1) / 6,
                             quad(-1) / 30,
                             quad(1) / 42,
                             quad(-1) / 30,
                             quad(5) / 66,
                             quad(-691) / 2730,
                             quad(7) / 6,
                             quad(-3617) / 510,
                             quad(43867) / 798,
                             quad(-174611) / 330,
                             quad(854513) / 138,
                             quad(-236364091) / 2730,
                             quad(8553103) / 6,
                             quad("-23749461029") / 870};
    static const quad half_log_2pi = log(quad(2) * pi_v<quad>()) / 2;
    cquad lw = std::log(w);
    cquad s = (w - quad(0.5)) * lw - w + half_log_2pi;
    cquad winv = quad(1) / w;
    cquad w2 = winv * winv;
    cquad p = winv;
    for (int k = 1; k <= 14; ++k) {
        s += B[k - 1] / (quad(2 * k) * quad(2 * k - 1)) * p;
        p *= w2;
    }
    return s;
}

// Gamma(z) for Re z >= 1/2 with the argument shifted into Stirling range.
inline cquad gamma_right(const cquad& z) {
    cquad w = z;
    cquad prod(1, 0);
    while (w.real() < quad(30)) {
        prod *= w;
        w += quad(1);
    }
    return std::exp(lgamma_stirling_large(w)) / prod;
}

}  // namespace detail

// Complex Gamma and its reciprocal in binary128.
inline cquad gamma_q(const cquad& z) {
    if (z.real() < quad(0.5)) {
        long n;
        if (detail::near_integer(z, 0, &n) && n <= 0)
            throw Error(ErrorCode::DegenerateParameter, "Gamma pole at non-positive integer");
        const quad& pi = pi_v<quad>();
        return pi / (std::sin(pi * z) * detail::gamma_right(quad(1) - z));
    }
    return detail::gamma_right(z);
}

inline cquad rgamma_q(const cquad& z) {
    if (z.real() < quad(0.5)) {
        long n;
        if (detail::near_integer(z, 0, &n) && n <= 0) return {0, 0};
        const quad& pi = pi_v<quad>();
        return std::sin(pi * z) * detail::gamma_right(quad(1) - z) / pi;
    }
    return quad(1) / detail::gamma_right(z);
}

// Lanczos approximation (g = 7, 9 coefficients) in double precision.
inline cplx gamma_lanczos(cplx z) {
    static const double g = 7.0;
    static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    const double pi = std::acos(-1.0);
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_lanczos(1.0 - z));
    z -= 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + double(i));
    cplx t = z + g + 0.5;
    return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

template <class T>
inline std::complex<T> gamma(const std::complex<T>& z) {
    if constexpr (is_quad_v<T>) {
        return gamma_q(z);
    } else {
        return gamma_lanczos(z);
    }
}

template <class T>
inline std::complex<T> rgamma(const std::complex<T>& z) {
    if constexpr (is_quad_v<T>) {
        return rgamma_q(z);
    } else {
        long n;
        if (detail::near_integer(widen<quad>(z), 0, &n) && n <= 0) return {0, 0};
        return 1.0 / gamma_lanczos(z);
    }
}

namespace detail {

// sum_k (a)_k z^k / (k! Gamma(b + k)).
inline SeriesResult kummer_reg_raw(const cquad& a, const cquad& b, const cquad& z) {
    SeriesResult r;
    KahanSum<quad> S;
    const quad& eps = eps_q();
    int k0 = 0;
    cquad term;
    long nb;
    if (near_integer(b, 1e-24, &nb) && nb <= 0) {
        // 1/Gamma(b+k) vanishes for k <= -b; the series starts at k0 = 1 - b.
        k0 = static_cast<int>(1 - nb);
        cquad poch(1, 0);
        quad fact = 1;
        cquad zp(1, 0);
        for (int j = 0; j < k0; ++j) {
            poch *= a + quad(j);
            fact *= quad(j + 1);
            zp *= z;
        }
        term = poch * zp / fact;  // Gamma(b + k0) = Gamma(1) = 1
    } else {
        term = rgamma_q(b);
    }
    quad absum = 0;
    int small = 0;
    int k = k0;
    for (; k < k0 + MAX_TERMS; ++k) {
        S.add(term);
        quad at = std::abs(term);
        absum += at;
        quad as = std::abs(S.value());
        if (at <= eps * as || at == 0) {
            if (quad(k) > std::abs(z) && ++small >= 2) break;
        } else {
            small = 0;
        }
        cquad bk = b + quad(k);
        if (bk == cquad(0, 0)) {
            term = cquad(0, 0);
        } else {
            term *= (a + quad(k)) * z / (quad(k + 1) * bk);
        }
        if (term == cquad(0, 0) && quad(k) > std::abs(z)) {
            ++k;
            break;
        }
    }
    if (k >= k0 + MAX_TERMS) throw Error(ErrorCode::SeriesNoConvergence, "Kummer series exceeded max_terms");
    r.value = S.value();
    r.terms_used = k - k0 + 1;
    r.est_error = to_double(eps * absum * quad(4));
    return r;
}

inline void check_accuracy(const SeriesResult& r, double rel, const char* what) {
    double v = std::abs(to_double(r.value));
    if (r.est_error > rel * v && r.est_error > 1e-300) {
        std::ostringstream os;
        os << what << ": cancellation leaves estimated relative error " << r.est_error / std::max(v, 1e-300);
        throw Error(ErrorCode::SeriesNoConvergence, os.str());
    }
}

}  // namespace detail

// Regularized confluent hypergeometric M(a,b,z)/... = 1F1(a;b;z)/Gamma(b).
inline SeriesResult kummer_m_reg_series(const cquad& a, const cquad& b, const cquad& z) {
    detail::guard_argument(z);
    if (z.real() < quad(0)) {
        SeriesResult r = detail::kummer_reg_raw(b - a, b, -z);
        cquad ez = std::exp(z);
        r.value *= ez;
        r.est_error *= to_double(std::abs(ez));
        return r;
    }
    return detail::kummer_reg_raw(a, b, z);
}

inline cquad kummer_m_reg_q(const cquad& a, const cquad& b, const cquad& z, double rel = 1e-12) {
    SeriesResult r = kummer_m_reg_series(a, b, z);
    detail::check_accuracy(r, rel, "kummer_m_reg");
    return r.value;
}

template <class T>
inline std::complex<T> kummer_m_reg(const std::complex<T>& a, const std::complex<T>& b, const std::complex<T>& z) {
    cquad v = kummer_m_reg_q(widen_q(a), widen_q(b), widen_q(z));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

namespace detail {
inline void guard_noninteger_b(const cquad& b) {
    if (near_integer(b, 1e-8)) throw Error(ErrorCode::IntegerBParameter, "b is within 1e-8 of an integer");
}
}  // namespace detail

// Tricomi U through the two-term connection with regularized M.
inline cquad tricomi_u_q(const cquad& a, const cquad& b, const LogPoint& p, double rel = 1e-12) {
    detail::guard_noninteger_b(b);
    const quad& pi = pi_v<quad>();
    cquad m1 = kummer_m_reg_q(a, b, p.z, rel);
    cquad m2 = kummer_m_reg_q(quad(1) + a - b, quad(2) - b, p.z, rel);
    cquad zp = std::exp((quad(1) - b) * p.lz);
    return pi / std::sin(pi * b) * (m1 * rgamma_q(quad(1) + a - b) - zp * m2 * rgamma_q(a));
}

template <class T>
inline std::complex<T> tricomi_u(const std::complex<T>& a, const std::complex<T>& b, const std::complex<T>& z,
                                 int winding = 0) {
    cquad v = tricomi_u_q(widen_q(a), widen_q(b), LogPoint::from(widen_q(z), winding));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

// Whittaker M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} 1F1(1/2+mu-kappa; 1+2mu; z).
inline cquad whittaker_m_q(const cquad& kappa, const cquad& mu, const LogPoint& p, double rel = 1e-12) {
    long n;
    cquad b = quad(1) + quad(2) * mu;
    if (detail::near_integer(quad(2) * mu, 1e-8, &n) && n < 0)
        throw Error(ErrorCode::DegenerateParameter, "2 mu is a negative integer");
    cquad m = kummer_m_reg_q(quad(0.5) + mu - kappa, b, p.z, rel);
    return std::exp(-p.z / quad(2) + (mu + quad(0.5)) * p.lz) * gamma_q(b) * m;
}

inline cquad whittaker_w_q(const cquad& kappa, const cquad& mu, const LogPoint& p, double rel = 1e-12) {
    if (detail::near_integer(quad(2) * mu, 1e-8))
        throw Error(ErrorCode::DegenerateParameter, "2 mu is an integer: M_{k,mu} and M_{k,-mu} coincide");
    cquad mp = whittaker_m_q(kappa, mu, p, rel);
    cquad mm = whittaker_m_q(kappa, -mu, p, rel);
    return gamma_q(quad(-2) * mu) * rgamma_q(quad(0.5) - mu - kappa) * mp +
           gamma_q(quad(2) * mu) * rgamma_q(quad(0.5) + mu - kappa) * mm;
}

template <class T>
inline std::complex<T> whittaker_m(const std::complex<T>& kappa, const std::complex<T>& mu,
                                   const std::complex<T>& z, int winding = 0) {
    cquad v = whittaker_m_q(widen_q(kappa), widen_q(mu), LogPoint::from(widen_q(z), winding));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

template <class T>
inline std::complex<T> whittaker_w(const std::complex<T>& kappa, const std::complex<T>& mu,
                                   const std::complex<T>& z, int winding = 0) {
    cquad v = whittaker_w_q(widen_q(kappa), widen_q(mu), LogPoint::from(widen_q(z), winding));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

// J_nu(z) = (z/2)^nu sum_k (-z^2/4)^k / (k! Gamma(nu + k + 1)).
inline SeriesResult bessel_j_series(const cquad& nu, const LogPoint& p) {
    detail::guard_argument(p.z);
    // 0F1(; nu+1; -z^2/4) / Gamma(nu+1) as a Kummer-like series without the a-Pochhammer.
    SeriesResult r;
    KahanSum<quad> S;
    const quad& eps = detail::eps_q();
    cquad w = -p.z * p.z / quad(4);
    cquad b = nu + quad(1);
    long nb;
    int k0 = 0;
    cquad term;
    if (detail::near_integer(b, 1e-24, &nb) && nb <= 0) {
        k0 = static_cast<int>(1 - nb);
        quad fact = 1;
        cquad wp(1, 0);
        for (int j = 0; j < k0; ++j) {
            fact *= quad(j + 1);
            wp *= w;
        }
        term = wp / fact;
    } else {
        term = rgamma_q(b);
    }
    quad absum = 0;
    int small = 0;
    int k = k0;
    for (; k < k0 + MAX_TERMS; ++k) {
        S.add(term);
        quad at = std::abs(term);
        absum += at;
        if (at <= eps * std::abs(S.value()) || at == 0) {
            if (quad(k) * quad(k) > std::abs(w) && ++small >= 2) break;
        } else {
            small = 0;
        }
        term *= w / (quad(k + 1) * (b + quad(k)));
    }
    if (k >= k0 + MAX_TERMS) throw Error(ErrorCode::SeriesNoConvergence, "Bessel series exceeded max_terms");
    static const quad ln2 = log(quad(2));
    cquad pref = std::exp(nu * (p.lz - ln2));
    r.value = pref * S.value();
    r.est_error = to_double(std::abs(pref) * eps * absum * quad(4));
    r.terms_used = k - k0 + 1;
    return r;
}

inline cquad bessel_j_q(const cquad& nu, const LogPoint& p, double rel = 1e-12) {
    SeriesResult r = bessel_j_series(nu, p);
    detail::check_accuracy(r, rel, "bessel_j");
    return r.value;
}

inline cquad bessel_y_q(const cquad& nu, const LogPoint& p, double rel = 1e-12) {
    if (detail::near_integer(nu, 1e-8)) throw Error(ErrorCode::IntegerOrder, "Y_nu needs non-integer order");
    const quad& pi = pi_v<quad>();
    cquad jp = bessel_j_q(nu, p, rel), jm = bessel_j_q(-nu, p, rel);
    return (jp * std::cos(nu * pi) - jm) / std::sin(nu * pi);
}

template <class T>
inline std::complex<T> bessel_j(const std::complex<T>& nu, const std::complex<T>& z, int winding = 0) {
    cquad v = bessel_j_q(widen_q(nu), LogPoint::from(widen_q(z), winding));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

template <class T>
inline std::complex<T> bessel_y(const std::complex<T>& nu, const std::complex<T>& z, int winding = 0) {
    cquad v = bessel_y_q(widen_q(nu), LogPoint::from(widen_q(z), winding));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

namespace detail {

// f(z) = sum 3^k (1/3)_k z^{3k}/(3k)!, g(z) = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!.
inline void airy_fg(const cquad& z, cquad& f, cquad& g, quad& err) {
    KahanSum<quad> F, G;
    const quad& eps = eps_q();
    cquad z3 = z * z * z;
    cquad tf(1, 0), tg = z;
    quad absum = 0;
    int small = 0;
    int k = 0;
    for (; k < MAX_TERMS; ++k) {
        F.add(tf);
        G.add(tg);
        quad at = std::abs(tf) + std::abs(tg);
        absum += at;
        quad as = std::abs(F.value()) + std::abs(G.value());
        if (at <= eps * as) {
            if (quad(3 * k) > std::abs(z) && ++small >= 2) break;
        } else {
            small = 0;
        }
        // ratio of consecutive terms
        tf *= z3 / (quad(3 * k + 2) * quad(3 * k + 3));
        tg *= z3 / (quad(3 * k + 3) * quad(3 * k + 4));
    }
    if (k >= MAX_TERMS) throw Error(ErrorCode::SeriesNoConvergence, "Airy series exceeded max_terms");
    f = F.value();
    g = G.value();
    err = eps * absum * quad(4);
}

inline const quad& airy_c1() {
    // Ai(0) = 3^{-2/3} / Gamma(2/3)
    static const quad v = pow(quad(3), quad(-2) / 3) / gamma_q(cquad(quad(2) / 3, 0)).real();
    return v;
}
inline const quad& airy_c2() {
    // -Ai'(0) = 3^{-1/3} / Gamma(1/3)
    static const quad v = pow(quad(3), quad(-1) / 3) / gamma_q(cquad(quad(1) / 3, 0)).real();
    return v;
}

}  // namespace detail

inline cquad airy_ai_q(const cquad& z, double rel = 1e-12) {
    detail::guard_argument(z);
    cquad f, g;
    quad err;
    detail::airy_fg(z, f, g, err);
    cquad v = detail::airy_c1() * f - detail::airy_c2() * g;
    SeriesResult r{v, to_double(err * detail::airy_c1()), 0};
    detail::check_accuracy(r, rel, "airy_ai");
    return v;
}

inline cquad airy_bi_q(const cquad& z, double rel = 1e-12) {
    detail::guard_argument(z);
    cquad f, g;
    quad err;
    detail::airy_fg(z, f, g, err);
    static const quad s3 = sqrt(quad(3));
    cquad v = s3 * (detail::airy_c1() * f + detail::airy_c2() * g);
    SeriesResult r{v, to_double(err * detail::airy_c1() * s3), 0};
    detail::check_accuracy(r, rel, "airy_bi");
    return v;
}

template <class T>
inline std::complex<T> airy_ai(const std::complex<T>& z) {
    cquad v = airy_ai_q(widen_q(z));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

template <class T>
inline std::complex<T> airy_bi(const std::complex<T>& z) {
    cquad v = airy_bi_q(widen_q(z));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

// Parabolic cylinder D_nu(z) from its even/odd Kummer pair.
inline cquad pcf_d_q(const cquad& nu, const cquad& z, double rel = 1e-12) {
    detail::guard_argument(z);
    static const quad sqrt_pi = sqrt(pi_v<quad>());
    static const quad sqrt_2pi = sqrt(quad(2) * pi_v<quad>());
    static const quad ln2 = log(quad(2));
    cquad x = z * z / quad(2);
    if (std::abs(to_double(x)) > Z_MAX)
        throw Error(ErrorCode::ArgumentOutOfRange, "pcf_d: z^2/2 exceeds Z_max");
    // M(a, 1/2, x) = Gamma(1/2) Mreg, M(a, 3/2, x) = Gamma(3/2) Mreg
    cquad me = kummer_m_reg_q(-nu / quad(2), cquad(0.5, 0), x, rel) * sqrt_pi;
    cquad mo = kummer_m_reg_q((quad(1) - nu) / quad(2), cquad(1.5, 0), x, rel) * (sqrt_pi / quad(2));
    cquad pre = std::exp(nu * ln2 / quad(2) - z * z / quad(4));
    return pre * (sqrt_pi * rgamma_q((quad(1) - nu) / quad(2)) * me - sqrt_2pi * z * rgamma_q(-nu / quad(2)) * mo);
}

template <class T>
inline std::complex<T> pcf_d(const std::complex<T>& nu, const std::complex<T>& z) {
    cquad v = pcf_d_q(widen_q(nu), widen_q(z));
    if constexpr (is_quad_v<T>) {
        return v;
    } else {
        return to_double(v);
    }
}

}  // namespace nhfloquet::specfun
