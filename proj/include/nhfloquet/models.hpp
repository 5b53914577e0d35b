#pragma once

#include "core_algebra.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace nhfloquet {

// f(t) = sum_n coeff(n) e^{i n omega t}, plus a scalar trace term f0.
struct DriveSpec {
    double omega = 1.0;
    cplx f0{0, 0};
    std::map<int, Complex3> harmonics;

    double period() const { return 2 * std::acos(-1.0) / omega; }
    Complex3 coeff(int n) const {
        auto it = harmonics.find(n);
        return it == harmonics.end() ? Complex3{} : it->second;
    }
};

template <class T>
inline Vec3<T> f_at(const DriveSpec& spec, const T& t) {
    Vec3<T> f;
    if (spec.harmonics.empty()) return f;
    int nmin = spec.harmonics.begin()->first;
    std::complex<T> Z = cis(T(spec.omega) * t);
    std::complex<T> Zi = std::conj(Z);
    std::complex<T> pw = std::complex<T>(1, 0);
    // Walk powers from the lowest index upwards.
    int n = std::min(nmin, 0);
    for (int k = 0; k > n; --k) pw *= Zi;
    for (auto it = spec.harmonics.begin(); it != spec.harmonics.end(); ++it) {
        while (n < it->first) {
            pw *= Z;
            ++n;
        }
        f += pw * widen<T>(it->second);
    }
    return f;
}

inline Complex3 f_at(const DriveSpec& spec, double t) { return f_at<double>(spec, t); }

inline DriveSpec model_constant(const Complex3& p) {
    DriveSpec s;
    s.omega = 1.0;
    s.harmonics[0] = p;
    return s;
}

inline DriveSpec model_single_frequency(const Complex3& p, double omega) {
    DriveSpec s;
    s.omega = omega;
    s.harmonics[1] = p;
    return s;
}

inline DriveSpec model_h01(const Complex3& p, const Complex3& q, double omega) {
    DriveSpec s;
    s.omega = omega;
    s.harmonics[0] = p;
    s.harmonics[1] = q;
    return s;
}

inline DriveSpec model_ucf(cplx r, cplx rho, double omega) {
    const cplx i(0, 1);
    return model_h01({-1.0, 0.0, i * r}, {0.0, 0.0, -i * rho}, omega);
}

inline DriveSpec model_berry_uzdin(cplx r, cplx rho, double omega) {
    const cplx i(0, 1);
    return model_h01({i * (1.0 - r) / 2.0, -(1.0 + r) / 2.0, 0.0}, {i * rho / 2.0, rho / 2.0, 0.0}, omega);
}

inline DriveSpec model_h12(const Complex3& p, const Complex3& q, double omega) {
    DriveSpec s;
    s.omega = omega;
    s.harmonics[1] = p;
    s.harmonics[2] = q;
    return s;
}

inline DriveSpec model_airy(const Complex3& p, cplx q1, double omega) {
    const cplx i(0, 1);
    return model_h12(p, {q1, -i * q1, 0.0}, omega);
}

inline DriveSpec model_h1m1(const Complex3& p, const Complex3& q, double omega) {
    DriveSpec s;
    s.omega = omega;
    s.harmonics[-1] = p;
    s.harmonics[1] = q;
    return s;
}

// p + q e^{i m omega t} + s e^{i n omega t}.
inline DriveSpec model_appB(const Complex3& s, const Complex3& p, const Complex3& q, int m, int n, double omega) {
    DriveSpec d;
    d.omega = omega;
    d.harmonics[0] += p;
    d.harmonics[m] += q;
    d.harmonics[n] += s;
    return d;
}

// s e^{-i omega t} + p + q e^{i omega t}.
inline DriveSpec model_appB_m101(const Complex3& s, const Complex3& p, const Complex3& q, double omega) {
    return model_appB(s, p, q, 1, -1, omega);
}

// s + p e^{i omega t} + q e^{2 i omega t}.
inline DriveSpec model_appB_012(const Complex3& s, const Complex3& p, const Complex3& q, double omega) {
    DriveSpec d;
    d.omega = omega;
    d.harmonics[0] = s;
    d.harmonics[1] = p;
    d.harmonics[2] = q;
    return d;
}

// The pair h1 (three harmonics) and h2 (constant plus one harmonic) built
// from (u1, u3, v1, v2, v3). h2 is returned with p3 shifted by omega/2 so
// that U_h1(t) = exp(i omega t sigma3 / 2) U_h2(t) holds exactly.
struct GaugePair {
    DriveSpec h1, h2;
};

inline GaugePair appB_gauge_pair(cplx u1, cplx u3, cplx v1, cplx v2, cplx v3, double omega) {
    const cplx i(0, 1);
    Complex3 p{u1 / 2.0, -i * u1 / 2.0, u3};
    Complex3 q{v1 / 2.0, i * v1 / 2.0, v3};
    Complex3 s{v2 / 2.0, -i * v2 / 2.0, 0.0};
    GaugePair g;
    g.h1 = model_appB_m101(s, p, q, omega);
    Complex3 p2{(v1 + v2) / 2.0, i * (v1 - v2) / 2.0, u3 + omega / 2.0};
    Complex3 q2{u1 / 2.0, -i * u1 / 2.0, v3};
    g.h2 = model_h01(p2, q2, omega);
    return g;
}

enum class SolvableFamily {
    Constant,
    SingleFrequency,
    CaseA_Whittaker,
    CaseA_Bessel_pq0,
    CaseA_Bessel_qq0,
    CaseA_Exponential,
    CaseB_Kummer,
    CaseB_Bessel_q30,
    H12_ParabolicCylinder,
    H12_Airy,
    H1m1_Bessel,
    H1m1_Power,
    AppB_m101_Whittaker,
    AppB_012_Kummer,
    AppB_012_Bessel,
    NotSolvable,
};

inline const char* family_name(SolvableFamily f) {
    switch (f) {
        case SolvableFamily::Constant: return "Constant";
        case SolvableFamily::SingleFrequency: return "SingleFrequency";
        case SolvableFamily::CaseA_Whittaker: return "CaseA_Whittaker";
        case SolvableFamily::CaseA_Bessel_pq0: return "CaseA_Bessel_pq0";
        case SolvableFamily::CaseA_Bessel_qq0: return "CaseA_Bessel_qq0";
        case SolvableFamily::CaseA_Exponential: return "CaseA_Exponential";
        case SolvableFamily::CaseB_Kummer: return "CaseB_Kummer";
        case SolvableFamily::CaseB_Bessel_q30: return "CaseB_Bessel_q30";
        case SolvableFamily::H12_ParabolicCylinder: return "H12_ParabolicCylinder";
        case SolvableFamily::H12_Airy: return "H12_Airy";
        case SolvableFamily::H1m1_Bessel: return "H1m1_Bessel";
        case SolvableFamily::H1m1_Power: return "H1m1_Power";
        case SolvableFamily::AppB_m101_Whittaker: return "AppB_m101_Whittaker";
        case SolvableFamily::AppB_012_Kummer: return "AppB_012_Kummer";
        case SolvableFamily::AppB_012_Bessel: return "AppB_012_Bessel";
        case SolvableFamily::NotSolvable: return "NotSolvable";
    }
    return "Unknown";
}

// Family tag plus the parameters of its change of variables. The variable
// Z = e^{i omega t} uses the rescaled omega (harmonic indices divided by
// their gcd). For the Bessel sub-cases with a half-power the argument is
// zk * Z^{1/2}; otherwise it is zk * (Z + z0). Parameters are computed in
// the scalar type T; the drive coefficients themselves stay double.
template <class T>
struct FamilyInfoT {
    using C = std::complex<T>;
    SolvableFamily family = SolvableFamily::NotSolvable;
    double omega = 1.0;
    int scale = 1;
    Complex3 s, p, q;
    C kappa{0, 0}, mu{0, 0}, nu{0, 0};
    C a{0, 0}, b{0, 0}, c{0, 0};
    C zk{0, 0}, z0{0, 0};
    bool half_power = false;
};

using FamilyInfo = FamilyInfoT<double>;

inline constexpr double kZeroTol = 1e-10;

namespace detail {
inline bool is_zero(cplx x) { return std::abs(x) < kZeroTol; }
inline bool is_zero(const Complex3& v) { return norm(v) < kZeroTol; }
}  // namespace detail

template <class T = double>
inline FamilyInfoT<T> classify_solvable(const DriveSpec& spec) {
    using detail::is_zero;
    using C = std::complex<T>;
    using std::pow;
    using std::sqrt;
    const C i(0, 1);
    FamilyInfoT<T> info;
    std::map<int, Complex3> h;
    for (auto& [n, v] : spec.harmonics)
        if (!is_zero(v)) h[n] = v;
    if (h.size() > 3) return info;
    int g = 0;
    for (auto& kv : h) g = std::gcd(g, std::abs(kv.first));
    if (g == 0) g = 1;
    std::map<int, Complex3> hr;
    for (auto& [n, v] : h) hr[n / g] = v;
    info.scale = g;
    info.omega = spec.omega * g;
    const T w = T(spec.omega) * T(g);
    const T one = 1, two = 2, half = T(1) / 2;
    auto wd = [](const Complex3& v) { return widen<T>(v); };
    std::vector<int> key;
    for (auto& kv : hr) key.push_back(kv.first);

    if (key.empty() || key == std::vector<int>{0}) {
        info.family = SolvableFamily::Constant;
        info.p = key.empty() ? Complex3{} : hr[0];
        auto P = wd(info.p);
        info.c = sqrt(cdot(P, P));
        return info;
    }
    if (key.size() == 1 && key[0] == 1) {
        info.family = SolvableFamily::SingleFrequency;
        info.p = hr[1];
        auto P = wd(info.p);
        info.c = sqrt(cdot(P, P)) / w;
        return info;
    }
    if (key == std::vector<int>{0, 1}) {
        info.p = hr[0];
        info.q = hr[1];
        const Complex3 &p = info.p, &q = info.q;
        auto P = wd(p), Q = wd(q);
        C pq = cdot(P, Q), qq = cdot(Q, Q), pp = cdot(P, P);
        cplx pqd = cdot(p, q), qqd = cdot(q, q);
        if (is_zero(p.upper()) && !is_zero(q.upper())) {
            if (!is_zero(qqd) && !is_zero(pqd)) {
                info.family = SolvableFamily::CaseA_Whittaker;
                C sq = sqrt(qq);
                info.zk = two * sq / w;
                info.kappa = -pq / (w * sq);
                info.mu = half + P.f3 / w;
            } else if (!is_zero(qqd)) {
                info.family = SolvableFamily::CaseA_Bessel_pq0;
                info.zk = i * sqrt(qq) / w;
                info.nu = half + P.f3 / w;
            } else if (!is_zero(pqd)) {
                info.family = SolvableFamily::CaseA_Bessel_qq0;
                info.zk = two * i * sqrt(two * pq) / w;
                info.nu = one + two * P.f3 / w;
                info.half_power = true;
            } else {
                info.family = SolvableFamily::CaseA_Exponential;
            }
            return info;
        }
        if (is_zero(q.upper()) && !is_zero(p.upper())) {
            C sp = sqrt(pp);
            info.c = sp / w;
            if (!is_zero(q.f3)) {
                info.family = SolvableFamily::CaseB_Kummer;
                info.zk = two * Q.f3 / w;
                info.a = (pq / Q.f3 + sp) / w;
                info.b = one + two * info.c;
            } else if (!is_zero(pqd)) {
                info.family = SolvableFamily::CaseB_Bessel_q30;
                info.zk = two * i * sqrt(two * pq) / w;
                info.nu = two * info.c;
                info.half_power = true;
            }
        }
        return info;
    }
    if (key == std::vector<int>{1, 2}) {
        info.p = hr[1];
        info.q = hr[2];
        const Complex3 &p = info.p, &q = info.q;
        auto P = wd(p), Q = wd(q);
        C pq = cdot(P, Q), pp = cdot(P, P);
        if (is_zero(q.upper()) && !is_zero(p.upper())) {
            if (!is_zero(q.f3)) {
                info.family = SolvableFamily::H12_ParabolicCylinder;
                C q3 = Q.f3;
                info.zk = sqrt(two * q3 / w);
                info.z0 = pq / (q3 * q3);
                info.nu = pq * pq / (two * w * q3 * q3 * q3) - pp / (two * w * q3);
            } else if (!is_zero(cdot(p, q))) {
                info.family = SolvableFamily::H12_Airy;
                info.zk = pow(two * pq, one / T(3)) * pow(w, -two / T(3));
                info.z0 = pp / (two * pq);
            }
        }
        return info;
    }
    if (key == std::vector<int>{-1, 1}) {
        info.p = hr[-1];
        info.q = hr[1];
        const Complex3 &p = info.p, &q = info.q;
        auto P = wd(p), Q = wd(q);
        C pq = cdot(P, Q), qq = cdot(Q, Q);
        if (is_zero(p.upper()) && is_zero(p.f3) && !is_zero(q.upper())) {
            info.nu = sqrt(two * pq / (w * w) + T(1) / 4);
            if (!is_zero(cdot(q, q))) {
                info.family = SolvableFamily::H1m1_Bessel;
                info.zk = i * sqrt(qq) / w;
            } else {
                info.family = SolvableFamily::H1m1_Power;
            }
        }
        return info;
    }
    if (key == std::vector<int>{-1, 0, 1}) {
        info.s = hr[-1];
        info.p = hr[0];
        info.q = hr[1];
        const Complex3 &s = info.s, &p = info.p, &q = info.q;
        auto S = wd(s), P = wd(p), Q = wd(q);
        C pq = cdot(P, Q), qq = cdot(Q, Q), qs = cdot(Q, S);
        if (is_zero(s.upper()) && is_zero(s.f3) && is_zero(p.upper()) && !is_zero(q.upper()) &&
            !is_zero(cdot(q, q)) && !is_zero(cdot(p, q))) {
            info.family = SolvableFamily::AppB_m101_Whittaker;
            C sq = sqrt(qq);
            info.zk = two * sq / w;
            info.kappa = -pq / (w * sq);
            C t = two * P.f3 + w;
            info.mu = sqrt(t * t + T(8) * qs) / (two * w);
        }
        return info;
    }
    if (key == std::vector<int>{0, 1, 2}) {
        info.s = hr[0];
        info.p = hr[1];
        info.q = hr[2];
        const Complex3 &s = info.s, &p = info.p, &q = info.q;
        auto S = wd(s), P = wd(p), Q = wd(q);
        if (is_zero(q.upper()) && is_zero(q.f3) && is_zero(p.upper()) && !is_zero(s.upper())) {
            C ss = cdot(S, S), ps = cdot(P, S), qs = cdot(Q, S);
            C A2 = P.f3 * P.f3 + two * qs;
            C sig = sqrt(ss) / w;
            info.c = sig;
            cplx A2d = p.f3 * p.f3 + 2.0 * cdot(q, s);
            if (!is_zero(A2d)) {
                info.family = SolvableFamily::AppB_012_Kummer;
                C sA = sqrt(A2);
                info.zk = two * sA / w;
                info.b = one + two * sig;
                info.a = half - P.f3 / (two * sA) + (sqrt(ss) + ps / sA) / w;
            } else {
                C beta = two * ps - w * P.f3;
                cplx betad = 2.0 * cdot(p, s) - info.omega * p.f3;
                if (!is_zero(betad)) {
                    info.family = SolvableFamily::AppB_012_Bessel;
                    info.zk = two * i * sqrt(beta) / w;
                    info.nu = two * sig;
                    info.half_power = true;
                }
            }
        }
        return info;
    }
    return info;
}

}  // namespace nhfloquet
