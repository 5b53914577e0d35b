#pragma once

// Closed-form solutions of the solvable families. Each family reduces the
// upper amplitude a(t) to a special function of z(t); the lower amplitude
// follows from b = alpha a + beta adot. Functions are evaluated in
// binary128 along a continuous log z, so the basis carries its monodromy.

#include "models.hpp"
#include "propagator.hpp"
#include "specfun.hpp"

#include <array>
#include <utility>

namespace nhfloquet {

enum class BasisIndex { First, Second };

// Analytic Floquet eigenphases over the model period 2 pi / omega, first
// entry for the basis function labelled "plus". Unsolvable specs throw.
inline std::pair<cplx, cplx> analytic_eigenphases(const DriveSpec& spec) {
    FamilyInfo fi = classify_solvable(spec);
    const double tp = 2 * std::acos(-1.0);
    const double w = fi.omega;
    const double g = fi.scale;
    const double T = spec.period();
    cplx ph{0, 0};
    switch (fi.family) {
        case SolvableFamily::Constant: ph = -fi.c * T; break;
        case SolvableFamily::SingleFrequency:
        case SolvableFamily::H12_ParabolicCylinder:
        case SolvableFamily::H12_Airy: ph = 0; break;
        case SolvableFamily::CaseA_Whittaker:
        case SolvableFamily::CaseA_Bessel_pq0:
        case SolvableFamily::CaseA_Bessel_qq0:
        case SolvableFamily::CaseA_Exponential: ph = g * tp * fi.p.f3 / w; break;
        case SolvableFamily::CaseB_Kummer:
        case SolvableFamily::CaseB_Bessel_q30:
        case SolvableFamily::AppB_012_Kummer:
        case SolvableFamily::AppB_012_Bessel: ph = g * tp * fi.c; break;
        case SolvableFamily::H1m1_Bessel:
        case SolvableFamily::H1m1_Power: ph = g * (tp / 2 + tp * fi.nu); break;
        case SolvableFamily::AppB_m101_Whittaker: ph = g * (tp / 2 + tp * fi.mu); break;
        case SolvableFamily::NotSolvable:
            throw Error(ErrorCode::UnsupportedFamily, "no closed-form Floquet exponents for this drive");
    }
    cplx shift = -spec.f0 * T;
    return {ph + shift, -ph + shift};
}

// Pair of independent solutions y1, y2 of the family's a-equation. For
// families with nontrivial monodromy y1 and y2 are the Floquet solutions
// with eigenphase +phi and -phi. For U(T) = 1 families they are:
// SingleFrequency e^{+-(sqrt(pp)/omega)(1 - Z)}, PCF D_nu(+-z), Airy Ai/Bi.
class AnalyticBasis {
public:
    explicit AnalyticBasis(const DriveSpec& spec) : spec_(spec), fi_(classify_solvable<quad>(spec)) {
        if (fi_.family == SolvableFamily::NotSolvable)
            throw Error(ErrorCode::UnsupportedFamily, "drive does not match a solvable family");
        if (needs_log()) lzk_ = std::log(fi_.zk);
        w_ = quad(fi_.omega);
    }

    const FamilyInfoT<quad>& info() const { return fi_; }

    // Upper amplitude without the f0 gauge factor.
    cquad a(const quad& t, BasisIndex which) const {
        const cquad i(0, 1);
        const bool first = which == BasisIndex::First;
        const quad sgn = first ? quad(1) : quad(-1);
        using namespace specfun;
        switch (fi_.family) {
            case SolvableFamily::Constant: {
                cquad E = fi_.c;
                return std::exp(-sgn * i * E * t);
            }
            case SolvableFamily::SingleFrequency: {
                cquad c = fi_.c;
                cquad Z = cis(w_ * t);
                return std::exp(sgn * c * (quad(1) - Z));
            }
            case SolvableFamily::CaseA_Whittaker:
            case SolvableFamily::AppB_m101_Whittaker: {
                LogPoint p = point(t);
                return whittaker_m_q(fi_.kappa, sgn * fi_.mu, p, kRel);
            }
            case SolvableFamily::CaseA_Bessel_pq0:
            case SolvableFamily::H1m1_Bessel: {
                LogPoint p = point(t);
                return std::exp(p.lz / quad(2)) * bessel_j_q(sgn * fi_.nu, p, kRel);
            }
            case SolvableFamily::CaseA_Bessel_qq0: {
                LogPoint p = point(t);
                return p.z * bessel_j_q(sgn * fi_.nu, p, kRel);
            }
            case SolvableFamily::CaseA_Exponential: {
                cquad p3 = widen_q(fi_.p.f3);
                return first ? std::exp(i * (w_ + p3) * t) : std::exp(-i * p3 * t);
            }
            case SolvableFamily::CaseB_Kummer:
            case SolvableFamily::AppB_012_Kummer: {
                LogPoint p = point(t);
                cquad A = fi_.a, B = fi_.b, c = fi_.c;
                if (first) return std::exp(-p.z / quad(2) + c * p.lz) * kummer_m_reg_q(A, B, p.z, kRel);
                return std::exp(-p.z / quad(2) - c * p.lz) *
                       kummer_m_reg_q(A - B + quad(1), quad(2) - B, p.z, kRel);
            }
            case SolvableFamily::CaseB_Bessel_q30:
            case SolvableFamily::AppB_012_Bessel: {
                LogPoint p = point(t);
                return bessel_j_q(sgn * fi_.nu, p, kRel);
            }
            case SolvableFamily::H12_ParabolicCylinder: {
                cquad z = zk_q() * (cis(w_ * t) + fi_.z0);
                return pcf_d_q(fi_.nu, sgn * z, kRel);
            }
            case SolvableFamily::H12_Airy: {
                cquad z = zk_q() * (cis(w_ * t) + fi_.z0);
                return first ? airy_ai_q(z, kRel) : airy_bi_q(z, kRel);
            }
            case SolvableFamily::H1m1_Power: {
                cquad nu = fi_.nu;
                return std::exp((quad(0.5) + sgn * nu) * i * w_ * t);
            }
            case SolvableFamily::NotSolvable: break;
        }
        throw Error(ErrorCode::UnsupportedFamily, "no analytic basis");
    }

    // Time derivative by a sixth-order central difference in binary128.
    cquad adot(const quad& t, BasisIndex which) const {
        const quad h = step();
        cquad d1 = a(t + h, which) - a(t - h, which);
        cquad d2 = a(t + 2 * h, which) - a(t - 2 * h, which);
        cquad d3 = a(t + 3 * h, which) - a(t - 3 * h, which);
        return (quad(45) * d1 - quad(9) * d2 + d3) / (quad(60) * h);
    }

    // Full two-component state, including the e^{-i f0 t} gauge factor.
    State<quad> state(const quad& t, BasisIndex which) const {
        cquad av = a(t, which);
        cquad ad = adot(t, which);
        cquad b = b_from_a<quad>(spec_, av, ad, t);
        cquad g = std::exp(cquad(0, -1) * widen_q(spec_.f0) * t);
        return {g * av, g * b};
    }

    State<double> state_d(double t, BasisIndex which) const {
        State<quad> s = state(quad(t), which);
        return {to_double(s.a), to_double(s.b)};
    }

private:
    static constexpr double kRel = 1e-6;

    bool needs_log() const {
        switch (fi_.family) {
            case SolvableFamily::CaseA_Whittaker:
            case SolvableFamily::AppB_m101_Whittaker:
            case SolvableFamily::CaseA_Bessel_pq0:
            case SolvableFamily::H1m1_Bessel:
            case SolvableFamily::CaseA_Bessel_qq0:
            case SolvableFamily::CaseB_Kummer:
            case SolvableFamily::AppB_012_Kummer:
            case SolvableFamily::CaseB_Bessel_q30:
            case SolvableFamily::AppB_012_Bessel: return true;
            default: return false;
        }
    }

    cquad zk_q() const { return fi_.zk; }

    // z(t) with log z continued from t = 0.
    specfun::LogPoint point(const quad& t) const {
        quad frac = fi_.half_power ? quad(0.5) : quad(1);
        return specfun::LogPoint::from_log(lzk_ + cquad(0, 1) * frac * w_ * t);
    }

    quad step() const {
        double sc = std::max({1.0, fi_.omega, norm(spec_.coeff(0)) + norm(spec_.coeff(1)) + norm(spec_.coeff(2)) +
                                               norm(spec_.coeff(-1))});
        return quad(1e-4 / sc);
    }

    DriveSpec spec_;
    FamilyInfoT<quad> fi_;
    cquad lzk_{0, 0};
    quad w_{1};
};

}  // namespace nhfloquet
