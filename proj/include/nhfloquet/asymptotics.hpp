#pragma once

// Leading-order WKB exponent g(theta) of the upper amplitude, its sign
// structure on the unit circle, and everything built on it: Stokes
// crossings, hop prediction, numerical hop detection on trajectories,
// tangency solves, phase-diagram sweeps and bifurcation scans.
//
// With x = e^{i theta}, a(t) ~ exp(+-g(omega t)/omega) where
//   g = integral of sqrt(P(x)) x^{-w} dx,   P(x) = x^{2 nmin} (f.f)(x),  w = 1 - nmin.
// g is anchored at the turning point closest to the unit circle (in |log|x||),
// continued radially onto the circle and then counterclockwise with the
// square root and all logarithms kept continuous.

#include "analytic.hpp"
#include "core_algebra.hpp"
#include "floquet.hpp"
#include "models.hpp"
#include "propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace nhfloquet {

enum class ExponentKind { Quadratic01, Quadratic12, QuarticOverX2, QuarticOverX, NumericQuadrature };

inline const char* kind_name(ExponentKind k) {
    switch (k) {
        case ExponentKind::Quadratic01: return "Quadratic01";
        case ExponentKind::Quadratic12: return "Quadratic12";
        case ExponentKind::QuarticOverX2: return "QuarticOverX2";
        case ExponentKind::QuarticOverX: return "QuarticOverX";
        case ExponentKind::NumericQuadrature: return "NumericQuadrature";
    }
    return "Unknown";
}

struct ExponentForm {
    ExponentKind kind = ExponentKind::NumericQuadrature;
    std::vector<cplx> poly;  // P(x), ascending powers
    int weight = 1;          // integrand sqrt(P) x^{-weight}

    cplx coeff(std::size_t k) const { return k < poly.size() ? poly[k] : cplx(0, 0); }
    // Quadratic kinds: a, b, c.
    cplx a() const { return coeff(0); }
    cplx b() const { return coeff(1); }
    cplx c() const { return coeff(2); }
};

inline ExponentForm quadratic01(cplx a, cplx b, cplx c) { return {ExponentKind::Quadratic01, {a, b, c}, 1}; }
inline ExponentForm quadratic12(cplx a, cplx b, cplx c) { return {ExponentKind::Quadratic12, {a, b, c}, 0}; }

inline ExponentForm exponent_form(const DriveSpec& spec) {
    std::map<int, Complex3> h;
    for (auto& [n, v] : spec.harmonics)
        if (norm(v) > kZeroTol) h[n] = v;
    if (h.empty()) throw Error(ErrorCode::UnsupportedHarmonics, "drive has no nonzero harmonics");
    int nmin = h.begin()->first, nmax = h.rbegin()->first;
    if (2 * (nmax - nmin) > 8) throw Error(ErrorCode::UnsupportedHarmonics, "harmonic span too wide for the exponent");
    // (f.f)(x) = sum_{m,n} f_m.f_n x^{m+n}, shifted by x^{-2 nmin}
    std::vector<cplx> P(2 * (nmax - nmin) + 1, cplx(0, 0));
    for (auto& [m, fm] : h)
        for (auto& [n, fn] : h) P[m + n - 2 * nmin] += cdot(fm, fn);
    while (P.size() > 1 && std::abs(P.back()) == 0.0) P.pop_back();
    ExponentForm F;
    F.poly = P;
    F.weight = 1 - nmin;
    std::vector<int> key;
    for (auto& kv : h) key.push_back(kv.first);
    F.poly.resize(std::max<std::size_t>(F.poly.size(), 3), cplx(0, 0));
    if (key == std::vector<int>{0, 1} || key == std::vector<int>{0}) {
        F.kind = ExponentKind::Quadratic01;
    } else if (key == std::vector<int>{1, 2} || key == std::vector<int>{2}) {
        F.kind = ExponentKind::Quadratic12;
        F.poly.resize(3);
    } else if (key == std::vector<int>{-1, 1} || key == std::vector<int>{-1, 0, 1}) {
        F.kind = ExponentKind::QuarticOverX2;
    } else if (key == std::vector<int>{0, 1, 2}) {
        F.kind = ExponentKind::QuarticOverX;
    } else {
        F.kind = ExponentKind::NumericQuadrature;
    }
    if (F.kind == ExponentKind::Quadratic01) F.poly.resize(3);
    return F;
}

// Roots of an ascending-coefficient polynomial (Durand-Kerner, Newton polish).
inline std::vector<cplx> poly_roots(std::vector<cplx> c) {
    double scale = 0;
    for (auto& x : c) scale = std::max(scale, std::abs(x));
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
    int n = static_cast<int>(c.size()) - 1;
    std::vector<cplx> roots;
    if (n <= 0) return roots;
    std::vector<cplx> m(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) m[k] = c[k] / c.back();
    auto eval = [&](cplx x, cplx* d) {
        cplx p = m[n], dp = 0;
        for (int k = n - 1; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + m[k];
        }
        if (d) *d = dp;
        return p;
    };
    if (n == 1) return {-m[0]};
    if (n == 2) {
        cplx disc = std::sqrt(m[1] * m[1] - 4.0 * m[0]);
        cplx r1 = (-m[1] + disc) / 2.0, r2 = (-m[1] - disc) / 2.0;
        // avoid cancellation
        if (std::abs(r1) < std::abs(r2)) std::swap(r1, r2);
        if (r1 != 0.0) r2 = m[0] / r1;
        return {r1, r2};
    }
    double R = 0;
    for (int k = 0; k < n; ++k) R = std::max(R, std::pow(std::abs(m[k]), 1.0 / (n - k)));
    R = 2 * R + 1e-3;
    roots.resize(n);
    for (int k = 0; k < n; ++k) roots[k] = R * std::polar(1.0, 2 * M_PI * k / n + 0.4);
    for (int it = 0; it < 500; ++it) {
        double delta = 0;
        for (int k = 0; k < n; ++k) {
            cplx den = 1;
            for (int j = 0; j < n; ++j)
                if (j != k) den *= roots[k] - roots[j];
            cplx step = eval(roots[k], nullptr) / den;
            roots[k] -= step;
            delta = std::max(delta, std::abs(step) / (1 + std::abs(roots[k])));
        }
        if (delta < 1e-15) break;
    }
    for (auto& r : roots) {
        for (int it = 0; it < 3; ++it) {
            cplx d;
            cplx p = eval(r, &d);
            if (d != 0.0) r -= p / d;
        }
    }
    return roots;
}

namespace detail {

struct GK15 {
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

inline cplx poly_eval(const std::vector<cplx>& c, cplx x) {
    cplx p = 0;
    for (std::size_t k = c.size(); k-- > 0;) p = p * x + c[k];
    return p;
}

inline cplx nearest_sign(cplx s, cplx ref) { return std::abs(s - ref) <= std::abs(s + ref) ? s : -s; }

inline cplx unwrap_log(cplx principal, cplx ref) {
    const double tp = 2 * M_PI;
    double k = std::round((ref.imag() - principal.imag()) / tp);
    return principal + cplx(0, k * tp);
}

}  // namespace detail

// Branch-continuous critical exponent on the unit circle.
class CriticalExponent {
public:
    enum class Method { Auto, ClosedForm, Quadrature };

    explicit CriticalExponent(const ExponentForm& form, Method method = Method::Auto, int nodes = 4096,
                              double quad_tol = 1e-13)
        : F_(form), N_(nodes), tol_(quad_tol) {
        closed_ = (method == Method::ClosedForm || method == Method::Auto) && has_closed_form(form);
        if (method == Method::ClosedForm && !closed_)
            throw Error(ErrorCode::UnsupportedHarmonics, "no closed form for this exponent kind");
        scale_ = 0;
        for (auto& c : F_.poly) scale_ = std::max(scale_, std::abs(c));
        if (scale_ == 0) scale_ = 1;
        sa_ = std::sqrt(F_.a());
        sc_ = std::sqrt(F_.c());
        choose_anchor();
        build();
    }

    const ExponentForm& form() const { return F_; }
    bool closed_form() const { return closed_; }
    bool has_anchor() const { return anchored_; }
    cplx anchor() const { return x0_; }
    double theta0() const { return th0_; }
    const std::vector<cplx>& roots() const { return roots_; }
    // Roots strictly inside the unit disk (x = 0 excluded).
    int roots_inside() const {
        int n = 0;
        for (auto& r : roots_)
            if (std::abs(r) < 1 && std::abs(r) > 1e-12) ++n;
        return n;
    }
    int nodes() const { return N_; }
    double node_theta(int k) const { return th0_ + step_ * k; }
    cplx node_value(int k) const { return nodes_[k + 1].g; }
    cplx node_sqrt(int k) const { return nodes_[k + 1].br.s; }

    // g at angle theta, continued from theta0 counterclockwise; theta is
    // reduced into [theta0, theta0 + 2 pi).
    cplx operator()(double theta) const {
        double u = reduce(theta);
        int k = static_cast<int>(std::floor((u - th0_) / step_ + 0.5));
        k = std::clamp(k, -1, N_);
        const Node& nd = nodes_[k + 1];
        double thk = node_theta(k);
        if (theta_eq(u, thk)) return nd.g;
        return closed_ ? closed_at(u, nd, thk) : nd.g + arc_integral(thk, u, nd.br.s);
    }

    // d/dtheta Re g = -Im sqrt(P(x)) x^{1-w} at the continued branch.
    double d_re_g(double theta) const {
        double u = reduce(theta);
        int k = std::clamp(static_cast<int>(std::floor((u - th0_) / step_ + 0.5)), -1, N_);
        const Node& nd = nodes_[k + 1];
        cplx s = track_sqrt(node_theta(k), nd.br.s, u);
        cplx x = std::polar(1.0, u);
        return (cplx(0, 1) * s * std::pow(x, 1 - F_.weight)).real();
    }

    double scale() const { return gscale_; }

private:
    struct Branches {
        cplx s{0, 0}, L1{0, 0}, L2{0, 0};
    };
    struct Node {
        Branches br;
        cplx g{0, 0};
    };

    static bool has_closed_form(const ExponentForm& f) {
        return f.kind == ExponentKind::Quadratic01 || f.kind == ExponentKind::Quadratic12;
    }

    bool is_small(cplx v) const { return std::abs(v) <= 1e-13 * scale_; }

    static bool theta_eq(double a, double b) { return std::abs(a - b) < 1e-15; }

    double reduce(double theta) const {
        const double tp = 2 * M_PI;
        double u = th0_ + std::fmod(theta - th0_, tp);
        if (u < th0_) u += tp;
        return u;
    }

    void choose_anchor() {
        roots_ = poly_roots(F_.poly);
        anchored_ = false;
        double best = 1e300, best_arg = 1e300;
        for (auto& r : roots_) {
            double m = std::abs(r);
            if (m < 1e-12) continue;
            if (std::abs(m - 1) < 1e-10)
                throw Error(ErrorCode::BranchPointOnCircle, "turning point on the unit circle");
            double d = std::abs(std::log(m));
            double ar = std::arg(r);
            if (ar < 0) ar += 2 * M_PI;
            if (d < best - 1e-12 || (std::abs(d - best) <= 1e-12 && ar < best_arg)) {
                best = d;
                best_arg = ar;
                x0_ = r;
                anchored_ = true;
            }
        }
        th0_ = anchored_ ? std::arg(x0_) : 0.0;
        if (th0_ < 0) th0_ += 2 * M_PI;
        step_ = 2 * M_PI / N_;
    }

    cplx sqrtP(cplx x) const { return std::sqrt(detail::poly_eval(F_.poly, x)); }

    // Continues sqrt(P) along the circle from (th_a, s_a) to th_b.
    cplx track_sqrt(double tha, cplx sa, double thb, int depth = 0) const {
        cplx sb = detail::nearest_sign(sqrtP(std::polar(1.0, thb)), sa);
        double ref = std::max(std::abs(sa), std::abs(sb));
        if (depth < 40 && std::abs(sb - sa) > 0.25 * ref && ref > 0) {
            double m = 0.5 * (tha + thb);
            cplx sm = track_sqrt(tha, sa, m, depth + 1);
            return track_sqrt(m, sm, thb, depth + 1);
        }
        return sb;
    }

    cplx track_sqrt_x(cplx xa, cplx sa, cplx xb, int depth = 0) const {
        cplx sb = sqrtP(xb);
        if (sa == cplx(0, 0)) return sb;
        sb = detail::nearest_sign(sb, sa);
        double ref = std::max(std::abs(sa), std::abs(sb));
        if (depth < 40 && std::abs(sb - sa) > 0.25 * ref && ref > 0) {
            cplx xm = 0.5 * (xa + xb);
            cplx sm = track_sqrt_x(xa, sa, xm, depth + 1);
            return track_sqrt_x(xm, sm, xb, depth + 1);
        }
        return sb;
    }

    // Closed-form antiderivative with branches continued from ref.
    cplx closed_G(cplx x, cplx s, const Branches& ref, Branches& out) const {
        const cplx a = F_.a(), b = F_.b(), c = F_.c();
        out.s = s;
        out.L1 = ref.L1;
        out.L2 = ref.L2;
        if (F_.kind == ExponentKind::Quadratic01) {
            if (!is_small(c)) {
                cplx G = s;
                if (!is_small(a)) {
                    cplx n1 = 2.0 * a + b * x + 2.0 * sa_ * s, d1 = 2.0 * a + b * x - 2.0 * sa_ * s;
                    out.L1 = detail::unwrap_log(std::log(n1 / d1), ref.L1);
                    G -= 0.5 * sa_ * out.L1;
                }
                cplx n2 = b + 2.0 * c * x + 2.0 * sc_ * s, d2 = b + 2.0 * c * x - 2.0 * sc_ * s;
                out.L2 = detail::unwrap_log(std::log(n2 / d2), ref.L2);
                G += b / (4.0 * sc_) * out.L2;
                return G;
            }
            if (!is_small(b)) {
                cplx G = 2.0 * s;
                if (!is_small(a)) {
                    out.L1 = detail::unwrap_log(std::log((s - sa_) / (s + sa_)), ref.L1);
                    G += sa_ * out.L1;
                }
                return G;
            }
            out.L1 = detail::unwrap_log(std::log(x), ref.L1);
            return sa_ * out.L1;
        }
        // Quadratic12
        if (!is_small(c)) {
            cplx n2 = b + 2.0 * c * x + 2.0 * sc_ * s, d2 = b + 2.0 * c * x - 2.0 * sc_ * s;
            out.L2 = detail::unwrap_log(std::log(n2 / d2), ref.L2);
            return (2.0 * c * x + b) * s / (4.0 * c) + (4.0 * a * c - b * b) / (16.0 * c * sc_) * out.L2;
        }
        if (!is_small(b)) return 2.0 * (a + b * x) * s / (3.0 * b);
        return sa_ * x;
    }

    Branches principal_branches(cplx x, cplx s) const {
        Branches z;
        Branches out;
        closed_G(x, s, z, out);
        // first evaluation: take principal logs
        return out;
    }

    cplx closed_at(double u, const Node& nd, double thk) const {
        cplx s = track_sqrt(thk, nd.br.s, u);
        Branches out;
        cplx G = closed_G(std::polar(1.0, u), s, nd.br, out);
        return G - G0_;
    }

    // Integral of i x sqrt(P) x^{-w} d theta from tha to thb (short arc).
    cplx arc_integral(double tha, double thb, cplx sa) const {
        cplx sb = track_sqrt(tha, sa, thb);
        return arc_adaptive(tha, thb, sa, sb, 0);
    }

    cplx arc_integrand(double th, cplx sref) const {
        cplx x = std::polar(1.0, th);
        cplx s = detail::nearest_sign(sqrtP(x), sref);
        return cplx(0, 1) * s * std::pow(x, 1 - F_.weight);
    }

    cplx arc_adaptive(double a, double b, cplx sa, cplx sb, int depth) const {
        using detail::GK15;
        double hl = 0.5 * (b - a), c = 0.5 * (a + b);
        cplx kron = 0, gauss = 0;
        for (int j = 0; j < 8; ++j) {
            double xs = GK15::xgk[j];
            for (int sg : {-1, 1}) {
                if (j == 7 && sg == 1) break;
                double th = c + sg * hl * xs;
                double lam = (th - a) / (b - a);
                cplx sref = (1 - lam) * sa + lam * sb;
                cplx v = arc_integrand(th, sref);
                kron += GK15::wgk[j] * v;
                if (j % 2 == 1) gauss += GK15::wg[j / 2] * v;
            }
        }
        kron *= hl;
        gauss *= hl;
        double err = std::abs(kron - gauss);
        if (err <= tol_ * std::max(1.0, std::abs(kron)) * std::max(1.0, std::abs(b - a)) || depth > 30) return kron;
        double m = 0.5 * (a + b);
        cplx sm = track_sqrt(a, sa, m);
        return arc_adaptive(a, m, sa, sm, depth + 1) + arc_adaptive(m, b, sm, sb, depth + 1);
    }

    // Radial leg x(u) = x0 + (x1 - x0) u^2, which removes the square-root
    // endpoint singularity.
    cplx radial_adaptive(double ua, double ub, cplx sa, cplx sb, int depth) const {
        using detail::GK15;
        const cplx x1 = x0_ / std::abs(x0_);
        const cplx dx = x1 - x0_;
        double hl = 0.5 * (ub - ua), c = 0.5 * (ua + ub);
        cplx kron = 0, gauss = 0;
        for (int j = 0; j < 8; ++j) {
            double xs = GK15::xgk[j];
            for (int sg : {-1, 1}) {
                if (j == 7 && sg == 1) break;
                double u = c + sg * hl * xs;
                double lam = (u - ua) / (ub - ua);
                cplx sref = (1 - lam) * sa + lam * sb;
                cplx x = x0_ + dx * u * u;
                cplx s = detail::nearest_sign(sqrtP(x), sref);
                cplx v = s * std::pow(x, -F_.weight) * 2.0 * u * dx;
                kron += GK15::wgk[j] * v;
                if (j % 2 == 1) gauss += GK15::wg[j / 2] * v;
            }
        }
        kron *= hl;
        gauss *= hl;
        double err = std::abs(kron - gauss);
        if (err <= tol_ * std::max(1.0, std::abs(kron)) || depth > 30) return kron;
        double m = 0.5 * (ua + ub);
        cplx xm = x0_ + dx * m * m;
        cplx sm = track_sqrt_x(x0_ + dx * ua * ua, sa, xm);
        if (sa == cplx(0, 0)) sm = sqrtP(xm);
        return radial_adaptive(ua, m, sa, sm, depth + 1) + radial_adaptive(m, ub, sm, sb, depth + 1);
    }

    void build() {
        nodes_.assign(N_ + 2, Node{});
        Branches cur;
        cplx g_start(0, 0);
        if (anchored_) {
            const cplx x1 = x0_ / std::abs(x0_);
            const cplx dx = x1 - x0_;
            const int M = 64;
            cplx xprev = x0_;
            cplx sprev(0, 0);
            if (closed_) {
                // G at the anchor with principal logs, then march outward.
                Branches z;
                G0_ = closed_G(x0_, cplx(0, 0), z, cur);
            }
            cplx acc(0, 0);
            for (int j = 1; j <= M; ++j) {
                double u = double(j) / M;
                cplx x = x0_ + dx * u * u;
                cplx s = track_sqrt_x(xprev, sprev, x);
                if (closed_) {
                    Branches nb;
                    closed_G(x, s, cur, nb);
                    cur = nb;
                } else {
                    acc += radial_adaptive(double(j - 1) / M, u, sprev, s, 0);
                }
                xprev = x;
                sprev = s;
            }
            cur.s = sprev;
            if (closed_) {
                Branches nb;
                g_start = closed_G(x1, sprev, cur, nb) - G0_;
                cur = nb;
            } else {
                g_start = acc;
            }
        } else {
            cplx s = sqrtP(cplx(1, 0));
            cur.s = s;
            if (closed_) {
                Branches z;
                G0_ = closed_G(cplx(1, 0), s, z, cur);
                // logs at x = 1 are principal; L1 = log x = 0
            }
            g_start = 0;
        }
        // node 0 at th0_, nodes 1..N counterclockwise, node -1 one step back
        nodes_[1].br = cur;
        nodes_[1].g = g_start;
        for (int k = 1; k <= N_; ++k) {
            const Node& prev = nodes_[k];
            Node& nd = nodes_[k + 1];
            double tha = node_theta(k - 1), thb = node_theta(k);
            cplx s = track_sqrt(tha, prev.br.s, thb);
            if (closed_) {
                Branches nb;
                nd.g = closed_G(std::polar(1.0, thb), s, prev.br, nb) - G0_;
                nd.br = nb;
            } else {
                nd.br.s = s;
                nd.g = prev.g + arc_adaptive(tha, thb, prev.br.s, s, 0);
            }
        }
        {
            const Node& n0 = nodes_[1];
            Node& nm = nodes_[0];
            double tha = th0_, thb = th0_ - step_;
            cplx s = track_sqrt(tha, n0.br.s, thb);
            if (closed_) {
                Branches nb;
                nm.g = closed_G(std::polar(1.0, thb), s, n0.br, nb) - G0_;
                nm.br = nb;
            } else {
                nm.br.s = s;
                nm.g = n0.g - arc_adaptive(thb, tha, s, n0.br.s, 0);
            }
        }
        gscale_ = 0;
        for (auto& n : nodes_) gscale_ = std::max(gscale_, std::abs(n.g));
        gscale_ = std::max(gscale_, 1e-300);
    }

    ExponentForm F_;
    int N_;
    double tol_;
    bool closed_ = false;
    double scale_ = 1, gscale_ = 1;
    cplx sa_{0, 0}, sc_{0, 0};
    std::vector<cplx> roots_;
    bool anchored_ = false;
    cplx x0_{1, 0};
    double th0_ = 0, step_ = 0;
    cplx G0_{0, 0};
    std::vector<Node> nodes_;
};

inline cplx critical_exponent(const ExponentForm& form, double theta) {
    if (!(theta >= 0 && theta < 2 * M_PI)) throw Error(ErrorCode::ConfigError, "theta must lie in [0, 2 pi)");
    return CriticalExponent(form)(theta);
}

// Sign changes of Re g over one period. Samples with |Re g| below the
// noise floor are skipped, so an identically vanishing Re g has none.
inline std::vector<double> stokes_crossings(const CriticalExponent& G) {
    const int N = G.nodes();
    const double floor = 1e-11 * std::max(1.0, G.scale());
    std::vector<double> th, val;
    th.reserve(N + 1);
    val.reserve(N + 1);
    // node -1 sits one step behind theta0, so the anchor angle is interior
    for (int k = -1; k < N; ++k) {
        th.push_back(G.node_theta(k));
        val.push_back(G.node_value(k).real());
    }
    std::vector<double> out;
    int last = -1;
    for (int k = 0; k < static_cast<int>(th.size()); ++k) {
        if (std::abs(val[k]) <= floor) continue;
        if (last >= 0 && (val[k] > 0) != (val[last] > 0)) {
            double lo = th[last], hi = th[k];
            double flo = val[last];
            for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = G(mid).real();
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            double r = std::fmod(0.5 * (lo + hi), 2 * M_PI);
            if (r < 0) r += 2 * M_PI;
            out.push_back(r);
        }
        last = k;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> stokes_crossings(const ExponentForm& form) { return stokes_crossings(CriticalExponent(form)); }

// ------------------------------------------------------------------ hops

enum class HopKind { Numeric, Predicted };
enum class HopMode { Plus, Minus, Ai, Bi };

inline const char* hop_mode_name(HopMode m) {
    switch (m) {
        case HopMode::Plus: return "plus";
        case HopMode::Minus: return "minus";
        case HopMode::Ai: return "ai";
        case HopMode::Bi: return "bi";
    }
    return "?";
}

struct HopEvent {
    double t = 0;
    int from = 0, to = 0;  // +1: E+ branch, -1: E- branch, 0: not determined
    HopKind kind = HopKind::Numeric;
    double window = 0;  // numeric: width of the switch window
};

struct HopReport {
    std::string mode;
    HopKind kind = HopKind::Numeric;
    std::vector<HopEvent> hops;
    std::vector<double> crossings;  // predicted: all Stokes crossings as times
    int count() const { return static_cast<int>(hops.size()); }
};

namespace detail {

inline std::vector<int> harmonic_key(const DriveSpec& spec) {
    std::vector<int> key;
    for (auto& [n, v] : spec.harmonics)
        if (norm(v) > kZeroTol) key.push_back(n);
    return key;
}

inline bool inside_sector(cplx z, double half_angle) { return std::abs(std::arg(z)) < half_angle - 1e-6; }

}  // namespace detail

// Predicted hops from the Stokes crossings. A mode given by a single
// special function keeps one exponential throughout a sector and cannot
// hop at crossings inside it:
//   Ai(z) on |arg z| < pi, Bi(z) on |arg z| < pi/3,
//   the {0,1} mode regular at Z = 0 (multiplier e^{2 pi i sqrt(p.p)/omega})
//   throughout the unit disk when no turning point lies inside,
//   exact single exponentials (constant and single-frequency drives) everywhere.
inline HopReport predict_hops(const DriveSpec& spec, HopMode mode, int initial_label = 0) {
    HopReport rep;
    rep.mode = hop_mode_name(mode);
    rep.kind = HopKind::Predicted;
    ExponentForm form = exponent_form(spec);
    CriticalExponent G(form);
    std::vector<double> cr = stokes_crossings(G);
    const double w = spec.omega;
    for (double th : cr) rep.crossings.push_back(th / w);
    FamilyInfo fi = classify_solvable(spec);
    std::vector<int> key = detail::harmonic_key(spec);
    std::function<bool(double)> keep = [](double) { return true; };
    if (mode == HopMode::Ai || mode == HopMode::Bi) {
        if (fi.family != SolvableFamily::H12_Airy)
            throw Error(ErrorCode::UnsupportedFamily, "Ai/Bi modes need the Airy drive");
        double half = mode == HopMode::Ai ? M_PI : M_PI / 3;
        keep = [fi, half](double th) {
            cplx z = fi.zk * (std::polar(1.0, th) + fi.z0);
            return !detail::inside_sector(z, half);
        };
    } else if (fi.family == SolvableFamily::SingleFrequency || fi.family == SolvableFamily::Constant) {
        keep = [](double) { return false; };
    } else if (key == std::vector<int>{0, 1}) {
        bool regular_plus = G.roots_inside() == 0 && std::sqrt(form.a()).real() > 1e-12;
        if (mode == HopMode::Plus && regular_plus) keep = [](double) { return false; };
    } else if (fi.family == SolvableFamily::H12_ParabolicCylinder) {
        // D_nu(+-z) ~ (+-z)^nu e^{-z^2/4} on |arg(+-z)| < 3 pi / 4
        double sg = mode == HopMode::Plus ? 1.0 : -1.0;
        keep = [fi, sg](double th) {
            cplx z = sg * fi.zk * (std::polar(1.0, th) + fi.z0);
            return !detail::inside_sector(z, 0.75 * M_PI);
        };
    }
    int label = initial_label;
    for (double th : cr) {
        if (!keep(th)) continue;
        HopEvent e;
        e.t = th / w;
        e.kind = HopKind::Predicted;
        e.from = label;
        e.to = -label;
        label = -label;
        rep.hops.push_back(e);
    }
    return rep;
}

struct DetectOptions {
    double persistence = 0.01;      // fraction of T
    double ambiguous_distance = 0.5;
    double ambiguous_fraction = 0.1;
    int min_samples = 2000;
};

struct FollowingData {
    std::vector<double> t, d_plus, d_minus;
};

// Chordal distances of the trajectory to the continuously tracked
// instantaneous eigenstates.
inline FollowingData following_distances(const Trajectory<double>& tr, const DriveSpec& spec) {
    FollowingData fd;
    std::optional<InstantEigensystem> prev;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        InstantEigensystem es = instantaneous_eigensystem(f_at(spec, tr.t[k]), prev);
        prev = es;
        fd.t.push_back(tr.t[k]);
        fd.d_plus.push_back(ray_distance(tr.s[k], es.v_plus));
        fd.d_minus.push_back(ray_distance(tr.s[k], es.v_minus));
    }
    return fd;
}

inline HopReport detect_hops_numeric(const Trajectory<double>& tr, const DriveSpec& spec, const DetectOptions& o = {}) {
    const double T = spec.period();
    if (static_cast<int>(tr.t.size()) < o.min_samples)
        throw Error(ErrorCode::ConfigError, "hop detection needs at least 2000 samples");
    if (tr.t.back() - tr.t.front() < T * (1 - 1e-9))
        throw Error(ErrorCode::ConfigError, "hop detection needs a trajectory spanning one period");
    FollowingData fd = following_distances(tr, spec);
    const std::size_t n = fd.t.size();
    // ambiguity: a long contiguous stretch far from both eigenstates
    double run_start = -1;
    for (std::size_t k = 0; k < n; ++k) {
        bool far = std::min(fd.d_plus[k], fd.d_minus[k]) > o.ambiguous_distance;
        if (far && run_start < 0) run_start = fd.t[k];
        if ((!far || k + 1 == n) && run_start >= 0) {
            double end = far ? fd.t[k] : fd.t[k - 1];
            if (end - run_start > o.ambiguous_fraction * T)
                throw Error(ErrorCode::AmbiguousFollowing, "state stays away from both instantaneous eigenstates");
            run_start = -1;
        }
    }
    std::vector<int> lab(n);
    for (std::size_t k = 0; k < n; ++k) lab[k] = fd.d_plus[k] <= fd.d_minus[k] ? 1 : -1;
    struct Run {
        std::size_t b, e;  // [b, e)
        int label;
    };
    auto runs_of = [&]() {
        std::vector<Run> r;
        std::size_t b = 0;
        for (std::size_t k = 1; k <= n; ++k)
            if (k == n || lab[k] != lab[b]) {
                r.push_back({b, k, lab[b]});
                b = k;
            }
        return r;
    };
    auto dur = [&](const Run& r) { return fd.t[std::min(r.e, n - 1)] - fd.t[r.b]; };
    // absorb flicker shorter than the persistence threshold, shortest first
    for (;;) {
        std::vector<Run> r = runs_of();
        if (r.size() <= 1) break;
        std::size_t idx = r.size();
        double best = o.persistence * T;
        for (std::size_t j = 0; j < r.size(); ++j) {
            double d = dur(r[j]);
            if (d < best) {
                best = d;
                idx = j;
            }
        }
        if (idx == r.size()) break;
        int flip = idx > 0 ? r[idx - 1].label : r[idx + 1].label;
        for (std::size_t k = r[idx].b; k < r[idx].e; ++k) lab[k] = flip;
    }
    HopReport rep;
    rep.kind = HopKind::Numeric;
    std::vector<Run> r = runs_of();
    for (std::size_t j = 1; j < r.size(); ++j) {
        std::size_t k = r[j].b;
        // distance-equality point: nearest sign change of d+ - d- to the boundary
        auto diff = [&](std::size_t i) { return fd.d_plus[i] - fd.d_minus[i]; };
        std::size_t best = k;
        for (std::size_t off = 0; off < n; ++off) {
            bool found = false;
            for (long cand : {long(k) + long(off), long(k) - long(off)}) {
                if (cand < 1 || cand >= long(n)) continue;
                if ((diff(cand) > 0) != (diff(cand - 1) > 0)) {
                    best = static_cast<std::size_t>(cand);
                    found = true;
                    break;
                }
            }
            if (found || (k + off >= n && off > k)) break;
        }
        double d0 = diff(best - 1), d1 = diff(best);
        double lam = d0 == d1 ? 0.5 : d0 / (d0 - d1);
        HopEvent e;
        e.t = fd.t[best - 1] + lam * (fd.t[best] - fd.t[best - 1]);
        e.from = r[j - 1].label;
        e.to = r[j].label;
        e.kind = HopKind::Numeric;
        // window: contiguous span around the hop where the state is away from both
        std::size_t lo = best, hi = best;
        auto away = [&](std::size_t i) { return std::min(fd.d_plus[i], fd.d_minus[i]) > 0.1; };
        while (lo > 0 && away(lo - 1)) --lo;
        while (hi + 1 < n && away(hi)) ++hi;
        e.window = fd.t[hi] - fd.t[lo];
        rep.hops.push_back(e);
    }
    return rep;
}

// ------------------------------------------------------------ tangency

struct TangencyBranch {
    double rho = 0;
    std::vector<double> theta;
};

struct TangencyOptions {
    int rho_samples = 160;
    int theta_nodes = 4096;
    double tol = 1e-9;
};

namespace detail {

inline ExponentForm ucf_form(cplx r, double rho) { return quadratic01(1.0 - r * r, 2.0 * r * rho, -rho * rho); }

// Extrema of Re g on the circle: zeros of d/dtheta Re g.
inline std::vector<std::pair<double, double>> re_g_extrema(const CriticalExponent& G) {
    std::vector<std::pair<double, double>> out;
    const int N = G.nodes();
    double prev_th = G.node_theta(0);
    double prev_d = G.d_re_g(prev_th);
    for (int k = 1; k <= N; ++k) {
        double th = G.node_theta(k) - (k == N ? 1e-9 : 0.0);
        double d = G.d_re_g(th);
        if ((d > 0) != (prev_d > 0)) {
            double lo = prev_th, hi = th, flo = prev_d;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (lo + hi);
                double fm = G.d_re_g(m);
                if ((fm > 0) == (flo > 0)) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            double tm = 0.5 * (lo + hi);
            out.push_back({tm, G(tm).real()});
        }
        prev_th = th;
        prev_d = d;
    }
    return out;
}

inline double wrap_2pi(double th) {
    double r = std::fmod(th, 2 * M_PI);
    return r < 0 ? r + 2 * M_PI : r;
}

inline double circ_dist(double a, double b) { return std::abs(std::remainder(a - b, 2 * M_PI)); }

}  // namespace detail

// Solves Re g = 0 and d/dtheta Re g = 0 for real rho in the band where both
// turning points stay outside the unit circle.
inline std::vector<TangencyBranch> tangency_solve(cplx r, const TangencyOptions& o = {}) {
    const double band = std::min(std::abs(r + 1.0), std::abs(r - 1.0));
    if (!(band > 1e-3)) throw Error(ErrorCode::NoTangency, "no stable rho band for this r");
    const double rmax = band * (1 - 2e-3);
    std::vector<double> rhos;
    for (int i = 0; i < o.rho_samples; ++i) rhos.push_back(-rmax + 2 * rmax * (i + 0.5) / o.rho_samples);
    std::vector<std::vector<std::pair<double, double>>> ext(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        try {
            CriticalExponent G(detail::ucf_form(r, rhos[i]), CriticalExponent::Method::ClosedForm, o.theta_nodes);
            ext[i] = detail::re_g_extrema(G);
        } catch (const Error&) {
        }
    }
    struct Seed {
        double th, rho;
    };
    std::vector<Seed> seeds;
    for (std::size_t i = 0; i + 1 < rhos.size(); ++i) {
        for (auto& [th, h] : ext[i]) {
            double bestd = 0.2;
            const std::pair<double, double>* m = nullptr;
            for (auto& e : ext[i + 1]) {
                double d = detail::circ_dist(e.first, th);
                if (d < bestd) {
                    bestd = d;
                    m = &e;
                }
            }
            if (m && (h > 0) != (m->second > 0)) {
                double lam = h / (h - m->second);
                seeds.push_back({th + lam * std::remainder(m->first - th, 2 * M_PI), rhos[i] + lam * (rhos[i + 1] - rhos[i])});
            }
        }
    }
    // 2-D Newton with a finite-difference Jacobian.
    auto F = [&](double th, double rho, double& f1, double& f2) {
        CriticalExponent G(detail::ucf_form(r, rho), CriticalExponent::Method::ClosedForm, o.theta_nodes);
        f1 = G(th).real();
        f2 = G.d_re_g(th);
    };
    struct Sol {
        double th, rho;
    };
    std::vector<Sol> sols;
    for (const Seed& sd : seeds) {
        double th = sd.th, rho = sd.rho;
        bool ok = false;
        try {
            for (int it = 0; it < 40; ++it) {
                double f1, f2;
                F(th, rho, f1, f2);
                if (std::abs(f1) < o.tol * 1e-3 && std::abs(f2) < o.tol * 1e-3) {
                    ok = true;
                    break;
                }
                const double h = 1e-7;
                double a1, a2, b1, b2;
                F(th + h, rho, a1, a2);
                F(th, rho + h, b1, b2);
                double j11 = (a1 - f1) / h, j21 = (a2 - f2) / h, j12 = (b1 - f1) / h, j22 = (b2 - f2) / h;
                double det = j11 * j22 - j12 * j21;
                if (det == 0) break;
                double dth = (f1 * j22 - f2 * j12) / det, drho = (j11 * f2 - j21 * f1) / det;
                double lim = 0.05;
                double sc = std::max(std::abs(dth), std::abs(drho)) > lim ? lim / std::max(std::abs(dth), std::abs(drho)) : 1;
                th -= sc * dth;
                rho -= sc * drho;
                if (std::abs(rho) >= rmax) break;
            }
            if (!ok) {
                double f1, f2;
                F(th, rho, f1, f2);
                ok = std::abs(f1) < o.tol && std::abs(f2) < o.tol;
            }
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) continue;
        th = detail::wrap_2pi(th);
        bool dup = false;
        for (auto& s : sols)
            if (std::abs(s.rho - rho) < 1e-7 && detail::circ_dist(s.th, th) < 1e-6) dup = true;
        if (!dup) sols.push_back({th, rho});
    }
    std::vector<TangencyBranch> out;
    for (auto& s : sols) {
        TangencyBranch* b = nullptr;
        for (auto& e : out)
            if (std::abs(e.rho - s.rho) < 1e-7) b = &e;
        if (!b) {
            out.push_back({s.rho, {}});
            b = &out.back();
        }
        b->theta.push_back(s.th);
    }
    for (auto& b : out) std::sort(b.theta.begin(), b.theta.end());
    std::sort(out.begin(), out.end(), [](const TangencyBranch& x, const TangencyBranch& y) { return x.rho > y.rho; });
    if (out.empty()) throw Error(ErrorCode::NoTangency, "no tangency found");
    return out;
}

// Number of tangency angles off the real axis (sin theta != 0).
inline int off_axis_tangencies(double r, const TangencyOptions& o = {}) {
    int n = 0;
    try {
        for (auto& b : tangency_solve(r, o))
            for (double th : b.theta)
                if (std::abs(std::sin(th)) > 1e-6) ++n;
    } catch (const Error&) {
    }
    return n;
}

// Real r where the pair of off-axis tangency angles of one branch merges
// (the count of off-axis tangencies drops). Returns every such r in range.
inline std::vector<double> bifurcation_scan(double r_lo, double r_hi, double step = 0.05, double tol = 1e-3,
                                            const TangencyOptions& o = {}) {
    if (!(r_lo > -1 && r_hi < 1 && r_lo < r_hi))
        throw Error(ErrorCode::ConfigError, "bifurcation scan needs -1 < r_lo < r_hi < 1 (|r| > 1 is unstable)");
    TangencyOptions oo = o;
    oo.rho_samples = std::min(oo.rho_samples, 120);
    std::vector<double> grid;
    int m = std::max(2, static_cast<int>(std::ceil((r_hi - r_lo) / step)));
    for (int i = 0; i <= m; ++i) grid.push_back(r_lo + (r_hi - r_lo) * i / m);
    std::vector<int> cnt;
    for (double r : grid) cnt.push_back(off_axis_tangencies(r, oo));
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (cnt[i] == cnt[i + 1]) continue;
        double lo = grid[i], hi = grid[i + 1];
        int clo = cnt[i];
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            int c = off_axis_tangencies(mid, oo);
            if (c == clo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push_back(0.5 * (lo + hi));
    }
    if (out.empty()) throw Error(ErrorCode::NoBifurcation, "off-axis tangency count is constant in range");
    return out;
}

// ------------------------------------------------------- phase diagram

enum class Region { NoHop, Hop2, Hop4, Other, Boundary, EncirclesEP };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::NoHop: return "NoHop";
        case Region::Hop2: return "Hop2";
        case Region::Hop4: return "Hop4";
        case Region::Other: return "Other";
        case Region::Boundary: return "Boundary";
        case Region::EncirclesEP: return "EncirclesEP";
    }
    return "?";
}

struct PhaseDiagramCell {
    double re_r = 0, re_rho = 0;
    int crossings = -1;  // -1 for boundary cells
    Region region = Region::Boundary;
};

struct PhaseDiagramSpec {
    double r_lo = -1.5, r_hi = 1.5;
    double rho_lo = -1.5, rho_hi = 1.5;
    int n_r = 200, n_rho = 200;
    double im_r = 0, im_rho = 0;
    int threads = 0;  // 0: hardware concurrency
    int theta_nodes = 4096;
};

inline PhaseDiagramCell phase_cell(cplx r, cplx rho, int nodes) {
    PhaseDiagramCell c;
    c.re_r = r.real();
    c.re_rho = rho.real();
    try {
        CriticalExponent G(quadratic01(1.0 - r * r, 2.0 * r * rho, -rho * rho), CriticalExponent::Method::ClosedForm,
                           nodes);
        c.crossings = static_cast<int>(stokes_crossings(G).size());
        if (G.roots_inside() > 0) {
            c.region = Region::EncirclesEP;
        } else if (c.crossings == 0) {
            c.region = Region::NoHop;
        } else if (c.crossings == 2) {
            c.region = Region::Hop2;
        } else if (c.crossings == 4) {
            c.region = Region::Hop4;
        } else {
            c.region = Region::Other;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BranchPointOnCircle) throw;
        c.crossings = -1;
        c.region = Region::Boundary;
    }
    return c;
}

// Row-major cells (rho fastest). Cells are independent; threads take
// fixed stripes, so output does not depend on the thread count.
inline std::vector<PhaseDiagramCell> phase_diagram(const PhaseDiagramSpec& ps) {
    if (static_cast<long>(ps.n_r) * ps.n_rho > 1000000 || ps.n_r < 1 || ps.n_rho < 1)
        throw Error(ErrorCode::ConfigError, "phase diagram grid must have between 1 and 1e6 cells");
    std::vector<PhaseDiagramCell> cells(static_cast<std::size_t>(ps.n_r) * ps.n_rho);
    auto coord = [](double lo, double hi, int n, int i) { return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1); };
    auto work = [&](int tid, int nt) {
        for (std::size_t idx = tid; idx < cells.size(); idx += nt) {
            int i = static_cast<int>(idx / ps.n_rho), j = static_cast<int>(idx % ps.n_rho);
            cplx r(coord(ps.r_lo, ps.r_hi, ps.n_r, i), ps.im_r);
            cplx rho(coord(ps.rho_lo, ps.rho_hi, ps.n_rho, j), ps.im_rho);
            cells[idx] = phase_cell(r, rho, ps.theta_nodes);
        }
    };
    int nt = ps.threads > 0 ? ps.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (nt == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
        for (auto& th : pool) th.join();
    }
    return cells;
}

inline void write_phase_diagram_csv(std::ostream& os, const std::vector<PhaseDiagramCell>& cells) {
    os << "re_r,re_rho,crossings,region\n";
    char buf[160];
    for (auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%s\n", c.re_r, c.re_rho, c.crossings, region_name(c.region));
        os << buf;
    }
}

}  // namespace nhfloquet
