#pragma once

#include "analytic.hpp"
#include "propagator.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace nhfloquet {

enum class FloquetClass { StableReal, BrokenComplex, DegenerateDiagonalizable, DegenerateJordan };

inline const char* class_name(FloquetClass c) {
    switch (c) {
        case FloquetClass::StableReal: return "StableReal";
        case FloquetClass::BrokenComplex: return "BrokenComplex";
        case FloquetClass::DegenerateDiagonalizable: return "DegenerateDiagonalizable";
        case FloquetClass::DegenerateJordan: return "DegenerateJordan";
    }
    return "Unknown";
}

enum class Mode { Plus, Minus };

struct FloquetSolution {
    cplx phi_plus{0, 0}, phi_minus{0, 0};
    StateVector mode_plus, mode_minus;
    FloquetClass classification = FloquetClass::StableReal;
    Matrix2 U;
    double period = 0;
    // Binary128 mode vectors when known exactly (analytic basis at t = 0).
    std::optional<std::array<State<quad>, 2>> exact_modes;
};

// Distance between two phases on the circle, mod 2 pi (complex phases
// compare real parts mod 2 pi and imaginary parts directly).
inline double phase_distance(cplx a, cplx b) {
    const double tp = 2 * std::acos(-1.0);
    double dr = std::remainder(a.real() - b.real(), tp);
    return std::hypot(dr, a.imag() - b.imag());
}

namespace detail {

inline StateVector eigvec2(const Matrix2& U, cplx lam) {
    StateVector c1{U(0, 1), lam - U(0, 0)};
    StateVector c2{lam - U(1, 1), U(1, 0)};
    StateVector v = c1.norm() >= c2.norm() ? c1 : c2;
    double n = v.norm();
    if (n == 0) return {1.0, 0.0};
    v.a /= n;
    v.b /= n;
    fix_phase_max_real(v);
    return v;
}

inline double overlap2(const StateVector& x, const StateVector& y) { return std::norm(inner(x, y)); }

}  // namespace detail

// Eigen-decomposition of the one-period operator. `reference` (typically
// the instantaneous eigensystem at t0) breaks ties when both phases have
// the same imaginary part.
inline FloquetSolution floquet_modes(const Matrix2& U, double period,
                                     const std::optional<InstantEigensystem>& reference = std::nullopt) {
    FloquetSolution F;
    F.U = U;
    F.period = period;
    const cplx i(0, 1);
    cplx tr = U.trace(), det = U.det();
    cplx disc = std::sqrt(tr * tr - 4.0 * det);
    cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    double scale = std::max(1.0, U.norm());
    if (std::abs(l1 - l2) < 1e-9 * scale) {
        cplx lam = 0.5 * tr;
        Matrix2 D = U;
        D(0, 0) -= lam;
        D(1, 1) -= lam;
        cplx phi = -i * std::log(lam);
        F.phi_plus = phi;
        F.phi_minus = -phi;
        if (D.norm() < 1e-8 * scale) {
            F.classification = FloquetClass::DegenerateDiagonalizable;
            F.mode_plus = {1.0, 0.0};
            F.mode_minus = {0.0, 1.0};
            return F;
        }
        // Eigenvector condition: nearly coalescing eigenvectors signal a Jordan block.
        StateVector v1 = detail::eigvec2(U, l1), v2 = detail::eigvec2(U, l2);
        double cosang = std::abs(detail::inner(v1, v2));
        double cond = cosang >= 1.0 ? 1e300 : (1 + cosang) / std::sqrt(1 - cosang * cosang);
        if (cond > 1e8) {
            F.classification = FloquetClass::DegenerateJordan;
            throw Error(ErrorCode::JordanBlock, "degenerate non-diagonalizable monodromy");
        }
        F.classification = FloquetClass::DegenerateDiagonalizable;
        F.mode_plus = v1;
        F.mode_minus = v2;
        return F;
    }
    cplx p1 = -i * std::log(l1), p2 = -i * std::log(l2);
    StateVector v1 = detail::eigvec2(U, l1), v2 = detail::eigvec2(U, l2);
    bool swap = false;
    if (std::abs(p1.imag() - p2.imag()) > 1e-7) {
        swap = p1.imag() > p2.imag();
    } else if (reference) {
        double keep = detail::overlap2(reference->v_plus, v1) + detail::overlap2(reference->v_minus, v2);
        double sw = detail::overlap2(reference->v_plus, v2) + detail::overlap2(reference->v_minus, v1);
        swap = sw > keep;
    } else {
        swap = p1.real() < p2.real();
    }
    if (swap) {
        std::swap(p1, p2);
        std::swap(v1, v2);
    }
    F.phi_plus = p1;
    F.phi_minus = p2;
    F.mode_plus = v1;
    F.mode_minus = v2;
    F.classification = (std::abs(p1.imag()) < 1e-7 && std::abs(p2.imag()) < 1e-7) ? FloquetClass::StableReal
                                                                                     : FloquetClass::BrokenComplex;
    return F;
}

template <class T>
inline FloquetSolution floquet_modes(const EvolutionOperator<T>& E,
                                     const std::optional<InstantEigensystem>& reference = std::nullopt) {
    return floquet_modes(to_double(E.U), to_double(E.t1 - E.t0), reference);
}

enum class Precision { Double, Quad, Auto };

struct MonodromyOptions {
    Precision precision = Precision::Auto;
    double rtol_double = 1e-12;
    double rtol_quad = 1e-22;
};

// One-period operator. Auto starts in double and falls back to binary128
// when the Liouville identity shows cancellation damage.
inline EvolutionOperator<double> one_period_operator(const DriveSpec& spec, const MonodromyOptions& mo = {},
                                                     bool* used_quad = nullptr) {
    auto expected_det = [&](double T) { return std::exp(cplx(0, -2) * spec.f0 * T); };
    if (used_quad) *used_quad = false;
    if (mo.precision != Precision::Quad) {
        auto E = evolve_operator<double>(spec, 0.0, spec.period(), mo.rtol_double);
        double derr = std::abs(E.U.det() - expected_det(spec.period()));
        if (mo.precision == Precision::Double || derr < 1e-10) return E;
    }
    const quad T = quad(2) * pi_v<quad>() / quad(spec.omega);
    auto Eq = evolve_operator<quad>(spec, quad(0), T, mo.rtol_quad);
    EvolutionOperator<double> E;
    E.U = to_double(Eq.U);
    E.t0 = 0;
    E.t1 = spec.period();
    E.error_bound = Eq.error_bound;
    if (used_quad) *used_quad = true;
    return E;
}

inline std::optional<InstantEigensystem> reference_eigensystem(const DriveSpec& spec) {
    try {
        return instantaneous_eigensystem(f_at(spec, 0.0));
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Phase expected for the "plus" Floquet mode. For two-harmonic {0, 1}
// drives this is 2 pi sqrt(p.p)/omega (principal root), the multiplier of
// the solution regular at Z = 0; other solvable families use the analytic
// eigenphase of their first basis function.
inline std::optional<cplx> reference_plus_phase(const DriveSpec& spec) {
    std::vector<int> key;
    for (auto& [n, v] : spec.harmonics)
        if (norm(v) > kZeroTol) key.push_back(n);
    if (key == std::vector<int>{0, 1}) {
        Complex3 p = spec.coeff(0);
        return 2 * std::acos(-1.0) * std::sqrt(cdot(p, p)) / spec.omega - spec.f0 * spec.period();
    }
    FamilyInfo fi = classify_solvable(spec);
    if (fi.family != SolvableFamily::NotSolvable) return analytic_eigenphases(spec).first;
    return std::nullopt;
}

// Swaps the labels when the mode called "minus" sits closer to the
// reference plus phase. Degenerate spectra are left alone.
inline void relabel_by_phase(FloquetSolution& F, cplx phi_plus_ref) {
    if (F.classification == FloquetClass::DegenerateDiagonalizable) return;
    if (phase_distance(F.phi_minus, phi_plus_ref) < phase_distance(F.phi_plus, phi_plus_ref)) {
        std::swap(F.phi_plus, F.phi_minus);
        std::swap(F.mode_plus, F.mode_minus);
    }
}

struct FloquetOptions {
    MonodromyOptions monodromy;
    bool analytic_labels = true;
};

// U(T), its modes, and the labelling above.
inline FloquetSolution floquet_solve(const DriveSpec& spec, const FloquetOptions& fo = {}, bool* used_quad = nullptr) {
    EvolutionOperator<double> E = one_period_operator(spec, fo.monodromy, used_quad);
    FloquetSolution F = floquet_modes(E.U, spec.period(), reference_eigensystem(spec));
    if (fo.analytic_labels) {
        if (auto ref = reference_plus_phase(spec)) relabel_by_phase(F, *ref);
    }
    // U(T) proportional to 1: every state is cyclic; pick the analytic pair
    // (single exponentials, D_nu(+-z), Ai/Bi) when there is one.
    if (F.classification == FloquetClass::DegenerateDiagonalizable) {
        FamilyInfo fi = classify_solvable(spec);
        if (fi.family != SolvableFamily::NotSolvable) {
            try {
                AnalyticBasis B(spec);
                std::array<State<quad>, 2> ex{B.state(quad(0), BasisIndex::First), B.state(quad(0), BasisIndex::Second)};
                for (auto& v : ex) {
                    using std::sqrt;
                    quad n = sqrt(abs2(v.a) + abs2(v.b));
                    v.a /= n;
                    v.b /= n;
                }
                F.mode_plus = {to_double(ex[0].a), to_double(ex[0].b)};
                F.mode_minus = {to_double(ex[1].a), to_double(ex[1].b)};
                F.exact_modes = ex;
            } catch (const Error&) {
            }
        }
    }
    return F;
}

// Trajectory of one Floquet mode over the grid, integrated in binary128.
inline Trajectory<double> cyclic_trajectory(const DriveSpec& spec, const FloquetSolution& F, Mode mode,
                                            const std::vector<double>& grid, double rtol_quad = 1e-22) {
    const StateVector& v = mode == Mode::Plus ? F.mode_plus : F.mode_minus;
    State<quad> s0{widen_q(v.a), widen_q(v.b)};
    if (F.exact_modes) s0 = (*F.exact_modes)[mode == Mode::Plus ? 0 : 1];
    std::vector<quad> g(grid.begin(), grid.end());
    Trajectory<quad> tq = trajectory<quad>(spec, s0, g, rtol_quad);
    Trajectory<double> tr;
    tr.t = grid;
    tr.s.reserve(tq.s.size());
    for (auto& s : tq.s) tr.s.push_back({to_double(s.a), to_double(s.b)});
    return tr;
}

inline std::vector<double> uniform_grid(double t0, double t1, int n) {
    std::vector<double> g(n + 1);
    for (int k = 0; k <= n; ++k) g[k] = t0 + (t1 - t0) * k / n;
    return g;
}

}  // namespace nhfloquet
