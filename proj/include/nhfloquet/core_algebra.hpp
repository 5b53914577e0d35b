#pragma once

#include "error.hpp"
#include "scalar.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <optional>

namespace nhfloquet {

// Three complex components of a traceless Hamiltonian f . sigma.
template <class T>
struct Vec3 {
    using C = std::complex<T>;
    C f1{0, 0}, f2{0, 0}, f3{0, 0};

    Vec3() = default;
    Vec3(C a, C b, C c) : f1(a), f2(b), f3(c) {}

    C& operator[](int i) { return i == 0 ? f1 : (i == 1 ? f2 : f3); }
    const C& operator[](int i) const { return i == 0 ? f1 : (i == 1 ? f2 : f3); }

    Vec3& operator+=(const Vec3& o) {
        f1 += o.f1;
        f2 += o.f2;
        f3 += o.f3;
        return *this;
    }
    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.f1 - b.f1, a.f2 - b.f2, a.f3 - b.f3}; }
    friend Vec3 operator*(const C& s, const Vec3& v) { return {s * v.f1, s * v.f2, s * v.f3}; }
    friend Vec3 operator-(const Vec3& v) { return {-v.f1, -v.f2, -v.f3}; }

    // Upper-right and lower-left entries of f . sigma.
    C upper() const { return f1 - C(0, 1) * f2; }
    C lower() const { return f1 + C(0, 1) * f2; }
};

using Complex3 = Vec3<double>;

template <class T>
inline Vec3<T> widen(const Complex3& v) {
    return {widen<T>(v.f1), widen<T>(v.f2), widen<T>(v.f3)};
}

// Bilinear product, no conjugation.
template <class T>
inline std::complex<T> cdot(const Vec3<T>& u, const Vec3<T>& v) {
    return u.f1 * v.f1 + u.f2 * v.f2 + u.f3 * v.f3;
}

template <class T>
inline T norm(const Vec3<T>& v) {
    using std::sqrt;
    return sqrt(abs2(v.f1) + abs2(v.f2) + abs2(v.f3));
}

template <class T>
struct Mat2 {
    using C = std::complex<T>;
    std::array<std::array<C, 2>, 2> m{};

    static Mat2 identity() {
        Mat2 r;
        r.m[0][0] = r.m[1][1] = C(1, 0);
        return r;
    }
    C& operator()(int i, int j) { return m[i][j]; }
    const C& operator()(int i, int j) const { return m[i][j]; }
    C det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    C trace() const { return m[0][0] + m[1][1]; }
    T norm() const {
        using std::sqrt;
        T s = 0;
        for (auto& r : m)
            for (auto& x : r) s += abs2(x);
        return sqrt(s);
    }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        return r;
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
        return r;
    }
    friend Mat2 operator*(const C& s, const Mat2& a) {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = s * a.m[i][j];
        return r;
    }
};

using Matrix2 = Mat2<double>;

template <class T>
inline Matrix2 to_double(const Mat2<T>& a) {
    Matrix2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = to_double(a.m[i][j]);
    return r;
}

// Two amplitudes (a, b) with projective coordinate psi = b / a.
template <class T>
struct State {
    using C = std::complex<T>;
    C a{1, 0}, b{0, 0};
    C psi() const { return b / a; }
    T norm() const {
        using std::sqrt;
        return sqrt(abs2(a) + abs2(b));
    }
};

using StateVector = State<double>;

template <class T>
inline StateVector to_double(const State<T>& s) {
    return {to_double(s.a), to_double(s.b)};
}

template <class T>
inline State<T> operator*(const Mat2<T>& u, const State<T>& s) {
    return {u.m[0][0] * s.a + u.m[0][1] * s.b, u.m[1][0] * s.a + u.m[1][1] * s.b};
}

template <class T>
inline Mat2<T> pauli_matrix(const Vec3<T>& f) {
    Mat2<T> h;
    h.m[0][0] = f.f3;
    h.m[0][1] = f.upper();
    h.m[1][0] = f.lower();
    h.m[1][1] = -f.f3;
    return h;
}

struct GaugeSplit {
    cplx f0;
    Complex3 f;
};

inline GaugeSplit gauge_split(const Matrix2& h) {
    const cplx i(0, 1);
    GaugeSplit g;
    g.f0 = 0.5 * (h(0, 0) + h(1, 1));
    g.f.f3 = 0.5 * (h(0, 0) - h(1, 1));
    g.f.f1 = 0.5 * (h(0, 1) + h(1, 0));
    g.f.f2 = (h(1, 0) - h(0, 1)) / (2.0 * i);
    return g;
}

inline Matrix2 reconstruct(const GaugeSplit& g) {
    Matrix2 h = pauli_matrix(g.f);
    h(0, 0) += g.f0;
    h(1, 1) += g.f0;
    return h;
}

// |f . f|; vanishes exactly on the exceptional-point locus.
template <class T>
inline T ep_distance(const Vec3<T>& f) {
    using std::abs;
    return abs(cdot(f, f));
}

// Chordal distance between two points of the projective line.
template <class T>
inline T chordal_distance(const std::complex<T>& u, const std::complex<T>& v) {
    using std::abs;
    using std::sqrt;
    return abs(u - v) / sqrt((1 + abs2(u)) * (1 + abs2(v)));
}

// Chordal distance between the rays of two state vectors (handles a = 0).
template <class T>
inline T ray_distance(const State<T>& x, const State<T>& y) {
    using std::abs;
    T nx = x.norm(), ny = y.norm();
    return abs(x.a * y.b - x.b * y.a) / (nx * ny);
}

struct InstantEigensystem {
    cplx E_plus{0, 0}, E_minus{0, 0};
    StateVector v_plus, v_minus;
    int branch = 1;  // +1 if E_plus is the principal root, -1 otherwise
};

namespace detail {

inline StateVector eigvec(const Complex3& f, cplx E) {
    StateVector c1{f.upper(), -f.f3 + E};
    StateVector c2{f.f3 + E, f.lower()};
    StateVector v = c1.norm() >= c2.norm() ? c1 : c2;
    double n = v.norm();
    if (n == 0.0) {
        // Both forms vanish only for a scalar-free degenerate f; the caller rejects EPs first.
        return {1.0, 0.0};
    }
    v.a /= n;
    v.b /= n;
    return v;
}

inline cplx inner(const StateVector& x, const StateVector& y) {
    return std::conj(x.a) * y.a + std::conj(x.b) * y.b;
}

inline void fix_phase_max_real(StateVector& v) {
    cplx big = std::abs(v.a) >= std::abs(v.b) ? v.a : v.b;
    cplx ph = std::conj(big) / std::abs(big);
    v.a *= ph;
    v.b *= ph;
}

inline void align_to(StateVector& v, const StateVector& ref) {
    cplx ov = inner(ref, v);
    double m = std::abs(ov);
    if (m > 0) {
        cplx ph = std::conj(ov) / m;
        v.a *= ph;
        v.b *= ph;
    }
}

}  // namespace detail

inline InstantEigensystem instantaneous_eigensystem(const Complex3& f,
                                                    const std::optional<InstantEigensystem>& prev = std::nullopt) {
    double nf = norm(f);
    cplx ff = cdot(f, f);
    if (std::abs(ff) < 1e-12 * nf * nf || nf == 0.0)
        throw Error(ErrorCode::AtExceptionalPoint, "f.f vanishes: eigenvectors coalesce");
    cplx E = std::sqrt(ff);
    StateVector vp = detail::eigvec(f, E);
    StateVector vm = detail::eigvec(f, -E);
    InstantEigensystem r;
    r.E_plus = E;
    r.E_minus = -E;
    r.v_plus = vp;
    r.v_minus = vm;
    r.branch = 1;
    if (prev) {
        double keep = std::norm(detail::inner(prev->v_plus, vp)) + std::norm(detail::inner(prev->v_minus, vm));
        double swap = std::norm(detail::inner(prev->v_plus, vm)) + std::norm(detail::inner(prev->v_minus, vp));
        bool do_swap = swap > keep || (swap == keep && prev->branch == -1);
        if (do_swap) {
            std::swap(r.v_plus, r.v_minus);
            std::swap(r.E_plus, r.E_minus);
            r.branch = -1;
        }
        detail::align_to(r.v_plus, prev->v_plus);
        detail::align_to(r.v_minus, prev->v_minus);
    } else {
        detail::fix_phase_max_real(r.v_plus);
        detail::fix_phase_max_real(r.v_minus);
    }
    return r;
}

struct RotationAngles {
    double alpha = 0, beta = 0, gamma = 0;
};

using Real3x3 = std::array<std::array<double, 3>, 3>;

// SO(3) matrix O with R^{-1} (f . sigma) R = (O f) . sigma for
// R = exp(i alpha s3/2) exp(i beta s1/2) exp(i gamma s3/2).
inline Real3x3 rotation_matrix(const RotationAngles& ang) {
    const cplx i(0, 1);
    auto expo = [&](double th, int axis) {
        Matrix2 r;
        double c = std::cos(th / 2), s = std::sin(th / 2);
        r(0, 0) = r(1, 1) = c;
        if (axis == 3) {
            r(0, 0) += i * s;
            r(1, 1) -= i * s;
        } else {
            r(0, 1) = r(1, 0) = i * s;
        }
        return r;
    };
    Matrix2 R = expo(ang.alpha, 3) * expo(ang.beta, 1) * expo(ang.gamma, 3);
    Matrix2 Rinv;
    Rinv(0, 0) = R(1, 1);
    Rinv(1, 1) = R(0, 0);
    Rinv(0, 1) = -R(0, 1);
    Rinv(1, 0) = -R(1, 0);
    std::array<Matrix2, 3> sig;
    for (int k = 0; k < 3; ++k) {
        Complex3 e;
        e[k] = 1.0;
        sig[k] = pauli_matrix(e);
    }
    Real3x3 O{};
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) O[k][j] = 0.5 * (sig[k] * Rinv * sig[j] * R).trace().real();
    return O;
}

inline Complex3 apply_rotation(const RotationAngles& ang, const Complex3& f) {
    Real3x3 O = rotation_matrix(ang);
    Complex3 r;
    for (int k = 0; k < 3; ++k) r[k] = O[k][0] * f.f1 + O[k][1] * f.f2 + O[k][2] * f.f3;
    return r;
}

enum class RotationTarget { PSlot, QSlot };

// Real rotation that makes v1' - i v2' vanish for the given vector.
inline RotationAngles rotation_to_upper_triangular(const Complex3& v, RotationTarget = RotationTarget::PSlot) {
    double nv = norm(v);
    if (nv == 0.0) throw Error(ErrorCode::DegenerateParameter, "zero vector has no rotation target");
    auto F = [&](double a, double b) { return apply_rotation({a, b, 0.0}, v).upper() / nv; };
    if (std::abs(F(0, 0)) < 1e-14) return {};
    const double pi = std::acos(-1.0);
    const double starts_a[4] = {0.0, pi / 2, pi, 3 * pi / 2};
    const double starts_b[2] = {pi / 3, 2 * pi / 3};
    for (double a0 : starts_a) {
        for (double b0 : starts_b) {
            double a = a0, b = b0;
            for (int it = 0; it < 100; ++it) {
                cplx r = F(a, b);
                if (std::abs(r) < 1e-14) return {a, b, 0.0};
                const double h = 1e-7;
                cplx da = (F(a + h, b) - F(a - h, b)) / (2 * h);
                cplx db = (F(a, b + h) - F(a, b - h)) / (2 * h);
                double j11 = da.real(), j12 = db.real(), j21 = da.imag(), j22 = db.imag();
                double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-300) break;
                double sa = (j22 * r.real() - j12 * r.imag()) / det;
                double sb = (-j21 * r.real() + j11 * r.imag()) / det;
                double lim = 0.5;
                double len = std::hypot(sa, sb);
                if (len > lim) {
                    sa *= lim / len;
                    sb *= lim / len;
                }
                a -= sa;
                b -= sb;
            }
            if (std::abs(F(a, b)) < 1e-12) return {a, b, 0.0};
        }
    }
    throw Error(ErrorCode::NoConvergence, "rotation Newton solve failed from all starting angles");
}

}  // namespace nhfloquet
