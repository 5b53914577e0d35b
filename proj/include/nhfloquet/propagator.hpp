#pragma once

#include "core_algebra.hpp"
#include "dop853.hpp"
#include "models.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nhfloquet {

template <class T>
struct EvolutionOperator {
    Mat2<T> U = Mat2<T>::identity();
    T t0 = 0, t1 = 0;
    double error_bound = 0;
};

template <class T>
struct Trajectory {
    std::vector<T> t;
    std::vector<State<T>> s;
    bool dense_output = true;
};

// Tolerance presets. Binary128 runs accept tolerances far below double
// round-off; long-period hopping runs need them because U(T) is formed by
// cancellation between solutions whose ratio reaches e^{40} and more.
template <class T>
struct PrecisionTraits;

template <>
struct PrecisionTraits<double> {
    static constexpr double min_rtol = 1e-13;
    static constexpr double max_rtol = 1e-6;
    static constexpr double default_rtol = 1e-10;
    static constexpr double default_atol = 1e-12;
};

template <>
struct PrecisionTraits<quad> {
    static constexpr double min_rtol = 1e-32;
    static constexpr double max_rtol = 1e-6;
    static constexpr double default_rtol = 1e-22;
    static constexpr double default_atol = 1e-30;
};

template <class T>
inline IntegratorOptions make_options(double rtol, double atol = -1) {
    if (!(rtol >= PrecisionTraits<T>::min_rtol && rtol <= PrecisionTraits<T>::max_rtol)) {
        std::ostringstream os;
        os << "rtol " << rtol << " outside [" << PrecisionTraits<T>::min_rtol << ", " << PrecisionTraits<T>::max_rtol
           << "]";
        throw Error(ErrorCode::ConfigError, os.str());
    }
    IntegratorOptions o;
    o.rtol = rtol;
    o.atol = atol >= 0 ? atol : std::min(PrecisionTraits<T>::default_atol, rtol * 1e-2);
    return o;
}

namespace detail {

// Right-hand side for n columns of (a, b): i d/dt (a, b) = H(t) (a, b).
template <class T, std::size_t N>
struct SchrodingerRhs {
    const DriveSpec* spec;
    std::complex<T> f0;
    void operator()(const T& t, const std::array<std::complex<T>, N>& y, std::array<std::complex<T>, N>& dy) const {
        const std::complex<T> mi(0, -1);
        Vec3<T> f = f_at<T>(*spec, t);
        std::complex<T> u = f.upper(), w = f.lower();
        std::complex<T> d0 = f.f3 + f0, d1 = -f.f3 + f0;
        for (std::size_t j = 0; j < N; j += 2) {
            const auto& a = y[j];
            const auto& b = y[j + 1];
            dy[j] = mi * (d0 * a + u * b);
            dy[j + 1] = mi * (w * a + d1 * b);
        }
    }
};

template <class T>
inline std::array<std::complex<T>, 4> pack(const Mat2<T>& m) {
    return {m(0, 0), m(1, 0), m(0, 1), m(1, 1)};
}

template <class T>
inline Mat2<T> unpack(const std::array<std::complex<T>, 4>& y, const T& log_scale) {
    using std::exp;
    T s = exp(log_scale);
    Mat2<T> m;
    m(0, 0) = s * y[0];
    m(1, 0) = s * y[1];
    m(0, 1) = s * y[2];
    m(1, 1) = s * y[3];
    return m;
}

}  // namespace detail

// Integrates the two columns of Y0 together and reports Y(t) at each
// output time (monotone, inside [t0, t1]).
template <class T>
inline Mat2<T> propagate_columns(const DriveSpec& spec, const Mat2<T>& Y0, const T& t0, const T& t1,
                                 const IntegratorOptions& opt, const std::vector<T>& outputs = {},
                                 std::vector<Mat2<T>>* samples = nullptr, double* err_bound = nullptr) {
    detail::SchrodingerRhs<T, 4> rhs{&spec, widen<T>(spec.f0)};
    Dop853<T, 4> ode(rhs, opt);
    if (samples) samples->clear();
    typename Dop853<T, 4>::Sink sink;
    if (samples) {
        sink = [&](const T&, const std::array<std::complex<T>, 4>& y, const T& ls) {
            samples->push_back(detail::unpack(y, ls));
        };
    }
    auto y = ode.integrate(t0, t1, detail::pack(Y0), outputs, sink);
    if (err_bound) *err_bound = ode.error_estimate();
    return detail::unpack(y, ode.log_scale());
}

template <class T = double>
inline State<T> propagate(const DriveSpec& spec, const State<T>& s0, const T& t0, const T& t1,
                          double rtol = PrecisionTraits<T>::default_rtol) {
    IntegratorOptions opt = make_options<T>(rtol);
    detail::SchrodingerRhs<T, 2> rhs{&spec, widen<T>(spec.f0)};
    Dop853<T, 2> ode(rhs, opt);
    auto y = ode.integrate(t0, t1, {s0.a, s0.b});
    using std::exp;
    T sc = exp(ode.log_scale());
    return {sc * y[0], sc * y[1]};
}

template <class T = double>
inline EvolutionOperator<T> evolve_operator(const DriveSpec& spec, const T& t0, const T& t1,
                                            double rtol = PrecisionTraits<T>::default_rtol) {
    IntegratorOptions opt = make_options<T>(rtol);
    EvolutionOperator<T> E;
    E.t0 = t0;
    E.t1 = t1;
    E.U = propagate_columns<T>(spec, Mat2<T>::identity(), t0, t1, opt, {}, nullptr, &E.error_bound);
    return E;
}

template <class T = double>
inline Trajectory<T> trajectory(const DriveSpec& spec, const State<T>& s0, const std::vector<T>& grid,
                                double rtol = PrecisionTraits<T>::default_rtol) {
    Trajectory<T> tr;
    if (grid.empty()) return tr;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw Error(ErrorCode::ConfigError, "trajectory grid must be increasing");
    IntegratorOptions opt = make_options<T>(rtol);
    detail::SchrodingerRhs<T, 2> rhs{&spec, widen<T>(spec.f0)};
    Dop853<T, 2> ode(rhs, opt);
    tr.t = grid;
    tr.s.reserve(grid.size());
    ode.integrate(grid.front(), grid.back(), {s0.a, s0.b}, grid,
                  [&](const T&, const std::array<std::complex<T>, 2>& y, const T& ls) {
                      using std::exp;
                      T sc = exp(ls);
                      tr.s.push_back({sc * y[0], sc * y[1]});
                  });
    return tr;
}

// b = alpha a + beta adot with alpha = -f3/(f1 - i f2), beta = i/(f1 - i f2).
template <class T = double>
inline std::complex<T> b_from_a(const DriveSpec& spec, const std::complex<T>& a, const std::complex<T>& adot,
                                const T& t) {
    using std::abs;
    Vec3<T> f = f_at<T>(spec, t);
    std::complex<T> u = f.upper();
    if (abs(u) <= T(1e-12) * std::max(norm(f), T(1e-300)))
        throw Error(ErrorCode::LowerTriangularPoint, "f1 - i f2 vanishes; solve for b first");
    return (-f.f3 * a + std::complex<T>(0, 1) * adot) / u;
}

template <class T>
inline std::complex<T> wronskian(const std::complex<T>& y1, const std::complex<T>& y1dot, const std::complex<T>& y2,
                                 const std::complex<T>& y2dot) {
    return y1 * y2dot - y1dot * y2;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<double>& t, const std::vector<StateVector>& s) {
    os << "t,re_a,im_a,re_b,im_b,re_psi,im_psi\n";
    char buf[512];
    for (std::size_t k = 0; k < t.size(); ++k) {
        cplx psi = s[k].psi();
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t[k], s[k].a.real(),
                      s[k].a.imag(), s[k].b.real(), s[k].b.imag(), psi.real(), psi.imag());
        os << buf;
    }
}

}  // namespace nhfloquet
