#pragma once

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>
#include <type_traits>

namespace nhfloquet {

using cplx = std::complex<double>;
using quad = boost::multiprecision::float128;
using cquad = std::complex<quad>;

template <class T>
inline constexpr bool is_quad_v = std::is_same_v<T, quad>;

template <class T>
inline T from_string(const char* s) {
    if constexpr (is_quad_v<T>) {
        return quad(s);
    } else {
        return static_cast<T>(std::strtold(s, nullptr));
    }
}

template <class T>
inline const T& pi_v() {
    static const T v = from_string<T>("3.14159265358979323846264338327950288419716939937510");
    return v;
}

template <class T>
inline T eps_v() {
    return std::numeric_limits<T>::epsilon();
}

inline double to_double(double x) { return x; }
inline double to_double(const quad& x) { return static_cast<double>(x); }
inline cplx to_double(const cplx& z) { return z; }
inline cplx to_double(const cquad& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class T>
inline std::complex<T> widen(const cplx& z) {
    return {T(z.real()), T(z.imag())};
}

inline cquad widen_q(const cplx& z) { return {quad(z.real()), quad(z.imag())}; }
inline const cquad& widen_q(const cquad& z) { return z; }

template <class T>
inline T widen_real(double x) {
    return T(x);
}

// Phase e^{i x} without building a complex exponential.
template <class T>
inline std::complex<T> cis(const T& x) {
    using std::cos;
    using std::sin;
    return {cos(x), sin(x)};
}

template <class T>
inline T abs2(const std::complex<T>& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

// Kahan-compensated complex accumulator.
template <class T>
struct KahanSum {
    std::complex<T> sum{0, 0};
    std::complex<T> comp{0, 0};
    void add(const std::complex<T>& x) {
        std::complex<T> y = x - comp;
        std::complex<T> t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    std::complex<T> value() const { return sum; }
};

}  // namespace nhfloquet
