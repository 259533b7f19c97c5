#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace rismimo {

using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Unnormalized sinc, sinc(0) = 1.
inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

// sinc(u) / sinc(u/q) = sin(u) / (q * sin(u/q)), with the removable
// singularities resolved: 1 at u = 0, (-1)^(k(q-1)) at u = k*q*pi.
inline double sinc_ratio(double u, int q) {
    if (u == 0.0) return 1.0;
    const double den = std::sin(u / q);
    if (den == 0.0) {
        const long k = std::lround(u / (kPi * q));
        return (k * (q - 1)) % 2 == 0 ? 1.0 : -1.0;
    }
    return std::sin(u) / (q * den);
}

// Unit step with step(0) = 0.
inline double unit_step(double x) { return x > 0.0 ? 1.0 : 0.0; }

// Mathematical modulo, result in [0, m). The +0.0 clears negative zero.
inline double math_mod(double a, double m) {
    double r = std::fmod(a, m);
    if (r < 0.0) r += m;
    return r + 0.0;
}

inline long math_mod(long a, long m) {
    long r = a % m;
    if (r < 0) r += m;
    return r;
}

// Reduce an angle to [0, 2*pi).
inline double wrap_phase(double phi) {
    double r = math_mod(phi, kTwoPi);
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// Circular distance between two angles, in [0, pi].
inline double phase_distance(double a, double b) {
    const double d = math_mod(a - b, kTwoPi);
    return std::min(d, kTwoPi - d);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// 2x2 complex matrix, row-major. Small enough to pass by value.
struct Mat2 {
    cdouble a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

    cdouble det() const { return a11 * a22 - a12 * a21; }

    // Squared Frobenius norm.
    double frob2() const {
        return std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22);
    }

    Mat2 inverse() const {
        const cdouble d = det();
        if (std::abs(d) == 0.0) throw std::domain_error("Mat2: singular matrix");
        return Mat2{a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    Mat2 operator*(cdouble s) const { return Mat2{a11 * s, a12 * s, a21 * s, a22 * s}; }

    // y = M * [x1, x2]^T
    void apply(cdouble x1, cdouble x2, cdouble& y1, cdouble& y2) const {
        y1 = a11 * x1 + a12 * x2;
        y2 = a21 * x1 + a22 * x2;
    }
};

}  // namespace rismimo
