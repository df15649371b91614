#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdg {

using Vec = std::vector<double>;

// Error taxonomy, mapped to CLI exit codes (config=1, validation=2, numerical=3).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix, sized for state/Brownian dims of a few.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    // y = A x
    Vec apply(const Vec& x) const;
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec operator+(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
}

inline Vec operator-(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
    return x;
}

inline Vec operator*(double c, Vec x) {
    for (double& v : x) v *= c;
    return x;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

void check_finite(const Vec& x, const std::string& where);
void check_finite(double x, const std::string& where);

// Runs f(i) for i in [0, n). Iterations must be independent; results land in
// caller-owned slots so the schedule cannot change the output.
void parallel_for(int n, const std::function<void(int)>& f);

std::string format_double(double v);

} // namespace sdg
