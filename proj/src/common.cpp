#include "sdg/common.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

namespace sdg {

Vec Mat::apply(const Vec& x) const {
    Vec y(rows, 0.0);
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

void check_finite(double x, const std::string& where) {
    if (!std::isfinite(x)) throw NumericalError("non-finite value in " + where);
}

void check_finite(const Vec& x, const std::string& where) {
    for (double v : x) check_finite(v, where);
}

void parallel_for(int n, const std::function<void(int)>& f) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
    if (n_threads <= 1 || n < 4 * n_threads) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += n_threads) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace sdg
