#pragma once

#include <vector>

namespace sdg {

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double std_error = 0.0;
    long n = 0;
};

SampleStats sample_stats(const std::vector<double>& xs);

// Asymptotic two-sample Kolmogorov-Smirnov p-value.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

// Upper regularized incomplete gamma Q(s, x).
double gamma_q(double s, double x);

// P(Chi2_dof >= stat)
double chi2_pvalue(double stat, int dof);

// Least squares y = a + b x; returns {intercept, slope}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace sdg
