#pragma once
#include <vector>
#include <functional>

namespace dlkit {

struct Moments {
    double mean;
    double variance;  // unbiased
    double stderr_mean;
    std::size_t count;
};

Moments moments(const std::vector<double>& v);
// stderr of the unbiased sample variance (fourth central moment formula)
double variance_stderr(const std::vector<double>& v);

struct KsResult {
    double statistic;
    double p_value;
};

double kolmogorov_q(double lambda);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

double gamma_cdf(double x, double shape);
double gamma_log_pdf(double x, double shape);
double normal_cdf(double x);

}
