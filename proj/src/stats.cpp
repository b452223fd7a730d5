#include "dlkit/stats.hpp"
#include "dlkit/errors.hpp"
#include <algorithm>
#include <cmath>
#include <boost/math/special_functions/gamma.hpp>

namespace dlkit {

Moments moments(const std::vector<double>& v) {
    if (v.empty()) throw EmptySample("moments of an empty sample");
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    double var = v.size() > 1 ? s / (v.size() - 1) : 0.0;
    return {m, var, std::sqrt(var / v.size()), v.size()};
}

double variance_stderr(const std::vector<double>& v) {
    Moments mo = moments(v);
    double m4 = 0;
    for (double x : v) m4 += std::pow(x - mo.mean, 4);
    m4 /= v.size();
    double n = static_cast<double>(v.size());
    double s4 = mo.variance * mo.variance;
    return std::sqrt(std::max(0.0, (m4 - s4 * (n - 3) / (n - 1)) / n));
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0, sign = 1;
    for (int j = 1; j <= 200; ++j) {
        double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-300) return std::clamp(2 * sum, 0.0, 1.0);
        sign = -sign;
    }
    return 1.0;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptySample("two-sample KS needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double na = a.size(), nb = b.size(), d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double en = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw EmptySample("one-sample KS needs a nonempty sample");
    std::sort(a.begin(), a.end());
    double n = a.size(), d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double f = cdf(a[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    double en = std::sqrt(n);
    return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

double gamma_cdf(double x, double shape) {
    if (x <= 0) return 0.0;
    return boost::math::gamma_p(shape, x);
}

double gamma_log_pdf(double x, double shape) {
    if (x <= 0) return -INFINITY;
    return (shape - 1) * std::log(x) - x - std::lgamma(shape);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}
