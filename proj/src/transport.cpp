#include "dlkit/transport.hpp"
#include "dlkit/stats.hpp"
#include <algorithm>
#include <cmath>
#include <numeric>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

namespace dlkit {

std::string to_string(DistKind k) {
    switch (k) {
        case DistKind::TV: return "TV";
        case DistKind::KL: return "KL";
        case DistKind::L2: return "L2";
        case DistKind::Wg1: return "Wg1";
        case DistKind::Wg2: return "Wg2";
        case DistKind::W2: return "W2";
    }
    return "?";
}

DistKind parse_dist_kind(const std::string& s) {
    if (s == "TV") return DistKind::TV;
    if (s == "KL") return DistKind::KL;
    if (s == "L2") return DistKind::L2;
    if (s == "Wg1") return DistKind::Wg1;
    if (s == "Wg2") return DistKind::Wg2;
    if (s == "W2") return DistKind::W2;
    throw ValidationError("unknown distance kind '" + s + "'");
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<ParticleState> atoms) {
    EmpiricalMeasure m;
    m.weights.assign(atoms.size(), atoms.empty() ? 0.0 : 1.0 / atoms.size());
    m.atoms = std::move(atoms);
    return m;
}

void EmpiricalMeasure::validate() const {
    if (atoms.empty()) throw EmptySample("empirical measure has no atoms");
    if (weights.size() != atoms.size()) throw SizeMismatch("weights and atoms differ in count");
    double s = 0;
    for (double w : weights) {
        if (!(w >= 0)) throw DomainError("negative weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("weights must sum to 1");
    for (const auto& a : atoms)
        if (a.size() != atoms[0].size()) throw SizeMismatch("atoms differ in dimension");
}

bool EmpiricalMeasure::is_uniform() const {
    double w0 = 1.0 / atoms.size();
    for (double w : weights)
        if (std::abs(w - w0) > 1e-15) return false;
    return true;
}

Eigen::MatrixXd intrinsic_cost_matrix(const std::vector<ParticleState>& a, const std::vector<ParticleState>& b,
                                      int order, Exec exec) {
    if (order != 1 && order != 2) throw DomainError("order must be 1 or 2");
    int na = a.size(), nb = b.size();
    int d = na ? a[0].size() : 0;
    Eigen::MatrixXd ra(na, d), rb(nb, d);
    for (int i = 0; i < na; ++i)
        for (int k = 0; k < d; ++k) ra(i, k) = std::sqrt(a[i][k]);
    for (int j = 0; j < nb; ++j)
        for (int k = 0; k < d; ++k) rb(j, k) = std::sqrt(b[j][k]);
    Eigen::MatrixXd C(na, nb);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) {
                double t = ra(i, k) - rb(j, k);
                s += t * t;
            }
            C(i, j) = order == 2 ? 4.0 * s : 2.0 * std::sqrt(s);
        }
    return C;
}

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
    int n = cost.rows();
    if (cost.cols() != n) throw SizeMismatch("assignment needs a square cost matrix");
    const double inf = std::numeric_limits<double>::infinity();
    // potentials method, rows 1..n, columns 1..n, column 0 is a sentinel
    std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    Assignment a;
    a.col_for_row.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) a.col_for_row[p[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i) a.cost += cost(i, a.col_for_row[i]);
    return a;
}

namespace {

double logsumexp(const double* v, int n, int stride) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::max(m, v[i * stride]);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::exp(v[i * stride] - m);
    return m + std::log(s);
}

}

SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const std::vector<double>& wa, const std::vector<double>& wb,
                        double epsilon, int max_iter, double tol) {
    int na = cost.rows(), nb = cost.cols();
    std::vector<double> f(na, 0), g(nb, 0), la(na), lb(nb);
    for (int i = 0; i < na; ++i) la[i] = std::log(wa[i]);
    for (int j = 0; j < nb; ++j) lb[j] = std::log(wb[j]);
    std::vector<double> buf(std::max(na, nb));
    SinkhornResult r{0, epsilon, 0, false};
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < na; ++i) {
            for (int j = 0; j < nb; ++j) buf[j] = (g[j] - cost(i, j)) / epsilon + lb[j];
            f[i] = -epsilon * logsumexp(buf.data(), nb, 1);
        }
        for (int j = 0; j < nb; ++j) {
            for (int i = 0; i < na; ++i) buf[i] = (f[i] - cost(i, j)) / epsilon + la[i];
            g[j] = -epsilon * logsumexp(buf.data(), na, 1);
        }
        // row marginal error after the column update
        double err = 0;
        for (int i = 0; i < na; ++i) {
            double s = 0;
            for (int j = 0; j < nb; ++j) s += std::exp((f[i] + g[j] - cost(i, j)) / epsilon + la[i] + lb[j]);
            err += std::abs(s - wa[i]);
        }
        r.iterations = it + 1;
        if (err < tol) {
            r.converged = true;
            break;
        }
    }
    double c = 0;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) c += std::exp((f[i] + g[j] - cost(i, j)) / epsilon + la[i] + lb[j]) * cost(i, j);
    r.transport_cost = c;
    return r;
}

DistanceEstimate wasserstein_intrinsic(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int order,
                                       const OtOptions& opt) {
    a.validate();
    b.validate();
    if (a.atoms[0].size() != b.atoms[0].size()) throw SizeMismatch("measures live in different dimensions");
    if (order != 1 && order != 2) throw DomainError("order must be 1 or 2");
    DistanceEstimate est;
    est.kind = order == 1 ? DistKind::Wg1 : DistKind::Wg2;
    Eigen::MatrixXd C = intrinsic_cost_matrix(a.atoms, b.atoms, order, opt.exec);
    if (opt.method == OtMethod::exact_assignment) {
        if (a.atoms.size() != b.atoms.size()) throw SizeMismatch("exact assignment needs equal atom counts");
        if (!a.is_uniform() || !b.is_uniform()) throw NonUniformWeights("exact assignment needs uniform weights");
        Assignment as = solve_assignment(C);
        int N = a.atoms.size();
        std::vector<double> costs(N);
        for (int i = 0; i < N; ++i) costs[i] = C(i, as.col_for_row[i]);
        double mean = as.cost / N;
        est.method = "assignment";
        if (order == 2) {
            est.value = std::sqrt(std::max(mean, 0.0));
            est.stderr = N > 1 && est.value > 0 ? moments(costs).stderr_mean / (2 * est.value) : 0.0;
        } else {
            est.value = mean;
            est.stderr = N > 1 ? moments(costs).stderr_mean : 0.0;
        }
        return est;
    }
    double scale = C.mean();
    double eps = opt.epsilon * (scale > 0 ? scale : 1.0);
    SinkhornResult sr = sinkhorn(C, a.weights, b.weights, eps, opt.max_iter, opt.tol);
    est.method = "entropic";
    est.regularization = eps;
    est.value = order == 2 ? std::sqrt(std::max(sr.transport_cost, 0.0)) : sr.transport_cost;
    est.stderr = 0;
    return est;
}

OUParams OUParams::from_sigma_theta(std::vector<double> z0, int n, int m, double sigma2, double theta) {
    OUParams p;
    p.z0 = std::move(z0);
    p.n = n;
    p.m = m;
    p.kappa = std::sqrt(sigma2);
    p.gamma = theta;
    p.validate();
    return p;
}

OUParams OUParams::isotropic(double z0_norm_sq, int n, int m, double kappa, double gamma) {
    OUParams p;
    p.z0.assign(1, std::sqrt(std::max(z0_norm_sq, 0.0)));
    p.n = n;
    p.m = m;
    p.kappa = kappa;
    p.gamma = gamma;
    p.validate();
    return p;
}

double OUParams::z0_norm_sq() const {
    double s = 0;
    for (double v : z0) s += v * v;
    return s;
}

void OUParams::validate() const {
    if (n < 1 || m < 1) throw ValidationError("OU shape must be positive");
    if (!(kappa > 0) || !(gamma > 0)) throw ValidationError("OU rates must be positive");
    if (!std::isfinite(z0_norm_sq())) throw ValidationError("|z0|^2 must be finite");
}

double neg_log1m_minus(double e) {
    if (e < 1e-4) {
        double s = 0, p = e;
        for (int k = 2; k < 12; ++k) {
            p *= e;
            s += p / k;
        }
        return s;
    }
    return -e - std::log1p(-e);
}

OUFormulas ou_closed_forms(const OUParams& p, double t, FormulaVariant variant) {
    p.validate();
    if (!(t > 0)) throw DomainError("OU formulas need t > 0");
    double N = static_cast<double>(p.n) * p.m;
    double z2 = p.z0_norm_sq();
    double k2 = p.kappa * p.kappa;
    double e = std::exp(-2 * p.gamma * t);
    double one_minus = -std::expm1(-2 * p.gamma * t);
    OUFormulas f;
    f.kl = 0.5 * ((2 * p.gamma / k2) * z2 * e + N * neg_log1m_minus(e));
    double kfac = variant == FormulaVariant::validated ? k2 : p.kappa;
    double expo = (2 * p.gamma / kfac) * z2 * e / (1 + e) - 0.5 * N * std::log1p(-e * e);
    f.chi2 = std::expm1(expo);
    double b = k2 / (2 * p.gamma);
    double r = 1 - std::sqrt(one_minus);
    f.w2_sq = z2 * e + N * b * (variant == FormulaVariant::validated ? r * r : r);
    return f;
}

std::map<DistKind, DistanceEstimate> ou_closed_form_distances(const OUParams& p, double t, FormulaVariant variant) {
    OUFormulas f = ou_closed_forms(p, t, variant);
    std::map<DistKind, DistanceEstimate> out;
    out[DistKind::KL] = {DistKind::KL, f.kl, 0.0, "closed-form", 0};
    out[DistKind::L2] = {DistKind::L2, std::sqrt(std::max(f.chi2, 0.0)), 0.0, "closed-form", 0};
    out[DistKind::W2] = {DistKind::W2, std::sqrt(std::max(f.w2_sq, 0.0)), 0.0, "closed-form", 0};
    return out;
}

DistanceEstimate tv_threshold_witness(const std::vector<double>& samples_p, const std::vector<double>& samples_q) {
    if (samples_p.empty() || samples_q.empty()) throw EmptySample("threshold witness needs samples");
    KsResult ks = ks_two_sample(samples_p, samples_q);
    // DKW band at the one-sigma level for each empirical CDF
    double c = std::sqrt(std::log(2.0 / 0.3173) / 2.0);
    DistanceEstimate e;
    e.kind = DistKind::TV;
    e.value = std::min(1.0, ks.statistic);
    e.stderr = c * (1.0 / std::sqrt(double(samples_p.size())) + 1.0 / std::sqrt(double(samples_q.size())));
    e.method = "threshold-witness";
    return e;
}

double knn_entropy_1d(std::vector<double> s, int k) {
    int N = s.size();
    if (N <= k) throw EmptySample("kNN entropy needs more than k samples");
    std::sort(s.begin(), s.end());
    double acc = 0;
    for (int i = 0; i < N; ++i) {
        int lo = i, hi = i;
        double eps = 0;
        for (int r = 0; r < k; ++r) {
            double dl = lo > 0 ? s[i] - s[lo - 1] : std::numeric_limits<double>::infinity();
            double dh = hi + 1 < N ? s[hi + 1] - s[i] : std::numeric_limits<double>::infinity();
            if (dl <= dh) {
                --lo;
                eps = dl;
            } else {
                ++hi;
                eps = dh;
            }
        }
        eps = std::max(eps, 1e-12 * (1.0 + std::abs(s[i])));
        acc += std::log(eps);
    }
    using boost::math::digamma;
    return digamma(double(N)) - digamma(double(k)) + std::log(2.0) + acc / N;
}

namespace {

void check_normalized(const std::function<double(double)>& logq, double normalizer, const KlOptions& opt,
                      double center, double scale) {
    double lo = opt.support_lower, hi = opt.support_upper;
    double a = std::max(lo, center - 40 * scale), b = std::min(hi, center + 40 * scale);
    auto dens = [&](double x) {
        double v = std::exp(logq(x)) / normalizer;
        return std::isfinite(v) ? v : 0.0;
    };
    double total = 0;
    boost::math::quadrature::tanh_sinh<double> ts;
    if (b > a) total += ts.integrate(dens, a, b);
    if (a > lo) {
        if (std::isfinite(lo))
            total += ts.integrate(dens, lo, a);
        else
            total += boost::math::quadrature::exp_sinh<double>().integrate([&](double u) { return dens(a - u); },
                                                                           0.0, std::numeric_limits<double>::infinity());
    }
    if (hi > b) {
        if (std::isfinite(hi))
            total += ts.integrate(dens, b, hi);
        else
            total += boost::math::quadrature::exp_sinh<double>().integrate(dens, b, std::numeric_limits<double>::infinity());
    }
    if (!(std::abs(total - 1.0) <= 1e-6))
        throw UnnormalizedReference("reference density integrates to " + std::to_string(total));
}

double kl_value(const std::vector<double>& s, const std::function<double(double)>& logq, double log_norm, int k) {
    double cross = 0;
    for (double x : s) cross += logq(x) - log_norm;
    cross /= s.size();
    if (!std::isfinite(cross)) return std::numeric_limits<double>::infinity();
    return -knn_entropy_1d(s, k) - cross;
}

}

DistanceEstimate kl_projected_estimate(const std::vector<double>& samples,
                                       const std::function<double(double)>& reference_log_density,
                                       double reference_normalizer, const KlOptions& opt) {
    if (samples.empty()) throw EmptySample("KL estimate needs samples");
    if (!(reference_normalizer > 0)) throw UnnormalizedReference("normalizer must be positive");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double center = opt.reference_center, scale = opt.reference_scale;
    if (std::isnan(center)) center = sorted[sorted.size() / 2];
    if (std::isnan(scale)) {
        double iqr = sorted[(3 * sorted.size()) / 4] - sorted[sorted.size() / 4];
        scale = std::max(iqr, 1e-3 * (1 + std::abs(center)));
    }
    check_normalized(reference_log_density, reference_normalizer, opt, center, scale);
    double log_norm = std::log(reference_normalizer);

    DistanceEstimate e;
    e.kind = DistKind::KL;
    e.method = "knn";
    double v = kl_value(samples, reference_log_density, log_norm, opt.k);
    int B = opt.batches;
    int N = samples.size();
    while (B > 1 && N / B < 4 * (opt.k + 1)) --B;
    if (B >= 2) {
        std::vector<double> vals;
        for (int b = 0; b < B; ++b) {
            std::vector<double> part(samples.begin() + (long)b * N / B, samples.begin() + (long)(b + 1) * N / B);
            vals.push_back(kl_value(part, reference_log_density, log_norm, opt.k));
        }
        // batch spread scaled to the full sample size
        e.stderr = moments(vals).stderr_mean;
    } else {
        e.stderr = std::numeric_limits<double>::infinity();
    }
    e.value = std::isfinite(v) ? std::max(v, 0.0) : v;
    return e;
}

}
