#include "dlkit/equilibrium.hpp"
#include <algorithm>
#include <Eigen/Dense>

namespace dlkit {

namespace {

bool strictly_ordered(const std::vector<double>& x) {
    double tol = collision_tolerance(x);
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] - x[i - 1] <= tol) return false;
    return x.empty() || x[0] >= 0;
}

bool matrix_ok(const ModelParams& p) {
    double m = 2.0 * p.alpha;
    return p.beta == 1.0 && std::abs(m - std::round(m)) < 1e-12 && std::round(m) >= p.n;
}

std::vector<double> draw_product(const ModelParams& p, RngStream& rng) {
    std::vector<double> x(p.n);
    for (auto& v : x) v = rng.gamma(p.alpha);
    std::sort(x.begin(), x.end());
    return x;
}

std::vector<double> draw_matrix(const ModelParams& p, RngStream& rng) {
    int m = static_cast<int>(std::lround(2.0 * p.alpha));
    Eigen::MatrixXd G(p.n, m);
    double sd = std::sqrt(0.5);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < p.n; ++i) G(i, j) = sd * rng.normal();
    return spectral_projection(G).coords;
}

// bidiagonal beta-Laguerre model: eig(B B^T)/2
std::vector<double> draw_tridiagonal(const ModelParams& p, RngStream& rng) {
    int n = p.n;
    std::vector<double> d(n), s(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) d[i] = rng.chi(2.0 * p.alpha - p.beta * i);
    for (int i = 0; i + 1 < n; ++i) s[i] = rng.chi(p.beta * (n - 1 - i));
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag[i] = d[i] * d[i] + (i > 0 ? s[i - 1] * s[i - 1] : 0.0);
    for (int i = 0; i + 1 < n; ++i) sub[i] = s[i] * d[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("tridiagonal eigensolver did not converge");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = std::max(0.5 * es.eigenvalues()[i], 0.0);
    std::sort(x.begin(), x.end());
    return x;
}

std::vector<double> draw_long_run(const ModelParams& p, RngStream& rng, const EquilibriumOptions& opt) {
    std::vector<double> x(p.n);
    double scale = std::max(p.alpha, 1.0);
    for (int i = 0; i < p.n; ++i) x[i] = scale * 2.0 * (i + 1) / (p.n + 1);
    ParticleState s(x);
    double dt = opt.dt > 0 ? opt.dt : default_dt(s, p);
    return advance_dl_sqrt(s, opt.burn_in, dt, p, rng).coords;
}

}

GasSample sample_equilibrium(const ModelParams& params, RngStream& rng, const EquilibriumOptions& opt) {
    EquilibriumMethod m = opt.method;
    if (m == EquilibriumMethod::automatic) {
        if (params.beta == 0)
            m = EquilibriumMethod::product;
        else if (matrix_ok(params))
            m = EquilibriumMethod::matrix;
        else
            m = EquilibriumMethod::tridiagonal;
    }
    if (m == EquilibriumMethod::product && params.beta != 0) throw UnsupportedRegime("product sampler needs beta = 0");
    if (m == EquilibriumMethod::matrix && !matrix_ok(params))
        throw UnsupportedRegime("matrix sampler needs beta = 1 and 2 alpha an integer >= n");
    if (m == EquilibriumMethod::tridiagonal && !(params.delta > 0))
        throw UnsupportedRegime("bidiagonal sampler needs delta > 0");
    if (!(params.alpha > 0)) throw UnsupportedRegime("alpha must be positive");

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> x;
        std::string tag;
        switch (m) {
            case EquilibriumMethod::product: x = draw_product(params, rng); tag = "product"; break;
            case EquilibriumMethod::matrix: x = draw_matrix(params, rng); tag = "matrix"; break;
            case EquilibriumMethod::tridiagonal: x = draw_tridiagonal(params, rng); tag = "tridiagonal"; break;
            case EquilibriumMethod::long_run_sde: x = draw_long_run(params, rng, opt); tag = "long-run-sde"; break;
            default: throw UnsupportedRegime("unknown sampler");
        }
        if (params.beta == 0 || strictly_ordered(x)) return {ParticleState(std::move(x)), tag};
    }
    throw NumericFailure("equilibrium sampler kept producing duplicate coordinates");
}

std::vector<GasSample> sample_equilibrium_many(const ModelParams& params, int count, const RngStream& rng,
                                               const EquilibriumOptions& opt, Exec exec) {
    std::vector<GasSample> out(count);
    std::string err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < count; ++r) {
        try {
            RngStream s = rng.child(r);
            out[r] = sample_equilibrium(params, s, opt);
        } catch (const std::exception& e) {
#pragma omp critical
            err = e.what();
        }
    }
    if (!err.empty()) throw NumericFailure("equilibrium replica failed: " + err);
    return out;
}

std::vector<double> equilibrium_phi_samples(const ModelParams& params, int count, const RngStream& rng) {
    // sum of coordinates under the gas is Gamma(alpha n, 1) for every beta
    std::vector<double> out(count);
    for (int r = 0; r < count; ++r) {
        RngStream s = rng.child(r);
        out[r] = s.gamma(params.alpha * params.n);
    }
    return out;
}

double gibbs_energy(const ParticleState& state, const ModelParams& params) {
    for (double v : state.coords)
        if (!(v > 0)) throw DomainError("energy needs strictly positive coordinates");
    std::vector<double> x = state.coords;
    std::sort(x.begin(), x.end());
    if (params.beta != 0) check_separated(x);
    return gibbs_energy_generic(x, params.delta, params.beta);
}

double log_density_unnormalized(const ParticleState& state, const ModelParams& params) {
    return -gibbs_energy(state, params);
}

double edl_energy(const std::vector<double>& y, const ModelParams& params) {
    for (double v : y)
        if (!(v > 0)) throw DomainError("energy needs strictly positive coordinates");
    std::vector<double> s = y;
    std::sort(s.begin(), s.end());
    if (params.beta != 0) check_separated(s);
    return edl_energy_generic(s, params.delta, params.beta);
}

double edl_energy_offset(const std::vector<double>& y, const ModelParams& params) {
    double s = 0;
    for (double v : y) s += std::log(v);
    double n = params.n;
    return s + ((params.delta - 1.0) * n + params.beta * n * (n - 1) / 2.0) * std::log(4.0);
}

}
