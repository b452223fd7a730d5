#include "dlkit/simulate.hpp"
#include <cmath>
#include <algorithm>

namespace dlkit {

MatrixParams MatrixParams::bru(int n, int m) {
    MatrixParams p{n, m, std::sqrt(m / 2.0), 0.5};
    p.validate();
    return p;
}

void MatrixParams::validate() const {
    if (n < 1 || m < n) throw ValidationError("matrix params require 1 <= n <= m");
    if (!(kappa > 0) || !(gamma > 0)) throw ValidationError("kappa and gamma must be positive");
}

bool MatrixParams::is_bru() const {
    return std::abs(kappa * kappa - m / 2.0) < 1e-12 * m && std::abs(gamma - 0.5) < 1e-15;
}

void check_time_grid(const std::vector<double>& times) {
    if (times.empty()) throw DomainError("empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0) || !std::isfinite(times[i])) throw DomainError("time grid must be nonnegative");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("time grid must be strictly increasing");
    }
}

std::vector<double> step_sqrt_coords(const std::vector<double>& y, double dt, const ModelParams& params,
                                     const std::vector<double>& xi) {
    std::size_t n = y.size();
    std::vector<double> b;
    edl_drift_into(y, params, b);
    double sd = std::sqrt(2.0 * dt);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(b[i])) throw StepRejected("non-finite drift");
        if (std::abs(b[i]) * dt > std::max(0.5 * y[i], 4.0 * sd)) throw StepRejected("drift displacement too large");
    }
    if (params.beta > 0)
        for (std::size_t i = 1; i < n; ++i)
            if (!(y[i] + b[i] * dt > y[i - 1] + b[i - 1] * dt)) throw StepRejected("drift step breaks ordering");
    std::vector<double> out(n);
    double tau = 6.0 * sd;
    for (std::size_t i = 0; i < n; ++i) {
        double v = y[i] + b[i] * dt + sd * xi[i];
        if (v < -tau) throw StepRejected("step leaves the positive orthant");
        out[i] = std::abs(v);
    }
    std::sort(out.begin(), out.end());
    if (params.beta > 0) {
        double tol = collision_tolerance(out);
        for (std::size_t i = 1; i < n; ++i)
            if (out[i] - out[i - 1] <= tol) throw StepRejected("collision after step");
    }
    return out;
}

ParticleState step_dl_sqrt_noise(const ParticleState& state, double dt, const ModelParams& params,
                                 const std::vector<double>& xi) {
    if (!(dt > 0)) throw DomainError("dt must be positive");
    check_nonnegative(state.coords);
    if (params.beta > 0) check_separated(state.coords);
    return from_sqrt_coords(step_sqrt_coords(to_sqrt_coords(state), dt, params, xi));
}

ParticleState step_dl_sqrt(const ParticleState& state, double dt, const ModelParams& params, RngStream& rng) {
    std::vector<double> xi(state.size());
    for (auto& v : xi) v = rng.normal();
    return step_dl_sqrt_noise(state, dt, params, xi);
}

double default_dt(const ParticleState& state, const ModelParams& params) {
    if (params.beta == 0) return 1e-3;
    std::vector<double> y = to_sqrt_coords(state);
    std::sort(y.begin(), y.end());
    double gap = 1.0;
    for (std::size_t i = 1; i < y.size(); ++i) gap = std::min(gap, y[i] - y[i - 1]);
    return std::max(1e-3 * gap, 1e-7);
}

namespace {

void substep(std::vector<double>& y, double h, const ModelParams& params, RngStream& rng, std::vector<double>& xi,
             int depth, int max_halvings) {
    for (auto& v : xi) v = rng.normal();
    try {
        y = step_sqrt_coords(y, h, params, xi);
    } catch (const StepRejected&) {
        if (depth >= max_halvings) throw NumericFailure("step size halving limit reached");
        substep(y, 0.5 * h, params, rng, xi, depth + 1, max_halvings);
        substep(y, 0.5 * h, params, rng, xi, depth + 1, max_halvings);
    }
}

}

void advance_sqrt_coords(std::vector<double>& y, double horizon, double dt, const ModelParams& params,
                         RngStream& rng, int max_halvings) {
    if (!(dt > 0)) throw DomainError("dt must be positive");
    std::vector<double> xi(y.size());
    double t = 0;
    while (horizon - t > 1e-12 * std::max(1.0, horizon)) {
        double h = std::min(dt, horizon - t);
        substep(y, h, params, rng, xi, 0, max_halvings);
        t += h;
    }
}

ParticleState advance_dl_sqrt(const ParticleState& state, double horizon, double dt, const ModelParams& params,
                              RngStream& rng) {
    check_nonnegative(state.coords);
    if (params.beta > 0) check_separated(state.coords);
    std::vector<double> y = to_sqrt_coords(state);
    advance_sqrt_coords(y, horizon, dt, params, rng);
    return from_sqrt_coords(y);
}

Path dl_sqrt_path(const ParticleState& x0, const std::vector<double>& times, const ModelParams& params,
                  RngStream& rng, double dt) {
    check_time_grid(times);
    if (static_cast<int>(x0.size()) != params.n) throw SizeMismatch("x0 size differs from n");
    check_nonnegative(x0.coords);
    if (params.beta > 0) check_separated(x0.coords);
    if (dt <= 0) dt = default_dt(x0, params);
    Path p;
    p.scheme = "euler-sqrt";
    std::vector<double> y = to_sqrt_coords(x0);
    std::sort(y.begin(), y.end());
    double t = 0;
    for (double tk : times) {
        if (tk > t) advance_sqrt_coords(y, tk - t, dt, params, rng);
        t = tk;
        p.times.push_back(tk);
        p.states.push_back(from_sqrt_coords(y));
    }
    return p;
}

double cir_exact_transition(double x0, double t, double alpha, RngStream& rng) {
    if (!(t > 0) || !(alpha > 0) || !(x0 >= 0)) throw DomainError("cir transition needs t > 0, alpha > 0, x0 >= 0");
    double one_minus = -std::expm1(-t);
    double lam = x0 * std::exp(-t) / one_minus;
    auto k = rng.poisson(lam);
    return one_minus * rng.gamma(alpha + static_cast<double>(k));
}

Path cir_path(double x0, const std::vector<double>& times, double alpha, RngStream& rng) {
    check_time_grid(times);
    Path p;
    p.scheme = "cir-exact";
    double t = 0, x = x0;
    for (double tk : times) {
        if (tk > t) x = cir_exact_transition(x, tk - t, alpha, rng);
        t = tk;
        p.times.push_back(tk);
        p.states.push_back(ParticleState({x}));
    }
    return p;
}

MatrixState rect_ou_transition(const MatrixState& M0, double t, const MatrixParams& params, RngStream& rng) {
    params.validate();
    if (M0.rows() != params.n || M0.cols() != params.m) throw SizeMismatch("matrix shape differs from params");
    if (!(t >= 0)) throw DomainError("negative time");
    if (t == 0) return M0;
    double decay = std::exp(-params.gamma * t);
    double sd = std::sqrt(params.kappa * params.kappa / (2 * params.gamma) * -std::expm1(-2 * params.gamma * t));
    MatrixState M(params.n, params.m);
    for (int j = 0; j < params.m; ++j)
        for (int i = 0; i < params.n; ++i) M(i, j) = decay * M0(i, j) + sd * rng.normal();
    return M;
}

ParticleState spectral_projection(const MatrixState& M) {
    Eigen::MatrixXd S = M * M.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("symmetric eigensolver did not converge");
    std::vector<double> x(es.eigenvalues().data(), es.eigenvalues().data() + S.rows());
    for (auto& v : x) v = std::max(v, 0.0);
    std::sort(x.begin(), x.end());
    return ParticleState(std::move(x));
}

std::vector<double> singular_values(const MatrixState& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    std::vector<double> v(s.data(), s.data() + s.size());
    std::sort(v.begin(), v.end());
    return v;
}

MatrixState matrix_start(const ParticleState& x0, const MatrixParams& params) {
    params.validate();
    if (static_cast<int>(x0.size()) != params.n) throw SizeMismatch("x0 size differs from n");
    check_nonnegative(x0.coords);
    MatrixState M = MatrixState::Zero(params.n, params.m);
    for (int i = 0; i < params.n; ++i) M(i, i) = std::sqrt(x0[i] / params.eigen_scale());
    return M;
}

namespace {

ParticleState scaled_projection(const MatrixState& M, const MatrixParams& params) {
    ParticleState x = spectral_projection(M);
    for (auto& v : x.coords) v *= params.eigen_scale();
    return x;
}

}

Path matrix_dl_path(const MatrixState& M0, const std::vector<double>& times, const MatrixParams& params,
                    RngStream& rng) {
    check_time_grid(times);
    params.validate();
    Path p;
    p.scheme = "matrix-exact";
    MatrixState M = M0;
    double t = 0;
    for (double tk : times) {
        if (tk > t) M = rect_ou_transition(M, tk - t, params, rng);
        t = tk;
        p.times.push_back(tk * params.time_scale());
        p.states.push_back(scaled_projection(M, params));
    }
    return p;
}

std::vector<Path> ensemble_dl_sqrt_paths(const ParticleState& x0, const std::vector<double>& times,
                                         const ModelParams& params, int replicas, const RngStream& rng, double dt,
                                         Exec exec) {
    check_time_grid(times);
    std::vector<Path> out(replicas);
    if (dt <= 0) dt = default_dt(x0, params);
    std::string err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < replicas; ++r) {
        try {
            RngStream s = rng.child(r);
            out[r] = dl_sqrt_path(x0, times, params, s, dt);
        } catch (const std::exception& e) {
#pragma omp critical
            err = e.what();
        }
    }
    if (!err.empty()) throw NumericFailure("replica failed: " + err);
    return out;
}

std::vector<Path> ensemble_matrix_paths(const MatrixState& M0, const std::vector<double>& times,
                                        const MatrixParams& params, int replicas, const RngStream& rng, Exec exec) {
    check_time_grid(times);
    std::vector<Path> out(replicas);
    std::string err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < replicas; ++r) {
        try {
            RngStream s = rng.child(r);
            out[r] = matrix_dl_path(M0, times, params, s);
        } catch (const std::exception& e) {
#pragma omp critical
            err = e.what();
        }
    }
    if (!err.empty()) throw NumericFailure("replica failed: " + err);
    return out;
}

std::vector<std::vector<double>> ensemble_matrix_phi(const MatrixState& M0, const std::vector<double>& times,
                                                     const MatrixParams& params, int replicas, const RngStream& rng,
                                                     Exec exec) {
    check_time_grid(times);
    params.validate();
    std::vector<std::vector<double>> out(times.size(), std::vector<double>(replicas));
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < replicas; ++r) {
        RngStream s = rng.child(r);
        MatrixState M = M0;
        double t = 0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] > t) M = rect_ou_transition(M, times[k] - t, params, s);
            t = times[k];
            out[k][r] = M.squaredNorm() * params.eigen_scale();
        }
    }
    return out;
}

std::vector<std::vector<double>> ensemble_sqrt_phi(const ParticleState& x0, const std::vector<double>& times,
                                                   const ModelParams& params, int replicas, const RngStream& rng,
                                                   double dt, Exec exec) {
    std::vector<Path> paths = ensemble_dl_sqrt_paths(x0, times, params, replicas, rng, dt, exec);
    std::vector<std::vector<double>> out(times.size(), std::vector<double>(replicas));
    for (int r = 0; r < replicas; ++r)
        for (std::size_t k = 0; k < times.size(); ++k) out[k][r] = paths[r].states[k].sum();
    return out;
}

}
