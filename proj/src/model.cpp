#include "dlkit/model.hpp"
#include <sstream>

namespace dlkit {

ModelParams ModelParams::make(int n, double alpha, double beta) {
    if (n < 1) throw ValidationError("n must be a positive integer");
    if (!(alpha >= 0) || !std::isfinite(alpha)) throw ValidationError("alpha must be a nonnegative real");
    if (!(beta >= 0) || !std::isfinite(beta)) throw ValidationError("beta must be a nonnegative real");
    ModelParams p;
    p.n = n;
    p.alpha = alpha;
    p.beta = beta;
    p.delta = alpha - (n - 1) * beta / 2.0;
    if (beta == 0) {
        if (!(alpha > 0)) throw ValidationError("non-interacting mode requires alpha > 0");
        p.regime = Regime::free;
    } else {
        if (beta < 1) throw ValidationError("interacting mode requires beta >= 1");
        if (!(p.delta > 1)) {
            std::ostringstream os;
            os << "interacting mode requires delta = alpha - (n-1) beta/2 > 1, got " << p.delta;
            throw ValidationError(os.str());
        }
        p.regime = Regime::interacting;
    }
    return p;
}

ModelParams ModelParams::matrix_induced(int n, int m) {
    if (n < 1 || m < n) throw ValidationError("matrix route requires 1 <= n <= m");
    ModelParams p;
    p.n = n;
    p.alpha = m / 2.0;
    p.beta = 1.0;
    p.delta = p.alpha - (n - 1) / 2.0;
    p.regime = Regime::matrix_induced;
    return p;
}

double ModelParams::phi_norm_sq(PhiConvention c) const {
    double v = alpha * n;
    if (c == PhiConvention::printed) v += 0.5 * beta * (n - 1.0) * (n - 1.0);
    return v;
}

GeneralizedModel canonicalize(int n, double alpha, double beta_prime, double sigma, double lambda) {
    if (!(sigma > 0) || !(lambda > 0)) throw ValidationError("sigma and lambda must be positive");
    double s2 = sigma * sigma;
    GeneralizedModel g{ModelParams::make(n, 2.0 * alpha / s2, 4.0 * beta_prime / s2), 2.0 * lambda / s2, lambda};
    return g;
}

double ParticleState::sum() const {
    double s = 0;
    for (double v : coords) s += v;
    return s;
}

bool ParticleState::in_closed_chamber() const {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!(coords[i] >= 0) || !std::isfinite(coords[i])) return false;
        if (i > 0 && coords[i] < coords[i - 1]) return false;
    }
    return true;
}

double collision_tolerance(const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return 1e-12 * (1.0 + m);
}

void check_nonnegative(const std::vector<double>& x) {
    for (double v : x)
        if (!(v >= 0)) throw DomainError("negative or non-finite coordinate");
}

void check_separated(const std::vector<double>& x, bool absolute_values) {
    double tol = collision_tolerance(x);
    std::vector<double> s = x;
    if (absolute_values)
        for (auto& v : s) v = std::abs(v);
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] - s[i - 1] <= tol) throw CollisionError("colliding coordinates");
}

std::vector<double> dl_drift(const ParticleState& state, const ModelParams& params) {
    if (static_cast<int>(state.size()) != params.n) throw SizeMismatch("state size differs from n");
    check_nonnegative(state.coords);
    if (params.beta > 0) check_separated(state.coords);
    if (params.beta == 0) {
        std::vector<double> b(state.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = params.alpha - state[i];
        return b;
    }
    return dl_drift_generic(state.coords, params.alpha, params.beta);
}

std::vector<double> edl_drift(const std::vector<double>& y, const ModelParams& params) {
    if (static_cast<int>(y.size()) != params.n) throw SizeMismatch("state size differs from n");
    for (double v : y)
        if (!(v > 0)) throw DomainError("square-root coordinates must be positive");
    if (params.beta > 0) check_separated(y, true);
    std::vector<double> b;
    edl_drift_into(y, params, b);
    return b;
}

void edl_drift_into(const std::vector<double>& y, const ModelParams& params, std::vector<double>& out) {
    std::size_t n = y.size();
    out.assign(n, 0.0);
    double c = 2.0 * params.delta - 1.0;
    for (std::size_t i = 0; i < n; ++i) out[i] = (c != 0 ? c / y[i] : 0.0) - 0.5 * y[i];
    if (params.beta == 0) return;
    double tb = 2.0 * params.beta;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = (y[i] - y[j]) * (y[i] + y[j]);
            out[i] += tb * y[i] / d;
            out[j] -= tb * y[j] / d;
        }
}

double interaction_antisymmetric_sum(const ParticleState& state) {
    check_separated(state.coords);
    double s = 0;
    for (std::size_t i = 0; i < state.size(); ++i)
        for (std::size_t j = 0; j < state.size(); ++j)
            if (i != j) s += (state[i] + state[j]) / (state[i] - state[j]);
    return s;
}

double apply_generator(const TestFunction& f, const ParticleState& state, const ModelParams& params) {
    std::vector<double> b = dl_drift(state, params);
    double acc = 0;
    for (int i = 0; i < params.n; ++i) {
        Polynomial fi = f.derivative(i);
        acc += state[i] * fi.derivative(i)(state.coords) + b[i] * fi(state.coords);
    }
    return acc;
}

ObservableResult observable_phi(const ParticleState& state, const ModelParams& params, PhiConvention conv) {
    ObservableResult r;
    r.phi_raw = state.sum();
    r.phi_l2norm_sq = params.phi_norm_sq(conv);
    r.phi_centered = r.phi_raw - r.phi_l2norm_sq;
    return r;
}

TestFunction phi_function(const ModelParams& params, PhiConvention conv) {
    return Polynomial::linear(std::vector<double>(params.n, 1.0), -params.phi_norm_sq(conv));
}

std::vector<double> to_sqrt_coords(const ParticleState& x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 2.0 * std::sqrt(x[i]);
    return y;
}

ParticleState from_sqrt_coords(const std::vector<double>& y) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = 0.25 * y[i] * y[i];
    return ParticleState(std::move(x));
}

}
