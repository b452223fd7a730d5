#include "dlkit/geometry.hpp"
#include <algorithm>
#include <cmath>
#include <limits>

namespace dlkit {

namespace {

void same_size(const ParticleState& x, const ParticleState& y) {
    if (x.size() != y.size()) throw SizeMismatch("states differ in size");
    check_nonnegative(x.coords);
    check_nonnegative(y.coords);
}

struct Derivs {
    std::vector<double> g;
    std::vector<std::vector<double>> h;
};

Derivs derivs(const TestFunction& f, const std::vector<double>& x) { return {f.gradient(x), f.hessian(x)}; }

}

double riemannian_distance(const ParticleState& x, const ParticleState& y) {
    same_size(x, y);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = std::sqrt(x[i]) - std::sqrt(y[i]);
        s += d * d;
    }
    return 2.0 * std::sqrt(s);
}

ParticleState geodesic_point(const ParticleState& x, const ParticleState& y, double t) {
    same_size(x, y);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = t * std::sqrt(y[i]) + (1 - t) * std::sqrt(x[i]);
        g[i] = r * r;
    }
    return ParticleState(std::move(g));
}

std::vector<double> geodesic_velocity(const ParticleState& x, const ParticleState& y, double t) {
    same_size(x, y);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double sx = std::sqrt(x[i]), sy = std::sqrt(y[i]);
        v[i] = 2.0 * (sy - sx) * (t * sy + (1 - t) * sx);
    }
    return v;
}

double geodesic_speed(const ParticleState& x, const ParticleState& y, double t) {
    ParticleState g = geodesic_point(x, y, t);
    std::vector<double> v = geodesic_velocity(x, y, t);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (g[i] > 0) s += v[i] * v[i] / g[i];
    return std::sqrt(s);
}

double carre_du_champ(const TestFunction& f, const ParticleState& state) {
    std::vector<double> g = f.gradient(state.coords);
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) s += state[i] * g[i] * g[i];
    return s;
}

namespace {

// explicit Gamma2 as a list of terms so that a magnitude scale comes for free
template <class Acc>
void gamma2_terms(const TestFunction& f, const ParticleState& state, const ModelParams& params, Acc&& acc) {
    if (params.beta > 0) check_separated(state.coords);
    const auto& x = state.coords;
    int n = params.n;
    Derivs d = derivs(f, x);
    double grad2 = 0, gam = 0;
    for (int i = 0; i < n; ++i) {
        grad2 += d.g[i] * d.g[i];
        gam += x[i] * d.g[i] * d.g[i];
    }
    acc(0.5 * params.delta * grad2);
    acc(0.5 * gam);
    for (int i = 0; i < n; ++i) {
        acc(x[i] * x[i] * d.h[i][i] * d.h[i][i]);
        acc(x[i] * d.g[i] * d.h[i][i]);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            acc(2.0 * x[i] * x[j] * d.h[i][j] * d.h[i][j]);
            if (params.beta == 0) continue;
            double dx2 = (x[i] - x[j]) * (x[i] - x[j]);
            double fi = d.g[i], fj = d.g[j];
            acc(0.5 * params.beta * (x[i] * x[i] * fi * fi + x[j] * x[j] * fj * fj) / dx2);
            acc(0.5 * params.beta * x[i] * x[j] / dx2 * (fi * fi - 4 * fi * fj + fj * fj));
        }
}

}

double gamma2_explicit(const TestFunction& f, const ParticleState& state, const ModelParams& params) {
    double s = 0;
    gamma2_terms(f, state, params, [&](double v) { s += v; });
    return s;
}

double gamma2_explicit_scale(const TestFunction& f, const ParticleState& state, const ModelParams& params) {
    double s = 0;
    gamma2_terms(f, state, params, [&](double v) { s += std::abs(v); });
    return s;
}

double gamma2_definitional(const TestFunction& f, const ParticleState& state, const ModelParams& params) {
    if (params.beta > 0) check_separated(state.coords);
    const auto& x = state.coords;
    int n = params.n;
    std::vector<Jet2> xs = seed_jets(x);
    std::vector<Polynomial> fi(n), fii(n);
    for (int i = 0; i < n; ++i) {
        fi[i] = f.derivative(i);
        fii[i] = fi[i].derivative(i);
    }
    std::vector<Jet2> b = dl_drift_generic(xs, params.alpha, params.beta);
    Jet2 gam(0.0), gf(0.0);
    for (int i = 0; i < n; ++i) {
        Jet2 d = fi[i].evaluate(xs);
        gam = gam + xs[i] * d * d;
        gf = gf + xs[i] * fii[i].evaluate(xs) + b[i] * d;
    }
    double g_gam = 0, gam_f_gf = 0;
    for (int i = 0; i < n; ++i) {
        g_gam += x[i] * gam.hess(i, i) + b[i].v * gam.grad(i);
        gam_f_gf += x[i] * fi[i](x) * gf.grad(i);
    }
    return 0.5 * g_gam - gam_f_gf;
}

double edl_carre_du_champ(const TestFunction& f, const std::vector<double>& y) {
    double s = 0;
    for (double g : f.gradient(y)) s += g * g;
    return s;
}

double edl_gamma2(const TestFunction& f, const std::vector<double>& y, const ModelParams& params,
                  FormulaVariant variant) {
    for (double v : y)
        if (!(v > 0)) throw DomainError("square-root coordinates must be positive");
    if (params.beta > 0) check_separated(y, true);
    int n = params.n;
    Derivs d = derivs(f, y);
    double c1 = variant == FormulaVariant::validated ? 2.0 * params.delta - 1.0 : 0.5 * (params.delta - 0.5);
    double c2 = variant == FormulaVariant::validated ? 2.0 * params.beta : 0.5 * params.beta;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s += d.h[i][j] * d.h[i][j];
        s += 0.5 * d.g[i] * d.g[i] + c1 * d.g[i] * d.g[i] / (y[i] * y[i]);
    }
    if (params.beta != 0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) {
                double den = (y[i] * y[i] - y[j] * y[j]);
                den *= den;
                double a = y[i] * d.g[i] - y[j] * d.g[j];
                double b = y[i] * d.g[j] - y[j] * d.g[i];
                s += c2 * (a * a + b * b) / den;
            }
    return s;
}

double edl_gamma2_definitional(const TestFunction& f, const std::vector<double>& y, const ModelParams& params) {
    for (double v : y)
        if (!(v > 0)) throw DomainError("square-root coordinates must be positive");
    if (params.beta > 0) check_separated(y, true);
    int n = params.n;
    std::vector<Jet2> ys = seed_jets(y);
    std::vector<Polynomial> fi(n), fii(n);
    for (int i = 0; i < n; ++i) {
        fi[i] = f.derivative(i);
        fii[i] = fi[i].derivative(i);
    }
    std::vector<Jet2> b = edl_drift_generic(ys, params.alpha, params.beta);
    Jet2 gam(0.0), gf(0.0);
    for (int i = 0; i < n; ++i) {
        Jet2 d = fi[i].evaluate(ys);
        gam = gam + d * d;
        gf = gf + fii[i].evaluate(ys) + b[i] * d;
    }
    double g_gam = 0, gam_f_gf = 0;
    for (int i = 0; i < n; ++i) {
        g_gam += gam.hess(i, i) + b[i].v * gam.grad(i);
        gam_f_gf += fi[i](y) * gf.grad(i);
    }
    return 0.5 * g_gam - gam_f_gf;
}

ParticleState random_ordered_state(const ModelParams& params, RngStream& rng, double min_gap) {
    std::vector<double> x(params.n);
    for (auto& v : x) v = rng.gamma(std::max(params.alpha, 1e-3));
    std::sort(x.begin(), x.end());
    double floor = min_gap;
    for (auto& v : x) {
        v = std::max(v, floor);
        floor = v + min_gap;
    }
    return ParticleState(std::move(x));
}

TestFunction random_polynomial(int n, int degree, RngStream& rng, double bound) {
    Polynomial p(n);
    std::vector<int> e(n, 0);
    // enumerate all exponent vectors with total degree <= degree
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == n) {
            p.add_term(e, bound * (2 * rng.uniform() - 1));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[i] = k;
            self(self, i + 1, left - k);
        }
        e[i] = 0;
    };
    rec(rec, 0, degree);
    return p;
}

CurvatureReport cd_certificate(const ModelParams& params, double rho, int trials, const RngStream& rng, Exec exec) {
    if (trials < 1) throw DomainError("cd_certificate needs at least one trial");
    struct Trial {
        double gap, scaled, rel_err, scale;
    };
    std::vector<Trial> res(trials);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (int k = 0; k < trials; ++k) {
        RngStream s = rng.child(k);
        ParticleState x = random_ordered_state(params, s);
        TestFunction f = random_polynomial(params.n, 2, s);
        double g2 = gamma2_explicit(f, x, params);
        double g2d = gamma2_definitional(f, x, params);
        double scale = std::max(1.0, gamma2_explicit_scale(f, x, params));
        double gap = g2 - rho * carre_du_champ(f, x);
        res[k] = {gap, gap / scale, std::abs(g2 - g2d) / scale, scale};
    }
    CurvatureReport rep;
    rep.samples = trials;
    rep.rho = rho;
    rep.seed = rng.seed();
    rep.stream_id = rng.stream_id();
    int worst = 0;
    for (int k = 0; k < trials; ++k) {
        if (res[k].gap < res[worst].gap) worst = k;
        rep.max_rel_err = std::max(rep.max_rel_err, res[k].rel_err);
    }
    rep.min_gap = res[worst].gap;
    rep.min_scaled_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : res) rep.min_scaled_gap = std::min(rep.min_scaled_gap, r.scaled);
    RngStream s = rng.child(worst);
    rep.worst_state = random_ordered_state(params, s);
    rep.worst_f = random_polynomial(params.n, 2, s);
    rep.worst_scale = res[worst].scale;
    return rep;
}

}
