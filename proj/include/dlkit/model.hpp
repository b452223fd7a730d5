#pragma once
#include <vector>
#include <cmath>
#include <string>
#include <algorithm>
#include "dlkit/errors.hpp"
#include "dlkit/polynomial.hpp"

namespace dlkit {

enum class Regime { free, interacting, matrix_induced };

// exact: phi = sum x - alpha n, ||phi||^2 = alpha n (the generator's eigenfunction)
// printed: constant alpha n + (beta/2)(n-1)^2 kept for comparison runs
enum class PhiConvention { exact, printed };

// validated closed forms by default; printed ones for compatibility checks
enum class FormulaVariant { validated, printed };

struct ModelParams {
    int n = 1;
    double alpha = 1.0;
    double beta = 0.0;
    double delta = 1.0;
    Regime regime = Regime::free;

    static ModelParams make(int n, double alpha, double beta);
    // eigenvalue flow of the n x m Bru process, X = eig(M M^T)/m: alpha = m/2, beta = 1
    static ModelParams matrix_induced(int n, int m);

    bool interacting() const { return beta > 0; }
    double phi_norm_sq(PhiConvention c = PhiConvention::exact) const;
};

// dX = sigma sqrt(X) dB + (alpha - lambda X + beta' sum (xi+xj)/(xi-xj)) dt
// is the canonical process in X~ = space_scale * X, s = time_scale * t
struct GeneralizedModel {
    ModelParams params;
    double space_scale;
    double time_scale;
};
GeneralizedModel canonicalize(int n, double alpha, double beta_prime, double sigma, double lambda);

struct ParticleState {
    std::vector<double> coords;

    ParticleState() = default;
    explicit ParticleState(std::vector<double> c) : coords(std::move(c)) {}
    std::size_t size() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double sum() const;
    bool in_closed_chamber() const;
};

struct ObservableResult {
    double phi_raw;
    double phi_centered;
    double phi_l2norm_sq;
};

double collision_tolerance(const std::vector<double>& x);
void check_nonnegative(const std::vector<double>& x);
// throws CollisionError when two coordinates are closer than the tolerance
void check_separated(const std::vector<double>& x, bool absolute_values = false);

template <class T>
std::vector<T> dl_drift_generic(const std::vector<T>& x, double alpha, double beta) {
    std::size_t n = x.size();
    std::vector<T> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        T s = T(0.0);
        if (beta != 0)
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s = s + (x[i] + x[j]) / (x[i] - x[j]);
        b[i] = T(alpha) - x[i] + T(0.5 * beta) * s;
    }
    return b;
}

// printed form of the square-root coordinate drift
template <class T>
std::vector<T> edl_drift_generic(const std::vector<T>& y, double alpha, double beta) {
    std::size_t n = y.size();
    std::vector<T> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        T s = T(0.0);
        if (beta != 0)
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s = s + (y[i] * y[i] + y[j] * y[j]) / (y[i] * y[i] - y[j] * y[j]);
        b[i] = T(2.0 * alpha - 1.0) / y[i] - T(0.5) * y[i] + T(beta) / y[i] * s;
    }
    return b;
}

std::vector<double> dl_drift(const ParticleState& state, const ModelParams& params);
std::vector<double> edl_drift(const std::vector<double>& y, const ModelParams& params);
// same drift in the form (2 delta - 1)/y - y/2 + 2 beta sum y_i/(y_i^2 - y_j^2); no checks
void edl_drift_into(const std::vector<double>& y, const ModelParams& params, std::vector<double>& out);

double interaction_antisymmetric_sum(const ParticleState& state);

double apply_generator(const TestFunction& f, const ParticleState& state, const ModelParams& params);

ObservableResult observable_phi(const ParticleState& state, const ModelParams& params,
                                PhiConvention conv = PhiConvention::exact);
TestFunction phi_function(const ModelParams& params, PhiConvention conv = PhiConvention::exact);

std::vector<double> to_sqrt_coords(const ParticleState& x);
ParticleState from_sqrt_coords(const std::vector<double>& y);

}
