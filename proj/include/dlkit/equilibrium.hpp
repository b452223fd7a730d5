#pragma once
#include <string>
#include <vector>
#include <cmath>
#include "dlkit/model.hpp"
#include "dlkit/rng.hpp"
#include "dlkit/simulate.hpp"

namespace dlkit {

enum class EquilibriumMethod { automatic, product, matrix, tridiagonal, long_run_sde };

struct GasSample {
    ParticleState state;
    std::string method;  // product | matrix | tridiagonal | long-run-sde
};

struct EquilibriumOptions {
    EquilibriumMethod method = EquilibriumMethod::automatic;
    double burn_in = 20.0;
    double dt = 0.0;
};

GasSample sample_equilibrium(const ModelParams& params, RngStream& rng, const EquilibriumOptions& opt = {});
std::vector<GasSample> sample_equilibrium_many(const ModelParams& params, int count, const RngStream& rng,
                                               const EquilibriumOptions& opt = {}, Exec exec = Exec::parallel);
std::vector<double> equilibrium_phi_samples(const ModelParams& params, int count, const RngStream& rng);

// E(x) = sum x_i - (delta-1) sum log x_i - beta sum_{i<j} log|x_i - x_j|; needs ascending x
template <class T>
T gibbs_energy_generic(const std::vector<T>& x, double delta, double beta) {
    using std::log;
    T e = T(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        e = e + x[i] - T(delta - 1.0) * log(x[i]);
        if (beta != 0)
            for (std::size_t j = i + 1; j < x.size(); ++j) e = e - T(beta) * log(x[j] - x[i]);
    }
    return e;
}

template <class T>
T edl_energy_generic(const std::vector<T>& y, double delta, double beta) {
    using std::log;
    T e = T(0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        e = e + T(0.25) * y[i] * y[i] - T(2.0 * delta - 1.0) * log(y[i]);
        if (beta != 0)
            for (std::size_t j = i + 1; j < y.size(); ++j) e = e - T(beta) * log(y[j] * y[j] - y[i] * y[i]);
    }
    return e;
}

double gibbs_energy(const ParticleState& state, const ModelParams& params);
double log_density_unnormalized(const ParticleState& state, const ModelParams& params);
double edl_energy(const std::vector<double>& y, const ModelParams& params);
// E(x) - E~(y) at y = 2 sqrt(x): sum log y_i + [(delta-1) n + beta n(n-1)/2] log 4
double edl_energy_offset(const std::vector<double>& y, const ModelParams& params);

}
