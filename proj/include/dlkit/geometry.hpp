#pragma once
#include <cstdint>
#include <vector>
#include "dlkit/model.hpp"
#include "dlkit/rng.hpp"
#include "dlkit/simulate.hpp"

namespace dlkit {

struct CurvatureReport {
    std::size_t samples = 0;
    double rho = 0.5;
    double min_gap = 0;         // min of Gamma2 f - rho Gamma f
    double min_scaled_gap = 0;  // min of the gap divided by the term scale
    double max_rel_err = 0;     // explicit vs definitional Gamma2
    TestFunction worst_f;
    ParticleState worst_state;
    double worst_scale = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

double riemannian_distance(const ParticleState& x, const ParticleState& y);
ParticleState geodesic_point(const ParticleState& x, const ParticleState& y, double t);
std::vector<double> geodesic_velocity(const ParticleState& x, const ParticleState& y, double t);
// |gamma'(t)| in the metric g_ii = 1/x_i
double geodesic_speed(const ParticleState& x, const ParticleState& y, double t);

double carre_du_champ(const TestFunction& f, const ParticleState& state);
double gamma2_explicit(const TestFunction& f, const ParticleState& state, const ModelParams& params);
// sum of absolute values of the individual terms, used as tolerance scale
double gamma2_explicit_scale(const TestFunction& f, const ParticleState& state, const ModelParams& params);
double gamma2_definitional(const TestFunction& f, const ParticleState& state, const ModelParams& params);

double edl_carre_du_champ(const TestFunction& f, const std::vector<double>& y);
double edl_gamma2(const TestFunction& f, const std::vector<double>& y, const ModelParams& params,
                  FormulaVariant variant = FormulaVariant::validated);
double edl_gamma2_definitional(const TestFunction& f, const std::vector<double>& y, const ModelParams& params);

// sorted Gamma(alpha, 1) draws pushed apart to a minimum gap
ParticleState random_ordered_state(const ModelParams& params, RngStream& rng, double min_gap = 1e-6);
TestFunction random_polynomial(int n, int degree, RngStream& rng, double bound = 1.0);

CurvatureReport cd_certificate(const ModelParams& params, double rho, int trials, const RngStream& rng,
                               Exec exec = Exec::parallel);

}
