#pragma once
#include <vector>
#include <string>
#include <Eigen/Dense>
#include "dlkit/model.hpp"
#include "dlkit/rng.hpp"

namespace dlkit {

enum class Exec { serial, parallel };

struct MatrixParams {
    int n = 1;
    int m = 1;
    double kappa = 1.0;
    double gamma = 0.5;

    static MatrixParams bru(int n, int m);
    void validate() const;
    bool is_bru() const;
    // X = scale * eig(M M^T) follows the DL dynamics in time 2 gamma t
    double eigen_scale() const { return gamma / (kappa * kappa); }
    double time_scale() const { return 2.0 * gamma; }
    ModelParams induced_params() const { return ModelParams::matrix_induced(n, m); }
};

using MatrixState = Eigen::MatrixXd;

struct Path {
    std::vector<double> times;
    std::vector<ParticleState> states;
    std::string scheme;  // euler-sqrt | cir-exact | matrix-exact
};

// one Euler-Maruyama step in y = 2 sqrt(x), noise supplied as standard normals
std::vector<double> step_sqrt_coords(const std::vector<double>& y, double dt, const ModelParams& params,
                                     const std::vector<double>& xi);
ParticleState step_dl_sqrt_noise(const ParticleState& state, double dt, const ModelParams& params,
                                 const std::vector<double>& xi);
ParticleState step_dl_sqrt(const ParticleState& state, double dt, const ModelParams& params, RngStream& rng);

double default_dt(const ParticleState& state, const ModelParams& params);

// integrate y-coordinates over [0, horizon], halving on StepRejected
void advance_sqrt_coords(std::vector<double>& y, double horizon, double dt, const ModelParams& params,
                         RngStream& rng, int max_halvings = 30);
ParticleState advance_dl_sqrt(const ParticleState& state, double horizon, double dt, const ModelParams& params,
                              RngStream& rng);

Path dl_sqrt_path(const ParticleState& x0, const std::vector<double>& times, const ModelParams& params,
                  RngStream& rng, double dt = 0.0);

double cir_exact_transition(double x0, double t, double alpha, RngStream& rng);
Path cir_path(double x0, const std::vector<double>& times, double alpha, RngStream& rng);

MatrixState rect_ou_transition(const MatrixState& M0, double t, const MatrixParams& params, RngStream& rng);
ParticleState spectral_projection(const MatrixState& M);
std::vector<double> singular_values(const MatrixState& M);
// diagonal M0 whose scaled projection is x0
MatrixState matrix_start(const ParticleState& x0, const MatrixParams& params);

// grid is in matrix time; recorded times are DL time (identical in the Bru regime)
Path matrix_dl_path(const MatrixState& M0, const std::vector<double>& times, const MatrixParams& params,
                    RngStream& rng);

void check_time_grid(const std::vector<double>& times);

// replica r always uses rng.child(r): serial and parallel runs are bit-identical
std::vector<Path> ensemble_dl_sqrt_paths(const ParticleState& x0, const std::vector<double>& times,
                                         const ModelParams& params, int replicas, const RngStream& rng,
                                         double dt = 0.0, Exec exec = Exec::parallel);
std::vector<Path> ensemble_matrix_paths(const MatrixState& M0, const std::vector<double>& times,
                                        const MatrixParams& params, int replicas, const RngStream& rng,
                                        Exec exec = Exec::parallel);
// sum of coordinates only, via the trace identity; result[time][replica]
std::vector<std::vector<double>> ensemble_matrix_phi(const MatrixState& M0, const std::vector<double>& times,
                                                     const MatrixParams& params, int replicas,
                                                     const RngStream& rng, Exec exec = Exec::parallel);
std::vector<std::vector<double>> ensemble_sqrt_phi(const ParticleState& x0, const std::vector<double>& times,
                                                   const ModelParams& params, int replicas, const RngStream& rng,
                                                   double dt = 0.0, Exec exec = Exec::parallel);

}
