#pragma once
#include <functional>
#include <limits>
#include <string>
#include <vector>
#include "dlkit/model.hpp"
#include "dlkit/rng.hpp"
#include "dlkit/simulate.hpp"

namespace dlkit {

enum class CouplingKind { mirror, synchronous };
std::string to_string(CouplingKind k);
CouplingKind parse_coupling_kind(const std::string& s);

struct CoupledPath {
    std::vector<double> times;
    std::vector<ParticleState> x_path;
    std::vector<ParticleState> y_path;
    double coalesce_time = std::numeric_limits<double>::infinity();
    CouplingKind coupling_kind = CouplingKind::mirror;
};

// in y = 2 sqrt(x) coordinates
constexpr double merge_tolerance = 1e-8;

// second leg driven by (I - 2 e e^T) xi, e the unit vector from X to Y in y-coordinates
CoupledPath mirror_coupling_run(const ParticleState& x0, const ParticleState& y0, const std::vector<double>& times,
                                const ModelParams& params, RngStream& rng, double dt = 0.0);
CoupledPath synchronous_coupling_run(const ParticleState& x0, const ParticleState& y0,
                                     const std::vector<double>& times, const ModelParams& params, RngStream& rng,
                                     double dt = 0.0);

std::vector<CoupledPath> coupling_ensemble(CouplingKind kind, const ParticleState& x0, const ParticleState& y0,
                                           const std::vector<double>& times, const ModelParams& params,
                                           int replicas, const RngStream& rng, double dt = 0.0,
                                           Exec exec = Exec::parallel);

struct CouplingSummary {
    std::vector<double> times;
    std::vector<double> mean_distance;
    std::vector<double> stderr;
    std::vector<double> envelope;  // e^{-t/2} r_0
    std::vector<double> coalesced_fraction;
    double r0 = 0;
};
CouplingSummary summarize_coupling(const std::vector<CoupledPath>& paths);
// mean r_t <= e^{-t/2} r_0 + 3 stderr at every time
bool mirror_domination_ok(const CouplingSummary& s);

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> w;
    std::vector<double> stderr;
    std::vector<double> envelope;  // e^{-t/2} W(mu0, pi)
    double w0 = 0;
    double w0_stderr = 0;
    double floor = 0;  // W between two independent equilibrium clouds
    double floor_stderr = 0;
};

using InitialSampler = std::function<ParticleState(RngStream&)>;

DecayCurve wg_decay_estimate(const InitialSampler& mu0_sampler, const std::vector<double>& times,
                             const ModelParams& params, int replicas, const RngStream& rng, double dt = 0.0,
                             Exec exec = Exec::parallel);
// w <= envelope + 3 (floor + stderr) at every grid time
bool decay_within_envelope(const DecayCurve& c);

}
