#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include "dlkit/model.hpp"
#include "dlkit/simulate.hpp"
#include "dlkit/transport.hpp"

namespace dlkit {

struct CutoffPrediction {
    DistKind kind = DistKind::TV;
    double c_lower = 0;
    double c_upper = 0;
    std::string source;        // thm-cmc | thm-cdl | lemma-lbdl | lemma-ubmc (upper side)
    std::string lower_source;  // which lower bound was used
    bool regime_flagged = false;
    std::string note;
};

// asymptotic mixing-time formula for the matrix OU; nm_override replaces the dimension n*m when > 0
double mixing_time_ou(DistKind kind, const OUParams& p, double nm_override = 0);
// numerical inversion of the closed-form KL at level eps
double invert_ou_kl(const OUParams& p, double eps, double nm_override = 0);

CutoffPrediction cutoff_predict(DistKind kind, const ParticleState& x0, const ModelParams& params,
                                const std::optional<MatrixParams>& matrix = std::nullopt,
                                FormulaVariant variant = FormulaVariant::validated);

// lower bound on the squared L2 distance (chi-square) at time t
double lb_l2_witness(const ParticleState& x0, double t, const ModelParams& params,
                     PhiConvention conv = PhiConvention::exact);

struct DuhamelResult {
    double value;
    bool negative;  // diagnostic; cannot fire for x0 >= 0
};
DuhamelResult duhamel_variance(const ParticleState& x0, double t, const ModelParams& params,
                               PhiConvention conv = PhiConvention::exact);

double tv_lower_bound_formula(const ParticleState& x0, double t, const ModelParams& params,
                              PhiConvention conv = PhiConvention::exact);

struct LiftResult {
    double value;
    bool overflow;
};
LiftResult lift_matrix_bounds(DistKind kind, double matrix_value, int n, int m,
                              FormulaVariant variant = FormulaVariant::validated);

double kl_upper_bound_chain(const ParticleState& x0, double t, double eta, const ModelParams& params,
                            PhiConvention conv = PhiConvention::exact);

enum class X0Preset { zero, equilibrium, ramp, outlier };
X0Preset parse_x0_preset(const std::string& s);
std::string to_string(X0Preset p);
ParticleState make_x0(X0Preset preset, double scale, const ModelParams& params, RngStream& rng);

struct ProfileConfig {
    std::vector<int> n_ladder{16};
    int m = 0;  // 0 means m = n
    double alpha = 0;
    double beta = 1;
    std::string route = "auto";  // auto | matrix | sde
    X0Preset preset = X0Preset::zero;
    double x0_scale = 1.0;
    std::vector<double> times{1.0};
    bool times_relative = false;  // multiply the grid by the predicted TV critical time
    int replicas = 1000;
    std::vector<DistKind> kinds{DistKind::TV, DistKind::KL};
    double dt = 0;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
};

struct ProfileRow {
    int n = 0;
    double t = 0;
    DistKind kind = DistKind::TV;
    DistanceEstimate estimate;
    double bound_lower = 0;
    double bound_upper = 0;
    double c_pred_lower = 0;
    double c_pred_upper = 0;
    bool sandwich_ok = true;
    bool monotone_ok = true;
};

struct LadderSummary {
    int n = 0;
    int m = 0;
    std::string route;
    double c_n = 0;
    double t_hi = 0;  // TV witness crosses 0.9
    double t_lo = 0;  // TV witness crosses 0.1
    double window_ratio = 0;
};

struct CutoffProfile {
    std::vector<double> times;
    std::vector<int> n_ladder;
    std::vector<std::pair<int, CutoffPrediction>> predictions;
    std::vector<ProfileRow> rows;
    std::vector<LadderSummary> ladder;
    std::vector<std::string> fallbacks;

    bool sandwich_ok() const;
    bool monotone_ok() const;
};

CutoffProfile run_cutoff_profile(const ProfileConfig& config);
// KL rows past t = 1 decay at least like e^{-t}, within 3 stderr
bool kl_subexponential_decay_ok(const CutoffProfile& profile);
// t where a decreasing curve first crosses level, by linear interpolation; NaN if never
double crossing_time(const std::vector<double>& t, const std::vector<double>& v, double level);

}
