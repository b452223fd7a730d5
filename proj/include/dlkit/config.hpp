#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include "dlkit/transport.hpp"

namespace dlkit {

// flat key=value run description; '#' starts a comment
struct Config {
    std::string mode = "simulate";  // simulate | distance | cutoff-profile | check-cd | couple | ou-formulas
    std::vector<int> n{4};          // a comma list is a ladder
    int m = 0;                      // 0: m = n
    double alpha = 4.0;
    double beta = 1.0;
    std::string x0_preset = "ramp";
    double x0_scale = 1.0;
    std::vector<double> times{0.0, 0.5, 1.0};
    bool times_relative = false;
    int replicas = 1000;
    std::vector<DistKind> distances{DistKind::TV, DistKind::KL};
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";
    int threads = 0;  // 0: OpenMP default
    double dt = 0.0;  // 0: chosen from the start state
    std::string route = "auto";
    int trials = 1000;
    double rho = 0.5;
    double kappa = 1.0;
    double gamma = 0.5;
    double z0_norm_sq = 1.0;
    std::string coupling = "mirror";
    std::string y0_preset = "ramp";
    double y0_scale = 3.0;

    bool operator==(const Config&) const = default;
};

const std::vector<std::string>& config_keys();

Config parse_config(const std::string& text);
Config load_config(const std::string& path);
// canonical form: every key, fixed order, round-trip exact
std::string serialize_config(const Config& c);
void validate_config(const Config& c);

std::vector<double> parse_times(const std::string& s);

}
