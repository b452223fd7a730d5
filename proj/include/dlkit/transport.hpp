#pragma once
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include "dlkit/model.hpp"
#include "dlkit/simulate.hpp"

namespace dlkit {

// Wg1/Wg2 intrinsic; W2 Euclidean (matrix OU level)
enum class DistKind { TV, KL, L2, Wg1, Wg2, W2 };
std::string to_string(DistKind k);
DistKind parse_dist_kind(const std::string& s);

struct DistanceEstimate {
    DistKind kind = DistKind::TV;
    double value = 0;
    double stderr = 0;
    std::string method;  // closed-form | assignment | entropic | threshold-witness | quadrature | knn
    double regularization = 0;
};

struct EmpiricalMeasure {
    std::vector<ParticleState> atoms;
    std::vector<double> weights;

    static EmpiricalMeasure uniform(std::vector<ParticleState> atoms);
    void validate() const;
    bool is_uniform() const;
};

enum class OtMethod { exact_assignment, entropic };

struct OtOptions {
    OtMethod method = OtMethod::exact_assignment;
    double epsilon = 0.01;  // entropic regularisation relative to the mean cost
    int max_iter = 5000;
    double tol = 1e-9;
    Exec exec = Exec::parallel;
};

Eigen::MatrixXd intrinsic_cost_matrix(const std::vector<ParticleState>& a, const std::vector<ParticleState>& b,
                                      int order, Exec exec = Exec::parallel);

struct Assignment {
    std::vector<int> col_for_row;
    double cost = 0;
};
// min-cost perfect matching on a square matrix, O(N^3)
Assignment solve_assignment(const Eigen::MatrixXd& cost);

struct SinkhornResult {
    double transport_cost;
    double epsilon;
    int iterations;
    bool converged;
};
SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const std::vector<double>& wa, const std::vector<double>& wb,
                        double epsilon, int max_iter, double tol);

DistanceEstimate wasserstein_intrinsic(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int order,
                                       const OtOptions& opt = {});

struct OUParams {
    std::vector<double> z0;
    int n = 1;
    int m = 1;
    double kappa = 1;
    double gamma = 0.5;

    static OUParams from_sigma_theta(std::vector<double> z0, int n, int m, double sigma2, double theta);
    static OUParams isotropic(double z0_norm_sq, int n, int m, double kappa, double gamma);
    double z0_norm_sq() const;
    int dim() const { return n * m; }
    double sigma2() const { return kappa * kappa; }
    double theta() const { return gamma; }
    void validate() const;
};

struct OUFormulas {
    double kl;
    double chi2;   // squared L2 distance
    double w2_sq;  // squared Euclidean W2
};

// -e - log(1 - e), accurate for small e
double neg_log1m_minus(double e);

OUFormulas ou_closed_forms(const OUParams& p, double t, FormulaVariant variant = FormulaVariant::validated);
std::map<DistKind, DistanceEstimate> ou_closed_form_distances(const OUParams& p, double t,
                                                              FormulaVariant variant = FormulaVariant::validated);

DistanceEstimate tv_threshold_witness(const std::vector<double>& samples_p, const std::vector<double>& samples_q);

struct KlOptions {
    double support_lower = 0.0;
    double support_upper = std::numeric_limits<double>::infinity();
    int k = 5;
    int batches = 10;
    // where the reference mass sits, used only for the normalisation check;
    // NaN means median / spread of the samples
    double reference_center = std::numeric_limits<double>::quiet_NaN();
    double reference_scale = std::numeric_limits<double>::quiet_NaN();
};

// 1-d kNN entropy plus exact cross entropy against exp(log_density)/normalizer
DistanceEstimate kl_projected_estimate(const std::vector<double>& samples,
                                       const std::function<double(double)>& reference_log_density,
                                       double reference_normalizer, const KlOptions& opt = {});
double knn_entropy_1d(std::vector<double> samples, int k);

}
