#include "dlkit/cutoff.hpp"
#include "dlkit/equilibrium.hpp"
#include "dlkit/stats.hpp"
#include <algorithm>
#include <cmath>
#include <limits>

namespace dlkit {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0 ? std::log(v) : -kInf; }

double ou_kl(double z2, double kappa, double gamma, double N, double t) {
    double e = std::exp(-2 * gamma * t);
    return 0.5 * ((2 * gamma / (kappa * kappa)) * z2 * e + N * neg_log1m_minus(e));
}

}

double mixing_time_ou(DistKind kind, const OUParams& p, double nm_override) {
    p.validate();
    double N = nm_override > 0 ? nm_override : double(p.n) * p.m;
    double s2 = p.sigma2(), th = p.theta(), z2 = p.z0_norm_sq();
    double data = 0, dim = 0;
    switch (kind) {
        case DistKind::TV:
            data = th * z2 / (4 * s2);
            dim = std::log(N / 4);
            break;
        case DistKind::KL:
            data = th * z2 / s2;
            dim = std::log(std::sqrt(N) / 2);
            break;
        case DistKind::L2:
            data = 2 * th * z2 / s2;
            dim = std::log(std::sqrt(N / 2));
            break;
        case DistKind::W2:
            data = z2;
            dim = std::log(std::sqrt(N * s2 / (8 * th)));
            break;
        default: throw DomainError("mixing_time_ou supports TV, KL, L2 and W2");
    }
    double two_theta_t = data > 0 ? std::max(std::log(data), dim) : dim;
    return two_theta_t / (2 * th);
}

double invert_ou_kl(const OUParams& p, double eps, double nm_override) {
    p.validate();
    if (!(eps > 0)) throw DomainError("level must be positive");
    double N = nm_override > 0 ? nm_override : double(p.n) * p.m;
    double z2 = p.z0_norm_sq();
    double lo = 1e-12, hi = 1.0;
    while (ou_kl(z2, p.kappa, p.gamma, N, hi) > eps) hi *= 2;
    for (int i = 0; i < 300; ++i) {
        double mid = 0.5 * (lo + hi);
        (ou_kl(z2, p.kappa, p.gamma, N, mid) > eps ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CutoffPrediction cutoff_predict(DistKind kind, const ParticleState& x0, const ModelParams& params,
                                const std::optional<MatrixParams>& matrix, FormulaVariant variant) {
    if (static_cast<int>(x0.size()) != params.n) throw SizeMismatch("x0 size differs from n");
    check_nonnegative(x0.coords);
    CutoffPrediction pr;
    pr.kind = kind;
    double A = params.alpha * params.n;
    double sum = x0.sum();
    double phi = sum - A;
    double arg = std::abs(phi) / std::sqrt(A);

    bool have_lower = false;
    if (arg > 1) {
        pr.c_lower = std::log(arg);
        pr.lower_source = "lemma-lbdl";
        have_lower = true;
    }
    if (phi <= 0) {
        double c = 0.5 * std::log(A);
        if (!have_lower || c > pr.c_lower) {
            pr.c_lower = c;
            pr.lower_source = "thm-cdl";
        }
        have_lower = true;
    }
    if (!have_lower) {
        pr.c_lower = 0;
        pr.lower_source = "none";
        pr.regime_flagged = true;
        pr.note = "RegimeError: |phi(x0)|/sqrt(alpha n) <= 1, lower-bound cutoff claim is vacuous";
    }

    if (matrix) {
        matrix->validate();
        double n = matrix->n, m = matrix->m;
        double dim = 0, data = safe_log(sum);
        bool printed = variant == FormulaVariant::printed;
        switch (kind) {
            case DistKind::TV: dim = printed ? std::log(n) : 0.5 * std::log(n * m); break;
            case DistKind::KL:
            case DistKind::L2: dim = printed ? 0.5 * std::log(n) : 0.5 * std::log(n * m); break;
            default:
                data = safe_log(m * sum);
                dim = 0.5 * std::log(n * m);
        }
        pr.c_upper = std::max(data, dim);
        pr.source = "lemma-ubmc";
    } else {
        pr.c_upper = std::max(safe_log(sum), std::log(A));
        pr.source = "thm-cdl";
    }
    if (pr.c_lower > pr.c_upper) {
        pr.regime_flagged = true;
        if (!pr.note.empty()) pr.note += "; ";
        pr.note += "lower bound exceeds the upper branch";
    }
    return pr;
}

double lb_l2_witness(const ParticleState& x0, double t, const ModelParams& params, PhiConvention conv) {
    if (!(t >= 0)) throw DomainError("t must be nonnegative");
    ObservableResult o = observable_phi(x0, params, conv);
    return o.phi_centered * o.phi_centered / o.phi_l2norm_sq * std::exp(-2 * t);
}

DuhamelResult duhamel_variance(const ParticleState& x0, double t, const ModelParams& params, PhiConvention conv) {
    if (!(t >= 0)) throw DomainError("t must be nonnegative");
    ObservableResult o = observable_phi(x0, params, conv);
    double e = std::exp(-t);
    double v = 2 * o.phi_centered * (-std::expm1(-t)) * e + o.phi_l2norm_sq * (-std::expm1(-2 * t));
    return {v, v < 0};
}

double tv_lower_bound_formula(const ParticleState& x0, double t, const ModelParams& params, PhiConvention conv) {
    ObservableResult o = observable_phi(x0, params, conv);
    double ph = o.phi_centered, N2 = o.phi_l2norm_sq;
    if (ph == 0) return 0.0;
    double var = std::max(duhamel_variance(x0, t, params, conv).value, 0.0);
    double e2 = std::exp(2 * t);
    double ph2 = ph * ph;
    // Var(ph * phi / N2) = ph^2 Var(phi) / N2^2
    double v = 1 - 4 * N2 / ph2 * e2 - 4 * (N2 * N2 / (ph2 * ph2)) * (ph2 * var / (N2 * N2)) * e2;
    return std::clamp(v, 0.0, 1.0);
}

LiftResult lift_matrix_bounds(DistKind kind, double v, int n, int m, FormulaVariant variant) {
    if (!(v >= 0)) throw DomainError("matrix value must be nonnegative");
    double nm = double(n) * m;
    switch (kind) {
        case DistKind::TV: return {std::min(1.0, nm * v), false};
        case DistKind::KL: return {nm * v, false};
        case DistKind::L2: {
            double expo = nm * std::log1p(v * v);
            if (expo > 700) return {kInf, true};
            return {std::sqrt(std::expm1(expo)), false};
        }
        default: {
            double c = variant == FormulaVariant::validated ? 2.0 : 1.0;
            return {c * std::sqrt(double(n)) * v, false};
        }
    }
}

double kl_upper_bound_chain(const ParticleState& x0, double t, double eta, const ModelParams& params,
                            PhiConvention conv) {
    if (!(eta > 0)) throw DomainError("eta must be positive");
    if (!(t >= 0)) throw DomainError("t must be nonnegative");
    check_nonnegative(x0.coords);
    double pre = std::exp(-eta) / (-std::expm1(-eta));
    return pre * (x0.sum() + params.phi_norm_sq(conv)) * std::exp(-t);
}

X0Preset parse_x0_preset(const std::string& s) {
    if (s == "zero") return X0Preset::zero;
    if (s == "equilibrium") return X0Preset::equilibrium;
    if (s == "ramp") return X0Preset::ramp;
    if (s == "outlier") return X0Preset::outlier;
    throw ValidationError("unknown x0 preset '" + s + "'");
}

std::string to_string(X0Preset p) {
    switch (p) {
        case X0Preset::zero: return "zero";
        case X0Preset::equilibrium: return "equilibrium";
        case X0Preset::ramp: return "ramp";
        case X0Preset::outlier: return "outlier";
    }
    return "?";
}

ParticleState make_x0(X0Preset preset, double scale, const ModelParams& params, RngStream& rng) {
    int n = params.n;
    std::vector<double> x(n, 0.0);
    switch (preset) {
        case X0Preset::zero: break;
        case X0Preset::equilibrium: return sample_equilibrium(params, rng).state;
        case X0Preset::ramp:
            for (int i = 0; i < n; ++i) x[i] = scale * (i + 1);
            break;
        case X0Preset::outlier:
            for (int i = 0; i + 1 < n; ++i) x[i] = params.alpha * (i + 1) / n;
            x[n - 1] = params.alpha + scale;
            break;
    }
    return ParticleState(std::move(x));
}

bool CutoffProfile::sandwich_ok() const {
    for (const auto& r : rows)
        if (!r.sandwich_ok) return false;
    return true;
}

bool CutoffProfile::monotone_ok() const {
    for (const auto& r : rows)
        if (!r.monotone_ok) return false;
    return true;
}

double crossing_time(const std::vector<double>& t, const std::vector<double>& v, double level) {
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] <= level) {
            if (k == 0) return t[0];
            double f = (v[k - 1] - level) / (v[k - 1] - v[k]);
            return t[k - 1] + f * (t[k] - t[k - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

// max over entries of the per-entry OU KL, the input of the tensorisation lift
double max_entry_kl(const MatrixState& M0, const MatrixParams& mp, double t) {
    double zmax = M0.size() ? M0.cwiseAbs().maxCoeff() : 0.0;
    double e = std::exp(-2 * mp.gamma * t);
    return 0.5 * ((2 * mp.gamma / (mp.kappa * mp.kappa)) * zmax * zmax * e + neg_log1m_minus(e));
}

}

CutoffProfile run_cutoff_profile(const ProfileConfig& cfg) {
    if (cfg.n_ladder.empty()) throw ValidationError("empty n ladder");
    if (cfg.replicas < 2) throw ValidationError("profile needs at least 2 replicas");
    check_time_grid(cfg.times);
    CutoffProfile prof;
    prof.times = cfg.times;
    prof.n_ladder = cfg.n_ladder;
    RngStream root(cfg.seed, 0);

    for (int n : cfg.n_ladder) {
        RngStream rn = root.child(n);
        int m = cfg.m > 0 ? cfg.m : n;
        bool matrix_route = cfg.route == "matrix" || (cfg.route == "auto" && cfg.beta == 1.0 && cfg.alpha == 0);
        if (cfg.route != "auto" && cfg.route != "matrix" && cfg.route != "sde")
            throw ValidationError("route must be auto, matrix or sde");
        ModelParams params = matrix_route ? ModelParams::matrix_induced(n, m) : ModelParams::make(n, cfg.alpha, cfg.beta);
        std::optional<MatrixParams> mp;
        if (matrix_route) mp = MatrixParams::bru(n, m);

        RngStream x0_rng = rn.child(2);
        ParticleState x0 = make_x0(cfg.preset, cfg.x0_scale, params, x0_rng);
        if (!matrix_route && params.beta > 0) check_separated(x0.coords);

        std::vector<CutoffPrediction> preds;
        for (DistKind k : cfg.kinds) {
            preds.push_back(cutoff_predict(k, x0, params, mp));
            prof.predictions.push_back({n, preds.back()});
        }
        CutoffPrediction tv_pred = cutoff_predict(DistKind::TV, x0, params, mp);
        double c_n = tv_pred.c_upper;

        std::vector<double> grid = cfg.times;
        if (cfg.times_relative)
            for (auto& t : grid) t *= c_n;
        check_time_grid(grid);

        std::vector<std::vector<double>> phi;
        MatrixState M0;
        if (matrix_route) {
            M0 = matrix_start(x0, *mp);
            phi = ensemble_matrix_phi(M0, grid, *mp, cfg.replicas, rn.child(0), cfg.exec);
        } else {
            phi = ensemble_sqrt_phi(x0, grid, params, cfg.replicas, rn.child(0), cfg.dt, cfg.exec);
        }
        std::vector<double> ref = equilibrium_phi_samples(params, cfg.replicas, rn.child(1));

        bool want_w = std::find(cfg.kinds.begin(), cfg.kinds.end(), DistKind::Wg2) != cfg.kinds.end();
        std::vector<Path> paths;
        std::vector<ParticleState> eq_cloud;
        if (want_w) {
            if (matrix_route)
                paths = ensemble_matrix_paths(M0, grid, *mp, cfg.replicas, rn.child(0), cfg.exec);
            else
                paths = ensemble_dl_sqrt_paths(x0, grid, params, cfg.replicas, rn.child(0), cfg.dt, cfg.exec);
            for (auto& g : sample_equilibrium_many(params, cfg.replicas, rn.child(3), {}, cfg.exec))
                eq_cloud.push_back(g.state);
        }

        double A = params.alpha * n;
        auto logq = [A](double x) { return gamma_log_pdf(x, A); };
        KlOptions klo;
        klo.reference_center = A;
        klo.reference_scale = std::sqrt(A);

        std::vector<double> tv_curve;
        std::size_t first_row = prof.rows.size();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double t = grid[k];
            double tv_low = tv_lower_bound_formula(x0, t, params);
            double kl_up;
            double w_up = kInf;
            if (matrix_route) {
                kl_up = t > 0 ? lift_matrix_bounds(DistKind::KL, max_entry_kl(M0, *mp, t), n, m).value : kInf;
                if (t > 0) {
                    OUParams op = OUParams::isotropic(M0.squaredNorm(), n, m, mp->kappa, mp->gamma);
                    double w2 = std::sqrt(ou_closed_forms(op, t).w2_sq);
                    w_up = lift_matrix_bounds(DistKind::Wg2, w2, n, m).value * std::sqrt(mp->eigen_scale());
                }
            } else {
                kl_up = t > 0 ? kl_upper_bound_chain(x0, 0.0, t, params) : kInf;
            }
            for (std::size_t q = 0; q < cfg.kinds.size(); ++q) {
                DistKind kind = cfg.kinds[q];
                ProfileRow row;
                row.n = n;
                row.t = t;
                row.kind = kind;
                row.c_pred_lower = preds[q].c_lower;
                row.c_pred_upper = preds[q].c_upper;
                switch (kind) {
                    case DistKind::TV:
                        row.estimate = tv_threshold_witness(phi[k], ref);
                        row.bound_lower = tv_low;
                        row.bound_upper = std::min(1.0, std::sqrt(kl_up / 2));
                        tv_curve.push_back(row.estimate.value);
                        break;
                    case DistKind::KL:
                        row.estimate = kl_projected_estimate(phi[k], logq, 1.0, klo);
                        row.bound_lower = 0.5 * tv_low * tv_low;
                        row.bound_upper = kl_up;
                        break;
                    case DistKind::Wg2: {
                        std::vector<ParticleState> cloud;
                        for (const auto& p : paths) cloud.push_back(p.states[k]);
                        OtOptions oo;
                        oo.exec = cfg.exec;
                        if (cloud.size() > 2000) {
                            oo.method = OtMethod::entropic;
                            prof.fallbacks.push_back("entropic OT for n=" + std::to_string(n));
                        }
                        row.estimate = wasserstein_intrinsic(EmpiricalMeasure::uniform(cloud),
                                                             EmpiricalMeasure::uniform(eq_cloud), 2, oo);
                        row.bound_lower = 0;
                        row.bound_upper = w_up;
                        break;
                    }
                    default: throw ValidationError("profile supports TV, KL and Wg2 rows");
                }
                double se = row.estimate.stderr;
                if (!std::isfinite(se)) se = 0;
                row.sandwich_ok = row.bound_lower <= row.estimate.value + 3 * se &&
                                  row.estimate.value <= row.bound_upper + 3 * se;
                prof.rows.push_back(row);
            }
        }
        // monotonicity per kind along the grid
        std::size_t nk = cfg.kinds.size();
        for (std::size_t k = 1; k < grid.size(); ++k)
            for (std::size_t q = 0; q < nk; ++q) {
                auto& cur = prof.rows[first_row + k * nk + q];
                const auto& prev = prof.rows[first_row + (k - 1) * nk + q];
                double s1 = std::isfinite(cur.estimate.stderr) ? cur.estimate.stderr : 0;
                double s0 = std::isfinite(prev.estimate.stderr) ? prev.estimate.stderr : 0;
                cur.monotone_ok = cur.estimate.value <= prev.estimate.value + 3 * std::hypot(s0, s1);
            }

        LadderSummary ls;
        ls.n = n;
        ls.m = m;
        ls.route = matrix_route ? "matrix" : "sde";
        ls.c_n = c_n;
        if (!tv_curve.empty()) {
            ls.t_hi = crossing_time(grid, tv_curve, 0.9);
            ls.t_lo = crossing_time(grid, tv_curve, 0.1);
            ls.window_ratio = (ls.t_lo - ls.t_hi) / c_n;
        } else {
            ls.t_hi = ls.t_lo = ls.window_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        prof.ladder.push_back(ls);
    }
    return prof;
}

bool kl_subexponential_decay_ok(const CutoffProfile& profile) {
    for (int n : profile.n_ladder) {
        const ProfileRow* anchor = nullptr;
        for (const auto& r : profile.rows) {
            if (r.n != n || r.kind != DistKind::KL || r.t < 1.0) continue;
            if (!anchor) {
                anchor = &r;
                continue;
            }
            double env = anchor->estimate.value * std::exp(-(r.t - anchor->t));
            if (r.estimate.value > env + 3 * std::hypot(r.estimate.stderr, anchor->estimate.stderr)) return false;
        }
    }
    return true;
}

}
