#include "dlkit/coupling.hpp"
#include "dlkit/equilibrium.hpp"
#include "dlkit/geometry.hpp"
#include "dlkit/stats.hpp"
#include "dlkit/transport.hpp"
#include <algorithm>
#include <cmath>

namespace dlkit {

std::string to_string(CouplingKind k) { return k == CouplingKind::mirror ? "mirror" : "synchronous"; }

CouplingKind parse_coupling_kind(const std::string& s) {
    if (s == "mirror") return CouplingKind::mirror;
    if (s == "synchronous") return CouplingKind::synchronous;
    throw ValidationError("unknown coupling '" + s + "'");
}

namespace {

struct CoupledState {
    std::vector<double> yx, yy;
    bool merged = false;
    double merge_time = std::numeric_limits<double>::infinity();
};

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

void coupled_substep(CoupledState& st, double t, double h, const ModelParams& params, RngStream& rng,
                     CouplingKind kind, int depth) {
    std::size_t n = st.yx.size();
    std::vector<double> xi(n), xj(n), e(n);
    for (auto& v : xi) v = rng.normal();
    double r0 = 0;
    bool mirror = kind == CouplingKind::mirror && !st.merged;
    xj = xi;
    if (mirror) {
        r0 = dist(st.yx, st.yy);
        double d = 0;
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = (st.yy[i] - st.yx[i]) / r0;
            d += e[i] * xi[i];
        }
        for (std::size_t i = 0; i < n; ++i) xj[i] = xi[i] - 2 * d * e[i];
    }
    std::vector<double> nx, ny;
    try {
        nx = step_sqrt_coords(st.yx, h, params, xi);
        ny = st.merged ? nx : step_sqrt_coords(st.yy, h, params, xj);
    } catch (const StepRejected&) {
        if (depth >= 30) throw NumericFailure("coupled step rejected after 30 halvings");
        coupled_substep(st, t, h / 2, params, rng, kind, depth + 1);
        coupled_substep(st, t + h / 2, h / 2, params, rng, kind, depth + 1);
        return;
    }
    if (mirror) {
        double along = 0;
        for (std::size_t i = 0; i < n; ++i) along += e[i] * (ny[i] - nx[i]);
        double r1 = dist(nx, ny);
        bool hit = r1 < merge_tolerance || along <= 0;
        // the e-component of Y - X is a Brownian motion with variance rate 8 between grid points
        if (!hit) hit = rng.uniform() < std::exp(-2 * r0 * along / (8 * h));
        if (hit) {
            ny = nx;
            st.merged = true;
            st.merge_time = t + h;
        }
    }
    st.yx = std::move(nx);
    st.yy = std::move(ny);
}

CoupledPath coupled_run(CouplingKind kind, const ParticleState& x0, const ParticleState& y0,
                        const std::vector<double>& times, const ModelParams& params, RngStream& rng, double dt) {
    check_time_grid(times);
    for (const auto* s : {&x0, &y0}) {
        if (static_cast<int>(s->size()) != params.n) throw SizeMismatch("start size differs from n");
        check_nonnegative(s->coords);
        if (params.beta > 0) check_separated(s->coords);
    }
    if (dt <= 0) dt = std::min(default_dt(x0, params), default_dt(y0, params));
    CoupledState st;
    st.yx = to_sqrt_coords(x0);
    st.yy = to_sqrt_coords(y0);
    std::sort(st.yx.begin(), st.yx.end());
    std::sort(st.yy.begin(), st.yy.end());
    if (kind == CouplingKind::mirror && dist(st.yx, st.yy) < merge_tolerance) {
        st.yy = st.yx;
        st.merged = true;
        st.merge_time = 0;
    }
    CoupledPath p;
    p.coupling_kind = kind;
    double t = 0;
    for (double tk : times) {
        while (tk - t > 1e-12 * std::max(1.0, tk)) {
            double h = std::min(dt, tk - t);
            coupled_substep(st, t, h, params, rng, kind, 0);
            t += h;
        }
        t = std::max(t, tk);
        p.times.push_back(tk);
        p.x_path.push_back(from_sqrt_coords(st.yx));
        p.y_path.push_back(from_sqrt_coords(st.yy));
    }
    p.coalesce_time = st.merge_time;
    return p;
}

}

CoupledPath mirror_coupling_run(const ParticleState& x0, const ParticleState& y0, const std::vector<double>& times,
                                const ModelParams& params, RngStream& rng, double dt) {
    return coupled_run(CouplingKind::mirror, x0, y0, times, params, rng, dt);
}

CoupledPath synchronous_coupling_run(const ParticleState& x0, const ParticleState& y0,
                                     const std::vector<double>& times, const ModelParams& params, RngStream& rng,
                                     double dt) {
    return coupled_run(CouplingKind::synchronous, x0, y0, times, params, rng, dt);
}

std::vector<CoupledPath> coupling_ensemble(CouplingKind kind, const ParticleState& x0, const ParticleState& y0,
                                           const std::vector<double>& times, const ModelParams& params,
                                           int replicas, const RngStream& rng, double dt, Exec exec) {
    if (replicas < 1) throw ValidationError("replicas must be positive");
    std::vector<CoupledPath> out(replicas);
    std::vector<std::string> errs(replicas);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < replicas; ++r) {
        try {
            RngStream s = rng.child(r);
            out[r] = coupled_run(kind, x0, y0, times, params, s, dt);
        } catch (const std::exception& ex) {
            errs[r] = ex.what();
        }
    }
    for (const auto& e : errs)
        if (!e.empty()) throw NumericFailure("coupling replica failed: " + e);
    return out;
}

CouplingSummary summarize_coupling(const std::vector<CoupledPath>& paths) {
    if (paths.empty()) throw EmptySample("no coupled paths");
    CouplingSummary s;
    s.times = paths[0].times;
    s.r0 = riemannian_distance(paths[0].x_path[0], paths[0].y_path[0]);
    if (!s.times.empty() && s.times[0] > 0) s.r0 = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        std::vector<double> r;
        double merged = 0;
        for (const auto& p : paths) {
            r.push_back(riemannian_distance(p.x_path[k], p.y_path[k]));
            if (p.coalesce_time <= s.times[k]) merged += 1;
        }
        Moments m = moments(r);
        s.mean_distance.push_back(m.mean);
        s.stderr.push_back(m.stderr_mean);
        s.envelope.push_back(std::exp(-s.times[k] / 2) * s.r0);
        s.coalesced_fraction.push_back(merged / paths.size());
    }
    return s;
}

bool mirror_domination_ok(const CouplingSummary& s) {
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        if (s.mean_distance[k] > s.envelope[k] + 3 * s.stderr[k] + 1e-12) return false;
    }
    return true;
}

DecayCurve wg_decay_estimate(const InitialSampler& mu0_sampler, const std::vector<double>& times,
                             const ModelParams& params, int replicas, const RngStream& rng, double dt, Exec exec) {
    if (replicas < 100) throw ValidationError("wg_decay_estimate needs at least 100 replicas");
    check_time_grid(times);
    RngStream start_rng = rng.child(0), sim_rng = rng.child(1);
    std::vector<Path> paths(replicas);
    std::vector<ParticleState> starts(replicas);
    std::vector<std::string> errs(replicas);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int r = 0; r < replicas; ++r) {
        try {
            RngStream s0 = start_rng.child(r);
            starts[r] = mu0_sampler(s0);
            RngStream s1 = sim_rng.child(r);
            paths[r] = dl_sqrt_path(starts[r], times, params, s1, dt);
        } catch (const std::exception& ex) {
            errs[r] = ex.what();
        }
    }
    for (const auto& e : errs)
        if (!e.empty()) throw NumericFailure("decay replica failed: " + e);

    std::vector<ParticleState> eq, eq2;
    for (auto& g : sample_equilibrium_many(params, replicas, rng.child(2), {}, exec)) eq.push_back(g.state);
    for (auto& g : sample_equilibrium_many(params, replicas, rng.child(3), {}, exec)) eq2.push_back(g.state);
    auto ref = EmpiricalMeasure::uniform(eq);
    OtOptions oo;
    oo.exec = exec;

    DecayCurve c;
    c.times = times;
    auto w0 = wasserstein_intrinsic(EmpiricalMeasure::uniform(starts), ref, 2, oo);
    c.w0 = w0.value;
    c.w0_stderr = w0.stderr;
    auto fl = wasserstein_intrinsic(EmpiricalMeasure::uniform(eq2), ref, 2, oo);
    c.floor = fl.value;
    c.floor_stderr = fl.stderr;
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<ParticleState> cloud;
        cloud.reserve(replicas);
        for (const auto& p : paths) cloud.push_back(p.states[k]);
        auto w = wasserstein_intrinsic(EmpiricalMeasure::uniform(std::move(cloud)), ref, 2, oo);
        c.w.push_back(w.value);
        c.stderr.push_back(w.stderr);
        c.envelope.push_back(std::exp(-times[k] / 2) * c.w0);
    }
    return c;
}

bool decay_within_envelope(const DecayCurve& c) {
    for (std::size_t k = 0; k < c.times.size(); ++k)
        if (c.w[k] > c.envelope[k] + 3 * (c.floor + c.stderr[k])) return false;
    return true;
}

}
