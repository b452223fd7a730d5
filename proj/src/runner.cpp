#include "dlkit/runner.hpp"
#include "dlkit/equilibrium.hpp"
#include "dlkit/geometry.hpp"
#include "dlkit/stats.hpp"
#include <openssl/evp.h>
#include <omp.h>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dlkit {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double from_num(const json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw SerializationError("bad number '" + s + "'");
    }
    return j.get<double>();
}

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
void put(std::string& s, const T& v) {
    s.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(const std::string& s, std::size_t& pos) {
    if (pos + sizeof(T) > s.size()) throw SerializationError("archive truncated");
    T v;
    std::memcpy(&v, s.data() + pos, sizeof v);
    pos += sizeof v;
    return v;
}

// collects outputs; removes them if the run fails
class OutputSet {
public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}
    ~OutputSet() {
        if (!committed_)
            for (const auto& f : files_) {
                std::error_code ec;
                fs::remove(fs::path(dir_) / f.path, ec);
            }
    }
    void write(const std::string& name, const std::string& bytes) {
        atomic_write((fs::path(dir_) / name).string(), bytes);
        files_.push_back({name, sha256_hex(bytes)});
    }
    void commit() { committed_ = true; }
    const std::vector<OutputFile>& files() const { return files_; }

private:
    std::string dir_;
    std::vector<OutputFile> files_;
    bool committed_ = false;
};

int m_for(const Config& c, int n) { return c.m > 0 ? c.m : n; }

bool matrix_route(const Config& c) {
    return c.route == "matrix" || (c.route == "auto" && c.alpha == 0);
}

ModelParams params_for(const Config& c, int n) {
    return matrix_route(c) ? ModelParams::matrix_induced(n, m_for(c, n)) : ModelParams::make(n, c.alpha, c.beta);
}

Exec exec_for(const Config& c) { return c.threads == 1 ? Exec::serial : Exec::parallel; }

json estimate_json(const DistanceEstimate& e) {
    return {{"kind", to_string(e.kind)}, {"value", num(e.value)}, {"stderr", num(e.stderr)},
            {"method", e.method}, {"regularization", num(e.regularization)}};
}

void run_simulate(const Config& c, OutputSet& out, RngStream& rng) {
    json summary = json::array();
    for (int n : c.n) {
        RngStream rn = rng.child(n);
        ModelParams params = params_for(c, n);
        RngStream x0r = rn.child(2);
        ParticleState x0 = make_x0(parse_x0_preset(c.x0_preset), c.x0_scale, params, x0r);
        std::vector<Path> paths;
        if (matrix_route(c)) {
            MatrixParams mp = MatrixParams::bru(n, m_for(c, n));
            paths = ensemble_matrix_paths(matrix_start(x0, mp), c.times, mp, c.replicas, rn.child(0), exec_for(c));
        } else {
            paths = ensemble_dl_sqrt_paths(x0, c.times, params, c.replicas, rn.child(0), c.dt, exec_for(c));
        }
        std::string tag = "n" + std::to_string(n);
        out.write("paths_" + tag + ".csv", paths_csv(paths));
        out.write("paths_" + tag + ".bin", paths_archive(paths));
        for (std::size_t k = 0; k < c.times.size(); ++k) {
            std::vector<double> phi;
            for (const auto& p : paths) phi.push_back(p.states[k].sum() - params.alpha * n);
            Moments mo = moments(phi);
            DuhamelResult d = duhamel_variance(x0, c.times[k], params);
            summary.push_back({{"n", n}, {"t", c.times[k]}, {"phi_mean", num(mo.mean)},
                               {"phi_mean_stderr", num(mo.stderr_mean)}, {"phi_var", num(mo.variance)},
                               {"phi_var_stderr", num(variance_stderr(phi))}, {"duhamel_var", num(d.value)},
                               {"scheme", paths.front().scheme}});
        }
    }
    if (c.format == "json") {
        out.write("summary.json", summary.dump(2) + "\n");
    } else {
        std::string s = "n,t,phi_mean,phi_mean_stderr,phi_var,phi_var_stderr,duhamel_var\n";
        for (const auto& r : summary)
            s += std::to_string(r["n"].get<int>()) + "," + fmt(r["t"].get<double>()) + "," +
                 fmt(from_num(r["phi_mean"])) + "," + fmt(from_num(r["phi_mean_stderr"])) + "," +
                 fmt(from_num(r["phi_var"])) + "," + fmt(from_num(r["phi_var_stderr"])) + "," +
                 fmt(from_num(r["duhamel_var"])) + "\n";
        out.write("summary.csv", s);
    }
}

void run_distance(const Config& c, OutputSet& out, RngStream& rng, std::vector<std::string>& fallbacks) {
    std::string phash = config_hash(c).substr(0, 16);
    json rows = json::array();
    for (int n : c.n) {
        RngStream rn = rng.child(n);
        ModelParams params = params_for(c, n);
        RngStream x0r = rn.child(2);
        ParticleState x0 = make_x0(parse_x0_preset(c.x0_preset), c.x0_scale, params, x0r);
        std::vector<Path> paths;
        if (matrix_route(c)) {
            MatrixParams mp = MatrixParams::bru(n, m_for(c, n));
            paths = ensemble_matrix_paths(matrix_start(x0, mp), c.times, mp, c.replicas, rn.child(0), exec_for(c));
        } else {
            paths = ensemble_dl_sqrt_paths(x0, c.times, params, c.replicas, rn.child(0), c.dt, exec_for(c));
        }
        std::vector<double> ref = equilibrium_phi_samples(params, c.replicas, rn.child(1));
        std::vector<ParticleState> eq;
        for (auto& g : sample_equilibrium_many(params, c.replicas, rn.child(3), {}, exec_for(c))) eq.push_back(g.state);
        double A = params.alpha * n;
        KlOptions klo;
        klo.reference_center = A;
        klo.reference_scale = std::sqrt(A);
        for (std::size_t k = 0; k < c.times.size(); ++k) {
            std::vector<double> sums;
            std::vector<ParticleState> cloud;
            for (const auto& p : paths) {
                sums.push_back(p.states[k].sum());
                cloud.push_back(p.states[k]);
            }
            for (DistKind kind : c.distances) {
                DistanceEstimate e;
                switch (kind) {
                    case DistKind::TV: e = tv_threshold_witness(sums, ref); break;
                    case DistKind::KL:
                        e = kl_projected_estimate(sums, [A](double x) { return gamma_log_pdf(x, A); }, 1.0, klo);
                        break;
                    case DistKind::Wg1:
                    case DistKind::Wg2: {
                        OtOptions oo;
                        oo.exec = exec_for(c);
                        if (cloud.size() > 2000) {
                            oo.method = OtMethod::entropic;
                            fallbacks.push_back("entropic OT at n=" + std::to_string(n));
                        }
                        e = wasserstein_intrinsic(EmpiricalMeasure::uniform(cloud), EmpiricalMeasure::uniform(eq),
                                                  kind == DistKind::Wg1 ? 1 : 2, oo);
                        break;
                    }
                    default:
                        throw ValidationError("distance mode supports TV, KL, Wg1 and Wg2; " + to_string(kind) +
                                              " is closed-form only (ou-formulas)");
                }
                json r = estimate_json(e);
                r["n"] = n;
                r["t"] = c.times[k];
                r["params_hash"] = phash;
                rows.push_back(r);
            }
        }
    }
    if (c.format == "json") {
        out.write("distances.json", rows.dump(2) + "\n");
    } else {
        std::string s = "n,t,kind,value,stderr,method,params_hash\n";
        for (const auto& r : rows)
            s += std::to_string(r["n"].get<int>()) + "," + fmt(r["t"].get<double>()) + "," +
                 r["kind"].get<std::string>() + "," + fmt(from_num(r["value"])) + "," + fmt(from_num(r["stderr"])) +
                 "," + r["method"].get<std::string>() + "," + phash + "\n";
        out.write("distances.csv", s);
    }
}

ProfileConfig profile_config(const Config& c) {
    ProfileConfig pc;
    pc.n_ladder = c.n;
    pc.m = c.m;
    pc.alpha = c.alpha;
    pc.beta = c.beta;
    pc.route = c.route;
    pc.preset = parse_x0_preset(c.x0_preset);
    pc.x0_scale = c.x0_scale;
    pc.times = c.times;
    pc.times_relative = c.times_relative;
    pc.replicas = c.replicas;
    pc.kinds = c.distances;
    pc.dt = c.dt;
    pc.seed = c.seed;
    pc.exec = exec_for(c);
    return pc;
}

void run_check_cd(const Config& c, OutputSet& out, RngStream& rng) {
    json reports = json::array();
    for (int n : c.n) {
        ModelParams params = ModelParams::make(n, c.alpha, c.beta);
        RngStream rn = rng.child(n);
        CurvatureReport r = cd_certificate(params, c.rho, c.trials, rn, exec_for(c));
        json coeffs = json::array();
        for (const auto& [e, v] : r.worst_f.terms()) coeffs.push_back({{"exponents", e}, {"coefficient", num(v)}});
        reports.push_back({{"n", n}, {"alpha", c.alpha}, {"beta", c.beta}, {"rho", r.rho}, {"trials", r.samples},
                           {"min_gap", num(r.min_gap)}, {"min_scaled_gap", num(r.min_scaled_gap)},
                           {"max_rel_err", num(r.max_rel_err)}, {"worst_f", coeffs},
                           {"worst_state", r.worst_state.coords}, {"worst_scale", num(r.worst_scale)},
                           {"seed", r.seed}, {"stream_id", r.stream_id}});
    }
    out.write("curvature.json", reports.dump(2) + "\n");
}

void run_couple(const Config& c, OutputSet& out, RngStream& rng) {
    CouplingKind kind = parse_coupling_kind(c.coupling);
    json summary = json::array();
    for (int n : c.n) {
        ModelParams params = params_for(c, n);
        RngStream rn = rng.child(n);
        RngStream xr = rn.child(2), yr = rn.child(3);
        ParticleState x0 = make_x0(parse_x0_preset(c.x0_preset), c.x0_scale, params, xr);
        ParticleState y0 = make_x0(parse_x0_preset(c.y0_preset), c.y0_scale, params, yr);
        auto paths = coupling_ensemble(kind, x0, y0, c.times, params, c.replicas, rn.child(0), c.dt, exec_for(c));
        out.write("coupled_n" + std::to_string(n) + ".csv", coupled_csv(paths));
        CouplingSummary s = summarize_coupling(paths);
        std::vector<double> ct;
        for (const auto& p : paths) ct.push_back(p.coalesce_time);
        json times = json::array();
        for (std::size_t k = 0; k < s.times.size(); ++k)
            times.push_back({{"t", s.times[k]}, {"mean_distance", num(s.mean_distance[k])},
                             {"stderr", num(s.stderr[k])},
                             {"envelope", num(std::exp(-s.times[k] / 2) * s.r0)},
                             {"coalesced_fraction", s.coalesced_fraction[k]}});
        summary.push_back({{"n", n}, {"coupling", to_string(kind)}, {"r0", num(s.r0)},
                           {"coalesced_by_horizon", s.coalesced_fraction.empty() ? 0.0 : s.coalesced_fraction.back()},
                           {"domination_ok", kind == CouplingKind::mirror ? json(mirror_domination_ok(s)) : json(nullptr)},
                           {"per_time", times}});
    }
    out.write("coupling_summary.json", summary.dump(2) + "\n");
}

void run_ou(const Config& c, OutputSet& out) {
    std::string s = "n,m,t,kind,value,stderr,method\n";
    json rows = json::array();
    for (int n : c.n) {
        int m = m_for(c, n);
        OUParams p = OUParams::isotropic(c.z0_norm_sq, n, m, c.kappa, c.gamma);
        for (double t : c.times) {
            if (t == 0) continue;
            for (const auto& [kind, e] : ou_closed_form_distances(p, t)) {
                s += std::to_string(n) + "," + std::to_string(m) + "," + fmt(t) + "," + to_string(kind) + "," +
                     fmt(e.value) + "," + fmt(e.stderr) + "," + e.method + "\n";
                json r = estimate_json(e);
                r["n"] = n;
                r["m"] = m;
                r["t"] = t;
                rows.push_back(r);
            }
        }
    }
    if (c.format == "json")
        out.write("ou_distances.json", rows.dump(2) + "\n");
    else
        out.write("ou_distances.csv", s);
}

}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw NumericFailure("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string config_hash(const Config& c) {
    Config k = c;
    k.out_dir.clear();
    return sha256_hex(serialize_config(k));
}

void atomic_write(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw IoError("cannot open '" + tmp + "' for writing");
        o.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        o.flush();
        if (!o) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for '" + tmp + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path + "'");
    }
}

RunManifest run(const Config& config) {
    validate_config(config);
    RunManifest man;
    man.started = now_utc();
    man.seed = config.seed;
    man.config_hash = config_hash(config);
    man.artifact_version = DLKIT_VERSION;
    man.mode = config.mode;
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec || !fs::is_directory(config.out_dir)) throw IoError("cannot create output directory '" + config.out_dir + "'");
    if (config.threads > 0) omp_set_num_threads(config.threads);

    OutputSet out(config.out_dir);
    RngStream rng(config.seed, 0);
    if (config.mode == "simulate") {
        run_simulate(config, out, rng);
    } else if (config.mode == "distance") {
        run_distance(config, out, rng, man.fallbacks);
    } else if (config.mode == "cutoff-profile") {
        CutoffProfile p = run_cutoff_profile(profile_config(config));
        if (config.format == "json") {
            out.write("profile.json", profile_json(p));
        } else {
            out.write("profile.csv", profile_csv(p));
            out.write("profile.json", profile_json(p));
        }
        for (const auto& f : p.fallbacks) man.fallbacks.push_back(f);
        for (const auto& [n, pr] : p.predictions)
            if (pr.regime_flagged) man.fallbacks.push_back("n=" + std::to_string(n) + " " + to_string(pr.kind) + ": " + pr.note);
    } else if (config.mode == "check-cd") {
        run_check_cd(config, out, rng);
    } else if (config.mode == "couple") {
        run_couple(config, out, rng);
    } else {
        run_ou(config, out);
    }
    man.outputs = out.files();
    man.finished = now_utc();
    atomic_write((fs::path(config.out_dir) / "manifest.json").string(), manifest_to_json(man));
    out.commit();
    return man;
}

std::string manifest_to_json(const RunManifest& m) {
    json outs = json::array();
    for (const auto& f : m.outputs) outs.push_back({{"path", f.path}, {"sha256", f.sha256}});
    json j = {{"config_hash", m.config_hash}, {"seed", m.seed}, {"started", m.started}, {"finished", m.finished},
              {"artifact_version", m.artifact_version}, {"mode", m.mode}, {"outputs", outs},
              {"fallbacks", m.fallbacks}};
    return j.dump(2) + "\n";
}

std::string profile_csv(const CutoffProfile& p) {
    std::string s = "n,t,kind,value,stderr,bound_lower,bound_upper,c_pred_lower,c_pred_upper\n";
    for (const auto& r : p.rows)
        s += std::to_string(r.n) + "," + fmt(r.t) + "," + to_string(r.kind) + "," + fmt(r.estimate.value) + "," +
             fmt(r.estimate.stderr) + "," + fmt(r.bound_lower) + "," + fmt(r.bound_upper) + "," +
             fmt(r.c_pred_lower) + "," + fmt(r.c_pred_upper) + "\n";
    return s;
}

std::string profile_json(const CutoffProfile& p) {
    json preds = json::array(), rows = json::array(), ladder = json::array(), times = json::array();
    for (double t : p.times) times.push_back(num(t));
    for (const auto& [n, pr] : p.predictions)
        preds.push_back({{"n", n}, {"kind", to_string(pr.kind)}, {"c_lower", num(pr.c_lower)},
                         {"c_upper", num(pr.c_upper)}, {"source", pr.source}, {"lower_source", pr.lower_source},
                         {"regime_flagged", pr.regime_flagged}, {"note", pr.note}});
    for (const auto& r : p.rows) {
        json e = estimate_json(r.estimate);
        rows.push_back({{"n", r.n}, {"t", num(r.t)}, {"kind", to_string(r.kind)}, {"estimate", e},
                        {"bound_lower", num(r.bound_lower)}, {"bound_upper", num(r.bound_upper)},
                        {"c_pred_lower", num(r.c_pred_lower)}, {"c_pred_upper", num(r.c_pred_upper)},
                        {"sandwich_ok", r.sandwich_ok}, {"monotone_ok", r.monotone_ok}});
    }
    for (const auto& l : p.ladder)
        ladder.push_back({{"n", l.n}, {"m", l.m}, {"route", l.route}, {"c_n", num(l.c_n)}, {"t_hi", num(l.t_hi)},
                          {"t_lo", num(l.t_lo)}, {"window_ratio", num(l.window_ratio)}});
    json j = {{"times", times}, {"n_ladder", p.n_ladder}, {"predictions", preds}, {"rows", rows},
              {"ladder", ladder}, {"fallbacks", p.fallbacks}};
    return j.dump(2) + "\n";
}

CutoffProfile read_profile_json(const std::string& text) {
    CutoffProfile p;
    try {
        json j = json::parse(text);
        for (const auto& t : j.at("times")) p.times.push_back(from_num(t));
        p.n_ladder = j.at("n_ladder").get<std::vector<int>>();
        for (const auto& x : j.at("predictions")) {
            CutoffPrediction pr;
            pr.kind = parse_dist_kind(x.at("kind").get<std::string>());
            pr.c_lower = from_num(x.at("c_lower"));
            pr.c_upper = from_num(x.at("c_upper"));
            pr.source = x.at("source").get<std::string>();
            pr.lower_source = x.at("lower_source").get<std::string>();
            pr.regime_flagged = x.at("regime_flagged").get<bool>();
            pr.note = x.at("note").get<std::string>();
            p.predictions.push_back({x.at("n").get<int>(), pr});
        }
        for (const auto& x : j.at("rows")) {
            ProfileRow r;
            r.n = x.at("n").get<int>();
            r.t = from_num(x.at("t"));
            r.kind = parse_dist_kind(x.at("kind").get<std::string>());
            const auto& e = x.at("estimate");
            r.estimate.kind = parse_dist_kind(e.at("kind").get<std::string>());
            r.estimate.value = from_num(e.at("value"));
            r.estimate.stderr = from_num(e.at("stderr"));
            r.estimate.method = e.at("method").get<std::string>();
            r.estimate.regularization = from_num(e.at("regularization"));
            r.bound_lower = from_num(x.at("bound_lower"));
            r.bound_upper = from_num(x.at("bound_upper"));
            r.c_pred_lower = from_num(x.at("c_pred_lower"));
            r.c_pred_upper = from_num(x.at("c_pred_upper"));
            r.sandwich_ok = x.at("sandwich_ok").get<bool>();
            r.monotone_ok = x.at("monotone_ok").get<bool>();
            p.rows.push_back(r);
        }
        for (const auto& x : j.at("ladder")) {
            LadderSummary l;
            l.n = x.at("n").get<int>();
            l.m = x.at("m").get<int>();
            l.route = x.at("route").get<std::string>();
            l.c_n = from_num(x.at("c_n"));
            l.t_hi = from_num(x.at("t_hi"));
            l.t_lo = from_num(x.at("t_lo"));
            l.window_ratio = from_num(x.at("window_ratio"));
            p.ladder.push_back(l);
        }
        p.fallbacks = j.at("fallbacks").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw SerializationError(std::string("bad profile json: ") + e.what());
    } catch (const ValidationError& e) {
        throw SerializationError(std::string("bad profile json: ") + e.what());
    }
    return p;
}

std::vector<std::string> emit_report(const CutoffProfile& p, const std::string& format, const std::string& dir) {
    std::vector<std::string> names;
    if (format == "csv") {
        atomic_write((fs::path(dir) / "profile.csv").string(), profile_csv(p));
        names.push_back("profile.csv");
        std::string l = "n,m,route,c_n,t_hi,t_lo,window_ratio\n";
        for (const auto& x : p.ladder)
            l += std::to_string(x.n) + "," + std::to_string(x.m) + "," + x.route + "," + fmt(x.c_n) + "," +
                 fmt(x.t_hi) + "," + fmt(x.t_lo) + "," + fmt(x.window_ratio) + "\n";
        atomic_write((fs::path(dir) / "ladder.csv").string(), l);
        names.push_back("ladder.csv");
    } else if (format == "json") {
        atomic_write((fs::path(dir) / "profile.json").string(), profile_json(p));
        names.push_back("profile.json");
    } else {
        throw SerializationError("format must be csv or json");
    }
    return names;
}

std::string paths_csv(const std::vector<Path>& paths) {
    std::string s = "replica,time,coord_index,value\n";
    for (std::size_t r = 0; r < paths.size(); ++r)
        for (std::size_t k = 0; k < paths[r].times.size(); ++k)
            for (std::size_t i = 0; i < paths[r].states[k].size(); ++i)
                s += std::to_string(r) + "," + fmt(paths[r].times[k]) + "," + std::to_string(i) + "," +
                     fmt(paths[r].states[k][i]) + "\n";
    return s;
}

std::string paths_archive(const std::vector<Path>& paths) {
    std::string s = "DLPATH01";
    std::uint64_t R = paths.size();
    std::uint64_t T = R ? paths[0].times.size() : 0;
    std::uint64_t n = T ? paths[0].states[0].size() : 0;
    put(s, R);
    put(s, T);
    put(s, n);
    if (R)
        for (double t : paths[0].times) put(s, t);
    for (const auto& p : paths) {
        if (p.times.size() != T) throw SerializationError("ragged path ensemble");
        for (const auto& st : p.states) {
            if (st.size() != n) throw SerializationError("ragged path ensemble");
            for (double v : st.coords) put(s, v);
        }
    }
    return s;
}

std::vector<Path> read_paths_archive(const std::string& bytes) {
    if (bytes.size() < 8 || bytes.compare(0, 8, "DLPATH01") != 0) throw SerializationError("bad archive magic");
    std::size_t pos = 8;
    auto R = get<std::uint64_t>(bytes, pos);
    auto T = get<std::uint64_t>(bytes, pos);
    auto n = get<std::uint64_t>(bytes, pos);
    std::vector<double> times(T);
    if (R)
        for (auto& t : times) t = get<double>(bytes, pos);
    std::vector<Path> out(R);
    for (auto& p : out) {
        p.times = times;
        for (std::uint64_t k = 0; k < T; ++k) {
            std::vector<double> x(n);
            for (auto& v : x) v = get<double>(bytes, pos);
            p.states.emplace_back(std::move(x));
        }
    }
    if (pos != bytes.size()) throw SerializationError("trailing bytes in archive");
    return out;
}

std::string coupled_csv(const std::vector<CoupledPath>& paths) {
    std::string s = "replica,time,leg,coord_index,value\n";
    for (std::size_t r = 0; r < paths.size(); ++r)
        for (std::size_t k = 0; k < paths[r].times.size(); ++k)
            for (int leg = 0; leg < 2; ++leg) {
                const auto& st = leg ? paths[r].y_path[k] : paths[r].x_path[k];
                for (std::size_t i = 0; i < st.size(); ++i)
                    s += std::to_string(r) + "," + fmt(paths[r].times[k]) + "," + (leg ? "y" : "x") + "," +
                         std::to_string(i) + "," + fmt(st[i]) + "\n";
            }
    return s;
}

}
