#include "dlkit/config.hpp"
#include "dlkit/cutoff.hpp"
#include "dlkit/coupling.hpp"
#include "dlkit/model.hpp"
#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dlkit {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

long long to_int(const std::string& s) {
    double v = to_double(s);
    if (v != static_cast<long long>(v)) throw std::invalid_argument("not an integer: '" + s + "'");
    return static_cast<long long>(v);
}

std::uint64_t to_u64(const std::string& s) {
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE || s[0] == '-')
        throw std::invalid_argument("not an unsigned integer: '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
    return s;
}

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct Field {
    Setter set;
    Getter get;
};

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> f = {
        {"mode", {[](Config& c, const std::string& v) { c.mode = v; }, [](const Config& c) { return c.mode; }}},
        {"n",
         {[](Config& c, const std::string& v) {
              c.n.clear();
              for (auto& s : split(v, ',')) c.n.push_back(static_cast<int>(to_int(s)));
          },
          [](const Config& c) { return join(c.n, [](int x) { return std::to_string(x); }); }}},
        {"m", {[](Config& c, const std::string& v) { c.m = static_cast<int>(to_int(v)); },
               [](const Config& c) { return std::to_string(c.m); }}},
        {"alpha", {[](Config& c, const std::string& v) { c.alpha = to_double(v); },
                   [](const Config& c) { return fmt(c.alpha); }}},
        {"beta", {[](Config& c, const std::string& v) { c.beta = to_double(v); },
                  [](const Config& c) { return fmt(c.beta); }}},
        {"x0_preset", {[](Config& c, const std::string& v) { c.x0_preset = v; },
                       [](const Config& c) { return c.x0_preset; }}},
        {"x0_scale", {[](Config& c, const std::string& v) { c.x0_scale = to_double(v); },
                      [](const Config& c) { return fmt(c.x0_scale); }}},
        {"times", {[](Config& c, const std::string& v) { c.times = parse_times(v); },
                   [](const Config& c) { return join(c.times, fmt); }}},
        {"times_relative", {[](Config& c, const std::string& v) { c.times_relative = to_bool(v); },
                            [](const Config& c) { return std::string(c.times_relative ? "true" : "false"); }}},
        {"replicas", {[](Config& c, const std::string& v) { c.replicas = static_cast<int>(to_int(v)); },
                      [](const Config& c) { return std::to_string(c.replicas); }}},
        {"distances",
         {[](Config& c, const std::string& v) {
              c.distances.clear();
              for (auto& s : split(v, ',')) c.distances.push_back(parse_dist_kind(s));
          },
          [](const Config& c) { return join(c.distances, [](DistKind k) { return to_string(k); }); }}},
        {"seed", {[](Config& c, const std::string& v) { c.seed = to_u64(v); },
                  [](const Config& c) { return std::to_string(c.seed); }}},
        {"out_dir", {[](Config& c, const std::string& v) { c.out_dir = v; },
                     [](const Config& c) { return c.out_dir; }}},
        {"format", {[](Config& c, const std::string& v) { c.format = v; }, [](const Config& c) { return c.format; }}},
        {"threads", {[](Config& c, const std::string& v) { c.threads = static_cast<int>(to_int(v)); },
                     [](const Config& c) { return std::to_string(c.threads); }}},
        {"dt", {[](Config& c, const std::string& v) { c.dt = to_double(v); }, [](const Config& c) { return fmt(c.dt); }}},
        {"route", {[](Config& c, const std::string& v) { c.route = v; }, [](const Config& c) { return c.route; }}},
        {"trials", {[](Config& c, const std::string& v) { c.trials = static_cast<int>(to_int(v)); },
                    [](const Config& c) { return std::to_string(c.trials); }}},
        {"rho", {[](Config& c, const std::string& v) { c.rho = to_double(v); }, [](const Config& c) { return fmt(c.rho); }}},
        {"kappa", {[](Config& c, const std::string& v) { c.kappa = to_double(v); },
                   [](const Config& c) { return fmt(c.kappa); }}},
        {"gamma", {[](Config& c, const std::string& v) { c.gamma = to_double(v); },
                   [](const Config& c) { return fmt(c.gamma); }}},
        {"z0_norm_sq", {[](Config& c, const std::string& v) { c.z0_norm_sq = to_double(v); },
                        [](const Config& c) { return fmt(c.z0_norm_sq); }}},
        {"coupling", {[](Config& c, const std::string& v) { c.coupling = v; },
                      [](const Config& c) { return c.coupling; }}},
        {"y0_preset", {[](Config& c, const std::string& v) { c.y0_preset = v; },
                       [](const Config& c) { return c.y0_preset; }}},
        {"y0_scale", {[](Config& c, const std::string& v) { c.y0_scale = to_double(v); },
                      [](const Config& c) { return fmt(c.y0_scale); }}},
    };
    return f;
}

const Field* find_field(const std::string& key) {
    for (const auto& [k, f] : fields())
        if (k == key) return &f;
    return nullptr;
}

}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, f] : fields()) k.push_back(name);
        return k;
    }();
    return keys;
}

std::vector<double> parse_times(const std::string& s) {
    std::vector<double> t;
    if (s.find(':') != std::string::npos) {
        auto p = split(s, ':');
        if (p.size() != 3) throw std::invalid_argument("times range must be start:stop:count");
        double a = to_double(p[0]), b = to_double(p[1]);
        long long k = to_int(p[2]);
        if (k < 1) throw std::invalid_argument("times count must be positive");
        if (k == 1) return {a};
        for (long long i = 0; i < k; ++i) t.push_back(a + (b - a) * double(i) / double(k - 1));
        t.back() = b;
        return t;
    }
    for (auto& x : split(s, ',')) t.push_back(to_double(x));
    return t;
}

Config parse_config(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        if (trim(body).empty()) continue;
        auto eq = body.find('=');
        int col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
        if (eq == std::string::npos) throw ParseError("expected key = value", lineno, col);
        std::string key = trim(body.substr(0, eq));
        std::string val = trim(body.substr(eq + 1));
        const Field* f = find_field(key);
        if (!f) throw ParseError("unknown key '" + key + "'", lineno, col);
        if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", lineno, col);
        seen[key] = lineno;
        try {
            f->set(c, val);
        } catch (const std::invalid_argument& e) {
            int vcol = static_cast<int>(eq + 1 + body.substr(eq + 1).find_first_not_of(" \t")) + 1;
            throw ParseError("key '" + key + "': " + e.what(), lineno, vcol);
        } catch (const Error& e) {
            throw ParseError("key '" + key + "': " + e.what(), lineno, col);
        }
    }
    validate_config(c);
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
    std::string s;
    for (const auto& [k, f] : fields()) s += k + " = " + f.get(c) + "\n";
    return s;
}

void validate_config(const Config& c) {
    static const std::vector<std::string> modes = {"simulate", "distance", "cutoff-profile",
                                                   "check-cd", "couple", "ou-formulas"};
    if (std::find(modes.begin(), modes.end(), c.mode) == modes.end())
        throw ValidationError("mode must be one of simulate, distance, cutoff-profile, check-cd, couple, ou-formulas");
    if (c.format != "csv" && c.format != "json") throw ValidationError("format must be csv or json");
    if (c.route != "auto" && c.route != "matrix" && c.route != "sde")
        throw ValidationError("route must be auto, matrix or sde");
    if (c.n.empty()) throw ValidationError("n must be given");
    for (int n : c.n)
        if (n < 1) throw ValidationError("n must be positive");
    if (c.m < 0) throw ValidationError("m must be nonnegative");
    if (c.replicas < 1) throw ValidationError("replicas must be positive");
    if (c.threads < 0) throw ValidationError("threads must be nonnegative");
    if (c.dt < 0) throw ValidationError("dt must be nonnegative");
    if (c.trials < 1) throw ValidationError("trials must be positive");
    if (c.times.empty()) throw ValidationError("times must be nonempty");
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        if (!(c.times[i] >= 0) || !std::isfinite(c.times[i])) throw ValidationError("times must be finite and >= 0");
        if (i && !(c.times[i] > c.times[i - 1])) throw ValidationError("times must be strictly increasing");
    }
    parse_x0_preset(c.x0_preset);
    parse_x0_preset(c.y0_preset);
    parse_coupling_kind(c.coupling);
    if (c.mode == "ou-formulas") {
        if (!(c.kappa > 0) || !(c.gamma > 0)) throw ValidationError("kappa and gamma must be positive");
        if (!(c.z0_norm_sq >= 0)) throw ValidationError("z0_norm_sq must be nonnegative");
        return;
    }
    bool matrix = c.route == "matrix" || (c.route == "auto" && c.alpha == 0);
    for (int n : c.n) {
        if (matrix) {
            int m = c.m > 0 ? c.m : n;
            if (m < n) throw ValidationError("matrix route needs m >= n");
        } else {
            ModelParams::make(n, c.alpha, c.beta);
        }
    }
}

}
