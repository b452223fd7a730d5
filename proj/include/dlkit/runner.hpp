#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include "dlkit/config.hpp"
#include "dlkit/coupling.hpp"
#include "dlkit/cutoff.hpp"
#include "dlkit/simulate.hpp"

namespace dlkit {

struct OutputFile {
    std::string path;  // relative to out_dir
    std::string sha256;
};

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::string artifact_version;
    std::string mode;
    std::vector<OutputFile> outputs;
    std::vector<std::string> fallbacks;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);
// hash of the canonical config with out_dir blanked: the location does not change results
std::string config_hash(const Config& c);

// writes to path.tmp then renames
void atomic_write(const std::string& path, const std::string& bytes);

RunManifest run(const Config& config);
std::string manifest_to_json(const RunManifest& m);

// fixed column order: n,t,kind,value,stderr,bound_lower,bound_upper,c_pred_lower,c_pred_upper
std::string profile_csv(const CutoffProfile& p);
std::string profile_json(const CutoffProfile& p);
CutoffProfile read_profile_json(const std::string& text);
// writes profile.csv (+ ladder.csv) or profile.json into dir; returns the file names
std::vector<std::string> emit_report(const CutoffProfile& p, const std::string& format, const std::string& dir);

// replica,time,coord_index,value
std::string paths_csv(const std::vector<Path>& paths);
// "DLPATH01", u64 replicas, u64 ntimes, u64 n, times, then values by replica, time, coordinate
std::string paths_archive(const std::vector<Path>& paths);
std::vector<Path> read_paths_archive(const std::string& bytes);
// replica,time,leg,coord_index,value
std::string coupled_csv(const std::vector<CoupledPath>& paths);

}
