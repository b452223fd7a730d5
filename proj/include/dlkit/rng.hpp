#pragma once
#include <cstdint>
#include <random>

namespace dlkit {

std::uint64_t splitmix64(std::uint64_t x);

// (seed, stream_id) -> independent mt19937_64 stream
class RngStream {
public:
    RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // deterministic sub-stream, e.g. one per replica
    RngStream child(std::uint64_t index) const;

    double normal();
    double uniform();
    double gamma(double shape);
    double chi(double dof);
    std::uint64_t poisson(double mean);
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}
