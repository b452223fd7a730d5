#include "dlkit/rng.hpp"
#include "dlkit/errors.hpp"
#include <cmath>

namespace dlkit {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t a = splitmix64(seed);
    std::uint64_t b = splitmix64(stream ^ 0x5851f42d4c957f2dULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::child(std::uint64_t index) const {
    return RngStream(seed_, splitmix64(stream_id_ * 0x9e3779b97f4a7c15ULL + splitmix64(index + 1)));
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() {
    double u = std::generate_canonical<double, 64>(engine_);
    return u < 1.0 ? u : std::nextafter(1.0, 0.0);
}

double RngStream::gamma(double shape) {
    if (!(shape > 0)) throw DomainError("gamma shape must be positive");
    std::gamma_distribution<double> d(shape, 1.0);
    return d(engine_);
}

double RngStream::chi(double dof) {
    if (dof == 0) return 0.0;
    return std::sqrt(2.0 * gamma(0.5 * dof));
}

std::uint64_t RngStream::poisson(double mean) {
    if (mean <= 0) return 0;
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(engine_);
}

}
