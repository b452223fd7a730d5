#include "doctest.h"
#include "dlkit/coupling.hpp"
#include "dlkit/equilibrium.hpp"
#include "dlkit/geometry.hpp"
#include "dlkit/stats.hpp"
#include <cmath>

using namespace dlkit;

TEST_CASE("identical starts") {
    auto p = ModelParams::make(3, 4.0, 1.0);
    ParticleState x({1.0, 2.0, 4.0});
    RngStream r1(1, 0), r2(1, 0);
    auto m = mirror_coupling_run(x, x, {0.5, 1.0}, p, r1);
    CHECK(m.coalesce_time == 0.0);
    auto s = synchronous_coupling_run(x, x, {0.5, 1.0}, p, r2);
    CHECK(std::isinf(s.coalesce_time));
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(m.x_path[k].coords == m.y_path[k].coords);
        CHECK(s.x_path[k].coords == s.y_path[k].coords);
    }
    CHECK(to_string(m.coupling_kind) == "mirror");
}

TEST_CASE("merged paths stay merged") {
    auto p = ModelParams::make(1, 2.0, 0.0);
    std::vector<double> grid;
    for (int k = 1; k <= 40; ++k) grid.push_back(0.25 * k);
    RngStream rng(2, 0);
    for (int r = 0; r < 50; ++r) {
        auto c = mirror_coupling_run(ParticleState({1.0}), ParticleState({3.0}), grid, p, rng);
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (grid[k] >= c.coalesce_time) CHECK(c.x_path[k].coords == c.y_path[k].coords);
    }
}

TEST_CASE("one-dimensional coalescence") {
    auto p = ModelParams::make(1, 2.0, 0.0);
    auto paths = coupling_ensemble(CouplingKind::mirror, ParticleState({0.5}), ParticleState({6.0}), {1.0, 4.0, 16.0}, p,
                                   300, RngStream(3, 0));
    auto s = summarize_coupling(paths);
    CHECK(s.coalesced_fraction[0] <= s.coalesced_fraction[1]);
    CHECK(s.coalesced_fraction[1] <= s.coalesced_fraction[2]);
    CHECK(s.coalesced_fraction[2] > 0.95);
}

TEST_CASE("synchronous gap follows the drift ODE bound") {
    // shared noise: d(Y - X) = (b(Y) - b(X)) dt with b' <= -1/2 in y-coordinates
    auto p = ModelParams::make(1, 3.0, 0.0);
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(0.25 * k);
    RngStream rng(4, 0);
    for (int r = 0; r < 20; ++r) {
        auto c = synchronous_coupling_run(ParticleState({1.0}), ParticleState({4.0}), grid, p, rng);
        double d0 = riemannian_distance(c.x_path[0], c.y_path[0]), prev = d0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            double d = riemannian_distance(c.x_path[k], c.y_path[k]);
            CHECK(d <= prev + 1e-12);
            CHECK(d <= d0 * std::exp(-grid[k] / 2) * (1 + 1e-6) + 1e-9);
            prev = d;
        }
    }
}

TEST_CASE("each leg has the uncoupled law") {
    auto p = ModelParams::make(2, 3.0, 1.0);
    ParticleState x({0.5, 1.5}), y({3.0, 6.0});
    auto paths = coupling_ensemble(CouplingKind::mirror, x, y, {1.0}, p, 2000, RngStream(5, 0));
    std::vector<double> leg_x, leg_y;
    for (const auto& c : paths) {
        leg_x.push_back(c.x_path[0].sum());
        leg_y.push_back(c.y_path[0].sum());
    }
    auto fx = ensemble_sqrt_phi(x, {1.0}, p, 2000, RngStream(6, 0));
    auto fy = ensemble_sqrt_phi(y, {1.0}, p, 2000, RngStream(7, 0));
    CHECK(ks_two_sample(leg_x, fx[0]).p_value > 0.01);
    CHECK(ks_two_sample(leg_y, fy[0]).p_value > 0.01);
}

TEST_CASE("mirror distance process under the OU envelope") {
    auto p = ModelParams::make(3, 4.0, 1.0);
    auto paths = coupling_ensemble(CouplingKind::mirror, ParticleState({1, 2, 3}), ParticleState({5, 8, 12}),
                                   {0.0, 0.5, 1.0, 2.0}, p, 300, RngStream(8, 0));
    auto s = summarize_coupling(paths);
    CHECK(s.r0 == doctest::Approx(riemannian_distance(ParticleState({1, 2, 3}), ParticleState({5, 8, 12}))));
    CHECK(mirror_domination_ok(s));
}

TEST_CASE("Wasserstein decay from equilibrium is flat") {
    auto p = ModelParams::make(2, 3.0, 1.0);
    auto sampler = [p](RngStream& r) { return sample_equilibrium(p, r).state; };
    auto c = wg_decay_estimate(sampler, {0.0, 1.0}, p, 150, RngStream(9, 0));
    CHECK(c.floor > 0);
    for (std::size_t k = 0; k < 2; ++k) CHECK(c.w[k] <= 3 * (c.floor + c.stderr[k]));
    CHECK(decay_within_envelope(c));
    CHECK_THROWS_AS(wg_decay_estimate(sampler, {1.0}, p, 50, RngStream(9, 0)), ValidationError);
}
