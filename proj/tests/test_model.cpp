#include "doctest.h"
#include "dlkit/model.hpp"
#include "dlkit/rng.hpp"
#include <algorithm>
#include <cmath>

using namespace dlkit;

namespace {

ParticleState random_state(int n, RngStream& rng) {
    std::vector<double> x(n);
    for (auto& v : x) v = 0.1 + 5 * rng.uniform();
    std::sort(x.begin(), x.end());
    for (int i = 1; i < n; ++i) x[i] = std::max(x[i], x[i - 1] + 1e-3);
    return ParticleState(x);
}

}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(ModelParams::make(4, 2.0, 1.0), ValidationError);  // delta = 0.5
    CHECK_THROWS_AS(ModelParams::make(3, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(ModelParams::make(3, 5.0, 0.5), ValidationError);
    CHECK_THROWS_AS(ModelParams::make(0, 5.0, 1.0), ValidationError);
    auto p = ModelParams::make(4, 4.0, 1.0);
    CHECK(p.delta == 4.0 - 1.5);
    CHECK(p.regime == Regime::interacting);
    CHECK(ModelParams::make(3, 2.0, 0.0).regime == Regime::free);
    auto q = ModelParams::matrix_induced(4, 4);
    CHECK(q.alpha == 2.0);
    CHECK(q.delta == 0.5);
    CHECK_THROWS_AS(ModelParams::matrix_induced(5, 4), ValidationError);
    try {
        ModelParams::make(4, 2.0, 1.0);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
}

TEST_CASE("drift values") {
    auto p1 = ModelParams::make(1, 3.0, 0.0);
    CHECK(dl_drift(ParticleState({2.0}), p1)[0] == doctest::Approx(1.0));
    auto p2 = ModelParams::make(2, 3.0, 2.0);
    auto b = dl_drift(ParticleState({1.0, 3.0}), p2);
    CHECK(b[0] == doctest::Approx(0.0));
    CHECK(b[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(dl_drift(ParticleState({1.0, 1.0}), p2), CollisionError);
    CHECK_THROWS_AS(dl_drift(ParticleState({-1.0, 1.0}), p2), DomainError);

    auto e1 = ModelParams::make(1, 1.0, 0.0);
    CHECK(edl_drift({2.0}, e1)[0] == doctest::Approx(-0.5));
    CHECK_THROWS_AS(edl_drift({0.0}, e1), DomainError);
}

TEST_CASE("drift permutation equivariance") {
    auto p = ModelParams::make(3, 5.0, 1.0);
    std::vector<double> x = {0.5, 1.7, 3.2};
    auto b = dl_drift_generic(x, p.alpha, p.beta);
    std::vector<double> xp = {3.2, 0.5, 1.7};
    auto bp = dl_drift_generic(xp, p.alpha, p.beta);
    CHECK(bp[0] == doctest::Approx(b[2]).epsilon(1e-14));
    CHECK(bp[1] == doctest::Approx(b[0]).epsilon(1e-14));
    CHECK(bp[2] == doctest::Approx(b[1]).epsilon(1e-14));
}

TEST_CASE("stable and printed square-root drift agree") {
    RngStream rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 5;
        double beta = 1.0 + trial % 3;
        auto p = ModelParams::make(n, 2.0 + n * beta, beta);
        auto x = random_state(n, rng);
        auto y = to_sqrt_coords(x);
        auto a = edl_drift(y, p);
        auto b = edl_drift_generic(y, p.alpha, p.beta);
        for (int i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("Ito change of variables links the two drifts") {
    // y = 2 sqrt(x): dy = (b(x)/sqrt(x) - 1/(2 sqrt(x))) dt + sqrt(2) dW
    RngStream rng(5, 0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 5;
        auto p = ModelParams::make(n, 1.0 + 2 * n, trial % 2 ? 1.0 : 2.0);
        auto x = random_state(n, rng);
        auto bx = dl_drift(x, p);
        auto by = edl_drift(to_sqrt_coords(x), p);
        for (int i = 0; i < n; ++i) {
            double s = std::sqrt(x[i]);
            CHECK(by[i] == doctest::Approx(bx[i] / s - 0.5 / s).epsilon(1e-10));
        }
    }
}

TEST_CASE("antisymmetric cancellation and eigenrelation") {
    RngStream rng(3, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 6;
        auto x = random_state(n, rng);
        double scale = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) scale += std::abs((x[i] + x[j]) / (x[i] - x[j]));
        CHECK(std::abs(interaction_antisymmetric_sum(x)) <= 1e-10 * scale);
        auto p = ModelParams::make(n, 1.0 + n, 1.0);
        auto phi = phi_function(p, PhiConvention::exact);
        double g = apply_generator(phi, x, p);
        double v = phi(x.coords);
        CHECK(std::abs(g + v) <= 1e-10 * (1 + std::abs(v)));
        // the printed centering misses by its extra constant
        auto pr = phi_function(p, PhiConvention::printed);
        double off = 0.5 * (n - 1.0) * (n - 1.0);
        CHECK(apply_generator(pr, x, p) + pr(x.coords) == doctest::Approx(-off).epsilon(1e-9));
        CHECK(apply_generator(Polynomial::constant(n, 3.0), x, p) == 0.0);
        auto sum = Polynomial::linear(std::vector<double>(n, 1.0));
        CHECK(apply_generator(sum, x, p) == doctest::Approx(p.alpha * n - x.sum()).epsilon(1e-10));
    }
}

TEST_CASE("observable phi") {
    auto p = ModelParams::make(3, 4.0, 2.0);
    ParticleState z({0.0, 0.0, 0.0});
    auto o = observable_phi(z, p);
    CHECK(o.phi_raw == 0.0);
    CHECK(o.phi_l2norm_sq == 12.0);
    CHECK(o.phi_centered == -12.0);
    auto q = observable_phi(z, p, PhiConvention::printed);
    CHECK(q.phi_l2norm_sq == 12.0 + 4.0);
    CHECK(q.phi_centered == q.phi_raw - q.phi_l2norm_sq);
}

TEST_CASE("canonical form of the generalized model") {
    auto g = canonicalize(3, 10.0, 1.0, 2.0, 2.0);
    CHECK(g.params.alpha == doctest::Approx(5.0));
    CHECK(g.params.beta == doctest::Approx(1.0));
    CHECK(g.space_scale == doctest::Approx(1.0));
    CHECK(g.time_scale == doctest::Approx(2.0));
    auto h = canonicalize(2, 4.0, 1.0, 2.0, 0.5);
    CHECK(h.params.alpha == doctest::Approx(2.0));
    CHECK(h.params.beta == doctest::Approx(1.0));
    CHECK(h.space_scale == doctest::Approx(0.25));
    CHECK(h.time_scale == doctest::Approx(0.5));
}

TEST_CASE("sqrt coordinates round trip") {
    ParticleState x({0.25, 1.0, 4.0});
    auto y = to_sqrt_coords(x);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[2] == doctest::Approx(4.0));
    auto back = from_sqrt_coords(y);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-15));
    CHECK(x.in_closed_chamber());
    CHECK_FALSE(ParticleState({2.0, 1.0}).in_closed_chamber());
}
