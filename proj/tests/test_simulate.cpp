#include "doctest.h"
#include "dlkit/model.hpp"
#include "dlkit/simulate.hpp"
#include "dlkit/stats.hpp"
#include <Eigen/QR>
#include <cmath>

using namespace dlkit;

TEST_CASE("zero-noise step converges to identity") {
    auto p = ModelParams::make(3, 5.0, 1.0);
    std::vector<double> y = {1.0, 2.0, 3.5};
    std::vector<double> zero(3, 0.0);
    auto out = step_sqrt_coords(y, 1e-12, p, zero);
    for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(y[i]).epsilon(1e-10));
}

TEST_CASE("weak first order consistency against the generator") {
    auto p = ModelParams::make(3, 5.0, 1.0);
    ParticleState x({1.0, 4.0, 9.0});
    Polynomial f(3);
    f.add_term({2, 0, 0}, 1.0);
    f.add_term({1, 1, 0}, -0.5);
    f.add_term({0, 0, 1}, 2.0);
    f.add_term({0, 1, 1}, 0.25);
    double gf = apply_generator(f, x, p);
    std::vector<double> dts = {1e-3, 5e-4, 2.5e-4}, est;
    RngStream rng(17, 0);
    const int N = 40000;
    for (double dt : dts) {
        double acc = 0;
        std::vector<double> xi(3), nxi(3);
        for (int k = 0; k < N; ++k) {
            for (int i = 0; i < 3; ++i) {
                xi[i] = rng.normal();
                nxi[i] = -xi[i];
            }
            // antithetic pair; the linear noise term cancels exactly
            auto a = step_dl_sqrt_noise(x, dt, p, xi);
            auto b = step_dl_sqrt_noise(x, dt, p, nxi);
            acc += 0.5 * (f(a.coords) + f(b.coords)) - f(x.coords);
        }
        est.push_back(acc / N / dt);
    }
    // linear regression of est on dt, intercept is the generator value
    double mx = 0, my = 0;
    for (int i = 0; i < 3; ++i) {
        mx += dts[i] / 3;
        my += est[i] / 3;
    }
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
        sxy += (dts[i] - mx) * (est[i] - my);
        sxx += (dts[i] - mx) * (dts[i] - mx);
    }
    double intercept = my - sxy / sxx * mx;
    CHECK(intercept == doctest::Approx(gf).epsilon(0.03));
    for (double e : est) CHECK(e == doctest::Approx(gf).epsilon(0.05));
}

TEST_CASE("integrator stays in the chamber") {
    auto p = ModelParams::make(4, 5.5, 2.0);
    RngStream rng(1, 0);
    std::vector<double> y = to_sqrt_coords(ParticleState({0.5, 1.0, 2.0, 3.0}));
    for (int k = 0; k < 100000; ++k) {
        advance_sqrt_coords(y, 1e-3, 1e-3, p, rng);
        bool ok = y[0] > 0;
        for (int i = 1; i < 4; ++i) ok = ok && y[i] > y[i - 1];
        if (!ok) {
            FAIL("left the chamber at step " << k);
            break;
        }
    }
    CHECK_THROWS_AS(step_dl_sqrt(ParticleState({1.0, 1.0, 2.0, 3.0}), 1e-3, p, rng), CollisionError);
    CHECK_THROWS_AS(step_dl_sqrt(ParticleState({1.0, 1.5, 2.0, 3.0}), 0.0, p, rng), DomainError);
}

TEST_CASE("CIR exact transition") {
    RngStream rng(2, 0);
    std::vector<double> v;
    for (int i = 0; i < 100000; ++i) v.push_back(cir_exact_transition(5.0, 1.0, 2.0, rng));
    auto m = moments(v);
    CHECK(std::abs(m.mean - (2 + 3 * std::exp(-1.0))) < 3 * m.stderr_mean);
    // exact variance: alpha (1-e)^2 + 2 x0 e (1-e), e = e^{-t}
    double e = std::exp(-1.0);
    double var = 2.0 * (1 - e) * (1 - e) + 2 * 5.0 * e * (1 - e);
    CHECK(std::abs(m.variance - var) < 3 * variance_stderr(v));
    CHECK_THROWS_AS(cir_exact_transition(1.0, 0.0, 2.0, rng), DomainError);
    CHECK_THROWS_AS(cir_exact_transition(1.0, 1.0, 0.0, rng), DomainError);

    std::vector<double> stat, late;
    for (int i = 0; i < 20000; ++i) {
        stat.push_back(cir_exact_transition(rng.gamma(2.0), 0.7, 2.0, rng));
        late.push_back(cir_exact_transition(7.0, 30.0, 2.0, rng));
    }
    auto cdf = [](double x) { return gamma_cdf(x, 2.0); };
    CHECK(ks_one_sample(stat, cdf).p_value > 0.01);
    CHECK(ks_one_sample(late, cdf).p_value > 0.01);

    std::vector<double> two, one;
    for (int i = 0; i < 20000; ++i) {
        two.push_back(cir_exact_transition(cir_exact_transition(3.0, 0.4, 1.5, rng), 0.6, 1.5, rng));
        one.push_back(cir_exact_transition(3.0, 1.0, 1.5, rng));
    }
    CHECK(ks_two_sample(two, one).p_value > 0.01);
}

TEST_CASE("rectangular OU transition") {
    auto mp = MatrixParams::bru(2, 3);
    MatrixState M0(2, 3);
    M0 << 1, -2, 0.5, 3, 0, -1;
    RngStream rng(3, 0);
    CHECK(rect_ou_transition(M0, 0.0, mp, rng) == M0);
    const int N = 40000;
    std::vector<double> e00, e12;
    for (int k = 0; k < N; ++k) {
        auto M = rect_ou_transition(M0, 1.0, mp, rng);
        e00.push_back(M(0, 0));
        e12.push_back(M(1, 2));
    }
    auto a = moments(e00), b = moments(e12);
    CHECK(std::abs(a.mean - std::exp(-0.5) * 1.0) < 3 * a.stderr_mean);
    CHECK(std::abs(b.mean - std::exp(-0.5) * -1.0) < 3 * b.stderr_mean);
    double var = 1.5 * (1 - std::exp(-1.0));
    CHECK(std::abs(a.variance - var) < 3 * variance_stderr(e00));
    CHECK(std::abs(b.variance - var) < 3 * variance_stderr(e12));
    CHECK_THROWS_AS(rect_ou_transition(MatrixState::Zero(3, 3), 1.0, mp, rng), SizeMismatch);
}

TEST_CASE("spectral projection") {
    MatrixState M = MatrixState::Zero(3, 5);
    M(0, 0) = 3;
    M(1, 1) = -1;
    M(2, 2) = 2;
    auto x = spectral_projection(M);
    CHECK(x[0] == doctest::Approx(1));
    CHECK(x[1] == doctest::Approx(4));
    CHECK(x[2] == doctest::Approx(9));

    RngStream rng(4, 0);
    auto rnd = [&](int r, int c) {
        MatrixState A(r, c);
        for (int j = 0; j < c; ++j)
            for (int i = 0; i < r; ++i) A(i, j) = rng.normal();
        return A;
    };
    for (int k = 0; k < 50; ++k) {
        MatrixState A = rnd(3, 5);
        Eigen::HouseholderQR<Eigen::MatrixXd> qu(rnd(3, 3)), qv(rnd(5, 5));
        MatrixState U = qu.householderQ(), V = qv.householderQ();
        auto a = spectral_projection(A), b = spectral_projection(U * A * V);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10 * (1 + a[2]));
    }
    bool hw = true;
    for (int k = 0; k < 10000; ++k) {
        MatrixState A = rnd(3, 4), B = rnd(3, 4);
        auto sa = singular_values(A), sb = singular_values(B);
        double lhs = 0;
        for (int i = 0; i < 3; ++i) lhs += (sa[i] - sb[i]) * (sa[i] - sb[i]);
        hw = hw && lhs <= (A - B).squaredNorm() * (1 + 1e-12);
    }
    CHECK(hw);
}

TEST_CASE("matrix route") {
    auto mp = MatrixParams::bru(3, 4);
    RngStream rng(5, 0);
    auto path = matrix_dl_path(MatrixState::Zero(3, 4), {0.0, 1.0}, mp, rng);
    CHECK(path.scheme == "matrix-exact");
    CHECK(path.states[0].sum() == 0.0);
    CHECK_THROWS_AS(matrix_dl_path(MatrixState::Zero(3, 4), {1.0, 0.5}, mp, rng), DomainError);

    // trace identity: the phi ensemble equals the sum of projected eigenvalues
    auto phi = ensemble_matrix_phi(MatrixState::Zero(3, 4), {1.0}, mp, 5, RngStream(8, 0), Exec::serial);
    auto paths = ensemble_matrix_paths(MatrixState::Zero(3, 4), {1.0}, mp, 5, RngStream(8, 0), Exec::serial);
    for (int r = 0; r < 5; ++r) CHECK(phi[0][r] == doctest::Approx(paths[r].states[0].sum()).epsilon(1e-12));

    // induced alpha = m/2: E sum X_t = alpha n (1 - e^{-t}) from zero
    auto z = ensemble_matrix_phi(MatrixState::Zero(3, 4), {1.0}, mp, 20000, RngStream(9, 0));
    auto mo = moments(z[0]);
    CHECK(std::abs(mo.mean - 2.0 * 3 * (1 - std::exp(-1.0))) < 3 * mo.stderr_mean);

    // marginals do not depend on intermediate grid points
    auto coarse = ensemble_matrix_phi(MatrixState::Zero(3, 4), {2.0}, mp, 5000, RngStream(10, 0));
    auto fine = ensemble_matrix_phi(MatrixState::Zero(3, 4), {0.5, 1.0, 1.5, 2.0}, mp, 5000, RngStream(11, 0));
    CHECK(ks_two_sample(coarse[0], fine[3]).p_value > 0.01);
}

TEST_CASE("quadratic variation of the phi projection is 2 Z dt") {
    auto p = ModelParams::make(3, 4.0, 1.0);
    std::vector<double> grid;
    for (int k = 0; k <= 2000; ++k) grid.push_back(k * 1e-3);
    double qv = 0, integral = 0;
    for (int r = 0; r < 4; ++r) {
        RngStream rng(12, r);
        auto path = dl_sqrt_path(ParticleState({1.0, 3.0, 6.0}), grid, p, rng, 1e-4);
        for (std::size_t k = 1; k < grid.size(); ++k) {
            double dz = path.states[k].sum() - path.states[k - 1].sum();
            qv += dz * dz;
            integral += 2 * path.states[k - 1].sum() * 1e-3;
        }
    }
    CHECK(qv / integral == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ensembles are reproducible") {
    auto p = ModelParams::make(2, 3.0, 1.0);
    auto a = ensemble_sqrt_phi(ParticleState({1.0, 2.0}), {0.3, 0.6}, p, 8, RngStream(3, 3));
    auto b = ensemble_sqrt_phi(ParticleState({1.0, 2.0}), {0.3, 0.6}, p, 8, RngStream(3, 3));
    CHECK(a == b);
}
