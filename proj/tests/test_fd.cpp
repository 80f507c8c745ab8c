#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aqsim/analytic.hpp"
#include "aqsim/dense_eigen.hpp"
#include "aqsim/propagator.hpp"
#include "aqsim/variational.hpp"
#include "helpers.hpp"

using namespace aqsim;

namespace {

grid1d centered_grid(std::size_t n, double half_width,
                     boundary_kind b = boundary_kind::periodic) {
    double dx = 2.0 * half_width / double(n);
    return grid1d{n, dx, -half_width, b};
}

double chi2_counts(const std::vector<std::size_t>& counts,
                   const std::vector<double>& expected) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (expected[i] < 1e-9) continue;
        double d = double(counts[i]) - expected[i];
        chi2 += d * d / expected[i];
    }
    return chi2;
}

} // namespace

TEST_CASE("momentum eigenstate acquires the discrete dispersion phase") {
    auto g = centered_grid(64, 8.0);
    auto V = potential::zero(g);
    const int kidx = 3;
    const double k = 2.0 * std::numbers::pi * kidx / (g.n * g.dx);
    std::vector<cplx> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        psi[i] = std::polar(1.0 / std::sqrt(double(g.n)), k * g.x(i));
    const double dt = 1e-3;
    auto out = evolve_step(psi, g, V, dt);
    const double Ek = (1.0 - std::cos(k * g.dx)) / (g.dx * g.dx);
    cplx expected_phase = std::polar(1.0, -Ek * dt);
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(std::abs(std::abs(out[i]) - std::abs(psi[i])) < 1e-12);
        CHECK(std::abs(out[i] / psi[i] - expected_phase) < 1e-9);
    }
}

TEST_CASE("dense ground state is stationary under the propagator") {
    auto g = centered_grid(128, 8.0, boundary_kind::hard_wall);
    auto V = potential::harmonic(g);
    auto pairs = eigen_dense(g, V, 1);
    std::vector<cplx> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) psi[i] = pairs[0].state[i];
    auto out = evolve_step(psi, g, V, 1e-3);
    double overlap = 0.0;
    cplx ip{0.0, 0.0};
    for (std::size_t i = 0; i < g.n; ++i) ip += std::conj(psi[i]) * out[i];
    overlap = std::abs(ip);
    CHECK(std::abs(overlap - 1.0) < 1e-8);
}

TEST_CASE("dt = 0 is the identity") {
    auto g = centered_grid(32, 4.0);
    auto V = potential::zero(g);
    auto psi = gaussian_packet(g, 0.0, 1.0);
    auto out = evolve_step(psi, g, V, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(out[i] == psi[i]);
}

TEST_CASE("norm preservation and time reversibility") {
    auto g = centered_grid(128, 8.0);
    auto V = potential::harmonic(g);
    auto psi = gaussian_packet(g, 1.0, 0.8);
    auto fwd = psi;
    const double dt = 2e-3;
    for (int s = 0; s < 50; ++s) {
        fwd = evolve_step(fwd, g, V, dt);
        double n = 0.0;
        for (const auto& a : fwd) n += std::norm(a);
        CHECK(std::abs(n - 1.0) < 1e-10);
    }
    auto back = fwd;
    for (int s = 0; s < 50; ++s) back = evolve_step(back, g, V, -dt);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) err += std::norm(back[i] - psi[i]);
    CHECK(std::sqrt(err) < 1e-8);
}

TEST_CASE("dt above the documented bound raises StabilityError") {
    auto g = centered_grid(64, 4.0);
    auto V = potential::zero(g);
    auto psi = gaussian_packet(g, 0.0, 0.5);
    double bound = max_stable_dt(g, V);
    CHECK_THROWS_AS(evolve_step(psi, g, V, bound * 1.01, units{}), stability_error);
}

TEST_CASE("free Gaussian follows the spreading width law") {
    auto g = centered_grid(1024, 12.0);
    auto V = potential::zero(g);
    const double alpha = 1.0; // amplitude exp(-alpha x^2 / 2)
    const double sigma = 1.0 / std::sqrt(2.0 * alpha);
    auto psi = gaussian_packet(g, 0.0, sigma);
    const double w0 = density_variance(psi, g);
    const double dt = 1e-3;
    double t = 0.0;
    for (int chunk = 0; chunk < 4; ++chunk) {
        for (int s = 0; s < 500; ++s) psi = evolve_step(psi, g, V, dt);
        t += 0.5;
        double ratio = density_variance(psi, g) / w0;
        CHECK(ratio == Catch::Approx(spreading_width_factor(alpha, t)).epsilon(0.02));
    }
}

TEST_CASE("quantum spreading is quadratic in time, diffusion is linear") {
    auto g = centered_grid(1024, 12.0);
    auto V = potential::zero(g);
    const double alpha = 1.0;
    const double sigma = 1.0 / std::sqrt(2.0 * alpha);
    auto psi = gaussian_packet(g, 0.0, sigma);
    const double c0 = 1.0 / (2.0 * density_variance(psi, g));
    const double dt = 1e-3;

    // exponent coefficient after t and 2t of quantum evolution
    auto evolve_to = [&](double t) {
        auto p = gaussian_packet(g, 0.0, sigma);
        int steps = int(std::round(t / dt));
        for (int s = 0; s < steps; ++s) p = evolve_step(p, g, V, dt);
        return 1.0 / (2.0 * density_variance(p, g));
    };
    double tq = 0.05;
    double dq1 = c0 - evolve_to(tq);
    double dq2 = c0 - evolve_to(2.0 * tq);
    // quadratic decay: the drop quadruples when t doubles
    CHECK(dq2 / dq1 == Catch::Approx(4.0).epsilon(0.05));

    // heat kernel with matched initial variance: coefficient drop is linear
    double s0 = density_variance(psi, g);
    double C = 1.0;
    auto cheat = [&](double t) { return 1.0 / (2.0 * (s0 + C * t)); };
    double dh1 = c0 - cheat(tq);
    double dh2 = c0 - cheat(2.0 * tq);
    // linear leading decay: the exact finite-t ratio is 2(s0+Ct)/(s0+2Ct)
    double linear_ratio = 2.0 * (s0 + C * tq) / (s0 + 2.0 * C * tq);
    CHECK(dh2 / dh1 == Catch::Approx(linear_ratio).epsilon(1e-6));
    CHECK(linear_ratio < 2.2);
    // opposite curvature signs at the origin
    CHECK(dq1 / tq < 0.2 * (dh1 / tq));
}

TEST_CASE("evolve_pair keeps division points matched to the density") {
    auto g = centered_grid(64, 6.0, boundary_kind::hard_wall);
    auto V = potential::harmonic(g);
    auto pairs = eigen_dense(g, V, 1);
    std::vector<cplx> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) psi[i] = pairs[0].state[i];

    pair_state st{psi, division_points_continuous(psi, g, 0.01, 7)};
    auto st2 = evolve_pair(st, g, V, 1e-3, 0.01, 8);
    REQUIRE(st2.points.size() == 10000);

    // stationary state: resampled points stay chi-square compatible
    std::vector<std::size_t> counts(g.n, 0);
    for (double x : st2.points) {
        auto idx = static_cast<std::size_t>(std::clamp(
            std::round((x - g.origin) / g.dx), 0.0, double(g.n - 1)));
        counts[idx]++;
    }
    std::vector<double> expected(g.n);
    std::size_t df = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        expected[i] = std::norm(st2.psi[i]) * 10000.0;
        if (expected[i] >= 5.0) ++df;
    }
    // merge small-expectation bins into the chi-square conservatively
    double chi2 = chi2_counts(counts, expected);
    CHECK(chi2 < aqtest::chi2_critical_99(df));
}

TEST_CASE("free Gaussian division points track the analytic width") {
    auto g = centered_grid(512, 12.0);
    auto V = potential::zero(g);
    const double alpha = 1.0;
    const double sigma = 1.0 / std::sqrt(2.0 * alpha);
    pair_state st{gaussian_packet(g, 0.0, sigma),
                  division_points_continuous(gaussian_packet(g, 0.0, sigma), g, 0.01, 3)};
    const double dt = 2e-3;
    double t = 0.0;
    for (int s = 0; s < 500; ++s) {
        st = evolve_pair(st, g, V, dt, 0.01, 100 + s);
        t += dt;
    }
    double mean = 0.0;
    for (double x : st.points) mean += x;
    mean /= double(st.points.size());
    double var = 0.0;
    for (double x : st.points) var += (x - mean) * (x - mean);
    var /= double(st.points.size());
    double expected = spreading_width_factor(alpha, t) / (2.0 * alpha);
    CHECK(var == Catch::Approx(expected).epsilon(0.03));
}

TEST_CASE("g = 0.1 forces exactly 100 division points") {
    auto g = centered_grid(32, 4.0);
    auto psi = gaussian_packet(g, 0.0, 1.0);
    auto pts = division_points_continuous(psi, g, 0.1, 5);
    CHECK(pts.size() == 100);
}

TEST_CASE("eigen_dense matches the harmonic spectrum") {
    auto g = centered_grid(512, 10.0, boundary_kind::hard_wall);
    auto V = potential::harmonic(g);
    auto pairs = eigen_dense(g, V, 3);
    CHECK(pairs[0].energy == Catch::Approx(0.5).margin(1e-3));
    CHECK(pairs[1].energy == Catch::Approx(1.5).margin(5e-3));
    // orthonormality
    double ip = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) ip += pairs[0].state[i] * pairs[1].state[i];
    CHECK(std::abs(ip) < 1e-10);
}

TEST_CASE("eigen_dense particle in a box scales as n^2") {
    auto g = centered_grid(1024, 4.0, boundary_kind::hard_wall);
    auto V = potential::zero(g);
    auto pairs = eigen_dense(g, V, 4);
    // E_n ~ n^2 pi^2 / (2 m L^2); the hard-wall box width is (n+1) dx
    double L = (double(g.n) + 1.0) * g.dx;
    double e1 = std::numbers::pi * std::numbers::pi / (2.0 * L * L);
    for (std::size_t k = 0; k < 4; ++k) {
        double expected = e1 * double((k + 1) * (k + 1));
        CHECK(pairs[k].energy == Catch::Approx(expected).epsilon(1e-3));
    }
}

TEST_CASE("ground state of a symmetric well is nodeless") {
    auto g = centered_grid(256, 6.0, boundary_kind::hard_wall);
    auto V = potential::harmonic(g);
    auto pairs = eigen_dense(g, V, 1);
    for (double v : pairs[0].state) CHECK(v > -1e-12);
}

TEST_CASE("eigen_dense spectrum is invariant under grid translation of V") {
    auto g1 = centered_grid(128, 6.0, boundary_kind::hard_wall);
    grid1d g2 = g1;
    g2.origin += 17.0;
    auto V1 = potential::harmonic(g1, 1.0, 0.0);
    auto V2 = potential::harmonic(g2, 1.0, 17.0);
    auto p1 = eigen_dense(g1, V1, 3);
    auto p2 = eigen_dense(g2, V2, 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(p1[k].energy == Catch::Approx(p2[k].energy).margin(1e-12));
}

TEST_CASE("single-particle variational minimum matches eigen_dense") {
    auto g = centered_grid(64, 6.0, boundary_kind::hard_wall);
    auto V = potential::harmonic(g);
    auto oracle = eigen_dense(g, V, 1);
    auto psi0 = gaussian_packet(g, 1.0, 1.4);
    auto res = variational_minimize_single(g, V, psi0);
    CHECK(std::abs(res.energy - oracle[0].energy) / std::abs(oracle[0].energy) < 1e-6);
    for (std::size_t i = 1; i < res.energy_trace.size(); ++i)
        CHECK(res.energy_trace[i] <= res.energy_trace[i - 1] + 1e-15);
}

TEST_CASE("non-interacting two-particle problem is optimal in product form") {
    two_particle_problem p;
    p.grid = centered_grid(16, 4.0, boundary_kind::hard_wall);
    p.V = potential::harmonic(p.grid);
    p.W = [](std::size_t, std::size_t) { return 0.0; };
    auto a0 = gaussian_packet(p.grid, 0.5, 1.0);
    auto b0 = gaussian_packet(p.grid, -0.5, 1.2);
    auto res = variational_minimize_two(p, a0, b0);
    CHECK(res.stage1.energy - res.stage2.energy < 1e-8);
}

TEST_CASE("contact repulsion: stage 2 reaches the dense two-body oracle") {
    two_particle_problem p;
    p.grid = centered_grid(16, 4.0, boundary_kind::hard_wall);
    p.V = potential::harmonic(p.grid);
    const double gc = 2.0 / p.grid.dx; // contact strength on the grid
    p.W = [gc](std::size_t i, std::size_t j) { return i == j ? gc : 0.0; };
    auto a0 = gaussian_packet(p.grid, 0.5, 1.0);
    auto b0 = gaussian_packet(p.grid, -0.5, 1.0);
    variational_options opts;
    opts.gradient_tolerance = 1e-9;
    auto res = variational_minimize_two(p, a0, b0, opts);
    CHECK(res.stage2.energy <= res.stage1.energy + 1e-12);

    // dense 2-body oracle on the n^2 grid
    const std::size_t n = p.grid.n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n * n, n * n);
    const double kin = 1.0 / (2.0 * p.grid.dx * p.grid.dx);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t r = i * n + j;
            H(r, r) = 4.0 * kin + p.V.values[i] + p.V.values[j] + p.W(i, j);
            if (i > 0) H(r, (i - 1) * n + j) = -kin;
            if (i + 1 < n) H(r, (i + 1) * n + j) = -kin;
            if (j > 0) H(r, i * n + (j - 1)) = -kin;
            if (j + 1 < n) H(r, i * n + (j + 1)) = -kin;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    double e0 = solver.eigenvalues()(0);
    CHECK(std::abs(res.stage2.energy - e0) < 1e-5);
}

TEST_CASE("analytic oracles") {
    CHECK(free_kernel_modulus(2.0, 1.0) ==
          Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(std::abs(free_kernel(3.0, 2.0, 1.0, 1.0)) ==
          Catch::Approx(free_kernel_modulus(2.0, 1.0)).margin(1e-12));
    CHECK(spreading_width_factor(1.0, 0.0) == 1.0);
    CHECK(spreading_width_factor(1.0, 1.0) == Catch::Approx(2.0));
    CHECK_THROWS_AS(free_kernel(0.0, 1.0, 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(heat_kernel(0.0, 0.0, 1.0, 0.0), domain_error);
    CHECK_THROWS_AS(heat_kernel(0.0, 0.0, -1.0, 1.0), domain_error);
    // heat kernel integrates to one
    double s = 0.0;
    for (int i = -4000; i <= 4000; ++i) s += heat_kernel(i * 0.01, 0.0, 1.0, 0.7) * 0.01;
    CHECK(s == Catch::Approx(1.0).margin(1e-6));
    // dispatch view
    oracle_params p;
    p.alpha = 1.0;
    p.t = 1.0;
    CHECK(analytic_oracles(oracle_kind::spreading_width_factor, p).real() ==
          Catch::Approx(2.0));
}
