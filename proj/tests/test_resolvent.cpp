#include "doctest.h"

#include <random>

#include "fdw/resolvent.hpp"

using namespace fdw;

namespace {

DampingProfile profile(const Grid& g, ProfileKind kind, double level, std::uint64_t seed = 0) {
    ProfileDescriptor d;
    d.kind = kind;
    d.level = level;
    d.cell_width = 4.0;
    d.bump_fraction = 0.5;
    d.seed = seed;
    d.interval = {-2.0, 2.0};
    return make_profile(d, g);
}

Eigen::VectorXcd random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (auto& z : v) z = Complex(nd(rng), nd(rng));
    return v;
}

// sigma_min of a 2x2 complex matrix from |det| / sigma_max.
double smallest_singular_2x2(const Eigen::Matrix2cd& m) {
    const double fro2 = m.squaredNorm();
    const double det = std::abs(m.determinant());
    const double smax = std::sqrt((fro2 + std::sqrt(std::max(fro2 * fro2 - 4.0 * det * det, 0.0))) / 2.0);
    return det / smax;
}

std::vector<Eigen::Index> all_indices(const Grid& g) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(g.size()));
    for (Eigen::Index j = 0; j < g.size(); ++j) idx[static_cast<std::size_t>(j)] = j;
    return idx;
}

}  // namespace

TEST_CASE("generator structure") {
    Grid g(10.0, 64);
    const double s = 1.3;

    SUBCASE("undamped generator is skew-adjoint in the energy geometry") {
        const auto gen = assemble_generator(profile(g, ProfileKind::constant, 0.0), s);
        const Eigen::MatrixXcd b = gen.weighted();
        CHECK((b + b.adjoint()).norm() <= 1e-12);
        // D^s block diagonal
        const Eigen::MatrixXcd lower = gen.matrix().block(64, 0, 64, 64);
        CHECK((lower - Eigen::MatrixXcd(lower.diagonal().asDiagonal())).norm() == 0.0);
    }

    SUBCASE("constant damping block is c times identity") {
        const auto gen = assemble_generator(profile(g, ProfileKind::constant, 0.7), s);
        CHECK((gen.damping_block() - 0.7 * Eigen::MatrixXcd::Identity(64, 64)).norm() <= 1e-13);
    }

    SUBCASE("dissipation identity and negative semidefinite Hermitian part") {
        std::mt19937_64 rng(17);
        for (auto kind : {ProfileKind::random_dense, ProfileKind::gap, ProfileKind::compact_support}) {
            const auto gamma = profile(g, kind, 1.3, 5);
            const auto gen = assemble_generator(gamma, s);
            for (int trial = 0; trial < 10; ++trial) {
                const Eigen::VectorXcd u = random_vector(128, rng);
                const double lhs = gen.inner(u, gen.matrix() * u).real();
                // |sqrt(gamma) u2|^2 evaluated in physical space
                const Field u2 = inverse_transform(Spectrum(g, u.tail(64)));
                double rhs = 0.0;
                for (Eigen::Index j = 0; j < 64; ++j) rhs += gamma.samples()[j] * std::norm(u2.samples[j]) * g.dx();
                const double unorm = gen.inner(u, u).real();
                CHECK(std::abs(lhs + rhs) <= 1e-10 * unorm);
            }
            const Eigen::MatrixXcd b = gen.weighted();
            const Eigen::MatrixXcd herm = (b + b.adjoint()) / 2.0;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
        }
    }

    SUBCASE("budget") {
        Grid big(10.0, 2048);
        CHECK_THROWS_AS(assemble_generator(profile(big, ProfileKind::constant, 1.0), s), ResourceError);
        CHECK_NOTHROW(assemble_generator(profile(g, ProfileKind::constant, 1.0), s, 64));
    }
}

TEST_CASE("resolvent norm oracles") {
    Grid g(8.0, 64);
    std::mt19937_64 rng(3);

    SUBCASE("undamped: spectral distance") {
        for (double s : {0.8, 1.0, 2.0, 3.0}) {
            const auto gen = assemble_generator(profile(g, ProfileKind::constant, 0.0), s);
            CHECK(resolvent_norm_at(gen, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
            std::uniform_real_distribution<double> lam(0.0, gen.omega_max());
            for (int i = 0; i < 20; ++i) {
                const double l = lam(rng);
                double dist = std::numeric_limits<double>::infinity();
                for (Eigen::Index k = 0; k < g.size(); ++k) {
                    const double om = std::pow(g.xi(k) * g.xi(k) + 1.0, s / 4.0);
                    dist = std::min({dist, std::abs(l - om), std::abs(l + om)});
                }
                CHECK(resolvent_norm_at(gen, l) == doctest::Approx(1.0 / dist).epsilon(1e-8));
            }
        }
    }

    SUBCASE("constant damping: per-mode 2x2 blocks") {
        for (double c : {0.2, 1.0, 3.0}) {
            const double s = 1.5;
            const auto gen = assemble_generator(profile(g, ProfileKind::constant, c), s);
            std::uniform_real_distribution<double> lam(-gen.omega_max(), gen.omega_max());
            for (int i = 0; i < 20; ++i) {
                const double l = lam(rng);
                double best = 0.0;
                for (Eigen::Index k = 0; k < g.size(); ++k) {
                    const double om = std::pow(g.xi(k) * g.xi(k) + 1.0, s / 4.0);
                    Eigen::Matrix2cd m;
                    m << Complex(0, -l), om, -om, Complex(-c, -l);
                    best = std::max(best, 1.0 / smallest_singular_2x2(m));
                }
                CHECK(resolvent_norm_at(gen, l) == doctest::Approx(best).epsilon(1e-8));
            }
        }
    }

    SUBCASE("symmetric in lambda for real damping") {
        const auto gen = assemble_generator(profile(g, ProfileKind::random_dense, 1.0, 2), 1.0);
        for (double l : {0.3, 1.7, 2.9}) {
            CHECK(resolvent_norm_at(gen, -l) == doctest::Approx(resolvent_norm_at(gen, l)).epsilon(1e-8));
        }
    }

    SUBCASE("exact eigenvalue reports the infinity marker") {
        const auto gen = assemble_generator(profile(g, ProfileKind::constant, 0.0), 2.0);
        // xi = 0 mode: omega = 1
        CHECK(std::isinf(resolvent_norm_at(gen, 1.0)));
        CHECK_THROWS_AS(resolvent_scan(gen, {0.5, 1.0}), InBandEigenvalueError);
        try {
            resolvent_scan(gen, {0.5, 1.0});
        } catch (const InBandEigenvalueError& e) {
            CHECK(e.lambda() == 1.0);
        }
    }
}

TEST_CASE("resolvent scan") {
    Grid g(8.0, 64);
    const auto gen = assemble_generator(profile(g, ProfileKind::random_dense, 1.0, 4), 1.0);
    const auto lambdas = resolved_band(gen, 6);
    CHECK(lambdas.back() == doctest::Approx(gen.omega_max() / 2.0));
    const auto one = resolvent_scan(gen, lambdas, 1);
    const auto many = resolvent_scan(gen, lambdas, 3);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        CHECK(one.values[i] == resolvent_norm_at(gen, lambdas[i]));
        CHECK(many.values[i] == one.values[i]);
    }
    CHECK(std::isfinite(one.exponent));
    CHECK(one.to_csv("lambda", "resolvent_norm").rfind("lambda,resolvent_norm\n", 0) == 0);
    CHECK_THROWS_AS(resolvent_scan(gen, {1.0, 0.5}), ParameterError);

    ScanResult synthetic;
    for (double l : {0.0, 1.0, 3.0, 7.0}) {
        synthetic.parameters.push_back(l);
        synthetic.values.push_back(2.0 * std::pow(1.0 + l, 1.5));
    }
    fit_scan_exponent(synthetic);
    CHECK(synthetic.exponent == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(synthetic.residual < 1e-12);
}

TEST_CASE("scalar resolvent constant") {
    Grid g(8.0, 64);
    CHECK(scalar_resolvent_constant(all_indices(g), 1.5, 2.0, g) >= 1.0 - 1e-12);
    for (double s : {0.5, 1.0, 3.0}) CHECK(scalar_resolvent_constant({}, s, 0.0, g) >= 1.0 - 1e-12);

    const Eigen::Index k = 32 + 3;
    const double lambda = std::sqrt(g.xi(k) * g.xi(k) + 1.0);
    CHECK(scalar_resolvent_constant({}, 1.0, lambda, g) <= 1e-10);

    SUBCASE("monotone in Omega") {
        std::mt19937_64 rng(9);
        std::vector<Eigen::Index> omega;
        double prev = scalar_resolvent_constant(omega, 1.0, 2.5, g);
        for (int round = 0; round < 6; ++round) {
            for (int i = 0; i < 8; ++i) omega.push_back(static_cast<Eigen::Index>(rng() % 64));
            const double now = scalar_resolvent_constant(omega, 1.0, 2.5, g);
            CHECK(now >= prev - 1e-10);
            prev = now;
        }
    }

    SUBCASE("agrees with a Rayleigh quotient bound") {
        // the constant never exceeds the quotient of any trial vector
        const auto gamma = profile(g, ProfileKind::random_dense, 1.0, 3);
        const auto omega = gamma.level_set(0.5);
        std::mt19937_64 rng(1);
        const double s = 1.0, lambda = 2.0;
        const double c = scalar_resolvent_constant(omega, s, lambda, g);
        for (int t = 0; t < 20; ++t) {
            const Eigen::VectorXcd f = random_vector(64, rng);
            const Field phys = inverse_transform(Spectrum(g, f));
            double on_omega = 0.0;
            for (auto j : omega) on_omega += std::norm(phys.samples[j]) * g.dx();
            double op = 0.0;
            for (Eigen::Index i = 0; i < 64; ++i) {
                const double d = std::pow(g.xi(i) * g.xi(i) + 1.0, s / 2.0) - lambda;
                op += d * d * std::norm(f[i]) * g.dxi();
            }
            const double quotient = (std::pow(1.0 + lambda, 2.0 / s - 2.0) * op + on_omega) / (f.squaredNorm() * g.dxi());
            CHECK(c <= quotient * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("wave observability constant") {
    Grid g(8.0, 64);

    SUBCASE("kernel at a modal frequency") {
        const Eigen::Index k = 32 + 5;
        for (double s : {1.0, 2.0}) {
            const double om = std::pow(g.xi(k) * g.xi(k) + 1.0, s / 4.0);
            CHECK(wave_observability_constant({}, s, om, g) <= 1e-10);
        }
    }

    SUBCASE("full observation at lambda = 0") {
        CHECK(wave_observability_constant(all_indices(g), 1.0, 0.0, g) > 0.5);
    }

    SUBCASE("matches the Gram form built from the generator") {
        const auto gen = assemble_generator(profile(g, ProfileKind::constant, 0.0), 1.0);
        const auto gamma = profile(g, ProfileKind::random_dense, 1.0, 6);
        const auto omega = gamma.level_set(0.5);
        for (double lambda : {0.0, 0.7, -1.3}) {
            Eigen::MatrixXcd b = gen.weighted();
            b.diagonal().array() -= Complex(0.0, lambda);
            Eigen::MatrixXcd q = std::pow(std::abs(lambda) + 1.0, 2.0) * (b.adjoint() * b);
            q.block(64, 64, 64, 64) += multiplication_operator(g, indicator(g, omega));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
            CHECK(wave_observability_constant(omega, 1.0, lambda, g) ==
                  doctest::Approx(std::max(es.eigenvalues().minCoeff(), 0.0)).epsilon(1e-9));
        }
    }

    SUBCASE("random dense Omega, s = 1: positive with bounded decay in lambda") {
        const auto gamma = profile(g, ProfileKind::random_dense, 1.0, 11);
        const auto omega = gamma.level_set(0.1);
        const double c0 = wave_observability_constant(omega, 1.0, 0.0, g);
        double cmin = c0;
        for (int l = 0; l <= 40; ++l) {
            const double c = wave_observability_constant(omega, 1.0, l, g);
            cmin = std::min(cmin, c);
            CHECK(c >= c0 * std::pow(l + 1.0, -2.0) / 5.0);
        }
        CHECK(cmin > 0.0);
    }

    SUBCASE("monotone in Omega") {
        std::mt19937_64 rng(2);
        std::vector<Eigen::Index> omega;
        double prev = wave_observability_constant(omega, 1.5, 1.1, g);
        for (int round = 0; round < 5; ++round) {
            for (int i = 0; i < 10; ++i) omega.push_back(static_cast<Eigen::Index>(rng() % 64));
            const double now = wave_observability_constant(omega, 1.5, 1.1, g);
            CHECK(now >= prev - 1e-10);
            prev = now;
        }
    }
}
