#include "doctest.h"

#include <random>

#include "fdw/spectral.hpp"

using namespace fdw;

namespace {

Field random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXcd f(g.size());
    for (auto& z : f) z = Complex(n(rng), n(rng));
    return Field(g, f);
}

// Direct quadrature of (2 pi)^{-1/2} sum_j f_j exp(-i xi_k x_j) dx.
Eigen::VectorXcd naive_transform(const Field& f) {
    const Grid& g = f.grid;
    Eigen::VectorXcd c(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            acc += f.samples[j] * std::exp(Complex(0.0, -g.xi(i) * g.x(j)));
        }
        c[i] = acc * g.dx() / std::sqrt(2.0 * M_PI);
    }
    return c;
}

}  // namespace

TEST_CASE("grid invariants") {
    Grid g(40.0 * M_PI, 512);
    CHECK(g.frequencies().size() == 512);
    CHECK(g.dx() * 512 == doctest::Approx(2.0 * g.half_length()).epsilon(1e-15));
    CHECK(g.xi(0) == doctest::Approx(-g.xi_max()));
    // symmetric apart from the unpaired slot 0
    for (Eigen::Index i = 1; i < 512; ++i) CHECK(g.xi(i) == doctest::Approx(-g.xi(512 - i)));

    CHECK_THROWS_AS(Grid(1.0, 7), ParameterError);
    CHECK_THROWS_AS(Grid(1.0, 24), ParameterError);
    CHECK_NOTHROW(Grid(1.0, 24, false));
    CHECK_THROWS_AS(Grid(-1.0, 8), ParameterError);
    CHECK_THROWS_AS(Field(g, Eigen::VectorXcd::Zero(3)), StructuralError);
}

TEST_CASE("transform matches direct quadrature") {
    Grid g(3.0, 64);
    const Field f = random_field(g, 7);
    const Spectrum c = forward_transform(f);
    CHECK((c.coefficients - naive_transform(f)).norm() <= 1e-12 * c.coefficients.norm());
}

TEST_CASE("constant field lives at zero frequency") {
    Grid g(5.0, 128);
    const Spectrum c = forward_transform(Field(g, Eigen::VectorXcd::Ones(g.size())));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g.xi(i) == 0.0) {
            CHECK(std::abs(c.coefficients[i]) > 1.0);
        } else {
            CHECK(std::abs(c.coefficients[i]) < 1e-12);
        }
    }
}

TEST_CASE("round trip and Parseval over seeded fields") {
    Grid g(7.0, 256);
    FourierTransform ft(g);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Field f = random_field(g, seed);
        const Spectrum c = ft.forward(f);
        const Field back = ft.inverse(c);
        CHECK((back.samples - f.samples).norm() <= 1e-12 * f.samples.norm());

        // Both sums computed directly with their quadrature weights.
        double phys = 0.0;
        for (auto z : f.samples) phys += std::norm(z) * g.dx();
        double freq = 0.0;
        for (auto z : c.coefficients) freq += std::norm(z) * M_PI / g.half_length();
        CHECK(std::abs(std::sqrt(phys) - std::sqrt(freq)) <= 1e-12 * std::sqrt(phys));
    }
}

TEST_CASE("transform rejects a foreign grid") {
    FourierTransform ft(Grid(1.0, 16));
    CHECK_THROWS_AS(ft.forward(Field::zeros(Grid(2.0, 16))), StructuralError);
    Eigen::VectorXcd out;
    CHECK_THROWS_AS(ft.forward(Eigen::VectorXcd::Zero(8), out), StructuralError);
}

TEST_CASE("bessel multiplier") {
    Grid g(M_PI, 32);  // xi_k = k
    const Spectrum c = forward_transform(random_field(g, 3));

    CHECK((apply_bessel_multiplier(c, 0.0).coefficients - c.coefficients).norm() == 0.0);

    Spectrum mode = Spectrum::zeros(g);
    const Eigen::Index slot = 16 + 3;
    REQUIRE(g.xi(slot) == doctest::Approx(3.0));
    mode.coefficients[slot] = Complex(0.5, -2.0);
    const Spectrum scaled = apply_bessel_multiplier(mode, 2.0);
    CHECK(std::abs(scaled.coefficients[slot] - 10.0 * mode.coefficients[slot]) < 1e-13);

    const Spectrum there_and_back = apply_bessel_multiplier(apply_bessel_multiplier(c, 1.7), -1.7);
    CHECK((there_and_back.coefficients - c.coefficients).norm() <= 1e-12 * c.coefficients.norm());

    const Spectrum pq = apply_bessel_multiplier(apply_bessel_multiplier(c, 0.6), 1.1);
    const Spectrum sum = apply_bessel_multiplier(c, 1.7);
    CHECK((pq.coefficients - sum.coefficients).norm() <= 1e-12 * sum.coefficients.norm());
}

TEST_CASE("band projection") {
    Grid g(4.0, 64);
    const Spectrum c = forward_transform(random_field(g, 11));
    const double top = M_PI * 64 / (2.0 * 4.0);

    CHECK(band_project(c, {{-top, top}}).coefficients == c.coefficients);
    CHECK(band_project(c, {}).coefficients.norm() == 0.0);

    const std::vector<Interval> bands{{-5.0, -2.0}, {1.0, 3.3}};
    const Spectrum once = band_project(c, bands);
    CHECK(band_project(once, bands).coefficients == once.coefficients);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const bool kept = (g.xi(i) >= -5.0 && g.xi(i) <= -2.0) || (g.xi(i) >= 1.0 && g.xi(i) <= 3.3);
        CHECK((once.coefficients[i] == c.coefficients[i]) == (kept || c.coefficients[i] == Complex(0)));
    }

    // self-adjoint for the discrete inner product
    const Spectrum d = forward_transform(random_field(g, 12));
    const Complex lhs = band_project(c, bands).coefficients.dot(d.coefficients);
    const Complex rhs = c.coefficients.dot(band_project(d, bands).coefficients);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));

    CHECK_THROWS_AS(band_project(c, {{2.0, 1.0}}), StructuralError);
}

TEST_CASE("sobolev norm") {
    Grid g(6.0, 128);
    const Field f = random_field(g, 5);
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));

    const Eigen::Index k = 9;
    const double xi0 = g.dxi() * k;
    const double amp = 1.3;
    Eigen::VectorXcd mode(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) mode[j] = amp * std::exp(Complex(0, xi0 * g.x(j)));
    for (double r : {-1.0, 0.0, 0.5, 1.5}) {
        const double expected = std::pow(xi0 * xi0 + 1.0, r / 2.0) * amp * std::sqrt(2.0 * g.half_length());
        CHECK(sobolev_norm(Field(g, mode), r) == doctest::Approx(expected).epsilon(1e-12));
    }

    double prev = 0.0;
    for (double r = -2.0; r <= 2.0; r += 0.25) {
        const double now = sobolev_norm(f, r);
        CHECK(now >= prev);
        prev = now;
    }

    for (double s : {0.5, 1.0, 2.0, 3.0}) {
        const Spectrum c = forward_transform(f);
        const double via_multiplier = l2_norm(apply_bessel_multiplier(c, s / 2.0));
        CHECK(sobolev_norm(f, s / 2.0) == doctest::Approx(via_multiplier).epsilon(1e-12));
    }
}
