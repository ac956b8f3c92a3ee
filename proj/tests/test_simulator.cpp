#include "doctest.h"

#include <random>

#include "fdw/simulator.hpp"

using namespace fdw;

namespace {

DampingProfile constant_profile(const Grid& g, double c) {
    ProfileDescriptor d;
    d.kind = ProfileKind::constant;
    d.level = c;
    return make_profile(d, g);
}

DampingProfile dense_profile(const Grid& g, std::uint64_t seed) {
    ProfileDescriptor d;
    d.kind = ProfileKind::random_dense;
    d.cell_width = 4.0;
    d.bump_fraction = 0.4;
    d.level = 1.5;
    d.seed = seed;
    return make_profile(d, g);
}

WaveState random_state(const Grid& g, std::uint64_t seed) {
    InitialDataDescriptor d;
    d.kind = InitialDataKind::band_limited_random;
    d.seed = seed;
    return make_initial_state(d, g);
}

WaveState single_mode_state(const Grid& g, int k, Complex w0, Complex v0) {
    Eigen::VectorXcd w(g.size()), v(g.size());
    const double xi = g.dxi() * k;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        const Complex e = std::exp(Complex(0.0, xi * g.x(j)));
        w[j] = w0 * e;
        v[j] = v0 * e;
    }
    return WaveState(Field(g, w), Field(g, v));
}

}  // namespace

TEST_CASE("energy") {
    Grid g(10.0, 128);
    CHECK(energy(WaveState(Field::zeros(g), Field::zeros(g)), 1.0) == 0.0);

    const int k = 5;
    const double xi = g.dxi() * k;
    const double amp = 0.8;
    for (double s : {0.5, 1.0, 3.0}) {
        const auto st = single_mode_state(g, k, amp, 0.0);
        const double expected = std::pow(xi * xi + 1.0, s / 4.0) * amp * std::sqrt(2.0 * g.half_length());
        CHECK(energy(st, s) == doctest::Approx(expected).epsilon(1e-12));
    }

    const auto r = random_state(g, 3);
    CHECK(energy(WaveState(Field::zeros(g), r.v), 2.0) == doctest::Approx(l2_norm(r.v)).epsilon(1e-12));
    CHECK_THROWS_AS(WaveState(Field::zeros(g), Field::zeros(Grid(10.0, 64))), StructuralError);
}

TEST_CASE("undamped step is the exact modal rotation") {
    Grid g(8.0, 64);
    const auto st = random_state(g, 1);
    const double dt = 0.37;
    const double s = 1.4;
    const auto next = step_strang(st, dt, constant_profile(g, 0.0), s);
    const Spectrum w0 = forward_transform(st.w), v0 = forward_transform(st.v);
    const Spectrum w1 = forward_transform(next.w), v1 = forward_transform(next.v);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double om = std::pow(g.xi(i) * g.xi(i) + 1.0, s / 4.0);
        const Complex we = w0.coefficients[i] * std::cos(om * dt) + v0.coefficients[i] * std::sin(om * dt) / om;
        const Complex ve = -w0.coefficients[i] * om * std::sin(om * dt) + v0.coefficients[i] * std::cos(om * dt);
        CHECK(std::abs(w1.coefficients[i] - we) <= 1e-12 * (1.0 + std::abs(we)));
        CHECK(std::abs(v1.coefficients[i] - ve) <= 1e-12 * (1.0 + std::abs(ve)));
    }
    CHECK(next.t == doctest::Approx(dt));
}

TEST_CASE("constant damping oracle") {
    const Complex w0(0.7, -0.2), v0(-0.4, 1.1);
    SUBCASE("undamped oscillator") {
        const double xi = 1.7, s = 1.3, t = 2.9;
        const double om = std::pow(xi * xi + 1.0, s / 4.0);
        const auto [w, v] = constant_damping_oracle(xi, 0.0, w0, v0, t, s);
        CHECK(std::abs(w - (w0 * std::cos(om * t) + v0 * std::sin(om * t) / om)) < 1e-13);
        CHECK(std::abs(v - (-w0 * om * std::sin(om * t) + v0 * std::cos(om * t))) < 1e-13);
    }
    SUBCASE("critical damping") {
        for (double t : {0.0, 0.5, 3.0}) {
            const auto [w, v] = constant_damping_oracle(0.0, 2.0, w0, v0, t, 2.0);
            CHECK(std::abs(w - (w0 + (v0 + w0) * t) * std::exp(-t)) < 1e-14);
        }
    }
    SUBCASE("underdamped envelope") {
        const double beta = std::sqrt(3.0) / 2.0;
        const double period = 2.0 * M_PI / beta;
        for (double t : {0.3, 1.1, 4.0}) {
            const auto a = constant_damping_oracle(0.0, 1.0, w0, v0, t, 1.0).first;
            const auto b = constant_damping_oracle(0.0, 1.0, w0, v0, t + period, 1.0).first;
            CHECK(std::abs(a * std::exp(t / 2.0) - b * std::exp((t + period) / 2.0)) < 1e-12);
        }
    }
    SUBCASE("solves the ODE in every regime") {
        // central differences: w'' + g w' + m w = 0, and v = w'
        for (double g0 : {0.0, 0.5, 2.0 * std::sqrt(std::pow(1.25, 0.75)), 3.5}) {
            const double xi = 0.5, s = 1.5, h = 1e-4, t = 1.3;
            const double m = std::pow(xi * xi + 1.0, s / 2.0);
            auto w = [&](double tt) { return constant_damping_oracle(xi, g0, w0, v0, tt, s).first; };
            const Complex d1 = (w(t + h) - w(t - h)) / (2.0 * h);
            const Complex d2 = (w(t + h) - 2.0 * w(t) + w(t - h)) / (h * h);
            CHECK(std::abs(d2 + g0 * d1 + m * w(t)) < 1e-5);
            CHECK(std::abs(constant_damping_oracle(xi, g0, w0, v0, t, s).second - d1) < 1e-6);
        }
    }
}

TEST_CASE("energy never increases across a step") {
    Grid g(20.0, 256);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto gamma = dense_profile(g, seed);
        for (double s : {0.5, 1.0, 2.0, 3.0}) {
            auto st = random_state(g, seed + 10);
            for (int i = 0; i < 20; ++i) {
                const auto next = step_strang(st, 0.05, gamma, s);
                CHECK(energy(next, s) <= energy(st, s) * (1.0 + 1e-12));
                st = next;
            }
        }
    }
}

TEST_CASE("simulate") {
    Grid g(12.0, 128);
    const auto st = random_state(g, 4);
    const double s = 1.5;

    SUBCASE("trace layout") {
        const auto trace = simulate(st, dense_profile(g, 2), s, 1.0, 0.01, 7);
        CHECK(trace.size() == static_cast<std::size_t>(std::floor(1.0 / (0.01 * 7))) + 1);
        CHECK(trace.energies.front() == doctest::Approx(energy(st, s)).epsilon(1e-12));
        CHECK(trace.times[1] == doctest::Approx(0.07));
        CHECK(trace.energy_norm == doctest::Approx(energy(st, s)).epsilon(1e-12));
        CHECK(trace.high_norm >= trace.energy_norm);
    }

    SUBCASE("conservation without damping") {
        const auto trace = simulate(st, constant_profile(g, 0.0), s, 20.0, 0.01, 10);
        for (double e : trace.energies) CHECK(std::abs(e - trace.energies[0]) <= 1e-10 * trace.energies[0]);
    }

    SUBCASE("agrees with repeated single steps") {
        const auto gamma = dense_profile(g, 8);
        auto manual = st;
        for (int i = 0; i < 25; ++i) manual = step_strang(manual, 0.02, gamma, s);
        StrangPropagator prop(st, gamma, s, 0.02);
        for (int i = 0; i < 25; ++i) prop.step();
        const auto fast = prop.state();
        CHECK((fast.w.samples - manual.w.samples).norm() <= 1e-12 * manual.w.samples.norm());
        CHECK((fast.v.samples - manual.v.samples).norm() <= 1e-12 * manual.v.samples.norm());
        CHECK(fast.t == doctest::Approx(0.5));
    }

    SUBCASE("linearity") {
        const auto gamma = dense_profile(g, 9);
        const double alpha = -2.5;
        const WaveState scaled(Field(g, alpha * st.w.samples), Field(g, alpha * st.v.samples));
        const auto a = simulate(st, gamma, s, 5.0, 0.01, 10);
        const auto b = simulate(scaled, gamma, s, 5.0, 0.01, 10);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(b.energies[i] - std::abs(alpha) * a.energies[i]) <= 1e-10 * b.energies[i]);
        }
    }

    SUBCASE("constant damping superposition matches the oracle") {
        const double c = 0.6, T = 3.0, dt = 1e-3;
        const auto trace = simulate(st, constant_profile(g, c), s, T, dt, 500);
        const Spectrum w0 = forward_transform(st.w), v0 = forward_transform(st.v);
        for (std::size_t n = 0; n < trace.size(); ++n) {
            Eigen::VectorXcd w_hat(g.size());
            Eigen::VectorXcd v_hat(g.size());
            for (Eigen::Index i = 0; i < g.size(); ++i) {
                const auto [w, v] = constant_damping_oracle(g.xi(i), c, w0.coefficients[i], v0.coefficients[i],
                                                            trace.times[n], s);
                w_hat[i] = w;
                v_hat[i] = v;
            }
            const WaveState exact(inverse_transform(Spectrum(g, w_hat)), inverse_transform(Spectrum(g, v_hat)));
            CHECK(std::abs(trace.energies[n] - energy(exact, s)) <= 1e-5 * trace.energies[0]);
        }
    }

    SUBCASE("parameter errors") {
        const auto gamma = constant_profile(g, 0.0);
        CHECK_THROWS_AS(simulate(st, gamma, s, 0.0, 0.1, 1), ParameterError);
        CHECK_THROWS_AS(simulate(st, gamma, s, 1.0, -0.1, 1), ParameterError);
        CHECK_THROWS_AS(simulate(st, gamma, s, 1.0, 0.1, 0), ParameterError);
        CHECK_THROWS_AS(simulate(st, constant_profile(Grid(12.0, 64), 0.0), s, 1.0, 0.1, 1), StructuralError);
    }
}

TEST_CASE("second order against the constant damping oracle") {
    Grid g(M_PI, 16);
    const int k = 2;
    const double s = 2.0, c = 0.8, T = 2.0;
    const Complex w0(1.0, 0.0), v0(0.3, -0.2);
    const auto initial = single_mode_state(g, k, w0, v0);
    const auto gamma = constant_profile(g, c);
    const auto [we, ve] = constant_damping_oracle(g.dxi() * k, c, w0, v0, T, s);

    std::vector<double> errors;
    const std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
    for (double dt : steps) {
        StrangPropagator prop(initial, gamma, s, dt);
        const auto n = static_cast<int>(std::lround(T / dt));
        for (int i = 0; i < n; ++i) prop.step();
        const auto st = prop.state();
        const Spectrum w = forward_transform(st.w), v = forward_transform(st.v);
        const Eigen::Index slot = g.size() / 2 + k;
        // coefficient of exp(i xi x) is sqrt(2 pi) * amplitude / (2 pi / (2L)) ... compare amplitudes directly
        const double norm = std::sqrt(2.0 * M_PI) / g.dxi();
        const Complex wa = w.coefficients[slot] / norm;
        const Complex va = v.coefficients[slot] / norm;
        errors.push_back(std::abs(wa - we) + std::abs(va - ve));
    }
    const double order1 = std::log2(errors[0] / errors[1]);
    const double order2 = std::log2(errors[1] / errors[2]);
    CHECK(order1 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(order2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("initial data catalog and CSV") {
    Grid g(10.0, 128);
    InitialDataDescriptor d;
    d.seed = 42;
    const auto a = make_initial_state(d, g);
    const auto b = make_initial_state(InitialDataDescriptor::from_json(d.to_json()), g);
    CHECK(a.w.samples == b.w.samples);
    CHECK(a.w.samples.imag().norm() == 0.0);
    CHECK(l2_norm(a.w) == doctest::Approx(1.0));
    // band limit respected
    const Spectrum c = forward_transform(a.w);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (std::abs(g.xi(i)) > g.xi_max() / 2.0 + 1e-12) CHECK(std::abs(c.coefficients[i]) < 1e-12);
    }

    InitialDataDescriptor gauss;
    gauss.kind = InitialDataKind::gaussian;
    gauss.width = 0.5;
    const auto gs = make_initial_state(gauss, g);
    CHECK(gs.w.samples[64].real() == doctest::Approx(1.0));

    EnergyTrace tr;
    tr.times = {0.0, 0.5};
    tr.energies = {1.0, 0.25};
    const auto parsed = EnergyTrace::from_csv(tr.to_csv(), 1.0);
    CHECK(parsed.times == tr.times);
    CHECK(parsed.energies == tr.energies);
    CHECK_THROWS_AS(EnergyTrace::from_csv("a,b\n1,2\n", 1.0), StructuralError);
    nlohmann::json bad = d.to_json();
    bad["bogus"] = 1;
    CHECK_THROWS_AS(InitialDataDescriptor::from_json(bad), ParameterError);
}
