#include "fdw/simulator.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fdw/format.hpp"

namespace fdw {

WaveState::WaveState(Field w_, Field v_, double t_) : w(std::move(w_)), v(std::move(v_)), t(t_) {
    require_same_grid(w.grid, v.grid, "WaveState");
    if (!(t >= 0.0)) throw ParameterError("WaveState: time must be nonnegative");
}

double sobolev_pair_norm(const WaveState& state, double a, double b) {
    const double nw = sobolev_norm(state.w, a);
    const double nv = sobolev_norm(state.v, b);
    return std::sqrt(nw * nw + nv * nv);
}

double energy(const WaveState& state, double s) {
    if (!(s > 0.0)) throw ParameterError("energy: s must be > 0");
    const double nw = sobolev_norm(state.w, s / 2.0);
    const double nv = l2_norm(state.v);
    return std::sqrt(nw * nw + nv * nv);
}

std::string EnergyTrace::to_csv() const {
    std::ostringstream os;
    os << "t,E\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_double(times[i]) << ',' << format_double(energies[i]) << '\n';
    }
    return os.str();
}

nlohmann::json EnergyTrace::sidecar() const {
    nlohmann::json j = metadata;
    j["s"] = s;
    j["damping"] = damping;
    j["norms"] = {{"energy_norm", energy_norm}, {"high_norm", high_norm}};
    j["samples"] = times.size();
    return j;
}

EnergyTrace EnergyTrace::from_csv(const std::string& text, double s) {
    EnergyTrace trace;
    trace.s = s;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,E", 0) != 0) {
        throw StructuralError("energy trace CSV must start with header 't,E'");
    }
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw StructuralError("energy trace CSV: malformed row " + std::to_string(row));
        }
        try {
            trace.times.push_back(std::stod(line.substr(0, comma)));
            trace.energies.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw StructuralError("energy trace CSV: malformed row " + std::to_string(row));
        }
    }
    return trace;
}

WaveState step_strang(const WaveState& state, double dt, const DampingProfile& gamma, double s) {
    if (!(dt > 0.0)) throw ParameterError("step_strang: dt must be > 0");
    if (!(s > 0.0)) throw ParameterError("step_strang: s must be > 0");
    require_same_grid(state.grid(), gamma.grid(), "step_strang");
    const Grid& grid = state.grid();
    const Eigen::VectorXd kick = (-gamma.samples().array() * (dt / 2.0)).exp().matrix();

    Eigen::VectorXcd v = state.v.samples.cwiseProduct(kick.cast<Complex>());
    FourierTransform ft(grid);
    Eigen::VectorXcd w_hat, v_hat;
    ft.forward(state.w.samples, w_hat);
    ft.forward(v, v_hat);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double omega = bessel_symbol(grid.xi(i), s / 2.0);
        const double c = std::cos(omega * dt);
        const double sn = std::sin(omega * dt);
        const Complex w0 = w_hat[i];
        const Complex v0 = v_hat[i];
        w_hat[i] = w0 * c + v0 * (sn / omega);
        v_hat[i] = -w0 * (omega * sn) + v0 * c;
    }
    Eigen::VectorXcd w_new, v_new;
    ft.inverse(w_hat, w_new);
    ft.inverse(v_hat, v_new);
    v_new = v_new.cwiseProduct(kick.cast<Complex>());
    return WaveState(Field(grid, std::move(w_new)), Field(grid, std::move(v_new)), state.t + dt);
}

StrangPropagator::StrangPropagator(const WaveState& initial, const DampingProfile& gamma,
                                   double s, double dt)
    : grid_(initial.grid()), transform_(initial.grid()), s_(s), dt_(dt), t0_(initial.t) {
    if (!(dt > 0.0)) throw ParameterError("simulate: dt must be > 0");
    if (!(s > 0.0)) throw ParameterError("simulate: s must be > 0");
    require_same_grid(initial.grid(), gamma.grid(), "simulate");
    const Eigen::Index n = grid_.size();
    transform_.forward(initial.w.samples, w_hat_);
    v_ = initial.v.samples;
    half_kick_ = (-gamma.samples().array() * (dt / 2.0)).exp().matrix();
    damped_ = gamma.sup_norm() > 0.0;
    omega_.resize(n);
    symbol_.resize(n);
    cos_.resize(n);
    sin_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        omega_[i] = bessel_symbol(grid_.xi(i), s / 2.0);
        symbol_[i] = omega_[i] * omega_[i];
        cos_[i] = std::cos(omega_[i] * dt);
        sin_[i] = std::sin(omega_[i] * dt);
    }
}

void StrangPropagator::step() {
    if (damped_) v_.array() *= half_kick_.array();
    transform_.forward(v_, v_hat_);
    for (Eigen::Index i = 0; i < w_hat_.size(); ++i) {
        const Complex w0 = w_hat_[i];
        const Complex v0 = v_hat_[i];
        w_hat_[i] = w0 * cos_[i] + v0 * (sin_[i] / omega_[i]);
        v_hat_[i] = -w0 * (omega_[i] * sin_[i]) + v0 * cos_[i];
    }
    transform_.inverse(v_hat_, v_);
    if (damped_) v_.array() *= half_kick_.array();
    ++steps_;
}

double StrangPropagator::energy() const {
    const double pot = (symbol_.array() * w_hat_.array().abs2()).sum() * grid_.dxi();
    const double kin = v_.squaredNorm() * grid_.dx();
    return std::sqrt(pot + kin);
}

WaveState StrangPropagator::state() {
    Eigen::VectorXcd w;
    transform_.inverse(w_hat_, w);
    return WaveState(Field(grid_, std::move(w)), Field(grid_, v_), t0_ + time());
}

EnergyTrace simulate(const WaveState& initial, const DampingProfile& gamma, double s, double T,
                     double dt, int sample_every) {
    if (!(T > 0.0)) throw ParameterError("simulate: T must be > 0");
    if (!(dt > 0.0)) throw ParameterError("simulate: dt must be > 0");
    if (sample_every < 1) throw ParameterError("simulate: sample_every must be >= 1");

    const auto samples =
        static_cast<std::int64_t>(std::floor(T / (dt * sample_every) + 1e-9)) + 1;
    StrangPropagator prop(initial, gamma, s, dt);

    EnergyTrace trace;
    trace.s = s;
    trace.energy_norm = sobolev_pair_norm(initial, s / 2.0, 0.0);
    trace.high_norm = sobolev_pair_norm(initial, s, s / 2.0);
    trace.damping = gamma.descriptor().to_json();
    trace.metadata = {{"grid", {{"L", initial.grid().half_length()}, {"N", initial.grid().size()}}},
                      {"dt", dt},
                      {"T", T},
                      {"sample_every", sample_every}};
    trace.times.reserve(static_cast<std::size_t>(samples));
    trace.energies.reserve(static_cast<std::size_t>(samples));

    trace.times.push_back(initial.t);
    trace.energies.push_back(prop.energy());
    for (std::int64_t k = 1; k < samples; ++k) {
        for (int i = 0; i < sample_every; ++i) prop.step();
        const double e = prop.energy();
        if (!std::isfinite(e)) {
            throw BlowupError("simulate: non-finite energy at t = " +
                              format_double(initial.t + prop.time()));
        }
        trace.times.push_back(initial.t + prop.time());
        trace.energies.push_back(e);
    }
    return trace;
}

std::pair<Complex, Complex> constant_damping_oracle(double xi, double g0, Complex w0, Complex v0,
                                                    double t, double s) {
    const double m = bessel_symbol(xi, s);
    const double alpha = -g0 / 2.0;
    const double disc = g0 * g0 - 4.0 * m;
    const double decay = std::exp(alpha * t);
    // w = e^{alpha t} (w0 C + (v0 - alpha w0) S), v = e^{alpha t} (v0 C + (alpha v0 - m w0) S)
    double C = 1.0;
    double S = t;
    if (disc < 0.0) {
        const double beta = std::sqrt(-disc) / 2.0;
        C = std::cos(beta * t);
        S = std::sin(beta * t) / beta;
    } else if (disc > 0.0) {
        const double delta = std::sqrt(disc) / 2.0;
        C = std::cosh(delta * t);
        S = std::sinh(delta * t) / delta;
    }
    const Complex w = decay * (w0 * C + (v0 - alpha * w0) * S);
    const Complex v = decay * (v0 * C + (alpha * v0 - m * w0) * S);
    return {w, v};
}

namespace {

const std::pair<InitialDataKind, const char*> kInitialNames[] = {
    {InitialDataKind::single_mode, "single_mode"},
    {InitialDataKind::gaussian, "gaussian"},
    {InitialDataKind::band_limited_random, "band_limited_random"},
};

}  // namespace

nlohmann::json InitialDataDescriptor::to_json() const {
    nlohmann::json j;
    for (const auto& [k, name] : kInitialNames) {
        if (k == kind) j["kind"] = name;
    }
    switch (kind) {
        case InitialDataKind::single_mode:
            j["mode"] = mode;
            j["amplitude"] = amplitude;
            break;
        case InitialDataKind::gaussian:
            j["center"] = center;
            j["width"] = width;
            j["amplitude"] = amplitude;
            break;
        case InitialDataKind::band_limited_random:
            j["cutoff"] = cutoff;
            j["seed"] = seed;
            break;
    }
    return j;
}

InitialDataDescriptor InitialDataDescriptor::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParameterError("initial data descriptor must be a JSON object");
    static const std::set<std::string> known = {"kind",  "mode",   "amplitude", "center",
                                                "width", "cutoff", "seed"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw ParameterError("initial data descriptor: unknown key '" + item.key() + "'");
        }
    }
    InitialDataDescriptor d;
    try {
        const auto name = j.value("kind", std::string("band_limited_random"));
        bool found = false;
        for (const auto& [k, n] : kInitialNames) {
            if (name == n) {
                d.kind = k;
                found = true;
            }
        }
        if (!found) throw ParameterError("unknown initial data kind '" + name + "'");
        d.mode = j.value("mode", d.mode);
        d.amplitude = j.value("amplitude", d.amplitude);
        d.center = j.value("center", d.center);
        d.width = j.value("width", d.width);
        d.cutoff = j.value("cutoff", d.cutoff);
        d.seed = j.value("seed", d.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("initial data descriptor: ") + e.what());
    }
    return d;
}

WaveState make_initial_state(const InitialDataDescriptor& d, const Grid& grid) {
    const Eigen::Index n = grid.size();
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    switch (d.kind) {
        case InitialDataKind::single_mode: {
            if (std::abs(d.mode) > n / 2) throw ParameterError("single_mode: mode outside ladder");
            const double xi = grid.dxi() * d.mode;
            for (Eigen::Index j = 0; j < n; ++j) {
                w[j] = d.amplitude * std::exp(Complex(0.0, xi * grid.x(j)));
            }
            break;
        }
        case InitialDataKind::gaussian: {
            if (!(d.width > 0.0)) throw ParameterError("gaussian: width must be > 0");
            for (Eigen::Index j = 0; j < n; ++j) {
                const double z = (grid.x(j) - d.center) / d.width;
                w[j] = d.amplitude * std::exp(-0.5 * z * z);
            }
            break;
        }
        case InitialDataKind::band_limited_random: {
            const double cutoff = d.cutoff > 0.0 ? d.cutoff : grid.xi_max() / 2.0;
            std::mt19937_64 rng(d.seed);
            std::normal_distribution<double> normal(0.0, 1.0);
            // Hermitian-symmetric coefficients give real fields.
            Eigen::VectorXcd w_hat = Eigen::VectorXcd::Zero(n);
            Eigen::VectorXcd v_hat = Eigen::VectorXcd::Zero(n);
            const Eigen::Index half = n / 2;
            for (Eigen::Index k = 0; k < half; ++k) {
                if (grid.dxi() * static_cast<double>(k) > cutoff) break;
                const Complex a(normal(rng), normal(rng));
                const Complex b(normal(rng), normal(rng));
                if (k == 0) {
                    w_hat[half] = a.real();
                    v_hat[half] = b.real();
                } else {
                    w_hat[half + k] = a;
                    w_hat[half - k] = std::conj(a);
                    v_hat[half + k] = b;
                    v_hat[half - k] = std::conj(b);
                }
            }
            FourierTransform ft(grid);
            ft.inverse(w_hat, w);
            ft.inverse(v_hat, v);
            w = w.real().cast<Complex>();
            v = v.real().cast<Complex>();
            const double nw = std::sqrt(w.squaredNorm() * grid.dx());
            const double nv = std::sqrt(v.squaredNorm() * grid.dx());
            if (nw > 0.0) w /= nw;
            if (nv > 0.0) v /= nv;
            break;
        }
    }
    return WaveState(Field(grid, std::move(w)), Field(grid, std::move(v)), 0.0);
}

}  // namespace fdw
