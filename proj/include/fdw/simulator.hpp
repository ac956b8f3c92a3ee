#ifndef FDW_SIMULATOR_HPP
#define FDW_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "fdw/damping.hpp"
#include "fdw/spectral.hpp"

namespace fdw {

/// (w, w_t) at time t on a shared grid.
struct WaveState {
    Field w;
    Field v;
    double t = 0.0;

    WaveState(Field w_, Field v_, double t_ = 0.0);
    const Grid& grid() const { return w.grid; }
};

/// ( |D^{s/2} w|^2 + |w_t|^2 )^{1/2}
double energy(const WaveState& state, double s);

/// Norm of (w, v) in H^{a} x H^{b}.
double sobolev_pair_norm(const WaveState& state, double a, double b);

/// Sampled energy history of one run.
struct EnergyTrace {
    double s = 1.0;
    std::vector<double> times;
    std::vector<double> energies;
    /// ||(w0, v0)|| in H^{s/2} x L^2.
    double energy_norm = 0.0;
    /// ||(w0, v0)|| in H^s x H^{s/2}.
    double high_norm = 0.0;
    nlohmann::json damping;
    nlohmann::json metadata;

    std::size_t size() const { return times.size(); }
    /// CSV with header `t,E`.
    std::string to_csv() const;
    nlohmann::json sidecar() const;
    /// Parses a `t,E` CSV; norms and metadata are left empty.
    static EnergyTrace from_csv(const std::string& text, double s);
};

/// One Strang step: half damping kick, exact undamped rotation per mode,
/// half damping kick. Nonexpansive in the energy norm.
WaveState step_strang(const WaveState& state, double dt, const DampingProfile& gamma, double s);

/// Stepper that keeps the displacement in Fourier space between steps so a
/// step costs two transforms. Not thread-safe; one per simulation.
class StrangPropagator {
public:
    StrangPropagator(const WaveState& initial, const DampingProfile& gamma, double s, double dt);

    void step();
    double energy() const;
    double time() const { return static_cast<double>(steps_) * dt_; }
    WaveState state();

private:
    Grid grid_;
    FourierTransform transform_;
    double s_;
    double dt_;
    double t0_;
    std::int64_t steps_ = 0;
    Eigen::VectorXcd w_hat_;
    Eigen::VectorXcd v_;
    Eigen::VectorXcd v_hat_;
    Eigen::VectorXd half_kick_;
    Eigen::VectorXd cos_;
    Eigen::VectorXd sin_;
    Eigen::VectorXd omega_;
    Eigen::VectorXd symbol_;
    bool damped_;
};

/// Integrates to time T and samples the energy every `sample_every` steps.
EnergyTrace simulate(const WaveState& initial, const DampingProfile& gamma, double s, double T,
                     double dt, int sample_every);

/// Closed-form solution of w'' + g0 w' + m w = 0, m = (xi^2+1)^{s/2}.
std::pair<Complex, Complex> constant_damping_oracle(double xi, double g0, Complex w0, Complex v0,
                                                    double t, double s);

enum class InitialDataKind { single_mode, gaussian, band_limited_random };

struct InitialDataDescriptor {
    InitialDataKind kind = InitialDataKind::band_limited_random;
    // single_mode: integer mode number k (xi = pi k / L)
    int mode = 1;
    double amplitude = 1.0;
    // gaussian
    double center = 0.0;
    double width = 1.0;
    // band_limited_random: |xi| <= cutoff; a non-positive cutoff means xi_max / 2
    double cutoff = 0.0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static InitialDataDescriptor from_json(const nlohmann::json& j);
};

WaveState make_initial_state(const InitialDataDescriptor& d, const Grid& grid);

}  // namespace fdw

#endif  // FDW_SIMULATOR_HPP
