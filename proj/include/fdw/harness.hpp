#ifndef FDW_HARNESS_HPP
#define FDW_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fdw/damping.hpp"
#include "fdw/simulator.hpp"
#include "fdw/spectral.hpp"

namespace fdw {

struct FitWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Default window [start * T, t*], t* the earlier of end * T and the first time
/// E drops below floor * machine epsilon * E(0).
struct WindowPolicy {
    double start_fraction = 0.1;
    double end_fraction = 0.9;
    double floor_factor = 1e3;
    /// Explicit window; overrides the fractions when set.
    std::optional<FitWindow> fixed;

    nlohmann::json to_json() const;
    static WindowPolicy from_json(const nlohmann::json& j);
};

FitWindow resolve_window(const EnergyTrace& trace, const WindowPolicy& policy);

enum class DecayModel { exponential, polynomial };

std::string to_string(DecayModel m);

struct DecayFit {
    DecayModel model = DecayModel::exponential;
    /// E(t) ~ C E(0) exp(-rate t) or C E(0) (1+t)^{-rate}.
    double C = 0.0;
    double rate = 0.0;
    FitWindow window;
    std::size_t samples = 0;
    /// RMS of log E residuals.
    double residual = 0.0;
    /// Same quantity for the other model on the same window.
    double alternative_residual = 0.0;

    nlohmann::json to_json() const;
};

DecayFit fit_exponential(const EnergyTrace& trace, const FitWindow& window);
DecayFit fit_polynomial(const EnergyTrace& trace, const FitWindow& window);

enum class DecayClass { exponential, polynomial, none };

std::string to_string(DecayClass c);

struct Classification {
    DecayClass decay = DecayClass::none;
    DecayFit exponential;
    DecayFit polynomial;
    FitWindow window;
    /// Neither model won by the margin.
    bool ambiguous = false;

    nlohmann::json to_json() const;
};

/// Lower log residual wins if it beats the other by `margin` (relative);
/// `none` when E(t1)/E(0) > 0.99 or when neither model wins.
Classification classify_decay(const EnergyTrace& trace, const WindowPolicy& policy = {},
                              double margin = 0.1);

struct TimeStepping {
    double T = 100.0;
    double dt = 0.01;
    int sample_every = 10;
};

struct ExperimentConfig {
    double L = 16.0 * 3.141592653589793;
    Eigen::Index N = 256;
    std::vector<double> s_values;
    std::vector<ProfileDescriptor> damping;
    InitialDataDescriptor initial;
    TimeStepping time;
    WindowPolicy window;
    /// Overrides the initial-data seed when set.
    std::optional<std::uint64_t> seed;
    /// Resolvent points per (s, damping) pair over the resolved band; 0 disables.
    int resolvent_points = 0;
    /// Adds lower-bound search and interval-growth probes for every s.
    bool analysis = false;
    int workers = 1;
    std::string output;

    nlohmann::json to_json() const;
    /// Rejects unknown keys; the error lists every offending field.
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Throws ParameterError naming every invalid field.
    void validate() const;
};

struct RunRecord {
    std::string id;
    double s = 0.0;
    std::size_t damping_index = 0;
    bool ok = false;
    std::string error;
};

struct ExperimentReport {
    nlohmann::json report;
    nlohmann::json manifest;
    std::vector<RunRecord> runs;
    bool ok() const;
};

/// Runs every (s, damping) pair and writes the bundle into `out`:
/// trace_<id>.csv and .json, resolvent_<id>.csv, report.json, overlay.svg,
/// manifest.json. Refuses a non-empty directory without a manifest.
ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

/// Temp file + rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const std::string& data);

/// Throws ParameterError if `dir` is non-empty and holds no manifest.json.
void check_output_directory(const std::filesystem::path& dir);

}  // namespace fdw

#endif  // FDW_HARNESS_HPP
