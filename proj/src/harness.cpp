#include "fdw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "fdw/analysis.hpp"
#include "fdw/format.hpp"
#include "fdw/linefit.hpp"
#include "fdw/resolvent.hpp"
#include "fdw/svg.hpp"

#ifndef FDW_VERSION
#define FDW_VERSION "0.0.0"
#endif

namespace fdw {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Decay fits

nlohmann::json WindowPolicy::to_json() const {
    nlohmann::json j = {{"start_fraction", start_fraction},
                        {"end_fraction", end_fraction},
                        {"floor_factor", floor_factor}};
    if (fixed) {
        j["t0"] = fixed->t0;
        j["t1"] = fixed->t1;
    }
    return j;
}

WindowPolicy WindowPolicy::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParameterError("fit window must be a JSON object");
    static const std::set<std::string> known = {"start_fraction", "end_fraction", "floor_factor", "t0", "t1"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) throw ParameterError("fit window: unknown key '" + item.key() + "'");
    }
    WindowPolicy p;
    try {
        p.start_fraction = j.value("start_fraction", p.start_fraction);
        p.end_fraction = j.value("end_fraction", p.end_fraction);
        p.floor_factor = j.value("floor_factor", p.floor_factor);
        if (j.contains("t0") != j.contains("t1")) {
            throw ParameterError("fit window: 't0' and 't1' must be given together");
        }
        if (j.contains("t0")) p.fixed = FitWindow{j.at("t0").get<double>(), j.at("t1").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("fit window: ") + e.what());
    }
    return p;
}

FitWindow resolve_window(const EnergyTrace& trace, const WindowPolicy& policy) {
    if (trace.size() < 2) throw DegenerateFitError("trace has fewer than two samples");
    if (policy.fixed) return *policy.fixed;
    const double T = trace.times.back();
    FitWindow w{policy.start_fraction * T, policy.end_fraction * T};
    const double floor = policy.floor_factor * std::numeric_limits<double>::epsilon() * trace.energies.front();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.energies[i] < floor) {
            w.t1 = std::min(w.t1, trace.times[i]);
            break;
        }
    }
    return w;
}

std::string to_string(DecayModel m) { return m == DecayModel::exponential ? "exponential" : "polynomial"; }

std::string to_string(DecayClass c) {
    switch (c) {
        case DecayClass::exponential: return "exponential";
        case DecayClass::polynomial: return "polynomial";
        case DecayClass::none: return "none";
    }
    return "none";
}

namespace {

struct RawFit {
    double C;
    double rate;
    double residual;
    std::size_t samples;
};

RawFit fit_model(const EnergyTrace& trace, const FitWindow& window, DecayModel model) {
    if (!(window.t0 < window.t1)) throw DegenerateFitError("fit window must satisfy t0 < t1");
    if (trace.size() == 0 || window.t0 < trace.times.front() || window.t1 > trace.times.back() + 1e-12) {
        throw DegenerateFitError("fit window lies outside the trace");
    }
    const double e0 = trace.energies.front();
    if (!(e0 > 0.0)) throw DegenerateFitError("E(0) must be positive");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double t = trace.times[i];
        if (t < window.t0 || t > window.t1) continue;
        const double e = trace.energies[i];
        if (!(e > 0.0)) throw DegenerateFitError("non-positive energy inside the fit window at t = " + format_double(t));
        x.push_back(model == DecayModel::exponential ? t : std::log1p(t));
        y.push_back(std::log(e));
    }
    if (x.size() < 10) {
        throw DegenerateFitError("fit window holds " + std::to_string(x.size()) + " samples, need >= 10");
    }
    const LineFit f = fit_line(x, y);
    return {std::exp(f.intercept) / e0, -f.slope, f.rms_residual, x.size()};
}

DecayFit make_fit(const EnergyTrace& trace, const FitWindow& window, DecayModel model) {
    const RawFit main = fit_model(trace, window, model);
    const DecayModel other = model == DecayModel::exponential ? DecayModel::polynomial : DecayModel::exponential;
    const RawFit alt = fit_model(trace, window, other);
    DecayFit out;
    out.model = model;
    out.C = main.C;
    out.rate = main.rate;
    out.window = window;
    out.samples = main.samples;
    out.residual = main.residual;
    out.alternative_residual = alt.residual;
    return out;
}

}  // namespace

nlohmann::json DecayFit::to_json() const {
    return {{"model", to_string(model)},
            {"C", C},
            {model == DecayModel::exponential ? "omega" : "p", rate},
            {"window", {window.t0, window.t1}},
            {"samples", samples},
            {"residual", residual},
            {"alternative_residual", alternative_residual}};
}

DecayFit fit_exponential(const EnergyTrace& trace, const FitWindow& window) {
    return make_fit(trace, window, DecayModel::exponential);
}

DecayFit fit_polynomial(const EnergyTrace& trace, const FitWindow& window) {
    return make_fit(trace, window, DecayModel::polynomial);
}

nlohmann::json Classification::to_json() const {
    nlohmann::json j = {{"class", to_string(decay)},
                        {"ambiguous", ambiguous},
                        {"window", {window.t0, window.t1}},
                        {"exponential", exponential.to_json()},
                        {"polynomial", polynomial.to_json()}};
    if (decay == DecayClass::polynomial) j["p"] = polynomial.rate;
    if (decay == DecayClass::exponential) j["omega"] = exponential.rate;
    return j;
}

Classification classify_decay(const EnergyTrace& trace, const WindowPolicy& policy, double margin) {
    if (!(margin >= 0.0 && margin < 1.0)) throw ParameterError("classify_decay: margin must be in [0, 1)");
    Classification c;
    c.window = resolve_window(trace, policy);
    c.exponential = fit_exponential(trace, c.window);
    c.polynomial = fit_polynomial(trace, c.window);

    double e1 = trace.energies.front();
    for (std::size_t i = 0; i < trace.size() && trace.times[i] <= c.window.t1; ++i) e1 = trace.energies[i];
    if (e1 / trace.energies.front() > 0.99) {
        c.decay = DecayClass::none;
        return c;
    }
    const double re = c.exponential.residual;
    const double rp = c.polynomial.residual;
    if (re < (1.0 - margin) * rp) {
        c.decay = DecayClass::exponential;
    } else if (rp < (1.0 - margin) * re) {
        c.decay = DecayClass::polynomial;
    } else {
        c.decay = DecayClass::none;
        c.ambiguous = true;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Configuration

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json damp = nlohmann::json::array();
    for (const auto& d : damping) damp.push_back(d.to_json());
    nlohmann::json j = {{"grid", {{"L", L}, {"N", N}}},
                        {"s", s_values},
                        {"damping", damp},
                        {"initial", initial.to_json()},
                        {"time", {{"T", time.T}, {"dt", time.dt}, {"sample_every", time.sample_every}}},
                        {"fit_window", window.to_json()},
                        {"resolvent_points", resolvent_points},
                        {"analysis", analysis},
                        {"workers", workers}};
    if (seed) j["seed"] = *seed;
    if (!output.empty()) j["output"] = output;
    return j;
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> config_problems(const ExperimentConfig& c, const std::set<std::string>& skip) {
    std::vector<std::string> out;
    auto want = [&](const std::string& field) { return !skip.count(field); };

    std::optional<Grid> grid;
    if (want("grid")) {
        try {
            grid.emplace(c.L, c.N);
        } catch (const Error& e) {
            out.push_back(std::string("grid: ") + e.what());
        }
    }
    if (want("s")) {
        if (c.s_values.empty()) out.push_back("s: must list at least one value");
        for (double s : c.s_values) {
            if (!(s > 0.0) || !std::isfinite(s)) out.push_back("s: values must be finite and > 0");
        }
    }
    if (want("damping")) {
        if (c.damping.empty()) out.push_back("damping: must list at least one profile");
        if (grid) {
            for (std::size_t i = 0; i < c.damping.size(); ++i) {
                try {
                    make_profile(c.damping[i], *grid);
                } catch (const Error& e) {
                    out.push_back("damping[" + std::to_string(i) + "]: " + e.what());
                }
            }
        }
    }
    if (want("initial") && grid) {
        try {
            make_initial_state(c.initial, *grid);
        } catch (const Error& e) {
            out.push_back(std::string("initial: ") + e.what());
        }
    }
    if (want("time")) {
        if (!(c.time.T > 0.0)) out.push_back("time.T: must be > 0");
        if (!(c.time.dt > 0.0)) out.push_back("time.dt: must be > 0");
        if (c.time.dt > 0.0 && c.time.T > 0.0 && c.time.dt > c.time.T) out.push_back("time.dt: must not exceed time.T");
        if (c.time.sample_every < 1) out.push_back("time.sample_every: must be >= 1");
    }
    if (want("fit_window")) {
        const auto& w = c.window;
        if (!(w.start_fraction >= 0.0 && w.start_fraction < w.end_fraction && w.end_fraction <= 1.0)) {
            out.push_back("fit_window: need 0 <= start_fraction < end_fraction <= 1");
        }
        if (!(w.floor_factor > 0.0)) out.push_back("fit_window.floor_factor: must be > 0");
        if (w.fixed && !(w.fixed->t0 >= 0.0 && w.fixed->t0 < w.fixed->t1)) {
            out.push_back("fit_window: need 0 <= t0 < t1");
        }
    }
    if (want("resolvent_points")) {
        if (c.resolvent_points < 0 || c.resolvent_points == 1) {
            out.push_back("resolvent_points: must be 0 or >= 2");
        }
        if (c.resolvent_points > 0 && c.N > kDefaultDenseBudget) {
            out.push_back("resolvent_points: grid N = " + std::to_string(c.N) + " exceeds the dense budget " +
                          std::to_string(kDefaultDenseBudget));
        }
    }
    if (want("workers") && c.workers < 1) out.push_back("workers: must be >= 1");
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParameterError("config: top level must be a JSON object");
    static const std::set<std::string> known = {"grid",   "s",        "damping",          "initial",
                                                "time",   "fit_window", "seed",           "resolvent_points",
                                                "analysis", "workers",  "output"};
    std::vector<std::string> errors;
    std::set<std::string> failed;
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) errors.push_back(item.key() + ": unknown key");
    }
    for (const char* required : {"grid", "s", "damping"}) {
        if (!j.contains(required)) {
            errors.push_back(std::string(required) + ": missing");
            failed.insert(required);
        }
    }

    ExperimentConfig c;
    auto field = [&](const std::string& name, auto&& parse) {
        if (!j.contains(name)) return;
        try {
            parse(j.at(name));
        } catch (const nlohmann::json::exception& e) {
            errors.push_back(name + ": " + e.what());
            failed.insert(name);
        } catch (const Error& e) {
            errors.push_back(name + ": " + e.what());
            failed.insert(name);
        }
    };

    field("grid", [&](const nlohmann::json& g) {
        if (!g.is_object()) throw ParameterError("must be an object {L, N}");
        for (const auto& item : g.items()) {
            if (item.key() != "L" && item.key() != "N") throw ParameterError("unknown key '" + item.key() + "'");
        }
        c.L = g.at("L").get<double>();
        c.N = g.at("N").get<Eigen::Index>();
    });
    field("s", [&](const nlohmann::json& s) {
        if (s.is_number()) {
            c.s_values = {s.get<double>()};
        } else {
            c.s_values = s.get<std::vector<double>>();
        }
    });
    field("damping", [&](const nlohmann::json& d) {
        if (d.is_object()) {
            c.damping = {ProfileDescriptor::from_json(d)};
        } else if (d.is_array()) {
            for (const auto& item : d) c.damping.push_back(ProfileDescriptor::from_json(item));
        } else {
            throw ParameterError("must be a descriptor or a list of descriptors");
        }
    });
    field("initial", [&](const nlohmann::json& d) { c.initial = InitialDataDescriptor::from_json(d); });
    field("time", [&](const nlohmann::json& t) {
        if (!t.is_object()) throw ParameterError("must be an object {T, dt, sample_every}");
        for (const auto& item : t.items()) {
            if (item.key() != "T" && item.key() != "dt" && item.key() != "sample_every") {
                throw ParameterError("unknown key '" + item.key() + "'");
            }
        }
        c.time.T = t.value("T", c.time.T);
        c.time.dt = t.value("dt", c.time.dt);
        c.time.sample_every = t.value("sample_every", c.time.sample_every);
    });
    field("fit_window", [&](const nlohmann::json& w) { c.window = WindowPolicy::from_json(w); });
    field("seed", [&](const nlohmann::json& s) { c.seed = s.get<std::uint64_t>(); });
    field("resolvent_points", [&](const nlohmann::json& r) { c.resolvent_points = r.get<int>(); });
    field("analysis", [&](const nlohmann::json& a) { c.analysis = a.get<bool>(); });
    field("workers", [&](const nlohmann::json& w) { c.workers = w.get<int>(); });
    field("output", [&](const nlohmann::json& o) { c.output = o.get<std::string>(); });

    for (auto& p : config_problems(c, failed)) errors.push_back(std::move(p));
    if (!errors.empty()) throw ParameterError("invalid config: " + join(errors, "; "));
    return c;
}

void ExperimentConfig::validate() const {
    const auto problems = config_problems(*this, {});
    if (!problems.empty()) throw ParameterError("invalid config: " + join(problems, "; "));
}

// ---------------------------------------------------------------------------
// Output plumbing

void write_file_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ResourceError("cannot open " + tmp.string() + " for writing");
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!os) throw ResourceError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw ResourceError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw ResourceError("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void check_output_directory(const fs::path& dir) {
    if (!fs::exists(dir)) return;
    if (!fs::is_directory(dir)) throw ParameterError("output path " + dir.string() + " is not a directory");
    if (fs::is_empty(dir) || fs::exists(dir / "manifest.json")) return;
    throw ParameterError("refusing to write into non-empty directory " + dir.string() +
                         " that holds no manifest.json");
}

bool ExperimentReport::ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.ok; });
}

namespace {

std::string run_id(double s, std::size_t damping_index) {
    std::string tag = format_double(s);
    std::replace(tag.begin(), tag.end(), '.', 'p');
    return "s" + tag + "_d" + std::to_string(damping_index);
}

struct JobResult {
    RunRecord record;
    std::optional<EnergyTrace> trace;
    std::optional<Classification> classification;
    std::string classification_error;
    std::optional<ScanResult> scan;
};

void remove_previous_outputs(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.json";
    if (!fs::exists(manifest)) return;
    std::ifstream is(manifest);
    nlohmann::json old;
    try {
        is >> old;
    } catch (const nlohmann::json::exception&) {
        throw StructuralError("existing manifest.json in " + dir.string() + " is not valid JSON");
    }
    for (const auto& f : old.value("files", nlohmann::json::array())) {
        const fs::path name = f.value("name", "");
        if (name.empty() || name.has_parent_path()) continue;
        fs::remove(dir / name);
    }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const fs::path& out) {
    config.validate();
    check_output_directory(out);
    fs::create_directories(out);
    remove_previous_outputs(out);

    const Grid grid(config.L, config.N);
    InitialDataDescriptor initial = config.initial;
    if (config.seed) initial.seed = *config.seed;
    const WaveState state = make_initial_state(initial, grid);
    std::vector<DampingProfile> profiles;
    for (const auto& d : config.damping) profiles.push_back(make_profile(d, grid));

    std::vector<JobResult> jobs;
    for (double s : config.s_values) {
        for (std::size_t d = 0; d < profiles.size(); ++d) {
            JobResult r;
            r.record = {run_id(s, d), s, d, false, ""};
            jobs.push_back(std::move(r));
        }
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            JobResult& job = jobs[i];
            const DampingProfile& gamma = profiles[job.record.damping_index];
            try {
                job.trace = simulate(state, gamma, job.record.s, config.time.T, config.time.dt,
                                     config.time.sample_every);
                try {
                    job.classification = classify_decay(*job.trace, config.window);
                } catch (const DegenerateFitError& e) {
                    job.classification_error = e.what();
                }
                if (config.resolvent_points > 0) {
                    const GeneratorMatrix gen = assemble_generator(gamma, job.record.s);
                    job.scan = resolvent_scan(gen, resolved_band(gen, config.resolvent_points));
                }
                job.record.ok = true;
            } catch (const std::exception& e) {
                job.record.error = e.what();
            }
        }
    };
    const int count = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    // Single-threaded assembly in job order keeps the bundle deterministic.
    nlohmann::json files = nlohmann::json::array();
    auto emit = [&](const std::string& name, const std::string& contents) {
        write_file_atomic(out / name, contents);
        files.push_back({{"name", name}, {"sha256", sha256_hex(contents)}, {"bytes", contents.size()}});
    };

    ExperimentReport result;
    nlohmann::json runs = nlohmann::json::array();
    std::vector<SvgSeries> overlay;
    for (auto& job : jobs) {
        result.runs.push_back(job.record);
        nlohmann::json r = {{"id", job.record.id},
                            {"s", job.record.s},
                            {"damping_index", job.record.damping_index},
                            {"status", job.record.ok ? "ok" : "failed"}};
        if (!job.record.ok) r["error"] = job.record.error;
        if (job.trace) {
            emit("trace_" + job.record.id + ".csv", job.trace->to_csv());
            emit("trace_" + job.record.id + ".json", job.trace->sidecar().dump(2) + "\n");
            SvgSeries series{job.record.id, job.trace->times, job.trace->energies};
            const double e0 = job.trace->energies.front();
            if (e0 > 0.0) {
                for (double& e : series.y) e /= e0;
            }
            overlay.push_back(std::move(series));
        }
        if (job.classification) r["classification"] = job.classification->to_json();
        if (!job.classification_error.empty()) r["classification_error"] = job.classification_error;
        if (job.scan) {
            emit("resolvent_" + job.record.id + ".csv", job.scan->to_csv("lambda", "resolvent_norm"));
            r["resolvent"] = job.scan->to_json();
        }
        runs.push_back(std::move(r));
    }

    nlohmann::json report = {{"runs", runs}};
    if (config.analysis) {
        nlohmann::json probes = nlohmann::json::array();
        std::vector<double> lambdas;
        for (int k = 0; k <= 20; ++k) lambdas.push_back(10.0 * std::pow(10.0, k / 10.0));
        for (double s : config.s_values) {
            const SearchResult inf = lemma1_infimum(s, 1000);
            const GrowthCurve growth = interval_growth_classification(s, 0.5, lambdas);
            probes.push_back({{"s", s},
                              {"lemma1_infimum", {{"value", inf.value}, {"tau", inf.tau}, {"lambda", inf.lambda}}},
                              {"power_difference_constant", power_difference_constant(s).value},
                              {"interval_growth",
                               {{"K", 0.5},
                                {"class", to_string(growth.classification)},
                                {"slope", growth.slope},
                                {"terminal_length", growth.terminal_length}}}});
        }
        report["analysis"] = probes;
    }
    emit("report.json", report.dump(2) + "\n");
    if (!overlay.empty()) {
        emit("overlay.svg", line_plot_svg(overlay, {"Energy decay", "t", "E(t)/E(0)", true}));
    }

    nlohmann::json run_status = nlohmann::json::array();
    for (const auto& r : result.runs) {
        nlohmann::json item = {{"id", r.id}, {"status", r.ok ? "ok" : "failed"}};
        if (!r.ok) item["error"] = r.error;
        run_status.push_back(item);
    }
    nlohmann::json manifest = {
        {"tool", "fdwlab"},
        {"versions",
         {{"fdwlab", FDW_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}}},
        {"config", config.to_json()},
        {"effective_seed", initial.seed},
        {"files", files},
        {"runs", run_status},
        {"status", result.ok() ? "ok" : "failed"}};
    write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    result.report = std::move(report);
    result.manifest = std::move(manifest);
    return result;
}

}  // namespace fdw
