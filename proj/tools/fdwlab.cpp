// fdwlab: command-line front end for the damped fractional wave lab.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdw/analysis.hpp"
#include "fdw/damping.hpp"
#include "fdw/errors.hpp"
#include "fdw/format.hpp"
#include "fdw/harness.hpp"
#include "fdw/resolvent.hpp"
#include "fdw/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fdw;

namespace {

struct Global {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string format = "csv";
};

// Problem flags shared by most subcommands. Values given on the command line
// override the config file.
struct Problem {
    double L = 16.0 * M_PI;
    Eigen::Index N = 256;
    std::vector<double> s{1.0};
    std::string damping = "random_dense";
    double level = 1.0;
    double period = 2.0;
    double duty = 0.5;
    double cell_width = 4.0;
    double bump_fraction = 0.5;
    std::vector<double> interval{-1.0, 1.0};
    std::uint64_t damping_seed = 0;
    std::string initial = "band_limited_random";
    int mode = 1;
    double cutoff = 0.0;
    double T = 100.0;
    double dt = 0.01;
    int sample_every = 10;

    CLI::App* app = nullptr;

    void attach(CLI::App* sub, bool with_time) {
        app = sub;
        sub->add_option("--L", L, "half-length of the torus [-L, L)");
        sub->add_option("--N", N, "grid points (power of two)");
        sub->add_option("--s", s, "fractional order(s)");
        sub->add_option("--damping", damping, "constant|periodic_bumps|random_dense|gap|compact_support");
        sub->add_option("--level", level, "damping level");
        sub->add_option("--period", period, "periodic_bumps period");
        sub->add_option("--duty", duty, "periodic_bumps duty cycle");
        sub->add_option("--cell-width", cell_width, "random_dense cell width");
        sub->add_option("--bump-fraction", bump_fraction, "random_dense bump fraction");
        sub->add_option("--interval", interval, "gap / compact_support interval: lo hi")->expected(2);
        sub->add_option("--damping-seed", damping_seed, "random_dense seed");
        if (with_time) {
            sub->add_option("--initial", initial, "single_mode|gaussian|band_limited_random");
            sub->add_option("--mode", mode, "single_mode mode number");
            sub->add_option("--cutoff", cutoff, "band_limited_random cutoff (<= 0: xi_max/2)");
            sub->add_option("--T", T, "final time");
            sub->add_option("--dt", dt, "time step");
            sub->add_option("--sample-every", sample_every, "steps between energy samples");
        }
    }

    bool given(const std::string& name) const { return app->count(name) > 0; }

    // Flags that set any damping field replace the config damping descriptor field by field.
    ExperimentConfig resolve(const Global& g) const {
        ExperimentConfig c;
        bool from_file = false;
        if (!g.config.empty()) {
            std::ifstream is(g.config);
            if (!is) throw ParameterError("cannot open config file " + g.config);
            json j;
            try {
                is >> j;
            } catch (const json::exception& e) {
                throw ParameterError("config file " + g.config + ": " + e.what());
            }
            c = ExperimentConfig::from_json(j);
            from_file = true;
        }
        if (!from_file || given("--L")) c.L = L;
        if (!from_file || given("--N")) c.N = N;
        if (!from_file || given("--s")) c.s_values = s;

        ProfileDescriptor d = from_file ? c.damping.front() : ProfileDescriptor{};
        auto set = [&](const char* flag, auto& field, const auto& value) {
            if (!from_file || given(flag)) field = value;
        };
        if (!from_file || given("--damping")) d.kind = profile_kind_from_string(damping);
        set("--level", d.level, level);
        set("--period", d.period, period);
        set("--duty", d.duty, duty);
        set("--cell-width", d.cell_width, cell_width);
        set("--bump-fraction", d.bump_fraction, bump_fraction);
        set("--damping-seed", d.seed, damping_seed);
        if (!from_file || given("--interval")) d.interval = {interval.at(0), interval.at(1)};
        if (!from_file || given("--damping") || given("--level") || given("--period") || given("--duty") ||
            given("--cell-width") || given("--bump-fraction") || given("--damping-seed") || given("--interval")) {
            c.damping = {d};
        }

        if (app->get_option_no_throw("--T") != nullptr) {
            if (!from_file || given("--initial")) {
                static const std::map<std::string, InitialDataKind> kinds = {
                    {"single_mode", InitialDataKind::single_mode},
                    {"gaussian", InitialDataKind::gaussian},
                    {"band_limited_random", InitialDataKind::band_limited_random}};
                const auto it = kinds.find(initial);
                if (it == kinds.end()) throw ParameterError("--initial: unknown kind '" + initial + "'");
                c.initial.kind = it->second;
            }
            set("--mode", c.initial.mode, mode);
            set("--cutoff", c.initial.cutoff, cutoff);
            set("--T", c.time.T, T);
            set("--dt", c.time.dt, dt);
            set("--sample-every", c.time.sample_every, sample_every);
        }
        if (g.seed) c.seed = g.seed;
        c.workers = g.workers;
        c.validate();
        return c;
    }
};

// Writes to <out>/<name> when --out is set, stdout otherwise.
void emit(const Global& g, const std::string& name, const std::string& contents) {
    if (g.out.empty()) {
        std::cout << contents;
        return;
    }
    const fs::path dir(g.out);
    fs::create_directories(dir);
    write_file_atomic(dir / name, contents);
    std::cerr << "wrote " << (dir / name).string() << '\n';
}

std::string curve_csv(const std::string& pname, const std::vector<double>& p, const std::string& vname,
                      const std::vector<double>& v) {
    std::ostringstream os;
    os << pname << ',' << vname << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) os << format_double(p[i]) << ',' << format_double(v[i]) << '\n';
    return os.str();
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParameterError("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<Interval> parse_bands(const std::vector<double>& flat) {
    if (flat.empty() || flat.size() % 2) throw ParameterError("--bands expects pairs lo hi");
    std::vector<Interval> out;
    for (std::size_t i = 0; i < flat.size(); i += 2) out.push_back({flat[i], flat[i + 1]});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulation and verification lab for w_tt + gamma w_t + D^s w = 0"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--config", g.config, "JSON experiment config");
    app.add_option("--out", g.out, "output directory (stdout when omitted)");
    app.add_option("--seed", g.seed, "seed for the initial data");
    app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();

    // simulate
    Problem sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate and record the energy trace");
    sim.attach(simulate_cmd, true);

    // fit-decay
    std::string trace_path;
    double fit_s = 1.0;
    std::optional<double> t0, t1;
    auto* fit_cmd = app.add_subcommand("fit-decay", "fit and classify a t,E trace");
    fit_cmd->add_option("trace", trace_path, "CSV with header t,E")->required();
    fit_cmd->add_option("--s", fit_s, "fractional order recorded with the trace");
    fit_cmd->add_option("--t0", t0, "window start");
    fit_cmd->add_option("--t1", t1, "window end");

    // resolvent-scan
    Problem res;
    int points = 16;
    auto* scan_cmd = app.add_subcommand("resolvent-scan", "resolvent norms over the resolved band");
    res.attach(scan_cmd, false);
    scan_cmd->add_option("--points", points, "lambda samples in [0, omega_max/2]");

    // ls-constant
    Problem ls;
    std::vector<double> bands{-5.0, -1.0, 1.0, 5.0};
    std::optional<double> eps;
    auto* ls_cmd = app.add_subcommand("ls-constant", "sampling constant of E = {gamma >= eps} for band-limited functions");
    ls.attach(ls_cmd, false);
    ls_cmd->add_option("--bands", bands, "band endpoints: lo hi [lo hi ...]");
    ls_cmd->add_option("--eps", eps, "level for E (default sup/10)");

    // check-damping
    Problem chk;
    std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
    auto* check_cmd = app.add_subcommand("check-damping", "window-average infimum and level-set density");
    chk.attach(check_cmd, false);
    check_cmd->add_option("--R", radii, "window radii");
    check_cmd->add_option("--eps", eps, "level-set threshold (default sup/10)");

    // lemma-verify
    std::vector<double> lemma_s{0.5, 1.0, 1.5, 2.0, 3.0};
    int resolution = 2000;
    auto* lemma_cmd = app.add_subcommand("lemma-verify", "lower bound search and power-difference constants");
    lemma_cmd->add_option("--s", lemma_s, "fractional orders");
    lemma_cmd->add_option("--resolution", resolution, "grid points per axis (>= 1000)");

    // intervals
    double int_s = 1.0, K = 0.5, lmin = 10.0, lmax = 1e4;
    int int_points = 31;
    auto* int_cmd = app.add_subcommand("intervals", "lengths of {xi : |(xi^2+1)^{s/4} - lambda| <= K}");
    int_cmd->add_option("--s", int_s, "fractional order");
    int_cmd->add_option("--K", K, "half-width K");
    int_cmd->add_option("--lambda-min", lmin, "smallest lambda");
    int_cmd->add_option("--lambda-max", lmax, "largest lambda");
    int_cmd->add_option("--points", int_points, "log-spaced samples");

    // theorem2-demo
    Problem t2;
    t2.damping = "gap";
    t2.N = 512;
    int radii_count = 64;
    auto* t2_cmd = app.add_subcommand("theorem2-demo", "||gamma g_R|| / ||g_R|| for f supported where gamma = 0");
    t2.attach(t2_cmd, false);
    t2_cmd->add_option("--radii", radii_count, "number of band radii up to xi_max/2");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config: simulate, fit, classify, scan");

    CLI11_PARSE(app, argc, argv);
    const bool as_json = g.format == "json";

    try {
        if (simulate_cmd->parsed()) {
            const ExperimentConfig c = sim.resolve(g);
            const Grid grid(c.L, c.N);
            InitialDataDescriptor init = c.initial;
            if (c.seed) init.seed = *c.seed;
            const WaveState st = make_initial_state(init, grid);
            const DampingProfile gamma = make_profile(c.damping.front(), grid);
            for (double s : c.s_values) {
                const EnergyTrace tr = simulate(st, gamma, s, c.time.T, c.time.dt, c.time.sample_every);
                std::string tag = format_double(s);
                std::replace(tag.begin(), tag.end(), '.', 'p');
                if (as_json) {
                    json j = tr.sidecar();
                    j["t"] = tr.times;
                    j["E"] = tr.energies;
                    emit(g, "trace_s" + tag + ".json", j.dump(2) + "\n");
                } else {
                    emit(g, "trace_s" + tag + ".csv", tr.to_csv());
                }
            }
        } else if (fit_cmd->parsed()) {
            const EnergyTrace tr = EnergyTrace::from_csv(read_text(trace_path), fit_s);
            WindowPolicy policy;
            if (t0 || t1) {
                if (!(t0 && t1)) throw ParameterError("--t0 and --t1 must be given together");
                policy.fixed = FitWindow{*t0, *t1};
            }
            const Classification c = classify_decay(tr, policy);
            if (as_json) {
                emit(g, "fit.json", c.to_json().dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "model,rate,C,residual,t0,t1\n";
                for (const DecayFit* f : {&c.exponential, &c.polynomial}) {
                    os << to_string(f->model) << ',' << format_double(f->rate) << ',' << format_double(f->C) << ','
                       << format_double(f->residual) << ',' << format_double(f->window.t0) << ','
                       << format_double(f->window.t1) << '\n';
                }
                os << "# class=" << to_string(c.decay) << '\n';
                emit(g, "fit.csv", os.str());
            }
        } else if (scan_cmd->parsed()) {
            const ExperimentConfig c = res.resolve(g);
            const Grid grid(c.L, c.N);
            const DampingProfile gamma = make_profile(c.damping.front(), grid);
            for (double s : c.s_values) {
                const GeneratorMatrix gen = assemble_generator(gamma, s);
                const ScanResult scan = resolvent_scan(gen, resolved_band(gen, points), g.workers);
                std::string tag = format_double(s);
                std::replace(tag.begin(), tag.end(), '.', 'p');
                if (as_json) {
                    json j = scan.to_json();
                    j["lambda"] = scan.parameters;
                    j["resolvent_norm"] = scan.values;
                    emit(g, "resolvent_s" + tag + ".json", j.dump(2) + "\n");
                } else {
                    emit(g, "resolvent_s" + tag + ".csv", scan.to_csv("lambda", "resolvent_norm"));
                }
            }
        } else if (ls_cmd->parsed()) {
            const ExperimentConfig c = ls.resolve(g);
            const Grid grid(c.L, c.N);
            const DampingProfile gamma = make_profile(c.damping.front(), grid);
            const double level = eps ? *eps : default_level_epsilon(gamma);
            const double value = ls_constant(gamma.level_set(level), parse_bands(bands), grid);
            if (as_json) {
                emit(g, "ls_constant.json",
                     json{{"ls_constant", value}, {"eps", level}, {"bands", bands}, {"damping", gamma.descriptor().to_json()}}
                             .dump(2) +
                         "\n");
            } else {
                emit(g, "ls_constant.csv", "param,value\neps," + format_double(level) + "\nls_constant," +
                                               format_double(value) + "\n");
            }
        } else if (check_cmd->parsed()) {
            const ExperimentConfig c = chk.resolve(g);
            const Grid grid(c.L, c.N);
            const DampingProfile gamma = make_profile(c.damping.front(), grid);
            const double level = eps ? *eps : default_level_epsilon(gamma);
            std::vector<double> avg, dens;
            for (double R : radii) {
                avg.push_back(window_average_infimum(gamma, R));
                dens.push_back(level_set_density(gamma, level, R));
            }
            if (as_json) {
                emit(g, "damping_check.json",
                     json{{"R", radii},
                          {"window_average_infimum", avg},
                          {"level_set_density", dens},
                          {"eps", level},
                          {"sup_norm", gamma.sup_norm()},
                          {"damping", gamma.descriptor().to_json()}}
                             .dump(2) +
                         "\n");
            } else {
                std::ostringstream os;
                os << "R,window_average_infimum,level_set_density\n";
                for (std::size_t i = 0; i < radii.size(); ++i) {
                    os << format_double(radii[i]) << ',' << format_double(avg[i]) << ',' << format_double(dens[i]) << '\n';
                }
                emit(g, "damping_check.csv", os.str());
                emit(g, "damping.csv", gamma.to_csv());
            }
        } else if (lemma_cmd->parsed()) {
            json rows = json::array();
            std::ostringstream os;
            os << "s,lemma1_infimum,tau,lambda,refined,power_difference_constant\n";
            for (double s : lemma_s) {
                const SearchResult a = lemma1_infimum(s, resolution);
                const SearchResult b = lemma1_infimum(s, 2 * resolution);
                const double d = power_difference_constant(s).value;
                rows.push_back({{"s", s},
                                {"lemma1_infimum", a.value},
                                {"tau", a.tau},
                                {"lambda", a.lambda},
                                {"refined", b.value},
                                {"power_difference_constant", d}});
                os << format_double(s) << ',' << format_double(a.value) << ',' << format_double(a.tau) << ','
                   << format_double(a.lambda) << ',' << format_double(b.value) << ',' << format_double(d) << '\n';
            }
            if (as_json) {
                emit(g, "lemma.json", rows.dump(2) + "\n");
            } else {
                emit(g, "lemma.csv", os.str());
            }
        } else if (int_cmd->parsed()) {
            if (int_points < 2 || !(lmin > 0.0) || !(lmax > lmin)) {
                throw ParameterError("intervals: need points >= 2 and 0 < lambda-min < lambda-max");
            }
            std::vector<double> lambdas;
            for (int k = 0; k < int_points; ++k) {
                lambdas.push_back(lmin * std::pow(lmax / lmin, static_cast<double>(k) / (int_points - 1)));
            }
            const GrowthCurve curve = interval_growth_classification(int_s, K, lambdas);
            if (as_json) {
                emit(g, "intervals.json", json{{"s", int_s},
                                               {"K", K},
                                               {"class", to_string(curve.classification)},
                                               {"slope", curve.slope},
                                               {"terminal_length", curve.terminal_length},
                                               {"lambda", curve.lambdas},
                                               {"length", curve.lengths}}
                                                  .dump(2) +
                                              "\n");
            } else {
                emit(g, "intervals.csv", curve_csv("param", curve.lambdas, "value", curve.lengths));
            }
        } else if (t2_cmd->parsed()) {
            const ExperimentConfig c = t2.resolve(g);
            const Grid grid(c.L, c.N);
            const DampingProfile gamma = make_profile(c.damping.front(), grid);
            const ScanResult curve = vanishing_damping_ratio(gamma, resolved_radii(grid, radii_count));
            if (as_json) {
                json j = curve.metadata;
                j["R"] = curve.parameters;
                j["ratio"] = curve.values;
                j["sup_norm"] = gamma.sup_norm();
                emit(g, "theorem2.json", j.dump(2) + "\n");
            } else {
                emit(g, "theorem2.csv", curve.to_csv("param", "value"));
            }
        } else if (sweep_cmd->parsed()) {
            if (g.config.empty()) throw ParameterError("sweep: --config is required");
            json j;
            {
                std::ifstream is(g.config);
                if (!is) throw ParameterError("cannot open config file " + g.config);
                try {
                    is >> j;
                } catch (const json::exception& e) {
                    throw ParameterError("config file " + g.config + ": " + e.what());
                }
            }
            ExperimentConfig c = ExperimentConfig::from_json(j);
            if (g.seed) c.seed = g.seed;
            if (app.count("--workers")) c.workers = g.workers;
            const std::string out = !g.out.empty() ? g.out : c.output;
            if (out.empty()) throw ParameterError("sweep: give --out or an 'output' field in the config");
            const ExperimentReport r = run_experiment(c, out);
            for (const auto& run : r.runs) {
                std::cerr << run.id << ": " << (run.ok ? "ok" : "failed: " + run.error) << '\n';
            }
            if (as_json) std::cout << r.report.dump(2) << '\n';
            return r.ok() ? 0 : 1;
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
