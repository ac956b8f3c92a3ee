#include "fdw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdw/linefit.hpp"

namespace fdw {

namespace {

double lemma1_weight(double lambda, double s) { return std::pow(1.0 + lambda, 1.0 - 1.0 / s); }

// Signed periodic offset of x from c, in [-L, L).
double wrapped_offset(double x, double c, double L) {
    double d = std::fmod(x - c + L, 2.0 * L);
    if (d < 0.0) d += 2.0 * L;
    return d - L;
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

}  // namespace

SearchResult lemma1_infimum(double s, double tau_max, double lambda_max, int resolution) {
    if (!(s > 0.0)) throw ParameterError("lemma1_infimum: s must be > 0");
    if (resolution < 1000) throw ParameterError("lemma1_infimum: resolution must be >= 1000");
    if (!(tau_max > 0.0) || !(lambda_max > 0.0)) {
        throw ParameterError("lemma1_infimum: bounds must be positive");
    }
    const auto n = static_cast<std::size_t>(resolution);
    std::vector<double> tau(n), tau_pow(n), lam(n), lam_root(n), inv_weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        tau[i] = tau_max * static_cast<double>(i) / static_cast<double>(n - 1);
        tau_pow[i] = std::pow(tau[i], s);
        lam[i] = lambda_max * static_cast<double>(i) / static_cast<double>(n - 1);
        lam_root[i] = std::pow(lam[i], 1.0 / s);
        inv_weight[i] = 1.0 / lemma1_weight(lam[i], s);
    }

    SearchResult best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    auto consider = [&](double value, double t, double l) {
        if (value < best.value) best = {value, t, l};
    };
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(tau[i] - lam_root[j]) > 1.0) {
                consider(std::abs(tau_pow[i] - lam[j]) * inv_weight[j], tau[i], lam[j]);
            }
        }
        // Closure: the boundary curves tau = lambda^{1/s} +- 1.
        const double up = lam_root[j] + 1.0;
        consider(std::abs(std::pow(up, s) - lam[j]) * inv_weight[j], up, lam[j]);
        const double down = lam_root[j] - 1.0;
        if (down >= 0.0) consider(std::abs(std::pow(down, s) - lam[j]) * inv_weight[j], down, lam[j]);
    }
    return best;
}

SearchResult lemma1_infimum(double s, int resolution) {
    const double lambda_max = 1000.0;
    return lemma1_infimum(s, std::pow(lambda_max, 1.0 / s) + 2.0, lambda_max, resolution);
}

SearchResult power_difference_constant(double s, int resolution) {
    if (!(s > 0.0)) throw ParameterError("power_difference_constant: s must be > 0");
    if (resolution < 1000) throw ParameterError("power_difference_constant: resolution must be >= 1000");
    SearchResult best{std::numeric_limits<double>::infinity(), 1.0, 0.0};
    for (int j = 0; j < resolution; ++j) {
        const double y = static_cast<double>(j) / resolution;
        // max(1, y)^{s-1} = 1
        const double ratio = (1.0 - std::pow(y, s)) / (1.0 - y);
        if (ratio < best.value) best = {ratio, 1.0, y};
    }
    return best;
}

double ls_constant(const std::vector<Eigen::Index>& set, const std::vector<Interval>& bands,
                   const Grid& grid, Eigen::Index budget) {
    if (bands.empty()) throw DegenerateInputError("ls_constant: band list is empty");
    if (grid.size() > budget) throw ResourceError("ls_constant: grid exceeds the dense budget");
    const auto mask = band_mask(grid, bands);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) kept.push_back(i);
    }
    if (kept.empty()) throw DegenerateInputError("ls_constant: no grid frequency lies in the bands");

    const Eigen::MatrixXcd full = multiplication_operator(grid, indicator(grid, set));
    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXcd restricted(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) restricted(a, b) = full(kept[a], kept[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(restricted, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("ls_constant: eigensolver failed");
    const double lo = es.eigenvalues().minCoeff();
    return std::sqrt(std::clamp(lo, 0.0, 1.0));
}

IntervalPair a_lambda_intervals(double lambda, double s, double K) {
    if (!(s > 0.0)) throw ParameterError("a_lambda_intervals: s must be > 0");
    if (!(K > 0.0)) throw ParameterError("a_lambda_intervals: K must be > 0");
    auto edge = [s](double level) {
        const double base = std::max(level, 0.0);
        return std::sqrt(std::max(std::pow(base, 4.0 / s) - 1.0, 0.0));
    };
    const double lo = edge(lambda - K);
    const double hi = edge(lambda + K);
    IntervalPair p;
    p.positive = {lo, hi};
    p.negative = {-hi, -lo};
    return p;
}

double a_lambda_asymptote(double lambda, double s, double K) {
    return K * (4.0 / s) * std::pow(lambda, 2.0 / s - 1.0);
}

std::string to_string(GrowthClass g) { return g == GrowthClass::divergent ? "divergent" : "bounded"; }

GrowthCurve interval_growth_classification(double s, double K, const std::vector<double>& lambdas) {
    if (lambdas.size() < 2) throw ParameterError("interval_growth_classification: need >= 2 lambdas");
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > lambdas[i - 1])) {
            throw ParameterError("interval_growth_classification: lambdas must increase");
        }
    }
    if (!(lambdas.front() > 0.0) || lambdas.back() / lambdas.front() < 100.0) {
        throw ParameterError("interval_growth_classification: lambdas must span >= 2 decades");
    }
    GrowthCurve curve;
    curve.lambdas = lambdas;
    std::vector<double> lx, ly;
    for (double l : lambdas) {
        const double len = a_lambda_intervals(l, s, K).length();
        curve.lengths.push_back(len);
        if (len > 0.0) {
            lx.push_back(std::log(l));
            ly.push_back(std::log(len));
        }
    }
    curve.terminal_length = curve.lengths.back();
    curve.slope = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
    curve.classification = curve.slope > 0.1 ? GrowthClass::divergent : GrowthClass::bounded;
    return curve;
}

std::vector<double> resolved_radii(const Grid& grid, int count) {
    if (count < 2) throw ParameterError("resolved_radii: need at least two points");
    const double top = grid.xi_max() / 2.0;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = top * (i + 1) / count;
    return out;
}

GaussianEnvelope default_envelope(const DampingProfile& gamma) {
    const Grid& grid = gamma.grid();
    const Eigen::Index n = grid.size();
    const auto& g = gamma.samples();
    if ((g.array() == 0.0).all()) return {0.0, grid.half_length() / 3.0};

    // Start scanning just after a nonzero sample so runs do not straddle the seam.
    Eigen::Index start = 0;
    while (g[start] == 0.0) ++start;
    Eigen::Index best_len = 0, best_first = 0, run = 0, first = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        const Eigen::Index j = (start + k) % n;
        if (g[j] == 0.0) {
            if (run == 0) first = start + k;
            ++run;
            if (run > best_len) {
                best_len = run;
                best_first = first;
            }
        } else {
            run = 0;
        }
    }
    if (best_len == 0) throw ParameterError("default_envelope: gamma has no zero set on the grid");
    const double mid_index = static_cast<double>(best_first) + 0.5 * static_cast<double>(best_len - 1);
    double center = -grid.half_length() + mid_index * grid.dx();
    center = wrapped_offset(center, 0.0, grid.half_length());
    return {center, static_cast<double>(best_len) * grid.dx() / 6.0};
}

ScanResult vanishing_damping_ratio(const DampingProfile& gamma, const std::vector<double>& radii) {
    return vanishing_damping_ratio(gamma, radii, default_envelope(gamma));
}

ScanResult vanishing_damping_ratio(const DampingProfile& gamma, const std::vector<double>& radii,
                                   const GaussianEnvelope& envelope) {
    if (!(envelope.width > 0.0)) throw ParameterError("vanishing_damping_ratio: envelope width must be > 0");
    const Grid& grid = gamma.grid();
    const auto zeros = gamma.zero_set();
    if (zeros.empty()) throw ParameterError("vanishing_damping_ratio: gamma has no zero set on the grid");

    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(grid.size());
    for (auto j : zeros) {
        const double z = wrapped_offset(grid.x(j), envelope.center, grid.half_length()) / envelope.width;
        f[j] = std::exp(-0.5 * z * z);
    }
    FourierTransform ft(grid);
    Eigen::VectorXcd f_hat;
    ft.forward(f, f_hat);

    ScanResult out;
    Eigen::VectorXcd g_hat(grid.size()), g;
    for (double R : radii) {
        if (!(R >= 0.0)) throw ParameterError("vanishing_damping_ratio: radii must be >= 0");
        const auto mask = band_mask(grid, {{-R, R}});
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            g_hat[i] = mask[static_cast<std::size_t>(i)] ? f_hat[i] : Complex(0.0);
        }
        ft.inverse(g_hat, g);
        const double denom = g.norm();
        const double num = g.cwiseProduct(gamma.samples().cast<Complex>()).norm();
        out.parameters.push_back(R);
        out.values.push_back(denom > 0.0 ? num / denom : 0.0);
    }
    out.metadata = {{"damping", gamma.descriptor().to_json()},
                    {"envelope", {{"center", envelope.center}, {"width", envelope.width}}}};
    return out;
}

SincSplit sinc_translate_average(const DampingProfile& gamma, double D, double center,
                                 double radius, double modulation) {
    if (!(D > 0.0)) throw ParameterError("sinc_translate_average: D must be > 0");
    const Grid& grid = gamma.grid();
    const double L = grid.half_length();
    if (!(radius > 0.0) || radius > L) throw ParameterError("sinc_translate_average: need 0 < R <= L");
    if (center < -L || center > L) throw ParameterError("sinc_translate_average: centre outside the torus");
    (void)modulation;  // |exp(i mu x)| = 1; kept so callers can state the modulated variant

    SincSplit out;
    const double sup = gamma.sup_norm();
    double window_gamma = 0.0;
    double tail_mass = 0.0;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double d = wrapped_offset(grid.x(j), center, L);
        const double f = sinc(D * d);
        const double g = gamma.samples()[j];
        const double contrib = g * g * f * f * grid.dx();
        if (std::abs(d) <= radius) {
            out.inside += contrib;
            window_gamma += g * grid.dx();
        } else {
            out.outside += contrib;
            tail_mass += f * f * grid.dx();
        }
    }
    out.inside_bound = sup * window_gamma;
    out.outside_bound = sup * sup * tail_mass;
    return out;
}

}  // namespace fdw
