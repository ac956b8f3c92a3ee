#include "fdw/damping.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fdw/format.hpp"

namespace fdw {

namespace {

const std::pair<ProfileKind, const char*> kKindNames[] = {
    {ProfileKind::constant, "constant"},
    {ProfileKind::periodic_bumps, "periodic_bumps"},
    {ProfileKind::random_dense, "random_dense"},
    {ProfileKind::gap, "gap"},
    {ProfileKind::compact_support, "compact_support"},
};

// Number of neighbours on each side that fall in a closed window of radius R.
Eigen::Index window_half_width(const Grid& grid, double radius) {
    const auto m = static_cast<Eigen::Index>(std::floor(radius / grid.dx() + 1e-9));
    return std::min(m, (grid.size() - 1) / 2);
}

// min over centres of the periodic sliding sum of `values` over 2m+1 points.
double min_window_sum(const Eigen::VectorXd& values, Eigen::Index m) {
    const Eigen::Index n = values.size();
    double sum = 0.0;
    for (Eigen::Index k = -m; k <= m; ++k) sum += values[(k % n + n) % n];
    double best = sum;
    for (Eigen::Index c = 1; c < n; ++c) {
        // Recompute exactly every so often so the running sum cannot drift.
        if (c % 256 == 0) {
            sum = 0.0;
            for (Eigen::Index k = c - m; k <= c + m; ++k) sum += values[(k % n + n) % n];
        } else {
            sum += values[(c + m) % n] - values[((c - m - 1) % n + n) % n];
        }
        best = std::min(best, sum);
    }
    return std::max(best, 0.0);
}

void check_radius(const Grid& grid, double radius) {
    if (!(radius > 0.0) || radius > grid.half_length()) {
        throw ParameterError("window radius must satisfy 0 < R <= L");
    }
}

}  // namespace

std::string to_string(ProfileKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kKindNames) {
        if (name == n) return k;
    }
    throw ParameterError("unknown damping profile kind '" + name + "'");
}

nlohmann::json ProfileDescriptor::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["level"] = level;
    switch (kind) {
        case ProfileKind::constant:
            break;
        case ProfileKind::periodic_bumps:
            j["period"] = period;
            j["duty"] = duty;
            break;
        case ProfileKind::random_dense:
            j["cell_width"] = cell_width;
            j["bump_fraction"] = bump_fraction;
            j["seed"] = seed;
            break;
        case ProfileKind::gap:
        case ProfileKind::compact_support:
            j["interval"] = {interval.lo, interval.hi};
            break;
    }
    return j;
}

ProfileDescriptor ProfileDescriptor::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParameterError("damping descriptor must be a JSON object");
    static const std::set<std::string> known = {"kind",          "level", "period",   "duty",
                                                "cell_width",    "seed",  "interval",
                                                "bump_fraction"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw ParameterError("damping descriptor: unknown key '" + item.key() + "'");
        }
    }
    ProfileDescriptor d;
    if (!j.contains("kind")) throw ParameterError("damping descriptor: missing 'kind'");
    try {
        d.kind = profile_kind_from_string(j.at("kind").get<std::string>());
        d.level = j.value("level", d.level);
        d.period = j.value("period", d.period);
        d.duty = j.value("duty", d.duty);
        d.cell_width = j.value("cell_width", d.cell_width);
        d.bump_fraction = j.value("bump_fraction", d.bump_fraction);
        d.seed = j.value("seed", d.seed);
        if (j.contains("interval")) {
            const auto& iv = j.at("interval");
            if (!iv.is_array() || iv.size() != 2) {
                throw ParameterError("damping descriptor: 'interval' must be [lo, hi]");
            }
            d.interval = {iv[0].get<double>(), iv[1].get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("damping descriptor: ") + e.what());
    }
    return d;
}

DampingProfile::DampingProfile(const Grid& grid, Eigen::VectorXd samples,
                               ProfileDescriptor descriptor)
    : grid_(grid), samples_(std::move(samples)), descriptor_(descriptor) {
    if (samples_.size() != grid_.size()) throw StructuralError("damping samples do not match grid");
    if (!samples_.allFinite() || (samples_.array() < 0.0).any()) {
        throw ParameterError("damping samples must be finite and nonnegative");
    }
    sup_norm_ = samples_.size() > 0 ? samples_.maxCoeff() : 0.0;
}

std::vector<Eigen::Index> DampingProfile::level_set(double eps) const {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < samples_.size(); ++j) {
        if (samples_[j] >= eps) idx.push_back(j);
    }
    return idx;
}

std::vector<Eigen::Index> DampingProfile::zero_set() const {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < samples_.size(); ++j) {
        if (samples_[j] == 0.0) idx.push_back(j);
    }
    return idx;
}

std::string DampingProfile::to_csv() const {
    std::ostringstream os;
    os << "x,gamma\n";
    for (Eigen::Index j = 0; j < samples_.size(); ++j) {
        os << format_double(grid_.x(j)) << ',' << format_double(samples_[j]) << '\n';
    }
    return os.str();
}

DampingProfile make_profile(const ProfileDescriptor& d, const Grid& grid) {
    if (!(d.level >= 0.0) || !std::isfinite(d.level)) {
        throw ParameterError("damping level must be finite and >= 0");
    }
    const Eigen::Index n = grid.size();
    const double L = grid.half_length();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);

    switch (d.kind) {
        case ProfileKind::constant:
            g.setConstant(d.level);
            break;

        case ProfileKind::periodic_bumps: {
            if (!(d.period > 0.0)) throw ParameterError("periodic_bumps: period must be > 0");
            if (!(d.duty > 0.0 && d.duty <= 1.0)) {
                throw ParameterError("periodic_bumps: duty must lie in (0, 1]");
            }
            // Phase measured from the left end of the domain; the small slack
            // keeps grid points that sit exactly on a bump edge deterministic.
            const double on = d.duty * d.period;
            for (Eigen::Index j = 0; j < n; ++j) {
                double phase = std::fmod(static_cast<double>(j) * grid.dx(), d.period);
                if (phase > d.period * (1.0 - 1e-12)) phase = 0.0;
                if (phase < on - 1e-12 * d.period) g[j] = d.level;
            }
            break;
        }

        case ProfileKind::random_dense: {
            if (!(d.cell_width > 0.0) || d.cell_width > 2.0 * L) {
                throw ParameterError("random_dense: cell width must lie in (0, 2L]");
            }
            if (!(d.bump_fraction > 0.0 && d.bump_fraction <= 1.0)) {
                throw ParameterError("random_dense: bump fraction must lie in (0, 1]");
            }
            // One box bump per cell; the last cell absorbs the remainder of 2L.
            std::mt19937_64 rng(d.seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const auto cells = static_cast<Eigen::Index>(std::floor(2.0 * L / d.cell_width + 1e-9));
            const double width = d.bump_fraction * d.cell_width;
            for (Eigen::Index c = 0; c < cells; ++c) {
                const double start = -L + static_cast<double>(c) * d.cell_width;
                const double cell_len = (c + 1 == cells) ? (L - start) : d.cell_width;
                const double left = start + unit(rng) * (cell_len - width);
                // Snap to the grid so every bump covers at least one sample.
                auto j0 = static_cast<Eigen::Index>(std::ceil((left + L) / grid.dx() - 1e-9));
                auto j1 = static_cast<Eigen::Index>(std::floor((left + width + L) / grid.dx() - 1e-9));
                j1 = std::max(j1, j0);
                for (Eigen::Index j = j0; j <= j1; ++j) g[(j % n + n) % n] = d.level;
            }
            break;
        }

        case ProfileKind::gap:
        case ProfileKind::compact_support: {
            if (!(d.interval.lo <= d.interval.hi)) {
                throw ParameterError("interval must satisfy lo <= hi");
            }
            if (d.interval.lo < -L || d.interval.hi > L) {
                throw ParameterError("interval must lie inside [-L, L]");
            }
            const bool gap = d.kind == ProfileKind::gap;
            for (Eigen::Index j = 0; j < n; ++j) {
                const bool inside = d.interval.contains(grid.x(j));
                g[j] = (inside != gap) ? d.level : 0.0;
            }
            break;
        }
    }
    return DampingProfile(grid, std::move(g), d);
}

double window_average_infimum(const DampingProfile& gamma, double radius) {
    check_radius(gamma.grid(), radius);
    const Eigen::Index m = window_half_width(gamma.grid(), radius);
    return min_window_sum(gamma.samples(), m) * gamma.grid().dx();
}

double level_set_density(const DampingProfile& gamma, double eps, double radius) {
    if (!(eps > 0.0)) throw ParameterError("level_set_density: eps must be > 0");
    check_radius(gamma.grid(), radius);
    const Eigen::Index m = window_half_width(gamma.grid(), radius);
    const Eigen::VectorXd indicator =
        (gamma.samples().array() >= eps).cast<double>().matrix();
    return min_window_sum(indicator, m) * gamma.grid().dx();
}

}  // namespace fdw
