#ifndef FDW_DAMPING_HPP
#define FDW_DAMPING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "fdw/spectral.hpp"

namespace fdw {

enum class ProfileKind { constant, periodic_bumps, random_dense, gap, compact_support };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// Generator parameters. Only the fields relevant to `kind` are read.
struct ProfileDescriptor {
    ProfileKind kind = ProfileKind::constant;
    double level = 1.0;
    // periodic_bumps
    double period = 2.0;
    double duty = 0.5;
    // random_dense
    double cell_width = 4.0;
    double bump_fraction = 0.5;
    std::uint64_t seed = 0;
    // gap (zero on the interval) and compact_support (level on the interval)
    Interval interval{-1.0, 1.0};

    nlohmann::json to_json() const;
    /// Rejects unknown keys.
    static ProfileDescriptor from_json(const nlohmann::json& j);
};

/// Nonnegative damping samples gamma(x_j) with their generator.
class DampingProfile {
public:
    DampingProfile(const Grid& grid, Eigen::VectorXd samples, ProfileDescriptor descriptor);

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& samples() const { return samples_; }
    const ProfileDescriptor& descriptor() const { return descriptor_; }
    double sup_norm() const { return sup_norm_; }

    /// Grid indices j with gamma(x_j) >= eps.
    std::vector<Eigen::Index> level_set(double eps) const;
    /// Grid indices j with gamma(x_j) == 0.
    std::vector<Eigen::Index> zero_set() const;

    /// CSV with header `x,gamma`.
    std::string to_csv() const;

private:
    Grid grid_;
    Eigen::VectorXd samples_;
    ProfileDescriptor descriptor_;
    double sup_norm_;
};

DampingProfile make_profile(const ProfileDescriptor& descriptor, const Grid& grid);

/// min over grid centres a of sum_{|x_j - a| <= R} gamma(x_j) dx, windows wrapping periodically.
double window_average_infimum(const DampingProfile& gamma, double radius);

/// min over grid centres a of dx * #{ j : |x_j - a| <= R, gamma(x_j) >= eps }.
double level_set_density(const DampingProfile& gamma, double eps, double radius);

/// Default level for the relative-density check, sup_norm / 10.
inline double default_level_epsilon(const DampingProfile& gamma) { return gamma.sup_norm() / 10.0; }

}  // namespace fdw

#endif  // FDW_DAMPING_HPP
