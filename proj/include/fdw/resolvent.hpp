#ifndef FDW_RESOLVENT_HPP
#define FDW_RESOLVENT_HPP

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "fdw/damping.hpp"
#include "fdw/spectral.hpp"

namespace fdw {

/// Largest grid accepted by the dense solvers (matrix dimension 2N).
inline constexpr Eigen::Index kDefaultDenseBudget = 1024;

/// Generator (u1, u2) -> (u2, -D^s u1 - gamma u2) on the truncated Fourier
/// basis, with the diagonal weight of the H^{s/2} x L^2 inner product.
///
/// Coordinates are (u1 coefficients, u2 coefficients), each in ladder order.
class GeneratorMatrix {
public:
    GeneratorMatrix(Eigen::MatrixXcd matrix, Eigen::VectorXd weights, double s, Grid grid,
                    nlohmann::json damping);

    Eigen::Index modes() const { return grid_.size(); }
    Eigen::Index dimension() const { return matrix_.rows(); }
    double s() const { return s_; }
    const Grid& grid() const { return grid_; }
    const nlohmann::json& damping() const { return damping_; }

    /// Unweighted matrix of A_gamma.
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    /// (xi_k^2+1)^{s/2} on the u1 block, 1 on the u2 block.
    const Eigen::VectorXd& weights() const { return weights_; }
    /// W^{1/2} A W^{-1/2}: the operator seen in an orthonormal basis of the energy space.
    Eigen::MatrixXcd weighted() const;
    /// The damping block, i.e. gamma as a multiplier on coefficients.
    Eigen::MatrixXcd damping_block() const;
    /// Largest modal frequency (xi_max^2 + 1)^{s/4}.
    double omega_max() const;

    /// Weighted energy inner product (pi/L) sum w_i conj(a_i) b_i.
    Complex inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;

private:
    Eigen::MatrixXcd matrix_;
    Eigen::VectorXd weights_;
    double s_;
    Grid grid_;
    nlohmann::json damping_;
};

GeneratorMatrix assemble_generator(const DampingProfile& gamma, double s,
                                   Eigen::Index budget = kDefaultDenseBudget);

/// Marker returned for shifts that are numerically in the spectrum.
inline constexpr double kResolventInfinity = std::numeric_limits<double>::infinity();

/// ||(A_gamma - i lambda)^{-1}|| in the energy norm, via the smallest singular
/// value of the weighted matrix. Returns kResolventInfinity when
/// sigma_min < 1e-14 sigma_max.
double resolvent_norm_at(const GeneratorMatrix& gen, double lambda);

/// Sampled (parameter, value) curve with a power-law fit in log(1 + parameter).
struct ScanResult {
    std::vector<double> parameters;
    std::vector<double> values;
    double exponent = 0.0;
    double residual = 0.0;
    nlohmann::json metadata;

    std::string to_csv(const std::string& parameter_name, const std::string& value_name) const;
    nlohmann::json to_json() const;
};

/// Power-law exponent of `values` against 1 + `parameters` (least squares in log-log).
void fit_scan_exponent(ScanResult& scan);

/// Resolvent norms at increasing lambda >= 0. `workers` threads share the scan.
/// Throws InBandEigenvalueError at the first singular shift.
ScanResult resolvent_scan(const GeneratorMatrix& gen, const std::vector<double>& lambdas,
                          int workers = 1);

/// Evenly spaced lambdas in [0, omega_max / 2] (the resolved band).
std::vector<double> resolved_band(const GeneratorMatrix& gen, int count);

/// Best c in c|f|^2 <= (1+lambda)^{2/s-2} |(D^s - lambda) f|^2 + |f|^2_{L^2(Omega)}
/// over the truncated space; the smallest eigenvalue of that Hermitian form.
double scalar_resolvent_constant(const std::vector<Eigen::Index>& omega, double s, double lambda,
                                 const Grid& grid, Eigen::Index budget = kDefaultDenseBudget);

/// Best c in c|U|^2 <= (|lambda|+1)^{4/s-2} |(A_0 - i lambda) U|^2 + |u_2|^2_{L^2(Omega)}
/// with both U norms in H^{s/2} x L^2.
double wave_observability_constant(const std::vector<Eigen::Index>& omega, double s,
                                   double lambda, const Grid& grid,
                                   Eigen::Index budget = kDefaultDenseBudget);

}  // namespace fdw

#endif  // FDW_RESOLVENT_HPP
