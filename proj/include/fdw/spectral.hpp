#ifndef FDW_SPECTRAL_HPP
#define FDW_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fdw/errors.hpp"

namespace fdw {

using Complex = std::complex<double>;

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double length() const { return hi - lo; }
};

/// Periodic grid on [-L, L) with N points and the paired frequency ladder
/// xi_k = pi k / L, k = -N/2 .. N/2-1.
class Grid {
public:
    /// N must be even; by default it must also be a power of two.
    Grid(double half_length, Eigen::Index num_points, bool require_power_of_two = true);

    double half_length() const { return half_length_; }
    Eigen::Index size() const { return num_points_; }
    double dx() const { return 2.0 * half_length_ / static_cast<double>(num_points_); }
    /// Spacing of the frequency ladder, pi / L.
    double dxi() const { return M_PI / half_length_; }

    double x(Eigen::Index j) const { return -half_length_ + static_cast<double>(j) * dx(); }
    /// Frequency stored at coefficient slot i (slot 0 holds k = -N/2).
    double xi(Eigen::Index i) const {
        return dxi() * static_cast<double>(i - num_points_ / 2);
    }
    /// Largest |xi| on the ladder (the unpaired mode k = -N/2).
    double xi_max() const { return dxi() * static_cast<double>(num_points_ / 2); }

    Eigen::VectorXd points() const;
    Eigen::VectorXd frequencies() const;

    bool operator==(const Grid& other) const {
        return half_length_ == other.half_length_ && num_points_ == other.num_points_;
    }

private:
    double half_length_;
    Eigen::Index num_points_;
};

/// Samples of a complex function at the grid points x_j = -L + j dx.
struct Field {
    Grid grid;
    Eigen::VectorXcd samples;

    Field(const Grid& g, Eigen::VectorXcd s);
    static Field zeros(const Grid& g) { return Field(g, Eigen::VectorXcd::Zero(g.size())); }
};

/// Fourier coefficients approximating the continuum transform at xi_k.
struct Spectrum {
    Grid grid;
    Eigen::VectorXcd coefficients;

    Spectrum(const Grid& g, Eigen::VectorXcd c);
    static Spectrum zeros(const Grid& g) { return Spectrum(g, Eigen::VectorXcd::Zero(g.size())); }
};

/// (xi^2 + 1)^(p/2), the Bessel-type symbol.
template <typename Scalar>
Scalar bessel_symbol(Scalar xi, Scalar p) {
    using std::pow;
    return pow(xi * xi + Scalar(1), p / Scalar(2));
}

/// Reusable transform between samples and coefficients.
///
/// Scaled so that sum |f_j|^2 dx == sum |c_k|^2 (pi/L). The coefficient c_k
/// approximates (2 pi)^(-1/2) \int f(x) exp(-i xi_k x) dx. Owns FFT plan state,
/// so one instance must not be shared between threads.
class FourierTransform {
public:
    explicit FourierTransform(const Grid& grid);
    ~FourierTransform();
    FourierTransform(FourierTransform&&) noexcept;
    FourierTransform& operator=(FourierTransform&&) noexcept;

    const Grid& grid() const { return grid_; }

    void forward(const Eigen::VectorXcd& samples, Eigen::VectorXcd& coefficients);
    void inverse(const Eigen::VectorXcd& coefficients, Eigen::VectorXcd& samples);

    Spectrum forward(const Field& field);
    Field inverse(const Spectrum& spectrum);

private:
    struct Impl;
    Grid grid_;
    std::unique_ptr<Impl> impl_;
};

Spectrum forward_transform(const Field& field);
Field inverse_transform(const Spectrum& spectrum);

/// Multiplies coefficient k by (xi_k^2 + 1)^(p/2).
Spectrum apply_bessel_multiplier(const Spectrum& spec, double power);

/// Keeps coefficients whose frequency lies in one of the closed bands.
Spectrum band_project(const Spectrum& spec, const std::vector<Interval>& bands);

/// Boolean mask over coefficient slots selected by band_project.
std::vector<bool> band_mask(const Grid& grid, const std::vector<Interval>& bands);

double l2_norm(const Field& field);
double l2_norm(const Spectrum& spec);

/// ( sum (xi_k^2+1)^r |c_k|^2 pi/L )^(1/2)
double sobolev_norm(const Spectrum& spec, double r);
double sobolev_norm(const Field& field, double r);

/// Discrete inner product sum conj(a_j) b_j dx.
Complex inner_product(const Field& a, const Field& b);

/// Matrix of pointwise multiplication by `samples` acting on coefficient
/// vectors: entry (k, l) = (1/N) sum_j samples_j exp(-i (xi_k - xi_l) x_j).
/// Hermitian when the samples are real.
Eigen::MatrixXcd multiplication_operator(const Grid& grid, const Eigen::VectorXd& samples);

/// Indicator samples of a set of grid indices.
Eigen::VectorXd indicator(const Grid& grid, const std::vector<Eigen::Index>& indices);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace fdw

#endif  // FDW_SPECTRAL_HPP
