#include "fdw/spectral.hpp"

#include <string>

#include <unsupported/Eigen/FFT>

namespace fdw {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Relative slack for band membership so that endpoints written as pi*k/L by
// callers match the ladder computed here.
constexpr double kBandSlack = 1e-12;

bool in_bands(double xi, const std::vector<Interval>& bands) {
    const double slack = kBandSlack * std::max(1.0, std::abs(xi));
    for (const auto& b : bands) {
        if (b.lo - slack <= xi && xi <= b.hi + slack) return true;
    }
    return false;
}

}  // namespace

Grid::Grid(double half_length, Eigen::Index num_points, bool require_power_of_two)
    : half_length_(half_length), num_points_(num_points) {
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw ParameterError("grid half length must be positive and finite");
    }
    if (num_points <= 0 || num_points % 2 != 0) {
        throw ParameterError("grid size must be an even positive integer, got " +
                             std::to_string(num_points));
    }
    if (require_power_of_two && !is_power_of_two(num_points)) {
        throw ParameterError("grid size must be a power of two, got " +
                             std::to_string(num_points));
    }
}

Eigen::VectorXd Grid::points() const {
    Eigen::VectorXd x(num_points_);
    for (Eigen::Index j = 0; j < num_points_; ++j) x[j] = this->x(j);
    return x;
}

Eigen::VectorXd Grid::frequencies() const {
    Eigen::VectorXd xi(num_points_);
    for (Eigen::Index i = 0; i < num_points_; ++i) xi[i] = this->xi(i);
    return xi;
}

Field::Field(const Grid& g, Eigen::VectorXcd s) : grid(g), samples(std::move(s)) {
    if (samples.size() != grid.size()) {
        throw StructuralError("field length " + std::to_string(samples.size()) +
                              " does not match grid size " + std::to_string(grid.size()));
    }
}

Spectrum::Spectrum(const Grid& g, Eigen::VectorXcd c) : grid(g), coefficients(std::move(c)) {
    if (coefficients.size() != grid.size()) {
        throw StructuralError("spectrum length " + std::to_string(coefficients.size()) +
                              " does not match grid size " + std::to_string(grid.size()));
    }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw StructuralError(std::string(what) + ": operands live on different grids");
}

struct FourierTransform::Impl {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd work_in;
    Eigen::VectorXcd work_out;
};

FourierTransform::FourierTransform(const Grid& grid)
    : grid_(grid), impl_(std::make_unique<Impl>()) {
    impl_->work_in.resize(grid.size());
    impl_->work_out.resize(grid.size());
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

// With x_j = -L + j dx and xi_k = pi k / L, exp(-i xi_k x_j) = (-1)^k exp(-2 pi i k j / N).
// Slot i holds k = i - N/2, which sits at FFT bin (i + N/2) mod N.
void FourierTransform::forward(const Eigen::VectorXcd& samples, Eigen::VectorXcd& coefficients) {
    const Eigen::Index n = grid_.size();
    if (samples.size() != n) throw StructuralError("forward transform: length mismatch");
    impl_->fft.fwd(impl_->work_out, samples);
    coefficients.resize(n);
    const double scale = grid_.dx() / std::sqrt(2.0 * M_PI);
    const Eigen::Index half = n / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index k = i - half;
        const Eigen::Index bin = (i + half) % n;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        coefficients[i] = sign * scale * impl_->work_out[bin];
    }
}

void FourierTransform::inverse(const Eigen::VectorXcd& coefficients, Eigen::VectorXcd& samples) {
    const Eigen::Index n = grid_.size();
    if (coefficients.size() != n) throw StructuralError("inverse transform: length mismatch");
    const Eigen::Index half = n / 2;
    const double scale = std::sqrt(2.0 * M_PI) / grid_.dx();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index k = i - half;
        const Eigen::Index bin = (i + half) % n;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        impl_->work_in[bin] = sign * scale * coefficients[i];
    }
    // Eigen's inverse carries the 1/N factor.
    impl_->fft.inv(samples, impl_->work_in);
}

Spectrum FourierTransform::forward(const Field& field) {
    require_same_grid(field.grid, grid_, "forward transform");
    Eigen::VectorXcd c;
    forward(field.samples, c);
    return Spectrum(grid_, std::move(c));
}

Field FourierTransform::inverse(const Spectrum& spectrum) {
    require_same_grid(spectrum.grid, grid_, "inverse transform");
    Eigen::VectorXcd f;
    inverse(spectrum.coefficients, f);
    return Field(grid_, std::move(f));
}

Spectrum forward_transform(const Field& field) {
    FourierTransform t(field.grid);
    return t.forward(field);
}

Field inverse_transform(const Spectrum& spectrum) {
    FourierTransform t(spectrum.grid);
    return t.inverse(spectrum);
}

Spectrum apply_bessel_multiplier(const Spectrum& spec, double power) {
    Spectrum out = spec;
    for (Eigen::Index i = 0; i < out.coefficients.size(); ++i) {
        out.coefficients[i] *= bessel_symbol(spec.grid.xi(i), power);
    }
    return out;
}

std::vector<bool> band_mask(const Grid& grid, const std::vector<Interval>& bands) {
    for (const auto& b : bands) {
        if (!(b.lo <= b.hi)) throw StructuralError("band_project: malformed interval (lo > hi)");
    }
    std::vector<bool> mask(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        mask[static_cast<std::size_t>(i)] = in_bands(grid.xi(i), bands);
    }
    return mask;
}

Spectrum band_project(const Spectrum& spec, const std::vector<Interval>& bands) {
    const auto mask = band_mask(spec.grid, bands);
    Spectrum out = spec;
    for (Eigen::Index i = 0; i < out.coefficients.size(); ++i) {
        if (!mask[static_cast<std::size_t>(i)]) out.coefficients[i] = Complex(0.0, 0.0);
    }
    return out;
}

double l2_norm(const Field& field) {
    return std::sqrt(field.samples.squaredNorm() * field.grid.dx());
}

double l2_norm(const Spectrum& spec) {
    return std::sqrt(spec.coefficients.squaredNorm() * spec.grid.dxi());
}

double sobolev_norm(const Spectrum& spec, double r) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < spec.coefficients.size(); ++i) {
        acc += bessel_symbol(spec.grid.xi(i), 2.0 * r) * std::norm(spec.coefficients[i]);
    }
    return std::sqrt(acc * spec.grid.dxi());
}

double sobolev_norm(const Field& field, double r) {
    return sobolev_norm(forward_transform(field), r);
}

Eigen::MatrixXcd multiplication_operator(const Grid& grid, const Eigen::VectorXd& samples) {
    const Eigen::Index n = grid.size();
    if (samples.size() != n) throw StructuralError("multiplication_operator: length mismatch");
    // exp(-i pi m x_j / L) = (-1)^m exp(-2 pi i m j / N); the entry depends on m = k - l only.
    Eigen::VectorXcd twiddle(n);
    for (Eigen::Index q = 0; q < n; ++q) {
        const double angle = -2.0 * M_PI * static_cast<double>(q) / static_cast<double>(n);
        twiddle[q] = Complex(std::cos(angle), std::sin(angle));
    }
    Eigen::VectorXcd diag_coeff(n);  // indexed by m mod N, sign not yet applied
    for (Eigen::Index m = 0; m < n; ++m) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) acc += samples[j] * twiddle[(m * j) % n];
        diag_coeff[m] = acc / static_cast<double>(n);
    }
    Eigen::MatrixXcd out(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
            const Eigen::Index m = k - l;
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            out(k, l) = sign * diag_coeff[(m % n + n) % n];
        }
    }
    return out;
}

Eigen::VectorXd indicator(const Grid& grid, const std::vector<Eigen::Index>& indices) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(grid.size());
    for (auto j : indices) {
        if (j < 0 || j >= grid.size()) throw StructuralError("indicator: index outside grid");
        ind[j] = 1.0;
    }
    return ind;
}

Complex inner_product(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid, "inner_product");
    return a.samples.dot(b.samples) * a.grid.dx();
}

}  // namespace fdw
