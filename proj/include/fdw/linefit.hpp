#ifndef FDW_LINEFIT_HPP
#define FDW_LINEFIT_HPP

#include <span>

namespace fdw {

/// Ordinary least-squares line y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Root mean square of y - (intercept + slope x).
    double rms_residual = 0.0;
};

/// Requires at least two points with distinct abscissae.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fdw

#endif  // FDW_LINEFIT_HPP
