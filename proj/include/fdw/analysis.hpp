#ifndef FDW_ANALYSIS_HPP
#define FDW_ANALYSIS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdw/damping.hpp"
#include "fdw/resolvent.hpp"
#include "fdw/spectral.hpp"

namespace fdw {

/// Grid-search minimum together with the point that achieves it.
struct SearchResult {
    double value = 0.0;
    double tau = 0.0;
    double lambda = 0.0;
};

/// inf |tau^s - lambda| / (1 + lambda)^{1 - 1/s} over tau, lambda >= 0 with
/// |tau - lambda^{1/s}| > 1.
///
/// A uniform `resolution` x `resolution` grid on [0, tau_max] x [0, lambda_max]
/// is searched, together with the two boundary curves tau = lambda^{1/s} +- 1
/// sampled on the lambda grid (the infimum over the open region equals the
/// minimum over its closure).
SearchResult lemma1_infimum(double s, double tau_max, double lambda_max, int resolution);

/// Default search box: lambda_max = 1000, tau_max = lambda_max^{1/s} + 2.
SearchResult lemma1_infimum(double s, int resolution = 2000);

/// inf of |x^s - y^s| / (max(x,y)^{s-1} |x - y|), reduced to x = 1, y = j / resolution.
/// `lambda` of the result carries the minimising y.
SearchResult power_difference_constant(double s, int resolution = 100000);

/// Best c in |f|_{L^2(E)} >= c |f| for f with spectrum in the bands: the square
/// root of the smallest eigenvalue of the concentration form restricted to the
/// band-limited coefficients.
double ls_constant(const std::vector<Eigen::Index>& set, const std::vector<Interval>& bands,
                   const Grid& grid, Eigen::Index budget = kDefaultDenseBudget);

/// The two mirrored branches {xi : |(xi^2+1)^{s/4} - lambda| <= K}.
struct IntervalPair {
    Interval positive;
    Interval negative;

    /// Length of one branch.
    double length() const { return positive.length(); }
};

IntervalPair a_lambda_intervals(double lambda, double s, double K);

/// Asymptotic branch length K (4/s) lambda^{2/s - 1}.
double a_lambda_asymptote(double lambda, double s, double K);

enum class GrowthClass { divergent, bounded };

std::string to_string(GrowthClass g);

struct GrowthCurve {
    GrowthClass classification = GrowthClass::bounded;
    std::vector<double> lambdas;
    std::vector<double> lengths;
    /// log-log slope of length against lambda.
    double slope = 0.0;
    double terminal_length = 0.0;
};

/// Divergent iff the fitted log-log slope of branch length exceeds 0.1.
GrowthCurve interval_growth_classification(double s, double K, const std::vector<double>& lambdas);

/// Positive envelope phi used to build f = 1_{gamma = 0} phi.
struct GaussianEnvelope {
    double center = 0.0;
    double width = 1.0;
};

/// `count` evenly spaced radii in (0, xi_max / 2].
std::vector<double> resolved_radii(const Grid& grid, int count);

/// Gaussian centred on the longest periodic run of zeros of gamma, with width
/// one sixth of the run length, so that 1_{gamma = 0} phi has only a small jump.
GaussianEnvelope default_envelope(const DampingProfile& gamma);

/// For each R: ||gamma g_R|| / ||g_R|| with g_R the band truncation of
/// f = 1_{gamma = 0} phi to [-R, R].
ScanResult vanishing_damping_ratio(const DampingProfile& gamma, const std::vector<double>& radii,
                                   const GaussianEnvelope& envelope);
ScanResult vanishing_damping_ratio(const DampingProfile& gamma, const std::vector<double>& radii);

/// Split of ||gamma f_a||^2, f_a(x) = exp(i mu x) sin(D (x-a)) / (D (x-a)),
/// over the periodic window |x - a| <= R and its complement.
struct SincSplit {
    double inside = 0.0;
    double outside = 0.0;
    /// sup_norm * (window integral of gamma)
    double inside_bound = 0.0;
    /// sup_norm^2 * (mass of |f_a|^2 outside the window)
    double outside_bound = 0.0;
};

SincSplit sinc_translate_average(const DampingProfile& gamma, double D, double center,
                                 double radius, double modulation = 0.0);

}  // namespace fdw

#endif  // FDW_ANALYSIS_HPP
