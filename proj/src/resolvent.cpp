#include "fdw/resolvent.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "fdw/format.hpp"
#include "fdw/linefit.hpp"

namespace fdw {

namespace {

void check_budget(const Grid& grid, Eigen::Index budget) {
    if (grid.size() > budget) {
        throw ResourceError("dense problem with N = " + std::to_string(grid.size()) +
                            " exceeds the budget N <= " + std::to_string(budget));
    }
}

Eigen::VectorXd symbol_vector(const Grid& grid, double power) {
    Eigen::VectorXd m(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) m[i] = bessel_symbol(grid.xi(i), power);
    return m;
}

double smallest_eigenvalue(const Eigen::MatrixXcd& hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
    const double lo = es.eigenvalues().minCoeff();
    if (!std::isfinite(lo)) throw NumericalError("Hermitian eigensolver returned non-finite values");
    return std::max(lo, 0.0);
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXcd matrix, Eigen::VectorXd weights, double s,
                                 Grid grid, nlohmann::json damping)
    : matrix_(std::move(matrix)),
      weights_(std::move(weights)),
      s_(s),
      grid_(grid),
      damping_(std::move(damping)) {
    const Eigen::Index dim = 2 * grid_.size();
    if (matrix_.rows() != dim || matrix_.cols() != dim || weights_.size() != dim) {
        throw StructuralError("GeneratorMatrix: dimensions do not match 2N");
    }
    if ((weights_.array() <= 0.0).any()) throw StructuralError("GeneratorMatrix: weights must be > 0");
}

Eigen::MatrixXcd GeneratorMatrix::weighted() const {
    const Eigen::ArrayXd root = weights_.array().sqrt();
    Eigen::MatrixXcd b = matrix_;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, j) *= root[i] / root[j];
    }
    return b;
}

Eigen::MatrixXcd GeneratorMatrix::damping_block() const {
    const Eigen::Index n = modes();
    return -matrix_.block(n, n, n, n);
}

double GeneratorMatrix::omega_max() const { return bessel_symbol(grid_.xi_max(), s_ / 2.0); }

Complex GeneratorMatrix::inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
    return a.dot(weights_.cast<Complex>().cwiseProduct(b)) * grid_.dxi();
}

GeneratorMatrix assemble_generator(const DampingProfile& gamma, double s, Eigen::Index budget) {
    if (!(s > 0.0)) throw ParameterError("assemble_generator: s must be > 0");
    const Grid& grid = gamma.grid();
    check_budget(grid, budget);
    const Eigen::Index n = grid.size();
    const Eigen::VectorXd symbol = symbol_vector(grid, s);

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.block(0, n, n, n).setIdentity();
    a.block(n, 0, n, n).diagonal() = -symbol.cast<Complex>();
    a.block(n, n, n, n) = -multiplication_operator(grid, gamma.samples());

    Eigen::VectorXd w(2 * n);
    w.head(n) = symbol;
    w.tail(n).setOnes();
    return GeneratorMatrix(std::move(a), std::move(w), s, grid, gamma.descriptor().to_json());
}

double resolvent_norm_at(const GeneratorMatrix& gen, double lambda) {
    Eigen::MatrixXcd b = gen.weighted();
    b.diagonal().array() -= Complex(0.0, lambda);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(b);
    if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");
    const auto& sv = svd.singularValues();
    if (!sv.allFinite()) throw NumericalError("singular value decomposition returned non-finite values");
    const double smax = sv.maxCoeff();
    const double smin = sv.minCoeff();
    if (smin < 1e-14 * smax) return kResolventInfinity;
    return 1.0 / smin;
}

std::string ScanResult::to_csv(const std::string& parameter_name,
                               const std::string& value_name) const {
    std::ostringstream os;
    os << parameter_name << ',' << value_name << '\n';
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        os << format_double(parameters[i]) << ',' << format_double(values[i]) << '\n';
    }
    return os.str();
}

nlohmann::json ScanResult::to_json() const {
    nlohmann::json j = metadata;
    j["exponent"] = exponent;
    j["residual"] = residual;
    j["count"] = parameters.size();
    return j;
}

void fit_scan_exponent(ScanResult& scan) {
    if (scan.parameters.size() != scan.values.size()) {
        throw StructuralError("scan parameters and values differ in length");
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < scan.parameters.size(); ++i) {
        if (!(scan.values[i] > 0.0) || !std::isfinite(scan.values[i])) {
            throw NumericalError("scan values must be finite and positive");
        }
        lx.push_back(std::log1p(scan.parameters[i]));
        ly.push_back(std::log(scan.values[i]));
    }
    if (lx.size() < 2) {
        scan.exponent = 0.0;
        scan.residual = 0.0;
        return;
    }
    const LineFit fit = fit_line(lx, ly);
    scan.exponent = fit.slope;
    scan.residual = fit.rms_residual;
}

ScanResult resolvent_scan(const GeneratorMatrix& gen, const std::vector<double>& lambdas,
                          int workers) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1]))) {
            throw ParameterError("resolvent_scan: lambdas must be nonnegative and increasing");
        }
    }
    ScanResult scan;
    scan.parameters = lambdas;
    scan.values.assign(lambdas.size(), 0.0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (std::size_t i = next++; i < lambdas.size(); i = next++) {
            try {
                scan.values[i] = resolvent_norm_at(gen, lambdas[i]);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int count = std::max(1, std::min<int>(workers, static_cast<int>(lambdas.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (std::isinf(scan.values[i])) {
            throw InBandEigenvalueError("resolvent_scan: shift i*lambda is numerically in the spectrum at lambda = " +
                                            format_double(lambdas[i]),
                                        lambdas[i]);
        }
    }
    fit_scan_exponent(scan);
    scan.metadata = {{"s", gen.s()},
                     {"damping", gen.damping()},
                     {"grid", {{"L", gen.grid().half_length()}, {"N", gen.grid().size()}}},
                     {"omega_max", gen.omega_max()}};
    return scan;
}

std::vector<double> resolved_band(const GeneratorMatrix& gen, int count) {
    if (count < 2) throw ParameterError("resolved_band: need at least two points");
    const double top = gen.omega_max() / 2.0;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = top * i / (count - 1);
    return out;
}

double scalar_resolvent_constant(const std::vector<Eigen::Index>& omega, double s, double lambda,
                                 const Grid& grid, Eigen::Index budget) {
    if (!(s > 0.0)) throw ParameterError("scalar_resolvent_constant: s must be > 0");
    if (!(lambda >= 0.0)) throw ParameterError("scalar_resolvent_constant: lambda must be >= 0");
    check_budget(grid, budget);
    const Eigen::VectorXd symbol = symbol_vector(grid, s);
    const double weight = std::pow(1.0 + lambda, 2.0 / s - 2.0);
    Eigen::MatrixXcd q = multiplication_operator(grid, indicator(grid, omega));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double d = symbol[i] - lambda;
        q(i, i) += weight * d * d;
    }
    return smallest_eigenvalue(q);
}

double wave_observability_constant(const std::vector<Eigen::Index>& omega, double s,
                                   double lambda, const Grid& grid, Eigen::Index budget) {
    if (!(s > 0.0)) throw ParameterError("wave_observability_constant: s must be > 0");
    check_budget(grid, budget);
    const Eigen::Index n = grid.size();
    const Eigen::VectorXd om = symbol_vector(grid, s / 2.0);
    const double weight = std::pow(std::abs(lambda) + 1.0, 4.0 / s - 2.0);

    // In energy-orthonormal coordinates A_0 - i lambda acts on mode k as
    // [[-i lambda, om], [-om, -i lambda]]; its Gram matrix is
    // [[om^2 + lambda^2, 2 i lambda om], [-2 i lambda om, om^2 + lambda^2]].
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    q.block(n, n, n, n) = multiplication_operator(grid, indicator(grid, omega));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double diag = om[k] * om[k] + lambda * lambda;
        const Complex off(0.0, 2.0 * lambda * om[k]);
        q(k, k) += weight * diag;
        q(n + k, n + k) += weight * diag;
        q(k, n + k) += weight * off;
        q(n + k, k) += weight * std::conj(off);
    }
    return smallest_eigenvalue(q);
}

}  // namespace fdw
