#include "johnwalk/kernels.hpp"

#include <omp.h>

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "johnwalk/errors.hpp"

namespace johnwalk::kernels {

namespace {

inline double quad_row(const Mat& rows, const Mat& G, Index i) {
    const Index n = rows.cols();
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
        double gj = 0.0;
        for (Index k = 0; k < n; ++k) gj += G(j, k) * rows(i, k);
        acc += rows(i, j) * gj;
    }
    return acc;
}

inline double lag_sum(std::span<const double> x, double mean, Index k) {
    const auto n = static_cast<Index>(x.size());
    double acc = 0.0;
    for (Index t = 0; t + k < n; ++t) acc += (x[size_t(t)] - mean) * (x[size_t(t + k)] - mean);
    return acc / double(n);
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

void check_square(const Mat& rows, const Mat& G) {
    if (G.rows() != G.cols() || G.rows() != rows.cols()) {
        throw InputError("row_quadratic_forms: matrix shape mismatch");
    }
}

Index clamp_lag(std::span<const double> x, Index max_lag) {
    if (x.empty()) throw InputError("autocovariance: empty series");
    return std::min<Index>(max_lag, static_cast<Index>(x.size()) - 1);
}

} // namespace

namespace serial {

Vec row_quadratic_forms(const Mat& rows, const Mat& G) {
    check_square(rows, G);
    Vec out(rows.rows());
    for (Index i = 0; i < rows.rows(); ++i) out(i) = quad_row(rows, G, i);
    return out;
}

Vec autocovariance(std::span<const double> x, Index max_lag) {
    max_lag = clamp_lag(x, max_lag);
    const double mean = mean_of(x);
    Vec out(max_lag + 1);
    for (Index k = 0; k <= max_lag; ++k) out(k) = lag_sum(x, mean, k);
    return out;
}

} // namespace serial

namespace omp {

Vec row_quadratic_forms(const Mat& rows, const Mat& G) {
    check_square(rows, G);
    const Index m = rows.rows();
    Vec out(m);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < m; ++i) out(i) = quad_row(rows, G, i);
    return out;
}

Vec autocovariance(std::span<const double> x, Index max_lag) {
    max_lag = clamp_lag(x, max_lag);
    const double mean = mean_of(x);
    Vec out(max_lag + 1);
#pragma omp parallel for schedule(dynamic, 16)
    for (Index k = 0; k <= max_lag; ++k) out(k) = lag_sum(x, mean, k);
    return out;
}

} // namespace omp

// Below these sizes thread start-up costs more than the loop.
constexpr Index kMinParallelRows = 512;
constexpr Index kMinParallelWork = 1 << 16;

Vec row_quadratic_forms(const Mat& rows, const Mat& G, Exec exec) {
    if (exec == Exec::parallel && rows.rows() >= kMinParallelRows) return omp::row_quadratic_forms(rows, G);
    return serial::row_quadratic_forms(rows, G);
}

Vec autocovariance(std::span<const double> x, Index max_lag, Exec exec) {
    if (exec == Exec::parallel && static_cast<Index>(x.size()) * max_lag >= kMinParallelWork) {
        return omp::autocovariance(x, max_lag);
    }
    return serial::autocovariance(x, max_lag);
}

Vec autocovariance_fft(std::span<const double> x, Index max_lag) {
    max_lag = clamp_lag(x, max_lag);
    const auto n = static_cast<Index>(x.size());
    Index len = 1;
    while (len < 2 * n) len <<= 1;
    const double mean = mean_of(x);
    std::vector<double> padded(size_t(len), 0.0);
    for (Index t = 0; t < n; ++t) padded[size_t(t)] = x[size_t(t)] - mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, padded);
    for (auto& c : spec) c = std::norm(c);
    std::vector<double> acf;
    fft.inv(acf, spec);
    Vec out(max_lag + 1);
    for (Index k = 0; k <= max_lag; ++k) out(k) = acf[size_t(k)] / double(n);
    return out;
}

int max_threads() { return omp_get_max_threads(); }

} // namespace johnwalk::kernels
