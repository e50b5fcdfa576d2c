#pragma once

#include <span>

#include "johnwalk/linalg.hpp"

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp; both evaluate each
// output entry with the same operation order, so results agree bit for bit.
namespace johnwalk::kernels {

enum class Exec { serial, parallel };

namespace serial {

// out_i = r_i^T G r_i for every row r_i of `rows`.
Vec row_quadratic_forms(const Mat& rows, const Mat& G);

// Biased autocovariance gamma_k = (1/N) sum_t (x_t - mean)(x_{t+k} - mean), k = 0..max_lag.
Vec autocovariance(std::span<const double> x, Index max_lag);

} // namespace serial

namespace omp {

Vec row_quadratic_forms(const Mat& rows, const Mat& G);
Vec autocovariance(std::span<const double> x, Index max_lag);

} // namespace omp

Vec row_quadratic_forms(const Mat& rows, const Mat& G, Exec exec = Exec::parallel);
Vec autocovariance(std::span<const double> x, Index max_lag, Exec exec = Exec::parallel);

// Same quantity through a zero-padded FFT, O(N log N) for any lag; agrees
// with the direct sums to rounding.
Vec autocovariance_fft(std::span<const double> x, Index max_lag);

// Threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads();

} // namespace johnwalk::kernels
