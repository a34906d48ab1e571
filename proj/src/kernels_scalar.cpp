#include "ssa/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ssa::kernels {
namespace {

double l1_distance_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void accumulate_sq_dev_scalar(double* acc, const double* x, const double* mean, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean[i];
        acc[i] += d * d;
    }
}

}  // namespace

const KernelSet& scalar() {
    static const KernelSet set{
        "scalar",          l1_distance_scalar, sum_squares_scalar,
        max_abs_scalar,    accumulate_scalar,  accumulate_sq_dev_scalar,
    };
    return set;
}

}  // namespace ssa::kernels
