#pragma once
// Data-parallel inner loops shared by the optimizer and the benchmark suite.
//
// Every kernel has a portable scalar reference. Vector variants live in
// separate translation units compiled for their instruction set and are
// picked once at startup from CPU capabilities. The SSA_KERNELS environment
// variable ("scalar" or "avx2") overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace ssa::kernels {

struct KernelSet {
    std::string_view name;

    // sum_i |a_i - b_i|
    double (*l1_distance)(const double* a, const double* b, std::size_t n);
    // sum_i x_i^2
    double (*sum_squares)(const double* x, std::size_t n);
    // max_i |x_i|
    double (*max_abs)(const double* x, std::size_t n);
    // acc_i += x_i
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    // acc_i += (x_i - mean_i)^2
    void (*accumulate_sq_dev)(double* acc, const double* x, const double* mean, std::size_t n);
};

const KernelSet& scalar();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelSet* avx2();

// Selected once per process.
const KernelSet& active();

// Convenience wrappers over active().
double l1_distance(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> x);
double max_abs(std::span<const double> x);

}  // namespace ssa::kernels
