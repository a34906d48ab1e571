#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "ssa/core.hpp"

namespace ssa::testing {

// Sphere on a symmetric box; counts evaluations.
class CountingSphere final : public Problem {
public:
    CountingSphere(std::size_t dim, double half_width) {
        box_.lower.assign(dim, -half_width);
        box_.upper.assign(dim, half_width);
    }
    std::size_t dimension() const override { return box_.dimension(); }
    const SearchBox& box() const override { return box_; }
    double infimum() const override { return 0.0; }
    double evaluate(std::span<const double> x) const override {
        ++calls;
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    }

    mutable std::atomic<std::uint64_t> calls{0};

private:
    SearchBox box_;
};

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("ssa-test-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace ssa::testing
