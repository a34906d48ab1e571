#pragma once
// Eleven base benchmark functions on shifted search boxes.
//
// The optimum of every function stays at (or near) the origin; the shift
// vector moves the search box instead, so values close to the optimum keep
// full floating-point resolution.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ssa/core.hpp"

namespace ssa::bench {

enum class FunctionId : int { f1 = 1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11 };

enum class Modality { unimodal, multimodal };

struct FunctionInfo {
    FunctionId id;
    std::string_view name;
    double base_lower;
    double base_upper;
    // Multiplier applied to the shared shift vector for this function.
    double shift_scale;
    Modality modality;
};

inline constexpr int kFunctionCount = 11;

std::span<const FunctionInfo> catalog();
const FunctionInfo& info(FunctionId id);

// "f1".."f11"
std::string to_string(FunctionId id);
// Accepts "f7", "F7" or "7". Throws ConfigError otherwise.
FunctionId parse_function_id(std::string_view text);

// Formula value without any box or dimension checks. D = x.size() >= 2.
double evaluate_unchecked(FunctionId id, std::span<const double> x);

class BenchmarkProblem final : public Problem {
public:
    // `base_shift` is the unscaled shift vector o; the box is
    // [lo - s*o_d, hi - s*o_d] with s = info(id).shift_scale.
    BenchmarkProblem(FunctionId id, std::vector<double> base_shift);

    std::size_t dimension() const override { return base_shift_.size(); }
    const SearchBox& box() const override { return box_; }
    double infimum() const override { return 0.0; }
    // Throws ArgumentError on a dimension mismatch or a point outside the box.
    double evaluate(std::span<const double> x) const override;

    FunctionId id() const { return id_; }
    std::string_view name() const { return info(id_).name; }
    Modality modality() const { return info(id_).modality; }
    double shift_scale() const { return info(id_).shift_scale; }
    std::span<const double> base_shift() const { return base_shift_; }

private:
    FunctionId id_;
    std::vector<double> base_shift_;
    SearchBox box_;
};

// Fixed seed used when a manifest does not name a shift source.
inline constexpr std::uint64_t kDefaultShiftSeed = 2005;

// o_d uniform on the central 80% of [-100, 100].
std::vector<double> generate_shift(std::size_t dimension, std::uint64_t seed);

// Plain text, one real per line. Throws ConfigError if unreadable or if the
// number of values differs from `dimension`.
std::vector<double> load_shift_file(const std::filesystem::path& path, std::size_t dimension);
void write_shift_file(const std::filesystem::path& path, std::span<const double> shift);

struct ShiftFromSeed {
    std::uint64_t seed = kDefaultShiftSeed;
};
using ShiftSource = std::variant<ShiftFromSeed, std::filesystem::path>;

std::vector<double> resolve_shift(const ShiftSource& source, std::size_t dimension);

// f1..f11 sharing one base shift vector.
std::vector<BenchmarkProblem> make_suite(std::size_t dimension, const ShiftSource& source);

}  // namespace ssa::bench
