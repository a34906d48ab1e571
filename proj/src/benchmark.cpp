#include "ssa/benchmark.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "ssa/error.hpp"
#include "ssa/kernels.hpp"

namespace ssa::bench {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

constexpr std::array<FunctionInfo, kFunctionCount> kCatalog{{
    {FunctionId::f1, "Generalized Sphere Function", -100.0, 100.0, 1.0, Modality::unimodal},
    {FunctionId::f2, "Generalized Cigar Function", -100.0, 100.0, 1.0, Modality::unimodal},
    {FunctionId::f3, "Schwefel's Function 1.2", -100.0, 100.0, 1.0, Modality::unimodal},
    {FunctionId::f4, "Schwefel's Function 2.21", -100.0, 100.0, 1.0, Modality::unimodal},
    {FunctionId::f5, "Generalized Rosenbrock's Function", -100.0, 100.0, 1.0, Modality::multimodal},
    {FunctionId::f6, "Modified Schwefel's Function", -1000.0, 1000.0, 10.0, Modality::multimodal},
    {FunctionId::f7, "Generalized Rastrigin's Function", -5.12, 5.12, 0.0512, Modality::multimodal},
    {FunctionId::f8, "Ackley's Function", -32.0, 32.0, 0.32, Modality::multimodal},
    {FunctionId::f9, "Generalized Griewank's Function", -600.0, 600.0, 6.0, Modality::multimodal},
    {FunctionId::f10, "Scaffer's Function F6", -100.0, 100.0, 1.0, Modality::multimodal},
    {FunctionId::f11, "Katsuura's Function", -5.12, 5.12, 0.0512, Modality::multimodal},
}};

double cigar(std::span<const double> x) {
    return x[0] * x[0] + 1e6 * kernels::sum_squares(x.subspan(1));
}

double schwefel_1_2(std::span<const double> x) {
    double prefix = 0.0;
    double s = 0.0;
    for (double v : x) {
        prefix += v;
        s += prefix * prefix;
    }
    return s;
}

double rosenbrock(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = x[i] - 1.0;
        s += 100.0 * a * a + b * b;
    }
    return s;
}

// Non-negative remainder.
double mod_pos(double a, double m) {
    const double r = std::fmod(a, m);
    return r < 0.0 ? r + m : r;
}

double modified_schwefel(std::span<const double> x) {
    const auto dim = static_cast<double>(x.size());
    double s = 0.0;
    for (double xi : x) {
        const double z = xi + 420.9687;
        double g;
        if (z > 500.0) {
            const double y = 500.0 - mod_pos(z, 500.0);
            g = y * std::sin(std::sqrt(std::fabs(y))) - (z - 500.0) * (z - 500.0) / (1e4 * dim);
        } else if (z < -500.0) {
            const double y = mod_pos(-z, 500.0) - 500.0;
            g = y * std::sin(std::sqrt(std::fabs(y))) - (z + 500.0) * (z + 500.0) / (1e4 * dim);
        } else {
            g = z * std::sin(std::sqrt(std::fabs(z)));
        }
        s += g;
    }
    return 418.9829 * dim - s;
}

double rastrigin(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v) + 10.0;
    return s;
}

double ackley(std::span<const double> x) {
    const auto n = static_cast<double>(x.size());
    double cos_sum = 0.0;
    for (double v : x) cos_sum += std::cos(2.0 * kPi * v);
    return -20.0 * std::exp(-0.2 * std::sqrt(kernels::sum_squares(x) / n)) - std::exp(cos_sum / n) + 20.0 + kE;
}

double griewank(std::span<const double> x) {
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    return kernels::sum_squares(x) / 4000.0 - prod + 1.0;
}

double schaffer_pair(double a, double b) {
    const double r2 = a * a + b * b;
    const double s = std::sin(std::sqrt(r2));
    const double den = 1.0 + 0.001 * r2;
    return 0.5 + (s * s - 0.5) / (den * den);
}

double schaffer_f6(std::span<const double> x) {
    double s = 0.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) s += schaffer_pair(x[i], x[(i + 1) % n]);
    return s;
}

double katsuura(std::span<const double> x) {
    const auto dim = static_cast<double>(x.size());
    const double exponent = 10.0 / std::pow(dim, 1.2);
    const double scale = 10.0 / (dim * dim);
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double inner = 0.0;
        for (int j = 1; j <= 32; ++j) {
            const double p = std::ldexp(1.0, j);
            const double t = p * x[i];
            inner += std::fabs(t - std::round(t)) / p;
        }
        prod *= std::pow(1.0 + static_cast<double>(i + 1) * inner, exponent);
    }
    return scale * prod - scale;
}

}  // namespace

std::span<const FunctionInfo> catalog() { return kCatalog; }

const FunctionInfo& info(FunctionId id) {
    const int k = static_cast<int>(id);
    if (k < 1 || k > kFunctionCount) throw ArgumentError("unknown benchmark function id " + std::to_string(k));
    return kCatalog[static_cast<std::size_t>(k - 1)];
}

std::string to_string(FunctionId id) { return "f" + std::to_string(static_cast<int>(id)); }

FunctionId parse_function_id(std::string_view text) {
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == 'f' || digits.front() == 'F')) digits.remove_prefix(1);
    int value = 0;
    bool ok = !digits.empty() && digits.size() <= 2;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) ok = false;
        else value = value * 10 + (c - '0');
    }
    if (!ok || value < 1 || value > kFunctionCount) {
        throw ConfigError("unknown benchmark function '" + std::string(text) + "' (expected f1..f11)");
    }
    return static_cast<FunctionId>(value);
}

double evaluate_unchecked(FunctionId id, std::span<const double> x) {
    switch (id) {
        case FunctionId::f1: return kernels::sum_squares(x);
        case FunctionId::f2: return cigar(x);
        case FunctionId::f3: return schwefel_1_2(x);
        case FunctionId::f4: return kernels::max_abs(x);
        case FunctionId::f5: return rosenbrock(x);
        case FunctionId::f6: return modified_schwefel(x);
        case FunctionId::f7: return rastrigin(x);
        case FunctionId::f8: return ackley(x);
        case FunctionId::f9: return griewank(x);
        case FunctionId::f10: return schaffer_f6(x);
        case FunctionId::f11: return katsuura(x);
    }
    throw ArgumentError("unknown benchmark function id");
}

BenchmarkProblem::BenchmarkProblem(FunctionId id, std::vector<double> base_shift)
    : id_(id), base_shift_(std::move(base_shift)) {
    const FunctionInfo& fi = info(id_);
    if (base_shift_.size() < 2) throw ArgumentError("benchmark dimension must be >= 2");
    box_.lower.resize(base_shift_.size());
    box_.upper.resize(base_shift_.size());
    for (std::size_t d = 0; d < base_shift_.size(); ++d) {
        const double offset = fi.shift_scale * base_shift_[d];
        box_.lower[d] = fi.base_lower - offset;
        box_.upper[d] = fi.base_upper - offset;
    }
}

double BenchmarkProblem::evaluate(std::span<const double> x) const {
    if (x.size() != dimension()) {
        throw ArgumentError(to_string(id_) + ": expected " + std::to_string(dimension()) + " coordinates, got " +
                            std::to_string(x.size()));
    }
    if (!box_.contains(x)) throw ArgumentError(to_string(id_) + ": point outside the search box");
    return evaluate_unchecked(id_, x);
}

std::vector<double> generate_shift(std::size_t dimension, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> o(dimension);
    for (double& v : o) v = -80.0 + 160.0 * rng.uniform();
    return o;
}

std::vector<double> load_shift_file(const std::filesystem::path& path, std::size_t dimension) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read shift file " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::istringstream ls(line);
        double v;
        std::string rest;
        if (!(ls >> v) || (ls >> rest) || !std::isfinite(v)) {
            throw ConfigError("shift file " + path.string() + ": bad value on line " + std::to_string(line_no));
        }
        values.push_back(v);
    }
    if (values.size() != dimension) {
        throw ConfigError("shift file " + path.string() + " holds " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(dimension));
    }
    return values;
}

void write_shift_file(const std::filesystem::path& path, std::span<const double> shift) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write shift file " + path.string());
    out << std::scientific << std::setprecision(16);
    for (double v : shift) out << v << '\n';
}

std::vector<double> resolve_shift(const ShiftSource& source, std::size_t dimension) {
    if (const auto* s = std::get_if<ShiftFromSeed>(&source)) return generate_shift(dimension, s->seed);
    return load_shift_file(std::get<std::filesystem::path>(source), dimension);
}

std::vector<BenchmarkProblem> make_suite(std::size_t dimension, const ShiftSource& source) {
    if (dimension < 2) throw ConfigError("suite dimension must be >= 2");
    const std::vector<double> shift = resolve_shift(source, dimension);
    std::vector<BenchmarkProblem> suite;
    suite.reserve(kFunctionCount);
    for (const FunctionInfo& fi : kCatalog) suite.emplace_back(fi.id, shift);
    return suite;
}

}  // namespace ssa::bench
