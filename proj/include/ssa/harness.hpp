#pragma once
// Parameter grids, seeded repeated runs, and resumable parallel sweeps.

#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssa/benchmark.hpp"
#include "ssa/core.hpp"

namespace ssa::harness {

struct ParameterGrid {
    std::vector<int> pop_sizes;
    std::vector<double> r_as;
    std::vector<double> p_cs;
    std::vector<double> p_ms;

    std::size_t size() const { return pop_sizes.size() * r_as.size() * p_cs.size() * p_ms.size(); }
};

// 6 x 6 x 5 x 5 = 900 settings.
ParameterGrid protocol_grid();

// Cartesian product, pop_size outermost and p_m innermost. Seeds are left at
// zero; runs receive derived seeds. Throws ConfigError on an empty axis.
std::vector<SsaParams> expand_grid(const ParameterGrid& grid, double intensity_floor_c = -1e-100);

struct RunKey {
    std::size_t setting = 0;
    bench::FunctionId problem = bench::FunctionId::f1;
    std::size_t run = 0;

    auto operator<=>(const RunKey&) const = default;
};

// Stable 64-bit mix of (master seed, setting, problem, run). With `paired`
// the setting index is left out so every setting sees the same seeds.
std::uint64_t derive_seed(std::uint64_t master_seed, const RunKey& key, bool paired = false);

struct RunSpec {
    RunKey key;
    SsaParams params;  // seed already derived
    std::uint64_t budget_fes = kDefaultBudget;
    std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;
};

enum class RunStatus { ok, failed };

struct RunResult {
    RunSpec spec;
    RunStatus status = RunStatus::ok;
    std::string error;
    int attempts = 0;
    RunRecord record;
};

// Runs once and retries once on failure; a second failure is recorded in the
// result instead of thrown.
RunResult execute_run(const RunSpec& spec, const Problem& problem);

// Persistence backend for sweeps. put() is only ever called from one thread
// at a time.
class RunStore {
public:
    virtual ~RunStore() = default;
    virtual std::optional<RunResult> find(const RunKey& key) = 0;
    virtual void put(const RunResult& result) = 0;
};

class MemoryStore final : public RunStore {
public:
    std::optional<RunResult> find(const RunKey& key) override;
    void put(const RunResult& result) override;
    std::size_t size() const { return runs_.size(); }

private:
    std::map<RunKey, RunResult> runs_;
};

struct Summary {
    std::size_t count = 0;
    std::size_t failed = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double best = 0.0;
    double worst = 0.0;
    double median = 0.0;
};

// Mean, sample standard deviation (N - 1; 0 for one value), min, max and
// median (midpoint for even N). Throws ArgumentError on an empty input.
Summary summarize(std::span<const double> finals);

struct SweepConfig {
    std::vector<SsaParams> settings;
    std::size_t repeats = 51;
    std::uint64_t budget_fes = kDefaultBudget;
    std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;
    std::uint64_t master_seed = 0;
    bool paired_seeds = false;
    std::size_t workers = 1;
    // Stop after this many newly executed runs (0 = no limit).
    std::size_t max_new_runs = 0;
};

struct SweepResult {
    std::vector<SsaParams> settings;
    std::vector<bench::FunctionId> problems;
    std::size_t repeats = 0;
    std::map<RunKey, RunResult> runs;
    std::size_t new_runs = 0;
    std::size_t reused_runs = 0;

    bool complete() const { return runs.size() == settings.size() * problems.size() * repeats; }
    std::vector<RunKey> missing() const;
    // Final best fitness of successful runs in one cell, ordered by run index.
    std::vector<double> finals(std::size_t setting, bench::FunctionId problem) const;
    std::size_t failures(std::size_t setting, bench::FunctionId problem) const;
    // Throws IncompleteInputError if the cell has no successful run.
    Summary summary(std::size_t setting, bench::FunctionId problem) const;
};

// Every spec of the sweep, setting-major, then problem, then run.
std::vector<RunSpec> plan_sweep(const SweepConfig& config, std::span<const bench::BenchmarkProblem> problems);

// Executes every (setting, problem, repeat) run not already in `store` on a
// pool of `workers` threads. Completed runs are handed to the store one at a
// time as they finish. Results do not depend on the worker count.
SweepResult execute_sweep(const SweepConfig& config, std::span<const bench::BenchmarkProblem> problems,
                          RunStore& store);

}  // namespace ssa::harness
