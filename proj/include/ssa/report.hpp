#pragma once
// Manifest parsing and the on-disk formats: per-run JSON records, results
// directories, summary and success-rate CSV, and markdown reports.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ssa/benchmark.hpp"
#include "ssa/harness.hpp"
#include "ssa/stats.hpp"

namespace ssa::report {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kRecordFormat = "ssa-run-record/1";

// Experiment description. Plain `key: value` lines with `[a, b]` lists:
//
//   problems: [f1, f7, f8, f9]      # or "all"
//   pop_sizes: [10, 30]             # grid axes ...
//   r_as: [1.0, 8.0]
//   p_cs: [0.7]
//   p_ms: [0.1]
//   setting: [30, 1.0, 0.7, 0.1]    # ... or one setting instead of axes
//   repeats: 10
//   budget_fes: 100000
//   checkpoint_interval: 1000
//   master_seed: 2015
//   shift_seed: 2005                # or shift_file: path/to/shift.txt
//
// Remaining keys: dimension, intensity_floor_c, alpha, paired_seeds,
// output_dir, workers. Omitted keys take the full-scale protocol defaults.
struct Manifest {
    std::string source_text;
    std::vector<bench::FunctionId> problems;
    std::size_t dimension = 30;
    harness::ParameterGrid grid = harness::protocol_grid();
    std::size_t repeats = 51;
    std::uint64_t budget_fes = kDefaultBudget;
    std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;
    std::uint64_t master_seed = 0;
    bench::ShiftSource shift = bench::ShiftFromSeed{};
    std::filesystem::path output_dir = "results";
    double alpha = stats::kDefaultAlpha;
    double intensity_floor_c = -1e-100;
    bool paired_seeds = false;
    std::size_t workers = 1;
};

// Throws ConfigError naming the offending field. Relative shift_file and
// output_dir paths resolve against `base_dir`.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);

std::vector<SsaParams> manifest_settings(const Manifest& m);
harness::SweepConfig sweep_config(const Manifest& m);
// The manifest's problems sharing one resolved shift vector.
std::vector<bench::BenchmarkProblem> build_problems(const Manifest& m, std::span<const double> shift);

// Everything needed to reproduce an output file.
struct Provenance {
    std::string manifest_text;
    std::uint64_t master_seed = 0;
    std::vector<double> shift;
};

// Scientific notation, 17 significant digits.
std::string format_real(double v);
double parse_real(std::string_view text);
// Four-decimal scientific display, e.g. 1.1321E-73.
std::string format_display(double v);

// Reals are stored as strings in format_real form so that values round-trip
// exactly and non-finite values stay representable.
nlohmann::ordered_json run_to_json(const harness::RunResult& run, const Provenance& prov);
harness::RunResult run_from_json(const nlohmann::json& j);
// The record without its timing block; identical for identical inputs.
nlohmann::ordered_json record_payload(const nlohmann::ordered_json& record);

std::string run_file_name(const harness::RunKey& key);

// Results directory:
//   manifest.txt   verbatim manifest
//   shift.txt      shift vector, one value per line
//   runs/*.json    one record per completed run
//   index.csv      one line per completed run
class DirectoryStore final : public harness::RunStore {
public:
    DirectoryStore(std::filesystem::path root, Provenance provenance);

    std::optional<harness::RunResult> find(const harness::RunKey& key) override;
    // Writes to a temporary file and renames it into place.
    void put(const harness::RunResult& result) override;

    // Rewrites index.csv sorted by key from the records on disk.
    void rebuild_index() const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    Provenance provenance_;
};

// Creates the directory layout and checks that it is writable; refuses a
// directory produced by a manifest that yields different runs.
void prepare_results_dir(const std::filesystem::path& root, const Manifest& m, std::span<const double> shift);

struct LoadedResults {
    Manifest manifest;
    Provenance provenance;
    harness::SweepResult sweep;
};

// Reads manifest.txt, shift.txt and every run record of a results directory.
LoadedResults load_results(const std::filesystem::path& root);

struct SummaryRow {
    std::size_t setting = 0;
    SsaParams params;
    bench::FunctionId problem = bench::FunctionId::f1;
    harness::Summary summary;
};

inline constexpr std::string_view kSummaryColumns[] = {"Mean", "Std. Div.", "Best", "Worst", "Median"};

std::vector<SummaryRow> summary_rows(const harness::SweepResult& sweep);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows, const Provenance& prov);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);
std::string summary_markdown(std::span<const SummaryRow> rows, const Provenance& prov);

struct StatsReport {
    bool applicable = false;
    std::string reason;
    std::vector<SsaParams> settings;
    std::vector<bench::FunctionId> problems;
    stats::RankTable ranks;
    stats::FriedmanResult friedman;
    stats::PosthocResult posthoc;
    stats::SensitivityTable table;
};

// Ranks settings by mean final fitness per function. Throws
// IncompleteInputError if any (setting, function) cell lacks successful runs.
StatsReport compute_stats(const harness::SweepResult& sweep, double alpha);
// Rows (p_m, p_c), columns r_a, accepted population sizes per cell.
std::string sensitivity_markdown(const stats::SensitivityTable& table);
std::string stats_markdown(const StatsReport& report, const Provenance& prov);

struct SuccessSeries {
    // "all", or the parameter varied against the standard setting.
    std::string panel;
    std::size_t setting = 0;
    SsaParams params;
    stats::SuccessCurve curve;
};

// One curve per selected setting (panel "all") plus, for each of the four
// parameters, the curves of settings equal to `standard` in the other three.
// An empty filter selects every setting.
std::vector<SuccessSeries> success_series(const harness::SweepResult& sweep, double threshold,
                                          std::span<const std::size_t> settings_filter, const SsaParams& standard);
// Aborts with ArgumentError if any series is not monotone or leaves [0, 1].
void write_success_csv(const std::filesystem::path& path, std::span<const SuccessSeries> series,
                       const harness::SweepResult& sweep, const Provenance& prov);

}  // namespace ssa::report
