#include "ssa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "ssa/error.hpp"
#include "ssa/report.hpp"

namespace ssa::cli {

namespace fs = std::filesystem;
using namespace ssa::report;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

Provenance provenance_of(const Manifest& m, std::vector<double> shift) {
    return Provenance{m.source_text, m.master_seed, std::move(shift)};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw std::runtime_error("cannot write " + path.string());
}

struct RunArgs {
    std::string manifest;
    std::size_t setting = 0;
    std::string problem = "f1";
    std::size_t run = 0;
    std::string out;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
    const Manifest m = load_manifest(a.manifest);
    const auto settings = manifest_settings(m);
    if (a.setting >= settings.size()) {
        throw ConfigError("--setting " + std::to_string(a.setting) + " out of range (manifest has " +
                          std::to_string(settings.size()) + " settings)");
    }
    const auto id = bench::parse_function_id(a.problem);
    if (a.run >= m.repeats) throw ConfigError("--run must be below repeats (" + std::to_string(m.repeats) + ")");
    const auto shift = bench::resolve_shift(m.shift, m.dimension);
    const bench::BenchmarkProblem problem(id, shift);

    harness::RunSpec spec;
    spec.key = harness::RunKey{a.setting, id, a.run};
    spec.params = settings[a.setting];
    spec.params.seed = harness::derive_seed(m.master_seed, spec.key, m.paired_seeds);
    spec.budget_fes = m.budget_fes;
    spec.checkpoint_interval = m.checkpoint_interval;
    const auto result = harness::execute_run(spec, problem);
    const std::string text = run_to_json(result, provenance_of(m, shift)).dump(1) + "\n";
    if (a.out.empty()) {
        out << text;
    } else {
        write_text(a.out, text);
        out << "wrote " << a.out << " (final best " << format_display(result.record.final_best) << ", "
            << result.record.checkpoints.size() << " checkpoints)\n";
    }
    return result.status == harness::RunStatus::ok ? code(ExitCode::ok) : code(ExitCode::runtime);
}

struct SweepArgs {
    std::string manifest;
    std::string output;
    std::size_t workers = 0;
    std::size_t max_runs = 0;
    bool resume = true;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    Manifest m = load_manifest(a.manifest);
    if (!a.output.empty()) m.output_dir = a.output;
    if (a.workers > 0) m.workers = a.workers;
    const auto shift = bench::resolve_shift(m.shift, m.dimension);
    const auto problems = build_problems(m, shift);
    auto config = sweep_config(m);
    config.max_new_runs = a.max_runs;
    harness::plan_sweep(config, problems);

    if (!a.resume && fs::exists(m.output_dir / "runs") && !fs::is_empty(m.output_dir / "runs")) {
        throw ConfigError("output directory " + m.output_dir.string() + " already holds runs; drop --no-resume to continue it");
    }
    prepare_results_dir(m.output_dir, m, shift);
    const Provenance prov = provenance_of(m, shift);
    DirectoryStore store(m.output_dir, prov);
    const auto result = harness::execute_sweep(config, problems, store);
    store.rebuild_index();

    std::size_t failed = 0;
    for (const auto& [key, r] : result.runs) failed += r.status == harness::RunStatus::failed;
    out << result.new_runs << " new runs, " << result.reused_runs << " reused, " << failed << " failed\n";
    if (!result.complete()) {
        out << "incomplete: " << result.missing().size() << " runs still missing; rerun to resume\n";
        return code(ExitCode::ok);
    }
    const auto rows = summary_rows(result);
    write_summary_csv(m.output_dir / "summary.csv", rows, prov);
    write_text(m.output_dir / "summary.md", summary_markdown(rows, prov));
    out << "results in " << m.output_dir.string() << '\n';
    return code(ExitCode::ok);
}

void require_complete(const harness::SweepResult& sweep) {
    if (sweep.complete()) return;
    std::map<std::pair<std::size_t, bench::FunctionId>, std::size_t> cells;
    for (const auto& k : sweep.missing()) ++cells[{k.setting, k.problem}];
    std::string msg = "sweep is incomplete; missing cells (setting / function: runs missing):";
    for (const auto& [cell, n] : cells) {
        msg += "\n  " + std::to_string(cell.first) + " / " + bench::to_string(cell.second) + ": " + std::to_string(n);
    }
    throw IncompleteInputError(msg);
}

struct StatsArgs {
    std::string results;
    double alpha = -1.0;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
    const auto loaded = load_results(a.results);
    require_complete(loaded.sweep);
    const double alpha = a.alpha > 0.0 ? a.alpha : loaded.manifest.alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
    const auto rep = compute_stats(loaded.sweep, alpha);
    const fs::path root = a.results;
    const auto& prov = loaded.provenance;

    const auto rows = summary_rows(loaded.sweep);
    write_summary_csv(root / "summary.csv", rows, prov);

    std::ostringstream ranks;
    ranks << "# tool_version: " << kToolVersion << "\n# master_seed: " << prov.master_seed << '\n';
    ranks << "# shift:";
    for (double v : prov.shift) ranks << ' ' << format_real(v);
    ranks << '\n';
    {
        std::istringstream lines(prov.manifest_text);
        std::string line;
        while (std::getline(lines, line)) ranks << "# manifest| " << line << '\n';
    }
    ranks << "function";
    for (std::size_t s = 0; s < rep.settings.size(); ++s) ranks << ",s" << s;
    ranks << '\n';
    for (std::size_t b = 0; b < rep.ranks.blocks; ++b) {
        ranks << bench::to_string(rep.problems[b]);
        for (std::size_t t = 0; t < rep.ranks.treatments; ++t) ranks << ',' << rep.ranks.at(b, t);
        ranks << '\n';
    }
    write_text(root / "ranks.csv", ranks.str());
    write_text(root / "stats.md", stats_markdown(rep, prov));

    if (!rep.applicable) {
        out << rep.reason << '\n';
        return code(ExitCode::ok);
    }
    std::ostringstream ph;
    ph << "# tool_version: " << kToolVersion << "\n# master_seed: " << prov.master_seed << '\n';
    ph << "# alpha: " << format_real(alpha) << "\n# control: " << rep.posthoc.control << '\n';
    ph << "# friedman_statistic: " << format_real(rep.friedman.statistic) << "\n# friedman_p: "
       << format_real(rep.friedman.p_value) << '\n';
    ph << "setting,pop_size,r_a,p_c,p_m,mean_rank,z,p,rejected\n";
    for (std::size_t j = 0; j < rep.settings.size(); ++j) {
        const auto& s = rep.settings[j];
        ph << j << ',' << s.pop_size << ',' << format_real(s.r_a) << ',' << format_real(s.p_c) << ','
           << format_real(s.p_m) << ',' << format_real(rep.friedman.mean_ranks[j]) << ','
           << format_real(rep.posthoc.z[j]) << ',' << format_real(rep.posthoc.p_raw[j]) << ','
           << (rep.posthoc.rejected[j] ? 1 : 0) << '\n';
    }
    write_text(root / "posthoc.csv", ph.str());
    write_text(root / "sensitivity.md", sensitivity_markdown(rep.table));

    out << "Friedman statistic " << format_display(rep.friedman.statistic) << ", p = " << format_display(rep.friedman.p_value)
        << (rep.posthoc.friedman_rejected ? " (rejected)" : " (not rejected)") << '\n';
    out << rep.posthoc.accepted.size() << " of " << rep.settings.size() << " settings accepted; control setting "
        << rep.posthoc.control << '\n';
    out << sensitivity_markdown(rep.table);
    return code(ExitCode::ok);
}

struct SuccessArgs {
    std::string results;
    double threshold = stats::kDefaultSuccessThreshold;
    std::vector<std::size_t> settings;
    std::vector<double> standard{30, 1.0, 0.7, 0.1};
    std::string out;
};

int cmd_success(const SuccessArgs& a, std::ostream& out) {
    if (!(a.threshold > 0.0)) throw ConfigError("--threshold must be positive");
    if (a.standard.size() != 4) throw ConfigError("--standard expects pop_size,r_a,p_c,p_m");
    const auto loaded = load_results(a.results);
    require_complete(loaded.sweep);
    SsaParams standard;
    standard.pop_size = static_cast<int>(a.standard[0]);
    standard.r_a = a.standard[1];
    standard.p_c = a.standard[2];
    standard.p_m = a.standard[3];
    const auto series = success_series(loaded.sweep, a.threshold, a.settings, standard);
    const fs::path path = a.out.empty() ? fs::path(a.results) / "success.csv" : fs::path(a.out);
    write_success_csv(path, series, loaded.sweep, loaded.provenance);
    out << series.size() << " series written to " << path.string() << '\n';
    return code(ExitCode::ok);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Social spider algorithm parameter sensitivity tool"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute one seeded run and write its record");
    run->add_option("--manifest,-m", run_args.manifest, "Manifest file")->required();
    run->add_option("--setting", run_args.setting, "Setting index in grid order");
    run->add_option("--problem", run_args.problem, "Function, e.g. f1");
    run->add_option("--run", run_args.run, "Repeat index");
    run->add_option("--out,-o", run_args.out, "Record file (default: stdout)");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Execute every run of a manifest, resuming where it stopped");
    sweep->add_option("--manifest,-m", sweep_args.manifest, "Manifest file")->required();
    sweep->add_option("--output,-o", sweep_args.output, "Results directory (overrides output_dir)");
    sweep->add_option("--workers,-j", sweep_args.workers, "Worker threads (overrides workers)");
    sweep->add_option("--max-runs", sweep_args.max_runs, "Stop after this many new runs");
    sweep->add_flag("--resume,!--no-resume", sweep_args.resume, "Continue an existing results directory (default)");

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "Friedman test, Hochberg post-hoc and sensitivity table");
    stats_cmd->add_option("--results,-r", stats_args.results, "Results directory")->required();
    stats_cmd->add_option("--alpha", stats_args.alpha, "Significance level (default: manifest alpha)");

    SuccessArgs success_args;
    auto* success = app.add_subcommand("success", "Success-rate curves over the checkpoint grid");
    success->add_option("--results,-r", success_args.results, "Results directory")->required();
    success->add_option("--threshold", success_args.threshold, "Success threshold");
    success->add_option("--settings", success_args.settings, "Setting indices to include (default: all)")->delimiter(',');
    success->add_option("--standard", success_args.standard, "Reference setting pop_size,r_a,p_c,p_m")->delimiter(',');
    success->add_option("--out,-o", success_args.out, "CSV file (default: <results>/success.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : code(ExitCode::configuration);
    }

    try {
        if (*run) return cmd_run(run_args, out);
        if (*sweep) return cmd_sweep(sweep_args, out);
        if (*stats_cmd) return cmd_stats(stats_args, out);
        if (*success) return cmd_success(success_args, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return code(ExitCode::configuration);
    } catch (const IncompleteInputError& e) {
        err << "incomplete input: " << e.what() << '\n';
        return code(ExitCode::incomplete_input);
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return code(ExitCode::runtime);
    }
    return code(ExitCode::configuration);
}

}  // namespace ssa::cli
