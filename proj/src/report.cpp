#include "ssa/report.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ssa/error.hpp"

namespace ssa::report {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Manifest

namespace {

const std::set<std::string> kManifestKeys{
    "problems",  "dimension",         "pop_sizes",   "r_as",  "p_cs",         "p_ms",
    "setting",   "repeats",           "budget_fes",  "checkpoint_interval",   "master_seed",
    "shift_seed", "shift_file",       "intensity_floor_c",    "alpha",        "paired_seeds",
    "output_dir", "workers",
};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw ConfigError("manifest field '" + field + "': " + what);
}

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& field, const char* expected) {
    if (!node.IsScalar()) field_error(field, std::string("expected ") + expected);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        field_error(field, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
    }
}

std::uint64_t as_count(const YAML::Node& node, const std::string& field) {
    const std::string text = node.IsScalar() ? node.Scalar() : std::string{};
    if (text.empty() || text.front() == '-') field_error(field, "expected a non-negative integer");
    return scalar_as<std::uint64_t>(node, field, "a non-negative integer");
}

template <typename T>
std::vector<T> list_as(const YAML::Node& node, const std::string& field, const char* expected) {
    std::vector<T> out;
    if (node.IsScalar()) {
        out.push_back(scalar_as<T>(node, field, expected));
    } else if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(scalar_as<T>(item, field, expected));
    } else {
        field_error(field, std::string("expected a list of ") + expected);
    }
    if (out.empty()) field_error(field, "list is empty");
    return out;
}

void check_open_unit(const std::vector<double>& values, const std::string& field) {
    for (double v : values) {
        if (!(v > 0.0 && v < 1.0)) field_error(field, "values must lie in (0, 1)");
    }
}

}  // namespace

Manifest parse_manifest(std::string_view text, const fs::path& base_dir) {
    Manifest m;
    m.source_text = std::string(text);
    YAML::Node root;
    try {
        root = YAML::Load(m.source_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("manifest is not valid key/value text: ") + e.what());
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("manifest must be a list of 'key: value' lines");

    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        if (!kManifestKeys.contains(key)) field_error(key, "unknown field");
    }

    for (int i = 1; i <= bench::kFunctionCount; ++i) m.problems.push_back(static_cast<bench::FunctionId>(i));
    if (const auto n = root["problems"]) {
        if (n.IsScalar() && n.Scalar() == "all") {
            // keep the default
        } else {
            m.problems.clear();
            for (const auto& name : list_as<std::string>(n, "problems", "function names")) {
                try {
                    m.problems.push_back(bench::parse_function_id(name));
                } catch (const ConfigError& e) {
                    field_error("problems", e.what());
                }
            }
            std::set<bench::FunctionId> uniq(m.problems.begin(), m.problems.end());
            if (uniq.size() != m.problems.size()) field_error("problems", "duplicate function");
        }
    }
    if (const auto n = root["dimension"]) m.dimension = as_count(n, "dimension");
    if (m.dimension < 2) field_error("dimension", "must be >= 2");

    const bool has_axes = root["pop_sizes"] || root["r_as"] || root["p_cs"] || root["p_ms"];
    if (const auto n = root["setting"]) {
        if (has_axes) field_error("setting", "give either a single setting or grid axes, not both");
        const auto v = list_as<double>(n, "setting", "numbers");
        if (v.size() != 4) field_error("setting", "expected [pop_size, r_a, p_c, p_m]");
        if (v[0] != std::floor(v[0])) field_error("setting", "pop_size must be an integer");
        m.grid = harness::ParameterGrid{{static_cast<int>(v[0])}, {v[1]}, {v[2]}, {v[3]}};
    } else {
        if (const auto n = root["pop_sizes"]) m.grid.pop_sizes = list_as<int>(n, "pop_sizes", "integers");
        if (const auto n = root["r_as"]) m.grid.r_as = list_as<double>(n, "r_as", "numbers");
        if (const auto n = root["p_cs"]) m.grid.p_cs = list_as<double>(n, "p_cs", "numbers");
        if (const auto n = root["p_ms"]) m.grid.p_ms = list_as<double>(n, "p_ms", "numbers");
    }
    const std::string pop_field = root["setting"] ? "setting" : "pop_sizes";
    for (int p : m.grid.pop_sizes) {
        if (p < 2) field_error(pop_field, "population sizes must be >= 2");
    }
    for (double r : m.grid.r_as) {
        if (!(r > 0.0) || !std::isfinite(r)) field_error(root["setting"] ? "setting" : "r_as", "r_a must be positive");
    }
    check_open_unit(m.grid.p_cs, root["setting"] ? "setting" : "p_cs");
    check_open_unit(m.grid.p_ms, root["setting"] ? "setting" : "p_ms");

    if (const auto n = root["repeats"]) m.repeats = as_count(n, "repeats");
    if (m.repeats < 1) field_error("repeats", "must be >= 1");
    if (const auto n = root["budget_fes"]) m.budget_fes = as_count(n, "budget_fes");
    if (m.budget_fes < 1) field_error("budget_fes", "must be positive");
    if (const auto n = root["checkpoint_interval"]) m.checkpoint_interval = as_count(n, "checkpoint_interval");
    if (m.checkpoint_interval < 1 || m.budget_fes % m.checkpoint_interval != 0) {
        field_error("checkpoint_interval", "must be positive and divide budget_fes");
    }
    const int max_pop = *std::max_element(m.grid.pop_sizes.begin(), m.grid.pop_sizes.end());
    if (m.budget_fes < static_cast<std::uint64_t>(max_pop)) field_error("budget_fes", "must be >= the largest pop_size");
    if (const auto n = root["master_seed"]) m.master_seed = as_count(n, "master_seed");

    if (root["shift_seed"] && root["shift_file"]) field_error("shift_file", "give shift_seed or shift_file, not both");
    if (const auto n = root["shift_seed"]) m.shift = bench::ShiftFromSeed{as_count(n, "shift_seed")};
    if (const auto n = root["shift_file"]) {
        fs::path p = scalar_as<std::string>(n, "shift_file", "a path");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        m.shift = p;
    }
    if (const auto n = root["intensity_floor_c"]) m.intensity_floor_c = scalar_as<double>(n, "intensity_floor_c", "a number");
    if (!(m.intensity_floor_c < 0.0) || !std::isfinite(m.intensity_floor_c)) {
        field_error("intensity_floor_c", "must be finite and below the benchmark infimum 0");
    }
    if (const auto n = root["alpha"]) m.alpha = scalar_as<double>(n, "alpha", "a number");
    if (!(m.alpha > 0.0 && m.alpha < 1.0)) field_error("alpha", "must lie in (0, 1)");
    if (const auto n = root["paired_seeds"]) m.paired_seeds = scalar_as<bool>(n, "paired_seeds", "true or false");
    if (const auto n = root["output_dir"]) {
        fs::path p = scalar_as<std::string>(n, "output_dir", "a path");
        m.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (!base_dir.empty()) {
        m.output_dir = base_dir / m.output_dir;
    }
    if (const auto n = root["workers"]) m.workers = as_count(n, "workers");
    if (m.workers < 1) field_error("workers", "must be >= 1");
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::vector<SsaParams> manifest_settings(const Manifest& m) { return harness::expand_grid(m.grid, m.intensity_floor_c); }

harness::SweepConfig sweep_config(const Manifest& m) {
    harness::SweepConfig c;
    c.settings = manifest_settings(m);
    c.repeats = m.repeats;
    c.budget_fes = m.budget_fes;
    c.checkpoint_interval = m.checkpoint_interval;
    c.master_seed = m.master_seed;
    c.paired_seeds = m.paired_seeds;
    c.workers = m.workers;
    return c;
}

std::vector<bench::BenchmarkProblem> build_problems(const Manifest& m, std::span<const double> shift) {
    if (shift.size() != m.dimension) throw ConfigError("shift vector length does not match dimension");
    std::vector<bench::BenchmarkProblem> out;
    out.reserve(m.problems.size());
    for (auto id : m.problems) out.emplace_back(id, std::vector<double>(shift.begin(), shift.end()));
    return out;
}

// ---------------------------------------------------------------------------
// Number formatting

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

double parse_real(std::string_view text) {
    const std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ArgumentError("not a real number: '" + s + "'");
    return v;
}

std::string format_display(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4E", v);
    return buf;
}

namespace {

std::string format_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

ordered_json reals(std::span<const double> values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) arr.push_back(format_real(v));
    return arr;
}

std::vector<double> reals_from(const json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) out.push_back(parse_real(v.get<std::string>()));
    return out;
}

ordered_json provenance_json(const Provenance& prov) {
    ordered_json p;
    p["tool_version"] = kToolVersion;
    p["master_seed"] = prov.master_seed;
    p["shift"] = reals(prov.shift);
    p["manifest"] = prov.manifest_text;
    return p;
}

// Comment preamble shared by the CSV outputs.
void write_csv_provenance(std::ostream& out, const Provenance& prov) {
    out << "# tool_version: " << kToolVersion << '\n';
    out << "# master_seed: " << prov.master_seed << '\n';
    out << "# shift:";
    for (double v : prov.shift) out << ' ' << format_real(v);
    out << '\n';
    std::istringstream lines(prov.manifest_text);
    std::string line;
    while (std::getline(lines, line)) out << "# manifest| " << line << '\n';
}

std::string markdown_provenance(const Provenance& prov) {
    std::ostringstream out;
    out << "\n## Provenance\n\n";
    out << "- tool version: " << kToolVersion << '\n';
    out << "- master seed: " << prov.master_seed << '\n';
    out << "- shift vector:";
    for (double v : prov.shift) out << ' ' << format_real(v);
    out << "\n\nManifest:\n\n```\n" << prov.manifest_text;
    if (!prov.manifest_text.empty() && prov.manifest_text.back() != '\n') out << '\n';
    out << "```\n";
    return out.str();
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IncompleteInputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Run records

ordered_json run_to_json(const harness::RunResult& run, const Provenance& prov) {
    const auto& p = run.spec.params;
    ordered_json j;
    j["format"] = kRecordFormat;
    j["tool_version"] = kToolVersion;
    j["key"] = {{"setting", run.spec.key.setting},
                {"problem", bench::to_string(run.spec.key.problem)},
                {"run", run.spec.key.run}};
    j["params"] = {{"pop_size", p.pop_size},
                   {"r_a", format_real(p.r_a)},
                   {"p_c", format_real(p.p_c)},
                   {"p_m", format_real(p.p_m)},
                   {"intensity_floor_c", format_real(p.intensity_floor_c)},
                   {"seed", p.seed}};
    j["budget_fes"] = run.spec.budget_fes;
    j["checkpoint_interval"] = run.spec.checkpoint_interval;
    j["status"] = run.status == harness::RunStatus::ok ? "ok" : "failed";
    j["attempts"] = run.attempts;
    j["error"] = run.error;

    const RunRecord& r = run.record;
    ordered_json result;
    result["final_best"] = format_real(r.final_best);
    result["iterations"] = r.iterations;
    result["fes_used"] = r.fes_used;
    result["best_position"] = reals(r.best_position);
    ordered_json cps = ordered_json::array();
    for (const auto& c : r.checkpoints) cps.push_back(ordered_json{{"fe", c.fe}, {"best", format_real(c.best_fitness)}});
    result["checkpoints"] = std::move(cps);
    j["result"] = std::move(result);
    j["provenance"] = provenance_json(prov);
    j["timing"] = {{"wall_time_s", r.wall_time_s}};
    return j;
}

harness::RunResult run_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kRecordFormat) throw ArgumentError("unsupported record format");
        harness::RunResult run;
        const auto& key = j.at("key");
        run.spec.key.setting = key.at("setting").get<std::size_t>();
        run.spec.key.problem = bench::parse_function_id(key.at("problem").get<std::string>());
        run.spec.key.run = key.at("run").get<std::size_t>();
        const auto& p = j.at("params");
        run.spec.params.pop_size = p.at("pop_size").get<int>();
        run.spec.params.r_a = parse_real(p.at("r_a").get<std::string>());
        run.spec.params.p_c = parse_real(p.at("p_c").get<std::string>());
        run.spec.params.p_m = parse_real(p.at("p_m").get<std::string>());
        run.spec.params.intensity_floor_c = parse_real(p.at("intensity_floor_c").get<std::string>());
        run.spec.params.seed = p.at("seed").get<std::uint64_t>();
        run.spec.budget_fes = j.at("budget_fes").get<std::uint64_t>();
        run.spec.checkpoint_interval = j.at("checkpoint_interval").get<std::uint64_t>();
        run.status = j.at("status").get<std::string>() == "ok" ? harness::RunStatus::ok : harness::RunStatus::failed;
        run.attempts = j.at("attempts").get<int>();
        run.error = j.at("error").get<std::string>();

        RunRecord& r = run.record;
        const auto& res = j.at("result");
        r.params = run.spec.params;
        r.budget_fes = run.spec.budget_fes;
        r.checkpoint_interval = run.spec.checkpoint_interval;
        r.final_best = parse_real(res.at("final_best").get<std::string>());
        r.iterations = res.at("iterations").get<std::uint64_t>();
        r.fes_used = res.at("fes_used").get<std::uint64_t>();
        r.best_position = reals_from(res.at("best_position"));
        for (const auto& c : res.at("checkpoints")) {
            r.checkpoints.push_back({c.at("fe").get<std::uint64_t>(), parse_real(c.at("best").get<std::string>())});
        }
        if (j.contains("timing")) r.wall_time_s = j.at("timing").at("wall_time_s").get<double>();
        return run;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("malformed run record: ") + e.what());
    } catch (const ConfigError& e) {
        throw ArgumentError(std::string("malformed run record: ") + e.what());
    }
}

ordered_json record_payload(const ordered_json& record) {
    ordered_json out = record;
    out.erase("timing");
    return out;
}

std::string run_file_name(const harness::RunKey& key) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "s%04zu_f%02d_r%03zu.json", key.setting, static_cast<int>(key.problem), key.run);
    return buf;
}

// ---------------------------------------------------------------------------
// Results directory

DirectoryStore::DirectoryStore(fs::path root, Provenance provenance)
    : root_(std::move(root)), provenance_(std::move(provenance)) {
    fs::create_directories(root_ / "runs");
}

std::optional<harness::RunResult> DirectoryStore::find(const harness::RunKey& key) {
    const fs::path path = root_ / "runs" / run_file_name(key);
    if (!fs::exists(path)) return std::nullopt;
    try {
        auto run = run_from_json(json::parse(read_text(path)));
        if (!(run.spec.key == key)) return std::nullopt;
        return run;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void DirectoryStore::put(const harness::RunResult& result) {
    const std::string name = run_file_name(result.spec.key);
    write_text_atomic(root_ / "runs" / name, run_to_json(result, provenance_).dump(1) + "\n");
    const fs::path index = root_ / "index.csv";
    const bool fresh = !fs::exists(index);
    std::ofstream out(index, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + index.string());
    if (fresh) {
        write_csv_provenance(out, provenance_);
        out << "setting,problem,run,seed,status,file\n";
    }
    out << result.spec.key.setting << ',' << bench::to_string(result.spec.key.problem) << ',' << result.spec.key.run
        << ',' << result.spec.params.seed << ',' << (result.status == harness::RunStatus::ok ? "ok" : "failed") << ','
        << "runs/" << name << '\n';
}

void DirectoryStore::rebuild_index() const {
    std::vector<harness::RunResult> runs;
    for (const auto& entry : fs::directory_iterator(root_ / "runs")) {
        if (entry.path().extension() != ".json") continue;
        try {
            runs.push_back(run_from_json(json::parse(read_text(entry.path()))));
        } catch (const std::exception&) {
            continue;
        }
    }
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.spec.key < b.spec.key; });
    std::ostringstream out;
    write_csv_provenance(out, provenance_);
    out << "setting,problem,run,seed,status,file\n";
    for (const auto& r : runs) {
        out << r.spec.key.setting << ',' << bench::to_string(r.spec.key.problem) << ',' << r.spec.key.run << ','
            << r.spec.params.seed << ',' << (r.status == harness::RunStatus::ok ? "ok" : "failed") << ",runs/"
            << run_file_name(r.spec.key) << '\n';
    }
    write_text_atomic(root_ / "index.csv", out.str());
}

namespace {

// Fields that decide which runs a manifest produces.
std::string run_fingerprint(const Manifest& m, std::span<const double> shift) {
    std::ostringstream s;
    s << m.dimension << '|' << m.repeats << '|' << m.budget_fes << '|' << m.checkpoint_interval << '|' << m.master_seed
      << '|' << m.paired_seeds << '|' << format_real(m.intensity_floor_c) << '|';
    for (auto id : m.problems) s << bench::to_string(id) << ',';
    s << '|';
    for (const auto& p : manifest_settings(m)) {
        s << p.pop_size << ',' << format_real(p.r_a) << ',' << format_real(p.p_c) << ',' << format_real(p.p_m) << ';';
    }
    s << '|';
    for (double v : shift) s << format_real(v) << ',';
    return s.str();
}

}  // namespace

void prepare_results_dir(const fs::path& root, const Manifest& m, std::span<const double> shift) {
    std::error_code ec;
    fs::create_directories(root / "runs", ec);
    if (ec) throw ConfigError("cannot create output directory " + root.string() + ": " + ec.message());
    const fs::path probe = root / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out || !(out << "ok")) throw ConfigError("output directory " + root.string() + " is not writable");
    }
    fs::remove(probe, ec);

    const fs::path manifest_path = root / "manifest.txt";
    const fs::path shift_path = root / "shift.txt";
    if (fs::exists(manifest_path)) {
        const Manifest existing = parse_manifest(read_text(manifest_path));
        const auto existing_shift = bench::load_shift_file(shift_path, existing.dimension);
        if (run_fingerprint(existing, existing_shift) != run_fingerprint(m, shift)) {
            throw ConfigError("output directory " + root.string() +
                              " holds results of a different experiment; choose another output_dir");
        }
    }
    write_text_atomic(manifest_path, m.source_text);
    bench::write_shift_file(shift_path, shift);
}

LoadedResults load_results(const fs::path& root) {
    const fs::path manifest_path = root / "manifest.txt";
    if (!fs::exists(manifest_path)) throw IncompleteInputError(root.string() + " is not a results directory (no manifest.txt)");
    LoadedResults out;
    out.manifest = parse_manifest(read_text(manifest_path));
    out.provenance.manifest_text = out.manifest.source_text;
    out.provenance.master_seed = out.manifest.master_seed;
    out.provenance.shift = bench::load_shift_file(root / "shift.txt", out.manifest.dimension);

    auto& sweep = out.sweep;
    sweep.settings = manifest_settings(out.manifest);
    sweep.problems = out.manifest.problems;
    sweep.repeats = out.manifest.repeats;
    const std::set<bench::FunctionId> wanted(sweep.problems.begin(), sweep.problems.end());
    if (fs::exists(root / "runs")) {
        for (const auto& entry : fs::directory_iterator(root / "runs")) {
            if (entry.path().extension() != ".json") continue;
            harness::RunResult run;
            try {
                run = run_from_json(json::parse(read_text(entry.path())));
            } catch (const std::exception&) {
                continue;
            }
            const auto& k = run.spec.key;
            if (k.setting >= sweep.settings.size() || k.run >= sweep.repeats || !wanted.contains(k.problem)) continue;
            sweep.runs.emplace(k, std::move(run));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summaries

std::vector<SummaryRow> summary_rows(const harness::SweepResult& sweep) {
    std::vector<SummaryRow> rows;
    for (std::size_t s = 0; s < sweep.settings.size(); ++s) {
        for (auto p : sweep.problems) {
            SummaryRow row;
            row.setting = s;
            row.params = sweep.settings[s];
            row.problem = p;
            const auto finals = sweep.finals(s, p);
            if (finals.empty()) {
                row.summary.failed = sweep.failures(s, p);
                const double nan = std::nan("");
                row.summary.mean = row.summary.std_dev = row.summary.best = row.summary.worst = row.summary.median = nan;
            } else {
                row.summary = sweep.summary(s, p);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_summary_csv(const fs::path& path, std::span<const SummaryRow> rows, const Provenance& prov) {
    std::ostringstream out;
    write_csv_provenance(out, prov);
    out << "setting,pop_size,r_a,p_c,p_m,problem,runs,failed";
    for (auto c : kSummaryColumns) out << ',' << c;
    out << '\n';
    for (const auto& r : rows) {
        out << r.setting << ',' << r.params.pop_size << ',' << format_real(r.params.r_a) << ','
            << format_real(r.params.p_c) << ',' << format_real(r.params.p_m) << ',' << bench::to_string(r.problem) << ','
            << r.summary.count << ',' << r.summary.failed << ',' << format_real(r.summary.mean) << ','
            << format_real(r.summary.std_dev) << ',' << format_real(r.summary.best) << ','
            << format_real(r.summary.worst) << ',' << format_real(r.summary.median) << '\n';
    }
    write_text_atomic(path, out.str());
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<SummaryRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 13) throw ArgumentError("summary csv: expected 13 fields in '" + line + "'");
        SummaryRow r;
        r.setting = std::stoul(f[0]);
        r.params.pop_size = std::stoi(f[1]);
        r.params.r_a = parse_real(f[2]);
        r.params.p_c = parse_real(f[3]);
        r.params.p_m = parse_real(f[4]);
        r.problem = bench::parse_function_id(f[5]);
        r.summary.count = std::stoul(f[6]);
        r.summary.failed = std::stoul(f[7]);
        r.summary.mean = parse_real(f[8]);
        r.summary.std_dev = parse_real(f[9]);
        r.summary.best = parse_real(f[10]);
        r.summary.worst = parse_real(f[11]);
        r.summary.median = parse_real(f[12]);
        rows.push_back(r);
    }
    return rows;
}

std::string summary_markdown(std::span<const SummaryRow> rows, const Provenance& prov) {
    std::ostringstream out;
    out << "# Final best fitness per setting and function\n\n";
    out << "| setting | [pop, r_a, p_c, p_m] | function | runs | failed |";
    for (auto c : kSummaryColumns) out << ' ' << c << " |";
    out << "\n|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        out << "| " << r.setting << " | [" << r.params.pop_size << ", " << format_param(r.params.r_a) << ", "
            << format_param(r.params.p_c) << ", " << format_param(r.params.p_m) << "] | " << bench::to_string(r.problem)
            << " | " << r.summary.count << " | " << r.summary.failed << " | " << format_display(r.summary.mean) << " | "
            << format_display(r.summary.std_dev) << " | " << format_display(r.summary.best) << " | "
            << format_display(r.summary.worst) << " | " << format_display(r.summary.median) << " |\n";
    }
    out << markdown_provenance(prov);
    return out.str();
}

// ---------------------------------------------------------------------------
// Statistics report

StatsReport compute_stats(const harness::SweepResult& sweep, double alpha) {
    StatsReport rep;
    rep.settings = sweep.settings;
    rep.problems = sweep.problems;

    std::vector<std::string> missing;
    for (std::size_t s = 0; s < sweep.settings.size(); ++s) {
        for (auto p : sweep.problems) {
            if (sweep.finals(s, p).empty()) missing.push_back("setting " + std::to_string(s) + " / " + bench::to_string(p));
        }
    }
    if (!missing.empty()) {
        std::string msg = "sweep is incomplete; cells without successful runs:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw IncompleteInputError(msg);
    }

    std::vector<std::vector<double>> scores;
    for (auto p : sweep.problems) {
        std::vector<double> row;
        for (std::size_t s = 0; s < sweep.settings.size(); ++s) row.push_back(sweep.summary(s, p).mean);
        scores.push_back(std::move(row));
    }
    rep.ranks = stats::rank_settings(scores);

    if (sweep.settings.size() < 2) {
        rep.reason = "post-hoc inapplicable: only one setting";
        return rep;
    }
    if (sweep.problems.size() < 2) {
        rep.reason = "post-hoc inapplicable: the Friedman test needs at least two functions";
        return rep;
    }
    rep.friedman = stats::friedman_test(rep.ranks);
    rep.posthoc = stats::hochberg_posthoc(rep.friedman, alpha);
    rep.table = stats::sensitivity_table(rep.posthoc, rep.settings);
    rep.applicable = true;
    return rep;
}

std::string sensitivity_markdown(const stats::SensitivityTable& table) {
    std::ostringstream out;
    out << "| p_m | p_c |";
    for (double ra : table.r_as) out << " r_a=" << format_param(ra) << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < table.r_as.size(); ++i) out << "---|";
    out << '\n';
    for (double pm : table.p_ms) {
        for (double pc : table.p_cs) {
            out << "| " << format_param(pm) << " | " << format_param(pc) << " |";
            for (double ra : table.r_as) out << ' ' << table.label(pm, pc, ra) << " |";
            out << '\n';
        }
    }
    return out.str();
}

std::string stats_markdown(const StatsReport& rep, const Provenance& prov) {
    std::ostringstream out;
    out << "# Parameter sensitivity analysis\n\n";
    out << "- settings (treatments): " << rep.settings.size() << '\n';
    out << "- functions (blocks):";
    for (auto p : rep.problems) out << ' ' << bench::to_string(p);
    out << "\n- ranking basis: mean final best fitness per setting and function\n\n";
    if (!rep.applicable) {
        out << "**" << rep.reason << "**\n";
        out << markdown_provenance(prov);
        return out.str();
    }
    out << "## Friedman test\n\n";
    out << "- statistic: " << format_real(rep.friedman.statistic) << '\n';
    out << "- degrees of freedom: " << rep.friedman.degrees_of_freedom << '\n';
    out << "- p-value: " << format_real(rep.friedman.p_value) << '\n';
    out << "- null hypothesis rejected at alpha=" << format_param(rep.posthoc.alpha) << ": "
        << (rep.posthoc.friedman_rejected ? "yes" : "no") << "\n\n";
    out << "## Hochberg post-hoc (control = setting " << rep.posthoc.control << ")\n\n";
    if (!rep.posthoc.friedman_rejected) {
        out << "Friedman null not rejected; every setting is accepted.\n\n";
    }
    out << "| setting | [pop, r_a, p_c, p_m] | mean rank | z | p (one-sided) | decision |\n";
    out << "|---|---|---|---|---|---|\n";
    for (std::size_t j = 0; j < rep.settings.size(); ++j) {
        const auto& p = rep.settings[j];
        const char* decision = j == rep.posthoc.control ? "control" : (rep.posthoc.rejected[j] ? "worse" : "accepted");
        out << "| " << j << " | [" << p.pop_size << ", " << format_param(p.r_a) << ", " << format_param(p.p_c) << ", "
            << format_param(p.p_m) << "] | " << format_param(rep.friedman.mean_ranks[j]) << " | "
            << format_param(rep.posthoc.z[j]) << " | " << format_display(rep.posthoc.p_raw[j]) << " | " << decision
            << " |\n";
    }
    out << "\n## Accepted population sizes per (p_m, p_c, r_a)\n\n";
    out << sensitivity_markdown(rep.table);
    out << markdown_provenance(prov);
    return out.str();
}

// ---------------------------------------------------------------------------
// Success rates

std::vector<SuccessSeries> success_series(const harness::SweepResult& sweep, double threshold,
                                          std::span<const std::size_t> settings_filter, const SsaParams& standard) {
    if (!(threshold > 0.0)) throw ConfigError("success threshold must be positive");
    std::vector<std::size_t> selected;
    if (settings_filter.empty()) {
        for (std::size_t s = 0; s < sweep.settings.size(); ++s) selected.push_back(s);
    } else {
        for (std::size_t s : settings_filter) {
            if (s >= sweep.settings.size()) throw ConfigError("settings filter index " + std::to_string(s) + " out of range");
            selected.push_back(s);
        }
    }

    auto curve_for = [&](std::size_t s) {
        std::vector<std::span<const Checkpoint>> traces;
        for (auto p : sweep.problems) {
            for (auto it = sweep.runs.lower_bound(harness::RunKey{s, p, 0});
                 it != sweep.runs.end() && it->first.setting == s && it->first.problem == p; ++it) {
                if (it->second.status == harness::RunStatus::ok) traces.emplace_back(it->second.record.checkpoints);
            }
        }
        return stats::success_curve(traces, threshold);
    };

    std::vector<SuccessSeries> out;
    std::map<std::size_t, stats::SuccessCurve> cache;
    for (std::size_t s : selected) {
        cache[s] = curve_for(s);
        out.push_back({"all", s, sweep.settings[s], cache[s]});
    }

    struct Panel {
        const char* name;
        bool (*others_match)(const SsaParams&, const SsaParams&);
    };
    const Panel panels[] = {
        {"pop_size", [](const SsaParams& a, const SsaParams& b) { return a.r_a == b.r_a && a.p_c == b.p_c && a.p_m == b.p_m; }},
        {"r_a", [](const SsaParams& a, const SsaParams& b) { return a.pop_size == b.pop_size && a.p_c == b.p_c && a.p_m == b.p_m; }},
        {"p_c", [](const SsaParams& a, const SsaParams& b) { return a.pop_size == b.pop_size && a.r_a == b.r_a && a.p_m == b.p_m; }},
        {"p_m", [](const SsaParams& a, const SsaParams& b) { return a.pop_size == b.pop_size && a.r_a == b.r_a && a.p_c == b.p_c; }},
    };
    for (const Panel& panel : panels) {
        for (std::size_t s : selected) {
            if (panel.others_match(sweep.settings[s], standard)) out.push_back({panel.name, s, sweep.settings[s], cache[s]});
        }
    }
    return out;
}

void write_success_csv(const fs::path& path, std::span<const SuccessSeries> series, const harness::SweepResult& sweep,
                       const Provenance& prov) {
    for (const auto& s : series) {
        const bool bounded = std::all_of(s.curve.rate.begin(), s.curve.rate.end(), [](double r) { return r >= 0.0 && r <= 1.0; });
        if (!stats::is_monotone_non_decreasing(s.curve.rate) || !bounded) {
            throw ArgumentError("success curve for setting " + std::to_string(s.setting) +
                                " is not monotone in [0, 1]; refusing to write");
        }
    }
    std::ostringstream out;
    write_csv_provenance(out, prov);
    const double threshold = series.empty() ? stats::kDefaultSuccessThreshold : series.front().curve.threshold;
    out << "# threshold: " << format_real(threshold) << '\n';
    out << "# runs_per_curve: " << sweep.problems.size() << " functions x " << sweep.repeats
        << " repeats = " << sweep.problems.size() * sweep.repeats << " (literal product)\n";
    out << "panel,setting,pop_size,r_a,p_c,p_m,checkpoint,fe,success_rate,runs\n";
    for (const auto& s : series) {
        for (std::size_t c = 0; c < s.curve.rate.size(); ++c) {
            out << s.panel << ',' << s.setting << ',' << s.params.pop_size << ',' << format_param(s.params.r_a) << ','
                << format_param(s.params.p_c) << ',' << format_param(s.params.p_m) << ',' << c + 1 << ','
                << s.curve.fes[c] << ',' << format_real(s.curve.rate[c]) << ',' << s.curve.runs << '\n';
        }
    }
    write_text_atomic(path, out.str());
}

}  // namespace ssa::report
