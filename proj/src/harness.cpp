#include "ssa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "ssa/error.hpp"

namespace ssa::harness {

ParameterGrid protocol_grid() {
    return ParameterGrid{
        {10, 20, 30, 40, 50, 70},
        {0.2, 0.5, 1.0, 2.0, 4.0, 8.0},
        {0.1, 0.3, 0.5, 0.7, 0.9},
        {0.1, 0.3, 0.5, 0.7, 0.9},
    };
}

std::vector<SsaParams> expand_grid(const ParameterGrid& grid, double intensity_floor_c) {
    if (grid.pop_sizes.empty()) throw ConfigError("grid axis pop_sizes is empty");
    if (grid.r_as.empty()) throw ConfigError("grid axis r_as is empty");
    if (grid.p_cs.empty()) throw ConfigError("grid axis p_cs is empty");
    if (grid.p_ms.empty()) throw ConfigError("grid axis p_ms is empty");
    std::vector<SsaParams> out;
    out.reserve(grid.size());
    for (int pop : grid.pop_sizes) {
        for (double ra : grid.r_as) {
            for (double pc : grid.p_cs) {
                for (double pm : grid.p_ms) {
                    out.push_back(SsaParams{pop, ra, pc, pm, intensity_floor_c, 0});
                }
            }
        }
    }
    return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, const RunKey& key, bool paired) {
    std::uint64_t h = splitmix(master_seed);
    h = splitmix(h ^ (paired ? 0xffffffffffffffffULL : static_cast<std::uint64_t>(key.setting)));
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<int>(key.problem)));
    h = splitmix(h ^ static_cast<std::uint64_t>(key.run));
    return h;
}

RunResult execute_run(const RunSpec& spec, const Problem& problem) {
    RunResult out;
    out.spec = spec;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        out.attempts = attempt;
        try {
            out.record = optimize(spec.params, problem, spec.budget_fes, spec.checkpoint_interval);
            out.status = RunStatus::ok;
            out.error.clear();
            return out;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            out.status = RunStatus::failed;
            out.error = e.what();
        }
    }
    out.record = RunRecord{};
    out.record.params = spec.params;
    out.record.budget_fes = spec.budget_fes;
    out.record.checkpoint_interval = spec.checkpoint_interval;
    return out;
}

std::optional<RunResult> MemoryStore::find(const RunKey& key) {
    const auto it = runs_.find(key);
    if (it == runs_.end()) return std::nullopt;
    return it->second;
}

void MemoryStore::put(const RunResult& result) { runs_[result.spec.key] = result; }

Summary summarize(std::span<const double> finals) {
    if (finals.empty()) throw ArgumentError("summarize: no records");
    Summary s;
    s.count = finals.size();
    const auto n = static_cast<double>(finals.size());
    double sum = 0.0;
    for (double v : finals) sum += v;
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : finals) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = finals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::vector<double> sorted(finals.begin(), finals.end());
    std::sort(sorted.begin(), sorted.end());
    s.best = sorted.front();
    s.worst = sorted.back();
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return s;
}

std::vector<RunKey> SweepResult::missing() const {
    std::vector<RunKey> out;
    for (std::size_t s = 0; s < settings.size(); ++s) {
        for (auto p : problems) {
            for (std::size_t r = 0; r < repeats; ++r) {
                RunKey key{s, p, r};
                if (!runs.contains(key)) out.push_back(key);
            }
        }
    }
    return out;
}

std::vector<double> SweepResult::finals(std::size_t setting, bench::FunctionId problem) const {
    std::vector<double> out;
    for (auto it = runs.lower_bound(RunKey{setting, problem, 0});
         it != runs.end() && it->first.setting == setting && it->first.problem == problem; ++it) {
        if (it->second.status == RunStatus::ok) out.push_back(it->second.record.final_best);
    }
    return out;
}

std::size_t SweepResult::failures(std::size_t setting, bench::FunctionId problem) const {
    std::size_t n = 0;
    for (auto it = runs.lower_bound(RunKey{setting, problem, 0});
         it != runs.end() && it->first.setting == setting && it->first.problem == problem; ++it) {
        if (it->second.status == RunStatus::failed) ++n;
    }
    return n;
}

Summary SweepResult::summary(std::size_t setting, bench::FunctionId problem) const {
    const auto values = finals(setting, problem);
    if (values.empty()) {
        throw IncompleteInputError("no successful runs for setting " + std::to_string(setting) + " on " +
                                   bench::to_string(problem));
    }
    Summary s = summarize(values);
    s.failed = failures(setting, problem);
    return s;
}

std::vector<RunSpec> plan_sweep(const SweepConfig& config, std::span<const bench::BenchmarkProblem> problems) {
    if (config.settings.empty()) throw ConfigError("sweep has no settings");
    if (problems.empty()) throw ConfigError("sweep has no problems");
    if (config.repeats < 1) throw ConfigError("repeats must be >= 1");
    std::set<bench::FunctionId> ids;
    for (const auto& p : problems) {
        if (!ids.insert(p.id()).second) throw ConfigError("problem " + bench::to_string(p.id()) + " listed twice");
    }
    for (const auto& s : config.settings) {
        validate(s, 0.0);
        if (static_cast<std::uint64_t>(s.pop_size) > config.budget_fes) {
            throw ConfigError("budget_fes must be at least the largest pop_size");
        }
    }
    if (config.checkpoint_interval == 0 || config.budget_fes % config.checkpoint_interval != 0) {
        throw ConfigError("checkpoint_interval must be positive and divide budget_fes");
    }

    std::vector<RunSpec> specs;
    specs.reserve(config.settings.size() * problems.size() * config.repeats);
    std::set<std::uint64_t> seeds;
    for (std::size_t s = 0; s < config.settings.size(); ++s) {
        for (const auto& p : problems) {
            for (std::size_t r = 0; r < config.repeats; ++r) {
                RunSpec spec;
                spec.key = RunKey{s, p.id(), r};
                spec.params = config.settings[s];
                spec.params.seed = derive_seed(config.master_seed, spec.key, config.paired_seeds);
                spec.budget_fes = config.budget_fes;
                spec.checkpoint_interval = config.checkpoint_interval;
                if (!seeds.insert(spec.params.seed).second && !config.paired_seeds) {
                    throw ConfigError("derived seed collision; choose another master_seed");
                }
                specs.push_back(spec);
            }
        }
    }
    return specs;
}

SweepResult execute_sweep(const SweepConfig& config, std::span<const bench::BenchmarkProblem> problems,
                          RunStore& store) {
    const std::vector<RunSpec> specs = plan_sweep(config, problems);

    SweepResult result;
    result.settings = config.settings;
    for (const auto& p : problems) result.problems.push_back(p.id());
    result.repeats = config.repeats;

    std::map<bench::FunctionId, const bench::BenchmarkProblem*> by_id;
    for (const auto& p : problems) by_id[p.id()] = &p;

    std::vector<const RunSpec*> pending;
    for (const RunSpec& spec : specs) {
        if (auto existing = store.find(spec.key)) {
            result.runs.emplace(spec.key, std::move(*existing));
            ++result.reused_runs;
        } else {
            pending.push_back(&spec);
        }
    }
    if (config.max_new_runs > 0 && pending.size() > config.max_new_runs) pending.resize(config.max_new_runs);

    std::mutex writer;
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            try {
                RunResult r = execute_run(*pending[i], *by_id.at(pending[i]->key.problem));
                std::lock_guard lock(writer);
                store.put(r);
                result.runs.emplace(r.spec.key, std::move(r));
                ++result.new_runs;
            } catch (...) {
                std::lock_guard lock(writer);
                if (!fatal) fatal = std::current_exception();
                next.store(pending.size());
                return;
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, pending.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (fatal) std::rethrow_exception(fatal);
    return result;
}

}  // namespace ssa::harness
