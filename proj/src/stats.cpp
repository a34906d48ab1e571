#include "ssa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ssa/error.hpp"

namespace ssa::stats {

std::vector<double> RankTable::mean_ranks() const {
    std::vector<double> out(treatments, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t t = 0; t < treatments; ++t) out[t] += at(b, t);
    }
    for (double& v : out) v /= static_cast<double>(blocks);
    return out;
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share ranks i+1..j+1
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

RankTable rank_settings(const std::vector<std::vector<double>>& scores) {
    if (scores.empty() || scores.front().empty()) throw ArgumentError("rank_settings: empty score matrix");
    RankTable table;
    table.blocks = scores.size();
    table.treatments = scores.front().size();
    table.ranks.reserve(table.blocks * table.treatments);
    for (std::size_t b = 0; b < scores.size(); ++b) {
        const auto& row = scores[b];
        if (row.size() != table.treatments) throw ArgumentError("rank_settings: ragged score matrix");
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (std::isnan(row[t])) {
                throw ArgumentError("rank_settings: missing cell (block " + std::to_string(b) + ", treatment " +
                                    std::to_string(t) + ")");
            }
        }
        const auto r = midranks(row);
        table.ranks.insert(table.ranks.end(), r.begin(), r.end());
    }
    return table;
}

FriedmanResult friedman_test(const RankTable& table) {
    if (table.blocks < 2 || table.treatments < 2) {
        throw ArgumentError("friedman_test: need at least 2 blocks and 2 treatments");
    }
    const auto n = static_cast<double>(table.blocks);
    const auto k = static_cast<double>(table.treatments);
    FriedmanResult res;
    res.blocks = table.blocks;
    res.treatments = table.treatments;
    res.mean_ranks = table.mean_ranks();
    double sum_sq = 0.0;
    for (double r : res.mean_ranks) sum_sq += r * r;
    res.statistic = std::max(0.0, 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0));
    res.degrees_of_freedom = k - 1.0;
    res.p_value = chi_square_upper_tail(res.statistic, res.degrees_of_freedom);
    return res;
}

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEps = 1e-16;

// P(a, x) by its power series.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw ArgumentError("regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
    return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_square_upper_tail(double x, double dof) {
    if (!(dof > 0.0)) throw ArgumentError("chi_square_upper_tail: dof must be positive");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<bool> hochberg_step_up(std::span<const double> p_values, double alpha) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::size_t cutoff = 0;  // number of rejected hypotheses
    for (std::size_t i = m; i >= 1; --i) {
        if (p_values[order[i - 1]] <= alpha / static_cast<double>(m - i + 1)) {
            cutoff = i;
            break;
        }
    }
    std::vector<bool> rejected(m, false);
    for (std::size_t i = 0; i < cutoff; ++i) rejected[order[i]] = true;
    return rejected;
}

PosthocResult hochberg_posthoc(const FriedmanResult& result, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const std::size_t k = result.treatments;
    if (k < 2 || result.mean_ranks.size() != k) throw ArgumentError("hochberg_posthoc: need at least 2 treatments");

    PosthocResult out;
    out.alpha = alpha;
    out.friedman_rejected = result.p_value <= alpha;
    out.control = static_cast<std::size_t>(
        std::min_element(result.mean_ranks.begin(), result.mean_ranks.end()) - result.mean_ranks.begin());
    out.z.assign(k, 0.0);
    out.p_raw.assign(k, 1.0);
    out.rejected.assign(k, false);

    const double se = std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1) /
                                (6.0 * static_cast<double>(result.blocks)));
    std::vector<std::size_t> others;
    std::vector<double> p_others;
    for (std::size_t j = 0; j < k; ++j) {
        if (j == out.control) continue;
        out.z[j] = (result.mean_ranks[j] - result.mean_ranks[out.control]) / se;
        out.p_raw[j] = normal_upper_tail(out.z[j]);
        others.push_back(j);
        p_others.push_back(out.p_raw[j]);
    }
    if (out.friedman_rejected) {
        const auto rej = hochberg_step_up(p_others, alpha);
        for (std::size_t i = 0; i < others.size(); ++i) out.rejected[others[i]] = rej[i];
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (!out.rejected[j]) out.accepted.push_back(j);
    }
    return out;
}

bool is_monotone_non_decreasing(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(), [](double a, double b) { return b < a; }) == values.end();
}

SuccessCurve success_curve(std::span<const std::span<const Checkpoint>> traces, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("success threshold must be positive");
    SuccessCurve curve;
    curve.threshold = threshold;
    curve.runs = traces.size();
    if (traces.empty()) return curve;
    const auto& first = traces.front();
    curve.fes.reserve(first.size());
    for (const auto& c : first) curve.fes.push_back(c.fe);
    std::vector<std::size_t> hits(first.size(), 0);
    for (const auto& trace : traces) {
        if (trace.size() != first.size()) throw ArgumentError("success_curve: heterogeneous checkpoint grids");
        for (std::size_t c = 0; c < trace.size(); ++c) {
            if (trace[c].fe != curve.fes[c]) throw ArgumentError("success_curve: heterogeneous checkpoint grids");
            if (c > 0 && trace[c].best_fitness > trace[c - 1].best_fitness) {
                throw ArgumentError("success_curve: best-so-far trace is not monotone");
            }
            if (trace[c].best_fitness < threshold) ++hits[c];
        }
    }
    curve.rate.reserve(hits.size());
    for (std::size_t h : hits) curve.rate.push_back(static_cast<double>(h) / static_cast<double>(traces.size()));
    return curve;
}

std::string SensitivityTable::label(double p_m, double p_c, double r_a) const {
    const auto it = cells.find({p_m, p_c, r_a});
    if (it == cells.end() || it->second.empty()) return "-";
    std::string s;
    for (int pop : it->second) {
        if (!s.empty()) s += '/';
        s += std::to_string(pop);
    }
    return s;
}

std::size_t SensitivityTable::labeled_cells() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const auto& kv) { return !kv.second.empty(); }));
}

SensitivityTable sensitivity_table(const PosthocResult& posthoc, std::span<const SsaParams> settings) {
    if (posthoc.rejected.size() != settings.size()) {
        throw ArgumentError("sensitivity_table: post-hoc result does not match the settings list");
    }
    std::set<double> pm, pc, ra;
    SensitivityTable table;
    for (const SsaParams& s : settings) {
        pm.insert(s.p_m);
        pc.insert(s.p_c);
        ra.insert(s.r_a);
        table.cells.try_emplace({s.p_m, s.p_c, s.r_a});
    }
    table.p_ms.assign(pm.begin(), pm.end());
    table.p_cs.assign(pc.begin(), pc.end());
    table.r_as.assign(ra.begin(), ra.end());
    for (std::size_t j : posthoc.accepted) {
        const SsaParams& s = settings[j];
        auto& pops = table.cells[{s.p_m, s.p_c, s.r_a}];
        if (std::find(pops.begin(), pops.end(), s.pop_size) == pops.end()) pops.push_back(s.pop_size);
    }
    for (auto& [key, pops] : table.cells) std::sort(pops.begin(), pops.end());
    return table;
}

}  // namespace ssa::stats
