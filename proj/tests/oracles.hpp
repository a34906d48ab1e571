#pragma once
// Independent reference implementations used as test oracles.

#include <algorithm>
#include <numeric>
#include <vector>

namespace ssa::oracle {

// Friedman statistic from column rank sums:
// 12 / (N k (k+1)) * sum_j R_j^2 - 3 N (k+1), in long double.
inline double friedman_from_rank_sums(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t k = rows.front().size();
    std::vector<long double> col(k, 0.0L);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < k; ++j) col[j] += r[j];
    }
    long double sq = 0.0L;
    for (long double c : col) sq += c * c;
    const long double N = n, K = k;
    return static_cast<double>(12.0L / (N * K * (K + 1.0L)) * sq - 3.0L * N * (K + 1.0L));
}

// Hochberg decisions via adjusted p-values:
// adj_(i) = min_{j >= i} (m - j + 1) p_(j); reject where adj <= alpha.
inline std::vector<bool> hochberg_adjusted(const std::vector<double>& p, double alpha) {
    const std::size_t m = p.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<long double> adj(m);
    long double running = 1.0L;
    for (std::size_t pos = m; pos-- > 0;) {
        const long double v = static_cast<long double>(m - pos) * p[idx[pos]];
        running = std::min(running, v);
        adj[pos] = running;
    }
    std::vector<bool> out(m, false);
    for (std::size_t pos = 0; pos < m; ++pos) out[idx[pos]] = adj[pos] <= alpha;
    return out;
}

// Every distinct mid-rank row for k treatments (one per weak ordering).
inline std::vector<std::vector<double>> all_rank_rows(std::size_t k) {
    std::vector<std::vector<double>> rows;
    std::vector<int> v(k, 0);
    while (true) {
        std::vector<double> r(k);
        for (std::size_t i = 0; i < k; ++i) {
            double less = 0, equal = 0;
            for (std::size_t j = 0; j < k; ++j) {
                less += v[j] < v[i];
                equal += v[j] == v[i];
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
        std::size_t pos = 0;
        while (pos < k && ++v[pos] == static_cast<int>(k)) v[pos++] = 0;
        if (pos == k) break;
    }
    return rows;
}

}  // namespace ssa::oracle
