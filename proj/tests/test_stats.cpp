#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ssa/error.hpp"
#include "ssa/stats.hpp"

using namespace ssa;
using namespace ssa::stats;

namespace {

RankTable table_of(const std::vector<std::vector<double>>& rows) {
    RankTable t;
    t.blocks = rows.size();
    t.treatments = rows.front().size();
    for (const auto& r : rows) t.ranks.insert(t.ranks.end(), r.begin(), r.end());
    return t;
}

std::vector<Checkpoint> trace(std::initializer_list<double> values) {
    std::vector<Checkpoint> out;
    std::uint64_t fe = 0;
    for (double v : values) out.push_back({fe += 1000, v});
    return out;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("rank examples") {
    auto t = rank_settings({{3, 1, 2}});
    CHECK(std::vector<double>(t.ranks) == std::vector<double>{3, 1, 2});
    t = rank_settings({{1, 1, 5}});
    CHECK(std::vector<double>(t.ranks) == std::vector<double>{1.5, 1.5, 3});
    t = rank_settings({{2, 2, 2, 2}});
    CHECK(std::vector<double>(t.ranks) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
    CHECK_THROWS_AS(rank_settings({{1, 2}, {1}}), ArgumentError);
    CHECK_THROWS_AS(rank_settings({{1, NAN}}), ArgumentError);
}

TEST_CASE("ranks are invariant under strictly monotone transforms") {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<int> u(0, 6);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> row(8);
        for (double& v : row) v = std::pow(10.0, -u(gen));
        std::vector<double> tr(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) tr[i] = std::log10(row[i]) * 3.0 + 7.0;
        CHECK(midranks(row) == midranks(tr));
    }
}

TEST_CASE("row sums equal k(k+1)/2 under random tie patterns") {
    std::mt19937_64 gen(32);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 2 + gen() % 30;
        std::uniform_int_distribution<int> u(0, 1 + static_cast<int>(gen() % k));
        std::vector<double> row(k);
        for (double& v : row) v = u(gen);
        const auto r = midranks(row);
        double sum = 0.0;
        for (double x : r) sum += x;
        CHECK(sum == doctest::Approx(k * (k + 1) / 2.0).epsilon(1e-15));
    }
}

TEST_CASE("Friedman examples") {
    SUBCASE("identical rows with maximal separation give 2N at k = 3") {
        for (std::size_t n : {2u, 3u, 7u}) {
            std::vector<std::vector<double>> rows(n, {1, 2, 3});
            const auto res = friedman_test(table_of(rows));
            CHECK(res.statistic == doctest::Approx(2.0 * n).epsilon(1e-14));
            CHECK(res.statistic == doctest::Approx(oracle::friedman_from_rank_sums(rows)).epsilon(1e-14));
            CHECK(res.degrees_of_freedom == 2.0);
        }
    }
    SUBCASE("all tied") {
        const auto res = friedman_test(table_of({{2, 2, 2}, {2, 2, 2}}));
        CHECK(res.statistic == 0.0);
        CHECK(res.p_value == 1.0);
    }
    SUBCASE("k = 3, N = 3 example") {
        std::vector<std::vector<double>> rows{{1, 2, 3}, {1, 2, 3}, {2, 1, 3}};
        const auto res = friedman_test(table_of(rows));
        CHECK(std::fabs(res.statistic - oracle::friedman_from_rank_sums(rows)) < 1e-12);
        CHECK(res.statistic == doctest::Approx(4.666666666666667).epsilon(1e-14));
    }
    SUBCASE("too small") {
        CHECK_THROWS_AS(friedman_test(table_of({{1, 2}})), ArgumentError);
        CHECK_THROWS_AS(friedman_test(table_of({{1}, {1}})), ArgumentError);
    }
}

TEST_CASE("Friedman matches the rank-sum oracle for all k <= 3, N <= 3 tables") {
    for (std::size_t k = 2; k <= 3; ++k) {
        const auto rows = oracle::all_rank_rows(k);
        for (std::size_t n = 2; n <= 3; ++n) {
            std::vector<std::size_t> pick(n, 0);
            while (true) {
                std::vector<std::vector<double>> tab;
                for (auto i : pick) tab.push_back(rows[i]);
                CHECK(std::fabs(friedman_test(table_of(tab)).statistic - oracle::friedman_from_rank_sums(tab)) < 1e-12);
                std::size_t pos = 0;
                while (pos < n && ++pick[pos] == rows.size()) pick[pos++] = 0;
                if (pos == n) break;
            }
        }
    }
}

TEST_CASE("Friedman statistic is invariant under monotone score transforms") {
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> u(1e-9, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<std::vector<double>> scores(6, std::vector<double>(5));
        for (auto& r : scores)
            for (double& v : r) v = u(gen);
        auto tr = scores;
        for (auto& r : tr)
            for (double& v : r) v = std::exp(5.0 * v) - 3.0;
        CHECK(friedman_test(rank_settings(scores)).statistic == friedman_test(rank_settings(tr)).statistic);
    }
}

TEST_CASE("incomplete gamma against Boost") {
    std::mt19937_64 gen(34);
    std::uniform_real_distribution<double> la(-2.0, 3.0), lx(-3.0, 3.5);
    for (int t = 0; t < 5000; ++t) {
        const double a = std::pow(10.0, la(gen));
        const double x = std::pow(10.0, lx(gen));
        const double want = boost::math::gamma_q(a, x);
        CHECK(std::fabs(regularized_gamma_q(a, x) - want) < 1e-10);
    }
    CHECK(regularized_gamma_q(2.0, 0.0) == 1.0);
    CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), ArgumentError);
}

TEST_CASE("chi-square and normal tails at known quantiles") {
    CHECK(chi_square_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_upper_tail(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_upper_tail(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_upper_tail(0.0, 4) == 1.0);
    for (double dof : {1.0, 3.0, 15.0, 899.0}) {
        boost::math::chi_squared dist(dof);
        for (double q : {0.5, 0.05, 0.001}) {
            const double x = boost::math::quantile(boost::math::complement(dist, q));
            CHECK(std::fabs(chi_square_upper_tail(x, dof) - q) < 1e-10);
        }
    }
    CHECK(normal_upper_tail(0.0) == 0.5);
    CHECK(std::fabs(normal_upper_tail(1.959963984540054) - 0.025) < 1e-12);
    CHECK(std::fabs(normal_upper_tail(-1.6448536269514729) - 0.95) < 1e-12);
}

TEST_CASE("Hochberg step-up example") {
    const std::vector<double> p{0.2, 0.01, 0.04};
    const auto rej = hochberg_step_up(p, 0.05);
    CHECK(rej == std::vector<bool>{false, true, false});
    CHECK(oracle::hochberg_adjusted(p, 0.05) == rej);
    // largest p passes its own threshold: everything rejected
    CHECK(hochberg_step_up(std::vector<double>{0.03, 0.04, 0.045}, 0.05) == std::vector<bool>{true, true, true});
}

TEST_CASE("Hochberg matches the adjusted-p reference and is monotone") {
    std::mt19937_64 gen(35);
    std::uniform_real_distribution<double> u(0.0, 0.12);
    for (int t = 0; t < 500; ++t) {
        const std::size_t m = 1 + gen() % 20;
        std::vector<double> p(m);
        for (double& v : p) v = u(gen);
        if (t % 5 == 0) p[gen() % m] = p[0];  // duplicates
        const auto rej = hochberg_step_up(p, 0.05);
        CHECK(rej == oracle::hochberg_adjusted(p, 0.05));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (rej[i] && p[j] <= p[i]) CHECK(rej[j]);
            }
        }
        const auto looser = hochberg_step_up(p, 0.1);
        for (std::size_t i = 0; i < m; ++i) {
            if (rej[i]) CHECK(looser[i]);
        }
    }
}

TEST_CASE("post-hoc with two clearly separated settings") {
    std::vector<std::vector<double>> rows(11, {1, 2});
    const auto fr = friedman_test(table_of(rows));
    const auto ph = hochberg_posthoc(fr, 0.05);
    CHECK(ph.friedman_rejected);
    CHECK(ph.control == 0);
    // z = (2 - 1) / sqrt(2 * 3 / (6 * 11)) = sqrt(11)
    CHECK(ph.z[1] == doctest::Approx(std::sqrt(11.0)).epsilon(1e-14));
    CHECK(ph.p_raw[1] == doctest::Approx(0.5 * std::erfc(std::sqrt(11.0 / 2.0))).epsilon(1e-12));
    CHECK(ph.rejected == std::vector<bool>{false, true});
    CHECK(ph.accepted == std::vector<std::size_t>{0});
}

TEST_CASE("post-hoc with equal mean ranks accepts everything") {
    const auto fr = friedman_test(table_of({{1, 2, 3}, {3, 2, 1}, {2, 2, 2}}));
    const auto ph = hochberg_posthoc(fr, 0.05);
    CHECK_FALSE(ph.friedman_rejected);
    CHECK(ph.accepted == std::vector<std::size_t>{0, 1, 2});
    CHECK_THROWS_AS(hochberg_posthoc(fr, 0.0), ConfigError);
    CHECK_THROWS_AS(hochberg_posthoc(fr, 1.0), ConfigError);
}

TEST_CASE("success curve examples") {
    SUBCASE("cumulative bits") {
        const auto a = trace({1.0, 1e-3, 1e-9, 1e-12});
        std::vector<std::span<const Checkpoint>> tr{a};
        const auto c = success_curve(tr, 1e-8);
        CHECK(c.rate == std::vector<double>{0, 0, 1, 1});
        CHECK(c.fes == std::vector<std::uint64_t>{1000, 2000, 3000, 4000});
    }
    SUBCASE("never successful") {
        const auto a = trace({1.0, 0.5});
        std::vector<std::span<const Checkpoint>> tr{a, a};
        CHECK(success_curve(tr).rate == std::vector<double>{0, 0});
    }
    SUBCASE("half") {
        const auto a = trace({1e-10, 1e-11, 1e-12});
        const auto b = trace({1.0, 1.0, 1.0});
        std::vector<std::span<const Checkpoint>> tr{a, b};
        CHECK(success_curve(tr).rate == std::vector<double>{0.5, 0.5, 0.5});
    }
    SUBCASE("errors") {
        const auto a = trace({1.0, 0.5});
        const auto b = trace({1.0, 0.5, 0.1});
        std::vector<std::span<const Checkpoint>> tr{a, b};
        CHECK_THROWS_AS(success_curve(tr), ArgumentError);
        const auto up = trace({0.5, 1.0});
        std::vector<std::span<const Checkpoint>> bad{up};
        CHECK_THROWS_AS(success_curve(bad), ArgumentError);
        std::vector<std::span<const Checkpoint>> ok{a};
        CHECK_THROWS_AS(success_curve(ok, 0.0), ConfigError);
    }
}

TEST_CASE("random success curves stay monotone in [0, 1]") {
    std::mt19937_64 gen(36);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::vector<Checkpoint>> runs(1 + gen() % 10);
        for (auto& r : runs) {
            double v = 1.0;
            for (std::uint64_t c = 1; c <= 20; ++c) {
                v *= std::pow(10.0, -3.0 * u(gen));
                r.push_back({c * 100, v});
            }
        }
        std::vector<std::span<const Checkpoint>> tr(runs.begin(), runs.end());
        const auto c = success_curve(tr);
        CHECK(is_monotone_non_decreasing(c.rate));
        for (double r : c.rate) CHECK((r >= 0.0 && r <= 1.0));
    }
}

TEST_CASE("sensitivity table") {
    std::vector<SsaParams> settings;
    for (int pop : {10, 20})
        for (double ra : {1.0, 8.0})
            for (double pc : {0.7})
                for (double pm : {0.1, 0.3}) settings.push_back({pop, ra, pc, pm, -1e-100, 0});
    PosthocResult ph;
    ph.rejected.assign(settings.size(), true);

    SUBCASE("a single accepted setting labels one cell") {
        ph.rejected[5] = false;
        ph.accepted = {5};
        const auto t = sensitivity_table(ph, settings);
        CHECK(t.labeled_cells() == 1);
        CHECK(t.label(settings[5].p_m, 0.7, settings[5].r_a) == "20");
        CHECK(t.label(0.1, 0.7, 8.0) == "-");
        CHECK(t.r_as == std::vector<double>{1.0, 8.0});
    }
    SUBCASE("full acceptance lists every population size") {
        ph.rejected.assign(settings.size(), false);
        for (std::size_t j = 0; j < settings.size(); ++j) ph.accepted.push_back(j);
        const auto t = sensitivity_table(ph, settings);
        CHECK(t.labeled_cells() == 4);
        CHECK(t.label(0.3, 0.7, 8.0) == "10/20");
    }
    SUBCASE("mismatched sizes") {
        ph.rejected.pop_back();
        CHECK_THROWS_AS(sensitivity_table(ph, settings), ArgumentError);
    }
}

}
