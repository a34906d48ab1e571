#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ssa/core.hpp"
#include "ssa/error.hpp"
#include "support.hpp"

using namespace ssa;
using ssa::testing::CountingSphere;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

Spider make_spider(std::vector<double> pos, double stored_intensity = 0.0) {
    Spider s;
    s.position = pos;
    s.previous_position = pos;
    s.following = Vibration{pos, stored_intensity};
    s.mask.assign(pos.size(), 0);
    return s;
}

// Reference selection rule written out independently.
std::pair<double, std::uint64_t> reference_select(double stored, std::uint64_t d_in, const std::vector<double>& received) {
    double best = received[0];
    for (double r : received) best = std::max(best, r);
    if (best > stored) return {best, 0};
    return {stored, d_in + 1};
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("source intensity examples") {
    CHECK(source_intensity(0.0, -1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(source_intensity(9.0, -1.0) == doctest::Approx(std::log(1.1)).epsilon(1e-15));
    CHECK(source_intensity(9.0, -1.0) == doctest::Approx(0.095310).epsilon(1e-5));
}

TEST_CASE("source intensity near the optimum against a 50-digit oracle") {
    const big f("1e-73");
    const big c("-1e-100");
    const big expected = boost::multiprecision::log(big(1) / (f - c) + big(1));
    const double got = source_intensity(1e-73, -1e-100);
    CHECK(std::fabs(got - expected.convert_to<double>()) <= 1e-14 * got);
    CHECK(got == doctest::Approx(168.09).epsilon(1e-3));
}

TEST_CASE("source intensity rejects fitness at or below C") {
    CHECK_THROWS_AS(source_intensity(-1.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(source_intensity(-2.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(source_intensity(NAN, -1.0), ArgumentError);
}

TEST_CASE("source intensity is strictly decreasing and positive") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> e(-80.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        double a = std::pow(10.0, e(gen));
        double b = std::pow(10.0, e(gen));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const double ia = source_intensity(a, -1e-100);
        const double ib = source_intensity(b, -1e-100);
        CHECK(ia > ib);
        CHECK(ib > 0.0);
    }
}

TEST_CASE("mean dimension stddev examples") {
    std::vector<std::vector<double>> same{{0, 0}, {0, 0}};
    CHECK(mean_dimension_stddev(same) == 0.0);
    std::vector<std::vector<double>> pm{{1, 1}, {-1, -1}};
    CHECK(mean_dimension_stddev(pm) == 1.0);

    std::vector<std::vector<double>> three{{0, 0}, {1, 2}, {2, 4}};
    // two-pass population stddev per column in long double
    long double total = 0.0L;
    for (int d = 0; d < 2; ++d) {
        long double m = 0.0L;
        for (const auto& p : three) m += p[d];
        m /= 3.0L;
        long double ss = 0.0L;
        for (const auto& p : three) ss += (p[d] - m) * (p[d] - m);
        total += std::sqrt(ss / 3.0L);
    }
    CHECK(mean_dimension_stddev(three) == doctest::Approx(static_cast<double>(total / 2.0L)).epsilon(1e-15));
}

TEST_CASE("mean dimension stddev rejects bad input") {
    std::vector<std::vector<double>> one{{1, 2}};
    CHECK_THROWS_AS(mean_dimension_stddev(one), ArgumentError);
    std::vector<std::vector<double>> ragged{{1, 2}, {1}};
    CHECK_THROWS_AS(mean_dimension_stddev(ragged), ArgumentError);
}

TEST_CASE("attenuation examples") {
    CHECK(attenuated_intensity(5.0, 0.0, 1.3, 2.0) == 5.0);
    CHECK(attenuated_intensity(1.0, 2.5 * 0.4, 2.5, 0.4) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(attenuated_intensity(2.0, 3.0, 1.5, 1.0) == doctest::Approx(0.270671).epsilon(1e-6));
    CHECK(attenuated_intensity(2.0, 3.0, 1.5, 1.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("attenuation with a collapsed population") {
    CHECK(attenuated_intensity(3.0, 0.0, 0.0, 1.0) == 3.0);
    CHECK(attenuated_intensity(3.0, 1e-20, 0.0, 1.0) == 0.0);
}

TEST_CASE("attenuation is strictly decreasing in distance") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double inten = 0.1 + 10.0 * u(gen);
        const double sigma = 0.5 + 5.0 * u(gen);
        const double ra = 0.2 + 8.0 * u(gen);
        const double d1 = 10.0 * u(gen);
        const double d2 = d1 + 0.01 + u(gen);
        const double a1 = attenuated_intensity(inten, d1, sigma, ra);
        const double a2 = attenuated_intensity(inten, d2, sigma, ra);
        CHECK(a1 > a2);
        CHECK(a1 <= inten);
    }
}

TEST_CASE("following vibration selection examples") {
    const std::vector<double> src{5.0, 6.0};
    SUBCASE("stronger received vibration replaces the stored one") {
        Spider s = make_spider({0, 0}, 0.5);
        s.inactive_degree = 4;
        std::vector<Vibration> rec{{src, 0.7}};
        select_following_vibration(s, rec);
        CHECK(s.following.intensity == 0.7);
        CHECK(s.following.source_position == src);
        CHECK(s.inactive_degree == 0);
    }
    SUBCASE("weaker received vibration keeps the stored one") {
        Spider s = make_spider({0, 0}, 0.9);
        s.inactive_degree = 2;
        std::vector<Vibration> rec{{src, 0.7}};
        select_following_vibration(s, rec);
        CHECK(s.following.intensity == 0.9);
        CHECK(s.inactive_degree == 3);
    }
    SUBCASE("a tie keeps the stored vibration") {
        Spider s = make_spider({0, 0}, 0.7);
        std::vector<Vibration> rec{{src, 0.7}};
        select_following_vibration(s, rec);
        CHECK(s.following.source_position == std::vector<double>{0, 0});
        CHECK(s.inactive_degree == 1);
    }
    SUBCASE("received ties go to the lowest index") {
        std::vector<Vibration> rec{{{1, 1}, 0.3}, {{2, 2}, 0.8}, {{3, 3}, 0.8}};
        CHECK(strongest_vibration(rec) == 1);
        Spider s = make_spider({0, 0}, 0.0);
        select_following_vibration(s, rec);
        CHECK(s.following.source_position == std::vector<double>{2, 2});
    }
    SUBCASE("empty list") {
        Spider s = make_spider({0, 0});
        std::vector<Vibration> none;
        CHECK_THROWS_AS(select_following_vibration(s, none), ArgumentError);
    }
}

TEST_CASE("selection matches the reference rule over all small cases") {
    const double levels[] = {0.0, 0.25, 0.5, 1.0};
    for (double stored : levels) {
        for (double a : levels) {
            for (double b : levels) {
                for (double c : levels) {
                    Spider s = make_spider({0.0}, stored);
                    s.inactive_degree = 7;
                    std::vector<Vibration> rec{{{1.0}, a}, {{2.0}, b}, {{3.0}, c}};
                    select_following_vibration(s, rec);
                    const auto [want_i, want_d] = reference_select(stored, 7, {a, b, c});
                    CHECK(s.following.intensity == want_i);
                    CHECK(s.inactive_degree == want_d);
                    if (want_d == 0) {
                        const double src = a == want_i ? 1.0 : (b == want_i ? 2.0 : 3.0);
                        CHECK(s.following.source_position[0] == src);
                    }
                }
            }
        }
    }
}

TEST_CASE("selection is invariant to a common intensity scale") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<Vibration> rec;
        for (int j = 0; j < 12; ++j) rec.push_back({{static_cast<double>(j)}, u(gen)});
        const std::size_t base = strongest_vibration(rec);
        for (double scale : {1.0 / std::log(2.0), 1.0 / std::log(10.0), 3.7}) {
            auto scaled = rec;
            for (auto& v : scaled) v.intensity *= scale;
            CHECK(strongest_vibration(scaled) == base);
        }
    }
}

TEST_CASE("mask never changes at inactive degree zero") {
    Rng rng(1);
    Spider s = make_spider(std::vector<double>(6, 0.0));
    s.mask = {1, 0, 1, 0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        s.inactive_degree = 0;
        update_mask(s, 0.7, 0.9, rng);
        CHECK(s.mask == std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0});
    }
}

TEST_CASE("mask change frequency is 1 - p_c at inactive degree one") {
    Rng rng(2);
    const int trials = 100000;
    int changed = 0;
    for (int i = 0; i < trials; ++i) {
        Spider s = make_spider(std::vector<double>(4, 0.0));
        s.inactive_degree = 1;
        update_mask(s, 0.7, 0.5, rng);
        changed += s.inactive_degree == 0;
    }
    const double rate = static_cast<double>(changed) / trials;
    CHECK(std::fabs(rate - 0.3) < 4.0 * std::sqrt(0.21 / trials));
}

TEST_CASE("an all-zero redraw is repaired to exactly one bit") {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        Spider s = make_spider(std::vector<double>(4, 0.0));
        s.inactive_degree = 200;
        update_mask(s, 0.1, 1e-12, rng);
        CHECK(std::accumulate(s.mask.begin(), s.mask.end(), 0) == 1);
        CHECK(s.inactive_degree == 0);
    }
}

TEST_CASE("mask popcount is at least one after every redraw") {
    Rng rng(4);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 5000; ++i) {
        Spider s = make_spider(std::vector<double>(1 + i % 9, 0.0));
        s.inactive_degree = 1 + i % 5;
        update_mask(s, u(gen), u(gen), rng);
        if (s.inactive_degree == 0) CHECK(std::accumulate(s.mask.begin(), s.mask.end(), 0) >= 1);
    }
}

TEST_CASE("following position examples") {
    Rng rng(5);
    SUBCASE("zero mask copies the target") {
        Spider s = make_spider({0, 0, 0});
        s.following.source_position = {4, 5, 6};
        std::vector<Spider> pop{make_spider({9, 9, 9})};
        CHECK(generate_following_position(s, pop, rng) == std::vector<double>{4, 5, 6});
    }
    SUBCASE("full mask with one candidate copies it") {
        Spider s = make_spider({0, 0});
        s.following.source_position = {4, 5};
        s.mask = {1, 1};
        std::vector<Spider> pop{make_spider({7, 8})};
        CHECK(generate_following_position(s, pop, rng) == std::vector<double>{7, 8});
    }
    SUBCASE("per-dimension composition") {
        Spider s = make_spider({0, 0});
        s.following.source_position = {5, 6};
        s.mask = {1, 0};
        std::vector<Spider> pop{make_spider({9, 9})};
        CHECK(generate_following_position(s, pop, rng) == std::vector<double>{9, 6});
    }
}

TEST_CASE("reflection") {
    CHECK(reflect_into(1.2, -1.0, 1.0) == doctest::Approx(0.8));
    CHECK(reflect_into(-1.5, -1.0, 1.0) == doctest::Approx(-0.5));
    CHECK(reflect_into(0.3, -1.0, 1.0) == 0.3);
    CHECK(reflect_into(1.0, -1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(reflect_into(INFINITY, -1.0, 1.0), NumericError);
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double x = reflect_into(u(gen), -5.12, 5.12);
        CHECK((x >= -5.12 && x <= 5.12));
    }
}

TEST_CASE("random walk examples") {
    SearchBox box{{-1.0}, {1.0}};
    SUBCASE("no displacement when every term vanishes") {
        Spider s = make_spider({0.25});
        Rng rng(7);
        random_walk(s, std::vector<double>{0.25}, box, rng);
        CHECK(s.position[0] == 0.25);
        CHECK(s.previous_position[0] == 0.25);
    }
    SUBCASE("single-term walk moves by R toward the target") {
        Spider s = make_spider({0.0});
        Rng rng(8);
        Rng replay = rng;
        replay.uniform();  // r
        const double big_r = replay.uniform();
        random_walk(s, std::vector<double>{1.0}, box, rng);
        CHECK(s.position[0] == big_r);
        CHECK(s.previous_position[0] == 0.0);
    }
    SUBCASE("non-finite arithmetic aborts") {
        Spider s = make_spider({0.0});
        Rng rng(9);
        CHECK_THROWS_AS(random_walk(s, std::vector<double>{INFINITY}, box, rng), NumericError);
    }
}

TEST_CASE("step accounting, monotone best and containment") {
    CountingSphere problem(10, 5.0);
    SsaParams p;
    p.seed = 42;
    SsaOptimizer opt(p, problem);
    double prev_best = INFINITY;
    for (int it = 1; it <= 200; ++it) {
        opt.step();
        const auto& st = opt.state();
        CHECK(st.fe_count == static_cast<std::uint64_t>(it) * 30);
        CHECK(st.iteration == static_cast<std::uint64_t>(it));
        CHECK(st.best_fitness <= prev_best);
        prev_best = st.best_fitness;
        for (const auto& s : st.spiders) CHECK(problem.box().contains(s.position));
    }
    CHECK(problem.calls == 200u * 30u);
}

TEST_CASE("identical seeds give identical states") {
    CountingSphere problem(8, 3.0);
    SsaParams p;
    p.pop_size = 12;
    p.seed = 77;
    SsaOptimizer a(p, problem), b(p, problem);
    for (int i = 0; i < 50; ++i) {
        a.step();
        b.step();
    }
    CHECK(a.state().rng == b.state().rng);
    CHECK(a.state().best_fitness == b.state().best_fitness);
    for (std::size_t i = 0; i < a.state().spiders.size(); ++i) {
        CHECK(a.state().spiders[i].position == b.state().spiders[i].position);
        CHECK(a.state().spiders[i].mask == b.state().spiders[i].mask);
    }
}

TEST_CASE("optimize checkpoint grid") {
    CountingSphere problem(30, 100.0);
    SsaParams p;
    p.seed = 1;
    const auto rec = optimize(p, problem, 300000, 3000);
    CHECK(rec.checkpoints.size() == 100);
    CHECK(rec.iterations == 10000);
    CHECK(rec.fes_used == 300000);
    for (std::size_t c = 0; c < rec.checkpoints.size(); ++c) {
        CHECK(rec.checkpoints[c].fe == (c + 1) * 3000);
        if (c > 0) CHECK(rec.checkpoints[c].best_fitness <= rec.checkpoints[c - 1].best_fitness);
    }
    CHECK(rec.final_best == rec.checkpoints.back().best_fitness);

    const auto one = optimize(p, problem, 3000, 3000);
    CHECK(one.checkpoints.size() == 1);
}

TEST_CASE("optimize carries the last value past the final iteration") {
    CountingSphere problem(4, 1.0);
    SsaParams p;
    p.seed = 3;
    const auto rec = optimize(p, problem, 100, 10);
    CHECK(rec.iterations == 3);
    CHECK(rec.fes_used == 90);
    REQUIRE(rec.checkpoints.size() == 10);
    for (std::size_t c = 8; c < 10; ++c) CHECK(rec.checkpoints[c].best_fitness == rec.final_best);
    CHECK(rec.checkpoints[9].fe == 100);
}

TEST_CASE("invalid parameters fail before any evaluation") {
    CountingSphere problem(4, 1.0);
    auto bad = [&](auto mutate) {
        SsaParams p;
        mutate(p);
        CHECK_THROWS_AS(optimize(p, problem, 3000, 3000), ConfigError);
    };
    bad([](SsaParams& p) { p.pop_size = 1; });
    bad([](SsaParams& p) { p.r_a = 0.0; });
    bad([](SsaParams& p) { p.p_c = 1.0; });
    bad([](SsaParams& p) { p.p_m = 0.0; });
    bad([](SsaParams& p) { p.intensity_floor_c = 0.0; });
    SsaParams ok;
    CHECK_THROWS_AS(optimize(ok, problem, 20, 10), ConfigError);
    CHECK_THROWS_AS(optimize(ok, problem, 3000, 7), ConfigError);
    CHECK(problem.calls == 0);
}

TEST_CASE("rng index draws stay in range") {
    Rng rng(10);
    for (std::size_t n : {1u, 2u, 3u, 7u, 30u, 1000u}) {
        for (int i = 0; i < 1000; ++i) CHECK(rng.below(n) < n);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

}
