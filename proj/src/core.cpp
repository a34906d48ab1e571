#include "ssa/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "ssa/error.hpp"
#include "ssa/kernels.hpp"

namespace ssa {

void validate(const SsaParams& params, double problem_infimum) {
    if (params.pop_size < 2) throw ConfigError("pop_size must be >= 2, got " + std::to_string(params.pop_size));
    if (!(params.r_a > 0.0) || !std::isfinite(params.r_a)) {
        throw ConfigError("r_a must be a positive finite number, got " + std::to_string(params.r_a));
    }
    if (!(params.p_c > 0.0 && params.p_c < 1.0)) throw ConfigError("p_c must lie in (0, 1), got " + std::to_string(params.p_c));
    if (!(params.p_m > 0.0 && params.p_m < 1.0)) throw ConfigError("p_m must lie in (0, 1), got " + std::to_string(params.p_m));
    if (!std::isfinite(params.intensity_floor_c) || !(params.intensity_floor_c < problem_infimum)) {
        throw ConfigError("intensity_floor_c must be finite and below the objective infimum");
    }
}

bool SearchBox::contains(std::span<const double> x) const {
    if (x.size() != lower.size()) return false;
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (!(x[d] >= lower[d] && x[d] <= upper[d])) return false;
    }
    return true;
}

std::size_t Rng::below(std::size_t n) {
    // Rejection sampling keeps the draw unbiased for any n.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
}

double source_intensity(double fitness, double c) {
    if (!std::isfinite(fitness) || !std::isfinite(c)) throw ArgumentError("source_intensity: non-finite input");
    if (!(fitness > c)) throw ArgumentError("source_intensity: fitness must exceed C (C is not below the infimum)");
    return std::log1p(1.0 / (fitness - c));
}

double mean_dimension_stddev(std::span<const std::vector<double>> positions) {
    if (positions.size() < 2) throw ArgumentError("mean_dimension_stddev: need at least two positions");
    const std::size_t dim = positions.front().size();
    if (dim == 0) throw ArgumentError("mean_dimension_stddev: zero-length positions");
    for (const auto& p : positions) {
        if (p.size() != dim) throw ArgumentError("mean_dimension_stddev: ragged positions");
    }
    const auto& k = kernels::active();
    const double n = static_cast<double>(positions.size());
    std::vector<double> mean(dim, 0.0);
    for (const auto& p : positions) k.accumulate(mean.data(), p.data(), dim);
    for (double& m : mean) m /= n;
    std::vector<double> var(dim, 0.0);
    for (const auto& p : positions) k.accumulate_sq_dev(var.data(), p.data(), mean.data(), dim);
    double total = 0.0;
    for (double v : var) total += std::sqrt(v / n);
    return total / static_cast<double>(dim);
}

double attenuated_intensity(double intensity, double distance, double sigma_bar, double r_a) {
    if (!std::isfinite(intensity) || !std::isfinite(distance) || !std::isfinite(sigma_bar) || !std::isfinite(r_a)) {
        throw ArgumentError("attenuated_intensity: non-finite input");
    }
    if (intensity < 0.0 || distance < 0.0 || sigma_bar < 0.0 || !(r_a > 0.0)) {
        throw ArgumentError("attenuated_intensity: negative input");
    }
    return intensity * std::exp(-distance / (std::max(sigma_bar, kMinSigma) * r_a));
}

std::size_t strongest_vibration(std::span<const Vibration> received) {
    if (received.empty()) throw ArgumentError("strongest_vibration: no vibrations received");
    std::size_t best = 0;
    for (std::size_t j = 1; j < received.size(); ++j) {
        if (received[j].intensity > received[best].intensity) best = j;
    }
    return best;
}

bool follow_if_stronger(Spider& spider, double intensity, std::span<const double> source) {
    if (intensity > spider.following.intensity) {
        spider.following.intensity = intensity;
        spider.following.source_position.assign(source.begin(), source.end());
        spider.inactive_degree = 0;
        return true;
    }
    ++spider.inactive_degree;
    return false;
}

void select_following_vibration(Spider& spider, std::span<const Vibration> received) {
    const Vibration& best = received[strongest_vibration(received)];
    follow_if_stronger(spider, best.intensity, best.source_position);
}

void draw_mask(std::vector<std::uint8_t>& mask, double p_m, Rng& rng) {
    bool any = false;
    for (auto& bit : mask) {
        bit = rng.bernoulli(p_m) ? 1 : 0;
        any = any || bit != 0;
    }
    if (!any && !mask.empty()) mask[rng.below(mask.size())] = 1;
}

void update_mask(Spider& spider, double p_c, double p_m, Rng& rng) {
    // One draw is consumed whatever the inactive degree.
    const double change_probability = 1.0 - std::pow(p_c, static_cast<double>(spider.inactive_degree));
    if (!(rng.uniform() < change_probability)) return;
    draw_mask(spider.mask, p_m, rng);
    spider.inactive_degree = 0;
}

std::vector<double> generate_following_position(const Spider& spider, std::span<const Spider> population,
                                                Rng& rng) {
    if (population.empty()) throw ArgumentError("generate_following_position: empty population");
    const std::size_t dim = spider.following.source_position.size();
    std::vector<double> out(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        out[d] = spider.mask[d] != 0 ? population[rng.below(population.size())].position[d]
                                     : spider.following.source_position[d];
    }
    return out;
}

double reflect_into(double x, double lo, double hi) {
    if (!std::isfinite(x)) throw NumericError("reflect_into: non-finite coordinate");
    // Points more than two widths out are folded by the reflection period first.
    const double width = hi - lo;
    if (x > hi + 2.0 * width || x < lo - 2.0 * width) {
        const double period = 2.0 * width;
        x = lo + std::fmod(std::fmod(x - lo, period) + period, period);
    }
    while (x < lo || x > hi) {
        if (x > hi) x = 2.0 * hi - x;
        if (x < lo) x = 2.0 * lo - x;
    }
    return x;
}

void random_walk(Spider& spider, std::span<const double> following_position, const SearchBox& box, Rng& rng) {
    const std::size_t dim = spider.position.size();
    const double r = rng.uniform();
    std::vector<double> next(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double x = spider.position[d];
        const double v = x + r * (x - spider.previous_position[d]) + rng.uniform() * (following_position[d] - x);
        if (!std::isfinite(v)) throw NumericError("random_walk: non-finite position in dimension " + std::to_string(d));
        next[d] = reflect_into(v, box.lower[d], box.upper[d]);
    }
    spider.previous_position = std::move(spider.position);
    spider.position = std::move(next);
}

SsaOptimizer::SsaOptimizer(const SsaParams& params, const Problem& problem)
    : params_(params), problem_(&problem) {
    validate(params_, problem.infimum());
    const SearchBox& box = problem.box();
    const std::size_t dim = problem.dimension();
    if (dim == 0 || box.dimension() != dim) throw ConfigError("problem dimension does not match its search box");

    state_.rng = Rng(params_.seed);
    state_.spiders.resize(static_cast<std::size_t>(params_.pop_size));
    for (Spider& s : state_.spiders) {
        s.position.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            s.position[d] = box.lower[d] + state_.rng.uniform() * (box.upper[d] - box.lower[d]);
        }
        s.previous_position = s.position;
        s.following = Vibration{s.position, 0.0};
        s.inactive_degree = 0;
    }
    for (Spider& s : state_.spiders) {
        s.mask.assign(dim, 0);
        draw_mask(s.mask, params_.p_m, state_.rng);
    }
    intensities_.resize(state_.spiders.size());
    mean_buf_.resize(dim);
    var_buf_.resize(dim);
}

void SsaOptimizer::evaluate_population(const EvaluationObserver& observer) {
    for (Spider& s : state_.spiders) {
        s.fitness = problem_->evaluate(s.position);
        if (!std::isfinite(s.fitness)) throw NumericError("objective returned a non-finite value");
        ++state_.fe_count;
        if (s.fitness < state_.best_fitness) {
            state_.best_fitness = s.fitness;
            state_.best_position = s.position;
        }
        if (observer) observer(state_.fe_count, state_.best_fitness);
    }
}

void SsaOptimizer::propagate_vibrations() {
    auto& spiders = state_.spiders;
    const std::size_t n = spiders.size();
    const std::size_t dim = problem_->dimension();
    const auto& k = kernels::active();

    for (std::size_t j = 0; j < n; ++j) {
        intensities_[j] = source_intensity(spiders[j].fitness, params_.intensity_floor_c);
    }

    std::fill(mean_buf_.begin(), mean_buf_.end(), 0.0);
    for (const Spider& s : spiders) k.accumulate(mean_buf_.data(), s.position.data(), dim);
    for (double& m : mean_buf_) m /= static_cast<double>(n);
    std::fill(var_buf_.begin(), var_buf_.end(), 0.0);
    for (const Spider& s : spiders) k.accumulate_sq_dev(var_buf_.data(), s.position.data(), mean_buf_.data(), dim);
    double sigma_bar = 0.0;
    for (double v : var_buf_) sigma_bar += std::sqrt(v / static_cast<double>(n));
    sigma_bar /= static_cast<double>(dim);
    const double scale = std::max(sigma_bar, kMinSigma) * params_.r_a;

    // All spiders receive the vibrations of the same population snapshot, so
    // the best source is resolved for everyone before any following vibration
    // changes.
    distances_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = k.l1_distance(spiders[i].position.data(), spiders[j].position.data(), dim);
            distances_[i * n + j] = d;
            distances_[j * n + i] = d;
        }
    }
    std::vector<std::size_t> best_source(n);
    std::vector<double> best_intensity(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_att = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = distances_[i * n + j];
            const double att = intensities_[j] * std::exp(-d / scale);
            if (att > best_att) {
                best_att = att;
                best = j;
            }
        }
        best_source[i] = best;
        best_intensity[i] = best_att;
    }
    for (std::size_t i = 0; i < n; ++i) {
        follow_if_stronger(spiders[i], best_intensity[i], spiders[best_source[i]].position);
    }
}

void SsaOptimizer::step(const EvaluationObserver& observer) {
    evaluate_population(observer);
    propagate_vibrations();

    Rng& rng = state_.rng;
    for (Spider& s : state_.spiders) update_mask(s, params_.p_c, params_.p_m, rng);

    std::vector<std::vector<double>> following(state_.spiders.size());
    for (std::size_t i = 0; i < state_.spiders.size(); ++i) {
        following[i] = generate_following_position(state_.spiders[i], state_.spiders, rng);
    }
    const SearchBox& box = problem_->box();
    for (std::size_t i = 0; i < state_.spiders.size(); ++i) random_walk(state_.spiders[i], following[i], box, rng);

    ++state_.iteration;
}

RunRecord optimize(const SsaParams& params, const Problem& problem, std::uint64_t budget_fes,
                   std::uint64_t checkpoint_interval) {
    validate(params, problem.infimum());
    const auto pop = static_cast<std::uint64_t>(params.pop_size);
    if (budget_fes < pop) throw ConfigError("budget_fes must be at least pop_size");
    if (checkpoint_interval == 0 || budget_fes % checkpoint_interval != 0) {
        throw ConfigError("checkpoint_interval must be positive and divide budget_fes");
    }

    const auto started = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.params = params;
    rec.budget_fes = budget_fes;
    rec.checkpoint_interval = checkpoint_interval;
    const std::uint64_t n_checkpoints = budget_fes / checkpoint_interval;
    rec.checkpoints.reserve(n_checkpoints);

    SsaOptimizer opt(params, problem);
    const EvaluationObserver observer = [&](std::uint64_t fe, double best) {
        if (fe % checkpoint_interval == 0) rec.checkpoints.push_back({fe, best});
    };
    while (opt.state().fe_count + pop <= budget_fes) opt.step(observer);

    const SsaState& st = opt.state();
    while (rec.checkpoints.size() < n_checkpoints) {
        rec.checkpoints.push_back({(rec.checkpoints.size() + 1) * checkpoint_interval, st.best_fitness});
    }
    rec.final_best = st.best_fitness;
    rec.best_position = st.best_position;
    rec.iterations = st.iteration;
    rec.fes_used = st.fe_count;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

}  // namespace ssa
