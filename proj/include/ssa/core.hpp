#pragma once
// Social Spider Algorithm: population state, vibration mechanics and the
// per-iteration loop (evaluate, vibrate, change masks, random walk).

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace ssa {

// Control parameters of one run.
struct SsaParams {
    int pop_size = 30;
    double r_a = 1.0;
    double p_c = 0.7;
    double p_m = 0.1;
    // Constant C in the intensity formula; must lie below the objective infimum.
    double intensity_floor_c = -1e-100;
    std::uint64_t seed = 0;
};

// Throws ConfigError when a parameter is outside its admissible range or C is
// not strictly below `problem_infimum`.
void validate(const SsaParams& params, double problem_infimum);

struct SearchBox {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const { return lower.size(); }
    bool contains(std::span<const double> x) const;
};

// Objective interface consumed by the optimizer. Implementations must be
// safe to evaluate concurrently from several runs.
class Problem {
public:
    virtual ~Problem() = default;
    virtual std::size_t dimension() const = 0;
    virtual const SearchBox& box() const = 0;
    virtual double infimum() const = 0;
    virtual double evaluate(std::span<const double> x) const = 0;
};

struct Vibration {
    std::vector<double> source_position;
    double intensity = 0.0;
};

struct Spider {
    std::vector<double> position;
    double fitness = std::numeric_limits<double>::infinity();
    std::vector<double> previous_position;
    Vibration following;
    std::uint64_t inactive_degree = 0;
    std::vector<std::uint8_t> mask;
};

// mt19937_64 with platform-independent conversions to reals and indices.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    bool bernoulli(double p) { return uniform() < p; }

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

struct SsaState {
    std::vector<Spider> spiders;
    std::uint64_t iteration = 0;
    std::uint64_t fe_count = 0;
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    Rng rng{0};
};

// ---------------------------------------------------------------------------
// Vibration mechanics

// log(1 / (fitness - c) + 1). Throws ArgumentError unless fitness > c.
double source_intensity(double fitness, double c);

// Mean over dimensions of the population standard deviation of each coordinate.
double mean_dimension_stddev(std::span<const std::vector<double>> positions);

// Lower clamp applied to the mean standard deviation before dividing by it.
inline constexpr double kMinSigma = 1e-30;

// intensity * exp(-distance / (max(sigma_bar, kMinSigma) * r_a)).
double attenuated_intensity(double intensity, double distance, double sigma_bar, double r_a);

// Index of the strongest vibration; the lowest index wins ties.
std::size_t strongest_vibration(std::span<const Vibration> received);

// Keeps the stronger of the stored following vibration and `candidate`.
// A retained vibration increments the inactive degree; a replaced one resets it.
// Returns true if the spider switched to the candidate.
bool follow_if_stronger(Spider& spider, double intensity, std::span<const double> source);

// Picks the strongest received (already attenuated) vibration and applies
// follow_if_stronger. Throws ArgumentError on an empty list.
void select_following_vibration(Spider& spider, std::span<const Vibration> received);

// Each bit Bernoulli(p_m); an all-zero draw gets one uniform bit forced to 1.
void draw_mask(std::vector<std::uint8_t>& mask, double p_m, Rng& rng);

// With probability 1 - p_c^inactive_degree redraws every mask bit as
// Bernoulli(p_m), forcing one uniform bit to 1 if the draw is all zero. A
// redrawn mask resets the inactive degree to 0.
void update_mask(Spider& spider, double p_c, double p_m, Rng& rng);

// Per dimension: the following vibration's source coordinate where the mask
// bit is 0, otherwise the coordinate of a uniformly drawn population member.
std::vector<double> generate_following_position(const Spider& spider, std::span<const Spider> population,
                                                Rng& rng);

// Reflects x about the violated bound until it lies in [lo, hi].
double reflect_into(double x, double lo, double hi);

// position += r * (position - previous) + R .* (following - position), with
// one scalar r and a vector R of uniform draws, then reflection into the box.
// previous_position receives the pre-move position. Throws NumericError on
// non-finite results.
void random_walk(Spider& spider, std::span<const double> following_position, const SearchBox& box, Rng& rng);

// ---------------------------------------------------------------------------
// Driver

// Called after every function evaluation with the running FE count and the
// best-so-far fitness.
using EvaluationObserver = std::function<void(std::uint64_t fe_count, double best_fitness)>;

class SsaOptimizer {
public:
    // Validates params, scatters the population uniformly in the box and draws
    // an initial mask per spider.
    SsaOptimizer(const SsaParams& params, const Problem& problem);

    // One full iteration; consumes exactly pop_size evaluations.
    void step(const EvaluationObserver& observer = {});

    const SsaState& state() const { return state_; }
    const SsaParams& params() const { return params_; }

private:
    void evaluate_population(const EvaluationObserver& observer);
    void propagate_vibrations();

    SsaParams params_;
    const Problem* problem_;
    SsaState state_;
    std::vector<double> intensities_;
    std::vector<double> mean_buf_;
    std::vector<double> var_buf_;
    std::vector<double> distances_;
};

struct Checkpoint {
    std::uint64_t fe = 0;
    double best_fitness = 0.0;

    bool operator==(const Checkpoint&) const = default;
};

struct RunRecord {
    SsaParams params;
    std::uint64_t budget_fes = 0;
    std::uint64_t checkpoint_interval = 0;
    std::vector<Checkpoint> checkpoints;
    double final_best = std::numeric_limits<double>::infinity();
    std::vector<double> best_position;
    std::uint64_t iterations = 0;
    std::uint64_t fes_used = 0;
    double wall_time_s = 0.0;
};

inline constexpr std::uint64_t kDefaultBudget = 300'000;
inline constexpr std::uint64_t kDefaultCheckpointInterval = 3'000;

// Runs full iterations while another one fits in the budget and records the
// best-so-far fitness at every multiple of checkpoint_interval. Checkpoints
// past the last iteration carry the final value forward.
RunRecord optimize(const SsaParams& params, const Problem& problem, std::uint64_t budget_fes = kDefaultBudget,
                   std::uint64_t checkpoint_interval = kDefaultCheckpointInterval);

}  // namespace ssa
