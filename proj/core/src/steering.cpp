#include "evosteer/steering.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {

// Substream labels inside one steer() call. Members get label + index so the
// same draws happen regardless of evaluation order.
constexpr std::uint64_t kProposeLabel = 0x01'000000;
constexpr std::uint64_t kSelectLabel = 0x02'000000;
constexpr std::uint64_t kMutateLabel = 0x03'000000;

void check_scored(const Population& pop, const char* op) {
  if (!pop.scored()) throw Error(std::string(op) + ": unscored population");
}

GenerationStats stats_of(const Population& pop) {
  GenerationStats s;
  s.best = *std::max_element(pop.scores.begin(), pop.scores.end());
  s.mean = mean(pop.scores);
  return s;
}

int argmax_lowest_index(const Vec& scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

}  // namespace

Population propose(const DenoiserModel& model, const Vec& context, int m, RngStream& rng) {
  if (m < 1) throw Error("propose: population size must be >= 1");
  const std::uint64_t nonce = rng.next_u64();
  Population pop;
  pop.generation = 0;
  pop.members.resize(m);
  for (int i = 0; i < m; ++i) {
    RngStream member_rng = rng.substream(mix64(nonce, kProposeLabel + i));
    pop.members[i] = sample(model, context, member_rng);
  }
  return pop;
}

void score_population(Population& pop, const dsl::RewardProgram& prog,
                      const dsl::Scope& base_scope, int workers) {
  if (pop.members.empty()) throw Error("score: empty population");
  pop.scores.assign(pop.members.size(), 0.0);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    dsl::Scope scope = base_scope;
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= pop.size() || failed.load()) break;
      try {
        scope["action"] = pop.members[i];
        pop.scores[i] = dsl::evaluate(prog, scope);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed.exchange(true))
          failure = "score: member " + std::to_string(i) + ": " + e.what();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, pop.size());
    pool.reserve(count);
    for (int w = 0; w < count; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw Error(failure);
  require_finite(pop.scores, "population scores");
}

std::vector<int> select_elite_indices(const Population& pop, double tau, RngStream& rng) {
  check_scored(pop, "select_elites");
  const Vec q = softmax(pop.scores, tau);

  Vec cumulative(q.size());
  double running = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    running += q[i];
    cumulative[i] = running;
  }
  cumulative.back() = 1.0;

  const int m = pop.size();
  std::vector<int> elites(m);
  for (int i = 0; i < m; ++i) {
    const double u = rng.next_uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    elites[i] = static_cast<int>(std::min<std::ptrdiff_t>(
        it - cumulative.begin(), static_cast<std::ptrdiff_t>(m - 1)));
  }
  return elites;
}

Population mutate(const Population& pop, const std::vector<int>& elites,
                  const DenoiserModel& model, const Vec& context, int truncation,
                  RngStream& rng) {
  if (elites.empty()) throw Error("mutate: empty elite set");
  if (truncation < 1 || truncation > model.schedule.steps)
    throw Error("mutate: truncation depth out of range");
  for (int e : elites)
    if (e < 0 || e >= pop.size()) throw Error("mutate: elite index out of range");

  const std::uint64_t nonce = rng.next_u64();
  Population next;
  next.generation = pop.generation + 1;
  next.members.resize(elites.size());
  next.parents.assign(elites.begin(), elites.end());
  for (std::size_t i = 0; i < elites.size(); ++i) {
    RngStream member_rng = rng.substream(mix64(nonce, kMutateLabel + i));
    const Vec noised = forward_noise(pop.members[elites[i]], truncation,
                                     model.schedule, member_rng);
    next.members[i] = denoise_from(model, noised, truncation, context, member_rng);
  }
  return next;
}

SteeringResult steer(const DenoiserModel& model, const Vec& context,
                     const dsl::RewardProgram& prog, const dsl::Scope& base_scope,
                     const SteeringConfig& cfg) {
  if (cfg.population < 1) throw ConfigError("steer: population must be >= 1");
  if (cfg.iterations < 0) throw ConfigError("steer: iterations must be >= 0");
  if (!(cfg.tau >= 0.0)) throw ConfigError("steer: tau must be >= 0");
  if (cfg.truncation < 1 || cfg.truncation > model.schedule.steps)
    throw ConfigError("steer: truncation depth out of range");

  RngStream rng(cfg.seed, cfg.stream_id);
  SteeringResult result;
  result.seed = cfg.seed;
  result.stream_id = cfg.stream_id;

  Population pop = propose(model, context, cfg.population, rng);
  result.first_proposal = pop.members.front();
  score_population(pop, prog, base_scope);
  result.trace.push_back(stats_of(pop));

  auto note_incumbent = [&](const Population& p) {
    const int idx = argmax_lowest_index(p.scores);
    if (result.incumbent_action.empty() || p.scores[idx] > result.incumbent_score) {
      result.incumbent_action = p.members[idx];
      result.incumbent_score = p.scores[idx];
    }
  };
  if (cfg.track_incumbent) note_incumbent(pop);
  if (cfg.record_populations) result.populations.push_back(pop);

  for (int k = 1; k <= cfg.iterations; ++k) {
    RngStream select_rng = rng.substream(mix64(kSelectLabel, k));
    const std::vector<int> elites = select_elite_indices(pop, cfg.tau, select_rng);
    pop = mutate(pop, elites, model, context, cfg.truncation, rng);
    score_population(pop, prog, base_scope);
    result.trace.push_back(stats_of(pop));
    if (cfg.track_incumbent) note_incumbent(pop);
    if (cfg.record_populations) result.populations.push_back(pop);
  }

  // a* = argmax over the final generation only, ties broken by lowest index.
  result.best_index = argmax_lowest_index(pop.scores);
  result.best_action = pop.members[result.best_index];
  result.best_score = pop.scores[result.best_index];
  return result;
}

}  // namespace evosteer
