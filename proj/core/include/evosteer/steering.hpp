#pragma once

#include <cstdint>
#include <vector>

#include "evosteer/diffusion.hpp"
#include "evosteer/linalg.hpp"
#include "evosteer/reward_dsl.hpp"
#include "evosteer/rng.hpp"

namespace evosteer {

struct SteeringConfig {
  int population = 32;      // M
  int iterations = 10;      // K evolutionary iterations (0 = selection only)
  double tau = 5.0;         // softmax temperature
  int truncation = 10;      // n, diffuse-denoise truncation depth
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;       // namespace for concurrent steer() calls
  bool record_populations = false;   // keep every generation for diagnostics
  bool track_incumbent = false;      // best-across-generations diagnostic
};

/// Proposal set A^k with parallel scores and resampling provenance.
struct Population {
  std::vector<Vec> members;
  Vec scores;                 // empty until scored; |scores| == |members| after
  int generation = 0;
  std::vector<int> parents;   // member i resampled from parents[i] (gen > 0)

  bool scored() const { return !members.empty() && scores.size() == members.size(); }
  int size() const { return static_cast<int>(members.size()); }
};

struct GenerationStats {
  double best = 0.0;
  double mean = 0.0;
};

struct SteeringResult {
  Vec best_action;            // argmax over the final generation, ties by index
  double best_score = 0.0;
  int best_index = 0;
  std::vector<GenerationStats> trace;  // generations 0..K
  Vec first_proposal;                  // member 0 of generation 0 (the a0 record)
  std::vector<Population> populations; // only if record_populations
  Vec incumbent_action;                // only if track_incumbent
  double incumbent_score = 0.0;
  std::uint64_t seed = 0;              // rng accounting for replay
  std::uint64_t stream_id = 0;
};

/// M independent policy samples on distinct substreams; generation 0,
/// unscored.
Population propose(const DenoiserModel& model, const Vec& context, int m, RngStream& rng);

/// Fills scores by evaluating the program with "action" bound per member.
/// Writes are member-indexed, so any worker count produces identical scores.
void score_population(Population& pop, const dsl::RewardProgram& prog,
                      const dsl::Scope& base_scope, int workers = 1);

/// M i.i.d. draws (with replacement) from softmax(scores, tau).
std::vector<int> select_elite_indices(const Population& pop, double tau, RngStream& rng);

/// Truncated diffuse-denoise mutation of the selected elites; returns the
/// next generation (same size, provenance recorded).
Population mutate(const Population& pop, const std::vector<int>& elites,
                  const DenoiserModel& model, const Vec& context, int truncation,
                  RngStream& rng);

/// Full evolutionary steering loop:
/// propose -> [score -> select -> mutate] x K -> final score -> argmax.
SteeringResult steer(const DenoiserModel& model, const Vec& context,
                     const dsl::RewardProgram& prog, const dsl::Scope& base_scope,
                     const SteeringConfig& cfg);

}  // namespace evosteer
