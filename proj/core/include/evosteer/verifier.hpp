#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evosteer/envsim.hpp"
#include "evosteer/linalg.hpp"
#include "evosteer/reward_dsl.hpp"

namespace evosteer {

/// One critic interaction, rendered as deterministic text. The history H_t
/// handed to the critic is the ordered sequence of prior exchanges.
struct Exchange {
  std::string kind;  // "objective" | "reflect" | "reprompt"
  std::string summary;
};
using History = std::vector<Exchange>;

/// Structured reasoning request covering the four staged sections:
/// goal confirmation, scenario understanding, embodied augmentation,
/// objective generation. Identical content for stub and remote backends.
struct SteeringRequest {
  std::string instruction;
  Vec observation;
  std::vector<std::pair<std::string, Vec2>> keypoints;
  std::array<std::string, 4> stages;
  History history;
};

struct ObjectiveReply {
  std::string program_text;
  std::string rationale;
};

struct ReflectRequest {
  Vec a0;      // first proposal of the episode
  Vec a_star;  // executed action
  Vec post_observation;
  std::vector<std::pair<std::string, Vec2>> keypoints;
  History history;
};

struct ReflectReply {
  bool success = false;
  std::optional<std::string> revised_program;
  std::string rationale;
};

/// Critic backend interface. Implementations: StubCritic (deterministic,
/// in-process) and RemoteCritic (HTTP, see verifier_http.hpp).
class Critic {
 public:
  virtual ~Critic() = default;
  virtual ObjectiveReply objective(const SteeringRequest& request) = 0;
  virtual ReflectReply reflect(const ReflectRequest& request) = 0;
};

/// Deterministic decision rules shared by the stub backend and the bundled
/// mock server, so both speak the same contract.
namespace critic_rules {

/// Longest keypoint name occurring verbatim in the text; empty if none.
std::string match_target(const std::string& text,
                         const std::vector<std::pair<std::string, Vec2>>& keypoints);

/// Reward program text for the instruction. With `mislabel_first` set the
/// first objective of an episode (no reflect exchange in the history yet)
/// deliberately targets a different goal; used by mis-specification
/// fixtures.
std::string objective_program(const std::string& instruction,
                              const std::vector<std::pair<std::string, Vec2>>& keypoints,
                              const History& history, bool mislabel_first);

struct ReflectDecision {
  bool success = false;
  std::optional<std::string> revised_program;
};

/// Geometric verdict: success iff the executed action lies within the
/// success radius of the instructed goal (read from the last objective
/// exchange). A revision is attached only when the reward targeted a
/// different object than the instruction.
ReflectDecision reflect_decision(const Vec& a_star,
                                 const std::vector<std::pair<std::string, Vec2>>& keypoints,
                                 double success_radius, const History& history);

}  // namespace critic_rules

/// In-process critic: a pure function of the request. Bitwise-reproducible
/// programs and verdicts.
class StubCritic : public Critic {
 public:
  struct Options {
    double success_radius = 0.15;
    bool mislabel_first_objective = false;
  };

  explicit StubCritic(Options options = {}) : options_(options) {}

  ObjectiveReply objective(const SteeringRequest& request) override;
  ReflectReply reflect(const ReflectRequest& request) override;

 private:
  Options options_;
};

/// Renders the staged reasoning request for a task context.
SteeringRequest render_request(const TaskContext& ctx, const History& history);

struct ReasonResult {
  dsl::RewardProgram program;
  int attempts = 1;  // backend calls used (1 + re-prompts)
};

/// Obtains a parsed, scope-checked reward program from the backend. Invalid
/// replies are re-prompted up to twice; the third consecutive failure raises
/// CriticError carrying the last response text. Appends one objective
/// exchange to `history` on success.
ReasonResult reason_objective(const TaskContext& ctx, Critic& critic, History& history);

struct ReflectionRecord {
  Vec a0;
  Vec a_star;
  bool verdict = false;
  std::optional<dsl::RewardProgram> revised;
  int attempts = 1;
};

/// Post-execution reflection over (a0, a*, c̄_t, H_t). A revised program, if
/// any, is parse- and scope-validated with the same re-prompt budget.
/// Appends one reflect exchange to `history`.
ReflectionRecord reflect_episode(const TaskContext& post_ctx, const Vec& a0,
                                 const Vec& a_star, Critic& critic, History& history);

/// Records the program actually used in a round (kept in the history so the
/// critic can judge reward consistency later).
void record_objective_exchange(History& history, const std::string& instruction,
                               const dsl::RewardProgram& prog);

}  // namespace evosteer
