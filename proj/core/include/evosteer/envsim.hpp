#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "evosteer/diffusion.hpp"
#include "evosteer/gmm.hpp"
#include "evosteer/linalg.hpp"
#include "evosteer/reward_dsl.hpp"
#include "evosteer/rng.hpp"

namespace evosteer {

inline constexpr double kWorkspaceBound = 2.0;  // workspace is [-2, 2]^2

enum class EnvKind { two_goal, ring_goals, narrow_gap };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec as_vec() const { return {x, y}; }
};

/// Static 2D scene: named object positions, end-effector start, and the set
/// of objects that may be designated as steering goals.
struct Scene {
  std::vector<std::pair<std::string, Vec2>> objects;  // stable order
  std::vector<std::string> goal_names;
  Vec2 ee_start;
  double success_radius = 0.15;

  const Vec2& object(const std::string& name) const;
  bool has_object(const std::string& name) const;
};

struct Instruction {
  EnvKind task = EnvKind::two_goal;
  std::string target;  // must name a scene object
  std::string text;    // rendering handed to the critic
};

/// c_t = (o_t, l): flattened observation plus instruction, tied to a scene.
struct TaskContext {
  Vec observation;  // object positions then current ee position
  Instruction instruction;
  std::shared_ptr<const Scene> scene;
  Vec2 ee;
};

struct EpisodeOutcome {
  Vec executed;
  TaskContext post_context;  // c̄_t: ee moved to the executed action
  bool success = false;
  bool aligned = false;       // instructed goal is the nearest goal (SOA)
  bool out_of_bounds = false;
  double distance_to_goal = 0.0;
};

/// One micro-environment: scene plus the multimodal demo distribution the
/// policy is trained on.
struct Env {
  EnvKind kind = EnvKind::two_goal;
  std::shared_ptr<const Scene> scene;
  std::vector<Vec2> demo_modes;
  double demo_sigma = 0.1;

  /// Ground-truth GMM of demo actions (equi-probable modes, isotropic sigma).
  DiagGmm demo_gmm() const;
};

/// two_goal: modes/goals at (-1,0) and (1,0).
/// ring_goals: `ring_count` modes/goals on the unit circle starting at angle 0.
/// narrow_gap: demo modes at (-1,0) and (1,0); the instructed goal goal_mid
/// sits at (0, 0.5), outside every mode's 3-sigma ball.
Env make_env(EnvKind kind, int ring_count = 4);

/// Fresh context with the canonical ee start and the given instructed target.
TaskContext make_context(const Env& env, const std::string& target);

/// Episode-level instructed-goal rule: uniform over goals, except narrow_gap
/// which always instructs goal_mid.
std::string pick_target(const Env& env, RngStream& rng);

/// Conditioning vector for the diffusion policy: observation plus a task-kind
/// one-hot. The instructed target is not part of the policy conditioning; the
/// trained policy stays multimodal and mode selection is the steering
/// problem.
Vec policy_context_vec(const TaskContext& ctx);
Vec policy_context_vec(const Env& env);

/// (context, action) demos: equi-probable modes, isotropic sigma = 0.1.
std::vector<Demo> generate_demos(const Env& env, int count, RngStream& rng);

/// Moves the end effector to `action` and judges the episode. Out-of-bounds
/// actions are flagged, never clipped.
EpisodeOutcome execute(const TaskContext& ctx, const Vec& action);

/// Named 2D points fed to the critic and the reward scope: every scene
/// object plus "ee" at the context's current end-effector position.
std::vector<std::pair<std::string, Vec2>> keypoints(const TaskContext& ctx);

/// Evaluation scope for reward programs: keypoint vectors plus the scalar
/// success_radius. The candidate action is bound separately per member.
dsl::Scope reward_scope(const TaskContext& ctx);

}  // namespace evosteer
