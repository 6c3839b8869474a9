#include "evosteer/envsim.hpp"

#include <cmath>
#include <limits>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {

double planar_dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool inside_workspace(const Vec2& p) {
  return std::abs(p.x) <= kWorkspaceBound && std::abs(p.y) <= kWorkspaceBound;
}

int task_index(EnvKind kind) {
  switch (kind) {
    case EnvKind::two_goal: return 0;
    case EnvKind::ring_goals: return 1;
    case EnvKind::narrow_gap: return 2;
  }
  throw Error("unknown env kind");
}

Vec build_observation(const Scene& scene, const Vec2& ee) {
  Vec obs;
  obs.reserve(2 * scene.objects.size() + 2);
  for (const auto& [name, pos] : scene.objects) {
    obs.push_back(pos.x);
    obs.push_back(pos.y);
  }
  obs.push_back(ee.x);
  obs.push_back(ee.y);
  return obs;
}

void validate_scene(const Scene& scene) {
  if (scene.goal_names.size() < 1) throw Error("scene: at least one goal required");
  if (!(scene.success_radius > 0.0)) throw Error("scene: success radius must be positive");
  for (const auto& [name, pos] : scene.objects)
    if (!inside_workspace(pos)) throw Error("scene: object '" + name + "' outside workspace");
  if (!inside_workspace(scene.ee_start)) throw Error("scene: ee start outside workspace");

  // success => aligned requires the radius to be under half the minimum
  // inter-goal distance; goal balls must also fit inside the workspace.
  double min_pair = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.goal_names.size(); ++i) {
    const Vec2& gi = scene.object(scene.goal_names[i]);
    if (std::abs(gi.x) + scene.success_radius > kWorkspaceBound ||
        std::abs(gi.y) + scene.success_radius > kWorkspaceBound)
      throw Error("scene: goal ball crosses the workspace boundary");
    for (std::size_t j = i + 1; j < scene.goal_names.size(); ++j)
      min_pair = std::min(min_pair, planar_dist(gi, scene.object(scene.goal_names[j])));
  }
  if (scene.goal_names.size() > 1 && !(scene.success_radius < 0.5 * min_pair))
    throw Error("scene: success radius must be below half the minimum goal distance");
}

}  // namespace

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::two_goal: return "two_goal";
    case EnvKind::ring_goals: return "ring_goals";
    case EnvKind::narrow_gap: return "narrow_gap";
  }
  throw Error("unknown env kind");
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "two_goal") return EnvKind::two_goal;
  if (name == "ring_goals") return EnvKind::ring_goals;
  if (name == "narrow_gap") return EnvKind::narrow_gap;
  throw ConfigError("unknown environment kind '" + name + "'");
}

const Vec2& Scene::object(const std::string& name) const {
  for (const auto& [obj_name, pos] : objects)
    if (obj_name == name) return pos;
  throw Error("scene: no object named '" + name + "'");
}

bool Scene::has_object(const std::string& name) const {
  for (const auto& [obj_name, pos] : objects)
    if (obj_name == name) return true;
  return false;
}

DiagGmm Env::demo_gmm() const {
  std::vector<Vec> means;
  std::vector<Vec> vars;
  Vec weights;
  const double w = 1.0 / static_cast<double>(demo_modes.size());
  for (const Vec2& mode : demo_modes) {
    means.push_back(mode.as_vec());
    vars.push_back({demo_sigma * demo_sigma, demo_sigma * demo_sigma});
    weights.push_back(w);
  }
  return make_gmm(std::move(means), std::move(vars), std::move(weights));
}

Env make_env(EnvKind kind, int ring_count) {
  Env env;
  env.kind = kind;
  auto scene = std::make_shared<Scene>();
  scene->ee_start = {0.0, 0.0};

  switch (kind) {
    case EnvKind::two_goal: {
      scene->objects = {{"goal_left", {-1.0, 0.0}}, {"goal_right", {1.0, 0.0}}};
      scene->goal_names = {"goal_left", "goal_right"};
      env.demo_modes = {{-1.0, 0.0}, {1.0, 0.0}};
      break;
    }
    case EnvKind::ring_goals: {
      if (ring_count < 2) throw ConfigError("ring_goals: need at least 2 goals");
      constexpr double kTwoPi = 6.283185307179586476925286766559;
      for (int i = 0; i < ring_count; ++i) {
        const double angle = kTwoPi * i / ring_count;
        const Vec2 pos{std::cos(angle), std::sin(angle)};
        const std::string name = "goal_" + std::to_string(i);
        scene->objects.emplace_back(name, pos);
        scene->goal_names.push_back(name);
        env.demo_modes.push_back(pos);
      }
      break;
    }
    case EnvKind::narrow_gap: {
      scene->objects = {{"goal_left", {-1.0, 0.0}},
                        {"goal_right", {1.0, 0.0}},
                        {"goal_mid", {0.0, 0.5}}};
      scene->goal_names = {"goal_left", "goal_right", "goal_mid"};
      env.demo_modes = {{-1.0, 0.0}, {1.0, 0.0}};  // goal_mid is not a demo mode
      break;
    }
  }
  validate_scene(*scene);
  env.scene = std::move(scene);
  return env;
}

TaskContext make_context(const Env& env, const std::string& target) {
  if (!env.scene->has_object(target))
    throw Error("make_context: instruction references unknown target '" + target + "'");
  TaskContext ctx;
  ctx.scene = env.scene;
  ctx.ee = env.scene->ee_start;
  ctx.observation = build_observation(*env.scene, ctx.ee);
  ctx.instruction.task = env.kind;
  ctx.instruction.target = target;
  ctx.instruction.text = "reach " + target;
  return ctx;
}

std::string pick_target(const Env& env, RngStream& rng) {
  if (env.kind == EnvKind::narrow_gap) return "goal_mid";
  const auto& goals = env.scene->goal_names;
  return goals[rng.next_below(goals.size())];
}

Vec policy_context_vec(const TaskContext& ctx) {
  Vec out = ctx.observation;
  Vec onehot(3, 0.0);
  onehot[task_index(ctx.instruction.task)] = 1.0;
  out.insert(out.end(), onehot.begin(), onehot.end());
  return out;
}

Vec policy_context_vec(const Env& env) {
  Vec out = build_observation(*env.scene, env.scene->ee_start);
  Vec onehot(3, 0.0);
  onehot[task_index(env.kind)] = 1.0;
  out.insert(out.end(), onehot.begin(), onehot.end());
  return out;
}

std::vector<Demo> generate_demos(const Env& env, int count, RngStream& rng) {
  if (count < 1) throw Error("generate_demos: count must be >= 1");
  const Vec context = policy_context_vec(env);
  std::vector<Demo> demos;
  demos.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Vec2& mode = env.demo_modes[rng.next_below(env.demo_modes.size())];
    Vec action{mode.x + env.demo_sigma * rng.next_gauss(),
               mode.y + env.demo_sigma * rng.next_gauss()};
    demos.push_back({context, std::move(action)});
  }
  return demos;
}

EpisodeOutcome execute(const TaskContext& ctx, const Vec& action) {
  if (action.size() != 2) throw DimensionError("execute: action must be 2-dimensional");
  require_finite(action, "executed action");

  const Scene& scene = *ctx.scene;
  const Vec2 point{action[0], action[1]};
  const Vec2& goal = scene.object(ctx.instruction.target);

  EpisodeOutcome outcome;
  outcome.executed = action;
  outcome.distance_to_goal = planar_dist(point, goal);

  if (!inside_workspace(point)) {
    outcome.out_of_bounds = true;
    outcome.success = false;
    outcome.aligned = false;
  } else {
    outcome.success = outcome.distance_to_goal <= scene.success_radius;  // closed ball
    std::string nearest;
    double best = std::numeric_limits<double>::infinity();
    for (const std::string& name : scene.goal_names) {
      const double d = planar_dist(point, scene.object(name));
      if (d < best) {
        best = d;
        nearest = name;
      }
    }
    outcome.aligned = nearest == ctx.instruction.target;
  }

  outcome.post_context = ctx;
  outcome.post_context.ee = point;
  outcome.post_context.observation = build_observation(scene, point);
  return outcome;
}

std::vector<std::pair<std::string, Vec2>> keypoints(const TaskContext& ctx) {
  std::vector<std::pair<std::string, Vec2>> out = ctx.scene->objects;
  out.emplace_back("ee", ctx.ee);
  return out;
}

dsl::Scope reward_scope(const TaskContext& ctx) {
  dsl::Scope scope;
  for (const auto& [name, pos] : keypoints(ctx)) scope[name] = pos.as_vec();
  scope["success_radius"] = ctx.scene->success_radius;
  return scope;
}

}  // namespace evosteer
