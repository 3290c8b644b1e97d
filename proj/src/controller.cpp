#include "swarmbo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace swarmbo {
namespace {

  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  double wrap_phase(double theta) {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0)
      w += kTwoPi;
    if (w >= kTwoPi)
      w = 0.0;
    return w;
  }

  double clamp_weight(double w, const SwarmConstants &consts) {
    return std::clamp(w, consts.weight_min(), 1.0);
  }

  double phase_coherence(double a, double b) {
    return 0.5 * (1.0 + std::cos(a - b));
  }

  // Low-pass coefficient; time constants below dt are clamped to dt.
  double filter_gain(double tau, double dt) { return dt / std::max(tau, dt); }

  Point limit_energy(Point v, const SwarmConstants &consts) {
    const double energy = 0.5 * consts.mu_m * dot(v, v);
    if (energy <= consts.e_max)
      return v;
    double scale = consts.max_speed() / norm(v);
    Point out = scale * v;
    while (0.5 * consts.mu_m * dot(out, out) > consts.e_max) {
      scale = std::nextafter(scale, 0.0);
      out = scale * v;
    }
    return out;
  }

}  // namespace

void SwarmConstants::validate() const {
  if (n_agents < 1)
    throw std::invalid_argument("n_agents must be >= 1");
  const std::pair<const char *, double> positive[] = {
      {"dt", dt},     {"duration", duration}, {"e_max", e_max},
      {"mu_m", mu_m}, {"g_s", g_s},           {"g_r", g_r},
      {"g_c", g_c},   {"d_rad", d_rad},       {"w_floor", w_floor}};
  for (const auto &[name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive");
  }
  if (mu_m >= 1.0)
    throw std::invalid_argument("mu_m must be < 1 as a momentum blend");
  if (w_floor >= 1.0)
    throw std::invalid_argument("w_floor must be < 1");
}

long SwarmConstants::steps_for(double seconds) const {
  return static_cast<long>(std::llround(seconds / dt));
}

double SwarmConstants::max_speed() const { return std::sqrt(2.0 * e_max / mu_m); }

double SwarmConstants::weight_min() const { return std::nextafter(w_floor, 1.0); }

std::size_t SwarmConstants::capture_threshold(std::size_t n_rewards) const {
  return (n_agents + n_rewards - 1) / n_rewards;
}

std::size_t SwarmState::num_captured() const {
  return static_cast<std::size_t>(
      std::count_if(capture_step.begin(), capture_step.end(),
                    [](const auto &s) { return s.has_value(); }));
}

bool SwarmState::all_captured() const {
  return num_captured() == capture_step.size();
}

std::vector<Point> SwarmState::positions() const {
  std::vector<Point> out;
  out.reserve(agents.size());
  for (const auto &a : agents)
    out.push_back(a.pos);
  return out;
}

bool operator==(const SwarmState &a, const SwarmState &b) {
  if (a.t != b.t || a.capture_step != b.capture_step ||
      a.agents.size() != b.agents.size())
    return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const auto &x = a.agents[i];
    const auto &y = b.agents[i];
    if (x.pos != y.pos || x.vel != y.vel || x.phase != y.phase ||
        x.q != y.q || x.r != y.r || x.c != y.c)
      return false;
  }
  return a.W == b.W && a.Wr == b.Wr;
}

std::size_t EpisodeResult::num_captured() const {
  return static_cast<std::size_t>(
      std::count_if(capture_steps.begin(), capture_steps.end(),
                    [](const auto &s) { return s.has_value(); }));
}

double preferred_distance(double w, double scale) {
  if (!(w > 0.0))
    throw std::domain_error("preferred_distance: weight must be positive");
  return -scale * std::log(w);
}

SwarmState init_swarm(const MazeSpec &maze, const ParamVector &params,
                      const SwarmConstants &consts, std::uint64_t seed) {
  params.validate();
  consts.validate();

  std::mt19937_64 rng(seed);
  const auto positions = spawn_agents(maze, consts.n_agents, rng);
  std::uniform_real_distribution<double> uphase(0.0, kTwoPi);

  const auto n = static_cast<Eigen::Index>(consts.n_agents);
  const auto nr = static_cast<Eigen::Index>(maze.num_rewards());

  SwarmState s;
  s.agents.resize(consts.n_agents);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto &a = s.agents[i];
    a.pos = positions[i];
    a.phase = wrap_phase(uphase(rng));
  }

  s.W.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.W(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = distance(positions[i], positions[j]);
      const double w = clamp_weight(std::exp(-d / params.sigma), consts);
      s.W(i, j) = w;
      s.W(j, i) = w;
    }
  }

  s.Wr.resize(n, nr);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < nr; ++k) {
      const double d = distance(positions[i], maze.rewards[k]);
      s.Wr(i, k) = clamp_weight(std::exp(-d / params.kappa), consts);
    }
  }

  s.capture_step.assign(maze.num_rewards(), std::nullopt);
  return s;
}

VisibilityMatrix reward_visibility(const MazeSpec &maze,
                                   const SwarmState &state) {
  const auto n = static_cast<Eigen::Index>(state.agents.size());
  const auto nr = static_cast<Eigen::Index>(maze.num_rewards());
  VisibilityMatrix v(n, nr);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < nr; ++k)
      v(i, k) = line_of_sight(maze, state.agents[i].pos, maze.rewards[k]);
  return v;
}

std::vector<Point> swarm_increment(const SwarmState &state,
                                   const VisibilityMatrix &vis,
                                   const ParamVector &params,
                                   const SwarmConstants & /*consts*/) {
  const std::size_t n = state.agents.size();
  std::vector<Point> dx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point xi = state.agents[i].pos;
    Point sum;
    int visible = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!vis(i, j))
        continue;
      ++visible;
      const Point away = xi - state.agents[j].pos;
      const double d = norm(away);
      if (d == 0.0)
        continue;
      const double pref = preferred_distance(state.W(i, j), params.sigma);
      sum += ((pref - d) / d) * away;
    }
    if (visible > 0)
      dx[i] = (0.5 / visible) * sum;
  }
  return dx;
}

std::vector<Point> reward_increment(const SwarmState &state,
                                    const MazeSpec &maze,
                                    const VisibilityMatrix &reward_vis,
                                    const ParamVector &params,
                                    const SwarmConstants & /*consts*/) {
  const std::size_t n = state.agents.size();
  const std::size_t nr = maze.num_rewards();
  std::vector<Point> dx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point xi = state.agents[i].pos;
    Point sum;
    int visible = 0;
    for (std::size_t k = 0; k < nr; ++k) {
      if (state.capture_step[k] || !reward_vis(i, k))
        continue;
      ++visible;
      const Point away = xi - maze.rewards[k];
      const double d = norm(away);
      if (d == 0.0)
        continue;
      const double pref = preferred_distance(state.Wr(i, k), params.kappa);
      sum += ((pref - d) / d) * away;
    }
    if (visible > 0)
      dx[i] = (0.5 / visible) * sum;
  }
  return dx;
}

std::vector<Point> reward_increment(const SwarmState &state,
                                    const MazeSpec &maze,
                                    const ParamVector &params,
                                    const SwarmConstants &consts) {
  return reward_increment(state, maze, reward_visibility(maze, state), params,
                          consts);
}

void advance(SwarmState &state, const MazeSpec &maze,
             const ParamVector &params, const SwarmConstants &consts,
             std::vector<CaptureEvent> *events) {
  const std::size_t n = state.agents.size();
  const std::size_t nr = maze.num_rewards();
  const double dt = consts.dt;

  // (1) visibility
  const auto positions = state.positions();
  const VisibilityMatrix vis = visibility_matrix(maze, positions);
  const VisibilityMatrix rvis = reward_visibility(maze, state);

  // (2) input filtering
  const double aq = filter_gain(params.tau_q, dt);
  const double ar = filter_gain(params.tau_r, dt);
  const double ac = filter_gain(params.tau_c, dt);
  for (std::size_t i = 0; i < n; ++i) {
    auto &a = state.agents[i];
    double coherence = 0.0;
    int visible = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (vis(i, j)) {
        coherence += phase_coherence(state.agents[j].phase, a.phase);
        ++visible;
      }
    }
    const double Q = visible > 0 ? coherence / visible : 0.0;

    double R = 0.0;
    int cues = 0;
    for (std::size_t k = 0; k < nr; ++k) {
      if (state.capture_step[k] || !rvis(i, k))
        continue;
      ++cues;
      R = std::max(R, std::exp(-distance(a.pos, maze.rewards[k]) /
                               params.kappa));
    }
    const double C = static_cast<double>(cues) / static_cast<double>(nr);

    a.q = std::clamp(a.q + aq * (Q - a.q), 0.0, 1.0);
    a.r = std::clamp(a.r + ar * (R - a.r), 0.0, 1.0);
    a.c = std::clamp(a.c + ac * (C - a.c), 0.0, 1.0);
  }

  // (3) phase advance
  for (auto &a : state.agents) {
    const double drive = consts.g_s * a.q + consts.g_r * a.r + consts.g_c * a.c;
    a.phase = wrap_phase(a.phase + kTwoPi * dt *
                                       (params.omega_0 + params.omega_I * drive));
  }

  // (4) Hebbian learning
  const double rate_s = params.eta_s * dt;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!vis(i, j))
        continue;
      double w = state.W(i, j);
      w += rate_s *
           (phase_coherence(state.agents[i].phase, state.agents[j].phase) - w);
      w = clamp_weight(w, consts);
      state.W(i, j) = w;
      state.W(j, i) = w;
    }
  }
  const double rate_r = params.eta_r * dt;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < nr; ++k) {
      if (state.capture_step[k] || !rvis(i, k))
        continue;
      const double target =
          std::exp(-distance(state.agents[i].pos, maze.rewards[k]) /
                   params.kappa);
      double &w = state.Wr(i, k);
      w = clamp_weight(w + rate_r * (target - w), consts);
    }
  }

  // (5) displacement, momentum, energy cap; (6) wall-aware move
  const auto dswarm = swarm_increment(state, vis, params, consts);
  const auto dreward = reward_increment(state, maze, rvis, params, consts);
  const double mu = consts.mu_m;
  for (std::size_t i = 0; i < n; ++i) {
    auto &a = state.agents[i];
    const Point dx = dswarm[i] + dreward[i];
    Point v = mu * a.vel + ((1.0 - mu) / dt) * dx;
    v = limit_energy(v, consts);
    const Point target = a.pos + dt * v;
    const Point moved = clip_move(maze, a.pos, target);
    if (moved != target)
      v = (1.0 / dt) * (moved - a.pos);
    a.vel = v;
    a.pos = moved;
  }

  // (7) cooperative capture
  const std::size_t threshold = consts.capture_threshold(nr);
  for (std::size_t k = 0; k < nr; ++k) {
    if (state.capture_step[k])
      continue;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i)
      if (distance(state.agents[i].pos, maze.rewards[k]) <= consts.d_rad)
        ids.push_back(i);
    if (ids.size() >= threshold) {
      state.capture_step[k] = state.t + 1;
      if (events)
        events->push_back({k, state.t + 1, ids.size(), std::move(ids)});
    }
  }

  // (8)
  ++state.t;
}

SwarmState step(SwarmState state, const MazeSpec &maze,
                const ParamVector &params, const SwarmConstants &consts) {
  advance(state, maze, params, consts);
  return state;
}

EpisodeResult run_episode(const MazeSpec &maze, const ParamVector &params,
                          const SwarmConstants &consts, std::uint64_t seed,
                          double cutoff_s, const EpisodeOptions &opts) {
  if (cutoff_s > consts.duration)
    throw std::invalid_argument("cutoff_s exceeds the episode duration");

  SwarmState state = init_swarm(maze, params, consts, seed);
  EpisodeResult out;
  out.dt = consts.dt;
  out.n_steps = consts.steps_for(cutoff_s);
  out.n_cap_trace.reserve(static_cast<std::size_t>(out.n_steps));

  auto log_frame = [&] {
    if (opts.record_trajectory && state.t % opts.trajectory_every == 0)
      out.trajectory.push_back({state.t, state.positions()});
  };

  log_frame();
  while (state.t < out.n_steps && !state.all_captured()) {
    advance(state, maze, params, consts, &out.events);
    out.n_cap_trace.push_back(static_cast<int>(state.num_captured()));
    log_frame();
  }
  if (opts.record_trajectory && out.trajectory.back().step != state.t)
    out.trajectory.push_back({state.t, state.positions()});

  out.capture_steps = state.capture_step;
  out.completion_step = state.all_captured() ? state.t : out.n_steps;
  return out;
}

}  // namespace swarmbo
