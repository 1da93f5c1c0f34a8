#include "m2m/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "m2m/access_model.hpp"
#include "m2m/errors.hpp"

namespace m2m::sim {

namespace {

constexpr std::uint64_t kTopologyStream = 0;
constexpr std::uint64_t kChainStream = 1;
constexpr std::uint64_t kAttemptStream = 2;
constexpr std::uint64_t kObservationStream = 1000;

constexpr std::string_view kSchemeNames[] = {"pomdp_with_loop", "pomdp_no_loop", "no_observation_no_loop",
                                             "perfect_knowledge"};

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

std::string_view scheme_name(Scheme s) { return kSchemeNames[static_cast<int>(s)]; }

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kSchemeNames[i] == name) return static_cast<Scheme>(i);
  return std::nullopt;
}

bool uses_control_loop(Scheme s) { return s == Scheme::PomdpWithLoop || s == Scheme::PerfectKnowledge; }

int SimConfig::device_count() const {
  int n = 0;
  for (const auto& s : slices) n += s.devices;
  return n;
}

void SimConfig::validate() const {
  require(slots_per_period >= 1, "slots_per_period", "K must be at least 1");
  require(periods >= 1, "periods", "Y must be at least 1");
  require(dp_horizon >= 1, "dp_horizon", "DP horizon must be at least 1");
  require(in_unit(beta), "beta", "β must lie in [0,1]");
  require(in_unit(epsilon), "epsilon", "ε must lie in [0,1]");
  require(in_unit(phi), "phi", "φ must lie in [0,1]");
  require(in_unit(attempt_prob), "attempt_prob", "attempt probability must lie in [0,1]");
  for (int i = 0; i < 2; ++i) {
    const double a = rb_transition(i, 0);
    const double b = rb_transition(i, 1);
    require(in_unit(a) && in_unit(b) && std::abs(a + b - 1.0) <= 1e-12, "rb_transition",
            "rows must be probability distributions");
  }
  if (collision.mode == CollisionSpec::Mode::Fixed) {
    require(in_unit(collision.value), "collision.value", "Pr_s must lie in [0,1]");
  } else {
    require(collision.same_choice >= 0 && collision.same_choice <= device_count(), "collision.same_choice",
            "must lie in [0, N]");
  }
  require(max_joint_rbs >= 1, "max_joint_rbs", "must be at least 1");
  require(sensing_window >= 1 && sensing_window <= max_joint_rbs, "sensing_window",
          "must lie in [1, max_joint_rbs]");
  require(state_cap >= 2, "state_cap", "must be at least 2");
  require((std::int64_t{1} << sensing_window) <= state_cap, "sensing_window", "2^window exceeds state_cap");
  require(cell.access_rbs >= 1, "cell.access_rbs", "must be at least 1");
  require(cell.data_rbs >= 0, "cell.data_rbs", "must be non-negative");
  require(cell.cell_radius_m >= 1.0, "cell.radius_m", "must be at least 1 m");
  require(cell.preambles.preamble_count >= 1, "cell.preambles", "must be at least 1");
  require(std::isfinite(tx_power_dbm), "cell.tx_power_dbm", "must be finite");
  require(std::isfinite(noise_power_dbm), "cell.noise_power_dbm", "must be finite");
  require(!slices.empty(), "slices", "at least one slice is required");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    require(slices[i].weight > 0.0, "slices.weight", "weights must be positive");
    require(slices[i].devices >= 1, "slices.devices", "every slice needs at least one device");
    require(slices[i].bandwidth > 0.0, "slices.bandwidth", "must be positive");
    if (i > 0)
      require(slices[i].weight <= slices[i - 1].weight, "slices.weight", "weights must be nonincreasing");
  }
  const int l = static_cast<int>(slices.size());
  require(controller.omega > 0.0 && controller.omega < 1.0, "controller.omega", "ω must lie in (0,1)");
  require(controller.mu > 0.0, "controller.mu", "μ must be positive");
  require(controller.min_rb_per_slice >= 1, "controller.min_rb_per_slice", "every slice keeps at least one RB");
  require(controller.data_rb_floor >= 0 && controller.data_rb_floor <= cell.data_rbs, "controller.data_rb_floor",
          "must lie in [0, data_rbs]");
  require(cell.access_rbs >= l * controller.min_rb_per_slice, "cell.access_rbs",
          "too few access RBs for the slice count and per-slice floor");
  if (mean_ratio) require(*mean_ratio > 0.0, "mean_ratio", "must be positive");
}

void evolve_states(std::vector<radio::RbState>& states, const Eigen::Matrix2d& transition, Rng& rng) {
  for (auto& s : states) {
    const double stay_idle = transition(static_cast<int>(s), 0);
    s = unit_uniform(rng) < stay_idle ? radio::RbState::Idle : radio::RbState::Busy;
  }
}

std::vector<std::uint8_t> gen_observation(std::span<const radio::RbState> states, int action, double epsilon,
                                          double phi, Rng& rng) {
  std::vector<std::uint8_t> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double flip = action == static_cast<int>(i) + 1 ? epsilon : phi;
    const auto bit = static_cast<std::uint8_t>(states[i]);
    out[i] = unit_uniform(rng) < flip ? static_cast<std::uint8_t>(1 - bit) : bit;
  }
  return out;
}

std::vector<int> sensing_window(std::span<const int> slice_rbs, int index_in_slice, int width) {
  const int r = static_cast<int>(slice_rbs.size());
  if (r <= width) return {slice_rbs.begin(), slice_rbs.end()};
  std::vector<int> out;
  const int start = static_cast<int>((static_cast<long>(index_in_slice) * width) % r);
  for (int i = 0; i < width; ++i) out.push_back(slice_rbs[static_cast<std::size_t>((start + i) % r)]);
  return out;
}

std::vector<DeviceOutcome> run_slot(std::vector<DeviceRuntime>& devices, CellState& cell, const SlotContext& ctx,
                                    Rng& chain_rng, Rng& attempt_rng) {
  using radio::RbState;
  std::vector<std::vector<double>> marks(cell.states.size());
  std::vector<DeviceOutcome> out(devices.size());

  for (std::size_t d = 0; d < devices.size(); ++d) {
    auto& dev = devices[d];
    auto& res = out[d];
    res.device_id = dev.device.id;
    const bool attempts = unit_uniform(attempt_rng) < ctx.attempt_prob;
    if (!attempts) continue;

    std::vector<Eigen::Vector2d> factors(dev.window.size());
    for (std::size_t i = 0; i < dev.window.size(); ++i) {
      const int rb = dev.window[i];
      if (!marks[static_cast<std::size_t>(rb)].empty()) {
        factors[i] = Eigen::Vector2d(0.0, 1.0);
      } else if (ctx.scheme == Scheme::PerfectKnowledge) {
        factors[i] = cell.states[static_cast<std::size_t>(rb)] == RbState::Busy ? Eigen::Vector2d(0.0, 1.0)
                                                                                  : Eigen::Vector2d(1.0, 0.0);
      } else {
        factors[i] = dev.belief[i];
      }
    }
    const pomdp::BeliefVector<double> joint(joint_belief(factors));
    res.action = static_cast<int>(pomdp::best_action(dev.policy[static_cast<std::size_t>(ctx.stage)], joint).action);
    if (res.action == 0) continue;

    res.rb = dev.window[static_cast<std::size_t>(res.action - 1)];
    const auto rb = static_cast<std::size_t>(res.rb);
    std::vector<double> interferers;
    if (cell.states[rb] == RbState::Busy) interferers.push_back(cell.occupant_power_mw[rb]);
    interferers.insert(interferers.end(), marks[rb].begin(), marks[rb].end());
    const bool busy = !interferers.empty();
    radio::ResourceBlockParams params{ctx.slice_bandwidth[static_cast<std::size_t>(dev.device.slice_id)],
                                      ctx.tx_power_dbm, ctx.noise_power_dbm, dev.device.channel_gain};
    res.reward = radio::instantaneous_rate(params, busy ? RbState::Busy : RbState::Idle, ctx.collision_prob,
                                           interferers);
    marks[rb].push_back(radio::received_power_mw(ctx.tx_power_dbm, dev.device.channel_gain));
  }

  evolve_states(cell.states, cell.transition, chain_rng);

  const auto& factor = *ctx.factor_model;
  for (std::size_t d = 0; d < devices.size(); ++d) {
    auto& dev = devices[d];
    std::vector<RbState> seen(dev.window.size());
    for (std::size_t i = 0; i < dev.window.size(); ++i) seen[i] = cell.states[static_cast<std::size_t>(dev.window[i])];
    out[d].observation = gen_observation(seen, out[d].action, ctx.epsilon, ctx.phi, dev.obs_rng);
    for (std::size_t i = 0; i < dev.window.size(); ++i) {
      const pomdp::Index a = out[d].action == static_cast<int>(i) + 1 ? 1 : 0;
      try {
        dev.belief[i] = pomdp::belief_update(pomdp::BeliefVector<double>(dev.belief[i]), a,
                                             static_cast<pomdp::Index>(out[d].observation[i]), factor)
                            .probs();
      } catch (const ZeroLikelihood&) {
        dev.belief[i] = factor.stationary().probs();
      }
    }
  }
  return out;
}

namespace {

class Simulation {
 public:
  Simulation(const SimConfig& cfg, bool with_trace) : cfg_(cfg), with_trace_(with_trace) {
    cfg_.validate();
    const int l = static_cast<int>(cfg_.slices.size());
    std::vector<double> weights;
    std::vector<int> counts;
    std::vector<double> bandwidths;
    for (const auto& s : cfg_.slices) {
      weights.push_back(s.weight);
      counts.push_back(s.devices);
      bandwidths.push_back(s.bandwidth);
    }
    weights_ = weights;
    Rng topology = make_stream(cfg_.seed, kTopologyStream);
    slices_ = slice_network(cfg_.cell, weights, counts, bandwidths, topology);

    cell_.transition = cfg_.rb_transition;
    const int total = cfg_.cell.total_rbs();
    for (int r = 0; r < total; ++r) {
      const double d = draw_distance(cfg_.cell.cell_radius_m, topology);
      cell_.occupant_power_mw.push_back(
          radio::received_power_mw(cfg_.tx_power_dbm, radio::gain_from_path_loss(radio::path_loss_db(d))));
    }
    for (int r = cfg_.cell.access_rbs; r < total; ++r) pool_.push_back(r);

    collision_prob_ = cfg_.collision.mode == CollisionSpec::Mode::Fixed
                          ? cfg_.collision.value
                          : radio::preamble_collision_prob(cfg_.device_count(), cfg_.collision.same_choice,
                                                           cfg_.cell.preambles.preamble_count);

    AccessModelSpec spec;
    spec.rb_transition = cfg_.rb_transition;
    spec.epsilon = cfg_.epsilon;
    spec.phi = cfg_.phi;
    spec.beta = cfg_.beta;
    spec.max_rbs = cfg_.max_joint_rbs;
    spec_ = spec;
    AccessModelSpec update_spec = spec;
    if (cfg_.scheme == Scheme::NoObservationNoLoop) update_spec.epsilon = update_spec.phi = 0.5;
    factor_model_.emplace(build_rb_factor(update_spec));
    stationary_ = build_rb_factor(spec).stationary().probs();

    chain_rng_ = make_stream(cfg_.seed, kChainStream);
    attempt_rng_ = make_stream(cfg_.seed, kAttemptStream);
    cell_.states.resize(static_cast<std::size_t>(total));
    for (auto& s : cell_.states)
      s = unit_uniform(chain_rng_) < stationary_[0] ? radio::RbState::Idle : radio::RbState::Busy;

    for (int i = 0; i < l; ++i) {
      int idx = 0;
      for (const auto& d : slices_[static_cast<std::size_t>(i)].devices) {
        DeviceRuntime rt;
        rt.device = d;
        rt.index_in_slice = idx++;
        rt.obs_rng = make_stream(cfg_.seed, kObservationStream + static_cast<std::uint64_t>(d.id));
        devices_.push_back(std::move(rt));
      }
    }
    for (int i = 0; i < l; ++i) refresh_slice(i);

    horizon_ = std::min(cfg_.dp_horizon, cfg_.slots_per_period);
    controller_.config = cfg_.controller;

    const double xi_bar = cfg_.mean_ratio.value_or(1.0 / l);
    if (total > l) {
      std::vector<double> targets;
      const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
      for (double w : weights) targets.push_back(w / wsum);
      auto rep = ratio_bound_check(total, l, xi_bar, targets, "target ratio");
      warnings_ = std::move(rep.warnings);
    }
  }

  SimResult run() {
    SimResult res;
    res.warnings = warnings_;
    const int l = static_cast<int>(slices_.size());
    const int k = cfg_.slots_per_period;
    SlotContext ctx;
    ctx.scheme = cfg_.scheme;
    ctx.epsilon = cfg_.epsilon;
    ctx.phi = cfg_.phi;
    ctx.collision_prob = collision_prob_;
    ctx.attempt_prob = cfg_.attempt_prob;
    ctx.tx_power_dbm = cfg_.tx_power_dbm;
    ctx.noise_power_dbm = cfg_.noise_power_dbm;
    for (const auto& s : slices_) ctx.slice_bandwidth.push_back(s.bandwidth);
    ctx.factor_model = &*factor_model_;

    for (int y = 0; y < cfg_.periods; ++y) {
      std::vector<Eigen::MatrixXd> slot_rates;
      for (const auto& s : slices_)
        slot_rates.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.devices.size()), k));
      std::vector<int> slot_in_slice(devices_.size());
      {
        std::vector<int> next(static_cast<std::size_t>(l), 0);
        for (std::size_t d = 0; d < devices_.size(); ++d)
          slot_in_slice[d] = next[static_cast<std::size_t>(devices_[d].device.slice_id)]++;
      }

      for (int slot = 0; slot < k; ++slot) {
        ctx.stage = horizon_ - std::min(horizon_, k - slot);
        const auto outcomes = run_slot(devices_, cell_, ctx, chain_rng_, attempt_rng_);
        for (std::size_t d = 0; d < outcomes.size(); ++d) {
          const auto& o = outcomes[d];
          slot_rates[static_cast<std::size_t>(devices_[d].device.slice_id)](slot_in_slice[d], slot) = o.reward;
          if (with_trace_) {
            TraceRecord t;
            t.slot = static_cast<long>(y) * k + slot;
            t.device_id = o.device_id;
            t.action = o.rb + 1;
            for (auto b : o.observation) t.observation.push_back(b ? '1' : '0');
            t.reward = o.reward;
            res.trace.push_back(std::move(t));
          }
        }
      }

      std::vector<double> rates;
      for (const auto& m : slot_rates) rates.push_back(period_obtained_rate(m));
      std::vector<SliceMetrics> raw;
      try {
        raw = compute_ratios(rates, weights_);
      } catch (const AllRatesZero&) {
        raw = zero_rate_metrics();
      }
      const auto update = controller_step(controller_, rates, weights_);

      std::vector<int> counts;
      for (const auto& s : slices_) counts.push_back(static_cast<int>(s.access_rbs.size()));
      const std::vector<int> before = counts;
      std::vector<int> applied(static_cast<std::size_t>(l), 0);
      if (uses_control_loop(cfg_.scheme) && !update.skipped) {
        int data = static_cast<int>(pool_.size());
        const auto delta = reallocate(counts, data, update.corrections, cfg_.controller);
        std::vector<std::vector<int>> ids;
        for (const auto& s : slices_) ids.push_back(s.access_rbs);
        move_rb_ids(ids, pool_, delta);
        for (int i = 0; i < l; ++i) {
          auto& s = slices_[static_cast<std::size_t>(i)];
          const bool changed = ids[static_cast<std::size_t>(i)] != s.access_rbs;
          s.access_rbs = std::move(ids[static_cast<std::size_t>(i)]);
          if (changed) refresh_slice(i);
        }
        applied = delta.applied;
      }

      int held = static_cast<int>(pool_.size());
      for (const auto& s : slices_) held += static_cast<int>(s.access_rbs.size());
      if (held != cfg_.cell.total_rbs()) res.conserved = false;

      for (int i = 0; i < l; ++i) {
        const auto u = static_cast<std::size_t>(i);
        MetricsRecord m;
        m.period = y;
        m.slice_id = i;
        m.obtained_rate = rates[u];
        m.filtered_rate = update.filtered[u];
        m.obtained_ratio = raw[u].obtained_ratio;
        m.target_ratio = raw[u].desired_ratio;
        m.gap = raw[u].gap;
        m.rbs = before[u];
        m.delta_real = update.corrections[u];
        m.delta_applied = applied[u];
        m.mean_reward = slot_rates[u].mean();
        res.metrics.push_back(m);
      }
    }
    return res;
  }

 private:
  std::vector<SliceMetrics> zero_rate_metrics() const {
    const double wsum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    std::vector<SliceMetrics> out(weights_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].desired_ratio = weights_[i] / wsum;
      out[i].gap = out[i].desired_ratio;
    }
    return out;
  }

  // Recomputes windows, beliefs and policies for one slice's devices.
  void refresh_slice(int slice) {
    const auto& s = slices_[static_cast<std::size_t>(slice)];
    for (auto& dev : devices_) {
      if (dev.device.slice_id != slice) continue;
      auto window = sensing_window(s.access_rbs, dev.index_in_slice, cfg_.sensing_window);
      std::vector<Eigen::Vector2d> belief;
      for (int rb : window) {
        const auto it = std::find(dev.window.begin(), dev.window.end(), rb);
        belief.push_back(it == dev.window.end() ? Eigen::Vector2d(stationary_)
                                                : dev.belief[static_cast<std::size_t>(it - dev.window.begin())]);
      }
      dev.window = std::move(window);
      dev.belief = std::move(belief);

      const radio::ResourceBlockParams params{s.bandwidth, cfg_.tx_power_dbm, cfg_.noise_power_dbm,
                                              dev.device.channel_gain};
      std::vector<RbLink> links;
      for (int rb : dev.window)
        links.push_back(rb_link(params, cell_.occupant_power_mw[static_cast<std::size_t>(rb)], collision_prob_));
      pomdp::SolveOptions opts;
      opts.state_cap = cfg_.state_cap;
      dev.policy = pomdp::solve(build_pomdp(links, spec_), std::min(cfg_.dp_horizon, cfg_.slots_per_period), opts);
    }
  }

  SimConfig cfg_;
  bool with_trace_;
  std::vector<VirtualNetwork> slices_;
  std::vector<double> weights_;
  std::vector<int> pool_;
  std::vector<DeviceRuntime> devices_;
  CellState cell_;
  AccessModelSpec spec_;
  std::optional<pomdp::PomdpModel<double>> factor_model_;
  Eigen::Vector2d stationary_;
  double collision_prob_ = 0.0;
  int horizon_ = 1;
  ControllerState controller_;
  Rng chain_rng_;
  Rng attempt_rng_;
  std::vector<std::string> warnings_;
};

}  // namespace

SimResult run_simulation(const SimConfig& config, bool with_trace) {
  return Simulation(config, with_trace).run();
}

}  // namespace m2m::sim
