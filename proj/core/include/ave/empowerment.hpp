#pragma once

// Empowerment estimators.
//
//   exact    - enumerate the open-loop action-sequence channel p(S_T | A_T, s)
//              and compute its capacity with Blahut-Arimoto.
//   distinct - log of the number of distinct final states reached by N
//              random rollouts.
//   proxy    - diversity bonus: variance of final-state features over N
//              random rollouts.
//
// All estimators are pure functions of (environment, state, query, seed).
// Random rollouts each get their own seed drawn from the caller's generator,
// so the rollout set can be evaluated in any order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "ave/env.hpp"

namespace ave::emp {

enum class LogBase : std::uint8_t { e, two };
enum class Estimator : std::uint8_t { exact, distinct, proxy };
enum class VarianceMode : std::uint8_t {
  per_dimension,  // sum over feature dimensions of the per-dimension variance
  flattened,      // variance of all N*D feature values pooled together
};

Estimator parse_estimator(std::string_view name);
std::string_view to_string(Estimator e);
LogBase parse_log_base(std::string_view name);
VarianceMode parse_variance_mode(std::string_view name);

struct EmpowermentQuery {
  int horizon = 5;
  int n_rollouts = 1000;
  FeatureSelector selector = FeatureSelector::human_cell;
  LogBase log_base = LogBase::e;
  Estimator estimator = Estimator::exact;
  TerminalPolicy terminal = TerminalPolicy::absorb;
  /// Largest action_count^horizon that is enumerated exactly.
  std::uint64_t enumeration_cap = 20000;
  /// Beyond the cap, sample n_rollouts sequences instead of failing.
  bool allow_sampling = true;
  VarianceMode variance = VarianceMode::per_dimension;

  /// Throws ConfigError.
  void validate() const;
};

/// Converts a quantity measured in nats into the requested base.
double from_nats(double nats, LogBase base);

/// Empirical channel p(S_T | A_T, s). Row i is action sequence i, column j
/// is distinct final state j.
struct ChannelModel {
  /// Mixed-radix code of each sequence; digit t (most significant first) is
  /// the action index at step t.
  std::vector<std::uint64_t> action_sequences;
  /// Serialized discretized final states; the column index is the state id.
  std::vector<Bytes> final_states;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> probs;  // row-major rows x cols

  double p(std::size_t row, std::size_t col) const { return probs[row * cols + col]; }

  /// Channel given directly as a row-stochastic matrix.
  static ChannelModel from_matrix(const std::vector<std::vector<double>>& rows);
  /// Throws ConfigError unless every entry is >= 0 and rows sum to 1 +- 1e-9.
  void validate() const;
};

struct ProbingDistribution {
  std::vector<double> weights;
};

struct CapacityResult {
  double capacity = 0.0;  // in the requested log base
  ProbingDistribution distribution;
  bool converged = false;
  int iterations = 0;
};

/// Blahut-Arimoto. Stops when the upper and lower capacity bounds differ by
/// at most `tol` (in the requested base). If max_iter runs out, returns the
/// best iterate with converged = false.
CapacityResult blahut_arimoto(const ChannelModel& channel, double tol = 1e-9, int max_iter = 10000,
                              LogBase base = LogBase::e);

/// Sum of per-dimension unbiased variances, or the pooled variance of the
/// flattened samples. Rows are sorted first so the result does not depend on
/// sample order. Fewer than two samples give 0.
double feature_spread(std::vector<std::vector<double>> samples, VarianceMode mode);

namespace detail {

template <Environment E>
void enumerate_sequences(const E& env, const typename E::State& s, int depth, int horizon, std::uint64_t code,
                         ChannelModel& channel, std::map<Bytes, std::size_t>& ids, std::vector<std::size_t>& column) {
  if (depth == horizon) {
    auto [it, fresh] = ids.try_emplace(env.serialize(s), ids.size());
    if (fresh) channel.final_states.push_back(it->first);
    channel.action_sequences.push_back(code);
    column.push_back(it->second);
    return;
  }
  const int n = env.action_count();
  for (int a = 0; a < n; ++a) {
    const std::uint64_t next = code * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(a);
    if (env.is_terminal(s)) {
      enumerate_sequences(env, s, depth + 1, horizon, next, channel, ids, column);
    } else {
      auto out = env.step(s, ActionId{a});
      enumerate_sequences(env, out.next_state, depth + 1, horizon, next, channel, ids, column);
    }
  }
}

inline std::uint64_t sequence_count(int actions, int horizon, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (int t = 0; t < horizon; ++t) {
    count *= static_cast<std::uint64_t>(actions);
    if (count > cap) return cap + 1;
  }
  return count;
}

}  // namespace detail

/// Tabulates the open-loop channel from `state`. Enumerates every action
/// sequence when action_count^T <= enumeration_cap, otherwise samples
/// n_rollouts uniform sequences (or throws ConfigError when sampling is
/// disabled). Terminal states absorb. Environments here are deterministic
/// given the state, so each row is one-hot.
template <Environment E>
ChannelModel channel_from_rollouts(const E& env, const typename E::State& state, const EmpowermentQuery& query,
                                   SeededRng& rng) {
  query.validate();
  ChannelModel channel;
  std::map<Bytes, std::size_t> ids;
  std::vector<std::size_t> column;
  const int n = env.action_count();
  if (detail::sequence_count(n, query.horizon, query.enumeration_cap) <= query.enumeration_cap) {
    detail::enumerate_sequences(env, state, 0, query.horizon, 0, channel, ids, column);
  } else {
    if (!query.allow_sampling)
      throw ConfigError("action-sequence space exceeds the enumeration cap and sampling is disabled");
    std::vector<ActionId> seq(static_cast<std::size_t>(query.horizon));
    for (int k = 0; k < query.n_rollouts; ++k) {
      std::uint64_t code = 0;
      for (auto& a : seq) {
        a = ActionId{rng.uniform_int(n)};
        code = code * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(a.index);
      }
      auto traj = run_actions(env, state, std::span<const ActionId>(seq));
      auto [it, fresh] = ids.try_emplace(env.serialize(traj.states.back()), ids.size());
      if (fresh) channel.final_states.push_back(it->first);
      channel.action_sequences.push_back(code);
      column.push_back(it->second);
    }
  }
  channel.rows = channel.action_sequences.size();
  channel.cols = channel.final_states.size();
  channel.probs.assign(channel.rows * channel.cols, 0.0);
  for (std::size_t i = 0; i < channel.rows; ++i) channel.probs[i * channel.cols + column[i]] = 1.0;
  return channel;
}

/// Seeds for the N rollouts of one estimate.
inline std::vector<std::uint64_t> draw_rollout_seeds(int n, SeededRng& rng) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
  for (auto& s : seeds) s = rng.next_u64();
  return seeds;
}

template <Environment E>
double mc_distinct_empowerment_seeded(const E& env, const typename E::State& state, const EmpowermentQuery& query,
                                      std::span<const std::uint64_t> seeds) {
  std::set<Bytes> distinct;
  for (std::uint64_t seed : seeds) {
    SeededRng r(seed);
    if (auto final = rollout_random(env, state, query.horizon, r, query.terminal))
      distinct.insert(env.serialize(*final));
  }
  if (distinct.empty()) return 0.0;
  return from_nats(std::log(static_cast<double>(distinct.size())), query.log_base);
}

/// log(#distinct discretized final states over N random rollouts).
template <Environment E>
double mc_distinct_empowerment(const E& env, const typename E::State& state, const EmpowermentQuery& query,
                               SeededRng& rng) {
  query.validate();
  const auto seeds = draw_rollout_seeds(query.n_rollouts, rng);
  return mc_distinct_empowerment_seeded(env, state, query, seeds);
}

/// Diversity bonus over an explicit rollout seed set (one rollout per seed).
template <Environment E>
double diversity_bonus_seeded(const E& env, const typename E::State& state, const EmpowermentQuery& query,
                              std::span<const std::uint64_t> seeds) {
  std::vector<std::vector<double>> finals;
  finals.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    SeededRng r(seed);
    if (auto final = rollout_random(env, state, query.horizon, r, query.terminal))
      finals.push_back(env.features(*final, query.selector));
  }
  return feature_spread(std::move(finals), query.variance);
}

/// Empowerment-inspired diversity bonus: N random rollouts of horizon T,
/// spread of the final-state features.
template <Environment E>
double diversity_bonus(const E& env, const typename E::State& state, const EmpowermentQuery& query, SeededRng& rng) {
  query.validate();
  if (query.n_rollouts < 2) throw ConfigError("diversity bonus needs at least two rollouts");
  const auto seeds = draw_rollout_seeds(query.n_rollouts, rng);
  return diversity_bonus_seeded(env, state, query, seeds);
}

/// Exact capacity of the enumerated channel.
template <Environment E>
double exact_empowerment(const E& env, const typename E::State& state, const EmpowermentQuery& query, SeededRng& rng) {
  return blahut_arimoto(channel_from_rollouts(env, state, query, rng), 1e-9, 10000, query.log_base).capacity;
}

/// Dispatches on query.estimator.
template <Environment E>
double estimate(const E& env, const typename E::State& state, const EmpowermentQuery& query, SeededRng& rng) {
  switch (query.estimator) {
    case Estimator::exact: return exact_empowerment(env, state, query, rng);
    case Estimator::distinct: return mc_distinct_empowerment(env, state, query, rng);
    case Estimator::proxy: return diversity_bonus(env, state, query, rng);
  }
  return 0.0;
}

}  // namespace ave::emp
