#include "ave/empowerment.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace ave::emp {

Estimator parse_estimator(std::string_view name) {
  if (name == "exact") return Estimator::exact;
  if (name == "distinct") return Estimator::distinct;
  if (name == "proxy") return Estimator::proxy;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::exact: return "exact";
    case Estimator::distinct: return "distinct";
    case Estimator::proxy: return "proxy";
  }
  return "?";
}

LogBase parse_log_base(std::string_view name) {
  if (name == "e" || name == "nats") return LogBase::e;
  if (name == "2" || name == "bits") return LogBase::two;
  throw ConfigError("unknown log base '" + std::string(name) + "'");
}

VarianceMode parse_variance_mode(std::string_view name) {
  if (name == "per-dimension") return VarianceMode::per_dimension;
  if (name == "flattened") return VarianceMode::flattened;
  throw ConfigError("unknown variance mode '" + std::string(name) + "'");
}

void EmpowermentQuery::validate() const {
  if (horizon < 1) throw ConfigError("empowerment horizon must be >= 1");
  if (n_rollouts < 1) throw ConfigError("empowerment rollout count must be >= 1");
  if (estimator == Estimator::proxy && n_rollouts < 2) throw ConfigError("proxy estimator needs n_rollouts >= 2");
  if (enumeration_cap < 1) throw ConfigError("enumeration cap must be >= 1");
}

double from_nats(double nats, LogBase base) { return base == LogBase::two ? nats / std::log(2.0) : nats; }

ChannelModel ChannelModel::from_matrix(const std::vector<std::vector<double>>& rows) {
  ChannelModel c;
  c.rows = rows.size();
  c.cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t i = 0; i < c.rows; ++i) {
    if (rows[i].size() != c.cols) throw ConfigError("ragged channel matrix");
    c.probs.insert(c.probs.end(), rows[i].begin(), rows[i].end());
    c.action_sequences.push_back(i);
  }
  for (std::size_t j = 0; j < c.cols; ++j) {
    ByteWriter w;
    w.u64(j);
    c.final_states.push_back(std::move(w).bytes());
  }
  c.validate();
  return c;
}

void ChannelModel::validate() const {
  if (rows == 0 || cols == 0 || probs.size() != rows * cols) throw ConfigError("empty or malformed channel");
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = p(i, j);
      if (!(v >= 0.0)) throw ConfigError("channel probabilities must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("channel rows must sum to 1");
  }
}

CapacityResult blahut_arimoto(const ChannelModel& channel, double tol, int max_iter, LogBase base) {
  channel.validate();
  if (!(tol > 0)) throw ConfigError("Blahut-Arimoto tolerance must be positive");
  const std::size_t n = channel.rows;
  const std::size_t m = channel.cols;
  std::vector<double> r(n, 1.0 / static_cast<double>(n));
  std::vector<double> q(m);
  std::vector<double> divergence(n);

  CapacityResult best;
  best.capacity = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) q[j] += r[i] * channel.p(i, j);

    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double pij = channel.p(i, j);
        if (pij > 0.0) d += pij * std::log(pij / q[j]);
      }
      divergence[i] = d;
      upper = std::max(upper, d);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += r[i] * std::exp(divergence[i]);
    const double lower = std::max(0.0, std::log(z));

    // I(r') >= lower for the updated distribution r' = r e^D / z.
    for (std::size_t i = 0; i < n; ++i) r[i] *= std::exp(divergence[i]) / z;
    if (lower > best.capacity) {
      best.capacity = lower;
      best.distribution.weights = r;
    }
    best.iterations = it;
    if (from_nats(upper - lower, base) <= tol) {
      best.converged = true;
      break;
    }
  }
  best.capacity = from_nats(best.capacity, base);
  return best;
}

double feature_spread(std::vector<std::vector<double>> samples, VarianceMode mode) {
  if (samples.size() < 2) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const std::size_t dims = samples.front().size();
  if (mode == VarianceMode::flattened) {
    const double count = static_cast<double>(n * dims);
    if (count < 2) return 0.0;
    double mean = 0.0;
    for (const auto& row : samples) mean = std::accumulate(row.begin(), row.end(), mean);
    mean /= count;
    double ss = 0.0;
    for (const auto& row : samples)
      for (double v : row) ss += (v - mean) * (v - mean);
    return ss / (count - 1.0);
  }
  double total = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    double mean = 0.0;
    for (const auto& row : samples) mean += row[d];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& row : samples) ss += (row[d] - mean) * (row[d] - mean);
    total += ss / static_cast<double>(n - 1);
  }
  return total;
}

}  // namespace ave::emp
