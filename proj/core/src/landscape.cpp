#include "ave/harness/landscape.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ave/errors.hpp"

namespace ave::harness {

std::vector<double> theta_axis(int bins) {
  std::vector<double> axis(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) axis[static_cast<std::size_t>(k)] = -std::numbers::pi + k * 2.0 * std::numbers::pi / bins;
  return axis;
}

std::vector<double> omega_axis(int bins, double half) {
  std::vector<double> axis(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) axis[static_cast<std::size_t>(k)] = -half + k * 2.0 * half / (bins - 1);
  return axis;
}

Landscape landscape_grid(const LandscapeConfig& cfg, SeededRng& rng, bool mirrored) {
  cfg.validate();
  const pendulum::PendulumEnv env(cfg.params, mirrored);
  Landscape l;
  l.thetas = theta_axis(cfg.theta_bins);
  l.omegas = omega_axis(cfg.omega_bins, cfg.omega_extent * cfg.params.omega_scale());
  const auto seeds = emp::draw_rollout_seeds(cfg.query.n_rollouts, rng);
  l.values = landscape_values(env, l.thetas, l.omegas, cfg.query, seeds);

  const double sep = pendulum::separatrix_energy(cfg.params);
  double best = -1.0, below = 0.0, above = 0.0;
  int n_below = 0, n_above = 0;
  for (std::size_t i = 0; i < l.thetas.size(); ++i)
    for (std::size_t j = 0; j < l.omegas.size(); ++j) {
      const double v = l.at(i, j);
      if (v > best) {
        best = v;
        l.argmax_theta = i;
        l.argmax_omega = j;
      }
      if (pendulum::energy({l.thetas[i], l.omegas[j]}, cfg.params) < sep) {
        below += v;
        ++n_below;
      } else {
        above += v;
        ++n_above;
      }
    }
  l.mean_below = n_below ? below / n_below : 0.0;
  l.mean_above = n_above ? above / n_above : 0.0;
  return l;
}

double landscape_cell(const LandscapeConfig& cfg, SeededRng& rng, std::size_t i, std::size_t j, bool mirrored) {
  cfg.validate();
  const auto thetas = theta_axis(cfg.theta_bins);
  const auto omegas = omega_axis(cfg.omega_bins, cfg.omega_extent * cfg.params.omega_scale());
  if (i >= thetas.size() || j >= omegas.size()) throw ConfigError("landscape cell index out of range");
  const pendulum::PendulumEnv env(cfg.params, mirrored);
  const auto seeds = emp::draw_rollout_seeds(cfg.query.n_rollouts, rng);
  return emp::diversity_bonus_seeded(env, pendulum::PendulumState{thetas[i], omegas[j]}, cfg.query, seeds);
}

bool argmax_within_one_bin(const Landscape& l, double theta, double omega) {
  const auto n = static_cast<long>(l.thetas.size());
  const double width = 2.0 * std::numbers::pi / static_cast<double>(n);
  const long target = ((std::lround((pendulum::wrap_angle(theta) + std::numbers::pi) / width) % n) + n) % n;
  const long di = std::labs(static_cast<long>(l.argmax_theta) - target);
  const long dtheta = std::min(di, n - di);

  std::size_t nearest = 0;
  for (std::size_t j = 1; j < l.omegas.size(); ++j)
    if (std::abs(l.omegas[j] - omega) < std::abs(l.omegas[nearest] - omega)) nearest = j;
  const long domega = std::labs(static_cast<long>(l.argmax_omega) - static_cast<long>(nearest));
  return dtheta <= 1 && domega <= 1;
}

std::string landscape_summary(const Landscape& l) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# summary argmax_theta=%.17g argmax_omega=%.17g mean_below=%.17g mean_above=%.17g",
                l.thetas[l.argmax_theta], l.omegas[l.argmax_omega], l.mean_below, l.mean_above);
  return buf;
}

void write_landscape_csv(const std::filesystem::path& path, const Landscape& l) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "theta,omega,proxy\n";
  char buf[96];
  for (std::size_t i = 0; i < l.thetas.size(); ++i)
    for (std::size_t j = 0; j < l.omegas.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", l.thetas[i], l.omegas[j], l.at(i, j));
      out << buf;
    }
  out << landscape_summary(l) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace ave::harness
