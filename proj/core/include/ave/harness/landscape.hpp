#pragma once

// Diversity-proxy landscape of the pendulum over a (theta, omega) grid.
// Every cell uses the same rollout seed set.

#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

#include "ave/harness/config.hpp"

namespace ave::harness {

struct Landscape {
  std::vector<double> thetas;
  std::vector<double> omegas;
  std::vector<double> values;  // theta-major
  std::size_t argmax_theta = 0;
  std::size_t argmax_omega = 0;
  double mean_below = 0.0;  // cells with energy < separatrix
  double mean_above = 0.0;  // cells with energy >= separatrix

  double at(std::size_t i, std::size_t j) const { return values[i * omegas.size() + j]; }
  std::size_t rows() const { return thetas.size() * omegas.size(); }
};

/// -pi + k * 2pi / bins, so theta = pi (== -pi) is the centre of cell 0.
std::vector<double> theta_axis(int bins);
/// `bins` points evenly spaced over [-half, half].
std::vector<double> omega_axis(int bins, double half);

/// Proxy value of env at every (theta, omega) on the axes, theta-major.
template <Environment E>
std::vector<double> landscape_values(const E& env, std::span<const double> thetas, std::span<const double> omegas,
                                     const emp::EmpowermentQuery& query, std::span<const std::uint64_t> seeds) {
  std::vector<double> out;
  out.reserve(thetas.size() * omegas.size());
  for (double th : thetas)
    for (double om : omegas) out.push_back(emp::diversity_bonus_seeded(env, typename E::State{th, om}, query, seeds));
  return out;
}

/// Full landscape plus summary. `mirrored` probes with the reflected torque set.
Landscape landscape_grid(const LandscapeConfig& cfg, SeededRng& rng, bool mirrored = false);

/// Proxy value of the single cell (i, j) of landscape_grid(cfg, rng, mirrored),
/// computed from the same seed set.
double landscape_cell(const LandscapeConfig& cfg, SeededRng& rng, std::size_t i, std::size_t j, bool mirrored = false);

/// Smallest circular distance in theta bins between cell i and the cell
/// containing `theta`, and the plain distance in omega bins to `omega`.
bool argmax_within_one_bin(const Landscape& l, double theta, double omega);

/// theta,omega,proxy rows followed by one "# summary" line.
void write_landscape_csv(const std::filesystem::path& path, const Landscape& l);
std::string landscape_summary(const Landscape& l);

}  // namespace ave::harness
