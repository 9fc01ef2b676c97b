#pragma once

// Torque-driven nonlinear pendulum, used to check the diversity proxy against
// the known shape of the empowerment landscape (peak at the upright position,
// low values below the separatrix energy).
//
// theta = 0 hangs down, theta = pi is upright.

#include <array>
#include <numbers>
#include <vector>

#include "ave/env.hpp"

namespace ave::pendulum {

struct PendulumState {
  double theta = 0.0;
  double omega = 0.0;
  friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

struct PendulumParams {
  double mass = 1.0;
  double length = 1.0;
  double gravity = 9.81;
  double damping = 0.0;
  /// Probing torque magnitude as a fraction of m*g*l.
  double torque_fraction = 0.3;
  double dt = 0.01;
  /// Velocity-Verlet sub-steps per dt.
  int substeps = 8;

  double torque_limit() const { return torque_fraction * mass * gravity * length; }
  double omega_scale() const;
  /// Throws ConfigError.
  void validate() const;
};

double wrap_angle(double theta);

/// Integrates theta'' = (torque - m g l sin(theta) - damping*omega) / (m l^2)
/// over one dt with `substeps` kick-drift-kick (velocity Verlet) sub-steps;
/// theta is wrapped to [-pi, pi). |torque| must not exceed torque_limit().
PendulumState pendulum_step(const PendulumState& s, double torque, const PendulumParams& p);

/// E = 1/2 m l^2 omega^2 - m g l cos(theta).
double energy(const PendulumState& s, const PendulumParams& p);

/// Energy of the upright rest state: m g l.
double separatrix_energy(const PendulumParams& p);

/// Probing environment with the discrete torque set {-tau, 0, +tau}.
/// `mirrored` reverses the set, which maps every trajectory onto its
/// reflection (theta, omega) -> (-theta, -omega) under identical seeds.
class PendulumEnv {
 public:
  using State = PendulumState;

  explicit PendulumEnv(PendulumParams params, bool mirrored = false);

  int action_count() const { return 3; }
  double torque(ActionId a) const;
  StepOutcome<State> step(const State& s, ActionId a) const;
  bool is_terminal(const State&) const { return false; }
  ActionId sample_action(const State&, SeededRng& rng) const { return {rng.uniform_int(3)}; }
  /// phase -> [theta, omega]; phase_embedding -> [cos, sin, omega/omega_scale]; full -> phase.
  std::vector<double> features(const State& s, FeatureSelector f) const;
  /// Layout v1: u8 version=1, f64 theta, f64 omega.
  Bytes serialize(const State& s) const;

  const PendulumParams& params() const { return params_; }

 private:
  PendulumParams params_;
  std::array<double, 3> torques_;
};

static_assert(Environment<PendulumEnv>);

}  // namespace ave::pendulum
