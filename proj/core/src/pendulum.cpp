#include "ave/pendulum.hpp"

#include <cmath>
#include <string>

namespace ave::pendulum {

double PendulumParams::omega_scale() const { return std::sqrt(gravity / length); }

void PendulumParams::validate() const {
  if (!(mass > 0 && length > 0 && gravity > 0 && dt > 0)) throw ConfigError("pendulum parameters must be positive");
  if (damping < 0 || torque_fraction < 0) throw ConfigError("pendulum damping/torque must be non-negative");
  if (dt > 0.05) throw ConfigError("pendulum dt must be <= 0.05 s");
  if (substeps < 1) throw ConfigError("pendulum substeps must be >= 1");
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = theta - two_pi * std::floor((theta + std::numbers::pi) / two_pi);
  if (w >= std::numbers::pi) w -= two_pi;  // guard rounding at the upper edge
  return w;
}

PendulumState pendulum_step(const PendulumState& s, double torque, const PendulumParams& p) {
  if (std::abs(torque) > p.torque_limit() * (1.0 + 1e-12))
    throw ContractViolation("pendulum torque exceeds torque limit");
  const double inertia = p.mass * p.length * p.length;
  const double mgl = p.mass * p.gravity * p.length;
  auto accel = [&](double theta, double omega) {
    return (torque - mgl * std::sin(theta) - p.damping * omega) / inertia;
  };
  const double h = p.dt / p.substeps;
  double theta = s.theta;
  double omega = s.omega;
  for (int i = 0; i < p.substeps; ++i) {
    omega += 0.5 * h * accel(theta, omega);
    theta += h * omega;
    omega += 0.5 * h * accel(theta, omega);
  }
  return {wrap_angle(theta), omega};
}

double energy(const PendulumState& s, const PendulumParams& p) {
  return 0.5 * p.mass * p.length * p.length * s.omega * s.omega - p.mass * p.gravity * p.length * std::cos(s.theta);
}

double separatrix_energy(const PendulumParams& p) { return p.mass * p.gravity * p.length; }

PendulumEnv::PendulumEnv(PendulumParams params, bool mirrored) : params_(params) {
  params_.validate();
  const double tau = params_.torque_limit();
  torques_ = mirrored ? std::array<double, 3>{tau, 0.0, -tau} : std::array<double, 3>{-tau, 0.0, tau};
}

double PendulumEnv::torque(ActionId a) const {
  if (a.index < 0 || a.index >= 3) throw ContractViolation("pendulum action out of range");
  return torques_[static_cast<std::size_t>(a.index)];
}

StepOutcome<PendulumState> PendulumEnv::step(const State& s, ActionId a) const {
  return {pendulum_step(s, torque(a), params_), 0.0, false, OutcomeLabel::none};
}

std::vector<double> PendulumEnv::features(const State& s, FeatureSelector f) const {
  switch (f) {
    case FeatureSelector::phase:
    case FeatureSelector::full:
      return {s.theta, s.omega};
    case FeatureSelector::phase_embedding:
      return {std::cos(s.theta), std::sin(s.theta), s.omega / params_.omega_scale()};
    default:
      throw ConfigError("feature selector '" + std::string(to_string(f)) + "' is not defined for the pendulum");
  }
}

Bytes PendulumEnv::serialize(const State& s) const {
  ByteWriter w;
  w.u8(1);
  w.f64(s.theta);
  w.f64(s.omega);
  return std::move(w).bytes();
}

}  // namespace ave::pendulum
