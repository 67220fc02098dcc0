#include "morl/theory.hpp"

#include <algorithm>
#include <cmath>

#include "morl/errors.hpp"

namespace morl {
namespace {

// Ceiling that ignores floating-point noise just above an integer, so
// 0.1^-2 = 100.00000000000001 rounds to 100.
std::int64_t ceil_count(double x) {
  const double snapped = std::nearbyint(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(snapped);
  return static_cast<std::int64_t>(std::ceil(x));
}

std::int64_t at_least_one(std::int64_t v) { return std::max<std::int64_t>(1, v); }

}  // namespace

double TheoryConstants::c_omega(int t) const {
  return t * (2.0 * t * G * G + S) * (std::exp(2.0 * G * H * delta) + 1.0);
}

TheoryConstants variance_constants(const TheoryInputs& in, int num_objectives, double gamma,
                                   int horizon, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("variance_constants: gamma must lie in (0, 1); the constants diverge at 1");
  }
  if (!(in.G > 0.0 && in.S > 0.0 && in.C > 0.0 && in.L_f > 0.0) || num_objectives < 1 ||
      horizon < 1 || !(delta > 0.0)) {
    throw UsageError("variance_constants: all inputs must be positive");
  }
  const double M = num_objectives;
  const double H = horizon;
  const double G = in.G, S = in.S, C = in.C, Lf = in.L_f;
  const double q = 1.0 - gamma;
  const double gH = std::pow(gamma, H);

  TheoryConstants out;
  out.G = G;
  out.S = S;
  out.H = horizon;
  out.delta = delta;

  out.L_theta = M * C * S / (q * q);

  const double bracket =
      std::sqrt(M) * Lf * (1.0 - gH - H * gH * q) / q + C * (1.0 + H * q);
  out.D_J = M * G / (q * q) * bracket;

  // The first denominator is printed as (1 - gamma^6); (1 - gamma)^6 is the
  // power that matches the rest of the bound.
  out.C1 = 21.0 * M * M * M * G * G * Lf * Lf / std::pow(q, 6) +
           9.0 * M * M * C * C * G * G / std::pow(q, 4);
  out.C2 = 3.0 * M * M * G * G / std::pow(q, 4) * bracket * bracket;

  const double is_factor = (2.0 * G * G + S) * (std::exp(2.0 * G * H * delta) + 1.0);
  out.C3 = 9.0 * M * M * C * C * S * S / std::pow(q, 4) +
           18.0 * M * M * G * G * H * is_factor / std::pow(q, 5) *
               (12.0 * C * C + 4.0 * M * Lf * Lf / (3.0 * q * q));
  return out;
}

std::string to_string(SchedulePreset preset) {
  switch (preset) {
    case SchedulePreset::kThm1: return "thm1";
    case SchedulePreset::kThm2: return "thm2";
    case SchedulePreset::kThm2Proof: return "thm2-proof";
    case SchedulePreset::kThm3: return "thm3";
    case SchedulePreset::kThm4: return "thm4";
  }
  return "unknown";
}

SchedulePreset parse_preset(const std::string& name) {
  if (name == "thm1") return SchedulePreset::kThm1;
  if (name == "thm2") return SchedulePreset::kThm2;
  if (name == "thm2-proof") return SchedulePreset::kThm2Proof;
  if (name == "thm3") return SchedulePreset::kThm3;
  if (name == "thm4") return SchedulePreset::kThm4;
  throw ConfigError("unknown preset '" + name + "' (expected thm1, thm2, thm2-proof, thm3, thm4)");
}

Algorithm preset_algorithm(SchedulePreset preset) {
  return preset == SchedulePreset::kThm1 || preset == SchedulePreset::kThm3
             ? Algorithm::kMoPg
             : Algorithm::kMoTsivrPg;
}

Schedule theorem_schedule(SchedulePreset preset, int num_objectives, double eps, double gamma,
                          const TheoryInputs& in) {
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("theorem_schedule: eps must lie in (0, 1)");
  if (num_objectives < 1) throw UsageError("theorem_schedule: M must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw DomainError("theorem_schedule: presets need gamma in (0, 1)");

  const double M = num_objectives;
  const double inv = 1.0 / eps;
  const double log_inv = std::log(inv);
  const double log_m_inv = std::log(M * inv);

  Schedule s;
  s.algorithm = preset_algorithm(preset);
  Hyperparams& h = s.hyper;
  h.gamma = gamma;

  switch (preset) {
    case SchedulePreset::kThm1:
      h.T = ceil_count(M * inv * inv);
      h.N = ceil_count(M * M * M * inv * inv);
      h.H = static_cast<int>(at_least_one(ceil_count(log_m_inv)));
      break;
    case SchedulePreset::kThm2:
      h.T = ceil_count(inv);
      h.m = h.B = ceil_count(std::pow(M, 1.5) * inv);
      h.N = ceil_count(M * M * M * inv * inv);
      h.H = static_cast<int>(at_least_one(ceil_count(log_m_inv)));
      break;
    case SchedulePreset::kThm2Proof:
      h.T = ceil_count(inv);
      h.m = ceil_count(M * inv);
      h.B = ceil_count(M * M * inv);
      h.N = ceil_count(M * M * M * inv * inv);
      h.H = static_cast<int>(at_least_one(ceil_count(6.0 * log_m_inv / (1.0 - gamma))));
      break;
    case SchedulePreset::kThm3:
      h.T = ceil_count(M * M * inv);
      h.N = ceil_count(M * M * M * M * inv * inv);
      h.H = static_cast<int>(at_least_one(ceil_count(log_m_inv / (1.0 - gamma))));
      break;
    case SchedulePreset::kThm4:
      h.T = ceil_count(log_inv);
      h.m = ceil_count(M * M * inv * log_inv);
      h.B = ceil_count(M * M * M * inv * log_inv);
      h.N = ceil_count(std::pow(M, 5) * inv * inv * log_inv * log_inv);
      h.H = static_cast<int>(at_least_one(ceil_count(log_m_inv / (1.0 - gamma))));
      break;
  }
  h.T = at_least_one(h.T);
  h.m = at_least_one(h.m);
  h.B = at_least_one(h.B);
  h.N = at_least_one(h.N);

  const double delta = 1.0 / (2.0 * in.G * h.H);
  s.constants = variance_constants(in, num_objectives, gamma, h.H, delta);
  const double L = s.constants.L_theta;
  const double C3 = s.constants.C3;

  switch (preset) {
    case SchedulePreset::kThm1:
    case SchedulePreset::kThm3:
      h.eta = 1.0 / (2.0 * L);
      h.delta = std::numeric_limits<double>::infinity();
      break;
    case SchedulePreset::kThm2:
    case SchedulePreset::kThm2Proof:
      h.eta = 1.0 / (1.0 + C3 / (M * L * L)) * (1.0 / (2.0 * L));
      h.delta = delta;
      break;
    case SchedulePreset::kThm4:
      h.eta = 1.0 / (2.0 * L + 8.0 * C3 / (M * L));
      h.delta = delta;
      break;
  }
  return s;
}

}  // namespace morl
