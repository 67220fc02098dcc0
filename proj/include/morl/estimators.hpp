#pragma once

#include <span>
#include <vector>

#include "morl/mdp.hpp"
#include "morl/policy.hpp"
#include "morl/scalarization.hpp"

namespace morl {

// Importance weights omega_t = prod_{h<=t} pi_target(a_h|s_h) / pi_behaviour(a_h|s_h)
// for every step of a trajectory sampled under `behaviour`. Accumulated in
// log space; equal parameter vectors give exactly 1.
// Throws DegenerateSupportError if the behaviour policy assigns zero
// probability to a recorded action.
std::vector<double> is_weights(const Trajectory& traj, const DiscretePolicy& policy,
                               const Vector& behaviour, const Vector& target);

double is_weight(const Trajectory& traj, const DiscretePolicy& policy, const Vector& behaviour,
                 const Vector& target, std::size_t t);

// sum_t gamma^t omega_t r(s_t, a_t). Unbiased for J^H(target).
Vector estimate_return(const Trajectory& traj, const DiscretePolicy& policy,
                       const Vector& behaviour, const Vector& target, double gamma);

// Policy-gradient estimate of (grad_theta J^H(target))^T grad_J f(j_hat) from a
// trajectory sampled under `behaviour`:
//
//   g = sum_t grad log pi_target(a_t|s_t)
//         * sum_m df/dJ_m(j_hat) * sum_{h>=t} omega_h gamma^h r_m(s_h, a_h)
//
// Every reward carries the importance weight of its own prefix, which keeps
// the estimate unbiased off-policy. On-policy all weights are 1.
// Throws DomainError when j_hat lies outside `box`.
Vector estimate_gradient(const Trajectory& traj, const DiscretePolicy& policy,
                         const Vector& behaviour, const Vector& target, const Vector& j_hat,
                         const ScalarizationSpec& spec, const OmegaBox& box, double gamma);

// On-policy shorthand g(tau | theta, j_hat).
Vector estimate_gradient(const Trajectory& traj, const DiscretePolicy& policy,
                         const Vector& theta, const Vector& j_hat,
                         const ScalarizationSpec& spec, const OmegaBox& box, double gamma);

// Arithmetic mean, summed in index order. Throws UsageError on an empty list.
Vector batch_mean(std::span<const Vector> items);

}  // namespace morl
