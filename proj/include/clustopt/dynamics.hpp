#pragma once

#include <cstddef>
#include <vector>

#include "clustopt/costs.hpp"
#include "clustopt/graph.hpp"

namespace clustopt {

struct SimConfig {
  double alpha = 1.0;
  // Integration step; 0 selects half of stability_max_step at the initial state.
  double h = 0.0;
  std::size_t steps = 1000;
  std::size_t record_stride = 1;
  // Stop once the gap is at or below this; 0 disables early stopping.
  double gap_tolerance = 0.0;
  double x_init_low = -5.0;
  double x_init_high = 5.0;
};

struct NodeState {
  std::vector<double> x;
  std::vector<double> y;
};

struct TrialTrace {
  std::vector<std::size_t> recorded_steps;
  std::vector<double> gap;                 // F(mean x) - F*
  std::vector<double> lyapunov;            // (|x - x* 1|^2 + |y|^2) / 2
  std::vector<double> consensus_residual;  // sum_i (x_i - mean x)^2
  std::vector<double> tracking_residual;   // |sum y - sum grad f_i(x_i)|
  bool diverged = false;
  double h = 0.0;
};

// x_i ~ U[x_init_low, x_init_high], y_i = grad f_i(x_i). Throws Disconnected.
NodeState initialize(const Graph& g, const CostModel& model, const SimConfig& cfg, Rng& rng);

// One explicit Euler step; the gradient derivative in the y update is the
// exact increment grad f(x+) - grad f(x). Throws NumericalDivergence.
NodeState euler_step(const Graph& g, const CostModel& model, const NodeState& s,
                     const SimConfig& cfg);

// Iterates from `initial`. Requires cfg.h > 0.
TrialTrace simulate(const Graph& g, const CostModel& model, const SimConfig& cfg,
                    NodeState initial);

// initialize + simulate, resolving cfg.h == 0 to the default step. Throws
// InvalidConfig when an explicit h exceeds stability_max_step.
TrialTrace run(const Graph& g, const CostModel& model, const SimConfig& cfg, Rng& rng);

// 1.8 over a Gershgorin bound on the Jacobian spectral radius, with the
// Hessian evaluated at probe.x. Infinity when the bound is zero.
double stability_max_step(const Graph& g, double alpha, const CostModel& model,
                          const NodeState& probe);

}  // namespace clustopt
