#include "clustopt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

// Flat edge arrays and scratch buffers for repeated steps over one graph.
class Integrator {
 public:
  Integrator(const Graph& g, const CostModel& model, const SimConfig& cfg)
      : model_(model), cfg_(cfg), n_(g.num_nodes()) {
    if (model.num_nodes() != n_) {
      throw Error(Errc::DimensionMismatch, "cost model and graph differ in node count");
    }
    for (const Edge& e : g.edges()) {
      from_.push_back(e.u);
      to_.push_back(e.v);
      weight_.push_back(e.weight);
    }
    lx_.resize(n_);
    ly_.resize(n_);
  }

  void load(const NodeState& s) {
    x_ = s.x;
    y_ = s.y;
    grad_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) grad_[i] = model_.gradient(i, x_[i]);
  }

  // Returns false if any component became non-finite.
  bool step() {
    std::fill(lx_.begin(), lx_.end(), 0.0);
    std::fill(ly_.begin(), ly_.end(), 0.0);
    for (std::size_t k = 0; k < from_.size(); ++k) {
      const std::size_t u = from_[k];
      const std::size_t v = to_[k];
      const double fx = weight_[k] * (x_[u] - x_[v]);
      const double fy = weight_[k] * (y_[u] - y_[v]);
      lx_[u] += fx;
      lx_[v] -= fx;
      ly_[u] += fy;
      ly_[v] -= fy;
    }
    const double h = cfg_.h;
    bool finite = true;
    for (std::size_t i = 0; i < n_; ++i) {
      x_[i] += h * (-lx_[i] - cfg_.alpha * y_[i]);
      const double g_next = model_.gradient(i, x_[i]);
      y_[i] += -h * ly_[i] + (g_next - grad_[i]);
      grad_[i] = g_next;
      finite = finite && std::isfinite(x_[i]) && std::isfinite(y_[i]);
    }
    return finite;
  }

  NodeState state() const { return {x_, y_}; }

  void record(TrialTrace& trace, std::size_t step, const OptimumCertificate& cert) const {
    const double nd = static_cast<double>(n_);
    double mean = 0.0;
    for (double v : x_) mean += v;
    mean /= nd;
    double consensus = 0.0;
    double lyap = 0.0;
    double sum_y = 0.0;
    double sum_grad = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      consensus += (x_[i] - mean) * (x_[i] - mean);
      lyap += (x_[i] - cert.x_star) * (x_[i] - cert.x_star) + y_[i] * y_[i];
      sum_y += y_[i];
      sum_grad += grad_[i];
    }
    trace.recorded_steps.push_back(step);
    trace.gap.push_back(model_.aggregate_value(mean) - cert.f_star);
    trace.lyapunov.push_back(0.5 * lyap);
    trace.consensus_residual.push_back(consensus);
    trace.tracking_residual.push_back(std::abs(sum_y - sum_grad));
  }

 private:
  const CostModel& model_;
  const SimConfig& cfg_;
  std::size_t n_;
  std::vector<std::size_t> from_;
  std::vector<std::size_t> to_;
  std::vector<double> weight_;
  std::vector<double> x_, y_, grad_, lx_, ly_;
};

void check_state(const Graph& g, const NodeState& s) {
  if (s.x.size() != g.num_nodes() || s.y.size() != g.num_nodes()) {
    throw Error(Errc::DimensionMismatch, "state and graph differ in node count");
  }
}

}  // namespace

NodeState initialize(const Graph& g, const CostModel& model, const SimConfig& cfg, Rng& rng) {
  if (!is_connected(g)) throw Error(Errc::Disconnected, "optimization requires a connected graph");
  if (model.num_nodes() != g.num_nodes()) {
    throw Error(Errc::DimensionMismatch, "cost model and graph differ in node count");
  }
  if (!(cfg.x_init_low <= cfg.x_init_high)) {
    throw Error(Errc::InvalidConfig, "x_init_range must satisfy low <= high");
  }
  std::uniform_real_distribution<double> dist(cfg.x_init_low, cfg.x_init_high);
  NodeState s;
  s.x.resize(g.num_nodes());
  s.y.resize(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    s.x[i] = cfg.x_init_low == cfg.x_init_high ? cfg.x_init_low : dist(rng);
    s.y[i] = model.gradient(i, s.x[i]);
  }
  return s;
}

NodeState euler_step(const Graph& g, const CostModel& model, const NodeState& s,
                     const SimConfig& cfg) {
  check_state(g, s);
  Integrator integrator(g, model, cfg);
  integrator.load(s);
  if (!integrator.step()) {
    throw Error(Errc::NumericalDivergence, "non-finite state after Euler step");
  }
  return integrator.state();
}

TrialTrace simulate(const Graph& g, const CostModel& model, const SimConfig& cfg,
                    NodeState initial) {
  check_state(g, initial);
  if (!(cfg.h > 0.0) || cfg.record_stride == 0) {
    throw Error(Errc::InvalidConfig, "simulation needs h > 0 and record_stride >= 1");
  }
  const OptimumCertificate cert = aggregate_optimum(model);
  Integrator integrator(g, model, cfg);
  integrator.load(initial);

  TrialTrace trace;
  trace.h = cfg.h;
  integrator.record(trace, 0, cert);
  auto converged = [&]() {
    return cfg.gap_tolerance > 0.0 && trace.gap.back() <= cfg.gap_tolerance;
  };
  if (converged()) return trace;
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    if (!integrator.step()) {
      trace.diverged = true;
      break;
    }
    if (k % cfg.record_stride == 0 || k == cfg.steps) {
      integrator.record(trace, k, cert);
      if (converged()) break;
    }
  }
  return trace;
}

TrialTrace run(const Graph& g, const CostModel& model, const SimConfig& cfg, Rng& rng) {
  NodeState initial = initialize(g, model, cfg, rng);
  const double h_max = stability_max_step(g, cfg.alpha, model, initial);
  SimConfig resolved = cfg;
  if (resolved.h == 0.0) {
    if (!std::isfinite(h_max)) {
      throw Error(Errc::InvalidConfig, "no finite default step for a graph without dynamics");
    }
    resolved.h = 0.5 * h_max;
  } else if (resolved.h > h_max) {
    throw Error(Errc::InvalidConfig,
                "step h=" + std::to_string(resolved.h) + " exceeds stability bound " +
                    std::to_string(h_max));
  }
  return simulate(g, model, resolved, std::move(initial));
}

double stability_max_step(const Graph& g, double alpha, const CostModel& model,
                          const NodeState& probe) {
  check_state(g, probe);
  double bound = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double deg = g.weighted_degree(i);
    const double hess = model.hessian(i, probe.x[i]);
    const double x_row = 2.0 * deg + std::abs(alpha);
    const double y_row = std::abs(hess) * 2.0 * deg + deg + std::abs(deg + alpha * hess);
    bound = std::max({bound, x_row, y_row});
  }
  return bound == 0.0 ? std::numeric_limits<double>::infinity() : 1.8 / bound;
}

}  // namespace clustopt
