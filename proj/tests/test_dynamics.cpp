#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "clustopt/costs.hpp"
#include "clustopt/dynamics.hpp"
#include "clustopt/error.hpp"
#include "clustopt/graph.hpp"
#include "clustopt/spectral.hpp"
#include "oracles.hpp"

using namespace clustopt;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected clustopt::Error");
  return Errc::IoError;
}

double sum_grad(const CostModel& m, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += m.gradient(i, x[i]);
  return s;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Final x after integrating to time `horizon` with step h.
std::vector<double> final_x(const Graph& g, const CostModel& m, const NodeState& s0, double h,
                            double horizon) {
  SimConfig cfg;
  cfg.h = h;
  NodeState s = s0;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / h));
  for (std::size_t k = 0; k < steps; ++k) s = euler_step(g, m, s, cfg);
  return s.x;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d);
}

}  // namespace

TEST_CASE("initialize") {
  const Graph one = Graph::from_edges(1, std::vector<Edge>{});
  const CostModel q(QuarticModel{{0.01}, {0.0}});
  SimConfig cfg;
  cfg.x_init_low = cfg.x_init_high = 2.0;
  Rng rng(0);
  const NodeState s = initialize(one, q, cfg, rng);
  CHECK(s.x[0] == 2.0);
  CHECK(s.y[0] == doctest::Approx(0.32).epsilon(1e-15));

  const CostModel at_b(QuarticModel{{0.01, 0.02}, {3.0, 3.0}});
  cfg.x_init_low = cfg.x_init_high = 3.0;
  const NodeState st = initialize(oracle::path(2), at_b, cfg, rng);
  CHECK(st.y[0] == 0.0);
  CHECK(st.y[1] == 0.0);

  Rng a(5), b(5);
  SimConfig wide;
  Rng mr(1);
  const CostModel m(sample_quartic(20, mr));
  const Graph g = oracle::cycle(20);
  const NodeState s1 = initialize(g, m, wide, a);
  const NodeState s2 = initialize(g, m, wide, b);
  CHECK(s1.x == s2.x);
  CHECK(s1.y == s2.y);
  for (double x : s1.x) {
    CHECK(x >= -5.0);
    CHECK(x <= 5.0);
  }

  const std::vector<Edge> two{{0, 1, 1}, {2, 3, 1}};
  const CostModel four(QuarticModel{{0.01, 0.01, 0.01, 0.01}, {1, 2, 3, 4}});
  CHECK(code_of([&] { initialize(Graph::from_edges(4, two), four, wide, a); }) ==
        Errc::Disconnected);
}

TEST_CASE("euler step on a single edge") {
  const CostModel q(QuarticModel{{0.01, 0.01}, {0.0, 0.0}});
  SimConfig cfg;
  cfg.h = 0.1;
  cfg.alpha = 3.0;
  const NodeState s = euler_step(oracle::path(2), q, {{1.0, 0.0}, {0.0, 0.0}}, cfg);
  CHECK(s.x[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.x[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("equilibrium is a fixed point") {
  Rng rng(3);
  const CostModel m(sample_quartic(10, rng));
  const double xs = aggregate_optimum(m).x_star;
  const Graph g = oracle::cycle(10);
  SimConfig cfg;
  cfg.h = 0.01;
  NodeState s{std::vector<double>(10, xs), std::vector<double>(10, 0.0)};
  const NodeState next = euler_step(g, m, s, cfg);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(next.x[i] == s.x[i]);
    CHECK(next.y[i] == s.y[i]);
  }
}

TEST_CASE("euler step reports divergence") {
  const CostModel q(QuarticModel{{0.01, 0.01}, {0.0, 0.0}});
  SimConfig cfg;
  cfg.h = 0.1;
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { euler_step(oracle::path(2), q, {{inf, 0.0}, {0.0, 0.0}}, cfg); }) ==
        Errc::NumericalDivergence);
}

TEST_CASE("tracking conservation holds step by step") {
  std::mt19937_64 grng(4);
  Rng rng(4);
  const Graph g = assign_random_weights(oracle::random_connected(30, 0.1, grng), rng, 0.5, 1.5);
  for (const CostModel& m : {CostModel(sample_quartic(30, rng)), CostModel(sample_mlloss(30, 20, rng))}) {
    SimConfig cfg;
    NodeState s = initialize(g, m, cfg, rng);
    cfg.h = 0.5 * stability_max_step(g, cfg.alpha, m, s);
    const double c0 = sum(s.y) - sum_grad(m, s.x);
    CHECK(std::abs(c0) <= 1e-12 * (1.0 + std::abs(sum_grad(m, s.x))));
    double worst = 0.0;
    double scale = 0.0;
    for (int k = 0; k < 2000; ++k) {
      s = euler_step(g, m, s, cfg);
      const double sg = sum_grad(m, s.x);
      worst = std::max(worst, std::abs(sum(s.y) - sg));
      scale = std::max(scale, std::abs(sg));
    }
    CHECK(worst <= 1e-9 * (1.0 + scale));
  }
}

TEST_CASE("simulate records the requested steps") {
  Rng rng(8);
  const CostModel m(sample_quartic(10, rng));
  const Graph g = oracle::cycle(10);
  SimConfig cfg;
  cfg.steps = 25;
  cfg.record_stride = 10;
  const TrialTrace t = run(g, m, cfg, rng);
  CHECK(t.recorded_steps == std::vector<std::size_t>{0, 10, 20, 25});
  CHECK(t.gap.size() == 4);
  CHECK(t.lyapunov.size() == 4);
  CHECK(t.consensus_residual.size() == 4);
  CHECK(t.tracking_residual.size() == 4);
  for (double v : t.lyapunov) CHECK(v >= 0.0);
  CHECK(t.h > 0.0);

  SimConfig none = cfg;
  none.steps = 0;
  const TrialTrace z = run(g, m, none, rng);
  CHECK(z.recorded_steps == std::vector<std::size_t>{0});
}

TEST_CASE("gap tolerance stops early") {
  Rng rng(8);
  const CostModel m(sample_quartic(10, rng));
  SimConfig cfg;
  cfg.steps = 200000;
  cfg.record_stride = 100;
  cfg.gap_tolerance = 1e-3;
  const TrialTrace t = run(oracle::complete(10), m, cfg, rng);
  CHECK(t.gap.back() <= 1e-3);
  CHECK(t.recorded_steps.back() < 200000);
}

TEST_CASE("symmetric pair converges to the origin") {
  const CostModel q(QuarticModel{{0.01, 0.01}, {-5.0, 5.0}});
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.steps = 100000;
  cfg.record_stride = 1000;
  Rng rng(1);
  NodeState s = initialize(oracle::path(2), q, cfg, rng);
  const TrialTrace t = simulate(oracle::path(2), q, cfg, s);
  CHECK(t.gap.back() <= 1e-6);
  for (std::size_t k = 0; k < 100000; ++k) s = euler_step(oracle::path(2), q, s, cfg);
  CHECK(std::abs(s.x[0]) <= 1e-6);
  CHECK(std::abs(s.x[1]) <= 1e-6);
}

TEST_CASE("explicit step above the stability bound is rejected") {
  Rng rng(2);
  const CostModel m(sample_quartic(4, rng));
  SimConfig cfg;
  cfg.h = 10.0;
  CHECK(code_of([&] { run(oracle::complete(4), m, cfg, rng); }) == Errc::InvalidConfig);
  SimConfig bad;
  bad.h = 0.0;
  NodeState s{std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)};
  CHECK(code_of([&] { simulate(oracle::complete(4), m, bad, s); }) == Errc::InvalidConfig);
}

TEST_CASE("stability bound") {
  const CostModel zero(QuarticModel{{0.01, 0.01, 0.01, 0.01}, {1, 1, 1, 1}});
  const NodeState at_b{std::vector<double>(4, 1.0), std::vector<double>(4, 0.0)};
  CHECK(stability_max_step(oracle::complete(4), 0.0, zero, at_b) == doctest::Approx(0.3));
  const Graph empty = Graph::from_edges(4, std::vector<Edge>{});
  CHECK(std::isinf(stability_max_step(empty, 0.0, zero, at_b)));

  Rng rng(6);
  const CostModel m(sample_quartic(12, rng));
  NodeState probe{std::vector<double>(12, 0.5), std::vector<double>(12, 0.0)};
  std::vector<Edge> edges;
  double prev = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < 12; ++i) {
    for (NodeId j = i + 1; j < 12; j += 3) {
      edges.push_back({i, j, 1.0});
      const double h = stability_max_step(Graph::from_edges(12, edges), 1.0, m, probe);
      CHECK(h <= prev);
      prev = h;
    }
  }
}

TEST_CASE("Euler is first order") {
  std::mt19937_64 grng(10);
  Rng rng(10);
  const Graph g = assign_random_weights(oracle::random_connected(10, 0.3, grng), rng, 0.5, 1.5);
  const CostModel m(sample_quartic(10, rng));
  SimConfig cfg;
  const NodeState s0 = initialize(g, m, cfg, rng);
  const double h = 0.2 * stability_max_step(g, cfg.alpha, m, s0);
  const double horizon = 400 * h;
  const double e1 = distance(final_x(g, m, s0, h, horizon), final_x(g, m, s0, h / 10, horizon));
  const double e2 =
      distance(final_x(g, m, s0, h / 2, horizon), final_x(g, m, s0, h / 20, horizon));
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("late Lyapunov decay follows the spectral rate") {
  std::mt19937_64 grng(12);
  Rng rng(12);
  const Graph g = oracle::random_connected(12, 0.3, grng);
  const CostModel m(sample_quartic(12, rng));
  SimConfig cfg;
  cfg.steps = 20000;
  cfg.record_stride = 100;
  const TrialTrace t = run(g, m, cfg, rng);
  REQUIRE_FALSE(t.diverged);

  const double xs = aggregate_optimum(m).x_star;
  Eigen::VectorXd hess(12);
  for (std::size_t i = 0; i < 12; ++i) hess[i] = m.hessian(i, xs);
  const JacobianSpec spec = make_jacobian_spec(g, cfg.alpha, hess);
  const double rate = convergence_rate(spec, default_zero_tol(spec.laplacian));

  // Fit once transients are gone, stopping before round-off.
  std::vector<double> ts, ls;
  for (std::size_t k = 0; k < t.lyapunov.size(); ++k) {
    if (t.lyapunov[k] > 1e-8 * t.lyapunov[0]) continue;
    if (t.lyapunov[k] < 1e-18) break;
    ts.push_back(static_cast<double>(t.recorded_steps[k]) * t.h);
    ls.push_back(std::log(t.lyapunov[k]));
  }
  REQUIRE(ts.size() >= 10);
  const double mt = sum(ts) / ts.size();
  const double ml = sum(ls) / ls.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sxy += (ts[k] - mt) * (ls[k] - ml);
    sxx += (ts[k] - mt) * (ts[k] - mt);
  }
  CHECK(sxy / sxx == doctest::Approx(-2.0 * rate).epsilon(0.3));
}

TEST_CASE("relabelling nodes permutes the trace") {
  std::mt19937_64 grng(13);
  Rng rng(13);
  const Graph g = oracle::random_connected(15, 0.2, grng, 0.5, 1.5);
  const QuarticModel q = sample_quartic(15, rng);
  std::vector<NodeId> perm(15);
  for (NodeId i = 0; i < 15; ++i) perm[i] = (i * 7) % 15;
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.weight});
  const Graph gp = Graph::from_edges(15, edges);
  QuarticModel qp{std::vector<double>(15), std::vector<double>(15)};
  for (NodeId i = 0; i < 15; ++i) {
    qp.a[perm[i]] = q.a[i];
    qp.b[perm[i]] = q.b[i];
  }
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.steps = 2000;
  cfg.record_stride = 100;
  Rng r0(1);
  const NodeState s = initialize(g, CostModel(q), cfg, r0);
  NodeState sp{std::vector<double>(15), std::vector<double>(15)};
  for (NodeId i = 0; i < 15; ++i) {
    sp.x[perm[i]] = s.x[i];
    sp.y[perm[i]] = s.y[i];
  }
  const TrialTrace a = simulate(g, CostModel(q), cfg, s);
  const TrialTrace b = simulate(gp, CostModel(qp), cfg, sp);
  for (std::size_t k = 0; k < a.gap.size(); ++k) {
    CHECK(b.gap[k] == doctest::Approx(a.gap[k]).epsilon(1e-9));
    CHECK(b.lyapunov[k] == doctest::Approx(a.lyapunov[k]).epsilon(1e-9));
  }
}
