#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <vector>

#include "clustopt/error.hpp"
#include "clustopt/io.hpp"
#include "clustopt/montecarlo.hpp"
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

McConfig small_campaign() {
  McConfig cfg;
  cfg.topologies = {{"SF", {GeneratorKind::Ba, 60, 3, 0, 0, {}}},
                    {"CSF", {GeneratorKind::Hk, 60, 3, 1, 0, {}}}};
  cfg.cost.family = CostFamily::Quartic;
  cfg.sim.steps = 300;
  cfg.sim.record_stride = 50;
  cfg.trials = 4;
  cfg.base_seed = 123;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("trial seeds") {
  CHECK(trial_seed(5, 0, 0) == trial_seed(5, 0, 0));
  CHECK(trial_seed(5, 0, 1) != trial_seed(5, 1, 0));
  std::set<std::uint64_t> a, b;
  for (std::uint64_t l = 0; l < 100; ++l) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      a.insert(trial_seed(1, l, t));
      b.insert(trial_seed(2, l, t));
    }
  }
  CHECK(a.size() == 10000);
  CHECK(b.size() == 10000);
  std::vector<std::uint64_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  CHECK(common.empty());
  CHECK(code_of([] { trial_seed(0, 1ULL << 32, 0); }) == Errc::IndexOutOfRange);
}

TEST_CASE("campaigns are bit reproducible across thread counts") {
  McConfig cfg = small_campaign();
  const std::string one = summary_to_json(run_mc(cfg));
  CHECK(one == summary_to_json(run_mc(cfg)));
  cfg.threads = 3;
  CHECK(one == summary_to_json(run_mc(cfg)));
}

TEST_CASE("single-trial summary equals the trial trace") {
  McConfig cfg = small_campaign();
  cfg.trials = 1;
  cfg.topologies.resize(1);
  const McSummary s = run_mc(cfg);
  const Graph g = trial_graph(cfg, 0, 0);
  Rng cost_rng(cost_seed(cfg, 0));
  const CostModel model = sample_cost(cfg.cost, g.num_nodes(), cost_rng);
  Rng init_rng(init_seed(cfg, 0));
  const NodeState s0 = initialize(g, model, cfg.sim, init_rng);
  SimConfig sim = cfg.sim;
  sim.h = s.h;
  const TrialTrace t = simulate(g, model, sim, s0);
  CHECK(s.labels[0].steps == t.recorded_steps);
  CHECK(s.labels[0].mean_gap == t.gap);
  CHECK(s.labels[0].mean_lyapunov == t.lyapunov);
  CHECK(s.labels[0].mean_c == global_clustering(g).global);
  CHECK(s.labels[0].mean_lambda2 == lambda2_laplacian(g));
  CHECK(s.h == doctest::Approx(0.5 * stability_max_step(g, sim.alpha, model, s0)));
}

TEST_CASE("reordering labels does not change any mean") {
  McConfig cfg = small_campaign();
  const McSummary a = run_mc(cfg);
  std::reverse(cfg.topologies.begin(), cfg.topologies.end());
  const McSummary b = run_mc(cfg);
  REQUIRE(a.labels.size() == b.labels.size());
  for (const LabelSummary& la : a.labels) {
    const auto it = std::find_if(b.labels.begin(), b.labels.end(),
                                 [&](const LabelSummary& x) { return x.label == la.label; });
    REQUIRE(it != b.labels.end());
    CHECK(it->mean_gap == la.mean_gap);
    CHECK(it->mean_c == la.mean_c);
    CHECK(it->mean_lambda2 == la.mean_lambda2);
    CHECK(it->final_gap_mean == la.final_gap_mean);
  }
}

TEST_CASE("dropping one trial moves each mean point by at most range / trials") {
  McConfig cfg = small_campaign();
  cfg.topologies.resize(1);
  cfg.sim.h = 1e-3;
  const McSummary full = run_mc(cfg);
  McConfig fewer = cfg;
  fewer.trials = cfg.trials - 1;
  const McSummary part = run_mc(fewer);

  std::vector<std::vector<double>> gaps;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Graph g = trial_graph(cfg, 0, t);
    Rng cost_rng(cost_seed(cfg, t));
    const CostModel model = sample_cost(cfg.cost, g.num_nodes(), cost_rng);
    Rng init_rng(init_seed(cfg, t));
    gaps.push_back(simulate(g, model, cfg.sim, initialize(g, model, cfg.sim, init_rng)).gap);
  }
  for (std::size_t k = 0; k < full.labels[0].mean_gap.size(); ++k) {
    double lo = gaps[0][k], hi = gaps[0][k];
    for (const auto& g : gaps) {
      lo = std::min(lo, g[k]);
      hi = std::max(hi, g[k]);
    }
    const double moved = std::abs(full.labels[0].mean_gap[k] - part.labels[0].mean_gap[k]);
    CHECK(moved <= (hi - lo) / static_cast<double>(cfg.trials) + 1e-12 * hi);
  }
}

TEST_CASE("summary contents") {
  McConfig cfg = small_campaign();
  cfg.compute_rate = true;
  const McSummary s = run_mc(cfg);
  CHECK(s.trial_count == 4);
  CHECK(s.h > 0.0);
  for (const LabelSummary& l : s.labels) {
    CHECK(l.trials_ok == 4);
    CHECK(l.seeds.size() == 4);
    CHECK(l.mean_c >= 0.0);
    CHECK(l.mean_c <= 1.0);
    CHECK(l.mean_gap.size() == s.labels[0].mean_gap.size());
    CHECK(l.mean_rate.has_value());
    CHECK(*l.mean_rate > 0.0);
    CHECK(l.mean_gap.back() == doctest::Approx(l.final_gap_mean));
    CHECK(l.final_gap_std >= 0.0);
  }
}

TEST_CASE("campaign validation") {
  McConfig cfg = small_campaign();
  cfg.topologies[1].label = "SF";
  CHECK(code_of([&] { run_mc(cfg); }) == Errc::InvalidConfig);
  cfg = small_campaign();
  cfg.trials = 0;
  CHECK(code_of([&] { run_mc(cfg); }) == Errc::InvalidConfig);
  cfg = small_campaign();
  cfg.topologies = {{"missing", {GeneratorKind::File, 0, 1, 0, 0, "/nonexistent/graph.json"}}};
  CHECK(code_of([&] { run_mc(cfg); }) == Errc::InvalidConfig);
}

TEST_CASE("compare_topologies") {
  McSummary s;
  s.labels.resize(3);
  s.labels[0].label = "b";
  s.labels[0].mean_gap = {1.0, 0.5};
  s.labels[1].label = "a";
  s.labels[1].mean_gap = {1.0, 0.5};
  s.labels[2].label = "c";
  s.labels[2].mean_gap = {1.0, 0.1};
  const auto v = compare_topologies(s, 1);
  CHECK(v[0].label == "c");
  CHECK(v[1].label == "a");
  CHECK(v[2].label == "b");
  CHECK(code_of([&] { compare_topologies(s, 2); }) == Errc::IndexOutOfRange);

  McSummary single;
  single.labels.resize(1);
  single.labels[0].label = "only";
  single.labels[0].mean_gap = {3.0};
  CHECK(compare_topologies(single, 0).size() == 1);
}

TEST_CASE("scatter_report") {
  const std::vector<std::pair<std::string, Graph>> none;
  CHECK(scatter_report(none, 0.001, {}, 0).empty());

  const std::vector<Edge> two{{0, 1, 1}, {2, 3, 1}};
  const std::vector<std::pair<std::string, Graph>> graphs{
      {"k6", oracle::complete(6)}, {"split", Graph::from_edges(4, two)}};
  const auto rows = scatter_report(graphs, 0.001, {}, 7);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "k6");
  CHECK(rows[0].n == 6);
  CHECK(rows[0].d == 5.0);
  CHECK(rows[0].c == 1.0);
  CHECK(*rows[0].lambda2 == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(rows[0].rate.has_value());
  CHECK_FALSE(rows[1].lambda2.has_value());
  CHECK_FALSE(rows[1].rate.has_value());
  CHECK(scatter_to_csv(rows).starts_with("name,n,d,C,lambda2,rate\nk6,6,5,1,"));
  CHECK(scatter_to_csv(rows).ends_with("split,4,1,0,,\n"));
}

TEST_CASE("config JSON round trip") {
  McConfig cfg = small_campaign();
  cfg.cost.resample = ResamplePolicy::Once;
  cfg.sim.h = 0.01;
  const std::string text = mc_config_to_json(cfg);
  CHECK(mc_config_to_json(mc_config_from_json(text)) == text);
  CHECK(code_of([] { mc_config_from_json("{"); }) == Errc::ParseError);
  CHECK(code_of([] {
          mc_config_from_json(R"({"topologies":[{"label":"x","generator":{"model":"er"}}]})");
        }) == Errc::InvalidConfig);
}

TEST_CASE("campaign outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "clustopt_mc_outputs";
  std::filesystem::remove_all(dir);
  write_mc_outputs(run_mc(small_campaign()), dir);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(read_text(dir / "mean_trace_SF.csv")
            .starts_with("step,gap,lyapunov,consensus_residual,tracking_residual\n0,"));
  CHECK(std::filesystem::exists(dir / "mean_trace_CSF.csv"));
  CHECK(read_text(dir / "scatter.csv").starts_with("name,n,d,C,lambda2,rate\n"));
  std::filesystem::remove_all(dir);
}
