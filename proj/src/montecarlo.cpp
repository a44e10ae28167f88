#include "clustopt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "clustopt/error.hpp"
#include "clustopt/io.hpp"
#include "clustopt/spectral.hpp"

namespace clustopt {

namespace {

using ordered_json = nlohmann::ordered_json;

// Reserved label slots for the streams shared across topologies.
constexpr std::uint64_t kCostStream = 0xFFFFFFFFULL;
constexpr std::uint64_t kInitStream = 0xFFFFFFFEULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Neumaier summation in insertion order.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    carry_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
    ++count_;
  }
  double mean() const { return count_ == 0 ? 0.0 : (sum_ + carry_) / static_cast<double>(count_); }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
  std::size_t count_ = 0;
};

struct TrialResult {
  bool ok = false;
  std::string error;
  TrialTrace trace;
  std::size_t n = 0;
  double c = 0.0;
  double d = 0.0;
  double lambda2 = 0.0;
  std::optional<double> rate;
};

struct TrialInputs {
  Graph graph;
  CostModel model;
  NodeState initial;
};

TrialInputs prepare_trial(const McConfig& cfg, std::size_t label, std::size_t trial) {
  Graph g = trial_graph(cfg, label, trial);
  Rng cost_rng(cost_seed(cfg, trial));
  CostModel model = sample_cost(cfg.cost, g.num_nodes(), cost_rng);
  Rng init_rng(init_seed(cfg, trial));
  NodeState initial = initialize(g, model, cfg.sim, init_rng);
  return {std::move(g), std::move(model), std::move(initial)};
}

std::vector<std::size_t> step_grid(const SimConfig& sim) {
  std::vector<std::size_t> grid{0};
  for (std::size_t k = 1; k <= sim.steps; ++k) {
    if (k % sim.record_stride == 0 || k == sim.steps) grid.push_back(k);
  }
  return grid;
}

// Early-stopped traces hold their last record for the rest of the grid.
std::vector<double> aligned(const std::vector<double>& values, std::size_t length) {
  std::vector<double> out(values);
  out.resize(length, values.back());
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Ba: return "ba";
    case GeneratorKind::Hk: return "hk";
    case GeneratorKind::File: return "file";
  }
  return "unknown";
}

std::string_view to_string(ResamplePolicy policy) {
  return policy == ResamplePolicy::PerTrial ? "per_trial" : "once";
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t label_index,
                         std::uint64_t trial_index) {
  if (label_index > 0xFFFFFFFFULL || trial_index > 0xFFFFFFFFULL) {
    throw Error(Errc::IndexOutOfRange, "trial_seed indices must fit in 32 bits");
  }
  return mix64(mix64(base_seed) ^ ((label_index << 32) | trial_index));
}

std::uint64_t cost_seed(const McConfig& cfg, std::size_t trial_index) {
  const std::size_t slot = cfg.cost.resample == ResamplePolicy::Once ? 0 : trial_index;
  return trial_seed(cfg.base_seed, kCostStream, slot);
}

std::uint64_t init_seed(const McConfig& cfg, std::size_t trial_index) {
  return trial_seed(cfg.base_seed, kInitStream, trial_index);
}

std::size_t label_slot(const McConfig& cfg, std::size_t label_index) {
  const std::string& label = cfg.topologies.at(label_index).label;
  std::size_t rank = 0;
  for (const auto& t : cfg.topologies) rank += t.label < label;
  return rank;
}

Graph trial_graph(const McConfig& cfg, std::size_t label_index, std::size_t trial_index) {
  const GeneratorSpec& spec = cfg.topologies.at(label_index).generator;
  Rng rng(trial_seed(cfg.base_seed, label_slot(cfg, label_index), trial_index));
  Graph g;
  switch (spec.kind) {
    case GeneratorKind::Ba:
      g = generate_ba({spec.n, spec.links, spec.seed_size}, rng);
      break;
    case GeneratorKind::Hk:
      g = generate_hk({spec.n, spec.links, spec.triad_links, spec.seed_size}, rng);
      break;
    case GeneratorKind::File:
      g = read_graph(spec.path);
      break;
  }
  return assign_random_weights(g, rng, cfg.weight_low, cfg.weight_high);
}

CostModel sample_cost(const CostSpec& spec, std::size_t n, Rng& rng) {
  if (spec.family == CostFamily::MlLoss) return CostModel(sample_mlloss(n, spec.m, rng));
  return CostModel(sample_quartic(n, rng));
}

McSummary run_mc(const McConfig& cfg) {
  if (cfg.trials == 0) throw Error(Errc::InvalidConfig, "trials must be >= 1");
  if (cfg.topologies.empty()) throw Error(Errc::InvalidConfig, "no topologies configured");
  std::set<std::string> labels;
  for (const auto& t : cfg.topologies) {
    if (!labels.insert(t.label).second) {
      throw Error(Errc::InvalidConfig, "duplicate topology label '" + t.label + "'");
    }
  }
  if (cfg.sim.record_stride == 0) throw Error(Errc::InvalidConfig, "record_stride must be >= 1");

  const std::size_t num_labels = cfg.topologies.size();
  const std::size_t units = num_labels * cfg.trials;
  std::vector<TrialResult> results(units);

  // One step size for the whole campaign keeps traces comparable in time.
  double h = cfg.sim.h;
  if (h == 0.0) {
    std::vector<double> bounds(units, std::numeric_limits<double>::infinity());
    parallel_for(units, cfg.threads, [&](std::size_t k) {
      try {
        const TrialInputs in = prepare_trial(cfg, k / cfg.trials, k % cfg.trials);
        bounds[k] = stability_max_step(in.graph, cfg.sim.alpha, in.model, in.initial);
      } catch (const Error&) {
        // Reported again, per trial, in the simulation pass.
      }
    });
    const double h_max = *std::min_element(bounds.begin(), bounds.end());
    if (!std::isfinite(h_max)) {
      throw Error(Errc::InvalidConfig, "cannot derive a finite default step");
    }
    h = 0.5 * h_max;
  }
  SimConfig sim = cfg.sim;
  sim.h = h;

  parallel_for(units, cfg.threads, [&](std::size_t k) {
    TrialResult& r = results[k];
    try {
      const TrialInputs in = prepare_trial(cfg, k / cfg.trials, k % cfg.trials);
      const double h_max = stability_max_step(in.graph, sim.alpha, in.model, in.initial);
      if (sim.h > h_max) {
        throw Error(Errc::InvalidConfig, "step h=" + format_double(sim.h) +
                                             " exceeds this trial's stability bound " +
                                             format_double(h_max));
      }
      const DegreeStats deg = degree_stats(in.graph);
      r.n = in.graph.num_nodes();
      r.d = deg.average;
      r.c = global_clustering(in.graph).global;
      r.lambda2 = lambda2_laplacian(in.graph);
      if (cfg.compute_rate) {
        const OptimumCertificate cert = aggregate_optimum(in.model);
        Eigen::VectorXd hess(static_cast<Eigen::Index>(r.n));
        for (std::size_t i = 0; i < r.n; ++i) hess(static_cast<Eigen::Index>(i)) = in.model.hessian(i, cert.x_star);
        JacobianSpec spec = make_jacobian_spec(in.graph, sim.alpha, hess);
        r.rate = convergence_rate(spec, default_zero_tol(spec.laplacian));
      }
      r.trace = simulate(in.graph, in.model, sim, in.initial);
      r.ok = true;
    } catch (const Error& e) {
      r.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  McSummary summary;
  summary.trial_count = cfg.trials;
  summary.base_seed = cfg.base_seed;
  summary.h = h;
  summary.resample = cfg.cost.resample;
  const std::vector<std::size_t> grid = step_grid(sim);

  for (std::size_t label = 0; label < num_labels; ++label) {
    LabelSummary s;
    s.label = cfg.topologies[label].label;
    s.steps = grid;
    std::vector<Accumulator> gap(grid.size()), lyap(grid.size()), cons(grid.size()),
        track(grid.size());
    Accumulator c, d, l2, rate, final_gap;
    std::vector<double> finals;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      s.seeds.push_back(trial_seed(cfg.base_seed, label_slot(cfg, label), trial));
      const TrialResult& r = results[label * cfg.trials + trial];
      if (!r.ok) {
        s.errors.push_back("trial " + std::to_string(trial) + ": " + r.error);
        continue;
      }
      if (r.trace.diverged) {
        ++s.diverged;
        summary.warnings.push_back("label " + s.label + " trial " + std::to_string(trial) +
                                   " diverged and was excluded");
        continue;
      }
      ++s.trials_ok;
      s.n = r.n;
      const auto g = aligned(r.trace.gap, grid.size());
      const auto v = aligned(r.trace.lyapunov, grid.size());
      const auto q = aligned(r.trace.consensus_residual, grid.size());
      const auto t = aligned(r.trace.tracking_residual, grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        gap[k].add(g[k]);
        lyap[k].add(v[k]);
        cons[k].add(q[k]);
        track[k].add(t[k]);
      }
      c.add(r.c);
      d.add(r.d);
      l2.add(r.lambda2);
      if (r.rate) rate.add(*r.rate);
      final_gap.add(g.back());
      finals.push_back(g.back());
    }
    if (s.trials_ok == 0) {
      throw Error(Errc::InvalidConfig,
                  "every trial of label '" + s.label + "' failed" +
                      (s.errors.empty() ? std::string(" (diverged)") : "; first: " + s.errors.front()));
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      s.mean_gap.push_back(gap[k].mean());
      s.mean_lyapunov.push_back(lyap[k].mean());
      s.mean_consensus_residual.push_back(cons[k].mean());
      s.mean_tracking_residual.push_back(track[k].mean());
    }
    s.mean_c = c.mean();
    s.mean_d = d.mean();
    s.mean_lambda2 = l2.mean();
    if (cfg.compute_rate) s.mean_rate = rate.mean();
    s.final_gap_mean = final_gap.mean();
    if (finals.size() > 1) {
      Accumulator sq;
      for (double f : finals) sq.add((f - s.final_gap_mean) * (f - s.final_gap_mean));
      s.final_gap_std = std::sqrt(sq.mean() * static_cast<double>(finals.size()) /
                                  static_cast<double>(finals.size() - 1));
    }
    summary.labels.push_back(std::move(s));
  }
  return summary;
}

std::vector<Verdict> compare_topologies(const McSummary& summary, std::size_t at_index) {
  std::vector<Verdict> out;
  for (const LabelSummary& s : summary.labels) {
    if (at_index >= s.mean_gap.size()) {
      throw Error(Errc::IndexOutOfRange, "record index " + std::to_string(at_index) +
                                             " beyond trajectory of length " +
                                             std::to_string(s.mean_gap.size()));
    }
    out.push_back({s.label, s.mean_gap[at_index], s.mean_c});
  }
  std::sort(out.begin(), out.end(), [](const Verdict& a, const Verdict& b) {
    return a.gap != b.gap ? a.gap < b.gap : a.label < b.label;
  });
  return out;
}

std::vector<ScatterRow> scatter_report(std::span<const std::pair<std::string, Graph>> graphs,
                                       double alpha, const CostSpec& cost,
                                       std::uint64_t cost_seed_value) {
  std::vector<ScatterRow> rows;
  for (const auto& [name, g] : graphs) {
    ScatterRow row;
    row.name = name;
    row.n = g.num_nodes();
    row.d = degree_stats(g).average;
    row.c = global_clustering(g).global;
    if (is_connected(g) && g.num_nodes() >= 2) {
      row.lambda2 = lambda2_laplacian(g);
      Rng rng(cost_seed_value);
      const CostModel model = sample_cost(cost, g.num_nodes(), rng);
      const OptimumCertificate cert = aggregate_optimum(model);
      Eigen::VectorXd hess(static_cast<Eigen::Index>(g.num_nodes()));
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        hess(static_cast<Eigen::Index>(i)) = model.hessian(i, cert.x_star);
      }
      JacobianSpec spec = make_jacobian_spec(g, alpha, hess);
      row.rate = convergence_rate(spec, default_zero_tol(spec.laplacian));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

McConfig mc_config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  McConfig cfg;
  try {
    const auto doc = ordered_json::parse(text);
    for (const auto& t : doc.at("topologies")) {
      TopologySpec spec;
      spec.label = t.at("label").get<std::string>();
      const auto& gen = t.at("generator");
      const auto model = gen.at("model").get<std::string>();
      if (model == "ba" || model == "hk") {
        spec.generator.kind = model == "ba" ? GeneratorKind::Ba : GeneratorKind::Hk;
        spec.generator.n = gen.at("n").get<std::size_t>();
        spec.generator.links = gen.at("l").get<std::size_t>();
        spec.generator.triad_links = gen.value("l2", std::size_t{0});
        spec.generator.seed_size = gen.value("seed_size", std::size_t{0});
        if (model == "ba" && spec.generator.triad_links != 0) {
          throw Error(Errc::InvalidConfig, "model 'ba' does not take l2");
        }
      } else if (model == "file") {
        spec.generator.kind = GeneratorKind::File;
        std::filesystem::path p = gen.at("path").get<std::string>();
        spec.generator.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      } else {
        throw Error(Errc::InvalidConfig, "unknown generator model '" + model + "'");
      }
      cfg.topologies.push_back(std::move(spec));
    }
    if (doc.contains("cost_spec")) {
      const auto& c = doc.at("cost_spec");
      const auto family = c.value("family", std::string("quartic"));
      if (family != "quartic" && family != "mlloss") {
        throw Error(Errc::InvalidConfig, "unknown cost family '" + family + "'");
      }
      cfg.cost.family = family == "mlloss" ? CostFamily::MlLoss : CostFamily::Quartic;
      cfg.cost.m = c.value("m", std::size_t{20});
      const auto resample = c.value("resample_cost", std::string("per_trial"));
      if (resample != "per_trial" && resample != "once") {
        throw Error(Errc::InvalidConfig, "resample_cost must be per_trial or once");
      }
      cfg.cost.resample = resample == "once" ? ResamplePolicy::Once : ResamplePolicy::PerTrial;
    }
    if (doc.contains("sim")) {
      const auto& s = doc.at("sim");
      cfg.sim.alpha = s.value("alpha", cfg.sim.alpha);
      cfg.sim.h = s.contains("h") && !s.at("h").is_null() ? s.at("h").get<double>() : 0.0;
      cfg.sim.steps = s.value("steps", cfg.sim.steps);
      cfg.sim.record_stride = s.value("record_stride", cfg.sim.record_stride);
      cfg.sim.gap_tolerance = s.value("gap_tolerance", cfg.sim.gap_tolerance);
      if (s.contains("x_init_range")) {
        const auto range = s.at("x_init_range").get<std::vector<double>>();
        if (range.size() != 2) throw Error(Errc::InvalidConfig, "x_init_range needs 2 values");
        cfg.sim.x_init_low = range[0];
        cfg.sim.x_init_high = range[1];
      }
    }
    cfg.trials = doc.value("trials", cfg.trials);
    cfg.base_seed = doc.value("base_seed", cfg.base_seed);
    if (doc.contains("weight_range")) {
      const auto range = doc.at("weight_range").get<std::vector<double>>();
      if (range.size() != 2) throw Error(Errc::InvalidConfig, "weight_range needs 2 values");
      cfg.weight_low = range[0];
      cfg.weight_high = range[1];
    }
    cfg.compute_rate = doc.value("compute_rate", cfg.compute_rate);
    cfg.threads = doc.value("threads", cfg.threads);
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("campaign config: ") + e.what());
  }
  return cfg;
}

std::string mc_config_to_json(const McConfig& cfg) {
  ordered_json doc;
  ordered_json topologies = ordered_json::array();
  for (const auto& t : cfg.topologies) {
    ordered_json gen;
    gen["model"] = std::string(to_string(t.generator.kind));
    if (t.generator.kind == GeneratorKind::File) {
      gen["path"] = t.generator.path.string();
    } else {
      gen["n"] = t.generator.n;
      gen["l"] = t.generator.links;
      if (t.generator.kind == GeneratorKind::Hk) gen["l2"] = t.generator.triad_links;
      if (t.generator.seed_size != 0) gen["seed_size"] = t.generator.seed_size;
    }
    topologies.push_back({{"label", t.label}, {"generator", gen}});
  }
  doc["topologies"] = std::move(topologies);
  doc["cost_spec"] = {{"family", std::string(to_string(cfg.cost.family))},
                      {"m", cfg.cost.m},
                      {"resample_cost", std::string(to_string(cfg.cost.resample))}};
  ordered_json sim;
  sim["alpha"] = cfg.sim.alpha;
  if (cfg.sim.h > 0.0) {
    sim["h"] = cfg.sim.h;
  } else {
    sim["h"] = nullptr;
  }
  sim["steps"] = cfg.sim.steps;
  sim["record_stride"] = cfg.sim.record_stride;
  sim["gap_tolerance"] = cfg.sim.gap_tolerance;
  sim["x_init_range"] = {cfg.sim.x_init_low, cfg.sim.x_init_high};
  doc["sim"] = std::move(sim);
  doc["trials"] = cfg.trials;
  doc["base_seed"] = cfg.base_seed;
  doc["weight_range"] = {cfg.weight_low, cfg.weight_high};
  doc["compute_rate"] = cfg.compute_rate;
  doc["threads"] = cfg.threads;
  return doc.dump(2);
}

std::string summary_to_json(const McSummary& summary) {
  ordered_json doc;
  doc["trial_count"] = summary.trial_count;
  doc["base_seed"] = summary.base_seed;
  doc["h"] = summary.h;
  doc["resample_cost"] = std::string(to_string(summary.resample));
  doc["warnings"] = summary.warnings;
  ordered_json labels = ordered_json::array();
  for (const LabelSummary& s : summary.labels) {
    ordered_json l;
    l["label"] = s.label;
    l["n"] = s.n;
    l["trials_ok"] = s.trials_ok;
    l["diverged"] = s.diverged;
    l["errors"] = s.errors;
    l["seeds"] = s.seeds;
    l["mean_c"] = s.mean_c;
    l["mean_d"] = s.mean_d;
    l["mean_lambda2"] = s.mean_lambda2;
    if (s.mean_rate) {
      l["mean_rate"] = *s.mean_rate;
    } else {
      l["mean_rate"] = nullptr;
    }
    l["final_gap_mean"] = s.final_gap_mean;
    l["final_gap_std"] = s.final_gap_std;
    l["steps"] = s.steps;
    l["mean_gap"] = s.mean_gap;
    labels.push_back(std::move(l));
  }
  doc["labels"] = std::move(labels);
  return doc.dump(2) + "\n";
}

void write_mc_outputs(const McSummary& summary, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "summary.json", summary_to_json(summary));
  std::vector<ScatterRow> rows;
  for (const LabelSummary& s : summary.labels) {
    TrialTrace mean;
    mean.recorded_steps = s.steps;
    mean.gap = s.mean_gap;
    mean.lyapunov = s.mean_lyapunov;
    mean.consensus_residual = s.mean_consensus_residual;
    mean.tracking_residual = s.mean_tracking_residual;
    write_trace(mean, dir / ("mean_trace_" + s.label + ".csv"));
    rows.push_back({s.label, s.n, s.mean_d, s.mean_c, s.mean_lambda2, s.mean_rate});
  }
  write_text(dir / "scatter.csv", scatter_to_csv(rows));
}

}  // namespace clustopt
