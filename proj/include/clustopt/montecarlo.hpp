#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clustopt/costs.hpp"
#include "clustopt/dynamics.hpp"
#include "clustopt/generators.hpp"
#include "clustopt/graph.hpp"

namespace clustopt {

enum class GeneratorKind { Ba, Hk, File };
enum class ResamplePolicy { PerTrial, Once };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Ba;
  std::size_t n = 0;
  std::size_t links = 1;
  std::size_t triad_links = 0;
  std::size_t seed_size = 0;
  std::filesystem::path path;  // GeneratorKind::File
};

struct TopologySpec {
  std::string label;
  GeneratorSpec generator;
};

struct CostSpec {
  CostFamily family = CostFamily::Quartic;
  std::size_t m = 20;  // mlloss data points per node
  ResamplePolicy resample = ResamplePolicy::PerTrial;
};

struct McConfig {
  std::vector<TopologySpec> topologies;
  CostSpec cost;
  SimConfig sim;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  double weight_low = 0.5;
  double weight_high = 1.5;
  // Also evaluate the spectral rate of every trial (dense eigensolve).
  bool compute_rate = false;
  // Worker threads; 0 uses the hardware concurrency.
  std::size_t threads = 0;
};

struct LabelSummary {
  std::string label;
  std::size_t n = 0;
  std::vector<std::size_t> steps;
  std::vector<double> mean_gap;
  std::vector<double> mean_lyapunov;
  std::vector<double> mean_consensus_residual;
  std::vector<double> mean_tracking_residual;
  double final_gap_mean = 0.0;
  double final_gap_std = 0.0;
  double mean_c = 0.0;
  double mean_d = 0.0;
  double mean_lambda2 = 0.0;
  std::optional<double> mean_rate;
  std::size_t trials_ok = 0;
  std::size_t diverged = 0;
  std::vector<std::string> errors;
  std::vector<std::uint64_t> seeds;
};

struct McSummary {
  std::vector<LabelSummary> labels;
  std::size_t trial_count = 0;
  std::uint64_t base_seed = 0;
  double h = 0.0;
  ResamplePolicy resample = ResamplePolicy::PerTrial;
  std::vector<std::string> warnings;
};

struct Verdict {
  std::string label;
  double gap = 0.0;
  double mean_c = 0.0;
};

struct ScatterRow {
  std::string name;
  std::size_t n = 0;
  double d = 0.0;
  double c = 0.0;
  std::optional<double> lambda2;
  std::optional<double> rate;
};

// Bijective in (label_index, trial_index) for a fixed base seed; both
// indices must fit in 32 bits.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t label_index,
                         std::uint64_t trial_index);

// Seeds of the streams shared by every topology in a trial (cost model and
// initial state), so labels are compared under common random numbers.
std::uint64_t cost_seed(const McConfig& cfg, std::size_t trial_index);
std::uint64_t init_seed(const McConfig& cfg, std::size_t trial_index);

// Seed slot of a topology: the rank of its label in lexicographic order, so
// reordering the declared topologies does not change any label's graphs.
std::size_t label_slot(const McConfig& cfg, std::size_t label_index);

// Graph of trial `trial_index` for topology `label_index`, weights included.
Graph trial_graph(const McConfig& cfg, std::size_t label_index, std::size_t trial_index);

CostModel sample_cost(const CostSpec& spec, std::size_t n, Rng& rng);

McSummary run_mc(const McConfig& cfg);

// Labels ordered by mean gap at recorded index `at_index`, ties broken by
// label. Throws IndexOutOfRange.
std::vector<Verdict> compare_topologies(const McSummary& summary, std::size_t at_index);

std::vector<ScatterRow> scatter_report(std::span<const std::pair<std::string, Graph>> graphs,
                                       double alpha, const CostSpec& cost,
                                       std::uint64_t cost_seed);

// Relative file paths in the config resolve against base_dir.
McConfig mc_config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
std::string mc_config_to_json(const McConfig& cfg);
std::string summary_to_json(const McSummary& summary);

// Writes summary.json, mean_trace_<label>.csv and scatter.csv into dir.
void write_mc_outputs(const McSummary& summary, const std::filesystem::path& dir);

}  // namespace clustopt
