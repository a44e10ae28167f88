#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "clustopt/graph.hpp"

namespace clustopt {

// f_i(x) = sum_j 2x^2 + 3 sin^2 x + a_ij cos x + b_ij x, with a and b each
// summing to zero over all (i, j). Row-major n x m storage.
struct MlLossModel {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> a;
  std::vector<double> b;
};

// f_i(x) = a_i (x - b_i)^4 with a_i in (0, 0.025] and b_i in [-10, 10].
struct QuarticModel {
  std::vector<double> a;
  std::vector<double> b;
};

enum class CostFamily { MlLoss, Quartic };
enum class OptimumMethod { ClosedForm, Bisection, GridRefine };

std::string_view to_string(CostFamily family);
std::string_view to_string(OptimumMethod method);

struct OptimumCertificate {
  double x_star = 0.0;
  double f_star = 0.0;
  OptimumMethod method = OptimumMethod::ClosedForm;
  double residual = 0.0;  // |F'(x*)|
};

// Per-node objectives of one of the two benchmark families.
class CostModel {
 public:
  explicit CostModel(MlLossModel model);
  explicit CostModel(QuarticModel model);

  CostFamily family() const;
  std::size_t num_nodes() const;

  double value(std::size_t i, double x) const;
  double gradient(std::size_t i, double x) const;
  double hessian(std::size_t i, double x) const;

  // Sums over all nodes at a common argument.
  double aggregate_value(double x) const;
  double aggregate_gradient(double x) const;
  double aggregate_hessian(double x) const;

  const MlLossModel* mlloss() const { return std::get_if<MlLossModel>(&params_); }
  const QuarticModel* quartic() const { return std::get_if<QuarticModel>(&params_); }

 private:
  void check_node(std::size_t i) const;

  std::variant<MlLossModel, QuarticModel> params_;
  // MlLoss per-node sums over j of a_ij and b_ij.
  std::vector<double> a_sum_;
  std::vector<double> b_sum_;
};

// Uniform(-1,1) entries, mean-centred, redrawing entries that land on 0 or
// leave (-1,1). Throws SamplerFailure after 1000 rounds.
MlLossModel sample_mlloss(std::size_t n, std::size_t m, Rng& rng);
QuarticModel sample_quartic(std::size_t n, Rng& rng);

OptimumCertificate aggregate_optimum(const CostModel& model);

}  // namespace clustopt
