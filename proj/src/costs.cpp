#include "clustopt/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clustopt/error.hpp"

namespace clustopt {

namespace {

// Neumaier-compensated sum.
double accurate_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

bool valid_entry(double v) { return v != 0.0 && v > -1.0 && v < 1.0; }

void sample_centered(std::vector<double>& values, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : values) v = dist(rng);
  for (int round = 0; round < 1000; ++round) {
    const double mean = accurate_sum(values) / static_cast<double>(values.size());
    for (double& v : values) v -= mean;
    bool ok = true;
    for (double& v : values) {
      if (!valid_entry(v)) {
        v = dist(rng);
        ok = false;
      }
    }
    if (ok) return;
  }
  throw Error(Errc::SamplerFailure, "zero-sum parameter sampling did not settle in 1000 rounds");
}

}  // namespace

std::string_view to_string(CostFamily family) {
  return family == CostFamily::MlLoss ? "mlloss" : "quartic";
}

std::string_view to_string(OptimumMethod method) {
  switch (method) {
    case OptimumMethod::ClosedForm: return "closed_form";
    case OptimumMethod::Bisection: return "bisection";
    case OptimumMethod::GridRefine: return "grid_refine";
  }
  return "unknown";
}

CostModel::CostModel(MlLossModel model) {
  if (model.a.size() != model.n * model.m || model.b.size() != model.n * model.m) {
    throw Error(Errc::DimensionMismatch, "mlloss parameter arrays must hold n*m entries");
  }
  a_sum_.assign(model.n, 0.0);
  b_sum_.assign(model.n, 0.0);
  for (std::size_t i = 0; i < model.n; ++i) {
    for (std::size_t j = 0; j < model.m; ++j) {
      a_sum_[i] += model.a[i * model.m + j];
      b_sum_[i] += model.b[i * model.m + j];
    }
  }
  params_ = std::move(model);
}

CostModel::CostModel(QuarticModel model) {
  if (model.a.size() != model.b.size()) {
    throw Error(Errc::DimensionMismatch, "quartic parameter arrays differ in length");
  }
  params_ = std::move(model);
}

CostFamily CostModel::family() const {
  return std::holds_alternative<MlLossModel>(params_) ? CostFamily::MlLoss
                                                      : CostFamily::Quartic;
}

std::size_t CostModel::num_nodes() const {
  if (const auto* ml = mlloss()) return ml->n;
  return quartic()->a.size();
}

void CostModel::check_node(std::size_t i) const {
  if (i >= num_nodes()) {
    throw Error(Errc::IndexOutOfRange, "cost node " + std::to_string(i) + " out of range");
  }
}

// The a/b terms are linear in the parameters, so per-node sums give the
// same f_i as the term-by-term definition.
double CostModel::value(std::size_t i, double x) const {
  check_node(i);
  if (const auto* ml = mlloss()) {
    const double s = std::sin(x);
    return static_cast<double>(ml->m) * (2.0 * x * x + 3.0 * s * s) +
           a_sum_[i] * std::cos(x) + b_sum_[i] * x;
  }
  const auto& q = *quartic();
  const double r = x - q.b[i];
  return q.a[i] * r * r * r * r;
}

double CostModel::gradient(std::size_t i, double x) const {
  check_node(i);
  if (const auto* ml = mlloss()) {
    return static_cast<double>(ml->m) * (4.0 * x + 3.0 * std::sin(2.0 * x)) -
           a_sum_[i] * std::sin(x) + b_sum_[i];
  }
  const auto& q = *quartic();
  const double r = x - q.b[i];
  return 4.0 * q.a[i] * r * r * r;
}

double CostModel::hessian(std::size_t i, double x) const {
  check_node(i);
  if (const auto* ml = mlloss()) {
    return static_cast<double>(ml->m) * (4.0 + 6.0 * std::cos(2.0 * x)) -
           a_sum_[i] * std::cos(x);
  }
  const auto& q = *quartic();
  const double r = x - q.b[i];
  return 12.0 * q.a[i] * r * r;
}

double CostModel::aggregate_value(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < num_nodes(); ++i) s += value(i, x);
  return s;
}

double CostModel::aggregate_gradient(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < num_nodes(); ++i) s += gradient(i, x);
  return s;
}

double CostModel::aggregate_hessian(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < num_nodes(); ++i) s += hessian(i, x);
  return s;
}

MlLossModel sample_mlloss(std::size_t n, std::size_t m, Rng& rng) {
  if (n * m < 2) throw Error(Errc::InvalidParams, "mlloss sampling needs n*m >= 2");
  MlLossModel model{n, m, std::vector<double>(n * m), std::vector<double>(n * m)};
  sample_centered(model.a, rng);
  sample_centered(model.b, rng);
  return model;
}

QuarticModel sample_quartic(std::size_t n, Rng& rng) {
  if (n == 0) throw Error(Errc::InvalidParams, "quartic sampling needs n >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> offset(-10.0, 10.0);
  QuarticModel model{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    model.a[i] = 0.025 * (1.0 - unit(rng));  // (0, 0.025]
    do {
      model.b[i] = offset(rng);
    } while (model.b[i] == 0.0);
  }
  return model;
}

OptimumCertificate aggregate_optimum(const CostModel& model) {
  OptimumCertificate cert;
  if (model.family() == CostFamily::MlLoss) {
    // The zero-sum parameters cancel in the aggregate, leaving
    // n m (2x^2 + 3 sin^2 x), minimized at 0.
    cert.x_star = 0.0;
    cert.method = OptimumMethod::ClosedForm;
  } else {
    const auto& q = *model.quartic();
    double lo = *std::min_element(q.b.begin(), q.b.end());
    double hi = *std::max_element(q.b.begin(), q.b.end());
    if (model.aggregate_gradient(lo) > 0.0 || model.aggregate_gradient(hi) < 0.0) {
      throw Error(Errc::BracketFailure, "aggregate quartic gradient does not change sign");
    }
    // Bisect until the bracket is at floating-point resolution; a 1e-12
    // width alone leaves |F'| well above 1e-10 for large n.
    for (int iter = 0; iter < 200 && hi > lo; ++iter) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (model.aggregate_gradient(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    cert.x_star = std::abs(model.aggregate_gradient(lo)) <= std::abs(model.aggregate_gradient(hi))
                      ? lo
                      : hi;
    cert.method = OptimumMethod::Bisection;
  }
  cert.f_star = model.aggregate_value(cert.x_star);
  cert.residual = std::abs(model.aggregate_gradient(cert.x_star));
  return cert;
}

}  // namespace clustopt
