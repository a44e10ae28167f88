#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "clustopt/costs.hpp"
#include "clustopt/error.hpp"
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

double exact_sum(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s);
}

void check_derivatives(const CostModel& model, std::mt19937_64& rng, int points) {
  std::uniform_int_distribution<std::size_t> node(0, model.num_nodes() - 1);
  std::uniform_real_distribution<double> where(-8.0, 8.0);
  for (int k = 0; k < points; ++k) {
    const std::size_t i = node(rng);
    const double x = where(rng);
    const double g = oracle::central_difference([&](double t) { return model.value(i, t); }, x);
    const double h =
        oracle::central_difference([&](double t) { return model.gradient(i, t); }, x);
    CHECK(oracle::relative_error(model.gradient(i, x), g) < 1e-6);
    CHECK(oracle::relative_error(model.hessian(i, x), h) < 1e-6);
  }
}

}  // namespace

TEST_CASE("quartic evaluation") {
  const CostModel at_min(QuarticModel{{0.01}, {2.0}});
  CHECK(at_min.value(0, 2.0) == 0.0);
  CHECK(at_min.gradient(0, 2.0) == 0.0);
  CHECK(at_min.hessian(0, 2.0) == 0.0);

  const CostModel q(QuarticModel{{0.01}, {0.0}});
  CHECK(q.value(0, 1.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(q.gradient(0, 1.0) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(q.hessian(0, 1.0) == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(code_of([&] { q.value(1, 0.0); }) == Errc::IndexOutOfRange);
}

TEST_CASE("mlloss evaluation") {
  const CostModel m(MlLossModel{1, 1, {0.0}, {0.0}});
  CHECK(m.value(0, 0.0) == 0.0);
  CHECK(m.gradient(0, 0.0) == 0.0);
  CHECK(m.hessian(0, 0.0) == 10.0);

  const double x = 0.7;
  const CostModel two(MlLossModel{1, 2, {0.3, -0.5}, {0.2, 0.1}});
  double want = 0.0;
  for (auto [a, b] : {std::pair{0.3, 0.2}, std::pair{-0.5, 0.1}}) {
    want += 2 * x * x + 3 * std::sin(x) * std::sin(x) + a * std::cos(x) + b * x;
  }
  CHECK(two.value(0, x) == doctest::Approx(want).epsilon(1e-14));
  CHECK(code_of([&] { two.gradient(2, 0.0); }) == Errc::IndexOutOfRange);
}

TEST_CASE("mlloss sampler invariants") {
  Rng rng(5);
  const MlLossModel tiny = sample_mlloss(2, 1, rng);
  CHECK(tiny.a[0] + tiny.a[1] == 0.0);

  const MlLossModel big = sample_mlloss(100, 20, rng);
  CHECK(big.a.size() == 2000);
  for (const auto* arr : {&big.a, &big.b}) {
    for (double v : *arr) {
      CHECK(v != 0.0);
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
    CHECK(std::abs(exact_sum(*arr)) <= 1e-12);
    CHECK(std::abs(exact_sum(*arr) / 2000.0) <= 1e-12);
  }
  CHECK(code_of([&] { sample_mlloss(1, 1, rng); }) == Errc::InvalidParams);
}

TEST_CASE("quartic sampler invariants") {
  Rng rng(6);
  const QuarticModel q = sample_quartic(1000, rng);
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(q.a[i] > 0.0);
    CHECK(q.a[i] <= 0.025);
    CHECK(q.b[i] >= -10.0);
    CHECK(q.b[i] <= 10.0);
    CHECK(q.b[i] != 0.0);
  }
}

TEST_CASE("samplers are deterministic per seed") {
  Rng a(77), b(77);
  const MlLossModel m1 = sample_mlloss(10, 20, a);
  const MlLossModel m2 = sample_mlloss(10, 20, b);
  CHECK(m1.a == m2.a);
  CHECK(m1.b == m2.b);
  const QuarticModel q1 = sample_quartic(30, a);
  const QuarticModel q2 = sample_quartic(30, b);
  CHECK(q1.a == q2.a);
  CHECK(q1.b == q2.b);
}

TEST_CASE("derivatives match central differences") {
  std::mt19937_64 rng(9);
  Rng srng(9);
  check_derivatives(CostModel(sample_quartic(50, srng)), rng, 100);
  check_derivatives(CostModel(sample_mlloss(50, 20, srng)), rng, 100);
}

TEST_CASE("aggregate sums over nodes") {
  Rng rng(4);
  const CostModel q(sample_quartic(7, rng));
  double v = 0.0, g = 0.0, h = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    v += q.value(i, 1.3);
    g += q.gradient(i, 1.3);
    h += q.hessian(i, 1.3);
  }
  CHECK(q.aggregate_value(1.3) == doctest::Approx(v));
  CHECK(q.aggregate_gradient(1.3) == doctest::Approx(g));
  CHECK(q.aggregate_hessian(1.3) == doctest::Approx(h));
}

TEST_CASE("mlloss optimum is closed form") {
  Rng rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const CostModel m(sample_mlloss(30, 20, rng));
    const OptimumCertificate c = aggregate_optimum(m);
    CHECK(c.x_star == 0.0);
    CHECK(std::abs(c.f_star) <= 1e-12);
    CHECK(c.method == OptimumMethod::ClosedForm);
    CHECK(m.aggregate_value(0.01) > c.f_star);
    CHECK(m.aggregate_value(-0.01) > c.f_star);
  }
}

TEST_CASE("quartic optimum by bisection") {
  const CostModel sym(QuarticModel{{0.02, 0.02}, {-4.0, 4.0}});
  CHECK(std::abs(aggregate_optimum(sym).x_star) <= 1e-12);

  const CostModel single(QuarticModel{{0.02}, {3.0}});
  const OptimumCertificate one = aggregate_optimum(single);
  CHECK(one.x_star == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(one.f_star == doctest::Approx(0.0));

  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const CostModel q(sample_quartic(1 + rep * 10, rng));
    const OptimumCertificate c = aggregate_optimum(q);
    CHECK(c.method == OptimumMethod::Bisection);
    CHECK(c.residual <= 1e-10);
    CHECK(c.residual <= 1e-10 * (1.0 + std::abs(q.aggregate_hessian(c.x_star))));
    CHECK(q.aggregate_value(c.x_star + 0.01) > c.f_star);
    CHECK(q.aggregate_value(c.x_star - 0.01) > c.f_star);
  }
}

TEST_CASE("family names") {
  CHECK(to_string(CostFamily::MlLoss) == "mlloss");
  CHECK(to_string(CostFamily::Quartic) == "quartic");
  CHECK(to_string(OptimumMethod::Bisection) == "bisection");
}
