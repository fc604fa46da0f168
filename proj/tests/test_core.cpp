#include <doctest.h>

#include <cmath>

#include "bdr/core.hpp"
#include "bdr/cs_problem.hpp"
#include "bdr/problem_gen.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bdr;
using bdr::test::vec;

TEST_CASE("relative_change") {
  CHECK(relative_change(vec({1, 2}), vec({1, 2})) == 0.0);
  // 0.1 / sqrt(5)
  CHECK(relative_change(vec({1.1, 2}), vec({1, 2})) == doctest::Approx(0.044721359549995794));

  const double guarded = relative_change(vec({1, 0}), vec({0, 0}));
  CHECK(std::isfinite(guarded));
  CHECK(guarded == doctest::Approx(1.0 / kRelativeChangeGuard));

  CHECK_THROWS_AS(relative_change(vec({1, 2, 3}), vec({1, 2})), DimensionError);
}

TEST_CASE("objective_value") {
  SUBCASE("all-zero problem") {
    test::TrivialProblem p(3);
    CHECK(objective_value(p, vec({1, -2, 3})) == 0.0);
  }

  SUBCASE("h = +inf is reported as the infinity sentinel, not NaN") {
    test::TrivialProblem p(2, /*nonneg_indicator=*/true);
    const double v = objective_value(p, vec({-1, 0}));
    CHECK(v == kInfinity);
    CHECK_FALSE(std::isnan(v));
  }

  SUBCASE("l1-l2 model at the origin is half the squared data norm") {
    Rng rng(11);
    Matrix a = test::random_matrix(rng, 4, 6);
    Vector b = test::random_vector(rng, 4);
    CsProblem p(a, b, 0.1, 0.1);
    CHECK(objective_value(p, Vector::Zero(6)) == doctest::Approx(0.5 * b.squaredNorm()));
  }

  SUBCASE("random instance against an explicit loop recomputation") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index m = 5, d = 9;
      Matrix a = test::random_matrix(rng, m, d);
      Vector b = test::random_vector(rng, m);
      Vector x = test::random_vector(rng, d);
      const double lambda = test::uniform(rng, 0.01, 1.0);
      CsProblem p(a, b, lambda, lambda);

      double resid2 = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double r = -b[i];
        for (Eigen::Index j = 0; j < d; ++j) r += a(i, j) * x[j];
        resid2 += r * r;
      }
      double l1 = 0.0, l2sq = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        l1 += std::abs(x[j]);
        l2sq += x[j] * x[j];
      }
      const double expected = 0.5 * resid2 + lambda * (l1 - std::sqrt(l2sq));
      CHECK(objective_value(p, x) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  SUBCASE("non-finite input is rejected") {
    test::TrivialProblem p(2);
    CHECK_THROWS_AS(objective_value(p, vec({NAN, 0})), DomainError);
  }
}

TEST_CASE("generated problems: gradient matches central differences") {
  std::vector<CsInstance> instances;
  instances.push_back(make_case_instance(scaled_case(1, 0.02), 3, 0.1));
  instances.push_back(make_case_instance(scaled_case(11, 0.02), 4, 0.1));
  instances.push_back(make_reconstruction_instance(
      make_reconstruction_spec(synthetic_signal(SignalKind::kSmoothSinusoid, 32, 5), 0.5, 1e-3, 6),
      0.1));

  Rng rng(99);
  for (const auto& inst : instances) {
    CsProblem p(inst.a, inst.b, inst.lambda, inst.lambda);
    auto f = [&](std::span<const double> x) {
      return p.eval_f(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
    };
    for (int k = 0; k < 20; ++k) {
      const Vector x = test::random_vector(rng, p.dimension());
      const Vector fd = oracle::finite_diff_gradient(f, x, 1e-5);
      const Vector g = p.grad_f(x);
      CHECK((fd - g).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("prox_f satisfies its optimality condition") {
  Rng rng(7);
  for (auto [m, d] : {std::pair<Eigen::Index, Eigen::Index>{5, 12}, {12, 5}, {8, 8}}) {
    Matrix a = test::random_matrix(rng, m, d);
    Vector b = test::random_vector(rng, m);
    CsProblem p(a, b, 0.1, 0.1);
    for (double gamma : {0.01, 0.3, 2.0}) {
      const Vector y = test::random_vector(rng, d, 3.0);
      const Vector x = p.prox_f(y, gamma);
      const Vector resid = p.grad_f(x) + (x - y) / gamma;
      CHECK(resid.norm() <= 1e-8 * (1.0 + y.norm()));
    }
  }
}

TEST_CASE("default dual_update (Moreau through prox_g) equals the closed form") {
  // The base-class path is exercised through an explicit upcast call.
  Rng rng(21);
  Matrix a = test::random_matrix(rng, 3, 4);
  Vector b = test::random_vector(rng, 3);
  CsProblem p(a, b, 0.2, 0.2);
  for (int k = 0; k < 50; ++k) {
    const Vector w = test::random_vector(rng, 4, 0.1);
    const Vector z = test::random_vector(rng, 4, 2.0);
    const double tau = test::uniform(rng, 0.1, 30.0);
    const Vector generic = p.SplittingProblem::dual_update(w, z, tau);
    CHECK((generic - p.dual_update(w, z, tau)).norm() <= 1e-12 * (1.0 + generic.norm()));
  }
}

TEST_CASE("IterateState") {
  IterateState s = IterateState::origin(4);
  CHECK(s.dimension() == 4);
  CHECK(s.finite());
  CHECK(s.n == 0);
  s.w[2] = INFINITY;
  CHECK_FALSE(s.finite());
}

TEST_CASE("CsProblem validates its inputs") {
  CHECK_THROWS_AS(CsProblem(Matrix::Zero(2, 3), Vector::Zero(3), 0.1, 0.1), DimensionError);
  CHECK_THROWS_AS(CsProblem(Matrix::Zero(2, 3), Vector::Zero(2), -0.1, 0.1), ParameterError);
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = NAN;
  CHECK_THROWS_AS(CsProblem(a, Vector::Zero(2), 0.1, 0.1), DomainError);
}

TEST_CASE("g conjugate is the indicator of the lambda ball") {
  CsProblem p(Matrix::Identity(2, 2), Vector::Zero(2), 0.5, 0.5);
  CHECK(p.eval_g_conj(vec({0.3, 0.4})) == 0.0);
  CHECK(p.eval_g_conj(vec({0.3, 0.4 + 5e-10})) == 0.0);
  CHECK(p.eval_g_conj(vec({0.3, 0.5})) == kInfinity);
}
