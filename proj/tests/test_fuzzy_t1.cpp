#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "t2ctc/fuzzy_t1.hpp"

using namespace t2ctc;

TEST_CASE("eval_mf basics") {
  CHECK(eval_mf(GaussianMF{0, 1}, 0.0) == doctest::Approx(1.0));
  CHECK(eval_mf(GaussianMF{1, 0.5}, 1.5) == doctest::Approx(std::exp(-0.5)));
  CHECK(eval_mf(IntervalMF{0.2, 0.4}, 0.3) == 1.0);
  CHECK(eval_mf(IntervalMF{0.2, 0.4}, 0.5) == 0.0);
  CHECK(eval_mf(SingletonMF{0.7}, 0.7) == 1.0);
  CHECK(eval_mf(SingletonMF{0.7}, 0.71) == 0.0);
  CHECK(eval_mf(TriangularMF{0, 1, 3}, 2.0) == doctest::Approx(0.5));

  FuzzyNumberT1 grid = FuzzyNumberT1::from_grid({0, 1, 2}, {0.0, 1.0, 0.0});
  CHECK(grid.grade(0.5) == doctest::Approx(0.5));
  CHECK(grid.grade(-0.1) == 0.0);
  CHECK(grid.grade(2.1) == 0.0);
}

TEST_CASE("eval_mf stays in [0,1] for random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    double mid = a + b + c - lo - hi;
    std::vector<MembershipFunctionT1> mfs{
        GaussianMF{a, std::abs(b) + 0.05}, TriangularMF{lo, mid, hi},
        IntervalMF{lo, hi}, SingletonMF{a}};
    for (const auto& mf : mfs) {
      double g = eval_mf(mf, u(rng));
      CHECK(g >= 0.0);
      CHECK(g <= 1.0);
    }
  }
}

TEST_CASE("extend_binary with additive identity preserves a triangular") {
  FuzzyNumberT1 F{TriangularMF{0, 1, 2}};
  FuzzyNumberT1 zero{SingletonMF{0}};
  auto plus = [](double a, double b) { return a + b; };
  auto R = extend_binary(F, zero, plus, TNormKind::minimum,
                         GridSpec{201, 4001});
  const auto& s = std::get<SampledMF>(R.mf);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.domain.size(); ++i)
    worst = std::max(worst, std::abs(s.grades[i] - F.grade(s.domain[i])));
  CHECK(worst <= 0.006);
}

TEST_CASE("extend_binary sum of intervals has endpoint-arithmetic support") {
  FuzzyNumberT1 F{IntervalMF{0.5, 1.5}};
  FuzzyNumberT1 G{IntervalMF{2.0, 4.0}};
  auto plus = [](double a, double b) { return a + b; };
  auto R = extend_binary(F, G, plus, TNormKind::minimum, GridSpec{401, 801});
  auto sup = R.support();
  double step = (5.5 - 2.5) / 400.0;
  CHECK(std::abs(sup.lo - 2.5) <= step);
  CHECK(std::abs(sup.hi - 5.5) <= step);
  CHECK(R.grade(4.0) == doctest::Approx(1.0));
}

TEST_CASE("extend_binary gaussian sum matches the closed form") {
  FuzzyNumberT1 F{GaussianMF{1, 0.1}};
  FuzzyNumberT1 G{GaussianMF{2, 0.2}};
  auto plus = [](double a, double b) { return a + b; };
  // Fine grids: output step 2.5e-4 over the 3.6-wide summed support.
  auto R = extend_binary(F, G, plus, TNormKind::product,
                         GridSpec{14401, 9601});
  GaussianT1 closed{3.0, std::sqrt(0.05)};
  CHECK(closed.sigma == doctest::Approx(0.2236).epsilon(1e-3));
  const auto& s = std::get<SampledMF>(R.mf);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.domain.size(); ++i) {
    double want =
        eval_mf(GaussianMF{closed.m, closed.sigma}, s.domain[i]);
    worst = std::max(worst, std::abs(s.grades[i] - want));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("extend_binary rejects degenerate operands") {
  FuzzyNumberT1 empty = FuzzyNumberT1::from_grid({0, 1}, {0.0, 0.0});
  FuzzyNumberT1 F{TriangularMF{0, 1, 2}};
  auto plus = [](double a, double b) { return a + b; };
  CHECK_THROWS_AS(extend_binary(empty, F, plus, TNormKind::minimum),
                  std::domain_error);
}

TEST_CASE("affine_combine_interval examples") {
  CHECK(affine_combine_interval({{2, 0.3}}, {1}, 0).c == doctest::Approx(2));
  CHECK(affine_combine_interval({{2, 0.3}}, {1}, 0).s == doctest::Approx(0.3));

  auto r = affine_combine_interval({{1, 0.5}, {3, 1.0}}, {1, 1}, 0);
  CHECK(r.c == doctest::Approx(4.0));
  CHECK(r.s == doctest::Approx(1.5));

  auto r2 = affine_combine_interval({{1, 0.5}}, {-2}, 1);
  CHECK(r2.c == doctest::Approx(-1.0));
  CHECK(r2.s == doctest::Approx(1.0));

  CHECK_THROWS_AS(affine_combine_interval({{1, 0.5}}, {1, 2}, 0),
                  std::invalid_argument);
}

TEST_CASE("affine_combine_interval equals endpoint arithmetic on random sets") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uc(-2, 2), us(0, 1.5), ua(-5, 5);
  std::uniform_int_distribution<int> un(1, 4);
  for (int it = 0; it < 300; ++it) {
    int n = un(rng);
    std::vector<IntervalT1> sets(n);
    std::vector<double> alphas(n);
    double beta = uc(rng);
    double lo = beta, hi = beta;
    for (int i = 0; i < n; ++i) {
      sets[i] = {uc(rng), us(rng)};
      alphas[i] = ua(rng);
      double a = alphas[i] * (sets[i].c - sets[i].s);
      double b = alphas[i] * (sets[i].c + sets[i].s);
      lo += std::min(a, b);
      hi += std::max(a, b);
    }
    auto r = affine_combine_interval(sets, alphas, beta);
    CHECK(r.c - r.s == doctest::Approx(lo).epsilon(1e-12));
    CHECK(r.c + r.s == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("affine_combine_interval support agrees with extend_binary") {
  FuzzyNumberT1 F{IntervalMF{0.5, 1.5}};
  FuzzyNumberT1 G{IntervalMF{2.0, 4.0}};
  auto comb = [](double a, double b) { return 2.0 * a - 0.5 * b; };
  auto R = extend_binary(F, G, comb, TNormKind::minimum, GridSpec{801, 801});
  auto want = affine_combine_interval({{1, 0.5}, {3, 1.0}}, {2.0, -0.5}, 0.0);
  auto sup = R.support();
  double step = (sup.hi - sup.lo) / 800.0;
  CHECK(std::abs(sup.lo - (want.c - want.s)) <= 2 * step);
  CHECK(std::abs(sup.hi - (want.c + want.s)) <= 2 * step);
}

TEST_CASE("affine_combine_gaussian pinned examples") {
  GaussianT1 a{1, 0.1}, b{2, 0.2};
  auto prod = affine_combine_gaussian({a, b}, {2, -1}, 0.5, TNormKind::product);
  CHECK(prod.m == doctest::Approx(0.5));
  CHECK(prod.sigma == doctest::Approx(std::sqrt(0.08)));

  auto mn = affine_combine_gaussian({a, b}, {2, -1}, 0.5, TNormKind::minimum);
  CHECK(mn.m == doctest::Approx(0.5));
  CHECK(mn.sigma == doctest::Approx(0.4));

  auto ident = affine_combine_gaussian({a}, {1}, 0, TNormKind::product);
  CHECK(ident.m == doctest::Approx(a.m));
  CHECK(ident.sigma == doctest::Approx(a.sigma));
}

TEST_CASE("affine_combine_gaussian matches the extension oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> um(-1, 1), usg(0.15, 0.3),
      ua(0.5, 2.0);
  std::bernoulli_distribution flip(0.5);
  for (TNormKind t : {TNormKind::product, TNormKind::minimum}) {
    for (int it = 0; it < 3; ++it) {
      int n = 2 + (it % 2);
      std::vector<GaussianT1> sets(n);
      std::vector<FuzzyNumberT1> fsets;
      std::vector<double> alphas(n);
      double beta = um(rng);
      for (int i = 0; i < n; ++i) {
        sets[i] = {um(rng), usg(rng)};
        alphas[i] = ua(rng) * (flip(rng) ? 1.0 : -1.0);
        fsets.push_back(FuzzyNumberT1::from_gaussian(sets[i]));
      }
      auto closed = affine_combine_gaussian(sets, alphas, beta, t);
      auto oracle = oracles::affine_oracle(fsets, alphas, beta, t, 4001);
      double worst = 0.0;
      for (std::size_t i = 0; i < oracle.x.size(); ++i) {
        double want = eval_mf(GaussianMF{closed.m, closed.sigma}, oracle.x[i]);
        worst = std::max(worst, std::abs(oracle.g[i] - want));
      }
      CAPTURE(static_cast<int>(t));
      CHECK(worst <= 1e-3);
    }
  }
}

TEST_CASE("centroid_defuzz") {
  CHECK(centroid_defuzz(FuzzyNumberT1::from_interval({2, 0.5})) ==
        doctest::Approx(2.0));
  CHECK(centroid_defuzz(FuzzyNumberT1{GaussianMF{3, 0.2}}) ==
        doctest::Approx(3.0));
  CHECK(centroid_defuzz(FuzzyNumberT1::from_grid({1, 2, 3}, {0.5, 1, 0.5})) ==
        doctest::Approx(2.0));

  // Even symmetry pins the centroid at the center.
  CHECK(centroid_defuzz(FuzzyNumberT1{TriangularMF{-1, 0.25, 1.5}}) ==
        doctest::Approx((-1 + 0.25 + 1.5) / 3.0).epsilon(1e-4));
  CHECK(std::abs(centroid_defuzz(FuzzyNumberT1{TriangularMF{-1, 0, 1}})) <=
        1e-12);

  // Grade scaling cancels in the ratio.
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> dom, g, g2;
  for (int i = 0; i < 41; ++i) {
    dom.push_back(0.1 * i);
    g.push_back(u(rng));
  }
  for (double v : g) g2.push_back(0.37 * v);
  double c1 = centroid_defuzz(FuzzyNumberT1::from_grid(dom, g));
  double c2 = centroid_defuzz(FuzzyNumberT1::from_grid(dom, g2));
  CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));

  CHECK_THROWS_AS(
      centroid_defuzz(FuzzyNumberT1::from_grid({0, 1}, {0.0, 0.0})),
      std::domain_error);
}
