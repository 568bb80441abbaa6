#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "t2ctc/fls.hpp"

using namespace t2ctc;

namespace {

double gauss(double x, double m, double s) {
  double z = (x - m) / s;
  return std::exp(-0.5 * z * z);
}

// Two inputs, two gaussian labels each, all four cells ruled.
RuleBase small_base(double rho, TNormKind tnorm = TNormKind::product) {
  RuleBase rb;
  rb.inputs = {make_variable("a", -1.0, 1.0), make_variable("b", 0.0, 2.0)};
  rb.output = "y";
  rb.out_lo = -1.0;
  rb.out_hi = 1.0;
  rb.tnorm = tnorm;
  double c = -1.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      rb.rules.push_back(Rule{{i, j}, c, 0.05});
      c += 0.6;
    }
  return rho > 0.0 ? apply_fou(rb, rho) : rb;
}

}  // namespace

TEST_CASE("make_variable label layout and coverage") {
  auto v2 = make_variable("x", -1.0, 1.0);
  REQUIRE(v2.labels.size() == 2);
  CHECK(fou(v2.labels[0].set, -1.0).second == doctest::Approx(1.0));
  CHECK(fou(v2.labels[1].set, 1.0).second == doctest::Approx(1.0));
  CHECK(fou(v2.labels[0].set, 0.0).second == doctest::Approx(gauss(0, -1, 1)));
  CHECK(coverage_ok(v2));

  auto v3 = make_variable("x", 0.0, 1.0, 3);
  REQUIRE(v3.labels.size() == 3);
  CHECK(fou(v3.labels[1].set, 0.5).second == doctest::Approx(1.0));
  CHECK(fou(v3.labels[2].set, 0.75).second ==
        doctest::Approx(gauss(0.75, 1.0, 0.25)));
  CHECK(coverage_ok(v3));

  LinguisticVariable holey{"x", 0.0, 10.0,
                           {{"only", IT2Set::gaussian_umean(0, 0, 0.5)}}};
  CHECK_FALSE(coverage_ok(holey));
}

TEST_CASE("validate_rulebase rejects malformed bases") {
  RuleBase rb = small_base(0.0);
  CHECK_NOTHROW(validate_rulebase(rb));
  RuleBase dup = rb;
  dup.rules.push_back(dup.rules.front());
  CHECK_THROWS_AS(validate_rulebase(dup), std::invalid_argument);
  RuleBase bad = rb;
  bad.rules[0].antecedent[1] = 7;
  CHECK_THROWS_AS(validate_rulebase(bad), std::invalid_argument);
  RuleBase arity = rb;
  arity.rules[0].antecedent.pop_back();
  CHECK_THROWS_AS(validate_rulebase(arity), std::invalid_argument);
}

TEST_CASE("fire_t1 basics") {
  RuleBase rb = small_base(0.0);
  // Rule {0,0} has peaks at a=-1, b=0.
  auto w = fire_t1(rb, {-1.0, 0.0});
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[3] == doctest::Approx(gauss(-1, 1, 1) * gauss(0, 2, 1)));
  CHECK_THROWS_AS(fire_t1(rb, {0.0}), std::invalid_argument);

  // Compact-support labels give exact zeros outside.
  RuleBase tri;
  tri.inputs = {{"x",
                 0.0,
                 1.0,
                 {{"low", IT2Set::from_bounds(TriangularMF{0, 0, 0.6},
                                              TriangularMF{0, 0, 0.6})},
                  {"high", IT2Set::from_bounds(TriangularMF{0.4, 1, 1},
                                               TriangularMF{0.4, 1, 1})}}}};
  tri.rules = {Rule{{0}, 0.0, 0.0}, Rule{{1}, 1.0, 0.0}};
  auto z = fire_t1(tri, {2.0});
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);
  CHECK_THROWS_WITH_AS(infer_t1(tri, {2.0}), "no rule fired",
                       std::domain_error);
}

TEST_CASE("fire_t1 matches a direct re-computation") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ua(-1.5, 1.5), ub(-0.5, 2.5);
  for (TNormKind t : {TNormKind::product, TNormKind::minimum}) {
    RuleBase rb = small_base(0.0, t);
    for (int it = 0; it < 200; ++it) {
      double a = ua(rng), b = ub(rng);
      auto w = fire_t1(rb, {a, b});
      for (std::size_t r = 0; r < rb.rules.size(); ++r) {
        double ga = gauss(a, rb.rules[r].antecedent[0] == 0 ? -1.0 : 1.0, 1.0);
        double gb = gauss(b, rb.rules[r].antecedent[1] == 0 ? 0.0 : 2.0, 1.0);
        double expect = t == TNormKind::product ? ga * gb : std::min(ga, gb);
        CHECK(w[r] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("infer_t1 weighted average") {
  RuleBase rb;
  rb.inputs = {make_variable("x", 0.0, 1.0)};
  rb.rules = {Rule{{0}, 0.0, 0.0}, Rule{{1}, 1.0, 0.0}};
  // Equidistant input fires both labels equally.
  CHECK(infer_t1(rb, {0.5}) == doctest::Approx(0.5));
  CHECK(infer_t1(rb, {0.0}) ==
        doctest::Approx(gauss(0, 1, 0.5) /
                        (1.0 + gauss(0, 1, 0.5))));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(0, 1);
  RuleBase rb2 = small_base(0.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> x{2.0 * ux(rng) - 1.0, 2.0 * ux(rng)};
    auto w = fire_t1(rb2, x);
    double num = 0, den = 0;
    for (std::size_t r = 0; r < w.size(); ++r) {
      num += w[r] * rb2.rules[r].c;
      den += w[r];
    }
    CHECK(infer_t1(rb2, x) == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("fire_it2 degenerate labels reproduce the T1 strengths") {
  RuleBase rb = small_base(0.0);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ux(-1, 1);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto t1 = fire_t1(rb, x);
    auto it2 = fire_it2(rb, x);
    for (std::size_t r = 0; r < t1.size(); ++r) {
      CHECK(it2[r][0] == doctest::Approx(t1[r]).epsilon(1e-12));
      CHECK(it2[r][1] == doctest::Approx(t1[r]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fire_it2 brackets the downgraded T1 strengths") {
  RuleBase rb = small_base(0.3);
  RuleBase t1base = downgrade_to_t1(rb);
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  for (int it = 0; it < 300; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto iv = fire_it2(rb, x);
    auto w = fire_t1(t1base, x);
    for (std::size_t r = 0; r < w.size(); ++r) {
      CHECK(iv[r][0] <= w[r] + 1e-12);
      CHECK(iv[r][1] >= w[r] - 1e-12);
    }
  }
  // Upper grade saturates on the uncertainty plateau.
  auto iv = fire_it2(rb, {-1.0, 0.0});
  CHECK(iv[0][1] == doctest::Approx(1.0));
}

TEST_CASE("fire_it2_cached equals fire_it2") {
  RuleBase rb = small_base(0.2);
  std::vector<double> x{0.3, 1.2};
  auto direct = fire_it2(rb, x);
  auto cached = fire_it2_cached(rb, label_grades(rb.inputs, x));
  REQUIRE(direct.size() == cached.size());
  for (std::size_t r = 0; r < direct.size(); ++r) {
    CHECK(direct[r][0] == cached[r][0]);
    CHECK(direct[r][1] == cached[r][1]);
  }
}

TEST_CASE("infer_it2_cos single rule returns its consequent interval") {
  RuleBase rb;
  rb.inputs = {make_variable("x", 0.0, 1.0)};
  rb.rules = {Rule{{0}, 2.0, 0.25}};
  rb = apply_fou(rb, 0.2);
  auto out = infer_it2_cos(rb, {0.1});
  CHECK(out.c == doctest::Approx(2.0));
  CHECK(out.s == doctest::Approx(0.25));
}

TEST_CASE("infer_it2_cos degenerate base matches infer_t1") {
  RuleBase rb = small_base(0.0);
  for (Rule& r : rb.rules) r.s = 0.0;
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> ux(-1, 1);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto iv = infer_it2_cos(rb, x);
    CHECK(iv.s <= 1e-12);
    CHECK(iv.c == doctest::Approx(infer_t1(rb, x)).epsilon(1e-12));
  }
}

TEST_CASE("infer_it2_cos endpoints match the corner enumeration") {
  RuleBase rb = small_base(0.25);
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> ux(-1.2, 1.2);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto firing = fire_it2(rb, x);
    std::vector<double> c, s, h, d;
    for (std::size_t r = 0; r < firing.size(); ++r) {
      c.push_back(rb.rules[r].c);
      s.push_back(rb.rules[r].s);
      h.push_back((firing[r][0] + firing[r][1]) / 2.0);
      d.push_back((firing[r][1] - firing[r][0]) / 2.0);
    }
    auto corner = oracles::km_corner_bruteforce(c, s, h, d);
    auto iv = infer_it2_cos(rb, x);
    CHECK(iv.c - iv.s == doctest::Approx(corner.y_min).epsilon(1e-12));
    CHECK(iv.c + iv.s == doctest::Approx(corner.y_max).epsilon(1e-12));
  }
}

TEST_CASE("downgrade consistency across the shared inputs") {
  // Zero mean uncertainty: the reduced interval midpoint equals the type-1
  // inference even with nonzero consequent spreads.
  RuleBase rb = small_base(0.0);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto iv = infer_it2_cos(rb, x);
    CHECK(std::abs(iv.c - infer_t1(rb, x)) <= 1e-9);
  }
}

TEST_CASE("it2 output interval contains the downgraded crisp output") {
  RuleBase rb = small_base(0.35);
  RuleBase t1base = downgrade_to_t1(rb);
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  for (int it = 0; it < 300; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    auto iv = infer_it2_cos(rb, x);
    double y = infer_t1(t1base, x);
    CHECK(iv.c - iv.s <= y + 1e-12);
    CHECK(iv.c + iv.s >= y - 1e-12);
  }
}

TEST_CASE("wider FOU never narrows the output interval") {
  std::mt19937_64 rng(49);
  std::uniform_real_distribution<double> ux(-1, 1);
  RuleBase base = small_base(0.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> x{ux(rng), ux(rng) + 1.0};
    double prev = -1.0;
    for (double rho : {0.0, 0.1, 0.25, 0.5}) {
      auto iv = infer_it2_cos(apply_fou(base, rho), x);
      CHECK(iv.s >= prev - 1e-12);
      prev = iv.s;
    }
  }
}

TEST_CASE("apply_fou reshapes the uncertainty band") {
  RuleBase rb = small_base(0.0);
  RuleBase wide = apply_fou(rb, 0.25);
  auto [lo0, up0] = fou(wide.inputs[0].labels[0].set, -1.0);
  CHECK(up0 == doctest::Approx(1.0));  // inside [m1, m2]
  auto [lo1, up1] = fou(wide.inputs[0].labels[0].set, 0.5);
  CHECK(up1 == doctest::Approx(gauss(0.5, -0.75, 1.0)));
  CHECK(lo1 == doctest::Approx(gauss(0.5, -1.25, 1.0)));
  // rho = 0 is the identity.
  RuleBase same = apply_fou(rb, 0.0);
  auto [l, u] = fou(same.inputs[0].labels[0].set, 0.3);
  CHECK(l == doctest::Approx(u));
}

TEST_CASE("downgrade_to_t1 midpoint rule") {
  RuleBase rb;
  rb.inputs = {LinguisticVariable{
      "x", -3.0, 3.0, {{"c", IT2Set::gaussian_umean(-0.1, 0.1, 1.0)}}}};
  rb.rules = {Rule{{0}, 1.0, 0.3}};
  RuleBase t1 = downgrade_to_t1(rb);
  auto [lo, up] = fou(t1.inputs[0].labels[0].set, 0.7);
  CHECK(lo == doctest::Approx(gauss(0.7, 0.0, 1.0)));
  CHECK(up == doctest::Approx(lo));
  CHECK(t1.rules[0].s == 0.0);
  CHECK(t1.rules[0].c == doctest::Approx(1.0));

  // Already-degenerate bases are fixed points.
  RuleBase again = downgrade_to_t1(t1);
  auto [lo2, up2] = fou(again.inputs[0].labels[0].set, 0.7);
  CHECK(lo2 == doctest::Approx(lo));
  CHECK(up2 == doctest::Approx(up));

  RuleBase bad;
  bad.inputs = {LinguisticVariable{
      "x", 0.0, 1.0, {{"t", IT2Set::from_bounds(TriangularMF{0, 0.5, 1},
                                                TriangularMF{0, 0.5, 1})}}}};
  CHECK_THROWS_AS(downgrade_to_t1(bad), std::invalid_argument);
}

TEST_CASE("wang_mendel_learn basics") {
  std::vector<LinguisticVariable> vars{make_variable("a", 0.0, 1.0),
                                       make_variable("b", 0.0, 1.0)};
  OutputSpec out{"y", -2.0, 2.0};

  // One sample sitting at the peaks of labels (1,0).
  auto single = wang_mendel_learn({{{1.0, 0.0}, 0.7}}, vars, out);
  CHECK(single.report.used == 1);
  CHECK(single.report.skipped == 0);
  REQUIRE(single.base.rules.size() == 1);
  CHECK(single.base.rules[0].antecedent == std::vector<std::size_t>{1, 0});
  CHECK(single.base.rules[0].c == doctest::Approx(0.7));
  CHECK(single.base.rules[0].s == doctest::Approx(0.04));  // 1% of range

  // Conflicting samples in one cell: the heavier one wins, the spread sees
  // both outputs.
  auto conflict = wang_mendel_learn(
      {{{0.0, 0.0}, 1.0}, {{0.25, 0.0}, -1.0}}, vars, out);
  REQUIRE(conflict.base.rules.size() == 1);
  CHECK(conflict.base.rules[0].c == doctest::Approx(1.0));
  CHECK(conflict.base.rules[0].s == doctest::Approx(1.0));  // stddev of {1,-1}
}

TEST_CASE("wang_mendel_learn skips uncovered samples and bounds rules") {
  std::vector<LinguisticVariable> vars;
  LinguisticVariable v{"x",
                       0.0,
                       1.0,
                       {{"low", IT2Set::from_bounds(TriangularMF{0, 0, 0.5},
                                                    TriangularMF{0, 0, 0.5})},
                        {"high", IT2Set::from_bounds(TriangularMF{0.5, 1, 1},
                                                     TriangularMF{0.5, 1, 1})}}};
  vars.push_back(v);
  auto r = wang_mendel_learn({{{0.2}, 1.0}, {{3.0}, 2.0}}, vars,
                             OutputSpec{"y", 0.0, 1.0});
  CHECK(r.report.used == 1);
  CHECK(r.report.skipped == 1);
  CHECK(r.base.rules.size() == 1);

  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> ux(0, 1);
  std::vector<TrainingSample> samples;
  std::vector<LinguisticVariable> four;
  for (int v4 = 0; v4 < 4; ++v4)
    four.push_back(make_variable("x" + std::to_string(v4), 0.0, 1.0));
  for (int i = 0; i < 1000; ++i) {
    TrainingSample s;
    s.x = {ux(rng), ux(rng), ux(rng), ux(rng)};
    s.y = std::sin(6.0 * s.x[0]) + s.x[1] - s.x[2] * s.x[3];
    samples.push_back(std::move(s));
  }
  auto big = wang_mendel_learn(samples, four, OutputSpec{"y", -2.0, 2.0});
  CHECK(big.report.used == 1000);
  CHECK(big.base.rules.size() <= 16);
  CHECK(big.base.rules.size() >= 8);  // dense sampling should fill most cells
  CHECK_NOTHROW(validate_rulebase(big.base));
}
