#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace t2ctc {

enum class TNormKind { minimum, product };

double tnorm_apply(TNormKind t, double a, double b);

// Membership function variants. Triangular and gaussian are normal and
// unimodal by construction; sampled grades live on a strictly ascending grid.
struct GaussianMF {
  double mean = 0;
  double sigma = 1;  // > 0
};
struct TriangularMF {
  double left = 0, peak = 0, right = 0;  // left <= peak <= right
};
struct IntervalMF {
  double lo = 0, hi = 0;  // lo <= hi
};
struct SingletonMF {
  double point = 0;
};
struct SampledMF {
  std::vector<double> domain;  // strictly ascending
  std::vector<double> grades;  // same length, values in [0,1]
};

using MembershipFunctionT1 =
    std::variant<GaussianMF, TriangularMF, IntervalMF, SingletonMF, SampledMF>;

// Total evaluation; grid variant interpolates linearly, 0 outside support.
double eval_mf(const MembershipFunctionT1& mf, double x);

struct Support {
  double lo = 0, hi = 0;
};
// Bounded support; gaussians are truncated at +-6 sigma.
Support support_of(const MembershipFunctionT1& mf);

// Leftmost / rightmost maximizer and the maximum grade.
double peak_left(const MembershipFunctionT1& mf);
double peak_right(const MembershipFunctionT1& mf);
double peak_grade(const MembershipFunctionT1& mf);

// Interval type-1 set [c-s, c+s]; s = 0 is a crisp number.
struct IntervalT1 {
  double c = 0;
  double s = 0;
};

// Gaussian type-1 set; sigma = 0 is a crisp number.
struct GaussianT1 {
  double m = 0;
  double sigma = 0;
};

// A fuzzy number is either a parametric MF or a grid (the sampled variant).
struct FuzzyNumberT1 {
  MembershipFunctionT1 mf;

  static FuzzyNumberT1 parametric(MembershipFunctionT1 m);
  static FuzzyNumberT1 from_grid(std::vector<double> domain,
                                 std::vector<double> grades);
  static FuzzyNumberT1 from_interval(const IntervalT1& it);
  static FuzzyNumberT1 from_gaussian(const GaussianT1& g);

  bool is_grid() const;
  double grade(double x) const { return eval_mf(mf, x); }
  Support support() const { return support_of(mf); }
};

struct GridSpec {
  std::size_t points = 201;           // output grid resolution
  std::size_t operand_points = 1001;  // sampling density per operand
};

// Extension principle for a binary operation: output grade at y is the sup of
// tnorm(F(v), G(w)) over pairs with op(v, w) in y's bucket. Brute-force
// reference for every closed form in this library.
FuzzyNumberT1 extend_binary(const FuzzyNumberT1& F, const FuzzyNumberT1& G,
                            const std::function<double(double, double)>& op,
                            TNormKind tnorm, const GridSpec& grid = {});

// sum_i alpha_i * X_i + beta for interval sets: center combines affinely,
// spreads add with |alpha|.
IntervalT1 affine_combine_interval(const std::vector<IntervalT1>& sets,
                                   const std::vector<double>& alphas,
                                   double beta);

// Same for gaussian sets; sigma is sqrt(sum alpha^2 sigma^2) under product
// t-norm and sum |alpha| sigma under minimum.
GaussianT1 affine_combine_gaussian(const std::vector<GaussianT1>& sets,
                                   const std::vector<double>& alphas,
                                   double beta, TNormKind tnorm);

double centroid_defuzz(const FuzzyNumberT1& F);

}  // namespace t2ctc
