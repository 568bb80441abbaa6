#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "t2ctc/fuzzy_t1.hpp"

namespace t2ctc {

// One vertical slice of a general T2 set: primary grades in [0,1] and their
// secondary grades.
struct SecondarySlice {
  std::vector<double> primary;  // ascending, in [0,1]
  std::vector<double> grades;   // same length, in [0,1]
};

struct GeneralT2Discrete {
  std::vector<double> domain;  // ascending
  std::vector<SecondarySlice> slices;
};

// Parametric interval T2 forms.
struct GaussianUncertainMean {
  double m1 = 0, m2 = 0;  // m1 <= m2
  double sigma = 1;
};
struct GaussianUncertainSigma {
  double m = 0;
  double sigma1 = 1, sigma2 = 1;  // sigma1 <= sigma2
};
using IT2Parametric = std::variant<GaussianUncertainMean, GaussianUncertainSigma>;

struct IT2Set {
  MembershipFunctionT1 lower;
  MembershipFunctionT1 upper;
  std::optional<IT2Parametric> parametric;

  static IT2Set gaussian_umean(double m1, double m2, double sigma);
  static IT2Set gaussian_usigma(double m, double sigma1, double sigma2);
  static IT2Set from_bounds(MembershipFunctionT1 lower,
                            MembershipFunctionT1 upper);
};

// Lower/upper membership bounds at x.
std::pair<double, double> fou(const IT2Set& set, double x);

SecondarySlice join_discrete(const SecondarySlice& A, const SecondarySlice& B,
                             TNormKind tnorm);
SecondarySlice meet_discrete(const SecondarySlice& A, const SecondarySlice& B,
                             TNormKind tnorm);

// Closed forms for convex normal type-1 operands with ascending peaks.
// Output is sampled on a uniform grid over the union support.
FuzzyNumberT1 join_closed_convex(const std::vector<MembershipFunctionT1>& mfs,
                                 TNormKind tnorm, std::size_t grid_points = 401);
// Minimum t-norm only; the product meet has no exact closed form.
FuzzyNumberT1 meet_closed_convex(const std::vector<MembershipFunctionT1>& mfs,
                                 TNormKind tnorm = TNormKind::minimum,
                                 std::size_t grid_points = 401);

// Interval grade algebra: meet multiplies/minimizes endpoints, join maximizes.
// Bounds are membership grades and must lie in [0,1].
std::array<double, 2> meet_interval(const std::vector<std::array<double, 2>>& sets,
                                    TNormKind tnorm);
std::array<double, 2> join_interval(const std::vector<std::array<double, 2>>& sets);

struct GaussianMeetResult {
  GaussianT1 value;
  bool quality_warning = false;  // set when any mean < 0.1
};
// Product-t-norm meet of gaussian grade sets: mean is the product of means,
// sigma aggregates each sigma_j scaled by the other means.
GaussianMeetResult meet_gaussian_approx(const std::vector<GaussianT1>& sets);

GeneralT2Discrete complement_discrete(const GeneralT2Discrete& A);

struct EmbeddedSelection {
  std::vector<std::size_t> index;   // chosen primary index per domain point
  std::vector<double> primary;      // chosen primary grades
  double combined = 1.0;            // t-norm fold of secondary grades
};

std::uint64_t embedded_count(const GeneralT2Discrete& set);

// Visits all embedded selections in deterministic mixed-radix order (last
// domain point fastest). Throws when the count exceeds the cap.
void enumerate_embedded(const GeneralT2Discrete& set, TNormKind tnorm,
                        const std::function<void(const EmbeddedSelection&)>& fn,
                        std::uint64_t cap = 1000000);

}  // namespace t2ctc
