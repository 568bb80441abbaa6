#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "t2ctc/fuzzy_t1.hpp"
#include "t2ctc/fuzzy_t2.hpp"
#include "t2ctc/type_reduction.hpp"

namespace t2ctc {

// One labeled membership function. A type-1 label is an IT2Set whose bounds
// coincide (gaussian_umean with m1 == m2 keeps the parametric tag, which the
// downgrade and FOU utilities rely on).
struct Label {
  std::string name;
  IT2Set set;
};

struct LinguisticVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<Label> labels;
};

// True when the labels leave no hole: the best upper grade stays >= 0.05
// across the range.
bool coverage_ok(const LinguisticVariable& var, std::size_t probes = 201);

struct Rule {
  std::vector<std::size_t> antecedent;  // one label index per input variable
  double c = 0.0;                       // consequent center
  double s = 0.0;                       // consequent spread, 0 for type-1
};

struct RuleBase {
  std::vector<LinguisticVariable> inputs;
  std::string output;
  double out_lo = 0.0;
  double out_hi = 1.0;
  std::vector<Rule> rules;
  TNormKind tnorm = TNormKind::product;
  std::string tr = "cos";
};

// Structural checks (arity, label indices, antecedent uniqueness); throws
// std::invalid_argument on violation.
void validate_rulebase(const RuleBase& rb);

// Per-variable, per-label FOU bounds at a crisp input, so several rule bases
// over the same variables can share one evaluation per step.
using GradeTable = std::vector<std::vector<std::array<double, 2>>>;
GradeTable label_grades(const std::vector<LinguisticVariable>& vars,
                        const std::vector<double>& x);

// Type-1 firing evaluates each label at its center shape: the parametric
// mean-uncertain gaussians use the mean midpoint, anything else the average
// of the FOU bounds.
std::vector<double> fire_t1(const RuleBase& rb, const std::vector<double>& x);
double infer_t1(const RuleBase& rb, const std::vector<double>& x);

// Center-shape grades per variable and label, shareable across rule bases
// like the interval GradeTable.
using GradeTableT1 = std::vector<std::vector<double>>;
GradeTableT1 label_grades_t1(const std::vector<LinguisticVariable>& vars,
                             const std::vector<double>& x);
std::vector<double> fire_t1_cached(const RuleBase& rb,
                                   const GradeTableT1& grades);
double infer_t1_cached(const RuleBase& rb, const GradeTableT1& grades);

std::vector<std::array<double, 2>> fire_it2(const RuleBase& rb,
                                            const std::vector<double>& x);
std::vector<std::array<double, 2>> fire_it2_cached(const RuleBase& rb,
                                                   const GradeTable& grades);

// Center-of-sets reduction of the fired base: consequent intervals as values,
// firing intervals as weights, reduced by the exact iterative procedure.
IntervalT1 infer_it2_cos(const RuleBase& rb, const std::vector<double>& x);
IntervalT1 infer_it2_cos_cached(const RuleBase& rb, const GradeTable& grades);

struct LearnReport {
  std::size_t used = 0;
  std::size_t skipped = 0;  // samples outside every label support
};

struct TrainingSample {
  std::vector<double> x;
  double y = 0.0;
};

struct OutputSpec {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

// Table-lookup rule learning: each sample votes for its best label per input,
// the heaviest sample wins each antecedent cell, and the consequent spread is
// the cell's output standard deviation (1% of the output range when the cell
// cannot estimate one).
struct WangMendelResult {
  RuleBase base;
  LearnReport report;
};
WangMendelResult wang_mendel_learn(const std::vector<TrainingSample>& samples,
                                   std::vector<LinguisticVariable> variables,
                                   const OutputSpec& output,
                                   TNormKind tnorm = TNormKind::product);

// Collapses mean-uncertain gaussian labels to their midpoint gaussians and
// consequent intervals to centers. Only parametric gaussian labels qualify.
RuleBase downgrade_to_t1(const RuleBase& rb);

// Rescales the mean uncertainty of every gaussian label to [m - rho sigma,
// m + rho sigma] about its current midpoint. rho = 0 yields a type-1 base.
RuleBase apply_fou(const RuleBase& rb, double rho);

// Evenly spaced gaussian labels with centers at the range ends (and interior
// points for more than two labels); sigma is half the center spacing.
LinguisticVariable make_variable(const std::string& name, double lo, double hi,
                                 std::size_t label_count = 2);

}  // namespace t2ctc
