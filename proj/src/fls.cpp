#include "t2ctc/fls.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <variant>

namespace t2ctc {

namespace {

const GaussianUncertainMean* umean_tag(const IT2Set& set) {
  if (!set.parametric) return nullptr;
  return std::get_if<GaussianUncertainMean>(&*set.parametric);
}

double t1_grade(const Label& label, double x) {
  if (const auto* g = umean_tag(label.set)) {
    double m = (g->m1 + g->m2) / 2.0;
    if (g->sigma <= 0.0) return x == m ? 1.0 : 0.0;
    double z = (x - m) / g->sigma;
    return std::exp(-0.5 * z * z);
  }
  auto [lo, hi] = fou(label.set, x);
  return (lo + hi) / 2.0;
}

void check_arity(const RuleBase& rb, std::size_t n) {
  if (rb.inputs.size() != n)
    throw std::invalid_argument("input arity mismatch");
}

}  // namespace

bool coverage_ok(const LinguisticVariable& var, std::size_t probes) {
  if (var.labels.empty() || probes < 2) return false;
  for (std::size_t i = 0; i < probes; ++i) {
    double x = var.lo + (var.hi - var.lo) * static_cast<double>(i) /
                            static_cast<double>(probes - 1);
    double best = 0.0;
    for (const Label& l : var.labels) best = std::max(best, fou(l.set, x).second);
    if (best < 0.05) return false;
  }
  return true;
}

void validate_rulebase(const RuleBase& rb) {
  if (rb.inputs.empty()) throw std::invalid_argument("rule base has no inputs");
  std::set<std::vector<std::size_t>> seen;
  for (const Rule& r : rb.rules) {
    if (r.antecedent.size() != rb.inputs.size())
      throw std::invalid_argument("rule antecedent arity mismatch");
    for (std::size_t v = 0; v < r.antecedent.size(); ++v)
      if (r.antecedent[v] >= rb.inputs[v].labels.size())
        throw std::invalid_argument("label index out of range");
    if (r.s < 0.0)
      throw std::invalid_argument("consequent spread must be nonnegative");
    if (!seen.insert(r.antecedent).second)
      throw std::invalid_argument("duplicate rule antecedent");
  }
}

GradeTable label_grades(const std::vector<LinguisticVariable>& vars,
                        const std::vector<double>& x) {
  if (vars.size() != x.size())
    throw std::invalid_argument("input arity mismatch");
  GradeTable table(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    table[v].resize(vars[v].labels.size());
    for (std::size_t l = 0; l < vars[v].labels.size(); ++l) {
      auto [lo, hi] = fou(vars[v].labels[l].set, x[v]);
      table[v][l] = {lo, hi};
    }
  }
  return table;
}

GradeTableT1 label_grades_t1(const std::vector<LinguisticVariable>& vars,
                             const std::vector<double>& x) {
  if (vars.size() != x.size())
    throw std::invalid_argument("input arity mismatch");
  GradeTableT1 table(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    table[v].resize(vars[v].labels.size());
    for (std::size_t l = 0; l < vars[v].labels.size(); ++l)
      table[v][l] = t1_grade(vars[v].labels[l], x[v]);
  }
  return table;
}

std::vector<double> fire_t1_cached(const RuleBase& rb,
                                   const GradeTableT1& grades) {
  if (grades.size() != rb.inputs.size())
    throw std::invalid_argument("grade table arity mismatch");
  std::vector<double> strengths(rb.rules.size(), 0.0);
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    double w = 1.0;
    for (std::size_t v = 0; v < rb.inputs.size(); ++v)
      w = tnorm_apply(rb.tnorm, w, grades[v][rb.rules[r].antecedent[v]]);
    strengths[r] = w;
  }
  return strengths;
}

double infer_t1_cached(const RuleBase& rb, const GradeTableT1& grades) {
  std::vector<double> w = fire_t1_cached(rb, grades);
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < w.size(); ++r) {
    num += w[r] * rb.rules[r].c;
    den += w[r];
  }
  if (den <= 0.0) throw std::domain_error("no rule fired");
  return num / den;
}

std::vector<double> fire_t1(const RuleBase& rb, const std::vector<double>& x) {
  check_arity(rb, x.size());
  return fire_t1_cached(rb, label_grades_t1(rb.inputs, x));
}

double infer_t1(const RuleBase& rb, const std::vector<double>& x) {
  check_arity(rb, x.size());
  return infer_t1_cached(rb, label_grades_t1(rb.inputs, x));
}

std::vector<std::array<double, 2>> fire_it2_cached(const RuleBase& rb,
                                                   const GradeTable& grades) {
  if (grades.size() != rb.inputs.size())
    throw std::invalid_argument("grade table arity mismatch");
  std::vector<std::array<double, 2>> out(rb.rules.size());
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    double lo = 1.0, hi = 1.0;
    for (std::size_t v = 0; v < rb.inputs.size(); ++v) {
      const auto& g = grades[v][rb.rules[r].antecedent[v]];
      lo = tnorm_apply(rb.tnorm, lo, g[0]);
      hi = tnorm_apply(rb.tnorm, hi, g[1]);
    }
    out[r] = {lo, hi};
  }
  return out;
}

std::vector<std::array<double, 2>> fire_it2(const RuleBase& rb,
                                            const std::vector<double>& x) {
  check_arity(rb, x.size());
  return fire_it2_cached(rb, label_grades(rb.inputs, x));
}

IntervalT1 infer_it2_cos_cached(const RuleBase& rb, const GradeTable& grades) {
  std::vector<std::array<double, 2>> firing = fire_it2_cached(rb, grades);
  double best = 0.0;
  for (const auto& f : firing) best = std::max(best, f[1]);
  if (best <= 0.0) throw std::domain_error("no rule fired");
  std::vector<double> c(firing.size()), s(firing.size()), h(firing.size()),
      d(firing.size());
  for (std::size_t r = 0; r < firing.size(); ++r) {
    c[r] = rb.rules[r].c;
    s[r] = rb.rules[r].s;
    h[r] = (firing[r][0] + firing[r][1]) / 2.0;
    d[r] = (firing[r][1] - firing[r][0]) / 2.0;
  }
  return km_exact_interval(c, s, h, d).interval();
}

IntervalT1 infer_it2_cos(const RuleBase& rb, const std::vector<double>& x) {
  check_arity(rb, x.size());
  return infer_it2_cos_cached(rb, label_grades(rb.inputs, x));
}

WangMendelResult wang_mendel_learn(const std::vector<TrainingSample>& samples,
                                   std::vector<LinguisticVariable> variables,
                                   const OutputSpec& output, TNormKind tnorm) {
  if (samples.empty()) throw std::invalid_argument("no training samples");
  if (variables.empty()) throw std::invalid_argument("no input variables");
  const std::size_t nv = variables.size();

  struct CellState {
    double best_weight = -1.0;
    double best_y = 0.0;
    // Running output moments for the spread estimate.
    double sum_y = 0.0;
    double sum_y2 = 0.0;
    std::size_t count = 0;
  };
  std::map<std::vector<std::size_t>, CellState> cells;

  LearnReport report;
  for (const TrainingSample& sample : samples) {
    if (sample.x.size() != nv)
      throw std::invalid_argument("sample arity mismatch");
    std::vector<std::size_t> cell(nv);
    double weight = 1.0;
    bool covered = true;
    for (std::size_t v = 0; v < nv; ++v) {
      double best = 0.0;
      std::size_t arg = 0;
      for (std::size_t l = 0; l < variables[v].labels.size(); ++l) {
        double g = fou(variables[v].labels[l].set, sample.x[v]).second;
        if (g > best) {
          best = g;
          arg = l;
        }
      }
      if (best <= 0.0) {
        covered = false;
        break;
      }
      cell[v] = arg;
      weight *= best;
    }
    if (!covered) {
      ++report.skipped;
      continue;
    }
    ++report.used;
    CellState& st = cells[cell];
    if (weight > st.best_weight) {
      st.best_weight = weight;
      st.best_y = sample.y;
    }
    st.sum_y += sample.y;
    st.sum_y2 += sample.y * sample.y;
    ++st.count;
  }
  if (cells.empty()) throw std::domain_error("every sample fell outside the labels");

  RuleBase rb;
  rb.inputs = std::move(variables);
  rb.output = output.name;
  rb.out_lo = output.lo;
  rb.out_hi = output.hi;
  rb.tnorm = tnorm;
  double fallback = 0.01 * (output.hi - output.lo);
  for (const auto& [cell, st] : cells) {
    double mean = st.sum_y / static_cast<double>(st.count);
    double var = st.sum_y2 / static_cast<double>(st.count) - mean * mean;
    double spread = var > 0.0 ? std::sqrt(var) : 0.0;
    if (st.count < 2 || spread <= 0.0) spread = fallback;
    rb.rules.push_back(Rule{cell, st.best_y, spread});
  }
  return {std::move(rb), report};
}

RuleBase downgrade_to_t1(const RuleBase& rb) {
  RuleBase out = rb;
  for (LinguisticVariable& var : out.inputs)
    for (Label& label : var.labels) {
      const auto* g = umean_tag(label.set);
      if (!g) throw std::invalid_argument("unsupported membership kind");
      double m = (g->m1 + g->m2) / 2.0;
      label.set = IT2Set::gaussian_umean(m, m, g->sigma);
    }
  for (Rule& r : out.rules) r.s = 0.0;
  return out;
}

RuleBase apply_fou(const RuleBase& rb, double rho) {
  if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
  RuleBase out = rb;
  for (LinguisticVariable& var : out.inputs)
    for (Label& label : var.labels) {
      const auto* g = umean_tag(label.set);
      if (!g) throw std::invalid_argument("unsupported membership kind");
      double m = (g->m1 + g->m2) / 2.0;
      label.set =
          IT2Set::gaussian_umean(m - rho * g->sigma, m + rho * g->sigma, g->sigma);
    }
  return out;
}

LinguisticVariable make_variable(const std::string& name, double lo, double hi,
                                 std::size_t label_count) {
  if (label_count < 2) throw std::invalid_argument("need at least two labels");
  if (!(hi > lo)) throw std::invalid_argument("range must be nonempty");
  LinguisticVariable var{name, lo, hi, {}};
  double spacing = (hi - lo) / static_cast<double>(label_count - 1);
  double sigma = spacing / 2.0;
  for (std::size_t l = 0; l < label_count; ++l) {
    double m = lo + spacing * static_cast<double>(l);
    var.labels.push_back(
        Label{"mf" + std::to_string(l + 1), IT2Set::gaussian_umean(m, m, sigma)});
  }
  return var;
}

}  // namespace t2ctc
