#include "t2ctc/fuzzy_t2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace t2ctc {

namespace {

double gauss(double x, double m, double sigma) {
  if (sigma <= 0.0) return x == m ? 1.0 : 0.0;
  double z = (x - m) / sigma;
  return std::exp(-0.5 * z * z);
}

SampledMF sample_mf(const std::function<double(double)>& f, double lo,
                    double hi, std::size_t n) {
  SampledMF s;
  s.domain.resize(n);
  s.grades.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(n - 1);
    s.domain[i] = x;
    s.grades[i] = f(x);
  }
  return s;
}

void validate_slice(const SecondarySlice& s) {
  if (s.primary.empty() || s.primary.size() != s.grades.size())
    throw std::invalid_argument("slice arrays must be nonempty and same size");
  for (std::size_t i = 0; i < s.primary.size(); ++i) {
    if (s.primary[i] < 0.0 || s.primary[i] > 1.0 || s.grades[i] < 0.0 ||
        s.grades[i] > 1.0)
      throw std::invalid_argument("slice values must lie in [0,1]");
    if (i > 0 && s.primary[i] <= s.primary[i - 1])
      throw std::invalid_argument("slice primary grid must be ascending");
  }
}

SecondarySlice combine_slices(const SecondarySlice& A, const SecondarySlice& B,
                              TNormKind tnorm, bool join) {
  validate_slice(A);
  validate_slice(B);
  std::map<double, double> acc;
  for (std::size_t i = 0; i < A.primary.size(); ++i) {
    for (std::size_t j = 0; j < B.primary.size(); ++j) {
      double point = join ? std::max(A.primary[i], B.primary[j])
                          : tnorm_apply(tnorm, A.primary[i], B.primary[j]);
      double grade = tnorm_apply(tnorm, A.grades[i], B.grades[j]);
      auto [it, inserted] = acc.emplace(point, grade);
      if (!inserted) it->second = std::max(it->second, grade);
    }
  }
  SecondarySlice out;
  out.primary.reserve(acc.size());
  out.grades.reserve(acc.size());
  for (auto& [p, g] : acc) {
    out.primary.push_back(p);
    out.grades.push_back(g);
  }
  return out;
}

}  // namespace

IT2Set IT2Set::gaussian_umean(double m1, double m2, double sigma) {
  if (m1 > m2) throw std::invalid_argument("m1 must not exceed m2");
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  GaussianUncertainMean p{m1, m2, sigma};
  double lo = m1 - 6.0 * sigma, hi = m2 + 6.0 * sigma;
  double mid = 0.5 * (m1 + m2);
  auto upper = [&](double x) {
    if (x < m1) return gauss(x, m1, sigma);
    if (x > m2) return gauss(x, m2, sigma);
    return 1.0;
  };
  auto lower = [&](double x) {
    return x <= mid ? gauss(x, m2, sigma) : gauss(x, m1, sigma);
  };
  IT2Set s{sample_mf(lower, lo, hi, 401), sample_mf(upper, lo, hi, 401), p};
  return s;
}

IT2Set IT2Set::gaussian_usigma(double m, double sigma1, double sigma2) {
  if (sigma1 > sigma2) throw std::invalid_argument("sigma1 must not exceed sigma2");
  if (sigma1 <= 0.0) throw std::invalid_argument("sigma must be positive");
  GaussianUncertainSigma p{m, sigma1, sigma2};
  double lo = m - 6.0 * sigma2, hi = m + 6.0 * sigma2;
  IT2Set s{sample_mf([&](double x) { return gauss(x, m, sigma1); }, lo, hi, 401),
           sample_mf([&](double x) { return gauss(x, m, sigma2); }, lo, hi, 401),
           p};
  return s;
}

IT2Set IT2Set::from_bounds(MembershipFunctionT1 lower,
                           MembershipFunctionT1 upper) {
  IT2Set s{std::move(lower), std::move(upper), std::nullopt};
  Support a = support_of(s.lower);
  Support b = support_of(s.upper);
  double lo = std::min(a.lo, b.lo), hi = std::max(a.hi, b.hi);
  for (int i = 0; i < 1000; ++i) {
    double x = lo + (hi - lo) * i / 999.0;
    if (eval_mf(s.lower, x) > eval_mf(s.upper, x) + 1e-9)
      throw std::invalid_argument("lower bound exceeds upper bound");
  }
  return s;
}

std::pair<double, double> fou(const IT2Set& set, double x) {
  if (set.parametric) {
    if (const auto* um = std::get_if<GaussianUncertainMean>(&*set.parametric)) {
      double up = x < um->m1   ? gauss(x, um->m1, um->sigma)
                  : x > um->m2 ? gauss(x, um->m2, um->sigma)
                               : 1.0;
      double lo = x <= 0.5 * (um->m1 + um->m2) ? gauss(x, um->m2, um->sigma)
                                               : gauss(x, um->m1, um->sigma);
      return {lo, up};
    }
    const auto& us = std::get<GaussianUncertainSigma>(*set.parametric);
    return {gauss(x, us.m, us.sigma1), gauss(x, us.m, us.sigma2)};
  }
  double lo = eval_mf(set.lower, x);
  double up = eval_mf(set.upper, x);
  return {std::min(lo, up), up};
}

SecondarySlice join_discrete(const SecondarySlice& A, const SecondarySlice& B,
                             TNormKind tnorm) {
  return combine_slices(A, B, tnorm, true);
}

SecondarySlice meet_discrete(const SecondarySlice& A, const SecondarySlice& B,
                             TNormKind tnorm) {
  return combine_slices(A, B, tnorm, false);
}

namespace {

struct ConvexInputs {
  std::vector<double> peaks;
  double lo = 0, hi = 0;
};

ConvexInputs prep_convex(const std::vector<MembershipFunctionT1>& mfs,
                         bool leftmost_peak) {
  if (mfs.empty()) throw std::invalid_argument("need at least one set");
  ConvexInputs ci;
  ci.lo = std::numeric_limits<double>::infinity();
  ci.hi = -ci.lo;
  for (const auto& mf : mfs) {
    if (peak_grade(mf) < 1.0 - 1e-9)
      throw std::invalid_argument("non-normal membership function");
    Support s = support_of(mf);
    ci.lo = std::min(ci.lo, s.lo);
    ci.hi = std::max(ci.hi, s.hi);
    ci.peaks.push_back(leftmost_peak ? peak_left(mf) : peak_right(mf));
  }
  for (std::size_t i = 1; i < ci.peaks.size(); ++i)
    if (ci.peaks[i] < ci.peaks[i - 1] - 1e-12)
      throw std::invalid_argument("peaks must be sorted ascending");
  return ci;
}

}  // namespace

FuzzyNumberT1 join_closed_convex(const std::vector<MembershipFunctionT1>& mfs,
                                 TNormKind tnorm, std::size_t grid_points) {
  ConvexInputs ci = prep_convex(mfs, true);
  std::size_t n = mfs.size();
  std::vector<double> dom(grid_points), out(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    double theta = ci.lo + (ci.hi - ci.lo) * static_cast<double>(g) /
                               static_cast<double>(grid_points - 1);
    dom[g] = theta;
    std::size_t k = 0;
    while (k < n && ci.peaks[k] <= theta) ++k;
    double grade;
    if (k == n) {
      grade = 0.0;
      for (const auto& mf : mfs) grade = std::max(grade, eval_mf(mf, theta));
    } else if (tnorm == TNormKind::minimum) {
      grade = 1.0;
      for (std::size_t i = k; i < n; ++i)
        grade = std::min(grade, eval_mf(mfs[i], theta));
    } else {
      grade = 1.0;
      for (std::size_t i = k; i < n; ++i) grade *= eval_mf(mfs[i], theta);
    }
    out[g] = grade;
  }
  return FuzzyNumberT1::from_grid(std::move(dom), std::move(out));
}

FuzzyNumberT1 meet_closed_convex(const std::vector<MembershipFunctionT1>& mfs,
                                 TNormKind tnorm, std::size_t grid_points) {
  if (tnorm != TNormKind::minimum)
    throw std::invalid_argument("no exact closed form for the product meet");
  ConvexInputs ci = prep_convex(mfs, false);
  std::size_t n = mfs.size();
  std::vector<double> dom(grid_points), out(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    double theta = ci.lo + (ci.hi - ci.lo) * static_cast<double>(g) /
                               static_cast<double>(grid_points - 1);
    dom[g] = theta;
    std::size_t k = 0;
    while (k < n && ci.peaks[k] <= theta) ++k;
    double grade;
    if (k == 0) {
      grade = 0.0;
      for (const auto& mf : mfs) grade = std::max(grade, eval_mf(mf, theta));
    } else {
      grade = 1.0;
      for (std::size_t i = 0; i < k; ++i)
        grade = std::min(grade, eval_mf(mfs[i], theta));
      if (k == n)
        for (const auto& mf : mfs) grade = std::min(grade, eval_mf(mf, theta));
    }
    out[g] = grade;
  }
  return FuzzyNumberT1::from_grid(std::move(dom), std::move(out));
}

namespace {

void check_grade_interval(const std::array<double, 2>& s) {
  if (s[0] < 0.0 || s[1] > 1.0 || s[0] > s[1])
    throw std::invalid_argument("grade interval bounds must lie in [0,1]");
}

}  // namespace

std::array<double, 2> meet_interval(
    const std::vector<std::array<double, 2>>& sets, TNormKind tnorm) {
  if (sets.empty()) throw std::invalid_argument("need at least one interval");
  std::array<double, 2> r = sets[0];
  check_grade_interval(r);
  for (std::size_t i = 1; i < sets.size(); ++i) {
    check_grade_interval(sets[i]);
    r[0] = tnorm_apply(tnorm, r[0], sets[i][0]);
    r[1] = tnorm_apply(tnorm, r[1], sets[i][1]);
  }
  return r;
}

std::array<double, 2> join_interval(
    const std::vector<std::array<double, 2>>& sets) {
  if (sets.empty()) throw std::invalid_argument("need at least one interval");
  std::array<double, 2> r = sets[0];
  check_grade_interval(r);
  for (std::size_t i = 1; i < sets.size(); ++i) {
    check_grade_interval(sets[i]);
    r[0] = std::max(r[0], sets[i][0]);
    r[1] = std::max(r[1], sets[i][1]);
  }
  return r;
}

GaussianMeetResult meet_gaussian_approx(const std::vector<GaussianT1>& sets) {
  if (sets.empty()) throw std::invalid_argument("need at least one set");
  GaussianMeetResult r;
  double mprod = 1.0;
  for (const auto& s : sets) {
    mprod *= s.m;
    if (s.m < 0.1) r.quality_warning = true;
  }
  double var = 0.0;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    double coeff = 1.0;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (i != j) coeff *= sets[i].m * sets[i].m;
    var += sets[j].sigma * sets[j].sigma * coeff;
  }
  r.value = {mprod, std::sqrt(var)};
  return r;
}

GeneralT2Discrete complement_discrete(const GeneralT2Discrete& A) {
  GeneralT2Discrete out;
  out.domain = A.domain;
  out.slices.reserve(A.slices.size());
  for (const auto& s : A.slices) {
    validate_slice(s);
    SecondarySlice c;
    c.primary.resize(s.primary.size());
    c.grades.resize(s.grades.size());
    for (std::size_t i = 0; i < s.primary.size(); ++i) {
      std::size_t j = s.primary.size() - 1 - i;
      c.primary[i] = 1.0 - s.primary[j];
      c.grades[i] = s.grades[j];
    }
    out.slices.push_back(std::move(c));
  }
  return out;
}

std::uint64_t embedded_count(const GeneralT2Discrete& set) {
  std::uint64_t count = 1;
  for (const auto& s : set.slices) {
    if (s.primary.empty())
      throw std::invalid_argument("each slice must be nonempty");
    std::uint64_t m = s.primary.size();
    if (count > UINT64_MAX / m) return UINT64_MAX;
    count *= m;
  }
  return count;
}

void enumerate_embedded(const GeneralT2Discrete& set, TNormKind tnorm,
                        const std::function<void(const EmbeddedSelection&)>& fn,
                        std::uint64_t cap) {
  if (set.domain.size() != set.slices.size() || set.slices.empty())
    throw std::invalid_argument("domain and slices must match and be nonempty");
  if (embedded_count(set) > cap)
    throw std::domain_error("embedded-set explosion");

  std::size_t n = set.slices.size();
  EmbeddedSelection sel;
  sel.index.assign(n, 0);
  sel.primary.assign(n, 0.0);
  for (;;) {
    double combined = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      sel.primary[i] = set.slices[i].primary[sel.index[i]];
      combined = tnorm_apply(tnorm, combined, set.slices[i].grades[sel.index[i]]);
    }
    sel.combined = combined;
    fn(sel);
    std::size_t i = n;
    while (i-- > 0) {
      if (++sel.index[i] < set.slices[i].primary.size()) break;
      sel.index[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace t2ctc
