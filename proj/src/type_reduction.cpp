#include "t2ctc/type_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <variant>

namespace t2ctc {

namespace {

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

struct WeightedPoint {
  double x;
  double grade;
};

// Discretization used by the brute-force reductions: sampled sets keep their
// own grid, parametric shapes get a uniform grid over their support.
std::vector<WeightedPoint> discretize(const FuzzyNumberT1& f, std::size_t n) {
  if (n < 2) throw std::invalid_argument("need at least two points per set");
  return std::visit(
      [&](const auto& m) -> std::vector<WeightedPoint> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SingletonMF>) {
          return {{m.point, 1.0}};
        } else if constexpr (std::is_same_v<T, SampledMF>) {
          std::vector<WeightedPoint> out(m.domain.size());
          for (std::size_t i = 0; i < m.domain.size(); ++i)
            out[i] = {m.domain[i], m.grades[i]};
          return out;
        } else {
          Support s = support_of(f.mf);
          std::vector<WeightedPoint> out(n);
          for (std::size_t i = 0; i < n; ++i) {
            double x = s.lo + (s.hi - s.lo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
            out[i] = {x, eval_mf(f.mf, x)};
          }
          return out;
        }
      },
      f.mf);
}

FuzzyNumberT1 set_from_points(const std::map<double, double>& pts) {
  if (pts.empty()) throw std::domain_error("type-reduced set is empty");
  std::vector<double> dom, grades;
  dom.reserve(pts.size());
  grades.reserve(pts.size());
  for (const auto& [x, g] : pts) {
    dom.push_back(x);
    grades.push_back(g);
  }
  return FuzzyNumberT1::from_grid(std::move(dom), std::move(grades));
}

// Enumerates the cartesian product of point lists, calling fn with the
// current picks. Throws when the combination count exceeds the cap.
void for_each_combo(const std::vector<std::vector<WeightedPoint>>& lists,
                    std::uint64_t cap,
                    const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::uint64_t total = 1;
  for (const auto& l : lists) {
    if (l.empty()) throw std::invalid_argument("empty discretization");
    total = mul_sat(total, l.size());
  }
  if (total > cap) throw std::domain_error("combination count exceeds cap");
  std::vector<std::size_t> idx(lists.size(), 0);
  while (true) {
    fn(idx);
    std::size_t pos = lists.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < lists[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
  }
}

// Exact coordinate transform a*X + b of a fuzzy number.
FuzzyNumberT1 scale_shift(const FuzzyNumberT1& f, double a, double b) {
  if (a == 0.0) return FuzzyNumberT1{SingletonMF{b}};
  return std::visit(
      [&](const auto& m) -> FuzzyNumberT1 {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SingletonMF>) {
          return FuzzyNumberT1{SingletonMF{a * m.point + b}};
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          double u = a * m.lo + b, v = a * m.hi + b;
          return FuzzyNumberT1{IntervalMF{std::min(u, v), std::max(u, v)}};
        } else if constexpr (std::is_same_v<T, GaussianMF>) {
          return FuzzyNumberT1{GaussianMF{a * m.mean + b, std::abs(a) * m.sigma}};
        } else if constexpr (std::is_same_v<T, TriangularMF>) {
          double l = a * m.left + b, p = a * m.peak + b, r = a * m.right + b;
          if (a < 0) std::swap(l, r);
          return FuzzyNumberT1{TriangularMF{l, p, r}};
        } else {
          std::vector<double> dom(m.domain.size()), g(m.grades);
          for (std::size_t i = 0; i < dom.size(); ++i)
            dom[i] = a * m.domain[i] + b;
          if (a < 0) {
            std::reverse(dom.begin(), dom.end());
            std::reverse(g.begin(), g.end());
          }
          return FuzzyNumberT1::from_grid(std::move(dom), std::move(g));
        }
      },
      f.mf);
}

// Center/spread summary of one operand plus its shape family.
enum class ShapeKind { crisp, interval, gaussian, general };

struct CenterSpread {
  double center = 0.0;
  double spread = 0.0;
  ShapeKind kind = ShapeKind::general;
};

CenterSpread summarize(const FuzzyNumberT1& f) {
  return std::visit(
      [&](const auto& m) -> CenterSpread {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SingletonMF>) {
          return {m.point, 0.0, ShapeKind::crisp};
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          return {(m.lo + m.hi) / 2.0, (m.hi - m.lo) / 2.0, ShapeKind::interval};
        } else if constexpr (std::is_same_v<T, GaussianMF>) {
          return {m.mean, m.sigma, ShapeKind::gaussian};
        } else {
          Support s = support_of(f.mf);
          return {(s.lo + s.hi) / 2.0, (s.hi - s.lo) / 2.0, ShapeKind::general};
        }
      },
      f.mf);
}

void check_weight_centers(const std::vector<double>& h,
                          const std::vector<double>& d) {
  if (h.size() != d.size()) throw std::invalid_argument("size mismatch");
  for (std::size_t l = 0; l < h.size(); ++l)
    if (d[l] < 0.0 || h[l] < d[l])
      throw std::invalid_argument(
          "weights must satisfy h >= spread >= 0");
}

// One switch-point pass sequence. zs must be ascending; lo/hi are the weights
// used left/right of the switch index.
double km_pass(const std::vector<double>& zs, const std::vector<double>& lo,
               const std::vector<double>& hi, double y0, int& iters,
               std::vector<double>& trace) {
  const std::size_t n = zs.size();
  double y = y0;
  std::ptrdiff_t k_prev = -1;
  iters = 0;
  for (std::size_t it = 1; it <= n; ++it) {
    iters = static_cast<int>(it);
    std::ptrdiff_t k =
        std::upper_bound(zs.begin(), zs.end(), y) - zs.begin();
    if (k == k_prev) break;
    double num = 0.0, den = 0.0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      double w = i < k ? lo[i] : hi[i];
      num += w * zs[i];
      den += w;
    }
    if (den <= 0.0) break;
    y = num / den;
    trace.push_back(y);
    k_prev = k;
  }
  return y;
}

}  // namespace

FuzzyNumberT1 centroid_tr_bruteforce(const GeneralT2Discrete& set,
                                     TNormKind tnorm, std::uint64_t cap) {
  const std::size_t n = set.domain.size();
  if (n == 0 || set.slices.size() != n)
    throw std::invalid_argument("domain and slices must match and be nonempty");
  if (tnorm == TNormKind::product && n > 20)
    throw std::invalid_argument(
        "product t-norm rejected: combined secondary grade degenerates for "
        "large supports");
  std::map<double, double> pts;
  enumerate_embedded(set, tnorm, [&](const EmbeddedSelection& sel) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += set.domain[i] * sel.primary[i];
      den += sel.primary[i];
    }
    if (den <= 0.0) return;  // all-zero weights, 0/0
    double y = num / den;
    auto [it, inserted] = pts.try_emplace(y, sel.combined);
    if (!inserted) it->second = std::max(it->second, sel.combined);
  }, cap);
  return set_from_points(pts);
}

double height_point(const FuzzyNumberT1& f) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SingletonMF>) {
          return m.point;
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          return (m.lo + m.hi) / 2.0;
        } else if constexpr (std::is_same_v<T, GaussianMF>) {
          return m.mean;
        } else if constexpr (std::is_same_v<T, TriangularMF>) {
          return m.peak;
        } else {
          double best = *std::max_element(m.grades.begin(), m.grades.end());
          double sum = 0.0;
          std::size_t count = 0;
          for (std::size_t i = 0; i < m.grades.size(); ++i)
            if (m.grades[i] >= best - 1e-12) {
              sum += m.domain[i];
              ++count;
            }
          return sum / static_cast<double>(count);
        }
      },
      f.mf);
}

FuzzyNumberT1 height_tr(const std::vector<HeightOutput>& outputs,
                        TNormKind tnorm, std::size_t points_per_set,
                        std::uint64_t cap) {
  if (outputs.empty()) throw std::invalid_argument("need at least one output");
  std::vector<std::vector<WeightedPoint>> lists;
  lists.reserve(outputs.size());
  for (const auto& o : outputs)
    lists.push_back(discretize(o.secondary, points_per_set));
  std::map<double, double> pts;
  for_each_combo(lists, cap, [&](const std::vector<std::size_t>& idx) {
    double num = 0.0, den = 0.0, grade = 1.0;
    for (std::size_t l = 0; l < lists.size(); ++l) {
      const WeightedPoint& p = lists[l][idx[l]];
      num += outputs[l].ybar * p.x;
      den += p.x;
      grade = tnorm_apply(tnorm, grade, p.grade);
    }
    if (den <= 0.0) return;
    double y = num / den;
    auto [it, inserted] = pts.try_emplace(y, grade);
    if (!inserted) it->second = std::max(it->second, grade);
  });
  return set_from_points(pts);
}

FuzzyNumberT1 cos_tr_bruteforce(const GeneralizedCentroidInput& input,
                                std::size_t points_per_set,
                                std::uint64_t cap) {
  const std::size_t n = input.values.size();
  if (n == 0 || input.weights.size() != n)
    throw std::invalid_argument("values and weights must match and be nonempty");
  for (const auto& w : input.weights)
    if (support_of(w.mf).lo < -1e-12)
      throw std::invalid_argument("weight supports must be nonnegative");
  std::vector<std::vector<WeightedPoint>> lists;
  lists.reserve(2 * n);
  for (const auto& z : input.values)
    lists.push_back(discretize(z, points_per_set));
  for (const auto& w : input.weights)
    lists.push_back(discretize(w, points_per_set));
  std::map<double, double> pts;
  for_each_combo(lists, cap, [&](const std::vector<std::size_t>& idx) {
    double num = 0.0, den = 0.0, grade = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
      const WeightedPoint& z = lists[l][idx[l]];
      const WeightedPoint& w = lists[n + l][idx[n + l]];
      num += z.x * w.x;
      den += w.x;
      grade = tnorm_apply(input.tnorm, grade, z.grade);
      grade = tnorm_apply(input.tnorm, grade, w.grade);
    }
    if (den <= 0.0) return;
    double y = num / den;
    auto [it, inserted] = pts.try_emplace(y, grade);
    if (!inserted) it->second = std::max(it->second, grade);
  });
  return set_from_points(pts);
}

ApproxGCResult approx_generalized_centroid(const GeneralizedCentroidInput& input) {
  const std::size_t n = input.values.size();
  if (n == 0 || input.weights.size() != n)
    throw std::invalid_argument("values and weights must match and be nonempty");
  std::vector<CenterSpread> zs(n), ws(n);
  double sum_h = 0.0, sum_d = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    zs[l] = summarize(input.values[l]);
    ws[l] = summarize(input.weights[l]);
    if (ws[l].center < 0.0)
      throw std::invalid_argument("weight centers must be nonnegative");
    sum_h += ws[l].center;
    sum_d += ws[l].spread;
  }
  if (sum_h <= 0.0) throw std::domain_error("no rule fired");

  double xi = 0.0;
  for (std::size_t l = 0; l < n; ++l) xi += ws[l].center * zs[l].center;
  xi /= sum_h;

  TRQuality q;
  q.ratio = sum_d / sum_h;
  q.warning = q.ratio > 0.1;

  // Coefficients of the linearized centroid on the centered operands.
  std::vector<double> az(n), aw(n);
  for (std::size_t l = 0; l < n; ++l) {
    az[l] = ws[l].center / sum_h;
    aw[l] = (zs[l].center - xi) / sum_h;
  }

  bool all_gaussian = true, all_interval = true;
  for (std::size_t l = 0; l < n; ++l)
    for (const CenterSpread& cs : {zs[l], ws[l]}) {
      if (cs.kind != ShapeKind::gaussian && cs.kind != ShapeKind::crisp)
        all_gaussian = false;
      if (cs.kind != ShapeKind::interval && cs.kind != ShapeKind::crisp)
        all_interval = false;
    }

  if (all_gaussian) {
    std::vector<GaussianT1> sets;
    std::vector<double> alpha;
    for (std::size_t l = 0; l < n; ++l) {
      sets.push_back({0.0, zs[l].spread});
      alpha.push_back(az[l]);
      sets.push_back({0.0, ws[l].spread});
      alpha.push_back(aw[l]);
    }
    GaussianT1 g = affine_combine_gaussian(sets, alpha, xi, input.tnorm);
    return {FuzzyNumberT1::from_gaussian(g), q};
  }
  if (all_interval) {
    std::vector<IntervalT1> sets;
    std::vector<double> alpha;
    for (std::size_t l = 0; l < n; ++l) {
      sets.push_back({0.0, zs[l].spread});
      alpha.push_back(az[l]);
      sets.push_back({0.0, ws[l].spread});
      alpha.push_back(aw[l]);
    }
    IntervalT1 it = affine_combine_interval(sets, alpha, xi);
    return {FuzzyNumberT1::from_interval(it), q};
  }

  // General operands: extension-principle fold of the scaled centered sets.
  FuzzyNumberT1 acc{SingletonMF{xi}};
  auto plus = [](double a, double b) { return a + b; };
  GridSpec grid{401, 2001};
  for (std::size_t l = 0; l < n; ++l) {
    if (az[l] != 0.0 && zs[l].spread > 0.0)
      acc = extend_binary(acc,
                          scale_shift(input.values[l], az[l],
                                      -az[l] * zs[l].center),
                          plus, input.tnorm, grid);
    if (aw[l] != 0.0 && ws[l].spread > 0.0)
      acc = extend_binary(acc,
                          scale_shift(input.weights[l], aw[l],
                                      -aw[l] * ws[l].center),
                          plus, input.tnorm, grid);
  }
  return {std::move(acc), q};
}

ApproxGCIntervalResult approx_gc_interval(const std::vector<double>& c,
                                          const std::vector<double>& s,
                                          const std::vector<double>& h,
                                          const std::vector<double>& d) {
  const std::size_t n = c.size();
  if (n == 0 || s.size() != n || h.size() != n || d.size() != n)
    throw std::invalid_argument("size mismatch");
  check_weight_centers(h, d);
  double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
  if (sum_h <= 0.0) throw std::domain_error("no rule fired");
  double xi = 0.0;
  for (std::size_t l = 0; l < n; ++l) xi += h[l] * c[l];
  xi /= sum_h;
  double kappa = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    kappa += h[l] * s[l] + std::abs(c[l] - xi) * d[l];
  kappa /= sum_h;
  TRQuality q;
  q.ratio = std::accumulate(d.begin(), d.end(), 0.0) / sum_h;
  q.warning = q.ratio > 0.1;
  return {IntervalT1{xi, kappa}, q};
}

ApproxGCGaussianResult approx_gc_gaussian(const std::vector<double>& m,
                                          const std::vector<double>& sigma,
                                          const std::vector<double>& h,
                                          const std::vector<double>& d,
                                          TNormKind tnorm, double k) {
  const std::size_t n = m.size();
  if (n == 0 || sigma.size() != n || h.size() != n || d.size() != n)
    throw std::invalid_argument("size mismatch");
  for (std::size_t l = 0; l < n; ++l)
    if (h[l] < 0.0 || d[l] < 0.0)
      throw std::invalid_argument("weight parameters must be nonnegative");
  double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
  if (sum_h <= 0.0) throw std::domain_error("no rule fired");
  double mean = 0.0;
  for (std::size_t l = 0; l < n; ++l) mean += h[l] * m[l];
  mean /= sum_h;
  double spread;
  if (tnorm == TNormKind::product) {
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      double a = h[l] * sigma[l];
      double b = (m[l] - mean) * d[l];
      acc += a * a + b * b;
    }
    spread = std::sqrt(acc) / sum_h;
  } else {
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      acc += h[l] * sigma[l] + std::abs(m[l] - mean) * d[l];
    spread = k * acc / sum_h;
  }
  TRQuality q;
  q.ratio = std::accumulate(d.begin(), d.end(), 0.0) / sum_h;
  q.warning = q.ratio > 0.1;
  return {GaussianT1{mean, spread}, q};
}

namespace {

struct KMScratch {
  std::vector<std::size_t> order;
  std::vector<double> z, zs, lo, hi;
};

double km_check_and_sum(const std::vector<double>& c,
                        const std::vector<double>& s,
                        const std::vector<double>& h,
                        const std::vector<double>& d) {
  const std::size_t n = c.size();
  if (n == 0 || s.size() != n || h.size() != n || d.size() != n)
    throw std::invalid_argument("size mismatch");
  check_weight_centers(h, d);
  for (double v : s)
    if (v < 0.0) throw std::invalid_argument("value spreads must be nonnegative");
  double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
  double sum_d = std::accumulate(d.begin(), d.end(), 0.0);
  if (sum_h + sum_d <= 0.0) throw std::domain_error("all weights are zero");
  return sum_h;
}

double km_run(const std::vector<double>& c, const std::vector<double>& s,
              const std::vector<double>& h, const std::vector<double>& d,
              double sum_h, bool maximize, int& iters,
              std::vector<double>& trace, KMScratch& scr) {
  const std::size_t n = c.size();
  scr.order.resize(n);
  std::iota(scr.order.begin(), scr.order.end(), 0);
  scr.z.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    scr.z[i] = maximize ? c[i] + s[i] : c[i] - s[i];
  std::sort(scr.order.begin(), scr.order.end(),
            [&](std::size_t a, std::size_t b) { return scr.z[a] < scr.z[b]; });
  scr.zs.resize(n);
  scr.lo.resize(n);
  scr.hi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = scr.order[i];
    scr.zs[i] = scr.z[j];
    // The maximizing pass wants small weights on small z; the minimizing
    // pass mirrors them.
    scr.lo[i] = maximize ? h[j] - d[j] : h[j] + d[j];
    scr.hi[i] = maximize ? h[j] + d[j] : h[j] - d[j];
  }
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) num += h[i] * scr.z[i];
  return km_pass(scr.zs, scr.lo, scr.hi, num / sum_h, iters, trace);
}

}  // namespace

KMResult km_exact_interval(const std::vector<double>& c,
                           const std::vector<double>& s,
                           const std::vector<double>& h,
                           const std::vector<double>& d) {
  const double sum_h = km_check_and_sum(c, s, h, d);
  KMScratch scr;
  KMResult r;
  r.y_r = km_run(c, s, h, d, sum_h, true, r.iters_r, r.trace_r, scr);
  r.y_l = km_run(c, s, h, d, sum_h, false, r.iters_l, r.trace_l, scr);
  return r;
}

IntervalT1 km_reduce_interval(const std::vector<double>& c,
                              const std::vector<double>& s,
                              const std::vector<double>& h,
                              const std::vector<double>& d) {
  const double sum_h = km_check_and_sum(c, s, h, d);
  thread_local KMScratch scr;
  thread_local std::vector<double> trace;
  int iters = 0;
  trace.clear();
  const double y_r = km_run(c, s, h, d, sum_h, true, iters, trace, scr);
  trace.clear();
  const double y_l = km_run(c, s, h, d, sum_h, false, iters, trace, scr);
  return IntervalT1{(y_l + y_r) / 2.0, (y_r - y_l) / 2.0};
}

}  // namespace t2ctc
