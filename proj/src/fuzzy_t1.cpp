#include "t2ctc/fuzzy_t1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace t2ctc {

double tnorm_apply(TNormKind t, double a, double b) {
  return t == TNormKind::minimum ? std::min(a, b) : a * b;
}

namespace {

double eval_sampled(const SampledMF& s, double x) {
  if (s.domain.empty()) return 0.0;
  if (x < s.domain.front() || x > s.domain.back()) return 0.0;
  auto it = std::lower_bound(s.domain.begin(), s.domain.end(), x);
  std::size_t i = static_cast<std::size_t>(it - s.domain.begin());
  if (i == 0) return s.grades.front();
  if (i >= s.domain.size()) return s.grades.back();
  double x0 = s.domain[i - 1], x1 = s.domain[i];
  double g0 = s.grades[i - 1], g1 = s.grades[i];
  if (x1 == x0) return std::max(g0, g1);
  double t = (x - x0) / (x1 - x0);
  return g0 + t * (g1 - g0);
}

}  // namespace

double eval_mf(const MembershipFunctionT1& mf, double x) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianMF>) {
          if (m.sigma <= 0.0) return x == m.mean ? 1.0 : 0.0;
          double z = (x - m.mean) / m.sigma;
          return std::exp(-0.5 * z * z);
        } else if constexpr (std::is_same_v<T, TriangularMF>) {
          if (x < m.left || x > m.right) return 0.0;
          if (x == m.peak) return 1.0;
          if (x < m.peak)
            return m.peak == m.left ? 1.0 : (x - m.left) / (m.peak - m.left);
          return m.right == m.peak ? 1.0 : (m.right - x) / (m.right - m.peak);
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          return (x >= m.lo && x <= m.hi) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, SingletonMF>) {
          return x == m.point ? 1.0 : 0.0;
        } else {
          return eval_sampled(m, x);
        }
      },
      mf);
}

Support support_of(const MembershipFunctionT1& mf) {
  return std::visit(
      [&](const auto& m) -> Support {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianMF>) {
          return {m.mean - 6.0 * m.sigma, m.mean + 6.0 * m.sigma};
        } else if constexpr (std::is_same_v<T, TriangularMF>) {
          return {m.left, m.right};
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          return {m.lo, m.hi};
        } else if constexpr (std::is_same_v<T, SingletonMF>) {
          return {m.point, m.point};
        } else {
          std::size_t first = m.grades.size(), last = 0;
          for (std::size_t i = 0; i < m.grades.size(); ++i) {
            if (m.grades[i] > 0.0) {
              if (first == m.grades.size()) first = i;
              last = i;
            }
          }
          if (first == m.grades.size())
            throw std::domain_error("degenerate operand");
          return {m.domain[first], m.domain[last]};
        }
      },
      mf);
}

double peak_grade(const MembershipFunctionT1& mf) {
  if (const auto* s = std::get_if<SampledMF>(&mf)) {
    double g = 0.0;
    for (double v : s->grades) g = std::max(g, v);
    return g;
  }
  return 1.0;
}

namespace {

template <bool Leftmost>
double sampled_peak(const SampledMF& s) {
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < s.grades.size(); ++i) {
    bool better = Leftmost ? s.grades[i] > best : s.grades[i] >= best;
    if (better) {
      best = s.grades[i];
      arg = i;
    }
  }
  return s.domain[arg];
}

}  // namespace

double peak_left(const MembershipFunctionT1& mf) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianMF>)
          return m.mean;
        else if constexpr (std::is_same_v<T, TriangularMF>)
          return m.peak;
        else if constexpr (std::is_same_v<T, IntervalMF>)
          return m.lo;
        else if constexpr (std::is_same_v<T, SingletonMF>)
          return m.point;
        else
          return sampled_peak<true>(m);
      },
      mf);
}

double peak_right(const MembershipFunctionT1& mf) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianMF>)
          return m.mean;
        else if constexpr (std::is_same_v<T, TriangularMF>)
          return m.peak;
        else if constexpr (std::is_same_v<T, IntervalMF>)
          return m.hi;
        else if constexpr (std::is_same_v<T, SingletonMF>)
          return m.point;
        else
          return sampled_peak<false>(m);
      },
      mf);
}

FuzzyNumberT1 FuzzyNumberT1::parametric(MembershipFunctionT1 m) {
  return FuzzyNumberT1{std::move(m)};
}

FuzzyNumberT1 FuzzyNumberT1::from_grid(std::vector<double> domain,
                                       std::vector<double> grades) {
  if (domain.size() != grades.size() || domain.empty())
    throw std::invalid_argument("grid arrays must be nonempty and same size");
  for (std::size_t i = 1; i < domain.size(); ++i)
    if (domain[i] <= domain[i - 1])
      throw std::invalid_argument("grid domain must be strictly ascending");
  for (double g : grades)
    if (g < 0.0 || g > 1.0)
      throw std::invalid_argument("grades must lie in [0,1]");
  return FuzzyNumberT1{SampledMF{std::move(domain), std::move(grades)}};
}

FuzzyNumberT1 FuzzyNumberT1::from_interval(const IntervalT1& it) {
  if (it.s == 0.0) return FuzzyNumberT1{SingletonMF{it.c}};
  return FuzzyNumberT1{IntervalMF{it.c - it.s, it.c + it.s}};
}

FuzzyNumberT1 FuzzyNumberT1::from_gaussian(const GaussianT1& g) {
  if (g.sigma == 0.0) return FuzzyNumberT1{SingletonMF{g.m}};
  return FuzzyNumberT1{GaussianMF{g.m, g.sigma}};
}

bool FuzzyNumberT1::is_grid() const {
  return std::holds_alternative<SampledMF>(mf);
}

FuzzyNumberT1 extend_binary(const FuzzyNumberT1& F, const FuzzyNumberT1& G,
                            const std::function<double(double, double)>& op,
                            TNormKind tnorm, const GridSpec& grid) {
  if (grid.points < 1 || grid.operand_points < 1)
    throw std::invalid_argument("grid resolution must be positive");
  Support sf = F.support();
  Support sg = G.support();

  auto sample = [&](const FuzzyNumberT1& X, const Support& s,
                    std::vector<double>& xs, std::vector<double>& gs) {
    std::size_t n = s.hi == s.lo ? 1 : grid.operand_points;
    xs.resize(n);
    gs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double x = n == 1 ? s.lo
                        : s.lo + (s.hi - s.lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
      xs[i] = x;
      gs[i] = X.grade(x);
    }
  };

  std::vector<double> vx, vg, wx, wg;
  sample(F, sf, vx, vg);
  sample(G, sg, wx, wg);

  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (double v : vx)
    for (double w : wx) {
      double y = op(v, w);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }

  std::size_t n_out = ymax == ymin ? 1 : grid.points;
  std::vector<double> dom(n_out), out(n_out, 0.0);
  for (std::size_t i = 0; i < n_out; ++i)
    dom[i] = n_out == 1 ? ymin
                        : ymin + (ymax - ymin) * static_cast<double>(i) /
                                     static_cast<double>(n_out - 1);
  double step = n_out == 1 ? 1.0 : (ymax - ymin) / static_cast<double>(n_out - 1);

  for (std::size_t i = 0; i < vx.size(); ++i) {
    for (std::size_t j = 0; j < wx.size(); ++j) {
      double g = tnorm_apply(tnorm, vg[i], wg[j]);
      if (g <= 0.0) continue;
      double y = op(vx[i], wx[j]);
      auto k = static_cast<std::size_t>(
          std::clamp(std::llround((y - ymin) / step), 0LL,
                     static_cast<long long>(n_out - 1)));
      out[k] = std::max(out[k], g);
    }
  }
  if (n_out == 1) return FuzzyNumberT1::from_grid({ymin}, {out[0]});
  return FuzzyNumberT1::from_grid(std::move(dom), std::move(out));
}

IntervalT1 affine_combine_interval(const std::vector<IntervalT1>& sets,
                                   const std::vector<double>& alphas,
                                   double beta) {
  if (sets.empty() || sets.size() != alphas.size())
    throw std::invalid_argument("sets and alphas must match and be nonempty");
  IntervalT1 r{beta, 0.0};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    r.c += alphas[i] * sets[i].c;
    r.s += std::abs(alphas[i]) * sets[i].s;
  }
  return r;
}

GaussianT1 affine_combine_gaussian(const std::vector<GaussianT1>& sets,
                                   const std::vector<double>& alphas,
                                   double beta, TNormKind tnorm) {
  if (sets.empty() || sets.size() != alphas.size())
    throw std::invalid_argument("sets and alphas must match and be nonempty");
  GaussianT1 r{beta, 0.0};
  if (tnorm == TNormKind::product) {
    double var = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      r.m += alphas[i] * sets[i].m;
      var += alphas[i] * alphas[i] * sets[i].sigma * sets[i].sigma;
    }
    r.sigma = std::sqrt(var);
  } else {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      r.m += alphas[i] * sets[i].m;
      r.sigma += std::abs(alphas[i]) * sets[i].sigma;
    }
  }
  return r;
}

double centroid_defuzz(const FuzzyNumberT1& F) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianMF>) {
          return m.mean;
        } else if constexpr (std::is_same_v<T, IntervalMF>) {
          return 0.5 * (m.lo + m.hi);
        } else if constexpr (std::is_same_v<T, SingletonMF>) {
          return m.point;
        } else if constexpr (std::is_same_v<T, TriangularMF>) {
          constexpr std::size_t n = 201;
          double num = 0.0, den = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            double x = m.left + (m.right - m.left) * static_cast<double>(i) /
                                    static_cast<double>(n - 1);
            double g = eval_mf(MembershipFunctionT1{m}, x);
            num += x * g;
            den += g;
          }
          if (den <= 0.0) throw std::domain_error("empty fuzzy set");
          return num / den;
        } else {
          double num = 0.0, den = 0.0;
          for (std::size_t i = 0; i < m.domain.size(); ++i) {
            num += m.domain[i] * m.grades[i];
            den += m.grades[i];
          }
          if (den <= 0.0) throw std::domain_error("empty fuzzy set");
          return num / den;
        }
      },
      F.mf);
}

}  // namespace t2ctc
