#pragma once

#include <cstdint>
#include <vector>

#include "t2ctc/fuzzy_t1.hpp"
#include "t2ctc/fuzzy_t2.hpp"

namespace t2ctc {

// Inputs of a generalized centroid sum(z_l w_l) / sum(w_l) with fuzzy values
// and fuzzy weights. Weight supports must be nonnegative.
struct GeneralizedCentroidInput {
  std::vector<FuzzyNumberT1> values;
  std::vector<FuzzyNumberT1> weights;
  TNormKind tnorm = TNormKind::minimum;
};

// Reliability of the linearized approximations: ratio = sum(spread of the
// weights) / sum(weight centers). The closed forms assume ratio << 1; the
// warning flags ratio > 0.1. Results are still returned when flagged.
struct TRQuality {
  double ratio = 0.0;
  bool warning = false;
};

struct ApproxGCResult {
  FuzzyNumberT1 value;
  TRQuality quality;
};
struct ApproxGCIntervalResult {
  IntervalT1 value;
  TRQuality quality;
};
struct ApproxGCGaussianResult {
  GaussianT1 value;
  TRQuality quality;
};

// Exact iterative reduction of sum(z w)/sum(w) over interval values
// [c_l +- s_l] and interval weights [h_l +- d_l].
struct KMResult {
  double y_l = 0.0;
  double y_r = 0.0;
  int iters_l = 0;  // passes used by the minimizing run
  int iters_r = 0;  // passes used by the maximizing run
  std::vector<double> trace_l;  // objective after each minimizing pass
  std::vector<double> trace_r;  // objective after each maximizing pass

  IntervalT1 interval() const {
    return IntervalT1{(y_l + y_r) / 2.0, (y_r - y_l) / 2.0};
  }
};

// Enumerates every embedded set, emits its centroid weighted by the combined
// secondary grade, and merges duplicates by sup. Selections whose primary
// grades are all zero are skipped. The product t-norm is rejected for more
// than 20 domain points because the combined grade degenerates to zero.
FuzzyNumberT1 centroid_tr_bruteforce(const GeneralT2Discrete& set,
                                     TNormKind tnorm = TNormKind::minimum,
                                     std::uint64_t cap = 1000000);

// One rule output for height reduction: the output peak location and the
// secondary set sitting at that peak.
struct HeightOutput {
  double ybar = 0.0;
  FuzzyNumberT1 secondary;
};

// Peak location used for height reduction; plateaus and ties average the
// maximizers.
double height_point(const FuzzyNumberT1& f);

// Weighted-average enumeration over discretized secondary sets.
FuzzyNumberT1 height_tr(const std::vector<HeightOutput>& outputs,
                        TNormKind tnorm = TNormKind::minimum,
                        std::size_t points_per_set = 11,
                        std::uint64_t cap = 1000000);

// Full enumeration of the generalized centroid over discretized values and
// weights. Parametric operands are sampled with points_per_set points;
// sampled operands use their own grids.
FuzzyNumberT1 cos_tr_bruteforce(const GeneralizedCentroidInput& input,
                                std::size_t points_per_set = 11,
                                std::uint64_t cap = 1000000);

// First-order expansion of the generalized centroid about the weight centers,
// assembled as a fuzzy affine combination of the centered inputs. Exact when
// every weight is crisp.
ApproxGCResult approx_generalized_centroid(const GeneralizedCentroidInput& input);

// Closed-form specializations: interval values/weights and Gaussian
// values/weights. k scales the minimum-t-norm spread estimate.
ApproxGCIntervalResult approx_gc_interval(const std::vector<double>& c,
                                          const std::vector<double>& s,
                                          const std::vector<double>& h,
                                          const std::vector<double>& d);
ApproxGCGaussianResult approx_gc_gaussian(const std::vector<double>& m,
                                          const std::vector<double>& sigma,
                                          const std::vector<double>& h,
                                          const std::vector<double>& d,
                                          TNormKind tnorm,
                                          double k = 2.0);

// Iterative switch-point ascent/descent; ties z == y join the left block.
// Each pass re-evaluates the switch index from the current objective and
// stops when it repeats; at most N passes are needed.
KMResult km_exact_interval(const std::vector<double>& c,
                           const std::vector<double>& s,
                           const std::vector<double>& h,
                           const std::vector<double>& d);

// Same reduction without iteration traces, running on reused thread-local
// scratch so per-call allocation drops out of tight control loops.
IntervalT1 km_reduce_interval(const std::vector<double>& c,
                              const std::vector<double>& s,
                              const std::vector<double>& h,
                              const std::vector<double>& d);

}  // namespace t2ctc
