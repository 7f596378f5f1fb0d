#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decigibbs/amoeba.hpp"
#include "decigibbs/decimation.hpp"
#include "decigibbs/potential.hpp"
#include "decigibbs/sampler.hpp"

namespace decigibbs {

struct ProbeRow {
  int window = 0;  // original-lattice half-width is window/2
  double p_plus = 0.0;
  double se_plus = 0.0;
  double p_minus = 0.0;
  double se_minus = 0.0;

  double gap() const { return p_plus - p_minus; }
  double gap_se() const { return std::sqrt(se_plus * se_plus + se_minus * se_minus); }
};

struct ProbeResult {
  double beta = 0.0;
  std::string pattern;
  std::vector<ProbeRow> rows;
};

// P(image spin at the origin = +1) under + and - far boundaries across
// nested windows; the gap trajectory is the quasilocality probe.
ProbeResult probe_discontinuity(double beta,
                                const std::function<Spin(const Site&)>& pattern,
                                const std::string& pattern_name,
                                const std::vector<int>& windows,
                                const McBudget& mc);

struct TailPoint {
  int l = 0;
  double freq = 0.0;  // fraction of samples with diam > l
  long exceed = 0;
};

struct ContourTail {
  std::vector<TailPoint> points;
  double c = 0.0;  // fitted decay rate per (beta * L)
  bool fit_valid = false;
  long samples = 0;
};

// Tail of the diameter of the exterior contour surrounding the origin over
// a shared sample set. The exponential fit is count-weighted log-linear on
// l > l0 and refuses beta = 0. Needs at least 100 samples.
ContourTail contour_tail(const std::vector<SpinField>& samples, int l_max,
                         int l0, double beta);

struct EntropyEstimate {
  int block = 1;
  double value = 0.0;
  long n_blocks = 0;
};

constexpr int kBlockCap = 4;

// Plug-in block entropy per site over k x k patterns pooled from all
// positions of every sample.
EntropyEstimate ks_entropy(const std::vector<SpinField>& samples, int block);

// Plug-in relative entropy density with shared add-one smoothing.
EntropyEstimate relative_entropy_density(const std::vector<SpinField>& mu,
                                         const std::vector<SpinField>& nu,
                                         int block);

struct QcdFieldReport {
  int field_index = 0;
  long minus_sites = 0;          // in the decimated field
  std::optional<Site> anchor;    // chosen minus site
  int quenched_length = 0;
  bool quenched_infinite = false;
  std::vector<QcdPoint> terms;
  std::optional<QCDFit> fit;
  std::string refusal;  // non-empty when no fit was possible
};

struct QcdReport {
  double beta = 0.0;
  int mmax = 0;
  double lambda = 0.25;
  int image_half_width = 0;
  std::vector<QcdFieldReport> fields;
};

struct QcdBudget {
  McBudget field_mc;   // mu+ proxy chains
  McBudget term_mc;    // constrained chains per summand
  long field_gap = 2000;  // sweeps between retained fields
};

// Samples decimated fields from the + phase proxy, anchors at the minus
// site nearest the origin, evaluates the telescoped potential for
// m = 1..mmax and fits the decay beyond the quenched length.
QcdReport qcd_pipeline(double beta, int n_fields, int mmax, double lambda,
                       const QcdBudget& budget);

}  // namespace decigibbs
