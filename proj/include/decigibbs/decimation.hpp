#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "decigibbs/lattice.hpp"
#include "decigibbs/sampler.hpp"
#include "decigibbs/spec_engine.hpp"

namespace decigibbs {

// Assignment on the even sublattice (2Z^2) of a window.
struct EvenConstraint {
  Box window;
  std::unordered_map<Site, Spin, SiteHash> values;  // on even sites

  Spin at(const Site& even_site) const {
    auto it = values.find(even_site);
    if (it == values.end())
      throw std::invalid_argument("even constraint missing a site");
    return it->second;
  }
  static EvenConstraint constant(int window_half_width, Spin v);
  // xi(omega'): even site 2i carries the image value at i; image sites
  // outside the pattern's box read +1.
  static EvenConstraint from_image(
      int window_half_width, const std::function<Spin(const Site&)>& image);
};

// Image configuration patterns for constraints and probes.
std::function<Spin(const Site&)> image_all_plus();
std::function<Spin(const Site&)> image_alternating();  // (-1)^(i1+i2)
std::function<Spin(const Site&)> image_from_field(const SpinField& f);

// D(xi): even sites carrying -1, in lexicographic order.
std::vector<Site> sparseness(const EvenConstraint& xi);

// omega'_i = omega_{2i}; the source box half-width must be even.
SpinField decimate(const SpinField& omega);

// Exact kernel over delta's free part (delta minus the frozen complement of
// S), with frozen sites and the exterior read from omega.
KernelTable constrained_kernel(const std::vector<Site>& delta, const SiteSet& S,
                               const SpinField& omega, const IsingParams& params);

struct McBudget {
  std::uint64_t seed = 1;
  long sweeps = 20000;
  long burn_in = 2000;
  long thin = 2;
};

// Monte Carlo proxy for the constrained measure: even sites frozen to xi,
// +/- boundary ring on the window.
std::map<std::string, Estimate> constrained_measure_estimate(
    const EvenConstraint& xi, int window_half_width, const IsingParams& params,
    BoundaryKind bc, const std::vector<Observable>& obs, const McBudget& mc);

struct CellEstimate {
  double p = 0.0;
  double half_width = 0.0;  // Wilson interval, z=1
  long n = 0;
};

struct DecimatedKernelEstimate {
  std::vector<Site> image_sites;         // lexicographic
  std::vector<CellEstimate> cells;       // histogram over image configs
  std::vector<Estimate> marginal_plus;   // per image site, batch means
  int window_half_width = 0;
  BoundaryKind bc = BoundaryKind::Plus;
  McBudget mc;
};

constexpr int kImageVolumeCap = 4;

// Estimates the decimated kernel on a small image volume: even sites outside
// the doubled volume frozen to xi(omega'), free system sampled under the
// given far boundary, spins at the doubled volume histogrammed.
DecimatedKernelEstimate decimated_kernel_estimate(
    const std::vector<Site>& image_volume,
    const std::function<Spin(const Site&)>& image_pattern,
    const IsingParams& params, BoundaryKind bc, int window_half_width,
    const McBudget& mc);

// Exact finite-window analogue by full enumeration of the free sites
// (non-even sites of the window plus the doubled volume). Returns the
// probability table over image configs.
std::vector<double> decimated_kernel_exact(
    const std::vector<Site>& image_volume,
    const std::function<Spin(const Site&)>& image_pattern,
    const IsingParams& params, BoundaryKind bc, int window_half_width);

// Monotone-window check for the constrained-measure construction: for an
// increasing observable f on vol1, the vol2 (larger window) expectation with
// + filling does not exceed the vol1 expectation. Exact enumeration.
bool global_kernel_monotonicity(const SiteSet& S, const SpinField& omega,
                                const IsingParams& params, const Volume& vol1,
                                const std::vector<double>& f, const Volume& vol2);

}  // namespace decigibbs
