#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decigibbs/decimation.hpp"
#include "decigibbs/lattice.hpp"

namespace decigibbs {

// An exterior contour with mutually external internal contours.
struct Amoeba {
  Contour exterior;
  std::vector<Contour> internals;

  int size() const;      // total contour length
  int diameter() const { return exterior.diameter(); }
  // Int G: sites inside the exterior contour and outside every internal one.
  std::vector<Site> interior_sites() const;
};

// True iff exactly one contour surrounds all others, the rest are mutually
// external, and each of them surrounds at least one even site.
bool is_amoeba(const std::vector<Contour>& contours);

// Builds the amoeba (exterior = the surrounding contour) when is_amoeba holds.
std::optional<Amoeba> make_amoeba(const std::vector<Contour>& contours);

// The four compatibility conditions against an even-site constraint:
// realizability by painting required values around every contour, plus-site
// containment, internal contours covering +1 even sites, and internals
// avoiding the sparseness component attached to the exterior's inner
// boundary.
bool is_compatible(const Amoeba& g, const EvenConstraint& xi);

// |D(xi) ∩ Int G| <= lambda |G|; requires compatibility.
bool is_benign(const Amoeba& g, const EvenConstraint& xi, double lambda);

enum class QuenchedFamily { Boxes, SawPaths };

struct QuenchedLength {
  Site image_site;
  double lambda = 0.25;
  QuenchedFamily family = QuenchedFamily::Boxes;
  int value = 0;  // image-lattice units
  bool infinite_within_window = false;
};

// Smallest l such that every family member through the doubled site with
// image-lattice diameter above l carries minus-density at most lambda,
// scanned within the constraint's window. Members are subsets of the even
// sublattice (boxes: rectangles; paths: self-avoiding, budget-capped).
QuenchedLength quenched_length(const EvenConstraint& xi, const Site& image_site,
                               double lambda, QuenchedFamily family,
                               int saw_budget = 10);

enum class PldMode { Walks, SawUpTo };

// Maximal magnetization deficit max_pi (mstar - avg_pi sigma) over paths
// from the origin to the box border. Walks mode bounds the deficit from
// above by dynamic programming over unrestricted walks; SawUpTo enumerates
// self-avoiding paths exactly up to max_len steps.
double pld_statistic(const SpinField& sigma, double mstar, PldMode mode,
                     int max_len);

struct CensusBin {
  int diam_lo = 0;  // inclusive
  int diam_hi = 0;  // exclusive; 0 means unbounded
  long compatible = 0;
  long benign = 0;
};

struct CensusResult {
  std::vector<CensusBin> bins;
  long samples = 0;
  long amoebas = 0;
};

// Groups each sample's contours into amoebas (one per maximal contour, with
// its directly surrounded contours as internals), evaluates benignity among
// the compatible ones, and bins by diameter. The constraint defaults to the
// sample's own even sites.
CensusResult amoeba_census(const std::vector<SpinField>& samples,
                           const std::optional<EvenConstraint>& xi_override,
                           double lambda, const std::vector<int>& bin_edges);

}  // namespace decigibbs
