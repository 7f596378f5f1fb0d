#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "decigibbs/lattice.hpp"

namespace decigibbs {

struct IsingParams {
  double beta = 1.0;  // inverse temperature, > 0
  double h = 0.0;     // magnetic field
};

// A finite set of sites in lexicographic order; configurations over it are
// bitmasks (bit k set <=> spin +1 at the k-th site).
using Config = std::uint32_t;

struct Volume {
  std::vector<Site> sites;

  explicit Volume(std::vector<Site> s);
  static Volume box(int half_width) { return Volume(Box{half_width}.sites()); }

  int size() const { return static_cast<int>(sites.size()); }
  int index(const Site& s) const;  // -1 if absent
  bool contains(const Site& s) const { return index(s) >= 0; }
  Spin spin_of(Config c, int k) const { return (c >> k) & 1 ? +1 : -1; }

 private:
  std::unordered_map<Site, int, SiteHash> index_;
};

// Boundary condition for a volume: a kind plus explicit values that take
// precedence (frozen sites, fixed rings).
struct BoundaryMap {
  BoundaryKind kind = BoundaryKind::Plus;
  std::unordered_map<Site, Spin, SiteHash> values;

  static BoundaryMap plus() { return {BoundaryKind::Plus, {}}; }
  static BoundaryMap minus() { return {BoundaryKind::Minus, {}}; }
  static BoundaryMap free() { return {BoundaryKind::Free, {}}; }
  static BoundaryMap fixed(std::unordered_map<Site, Spin, SiteHash> v) {
    return {BoundaryKind::Fixed, std::move(v)};
  }
  static BoundaryMap from_field(const SpinField& f);

  // Value at an exterior site; nullopt under Free when no explicit value.
  std::optional<Spin> at(const Site& s) const {
    auto it = values.find(s);
    if (it != values.end()) return it->second;
    switch (kind) {
      case BoundaryKind::Plus: return +1;
      case BoundaryKind::Minus: return -1;
      default: return std::nullopt;
    }
  }
};

// H(sigma | omega): -sigma_i sigma_j over n.n. pairs meeting the volume
// (crossing pairs read omega), -h sigma_i over the volume. Free boundary
// drops crossing pairs. Throws when a needed boundary value is missing.
double hamiltonian(const Volume& vol, Config config, const BoundaryMap& bc,
                   const IsingParams& params);

constexpr int kEnumerationCap = 25;

struct KernelTable {
  Volume vol;
  std::vector<double> probs;  // indexed by Config, sums to 1
  double log_z = 0.0;

  double prob(Config c) const { return probs[c]; }
  // Expectation of an observable table over configurations.
  double expectation(const std::vector<double>& f) const;
  // Marginal probability of +1 at local site index k.
  double marginal_plus(int k) const;
  double total_variation(const std::vector<double>& other) const;
};

// Exact Boltzmann table by full enumeration (log-weights, max-subtracted).
KernelTable kernel_exact(const Volume& vol, const BoundaryMap& bc,
                         const IsingParams& params);
// Serial reference implementation; same contract, no OpenMP.
KernelTable kernel_exact_serial(const Volume& vol, const BoundaryMap& bc,
                                const IsingParams& params);

// Max-abs deviation between the composed kernel (outer volume, then inner)
// and the outer kernel, both as distributions over the outer volume.
double kernel_compose_deviation(const Volume& outer, const Volume& inner,
                                const BoundaryMap& bc, const IsingParams& params);

// |ratio_lhs - ratio_rhs| for the conditioning-displacement identity:
// the outer-kernel ratio of sigma_tilde vs sigma (both completed by tau on
// outer\inner) against the inner-kernel ratio with tau frozen into the
// boundary. Masks are over the respective volumes.
double keybar_residual(const Volume& inner, const Volume& outer,
                       Config sigma_tilde_inner, Config sigma_inner,
                       Config tau_outer, const BoundaryMap& bc,
                       const IsingParams& params);

constexpr int kTransferWidthCap = 14;

// log Z of a W x H grid (sites (x,y), 0<=x<W, 0<=y<H) by row-to-row
// transfer; boundary ring handled as in kernel_exact for Plus/Minus,
// absent for Free.
double transfer_matrix_logZ(int width, int height, BoundaryKind bc,
                            const IsingParams& params);

// True iff f is increasing on the configuration lattice (checked over
// covering pairs) and gamma_Lambda f(omega) <= gamma_Lambda f(omega')
// + 1e-12 for the two boundaries. Throws if f is not increasing or if the
// boundaries are not comparable.
bool monotonicity_check(const Volume& vol, const IsingParams& params,
                        const std::vector<double>& f, const BoundaryMap& lo,
                        const BoundaryMap& hi);

}  // namespace decigibbs
