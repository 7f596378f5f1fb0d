#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "decigibbs/lattice.hpp"
#include "decigibbs/rng.hpp"
#include "decigibbs/spec_engine.hpp"

namespace decigibbs {

// Sites pinned to fixed values; the boundary ring uses the same mechanism
// internally.
struct FrozenMask {
  std::unordered_map<Site, Spin, SiteHash> frozen_values;

  bool empty() const { return frozen_values.empty(); }
  void freeze(const Site& s, Spin v) { frozen_values[s] = v; }
};

enum class ChainInit { MatchBoundary, AllPlus, AllMinus, Random };

struct ChainConfig {
  IsingParams params;
  int box_half_width = 4;
  BoundaryKind bc = BoundaryKind::Plus;
  std::unordered_map<Site, Spin, SiteHash> ring_values;  // Fixed only
  FrozenMask mask;
  std::uint64_t seed = 1;
  long sweeps = 10000;
  long burn_in = 1000;
  long thin = 1;
  ChainInit init = ChainInit::MatchBoundary;
};

// Mutable spin state over a box plus its ghost ring. Ring spins hold the
// boundary value, or 0 under free boundary so they drop out of neighbor
// sums. Frozen sites (ring included) are never updated.
class SpinGrid {
 public:
  SpinGrid(int half_width, BoundaryKind bc,
           const std::unordered_map<Site, Spin, SiteHash>& ring_values,
           const FrozenMask& mask, ChainInit init, CounterRng* rng);

  int half_width() const { return n_; }
  Spin at(const Site& s) const { return s_[idx(s.x, s.y)]; }
  Spin at(int x, int y) const { return s_[idx(x, y)]; }
  bool frozen(const Site& s) const { return frozen_[idx(s.x, s.y)] != 0; }
  void set(const Site& s, Spin v) { s_[idx(s.x, s.y)] = v; }

  double magnetization() const;
  SpinField to_field(BoundaryKind bc,
                     const std::unordered_map<Site, Spin, SiteHash>& ring) const;

  // One lexicographic heat-bath sweep over unfrozen sites.
  void heat_bath_sweep(const IsingParams& params, CounterRng& rng);
  // One Wolff cluster update; requires h=0. A cluster that activates a bond
  // into a frozen site leaves the state unchanged.
  void wolff_update(const IsingParams& params, CounterRng& rng);

 private:
  int idx(int x, int y) const { return (x + n_ + 1) * stride_ + (y + n_ + 1); }
  int n_;
  int stride_;
  std::vector<Spin> s_;
  std::vector<std::uint8_t> frozen_;
  std::vector<Site> sweep_sites_;
  std::vector<int> cluster_buf_;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// Batch-means standard error with 32 batches; throws when the sample count
// cannot fill them.
Estimate batch_means(const std::vector<double>& samples, std::uint64_t seed);

struct Observable {
  std::string name;
  std::function<double(const SpinGrid&)> eval;
};

Observable obs_spin_at(const Site& s);
Observable obs_magnetization();

// Metropolis chain; deterministic given the config (seed included).
std::map<std::string, Estimate> run_chain(const ChainConfig& cfg,
                                          const std::vector<Observable>& obs);

// Drives a chain and hands every retained state to the callback.
void run_chain_callback(const ChainConfig& cfg,
                        const std::function<void(const SpinGrid&, long)>& fn);

// Wolff cluster chain; empty mask and h=0 only.
std::map<std::string, Estimate> run_wolff(const ChainConfig& cfg,
                                          const std::vector<Observable>& obs);

struct CoupledResult {
  Estimate connect_freq;      // open path from G to F
  Estimate far_cluster_freq;  // diam(C_F) > threshold
  int diam_threshold = 0;
};

// Two independent chains with the same mask; a site is open when it is
// unfrozen and the pair of spins differs from (+1,+1).
CoupledResult run_coupled(const ChainConfig& cfg, const std::vector<Site>& F,
                          const std::vector<Site>& G, int diam_threshold);

}  // namespace decigibbs
