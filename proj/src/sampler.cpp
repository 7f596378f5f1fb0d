#include "decigibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace decigibbs {

SpinGrid::SpinGrid(int half_width, BoundaryKind bc,
                   const std::unordered_map<Site, Spin, SiteHash>& ring_values,
                   const FrozenMask& mask, ChainInit init, CounterRng* rng)
    : n_(half_width), stride_(2 * half_width + 3) {
  const int total = stride_ * stride_;
  Spin ring_default = 0;
  if (bc == BoundaryKind::Plus || bc == BoundaryKind::Fixed) ring_default = +1;
  if (bc == BoundaryKind::Minus) ring_default = -1;
  s_.assign(total, ring_default);
  frozen_.assign(total, 1);  // ring frozen; interior unfrozen below
  if (bc == BoundaryKind::Free)
    std::fill(s_.begin(), s_.end(), static_cast<Spin>(0));

  Spin fill = +1;
  if (init == ChainInit::AllMinus) fill = -1;
  if (init == ChainInit::MatchBoundary && bc == BoundaryKind::Minus) fill = -1;
  for (int x = -n_; x <= n_; ++x) {
    for (int y = -n_; y <= n_; ++y) {
      Spin v = fill;
      if (init == ChainInit::Random) v = (rng->next_u64() & 1) ? +1 : -1;
      s_[idx(x, y)] = v;
      frozen_[idx(x, y)] = 0;
    }
  }
  if (bc == BoundaryKind::Fixed)
    for (const auto& [site, v] : ring_values) {
      if (std::max(std::abs(site.x), std::abs(site.y)) != n_ + 1) continue;
      s_[idx(site.x, site.y)] = v;
    }
  for (const auto& [site, v] : mask.frozen_values) {
    s_[idx(site.x, site.y)] = v;
    frozen_[idx(site.x, site.y)] = 1;
  }
  for (int x = -n_; x <= n_; ++x)
    for (int y = -n_; y <= n_; ++y)
      if (!frozen_[idx(x, y)]) sweep_sites_.push_back({x, y});
}

double SpinGrid::magnetization() const {
  double m = 0.0;
  for (int x = -n_; x <= n_; ++x)
    for (int y = -n_; y <= n_; ++y) m += s_[idx(x, y)];
  const double count = static_cast<double>(2 * n_ + 1) * (2 * n_ + 1);
  return m / count;
}

SpinField SpinGrid::to_field(
    BoundaryKind bc,
    const std::unordered_map<Site, Spin, SiteHash>& ring) const {
  SpinField f;
  f.box = Box{n_};
  f.bc = bc;
  f.ring_values = ring;
  f.values.resize(f.box.size());
  for (int x = -n_; x <= n_; ++x)
    for (int y = -n_; y <= n_; ++y) f.set({x, y}, at(x, y));
  return f;
}

void SpinGrid::heat_bath_sweep(const IsingParams& params, CounterRng& rng) {
  // Exact single-site conditionals indexed by the neighbor sum; one uniform
  // draw per site keeps the stream deterministic. (The textbook Metropolis
  // acceptance min(1, e^{-beta dE}) degenerates under a deterministic scan
  // as beta -> 0: every move is accepted and the lattice just alternates.)
  double p_plus[9];
  for (int nb = -4; nb <= 4; ++nb)
    p_plus[nb + 4] = 1.0 / (1.0 + std::exp(-2.0 * params.beta * (nb + params.h)));
  for (const Site& site : sweep_sites_) {
    const int i = idx(site.x, site.y);
    const int nb = s_[i - stride_] + s_[i + stride_] + s_[i - 1] + s_[i + 1];
    s_[i] = rng.next_u01() < p_plus[nb + 4] ? +1 : -1;
  }
}

void SpinGrid::wolff_update(const IsingParams& params, CounterRng& rng) {
  if (params.h != 0.0)
    throw std::invalid_argument("cluster update invalid under constraints");
  if (sweep_sites_.empty()) return;
  const double p_add = 1.0 - std::exp(-2.0 * params.beta);
  const Site seed_site = sweep_sites_[rng.next_below(sweep_sites_.size())];
  const Spin phase = at(seed_site);

  cluster_buf_.clear();
  std::vector<int>& cluster = cluster_buf_;
  std::vector<std::uint8_t> in_cluster(s_.size(), 0);
  cluster.push_back(idx(seed_site.x, seed_site.y));
  in_cluster[cluster[0]] = 1;
  const int offs[4] = {-stride_, -1, +1, +stride_};
  for (std::size_t head = 0; head < cluster.size(); ++head) {
    const int i = cluster[head];
    for (int d = 0; d < 4; ++d) {
      const int j = i + offs[d];
      if (in_cluster[j] || s_[j] != phase) continue;
      if (rng.next_u01() >= p_add) continue;
      if (frozen_[j]) return;  // would absorb a pinned spin: reject the move
      in_cluster[j] = 1;
      cluster.push_back(j);
    }
  }
  for (int i : cluster) s_[i] = -s_[i];
}

Estimate batch_means(const std::vector<double>& samples, std::uint64_t seed) {
  constexpr int kBatches = 32;
  const long n = static_cast<long>(samples.size());
  if (n < kBatches)
    throw std::runtime_error("cannot fill 32 batches: too few samples");
  const long bs = n / kBatches;
  double bm[kBatches];
  for (int b = 0; b < kBatches; ++b) {
    double acc = 0.0;
    for (long k = 0; k < bs; ++k) acc += samples[b * bs + k];
    bm[b] = acc / static_cast<double>(bs);
  }
  double mean = 0.0;
  for (double v : bm) mean += v;
  mean /= kBatches;
  double var = 0.0;
  for (double v : bm) var += (v - mean) * (v - mean);
  var /= (kBatches - 1);
  return Estimate{mean, std::sqrt(var / kBatches), kBatches * bs, seed};
}

Observable obs_spin_at(const Site& s) {
  return {"sigma(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")",
          [s](const SpinGrid& g) { return static_cast<double>(g.at(s)); }};
}

Observable obs_magnetization() {
  return {"magnetization", [](const SpinGrid& g) { return g.magnetization(); }};
}

static void validate(const ChainConfig& cfg) {
  if (cfg.burn_in >= cfg.sweeps)
    throw std::invalid_argument("burn_in must be smaller than sweeps");
  if (cfg.thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (cfg.params.beta <= 0) throw std::invalid_argument("beta must be positive");
}

void run_chain_callback(const ChainConfig& cfg,
                        const std::function<void(const SpinGrid&, long)>& fn) {
  validate(cfg);
  CounterRng rng(cfg.seed);
  SpinGrid grid(cfg.box_half_width, cfg.bc, cfg.ring_values, cfg.mask, cfg.init,
                &rng);
  long epoch = 0;
  for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
    grid.heat_bath_sweep(cfg.params, rng);
    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0)
      fn(grid, epoch++);
  }
}

std::map<std::string, Estimate> run_chain(const ChainConfig& cfg,
                                          const std::vector<Observable>& obs) {
  std::vector<std::vector<double>> samples(obs.size());
  run_chain_callback(cfg, [&](const SpinGrid& g, long) {
    for (std::size_t k = 0; k < obs.size(); ++k)
      samples[k].push_back(obs[k].eval(g));
  });
  std::map<std::string, Estimate> out;
  for (std::size_t k = 0; k < obs.size(); ++k)
    out[obs[k].name] = batch_means(samples[k], cfg.seed);
  return out;
}

std::map<std::string, Estimate> run_wolff(const ChainConfig& cfg,
                                          const std::vector<Observable>& obs) {
  validate(cfg);
  if (!cfg.mask.empty() || cfg.params.h != 0.0)
    throw std::invalid_argument("cluster update invalid under constraints");
  CounterRng rng(cfg.seed);
  SpinGrid grid(cfg.box_half_width, cfg.bc, cfg.ring_values, cfg.mask, cfg.init,
                &rng);
  std::vector<std::vector<double>> samples(obs.size());
  for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
    grid.wolff_update(cfg.params, rng);
    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0)
      for (std::size_t k = 0; k < obs.size(); ++k)
        samples[k].push_back(obs[k].eval(grid));
  }
  std::map<std::string, Estimate> out;
  for (std::size_t k = 0; k < obs.size(); ++k)
    out[obs[k].name] = batch_means(samples[k], cfg.seed);
  return out;
}

namespace {

// Open-site percolation quantities for one coupled state.
struct CoupledScan {
  bool connected = false;
  int cluster_diam = 0;
};

CoupledScan scan_coupled(const SpinGrid& a, const SpinGrid& b,
                         const std::vector<Site>& F, const std::vector<Site>& G) {
  const int n = a.half_width();
  auto open = [&](const Site& s) {
    if (std::abs(s.x) > n || std::abs(s.y) > n) return false;
    if (a.frozen(s)) return false;
    return !(a.at(s) == 1 && b.at(s) == 1);
  };
  SiteSet f_set(F.begin(), F.end());

  // Path from G to F through open sites (endpoints included).
  CoupledScan out;
  {
    SiteSet seen;
    std::vector<Site> stack;
    for (const Site& g : G)
      if (open(g)) {
        stack.push_back(g);
        seen.insert(g);
      }
    while (!stack.empty() && !out.connected) {
      Site s = stack.back();
      stack.pop_back();
      if (f_set.count(s)) {
        out.connected = true;
        break;
      }
      for (const Site& t : neighbors(s)) {
        if (!open(t) || seen.count(t)) continue;
        seen.insert(t);
        stack.push_back(t);
      }
    }
  }

  // C_F: open sites outside F reachable from the neighbors of F.
  {
    SiteSet seen;
    std::vector<Site> stack;
    for (const Site& f : F)
      for (const Site& t : neighbors(f))
        if (!f_set.count(t) && open(t) && !seen.count(t)) {
          seen.insert(t);
          stack.push_back(t);
        }
    int xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    while (!stack.empty()) {
      Site s = stack.back();
      stack.pop_back();
      if (!any) {
        xmin = xmax = s.x;
        ymin = ymax = s.y;
        any = true;
      } else {
        xmin = std::min(xmin, s.x);
        xmax = std::max(xmax, s.x);
        ymin = std::min(ymin, s.y);
        ymax = std::max(ymax, s.y);
      }
      for (const Site& t : neighbors(s)) {
        if (f_set.count(t) || !open(t) || seen.count(t)) continue;
        seen.insert(t);
        stack.push_back(t);
      }
    }
    out.cluster_diam = any ? std::max(xmax - xmin, ymax - ymin) : 0;
  }
  return out;
}

}  // namespace

CoupledResult run_coupled(const ChainConfig& cfg, const std::vector<Site>& F,
                          const std::vector<Site>& G, int diam_threshold) {
  validate(cfg);
  for (const Site& f : F)
    for (const Site& g : G)
      if (f == g) throw std::invalid_argument("F and G must be disjoint");

  CounterRng rng_a(CounterRng::derive(cfg.seed, 1));
  CounterRng rng_b(CounterRng::derive(cfg.seed, 2));
  SpinGrid a(cfg.box_half_width, cfg.bc, cfg.ring_values, cfg.mask, cfg.init,
             &rng_a);
  SpinGrid b(cfg.box_half_width, cfg.bc, cfg.ring_values, cfg.mask, cfg.init,
             &rng_b);
  std::vector<double> conn, far;
  for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
    a.heat_bath_sweep(cfg.params, rng_a);
    b.heat_bath_sweep(cfg.params, rng_b);
    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
      const CoupledScan scan = scan_coupled(a, b, F, G);
      conn.push_back(scan.connected ? 1.0 : 0.0);
      far.push_back(scan.cluster_diam > diam_threshold ? 1.0 : 0.0);
    }
  }
  return CoupledResult{batch_means(conn, cfg.seed), batch_means(far, cfg.seed),
                       diam_threshold};
}

}  // namespace decigibbs
