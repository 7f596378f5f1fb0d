#include "decigibbs/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decigibbs {

EvenConstraint EvenConstraint::constant(int window_half_width, Spin v) {
  EvenConstraint xi;
  xi.window = Box{window_half_width};
  for (const Site& s : xi.window.sites())
    if (is_even_site(s)) xi.values[s] = v;
  return xi;
}

EvenConstraint EvenConstraint::from_image(
    int window_half_width, const std::function<Spin(const Site&)>& image) {
  EvenConstraint xi;
  xi.window = Box{window_half_width};
  for (const Site& s : xi.window.sites())
    if (is_even_site(s)) xi.values[s] = image({s.x / 2, s.y / 2});
  return xi;
}

std::function<Spin(const Site&)> image_all_plus() {
  return [](const Site&) -> Spin { return +1; };
}

std::function<Spin(const Site&)> image_alternating() {
  return [](const Site& s) -> Spin {
    return ((s.x + s.y) % 2 + 2) % 2 == 0 ? +1 : -1;
  };
}

std::function<Spin(const Site&)> image_from_field(const SpinField& f) {
  return [f](const Site& s) -> Spin { return f.box.contains(s) ? f.at(s) : +1; };
}

std::vector<Site> sparseness(const EvenConstraint& xi) {
  std::vector<Site> d;
  for (const auto& [s, v] : xi.values)
    if (v < 0) d.push_back(s);
  std::sort(d.begin(), d.end());
  return d;
}

SpinField decimate(const SpinField& omega) {
  if (omega.box.half_width % 2 != 0)
    throw std::invalid_argument("decimation needs an even source half-width");
  if (omega.bc == BoundaryKind::Fixed)
    throw std::invalid_argument("cannot decimate a fixed boundary ring");
  SpinField out;
  out.box = Box{omega.box.half_width / 2};
  out.bc = omega.bc;
  out.values.resize(out.box.size());
  for (const Site& i : out.box.sites()) out.set(i, omega.at({2 * i.x, 2 * i.y}));
  return out;
}

KernelTable constrained_kernel(const std::vector<Site>& delta, const SiteSet& S,
                               const SpinField& omega, const IsingParams& params) {
  std::vector<Site> free_sites;
  for (const Site& s : delta)
    if (S.count(s)) free_sites.push_back(s);
  if (free_sites.empty())
    throw std::invalid_argument("constrained kernel has no free sites");
  Volume vol(std::move(free_sites));
  BoundaryMap bc;
  bc.kind = BoundaryKind::Fixed;
  for (const Site& s : vol.sites)
    for (const Site& nb : neighbors(s))
      if (!vol.contains(nb)) bc.values[nb] = omega.completed_at(nb);
  return kernel_exact(vol, bc, params);
}

std::map<std::string, Estimate> constrained_measure_estimate(
    const EvenConstraint& xi, int window_half_width, const IsingParams& params,
    BoundaryKind bc, const std::vector<Observable>& obs, const McBudget& mc) {
  if (bc != BoundaryKind::Plus && bc != BoundaryKind::Minus)
    throw std::invalid_argument("constrained measure needs a +/- boundary");
  ChainConfig cfg;
  cfg.params = params;
  cfg.box_half_width = window_half_width;
  cfg.bc = bc;
  cfg.seed = mc.seed;
  cfg.sweeps = mc.sweeps;
  cfg.burn_in = mc.burn_in;
  cfg.thin = mc.thin;
  for (const Site& s : Box{window_half_width}.sites())
    if (is_even_site(s)) cfg.mask.freeze(s, xi.at(s));
  return run_chain(cfg, obs);
}

namespace {

ChainConfig decimated_chain_config(
    const std::vector<Site>& image_volume,
    const std::function<Spin(const Site&)>& image_pattern,
    const IsingParams& params, BoundaryKind bc, int window_half_width,
    const McBudget& mc) {
  if (static_cast<int>(image_volume.size()) > kImageVolumeCap)
    throw std::invalid_argument("image volume over cap");
  if (bc != BoundaryKind::Plus && bc != BoundaryKind::Minus)
    throw std::invalid_argument("decimated kernel needs a +/- far boundary");
  SiteSet doubled;
  for (const Site& i : image_volume) {
    Site d{2 * i.x, 2 * i.y};
    if (!Box{window_half_width}.contains(d))
      throw std::invalid_argument("doubled image volume must fit the window");
    doubled.insert(d);
  }
  ChainConfig cfg;
  cfg.params = params;
  cfg.box_half_width = window_half_width;
  cfg.bc = bc;
  cfg.seed = mc.seed;
  cfg.sweeps = mc.sweeps;
  cfg.burn_in = mc.burn_in;
  cfg.thin = mc.thin;
  for (const Site& s : Box{window_half_width}.sites())
    if (is_even_site(s) && !doubled.count(s))
      cfg.mask.freeze(s, image_pattern({s.x / 2, s.y / 2}));
  return cfg;
}

CellEstimate wilson(long hits, long n) {
  const double z = 1.0;
  const double p = n ? static_cast<double>(hits) / n : 0.0;
  const double denom = 1.0 + z * z / n;
  const double hw =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  return CellEstimate{p, hw, n};
}

}  // namespace

DecimatedKernelEstimate decimated_kernel_estimate(
    const std::vector<Site>& image_volume,
    const std::function<Spin(const Site&)>& image_pattern,
    const IsingParams& params, BoundaryKind bc, int window_half_width,
    const McBudget& mc) {
  ChainConfig cfg = decimated_chain_config(image_volume, image_pattern, params,
                                           bc, window_half_width, mc);
  std::vector<Site> sites = image_volume;
  std::sort(sites.begin(), sites.end());
  const int k = static_cast<int>(sites.size());

  std::vector<long> hist(std::size_t{1} << k, 0);
  std::vector<std::vector<double>> plus_ind(k);
  long n = 0;
  run_chain_callback(cfg, [&](const SpinGrid& g, long) {
    Config c = 0;
    for (int t = 0; t < k; ++t) {
      const Spin v = g.at({2 * sites[t].x, 2 * sites[t].y});
      if (v > 0) c |= Config{1} << t;
      plus_ind[t].push_back(v > 0 ? 1.0 : 0.0);
    }
    ++hist[c];
    ++n;
  });

  DecimatedKernelEstimate out;
  out.image_sites = sites;
  out.window_half_width = window_half_width;
  out.bc = bc;
  out.mc = mc;
  for (long hits : hist) out.cells.push_back(wilson(hits, n));
  for (int t = 0; t < k; ++t)
    out.marginal_plus.push_back(batch_means(plus_ind[t], mc.seed));
  return out;
}

std::vector<double> decimated_kernel_exact(
    const std::vector<Site>& image_volume,
    const std::function<Spin(const Site&)>& image_pattern,
    const IsingParams& params, BoundaryKind bc, int window_half_width) {
  if (bc != BoundaryKind::Plus && bc != BoundaryKind::Minus)
    throw std::invalid_argument("decimated kernel needs a +/- far boundary");
  std::vector<Site> sites = image_volume;
  std::sort(sites.begin(), sites.end());
  const int k = static_cast<int>(sites.size());
  SiteSet doubled;
  for (const Site& i : sites) doubled.insert({2 * i.x, 2 * i.y});

  std::vector<Site> free_sites;
  BoundaryMap bmap;
  bmap.kind = bc;
  for (const Site& s : Box{window_half_width}.sites()) {
    if (!is_even_site(s) || doubled.count(s)) free_sites.push_back(s);
    else bmap.values[s] = image_pattern({s.x / 2, s.y / 2});
  }
  Volume vol(std::move(free_sites));
  if (vol.size() > kEnumerationCap)
    throw std::invalid_argument("exact enumeration infeasible");
  const KernelTable full = kernel_exact(vol, bmap, params);

  std::vector<int> pos(k);
  for (int t = 0; t < k; ++t) pos[t] = vol.index({2 * sites[t].x, 2 * sites[t].y});
  std::vector<double> table(std::size_t{1} << k, 0.0);
  for (std::size_t c = 0; c < full.probs.size(); ++c) {
    Config ic = 0;
    for (int t = 0; t < k; ++t)
      if ((c >> pos[t]) & 1) ic |= Config{1} << t;
    table[ic] += full.probs[c];
  }
  return table;
}

bool global_kernel_monotonicity(const SiteSet& S, const SpinField& omega,
                                const IsingParams& params, const Volume& vol1,
                                const std::vector<double>& f, const Volume& vol2) {
  for (const Site& s : vol1.sites)
    if (!vol2.contains(s))
      throw std::invalid_argument("windows must be nested");
  for (const Site& s : vol2.sites)
    if (!S.count(s))
      throw std::invalid_argument("windows must consist of free sites");
  if (f.size() != (std::size_t{1} << vol1.size()))
    throw std::invalid_argument("observable table size mismatch");
  for (std::size_t c = 0; c < f.size(); ++c)
    for (int b = 0; b < vol1.size(); ++b)
      if (!((c >> b) & 1) && f[c] > f[c | (std::size_t{1} << b)])
        throw std::invalid_argument("observable is not increasing");

  auto filled_bc = [&](const Volume& vol) {
    BoundaryMap bc;
    bc.kind = BoundaryKind::Fixed;
    for (const Site& s : vol.sites)
      for (const Site& nb : neighbors(s))
        if (!vol.contains(nb))
          bc.values[nb] = S.count(nb) ? Spin{+1} : omega.completed_at(nb);
    return bc;
  };
  const double e1 = kernel_exact(vol1, filled_bc(vol1), params).expectation(f);

  const KernelTable big = kernel_exact(vol2, filled_bc(vol2), params);
  std::vector<int> pos(vol1.size());
  for (int t = 0; t < vol1.size(); ++t) pos[t] = vol2.index(vol1.sites[t]);
  double e2 = 0.0;
  for (std::size_t c = 0; c < big.probs.size(); ++c) {
    Config inner = 0;
    for (int t = 0; t < vol1.size(); ++t)
      if ((c >> pos[t]) & 1) inner |= Config{1} << t;
    e2 += big.probs[c] * f[inner];
  }
  return e2 <= e1 + 1e-12;
}

}  // namespace decigibbs
