#include "decigibbs/spec_engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace decigibbs {

Volume::Volume(std::vector<Site> s) : sites(std::move(s)) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  index_.reserve(sites.size());
  for (int k = 0; k < static_cast<int>(sites.size()); ++k) index_[sites[k]] = k;
}

int Volume::index(const Site& s) const {
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

BoundaryMap BoundaryMap::from_field(const SpinField& f) {
  BoundaryMap bc;
  bc.kind = f.bc;
  if (f.bc == BoundaryKind::Fixed) bc.values = f.ring_values;
  return bc;
}

namespace {

// Bond/field structure of H on a fixed volume, so enumeration loops touch
// no hash maps.
struct EnergyModel {
  std::vector<std::pair<int, int>> bonds;  // internal n.n. pairs (indices)
  std::vector<double> site_coeff;          // -(boundary sum + h) per site

  EnergyModel(const Volume& vol, const BoundaryMap& bc, const IsingParams& p) {
    const int n = vol.size();
    site_coeff.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double bsum = 0.0;
      for (const Site& nb : neighbors(vol.sites[k])) {
        const int j = vol.index(nb);
        if (j >= 0) {
          if (j > k) bonds.push_back({k, j});
        } else if (bc.kind != BoundaryKind::Free) {
          auto v = bc.at(nb);
          if (!v) throw std::invalid_argument("missing boundary value");
          bsum += *v;
        }
      }
      site_coeff[k] = -(bsum + p.h);
    }
  }

  double energy(Config c) const {
    double e = 0.0;
    for (const auto& [a, b] : bonds) {
      const int sa = (c >> a) & 1 ? 1 : -1;
      const int sb = (c >> b) & 1 ? 1 : -1;
      e -= sa * sb;
    }
    for (std::size_t k = 0; k < site_coeff.size(); ++k)
      e += ((c >> k) & 1 ? 1 : -1) * site_coeff[k];
    return e;
  }
};

KernelTable kernel_from_logweights(Volume vol, std::vector<double> logw) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double w : logw) mx = std::max(mx, w);
  double sum = 0.0;
  for (double w : logw) sum += std::exp(w - mx);
  KernelTable t{std::move(vol), std::move(logw), mx + std::log(sum)};
  const double inv = 1.0 / sum;
  for (double& w : t.probs) w = std::exp(w - mx) * inv;
  return t;
}

}  // namespace

double hamiltonian(const Volume& vol, Config config, const BoundaryMap& bc,
                   const IsingParams& params) {
  return EnergyModel(vol, bc, params).energy(config);
}

double KernelTable::expectation(const std::vector<double>& f) const {
  double e = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) e += probs[c] * f[c];
  return e;
}

double KernelTable::marginal_plus(int k) const {
  double p = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c)
    if ((c >> k) & 1) p += probs[c];
  return p;
}

double KernelTable::total_variation(const std::vector<double>& other) const {
  double tv = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c)
    tv += std::abs(probs[c] - other[c]);
  return 0.5 * tv;
}

KernelTable kernel_exact(const Volume& vol, const BoundaryMap& bc,
                         const IsingParams& params) {
  if (vol.size() > kEnumerationCap)
    throw std::invalid_argument("exact enumeration infeasible");
  const EnergyModel model(vol, bc, params);
  const std::int64_t count = std::int64_t{1} << vol.size();
  std::vector<double> logw(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < count; ++c)
    logw[c] = -params.beta * model.energy(static_cast<Config>(c));
  return kernel_from_logweights(vol, std::move(logw));
}

KernelTable kernel_exact_serial(const Volume& vol, const BoundaryMap& bc,
                                const IsingParams& params) {
  if (vol.size() > kEnumerationCap)
    throw std::invalid_argument("exact enumeration infeasible");
  const EnergyModel model(vol, bc, params);
  const std::int64_t count = std::int64_t{1} << vol.size();
  std::vector<double> logw(count);
  for (std::int64_t c = 0; c < count; ++c)
    logw[c] = -params.beta * model.energy(static_cast<Config>(c));
  return kernel_from_logweights(vol, std::move(logw));
}

double kernel_compose_deviation(const Volume& outer, const Volume& inner,
                                const BoundaryMap& bc, const IsingParams& params) {
  for (const Site& s : inner.sites)
    if (!outer.contains(s))
      throw std::invalid_argument("inner volume must lie inside the outer one");

  const KernelTable big = kernel_exact(outer, bc, params);

  std::vector<int> inner_pos;  // outer index of each inner site
  for (const Site& s : inner.sites) inner_pos.push_back(outer.index(s));
  std::vector<int> rest_pos;
  for (int k = 0; k < outer.size(); ++k)
    if (inner.index(outer.sites[k]) < 0) rest_pos.push_back(k);

  const int ni = inner.size(), nr = static_cast<int>(rest_pos.size());
  auto combine = [&](Config ci, Config cr) {
    Config c = 0;
    for (int k = 0; k < ni; ++k)
      if ((ci >> k) & 1) c |= Config{1} << inner_pos[k];
    for (int k = 0; k < nr; ++k)
      if ((cr >> k) & 1) c |= Config{1} << rest_pos[k];
    return c;
  };

  double dev = 0.0;
  for (Config cr = 0; cr < (Config{1} << nr); ++cr) {
    BoundaryMap inner_bc = bc;
    for (int k = 0; k < nr; ++k)
      inner_bc.values[outer.sites[rest_pos[k]]] = (cr >> k) & 1 ? +1 : -1;
    const KernelTable small = kernel_exact(inner, inner_bc, params);

    double marg = 0.0;
    for (Config ci = 0; ci < (Config{1} << ni); ++ci)
      marg += big.prob(combine(ci, cr));
    for (Config ci = 0; ci < (Config{1} << ni); ++ci) {
      const double composed = small.prob(ci) * marg;
      dev = std::max(dev, std::abs(composed - big.prob(combine(ci, cr))));
    }
  }
  return dev;
}

double keybar_residual(const Volume& inner, const Volume& outer,
                       Config sigma_tilde_inner, Config sigma_inner,
                       Config tau_outer, const BoundaryMap& bc,
                       const IsingParams& params) {
  for (const Site& s : inner.sites)
    if (!outer.contains(s))
      throw std::invalid_argument("inner volume must lie inside the outer one");

  std::vector<int> inner_pos;
  for (const Site& s : inner.sites) inner_pos.push_back(outer.index(s));
  auto overwrite_inner = [&](Config outer_cfg, Config inner_cfg) {
    for (int k = 0; k < inner.size(); ++k) {
      const Config bit = Config{1} << inner_pos[k];
      if ((inner_cfg >> k) & 1) outer_cfg |= bit;
      else outer_cfg &= ~bit;
    }
    return outer_cfg;
  };

  // Ratios of kernel values at a fixed boundary: the normalizations cancel
  // analytically, so both sides reduce to exponentials of energy
  // differences. At h=0 these are exact integers and the identity holds to
  // the last bit.
  const double lhs =
      std::exp(-params.beta *
               (hamiltonian(outer, overwrite_inner(tau_outer, sigma_tilde_inner),
                            bc, params) -
                hamiltonian(outer, overwrite_inner(tau_outer, sigma_inner), bc,
                            params)));

  BoundaryMap inner_bc = bc;
  for (int k = 0; k < outer.size(); ++k)
    if (inner.index(outer.sites[k]) < 0)
      inner_bc.values[outer.sites[k]] = (tau_outer >> k) & 1 ? +1 : -1;
  const double rhs =
      std::exp(-params.beta * (hamiltonian(inner, sigma_tilde_inner, inner_bc,
                                           params) -
                               hamiltonian(inner, sigma_inner, inner_bc, params)));

  return std::abs(lhs - rhs);
}

double transfer_matrix_logZ(int width, int height, BoundaryKind bc,
                            const IsingParams& params) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid dimensions must be positive");
  if (width > kTransferWidthCap)
    throw std::invalid_argument("transfer width over cap");
  if (bc == BoundaryKind::Fixed)
    throw std::invalid_argument("transfer matrix supports +, - or free boundary");
  const double ghost = (bc == BoundaryKind::Plus) ? 1.0
                       : (bc == BoundaryKind::Minus) ? -1.0
                                                     : 0.0;
  const double beta = params.beta, h = params.h;
  const std::size_t nstates = std::size_t{1} << width;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> v(nstates, neg_inf), next(nstates);
  v[0] = 0.0;
  const std::size_t mask = nstates - 1;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (std::size_t ns = 0; ns < nstates; ++ns) {
        const double sigma = (ns & 1) ? 1.0 : -1.0;
        // couplings resolvable from the new state alone
        double e = -h * sigma;
        if (x > 0) e -= sigma * ((ns >> 1) & 1 ? 1.0 : -1.0);
        else e -= sigma * ghost;
        if (x == width - 1) e -= sigma * ghost;
        if (y == 0) e -= sigma * ghost;
        if (y == height - 1) e -= sigma * ghost;

        double acc = neg_inf;
        const std::size_t base = (ns >> 1) & mask;
        for (int top = 0; top < 2; ++top) {
          if (y == 0 && top == 1) continue;  // phantom frontier bits are 0
          const std::size_t s = base | (static_cast<std::size_t>(top) << (width - 1));
          if (v[s] == neg_inf) continue;
          double et = e;
          if (y > 0) et -= sigma * (top ? 1.0 : -1.0);  // bond to the site below
          const double cand = v[s] - beta * et;
          if (acc == neg_inf) acc = cand;
          else {
            const double m = std::max(acc, cand);
            acc = m + std::log1p(std::exp(std::min(acc, cand) - m));
          }
        }
        next[ns] = acc;
      }
      v.swap(next);
    }
  }
  double mx = neg_inf;
  for (double w : v) mx = std::max(mx, w);
  double sum = 0.0;
  for (double w : v)
    if (w != neg_inf) sum += std::exp(w - mx);
  return mx + std::log(sum);
}

bool monotonicity_check(const Volume& vol, const IsingParams& params,
                        const std::vector<double>& f, const BoundaryMap& lo,
                        const BoundaryMap& hi) {
  const std::size_t nconf = std::size_t{1} << vol.size();
  if (f.size() != nconf)
    throw std::invalid_argument("observable table size mismatch");
  // Increasing on the configuration lattice: check covering pairs only.
  for (std::size_t c = 0; c < nconf; ++c)
    for (int k = 0; k < vol.size(); ++k)
      if (!((c >> k) & 1) && f[c] > f[c | (std::size_t{1} << k)])
        throw std::invalid_argument("observable is not increasing");
  if (lo.kind == BoundaryKind::Free || hi.kind == BoundaryKind::Free)
    throw std::invalid_argument("free boundary is not comparable");
  for (const Site& s : vol.sites) {
    for (const Site& nb : neighbors(s)) {
      if (vol.contains(nb)) continue;
      if (*lo.at(nb) > *hi.at(nb))
        throw std::invalid_argument("boundaries are not comparable");
    }
  }
  const double elo = kernel_exact(vol, lo, params).expectation(f);
  const double ehi = kernel_exact(vol, hi, params).expectation(f);
  return elo <= ehi + 1e-12;
}

}  // namespace decigibbs
