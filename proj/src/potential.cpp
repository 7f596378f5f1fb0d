#include "decigibbs/potential.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace decigibbs {

namespace {

void check_set_function(const SetFunction& f) {
  const int n = static_cast<int>(f.ground.size());
  if (n > kMoebiusCap) throw std::invalid_argument("ground set over cap");
  if (f.values.size() != (std::size_t{1} << n))
    throw std::invalid_argument("set function not defined on all subsets");
  if (f.values[0] != 0.0)
    throw std::invalid_argument("set function must vanish on the empty set");
}

std::string shape_key(const std::vector<Site>& sites, bool translate) {
  std::vector<Site> v = sites;
  std::sort(v.begin(), v.end());
  std::ostringstream os;
  const Site base = translate && !v.empty() ? v.front() : Site{0, 0};
  for (const Site& s : v) os << (s.x - base.x) << ',' << (s.y - base.y) << ';';
  return os.str();
}

}  // namespace

SetFunction moebius_invert(const SetFunction& H) {
  check_set_function(H);
  SetFunction phi = H;
  const int n = static_cast<int>(H.ground.size());
  for (int b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t mask = 0; mask < phi.values.size(); ++mask)
      if (mask & bit) phi.values[mask] -= phi.values[mask ^ bit];
  }
  return phi;
}

SetFunction moebius_accumulate(const SetFunction& phi) {
  check_set_function(phi);
  SetFunction H = phi;
  const int n = static_cast<int>(phi.ground.size());
  for (int b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t mask = 0; mask < H.values.size(); ++mask)
      if (mask & bit) H.values[mask] += H.values[mask ^ bit];
  }
  return H;
}

Measured IsingExactSource::log_prob_plus(const std::vector<Site>& volume,
                                         Config config) {
  Volume vol(volume);
  const std::string key = shape_key(vol.sites, /*translate=*/true);
  double log_z;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = log_z_.find(key);
    if (it != log_z_.end()) {
      log_z = it->second;
    } else {
      // log Z only depends on the translated shape under a + boundary.
      std::vector<Site> shifted;
      const Site base = vol.sites.front();
      for (const Site& s : vol.sites) shifted.push_back(s - base);
      log_z = kernel_exact(Volume(shifted), BoundaryMap::plus(), params_).log_z;
      log_z_.emplace(key, log_z);
    }
  }
  const double e = hamiltonian(vol, config, BoundaryMap::plus(), params_);
  return Measured{-params_.beta * e - log_z, 0.0};
}

Measured ExactDecimatedSource::log_prob_plus(const std::vector<Site>& volume,
                                             Config config) {
  Volume vol(volume);
  const std::string key = shape_key(vol.sites, /*translate=*/false);
  const std::vector<double>* table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      auto t = decimated_kernel_exact(vol.sites, image_all_plus(), params_, bc_,
                                      window_);
      it = tables_.emplace(key, std::move(t)).first;
    }
    table = &it->second;
  }
  return Measured{std::log((*table)[config]), 0.0};
}

Measured EstimatedDecimatedSource::log_prob_plus(const std::vector<Site>& volume,
                                                 Config config) {
  Volume vol(volume);
  const std::string key = shape_key(vol.sites, /*translate=*/false);
  const DecimatedKernelEstimate* est;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      auto t = decimated_kernel_estimate(vol.sites, image_all_plus(), params_,
                                         bc_, window_, mc_);
      it = tables_.emplace(key, std::move(t)).first;
    }
    est = &it->second;
  }
  const CellEstimate& cell = est->cells[config];
  Measured out;
  out.indeterminate = cell.p <= 0.0;
  out.value = out.indeterminate ? -std::numeric_limits<double>::infinity()
                                : std::log(cell.p);
  out.stderr_ = out.indeterminate ? 0.0 : cell.half_width / cell.p;
  return out;
}

Measured vacuum_potential(const std::vector<Site>& A, Config sigma,
                          KernelSource& source) {
  Volume vol(A);
  const int n = vol.size();
  if (n > kVacuumCap) throw std::invalid_argument("vacuum potential set over cap");
  const Config full = static_cast<Config>((std::size_t{1} << n) - 1);

  Measured out;
  double var = 0.0;
  for (Config b = full;; b = (b - 1) & full) {
    if (b != 0) {
      // sub-volume and sigma restricted to it
      std::vector<Site> sub;
      Config sub_sigma = 0;
      int t = 0;
      for (int k = 0; k < n; ++k) {
        if (!((b >> k) & 1)) continue;
        sub.push_back(vol.sites[k]);
        if ((sigma >> k) & 1) sub_sigma |= Config{1} << t;
        ++t;
      }
      const Config sub_full = static_cast<Config>((std::size_t{1} << t) - 1);
      if (sub_sigma != sub_full) {  // otherwise the log-ratio is exactly 0
        const Measured num = source.log_prob_plus(sub, sub_sigma);
        const Measured den = source.log_prob_plus(sub, sub_full);
        const int parity = (std::popcount(static_cast<unsigned>(full ^ b)) % 2) ? -1 : 1;
        out.value -= parity * (num.value - den.value);
        var += num.stderr_ * num.stderr_ + den.stderr_ * den.stderr_;
        out.indeterminate |= num.indeterminate || den.indeterminate;
      }
    }
    if (b == 0) break;
  }
  out.stderr_ = std::sqrt(var);
  return out;
}

Measured free_hamiltonian(const std::vector<Site>& lambda, Config sigma,
                          KernelSource& source) {
  Volume vol(lambda);
  const Config full = static_cast<Config>((std::size_t{1} << vol.size()) - 1);
  if (sigma == full) return Measured{0.0, 0.0};
  const Measured num = source.log_prob_plus(vol.sites, sigma);
  const Measured den = source.log_prob_plus(vol.sites, full);
  return Measured{-(num.value - den.value),
                  std::sqrt(num.stderr_ * num.stderr_ + den.stderr_ * den.stderr_),
                  num.indeterminate || den.indeterminate};
}

Measured telescoped_term(const Site& i, int m,
                         const std::function<Spin(const Site&)>& omega,
                         KernelSource& source) {
  if (m < 0) throw std::invalid_argument("telescope radius must be >= 0");
  if (omega(i) > 0) return Measured{0.0, 0.0};  // vacuum anchor: exact zero

  if (m == 0) {
    const std::vector<Site> vol{i};
    const Measured num = source.log_prob_plus(vol, 0);  // spin -1 at i
    const Measured den = source.log_prob_plus(vol, 1);
    return Measured{-(num.value - den.value),
                    std::sqrt(num.stderr_ * num.stderr_ + den.stderr_ * den.stderr_),
                    num.indeterminate || den.indeterminate};
  }

  const TelescopeSet L = telescope_set(i, m);
  bool annulus_all_plus = true;
  for (const Site& s : L.annulus)
    if (omega(s) < 0) annulus_all_plus = false;
  if (annulus_all_plus) return Measured{0.0, 0.0};  // cross ratio cancels

  const TelescopeSet Lm1 = telescope_set(i, m - 1);
  SiteSet inner(Lm1.members.begin(), Lm1.members.end());
  const int n = static_cast<int>(L.members.size());
  Config c_full = 0, c_inner = 0, c_full_noi = 0, c_inner_noi = 0;
  for (int k = 0; k < n; ++k) {
    const Site& s = L.members[k];
    const bool plus = omega(s) > 0;
    const bool in = inner.count(s) > 0;
    const Config bit = Config{1} << k;
    if (plus) c_full |= bit;
    if (!in || plus) c_inner |= bit;  // annulus reads +
    if (s == i || plus) c_full_noi |= bit;
    if (s == i || !in || plus) c_inner_noi |= bit;
  }
  const Measured a = source.log_prob_plus(L.members, c_full);
  const Measured b = source.log_prob_plus(L.members, c_inner_noi);
  const Measured c = source.log_prob_plus(L.members, c_full_noi);
  const Measured d = source.log_prob_plus(L.members, c_inner);
  return Measured{-(a.value + b.value - c.value - d.value),
                  std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_ +
                            c.stderr_ * c.stderr_ + d.stderr_ * d.stderr_),
                  a.indeterminate || b.indeterminate || c.indeterminate ||
                      d.indeterminate};
}

Measured telescoped_sum(const Volume& lambda, Config sigma, int mmax,
                        KernelSource& source) {
  auto omega = [&](const Site& s) -> Spin {
    const int k = lambda.index(s);
    if (k < 0) return +1;
    return (sigma >> k) & 1 ? +1 : -1;
  };
  Measured out;
  double var = 0.0;
  for (const Site& i : lambda.sites) {
    for (int m = 0; m <= mmax; ++m) {
      const Measured t = telescoped_term(i, m, omega, source);
      out.value += t.value;
      var += t.stderr_ * t.stderr_;
      out.indeterminate |= t.indeterminate;
    }
  }
  out.stderr_ = std::sqrt(var);
  return out;
}

namespace {

struct SummandStats {
  double value = 0.0;
  double var = 0.0;
  bool indeterminate = false;
};

// Spin-flip reweighting factor exp(2 beta sum of neighbors of the doubled
// site); all four neighbors of an even site are free under an even-site
// constraint.
double flip_factor(const SpinGrid& g, const Site& doubled, double beta) {
  int nb = 0;
  for (const Site& t : neighbors(doubled)) nb += g.at(t);
  return std::exp(2.0 * beta * nb);
}

SummandStats evaluate_summand(const Site& i, const Site& jr,
                              const std::vector<Site>& q_sites,
                              const std::function<Spin(const Site&)>& image,
                              const IsingParams& params, BoundaryKind bc,
                              int window_half_width, const McBudget& mc) {
  ChainConfig cfg;
  cfg.params = params;
  cfg.box_half_width = window_half_width;
  cfg.bc = bc;
  cfg.seed = mc.seed;
  cfg.sweeps = mc.sweeps;
  cfg.burn_in = mc.burn_in;
  cfg.thin = mc.thin;
  SiteSet q_doubled;
  for (const Site& k : q_sites) q_doubled.insert({2 * k.x, 2 * k.y});
  for (const Site& s : Box{window_half_width}.sites())
    if (is_even_site(s))
      cfg.mask.freeze(s, q_doubled.count(s) ? image({s.x / 2, s.y / 2})
                                            : Spin{+1});

  const Site di{2 * i.x, 2 * i.y}, dj{2 * jr.x, 2 * jr.y};
  std::vector<double> fi, fj, fij;
  run_chain_callback(cfg, [&](const SpinGrid& g, long) {
    const double a = flip_factor(g, di, params.beta);
    const double b = flip_factor(g, dj, params.beta);
    fi.push_back(a);
    fj.push_back(b);
    fij.push_back(a * b);
  });

  // Batch means and covariances of the three estimators, then the delta
  // method for log Fi + log Fj - log Fij.
  constexpr int kB = 32;
  const long n = static_cast<long>(fi.size());
  if (n < kB) throw std::runtime_error("cannot fill 32 batches: too few samples");
  const long bs = n / kB;
  double bm[3][kB];
  const std::vector<double>* cols[3] = {&fi, &fj, &fij};
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < kB; ++b) {
      double acc = 0.0;
      for (long k = 0; k < bs; ++k) acc += (*cols[c])[b * bs + k];
      bm[c][b] = acc / static_cast<double>(bs);
    }
  double mean[3] = {0, 0, 0};
  for (int c = 0; c < 3; ++c) {
    for (int b = 0; b < kB; ++b) mean[c] += bm[c][b];
    mean[c] /= kB;
  }
  double cov[3][3] = {};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int b = 0; b < kB; ++b)
        acc += (bm[a][b] - mean[a]) * (bm[c][b] - mean[c]);
      cov[a][c] = acc / (kB - 1) / kB;
    }

  SummandStats out;
  for (int c = 0; c < 3; ++c)
    if (mean[c] - 2.0 * std::sqrt(cov[c][c]) <= 0.0) out.indeterminate = true;
  out.value = std::log(mean[0]) + std::log(mean[1]) - std::log(mean[2]);
  const double grad[3] = {1.0 / mean[0], 1.0 / mean[1], -1.0 / mean[2]};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) out.var += grad[a] * grad[c] * cov[a][c];
  out.var = std::max(out.var, 0.0);
  return out;
}

}  // namespace

Measured telescoped_term_mc(const Site& i, int m,
                            const std::function<Spin(const Site&)>& image,
                            const IsingParams& params, BoundaryKind bc,
                            int window_half_width, const McBudget& mc,
                            McTermBreakdown* breakdown) {
  if (m < 1) throw std::invalid_argument("Monte Carlo telescoping needs m >= 1");
  const TelescopeSet L = telescope_set(i, m);
  for (const Site& s : L.members)
    if (std::max(std::abs(2 * s.x), std::abs(2 * s.y)) > window_half_width)
      throw std::invalid_argument("doubled telescope set must fit the window");
  if (breakdown) {
    *breakdown = McTermBreakdown{};
    breakdown->annulus_size = L.annulus_size();
  }
  if (image(i) > 0) return Measured{0.0, 0.0};  // vacuum anchor

  const TelescopeSet Lm1 = telescope_set(i, m - 1);
  const int v = L.annulus_size();
  std::vector<int> active;
  for (int r = 0; r < v; ++r)
    if (image(L.annulus[r]) < 0) active.push_back(r);
  if (breakdown) {
    breakdown->evaluated_summands = static_cast<int>(active.size());
    for (int r : active)
      if (l1_dist(i, L.annulus[r]) <= 4) ++breakdown->near_summands;
  }
  if (active.empty()) return Measured{0.0, 0.0};

  std::vector<SummandStats> stats(active.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < active.size(); ++t) {
    const int r = active[t];
    std::vector<Site> q = Lm1.members;
    q.insert(q.end(), L.annulus.begin(), L.annulus.begin() + r + 1);
    McBudget local = mc;
    local.seed = CounterRng::derive(mc.seed, 1000 * m + r);
    stats[t] = evaluate_summand(i, L.annulus[r], q, image, params, bc,
                                window_half_width, local);
  }
  Measured out;
  double var = 0.0;
  for (const SummandStats& s : stats) {
    out.value += s.value;
    var += s.var;
    out.indeterminate |= s.indeterminate;
  }
  out.stderr_ = std::sqrt(var);
  return out;
}

double single_site_nonnullness(const IsingParams& params) {
  double m = 1.0;
  for (int nb = -4; nb <= 4; ++nb)
    for (int sp = -1; sp <= 1; sp += 2) {
      const double field = params.beta * (nb + params.h) * sp;
      m = std::min(m, 1.0 / (1.0 + std::exp(-2.0 * field)));
    }
  return m;
}

QCDFit qcd_fit(const std::vector<QcdPoint>& terms, int quenched_length) {
  QCDFit fit;
  fit.quenched_length = quenched_length;
  std::vector<double> xs, ys;
  for (const QcdPoint& p : terms) {
    if (p.m <= 0) continue;
    if (p.m <= quenched_length)
      fit.c1 = std::max(fit.c1, p.abs_psi / p.m);
    else if (p.abs_psi > 0.0)
      xs.push_back(p.m), ys.push_back(std::log(p.abs_psi / p.m));
  }
  fit.n_fit_points = static_cast<int>(xs.size());
  if (fit.n_fit_points < 4) throw std::invalid_argument("insufficient points");

  const int n = fit.n_fit_points;
  double xbar = 0, ybar = 0;
  for (int k = 0; k < n; ++k) xbar += xs[k], ybar += ys[k];
  xbar /= n, ybar /= n;
  double sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sxx += (xs[k] - xbar) * (xs[k] - xbar);
    sxy += (xs[k] - xbar) * (ys[k] - ybar);
  }
  const double slope = sxy / sxx;
  fit.lambda = -slope;
  fit.c2 = std::exp(ybar - slope * xbar);
  double ss_res = 0;
  for (int k = 0; k < n; ++k) {
    const double resid = ys[k] - (ybar + slope * (xs[k] - xbar));
    ss_res += resid * resid;
  }
  fit.lambda_se = std::sqrt(ss_res / (n - 2) / sxx);
  fit.accepted = fit.lambda > 0.0;
  return fit;
}

}  // namespace decigibbs
