#include "decigibbs/amoeba.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decigibbs {

namespace {

bool interior_subset(const Contour& inner, const Contour& outer) {
  // interiors are sorted; subset test
  return std::includes(outer.interior.begin(), outer.interior.end(),
                       inner.interior.begin(), inner.interior.end());
}

bool interiors_disjoint(const Contour& a, const Contour& b) {
  std::size_t i = 0, j = 0;
  while (i < a.interior.size() && j < b.interior.size()) {
    if (a.interior[i] < b.interior[j]) ++i;
    else if (b.interior[j] < a.interior[i]) ++j;
    else return false;
  }
  return true;
}

bool surrounds_even_site(const Contour& c) {
  for (const Site& s : c.interior)
    if (is_even_site(s)) return true;
  return false;
}

}  // namespace

int Amoeba::size() const {
  int n = exterior.length();
  for (const Contour& c : internals) n += c.length();
  return n;
}

std::vector<Site> Amoeba::interior_sites() const {
  std::vector<Site> out;
  for (const Site& s : exterior.interior) {
    bool inside_internal = false;
    for (const Contour& c : internals)
      if (c.encloses(s)) {
        inside_internal = true;
        break;
      }
    if (!inside_internal) out.push_back(s);
  }
  return out;
}

std::optional<Amoeba> make_amoeba(const std::vector<Contour>& contours) {
  if (contours.empty()) return std::nullopt;
  int exterior_idx = -1;
  for (std::size_t k = 0; k < contours.size(); ++k) {
    bool surrounded = false;
    for (std::size_t j = 0; j < contours.size(); ++j)
      if (j != k && interior_subset(contours[k], contours[j])) surrounded = true;
    if (!surrounded) {
      if (exterior_idx >= 0) return std::nullopt;  // two maximal contours
      exterior_idx = static_cast<int>(k);
    }
  }
  if (exterior_idx < 0) return std::nullopt;
  Amoeba g;
  g.exterior = contours[exterior_idx];
  for (std::size_t k = 0; k < contours.size(); ++k) {
    if (static_cast<int>(k) == exterior_idx) continue;
    if (!interior_subset(contours[k], g.exterior)) return std::nullopt;
    g.internals.push_back(contours[k]);
  }
  for (std::size_t a = 0; a < g.internals.size(); ++a) {
    if (!surrounds_even_site(g.internals[a])) return std::nullopt;
    for (std::size_t b = a + 1; b < g.internals.size(); ++b)
      if (!interiors_disjoint(g.internals[a], g.internals[b]))
        return std::nullopt;
  }
  return g;
}

bool is_amoeba(const std::vector<Contour>& contours) {
  return make_amoeba(contours).has_value();
}

namespace {

// Required spin on both endpoints of every bond crossed by the contour:
// `inner_value` inside the interior, its opposite outside.
bool paint_contour(const Contour& c, Spin inner_value,
                   std::unordered_map<Site, Spin, SiteHash>& required) {
  const int k = c.length();
  for (int t = 0; t < k; ++t) {
    const DualPoint a = c.points[t];
    const DualPoint b = c.points[(t + 1) % k];
    Site s1, s2;
    if (a.x == b.x) {  // vertical dual edge: horizontal lattice bond
      const int row = std::min(a.y, b.y) + 1;
      s1 = {a.x, row};
      s2 = {a.x + 1, row};
    } else {  // horizontal dual edge: vertical lattice bond
      const int col = std::max(a.x, b.x);
      s1 = {col, a.y};
      s2 = {col, a.y + 1};
    }
    for (const Site& s : {s1, s2}) {
      const Spin want = c.encloses(s) ? inner_value : Spin(-inner_value);
      auto [it, inserted] = required.emplace(s, want);
      if (!inserted && it->second != want) return false;
    }
  }
  return true;
}

std::vector<Site> even_sites_in(const std::vector<Site>& sites) {
  std::vector<Site> out;
  for (const Site& s : sites)
    if (is_even_site(s)) out.push_back(s);
  return out;
}

}  // namespace

bool is_compatible(const Amoeba& g, const EvenConstraint& xi) {
  // 1. Realizability: paint required values around every contour (minus
  //    phase just inside the exterior, plus phase inside internals) and
  //    check the even sites against xi.
  std::unordered_map<Site, Spin, SiteHash> required;
  if (!paint_contour(g.exterior, -1, required)) return false;
  for (const Contour& c : g.internals)
    if (!paint_contour(c, +1, required)) return false;
  for (const auto& [site, want] : required) {
    if (!is_even_site(site)) continue;
    if (!xi.window.contains(site)) return false;  // constraint must decide it
    if (xi.at(site) != want) return false;
  }

  // 2. +1 even sites inside the exterior must be covered by internals.
  for (const Site& s : even_sites_in(g.exterior.interior)) {
    if (!xi.window.contains(s)) return false;
    if (xi.at(s) < 0) continue;
    bool covered = false;
    for (const Contour& c : g.internals)
      if (c.encloses(s)) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }

  // 3. Every internal surrounds a +1 even site of xi.
  for (const Contour& c : g.internals) {
    bool has_plus = false;
    for (const Site& s : even_sites_in(c.interior))
      if (xi.window.contains(s) && xi.at(s) > 0) {
        has_plus = true;
        break;
      }
    if (!has_plus) return false;
  }

  // 4. Internals avoid D_Gamma(xi): the even-lattice component of
  //    D(xi) ∩ Int Gamma attached to the inner boundary of the exterior.
  SiteSet d_in_gamma;
  for (const Site& s : even_sites_in(g.exterior.interior))
    if (xi.window.contains(s) && xi.at(s) < 0) d_in_gamma.insert(s);
  // Seeds: minus even sites required by the exterior's inner side.
  std::vector<Site> stack;
  SiteSet d_gamma;
  for (const auto& [site, want] : required) {
    if (!is_even_site(site) || want > 0) continue;
    if (!g.exterior.encloses(site)) continue;
    if (d_in_gamma.count(site) && !d_gamma.count(site)) {
      d_gamma.insert(site);
      stack.push_back(site);
    }
  }
  while (!stack.empty()) {
    const Site s = stack.back();
    stack.pop_back();
    for (const Site step : {Site{2, 0}, Site{-2, 0}, Site{0, 2}, Site{0, -2}}) {
      const Site t = s + step;
      if (!d_in_gamma.count(t) || d_gamma.count(t)) continue;
      d_gamma.insert(t);
      stack.push_back(t);
    }
  }
  for (const Contour& c : g.internals)
    for (const Site& s : d_gamma)
      if (c.encloses(s)) return false;

  return true;
}

bool is_benign(const Amoeba& g, const EvenConstraint& xi, double lambda) {
  if (!is_compatible(g, xi))
    throw std::invalid_argument("benignity needs a compatible amoeba");
  long minus_inside = 0;
  for (const Site& s : g.interior_sites())
    if (is_even_site(s) && xi.window.contains(s) && xi.at(s) < 0) ++minus_inside;
  return static_cast<double>(minus_inside) <= lambda * g.size();
}

// ---------------------------------------------------------------------------
// quenched correlation length

QuenchedLength quenched_length(const EvenConstraint& xi, const Site& image_site,
                               double lambda, QuenchedFamily family,
                               int saw_budget) {
  const Site anchor{2 * image_site.x, 2 * image_site.y};
  if (!xi.window.contains(anchor))
    throw std::invalid_argument("doubled site must lie in the window");
  const int r = xi.window.half_width / 2;  // even grid: u,v in [-r, r]
  QuenchedLength out;
  out.image_site = image_site;
  out.lambda = lambda;
  out.family = family;

  auto is_minus = [&](int u, int v) {
    return xi.at({2 * u, 2 * v}) < 0 ? 1 : 0;
  };
  const int ui = image_site.x, vi = image_site.y;

  if (family == QuenchedFamily::Boxes) {
    // prefix sums over the even grid
    const int w = 2 * r + 1;
    std::vector<long> pre((w + 1) * (w + 1), 0);
    auto at_pre = [&](int a, int b) -> long& { return pre[a * (w + 1) + b]; };
    for (int a = 1; a <= w; ++a)
      for (int b = 1; b <= w; ++b)
        at_pre(a, b) = at_pre(a - 1, b) + at_pre(a, b - 1) -
                       at_pre(a - 1, b - 1) + is_minus(a - 1 - r, b - 1 - r);
    auto rect_count = [&](int u0, int u1, int v0, int v1) {
      const int a0 = u0 + r, a1 = u1 + r, b0 = v0 + r, b1 = v1 + r;
      return at_pre(a1 + 1, b1 + 1) - at_pre(a0, b1 + 1) - at_pre(a1 + 1, b0) +
             at_pre(a0, b0);
    };
    int worst = -1;
    for (int u0 = -r; u0 <= ui; ++u0)
      for (int u1 = ui; u1 <= r; ++u1)
        for (int v0 = -r; v0 <= vi; ++v0)
          for (int v1 = vi; v1 <= r; ++v1) {
            const long minus = rect_count(u0, u1, v0, v1);
            const long total =
                static_cast<long>(u1 - u0 + 1) * (v1 - v0 + 1);
            if (static_cast<double>(minus) > lambda * total)
              worst = std::max(worst, std::max(u1 - u0, v1 - v0));
          }
    const int dmax = 2 * r;  // a full-span rectangle always contains the anchor
    out.value = std::max(worst, 0);
    out.infinite_within_window = (worst >= dmax && dmax > 0);
    return out;
  }

  // Self-avoiding paths on the even grid, depth-first, budget-capped.
  int worst = -1;
  std::vector<Site> path{{ui, vi}};
  SiteSet seen{{Site{ui, vi}}};
  int dmax_seen = 0;
  auto eval = [&](const std::vector<Site>& p) {
    long minus = 0;
    int xmin = p[0].x, xmax = p[0].x, ymin = p[0].y, ymax = p[0].y;
    for (const Site& s : p) {
      minus += is_minus(s.x, s.y);
      xmin = std::min(xmin, s.x);
      xmax = std::max(xmax, s.x);
      ymin = std::min(ymin, s.y);
      ymax = std::max(ymax, s.y);
    }
    const int diam = std::max(xmax - xmin, ymax - ymin);
    dmax_seen = std::max(dmax_seen, diam);
    if (static_cast<double>(minus) > lambda * static_cast<double>(p.size()))
      worst = std::max(worst, diam);
  };
  std::function<void()> dfs = [&]() {
    eval(path);
    if (static_cast<int>(path.size()) - 1 >= saw_budget) return;
    for (const Site step : {Site{-1, 0}, Site{0, -1}, Site{0, 1}, Site{1, 0}}) {
      const Site t = path.back() + step;
      if (std::abs(t.x) > r || std::abs(t.y) > r || seen.count(t)) continue;
      path.push_back(t);
      seen.insert(t);
      dfs();
      seen.erase(t);
      path.pop_back();
    }
  };
  dfs();
  out.value = std::max(worst, 0);
  out.infinite_within_window = (worst >= 0 && worst >= dmax_seen);
  return out;
}

// ---------------------------------------------------------------------------
// path large deviations

double pld_statistic(const SpinField& sigma, double mstar, PldMode mode,
                     int max_len) {
  if (sigma.bc != BoundaryKind::Plus)
    throw std::invalid_argument("path statistic needs a + boundary");
  const int n = sigma.box.half_width;
  auto on_border = [&](const Site& s) {
    return std::max(std::abs(s.x), std::abs(s.y)) == n;
  };

  if (mode == PldMode::SawUpTo) {
    const auto paths = enumerate_saw({0, 0}, sigma.box, max_len);
    bool any = false;
    double deficit = 0.0;
    auto consider = [&](const std::vector<Site>& p) {
      double acc = 0.0;
      for (const Site& s : p) acc += sigma.at(s);
      const double d = mstar - acc / static_cast<double>(p.size());
      if (!any || d > deficit) deficit = d;
      any = true;
    };
    if (n == 0) consider({{0, 0}});
    for (const auto& p : paths)
      if (on_border(p.back())) consider(p);
    if (!any)
      throw std::invalid_argument("no path reaches the boundary within budget");
    return deficit;
  }

  // Walks bound: minimum spin sum over length-indexed walks from the origin.
  const int side = sigma.box.side();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cur(side * side, inf), nxt(side * side);
  auto idx = [&](const Site& s) { return (s.x + n) * side + (s.y + n); };
  cur[idx({0, 0})] = sigma.at({0, 0});
  bool any = false;
  double deficit = 0.0;
  auto harvest = [&](const std::vector<double>& v, int len_sites) {
    for (int x = -n; x <= n; ++x)
      for (int y = -n; y <= n; ++y) {
        const Site s{x, y};
        if (!on_border(s) || v[idx(s)] == inf) continue;
        const double d = mstar - v[idx(s)] / len_sites;
        if (!any || d > deficit) deficit = d;
        any = true;
      }
  };
  harvest(cur, 1);
  for (int steps = 1; steps <= max_len; ++steps) {
    std::fill(nxt.begin(), nxt.end(), inf);
    for (int x = -n; x <= n; ++x)
      for (int y = -n; y <= n; ++y) {
        const Site s{x, y};
        if (cur[idx(s)] == inf) continue;
        for (const Site& t : neighbors(s)) {
          if (!sigma.box.contains(t)) continue;
          nxt[idx(t)] = std::min(nxt[idx(t)], cur[idx(s)] + sigma.at(t));
        }
      }
    cur.swap(nxt);
    harvest(cur, steps + 1);
  }
  if (!any)
    throw std::invalid_argument("no path reaches the boundary within budget");
  return deficit;
}

// ---------------------------------------------------------------------------
// census

CensusResult amoeba_census(const std::vector<SpinField>& samples,
                           const std::optional<EvenConstraint>& xi_override,
                           double lambda, const std::vector<int>& bin_edges) {
  CensusResult res;
  res.samples = static_cast<long>(samples.size());
  std::vector<CensusBin>& bins = res.bins;
  for (std::size_t k = 0; k + 1 < bin_edges.size(); ++k)
    bins.push_back(CensusBin{bin_edges[k], bin_edges[k + 1], 0, 0});
  if (!bin_edges.empty()) bins.push_back(CensusBin{bin_edges.back(), 0, 0, 0});

  auto bin_of = [&](int diam) -> CensusBin* {
    for (auto& b : bins)
      if (diam >= b.diam_lo && (b.diam_hi == 0 || diam < b.diam_hi)) return &b;
    return nullptr;
  };

  for (const SpinField& f : samples) {
    EvenConstraint xi;
    if (xi_override) {
      xi = *xi_override;
    } else {
      xi.window = f.box;
      for (const Site& s : f.box.sites())
        if (is_even_site(s)) xi.values[s] = f.at(s);
    }
    const auto contours = extract_contours(f);
    // One amoeba per maximal contour; internals are the directly
    // surrounded contours.
    for (std::size_t k = 0; k < contours.size(); ++k) {
      bool maximal = true;
      for (std::size_t j = 0; j < contours.size(); ++j)
        if (j != k && interior_subset(contours[k], contours[j])) maximal = false;
      if (!maximal) continue;
      Amoeba g;
      g.exterior = contours[k];
      for (std::size_t j = 0; j < contours.size(); ++j) {
        if (j == k || !interior_subset(contours[j], contours[k])) continue;
        bool direct = true;
        for (std::size_t t = 0; t < contours.size(); ++t)
          if (t != j && t != k && interior_subset(contours[j], contours[t]) &&
              interior_subset(contours[t], contours[k]))
            direct = false;
        if (direct) g.internals.push_back(contours[j]);
      }
      bool internals_ok = true;
      for (const Contour& c : g.internals)
        if (!surrounds_even_site(c)) internals_ok = false;
      if (!internals_ok) continue;
      ++res.amoebas;
      if (!is_compatible(g, xi)) continue;
      CensusBin* bin = bin_of(g.diameter());
      if (!bin) continue;
      ++bin->compatible;
      if (is_benign(g, xi, lambda)) ++bin->benign;
    }
  }
  return res;
}

}  // namespace decigibbs
