#include "decigibbs/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decigibbs {

ProbeResult probe_discontinuity(double beta,
                                const std::function<Spin(const Site&)>& pattern,
                                const std::string& pattern_name,
                                const std::vector<int>& windows,
                                const McBudget& mc) {
  ProbeResult res;
  res.beta = beta;
  res.pattern = pattern_name;
  res.rows.resize(windows.size());

  struct Leg {
    int row;
    BoundaryKind bc;
  };
  std::vector<Leg> legs;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    legs.push_back({static_cast<int>(w), BoundaryKind::Plus});
    legs.push_back({static_cast<int>(w), BoundaryKind::Minus});
  }
  for (std::size_t w = 0; w < windows.size(); ++w)
    res.rows[w].window = windows[w];

  const IsingParams params{beta, 0.0};
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const Leg& leg = legs[k];
    McBudget local = mc;
    local.seed = CounterRng::derive(mc.seed, 100 * leg.row +
                                                 (leg.bc == BoundaryKind::Plus));
    const auto est = decimated_kernel_estimate(
        {{0, 0}}, pattern, params, leg.bc, windows[leg.row] / 2, local);
    const Estimate& marginal = est.marginal_plus[0];
    if (leg.bc == BoundaryKind::Plus) {
      res.rows[leg.row].p_plus = marginal.mean;
      res.rows[leg.row].se_plus = marginal.stderr_;
    } else {
      res.rows[leg.row].p_minus = marginal.mean;
      res.rows[leg.row].se_minus = marginal.stderr_;
    }
  }
  return res;
}

ContourTail contour_tail(const std::vector<SpinField>& samples, int l_max,
                         int l0, double beta) {
  if (samples.size() < 100)
    throw std::invalid_argument("contour tail needs at least 100 samples");
  ContourTail out;
  out.samples = static_cast<long>(samples.size());

  std::vector<int> diams;
  diams.reserve(samples.size());
  for (const SpinField& f : samples) {
    const auto contours = extract_contours(f);
    // Exterior contour surrounding the origin: the enclosing one with the
    // largest interior. Absent => diameter 0.
    int diam = 0;
    std::size_t best_interior = 0;
    for (const Contour& c : contours)
      if (c.encloses({0, 0}) && c.interior.size() >= best_interior) {
        best_interior = c.interior.size();
        diam = c.diameter();
      }
    diams.push_back(diam);
  }
  for (int l = 0; l <= l_max; ++l) {
    long exceed = 0;
    for (int d : diams)
      if (d > l) ++exceed;
    out.points.push_back(
        {l, static_cast<double>(exceed) / out.samples, exceed});
  }

  if (beta <= 0.0) {
    out.fit_valid = false;  // decay per beta*L is indeterminate at beta = 0
    return out;
  }
  // Count-weighted least squares of log freq against l on the fit range.
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  int usable = 0;
  for (const TailPoint& p : out.points) {
    if (p.l <= l0 || p.exceed == 0) continue;
    const double wgt = static_cast<double>(p.exceed);
    const double y = std::log(p.freq);
    sw += wgt;
    swx += wgt * p.l;
    swy += wgt * y;
    swxx += wgt * p.l * p.l;
    swxy += wgt * p.l * y;
    ++usable;
  }
  if (usable >= 2) {
    const double denom = sw * swxx - swx * swx;
    if (denom > 0) {
      const double slope = (sw * swxy - swx * swy) / denom;
      out.c = -slope / beta;
      out.fit_valid = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// entropy estimators

namespace {

std::vector<long> block_counts(const std::vector<SpinField>& samples, int k,
                               long& total) {
  std::vector<long> counts(std::size_t{1} << (k * k), 0);
  total = 0;
  for (const SpinField& f : samples) {
    const int n = f.box.half_width;
    for (int x = -n; x + k - 1 <= n; ++x)
      for (int y = -n; y + k - 1 <= n; ++y) {
        std::size_t pat = 0;
        int bit = 0;
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b, ++bit)
            if (f.at({x + a, y + b}) > 0) pat |= std::size_t{1} << bit;
        ++counts[pat];
        ++total;
      }
  }
  return counts;
}

}  // namespace

EntropyEstimate ks_entropy(const std::vector<SpinField>& samples, int block) {
  if (block < 1 || block > kBlockCap)
    throw std::invalid_argument("block size out of range");
  long total = 0;
  const auto counts = block_counts(samples, block, total);
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return EntropyEstimate{block, h / (block * block), total};
}

EntropyEstimate relative_entropy_density(const std::vector<SpinField>& mu,
                                         const std::vector<SpinField>& nu,
                                         int block) {
  if (block < 1 || block > kBlockCap)
    throw std::invalid_argument("block size out of range");
  long n_mu = 0, n_nu = 0;
  const auto cmu = block_counts(mu, block, n_mu);
  const auto cnu = block_counts(nu, block, n_nu);
  const double cells = static_cast<double>(cmu.size());
  double h = 0.0;
  for (std::size_t pat = 0; pat < cmu.size(); ++pat) {
    // shared add-one smoothing keeps the estimator nonnegative and exact
    // zero for identical streams
    const double p = (cmu[pat] + 1.0) / (n_mu + cells);
    const double q = (cnu[pat] + 1.0) / (n_nu + cells);
    h += p * std::log(p / q);
  }
  return EntropyEstimate{block, h / (block * block), n_mu};
}

// ---------------------------------------------------------------------------
// quenched correlation decay pipeline

QcdReport qcd_pipeline(double beta, int n_fields, int mmax, double lambda,
                       const QcdBudget& budget) {
  QcdReport report;
  report.beta = beta;
  report.mmax = mmax;
  report.lambda = lambda;
  const int image_hw = mmax + 4;
  report.image_half_width = image_hw;
  const int window_hw = 2 * image_hw;

  // nu+ proxy: + boundary chain on the doubled window, decimated at
  // field_gap intervals after burn-in.
  ChainConfig cfg;
  cfg.params = IsingParams{beta, 0.0};
  cfg.box_half_width = window_hw;
  cfg.bc = BoundaryKind::Plus;
  cfg.seed = budget.field_mc.seed;
  cfg.burn_in = budget.field_mc.burn_in;
  cfg.thin = budget.field_gap;
  cfg.sweeps = cfg.burn_in + budget.field_gap * n_fields;

  std::vector<SpinField> fields;
  run_chain_callback(cfg, [&](const SpinGrid& g, long) {
    if (static_cast<int>(fields.size()) < n_fields)
      fields.push_back(decimate(g.to_field(BoundaryKind::Plus, {})));
  });

  for (int fidx = 0; fidx < static_cast<int>(fields.size()); ++fidx) {
    const SpinField& field = fields[fidx];
    QcdFieldReport row;
    row.field_index = fidx;

    std::vector<Site> minuses;
    for (const Site& s : field.box.sites())
      if (field.at(s) < 0) minuses.push_back(s);
    row.minus_sites = static_cast<long>(minuses.size());

    // Anchor: minus site nearest the origin whose telescope sets stay in
    // the window.
    const int core = image_hw - mmax;
    std::optional<Site> anchor;
    for (const Site& s : minuses) {
      if (std::max(std::abs(s.x), std::abs(s.y)) > core) continue;
      if (!anchor || l1_norm(s) < l1_norm(*anchor)) anchor = s;
    }
    row.anchor = anchor;
    if (!anchor) {
      row.refusal = minuses.empty()
                        ? "no minus sites: telescoped terms vanish identically"
                        : "no minus site inside the core region";
      report.fields.push_back(std::move(row));
      continue;
    }

    EvenConstraint xi = EvenConstraint::from_image(window_hw,
                                                   image_from_field(field));
    const QuenchedLength ql =
        quenched_length(xi, *anchor, lambda, QuenchedFamily::Boxes);
    row.quenched_length = ql.value;
    row.quenched_infinite = ql.infinite_within_window;

    const auto image = image_from_field(field);
    for (int m = 1; m <= mmax; ++m) {
      McBudget mc = budget.term_mc;
      mc.seed = CounterRng::derive(budget.term_mc.seed,
                                   1000000ULL * (fidx + 1) + m);
      const Measured t = telescoped_term_mc(*anchor, m, image,
                                            IsingParams{beta, 0.0},
                                            BoundaryKind::Plus, window_hw, mc);
      row.terms.push_back(QcdPoint{m, std::abs(t.value), t.stderr_});
    }
    try {
      row.fit = qcd_fit(row.terms, ql.infinite_within_window
                                       ? mmax  // nothing usable beyond it
                                       : ql.value);
    } catch (const std::exception& e) {
      row.refusal = e.what();
    }
    report.fields.push_back(std::move(row));
  }
  return report;
}

}  // namespace decigibbs
