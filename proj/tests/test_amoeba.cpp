#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "decigibbs/amoeba.hpp"
#include "decigibbs/rng.hpp"
#include "decigibbs/sampler.hpp"
#include "doctest.h"

using namespace decigibbs;

namespace {

SpinField field_with_minus(int hw, const std::vector<Site>& minus) {
  SpinField f = SpinField::constant(hw, +1, BoundaryKind::Plus);
  for (const Site& s : minus) f.set(s, -1);
  return f;
}

EvenConstraint constraint_of(const SpinField& f) {
  EvenConstraint xi;
  xi.window = f.box;
  for (const Site& s : f.box.sites())
    if (is_even_site(s)) xi.values[s] = f.at(s);
  return xi;
}

// 7x7 minus block with a 3x3 plus island at the center
SpinField annulus_fixture(int hw = 6) {
  SpinField f = SpinField::constant(hw, +1, BoundaryKind::Plus);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) f.set({x, y}, -1);
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y) f.set({x, y}, +1);
  return f;
}

}  // namespace

TEST_CASE("amoeba recognition") {
  // one contour around an even site
  const auto unit = extract_contours(field_with_minus(3, {{0, 0}}));
  REQUIRE(unit.size() == 1);
  CHECK(is_amoeba(unit));

  // two mutually external contours: no unique exterior
  const auto two = extract_contours(field_with_minus(4, {{-2, 0}, {2, 0}}));
  REQUIRE(two.size() == 2);
  CHECK_FALSE(is_amoeba(two));

  // internal surrounds only an odd site
  SpinField f = annulus_fixture();
  f.set({0, 1}, -1);
  f.set({0, -1}, -1);
  f.set({-1, 0}, -1);
  f.set({1, 0}, -1);  // shrink the island to the single odd-parity... no:
  // rebuild: exterior around a minus ring whose hole holds only (1,0)
  SpinField g = SpinField::constant(4, +1, BoundaryKind::Plus);
  for (int x = 0; x <= 2; ++x)
    for (int y = -1; y <= 1; ++y) g.set({x, y}, -1);
  g.set({1, 0}, +1);  // plus hole at an odd site
  const auto cs = extract_contours(g);
  REQUIRE(cs.size() == 2);
  CHECK_FALSE(is_amoeba(cs));  // the internal surrounds no even site
}

TEST_CASE("compatibility of the annulus fixture") {
  const SpinField f = annulus_fixture();
  const auto contours = extract_contours(f);
  REQUIRE(contours.size() == 2);
  const auto g = make_amoeba(contours);
  REQUIRE(g.has_value());
  CHECK(g->internals.size() == 1);
  CHECK(is_compatible(*g, constraint_of(f)));
}

TEST_CASE("uncovered plus even site breaks compatibility") {
  SpinField f = annulus_fixture();
  const auto contours = extract_contours(f);
  auto g = make_amoeba(contours);
  REQUIRE(g.has_value());
  // drop the internal contour: the island's +1 evens are no longer covered
  Amoeba bare;
  bare.exterior = g->exterior;
  CHECK_FALSE(is_compatible(bare, constraint_of(f)));
}

TEST_CASE("solid minus region is compatible with its own constraint") {
  SpinField f = field_with_minus(5, {});
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) f.set({x, y}, -1);
  const auto contours = extract_contours(f);
  REQUIRE(contours.size() == 1);
  const auto g = make_amoeba(contours);
  REQUIRE(g.has_value());
  CHECK(is_compatible(*g, constraint_of(f)));  // D+ inside is empty
}

TEST_CASE("benignity thresholds") {
  const SpinField f = annulus_fixture();
  const EvenConstraint xi = constraint_of(f);
  const auto g = make_amoeba(extract_contours(f));
  REQUIRE(g.has_value());

  long minus_inside = 0;
  for (const Site& s : g->interior_sites())
    if (is_even_site(s) && xi.at(s) < 0) ++minus_inside;
  CHECK(minus_inside == 8);
  CHECK(g->size() == 28 + 12);

  CHECK(is_benign(*g, xi, 0.25));   // 8 <= 10
  CHECK_FALSE(is_benign(*g, xi, 0.1));  // 8 > 4
  // monotone in lambda
  CHECK(is_benign(*g, xi, 0.4));
}

TEST_CASE("benignity needs compatibility") {
  const SpinField f = annulus_fixture();
  Amoeba bare;
  bare.exterior = make_amoeba(extract_contours(f))->exterior;
  CHECK_THROWS(is_benign(bare, constraint_of(f), 0.25));
}

TEST_CASE("unit amoeba benignity arithmetic") {
  // single minus even site: |G| = 4... use a 2x2 even block to get |G|=8
  SpinField f = field_with_minus(5, {});
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y) f.set({x, y}, -1);
  const auto g = make_amoeba(extract_contours(f));
  REQUIRE(g.has_value());
  CHECK(g->size() == 8);
  const EvenConstraint xi = constraint_of(f);  // one minus even: (0,0)
  CHECK(is_benign(*g, xi, 0.25));        // 1 <= 2
  CHECK_FALSE(is_benign(*g, xi, 0.1));   // 1 > 0.8
}

TEST_CASE("quenched length basics") {
  const EvenConstraint plus = EvenConstraint::constant(8, +1);
  const QuenchedLength l0 = quenched_length(plus, {0, 0}, 0.25,
                                            QuenchedFamily::Boxes);
  CHECK(l0.value == 0);
  CHECK_FALSE(l0.infinite_within_window);

  const EvenConstraint minus = EvenConstraint::constant(8, -1);
  for (double lambda : {0.1, 0.5, 0.9}) {
    const QuenchedLength l = quenched_length(minus, {0, 0}, lambda,
                                             QuenchedFamily::Boxes);
    CHECK(l.infinite_within_window);
  }
}

namespace {

// plain re-enumeration of even-lattice rectangles through the anchor
int brute_quenched(const EvenConstraint& xi, const Site& i, double lambda,
                   bool& infinite) {
  const int r = xi.window.half_width / 2;
  int worst = -1;
  for (int u0 = -r; u0 <= i.x; ++u0)
    for (int u1 = i.x; u1 <= r; ++u1)
      for (int v0 = -r; v0 <= i.y; ++v0)
        for (int v1 = i.y; v1 <= r; ++v1) {
          long minus = 0;
          for (int u = u0; u <= u1; ++u)
            for (int v = v0; v <= v1; ++v)
              if (xi.at({2 * u, 2 * v}) < 0) ++minus;
          const long size = long(u1 - u0 + 1) * (v1 - v0 + 1);
          if (minus > lambda * size)
            worst = std::max(worst, std::max(u1 - u0, v1 - v0));
        }
  infinite = (worst >= 2 * r && r > 0);
  return std::max(worst, 0);
}

}  // namespace

TEST_CASE("quenched length equals brute-force enumeration") {
  CounterRng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    EvenConstraint xi = EvenConstraint::constant(8, +1);
    for (auto& [site, v] : xi.values)
      if (rng.next_u01() < 0.2) v = -1;
    const Site anchor{static_cast<int>(rng.next_below(5)) - 2,
                      static_cast<int>(rng.next_below(5)) - 2};
    const double lambda = 0.15 + 0.3 * rng.next_u01();
    const QuenchedLength got =
        quenched_length(xi, anchor, lambda, QuenchedFamily::Boxes);
    bool infinite = false;
    const int want = brute_quenched(xi, anchor, lambda, infinite);
    CHECK(got.value == want);
    CHECK(got.infinite_within_window == infinite);
  }
}

TEST_CASE("block fixture matches the oracle") {
  EvenConstraint xi = EvenConstraint::constant(10, +1);
  for (int u = -1; u <= 1; ++u)
    for (int v = -1; v <= 1; ++v) xi.values[{2 * u, 2 * v}] = -1;
  const QuenchedLength got = quenched_length(xi, {0, 0}, 0.3,
                                             QuenchedFamily::Boxes);
  bool infinite = false;
  const int want = brute_quenched(xi, {0, 0}, 0.3, infinite);
  CHECK(got.value == want);
  CHECK_FALSE(got.infinite_within_window);
}

TEST_CASE("quenched length monotonicity") {
  CounterRng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    EvenConstraint xi = EvenConstraint::constant(6, +1);
    for (auto& [site, v] : xi.values)
      if (rng.next_u01() < 0.25) v = -1;
    const QuenchedLength a = quenched_length(xi, {0, 0}, 0.2,
                                             QuenchedFamily::Boxes);
    const QuenchedLength b = quenched_length(xi, {0, 0}, 0.35,
                                             QuenchedFamily::Boxes);
    if (!a.infinite_within_window && !b.infinite_within_window)
      CHECK(b.value <= a.value);  // larger threshold, fewer violators

    EvenConstraint denser = xi;
    bool added = false;
    for (auto& [site, v] : denser.values)
      if (v > 0 && !added && rng.next_u01() < 0.5) {
        v = -1;
        added = true;
      }
    const QuenchedLength c = quenched_length(denser, {0, 0}, 0.2,
                                             QuenchedFamily::Boxes);
    if (!c.infinite_within_window && !a.infinite_within_window)
      CHECK(c.value >= a.value);
  }
}

TEST_CASE("quenched length over the path family") {
  const EvenConstraint plus = EvenConstraint::constant(6, +1);
  const QuenchedLength l = quenched_length(plus, {0, 0}, 0.25,
                                           QuenchedFamily::SawPaths, 6);
  CHECK(l.value == 0);
  const EvenConstraint minus = EvenConstraint::constant(6, -1);
  const QuenchedLength li = quenched_length(minus, {0, 0}, 0.5,
                                            QuenchedFamily::SawPaths, 6);
  CHECK(li.infinite_within_window);
}

TEST_CASE("path deficit statistics") {
  const SpinField plus = SpinField::constant(3, +1, BoundaryKind::Plus);
  CHECK(pld_statistic(plus, 1.0, PldMode::Walks, 20) == doctest::Approx(0.0));
  CHECK(pld_statistic(plus, 1.0, PldMode::SawUpTo, 8) == doctest::Approx(0.0));

  SpinField minus = SpinField::constant(3, +1, BoundaryKind::Plus);
  for (const Site& s : minus.box.sites()) minus.set(s, -1);
  CHECK(pld_statistic(minus, 1.0, PldMode::Walks, 20) == doctest::Approx(2.0));
  CHECK(pld_statistic(minus, 1.0, PldMode::SawUpTo, 8) == doctest::Approx(2.0));

  CHECK_THROWS(pld_statistic(plus, 1.0, PldMode::SawUpTo, kSawHardCap + 1));
  const SpinField free_bc = SpinField::constant(3, +1, BoundaryKind::Free);
  CHECK_THROWS(pld_statistic(free_bc, 1.0, PldMode::Walks, 10));
}

TEST_CASE("walk bound dominates the self-avoiding enumeration") {
  CounterRng rng(66);
  for (int trial = 0; trial < 8; ++trial) {
    SpinField f = SpinField::constant(3, +1, BoundaryKind::Plus);
    for (const Site& s : f.box.sites())
      f.set(s, rng.next_u01() < 0.4 ? -1 : +1);
    const double saw = pld_statistic(f, 1.0, PldMode::SawUpTo, 12);
    const double walks = pld_statistic(f, 1.0, PldMode::Walks, 12);
    CHECK(saw <= walks + 1e-12);
  }
}

TEST_CASE("census: all-plus constraint is fully benign") {
  // samples with scattered odd-site minuses; the even constraint stays +1
  CounterRng rng(13);
  std::vector<SpinField> samples;
  for (int k = 0; k < 20; ++k) {
    SpinField f = SpinField::constant(6, +1, BoundaryKind::Plus);
    for (const Site& s : f.box.sites())
      if (!is_even_site(s) && rng.next_u01() < 0.08) f.set(s, -1);
    samples.push_back(f);
  }
  const EvenConstraint xi = EvenConstraint::constant(6, +1);
  const CensusResult res = amoeba_census(samples, xi, 0.25, {0, 4, 8});
  long compatible = 0, benign = 0;
  for (const CensusBin& b : res.bins) {
    compatible += b.compatible;
    benign += b.benign;
  }
  CHECK(compatible > 0);
  CHECK(benign == compatible);
}

TEST_CASE("census: malignant fixture scores zero") {
  SpinField f = field_with_minus(5, {});
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) f.set({x, y}, -1);
  // 9 minus evens inside, |G| = 28: malignant at lambda = 0.25
  const CensusResult res = amoeba_census({f}, std::nullopt, 0.25, {0, 4, 8, 16});
  long compatible = 0, benign = 0;
  for (const CensusBin& b : res.bins) {
    compatible += b.compatible;
    benign += b.benign;
  }
  CHECK(compatible == 1);
  CHECK(benign == 0);
}

TEST_CASE("census benign fraction rises with beta") {
  auto collect = [&](double beta, std::uint64_t seed) {
    ChainConfig cfg;
    cfg.params = IsingParams{beta, 0.0};
    cfg.box_half_width = 10;
    cfg.seed = seed;
    cfg.burn_in = 500;
    cfg.thin = 40;
    cfg.sweeps = cfg.burn_in + cfg.thin * 60;
    std::vector<SpinField> out;
    run_chain_callback(cfg, [&](const SpinGrid& g, long) {
      out.push_back(g.to_field(BoundaryKind::Plus, {}));
    });
    return out;
  };
  auto fraction = [&](double beta, std::uint64_t seed) {
    const CensusResult res =
        amoeba_census(collect(beta, seed), std::nullopt, 0.25, {0});
    long compatible = 0, benign = 0;
    for (const CensusBin& b : res.bins) {
      compatible += b.compatible;
      benign += b.benign;
    }
    return compatible ? static_cast<double>(benign) / compatible : 1.0;
  };
  CHECK(fraction(2.0, 900) >= fraction(0.8, 901));
}
