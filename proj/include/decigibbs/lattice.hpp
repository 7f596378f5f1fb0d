#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace decigibbs {

using Spin = std::int8_t;  // -1 or +1

struct Site {
  int x = 0;
  int y = 0;

  friend bool operator==(const Site&, const Site&) = default;
  // Lexicographic order: first coordinate, then second.
  friend auto operator<=>(const Site& a, const Site& b) {
    if (a.x != b.x) return a.x <=> b.x;
    return a.y <=> b.y;
  }
  Site operator+(const Site& o) const { return {x + o.x, y + o.y}; }
  Site operator-(const Site& o) const { return {x - o.x, y - o.y}; }
};

inline int l1_norm(const Site& s) { return std::abs(s.x) + std::abs(s.y); }
inline int l1_dist(const Site& a, const Site& b) { return l1_norm(a - b); }
inline bool is_even_site(const Site& s) { return s.x % 2 == 0 && s.y % 2 == 0; }

struct SiteHash {
  std::size_t operator()(const Site& s) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
        static_cast<std::uint32_t>(s.y));
  }
};

using SiteSet = std::unordered_set<Site, SiteHash>;

// The 4 nearest neighbors, in lexicographic order.
std::array<Site, 4> neighbors(const Site& s);

// Centered square [-n,n]^2.
struct Box {
  int half_width = 0;

  int side() const { return 2 * half_width + 1; }
  std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }
  bool contains(const Site& s) const {
    return std::abs(s.x) <= half_width && std::abs(s.y) <= half_width;
  }
  // Sites in lexicographic order.
  std::vector<Site> sites() const;
  // Exterior sites at L1 distance 1 from the box (no corners).
  std::vector<Site> ring() const;
  // Lexicographic index of a contained site.
  int index(const Site& s) const {
    return (s.x + half_width) * side() + (s.y + half_width);
  }
};

enum class BoundaryKind { Plus, Minus, Free, Fixed };

// +/-1 configuration on a centered box with a boundary descriptor.
// Immutable by convention once built.
struct SpinField {
  Box box;
  std::vector<Spin> values;  // indexed by Box::index
  BoundaryKind bc = BoundaryKind::Plus;
  std::unordered_map<Site, Spin, SiteHash> ring_values;  // Fixed only

  Spin at(const Site& s) const { return values[box.index(s)]; }
  void set(const Site& s, Spin v) { values[box.index(s)] = v; }

  // Value of the configuration completed beyond the box: ring values come
  // from the boundary descriptor, everything farther out is the constant
  // phase (+ for Plus/Fixed, - for Minus). Throws for Free.
  Spin completed_at(const Site& s) const;

  static SpinField constant(int half_width, Spin v, BoundaryKind bc);
};

// Text format: "n=<half_width> bc=<+|-|free|fixed>", then side() rows of
// +/- characters, top row is y=+n. Fixed boundary appends four ring lines
// "N ...", "S ...", "W ...", "E ..." (W/E run from y=+n down to y=-n).
SpinField read_field(std::istream& in);
SpinField read_field_file(const std::string& path);
void write_field(std::ostream& out, const SpinField& f);
void write_field_file(const std::string& path, const SpinField& f);

// Point (x+1/2, y+1/2) of the dual lattice.
struct DualPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const DualPoint&, const DualPoint&) = default;
  friend auto operator<=>(const DualPoint&, const DualPoint&) = default;
};

// Closed loop of dual points; consecutive points at L1 distance 1.
struct Contour {
  std::vector<DualPoint> points;
  std::vector<Site> interior;  // enclosed lattice sites, lex order

  int length() const { return static_cast<int>(points.size()); }
  // max-norm spread of the dual points
  int diameter() const;
  bool encloses(const Site& s) const;
};

// All phase-separating dual loops of the completed configuration.
// Corner rule at a 4-degree dual vertex: split so that each loop hugs the
// two diagonal -1 sites of the checkerboard plaquette, which keeps the -1
// phase on the left when loops are traversed in their canonical direction.
// Requires Plus, Minus or Fixed boundary.
std::vector<Contour> extract_contours(const SpinField& field);

// Interior by flood fill from outside the bounding box; test oracle for the
// ray-casting interior used by extract_contours.
std::vector<Site> contour_interior_floodfill(const Contour& c);

// L_{i,m}: sites k <= i (lexicographically, k=i allowed) with |k-i|_1 <= m.
struct TelescopeSet {
  Site anchor;
  int radius = 0;
  std::vector<Site> members;  // lex order
  std::vector<Site> annulus;  // members at L1 distance exactly radius, lex order

  int annulus_size() const { return static_cast<int>(annulus.size()); }
};

TelescopeSet telescope_set(const Site& i, int m);

// The unique (i, m) with A containing i, A inside L_{i,m} but not L_{i,m-1}:
// i is the lex maximum of A and m the largest L1 distance to it.
std::pair<Site, int> telescope_index(const std::vector<Site>& set);

// Self-avoiding paths from `from`, staying in `box`, of 1..max_len steps.
// Each path is the visited site sequence including the start.
constexpr int kSawHardCap = 16;
std::vector<std::vector<Site>> enumerate_saw(const Site& from, const Box& box,
                                             int max_len);

}  // namespace decigibbs
