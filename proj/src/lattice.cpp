#include "decigibbs/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace decigibbs {

std::array<Site, 4> neighbors(const Site& s) {
  return {Site{s.x - 1, s.y}, Site{s.x, s.y - 1}, Site{s.x, s.y + 1},
          Site{s.x + 1, s.y}};
}

std::vector<Site> Box::sites() const {
  std::vector<Site> out;
  out.reserve(size());
  for (int x = -half_width; x <= half_width; ++x)
    for (int y = -half_width; y <= half_width; ++y) out.push_back({x, y});
  return out;
}

std::vector<Site> Box::ring() const {
  std::vector<Site> out;
  const int n = half_width;
  for (int y = -n; y <= n; ++y) {
    out.push_back({-n - 1, y});
    out.push_back({n + 1, y});
  }
  for (int x = -n; x <= n; ++x) {
    out.push_back({x, -n - 1});
    out.push_back({x, n + 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Spin SpinField::completed_at(const Site& s) const {
  if (box.contains(s)) return at(s);
  switch (bc) {
    case BoundaryKind::Plus:
      return +1;
    case BoundaryKind::Minus:
      return -1;
    case BoundaryKind::Fixed: {
      auto it = ring_values.find(s);
      if (it != ring_values.end()) return it->second;
      return +1;  // beyond the ring the fixed field sits in a + sea
    }
    case BoundaryKind::Free:
      throw std::invalid_argument("no exterior spins under free boundary");
  }
  return +1;
}

SpinField SpinField::constant(int half_width, Spin v, BoundaryKind bc) {
  SpinField f;
  f.box = Box{half_width};
  f.values.assign(f.box.size(), v);
  f.bc = bc;
  return f;
}

// ---------------------------------------------------------------------------
// field text I/O

static BoundaryKind parse_bc(const std::string& s) {
  if (s == "+") return BoundaryKind::Plus;
  if (s == "-") return BoundaryKind::Minus;
  if (s == "free") return BoundaryKind::Free;
  if (s == "fixed") return BoundaryKind::Fixed;
  throw std::invalid_argument("bad boundary token: " + s);
}

static const char* bc_token(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Plus: return "+";
    case BoundaryKind::Minus: return "-";
    case BoundaryKind::Free: return "free";
    case BoundaryKind::Fixed: return "fixed";
  }
  return "?";
}

static Spin parse_spin_char(char c) {
  if (c == '+') return +1;
  if (c == '-') return -1;
  throw std::invalid_argument(std::string("bad spin character: ") + c);
}

SpinField read_field(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty field file");
  int n = -1;
  std::string bc_str;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
      if (tok.rfind("bc=", 0) == 0) bc_str = tok.substr(3);
    }
  }
  if (n < 0 || bc_str.empty())
    throw std::invalid_argument("field header must be 'n=<k> bc=<+|-|free|fixed>'");

  SpinField f;
  f.box = Box{n};
  f.bc = parse_bc(bc_str);
  f.values.assign(f.box.size(), +1);
  const int side = f.box.side();
  for (int row = 0; row < side; ++row) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("truncated field grid");
    if (static_cast<int>(line.size()) < side)
      throw std::invalid_argument("field row too short");
    const int y = n - row;
    for (int col = 0; col < side; ++col)
      f.set({col - n, y}, parse_spin_char(line[col]));
  }
  if (f.bc == BoundaryKind::Fixed) {
    // Four ring lines: N/S run x=-n..n, W/E run y=+n..-n.
    for (int k = 0; k < 4; ++k) {
      std::string line;
      if (!std::getline(in, line)) throw std::invalid_argument("missing ring line");
      std::istringstream ls(line);
      std::string tag, chars;
      ls >> tag >> chars;
      if (static_cast<int>(chars.size()) < side)
        throw std::invalid_argument("ring line too short");
      for (int t = 0; t < side; ++t) {
        Spin v = parse_spin_char(chars[t]);
        if (tag == "N") f.ring_values[{t - n, n + 1}] = v;
        else if (tag == "S") f.ring_values[{t - n, -n - 1}] = v;
        else if (tag == "W") f.ring_values[{-n - 1, n - t}] = v;
        else if (tag == "E") f.ring_values[{n + 1, n - t}] = v;
        else throw std::invalid_argument("bad ring tag: " + tag);
      }
    }
  }
  return f;
}

SpinField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  return read_field(in);
}

void write_field(std::ostream& out, const SpinField& f) {
  const int n = f.box.half_width;
  const int side = f.box.side();
  out << "n=" << n << " bc=" << bc_token(f.bc) << "\n";
  for (int y = n; y >= -n; --y) {
    for (int x = -n; x <= n; ++x) out << (f.at({x, y}) > 0 ? '+' : '-');
    out << "\n";
  }
  if (f.bc == BoundaryKind::Fixed) {
    auto ring_at = [&](const Site& s) {
      auto it = f.ring_values.find(s);
      return (it != f.ring_values.end() && it->second < 0) ? '-' : '+';
    };
    out << "N ";
    for (int x = -n; x <= n; ++x) out << ring_at({x, n + 1});
    out << "\nS ";
    for (int x = -n; x <= n; ++x) out << ring_at({x, -n - 1});
    out << "\nW ";
    for (int y = n; y >= -n; --y) out << ring_at({-n - 1, y});
    out << "\nE ";
    for (int y = n; y >= -n; --y) out << ring_at({n + 1, y});
    out << "\n";
  }
  (void)side;
}

void write_field_file(const std::string& path, const SpinField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output field file: " + path);
  write_field(out, f);
}

// ---------------------------------------------------------------------------
// contour extraction

namespace {

// Direction indices: 0=N, 1=E, 2=S, 3=W.
constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};

struct EdgeKey {
  // Undirected dual edge from p to p+(axis==0 ? E : N); p is the smaller end.
  DualPoint p;
  int axis;  // 0 horizontal, 1 vertical
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const {
    std::uint64_t v = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.p.x)) << 33) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.p.y)) << 1) ^
                      static_cast<std::uint64_t>(k.axis);
    return std::hash<std::uint64_t>{}(v);
  }
};

struct DirectedEdge {
  DualPoint tail;
  DualPoint head;
};

EdgeKey key_of(const DualPoint& a, const DualPoint& b) {
  const DualPoint p = (a < b) ? a : b;
  return EdgeKey{p, (a.y == b.y) ? 0 : 1};
}

}  // namespace

int Contour::diameter() const {
  if (points.empty()) return 0;
  int xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
  for (const auto& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::max(xmax - xmin, ymax - ymin);
}

bool Contour::encloses(const Site& s) const {
  return std::binary_search(interior.begin(), interior.end(), s);
}

// Signed ray casting: a site is enclosed iff the loop's winding number
// around it is nonzero. Loops may touch themselves at dual vertices, where
// tangential lobes can nest; the signed count classifies those pockets the
// same way reachability does, unlike crossing parity.
static std::vector<Site> interior_by_raycast(const std::vector<DualPoint>& pts) {
  if (pts.empty()) return {};
  int xmin = pts[0].x, xmax = xmin, ymin = pts[0].y, ymax = ymin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  // Vertical dual edges with direction. Edge (a,b)->(a,b+1) crosses lattice
  // row y=b+1 at x=a+1/2 heading north (+1); the reverse heads south (-1).
  struct Crossing {
    int row;
    int a;
    int sign;
  };
  std::vector<Crossing> vert;
  const int k = static_cast<int>(pts.size());
  for (int t = 0; t < k; ++t) {
    const DualPoint& a = pts[t];
    const DualPoint& b = pts[(t + 1) % k];
    if (a.x == b.x)
      vert.push_back({std::min(a.y, b.y) + 1, a.x, b.y > a.y ? +1 : -1});
  }
  std::vector<Site> out;
  for (int x = xmin; x <= xmax + 1; ++x) {
    for (int y = ymin; y <= ymax + 1; ++y) {
      int winding = 0;
      for (const Crossing& c : vert)
        if (c.row == y && c.a >= x) winding += c.sign;
      if (winding != 0) out.push_back({x, y});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> contour_interior_floodfill(const Contour& c) {
  if (c.points.empty()) return {};
  int xmin = c.points[0].x, xmax = xmin, ymin = c.points[0].y, ymax = ymin;
  for (const auto& p : c.points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  // Lattice sites possibly enclosed live in [xmin, xmax+1] x [ymin, ymax+1].
  const int x0 = xmin - 1, x1 = xmax + 2, y0 = ymin - 1, y1 = ymax + 2;
  const int w = x1 - x0 + 1, h = y1 - y0 + 1;
  std::unordered_set<EdgeKey, EdgeKeyHash> walls;
  const int k = static_cast<int>(c.points.size());
  for (int t = 0; t < k; ++t)
    walls.insert(key_of(c.points[t], c.points[(t + 1) % k]));
  // A step between n.n. sites a->b is blocked iff the separating dual edge
  // is part of the loop.
  auto blocked = [&](const Site& a, const Site& b) {
    DualPoint p, q;
    if (a.y == b.y) {  // horizontal step, vertical dual edge between them
      const int xm = std::max(a.x, b.x);
      p = {xm - 1, a.y - 1};
      q = {xm - 1, a.y};
    } else {  // vertical step, horizontal dual edge
      const int ym = std::max(a.y, b.y);
      p = {a.x - 1, ym - 1};
      q = {a.x, ym - 1};
    }
    return walls.count(key_of(p, q)) > 0;
  };
  std::vector<char> outside(static_cast<std::size_t>(w) * h, 0);
  auto idx = [&](const Site& s) { return (s.x - x0) * h + (s.y - y0); };
  std::vector<Site> stack{{x0, y0}};
  outside[idx({x0, y0})] = 1;
  while (!stack.empty()) {
    Site s = stack.back();
    stack.pop_back();
    for (const Site& t : neighbors(s)) {
      if (t.x < x0 || t.x > x1 || t.y < y0 || t.y > y1) continue;
      if (outside[idx(t)]) continue;
      if (blocked(s, t)) continue;
      outside[idx(t)] = 1;
      stack.push_back(t);
    }
  }
  std::vector<Site> in;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y)
      if (!outside[(x - x0) * h + (y - y0)]) in.push_back({x, y});
  std::sort(in.begin(), in.end());
  return in;
}

std::vector<Contour> extract_contours(const SpinField& field) {
  if (field.bc == BoundaryKind::Free)
    throw std::invalid_argument("contours undefined without exterior spins");

  const int n = field.box.half_width;
  auto spin = [&](const Site& s) { return field.completed_at(s); };

  // 4-connected phase-cluster labels on [-n-2, n+2]^2; everything farther
  // out is the constant sea and shares the label of that region's phase.
  const int lo = -n - 2, hi = n + 2, w = hi - lo + 1;
  std::vector<int> label(static_cast<std::size_t>(w) * w, -1);
  auto lab_idx = [&](const Site& s) { return (s.x - lo) * w + (s.y - lo); };
  {
    int next = 0;
    std::vector<Site> stack;
    for (int x = lo; x <= hi; ++x)
      for (int y = lo; y <= hi; ++y) {
        const Site seed{x, y};
        if (label[lab_idx(seed)] >= 0) continue;
        const Spin phase = spin(seed);
        const int id = next++;
        label[lab_idx(seed)] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
          const Site s = stack.back();
          stack.pop_back();
          for (const Site& t : neighbors(s)) {
            if (t.x < lo || t.x > hi || t.y < lo || t.y > hi) continue;
            if (label[lab_idx(t)] >= 0 || spin(t) != phase) continue;
            label[lab_idx(t)] = id;
            stack.push_back(t);
          }
        }
      }
  }
  auto same_cluster = [&](const Site& a, const Site& b) {
    return label[lab_idx(a)] == label[lab_idx(b)];
  };

  // Canonically directed unequal-bond dual edges (-1 phase on the left).
  std::unordered_map<EdgeKey, DirectedEdge, EdgeKeyHash> edges;
  std::vector<EdgeKey> order;  // deterministic trace order
  for (int x = -n - 2; x <= n + 1; ++x) {
    for (int y = -n - 2; y <= n + 1; ++y) {
      // horizontal lattice bond (x,y)-(x+1,y): vertical dual edge
      if (spin({x, y}) != spin({x + 1, y})) {
        DualPoint lo{x, y - 1}, hi{x, y};
        DirectedEdge e = (spin({x, y}) < 0) ? DirectedEdge{lo, hi}   // north: -1 west
                                            : DirectedEdge{hi, lo};  // south
        EdgeKey k{lo, 1};
        edges.emplace(k, e);
        order.push_back(k);
      }
      // vertical lattice bond (x,y)-(x,y+1): horizontal dual edge
      if (spin({x, y}) != spin({x, y + 1})) {
        DualPoint lo{x - 1, y}, hi{x, y};
        DirectedEdge e = (spin({x, y + 1}) < 0) ? DirectedEdge{lo, hi}   // east: -1 north
                                                : DirectedEdge{hi, lo};  // west
        EdgeKey k{lo, 0};
        edges.emplace(k, e);
        order.push_back(k);
      }
    }
  }

  auto edge_at = [&](const DualPoint& v, int side) -> const DirectedEdge* {
    DualPoint other{v.x + kDx[side], v.y + kDy[side]};
    auto it = edges.find(key_of(v, other));
    return it == edges.end() ? nullptr : &it->second;
  };

  // Successor of a directed edge arriving at v.
  auto successor = [&](const DirectedEdge& e) -> DirectedEdge {
    const DualPoint v = e.head;
    int degree = 0;
    for (int s = 0; s < 4; ++s)
      if (edge_at(v, s)) ++degree;
    int in_side;  // side of v occupied by the incoming edge
    if (e.tail.x < v.x) in_side = 3;
    else if (e.tail.x > v.x) in_side = 1;
    else if (e.tail.y < v.y) in_side = 2;
    else in_side = 0;

    int out_side = -1;
    if (degree == 2) {
      for (int s = 0; s < 4; ++s)
        if (s != in_side && edge_at(v, s)) out_side = s;
    } else {
      // 4-degree vertex: checkerboard plaquette around v. Every loop is a
      // boundary component of a 4-connected minus cluster: wrap the two
      // minus corners separately when they belong to different clusters,
      // otherwise wrap the plus corners so the cluster's outer boundary
      // stays apart from its hole boundaries. Loops stay vertex-simple and
      // keep the -1 phase on the left in the canonical direction.
      const Site sw{v.x, v.y}, se{v.x + 1, v.y}, nw{v.x, v.y + 1},
          ne{v.x + 1, v.y + 1};
      const bool sw_minus = spin(sw) < 0;
      const bool minus_connected =
          sw_minus ? same_cluster(sw, ne) : same_cluster(se, nw);
      const bool hug_sw_ne = (minus_connected != sw_minus);
      if (hug_sw_ne) {
        // pairs (S,W) and (N,E)
        switch (in_side) {
          case 2: out_side = 3; break;
          case 3: out_side = 2; break;
          case 0: out_side = 1; break;
          default: out_side = 0; break;
        }
      } else {
        // pairs (S,E) and (N,W)
        switch (in_side) {
          case 2: out_side = 1; break;
          case 1: out_side = 2; break;
          case 0: out_side = 3; break;
          default: out_side = 0; break;
        }
      }
    }
    const DirectedEdge* next = edge_at(v, out_side);
    assert(next && next->tail == v && "contour orientation must chain");
    return *next;
  };

  std::unordered_set<EdgeKey, EdgeKeyHash> visited;
  std::vector<Contour> out;
  for (const EdgeKey& k0 : order) {
    if (visited.count(k0)) continue;
    DirectedEdge start = edges.at(k0);
    Contour c;
    DirectedEdge cur = start;
    do {
      visited.insert(key_of(cur.tail, cur.head));
      c.points.push_back(cur.tail);
      cur = successor(cur);
    } while (!(cur.tail == start.tail && cur.head == start.head));

    // Canonical cyclic representative (over rotations and both traversal
    // directions), so equal loops compare equal whichever phase was traced.
    const int k = static_cast<int>(c.points.size());
    std::vector<DualPoint> best = c.points;
    for (int dir = 0; dir < 2; ++dir) {
      for (int r = 0; r < k; ++r) {
        std::vector<DualPoint> cand(k);
        for (int t = 0; t < k; ++t) cand[t] = c.points[(r + t) % k];
        if (cand < best) best = cand;
      }
      std::reverse(c.points.begin(), c.points.end());
    }
    c.points = std::move(best);
    c.interior = interior_by_raycast(c.points);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
    return a.points < b.points;
  });
  return out;
}

// ---------------------------------------------------------------------------
// telescoping sets

TelescopeSet telescope_set(const Site& i, int m) {
  if (m < 0) throw std::invalid_argument("telescope radius must be >= 0");
  TelescopeSet t;
  t.anchor = i;
  t.radius = m;
  for (int dx = -m; dx <= 0; ++dx) {
    const int span = m - std::abs(dx);
    const int dy_hi = (dx == 0) ? 0 : span;
    for (int dy = -span; dy <= dy_hi; ++dy) {
      Site k{i.x + dx, i.y + dy};
      t.members.push_back(k);
      if (l1_dist(k, i) == m) t.annulus.push_back(k);
    }
  }
  std::sort(t.members.begin(), t.members.end());
  std::sort(t.annulus.begin(), t.annulus.end());
  return t;
}

std::pair<Site, int> telescope_index(const std::vector<Site>& set) {
  if (set.empty()) throw std::invalid_argument("telescope index of empty set");
  Site i = set[0];
  for (const Site& s : set) i = std::max(i, s);
  int m = 0;
  for (const Site& s : set) m = std::max(m, l1_dist(s, i));
  return {i, m};
}

// ---------------------------------------------------------------------------
// self-avoiding paths

static void saw_dfs(const Box& box, int max_len, std::vector<Site>& path,
                    SiteSet& seen, std::vector<std::vector<Site>>& out) {
  if (static_cast<int>(path.size()) - 1 >= max_len) return;
  for (const Site& nxt : neighbors(path.back())) {
    if (!box.contains(nxt) || seen.count(nxt)) continue;
    path.push_back(nxt);
    seen.insert(nxt);
    out.push_back(path);
    saw_dfs(box, max_len, path, seen, out);
    seen.erase(nxt);
    path.pop_back();
  }
}

std::vector<std::vector<Site>> enumerate_saw(const Site& from, const Box& box,
                                             int max_len) {
  if (!box.contains(from))
    throw std::invalid_argument("path start must lie in the box");
  if (max_len > kSawHardCap)
    throw std::invalid_argument("path enumeration budget exceeded");
  std::vector<std::vector<Site>> out;
  std::vector<Site> path{from};
  SiteSet seen{from};
  saw_dfs(box, max_len, path, seen, out);
  return out;
}

}  // namespace decigibbs
