#include "collapse/lattice.hpp"

#include <algorithm>
#include <set>

namespace collapse {

namespace {

int wrap(int c, int n) { return ((c % n) + n) % n; }

// Doubled spatial coordinate of a vertex; parents sit at x - 2 and x + 2.
int position(VertexId v) { return 4 * v.col + ((v.row % 2 == 0) ? 1 : 3); }

}  // namespace

LatticeGeometry LatticeGeometry::make(int n_sites, int n_rows) {
  if (n_sites < 2) {
    throw LatticeError("n_sites must be at least 2, got " + std::to_string(n_sites));
  }
  if (n_rows < 1) {
    throw LatticeError("n_rows must be at least 1, got " + std::to_string(n_rows));
  }
  return LatticeGeometry{n_sites, n_rows};
}

std::string to_string(VertexId v) {
  return "(" + std::to_string(v.row) + "," + std::to_string(v.col) + ")";
}

SlotPair vertex_slots(VertexId v, int n_sites) {
  const int n_slots = 2 * n_sites;
  if (v.row % 2 == 0) {
    return {2 * v.col, 2 * v.col + 1};
  }
  return {2 * v.col + 1, (2 * v.col + 2) % n_slots};
}

std::array<VertexId, 2> causal_parents(VertexId v, int n_sites) {
  const int r = v.row - 1;
  if (v.row % 2 == 1) {
    return {VertexId{r, v.col}, VertexId{r, wrap(v.col + 1, n_sites)}};
  }
  return {VertexId{r, wrap(v.col - 1, n_sites)}, VertexId{r, v.col}};
}

bool causally_precedes(VertexId u, VertexId v, int n_sites) {
  const int dr = v.row - u.row;
  if (dr <= 0) return false;
  const int period = 4 * n_sites;
  int dx = wrap(position(v) - position(u), period);
  dx = std::min(dx, period - dx);
  return dx <= 2 * dr;
}

bool Surface::complete() const {
  return std::all_of(heights_.begin(), heights_.end(),
                     [&](int h) { return h >= geometry_.n_rows; });
}

Surface flat_surface(const LatticeGeometry& geometry) {
  Surface s;
  s.geometry_ = geometry;
  s.heights_.assign(geometry.n_sites, 0);
  s.slots_.resize(geometry.n_slots());
  for (int k = 0; k < geometry.n_slots(); ++k) {
    s.slots_[k].direction = (k % 2 == 0) ? LinkDirection::Left : LinkDirection::Right;
    s.slots_[k].source = VertexId{0, k / 2};
  }
  return s;
}

bool is_eligible(const Surface& surface, VertexId v) {
  const auto& g = surface.geometry();
  if (v.row < 1 || v.row > g.n_rows || v.col < 0 || v.col >= g.n_sites) return false;
  if (surface.heights()[v.col] != v.row - 1) return false;
  const SlotPair slots = vertex_slots(v, g.n_sites);
  const auto parents = causal_parents(v, g.n_sites);
  const SlotDescriptor& left = surface.slots()[slots.a];
  const SlotDescriptor& right = surface.slots()[slots.b];
  return left.source == parents[0] && left.direction == LinkDirection::Right &&
         right.source == parents[1] && right.direction == LinkDirection::Left;
}

std::vector<VertexId> eligible_vertices(const Surface& surface) {
  std::vector<VertexId> out;
  const auto& g = surface.geometry();
  for (int c = 0; c < g.n_sites; ++c) {
    const VertexId v{surface.heights()[c] + 1, c};
    if (is_eligible(surface, v)) out.push_back(v);
  }
  return out;
}

void apply_motion_in_place(Surface& surface, VertexId v) {
  if (!is_eligible(surface, v)) {
    throw LatticeError("vertex " + to_string(v) + " is not eligible for an elementary motion");
  }
  const SlotPair slots = vertex_slots(v, surface.geometry_.n_sites);
  surface.slots_[slots.a] = SlotDescriptor{LinkDirection::Left, v};
  surface.slots_[slots.b] = SlotDescriptor{LinkDirection::Right, v};
  surface.heights_[v.col] = v.row;
}

Surface apply_motion(const Surface& surface, VertexId v) {
  Surface next = surface;
  apply_motion_in_place(next, v);
  return next;
}

SlotPair ingoing_slots(VertexId v, const Surface& surface) {
  if (!is_eligible(surface, v)) {
    throw LatticeError("vertex " + to_string(v) + " is not eligible; ingoing slots undefined");
  }
  return vertex_slots(v, surface.geometry().n_sites);
}

bool is_stem(std::span<const VertexId> vertices, int n_sites) {
  const std::set<VertexId> members(vertices.begin(), vertices.end());
  if (members.size() != vertices.size()) return false;
  for (const VertexId& v : members) {
    if (v.row < 1 || v.col < 0 || v.col >= n_sites) return false;
    if (v.row == 1) continue;
    for (const VertexId& p : causal_parents(v, n_sites)) {
      if (!members.contains(p)) return false;
    }
  }
  return true;
}

bool is_natural_labelling(std::span<const VertexId> labelling, int n_sites) {
  if (!is_stem(labelling, n_sites)) return false;
  std::set<VertexId> seen;
  for (const VertexId& v : labelling) {
    if (v.row > 1) {
      for (const VertexId& p : causal_parents(v, n_sites)) {
        if (!seen.contains(p)) return false;
      }
    }
    seen.insert(v);
  }
  return true;
}

namespace {

void extend(std::vector<VertexId>& prefix, std::vector<bool>& used,
            std::span<const VertexId> stem, const std::set<VertexId>& members, int n_sites,
            std::vector<std::vector<VertexId>>& out) {
  if (prefix.size() == stem.size()) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t i = 0; i < stem.size(); ++i) {
    if (used[i]) continue;
    const VertexId v = stem[i];
    bool ready = true;
    if (v.row > 1) {
      for (const VertexId& p : causal_parents(v, n_sites)) {
        if (members.contains(p) &&
            std::find(prefix.begin(), prefix.end(), p) == prefix.end()) {
          ready = false;
        }
      }
    }
    if (!ready) continue;
    used[i] = true;
    prefix.push_back(v);
    extend(prefix, used, stem, members, n_sites, out);
    prefix.pop_back();
    used[i] = false;
  }
}

}  // namespace

std::vector<std::vector<VertexId>> linear_extensions(std::span<const VertexId> stem, int n_sites) {
  if (!is_stem(stem, n_sites)) {
    throw LatticeError("linear_extensions: vertex set is not a stem");
  }
  std::vector<VertexId> sorted(stem.begin(), stem.end());
  std::sort(sorted.begin(), sorted.end());
  const std::set<VertexId> members(sorted.begin(), sorted.end());
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> prefix;
  std::vector<bool> used(sorted.size(), false);
  extend(prefix, used, sorted, members, n_sites, out);
  return out;
}

std::vector<std::vector<VertexId>> enumerate_stems(int n_sites, int max_row, int max_size) {
  std::set<std::vector<VertexId>> found{{}};
  std::vector<std::vector<VertexId>> frontier{{}};
  while (!frontier.empty()) {
    std::vector<std::vector<VertexId>> next;
    for (const auto& stem : frontier) {
      if (static_cast<int>(stem.size()) >= max_size) continue;
      const std::set<VertexId> members(stem.begin(), stem.end());
      for (int r = 1; r <= max_row; ++r) {
        for (int c = 0; c < n_sites; ++c) {
          const VertexId v{r, c};
          if (members.contains(v)) continue;
          if (r > 1) {
            const auto parents = causal_parents(v, n_sites);
            if (!members.contains(parents[0]) || !members.contains(parents[1])) continue;
          }
          auto grown = stem;
          grown.push_back(v);
          std::sort(grown.begin(), grown.end());
          if (found.insert(grown).second) next.push_back(std::move(grown));
        }
      }
    }
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

std::vector<VertexId> sweep_labelling(const LatticeGeometry& geometry) {
  std::vector<VertexId> out;
  out.reserve(static_cast<std::size_t>(geometry.n_vertices()));
  for (int r = 1; r <= geometry.n_rows; ++r) {
    for (int c = 0; c < geometry.n_sites; ++c) out.push_back({r, c});
  }
  return out;
}

}  // namespace collapse
