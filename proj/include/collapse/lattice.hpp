#pragma once

// Periodic 1+1 null (diamond) lattice and its spacelike surfaces.
//
// Slot layout. A surface cuts 2N links, held in 2N register slots. Slot 2c
// holds the left-going link and slot 2c+1 the right-going link associated
// with vertex column c on the flat initial surface. Vertex (r, c) takes its
// ingoing links from slots
//
//     (2c, 2c+1)            r even
//     (2c+1, 2c+2 mod 2N)   r odd
//
// and writes its outgoing links back into the same two slots: the left
// ingoing slot (a right-going link) becomes the left outgoing slot (a
// left-going link), and likewise on the right. Slots therefore always refer
// to links stacked vertically above each other; a motion never permutes them.
//
// The flat surface is treated as the output of a virtual row 0 (even), so
// row-1 vertex (1, c) has parents (0, c) and (0, c+1).

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatticeGeometry {
  int n_sites = 2;
  int n_rows = 1;

  /// Validated constructor: n_sites >= 2, n_rows >= 1.
  static LatticeGeometry make(int n_sites, int n_rows);

  int n_slots() const { return 2 * n_sites; }
  long long n_vertices() const { return static_cast<long long>(n_sites) * n_rows; }

  bool operator==(const LatticeGeometry&) const = default;
};

struct VertexId {
  int row = 0;  // >= 1 for real vertices; 0 labels the virtual initial row
  int col = 0;

  auto operator<=>(const VertexId&) const = default;
};

std::string to_string(VertexId v);

enum class LinkDirection : std::uint8_t { Left, Right };

struct SlotDescriptor {
  LinkDirection direction = LinkDirection::Left;
  VertexId source;  // vertex the link exits

  bool operator==(const SlotDescriptor&) const = default;
};

/// Register slots of a vertex; a is the left link (ingoing or outgoing).
struct SlotPair {
  int a = 0;
  int b = 0;

  bool operator==(const SlotPair&) const = default;
};

/// Slot pair for vertex v under the fixed layout; depends on v alone.
SlotPair vertex_slots(VertexId v, int n_sites);

/// The two causal parents (left, right) of v; row 0 parents for row 1.
std::array<VertexId, 2> causal_parents(VertexId v, int n_sites);

/// True if u is in the causal past of v (strictly), periodic in space.
bool causally_precedes(VertexId u, VertexId v, int n_sites);

class Surface {
 public:
  const LatticeGeometry& geometry() const { return geometry_; }
  std::span<const int> heights() const { return heights_; }
  std::span<const SlotDescriptor> slots() const { return slots_; }
  int n_slots() const { return static_cast<int>(slots_.size()); }

  /// Every column has reached n_rows.
  bool complete() const;

  bool operator==(const Surface&) const = default;

 private:
  friend Surface flat_surface(const LatticeGeometry& geometry);
  friend void apply_motion_in_place(Surface& surface, VertexId v);

  LatticeGeometry geometry_;
  std::vector<int> heights_;
  std::vector<SlotDescriptor> slots_;
};

Surface flat_surface(const LatticeGeometry& geometry);

bool is_eligible(const Surface& surface, VertexId v);

/// Vertices whose two ingoing links are both cut by the surface, by column.
std::vector<VertexId> eligible_vertices(const Surface& surface);

/// Throws LatticeError if v is not eligible.
Surface apply_motion(const Surface& surface, VertexId v);
void apply_motion_in_place(Surface& surface, VertexId v);

/// Throws LatticeError if v is not eligible.
SlotPair ingoing_slots(VertexId v, const Surface& surface);

/// A set of vertices (rows >= 1) that contains its own past.
bool is_stem(std::span<const VertexId> vertices, int n_sites);

/// An ordering in which every vertex's causal past appears earlier, and
/// whose vertex set is a stem.
bool is_natural_labelling(std::span<const VertexId> labelling, int n_sites);

/// All natural labellings of a stem. Exponential; intended for small stems.
std::vector<std::vector<VertexId>> linear_extensions(std::span<const VertexId> stem, int n_sites);

/// Every stem inside the first `max_row` rows with at most `max_size`
/// vertices (including the empty stem), each sorted by (row, col).
std::vector<std::vector<VertexId>> enumerate_stems(int n_sites, int max_row, int max_size);

/// Row-by-row, left-to-right labelling of the first n_rows rows.
std::vector<VertexId> sweep_labelling(const LatticeGeometry& geometry);

}  // namespace collapse
