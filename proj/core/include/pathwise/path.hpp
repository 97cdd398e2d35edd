#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pathwise {

// Uniform time grid; node i sits at t0 + i*dt.  All sampled paths, operator
// paths and solver iterates in this library live on such grids, and window
// endpoints handed to any routine must coincide with grid nodes.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t nodes = 0;  // node count (cells + 1)

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_end() const { return nodes == 0 ? t0 : time(nodes - 1); }
  std::size_t cells() const { return nodes == 0 ? 0 : nodes - 1; }

  // Maps a time to its node index; throws std::invalid_argument if t does not
  // match a node to within 1e-9 (absolute, scaled by max(1,|t|)).
  std::size_t index_of(double t) const;
  bool contains(double t) const;
};

// Exact layout equality (t0, dt, nodes compare as doubles/integers).
bool same_grid(const TimeGrid& a, const TimeGrid& b);

// Scalar path omega: one real value per grid node.
struct ScalarPath {
  TimeGrid grid;
  std::vector<double> values;

  double value_at(double t) const { return values[grid.index_of(t)]; }
};

// Vector-valued path: `modes` coefficients per node, stored row-major
// (node-major), coefficient i of node k at data[k*modes + i].
struct HilbertPath {
  TimeGrid grid;
  std::size_t modes = 0;
  std::vector<double> data;

  std::span<const double> node(std::size_t k) const {
    return {data.data() + k * modes, modes};
  }
  std::span<double> node(std::size_t k) {
    return {data.data() + k * modes, modes};
  }
};

HilbertPath make_hilbert_path(const TimeGrid& grid, std::size_t modes);

// Extracts one coefficient as a scalar path (same grid).
ScalarPath mode_path(const HilbertPath& path, std::size_t mode);

// Promotes a scalar path to a 1-mode vector path.
HilbertPath as_hilbert(const ScalarPath& path);

// Closed time window [t1, t2]; resolves against a grid to a node index range.
struct Window {
  double t1 = 0.0;
  double t2 = 0.0;
};

struct IndexWindow {
  std::size_t first = 0;  // node index of t1
  std::size_t last = 0;   // node index of t2 (inclusive)

  std::size_t node_count() const { return last - first + 1; }
  std::size_t cell_count() const { return last - first; }
};

// Throws std::invalid_argument if either endpoint is off-grid or the window is
// empty (needs t1 < t2, i.e. at least one cell).
IndexWindow resolve_window(const TimeGrid& grid, const Window& window);

// Whole-path window helper.
Window full_window(const TimeGrid& grid);

namespace detail {

// If t0 == -(m*dt) bitwise for some integer m >= 0, returns m; else -1.
// Grids produced by the samplers are anchored this way so that repeated
// relabelling (Wiener shift) reproduces identical node times.
long long anchored_origin(const TimeGrid& grid);

// Grid relabelled so that old node `shift_node` becomes time 0's neighbour
// offset, i.e. new times are old times minus time(shift_node).
TimeGrid shift_grid(const TimeGrid& grid, std::size_t shift_node);

}  // namespace detail

}  // namespace pathwise
