#include "pathwise/path.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pathwise {

namespace {

constexpr double kNodeTolerance = 1e-9;

bool matches_node(double t, double node_time) {
  const double scale = std::max(1.0, std::abs(t));
  return std::abs(t - node_time) <= kNodeTolerance * scale;
}

}  // namespace

std::size_t TimeGrid::index_of(double t) const {
  if (nodes == 0 || dt <= 0.0) {
    throw std::invalid_argument("TimeGrid::index_of: empty or degenerate grid");
  }
  const double raw = (t - t0) / dt;
  const long long i = std::llround(raw);
  if (i < 0 || static_cast<std::size_t>(i) >= nodes || !matches_node(t, time(static_cast<std::size_t>(i)))) {
    throw std::invalid_argument("TimeGrid::index_of: time " + std::to_string(t) +
                                " is not a grid node of [" + std::to_string(t0) + ", " +
                                std::to_string(t_end()) + "] with dt=" + std::to_string(dt));
  }
  return static_cast<std::size_t>(i);
}

bool TimeGrid::contains(double t) const {
  if (nodes == 0 || dt <= 0.0) return false;
  const double raw = (t - t0) / dt;
  const long long i = std::llround(raw);
  return i >= 0 && static_cast<std::size_t>(i) < nodes && matches_node(t, time(static_cast<std::size_t>(i)));
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
  return a.t0 == b.t0 && a.dt == b.dt && a.nodes == b.nodes;
}

HilbertPath make_hilbert_path(const TimeGrid& grid, std::size_t modes) {
  HilbertPath p;
  p.grid = grid;
  p.modes = modes;
  p.data.assign(grid.nodes * modes, 0.0);
  return p;
}

ScalarPath mode_path(const HilbertPath& path, std::size_t mode) {
  if (mode >= path.modes) {
    throw std::invalid_argument("mode_path: mode index out of range");
  }
  ScalarPath out;
  out.grid = path.grid;
  out.values.resize(path.grid.nodes);
  for (std::size_t k = 0; k < path.grid.nodes; ++k) {
    out.values[k] = path.data[k * path.modes + mode];
  }
  return out;
}

HilbertPath as_hilbert(const ScalarPath& path) {
  HilbertPath out;
  out.grid = path.grid;
  out.modes = 1;
  out.data = path.values;
  return out;
}

IndexWindow resolve_window(const TimeGrid& grid, const Window& window) {
  const std::size_t first = grid.index_of(window.t1);
  const std::size_t last = grid.index_of(window.t2);
  if (last <= first) {
    throw std::invalid_argument("resolve_window: window [" + std::to_string(window.t1) + ", " +
                                std::to_string(window.t2) + "] has no cells");
  }
  return {first, last};
}

Window full_window(const TimeGrid& grid) {
  return {grid.t0, grid.t_end()};
}

namespace detail {

long long anchored_origin(const TimeGrid& grid) {
  if (grid.dt <= 0.0) return -1;
  const long long m = std::llround(-grid.t0 / grid.dt);
  if (m < 0) return -1;
  const double recon = -(static_cast<double>(m) * grid.dt);
  return recon == grid.t0 ? m : -1;
}

TimeGrid shift_grid(const TimeGrid& grid, std::size_t shift_node) {
  // New times are old times minus time(shift_node), so the new origin is
  // t0 - (t0 + shift_node*dt) = -(shift_node*dt) exactly: the relabelled grid
  // is anchored by construction and repeated shifts reproduce identical node
  // times (the offsets add as integers).
  TimeGrid out = grid;
  out.t0 = -(static_cast<double>(shift_node) * grid.dt);
  return out;
}

}  // namespace detail

}  // namespace pathwise
