#include "ufep/aggregation.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace ufep {

AggregateMap::AggregateMap(std::vector<std::size_t> root, std::vector<int> distance, int sweeps)
    : root_(std::move(root)), distance_(std::move(distance)), sweeps_(sweeps) {}

std::vector<std::size_t> AggregateMap::members_of(std::size_t root) const {
  std::vector<std::size_t> out{root};
  for (std::size_t i = 0; i < root_.size(); ++i)
    if (root_[i] == root && i != root) out.push_back(i);
  return out;
}

std::size_t AggregateMap::max_aggregate_size() const {
  std::vector<std::size_t> count(root_.size(), 0);
  for (auto r : root_)
    if (r != npos) ++count[r];
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

AggregateMap build_aggregates(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes) {
  const std::size_t n = mesh.size();
  if (classes.size() != n) throw GeometryError("build_aggregates: class vector does not match mesh");

  std::vector<std::size_t> root(n, AggregateMap::npos);
  std::vector<int> dist(n, -1);
  std::size_t pending = 0;
  bool any_interior = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (classes[i] == CellClass::interior) {
      root[i] = i;
      dist[i] = 0;
      any_interior = true;
    } else if (classes[i] == CellClass::cut) {
      ++pending;
    }
  }
  if (pending > 0 && !any_interior) throw GeometryError("build_aggregates: no interior cell to serve as root");

  const auto& leaves = mesh.leaves();
  int sweep = 0;
  while (pending > 0) {
    ++sweep;
    std::vector<std::pair<std::size_t, std::size_t>> attach;
    for (std::size_t i = 0; i < n; ++i) {
      if (classes[i] != CellClass::cut || root[i] != AggregateMap::npos) continue;
      std::optional<std::size_t> best;
      for (Side s : kSides) {
        for (const auto& nb : mesh.face_neighbors(leaves[i], s)) {
          const std::size_t j = mesh.checked_index(nb);
          if (dist[j] < 0 || dist[j] >= sweep) continue;
          if (!best || leaves[j] < leaves[*best]) best = j;
        }
      }
      if (best) attach.emplace_back(i, root[*best]);
    }
    if (attach.empty()) {
      std::ostringstream msg;
      msg << "build_aggregates: cut cells without a face path to an interior cell:";
      for (std::size_t i = 0; i < n; ++i)
        if (classes[i] == CellClass::cut && root[i] == AggregateMap::npos) msg << ' ' << leaves[i];
      throw GeometryError(msg.str());
    }
    for (auto [cell, r] : attach) {
      root[cell] = r;
      dist[cell] = sweep;
    }
    pending -= attach.size();
  }
  return {std::move(root), std::move(dist), sweep};
}

}  // namespace ufep
