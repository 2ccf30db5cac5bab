#include "ufep/history_space.hpp"

#include <algorithm>
#include <cmath>

namespace ufep {

const char* to_string(HistoryFlavor f) { return f == HistoryFlavor::standard ? "standard" : "aggregated"; }

std::array<double, 2> history_abscissae() {
  const double d = 0.5 / std::sqrt(3.0);
  return {0.5 - d, 0.5 + d};
}

std::array<double, 4> history_basis(const Vec2& xi) {
  const auto g = history_abscissae();
  auto l = [&](double t) { return std::array<double, 2>{(t - g[1]) / (g[0] - g[1]), (t - g[0]) / (g[1] - g[0])}; };
  const auto lx = l(xi.x());
  const auto ly = l(xi.y());
  return {lx[0] * ly[0], lx[1] * ly[0], lx[0] * ly[1], lx[1] * ly[1]};
}

HistoryLayout::HistoryLayout(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes,
                             const AggregateMap& aggregates, HistoryFlavor flavor)
    : mesh_(&mesh), flavor_(flavor) {
  const auto& leaves = mesh.leaves();
  if (classes.size() != leaves.size()) throw SpaceError("HistoryLayout: class vector does not match mesh");
  const auto g = history_abscissae();
  offset_.assign(leaves.size(), npos);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (classes[i] == CellClass::exterior) continue;
    offset_[i] = nodes_.size();
    const Square sq = mesh.cell_square(leaves[i]);
    for (unsigned k = 0; k < 4; ++k) {
      nodes_.push_back(sq.to_physical(Vec2(g[k & 1U], g[(k >> 1) & 1U])));
      leaf_.push_back(i);
    }
  }
  constrained_.assign(nodes_.size(), false);
  if (flavor != HistoryFlavor::aggregated) return;

  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (classes[i] != CellClass::cut) continue;
    const std::size_t r = aggregates.root_of(i);
    if (r == AggregateMap::npos || offset_[r] == npos) throw SpaceError("HistoryLayout: cut cell without root");
    const Square root_sq = mesh.cell_square(leaves[r]);
    for (unsigned k = 0; k < 4; ++k) {
      const std::size_t dof = offset_[i] + k;
      const auto l = history_basis(root_sq.to_reference(nodes_[dof]));
      Row row;
      row.dof = dof;
      for (unsigned j = 0; j < 4; ++j) row.masters[j] = {offset_[r] + j, l[j]};
      rows_.push_back(row);
      constrained_[dof] = true;
    }
  }
}

HistoryField::HistoryField(std::shared_ptr<const HistoryLayout> layout)
    : layout_(std::move(layout)), values_(layout_->size()) {}

PointHistory HistoryField::interpolate(std::size_t leaf, const Vec2& x) const {
  const std::size_t off = layout_->offset(leaf);
  if (off == HistoryLayout::npos) throw SpaceError("HistoryField: leaf has no history DOFs");
  const Square sq = layout_->mesh().cell_square(layout_->mesh().leaves()[leaf]);
  const auto l = history_basis(sq.to_reference(x));
  PointHistory out;
  for (unsigned k = 0; k < 4; ++k) {
    out.alpha += l[k] * values_[off + k].alpha;
    out.eps_p += l[k] * values_[off + k].eps_p;
  }
  return out;
}

void HistoryField::apply_constraints() {
  for (const auto& row : layout_->constraints()) {
    PointHistory v;
    for (const auto& [m, c] : row.masters) {
      v.alpha += c * values_[m].alpha;
      v.eps_p += c * values_[m].eps_p;
    }
    values_[row.dof] = v;
  }
}

double HistoryField::min_alpha() const {
  double a = 0.0;
  for (const auto& v : values_) a = std::min(a, v.alpha);
  return a;
}

}  // namespace ufep
