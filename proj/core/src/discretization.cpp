#include "ufep/discretization.hpp"

namespace ufep {

std::shared_ptr<const Discretization> Discretization::build(QuadtreeMesh mesh, LevelSet ls,
                                                            const DiscretizationOptions& opts) {
  std::shared_ptr<Discretization> d(new Discretization());
  d->mesh_ = std::make_shared<const QuadtreeMesh>(std::move(mesh));
  d->ls_ = std::move(ls);
  d->options_ = opts;
  const QuadtreeMesh& m = *d->mesh_;
  d->geometry_ = EmbeddedGeometry::build(m, d->ls_, opts.cut);
  d->aggregates_ = build_aggregates(m, d->geometry_.classes());
  d->space_ = std::make_unique<ContinuousSpace>(m, d->geometry_.classes(), d->aggregates_, opts.space);
  d->history_ = std::make_shared<const HistoryLayout>(m, d->geometry_.classes(), d->aggregates_, opts.history);
  d->volume_.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    switch (d->geometry_.cell_class(i)) {
      case CellClass::interior:
        d->volume_[i] = square_rule(m.cell_square(m.leaves()[i]), opts.interior_points);
        d->active_.push_back(i);
        break;
      case CellClass::cut:
        d->volume_[i] = d->geometry_.cut_cell(i).volume;
        d->active_.push_back(i);
        break;
      case CellClass::exterior: break;
    }
  }
  return d;
}

Quadrature Discretization::raised_quadrature(std::size_t leaf, int extra) const {
  if (geometry_.cell_class(leaf) == CellClass::interior)
    return square_rule(mesh_->cell_square(mesh_->leaves()[leaf]), options_.interior_points + extra);
  Quadrature q;
  if (geometry_.cell_class(leaf) != CellClass::cut) return q;
  for (const auto& t : geometry_.cut_cell(leaf).triangles) {
    const Quadrature qt = triangle_rule(t, options_.cut.volume_degree + extra);
    q.insert(q.end(), qt.begin(), qt.end());
  }
  return q;
}

}  // namespace ufep
