#include "ufep/transfer.hpp"

#include "ufep/q1_basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <unordered_set>

namespace ufep {

namespace {

enum class Relation { carried, refined, coarsened };

struct Source {
  Relation relation;
  std::size_t old_leaf = 0;              // carried / refined
  std::vector<std::size_t> old_children;  // coarsened
};

Source find_source(const QuadtreeMesh& old_mesh, const CellId& cell,
                   const std::unordered_set<CellId, CellIdHash>& refined,
                   const std::unordered_set<CellId, CellIdHash>& coarsened) {
  if (auto i = old_mesh.index_of(cell)) return {Relation::carried, *i, {}};
  for (CellId p = cell; p.level > 0;) {
    p = p.parent();
    if (auto i = old_mesh.index_of(p)) {
      if (!refined.contains(p)) throw MeshError("transfer: refined ancestor missing from the change log");
      return {Relation::refined, *i, {}};
    }
  }
  if (!coarsened.contains(cell)) throw MeshError("transfer: coarsened cell missing from the change log");
  auto children = descendant_leaves(old_mesh, cell);
  if (children.empty()) throw MeshError("transfer: new leaf has no counterpart in the old mesh");
  return {Relation::coarsened, 0, std::move(children)};
}

}  // namespace

std::vector<std::size_t> descendant_leaves(const QuadtreeMesh& mesh, const CellId& cell) {
  const auto& leaves = mesh.leaves();
  const std::uint64_t lo = cell.sfc_key();
  const std::uint64_t span = std::uint64_t{1} << (2 * (kMaxDepth - cell.level));
  auto it = std::lower_bound(leaves.begin(), leaves.end(), lo,
                             [](const CellId& c, std::uint64_t key) { return c.sfc_key() < key; });
  std::vector<std::size_t> out;
  for (; it != leaves.end() && it->sfc_key() - lo < span && it->sfc_key() >= lo; ++it) {
    if (it->level < cell.level) break;
    out.push_back(static_cast<std::size_t>(it - leaves.begin()));
  }
  return out;
}

TransferResult transfer_fields(const Discretization& old_disc, const Discretization& new_disc, const ChangeLog& log,
                               const Eigen::VectorXd& u_old_full, const HistoryField& history_old) {
  const QuadtreeMesh& om = old_disc.mesh();
  const QuadtreeMesh& nm = new_disc.mesh();
  const ContinuousSpace& os = old_disc.space();
  const ContinuousSpace& ns = new_disc.space();
  if (history_old.layout_ptr() != old_disc.history_layout())
    throw MeshError("transfer: history field does not belong to the old discretization");

  const std::unordered_set<CellId, CellIdHash> refined(log.refined.begin(), log.refined.end());
  const std::unordered_set<CellId, CellIdHash> coarsened(log.coarsened.begin(), log.coarsened.end());

  std::vector<std::optional<Vec2>> nodal(ns.node_count());
  std::vector<Vec2> l2_sum(ns.node_count(), Vec2::Zero());
  std::vector<int> l2_count(ns.node_count(), 0);

  HistoryField hist(new_disc.history_layout());
  const HistoryLayout& hl = hist.layout();
  const HistoryLayout& ol = history_old.layout();

  for (std::size_t j : new_disc.active_leaves()) {
    const CellId& cell = nm.leaves()[j];
    const Square sq = nm.cell_square(cell);
    const auto& cn = ns.cell_nodes(j);
    const std::size_t hoff = hl.offset(j);
    const Source src = find_source(om, cell, refined, coarsened);

    if (src.relation != Relation::coarsened) {
      const std::size_t o = src.old_leaf;
      if (!old_disc.geometry().is_active(o)) continue;
      for (unsigned k = 0; k < 4; ++k)
        if (!nodal[cn[k]]) nodal[cn[k]] = os.evaluate(u_old_full, o, ns.node(cn[k])).value;
      for (unsigned k = 0; k < 4; ++k) {
        hist.values()[hoff + k] = src.relation == Relation::carried ? history_old.values()[ol.offset(o) + k]
                                                                    : history_old.interpolate(o, hl.node(hoff + k));
      }
      continue;
    }

    // Cell-local L2 projections over the active old children.
    Eigen::Matrix4d mu = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d mh = Eigen::Matrix4d::Zero();
    Eigen::Matrix<double, 4, 2> ru = Eigen::Matrix<double, 4, 2>::Zero();
    Eigen::Matrix<double, 4, 5> rh = Eigen::Matrix<double, 4, 5>::Zero();
    bool any = false;
    for (std::size_t c : src.old_children) {
      if (!old_disc.geometry().is_active(c)) continue;
      any = true;
      for (const auto& qp : square_rule(om.cell_square(om.leaves()[c]), 2)) {
        const Vec2 xi = sq.to_reference(qp.x);
        const auto phi = q1::shape(xi);
        const auto lag = history_basis(xi);
        const Eigen::Vector4d p(phi[0], phi[1], phi[2], phi[3]);
        const Eigen::Vector4d l(lag[0], lag[1], lag[2], lag[3]);
        const Vec2 u = os.evaluate(u_old_full, c, qp.x).value;
        const PointHistory h = history_old.interpolate(c, qp.x);
        Eigen::Matrix<double, 1, 5> hv;
        hv << h.alpha, h.eps_p.transpose();
        mu += qp.weight * p * p.transpose();
        ru += qp.weight * p * u.transpose();
        mh += qp.weight * l * l.transpose();
        rh += qp.weight * l * hv;
      }
    }
    if (!any) continue;
    const Eigen::Matrix<double, 4, 2> cu = mu.ldlt().solve(ru);
    const Eigen::Matrix<double, 4, 5> ch = mh.ldlt().solve(rh);
    for (unsigned k = 0; k < 4; ++k) {
      l2_sum[cn[k]] += cu.row(k).transpose();
      ++l2_count[cn[k]];
      PointHistory& v = hist.values()[hoff + k];
      v.alpha = ch(k, 0);
      v.eps_p = ch.row(k).tail<4>().transpose();
    }
  }

  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ns.dof_count()));
  for (std::size_t n = 0; n < ns.node_count(); ++n) {
    Vec2 v = Vec2::Zero();
    if (nodal[n])
      v = *nodal[n];
    else if (l2_count[n] > 0)
      v = l2_sum[n] / l2_count[n];
    full[2 * n] = v.x();
    full[2 * n + 1] = v.y();
  }

  TransferResult out{ns.restrict(full), std::move(hist), 0};
  out.history.apply_constraints();
  for (auto& v : out.history.values()) {
    if (v.alpha < 0.0) {
      v.alpha = 0.0;
      ++out.clamped_alpha;
    }
  }
  return out;
}

}  // namespace ufep
