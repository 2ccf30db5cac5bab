#include "ufep/continuous_space.hpp"

#include "ufep/q1_basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace ufep {

namespace {

std::uint64_t lattice_key(std::uint64_t ix, std::uint64_t iy) { return (ix << 32) | iy; }

using Row = std::vector<std::pair<std::size_t, double>>;

bool on_face(const std::array<std::uint64_t, 2>& p, Side s, std::uint64_t top) {
  switch (s) {
    case Side::xmin: return p[0] == 0;
    case Side::xmax: return p[0] == top;
    case Side::ymin: return p[1] == 0;
    case Side::ymax: return p[1] == top;
  }
  return false;
}

// Express every constrained DOF through primary DOFs. Strongly connected
// groups of rows (a hanging node whose master is extrapolated from a cell
// having that node as a corner) are solved together as a small dense
// system. When that system is singular, hanging DOFs spanning its kernel
// are made free.
std::size_t resolve_rows(const std::vector<std::optional<Row>>& raw, const std::vector<ConstraintKind>& raw_kind,
                         std::vector<DofKind>& kind, std::vector<Row>& resolved) {
  const std::size_t nd = raw.size();
  resolved.assign(nd, Row{});
  std::vector<long> index(nd, -1);
  std::vector<long> low(nd, 0);
  std::vector<bool> on_stack(nd, false);
  std::vector<std::size_t> stack;
  long counter = 0;
  std::size_t released = 0;

  auto finish = [&](const std::vector<std::size_t>& comp) {
    if (comp.size() == 1 && kind[comp[0]] != DofKind::constrained) {
      resolved[comp[0]] = Row{{comp[0], 1.0}};
      return;
    }
    std::map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
    const auto k = static_cast<Eigen::Index>(comp.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    std::map<std::size_t, Eigen::VectorXd> rhs;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (const auto& [m, c] : *raw[comp[i]]) {
        if (auto it = local.find(m); it != local.end()) {
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(it->second)) -= c;
          continue;
        }
        for (const auto& [mm, cc] : resolved[m]) {
          auto [r, inserted] = rhs.try_emplace(mm, Eigen::VectorXd::Zero(k));
          r->second[static_cast<Eigen::Index>(i)] += c * cc;
        }
      }
    }
    if (comp.size() == 1 && a(0, 0) == 1.0) {
      for (const auto& [m, v] : rhs)
        if (v[0] != 0.0) resolved[comp[0]].emplace_back(m, v[0]);
      return;
    }
    // Keep a maximal independent set of columns, preferring non-hanging
    // DOFs; the rest of the group becomes free.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return (raw_kind[comp[static_cast<std::size_t>(x)]] == ConstraintKind::hanging) <
             (raw_kind[comp[static_cast<std::size_t>(y)]] == ConstraintKind::hanging);
    });
    std::vector<Eigen::Index> keep;
    std::vector<Eigen::Index> drop;
    for (Eigen::Index col : order) {
      Eigen::MatrixXd trial(k, static_cast<Eigen::Index>(keep.size() + 1));
      for (std::size_t j = 0; j < keep.size(); ++j) trial.col(static_cast<Eigen::Index>(j)) = a.col(keep[j]);
      trial.col(static_cast<Eigen::Index>(keep.size())) = a.col(col);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
      qr.setThreshold(1e-10);
      if (qr.rank() == trial.cols())
        keep.push_back(col);
      else
        drop.push_back(col);
    }
    for (Eigen::Index col : drop) {
      const std::size_t d = comp[static_cast<std::size_t>(col)];
      if (raw_kind[d] != ConstraintKind::hanging)
        throw SpaceError("ContinuousSpace: singular constraint cycle without a hanging node");
      kind[d] = DofKind::free;
      resolved[d] = Row{{d, 1.0}};
      ++released;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (a(i, col) == 0.0) continue;
        auto [r, inserted] = rhs.try_emplace(d, Eigen::VectorXd::Zero(k));
        r->second[i] -= a(i, col);
      }
    }
    Eigen::MatrixXd ak(k, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) ak.col(static_cast<Eigen::Index>(j)) = a.col(keep[j]);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ak);
    for (const auto& [m, v] : rhs) {
      const Eigen::VectorXd x = qr.solve(v);
      if ((ak * x - v).norm() > 1e-10 * (1.0 + v.norm()))
        throw SpaceError("ContinuousSpace: inconsistent constraint cycle");
      for (std::size_t j = 0; j < keep.size(); ++j)
        if (std::abs(x[static_cast<Eigen::Index>(j)]) > 1e-14)
          resolved[comp[static_cast<std::size_t>(keep[j])]].emplace_back(m, x[static_cast<Eigen::Index>(j)]);
    }
  };

  // Tarjan's algorithm; components come out after everything they depend on.
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    if (kind[v] == DofKind::constrained) {
      for (const auto& [m, c] : *raw[v]) {
        if (index[m] < 0) {
          connect(m);
          low[v] = std::min(low[v], low[m]);
        } else if (on_stack[m]) {
          low[v] = std::min(low[v], index[m]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w = 0;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      finish(comp);
    }
  };
  for (std::size_t d = 0; d < nd; ++d)
    if (index[d] < 0) connect(d);
  return released;
}

}  // namespace

ContinuousSpace::ContinuousSpace(const QuadtreeMesh& mesh, const std::vector<CellClass>& classes,
                                 const AggregateMap& aggregates, const SpaceOptions& options)
    : mesh_(&mesh) {
  const auto& leaves = mesh.leaves();
  if (classes.size() != leaves.size()) throw SpaceError("ContinuousSpace: class vector does not match mesh");

  std::vector<std::array<std::uint64_t, 2>> lattice;
  cell_nodes_.assign(leaves.size(), {npos, npos, npos, npos});
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (classes[i] == CellClass::exterior) continue;
    for (unsigned k = 0; k < 4; ++k) {
      const auto p = mesh.vertex_lattice(leaves[i], k);
      auto [it, inserted] = node_index_.try_emplace(lattice_key(p[0], p[1]), nodes_.size());
      if (inserted) {
        nodes_.push_back(mesh.lattice_point(p[0], p[1]));
        lattice.push_back(p);
      }
      cell_nodes_[i][k] = it->second;
    }
  }
  const std::size_t nn = nodes_.size();
  const std::size_t nd = 2 * nn;

  // Raw constraint rows per DOF, masters not yet resolved.
  std::vector<std::optional<Row>> raw(nd);
  std::vector<ConstraintKind> raw_kind(nd, ConstraintKind::hanging);
  std::vector<bool> hanging_node(nn, false);

  for (const auto& h : collect_hanging_entities(mesh)) {
    const std::size_t ci = mesh.checked_index(h.coarse_cell);
    if (classes[ci] == CellClass::exterior) continue;
    const auto sc = side_corners(h.side);
    const auto a = mesh.vertex_lattice(h.coarse_cell, sc[0]);
    const auto b = mesh.vertex_lattice(h.coarse_cell, sc[1]);
    const auto mid = find_node((a[0] + b[0]) / 2, (a[1] + b[1]) / 2);
    if (!mid) continue;
    hanging_node[*mid] = true;
    const std::size_t na = cell_nodes_[ci][sc[0]];
    const std::size_t nb = cell_nodes_[ci][sc[1]];
    for (std::size_t c = 0; c < 2; ++c) {
      raw[2 * *mid + c] = Row{{2 * na + c, 0.5}, {2 * nb + c, 0.5}};
      raw_kind[2 * *mid + c] = ConstraintKind::hanging;
    }
  }

  if (options.aggregate) {
    std::vector<bool> touched_interior(nn, false);
    std::vector<std::optional<std::size_t>> owner(nn);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (classes[i] == CellClass::exterior) continue;
      for (auto n : cell_nodes_[i]) {
        if (classes[i] == CellClass::interior) {
          touched_interior[n] = true;
        } else {
          const std::size_t r = aggregates.root_of(i);
          if (r == AggregateMap::npos) throw SpaceError("ContinuousSpace: cut cell without aggregate root");
          if (!owner[n] || leaves[r] < leaves[*owner[n]]) owner[n] = r;
        }
      }
    }
    for (std::size_t n = 0; n < nn; ++n) {
      if (touched_interior[n] || hanging_node[n] || !owner[n]) continue;
      const std::size_t r = *owner[n];
      const Square sq = mesh.cell_square(leaves[r]);
      const auto phi = q1::shape(sq.to_reference(nodes_[n]));
      for (std::size_t c = 0; c < 2; ++c) {
        Row row;
        for (unsigned k = 0; k < 4; ++k)
          if (phi[k] != 0.0) row.emplace_back(2 * cell_nodes_[r][k] + c, phi[k]);
        raw[2 * n + c] = std::move(row);
        raw_kind[2 * n + c] = ConstraintKind::ill_posed;
      }
    }
  }

  kind_.assign(nd, DofKind::free);
  const std::uint64_t top = std::uint64_t{1} << kMaxDepth;
  for (std::size_t n = 0; n < nn; ++n) {
    for (const auto& d : options.dirichlet) {
      if (d.component < 0 || d.component > 1) throw SpaceError("ContinuousSpace: Dirichlet component must be 0 or 1");
      if (on_face(lattice[n], d.face, top)) {
        const std::size_t dof = 2 * n + static_cast<std::size_t>(d.component);
        kind_[dof] = DofKind::dirichlet;
        raw[dof].reset();
      }
    }
  }
  for (std::size_t d = 0; d < nd; ++d)
    if (raw[d]) kind_[d] = DofKind::constrained;

  // Resolve chains to primary (free or Dirichlet) masters.
  std::vector<Row> resolved;
  released_ = resolve_rows(raw, raw_kind, kind_, resolved);

  free_index_.assign(nd, npos);
  for (std::size_t d = 0; d < nd; ++d) {
    if (kind_[d] == DofKind::free) {
      free_index_[d] = free_dofs_.size();
      free_dofs_.push_back(d);
    }
  }
  expansion_.assign(nd, {});
  for (std::size_t d = 0; d < nd; ++d) {
    if (kind_[d] == DofKind::free) {
      expansion_[d] = {{free_index_[d], 1.0}};
    } else if (kind_[d] == DofKind::constrained) {
      rows_.push_back({d, raw_kind[d], resolved[d]});
      for (const auto& [m, c] : resolved[d])
        if (kind_[m] == DofKind::free) expansion_[d].emplace_back(free_index_[m], c);
    }
  }
}

std::optional<std::size_t> ContinuousSpace::find_node(std::uint64_t ix, std::uint64_t iy) const {
  auto it = node_index_.find(lattice_key(ix, iy));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

const std::array<std::size_t, 4>& ContinuousSpace::cell_nodes(std::size_t leaf) const {
  if (leaf >= cell_nodes_.size() || cell_nodes_[leaf][0] == npos)
    throw SpaceError("ContinuousSpace: leaf is not active");
  return cell_nodes_[leaf];
}

std::array<std::size_t, 8> ContinuousSpace::cell_dofs(std::size_t leaf) const {
  const auto& n = cell_nodes(leaf);
  return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1, 2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1};
}

Eigen::VectorXd ContinuousSpace::expand(const Eigen::VectorXd& free, const Eigen::VectorXd& dirichlet) const {
  if (static_cast<std::size_t>(free.size()) != free_count()) throw SpaceError("expand: free vector size mismatch");
  if (static_cast<std::size_t>(dirichlet.size()) != dof_count())
    throw SpaceError("expand: Dirichlet vector size mismatch");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t d = 0; d < dof_count(); ++d) {
    if (kind_[d] == DofKind::free)
      full[d] = free[free_index_[d]];
    else if (kind_[d] == DofKind::dirichlet)
      full[d] = dirichlet[d];
  }
  for (const auto& row : rows_) {
    double v = 0.0;
    for (const auto& [m, c] : row.masters) v += c * full[m];
    full[row.dof] = v;
  }
  return full;
}

Eigen::VectorXd ContinuousSpace::expand(const Eigen::VectorXd& free) const {
  return expand(free, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_count())));
}

Eigen::VectorXd ContinuousSpace::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(free_count()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) out[i] = full[free_dofs_[i]];
  return out;
}

Eigen::VectorXd ContinuousSpace::dirichlet_values(const std::function<double(const Vec2&, int)>& g) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t d = 0; d < dof_count(); ++d)
    if (kind_[d] == DofKind::dirichlet) out[d] = g(nodes_[d / 2], static_cast<int>(d % 2));
  return out;
}

Eigen::VectorXd ContinuousSpace::interpolate(const std::function<Vec2(const Vec2&)>& g) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Vec2 v = g(nodes_[n]);
    out[2 * n] = v.x();
    out[2 * n + 1] = v.y();
  }
  return out;
}

FieldValue ContinuousSpace::evaluate(const Eigen::VectorXd& full, std::size_t leaf, const Vec2& x) const {
  const auto& cn = cell_nodes(leaf);
  const Square sq = mesh_->cell_square(mesh_->leaves()[leaf]);
  const Vec2 xi = sq.to_reference(x);
  const auto phi = q1::shape(xi);
  const auto dphi = q1::shape_grad(xi);
  FieldValue out;
  constexpr double tol = 1e-12;
  out.extrapolated = xi.x() < -tol || xi.x() > 1 + tol || xi.y() < -tol || xi.y() > 1 + tol;
  for (unsigned k = 0; k < 4; ++k) {
    const Vec2 uk(full[2 * cn[k]], full[2 * cn[k] + 1]);
    out.value += phi[k] * uk;
    out.gradient += uk * dphi[k].transpose() / sq.size;
  }
  return out;
}

void ContinuousSpace::write_constraints_csv(std::ostream& os) const {
  os << "dof,node_x,node_y,component,kind,master,coefficient\r\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& row : rows_) {
    const Vec2& x = nodes_[row.dof / 2];
    for (const auto& [m, c] : row.masters) {
      line.str("");
      line << row.dof << ',' << x.x() << ',' << x.y() << ',' << row.dof % 2 << ','
           << (row.kind == ConstraintKind::hanging ? "hanging" : "ill_posed") << ',' << m << ',' << c << "\r\n";
      os << line.str();
    }
  }
}

}  // namespace ufep
