#include "ufep/assembler.hpp"

#include "ufep/q1_basis.hpp"

#include <cmath>
#include <ostream>
#include <unordered_map>

namespace ufep {

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;
using Mat28 = Eigen::Matrix<double, 2, 8>;
using Mat24 = Eigen::Matrix<double, 2, 4>;

struct LocalBasis {
  Mat48 B;  // strain of each local DOF
  Mat28 N;  // value of each local DOF
};

LocalBasis local_basis(const Square& sq, const Vec2& x) {
  const Vec2 xi = sq.to_reference(x);
  const auto phi = q1::shape(xi);
  const auto dphi = q1::shape_grad(xi);
  LocalBasis lb;
  lb.B.setZero();
  lb.N.setZero();
  for (int k = 0; k < 4; ++k) {
    const Vec2 g = dphi[k] / sq.size;
    lb.B(0, 2 * k) = g.x();
    lb.B(3, 2 * k) = g.y();
    lb.B(1, 2 * k + 1) = g.y();
    lb.B(3, 2 * k + 1) = g.x();
    lb.N(0, 2 * k) = phi[k];
    lb.N(1, 2 * k + 1) = phi[k];
  }
  return lb;
}

Mat24 traction_operator(const Vec2& n) {
  Mat24 t;
  t << n.x(), 0, 0, n.y(), 0, n.y(), 0, n.x();
  return t;
}

bool on_box_face(const Vec2& x, Side s, double len) {
  const double tol = 1e-12 * len;
  switch (s) {
    case Side::xmin: return std::abs(x.x()) <= tol;
    case Side::xmax: return std::abs(x.x() - len) <= tol;
    case Side::ymin: return std::abs(x.y()) <= tol;
    case Side::ymax: return std::abs(x.y() - len) <= tol;
  }
  return false;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::xmin: return "xmin";
    case Side::xmax: return "xmax";
    case Side::ymin: return "ymin";
    case Side::ymax: return "ymax";
  }
  return "";
}

}  // namespace

const char* to_string(BcKind k) {
  switch (k) {
    case BcKind::dirichlet_strong: return "dirichlet_strong";
    case BcKind::dirichlet_nitsche: return "dirichlet_nitsche";
    case BcKind::neumann: return "neumann";
  }
  return "?";
}

std::optional<Side> box_side(const std::string& region) {
  for (Side s : kSides)
    if (region == side_name(s)) return s;
  return std::nullopt;
}

std::vector<StrongDirichlet> strong_dirichlet_faces(const Problem& problem) {
  std::vector<StrongDirichlet> out;
  for (const auto& bc : problem.bcs) {
    if (bc.kind != BcKind::dirichlet_strong) continue;
    const auto s = box_side(bc.region);
    if (!s) throw ConfigError("strong Dirichlet condition needs a box face, got '" + bc.region + "'");
    for (int c = 0; c < 2; ++c)
      if (bc.components[c]) out.push_back({*s, c});
  }
  return out;
}

Voigt4 strain_from_gradient(const Eigen::Matrix2d& g) {
  return Voigt4(g(0, 0), g(1, 1), 0.0, g(0, 1) + g(1, 0));
}

Vec2 traction(const Voigt4& s, const Vec2& n) {
  return {s[0] * n.x() + s[3] * n.y(), s[3] * n.x() + s[1] * n.y()};
}

Assembler::Assembler(std::shared_ptr<const Discretization> disc, const Problem& problem)
    : disc_(std::move(disc)), problem_(problem), elastic_(elastic_tangent(problem.material)) {
  problem_.material.validate();
  for (const auto& bc : problem_.bcs) {
    if (!bc.value) throw ConfigError("boundary condition on '" + bc.region + "' has no value");
    const bool face = box_side(bc.region).has_value();
    if (bc.kind == BcKind::dirichlet_strong && !face)
      throw ConfigError("strong Dirichlet only applies to box faces, got '" + bc.region + "'");
    if (bc.kind == BcKind::dirichlet_nitsche && face)
      throw ConfigError("Nitsche conditions apply to level-set tags, got box face '" + bc.region + "'");
  }
}

Eigen::VectorXd Assembler::dirichlet(double lambda) const {
  const auto& space = disc_->space();
  const double len = disc_->mesh().length();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dof_count()));
  for (std::size_t d = 0; d < space.dof_count(); ++d) {
    if (space.kind(d) != DofKind::dirichlet) continue;
    const Vec2& x = space.node(d / 2);
    const auto c = static_cast<int>(d % 2);
    for (const auto& bc : problem_.bcs) {
      if (bc.kind != BcKind::dirichlet_strong || !bc.components[c]) continue;
      const Side s = *box_side(bc.region);
      if (on_box_face(x, s, len)) g[d] = bc.value(x, side_normal(s), lambda)[c];
    }
  }
  return g;
}

Eigen::VectorXd Assembler::expand(const Eigen::VectorXd& free, double lambda) const {
  return disc_->space().expand(free, dirichlet(lambda));
}

void Assembler::check_layout(const HistoryField& history) const {
  if (history.layout_ptr() != disc_->history_layout())
    throw SolverError("history field layout does not belong to this discretization");
}

void Assembler::assemble(const Eigen::VectorXd& u_full, const HistoryField& history, double lambda,
                         Eigen::VectorXd* residual, Eigen::SparseMatrix<double>* matrix) const {
  check_layout(history);
  const Discretization& d = *disc_;
  const auto& space = d.space();
  const auto& mesh = d.mesh();
  const auto& mat = problem_.material;
  if (static_cast<std::size_t>(u_full.size()) != space.dof_count())
    throw SolverError("displacement vector does not match the space");

  const auto nfree = static_cast<Eigen::Index>(space.free_count());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(nfree);
  std::vector<Eigen::Triplet<double>> trip;
  if (matrix != nullptr) trip.reserve(d.active_leaves().size() * 64);

  std::unordered_map<std::string, const BoundaryCondition*> by_tag;
  std::array<const BoundaryCondition*, 4> by_face{};
  for (const auto& bc : problem_.bcs) {
    if (const auto s = box_side(bc.region)) {
      if (bc.kind == BcKind::neumann) by_face[static_cast<int>(*s)] = &bc;
    } else {
      by_tag[bc.region] = &bc;
    }
  }
  const double two_g = 2.0 * mat.shear();

  for (std::size_t leaf : d.active_leaves()) {
    const auto dofs = space.cell_dofs(leaf);
    Vec8 u;
    for (int a = 0; a < 8; ++a) u[a] = u_full[dofs[a]];
    const Square sq = mesh.cell_square(mesh.leaves()[leaf]);
    Vec8 rl = Vec8::Zero();
    Mat8 kl = Mat8::Zero();

    for (const auto& qp : d.volume_quadrature(leaf)) {
      const LocalBasis lb = local_basis(sq, qp.x);
      const Voigt4 eps = lb.B * u;
      const StressResult sr = stress_update(eps, history.interpolate(leaf, qp.x), mat);
      rl += qp.weight * lb.B.transpose() * sr.stress;
      if (matrix != nullptr) kl += qp.weight * lb.B.transpose() * sr.tangent * lb.B;
      if (problem_.body_force) rl -= qp.weight * lb.N.transpose() * problem_.body_force(qp.x, lambda);
    }

    if (d.geometry().cell_class(leaf) == CellClass::cut) {
      for (const auto& seg : d.geometry().cut_cell(leaf).segments) {
        auto it = by_tag.find(seg.tag);
        if (it == by_tag.end()) continue;
        const BoundaryCondition& bc = *it->second;
        const Mat24 tn = traction_operator(seg.normal);
        if (bc.kind == BcKind::neumann) {
          for (const auto& qp : seg.quadrature) {
            const LocalBasis lb = local_basis(sq, qp.x);
            rl -= qp.weight * lb.N.transpose() * bc.value(qp.x, seg.normal, lambda);
          }
        } else if (bc.kind == BcKind::dirichlet_nitsche) {
          const double beta = problem_.beta0 * two_g / sq.size;
          for (const auto& qp : seg.quadrature) {
            const LocalBasis lb = local_basis(sq, qp.x);
            const Vec2 gap = lb.N * u - bc.value(qp.x, seg.normal, lambda);
            const StressResult sr = stress_update(lb.B * u, history.interpolate(leaf, qp.x), mat);
            const Mat28 test_traction = tn * elastic_ * lb.B;
            rl += qp.weight * (-lb.N.transpose() * traction(sr.stress, seg.normal) -
                               test_traction.transpose() * gap + beta * lb.N.transpose() * gap);
            if (matrix != nullptr) {
              kl += qp.weight * (-lb.N.transpose() * (tn * sr.tangent * lb.B) - test_traction.transpose() * lb.N +
                                 beta * lb.N.transpose() * lb.N);
            }
          }
        }
      }
    }

    for (Side s : kSides) {
      const BoundaryCondition* bc = by_face[static_cast<int>(s)];
      if (bc == nullptr) continue;
      const auto sc = side_corners(s);
      const Vec2 a = sq.corner(sc[0]);
      const Vec2 b = sq.corner(sc[1]);
      if (!on_box_face(a, s, mesh.length()) || !on_box_face(b, s, mesh.length())) continue;
      const auto part = clip_segment(a, b, d.level_set(), d.options().cut.bisection_iterations);
      if (!part) continue;
      const Vec2 n = side_normal(s);
      for (const auto& qp : segment_rule(part->first, part->second, d.options().cut.boundary_points)) {
        const LocalBasis lb = local_basis(sq, qp.x);
        rl -= qp.weight * lb.N.transpose() * bc->value(qp.x, n, lambda);
      }
    }

    for (int a = 0; a < 8; ++a) {
      for (const auto& [fa, ca] : space.expansion(dofs[a])) {
        r[static_cast<Eigen::Index>(fa)] += ca * rl[a];
        if (matrix == nullptr) continue;
        for (int b = 0; b < 8; ++b) {
          if (kl(a, b) == 0.0) continue;
          for (const auto& [fb, cb] : space.expansion(dofs[b]))
            trip.emplace_back(static_cast<int>(fa), static_cast<int>(fb), ca * cb * kl(a, b));
        }
      }
    }
  }

  if (residual != nullptr) *residual = std::move(r);
  if (matrix != nullptr) {
    matrix->resize(nfree, nfree);
    matrix->setFromTriplets(trip.begin(), trip.end());
    matrix->makeCompressed();
  }
}

Eigen::VectorXd Assembler::residual(const Eigen::VectorXd& u_full, const HistoryField& history, double lambda) const {
  Eigen::VectorXd r;
  assemble(u_full, history, lambda, &r, nullptr);
  return r;
}

SparseSystem Assembler::jacobian(const Eigen::VectorXd& u_full, const HistoryField& history, double lambda) const {
  SparseSystem sys;
  Eigen::VectorXd r;
  assemble(u_full, history, lambda, &r, &sys.matrix);
  sys.rhs = -r;
  return sys;
}

double Assembler::energy(const Eigen::VectorXd& u_full, const HistoryField& history) const {
  check_layout(history);
  const Discretization& d = *disc_;
  double e = 0.0;
  for (std::size_t leaf : d.active_leaves()) {
    for (const auto& qp : d.volume_quadrature(leaf)) {
      const FieldValue fv = d.space().evaluate(u_full, leaf, qp.x);
      const Voigt4 eps = strain_from_gradient(fv.gradient);
      const StressResult sr = stress_update(eps, history.interpolate(leaf, qp.x), problem_.material);
      e += qp.weight * eps.dot(sr.stress);
    }
  }
  return e;
}

StressResult Assembler::stress_at(const Eigen::VectorXd& u_full, const HistoryField& history, std::size_t leaf,
                                  const Vec2& x) const {
  const FieldValue fv = disc_->space().evaluate(u_full, leaf, x);
  return stress_update(strain_from_gradient(fv.gradient), history.interpolate(leaf, x), problem_.material);
}

HistoryField Assembler::update_history(const Eigen::VectorXd& u_full, const HistoryField& previous) const {
  check_layout(previous);
  const HistoryLayout& layout = previous.layout();
  HistoryField out(previous.layout_ptr());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout.is_constrained(k)) continue;
    const FieldValue fv = disc_->space().evaluate(u_full, layout.leaf_of(k), layout.node(k));
    out.values()[k] =
        stress_update(strain_from_gradient(fv.gradient), previous.values()[k], problem_.material).history;
  }
  out.apply_constraints();
  return out;
}

void write_matrix_market(std::ostream& os, const Eigen::SparseMatrix<double>& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace ufep
