#pragma once

#include "ufep/discretization.hpp"
#include "ufep/history_space.hpp"
#include "ufep/j2_plasticity.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ufep {

enum class BcKind : std::uint8_t { dirichlet_strong, dirichlet_nitsche, neumann };

const char* to_string(BcKind k);

/// Prescribed displacement or traction as a function of position, outward
/// normal and load factor.
using BcValue = std::function<Vec2(const Vec2& x, const Vec2& n, double lambda)>;

/// Boundary condition on a face of the root box ("xmin", "xmax", "ymin",
/// "ymax") or on the part of the unfitted boundary carrying a level-set tag.
struct BoundaryCondition {
  std::string region;
  BcKind kind = BcKind::neumann;
  std::array<bool, 2> components{true, true};  ///< strong Dirichlet only
  BcValue value;
};

struct Problem {
  MaterialParams material;
  std::vector<BoundaryCondition> bcs;
  std::function<Vec2(const Vec2& x, double lambda)> body_force;
  double beta0 = 25.0;
};

std::optional<Side> box_side(const std::string& region);

/// Strong Dirichlet faces of a problem, as needed by the space.
std::vector<StrongDirichlet> strong_dirichlet_faces(const Problem& problem);

struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;  ///< minus the residual
};

/// Residual, Jacobian and energy of the irreducible formulation over the
/// free DOFs of a discretization.
class Assembler {
 public:
  Assembler(std::shared_ptr<const Discretization> disc, const Problem& problem);

  [[nodiscard]] const Discretization& discretization() const { return *disc_; }
  [[nodiscard]] const Problem& problem() const { return problem_; }

  /// Full-length vector with strong Dirichlet values at load factor lambda.
  [[nodiscard]] Eigen::VectorXd dirichlet(double lambda) const;
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free, double lambda) const;

  [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& u_full, const HistoryField& history,
                                         double lambda) const;
  [[nodiscard]] SparseSystem jacobian(const Eigen::VectorXd& u_full, const HistoryField& history, double lambda) const;

  /// A(u, u) = integral of grad u : sigma(u, alpha) over the domain.
  [[nodiscard]] double energy(const Eigen::VectorXd& u_full, const HistoryField& history) const;

  /// History at the history nodes from the converged displacement.
  [[nodiscard]] HistoryField update_history(const Eigen::VectorXd& u_full, const HistoryField& previous) const;

  /// Stress at x in leaf with the history of step n.
  [[nodiscard]] StressResult stress_at(const Eigen::VectorXd& u_full, const HistoryField& history, std::size_t leaf,
                                       const Vec2& x) const;

 private:
  void assemble(const Eigen::VectorXd& u_full, const HistoryField& history, double lambda, Eigen::VectorXd* residual,
                Eigen::SparseMatrix<double>* matrix) const;
  void check_layout(const HistoryField& history) const;

  std::shared_ptr<const Discretization> disc_;
  Problem problem_;
  Tangent4 elastic_;
};

/// Voigt strain (engineering shear, eps_zz = 0) of a displacement gradient.
Voigt4 strain_from_gradient(const Eigen::Matrix2d& g);

/// Traction sigma n of a Voigt stress.
Vec2 traction(const Voigt4& s, const Vec2& n);

void write_matrix_market(std::ostream& os, const Eigen::SparseMatrix<double>& a);

}  // namespace ufep
