#include "ufep/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ufep {

std::vector<double> kelly_estimator(const Assembler& assembler, const Eigen::VectorXd& u_full,
                                    const HistoryField& history, double scale) {
  const Discretization& d = assembler.discretization();
  const auto& mesh = d.mesh();
  const auto& leaves = mesh.leaves();
  std::vector<double> eta2(leaves.size(), 0.0);

  for (std::size_t i : d.active_leaves()) {
    const CellId& t = leaves[i];
    const Square sq = mesh.cell_square(t);
    for (Side s : kSides) {
      for (const auto& nb : mesh.face_neighbors(t, s)) {
        const std::size_t j = mesh.checked_index(nb);
        if (!d.geometry().is_active(j)) continue;
        if (nb.level > t.level || (nb.level == t.level && !(t < nb))) continue;
        const auto sc = side_corners(s);
        const auto part = clip_segment(sq.corner(sc[0]), sq.corner(sc[1]), d.level_set(),
                                       d.options().cut.bisection_iterations);
        if (!part) continue;
        const Vec2 n = side_normal(s);
        double integral = 0.0;
        for (const auto& qp : segment_rule(part->first, part->second, d.options().cut.boundary_points)) {
          const Voigt4 st = assembler.stress_at(u_full, history, i, qp.x).stress;
          const Voigt4 sn = assembler.stress_at(u_full, history, j, qp.x).stress;
          integral += qp.weight * traction(st - sn, n).squaredNorm();
        }
        eta2[i] += 0.5 * sq.size * integral / scale;
        eta2[j] += 0.5 * d.cell_size(j) * integral / scale;
      }
    }
  }
  std::vector<double> eta(leaves.size());
  std::transform(eta2.begin(), eta2.end(), eta.begin(), [](double v) { return std::sqrt(v); });
  return eta;
}

double global_error(const std::vector<double>& eta, double energy) {
  if (!(energy > 0.0)) throw SolverError("global error estimate needs a positive energy A(u, u)");
  const double sum = std::accumulate(eta.begin(), eta.end(), 0.0, [](double acc, double e) { return acc + e * e; });
  return std::sqrt(sum / energy);
}

std::map<CellId, Mark> mark_cells(const QuadtreeMesh& mesh, const std::vector<double>& eta,
                                  const std::vector<CellClass>& classes, double theta_r, double theta_c) {
  if (eta.size() != mesh.size() || classes.size() != mesh.size())
    throw MeshError("mark_cells: indicator or class vector does not match the mesh");
  if (theta_r < 0.0 || theta_c < 0.0 || theta_r + theta_c > 1.0)
    throw MeshError("mark_cells: need theta_r, theta_c >= 0 and theta_r + theta_c <= 1");
  const auto& leaves = mesh.leaves();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    if (classes[i] != CellClass::exterior) active.push_back(i);
  std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
    if (eta[a] != eta[b]) return eta[a] > eta[b];
    return leaves[a] < leaves[b];
  });

  const auto n = static_cast<double>(active.size());
  const auto n_ref = static_cast<std::size_t>(std::ceil(theta_r * n - 1e-12));
  const auto n_coarse = static_cast<std::size_t>(std::floor(theta_c * n + 1e-12));
  std::map<CellId, Mark> marks;
  for (std::size_t k = 0; k < std::min(n_ref, active.size()); ++k) {
    const CellId& c = leaves[active[k]];
    if (c.level < mesh.max_level()) marks[c] = Mark::refine;
  }
  for (std::size_t k = 0; k < n_coarse && k < active.size() - std::min(n_ref, active.size()); ++k) {
    const CellId& c = leaves[active[active.size() - 1 - k]];
    if (c.level > 0) marks[c] = Mark::coarsen;
  }
  return marks;
}

}  // namespace ufep
