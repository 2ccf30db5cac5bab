#include "ufep/convergence.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace ufep {

namespace {

// Plane-strain compliance applied to in-plane stresses (xx, yy, xy).
double compliance_energy(const Eigen::Vector3d& s, double E, double nu) {
  const double c = (1.0 + nu) / E;
  const double exx = c * ((1.0 - nu) * s[0] - nu * s[1]);
  const double eyy = c * ((1.0 - nu) * s[1] - nu * s[0]);
  const double gxy = 2.0 * c * s[2];
  return s[0] * exx + s[1] * eyy + s[2] * gxy;
}

}  // namespace

StressErrors cylinder_stress_errors(const Assembler& assembler, const Eigen::VectorXd& u_full,
                                    const HistoryField& history, const ThickCylinderExact& exact, int extra) {
  const Discretization& disc = assembler.discretization();
  const MaterialParams& m = assembler.problem().material;
  double e_rr = 0.0, n_rr = 0.0, e_tt = 0.0, n_tt = 0.0, e_en = 0.0, n_en = 0.0;
  for (std::size_t leaf : disc.active_leaves()) {
    for (const auto& qp : disc.raised_quadrature(leaf, extra)) {
      const double r = qp.x.norm();
      const CylinderPoint ex = exact.at(r);
      const Vec2 er = qp.x / r;
      const Voigt4 s = assembler.stress_at(u_full, history, leaf, qp.x).stress;
      const double c = er.x();
      const double sn = er.y();
      const double srr = s[0] * c * c + 2.0 * s[3] * c * sn + s[1] * sn * sn;
      const double stt = s[0] * sn * sn - 2.0 * s[3] * c * sn + s[1] * c * c;
      // Exact stress in Cartesian components.
      const Eigen::Vector3d se(ex.sigma_rr * c * c + ex.sigma_tt * sn * sn, ex.sigma_rr * sn * sn + ex.sigma_tt * c * c,
                               (ex.sigma_rr - ex.sigma_tt) * c * sn);
      const Eigen::Vector3d sh(s[0], s[1], s[3]);
      e_rr += qp.weight * (srr - ex.sigma_rr) * (srr - ex.sigma_rr);
      n_rr += qp.weight * ex.sigma_rr * ex.sigma_rr;
      e_tt += qp.weight * (stt - ex.sigma_tt) * (stt - ex.sigma_tt);
      n_tt += qp.weight * ex.sigma_tt * ex.sigma_tt;
      e_en += qp.weight * compliance_energy(sh - se, m.E, m.nu);
      n_en += qp.weight * compliance_energy(se, m.E, m.nu);
    }
  }
  return {std::sqrt(e_rr / n_rr), std::sqrt(e_tt / n_tt), std::sqrt(e_en / n_en)};
}

ThickCylinderExact reference_solution(const ProblemConfig& cfg) {
  if (!cfg.reference) throw ConfigError("/reference: the convergence study needs a thick_cylinder reference");
  const ThickCylinderReference& r = *cfg.reference;
  // The analytical solution is written for the von Mises yield stress.
  const double sigma_y = cfg.yield_normalization == "von_mises" ? cfg.material.sigma_y : 2.0 * cfg.material.sigma_y;
  return {r.inner_radius, r.outer_radius, cfg.material.E, cfg.material.nu, sigma_y, r.pressure * cfg.load_scale};
}

std::vector<ConvergenceRecord> convergence_sweep(const ProblemConfig& cfg, unsigned first_level, int levels,
                                                 RunLog* log) {
  const ThickCylinderExact exact = reference_solution(cfg);
  std::vector<ConvergenceRecord> out;
  RunLog local;
  RunLog& rl = log != nullptr ? *log : local;
  for (int k = 0; k < levels; ++k) {
    const unsigned level = first_level + static_cast<unsigned>(k);
    SimulationSetup setup = cfg.setup();
    setup.amr.initial_uniform_level = level;
    setup.amr.max_level = std::max(setup.amr.max_level, level);
    setup.amr.num_amr_steps = 0;
    setup.output_dir.clear();

    const auto t0 = std::chrono::steady_clock::now();
    SimulationResult res = run_simulation(setup, rl);
    if (res.failed) throw SolverError("convergence sweep failed at level " + std::to_string(level) + ": " + res.failure);
    const SolverState& st = *res.state;
    const Assembler assembler(st.disc, setup.problem);
    const StressErrors e =
        cylinder_stress_errors(assembler, assembler.expand(st.u_free, st.lambda), *res.history_before, exact);

    ConvergenceRecord rec;
    const unsigned n = 1U << level;
    rec.label = std::to_string(n) + "x" + std::to_string(n);
    rec.level = level;
    rec.free_dofs = st.disc->space().free_count();
    rec.err_rr = e.err_rr;
    rec.err_tt = e.err_tt;
    rec.energy_err = e.energy_err;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rl.event("convergence", {{"level", RunLog::num(static_cast<int>(level))},
                             {"free_dofs", RunLog::num(rec.free_dofs)},
                             {"err_rr", RunLog::num(rec.err_rr)},
                             {"err_tt", RunLog::num(rec.err_tt)},
                             {"energy_err", RunLog::num(rec.energy_err)}});
    out.push_back(rec);
  }
  return out;
}

double loglog_slope(const std::vector<ConvergenceRecord>& recs, double ConvergenceRecord::*err, std::size_t begin,
                    std::size_t end) {
  end = std::min(end, recs.size());
  if (end < begin + 2) throw Error("loglog_slope: need at least two records");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double x = std::log(static_cast<double>(recs[i].free_dofs));
    const double y = std::log(recs[i].*err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& recs) {
  const auto old_precision = os.precision(17);
  os << "label,level,free_dofs,err_rr,err_tt,energy_err,seconds\r\n";
  for (const auto& r : recs)
    os << r.label << ',' << r.level << ',' << r.free_dofs << ',' << r.err_rr << ',' << r.err_tt << ','
       << r.energy_err << ',' << r.seconds << "\r\n";
  os.precision(old_precision);
}

}  // namespace ufep
