#include "ufep/driver.hpp"

#include "ufep/estimator.hpp"
#include "ufep/transfer.hpp"
#include "ufep/vtk.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

namespace ufep {

void AmrConfig::validate() const {
  if (num_load_steps < 1) throw ConfigError("num_load_steps must be at least 1");
  if (amr_step_freq < 1) throw ConfigError("amr_step_freq must be at least 1");
  if (num_amr_steps < 0) throw ConfigError("num_amr_steps must be non-negative");
  if (!(theta_r >= 0.0) || !(theta_c >= 0.0) || theta_r + theta_c > 1.0)
    throw ConfigError("need 0 <= theta_r, 0 <= theta_c and theta_r + theta_c <= 1");
  if (!(eta_g_max >= 0.0)) throw ConfigError("eta_g_max must be non-negative");
  if (initial_uniform_level > max_level) throw ConfigError("initial_uniform_level exceeds max_level");
  if (max_level >= kMaxDepth) throw ConfigError("max_level too large");
}

QuadtreeMesh initial_mesh(double length, unsigned level, unsigned max_level, const LevelSet& ls,
                          const CutOptions& opts) {
  QuadtreeMesh mesh = QuadtreeMesh::uniform(length, level, max_level);
  for (;;) {
    const auto classes = classify_cells(mesh, ls, opts);
    std::map<CellId, Mark> marks;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const CellId& c = mesh.leaves()[i];
      if (c.level == 0 || classes[i] != CellClass::exterior) continue;
      // Only complete exterior quadruples; siblings are contiguous in SFC order.
      if (c.child_position() != 0 || i + 3 >= mesh.size()) continue;
      bool all = true;
      for (unsigned k = 1; k < 4; ++k)
        all = all && mesh.leaves()[i + k] == c.parent().child(k) && classes[i + k] == CellClass::exterior;
      if (!all) continue;
      for (unsigned k = 0; k < 4; ++k) marks[mesh.leaves()[i + k]] = Mark::coarsen;
    }
    if (marks.empty()) return mesh;
    auto adapted = refine_and_coarsen(mesh, marks);
    if (adapted.log.coarsened.empty()) return adapted.mesh;
    mesh = std::move(adapted.mesh);
  }
}

namespace {

struct Estimate {
  std::vector<double> eta;
  double eta_g = std::numeric_limits<double>::quiet_NaN();
};

class Runner {
 public:
  Runner(const SimulationSetup& setup, RunLog& log) : setup_(setup), log_(log) {}

  SimulationResult run();

 private:
  Estimate estimate(const Assembler& assembler, const SolverState& solved, const HistoryField& previous, int step);
  std::optional<SolverState> solve(const SolverState& start, double lambda, int step, int* iters);
  void snapshot(const SolverState& s, const std::vector<double>* eta, const std::string& name);

  const SimulationSetup& setup_;
  RunLog& log_;
  SimulationResult result_;
};

Estimate Runner::estimate(const Assembler& assembler, const SolverState& solved, const HistoryField& previous,
                          int step) {
  Estimate e;
  const Eigen::VectorXd u = assembler.expand(solved.u_free, solved.lambda);
  const double scale = 2.0 * setup_.problem.material.shear();
  e.eta = kelly_estimator(assembler, u, previous, scale);
  const double energy = assembler.energy(u, previous);
  if (energy > 0.0) {
    e.eta_g = global_error(e.eta, energy);
  } else {
    log_.warn("eta_undefined", "energy of the solution is not positive", {{"step", RunLog::num(step)}});
  }
  return e;
}

std::optional<SolverState> Runner::solve(const SolverState& start, double lambda, int step, int* iters) {
  const Assembler assembler(start.disc, setup_.problem);
  NewtonResult nr = newton_solve(assembler, start.u_free, start.history, lambda, setup_.newton, &log_, step);
  *iters = nr.iterations();
  if (!nr.converged) {
    result_.failed = true;
    result_.failure = nr.message;
    return std::nullopt;
  }
  return SolverState{start.disc, std::move(nr.u_free), std::move(*nr.history), lambda};
}

void Runner::snapshot(const SolverState& s, const std::vector<double>* eta, const std::string& name) {
  if (setup_.output_dir.empty()) return;
  std::filesystem::create_directories(setup_.output_dir);
  const Assembler assembler(s.disc, setup_.problem);
  const Eigen::VectorXd u = assembler.expand(s.u_free, s.lambda);
  VtkFields f;
  f.displacement = &u;
  f.history = &s.history;
  f.eta = eta;
  write_vtk((std::filesystem::path(setup_.output_dir) / (name + ".vtu")).string(), *s.disc, f);
  ++result_.vtk_files;
}

SimulationResult Runner::run() {
  const AmrConfig& amr = setup_.amr;
  amr.validate();

  QuadtreeMesh mesh0 = initial_mesh(setup_.length, amr.initial_uniform_level, amr.max_level, setup_.level_set,
                                    setup_.discretization.cut);
  auto disc = Discretization::build(std::move(mesh0), setup_.level_set, setup_.discretization);
  SolverState current{disc, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc->space().free_count())),
                      HistoryField(disc->history_layout()), 0.0};
  log_.event("initial_mesh", {{"cells", RunLog::num(disc->mesh().size())},
                              {"active", RunLog::num(disc->active_leaves().size())},
                              {"free_dofs", RunLog::num(disc->space().free_count())}});

  const int n_steps = amr.num_load_steps;
  for (int step = 1; step <= n_steps; ++step) {
    const double lambda = setup_.load_scale * static_cast<double>(step) / n_steps;
    // Restore point for the adaptation cycles of this step.
    SolverState checkpoint = current;
    log_.event("load_step", {{"step", RunLog::num(step)}, {"lambda", RunLog::num(lambda)}});

    int iters = 0;
    auto solved = solve(checkpoint, lambda, step, &iters);
    if (!solved) {
      result_.state = checkpoint;
      snapshot(checkpoint, nullptr, "checkpoint");
      return std::move(result_);
    }
    Estimate est = estimate(Assembler(solved->disc, setup_.problem), *solved, checkpoint.history, step);
    snapshot(*solved, &est.eta, std::to_string(step) + "_0");

    int cycles = 0;
    if (step % amr.amr_step_freq == 0) {
      while (std::isfinite(est.eta_g) && est.eta_g > amr.eta_g_max && cycles < amr.num_amr_steps) {
        ++cycles;
        const Discretization& old_disc = *checkpoint.disc;
        const auto marks = mark_cells(old_disc.mesh(), est.eta, old_disc.geometry().classes(), amr.theta_r,
                                      amr.theta_c);
        AdaptResult adapted = refine_and_coarsen(old_disc.mesh(), marks);
        auto new_disc = Discretization::build(std::move(adapted.mesh), setup_.level_set, setup_.discretization);

        const Assembler old_asm(checkpoint.disc, setup_.problem);
        TransferResult tr = transfer_fields(old_disc, *new_disc, adapted.log,
                                            old_asm.expand(checkpoint.u_free, checkpoint.lambda), checkpoint.history);
        if (tr.clamped_alpha > 0)
          log_.warn("alpha_clamped", "negative transferred alpha reset to zero",
                    {{"step", RunLog::num(step)}, {"count", RunLog::num(tr.clamped_alpha)}});

        AdaptationEvent ev;
        ev.load_step = step;
        ev.cycle = cycles;
        ev.eta_before = est.eta_g;
        ev.cells_before = old_disc.mesh().size();
        ev.dofs_before = old_disc.space().free_count();

        checkpoint = SolverState{new_disc, std::move(tr.u_free), std::move(tr.history), checkpoint.lambda};
        solved = solve(checkpoint, lambda, step, &iters);
        if (!solved) {
          result_.state = checkpoint;
          snapshot(checkpoint, nullptr, "checkpoint");
          return std::move(result_);
        }
        est = estimate(Assembler(solved->disc, setup_.problem), *solved, checkpoint.history, step);
        snapshot(*solved, &est.eta, std::to_string(step) + "_" + std::to_string(cycles));

        ev.eta_after = est.eta_g;
        ev.cells_after = new_disc->mesh().size();
        ev.dofs_after = new_disc->space().free_count();
        result_.events.push_back(ev);
        log_.event("adapt", {{"step", RunLog::num(step)},
                             {"cycle", RunLog::num(cycles)},
                             {"eta_before", RunLog::num(ev.eta_before)},
                             {"eta_after", RunLog::num(ev.eta_after)},
                             {"cells_before", RunLog::num(ev.cells_before)},
                             {"cells_after", RunLog::num(ev.cells_after)},
                             {"refined", RunLog::num(adapted.log.refined.size())},
                             {"coarsened", RunLog::num(adapted.log.coarsened.size())}});
      }
      if (std::isfinite(est.eta_g) && est.eta_g > amr.eta_g_max && cycles == amr.num_amr_steps)
        log_.warn("amr_budget_exhausted", "estimated error above threshold after the last allowed cycle",
                  {{"step", RunLog::num(step)}, {"eta_g", RunLog::num(est.eta_g)}});
    }

    current = std::move(*solved);
    result_.history_before = checkpoint.history;
    StepReport rep;
    rep.load_step = step;
    rep.amr_cycles = cycles;
    rep.free_dofs = current.disc->space().free_count();
    rep.total_cells = current.disc->mesh().size();
    rep.active_cells = current.disc->active_leaves().size();
    rep.active_fraction = current.disc->active_fraction();
    rep.eta_g = est.eta_g;
    rep.newton_iters = iters;
    result_.reports.push_back(rep);
    log_.event("step_report", {{"step", RunLog::num(step)},
                               {"cycles", RunLog::num(cycles)},
                               {"free_dofs", RunLog::num(rep.free_dofs)},
                               {"cells", RunLog::num(rep.total_cells)},
                               {"active_fraction", RunLog::num(rep.active_fraction)},
                               {"eta_g", RunLog::num(rep.eta_g)},
                               {"newton_iters", RunLog::num(iters)}});
  }
  result_.state = std::move(current);
  return std::move(result_);
}

}  // namespace

SimulationResult run_simulation(const SimulationSetup& setup, RunLog& log) {
  Runner runner(setup, log);
  return runner.run();
}

void write_reports_csv(std::ostream& os, const std::vector<StepReport>& reports) {
  const auto old_precision = os.precision(17);
  os << "load_step,amr_cycles,free_dofs,total_cells,active_cells,active_fraction,eta_g,newton_iters\r\n";
  for (const auto& r : reports) {
    os << r.load_step << ',' << r.amr_cycles << ',' << r.free_dofs << ',' << r.total_cells << ',' << r.active_cells
       << ',' << r.active_fraction << ',';
    if (std::isfinite(r.eta_g)) os << r.eta_g;
    os << ',' << r.newton_iters << "\r\n";
  }
  os.precision(old_precision);
}

}  // namespace ufep
