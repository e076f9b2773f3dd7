#include "bolza/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace bolza {

namespace {

constexpr double kNodeTol = 1e-12;

// One RK4 step of the autonomous field y' = b(y) u over step h.
void rk4_step(const Dynamics& dyn, ControlView u, std::span<double> y, double h,
              std::span<double> scratch) {
  int n = dyn.n;
  double* k1 = scratch.data();
  double* k2 = k1 + n;
  double* k3 = k2 + n;
  double* k4 = k3 + n;
  double* tmp = k4 + n;
  auto eval = [&](const double* base, double scale, double* out) {
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + scale * base[i];
    dyn.apply(StateView(tmp, static_cast<size_t>(n)), u,
              std::span<double>(out, static_cast<size_t>(n)));
  };
  dyn.apply(StateView(y.data(), static_cast<size_t>(n)), u,
            std::span<double>(k1, static_cast<size_t>(n)));
  eval(k1, 0.5 * h, k2);
  eval(k2, 0.5 * h, k3);
  eval(k3, h, k4);
  for (int i = 0; i < n; ++i) {
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

// Advances y in place across one cell of length len under constant control.
void advance_cell(const Dynamics& dyn, ControlView u, std::span<double> y,
                  double len, int substeps, std::span<double> scratch) {
  if (dyn.identity) {
    for (int i = 0; i < dyn.n; ++i) y[i] += u[i] * len;
    return;
  }
  double h = len / substeps;
  for (int s = 0; s < substeps; ++s) rk4_step(dyn, u, y, h, scratch);
}

}  // namespace

TimeGrid TimeGrid::uniform(double a, double b, int cells) {
  require(cells >= 1 && b > a, ErrorCode::BadInput, "uniform grid parameters");
  TimeGrid g;
  g.nodes.resize(static_cast<size_t>(cells) + 1);
  for (int k = 0; k <= cells; ++k) {
    g.nodes[static_cast<size_t>(k)] = a + (b - a) * k / cells;
  }
  g.nodes.front() = a;
  g.nodes.back() = b;
  return g;
}

int TimeGrid::locate(double s) const {
  if (s <= nodes.front()) return 0;
  if (s >= nodes.back()) return cells() - 1;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
  return static_cast<int>(it - nodes.begin()) - 1;
}

void TimeGrid::validate() const {
  require(nodes.size() >= 2, ErrorCode::BadInput, "grid needs >= 2 nodes");
  for (size_t k = 0; k + 1 < nodes.size(); ++k) {
    require(std::isfinite(nodes[k]) && nodes[k] < nodes[k + 1],
            ErrorCode::BadInput, "grid nodes must increase strictly");
  }
}

ControlSignal ControlSignal::constant(TimeGrid grid,
                                      std::span<const double> value) {
  grid.validate();
  ControlSignal u;
  u.m = static_cast<int>(value.size());
  int cells = grid.cells();
  u.grid = std::move(grid);
  u.flat.resize(static_cast<size_t>(cells) * u.m);
  for (int k = 0; k < cells; ++k) {
    std::copy(value.begin(), value.end(), u.cell_mut(k).begin());
  }
  return u;
}

double ControlSignal::sup_norm() const {
  double best = 0.0;
  for (int k = 0; k < grid.cells(); ++k) best = std::max(best, norm2(cell(k)));
  return best;
}

double ControlSignal::l1_norm() const {
  KahanSum s;
  for (int k = 0; k < grid.cells(); ++k) s.add(norm2(cell(k)) * grid.cell_len(k));
  return s.value();
}

void ControlSignal::validate() const {
  grid.validate();
  require(m >= 1, ErrorCode::BadInput, "control dimension");
  require(flat.size() == static_cast<size_t>(grid.cells()) * m,
          ErrorCode::BadInput, "control storage does not match grid");
  for (double v : flat) {
    require(std::isfinite(v), ErrorCode::BadInput, "control values must be finite");
  }
}

void StateTrajectory::eval(double s, std::span<double> out) const {
  int k = grid.locate(s);
  double len = grid.cell_len(k);
  double w = std::clamp((s - grid.nodes[static_cast<size_t>(k)]) / len, 0.0, 1.0);
  StateView a = node(k);
  StateView b = node(k + 1);
  for (int i = 0; i < n; ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
}

double StateTrajectory::sup_norm() const {
  double best = 0.0;
  for (int k = 0; k <= grid.cells(); ++k) best = std::max(best, norm2(node(k)));
  return best;
}

double StateTrajectory::lipschitz_rank() const {
  double best = 0.0;
  for (int k = 0; k < grid.cells(); ++k) {
    best = std::max(best, dist2(node(k + 1), node(k)) / grid.cell_len(k));
  }
  return best;
}

void StateTrajectory::validate() const {
  grid.validate();
  require(n >= 1, ErrorCode::BadInput, "state dimension");
  require(flat.size() == static_cast<size_t>(grid.cells() + 1) * n,
          ErrorCode::BadInput, "state storage does not match grid");
  for (double v : flat) {
    require(std::isfinite(v), ErrorCode::BadInput, "state values must be finite");
  }
}

Dynamics Dynamics::make_identity(int n, double theta) {
  Dynamics d;
  d.n = n;
  d.m = n;
  d.identity = true;
  d.theta = theta;
  return d;
}

void Dynamics::apply(StateView y, ControlView u, std::span<double> dy) const {
  if (identity) {
    for (int i = 0; i < n; ++i) dy[i] = u[i];
    return;
  }
  static thread_local std::vector<double> mat;
  mat.resize(static_cast<size_t>(n) * m);
  b(y, mat);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += mat[static_cast<size_t>(i) * m + j] * u[j];
    dy[i] = acc;
  }
}

void ProblemSpec::validate() const {
  require(T > t, ErrorCode::BadInput, "need T > t");
  require(static_cast<int>(x.size()) == model.n, ErrorCode::BadInput,
          "initial state dimension mismatch");
  require(dynamics.n == model.n && dynamics.m == model.m, ErrorCode::BadInput,
          "dynamics dimensions mismatch");
  require(dynamics.theta > 0.0, ErrorCode::BadInput, "theta must be positive");
  if (dynamics.identity) {
    require(model.n == model.m, ErrorCode::BadInput,
            "identity dynamics needs n == m");
  }
  require(state_ok(x), ErrorCode::BadInput, "initial state outside state set");
}

std::function<double(StateView)> endpoint_terminal(std::vector<double> target,
                                                   double tol) {
  require(tol > 0.0, ErrorCode::BadInput, "endpoint tolerance");
  return [target = std::move(target), tol](StateView y) {
    return dist2(y, target) <= tol ? 0.0 : kInf;
  };
}

StateTrajectory integrate_state(const ProblemSpec& problem,
                                const ControlSignal& u, int substeps) {
  problem.validate();
  u.validate();
  require(u.m == problem.model.m, ErrorCode::BadInput, "control dimension mismatch");
  require(std::abs(u.grid.t0() - problem.t) <= kNodeTol &&
              std::abs(u.grid.t1() - problem.T) <= kNodeTol,
          ErrorCode::BadInput, "control grid must span [t, T]");
  require(substeps >= 1, ErrorCode::BadInput, "substeps");
  int n = problem.model.n;
  StateTrajectory y;
  y.grid = u.grid;
  y.n = n;
  y.flat.resize(static_cast<size_t>(u.grid.cells() + 1) * n);
  std::copy(problem.x.begin(), problem.x.end(), y.node_mut(0).begin());
  std::vector<double> state(problem.x.begin(), problem.x.end());
  std::vector<double> scratch(static_cast<size_t>(5 * n));
  for (int k = 0; k < u.grid.cells(); ++k) {
    advance_cell(problem.dynamics, u.cell(k), state, u.grid.cell_len(k),
                 substeps, scratch);
    std::copy(state.begin(), state.end(), y.node_mut(k + 1).begin());
  }
  return y;
}

double dynamics_defect(const ProblemSpec& problem, const StateTrajectory& y,
                       const ControlSignal& u, int substeps) {
  int n = problem.model.n;
  std::vector<double> state(static_cast<size_t>(n));
  std::vector<double> scratch(static_cast<size_t>(5 * n));
  double worst = 0.0;
  for (int k = 0; k < u.grid.cells(); ++k) {
    StateView from = y.node(k);
    std::copy(from.begin(), from.end(), state.begin());
    advance_cell(problem.dynamics, u.cell(k), state, u.grid.cell_len(k),
                 substeps, scratch);
    double diff = dist2(state, y.node(k + 1));
    worst = std::max(worst, diff / (1.0 + norm2(y.node(k + 1))));
  }
  return worst;
}

namespace {

void check_pair_membership(const ProblemSpec& problem, const StateTrajectory& y,
                           const ControlSignal& u) {
  for (int k = 0; k < u.grid.cells(); ++k) {
    require(problem.cone_ok(u.cell(k)), ErrorCode::ConeViolation,
            "control leaves the control cone at cell " + std::to_string(k));
  }
  for (int k = 0; k <= u.grid.cells(); ++k) {
    require(problem.state_ok(y.node(k)), ErrorCode::InvalidPair,
            "state leaves the state set at node " + std::to_string(k));
  }
}

}  // namespace

AdmissiblePair make_admissible_pair(std::shared_ptr<const ProblemSpec> problem,
                                    ControlSignal u, int substeps) {
  require(problem != nullptr, ErrorCode::BadInput, "null problem");
  StateTrajectory y = integrate_state(*problem, u, substeps);
  check_pair_membership(*problem, y, u);
  AdmissiblePair pair;
  pair.problem = std::move(problem);
  pair.y = std::move(y);
  pair.u = std::move(u);
  pair.dynamics_residual = 0.0;
  return pair;
}

AdmissiblePair assemble_admissible_pair(std::shared_ptr<const ProblemSpec> problem,
                                        StateTrajectory y, ControlSignal u,
                                        const PairCheckConfig& cfg) {
  require(problem != nullptr, ErrorCode::BadInput, "null problem");
  problem->validate();
  y.validate();
  u.validate();
  require(y.grid.nodes == u.grid.nodes, ErrorCode::InvalidPair,
          "state and control grids differ");
  require(y.n == problem->model.n && u.m == problem->model.m,
          ErrorCode::InvalidPair, "pair dimensions mismatch");
  require(std::abs(u.grid.t0() - problem->t) <= kNodeTol &&
              std::abs(u.grid.t1() - problem->T) <= kNodeTol,
          ErrorCode::InvalidPair, "pair grid must span [t, T]");
  require(dist2(y.node(0), problem->x) <= kNodeTol * (1.0 + norm2(problem->x)),
          ErrorCode::InvalidPair, "state does not start at x");
  check_pair_membership(*problem, y, u);
  double defect = dynamics_defect(*problem, y, u, cfg.substeps);
  require(defect <= cfg.residual_tol, ErrorCode::InvalidPair,
          "dynamics defect " + std::to_string(defect) + " exceeds tolerance");
  AdmissiblePair pair;
  pair.problem = std::move(problem);
  pair.y = std::move(y);
  pair.u = std::move(u);
  pair.dynamics_residual = defect;
  return pair;
}

CostBreakdown evaluate_cost_detail(const AdmissiblePair& pair,
                                   const QuadConfig& cfg) {
  require(pair.problem != nullptr, ErrorCode::InvalidPair, "pair without problem");
  const ProblemSpec& pb = *pair.problem;
  require(pair.y.grid.nodes == pair.u.grid.nodes, ErrorCode::InvalidPair,
          "state and control grids differ");
  CostBreakdown out;
  KahanSum running, err;
  std::vector<double> ybuf(static_cast<size_t>(pair.y.n));
  for (int k = 0; k < pair.u.grid.cells() && !out.infinite; ++k) {
    ControlView uk = pair.u.cell(k);
    auto f = [&](double s) {
      pair.y.eval(s, ybuf);
      return pb.model.value(s, ybuf, uk);
    };
    QuadResult q = integrate_adaptive(f, pair.u.grid.nodes[static_cast<size_t>(k)],
                                      pair.u.grid.nodes[static_cast<size_t>(k) + 1], cfg);
    if (q.hit_infinite) {
      out.infinite = true;
      break;
    }
    running.add(q.value);
    err.add(q.error);
  }
  out.terminal = pb.g(pair.y.node(pair.y.grid.cells()));
  if (out.infinite || !std::isfinite(out.terminal)) {
    out.running = out.infinite ? kInf : running.value();
    out.total = kInf;
    out.infinite = true;
    return out;
  }
  out.running = running.value();
  out.quad_error = err.value();
  out.total = out.running + out.terminal;
  return out;
}

double evaluate_cost(const AdmissiblePair& pair, const QuadConfig& cfg) {
  return evaluate_cost_detail(pair, cfg).total;
}

IntervalSet sublevel_cells(const ControlSignal& u, double sigma) {
  IntervalSet set;
  for (int k = 0; k < u.grid.cells(); ++k) {
    if (norm2(u.cell(k)) < sigma) {
      set.add(u.grid.nodes[static_cast<size_t>(k)],
              u.grid.nodes[static_cast<size_t>(k) + 1]);
    }
  }
  return set;
}

MeasureBoundReport check_measure_bound(const AdmissiblePair& pair, double B,
                                       double sigma) {
  const ProblemSpec& pb = *pair.problem;
  double t = pb.t, T = pb.T;
  const LinearGrowth& lg = pb.model.growth;
  MeasureBoundReport rep;
  rep.sigma = sigma;
  rep.c_delta_B = (B + lg.d * (T - t)) / (lg.alpha * (T - t));
  require(sigma > rep.c_delta_B, ErrorCode::PreconditionViolated,
          "sigma must exceed c_t(B)");
  rep.measured = sublevel_cells(pair.u, sigma).measure();
  rep.required = (1.0 - rep.c_delta_B / sigma) * (T - t);
  rep.holds = rep.measured + 1e-12 * (T - t) >= rep.required;
  return rep;
}

AdmissiblePair refine_pair(const AdmissiblePair& pair,
                           const std::vector<double>& extra_breakpoints,
                           int substeps) {
  const TimeGrid& old = pair.u.grid;
  std::vector<double> extras;
  for (double s : extra_breakpoints) {
    if (s > old.t0() && s < old.t1() &&
        !std::binary_search(old.nodes.begin(), old.nodes.end(), s)) {
      extras.push_back(s);
    }
  }
  std::sort(extras.begin(), extras.end());
  extras.erase(std::unique(extras.begin(), extras.end()), extras.end());
  if (extras.empty()) return pair;

  TimeGrid fine;
  fine.nodes.reserve(old.nodes.size() + extras.size());
  std::merge(old.nodes.begin(), old.nodes.end(), extras.begin(), extras.end(),
             std::back_inserter(fine.nodes));
  fine.validate();

  int n = pair.y.n, m = pair.u.m;
  const Dynamics& dyn = pair.problem->dynamics;
  StateTrajectory y;
  y.grid = fine;
  y.n = n;
  y.flat.resize((fine.nodes.size()) * static_cast<size_t>(n));
  ControlSignal u;
  u.grid = fine;
  u.m = m;
  u.flat.resize(static_cast<size_t>(fine.cells()) * m);

  std::vector<double> state(static_cast<size_t>(n));
  std::vector<double> scratch(static_cast<size_t>(5 * n));
  std::copy(pair.y.node(0).begin(), pair.y.node(0).end(), y.node_mut(0).begin());
  std::copy(pair.y.node(0).begin(), pair.y.node(0).end(), state.begin());
  int old_cell = 0;
  for (int k = 0; k < fine.cells(); ++k) {
    double a = fine.nodes[static_cast<size_t>(k)];
    double b = fine.nodes[static_cast<size_t>(k) + 1];
    while (old.nodes[static_cast<size_t>(old_cell) + 1] <= a + 0.0) {
      ++old_cell;
    }
    ControlView uk = pair.u.cell(old_cell);
    std::copy(uk.begin(), uk.end(), u.cell_mut(k).begin());
    if (b >= old.nodes[static_cast<size_t>(old_cell) + 1]) {
      // Cell ends on an original node: keep the original value exactly.
      std::copy(pair.y.node(old_cell + 1).begin(), pair.y.node(old_cell + 1).end(),
                y.node_mut(k + 1).begin());
      std::copy(pair.y.node(old_cell + 1).begin(), pair.y.node(old_cell + 1).end(),
                state.begin());
    } else if (dyn.identity) {
      for (int i = 0; i < n; ++i) state[static_cast<size_t>(i)] += uk[i] * (b - a);
      std::copy(state.begin(), state.end(), y.node_mut(k + 1).begin());
    } else {
      advance_cell(dyn, uk, state, b - a, substeps, scratch);
      std::copy(state.begin(), state.end(), y.node_mut(k + 1).begin());
    }
  }
  AdmissiblePair out;
  out.problem = pair.problem;
  out.y = std::move(y);
  out.u = std::move(u);
  out.dynamics_residual =
      dynamics_defect(*pair.problem, out.y, out.u, substeps);
  return out;
}

}  // namespace bolza
