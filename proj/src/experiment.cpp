// Copyright 2026 The nmqsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "nmqsd/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nmqsd/csv.hpp"
#include "nmqsd/kernels.hpp"
#include "nmqsd/master.hpp"
#include "nmqsd/oracle.hpp"
#include "nmqsd/series.hpp"
#include "nmqsd/trajectories.hpp"

namespace nmqsd {

using Json = nlohmann::ordered_json;

bool RunReport::ok() const noexcept {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskReport& t) { return t.ok; });
}

namespace {

MatrixXc kron(const MatrixXc& A, const MatrixXc& B) {
  MatrixXc out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  }
  return out;
}

/// Single-qubit operator on qubit q of an n-qubit register, qubit 0 leftmost.
MatrixXc on_qubit(const MatrixXc& op, int q, int n) {
  MatrixXc out = MatrixXc::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, i == q ? op : MatrixXc::Identity(2, 2));
  return out;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json bath_json(const ExperimentConfig& c) {
  Json b;
  if (const auto* d = std::get_if<DiscreteModes>(&c.bath)) {
    b["type"] = "discrete_modes";
    b["temperature"] = d->temperature;
    Json modes = Json::array();
    for (std::size_t i = 0; i < d->modes.size(); ++i) {
      Json m;
      m["g"] = complex_json(d->modes[i].g);
      m["omega"] = d->modes[i].omega;
      m["mean_occupation"] = mean_occupation(d->modes[i].omega, d->temperature);
      if (i < c.mode_dims.size() && c.mode_dims[i] > 0) m["mode_dim"] = c.mode_dims[i];
      modes.push_back(m);
    }
    b["modes"] = modes;
  } else {
    const auto& e = std::get<ExponentialKernel>(c.bath);
    b["type"] = "exponential_kernel";
    b["gamma1"] = e.gamma1;
    b["gamma2"] = e.gamma2;
    b["kappa"] = e.kappa;
    b["omega_c"] = e.omega_c;
  }
  return b;
}

Json config_object(const ExperimentConfig& c) {
  Json j;
  j["model"] = to_string(c.model);
  j["Omega"] = c.Omega;
  j["system_dim"] = c.system_dim;
  j["bath"] = bath_json(c);
  j["grid"] = {{"t_max", c.grid.t_max()}, {"n_steps", c.grid.n_steps()}, {"dt", c.grid.dt()}};
  if (c.initial_state) {
    const InitialState& s = *c.initial_state;
    switch (s.kind) {
      case InitialState::Kind::fock: j["initial_state"] = {{"fock", s.fock_n}}; break;
      case InitialState::Kind::coherent:
        j["initial_state"] = {{"coherent", complex_json(s.amplitude)}};
        break;
      case InitialState::Kind::register_basis: j["initial_state"] = {{"register", s.basis}}; break;
    }
  } else {
    j["initial_state"] = nullptr;
  }
  Json runs = Json::array();
  for (const Task& t : c.runs) {
    Json p = Json::object();
    if (t.kind == TaskKind::trajectories) {
      p["M"] = t.trajectories;
      p["seed"] = t.seed;
      p["noise"] = t.noise == NoiseMethod::cholesky ? "cholesky" : "discrete_modes";
    } else if (t.kind == TaskKind::lindblad) {
      if (t.gamma1) p["gamma1"] = *t.gamma1;
      if (t.gamma2) p["gamma2"] = *t.gamma2;
    } else if (t.kind == TaskKind::compare) {
      Json s = Json::array();
      for (TaskKind k : t.series) s.push_back(to_string(k));
      p["series"] = s;
    }
    runs.push_back({{to_string(t.kind), p}});
  }
  j["runs"] = runs;
  j["output_dir"] = c.output_dir;
  const Tolerances& tol = c.tolerances;
  j["tolerances"] = {{"compare", tol.compare},       {"trajectory_compare", tol.trajectory_compare},
                     {"trace", tol.trace},           {"herm", tol.herm},
                     {"positivity", tol.positivity}, {"energy", tol.energy}};
  return j;
}

Json series_json(const DensitySeries& s) {
  return {{"max_trace_defect", s.max_trace_defect()},
          {"max_herm_defect", s.max_herm_defect()},
          {"min_eigenvalue", s.min_eigenvalue()},
          {"max_top_population", s.max_top_population},
          {"hermitization_residual", s.max_hermitization_residual}};
}

/// Deterministic-integrator conservation checks; violations become warnings.
void conservation_warnings(const DensitySeries& s, const Tolerances& tol, bool check_trace,
                           bool fock, TaskReport& rep) {
  if (check_trace && s.max_trace_defect() > tol.trace) {
    rep.warnings.push_back("trace defect " + std::to_string(s.max_trace_defect()) + " above tolerance");
  }
  if (s.max_herm_defect() > tol.herm) {
    rep.warnings.push_back("Hermiticity defect above tolerance");
  }
  if (s.min_eigenvalue() < -tol.positivity) {
    rep.warnings.push_back("negative eigenvalue " + std::to_string(s.min_eigenvalue()));
  }
  if (fock && s.leakage()) {
    rep.warnings.push_back("top-level population " + std::to_string(s.max_top_population) +
                           " exceeds the truncation threshold");
  }
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, const RunOptions& o)
      : cfg_(c), opt_(o), dir_(o.output_dir.value_or(c.output_dir)) {}

  RunReport run() {
    std::filesystem::create_directories(dir_);
    RunReport report;
    report.output_dir = dir_.string();
    Json tasks = Json::array();
    for (TaskKind k : {TaskKind::coefficients, TaskKind::master, TaskKind::lindblad,
                       TaskKind::oracle, TaskKind::trajectories, TaskKind::compare}) {
      const auto it = std::find_if(cfg_.runs.begin(), cfg_.runs.end(),
                                   [k](const Task& t) { return t.kind == k; });
      if (it == cfg_.runs.end()) continue;
      TaskReport rep;
      rep.name = to_string(k);
      Json diag = Json::object();
      try {
        dispatch(*it, rep, diag);
      } catch (const std::exception& e) {
        rep.ok = false;
        rep.error = e.what();
      }
      Json tj;
      tj["task"] = rep.name;
      tj["status"] = rep.ok ? "ok" : "failed";
      if (!rep.ok) tj["error"] = rep.error;
      tj["files"] = rep.files;
      tj["warnings"] = rep.warnings;
      tj["diagnostics"] = diag;
      tasks.push_back(tj);
      report.tasks.push_back(std::move(rep));
    }
    Json root;
    root["nmqsd_version"] = kVersion;
    root["config"] = config_object(cfg_);
    root["tasks"] = tasks;
    root["status"] = report.ok() ? "ok" : "failed";
    report.json = root.dump(2) + "\n";
    std::ofstream(dir_ / "report.json") << report.json;
    return report;
  }

 private:
  const ExperimentConfig& cfg_;
  RunOptions opt_;
  std::filesystem::path dir_;
  std::optional<CorrelationTable> corr_;
  std::optional<CoefficientTable> coeffs_;
  std::optional<DephasingCoefficients> deph_;
  std::map<TaskKind, DensitySeries> series_;

  bool dephasing() const { return cfg_.model == ModelKind::dephasing; }

  const CorrelationTable& corr() {
    if (!corr_) corr_ = correlation_table(cfg_.bath, cfg_.grid);
    return *corr_;
  }

  DensityMatrix rho0() const {
    const StateVector psi = initial_vector(cfg_);
    return psi * psi.adjoint();
  }

  std::ofstream open(const std::string& name, TaskReport& rep) {
    rep.files.push_back(name);
    std::ofstream out(dir_ / name);
    if (!out) throw Error(ErrorCode::config, "cannot write " + (dir_ / name).string());
    return out;
  }

  void write_series(const std::string& name, const DensitySeries& s, TaskReport& rep) {
    const ModelOperators ops = model_operators(cfg_);
    std::ofstream out = open(name, rep);
    write_series_csv(s, ops.lowering, ops.number, out);
  }

  void dispatch(const Task& t, TaskReport& rep, Json& diag) {
    switch (t.kind) {
      case TaskKind::coefficients: coefficients(rep, diag); break;
      case TaskKind::master: master(rep, diag); break;
      case TaskKind::lindblad: lindblad(t, rep, diag); break;
      case TaskKind::oracle: oracle(rep, diag); break;
      case TaskKind::trajectories: trajectories(t, rep, diag); break;
      case TaskKind::compare: compare(t, rep, diag); break;
    }
  }

  void ensure_coefficients() {
    if (dephasing()) {
      if (!deph_) deph_ = dephasing_coefficients(corr(), 0.0);
    } else if (!coeffs_) {
      coeffs_ = master_coefficients(corr(), cfg_.Omega, Discretization::toeplitz, opt_.workers);
    }
  }

  void coefficients(TaskReport& rep, Json& diag) {
    ensure_coefficients();
    if (dephasing()) {
      std::ofstream out = open("dephasing_coefficients.csv", rep);
      out << "t,re_f,im_f,re_g,im_g\n";
      for (Index k = 0; k < deph_->grid.size(); ++k) {
        write_row(out, {deph_->grid.time(k), deph_->f(k).real(), deph_->f(k).imag(),
                        deph_->g(k).real(), deph_->g(k).imag()});
      }
      diag["kappa"] = deph_->kappa;
      diag["f_final"] = complex_json(deph_->f(deph_->f.size() - 1));
      return;
    }
    const CoefficientTable& c = *coeffs_;
    std::ofstream out = open("coefficients.csv", rep);
    write_coefficients_csv(c, out);
    const double dc = (c.c + c.a.conjugate()).cwiseAbs().maxCoeff();
    const double dd = (c.d + c.b.conjugate()).cwiseAbs().maxCoeff();
    diag["max_condition"] = c.max_condition;
    diag["ill_conditioned_rows"] = c.ill_conditioned_rows;
    diag["max_abs_c_plus_conj_a"] = dc;
    diag["max_abs_d_plus_conj_b"] = dd;
    diag["a_final"] = complex_json(c.a(c.a.size() - 1));
    diag["b_final"] = complex_json(c.b(c.b.size() - 1));
    if (c.ill_conditioned_rows > 0) {
      rep.warnings.push_back(std::to_string(c.ill_conditioned_rows) +
                             " rows with condition estimate above 1e12");
    }
    if (dc != 0.0 || dd != 0.0) rep.warnings.push_back("derived coefficients c, d are inconsistent");
  }

  void master(TaskReport& rep, Json& diag) {
    ensure_coefficients();
    const ModelOperators ops = model_operators(cfg_);
    DensitySeries s = dephasing() ? integrate_dephasing(rho0(), *deph_, ops.H, ops.L)
                                  : integrate_convolutionless(rho0(), *coeffs_, cfg_.Omega,
                                                              build_fock_space<double>(cfg_.system_dim));
    write_series("master.csv", s, rep);
    diag = series_json(s);
    conservation_warnings(s, cfg_.tolerances, true, !dephasing(), rep);
    series_.emplace(TaskKind::master, std::move(s));
  }

  void lindblad(const Task& t, TaskReport& rep, Json& diag) {
    double g1 = 0.0, g2 = 0.0;
    if (const auto* e = std::get_if<ExponentialKernel>(&cfg_.bath)) {
      g1 = e->gamma1;
      g2 = e->gamma2;
    }
    g1 = t.gamma1.value_or(g1);
    g2 = t.gamma2.value_or(g2);
    const ModelOperators ops = model_operators(cfg_);
    DensitySeries s = integrate_lindblad(rho0(), g1, g2, ops.L, ops.H, cfg_.grid);
    write_series("lindblad.csv", s, rep);
    diag = series_json(s);
    diag["gamma1"] = g1;
    diag["gamma2"] = g2;
    conservation_warnings(s, cfg_.tolerances, true, !dephasing(), rep);
    series_.emplace(TaskKind::lindblad, std::move(s));
  }

  void oracle(TaskReport& rep, Json& diag) {
    const auto& b = std::get<DiscreteModes>(cfg_.bath);
    OracleConfig oc{cfg_.system_dim, {}, b.temperature, cfg_.Omega};
    for (std::size_t m = 0; m < b.modes.size(); ++m) {
      oc.modes.push_back({b.modes[m].g, b.modes[m].omega, cfg_.mode_dims[m]});
    }
    OracleRun run = oracle_reduced_series(rho0(), oc, cfg_.grid);
    write_series("oracle.csv", run.reduced, rep);
    diag = series_json(run.reduced);
    diag["total_dimension"] = total_dimension(oc);
    diag["pure_states"] = run.pure_states;
    diag["dropped_weight"] = run.dropped_weight;
    diag["energy_drift"] = run.energy_drift;
    Json leak = Json::array();
    for (const auto& m : oc.modes) leak.push_back(thermal_leakage(m.omega, oc.temperature, m.mode_dim));
    diag["truncation_leakage"] = leak;
    if (run.energy_drift > cfg_.tolerances.energy) {
      rep.warnings.push_back("<H_tot> drift " + std::to_string(run.energy_drift) + " above tolerance");
    }
    conservation_warnings(run.reduced, cfg_.tolerances, false, true, rep);
    series_.emplace(TaskKind::oracle, std::move(run.reduced));
  }

  void trajectories(const Task& t, TaskReport& rep, Json& diag) {
    EnsembleOptions eo;
    eo.trajectories = t.trajectories;
    eo.seed = t.seed;
    eo.workers = opt_.workers;
    eo.method = t.noise;
    eo.bath = cfg_.bath;
    const StateVector psi0 = initial_vector(cfg_);
    EnsembleRun run = [&] {
      if (dephasing()) {
        const ModelOperators ops = model_operators(cfg_);
        return run_dephasing_ensemble(psi0, corr(), DephasingSystem{ops.H, ops.L, 0.0}, eo);
      }
      const TrajectoryKernels kern = trajectory_kernels(corr(), cfg_.Omega, opt_.workers);
      diag["kernel_max_condition"] = kern.max_condition;
      return run_ensemble(psi0, corr(), kern, build_fock_space<double>(cfg_.system_dim), eo);
    }();
    const EnsembleResult& res = run.result;
    write_series("trajectories.csv", res.rho_series, rep);
    Json d = series_json(res.rho_series);
    for (auto& [k, v] : d.items()) diag[k] = v;
    const Index last = res.norm_mean.size() - 1;
    diag["trajectories"] = res.n_trajectories;
    diag["final_norm_mean"] = res.norm_mean(last);
    diag["final_norm_variance"] = res.norm_var(last);
    diag["leaking_trajectories"] = res.leaking_trajectories;
    if (res.leaking_trajectories > 0) {
      rep.warnings.push_back(std::to_string(res.leaking_trajectories) +
                             " trajectories exceeded the truncation threshold");
    }
    // noise statistics on the first paths of the same streams
    const Index check = std::min<Index>(t.trajectories, 2000);
    if (check >= 100) {
      const NoiseSampler sampler(corr(), t.noise, cfg_.bath);
      std::vector<NoisePath> paths;
      paths.reserve(static_cast<std::size_t>(check));
      for (Index m = 0; m < check; ++m) paths.push_back(sampler.sample(t.seed, static_cast<std::uint64_t>(m)));
      const StatReport st = verify_noise_statistics(paths, corr());
      diag["noise_statistics"] = {{"samples", st.samples},
                                  {"dev_zstar_z", st.dev_zstar_z},
                                  {"dev_z_z", st.dev_z_z},
                                  {"dev_wstar_w", st.dev_wstar_w},
                                  {"dev_w_w", st.dev_w_w},
                                  {"dev_zstar_w", st.dev_zstar_w},
                                  {"max_ratio_to_5sigma", st.max_ratio},
                                  {"passed", st.passed}};
      if (!st.passed) rep.warnings.push_back("noise statistics outside 5 sigma bounds");
    }
    series_.emplace(TaskKind::trajectories, res.rho_series);
  }

  void compare(const Task& t, TaskReport& rep, Json& diag) {
    std::vector<TaskKind> names = t.series;
    if (names.empty()) {
      for (const Task& u : cfg_.runs) {
        if (u.kind != TaskKind::compare && u.kind != TaskKind::coefficients) names.push_back(u.kind);
      }
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    for (TaskKind k : names) {
      if (!series_.count(k)) {
        throw Error(ErrorCode::staging, "series '" + to_string(k) + "' is unavailable (task failed)");
      }
    }
    std::vector<std::pair<TaskKind, TaskKind>> pairs;
    std::vector<std::vector<double>> curves;
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        pairs.emplace_back(names[i], names[j]);
        curves.push_back(trace_distances(series_.at(names[i]), series_.at(names[j])));
      }
    }
    std::ofstream out = open("compare.csv", rep);
    out << 't';
    for (const auto& [a, b] : pairs) out << ',' << to_string(a) << "_vs_" << to_string(b);
    out << '\n';
    char buf[32];
    for (Index k = 0; k < cfg_.grid.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", cfg_.grid.time(k));
      out << buf;
      for (const auto& c : curves) {
        std::snprintf(buf, sizeof(buf), "%.17g", c[static_cast<std::size_t>(k)]);
        out << ',' << buf;
      }
      out << '\n';
    }
    Json jp = Json::array();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const bool stat = pairs[p].first == TaskKind::trajectories || pairs[p].second == TaskKind::trajectories;
      const double tol = stat ? cfg_.tolerances.trajectory_compare : cfg_.tolerances.compare;
      const double mx = *std::max_element(curves[p].begin(), curves[p].end());
      jp.push_back({{"a", to_string(pairs[p].first)},
                    {"b", to_string(pairs[p].second)},
                    {"max_trace_distance", mx},
                    {"tolerance", tol},
                    {"within_tolerance", mx <= tol}});
      if (mx > tol) {
        rep.warnings.push_back(to_string(pairs[p].first) + " vs " + to_string(pairs[p].second) +
                               " max trace distance " + std::to_string(mx) + " above tolerance");
      }
    }
    diag["pairs"] = jp;
  }
};

}  // namespace

ModelOperators model_operators(const ExperimentConfig& config) {
  ModelOperators ops;
  if (config.model == ModelKind::damped_oscillator) {
    const FockSpace f = build_fock_space<double>(config.system_dim);
    ops.H = config.Omega * f.number_op;
    ops.L = f.annihilator;
    ops.lowering = f.annihilator;
    ops.number = f.number_op;
    return ops;
  }
  // |0> ground, |1> excited: sigma_z = diag(-1, 1), sigma_minus = |0><1|
  const int n = config.initial_state ? static_cast<int>(config.initial_state->basis.size()) : 0;
  if (n < 1) throw Error(ErrorCode::config, "dephasing model needs a register state");
  MatrixXc sz = MatrixXc::Zero(2, 2);
  sz(0, 0) = -1.0;
  sz(1, 1) = 1.0;
  MatrixXc sm = MatrixXc::Zero(2, 2);
  sm(0, 1) = 1.0;
  const Index dim = Index{1} << n;
  ops.L = MatrixXc::Zero(dim, dim);
  ops.lowering = MatrixXc::Zero(dim, dim);
  for (int q = 0; q < n; ++q) {
    ops.L += on_qubit(sz, q, n);
    ops.lowering += on_qubit(sm, q, n);
  }
  ops.H = config.Omega * ops.L;
  ops.number = 0.5 * (MatrixXc::Identity(dim, dim) + ops.L);
  return ops;
}

StateVector initial_vector(const ExperimentConfig& config) {
  if (!config.initial_state) throw Error(ErrorCode::config, "initial_state is required");
  const InitialState& s = *config.initial_state;
  switch (s.kind) {
    case InitialState::Kind::fock: return fock_state(config.system_dim, s.fock_n);
    case InitialState::Kind::coherent: return coherent_state(config.system_dim, s.amplitude);
    case InitialState::Kind::register_basis: {
      const double r = 1.0 / std::sqrt(2.0);
      VectorXc psi = VectorXc::Ones(1);
      for (char ch : s.basis) {
        VectorXc q(2);
        switch (ch) {
          case '0': q << 1.0, 0.0; break;
          case '1': q << 0.0, 1.0; break;
          case '+': q << r, r; break;
          case '-': q << r, -r; break;
          default: throw Error(ErrorCode::config, std::string("bad register character ") + ch);
        }
        psi = kron(psi, q);
      }
      return psi;
    }
  }
  throw Error(ErrorCode::config, "unknown initial state");
}

std::string config_json(const ExperimentConfig& config) { return config_object(config).dump(2); }

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  return Runner(config, options).run();
}

}  // namespace nmqsd
