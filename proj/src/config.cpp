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


#include "nmqsd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "nmqsd/oracle.hpp"

namespace nmqsd {

std::string to_string(ModelKind m) {
  return m == ModelKind::damped_oscillator ? "damped_oscillator" : "dephasing";
}

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::coefficients: return "coefficients";
    case TaskKind::trajectories: return "trajectories";
    case TaskKind::master: return "master";
    case TaskKind::lindblad: return "lindblad";
    case TaskKind::oracle: return "oracle";
    case TaskKind::compare: return "compare";
  }
  return "unknown";
}

bool ExperimentConfig::has(TaskKind k) const {
  return std::any_of(runs.begin(), runs.end(), [k](const Task& t) { return t.kind == k; });
}

namespace {

std::optional<TaskKind> task_from_string(const std::string& s) {
  for (TaskKind k : {TaskKind::coefficients, TaskKind::trajectories, TaskKind::master,
                     TaskKind::lindblad, TaskKind::oracle, TaskKind::compare}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool is_series_task(TaskKind k) {
  return k == TaskKind::trajectories || k == TaskKind::master || k == TaskKind::lindblad ||
         k == TaskKind::oracle;
}

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

  bool map(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> keys) {
    if (!n.IsMap()) {
      fail(path, "expected a mapping");
      return false;
    }
    for (const auto& kv : n) {
      const std::string key = kv.first.Scalar();
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        fail(join(path, key), "unknown key");
      }
    }
    return true;
  }

  std::optional<double> real(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) {
      fail(path, "expected a real number");
      return std::nullopt;
    }
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) {
        fail(path, "must be finite");
        return std::nullopt;
      }
      return v;
    } catch (const YAML::Exception&) {
      fail(path, "expected a real number, got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<long long> integer(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    try {
      return n.as<long long>();
    } catch (const YAML::Exception&) {
      fail(path, "expected an integer, got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<std::string> string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return n.Scalar();
  }

  /// Real scalar, [re, im] or {re: , im: }.
  std::optional<Complex> complex(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
      auto v = real(n, path);
      if (!v) return std::nullopt;
      return Complex(*v, 0.0);
    }
    if (n.IsSequence() && n.size() == 2) {
      auto re = real(n[0], path + "[0]");
      auto im = real(n[1], path + "[1]");
      if (!re || !im) return std::nullopt;
      return Complex(*re, *im);
    }
    if (n.IsMap()) {
      if (!map(n, path, {"re", "im"})) return std::nullopt;
      double re = 0.0, im = 0.0;
      if (n["re"]) {
        auto v = real(n["re"], path + ".re");
        if (!v) return std::nullopt;
        re = *v;
      }
      if (n["im"]) {
        auto v = real(n["im"], path + ".im");
        if (!v) return std::nullopt;
        im = *v;
      }
      return Complex(re, im);
    }
    fail(path, "expected a complex number: real, [re, im] or {re, im}");
    return std::nullopt;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

struct Parsed {
  ExperimentConfig cfg;
  bool model_ok = false, bath_ok = false, grid_ok = false, init_ok = true;
  bool discrete = false;
  std::vector<bool> mode_dim_given;
};

void read_bath(Reader& r, const YAML::Node& n, Parsed& p) {
  if (!n) {
    r.fail("bath", "required");
    return;
  }
  if (!n.IsMap()) {
    r.fail("bath", "expected a mapping");
    return;
  }
  if (!n["type"]) {
    r.fail("bath.type", "required (discrete_modes or exponential_kernel)");
    return;
  }
  const auto type = r.string(n["type"], "bath.type");
  if (!type) return;
  const std::size_t before = r.issues.size();
  if (*type == "discrete_modes") {
    r.map(n, "bath", {"type", "temperature", "modes"});
    DiscreteModes b;
    if (!n["temperature"]) {
      r.fail("bath.temperature", "required");
    } else if (auto t = r.real(n["temperature"], "bath.temperature")) {
      if (*t < 0.0) r.fail("bath.temperature", "must be >= 0");
      b.temperature = *t;
    }
    const YAML::Node modes = n["modes"];
    if (!modes || !modes.IsSequence() || modes.size() == 0) {
      r.fail("bath.modes", "expected a non-empty list of modes");
    } else {
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string path = "bath.modes[" + std::to_string(i) + "]";
        const YAML::Node m = modes[i];
        if (!r.map(m, path, {"g", "omega", "mode_dim"})) continue;
        BathMode bm;
        if (!m["g"]) {
          r.fail(path + ".g", "required");
        } else if (auto g = r.complex(m["g"], path + ".g")) {
          bm.g = *g;
        }
        if (!m["omega"]) {
          r.fail(path + ".omega", "required");
        } else if (auto w = r.real(m["omega"], path + ".omega")) {
          if (!(*w > 0.0)) r.fail(path + ".omega", "must be > 0 (mean occupation diverges otherwise)");
          bm.omega = *w;
        }
        Index dim = 0;
        if (m["mode_dim"]) {
          if (auto d = r.integer(m["mode_dim"], path + ".mode_dim")) {
            if (*d < 1) r.fail(path + ".mode_dim", "must be >= 1");
            dim = static_cast<Index>(*d);
          }
        }
        p.mode_dim_given.push_back(m["mode_dim"].IsDefined());
        p.cfg.mode_dims.push_back(dim);
        b.modes.push_back(bm);
      }
    }
    p.cfg.bath = b;
    p.discrete = true;
  } else if (*type == "exponential_kernel") {
    r.map(n, "bath", {"type", "gamma1", "gamma2", "kappa", "omega_c"});
    ExponentialKernel b;
    auto get = [&](const char* key, double& out, bool required) {
      const std::string path = std::string("bath.") + key;
      if (!n[key]) {
        if (required) r.fail(path, "required");
        return;
      }
      if (auto v = r.real(n[key], path)) out = *v;
    };
    get("gamma1", b.gamma1, true);
    get("gamma2", b.gamma2, false);
    get("kappa", b.kappa, true);
    get("omega_c", b.omega_c, false);
    if (b.gamma1 < 0.0) r.fail("bath.gamma1", "must be >= 0");
    if (b.gamma2 < 0.0) r.fail("bath.gamma2", "must be >= 0");
    if (b.gamma2 > b.gamma1) r.fail("bath.gamma2", "must not exceed gamma1");
    if (!(b.kappa > 0.0)) r.fail("bath.kappa", "must be > 0");
    p.cfg.bath = b;
  } else {
    r.fail("bath.type", "unknown bath type '" + *type + "'");
    return;
  }
  p.bath_ok = r.issues.size() == before;
}

void read_initial_state(Reader& r, const YAML::Node& n, Parsed& p) {
  if (!n) return;
  const std::size_t before = r.issues.size();
  if (!r.map(n, "initial_state", {"fock", "coherent", "register"})) {
    p.init_ok = false;
    return;
  }
  if (n.size() != 1) {
    r.fail("initial_state", "exactly one of fock, coherent, register");
    p.init_ok = false;
    return;
  }
  InitialState s;
  if (n["fock"]) {
    s.kind = InitialState::Kind::fock;
    if (auto v = r.integer(n["fock"], "initial_state.fock")) {
      if (*v < 0) r.fail("initial_state.fock", "must be >= 0");
      s.fock_n = static_cast<Index>(*v);
    }
  } else if (n["coherent"]) {
    s.kind = InitialState::Kind::coherent;
    if (auto v = r.complex(n["coherent"], "initial_state.coherent")) s.amplitude = *v;
  } else if (n["register"]) {
    s.kind = InitialState::Kind::register_basis;
    if (auto v = r.string(n["register"], "initial_state.register")) {
      s.basis = *v;
      if (s.basis.empty() || static_cast<int>(s.basis.size()) > kMaxRegisterQubits) {
        r.fail("initial_state.register",
               "register needs 1 to " + std::to_string(kMaxRegisterQubits) + " qubits");
      }
      if (s.basis.find_first_not_of("01+-") != std::string::npos) {
        r.fail("initial_state.register", "allowed characters are 0, 1, +, -");
      }
    }
  }
  p.init_ok = r.issues.size() == before;
  if (p.init_ok) p.cfg.initial_state = s;
}

void read_task(Reader& r, const YAML::Node& n, const std::string& path, Parsed& p) {
  std::string name;
  YAML::Node params;
  if (n.IsScalar()) {
    name = n.Scalar();
  } else if (n.IsMap() && n.size() == 1) {
    name = n.begin()->first.Scalar();
    params = n.begin()->second;
  } else {
    r.fail(path, "expected a task name or a single-key mapping");
    return;
  }
  const auto kind = task_from_string(name);
  if (!kind) {
    r.fail(path, "unknown task '" + name + "'");
    return;
  }
  Task t;
  t.kind = *kind;
  const std::string pp = path + "." + name;
  const bool has_params = params && !params.IsNull();
  switch (*kind) {
    case TaskKind::trajectories: {
      if (!has_params) {
        r.fail(pp + ".M", "required");
        break;
      }
      if (!r.map(params, pp, {"M", "seed", "noise"})) break;
      if (!params["M"]) {
        r.fail(pp + ".M", "required");
      } else if (auto m = r.integer(params["M"], pp + ".M")) {
        if (*m < 1) r.fail(pp + ".M", "must be >= 1");
        t.trajectories = static_cast<Index>(*m);
      }
      if (params["seed"]) {
        if (auto s = r.integer(params["seed"], pp + ".seed")) {
          if (*s < 0) r.fail(pp + ".seed", "must be >= 0");
          t.seed = static_cast<std::uint64_t>(*s);
        }
      }
      if (params["noise"]) {
        if (auto s = r.string(params["noise"], pp + ".noise")) {
          if (*s == "cholesky") {
            t.noise = NoiseMethod::cholesky;
          } else if (*s == "discrete_modes") {
            t.noise = NoiseMethod::discrete_modes;
          } else {
            r.fail(pp + ".noise", "expected cholesky or discrete_modes");
          }
        }
      }
      break;
    }
    case TaskKind::lindblad: {
      if (!has_params) break;
      if (!r.map(params, pp, {"gamma1", "gamma2"})) break;
      for (const char* key : {"gamma1", "gamma2"}) {
        if (!params[key]) continue;
        if (auto v = r.real(params[key], pp + "." + key)) {
          if (*v < 0.0) r.fail(pp + "." + key, "must be >= 0");
          (std::string(key) == "gamma1" ? t.gamma1 : t.gamma2) = *v;
        }
      }
      break;
    }
    case TaskKind::compare: {
      if (!has_params) break;
      if (!params.IsSequence()) {
        r.fail(pp, "expected a list of series task names");
        break;
      }
      for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string ip = pp + "[" + std::to_string(i) + "]";
        auto s = r.string(params[i], ip);
        if (!s) continue;
        auto k = task_from_string(*s);
        if (!k || !is_series_task(*k)) {
          r.fail(ip, "'" + *s + "' is not a series task (trajectories, master, lindblad, oracle)");
          continue;
        }
        t.series.push_back(*k);
      }
      break;
    }
    default:
      if (has_params) r.fail(pp, "task takes no parameters");
  }
  p.cfg.runs.push_back(t);
}

void read_tolerances(Reader& r, const YAML::Node& n, Tolerances& tol) {
  if (!n) return;
  if (!r.map(n, "tolerances",
             {"compare", "trajectory_compare", "trace", "herm", "positivity", "energy"})) {
    return;
  }
  auto get = [&](const char* key, double& out) {
    if (!n[key]) return;
    const std::string path = std::string("tolerances.") + key;
    if (auto v = r.real(n[key], path)) {
      if (!(*v > 0.0)) r.fail(path, "must be > 0");
      out = *v;
    }
  };
  get("compare", tol.compare);
  get("trajectory_compare", tol.trajectory_compare);
  get("trace", tol.trace);
  get("herm", tol.herm);
  get("positivity", tol.positivity);
  get("energy", tol.energy);
}

void cross_checks(Reader& r, Parsed& p, bool system_dim_given) {
  ExperimentConfig& c = p.cfg;
  if (c.runs.empty()) {
    r.fail("runs", "at least one task is required");
    return;
  }
  for (std::size_t i = 0; i < c.runs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (c.runs[i].kind == c.runs[j].kind) {
        r.fail("runs[" + std::to_string(i) + "]", "duplicate task '" + to_string(c.runs[i].kind) + "'");
      }
    }
  }
  const bool dephasing = p.model_ok && c.model == ModelKind::dephasing;
  bool missing_state = false;
  if (dephasing && system_dim_given) {
    r.fail("system_dim", "not used by the dephasing model; the register sets the dimension");
  }
  for (std::size_t i = 0; i < c.runs.size(); ++i) {
    const Task& t = c.runs[i];
    const std::string path = "runs[" + std::to_string(i) + "]." + to_string(t.kind);
    if (is_series_task(t.kind) && !c.initial_state && p.init_ok && !missing_state) {
      r.fail("initial_state", "required by the " + to_string(t.kind) + " task");
      missing_state = true;
    }
    if (t.kind == TaskKind::trajectories) {
      if (p.grid_ok && c.grid.n_steps() > 256) {
        r.fail("grid.n_steps", "trajectories task requires n_steps <= 256");
      }
      if (t.noise == NoiseMethod::discrete_modes && p.bath_ok && !p.discrete) {
        r.fail(path + ".noise", "discrete_modes noise requires a discrete_modes bath");
      }
    }
    if (t.kind == TaskKind::lindblad && p.bath_ok && p.discrete && (!t.gamma1 || !t.gamma2)) {
      r.fail(path, "gamma1 and gamma2 are required for a discrete_modes bath");
    }
    if (t.kind == TaskKind::oracle) {
      if (dephasing) r.fail(path, "oracle task is defined for the damped_oscillator model only");
      if (p.bath_ok && !p.discrete) {
        r.fail(path, "oracle task requires a discrete_modes bath");
      } else if (p.bath_ok) {
        bool dims = true;
        for (std::size_t m = 0; m < p.mode_dim_given.size(); ++m) {
          if (!p.mode_dim_given[m]) {
            r.fail("bath.modes[" + std::to_string(m) + "].mode_dim", "required by the oracle task");
            dims = false;
          }
        }
        if (dims && !dephasing) {
          const auto& b = std::get<DiscreteModes>(c.bath);
          OracleConfig oc{c.system_dim, {}, b.temperature, c.Omega};
          for (std::size_t m = 0; m < b.modes.size(); ++m) {
            oc.modes.push_back({b.modes[m].g, b.modes[m].omega, c.mode_dims[m]});
          }
          try {
            validate_oracle(oc);
          } catch (const Error& e) {
            r.fail("bath.modes", e.what());
          }
        }
      }
    }
    if (t.kind == TaskKind::compare) {
      std::vector<TaskKind> present;
      for (const Task& u : c.runs) {
        if (is_series_task(u.kind)) present.push_back(u.kind);
      }
      for (TaskKind k : t.series) {
        if (std::find(present.begin(), present.end(), k) == present.end()) {
          r.fail(path, "'" + to_string(k) + "' is compared but not run");
        }
      }
      const std::size_t n = t.series.empty() ? present.size() : t.series.size();
      if (n < 2) r.fail(path, "compare needs at least two series tasks");
    }
  }
  if (c.initial_state && p.model_ok) {
    const InitialState& s = *c.initial_state;
    const bool reg = s.kind == InitialState::Kind::register_basis;
    if (dephasing && !reg) r.fail("initial_state", "the dephasing model takes a register state");
    if (!dephasing && reg) r.fail("initial_state", "register states need the dephasing model");
    if (!dephasing && s.kind == InitialState::Kind::fock && s.fock_n >= c.system_dim) {
      r.fail("initial_state.fock", "must be below system_dim = " + std::to_string(c.system_dim));
    }
    if (dephasing && reg) c.system_dim = Index{1} << s.basis.size();
  }
}

}  // namespace

ValidationResult validate_config(const std::string& text) {
  Reader r;
  ValidationResult out;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    out.issues.push_back({"", std::string("YAML parse error: ") + e.what()});
    return out;
  }
  if (!r.map(root, "", {"model", "Omega", "system_dim", "bath", "grid", "initial_state", "runs",
                        "output_dir", "tolerances"})) {
    out.issues = r.issues;
    return out;
  }
  Parsed p;
  ExperimentConfig& c = p.cfg;

  if (!root["model"]) {
    r.fail("model", "required (damped_oscillator or dephasing)");
  } else if (auto m = r.string(root["model"], "model")) {
    if (*m == "damped_oscillator") {
      c.model = ModelKind::damped_oscillator;
      p.model_ok = true;
    } else if (*m == "dephasing") {
      c.model = ModelKind::dephasing;
      p.model_ok = true;
    } else {
      r.fail("model", "unknown model '" + *m + "'");
    }
  }
  if (!root["Omega"]) {
    r.fail("Omega", "required");
  } else if (auto v = r.real(root["Omega"], "Omega")) {
    c.Omega = *v;
  }
  if (root["system_dim"]) {
    if (auto v = r.integer(root["system_dim"], "system_dim")) {
      if (*v < 2) r.fail("system_dim", "must be >= 2");
      c.system_dim = static_cast<Index>(*v);
    }
  }
  read_bath(r, root["bath"], p);

  if (!root["grid"]) {
    r.fail("grid", "required");
  } else if (r.map(root["grid"], "grid", {"t_max", "n_steps"})) {
    const YAML::Node g = root["grid"];
    double tmax = 0.0;
    long long steps = 0;
    bool ok = true;
    if (!g["t_max"]) {
      r.fail("grid.t_max", "required");
      ok = false;
    } else if (auto v = r.real(g["t_max"], "grid.t_max")) {
      tmax = *v;
      if (!(tmax > 0.0)) {
        r.fail("grid.t_max", "must be > 0");
        ok = false;
      }
    } else {
      ok = false;
    }
    if (!g["n_steps"]) {
      r.fail("grid.n_steps", "required");
      ok = false;
    } else if (auto v = r.integer(g["n_steps"], "grid.n_steps")) {
      steps = *v;
      if (steps < 2) {
        r.fail("grid.n_steps", "must be >= 2");
        ok = false;
      }
    } else {
      ok = false;
    }
    if (ok) {
      c.grid = TimeGrid(tmax, static_cast<Index>(steps));
      p.grid_ok = true;
    }
  }

  read_initial_state(r, root["initial_state"], p);

  const YAML::Node runs = root["runs"];
  if (!runs) {
    r.fail("runs", "required");
  } else if (!runs.IsSequence()) {
    r.fail("runs", "expected a list of tasks");
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      read_task(r, runs[i], "runs[" + std::to_string(i) + "]", p);
    }
  }
  if (root["output_dir"]) {
    if (auto s = r.string(root["output_dir"], "output_dir")) c.output_dir = *s;
  }
  read_tolerances(r, root["tolerances"], c.tolerances);
  if (runs && runs.IsSequence()) cross_checks(r, p, root["system_dim"].IsDefined());

  out.issues = std::move(r.issues);
  if (out.issues.empty()) out.config = std::move(c);
  return out;
}

ValidationResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ValidationResult out;
    out.issues.push_back({"", "cannot open " + path});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_config(ss.str());
}

}  // namespace nmqsd
