#include "anisoflow/cli.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>

#include "anisoflow/config.hpp"
#include "anisoflow/constants.hpp"
#include "anisoflow/errors.hpp"
#include "anisoflow/estimates.hpp"
#include "anisoflow/initial_data.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/solver.hpp"
#include "anisoflow/structure.hpp"

namespace anisoflow::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string key_of(double v) { return fmt::format("{}", v); }

json budget_json(const SearchBudget& b) {
  return json{{"direction_samples", b.direction_samples},
              {"s_grid", b.s_grid},
              {"s_max", b.s_max},
              {"refine_iters", b.refine_iters},
              {"seed", b.seed}};
}

json structure_json(const StructureReport& r, const Integrand& f) {
  return json{{"family", f.name()},
              {"n", f.dim()},
              {"samples", r.samples},
              {"seed", r.seed},
              {"tol", r.tol},
              {"homogeneity_err", r.homogeneity_err},
              {"euler1_err", r.euler1_err},
              {"euler2_err", r.euler2_err},
              {"euler3_err", r.euler3_err},
              {"min_tangent_eigenvalue", number(r.min_tangent_eigenvalue)},
              {"symmetry_err", r.symmetry_err},
              {"symmetry_identities_err", r.symmetry_identities_err},
              {"pass",
               {{"homogeneity", r.homogeneity_pass},
                {"euler1", r.euler1_pass},
                {"euler2", r.euler2_pass},
                {"euler3", r.euler3_pass},
                {"convexity", r.convexity_pass},
                {"symmetry", r.symmetry_pass}}},
              {"structural_pass", r.structural_pass()},
              {"all_pass", r.all_pass()}};
}

json params_json(const BarrierParams& p) {
  json j{{"theorem", p.theorem}, {"A", p.A},      {"M", p.M},
         {"q", p.q},             {"floor", p.floor}, {"Tprime", p.Tprime}};
  j["C1"] = p.c1 ? json(*p.c1) : json(nullptr);
  j["C2"] = p.c2 ? json(*p.c2) : json(nullptr);
  j["epsilon"] = p.epsilon ? json(*p.epsilon) : json(nullptr);
  if (p.interior) {
    j["interior"] = json{{"R", p.interior->R},
                         {"k", p.interior->k},
                         {"r", p.interior->r},
                         {"mu1", p.interior->mu1},
                         {"mu2", p.interior->mu2}};
  } else {
    j["interior"] = nullptr;
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct Session {
  Options opts;
  Config cfg;
  std::optional<Integrand> f;
  fs::path out;
  json phases = json::object();
  json outputs = json::array();
  std::ostream* stdout_ = nullptr;
  std::ostream* stderr_ = nullptr;

  // memoised across pipeline phases
  std::optional<BarrierParams> params;
  std::optional<GraphState> initial;
  std::optional<Trajectory> traj;

  const Integrand& integrand() const { return *f; }

  template <class Fn>
  auto timed(const std::string& phase, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      phases[phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
      auto r = fn();
      finish();
      return r;
    } catch (...) {
      finish();
      throw;
    }
  }

  fs::path artifact(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }

  void summary(const json& j) {
    if (opts.format == "csv") {
      for (const auto& [k, v] : j.items()) *stdout_ << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    } else {
      *stdout_ << j.dump() << '\n';
    }
  }

  const GraphState& initial_state() {
    if (!initial) initial = make_initial(cfg.initial, cfg.grid);
    return *initial;
  }

  double height_bound() {
    if (cfg.M) return *cfg.M;
    double m = 0.0;
    for (double v : initial_state().u) m = std::max(m, std::abs(v));
    if (!(m > 0.0)) throw HypothesisNotMet("height bound M > 0", "initial data is identically zero");
    return m;
  }

  const BarrierParams& barrier() {
    if (!params) {
      params = timed("theorem_params", [&] {
        return theorem_params(integrand(), height_bound(), cfg.theorem,
                              cfg.theorem == 3 ? std::optional<double>(cfg.radius()) : std::nullopt, cfg.budget);
      });
    }
    return *params;
  }

  double end_time() {
    if (cfg.T) return *cfg.T;
    return barrier().Tprime;
  }
};

int cmd_check(Session& s) {
  const StructureReport rep = s.timed(
      "check", [&] { return check_structure(s.integrand(), s.cfg.check_samples, s.cfg.seed, s.cfg.check_tol); });
  write_json(s.artifact("check.json"), structure_json(rep, s.integrand()));
  s.summary(json{{"command", "check"}, {"all_pass", rep.all_pass()}, {"structural_pass", rep.structural_pass()},
                 {"symmetry_pass", rep.symmetry_pass}});
  return rep.all_pass() ? kOk : kFailed;
}

int cmd_constants(Session& s) {
  const Integrand& f = s.integrand();
  const double n = static_cast<double>(f.dim());
  const double f0 = eval(f, -Covector::basis(f.dim(), 0));
  const bool symmetric = satisfies_symmetry(f, 256, s.cfg.seed);
  json j{{"family", f.name()}, {"n", f.dim()}};
  s.timed("constants", [&] {
    j["C1"] = estimate_c1(f, s.cfg.budget);
    json ap = json::object();
    const std::vector<double> ps = s.cfg.P.empty() ? std::vector<double>{kFloorFactor * f0} : s.cfg.P;
    for (double p : ps) ap[key_of(p)] = compute_a_p(f, p, s.cfg.budget);
    j["A_P"] = ap;
    if (f.dim() > 1) {
      const TraceBounds tb = compute_trace_bounds(f, s.cfg.budget);
      j["k_lo"] = tb.k_lo;
      j["k_hi"] = tb.k_hi;
    } else {
      j["k_lo"] = nullptr;
      j["k_hi"] = nullptr;
    }
    if (symmetric) {
      j["C2"] = compute_c2(f, s.cfg.budget);
      json se = json::object();
      const std::vector<double> es = s.cfg.eps.empty() ? std::vector<double>{std::sqrt(2.0 / n)} : s.cfg.eps;
      for (double e : es) {
        try {
          se[key_of(e)] = compute_s_eps(f, e, s.cfg.budget);
        } catch (const UnresolvedConstant& u) {
          se[key_of(e)] = json{{"unresolved", true}, {"lower_bound", u.lower_bound()}};
        }
      }
      j["S_eps"] = se;
      j["S_eps_safety"] = kSEpsSafety;
    } else {
      j["C2"] = nullptr;
      j["S_eps"] = nullptr;
    }
    return 0;
  });
  j["symmetric"] = symmetric;
  j["budget"] = budget_json(s.cfg.budget);
  j["seed"] = s.cfg.seed;
  write_json(s.artifact("constants.json"), j);
  s.summary(json{{"command", "constants"}, {"C1", j["C1"]}, {"symmetric", symmetric}});
  return kOk;
}

void write_trajectory(Session& s, const Trajectory& tr) {
  std::string diag = "t,max_u,min_u,max_F,dt\n";
  for (const auto& snap : tr.snapshots)
    diag += fmt::format("{},{},{},{},{}\n", snap.state.t, snap.diag.max_u, snap.diag.min_u, snap.diag.max_F,
                        snap.diag.dt);
  write_text(s.artifact("diagnostics.csv"), diag);

  if (s.cfg.output == "csv") {
    auto file = fmt::output_file(s.artifact("snapshots.csv").string());
    file.print("t,cell,u\n");
    for (const auto& snap : tr.snapshots)
      for (std::size_t c = 0; c < snap.state.u.size(); ++c) file.print("{},{},{}\n", snap.state.t, c, snap.state.u[c]);
  } else if (s.cfg.output == "binary") {
    // per snapshot: t followed by the field, little-endian float64
    std::ofstream os(s.artifact("snapshots.bin"), std::ios::binary);
    for (const auto& snap : tr.snapshots) {
      os.write(reinterpret_cast<const char*>(&snap.state.t), sizeof(double));
      os.write(reinterpret_cast<const char*>(snap.state.u.data()),
               static_cast<std::streamsize>(snap.state.u.size() * sizeof(double)));
    }
  }
}

const Trajectory& trajectory(Session& s) {
  if (!s.traj) {
    const double T = s.end_time();
    FlowConfig fc{s.cfg.grid, T, s.cfg.cfl_safety, s.cfg.sample_every};
    s.traj = s.timed("run", [&] { return run(fc, s.integrand(), s.initial_state()); });
  }
  return *s.traj;
}

int cmd_run(Session& s) {
  const Trajectory& tr = trajectory(s);
  write_trajectory(s, tr);
  const auto& last = tr.snapshots.back();
  s.summary(json{{"command", "run"},
                 {"steps", tr.steps},
                 {"snapshots", tr.snapshots.size()},
                 {"t_end", last.state.t},
                 {"max_F_end", last.diag.max_F}});
  return kOk;
}

int cmd_verify(Session& s) {
  const BarrierParams& p = s.barrier();
  if (!s.cfg.T || *s.cfg.T > p.Tprime) s.cfg.T = p.Tprime;
  const Trajectory& tr = trajectory(s);
  const EstimateReport rep =
      s.timed("verify", [&] { return verify(tr, s.integrand(), s.cfg.theorem, p, s.cfg.grid); });

  std::string csv = "t,value,bound,margin,cell\n";
  std::string zcsv = "t,z_max,cells_checked,ball_cells\n";
  for (const auto& r : rep.rows) {
    csv += fmt::format("{},{},{},{},{}\n", r.t, r.value, r.bound, r.margin, r.cell);
    zcsv += fmt::format("{},{},{},{}\n", r.t, r.z_max, r.cells_checked, r.ball_cells);
  }
  write_text(s.artifact("estimates.csv"), csv);
  write_text(s.artifact("z_diagnostic.csv"), zcsv);
  json summary{{"theorem", rep.theorem},
               {"min_margin", number(rep.min_margin)},
               {"violated", rep.violated},
               {"rows", rep.rows.size()},
               {"t_start", rep.t_start},
               {"params", params_json(p)}};
  if (s.cfg.theorem == 2) summary["floor_is_sampled_estimate"] = true;
  write_json(s.artifact("summary.json"), summary);
  s.summary(json{{"command", "verify"},
                 {"theorem", rep.theorem},
                 {"min_margin", number(rep.min_margin)},
                 {"violated", rep.violated}});
  return rep.violated ? kFailed : kOk;
}

int cmd_pipeline(Session& s, std::ostream& err) {
  const StructureReport rep = s.timed(
      "check", [&] { return check_structure(s.integrand(), s.cfg.check_samples, s.cfg.seed, s.cfg.check_tol); });
  write_json(s.artifact("check.json"), structure_json(rep, s.integrand()));
  if (!rep.structural_pass()) {
    err << "hypothesis not met: integrand structure (homogeneity, Euler identities, uniform convexity)\n";
    return kHypothesis;
  }
  if (s.cfg.theorem != 1 && !rep.symmetry_pass) {
    err << fmt::format("hypothesis not met: symmetry condition F(p + phi^0) = F(p - phi^0) fails "
                       "(residual {}), required by theorem {}\n",
                       rep.symmetry_err, s.cfg.theorem);
    return kHypothesis;
  }
  if (const int rc = cmd_constants(s); rc != kOk) return rc;
  s.barrier();
  if (!s.cfg.T || *s.cfg.T > s.params->Tprime) s.cfg.T = s.params->Tprime;
  if (const int rc = cmd_run(s); rc != kOk) return rc;
  return cmd_verify(s);
}

int dispatch(Session& s, std::ostream& err) {
  const std::string& c = s.opts.command;
  if (c == "check") return cmd_check(s);
  if (c == "constants") return cmd_constants(s);
  if (c == "run") return cmd_run(s);
  if (c == "verify") return cmd_verify(s);
  if (c == "pipeline") return cmd_pipeline(s, err);
  err << "unknown command '" << c << "'\n";
  return kConfigError;
}

void write_manifest(Session& s, int code) {
  json m{{"config_path", s.opts.config_path},
         {"config", echo_config(s.cfg)},
         {"seed", s.cfg.seed},
         {"command", s.opts.command},
         {"versions", {{"anisoflow", kVersion}, {"kernels", kernels::active().name}}},
         {"outputs", s.outputs},
         {"wall_clock_s", s.phases},
         {"exit_code", code},
         {"finished_at", std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count()}};
  write_json(s.out / "manifest.json", m);
}

}  // namespace

int execute(const Options& opts, std::ostream& out, std::ostream& err) {
  Session s;
  s.opts = opts;
  s.stdout_ = &out;
  s.stderr_ = &err;
  if (opts.format != "json" && opts.format != "csv") {
    err << "error: --format must be csv or json\n";
    return kConfigError;
  }
  try {
    s.cfg = load_config(opts.config_path);
    if (opts.seed) s.cfg.set_seed(*opts.seed);
    s.f = s.cfg.integrand.build();
    s.out = opts.out_dir;
    fs::create_directories(s.out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  int code = kFailed;
  try {
    code = dispatch(s, err);
  } catch (const HypothesisNotMet& e) {
    err << e.what() << '\n';
    code = kHypothesis;
  } catch (const IntegrandInvalid& e) {
    err << "hypothesis not met: uniform convexity (" << e.what() << ")\n";
    code = kHypothesis;
  } catch (const BlowUp& e) {
    err << "blow-up at t = " << e.time() << ": " << e.what() << '\n';
    code = kBlowUp;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    code = kConfigError;
  } catch (const PreconditionError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    code = kConfigError;
  } catch (const DomainError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    code = kConfigError;
  } catch (const UnresolvedConstant& e) {
    err << "unresolved constant: " << e.what() << " (lower bound " << e.lower_bound() << ")\n";
    code = kFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kFailed;
  }
  try {
    write_manifest(s, code);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << '\n';
  }
  return code;
}

}  // namespace anisoflow::cli
