#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "kornlab/errors.hpp"
#include "kornlab/field_io.hpp"
#include "kornlab/kornfem.hpp"
#include "kornlab/rigidity.hpp"
#include "kornlab/shells.hpp"

namespace kornlab::cli {

namespace {

using json = nlohmann::ordered_json;

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw InvalidInput("failed to write '" + path + "'");
}

template <class T>
void load_value(const json& j, T& var) {
  if constexpr (std::is_same_v<T, std::string>) {
    if (j.is_string())
      var = j.get<std::string>();
    else if (j.is_object() || j.is_array())
      var = j.dump();
    else
      throw InvalidInput("expected a string");
  } else {
    var = j.get<T>();
  }
}

/// Options that can come from the command line or from a flat JSON config;
/// command-line values take precedence.
class Bindings {
 public:
  explicit Bindings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "flat JSON config file; flags override its keys");
  }

  template <class T>
  CLI::Option* option(const std::string& name, T& var, const std::string& help) {
    auto* opt = app_->add_option("--" + name, var, help);
    if constexpr (!std::is_same_v<T, std::vector<double>>) opt->capture_default_str();
    add(name, opt, var);
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    auto* opt = app_->add_flag("--" + name, var, help);
    add(name, opt, var);
    return opt;
  }

  /// Merges the config file, if any, into every option not given on the command line.
  void apply() {
    if (config_path_.empty()) return;
    std::ifstream is(config_path_);
    if (!is) throw InvalidInput("cannot open config '" + config_path_ + "'");
    json cfg;
    try {
      cfg = json::parse(is);
    } catch (const json::exception& e) {
      throw InvalidInput("config '" + config_path_ + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw InvalidInput("config must be a flat JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) throw InvalidInput("unknown config key '" + key + "'");
      if (it->option->count() > 0) continue;
      try {
        it->load(value);
      } catch (const json::exception& e) {
        throw InvalidInput("config key '" + key + "': " + e.what());
      } catch (const InvalidInput& e) {
        throw InvalidInput("config key '" + key + "': " + e.what());
      }
    }
  }

  json dump() const {
    json j = json::object();
    for (const auto& e : entries_) j[e.key] = e.dump();
    return j;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<json()> dump;
  };

  template <class T>
  void add(const std::string& name, CLI::Option* opt, T& var) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    entries_.push_back({key, opt, [&var](const json& j) { load_value(j, var); }, [&var] { return json(var); }});
  }

  CLI::App* app_;
  std::string config_path_;
  std::vector<Entry> entries_;
};

json report_header(const std::string& command, const Bindings& b) {
  json j;
  j["tool"] = "kornlab";
  j["version"] = KORNLAB_VERSION;
  j["timestamp"] = timestamp();
  j["command"] = command;
  j["config"] = b.dump();
  return j;
}

void emit_report(const json& report, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << report.dump(2) << '\n';
  else
    write_text(path, report.dump(2) + "\n");
}

std::string error_kind(const Error& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return "InvalidInput";
  if (dynamic_cast<const ZeroDistance*>(&e)) return "ZeroDistance";
  if (dynamic_cast<const InfiniteQuotient*>(&e)) return "InfiniteQuotient";
  if (dynamic_cast<const CurlResidualTooLarge*>(&e)) return "CurlResidualTooLarge";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  return "Error";
}

json to_json(const Point& p) { return json::array({p.x(), p.y()}); }

json to_json(const LOmegaInfo& l) {
  return json{{"kind", to_string(l.kind)}, {"center", to_json(l.center)}, {"residual", l.residual}};
}

// ---- korn ----

struct KornConfig {
  std::string domain = "square";
  std::string mesh;
  int refine = 3;
  std::string bc = "tangential";
  double tol = 1e-10;
  std::string report;
};

int run_korn(const KornConfig& c, const Bindings& b, std::ostream& out) {
  static const std::vector<std::string> domains{"square", "disk", "annulus", "shell", "file"};
  if (std::find(domains.begin(), domains.end(), c.domain) == domains.end())
    throw InvalidInput("unknown domain '" + c.domain + "' (square, disk, annulus, shell, file)");
  if (c.bc != "tangential" && c.bc != "dirichlet")
    throw InvalidInput("unknown boundary condition '" + c.bc + "' (tangential, dirichlet)");
  if (c.refine < 0 || c.refine > 8) throw InvalidInput("refine must lie in [0, 8]");
  if (!(c.tol > 0 && c.tol < 1)) throw InvalidInput("tol must lie in (0, 1)");
  if ((c.domain == "file") != !c.mesh.empty())
    throw InvalidInput("--mesh is required for --domain file and not accepted otherwise");

  const BoundaryCondition bc = c.bc == "dirichlet" ? BoundaryCondition::Dirichlet : BoundaryCondition::Tangential;
  std::optional<TriMesh> file_mesh;
  if (c.domain == "file") file_mesh = read_mesh_json(c.mesh);

  // Level 0 is the coarsest mesh of the family with free dofs.
  auto make_mesh = [&](int level) -> TriMesh {
    if (c.domain == "square") return unit_square(level + 1);
    if (c.domain == "disk") return disk(level);
    if (c.domain == "annulus") return annulus(level);
    if (c.domain == "shell") {
      ShellSpec s;
      s.mesh_angular = 64 << level;
      s.mesh_layers = 2 << level;
      return shell_mesh(s);
    }
    TriMesh m = *file_mesh;
    for (int i = 0; i < level; ++i) m = m.refined();
    return m;
  };

  json report = report_header("korn", b);
  json levels = json::array();
  std::vector<double> kappas;
  LOmegaInfo last_l_omega;
  bool any_deflated = false;
  for (int level = 0; level <= c.refine; ++level) {
    const TriMesh mesh = make_mesh(level);
    KornOptions opts;
    opts.bc = bc;
    opts.tolerance = c.tol;
    if (bc == BoundaryCondition::Dirichlet) {
      Point lo = mesh.vertices().front(), hi = lo;
      for (const auto& v : mesh.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      const Point center = (lo + hi) / 2;
      const double radius = 0.4 * (hi - lo).minCoeff();
      opts.seed = interpolate(mesh, [&](const Point& x) { return divfree_bump(x, center, radius); });
    }
    const KornEstimate est = korn_constant(mesh, opts);
    kappas.push_back(est.kappa_sq);
    last_l_omega = est.l_omega;
    any_deflated = any_deflated || est.deflated;
    levels.push_back(json{{"level", level},
                          {"vertices", mesh.vertices().size()},
                          {"triangles", mesh.triangles().size()},
                          {"mesh_size", mesh.mesh_size()},
                          {"dofs", est.dof_count},
                          {"kappa_sq", est.kappa_sq},
                          {"top_eigenvalues", est.top_eigenvalues},
                          {"top_eigenspace_dim", est.top_eigenspace_dim},
                          {"eig_residual", est.eig_residual},
                          {"residual_stagnated", est.residual_stagnated},
                          {"iterations", est.iterations},
                          {"deflated", est.deflated},
                          {"boundary_localization", est.boundary_localization},
                          {"l_omega", to_json(est.l_omega)}});
    char line[160];
    std::snprintf(line, sizeof line, "level %d: dofs %d, kappa_sq %.12f, eigenspace dim %d\n", level,
                  est.dof_count, est.kappa_sq, est.top_eigenspace_dim);
    out << line;
  }

  constexpr double monotone_slack = 1e-10;
  bool monotone = true;
  for (std::size_t i = 1; i < kappas.size(); ++i) monotone = monotone && kappas[i] >= kappas[i - 1] - monotone_slack;

  report["domain"] = c.domain;
  report["boundary_condition"] = c.bc;
  report["kappa_sq"] = kappas;
  report["monotone"] = monotone;
  report["monotone_slack"] = monotone_slack;
  report["l_omega"] = to_json(last_l_omega);
  if (any_deflated) {
    std::ostringstream note;
    note.precision(6);
    note << "rotation field (x - c)^perp about c = (" << last_l_omega.center.x() << ", " << last_l_omega.center.y()
         << ") is admissible with zero symmetric gradient; it was removed from the trial space before the eigen solve";
    report["deflation_note"] = note.str();
  }
  report["levels"] = levels;
  out << "kappa_sq sequence " << (monotone ? "nondecreasing" : "NOT nondecreasing") << '\n';
  emit_report(report, c.report, out);
  return 0;
}

// ---- rigidity ----

struct RigidityConfig {
  std::string alpha_file;
  double amplitude = 1.0;
  double width = 1.0;
  int n = 512;
  double L = 20.0;
  double r0 = 0.0;
  std::string u_out;
  std::string report;
};

int run_rigidity(const RigidityConfig& c, const Bindings& b, std::ostream& out) {
  if (!std::isfinite(c.r0)) throw InvalidInput("r0 must be finite");
  std::optional<ScalarField> alpha;
  if (!c.alpha_file.empty()) {
    alpha = scalar_from_file(read_field(c.alpha_file));
  } else {
    if (!(c.width > 0) || !std::isfinite(c.amplitude)) throw InvalidInput("bump needs width > 0 and finite amplitude");
    alpha = sample_bump(PeriodicGrid(c.n, c.L), GaussianBump{c.amplitude, c.width, 0.0, 0.0});
  }
  const ExtremalField x = synthesize_extremal(*alpha, Rotation(c.r0));
  const ExtremalReport& r = x.report;
  if (!c.u_out.empty()) write_field(c.u_out, to_file(x.u.u));

  json report = report_header("rigidity", b);
  report["grid"] = json{{"n", alpha->grid.n()}, {"L", alpha->grid.box_length()}};
  report["r0_theta"] = Rotation(c.r0).theta();
  report["extremal"] = json{{"alpha_norm", r.alpha_norm},
                            {"f_norm", r.f_norm},
                            {"g_norm", r.g_norm},
                            {"plancherel_ratio", r.g_norm / r.f_norm},
                            {"f_zero_mode_energy", r.f_zero_mode_energy},
                            {"curl_residual", r.curl_residual},
                            {"optimal_theta", r.optimal_theta},
                            {"theta_error", std::abs(angle_difference(r.optimal_theta, c.r0))},
                            {"lhs", r.lhs},
                            {"rhs", r.rhs},
                            {"ratio", r.ratio},
                            {"box_min_theta", r.box_min_theta},
                            {"box_min_ratio", r.box_min_ratio},
                            {"conformal_defect", r.conformal_defect}};
  report["affine_part"] = json::array({x.u.affine.m11, x.u.affine.m12, x.u.affine.m21, x.u.affine.m22});
  char line[200];
  std::snprintf(line, sizeof line, "ratio %.10f, optimal_theta %.10f, |g|/|f| %.14f, curl residual %.3e\n", r.ratio,
                r.optimal_theta, r.g_norm / r.f_norm, r.curl_residual);
  out << line;
  emit_report(report, c.report, out);
  return 0;
}

// ---- shell ----

struct ShellConfig {
  std::string profile = "0.2+0.05*cos(3t)";
  std::vector<double> h_list{0.1, 0.05, 0.025, 0.0125};
  int angular = 2048;
  int layers = 16;
  std::string csv;
  std::string report;
};

/// {"c0": 0.2, "cos": {"3": 0.05}, "sin": {"2": 0.01}}
Profile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("profile JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("profile JSON must be an object");
  Profile p;
  auto term = [&p](int k) -> Profile::Term& {
    auto it = std::find_if(p.terms.begin(), p.terms.end(), [k](const Profile::Term& t) { return t.k == k; });
    if (it != p.terms.end()) return *it;
    p.terms.push_back({k, 0, 0});
    return p.terms.back();
  };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "c0") {
        p.c0 = value.get<double>();
      } else if (key == "cos" || key == "sin") {
        for (const auto& [ks, coeff] : value.items()) {
          const int k = std::stoi(ks);
          if (k <= 0) throw InvalidInput("profile frequencies must be positive");
          (key == "cos" ? term(k).cos_coeff : term(k).sin_coeff) = coeff.get<double>();
        }
      } else {
        throw InvalidInput("unknown profile key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("profile JSON: ") + e.what());
  } catch (const std::logic_error&) {
    throw InvalidInput("profile JSON: frequencies must be integers");
  }
  return p;
}

Profile parse_profile(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return profile_from_json(text);
  return Profile::parse(text);
}

int run_shell(const ShellConfig& c, const Bindings& b, std::ostream& out, std::ostream& err) {
  ShellSpec spec;
  spec.g = parse_profile(c.profile);
  spec.angular_resolution = c.angular;
  spec.radial_layers = c.layers;
  const BlowupTable table = blowup_experiment(spec, c.h_list);

  std::string csv = "h,grad_norm,symgrad_norm,ratio,tangency_residual\r\n";
  for (const auto& r : table.rows)
    csv += format_double(r.h) + "," + format_double(r.grad_norm) + "," + format_double(r.symgrad_norm) + "," +
           format_double(r.ratio) + "," + format_double(r.tangency_residual) + "\r\n";
  if (c.csv.empty())
    out << csv;
  else
    write_text(c.csv, csv);

  json report = report_header("shell", b);
  report["profile"] = spec.g.to_string();
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back(json{{"h", r.h},
                        {"grad_norm", r.grad_norm},
                        {"symgrad_norm", r.symgrad_norm},
                        {"ratio", r.ratio},
                        {"tangency_residual", r.tangency_residual},
                        {"grad_norm_over_sqrt_h", r.grad_norm / std::sqrt(r.h)},
                        {"symgrad_norm_over_h_3_2", r.symgrad_norm / std::pow(r.h, 1.5)}});
  report["rows"] = rows;
  if (table.slope) {
    report["slope"] = *table.slope;
  } else {
    report["slope"] = nullptr;
    report["slope_note"] = "a slope needs at least two rows";
  }
  if (!c.report.empty())
    write_text(c.report, report.dump(2) + "\n");
  else if (!c.csv.empty())
    out << report.dump(2) << '\n';
  if (table.slope)
    err << "log-log slope of ratio against h: " << format_double(*table.slope) << '\n';
  else
    err << "single row: no slope\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kornlab: optimal Korn and geometric rigidity constants"};
  app.set_version_flag("--version", std::string(KORNLAB_VERSION));
  app.require_subcommand(1);

  auto* korn = app.add_subcommand("korn", "P1 finite-element Korn constant over a refinement sweep");
  KornConfig kc;
  Bindings kb(korn);
  kb.option("domain", kc.domain, "square | disk | annulus | shell | file");
  kb.option("mesh", kc.mesh, "mesh JSON for --domain file");
  kb.option("refine", kc.refine, "number of refinements after the coarsest mesh");
  kb.option("bc", kc.bc, "tangential | dirichlet");
  kb.option("tol", kc.tol, "relative eigen-residual tolerance");
  kb.option("report", kc.report, "JSON report path (stdout when omitted)");

  auto* rig = app.add_subcommand("rigidity", "synthesize an extremal field of the rigidity estimate");
  RigidityConfig rc;
  Bindings rb(rig);
  rb.option("alpha-file", rc.alpha_file, "scalar field file for the angle field alpha");
  rb.option("amplitude", rc.amplitude, "Gaussian bump amplitude");
  rb.option("width", rc.width, "Gaussian bump width");
  rb.option("n", rc.n, "grid points per axis (power of two)");
  rb.option("L", rc.L, "box side length");
  rb.option("r0", rc.r0, "angle of the constant rotation R0");
  rb.option("u-out", rc.u_out, "write the periodic part of the deformation to this field file");
  rb.option("report", rc.report, "JSON report path (stdout when omitted)");

  auto* shell = app.add_subcommand("shell", "Korn quotient blow-up on thin shells");
  ShellConfig sc;
  Bindings sb(shell);
  sb.option("profile", sc.profile, "profile g, e.g. \"0.2+0.05*cos(3t)\" or {\"c0\":0.2,\"cos\":{\"3\":0.05}}");
  sb.option("h-list", sc.h_list, "strictly decreasing thicknesses")->delimiter(',');
  sb.option("angular", sc.angular, "angular quadrature samples");
  sb.option("layers", sc.layers, "Gauss-Legendre nodes across the thickness");
  sb.option("csv", sc.csv, "CSV table path (stdout when omitted)");
  sb.option("report", sc.report, "JSON summary path");

  auto* self = app.add_subcommand("selftest", "invariant suites of all modules");
  SelftestOptions so;
  Bindings tb(self);
  tb.option("seed", so.seed, "random seed");
  tb.option("samples", so.samples, "random matrices per property");
  tb.flag("break-det-constant", so.break_det_constant, "use the determinant constant 2 instead of 1/2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::InvalidInput);
  }

  try {
    if (korn->parsed()) {
      kb.apply();
      return run_korn(kc, kb, out);
    }
    if (rig->parsed()) {
      rb.apply();
      return run_rigidity(rc, rb, out);
    }
    if (shell->parsed()) {
      sb.apply();
      return run_shell(sc, sb, out, err);
    }
    tb.apply();
    if (so.samples < 1) throw InvalidInput("samples must be positive");
    return selftest(so, out);
  } catch (const Error& e) {
    err << "error [" << error_kind(e) << "]: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::SolverFailure);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"kornlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kornlab::cli
