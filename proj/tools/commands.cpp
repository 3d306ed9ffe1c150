#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "json.hpp"
#include "semrad/analysis.hpp"
#include "semrad/error.hpp"
#include "semrad/hydro.hpp"
#include "semrad/numfmt.hpp"

namespace semrad::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v) { return format_double(v == 0.0 ? 0.0 : v); }

/// Comma-separated table with `#` metadata lines and a header row.
class Table {
public:
  Table(std::string title, std::vector<std::string> header)
      : title_(std::move(title)), header_(std::move(header)) {}

  void row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw Error("table row width mismatch in " + title_);
    rows_.push_back(std::move(cells));
  }

  void write(const fs::path& path, const std::string& command, const Config& config) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "# semrad " << command << ": " << title_ << "\n";
    for (const auto& [key, value] : config.resolved())
      if (key != "output.directory") out << "# " << key << " = " << value << "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    }
  }

private:
  std::string title_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_summary(const fs::path& dir, Json summary) {
  std::ofstream out(dir / "run.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "run.json").string());
  out << summary.dump(2) << "\n";
}

Json config_json(const Config& c) {
  Json j = Json::object();
  for (const auto& [key, value] : c.resolved()) j[key] = value;
  return j;
}

fs::path output_directory(Config& c) {
  return c.text("output.directory", "out");
}

// ---------------------------------------------------------------------------
// Shared configuration blocks
// ---------------------------------------------------------------------------

struct Geometry {
  std::string type;
  Mesh mesh;
  std::optional<BodyCurve> curve;
  double radius = 0.0;       ///< cylinder
  double half_length = 0.0;  ///< box
  double draft = 0.0;
};

Geometry read_geometry(Config& c, const std::vector<std::string>& types) {
  Geometry g;
  g.type = c.choice("geometry.type", types, "");
  if (g.type == "cylinder") {
    CylinderDomainSpec s;
    s.radius = g.radius = c.positive("geometry.R");
    s.depth = c.positive("geometry.h");
    s.length = c.positive("geometry.L");
    s.beta = c.integer("geometry.beta", 5);
    s.grading = c.positive("geometry.grading", 1.15);
    s.max_spacing = c.number("geometry.max_spacing", 0.8);
    s.symmetric_fs = c.flag("discretization.symmetric_fs", true);
    if (s.beta < 1) throw ConfigError("geometry.beta: must be at least 1");
    if (c.flag("geometry.curved", true)) g.curve = BodyCurve::circle(Vec2(0, 0), s.radius);
    g.mesh = generate_cylinder_domain(s);
  } else if (g.type == "box") {
    BoxDomainSpec s;
    s.half_length = g.half_length = c.positive("geometry.a");
    s.draft = g.draft = c.positive("geometry.d");
    s.depth = c.positive("geometry.h");
    s.length = c.positive("geometry.L");
    s.n_bottom = c.integer("geometry.n_bottom", 6);
    s.n_side = c.integer("geometry.n_side", 12);
    s.grading = c.positive("geometry.grading", 1.1);
    s.max_spacing = c.number("geometry.max_spacing", 0.0);
    s.symmetric_fs = c.flag("discretization.symmetric_fs", true);
    if (s.n_bottom < 1 || s.n_side < 1)
      throw ConfigError("geometry.n_bottom and geometry.n_side must be at least 1");
    g.mesh = generate_box_domain(s);
  } else if (g.type == "basin") {
    BasinSpec s;
    s.length = c.positive("geometry.L");
    s.depth = c.positive("geometry.h");
    s.nx = c.integer("geometry.nx", 10);
    s.nz = c.integer("geometry.nz", 2);
    s.symmetric_fs = c.flag("discretization.symmetric_fs", true);
    if (s.nx < 1 || s.nz < 1) throw ConfigError("geometry.nx and geometry.nz must be at least 1");
    g.mesh = generate_basin(s);
  } else if (g.type == "uniform_cylinder") {
    UniformCylinderSpec s;
    s.radius = g.radius = c.positive("geometry.R");
    s.depth = c.positive("geometry.h");
    s.length = c.positive("geometry.L");
    s.spacing = c.positive("geometry.spacing", 0.5);
    s.target_elements = c.integer("geometry.elements", 0);
    if (c.flag("geometry.curved", true)) g.curve = BodyCurve::circle(Vec2(0, 0), s.radius);
    g.mesh = generate_uniform_cylinder_domain(s);
  } else {
    g.mesh = import_mesh(c.text("geometry.path"));
    if (const auto r = c.maybe_number("geometry.R")) {
      if (!(*r > 0.0)) throw ConfigError("geometry.R: must be positive");
      g.radius = *r;
      g.curve = BodyCurve::circle(Vec2(0, 0), *r);
    }
  }
  return g;
}

Discretization build_discretization(const Geometry& g, int order, int cubature) {
  if (order < 1) throw ConfigError("discretization.P: must be at least 1");
  if (g.curve && g.mesh.count_faces(BoundaryTag::Body) > 0) {
    const ReferenceElement ref = build_reference_element(order, cubature);
    return discretize(curve_body_elements(g.mesh, ref, *g.curve), order, cubature);
  }
  return discretize(g.mesh, order, cubature);
}

SurfaceDerivative read_surface_derivative(Config& c) {
  return c.choice("discretization.surface_derivative", {"consistent", "local"}, "consistent") ==
                 "local"
             ? SurfaceDerivative::ElementLocal
             : SurfaceDerivative::Consistent;
}

Ordering read_ordering(Config& c) {
  return c.choice("run.ordering", {"amd", "rcm"}, "amd") == "rcm" ? Ordering::RCM : Ordering::AMD;
}

int read_threads(Config& c) {
  const int t = c.integer("run.threads", 0);
  if (t < 0) throw ConfigError("run.threads: must be non-negative");
  return t;
}

// Units of F_j and x_k.
std::string force_unit(int j) { return j == 5 ? "N" : "N/m"; }
std::string motion_unit(int k) { return k == 5 ? "rad" : "m"; }
std::string added_mass_unit(int j, int k) {
  const int rot = (j == 5) + (k == 5);
  return rot == 0 ? "kg/m" : rot == 1 ? "kg" : "kg m";
}
std::string damping_unit(int j, int k) {
  const int rot = (j == 5) + (k == 5);
  return rot == 0 ? "kg/(m s)" : rot == 1 ? "kg/s" : "kg m/s";
}

std::string case_label(double v) { return fmt(v); }

// ---------------------------------------------------------------------------
// radiate
// ---------------------------------------------------------------------------

int cmd_radiate(Config& c) {
  const auto t_start = Clock::now();
  const Geometry g = read_geometry(c, {"cylinder", "box", "import"});
  const int order = c.integer("discretization.P", 4);
  const int cubature = c.integer("discretization.cubature", 0);
  const double rho = c.positive("physics.rho", kWaterDensity);

  RadiationOptions opt;
  opt.g = c.positive("physics.g", kGravity);
  opt.courant = c.positive("discretization.Cr", 1.0);
  opt.surface_derivative = read_surface_derivative(c);
  opt.mode = c.integer("impulse.mode", 3);
  if (opt.mode != 1 && opt.mode != 3 && opt.mode != 5)
    throw ConfigError("impulse.mode: must be 1, 3 or 5");
  opt.sommerfeld = c.flag("absorption.sommerfeld", true);
  opt.relaxation = c.flag("absorption.relaxation", true);
  opt.relaxation_length = c.number("absorption.relaxation_length", 0.0);
  opt.relaxation_rate = c.number("absorption.relaxation_rate", 0.0);
  c.choice("absorption.ramp", {"cubic"}, "cubic");
  if (opt.relaxation_length < 0.0 || opt.relaxation_rate < 0.0)
    throw ConfigError("absorption.relaxation_length and absorption.relaxation_rate must be >= 0");
  opt.ordering = read_ordering(c);

  const auto alpha = c.maybe_number("impulse.alpha");
  const auto width = c.maybe_number("impulse.s");
  if (alpha && width) throw ConfigError("impulse.alpha and impulse.s are mutually exclusive");
  const double r = c.positive("impulse.r", 1e-4);
  const double eps = c.positive("impulse.epsilon", 1e-8);
  if (r >= 1.0) throw ConfigError("impulse.r: must be below 1");
  if (eps >= 1.0) throw ConfigError("impulse.epsilon: must be below 1");
  const auto t0 = c.maybe_number("impulse.t0");
  const double t_end = c.number("run.t_end", 0.0);
  if (t_end < 0.0) throw ConfigError("run.t_end: must be non-negative");
  const std::vector<double> monitors = c.numbers("output.monitors", {});
  const std::vector<int> forces = c.integers("output.forces", {1, 3, 5});
  for (int j : forces)
    if (j != 1 && j != 3 && j != 5) throw ConfigError("output.forces: modes must be 1, 3 or 5");
  const double pad = c.positive("output.pad_factor", 8.0);
  if (pad < 1.0) throw ConfigError("output.pad_factor: must be at least 1");
  const fs::path dir = output_directory(c);
  c.finish("radiate");
  fs::create_directories(dir);

  const Discretization d = build_discretization(g, order, cubature);
  const double depth = d.mesh.depth;
  PseudoImpulse imp;
  if (width) {
    if (!(*width > 0.0)) throw ConfigError("impulse.s: must be positive");
    imp = pseudo_impulse_from_width(*width, depth, opt.mode, r, eps, opt.g);
  } else {
    const double a = alpha.value_or(3.0);
    if (!(a > 0.0)) throw ConfigError("impulse.alpha: must be positive");
    imp = design_pseudo_impulse(surface_spacing(d.dofs).max, depth, opt.mode, a, r, eps, opt.g);
  }
  if (t0) imp = with_peak_time(imp, *t0);
  const double setup_seconds = seconds_since(t_start);

  Json summary;
  summary["command"] = "radiate";
  summary["config"] = config_json(c);
  summary["n_dof"] = d.dofs.n_dof;
  summary["n_elements"] = d.mesh.n_elements();
  summary["order"] = order;
  summary["impulse"] = {{"mode", imp.mode}, {"alpha", imp.alpha}, {"s", imp.s},
                        {"t0", imp.t0},     {"f_r", imp.f_r},     {"omega_r", imp.omega_r},
                        {"k_r", imp.k_r},   {"L_r", imp.L_r}};

  const auto t_run = Clock::now();
  RadiationRecord rec;
  try {
    rec = run_radiation(d, imp, opt, t_end, monitors);
  } catch (const DivergenceError& e) {
    summary["status"] = "diverged";
    summary["message"] = e.what();
    summary["step"] = e.step();
    summary["timings"] = {{"setup_s", setup_seconds}, {"run_s", seconds_since(t_run)}};
    write_summary(dir, summary);
    std::cerr << "radiation run diverged: " << e.what() << "\n";
    return 3;
  }
  const double run_seconds = seconds_since(t_run);
  const auto t_post = Clock::now();

  const int k = opt.mode;
  std::vector<VectorXd> F;
  for (int j : forces) F.push_back(body_force(rec, j, rho));

  std::vector<std::string> header = {"t [s]", "x" + std::to_string(k) + " [" + motion_unit(k) + "]",
                                     "xdot" + std::to_string(k) + " [" + motion_unit(k) + "/s]"};
  for (int j : forces)
    header.push_back("F" + std::to_string(j) + std::to_string(k) + " [" + force_unit(j) + "]");
  for (double xm : monitors) header.push_back("eta(x=" + fmt(xm) + ") [m]");
  Table signals("time histories", header);
  for (Eigen::Index i = 0; i < rec.t.size(); ++i) {
    std::vector<std::string> row = {fmt(rec.t(i)), fmt(rec.x(i)), fmt(rec.xdot(i))};
    for (const auto& f : F) row.push_back(fmt(f(i)));
    for (Eigen::Index m = 0; m < rec.monitor_eta.cols(); ++m) row.push_back(fmt(rec.monitor_eta(i, m)));
    signals.row(std::move(row));
  }
  signals.write(dir / "signals.csv", "radiate", c);

  const bool normalized = g.type == "cylinder" || g.type == "box" || g.radius > 0.0;
  std::vector<HydroCoefficients> coef;
  std::vector<NormalizedCoefficients> norm;
  for (const auto& f : F) {
    coef.push_back(added_mass_damping(f, rec.x, rec.dt, imp.omega_r, pad));
    if (normalized)
      norm.push_back(g.type == "box" ? normalize_box(coef.back(), g.half_length, g.draft, rho)
                                     : normalize_cylinder(coef.back(), g.radius, rho));
  }
  header = {"omega [rad/s]"};
  for (int j : forces) {
    const std::string jk = std::to_string(j) + std::to_string(k);
    header.push_back("a" + jk + " [" + added_mass_unit(j, k) + "]");
    header.push_back("b" + jk + " [" + damping_unit(j, k) + "]");
    if (normalized) {
      header.push_back("mu" + jk + " [-]");
      header.push_back("nu" + jk + " [-]");
    }
  }
  Table table("added mass and damping", header);
  const VectorXd& omega = coef.front().omega;
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    std::vector<std::string> row = {fmt(omega(i))};
    for (std::size_t j = 0; j < coef.size(); ++j) {
      row.push_back(fmt(coef[j].a(i)));
      row.push_back(fmt(coef[j].b(i)));
      if (normalized) {
        row.push_back(fmt(norm[j].mu(i)));
        row.push_back(fmt(norm[j].nu(i)));
      }
    }
    table.row(std::move(row));
  }
  table.write(dir / "coefficients.csv", "radiate", c);

  Json checks = Json::object();
  for (std::size_t j = 0; j < forces.size(); ++j) {
    if (forces[j] != k) continue;
    const VectorXd& F_kk = F[j];
    const double peak = F_kk.cwiseAbs().maxCoeff();
    double bmin = std::numeric_limits<double>::infinity(), bmax = 0.0;
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
      if (omega(i) > 0.9 * imp.omega_r) break;
      bmin = std::min(bmin, coef[j].b(i));
      bmax = std::max(bmax, coef[j].b(i));
    }
    checks["force_tail_ratio"] = peak > 0 ? std::abs(F_kk(F_kk.size() - 1)) / peak : 0.0;
    checks["damping_min_over_max"] = bmax > 0 ? bmin / bmax : 0.0;
    checks["passive"] = bmin >= -1e-3 * bmax;
    if (d.mesh.count_faces(BoundaryTag::Body) > 0)
      checks["added_mass_infinite"] = infinite_frequency_added_mass(d, k, k, rho);
  }

  summary["status"] = "ok";
  summary["dt"] = rec.dt;
  summary["t_end"] = rec.t_end;
  summary["steps"] = rec.t.size();
  summary["omega_r"] = imp.omega_r;
  summary["checks"] = checks;
  summary["timings"] = {{"setup_s", setup_seconds},
                        {"run_s", run_seconds},
                        {"postprocess_s", seconds_since(t_post)},
                        {"total_s", seconds_since(t_start)}};
  write_summary(dir, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// meshgen
// ---------------------------------------------------------------------------

int cmd_meshgen(Config& c) {
  const Geometry g = read_geometry(c, {"cylinder", "box", "basin", "uniform_cylinder", "import"});
  const bool mirror = c.flag("geometry.mirror", false);
  const std::string name = c.text("output.mesh", "mesh.msh");
  const fs::path dir = output_directory(c);
  c.finish("meshgen");
  fs::create_directories(dir);
  const Mesh m = mirror ? mirror_mesh(g.mesh) : g.mesh;
  validate(m);
  export_mesh(m, dir / name);
  Json summary;
  summary["command"] = "meshgen";
  summary["config"] = config_json(c);
  summary["n_elements"] = m.n_elements();
  summary["n_vertices"] = m.vertices.size();
  summary["max_edge_length"] = max_edge_length(m);
  summary["boundary_faces"] = {{"free_surface", m.count_faces(BoundaryTag::FreeSurface)},
                               {"bed", m.count_faces(BoundaryTag::Bed)},
                               {"far_field", m.count_faces(BoundaryTag::FarField)},
                               {"body", m.count_faces(BoundaryTag::Body)},
                               {"symmetry", m.count_faces(BoundaryTag::Symmetry)}};
  write_summary(dir, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// mms
// ---------------------------------------------------------------------------

void read_unit_cylinder(Config& c, double& R, double& h, double& L) {
  c.choice("geometry.type", {"uniform_cylinder"}, "uniform_cylinder");
  R = c.positive("geometry.R", 1.0);
  h = c.positive("geometry.h", 2.0);
  L = c.positive("geometry.L", 4.0);
}

void write_convergence(const ConvergenceReport& rep, const fs::path& path, const Config& c,
                       const std::string& title) {
  Table t(title, {"mesh", "elements", "h_max [m]", "P", "n_dof", "error_inf [-]"});
  for (const auto& e : rep.entries)
    t.row({e.mesh_id, std::to_string(e.elements), fmt(e.h_max), std::to_string(e.order),
           std::to_string(e.n_dof), fmt(e.error)});
  t.write(path, "mms", c);
}

int cmd_mms(Config& c) {
  const auto t_start = Clock::now();
  double R, h, L;
  read_unit_cylinder(c, R, h, L);
  const std::vector<int> elements = c.integers("mms.elements", {32, 53, 73});
  const std::vector<int> orders = c.integers("mms.orders", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const std::vector<double> spacings = c.numbers("mms.h_spacings", {0.4, 0.2, 0.1, 0.05});
  const std::vector<int> h_orders = c.integers("mms.h_orders", {1, 2, 3});
  const bool curved = c.flag("mms.curved", true);
  ConvergenceOptions opt;
  opt.floor = c.positive("mms.floor", 1e-11);
  const std::vector<int> fit = c.integers("mms.fit_orders", {2, 3, 4, 5, 6, 7, 8});
  opt.min_fit_order = *std::min_element(fit.begin(), fit.end());
  opt.max_fit_order = *std::max_element(fit.begin(), fit.end());
  opt.threads = read_threads(c);
  const fs::path dir = output_directory(c);
  c.finish("mms");
  fs::create_directories(dir);

  const ManufacturedSolution u = ManufacturedSolution::trigonometric(L, h);
  const BodyCurve circle = BodyCurve::circle(Vec2(0, 0), R);
  const BodyCurve* curve = curved ? &circle : nullptr;

  std::vector<MeshCase> p_meshes, h_meshes;
  for (int n : elements) {
    if (n < 1) throw ConfigError("mms.elements: counts must be positive");
    p_meshes.push_back({"K" + std::to_string(n),
                        generate_uniform_cylinder_domain({R, h, L, 0.5, n})});
  }
  for (std::size_t i = 0; i < spacings.size(); ++i) {
    if (!(spacings[i] > 0.0)) throw ConfigError("mms.h_spacings: spacings must be positive");
    h_meshes.push_back({"h" + std::to_string(i), generate_uniform_cylinder_domain({R, h, L, spacings[i], 0})});
  }
  const auto t_p = Clock::now();
  const ConvergenceReport p = mms_convergence(p_meshes, orders, u, curve, opt);
  const double p_seconds = seconds_since(t_p);
  const auto t_h = Clock::now();
  const ConvergenceReport hr = mms_convergence(h_meshes, h_orders, u, curve, opt);
  const double h_seconds = seconds_since(t_h);

  write_convergence(p, dir / "mms_p.csv", c, "error against order");
  write_convergence(hr, dir / "mms_h.csv", c, "error against mesh size");
  Table rates("fitted rates", {"study", "case", "quantity", "value [-]"});
  for (const auto& [id, v] : p.p_decay) rates.row({"p", id, "decay_per_order", fmt(v)});
  for (const auto& [id, v] : p.min_error) rates.row({"p", id, "min_error", fmt(v)});
  for (const auto& [P, v] : hr.h_rate) rates.row({"h", "P" + std::to_string(P), "slope", fmt(v)});
  rates.write(dir / "rates.csv", "mms", c);

  Json summary;
  summary["command"] = "mms";
  summary["config"] = config_json(c);
  summary["solution"] = p.solution;
  Json decay = Json::object(), minimum = Json::object(), slopes = Json::object();
  for (const auto& [id, v] : p.p_decay) decay[id] = v;
  for (const auto& [id, v] : p.min_error) minimum[id] = v;
  for (const auto& [P, v] : hr.h_rate) slopes["P" + std::to_string(P)] = v;
  summary["p_decay"] = decay;
  summary["min_error"] = minimum;
  summary["h_rate"] = slopes;
  Json flags = Json::array();
  for (const auto& f : p.flags) flags.push_back(f);
  for (const auto& f : hr.flags) flags.push_back(f);
  summary["flags"] = flags;
  summary["timings"] = {{"p_study_s", p_seconds}, {"h_study_s", h_seconds}, {"total_s", seconds_since(t_start)}};
  write_summary(dir, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

int cmd_stability(Config& c) {
  const auto t_start = Clock::now();
  const Geometry g = read_geometry(c, {"basin", "cylinder", "box", "uniform_cylinder", "import"});
  const std::vector<int> orders = c.integers("discretization.P", {4});
  const int cubature = c.integer("discretization.cubature", 0);
  RadiationOptions opt;
  opt.g = c.positive("physics.g", kGravity);
  opt.surface_derivative = read_surface_derivative(c);
  const int budget = c.integer("stability.max_dimension", 4000);
  const double tol = c.positive("stability.tolerance", 1e-8);
  const int modes = c.integer("stability.modes", 5);
  const fs::path dir = output_directory(c);
  c.finish("stability");
  fs::create_directories(dir);

  Table eig("semi-discrete eigenvalues", {"P", "re [1/s]", "im [1/s]"});
  Table sum("stability per order",
            {"P", "surface_nodes", "max_re [1/s]", "max_abs [1/s]", "ratio [-]", "stable"});
  Table slosh("lowest sloshing frequencies",
              {"P", "n", "exact [rad/s]", "computed [rad/s]", "relative_error [-]"});
  Json per_order = Json::array();
  for (int P : orders) {
    const Discretization d = build_discretization(g, P, cubature);
    const auto t = Clock::now();
    const StabilityReport r = stability_eigenvalues(d, opt, budget, tol);
    for (const auto& l : r.eigenvalues)
      eig.row({std::to_string(P), fmt(l.real()), fmt(l.imag())});
    const double ratio = r.max_abs > 0 ? r.max_real / r.max_abs : 0.0;
    sum.row({std::to_string(P), std::to_string(r.surface_size), fmt(r.max_real), fmt(r.max_abs),
             fmt(ratio), r.stable ? "1" : "0"});
    if (g.type == "basin") {
      std::vector<double> w;
      for (const auto& l : r.eigenvalues)
        if (l.imag() > 1e-6 * r.max_abs) w.push_back(l.imag());
      std::sort(w.begin(), w.end());
      const std::vector<double> exact =
          standing_wave_frequencies(d.mesh.length, d.mesh.depth, modes, opt.g);
      for (int n = 0; n < modes && n < static_cast<int>(w.size()); ++n)
        slosh.row({std::to_string(P), std::to_string(n + 1), fmt(exact[n]), fmt(w[n]),
                   fmt(w[n] / exact[n] - 1.0)});
    }
    per_order.push_back({{"P", P},
                         {"max_real_over_max_abs", ratio},
                         {"stable", r.stable},
                         {"seconds", seconds_since(t)}});
  }
  eig.write(dir / "eigenvalues.csv", "stability", c);
  sum.write(dir / "stability.csv", "stability", c);
  if (g.type == "basin") slosh.write(dir / "sloshing.csv", "stability", c);

  Json summary;
  summary["command"] = "stability";
  summary["config"] = config_json(c);
  summary["orders"] = per_order;
  summary["timings"] = {{"total_s", seconds_since(t_start)}};
  write_summary(dir, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

int cmd_scaling(Config& c) {
  const auto t_start = Clock::now();
  double R, h, L;
  read_unit_cylinder(c, R, h, L);
  const double coarse = c.positive("scaling.coarse", 1.2);
  const double ratio = c.positive("scaling.ratio", 7.0);
  const int count = c.integer("scaling.count", 9);
  const std::vector<int> orders = c.integers("scaling.orders", {1, 2, 3, 4, 5, 6, 7, 8});
  ScalingOptions opt;
  opt.repeats = c.integer("scaling.repeats", 10);
  opt.min_dof = c.integer("scaling.min_dof", 100);
  opt.max_dof = c.integer("scaling.max_dof", 12000);
  opt.min_sample_seconds = c.positive("scaling.min_sample_seconds", 2e-3);
  opt.ordering = read_ordering(c);
  const fs::path dir = output_directory(c);
  c.finish("scaling");
  fs::create_directories(dir);

  std::vector<MeshCase> meshes;
  const std::vector<double> spacing = geometric_spacings(coarse, ratio, count);
  for (std::size_t i = 0; i < spacing.size(); ++i)
    meshes.push_back({"m" + std::to_string(i), generate_uniform_cylinder_domain({R, h, L, spacing[i], 0})});
  const ScalingReport rep = scaling_benchmark(meshes, orders, opt);

  Table t("solver systems", {"mesh", "elements", "P", "n_dof", "factor_nonzeros", "bandwidth"});
  Json timings = Json::array();
  for (const auto& e : rep.entries) {
    t.row({e.mesh_id, std::to_string(e.elements), std::to_string(e.order), std::to_string(e.n_dof),
           std::to_string(e.fill), std::to_string(e.bandwidth)});
    timings.push_back({{"mesh", e.mesh_id},
                       {"P", e.order},
                       {"n_dof", e.n_dof},
                       {"factor_s", e.factor_seconds},
                       {"solve_s", e.solve_seconds},
                       {"batch", e.batch}});
  }
  t.write(dir / "scaling.csv", "scaling", c);

  Json summary;
  summary["command"] = "scaling";
  summary["config"] = config_json(c);
  summary["exponent"] = rep.exponent;
  summary["solves"] = timings;
  summary["timings"] = {{"total_s", seconds_since(t_start)}};
  write_summary(dir, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// spurious
// ---------------------------------------------------------------------------

void write_case_tables(const SpuriousCase& s, const std::string& id, const fs::path& dir,
                       const SpuriousConfig& sc, const Config& c) {
  Table spec("waterline elevation spectrum " + id,
             {"omega [rad/s]", "omega_nd [-]", "eta_amplitude [m s]"});
  const double nd = std::sqrt(sc.radius / kGravity);
  for (Eigen::Index k = 0; k < s.omega.size(); ++k)
    spec.row({fmt(s.omega(k)), fmt(s.omega(k) * nd), fmt(s.eta_spectrum(k))});
  spec.write(dir / ("spectrum_" + id + ".csv"), "spurious", c);

  if (!s.stable) return;
  const NormalizedCoefficients n = normalize_cylinder(s.coefficients, sc.radius);
  Table coef("heave coefficients " + id,
             {"omega [rad/s]", "a33 [kg/m]", "b33 [kg/(m s)]", "mu33 [-]", "nu33 [-]"});
  for (Eigen::Index k = 0; k < n.omega.size(); ++k)
    coef.row({fmt(n.omega(k)), fmt(s.coefficients.a(k)), fmt(s.coefficients.b(k)), fmt(n.mu(k)),
              fmt(n.nu(k))});
  coef.write(dir / ("coefficients_" + id + ".csv"), "spurious", c);
}

Json write_study(const std::vector<SpuriousCase>& cases, const std::string& study,
                 const fs::path& dir, const SpuriousConfig& sc, const Config& c) {
  Table t(study + " study",
          {"alpha [-]", "beta [-]", "s [1/s]", "omega_r [rad/s]", "n_dof", "dt [s]", "stable",
           "peak", "peak_omega [rad/s]", "peak_omega_nd [-]", "peak_amplitude [-]",
           "band_energy [m^2 s]"});
  Json out = Json::array();
  for (const auto& s : cases) {
    t.row({fmt(s.alpha), std::to_string(s.beta), fmt(s.s), fmt(s.impulse.omega_r),
           std::to_string(s.n_dof), fmt(s.dt), s.stable ? "1" : "0", s.peak ? "1" : "0",
           fmt(s.peak_omega), fmt(s.peak_nondimensional), fmt(s.peak_amplitude),
           fmt(s.band_energy)});
    const std::string id =
        study + "_" + (study == "alpha" ? case_label(s.alpha) : std::to_string(s.beta));
    write_case_tables(s, id, dir, sc, c);
    Json j = {{"alpha", s.alpha}, {"beta", s.beta}, {"stable", s.stable}, {"peak", s.peak},
              {"peak_omega_nd", s.peak_nondimensional}};
    if (!s.stable) j["failure"] = s.failure;
    out.push_back(j);
  }
  t.write(dir / ("spurious_" + study + ".csv"), "spurious", c);
  return out;
}

int cmd_spurious(Config& c) {
  const auto t_start = Clock::now();
  SpuriousConfig sc;
  c.choice("geometry.type", {"cylinder"}, "cylinder");
  sc.radius = c.positive("geometry.R", sc.radius);
  sc.depth = c.positive("geometry.h", sc.depth);
  sc.length = c.positive("geometry.L", sc.length);
  sc.beta = c.integer("geometry.beta", sc.beta);
  sc.grading = c.positive("geometry.grading", sc.grading);
  sc.max_spacing = c.number("geometry.max_spacing", sc.max_spacing);
  sc.order = c.integer("discretization.P", sc.order);
  sc.courant = c.positive("discretization.Cr", sc.courant);
  sc.surface_derivative = read_surface_derivative(c);
  sc.pad_factor = c.positive("output.pad_factor", sc.pad_factor);
  sc.t0 = c.number("impulse.t0", 0.0);
  sc.baseline_alpha = c.positive("spurious.baseline_alpha", sc.baseline_alpha);
  sc.search_factor = c.positive("spurious.search_factor", sc.search_factor);
  sc.peak_threshold = c.positive("spurious.threshold", sc.peak_threshold);
  sc.threads = read_threads(c);
  const std::string study = c.choice("spurious.study", {"alpha", "beta", "both"}, "both");
  std::vector<double> alphas;
  std::vector<int> betas;
  double s = 1.0;
  if (study != "beta") alphas = c.numbers("spurious.alphas", {5.0, 3.0, 1.0, 0.5});
  if (study != "alpha") {
    betas = c.integers("spurious.betas", {3, 5, 8});
    s = c.positive("spurious.s", 1.0);
  }
  const fs::path dir = output_directory(c);
  c.finish("spurious");
  fs::create_directories(dir);
  if (sc.order < 1) throw ConfigError("discretization.P: must be at least 1");

  Json summary;
  summary["command"] = "spurious";
  summary["config"] = config_json(c);
  Json timings = Json::object();
  if (!alphas.empty()) {
    const auto t = Clock::now();
    summary["alpha_study"] = write_study(spurious_alpha_study(sc, alphas), "alpha", dir, sc, c);
    timings["alpha_study_s"] = seconds_since(t);
  }
  if (!betas.empty()) {
    const auto t = Clock::now();
    summary["beta_study"] = write_study(spurious_beta_study(sc, betas, s), "beta", dir, sc, c);
    timings["beta_study_s"] = seconds_since(t);
  }
  timings["total_s"] = seconds_since(t_start);
  summary["timings"] = timings;
  write_summary(dir, summary);
  return 0;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"radiate", "mms", "stability",
                                                 "scaling", "spurious", "meshgen"};
  return names;
}

int run_command(const std::string& command, Config& config) {
  if (command == "radiate") return cmd_radiate(config);
  if (command == "mms") return cmd_mms(config);
  if (command == "stability") return cmd_stability(config);
  if (command == "scaling") return cmd_scaling(config);
  if (command == "spurious") return cmd_spurious(config);
  if (command == "meshgen") return cmd_meshgen(config);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace semrad::cli
