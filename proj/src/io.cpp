#include "mhd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mhd/basis.hpp"

namespace mhd {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

void RunConfig::validate() const {
  if (t_end && steady && *steady) {
    throw ConfigError("t_end and steady are mutually exclusive");
  }
  if (c && s) throw ConfigError("c and s are mutually exclusive");
  if (degree && *degree < 1) throw ConfigError("N must be at least 1");
  if ((kx && *kx < 1) || (ky && *ky < 1)) throw ConfigError("K must be at least 1");
  if (dt && !(*dt > 0.0)) throw ConfigError("dt must be positive");
  if (t_end && *t_end < 0.0) throw ConfigError("t_end must be non-negative");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  if (quad_points < 0) throw ConfigError("quad_order must be non-negative");
}

CaseOverrides RunConfig::overrides() const {
  validate();
  CaseOverrides o;
  o.degree = degree;
  o.kx = kx;
  o.ky = ky;
  o.dt = dt;
  o.t_end = t_end;
  o.steady = steady;
  o.steady_tolerance = steady_tolerance;
  o.Rf = Rf;
  o.Rm = Rm;
  o.c = c;
  if (s) {
    const double rm = Rm ? *Rm : make_case(case_name).params.Rm;
    o.c = *s / rm;
  }
  return o;
}

StepperOptions RunConfig::stepper() const {
  StepperOptions o;
  if (picard_tolerance) o.picard.tolerance = *picard_tolerance;
  if (linear_tolerance) o.linear.tolerance = *linear_tolerance;
  return o;
}

AssemblyOptions RunConfig::assembly() const {
  AssemblyOptions o;
  o.quad_points = quad_points;
  return o;
}

void apply_config_key(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string k(key);
  auto bad = [&](const char* what) {
    return ConfigError("key '" + k + "': " + what + ", got '" + std::string(value) + "'");
  };
  auto real = [&] {
    const auto v = to_double(value);
    if (!v) throw bad("expected a number");
    return *v;
  };
  auto integer = [&] {
    const auto v = to_int(value);
    if (!v) throw bad("expected an integer");
    return *v;
  };
  if (k == "case") {
    const auto& names = case_names();
    if (std::find(names.begin(), names.end(), value) == names.end()) {
      throw bad("unknown case");
    }
    c.case_name = std::string(value);
  } else if (k == "scheme") {
    try {
      c.scheme = parse_scheme(value);
    } catch (const std::invalid_argument&) {
      throw bad("expected decoupled or coupled-cn");
    }
  } else if (k == "N") {
    c.degree = integer();
  } else if (k == "K") {
    c.kx = c.ky = integer();
  } else if (k == "Kx") {
    c.kx = integer();
  } else if (k == "Ky") {
    c.ky = integer();
  } else if (k == "dt") {
    c.dt = real();
  } else if (k == "t_end") {
    c.t_end = real();
  } else if (k == "steady") {
    const auto b = to_bool(value);
    if (!b) throw bad("expected true or false");
    c.steady = *b;
  } else if (k == "steady_tol") {
    c.steady_tolerance = real();
  } else if (k == "rf") {
    c.Rf = real();
  } else if (k == "rm") {
    c.Rm = real();
  } else if (k == "c") {
    c.c = real();
  } else if (k == "s") {
    c.s = real();
  } else if (k == "out") {
    c.out_dir = std::string(value);
  } else if (k == "snapshot_every") {
    c.snapshot_every = integer();
  } else if (k == "quad_order") {
    c.quad_points = integer();
  } else if (k == "picard_tol") {
    c.picard_tolerance = real();
  } else if (k == "linear_tol") {
    c.linear_tolerance = real();
  } else {
    throw ConfigError("unknown key '" + k + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream lines{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError("line " + std::to_string(number) + ": expected key=value, got '" +
                          token + "'");
      }
      try {
        apply_config_key(base, trim(token.substr(0, eq)), trim(token.substr(eq + 1)));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(number) + ": " + e.what());
      }
    }
  }
  base.validate();
  return base;
}

RunConfig read_config(const std::filesystem::path& path, RunConfig base) {
  try {
    return parse_config(read_file(path), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> columns{
      "k",     "t", "K",      "M_minus", "M_plus",          "Mtilde",   "Etilde",   "S",
      "Jtilde", "A", "Atilde", "F",       "budget_residual", "div_u_L2", "div_H_L2", "weak_divH_max"};
  return columns;
}

std::string format_diagnostics(const std::vector<DiagnosticsRecord>& records) {
  std::string out;
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const DiagnosticsRecord& r : records) {
    const double residual = r.budget_defined ? r.budget_residual : std::nan("");
    out += std::to_string(r.k);
    for (double v : {r.t, r.K, r.M_minus, r.M_plus, r.Mtilde, r.Etilde, r.S, r.Jtilde, r.A,
                     r.Atilde, r.F, residual, r.div_u_L2, r.div_H_L2, r.weak_divH_max}) {
      out += ',' + num(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<DiagnosticsRecord> parse_diagnostics(std::string_view text) {
  std::istringstream lines{std::string(text)};
  std::string line;
  if (!std::getline(lines, line)) throw std::invalid_argument("diagnostics: empty input");
  std::string header;
  for (const auto& c : diagnostics_columns()) header += (header.empty() ? "" : ",") + c;
  if (trim(line) != header) throw std::invalid_argument("diagnostics: unexpected header");
  std::vector<DiagnosticsRecord> out;
  int number = 1;
  while (std::getline(lines, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != diagnostics_columns().size()) {
      throw std::invalid_argument("diagnostics line " + std::to_string(number) +
                                  ": expected " +
                                  std::to_string(diagnostics_columns().size()) + " columns");
    }
    std::vector<double> v(cells.size());
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto d = to_double(cells[i]);
      if (!d) {
        throw std::invalid_argument("diagnostics line " + std::to_string(number) +
                                    ": bad number '" + cells[i] + "'");
      }
      v[i] = *d;
    }
    const auto k = to_int(cells[0]);
    if (!k) throw std::invalid_argument("diagnostics line " + std::to_string(number) + ": bad k");
    DiagnosticsRecord r;
    r.k = *k;
    r.t = v[1];
    r.K = v[2];
    r.M_minus = v[3];
    r.M_plus = v[4];
    r.Mtilde = v[5];
    r.Etilde = v[6];
    r.S = v[7];
    r.Jtilde = v[8];
    r.A = v[9];
    r.Atilde = v[10];
    r.F = v[11];
    r.budget_defined = !std::isnan(v[12]);
    r.budget_residual = r.budget_defined ? v[12] : 0.0;
    r.div_u_L2 = v[13];
    r.div_H_L2 = v[14];
    r.weak_divH_max = v[15];
    out.push_back(r);
  }
  return out;
}

void write_diagnostics(const std::vector<DiagnosticsRecord>& records,
                       const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("write_diagnostics: no records");
  write_file(path, format_diagnostics(records));
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path) {
  return parse_diagnostics(read_file(path));
}

std::string format_fields(const Discretization& d, const State& state) {
  const Mesh& mesh = d.mesh();
  const int n = d.degree();
  const int nx = n * mesh.kx() + 1, ny = n * mesh.ky() + 1, np = nx * ny;
  const QuadratureRule gll = gll_nodes(n);
  const std::vector<double> xi(gll.points.begin(), gll.points.end());
  const ElementEvaluator eu(*d.D, xi, xi), ew(*d.G, xi, xi), ep(*d.S, xi, xi), eh(*d.C, xi, xi);
  const Field j(d.S, d.rot * state.H.coeffs, state.H.tag);

  std::vector<double> px(np), py(np), u(2 * np), w(np), p(np), h(2 * np), jj(np), div(np);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [ex, ey] = mesh.element_coords(e);
    const LocalBasis bu = eu.evaluate(e), bw = ew.evaluate(e), bp = ep.evaluate(e);
    const LocalBasis bh = eh.evaluate(e, true);
    const Eigen::VectorXd cu = state.u.local(e), cw = state.omega.local(e);
    const Eigen::VectorXd cp = state.P.local(e), ch = state.H.local(e), cj = j.local(e);
    const Eigen::VectorXd ux = bu.comp[0].transpose() * cu, uy = bu.comp[1].transpose() * cu;
    const Eigen::VectorXd wv = bw.comp[0].transpose() * cw, pv = bp.comp[0].transpose() * cp;
    const Eigen::VectorXd hx = bh.comp[0].transpose() * ch, hy = bh.comp[1].transpose() * ch;
    const Eigen::VectorXd dv = bh.d_dx[0].transpose() * ch + bh.d_dy[1].transpose() * ch;
    const Eigen::VectorXd jv = bp.comp[0].transpose() * cj;
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a <= n; ++a) {
        const int q = b * (n + 1) + a;
        const int g = (ey * n + b) * nx + (ex * n + a);
        px[g] = mesh.edges_x()[ex] + 0.5 * (1.0 + xi[a]) * mesh.hx(ex);
        py[g] = mesh.edges_y()[ey] + 0.5 * (1.0 + xi[b]) * mesh.hy(ey);
        u[2 * g] = ux[q];
        u[2 * g + 1] = uy[q];
        w[g] = wv[q];
        p[g] = pv[q];
        h[2 * g] = hx[q];
        h[2 * g + 1] = hy[q];
        jj[g] = jv[q];
        div[g] = dv[q];
      }
    }
  }

  std::ostringstream s;
  s << "# vtk DataFile Version 3.0\n"
    << "mhd state k=" << state.k << " t=" << num(state.t) << "\n"
    << "ASCII\nDATASET STRUCTURED_GRID\n"
    << "DIMENSIONS " << nx << ' ' << ny << " 1\n"
    << "POINTS " << np << " double\n";
  for (int g = 0; g < np; ++g) s << num(px[g]) << ' ' << num(py[g]) << " 0\n";
  s << "POINT_DATA " << np << '\n';
  auto vectors = [&](const char* name, const std::vector<double>& v) {
    s << "VECTORS " << name << " double\n";
    for (int g = 0; g < np; ++g) s << num(v[2 * g]) << ' ' << num(v[2 * g + 1]) << " 0\n";
  };
  auto scalars = [&](const char* name, const std::vector<double>& v) {
    s << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int g = 0; g < np; ++g) s << num(v[g]) << '\n';
  };
  vectors("u", u);
  scalars("omega", w);
  scalars("P", p);
  vectors("H", h);
  scalars("j", jj);
  scalars("div_H", div);
  return s.str();
}

void write_fields(const Discretization& disc, const State& state,
                  const std::filesystem::path& path) {
  write_file(path, format_fields(disc, state));
}

State SavedState::restore(const DiscretizationPtr& disc) const {
  auto attach = [](const SpacePtr& space, const Eigen::VectorXd& v, int tag, const char* name) {
    if (v.size() != space->dof_count()) {
      throw std::invalid_argument(std::string("saved state: field ") + name + " has " +
                                  std::to_string(v.size()) + " values, the space has " +
                                  std::to_string(space->dof_count()));
    }
    return Field(space, v, TimeTag{tag});
  };
  State s;
  s.u = attach(disc->D, u, tags[0], "u");
  s.omega = attach(disc->G, omega, tags[1], "omega");
  s.P = attach(disc->S, P, tags[2], "P");
  s.H = attach(disc->C, H, tags[3], "H");
  s.k = k;
  s.t = t;
  return s;
}

SavedState make_saved_state(const std::string& case_name, Scheme scheme, const CaseSpec& spec,
                            const State& state) {
  SavedState s;
  s.case_name = case_name;
  s.scheme = scheme;
  s.degree = spec.degree;
  s.kx = spec.kx;
  s.ky = spec.ky;
  s.dt = spec.params.dt;
  s.k = state.k;
  s.t = state.t;
  s.tags = {state.u.tag.halves, state.omega.tag.halves, state.P.tag.halves, state.H.tag.halves};
  s.u = state.u.coeffs;
  s.omega = state.omega.coeffs;
  s.P = state.P.coeffs;
  s.H = state.H.coeffs;
  return s;
}

void save_state(const SavedState& st, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "mhd-state 1\n"
    << "case " << st.case_name << '\n'
    << "scheme " << scheme_name(st.scheme) << '\n'
    << "N " << st.degree << '\n'
    << "Kx " << st.kx << '\n'
    << "Ky " << st.ky << '\n'
    << "dt " << num(st.dt) << '\n'
    << "k " << st.k << '\n'
    << "t " << num(st.t) << '\n';
  const char* names[] = {"u", "omega", "P", "H"};
  const Eigen::VectorXd* fields[] = {&st.u, &st.omega, &st.P, &st.H};
  for (int f = 0; f < 4; ++f) {
    s << "field " << names[f] << ' ' << st.tags[f] << ' ' << fields[f]->size() << '\n';
    for (Eigen::Index i = 0; i < fields[f]->size(); ++i) s << num((*fields[f])[i]) << '\n';
  }
  write_file(path, s.str());
}

SavedState load_state(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  auto fail = [&](const std::string& what) {
    return std::invalid_argument("'" + path.string() + "': " + what);
  };
  std::string word, version;
  if (!(in >> word >> version) || word != "mhd-state" || version != "1") {
    throw fail("not a saved state");
  }
  SavedState st;
  std::map<std::string, std::string> header;
  for (const char* key : {"case", "scheme", "N", "Kx", "Ky", "dt", "k", "t"}) {
    std::string value;
    if (!(in >> word >> value) || word != key) throw fail(std::string("expected ") + key);
    header[key] = value;
  }
  st.case_name = header["case"];
  st.scheme = parse_scheme(header["scheme"]);
  const auto n = to_int(header["N"]), kx = to_int(header["Kx"]), ky = to_int(header["Ky"]);
  const auto k = to_int(header["k"]);
  const auto dt = to_double(header["dt"]), t = to_double(header["t"]);
  if (!n || !kx || !ky || !k || !dt || !t) throw fail("malformed header");
  st.degree = *n;
  st.kx = *kx;
  st.ky = *ky;
  st.k = *k;
  st.dt = *dt;
  st.t = *t;
  const char* names[] = {"u", "omega", "P", "H"};
  Eigen::VectorXd* fields[] = {&st.u, &st.omega, &st.P, &st.H};
  for (int f = 0; f < 4; ++f) {
    std::string name;
    int tag = 0;
    long size = 0;
    if (!(in >> word >> name >> tag >> size) || word != "field" || name != names[f] || size < 0) {
      throw fail(std::string("expected field ") + names[f]);
    }
    st.tags[f] = tag;
    fields[f]->resize(size);
    for (long i = 0; i < size; ++i) {
      std::string token;
      if (!(in >> token)) throw fail(std::string("truncated field ") + names[f]);
      const auto v = to_double(token);
      if (!v) throw fail("bad number '" + token + "'");
      (*fields[f])[i] = *v;
    }
  }
  return st;
}

}  // namespace mhd
