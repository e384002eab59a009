#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "momentflow/experiment.hpp"
#include "momentflow/format.hpp"

namespace momentflow {

ConfigError::ConfigError(const std::string& source, int line, const std::string& field,
                         const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
            (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(field) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

struct Field {
  const std::string& source;
  int line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source, line, key, msg);
  }

  double number(const std::string& raw) const {
    std::string t = trim(raw);
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    double x = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      fail("expected a number, got '" + trim(raw) + "'");
    }
    return x;
  }

  long long integer(const std::string& raw) const {
    const std::string t = trim(raw);
    long long x = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      fail("expected an integer, got '" + t + "'");
    }
    return x;
  }

  bool boolean(const std::string& raw) const {
    const std::string t = trim(raw);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    fail("expected true or false, got '" + t + "'");
  }

  CVector complex_list(const std::string& raw) const {
    const auto items = split(raw, ',');
    CVector v(static_cast<Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto colon = items[i].find(':');
      if (colon == std::string::npos) {
        v(static_cast<Index>(i)) = number(items[i]);
      } else {
        v(static_cast<Index>(i)) =
            Complex(number(items[i].substr(0, colon)), number(items[i].substr(colon + 1)));
      }
    }
    if (v.size() == 0) fail("empty vector");
    return v;
  }
};

const std::map<std::string, std::string>& builtin_texts() {
  static const std::map<std::string, std::string> texts = {
      {"mgs_su2",
       "# SU(2) on Sym^2 C^2 + C^2 around the weight-0 vector of Sym^2.\n"
       "name = mgs_su2\n"
       "group.kind = su2\n"
       "group.degrees = 2, 1\n"
       "initial_vector = 0.1:0, 1:0, 0.1:0, 0.05:0, 0:0\n"
       "flow.mode = affine\n"
       "flow.t_max = 1e4\n"
       "analyses.normal_form = true\n"
       "normal_form.z0 = 0:0, 1:0, 0:0, 0:0, 0:0\n"
       "normal_form.samples = 100\n"
       "seed = 11\n"},
      {"mgs_u1",
       "# U(1) with weights (1, -1) around z0 = (1, 1)/sqrt 2.\n"
       "name = mgs_u1\n"
       "group.kind = torus\n"
       "group.weights = 1; -1\n"
       "initial_vector = 1:0, 0.5:0\n"
       "flow.mode = affine\n"
       "flow.t_max = 1e4\n"
       "analyses.normal_form = true\n"
       "normal_form.z0 = 0.7071067811865476:0, 0.7071067811865476:0\n"
       "normal_form.samples = 100\n"
       "seed = 7\n"},
      {"su2_symd",
       "# SU(2) on Sym^4 C^2, v0 near the highest-weight line (triple root).\n"
       "name = su2_symd\n"
       "group.kind = su2\n"
       "group.degrees = 4\n"
       "group.torus_generator = 2\n"
       "initial_vector = 1:0, 0.01:0, 0:0, 0:0, 0:0\n"
       "flow.mode = cointegrate\n"
       "flow.t_max = 1e6\n"
       "analyses.clock = true\n"
       "analyses.ray = true\n"
       "analyses.oracle = true\n"
       "analyses.kempf_ness = true\n"
       "check.ray_spectrum = 1e-2\n"
       "check.ray_monotone = false\n"
       "seed = 5\n"},
      {"torus_12",
       "# U(1) with weights 1 and 2; the flow collapses onto the weight-1 line.\n"
       "name = torus_12\n"
       "group.kind = torus\n"
       "group.weights = 1; 2\n"
       "initial_vector = 0.7071067811865476:0, 0.7071067811865476:0\n"
       "flow.mode = cointegrate\n"
       "flow.t_max = 1e6\n"
       "analyses.clock = true\n"
       "analyses.ray = true\n"
       "analyses.degeneration = true\n"
       "analyses.oracle = true\n"
       "analyses.kempf_ness = true\n"
       "seed = 3\n"},
      {"torus_c3",
       "# T^2 on C^3 with weights (1,0), (0,1), (1,1).\n"
       "name = torus_c3\n"
       "group.kind = torus\n"
       "group.weights = 1, 0; 0, 1; 1, 1\n"
       "initial_vector = 1:0, 1:0, 1:0\n"
       "flow.mode = cointegrate\n"
       "flow.t_max = 1e6\n"
       "analyses.clock = true\n"
       "analyses.ray = true\n"
       "analyses.degeneration = true\n"
       "analyses.oracle = true\n"
       "analyses.kempf_ness = true\n"
       "seed = 2\n"},
      {"u1_weight1",
       "# U(1) acting on C with weight 1: f = |v|^4 / 4 collapses like t^-2.\n"
       "name = u1_weight1\n"
       "group.kind = torus\n"
       "group.weights = 1\n"
       "initial_vector = 1:0\n"
       "flow.mode = cointegrate\n"
       "flow.t_max = 1e4\n"
       "analyses.rates = true\n"
       "analyses.clock = true\n"
       "analyses.kempf_ness = true\n"
       "seed = 1\n"},
  };
  return texts;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  c.source = source;
  using Setter = std::function<void(const Field&, const std::string&)>;
  CheckTolerances& k = c.check;
  auto num = [](double& dst) {
    return Setter([&dst](const Field& f, const std::string& v) { dst = f.number(v); });
  };
  auto flag = [](bool& dst) {
    return Setter([&dst](const Field& f, const std::string& v) { dst = f.boolean(v); });
  };
  auto count = [](int& dst) {
    return Setter([&dst](const Field& f, const std::string& v) {
      const long long x = f.integer(v);
      if (x < 0 || x > 1'000'000) f.fail("out of range");
      dst = static_cast<int>(x);
    });
  };
  const std::map<std::string, Setter> setters = {
      {"name", [&](const Field&, const std::string& v) { c.name = v; }},
      {"group.kind",
       [&](const Field& f, const std::string& v) {
         if (v == "torus") c.group_kind = GroupKind::torus;
         else if (v == "su2") c.group_kind = GroupKind::su2;
         else if (v == "matrix_basis") c.group_kind = GroupKind::matrix_basis;
         else f.fail("expected torus, su2 or matrix_basis, got '" + v + "'");
       }},
      {"group.weights",
       [&](const Field& f, const std::string& v) {
         c.weights.clear();
         for (const std::string& row : split(v, ';')) {
           const auto entries = split(row, ',');
           Eigen::VectorXi w(static_cast<Index>(entries.size()));
           for (std::size_t i = 0; i < entries.size(); ++i) {
             w(static_cast<Index>(i)) = static_cast<int>(f.integer(entries[i]));
           }
           if (!c.weights.empty() && w.size() != c.weights.front().size()) {
             f.fail("all weights must have the same rank");
           }
           c.weights.push_back(w);
         }
         c.weight_rank = c.weights.empty() ? 0 : static_cast<int>(c.weights.front().size());
       }},
      {"group.degrees",
       [&](const Field& f, const std::string& v) {
         c.degrees.clear();
         for (const std::string& d : split(v, ',')) {
           const long long x = f.integer(d);
           if (x < 0 || x > 10) f.fail("degree must lie in 0..10");
           c.degrees.push_back(static_cast<int>(x));
         }
       }},
      {"group.basis_file", [&](const Field&, const std::string& v) { c.basis_file = v; }},
      {"group.metric",
       [&](const Field& f, const std::string& v) {
         if (v != "default" && v != "trace" && v != "euclidean") {
           f.fail("expected default, trace or euclidean");
         }
         c.metric = v;
       }},
      {"group.torus_generator",
       [&](const Field& f, const std::string& v) { c.torus_generator = int(f.integer(v)); }},
      {"initial_vector",
       [&](const Field& f, const std::string& v) { c.initial_vector = f.complex_list(v); }},
      {"flow.mode",
       [&](const Field& f, const std::string& v) {
         if (v == "affine") c.mode = FlowMode::affine;
         else if (v == "projective") c.mode = FlowMode::projective;
         else if (v == "cointegrate") c.mode = FlowMode::cointegrate;
         else f.fail("expected affine, projective or cointegrate, got '" + v + "'");
       }},
      {"flow.t_max", num(c.t_max)},
      {"flow.projective_t_max", num(c.projective_t_max)},
      {"flow.eps_grad", num(c.eps_grad)},
      {"flow.initial_step", num(c.initial_step)},
      {"flow.rtol", num(c.rtol)},
      {"analyses.rates", flag(c.rates)},
      {"analyses.clock", flag(c.clock)},
      {"analyses.ray", flag(c.ray)},
      {"analyses.degeneration", flag(c.degeneration)},
      {"analyses.oracle", flag(c.oracle)},
      {"analyses.normal_form", flag(c.normal_form)},
      {"analyses.kempf_ness", flag(c.kempf_ness)},
      {"normal_form.z0",
       [&](const Field& f, const std::string& v) { c.z0 = f.complex_list(v); }},
      {"normal_form.samples", count(c.normal_form_samples)},
      {"normal_form.step", num(c.normal_form_step)},
      {"kempf_ness.geodesics", count(c.kempf_ness_geodesics)},
      {"kempf_ness.h_path", num(c.kempf_ness_h_path)},
      {"output_dir", [&](const Field&, const std::string& v) { c.output_dir = v; }},
      {"seed",
       [&](const Field& f, const std::string& v) {
         const long long x = f.integer(v);
         if (x < 0) f.fail("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"check.decay_target", num(k.decay_target)},
      {"check.decay_tol", num(k.decay_tol)},
      {"check.alpha_target", num(k.alpha_target)},
      {"check.alpha_tol", num(k.alpha_tol)},
      {"check.plateau_ratio", num(k.plateau_ratio)},
      {"check.quartic_floor", num(k.quartic_floor)},
      {"check.clock_r2", num(k.clock_r2)},
      {"check.lift", num(k.lift)},
      {"check.kempf_ness", num(k.kempf_ness)},
      {"check.convexity", num(k.convexity)},
      {"check.ray_angle", num(k.ray_angle)},
      {"check.ray_residual", num(k.ray_residual)},
      {"check.ray_spectrum", num(k.ray_spectrum)},
      {"check.ray_monotone", flag(k.ray_monotone)},
      {"check.oracle_angle", num(k.oracle_angle)},
      {"check.collapse", num(k.collapse)},
      {"check.moment_identity", num(k.moment_identity)},
      {"check.closedness", num(k.closedness)},
      {"check.negative_control", num(k.negative_control)},
      {"check.gram", num(k.gram)},
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source, line, "", "expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(source, line, key, "unknown key");
    if (c.lines.count(key)) {
      throw ConfigError(source, line, key,
                        "duplicate key (first set on line " + std::to_string(c.lines[key]) + ")");
    }
    c.lines[key] = line;
    it->second(Field{source, line, key}, value);
  }

  auto line_of = [&](const std::string& key) {
    const auto it = c.lines.find(key);
    return it == c.lines.end() ? 0 : it->second;
  };
  if (!(c.t_max > 0.0)) throw ConfigError(source, line_of("flow.t_max"), "flow.t_max", "must be positive");
  if (!(c.projective_t_max > 0.0)) {
    throw ConfigError(source, line_of("flow.projective_t_max"), "flow.projective_t_max",
                      "must be positive");
  }
  if (!(c.eps_grad > 0.0)) {
    throw ConfigError(source, line_of("flow.eps_grad"), "flow.eps_grad", "must be positive");
  }
  if (!(c.initial_step > 0.0)) {
    throw ConfigError(source, line_of("flow.initial_step"), "flow.initial_step",
                      "must be positive");
  }
  if (c.initial_vector.size() == 0) {
    throw ConfigError(source, 0, "initial_vector", "missing");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open file");
  return parse_config(in, path);
}

std::vector<std::string> list_builtins() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_texts()) names.push_back(name);
  return names;
}

std::string builtin_config_text(const std::string& name) {
  const auto& texts = builtin_texts();
  const auto it = texts.find(name);
  if (it == texts.end()) throw ConfigError("--builtin", 0, "", "unknown builtin '" + name + "'");
  return it->second;
}

ExperimentConfig builtin_config(const std::string& name) {
  std::istringstream in(builtin_config_text(name));
  return parse_config(in, "builtin:" + name);
}

namespace {

std::vector<CMatrix> read_basis_file(const ExperimentConfig& c, int line) {
  std::ifstream in(c.basis_file);
  if (!in) throw ConfigError(c.source, line, "group.basis_file", "cannot open '" + c.basis_file + "'");
  std::vector<CMatrix> basis;
  std::vector<std::vector<Complex>> rows;
  auto flush = [&]() {
    if (rows.empty()) return;
    const auto n = static_cast<Index>(rows.size());
    CMatrix m(n, n);
    for (Index r = 0; r < n; ++r) {
      if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
        throw ConfigError(c.basis_file, 0, "group.basis_file", "matrix " +
                          std::to_string(basis.size()) + " is not square");
      }
      for (Index col = 0; col < n; ++col) m(r, col) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
    }
    basis.push_back(std::move(m));
    rows.clear();
  };
  std::string raw;
  int file_line = 0;
  const std::string key = "group.basis_file";
  while (std::getline(in, raw)) {
    ++file_line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) {
      flush();
      continue;
    }
    std::istringstream tokens(text);
    std::string tok;
    std::vector<Complex> row;
    const Field f{c.basis_file, file_line, key};
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      row.push_back(colon == std::string::npos
                        ? Complex(f.number(tok))
                        : Complex(f.number(tok.substr(0, colon)), f.number(tok.substr(colon + 1))));
    }
    rows.push_back(std::move(row));
  }
  flush();
  if (basis.empty()) throw ConfigError(c.basis_file, 0, key, "no matrices found");
  return basis;
}

}  // namespace

GroupPresentation build_group(const ExperimentConfig& c) {
  auto line_of = [&](const std::string& key) {
    const auto it = c.lines.find(key);
    return it == c.lines.end() ? 0 : it->second;
  };
  std::optional<GroupPresentation> p;
  switch (c.group_kind) {
    case GroupKind::torus: {
      if (c.weights.empty()) throw ConfigError(c.source, 0, "group.weights", "missing");
      WeightSystem w{c.weight_rank, c.weights};
      p = torus_presentation(w);
      if (c.metric == "trace") {
        p = GroupPresentation(p->dim_v(), p->basis(), trace_metric(p->basis()),
                              PresentationKind::torus);
      }
      break;
    }
    case GroupKind::su2: {
      if (c.degrees.empty()) throw ConfigError(c.source, 0, "group.degrees", "missing");
      p = su2_presentation(c.degrees);
      if (c.metric == "euclidean") {
        p = GroupPresentation(p->dim_v(), p->basis(), RMatrix::Identity(3, 3));
      }
      break;
    }
    case GroupKind::matrix_basis: {
      if (c.basis_file.empty()) throw ConfigError(c.source, 0, "group.basis_file", "missing");
      std::vector<CMatrix> basis = read_basis_file(c, line_of("group.basis_file"));
      const Index n = basis.front().rows();
      try {
        if (c.metric == "euclidean") {
          const auto k = static_cast<Index>(basis.size());
          p = GroupPresentation(n, std::move(basis), RMatrix::Identity(k, k));
        } else {
          p = make_presentation(n, std::move(basis));
        }
      } catch (const StructuralError& e) {
        throw ConfigError(c.source, line_of("group.basis_file"), "group.basis_file", e.what());
      }
      break;
    }
  }
  const std::string group_key = c.group_kind == GroupKind::torus ? "group.weights"
                                : c.group_kind == GroupKind::su2 ? "group.degrees"
                                                                 : "group.basis_file";
  if (c.initial_vector.size() != p->dim_v()) {
    throw ConfigError(c.source, line_of("initial_vector"), "initial_vector",
                      "has " + std::to_string(c.initial_vector.size()) + " entries but " +
                          group_key + " defines a space of dimension " +
                          std::to_string(p->dim_v()));
  }
  if (c.z0 && c.z0->size() != p->dim_v()) {
    throw ConfigError(c.source, line_of("normal_form.z0"), "normal_form.z0",
                      "has " + std::to_string(c.z0->size()) + " entries but " + group_key +
                          " defines a space of dimension " + std::to_string(p->dim_v()));
  }
  if (c.torus_generator >= p->rank()) {
    throw ConfigError(c.source, line_of("group.torus_generator"), "group.torus_generator",
                      "index exceeds the rank " + std::to_string(p->rank()));
  }
  if (c.normal_form && !c.z0) {
    throw ConfigError(c.source, line_of("analyses.normal_form"), "normal_form.z0",
                      "required by analyses.normal_form");
  }
  if ((c.ray || c.kempf_ness) && c.mode != FlowMode::cointegrate) {
    const std::string key = c.ray ? "analyses.ray" : "analyses.kempf_ness";
    throw ConfigError(c.source, line_of(key), key, "requires flow.mode = cointegrate");
  }
  return *p;
}

std::string canonical_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  auto vec = [](const CVector& v) {
    std::string s;
    for (Index i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(v(i).real()) + ":" + format_double(v(i).imag());
    }
    return s;
  };
  os << "name = " << c.name << '\n';
  os << "group.kind = "
     << (c.group_kind == GroupKind::torus ? "torus"
         : c.group_kind == GroupKind::su2 ? "su2"
                                          : "matrix_basis")
     << '\n';
  if (!c.weights.empty()) {
    os << "group.weights = ";
    for (std::size_t i = 0; i < c.weights.size(); ++i) {
      if (i) os << "; ";
      for (Index j = 0; j < c.weights[i].size(); ++j) os << (j ? ", " : "") << c.weights[i](j);
    }
    os << '\n';
  }
  if (!c.degrees.empty()) {
    os << "group.degrees = ";
    for (std::size_t i = 0; i < c.degrees.size(); ++i) os << (i ? ", " : "") << c.degrees[i];
    os << '\n';
  }
  if (!c.basis_file.empty()) os << "group.basis_file = " << c.basis_file << '\n';
  os << "group.metric = " << c.metric << '\n';
  if (c.torus_generator >= 0) os << "group.torus_generator = " << c.torus_generator << '\n';
  os << "initial_vector = " << vec(c.initial_vector) << '\n';
  os << "flow.mode = "
     << (c.mode == FlowMode::affine ? "affine"
         : c.mode == FlowMode::projective ? "projective"
                                          : "cointegrate")
     << '\n';
  os << "flow.t_max = " << format_double(c.t_max) << '\n';
  os << "flow.projective_t_max = " << format_double(c.projective_t_max) << '\n';
  os << "flow.eps_grad = " << format_double(c.eps_grad) << '\n';
  os << "flow.initial_step = " << format_double(c.initial_step) << '\n';
  os << "flow.rtol = " << format_double(c.rtol) << '\n';
  os << "analyses.rates = " << b(c.rates) << '\n';
  os << "analyses.clock = " << b(c.clock) << '\n';
  os << "analyses.ray = " << b(c.ray) << '\n';
  os << "analyses.degeneration = " << b(c.degeneration) << '\n';
  os << "analyses.oracle = " << b(c.oracle) << '\n';
  os << "analyses.normal_form = " << b(c.normal_form) << '\n';
  os << "analyses.kempf_ness = " << b(c.kempf_ness) << '\n';
  if (c.z0) os << "normal_form.z0 = " << vec(*c.z0) << '\n';
  os << "seed = " << c.seed << '\n';
  return os.str();
}

}  // namespace momentflow
