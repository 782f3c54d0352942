#include "bardina/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bardina/errors.hpp"
#include "bardina/grid_transform.hpp"
#include "bardina/scenario.hpp"

namespace bardina {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("invalid value '" + text + "' for " + key, key);
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<double>(item, key));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

std::string join(const std::vector<double>& items) {
  std::vector<std::string> s;
  for (double v : items) s.push_back(format_double(v));
  return join(s);
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define BARDINA_NUM(SEC, KEY, TYPE, EXPR)                                                                   \
  Field {                                                                                                  \
    SEC, KEY, [](RunConfig& c, const std::string& v, const std::string& k) { EXPR = parse_number<TYPE>(v, k); }, \
        [](const RunConfig& c) {                                                                           \
          if constexpr (std::is_floating_point_v<TYPE>) return format_double(EXPR);                        \
          else return std::to_string(EXPR);                                                                \
        }                                                                                                  \
  }
#define BARDINA_STR(SEC, KEY, EXPR) \
  Field { SEC, KEY, [](RunConfig& c, const std::string& v, const std::string&) { EXPR = v; }, [](const RunConfig& c) { return EXPR; } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      BARDINA_NUM("solver", "alpha", double, c.solver.alpha),
      BARDINA_NUM("solver", "gamma", double, c.solver.gamma),
      BARDINA_NUM("solver", "N", int, c.solver.resolution),
      BARDINA_NUM("solver", "dt", double, c.solver.dt),
      BARDINA_NUM("solver", "T", double, c.solver.horizon),
      BARDINA_NUM("solver", "sample_every", int, c.solver.sample_every),
      BARDINA_NUM("solver", "cfl_max", double, c.solver.cfl_max),
      BARDINA_NUM("solver", "padding", double, c.solver.padding),

      BARDINA_STR("forcing", "kind", c.forcing.kind),
      BARDINA_NUM("forcing", "wavenumber", int, c.forcing.wavenumber),
      BARDINA_NUM("forcing", "amplitude", double, c.forcing.amplitude),
      BARDINA_NUM("forcing", "kmax", double, c.forcing.kmax),
      BARDINA_NUM("forcing", "seed", std::uint64_t, c.forcing.seed),
      Field{"forcing", "law",
            [](RunConfig&, const std::string& v, const std::string& k) {
              if (v != "constant") {
                throw ConfigError("time-dependent forcing is not supported (law must be 'constant')", k);
              }
            },
            [](const RunConfig&) { return std::string("constant"); }},

      BARDINA_STR("init", "kind", c.init.kind),
      BARDINA_NUM("init", "amplitude", double, c.init.amplitude),
      BARDINA_NUM("init", "kmax", double, c.init.kmax),
      BARDINA_NUM("init", "seed", std::uint64_t, c.init.seed),
      BARDINA_STR("init", "path", c.init.path),

      BARDINA_STR("output", "dir", c.output.dir),
      BARDINA_NUM("output", "checkpoint_every", int, c.output.checkpoint_every),

      Field{"certify", "certificates",
            [](RunConfig& c, const std::string& v, const std::string&) { c.certify.certificates = split_list(v); },
            [](const RunConfig& c) { return join(c.certify.certificates); }},
      BARDINA_NUM("certify", "test_functions", int, c.certify.test_functions),
      BARDINA_NUM("certify", "test_seed", std::uint64_t, c.certify.test_seed),
      BARDINA_NUM("certify", "test_kmax", int, c.certify.test_kmax),
      BARDINA_NUM("certify", "test_modes", int, c.certify.test_modes),
      BARDINA_NUM("certify", "test_amplitude", double, c.certify.test_amplitude),
      BARDINA_NUM("certify", "test_stride", int, c.certify.test_stride),
      BARDINA_NUM("certify", "shift", double, c.certify.shift),
      Field{"certify", "e_alpha_method",
            [](RunConfig& c, const std::string& v, const std::string& k) {
              if (v == "lanczos") c.certify.e_alpha.method = EAlphaMethod::lanczos;
              else if (v == "power") c.certify.e_alpha.method = EAlphaMethod::power;
              else throw ConfigError("e_alpha_method must be lanczos or power", k);
            },
            [](const RunConfig& c) {
              return std::string(c.certify.e_alpha.method == EAlphaMethod::lanczos ? "lanczos" : "power");
            }},
      BARDINA_NUM("certify", "e_alpha_max_iter", int, c.certify.e_alpha.max_iter),
      BARDINA_NUM("certify", "e_alpha_krylov_dim", int, c.certify.e_alpha.krylov_dim),
      BARDINA_NUM("certify", "e_alpha_rel_tol", double, c.certify.e_alpha.rel_tol),
      BARDINA_NUM("certify", "e_alpha_seeds", int, c.certify.e_alpha.seeds),
      BARDINA_NUM("certify", "e_alpha_seed", std::uint64_t, c.certify.e_alpha.seed),

      BARDINA_NUM("tolerance", "absolute", double, c.tolerance.absolute),
      BARDINA_NUM("tolerance", "relative", double, c.tolerance.relative),
      BARDINA_NUM("tolerance", "quadrature_safety", double, c.tolerance.quadrature_safety),

      Field{"sweep", "alphas",
            [](RunConfig& c, const std::string& v, const std::string& k) { c.sweep.alphas = parse_doubles(v, k); },
            [](const RunConfig& c) { return join(c.sweep.alphas); }},
      Field{"sweep", "init_rule",
            [](RunConfig& c, const std::string& v, const std::string& k) {
              try {
                c.sweep.rule = init_rule_from_string(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), k);
              }
            },
            [](const RunConfig& c) { return to_string(c.sweep.rule); }},

      Field{"semicontinuity", "alphas",
            [](RunConfig& c, const std::string& v, const std::string& k) {
              c.semicontinuity.alphas = parse_doubles(v, k);
            },
            [](const RunConfig& c) { return join(c.semicontinuity.alphas); }},
      BARDINA_NUM("semicontinuity", "reference_alpha", double, c.semicontinuity.reference_alpha),
      BARDINA_NUM("semicontinuity", "ensemble", int, c.semicontinuity.ensemble),
      BARDINA_NUM("semicontinuity", "perturbation", double, c.semicontinuity.perturbation),
      BARDINA_NUM("semicontinuity", "window_samples", int, c.semicontinuity.window_samples),
      BARDINA_NUM("semicontinuity", "window_stride", int, c.semicontinuity.window_stride),
      BARDINA_NUM("semicontinuity", "entry_time", double, c.semicontinuity.entry_time),
      BARDINA_NUM("semicontinuity", "sobolev_index", double, c.semicontinuity.sobolev_index),
  };
  return table;
}

#undef BARDINA_NUM
#undef BARDINA_STR

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

[[noreturn]] void fail(const std::string& what, const std::string& key, int line) {
  std::string msg = line > 0 ? "line " + std::to_string(line) + ": " : std::string("override: ");
  if (!key.empty()) msg += key + ": ";
  throw ConfigError(msg + what, key, line);
}

void assign(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value, int line) {
  const std::string full = section + "." + key;
  const Field* f = find_field(section, key);
  if (f == nullptr) {
    fail("unknown key", full, line);
  }
  try {
    f->set(cfg, value, full);
  } catch (const ConfigError& e) {
    fail(e.what(), full, line);
  }
}

void sync_ids(RunConfig& cfg) {
  cfg.solver.forcing_id = describe(cfg.forcing);
  cfg.solver.init_id = describe(cfg.init);
  cfg.solver.seed = cfg.init.seed;
}

bool strictly_decreasing_positive(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) return false;
    if (i > 0 && !(v[i] < v[i - 1])) return false;
  }
  return !v.empty();
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(what, key);
}

RunConfig parse_with_lines(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header", "", line_no);
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.section == section; });
      if (!known) fail("unknown section [" + section + "]", section, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value", "", line_no);
    if (section.empty()) fail("key outside a section", trim(line.substr(0, eq)), line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section + "." + key;
    if (lines.count(full)) fail("duplicate key (first set on line " + std::to_string(lines[full]) + ")", full, line_no);
    assign(cfg, section, key, trim(line.substr(eq + 1)), line_no);
    lines[full] = line_no;
  }
  for (const auto& o : overrides) {
    apply_override(cfg, o);
    lines[trim(o.substr(0, o.find('=')))] = 0;
  }
  sync_ids(cfg);
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    const auto it = lines.find(e.key());
    const int line = it == lines.end() ? 0 : it->second;
    std::string msg = e.what();
    if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
    throw ConfigError(msg, e.key(), line);
  }
  return cfg;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string lhs = trim(assignment.substr(0, eq));
  const auto dot = lhs.find('.');
  if (eq == std::string::npos || dot == std::string::npos) {
    fail("expected section.key=value, got '" + assignment + "'", lhs, 0);
  }
  assign(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), trim(assignment.substr(eq + 1)), 0);
  sync_ids(cfg);
}

void validate(const RunConfig& cfg) {
  cfg.solver.validate();
  const int kmax_mode = cfg.solver.resolution / 2 - 1;
  const auto& f = cfg.forcing;
  static const std::set<std::string> forcings{"zero", "kolmogorov", "random_divfree"};
  check(forcings.count(f.kind) > 0, "forcing.kind", "forcing.kind must be zero, kolmogorov or random_divfree");
  check(std::isfinite(f.amplitude), "forcing.amplitude", "forcing.amplitude must be finite");
  if (f.kind == "kolmogorov") {
    check(f.wavenumber >= 1 && f.wavenumber <= kmax_mode, "forcing.wavenumber",
          "forcing.wavenumber must lie in [1, N/2 - 1]");
  }
  if (f.kind == "random_divfree") {
    check(f.kmax >= 1.0, "forcing.kmax", "forcing.kmax must be >= 1");
    check(f.amplitude >= 0.0, "forcing.amplitude", "forcing.amplitude must be >= 0");
  }
  const auto& i = cfg.init;
  static const std::set<std::string> inits{"zero", "shear", "taylor_green", "random_divfree", "from_checkpoint"};
  check(inits.count(i.kind) > 0, "init.kind",
        "init.kind must be zero, shear, taylor_green, random_divfree or from_checkpoint");
  check(std::isfinite(i.amplitude), "init.amplitude", "init.amplitude must be finite");
  if (i.kind == "random_divfree") {
    check(i.kmax >= 1.0, "init.kmax", "init.kmax must be >= 1");
    check(i.amplitude >= 0.0, "init.amplitude", "init.amplitude must be >= 0");
  }
  if (i.kind == "from_checkpoint") {
    check(!i.path.empty(), "init.path", "init.path is required for from_checkpoint");
  }
  check(!cfg.output.dir.empty(), "output.dir", "output.dir must not be empty");
  check(cfg.output.checkpoint_every >= 0, "output.checkpoint_every", "output.checkpoint_every must be >= 0");

  const auto& c = cfg.certify;
  static const std::set<std::string> certs{"dissipative", "energy",    "variational",
                                           "semigroup",   "absorbing", "m_properties"};
  for (const auto& name : c.certificates) {
    check(certs.count(name) > 0, "certify.certificates", "unknown certificate '" + name + "'");
  }
  check(c.test_functions >= 0, "certify.test_functions", "certify.test_functions must be >= 0");
  check(c.test_kmax >= 1 && c.test_kmax <= kmax_mode, "certify.test_kmax",
        "certify.test_kmax must lie in [1, N/2 - 1]");
  check(c.test_modes >= 1, "certify.test_modes", "certify.test_modes must be >= 1");
  check(c.test_amplitude >= 0.0 && std::isfinite(c.test_amplitude), "certify.test_amplitude",
        "certify.test_amplitude must be >= 0");
  check(c.test_stride >= 1, "certify.test_stride", "certify.test_stride must be >= 1");
  check(c.shift >= 0.0 && c.shift <= cfg.solver.horizon, "certify.shift", "certify.shift must lie in [0, T]");
  check(c.e_alpha.max_iter >= 1, "certify.e_alpha_max_iter", "certify.e_alpha_max_iter must be >= 1");
  check(c.e_alpha.krylov_dim >= 2, "certify.e_alpha_krylov_dim", "certify.e_alpha_krylov_dim must be >= 2");
  check(c.e_alpha.rel_tol > 0.0, "certify.e_alpha_rel_tol", "certify.e_alpha_rel_tol must be > 0");
  check(c.e_alpha.seeds >= 1, "certify.e_alpha_seeds", "certify.e_alpha_seeds must be >= 1");

  // negative values demand a strict margin
  check(std::isfinite(cfg.tolerance.absolute), "tolerance.absolute", "tolerance.absolute must be finite");
  check(std::isfinite(cfg.tolerance.relative), "tolerance.relative", "tolerance.relative must be finite");
  check(cfg.tolerance.quadrature_safety >= 0.0, "tolerance.quadrature_safety",
        "tolerance.quadrature_safety must be >= 0");

  check(strictly_decreasing_positive(cfg.sweep.alphas), "sweep.alphas",
        "sweep.alphas must be positive and strictly decreasing");

  const auto& s = cfg.semicontinuity;
  for (double a : s.alphas) {
    check(a > 0.0 && std::isfinite(a), "semicontinuity.alphas", "semicontinuity.alphas must be positive");
  }
  check(!s.alphas.empty(), "semicontinuity.alphas", "semicontinuity.alphas must not be empty");
  check(s.reference_alpha > 0.0, "semicontinuity.reference_alpha", "semicontinuity.reference_alpha must be > 0");
  check(s.ensemble >= 1, "semicontinuity.ensemble", "semicontinuity.ensemble must be >= 1");
  check(s.perturbation >= 0.0, "semicontinuity.perturbation", "semicontinuity.perturbation must be >= 0");
  check(s.window_samples >= 1, "semicontinuity.window_samples", "semicontinuity.window_samples must be >= 1");
  check(s.window_stride >= 1, "semicontinuity.window_stride", "semicontinuity.window_stride must be >= 1");
  check(s.sobolev_index <= 0.0, "semicontinuity.sobolev_index", "semicontinuity.sobolev_index must be <= 0");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  return parse_with_lines(text, overrides);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string(), "--config");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace bardina
