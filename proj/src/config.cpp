#include "xfel/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "xfel/error.hpp"
#include "xfel/radial.hpp"
#include "xfel/snapshot.hpp"

namespace xfel {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string suggestion(const std::string& word, const std::vector<std::string>& known) {
  std::string best;
  std::size_t best_d = 3;
  for (const auto& k : known) {
    const std::size_t d = edit_distance(word, k);
    if (d < best_d) best_d = d, best = k;
  }
  return best.empty() ? std::string{} : "; did you mean '" + best + "'?";
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw InvalidArgument("expected a finite number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw InvalidArgument("expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  const long long x = to_integer(v);
  if (x < INT32_MIN || x > INT32_MAX) throw InvalidArgument("integer out of range: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw InvalidArgument("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw InvalidArgument("expected a comma-separated list of numbers");
  return out;
}

std::string one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  std::string names;
  for (const char* a : allowed) {
    if (v == a) return v;
    names += names.empty() ? a : std::string(", ") + a;
  }
  throw InvalidArgument("'" + v + "' is not one of " + names);
}

struct Pending {
  int n = 64;
  double half_length = 6.0;
  std::string seed_path;
};

using Setter = std::function<void(RunConfig&, Pending&, const std::string&)>;
using Table = std::map<std::string, std::map<std::string, Setter>>;

#define NUM(field) [](RunConfig& c, Pending&, const std::string& v) { c.field = to_double(v); }
#define INT(field) [](RunConfig& c, Pending&, const std::string& v) { c.field = to_int(v); }

const Table& table() {
  static const Table t = {
      {"grid",
       {{"n", [](RunConfig&, Pending& p, const std::string& v) { p.n = to_int(v); }},
        {"half_length", [](RunConfig&, Pending& p, const std::string& v) { p.half_length = to_double(v); }}}},
      {"physics",
       {{"b", NUM(physics.b)},
        {"lambda1", NUM(physics.lambda1)},
        {"lambda2", NUM(physics.lambda2)},
        {"lambda3", NUM(physics.lambda3)},
        {"p", NUM(physics.p)},
        {"omega", NUM(physics.omega)}}},
      {"solver",
       {{"max_iters", INT(solver.max_iters)},
        {"tol", NUM(solver.tol)},
        {"constraint_tol", NUM(solver.constraint_tol)},
        {"identity_tol", NUM(solver.identity_tol)},
        {"initial_step", NUM(solver.initial_step)},
        {"preconditioner_shift", NUM(solver.preconditioner_shift)},
        {"symmetrize_period", INT(solver.symmetrize_period)},
        {"record_history", [](RunConfig& c, Pending&, const std::string& v) { c.solver.record_history = to_bool(v); }}}},
      {"evolve",
       {{"t_end", NUM(evolve.t_end)},
        {"dt_init", NUM(evolve.dt_init)},
        {"dt_min", NUM(evolve.dt_min)},
        {"blowup_gradient_factor", NUM(evolve.blowup_gradient_factor)},
        {"cfl_safety", NUM(evolve.cfl_safety)},
        {"energy_jump_tol", NUM(evolve.energy_jump_tol)},
        {"monitor_stride", INT(evolve.monitor_stride)},
        {"snapshot_stride", INT(evolve.snapshot_stride)}}},
      {"seed",
       {{"kind",
         [](RunConfig& c, Pending&, const std::string& v) {
           const std::string k = one_of(v, {"gaussian", "lifted_R", "snapshot_file"});
           c.seed.kind = k == "gaussian" ? SeedKind::gaussian : k == "lifted_R" ? SeedKind::lifted_R : SeedKind::snapshot_file;
         }},
        {"amplitude", NUM(seed.amplitude)},
        {"width", NUM(seed.width)},
        {"stretch", NUM(seed.stretch)},
        {"path", [](RunConfig&, Pending& p, const std::string& v) { p.seed_path = v; }},
        {"mass", NUM(seed.mass)},
        {"noise", NUM(seed.noise)}}},
      {"experiment",
       {{"name", [](RunConfig& c, Pending&, const std::string& v) { c.experiment.name = v; }},
        {"problem",
         [](RunConfig& c, Pending&, const std::string& v) {
           c.experiment.problem = one_of(v, {"d_omega", "gamma_c", "m_c", "d_K", "local_min"});
         }},
        {"c", NUM(experiment.c)},
        {"r_ball", NUM(experiment.r_ball)},
        {"c_values", [](RunConfig& c, Pending&, const std::string& v) { c.experiment.c_values = to_list(v); }},
        {"lambdas", [](RunConfig& c, Pending&, const std::string& v) { c.experiment.lambdas = to_list(v); }},
        {"cutoff_radius", NUM(experiment.cutoff_radius)},
        {"mass_lo", NUM(experiment.mass_lo)},
        {"mass_hi", NUM(experiment.mass_hi)},
        {"rel_tol", NUM(experiment.rel_tol)},
        {"threshold_tol", NUM(experiment.threshold_tol)},
        {"dr", NUM(experiment.dr)},
        {"r_max", NUM(experiment.r_max)},
        {"data", [](RunConfig& c, Pending&, const std::string& v) { c.experiment.data = one_of(v, {"seed", "ground_state"}); }},
        {"scale_kind",
         [](RunConfig& c, Pending&, const std::string& v) {
           c.experiment.scale_kind = one_of(v, {"amplitude", "mass_preserving"});
         }},
        {"scale_factor", NUM(experiment.scale_factor)},
        {"evolve_data", [](RunConfig& c, Pending&, const std::string& v) { c.experiment.evolve_data = to_bool(v); }}}},
      {"run",
       {{"output_dir", [](RunConfig& c, Pending&, const std::string& v) { c.output_dir = v; }},
        {"seed", [](RunConfig& c, Pending&, const std::string& v) {
           if (!v.empty() && v[0] == '-') throw InvalidArgument("seed must be a non-negative integer");
           std::uint64_t out = 0;
           const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
           if (ec != std::errc{} || ptr != v.data() + v.size()) throw InvalidArgument("seed must be a u64, got '" + v + "'");
           c.rng_seed = out;
         }}}},
  };
  return t;
}

#undef NUM
#undef INT

template <class M>
std::vector<std::string> keys_of(const M& m) {
  std::vector<std::string> out;
  for (const auto& kv : m) out.push_back(kv.first);
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what + " violated");
}

void validate_experiment(const ExperimentSpec& e) {
  if (e.c) require(*e.c > 0.0, "c > 0");
  if (e.r_ball) require(*e.r_ball > 0.0, "r_ball > 0");
  for (double c : e.c_values) require(c > 0.0, "c_values > 0");
  for (std::size_t i = 1; i < e.c_values.size(); ++i) require(e.c_values[i] > e.c_values[i - 1], "c_values strictly increasing");
  for (double l : e.lambdas) require(l > 1.0, "lambdas > 1");
  for (std::size_t i = 1; i < e.lambdas.size(); ++i) require(e.lambdas[i] < e.lambdas[i - 1], "lambdas strictly decreasing");
  require(e.cutoff_radius > 0.0, "cutoff_radius > 0");
  if (e.mass_lo) require(*e.mass_lo > 0.0, "mass_lo > 0");
  if (e.mass_lo && e.mass_hi) require(*e.mass_lo < *e.mass_hi, "mass_lo < mass_hi");
  require(e.rel_tol > 0.0 && e.rel_tol < 1.0, "rel_tol in (0,1)");
  require(e.threshold_tol > 0.0, "threshold_tol > 0");
  require(e.dr > 0.0, "dr > 0");
  require(e.r_max > 10 * e.dr, "r_max > 10 dr");
  require(e.scale_factor > 0.0, "scale_factor > 0");
}

void validate_seed(const SeedSpec& s) {
  require(s.amplitude > 0.0, "seed amplitude > 0");
  require(s.width > 0.0, "seed width > 0");
  require(s.stretch > 0.0, "seed stretch > 0");
  if (s.mass) require(*s.mass > 0.0, "seed mass > 0");
  require(s.noise >= 0.0, "seed noise >= 0");
  if (s.kind == SeedKind::snapshot_file) {
    if (s.path.empty()) throw InvalidArgument("seed kind snapshot_file needs a path");
    if (!std::filesystem::exists(s.path)) throw InvalidArgument("seed file does not exist: " + s.path.string());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const Table& tab = table();
  RunConfig cfg;
  Pending pend;
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> sections;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto c = s.find_first_of("#;"); c != std::string::npos) s.erase(c);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!tab.count(section))
        throw ConfigError("unknown section [" + section + "]" + suggestion(section, keys_of(tab)), line);
      if (!sections.insert(section).second) throw ConfigError("duplicate section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    if (section.empty()) throw ConfigError("key outside of any [section]", line);
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const auto& keys = tab.at(section);
    const auto it = keys.find(key);
    if (it == keys.end())
      throw ConfigError("unknown key '" + key + "' in [" + section + "]" + suggestion(key, keys_of(keys)), line);
    if (!seen.insert({section, key}).second) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    try {
      it->second(cfg, pend, value);
    } catch (const InvalidArgument& e) {
      throw ConfigError(section + "." + key + ": " + e.what(), line);
    }
  }
  if (!sections.count("grid") || !sections.count("physics"))
    throw ConfigError("a config needs at least [grid] and [physics]");
  if (!pend.seed_path.empty()) {
    const std::filesystem::path p = pend.seed_path;
    cfg.seed.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  try {
    cfg.grid = GridSpec::make(pend.n, pend.half_length);
    cfg.physics.validate();
    cfg.solver.validate();
    // the snapshot prefix is chosen by the runner inside the run directory
    EvolveConfig ec = cfg.evolve;
    ec.snapshot_prefix = "snapshots/step";
    ec.validate();
    validate_seed(cfg.seed);
    validate_experiment(cfg.experiment);
  } catch (const Error& e) {
    throw ConfigError(std::string("range error: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Field make_seed(const RunConfig& cfg) {
  const SeedSpec& s = cfg.seed;
  const GridSpec& g = cfg.grid;
  Field f;
  switch (s.kind) {
    case SeedKind::gaussian: {
      const double w2 = 2 * s.width * s.width;
      f = Field::from_function(g, [&](double x, double y, double z) {
        return cplx{s.amplitude * std::exp(-(x * x + y * y + z * z) / w2), 0.0};
      });
      break;
    }
    case SeedKind::lifted_R:
      f = lift_radial(solve_classical_R(), g, s.amplitude, s.stretch);
      break;
    case SeedKind::snapshot_file:
      f = read_snapshot(s.path);
      if (!(f.grid() == g)) throw GridMismatch("seed snapshot grid differs from [grid]");
      break;
  }
  if (s.noise > 0.0) {
    std::mt19937_64 rng(cfg.rng_seed);
    const double L = g.half_length;
    std::uniform_real_distribution<double> center(-0.2 * L, 0.2 * L), width(0.1 * L, 0.2 * L),
        phase(0.0, 2 * std::numbers::pi);
    const double scale = s.noise * f.max_abs();
    for (int b = 0; b < 3; ++b) {
      const double x0 = center(rng), y0 = center(rng), z0 = center(rng), w = width(rng);
      const cplx a = std::polar(scale, phase(rng));
      f += Field::from_function(g, [&](double x, double y, double z) {
        const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0) + (z - z0) * (z - z0);
        return a * std::exp(-r2 / (2 * w * w));
      });
    }
  }
  if (s.mass) f *= std::sqrt(*s.mass / f.mass());
  return f;
}

}  // namespace xfel
