#include "app/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rpsde/csv.hpp"
#include "rpsde/integrate.hpp"
#include "rpsde/markov.hpp"
#include "rpsde/measures.hpp"

namespace rpsde::app {

namespace {

enum class Kind { real, integer, seed, text, reals, integers, terms };

struct KeySpec {
  Kind kind;
  std::string fallback;
};

using Schema = std::map<std::string, std::map<std::string, KeySpec>>;

const Schema& schema() {
  static const Schema s = {
      {"run", {{"seed", {Kind::seed, "1"}}}},
      {"model",
       {{"name", {Kind::text, "cubic"}},
        {"gamma", {Kind::real, "0"}},
        {"delta", {Kind::real, "0"}},
        {"alpha_constant", {Kind::real, "1"}},
        {"alpha_sin", {Kind::reals, ""}},
        {"alpha_cos", {Kind::reals, ""}},
        {"omega", {Kind::real, "1"}},
        {"noise_scale", {Kind::real, "1"}},
        {"period", {Kind::real, "0"}},
        {"state_dim", {Kind::integer, "1"}},
        {"noise_dim", {Kind::integer, "1"}}}},
      {"grid", {{"dt", {Kind::real, "0.01"}}, {"steps_per_period", {Kind::integer, "0"}}}},
      {"simulate",
       {{"x0", {Kind::reals, ""}},
        {"start_index", {Kind::integer, "0"}},
        {"periods", {Kind::integer, "1"}},
        {"scheme", {Kind::text, "euler"}}}},
      {"pullback",
       {{"x0", {Kind::reals, ""}},
        {"phase_index", {Kind::integer, "0"}},
        {"tol", {Kind::real, "1e-08"}},
        {"n_cap", {Kind::integer, "200"}},
        {"sequence_depth", {Kind::integer, "6"}},
        {"scheme", {Kind::text, "euler"}}}},
      {"verify",
       {{"x0", {Kind::reals, ""}},
        {"phase_index", {Kind::integer, "0"}},
        {"tol", {Kind::real, "1e-06"}},
        {"n_cap", {Kind::integer, "200"}},
        {"replicas", {Kind::integer, "1"}},
        {"scheme", {Kind::text, "euler"}}}},
      {"check",
       {{"box_radius", {Kind::real, "5"}},
        {"n_times", {Kind::integer, "64"}},
        {"n_points", {Kind::integer, "101"}},
        {"near_diagonal", {Kind::real, "1e-07"}},
        {"sample_seed", {Kind::seed, "7"}},
        {"p", {Kind::real, "2"}}}},
      {"contract",
       {{"x0", {Kind::reals, ""}},
        {"y0", {Kind::reals, ""}},
        {"start_index", {Kind::integer, "0"}},
        {"periods", {Kind::integer, "20"}},
        {"replicas", {Kind::integer, "1"}},
        {"max_slope", {Kind::real, "0"}},
        {"scheme", {Kind::text, "euler"}}}},
      {"measure",
       {{"phases", {Kind::integers, "0"}},
        {"n", {Kind::integer, "1000"}},
        {"x0", {Kind::reals, ""}},
        {"tol", {Kind::real, "1e-08"}},
        {"n_cap", {Kind::integer, "200"}},
        {"invariance", {Kind::text, "shifted_paths"}},
        {"invariance_phase", {Kind::integer, "0"}},
        {"bootstrap_draws", {Kind::integer, "200"}}}},
      {"kb",
       {{"s_index", {Kind::integer, "0"}},
        {"x", {Kind::real, "0"}},
        {"t_index", {Kind::integer, "0"}},
        {"lo", {Kind::real, "-inf"}},
        {"hi", {Kind::real, "inf"}},
        {"n_periods", {Kind::integer, "10"}},
        {"n_mc", {Kind::integer, "1000"}},
        {"reference_n", {Kind::integer, "0"}}}},
      {"ergodic",
       {{"s_index", {Kind::integer, "0"}},
        {"x", {Kind::real, "0"}},
        {"h", {Kind::text, "identity"}},
        {"h_params", {Kind::reals, ""}},
        {"n_periods", {Kind::integer, "1000"}},
        {"reference_n", {Kind::integer, "0"}}}},
      {"mixing",
       {{"s_index", {Kind::integer, "0"}},
        {"x", {Kind::real, "1"}},
        {"y", {Kind::real, "-1"}},
        {"h", {Kind::text, "tanh"}},
        {"h_params", {Kind::reals, ""}},
        {"n_list", {Kind::integers, "1,2,3"}},
        {"n", {Kind::integer, "1000"}},
        {"p", {Kind::real, "2"}},
        {"reference_n", {Kind::integer, "0"}}}},
      {"bel",
       {{"s_index", {Kind::integer, "0"}},
        {"x", {Kind::real, "0"}},
        {"v", {Kind::real, "1"}},
        {"h", {Kind::text, "identity"}},
        {"h_params", {Kind::reals, ""}},
        {"horizon_steps", {Kind::integer, "100"}},
        {"n", {Kind::integer, "10000"}},
        {"fd_n", {Kind::integer, "0"}},
        {"fd_eps", {Kind::real, "0.001"}}}},
  };
  return s;
}

// drift<i> and diffusion<i>_<k> of the polynomial model.
const std::regex& term_key() {
  static const std::regex re(R"((drift)([1-9][0-9]*)|(diffusion)([1-9][0-9]*)_([1-9][0-9]*))");
  return re;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> to_real(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || std::isnan(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_integer(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno != 0) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

std::optional<std::uint64_t> to_seed(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty() || t.front() == '-') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno != 0) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// One polynomial term: "c [sin a1 a2 ..] [cos b1 ..] [@ e1 .. ed]".
struct ParsedTerm {
  TrigPoly coefficient;
  std::vector<int> exponents;
};

std::optional<ParsedTerm> parse_term(const std::string& text, std::string& why) {
  ParsedTerm term;
  std::string coef = text;
  std::string powers;
  if (const auto at = text.find('@'); at != std::string::npos) {
    coef = text.substr(0, at);
    powers = text.substr(at + 1);
  }
  std::istringstream in(coef);
  std::string word;
  std::vector<double>* target = nullptr;
  bool have_constant = false;
  while (in >> word) {
    if (word == "sin") {
      target = &term.coefficient.sin_coef;
    } else if (word == "cos") {
      target = &term.coefficient.cos_coef;
    } else if (const auto v = to_real(word)) {
      if (target) {
        target->push_back(*v);
      } else if (!have_constant) {
        term.coefficient.constant = *v;
        have_constant = true;
      } else {
        why = "more than one constant before 'sin'/'cos'";
        return std::nullopt;
      }
    } else {
      why = "unexpected token '" + word + "'";
      return std::nullopt;
    }
  }
  if (!have_constant && !target) {
    why = "empty coefficient";
    return std::nullopt;
  }
  std::istringstream pin(powers);
  while (pin >> word) {
    const auto e = to_integer(word);
    if (!e || *e < 0 || *e > 64) {
      why = "bad exponent '" + word + "'";
      return std::nullopt;
    }
    term.exponents.push_back(static_cast<int>(*e));
  }
  return term;
}

std::optional<std::vector<ParsedTerm>> parse_terms(const std::string& text, std::string& why) {
  std::vector<ParsedTerm> out;
  if (trim(text).empty()) return out;
  for (const auto& piece : split(text, ';')) {
    if (piece.empty()) {
      why = "empty term";
      return std::nullopt;
    }
    auto term = parse_term(piece, why);
    if (!term) return std::nullopt;
    out.push_back(std::move(*term));
  }
  return out;
}

std::string format_terms(const std::vector<ParsedTerm>& terms) {
  std::vector<std::string> parts;
  for (const auto& t : terms) {
    std::string s = format_real(t.coefficient.constant);
    if (!t.coefficient.sin_coef.empty()) {
      s += " sin";
      for (double c : t.coefficient.sin_coef) s += " " + format_real(c);
    }
    if (!t.coefficient.cos_coef.empty()) {
      s += " cos";
      for (double c : t.coefficient.cos_coef) s += " " + format_real(c);
    }
    if (!t.exponents.empty()) {
      s += " @";
      for (int e : t.exponents) s += " " + std::to_string(e);
    }
    parts.push_back(s);
  }
  return join(parts, "; ");
}

// Canonical form of `raw` for `kind`, or nullopt with a reason.
std::optional<std::string> canonical(Kind kind, const std::string& raw, std::string& why) {
  const std::string value = trim(raw);
  switch (kind) {
    case Kind::real:
      if (const auto v = to_real(value)) return format_real(*v);
      why = "expected a real number";
      return std::nullopt;
    case Kind::integer:
      if (const auto v = to_integer(value)) return std::to_string(*v);
      why = "expected an integer";
      return std::nullopt;
    case Kind::seed:
      if (const auto v = to_seed(value)) return std::to_string(*v);
      why = "expected an unsigned 64-bit integer";
      return std::nullopt;
    case Kind::text:
      if (value.empty()) {
        why = "expected a non-empty word";
        return std::nullopt;
      }
      return value;
    case Kind::reals: {
      if (value.empty()) return std::string();
      std::vector<std::string> parts;
      for (const auto& item : split(value, ',')) {
        const auto v = to_real(item);
        if (!v) {
          why = "expected comma separated reals";
          return std::nullopt;
        }
        parts.push_back(format_real(*v));
      }
      return join(parts, ",");
    }
    case Kind::integers: {
      if (value.empty()) return std::string();
      std::vector<std::string> parts;
      for (const auto& item : split(value, ',')) {
        const auto v = to_integer(item);
        if (!v) {
          why = "expected comma separated integers";
          return std::nullopt;
        }
        parts.push_back(std::to_string(*v));
      }
      return join(parts, ",");
    }
    case Kind::terms: {
      const auto terms = parse_terms(value, why);
      if (!terms) return std::nullopt;
      return format_terms(*terms);
    }
  }
  return std::nullopt;
}

std::optional<KeySpec> lookup(const std::string& section, const std::string& key) {
  const auto s = schema().find(section);
  if (s == schema().end()) return std::nullopt;
  if (const auto k = s->second.find(key); k != s->second.end()) return k->second;
  if (section == "model" && std::regex_match(key, term_key())) return KeySpec{Kind::terms, ""};
  return std::nullopt;
}

const std::string& raw_value(const ExperimentConfig& config, const std::string& section,
                             const std::string& key, const std::string& fallback) {
  const auto& v = config.values();
  if (const auto s = v.find(section); s != v.end()) {
    if (const auto k = s->second.find(key); k != s->second.end()) return k->second;
  }
  return fallback;
}

KeySpec require_spec(const std::string& section, const std::string& key) {
  const auto spec = lookup(section, key);
  if (!spec) throw InvalidArgument("no configuration key [" + section + "] " + key);
  return *spec;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid configuration:\n  " + join(problems, "\n  ")),
      problems_(std::move(problems)) {}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

double ExperimentConfig::real(const std::string& section, const std::string& key) const {
  const auto spec = require_spec(section, key);
  return *to_real(raw_value(*this, section, key, spec.fallback));
}

std::int64_t ExperimentConfig::integer(const std::string& section, const std::string& key) const {
  const auto spec = require_spec(section, key);
  return *to_integer(raw_value(*this, section, key, spec.fallback));
}

std::uint64_t ExperimentConfig::seed() const {
  return *to_seed(raw_value(*this, "run", "seed", require_spec("run", "seed").fallback));
}

std::string ExperimentConfig::text(const std::string& section, const std::string& key) const {
  const auto spec = require_spec(section, key);
  return raw_value(*this, section, key, spec.fallback);
}

std::vector<double> ExperimentConfig::reals(const std::string& section,
                                            const std::string& key) const {
  const std::string raw = text(section, key);
  std::vector<double> out;
  if (raw.empty()) return out;
  for (const auto& item : split(raw, ',')) out.push_back(*to_real(item));
  return out;
}

std::vector<std::int64_t> ExperimentConfig::integers(const std::string& section,
                                                     const std::string& key) const {
  const std::string raw = text(section, key);
  std::vector<std::int64_t> out;
  if (raw.empty()) return out;
  for (const auto& item : split(raw, ',')) out.push_back(*to_integer(item));
  return out;
}

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           const std::string& value) {
  const auto spec = lookup(section, key);
  if (!spec) throw ConfigError({"[" + section + "] " + key + ": unknown key"});
  std::string why;
  const auto c = canonical(spec->kind, value, why);
  if (!c) throw ConfigError({"[" + section + "] " + key + ": " + why + " (got '" + value + "')"});
  values_[section][key] = *c;
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  ExperimentConfig config;
  std::vector<std::string> problems;
  for (const auto& [section, keys] : tree) {
    if (!keys.data().empty()) {
      problems.push_back(section + ": keys must belong to a [section]");
      continue;
    }
    if (schema().count(section) == 0) {
      problems.push_back("[" + section + "]: unknown section");
      continue;
    }
    auto& out = config.values_[section];
    for (const auto& [key, node] : keys) {
      const auto spec = lookup(section, key);
      if (!spec) {
        problems.push_back("[" + section + "] " + key + ": unknown key");
        continue;
      }
      std::string why;
      const auto value = canonical(spec->kind, node.data(), why);
      if (!value) {
        problems.push_back("[" + section + "] " + key + ": " + why + " (got '" + node.data() +
                           "')");
        continue;
      }
      out[key] = *value;
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError({"cannot read config file '" + file.string() + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, keys] : config.values()) {
    if (keys.empty()) continue;
    if (!first) out << '\n';
    first = false;
    out << '[' << section << "]\n";
    for (const auto& [key, value] : keys) out << key << " = " << value << '\n';
  }
  return out.str();
}

SdeModel build_model(const ExperimentConfig& config) {
  const std::string name = config.text("model", "name");
  std::vector<std::string> problems;
  auto fail = [&](const std::string& p) { problems.push_back("[model] " + p); };
  SdeModel model;
  try {
    if (name == "cubic") {
      model = build_cubic_scalar({config.real("model", "gamma"), config.real("model", "delta")});
    } else if (name == "linear") {
      LinearPeriodicSpec spec;
      spec.alpha.constant = config.real("model", "alpha_constant");
      spec.alpha.sin_coef = config.reals("model", "alpha_sin");
      spec.alpha.cos_coef = config.reals("model", "alpha_cos");
      spec.alpha.omega = config.real("model", "omega");
      spec.noise_scale = config.real("model", "noise_scale");
      if (config.has("model", "period")) spec.period = config.real("model", "period");
      model = build_linear_periodic(spec);
    } else if (name == "polynomial") {
      PolynomialModelSpec spec;
      spec.state_dim = static_cast<int>(config.integer("model", "state_dim"));
      spec.noise_dim = static_cast<int>(config.integer("model", "noise_dim"));
      spec.period = config.real("model", "period");
      const double omega = config.real("model", "omega");
      if (spec.state_dim < 1 || spec.noise_dim < 1) {
        fail("state_dim and noise_dim must be positive");
        throw ConfigError(problems);
      }
      const auto d = static_cast<std::size_t>(spec.state_dim);
      const auto m = static_cast<std::size_t>(spec.noise_dim);
      spec.drift.resize(d);
      spec.diffusion.resize(d * m);
      const auto& keys = config.values().count("model") ? config.values().at("model")
                                                         : ExperimentConfig::Section{};
      for (const auto& [key, value] : keys) {
        std::smatch match;
        if (!std::regex_match(key, match, term_key())) continue;
        std::string why;
        auto terms = parse_terms(value, why);
        std::vector<PolyTerm> out;
        for (auto& t : *terms) {
          if (t.exponents.empty()) t.exponents.assign(d, 0);
          if (t.exponents.size() != d) {
            fail(key + ": every term needs " + std::to_string(d) + " exponents");
            break;
          }
          t.coefficient.omega = omega;
          out.push_back(PolyTerm{t.coefficient, t.exponents});
        }
        if (match[1].matched) {
          const auto i = std::stoul(match[2]);
          if (i > d) {
            fail(key + ": component exceeds state_dim");
          } else {
            spec.drift[i - 1] = std::move(out);
          }
        } else {
          const auto i = std::stoul(match[4]);
          const auto k = std::stoul(match[5]);
          if (i > d || k > m) {
            fail(key + ": index exceeds state_dim or noise_dim");
          } else {
            spec.diffusion[(i - 1) * m + (k - 1)] = std::move(out);
          }
        }
      }
      if (problems.empty()) model = build_polynomial(spec);
    } else {
      fail("name: unknown model '" + name + "' (expected cubic, linear, polynomial)");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return model;
}

GridSpec build_grid(const ExperimentConfig& config, double period) {
  const auto steps = config.integer("grid", "steps_per_period");
  if (steps < 0) throw ConfigError({"[grid] steps_per_period: must be non-negative"});
  if (steps > 0) return GridSpec(period, steps);
  const double dt = config.real("grid", "dt");
  if (!(dt > 0.0) || !(dt <= period)) {
    throw ConfigError({"[grid] dt: must lie in (0, period]"});
  }
  return GridSpec::from_dt(period, dt);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "pullback", "verify-rps", "check",
                                                 "contract", "measure",  "kb",         "ergodic",
                                                 "mixing",   "bel"};
  return names;
}

void validate_for_command(const ExperimentConfig& config, const std::string& command) {
  std::vector<std::string> problems;
  if (std::find(command_names().begin(), command_names().end(), command) ==
      command_names().end()) {
    throw ConfigError({"unknown command '" + command + "'"});
  }
  std::optional<SdeModel> model;
  try {
    model = build_model(config);
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  std::optional<GridSpec> grid;
  if (model) {
    try {
      grid = build_grid(config, model->period);
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const Error& e) {
      problems.push_back(std::string("[grid] ") + e.what());
    }
  }
  const std::string section = command == "verify-rps" ? "verify" : command;
  auto positive = [&](const std::string& key) {
    if (config.integer(section, key) < 1) {
      problems.push_back("[" + section + "] " + key + ": must be at least 1");
    }
  };
  auto positive_real = [&](const std::string& key) {
    if (!(config.real(section, key) > 0.0)) {
      problems.push_back("[" + section + "] " + key + ": must be positive");
    }
  };
  auto state = [&](const std::string& key) {
    const auto v = config.reals(section, key);
    if (model && !v.empty() && v.size() != model->d()) {
      problems.push_back("[" + section + "] " + key + ": needs " + std::to_string(model->d()) +
                         " components");
    }
  };
  auto scheme = [&]() {
    try {
      (void)scheme_from_string(config.text(section, "scheme"));
    } catch (const Error& e) {
      problems.push_back("[" + section + "] scheme: " + e.what());
    }
  };
  auto phase = [&](const std::string& key) {
    const auto k = config.integer(section, key);
    if (grid && (k < 0 || k >= grid->steps_per_period())) {
      problems.push_back("[" + section + "] " + key + ": must lie in [0, " +
                         std::to_string(grid->steps_per_period()) + ")");
    }
  };
  auto test_function = [&]() {
    try {
      (void)make_test_function(config.text(section, "h"), config.reals(section, "h_params"));
    } catch (const Error& e) {
      problems.push_back("[" + section + "] h: " + e.what());
    }
  };
  auto scalar = [&]() {
    if (model && model->state_dim != 1) {
      problems.push_back("[model] " + command + " needs a scalar model");
    }
  };

  if (command == "simulate") {
    state("x0");
    positive("periods");
    scheme();
  } else if (command == "pullback") {
    state("x0");
    phase("phase_index");
    positive_real("tol");
    positive("n_cap");
    if (config.integer(section, "sequence_depth") < 2) {
      problems.push_back("[pullback] sequence_depth: must be at least 2");
    }
    scheme();
  } else if (command == "verify-rps") {
    state("x0");
    phase("phase_index");
    positive_real("tol");
    positive("n_cap");
    positive("replicas");
    scheme();
  } else if (command == "check") {
    positive_real("box_radius");
    positive("n_times");
    if (config.integer(section, "n_points") < 2) {
      problems.push_back("[check] n_points: must be at least 2");
    }
    positive_real("near_diagonal");
    if (!(config.real(section, "p") >= 2.0)) {
      problems.push_back("[check] p: must be at least 2");
    }
  } else if (command == "contract") {
    state("x0");
    state("y0");
    positive("periods");
    positive("replicas");
    scheme();
    if (config.reals(section, "x0") == config.reals(section, "y0") &&
        !config.reals(section, "x0").empty()) {
      problems.push_back("[contract] x0, y0: starting points must differ");
    }
  } else if (command == "measure") {
    scalar();
    state("x0");
    positive("n");
    positive_real("tol");
    positive("n_cap");
    const auto phases = config.integers(section, "phases");
    if (phases.empty()) problems.push_back("[measure] phases: at least one phase index");
    for (auto k : phases) {
      if (grid && (k < 0 || k >= grid->steps_per_period())) {
        problems.push_back("[measure] phases: index " + std::to_string(k) + " out of range");
      }
    }
    phase("invariance_phase");
    const auto mode = config.text(section, "invariance");
    if (mode != "none" && mode != "both") {
      try {
        (void)invariance_mode_from_string(mode);
      } catch (const Error&) {
        problems.push_back("[measure] invariance: expected none, shifted_paths, independent, both");
      }
    }
  } else if (command == "kb") {
    scalar();
    phase("s_index");
    const auto s = config.integer(section, "s_index");
    const auto t = config.integer(section, "t_index");
    if (grid && (t < s || t >= s + grid->steps_per_period())) {
      problems.push_back("[kb] t_index: must satisfy s_index <= t_index < s_index + steps_per_period");
    }
    if (!(config.real(section, "lo") < config.real(section, "hi"))) {
      problems.push_back("[kb] lo, hi: need lo < hi");
    }
    positive("n_periods");
    if (config.integer(section, "n_mc") < 2) problems.push_back("[kb] n_mc: must be at least 2");
    if (config.integer(section, "reference_n") < 0) {
      problems.push_back("[kb] reference_n: must be non-negative");
    }
  } else if (command == "ergodic") {
    scalar();
    phase("s_index");
    test_function();
    if (config.integer(section, "n_periods") < 10) {
      problems.push_back("[ergodic] n_periods: must be at least 10");
    }
    if (config.integer(section, "reference_n") < 0) {
      problems.push_back("[ergodic] reference_n: must be non-negative");
    }
  } else if (command == "mixing") {
    scalar();
    phase("s_index");
    test_function();
    const auto ns = config.integers(section, "n_list");
    if (ns.empty()) problems.push_back("[mixing] n_list: at least one period count");
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1])) {
        problems.push_back("[mixing] n_list: must be strictly increasing positive integers");
        break;
      }
    }
    if (config.integer(section, "n") < 2) problems.push_back("[mixing] n: must be at least 2");
    if (!(config.real(section, "p") >= 2.0)) problems.push_back("[mixing] p: must be at least 2");
  } else if (command == "bel") {
    scalar();
    phase("s_index");
    test_function();
    positive("horizon_steps");
    positive("n");
    if (config.integer(section, "fd_n") < 0) problems.push_back("[bel] fd_n: must be non-negative");
    positive_real("fd_eps");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace rpsde::app
