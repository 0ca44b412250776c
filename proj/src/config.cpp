#include "asq/config.hpp"

#include "asq/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace asq {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

double to_double(const std::string& field, const std::string& text) {
  const auto t = trim(text);
  double value = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(field, fmt::format("expected a finite number, got '{}'", text));
  }
  return value;
}

long long to_integer(const std::string& field, const std::string& text) {
  const auto t = trim(text);
  long long value = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(field, fmt::format("expected an integer, got '{}'", text));
  }
  return value;
}

int to_int(const std::string& field, const std::string& text) {
  const auto v = to_integer(field, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "integer out of range");
  }
  return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(field, item));
  return out;
}

std::vector<std::pair<double, double>> to_table(const std::string& field,
                                                const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw ConfigError(field, fmt::format("expected magnitude:factor, got '{}'", item));
    }
    out.emplace_back(to_double(field, parts[0]), to_double(field, parts[1]));
  }
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
  return out;
}

std::string table_text(const std::vector<std::pair<double, double>>& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += fmt::format("{}{}:{}", i ? ", " : "", t[i].first, t[i].second);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

void multiplier_keys(std::map<std::string, Setter>& keys, const std::string& section,
                     MultiplierConfig ExperimentConfig::*member) {
  keys[section + ".kind"] = [member](ExperimentConfig& c, const std::string&,
                                     const std::string& v) { (c.*member).kind = trim(v); };
  keys[section + ".amplitude"] = [member](ExperimentConfig& c, const std::string& f,
                                          const std::string& v) {
    (c.*member).amplitude = to_double(f, v);
  };
  keys[section + ".decay"] = [member](ExperimentConfig& c, const std::string& f,
                                      const std::string& v) { (c.*member).decay = to_double(f, v); };
  keys[section + ".table"] = [member](ExperimentConfig& c, const std::string& f,
                                      const std::string& v) { (c.*member).table = to_table(f, v); };
}

template <class T>
Setter number(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const std::string& f, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*member = to_double(f, v);
    } else if constexpr (std::is_same_v<T, int>) {
      c.*member = to_int(f, v);
    } else {
      const auto x = to_integer(f, v);
      if (x < 0) throw ConfigError(f, "must be nonnegative");
      c.*member = static_cast<T>(x);
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter> k;
    k["grid.N"] = number(&ExperimentConfig::n);
    k["grid.T"] = number(&ExperimentConfig::final_time);
    k["grid.M"] = number(&ExperimentConfig::steps);
    k["model.alpha"] = number(&ExperimentConfig::alpha);
    k["model.s"] = number(&ExperimentConfig::s);
    k["model.q"] = number(&ExperimentConfig::q);
    multiplier_keys(k, "multiplier", &ExperimentConfig::multiplier);
    multiplier_keys(k, "comparison", &ExperimentConfig::comparison);
    k["window.center_x"] = number(&ExperimentConfig::window_x);
    k["window.center_y"] = number(&ExperimentConfig::window_y);
    k["window.radius"] = number(&ExperimentConfig::window_radius);
    k["linearization.epsilons"] = [](ExperimentConfig& c, const std::string& f,
                                     const std::string& v) { c.epsilons = to_list(f, v); };
    k["control.lambdas"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
      c.lambdas = to_list(f, v);
    };
    k["control.maxiter"] = number(&ExperimentConfig::maxiter);
    k["reconstruction.width"] = number(&ExperimentConfig::probe_width);
    k["reconstruction.coordinate_radius"] = number(&ExperimentConfig::coordinate_radius);
    k["reconstruction.offset_min"] = number(&ExperimentConfig::offset_min);
    k["reconstruction.offset_max"] = number(&ExperimentConfig::offset_max);
    k["reconstruction.offset_radii"] = number(&ExperimentConfig::offset_radii);
    k["reconstruction.offset_angles"] = number(&ExperimentConfig::offset_angles);
    k["run.output_dir"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.output_dir = trim(v);
    };
    k["run.seed"] = number(&ExperimentConfig::rng_seed);
    k["run.threads"] = number(&ExperimentConfig::threads);
    return k;
  }();
  return table;
}

void validate_multiplier(const MultiplierConfig& m, const std::string& section) {
  if (m.kind == "riesz") return;
  if (m.kind == "perturbed") {
    if (!(m.amplitude > -0.5 && m.amplitude <= 0.5)) {
      throw ConfigError(section + ".amplitude", "must lie in (-1/2, 1/2]");
    }
    if (!(m.decay > 0.0)) throw ConfigError(section + ".decay", "must be positive");
    return;
  }
  if (m.kind == "table") {
    if (m.table.empty()) throw ConfigError(section + ".table", "needs at least one knot");
    for (const auto& [k, g] : m.table) {
      if (!(k >= 0.0)) throw ConfigError(section + ".table", "knot magnitudes must be >= 0");
      if (!(g > 0.0)) throw ConfigError(section + ".table", "factors must be positive");
    }
    return;
  }
  throw ConfigError(section + ".kind",
                    fmt::format("unknown multiplier '{}' (riesz, perturbed, table)", m.kind));
}

} // namespace

MultiplierSpec MultiplierConfig::build(const FourierLattice& lattice) const {
  if (kind == "riesz") return MultiplierSpec::riesz(lattice);
  if (kind == "perturbed") return MultiplierSpec::perturbed(lattice, amplitude, decay);
  if (kind == "table") return MultiplierSpec::radial_table(lattice, table);
  throw ConfigError("multiplier.kind", fmt::format("unknown multiplier '{}'", kind));
}

void ExperimentConfig::validate() const {
  if (n < 16 || n % 2 != 0) throw ConfigError("grid.N", "must be even and at least 16");
  if (!(final_time > 0.0)) throw ConfigError("grid.T", "must be positive");
  if (steps < 1) throw ConfigError("grid.M", "must be at least 1");
  if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("model.alpha", "must lie in (1/2, 1)");
  if (!(q > 0.0) || !(1.0 / q < alpha - 0.5)) {
    throw ConfigError("model.q", fmt::format("requires 0 < 1/q < alpha - 1/2 = {}", alpha - 0.5));
  }
  if (!(s + alpha > 2.0)) throw ConfigError("model.s", "requires s + alpha > 2");
  validate_multiplier(multiplier, "multiplier");
  validate_multiplier(comparison, "comparison");
  if (!(window_radius > 0.0 && window_radius < 0.25)) {
    throw ConfigError("window.radius", "must lie in (0, 1/4)");
  }
  if (!(std::abs(window_x) <= 0.5 && std::abs(window_y) <= 0.5)) {
    throw ConfigError("window.center_x", "center must lie in [-1/2, 1/2]^2");
  }
  if (epsilons.size() < 3) throw ConfigError("linearization.epsilons", "needs at least 3 values");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) {
      throw ConfigError("linearization.epsilons", "values must lie in (0, 1)");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw ConfigError("linearization.epsilons", "values must be strictly decreasing");
    }
  }
  if (lambdas.empty()) throw ConfigError("control.lambdas", "needs at least one value");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("control.lambdas", "values must be positive");
  }
  if (maxiter < 1) throw ConfigError("control.maxiter", "must be at least 1");
  if (!(probe_width > 0.0)) throw ConfigError("reconstruction.width", "must be positive");
  if (!(coordinate_radius > 0.0 && coordinate_radius < 0.5)) {
    throw ConfigError("reconstruction.coordinate_radius", "must lie in (0, 1/2)");
  }
  if (!(offset_min > 0.0 && offset_max >= offset_min)) {
    throw ConfigError("reconstruction.offset_min", "requires 0 < offset_min <= offset_max");
  }
  if (offset_radii < 1) throw ConfigError("reconstruction.offset_radii", "must be at least 1");
  if (offset_angles < 1) throw ConfigError("reconstruction.offset_angles", "must be at least 1");
  if (output_dir.empty()) throw ConfigError("run.output_dir", "must not be empty");
  if (threads < 1) throw ConfigError("run.threads", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", fmt::format("line {}: {}", e.line(), e.message()));
  }
  ExperimentConfig config;
  const auto& keys = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside any section");
    for (const auto& [key, value] : body) {
      const auto field = section + "." + key;
      const auto it = keys.find(field);
      if (it == keys.end()) throw ConfigError(field, "unknown key");
      it->second(config, field, value.data());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::string out;
  const auto multiplier = [&](const char* name, const MultiplierConfig& m) {
    out += fmt::format("[{}]\nkind = {}\namplitude = {}\ndecay = {}\n", name, m.kind, m.amplitude,
                       m.decay);
    if (!m.table.empty()) out += fmt::format("table = {}\n", table_text(m.table));
    out += "\n";
  };
  out += fmt::format("[grid]\nN = {}\nT = {}\nM = {}\n\n", c.n, c.final_time, c.steps);
  out += fmt::format("[model]\nalpha = {}\ns = {}\nq = {}\n\n", c.alpha, c.s, c.q);
  multiplier("multiplier", c.multiplier);
  multiplier("comparison", c.comparison);
  out += fmt::format("[window]\ncenter_x = {}\ncenter_y = {}\nradius = {}\n\n", c.window_x,
                     c.window_y, c.window_radius);
  out += fmt::format("[linearization]\nepsilons = {}\n\n", list_text(c.epsilons));
  out += fmt::format("[control]\nlambdas = {}\nmaxiter = {}\n\n", list_text(c.lambdas), c.maxiter);
  out += fmt::format(
      "[reconstruction]\nwidth = {}\ncoordinate_radius = {}\noffset_min = {}\noffset_max = {}\n"
      "offset_radii = {}\noffset_angles = {}\n\n",
      c.probe_width, c.coordinate_radius, c.offset_min, c.offset_max, c.offset_radii,
      c.offset_angles);
  out += fmt::format("[run]\noutput_dir = {}\nseed = {}\nthreads = {}\n", c.output_dir.string(),
                     c.rng_seed, c.threads);
  return out;
}

} // namespace asq
