#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "sbe/collision.hpp"
#include "sbe/error.hpp"
#include "sbe/evolution.hpp"

namespace sbe {

/// Everything needed to reproduce one run. Parsed from a flat `key = value`
/// file; see README for the schema.
struct ExperimentConfig {
  int velocity_dim = 1;
  double half_width = 8.0;
  int nodes_per_axis = 64;
  int cells = 64;

  KernelKind kernel = KernelKind::constant;
  double sigma0 = 1.0;
  double kernel_scale = 1.0;
  std::string kernel_file;

  InitialData initial;

  std::optional<double> dt;  // empty: use the stability limit
  double cfl_safety = 0.9;
  TransportOrder transport_order = TransportOrder::upwind1;
  Splitting splitting = Splitting::strang;
  TimeIntegrator integrator = TimeIntegrator::ssprk2;

  double t_final = 20.0;
  int record_every = 50;
  int audit_every = 0;  // 0: ten times record_every
  std::optional<double> delta = 0.01;  // empty: automatic scan

  std::string output_dir;
  std::string csv_name = "diagnostics.csv";
  bool snapshots = true;

  int effective_audit_every() const { return audit_every > 0 ? audit_every : 10 * record_every; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw FormatError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw FormatError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw FormatError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

template <class E>
E parse_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& table) {
  const auto it = table.find(v);
  if (it == table.end()) {
    std::string opts;
    for (const auto& [name, _] : table) opts += (opts.empty() ? "" : ", ") + name;
    throw FormatError("config: key '" + key + "' must be one of {" + opts + "}, got '" + v + "'");
  }
  return it->second;
}

inline const std::map<std::string, KernelKind>& kernel_names() {
  static const std::map<std::string, KernelKind> m{{"constant", KernelKind::constant},
                                                   {"gaussian_bump", KernelKind::gaussian_bump},
                                                   {"custom_table", KernelKind::custom_table}};
  return m;
}
inline const std::map<std::string, TransportOrder>& transport_names() {
  static const std::map<std::string, TransportOrder> m{{"upwind1", TransportOrder::upwind1},
                                                       {"muscl2", TransportOrder::muscl2}};
  return m;
}
inline const std::map<std::string, Splitting>& splitting_names() {
  static const std::map<std::string, Splitting> m{{"lie", Splitting::lie}, {"strang", Splitting::strang}};
  return m;
}
inline const std::map<std::string, TimeIntegrator>& integrator_names() {
  static const std::map<std::string, TimeIntegrator> m{{"euler", TimeIntegrator::euler},
                                                       {"ssprk2", TimeIntegrator::ssprk2}};
  return m;
}

template <class E>
std::string enum_name(E value, const std::map<std::string, E>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"velocity_dim", [&](auto& k, auto& v) { c.velocity_dim = static_cast<int>(detail::parse_int(k, v)); }},
      {"half_width", [&](auto& k, auto& v) { c.half_width = detail::parse_double(k, v); }},
      {"nodes_per_axis", [&](auto& k, auto& v) { c.nodes_per_axis = static_cast<int>(detail::parse_int(k, v)); }},
      {"cells", [&](auto& k, auto& v) { c.cells = static_cast<int>(detail::parse_int(k, v)); }},
      {"kernel", [&](auto& k, auto& v) { c.kernel = detail::parse_enum(k, v, detail::kernel_names()); }},
      {"sigma0", [&](auto& k, auto& v) { c.sigma0 = detail::parse_double(k, v); }},
      {"kernel_scale", [&](auto& k, auto& v) { c.kernel_scale = detail::parse_double(k, v); }},
      {"kernel_file", [&](auto&, auto& v) { c.kernel_file = v; }},
      {"kappa_bar", [&](auto& k, auto& v) { c.initial.kappa_bar = detail::parse_double(k, v); }},
      {"amplitude", [&](auto& k, auto& v) { c.initial.amplitude = detail::parse_double(k, v); }},
      {"perturbation", [&](auto& k, auto& v) { c.initial.perturbation = detail::parse_double(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.initial.seed = static_cast<std::uint64_t>(detail::parse_int(k, v)); }},
      {"dt", [&](auto& k, auto& v) { c.dt = v == "auto" ? std::nullopt : std::optional(detail::parse_double(k, v)); }},
      {"cfl_safety", [&](auto& k, auto& v) { c.cfl_safety = detail::parse_double(k, v); }},
      {"transport_order",
       [&](auto& k, auto& v) { c.transport_order = detail::parse_enum(k, v, detail::transport_names()); }},
      {"splitting", [&](auto& k, auto& v) { c.splitting = detail::parse_enum(k, v, detail::splitting_names()); }},
      {"integrator", [&](auto& k, auto& v) { c.integrator = detail::parse_enum(k, v, detail::integrator_names()); }},
      {"t_final", [&](auto& k, auto& v) { c.t_final = detail::parse_double(k, v); }},
      {"record_every", [&](auto& k, auto& v) { c.record_every = static_cast<int>(detail::parse_int(k, v)); }},
      {"audit_every", [&](auto& k, auto& v) { c.audit_every = static_cast<int>(detail::parse_int(k, v)); }},
      {"delta",
       [&](auto& k, auto& v) { c.delta = v == "auto" ? std::nullopt : std::optional(detail::parse_double(k, v)); }},
      {"output_dir", [&](auto&, auto& v) { c.output_dir = v; }},
      {"csv_name", [&](auto&, auto& v) { c.csv_name = v; }},
      {"snapshots", [&](auto& k, auto& v) { c.snapshots = detail::parse_bool(k, v); }},
  };

  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw FormatError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw FormatError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    it->second(key, value);
  }

  if (c.t_final <= 0.0) throw FormatError("config: t_final must be positive");
  if (c.record_every <= 0) throw FormatError("config: record_every must be positive");
  if (c.audit_every < 0) throw FormatError("config: audit_every must be nonnegative");
  if (c.dt && !(*c.dt > 0.0)) throw FormatError("config: dt must be positive or 'auto'");
  if (c.delta && !(*c.delta >= 0.0)) throw FormatError("config: delta must be nonnegative or 'auto'");
  if (c.kernel == KernelKind::custom_table && c.kernel_file.empty())
    throw FormatError("config: kernel = custom_table requires kernel_file");
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path);
  return parse_config(in);
}

/// Canonical text form; parse_config(format_config(c)) reproduces c.
inline std::string format_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "velocity_dim = " << c.velocity_dim << '\n'
    << "half_width = " << c.half_width << '\n'
    << "nodes_per_axis = " << c.nodes_per_axis << '\n'
    << "cells = " << c.cells << '\n'
    << "kernel = " << detail::enum_name(c.kernel, detail::kernel_names()) << '\n'
    << "sigma0 = " << c.sigma0 << '\n'
    << "kernel_scale = " << c.kernel_scale << '\n';
  if (!c.kernel_file.empty()) o << "kernel_file = " << c.kernel_file << '\n';
  o << "kappa_bar = " << c.initial.kappa_bar << '\n'
    << "amplitude = " << c.initial.amplitude << '\n'
    << "perturbation = " << c.initial.perturbation << '\n'
    << "seed = " << c.initial.seed << '\n';
  if (c.dt)
    o << "dt = " << *c.dt << '\n';
  else
    o << "dt = auto\n";
  o << "cfl_safety = " << c.cfl_safety << '\n'
    << "transport_order = " << detail::enum_name(c.transport_order, detail::transport_names()) << '\n'
    << "splitting = " << detail::enum_name(c.splitting, detail::splitting_names()) << '\n'
    << "integrator = " << detail::enum_name(c.integrator, detail::integrator_names()) << '\n'
    << "t_final = " << c.t_final << '\n'
    << "record_every = " << c.record_every << '\n'
    << "audit_every = " << c.audit_every << '\n';
  if (c.delta)
    o << "delta = " << *c.delta << '\n';
  else
    o << "delta = auto\n";
  if (!c.output_dir.empty()) o << "output_dir = " << c.output_dir << '\n';
  o << "csv_name = " << c.csv_name << '\n' << "snapshots = " << (c.snapshots ? "true" : "false") << '\n';
  return o.str();
}

/// Velocity grid, spatial grid and kernel described by a config.
inline std::shared_ptr<const VelocityGrid> make_velocity_grid(const ExperimentConfig& c) {
  return std::make_shared<const VelocityGrid>(build_velocity_grid(c.velocity_dim, c.half_width, c.nodes_per_axis));
}

inline CollisionKernel make_kernel(const ExperimentConfig& c, const VelocityGrid& g) {
  KernelSpec spec;
  spec.kind = c.kernel;
  spec.sigma0 = c.sigma0;
  spec.scale = c.kernel_scale;
  if (c.kernel == KernelKind::custom_table) spec.table = load_kernel_table(c.kernel_file);
  return build_kernel(spec, g);
}

}  // namespace sbe
