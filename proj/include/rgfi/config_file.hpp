#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rgfi/efficient.hpp"
#include "rgfi/solver.hpp"

namespace rgfi::config {

/// Flat `key = value` file. `#` starts a comment, blank lines are ignored,
/// keys may contain dots (`gamma.initial`). Duplicate keys are an error.
class KeyValues {
 public:
  static KeyValues parse(std::istream& is);
  static KeyValues parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Typed getters mark the key as used and keep the fallback when absent.
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  long long get_int(const std::string& key, long long fallback);
  bool get_bool(const std::string& key, bool fallback);
  /// Comma-separated list.
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback);
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback);

  /// Throws std::invalid_argument naming every key no getter asked for.
  void require_all_used() const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

/// Keys: lambda, beta, gamma.initial, gamma.growth, gamma.cap, delta1, delta2,
/// t_max, rel_tol, inner_tol, inner_max, rho_x, rho_y, rho_h, reweight,
/// filter_order, family, symmetric.
SolverConfig read_solver_config(KeyValues& kv, SolverConfig defaults = {});
void write_solver_config(std::ostream& os, const SolverConfig& config);

/// SolverConfig keys plus tau_max1, tau_max2 and mu (`auto` or a number).
EfficientConfig read_efficient_config(KeyValues& kv, EfficientConfig defaults = {});
void write_efficient_config(std::ostream& os, const EfficientConfig& config);

SolverConfig load_solver_config(const std::string& path);

}  // namespace rgfi::config
