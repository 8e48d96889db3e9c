#include "rgfi/config_file.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rgfi/io.hpp"

namespace rgfi::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(std::istream& is) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (kv.has(key)) throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + key);
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse(in);
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  try {
    return io::parse_double(get_string(key, {}));
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": expected a number");
  }
}

long long KeyValues::get_int(const std::string& key, long long fallback) {
  if (!has(key)) return fallback;
  const std::string v = get_string(key, {});
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("config key " + key + ": expected an integer");
  return out;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const std::string v = get_string(key, {});
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key " + key + ": expected true or false");
}

std::vector<std::string> KeyValues::get_list(const std::string& key, const std::vector<std::string>& fallback) {
  if (!has(key)) return fallback;
  std::vector<std::string> out;
  for (auto& item : io::split_csv_line(get_string(key, {})))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> KeyValues::get_doubles(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : get_list(key, {})) {
    try {
      out.push_back(io::parse_double(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key " + key + ": expected a list of numbers");
    }
  }
  return out;
}

void KeyValues::require_all_used() const {
  std::string unknown;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw std::invalid_argument("unknown config keys: " + unknown);
}

// ---------------------------------------------------------------------------

SolverConfig read_solver_config(KeyValues& kv, SolverConfig c) {
  c.lambda = kv.get_double("lambda", c.lambda);
  c.beta = kv.get_double("beta", c.beta);
  c.gamma.initial = kv.get_double("gamma.initial", c.gamma.initial);
  c.gamma.growth = kv.get_double("gamma.growth", c.gamma.growth);
  c.gamma.cap = kv.get_double("gamma.cap", c.gamma.cap);
  c.delta1 = kv.get_double("delta1", c.delta1);
  c.delta2 = kv.get_double("delta2", c.delta2);
  c.t_max = static_cast<int>(kv.get_int("t_max", c.t_max));
  c.rel_tol = kv.get_double("rel_tol", c.rel_tol);
  c.inner_tol = kv.get_double("inner_tol", c.inner_tol);
  c.inner_max = static_cast<int>(kv.get_int("inner_max", c.inner_max));
  c.rho_x = kv.get_double("rho_x", c.rho_x);
  c.rho_y = kv.get_double("rho_y", c.rho_y);
  c.rho_h = kv.get_double("rho_h", c.rho_h);
  c.reweight = kv.get_bool("reweight", c.reweight);
  c.filter_order = kv.get_int("filter_order", c.filter_order);
  const std::string fam = kv.get_string("family", c.family == GsoFamily::Adjacency ? "adjacency" : "laplacian");
  if (fam == "adjacency")
    c.family = GsoFamily::Adjacency;
  else if (fam == "laplacian")
    c.family = GsoFamily::CombinatorialLaplacian;
  else
    throw std::invalid_argument("config key family: expected adjacency or laplacian");
  c.symmetric = kv.get_bool("symmetric", c.symmetric);
  return c;
}

void write_solver_config(std::ostream& os, const SolverConfig& c) {
  const auto flags = os.flags();
  const auto prec = os.precision(17);
  os << "lambda = " << c.lambda << '\n'
     << "beta = " << c.beta << '\n'
     << "gamma.initial = " << c.gamma.initial << '\n'
     << "gamma.growth = " << c.gamma.growth << '\n'
     << "gamma.cap = " << c.gamma.cap << '\n'
     << "delta1 = " << c.delta1 << '\n'
     << "delta2 = " << c.delta2 << '\n'
     << "t_max = " << c.t_max << '\n'
     << "rel_tol = " << c.rel_tol << '\n'
     << "inner_tol = " << c.inner_tol << '\n'
     << "inner_max = " << c.inner_max << '\n'
     << "rho_x = " << c.rho_x << '\n'
     << "rho_y = " << c.rho_y << '\n'
     << "rho_h = " << c.rho_h << '\n'
     << "reweight = " << (c.reweight ? "true" : "false") << '\n'
     << "filter_order = " << c.filter_order << '\n'
     << "family = " << (c.family == GsoFamily::Adjacency ? "adjacency" : "laplacian") << '\n'
     << "symmetric = " << (c.symmetric ? "true" : "false") << '\n';
  os.precision(prec);
  os.flags(flags);
}

EfficientConfig read_efficient_config(KeyValues& kv, EfficientConfig c) {
  c.base = read_solver_config(kv, c.base);
  c.tau_max1 = static_cast<int>(kv.get_int("tau_max1", c.tau_max1));
  c.tau_max2 = static_cast<int>(kv.get_int("tau_max2", c.tau_max2));
  const std::string mu = kv.get_string("mu", "");
  if (mu == "auto")
    c.mu = 0.0;
  else if (!mu.empty())
    c.mu = io::parse_double(mu);
  return c;
}

void write_efficient_config(std::ostream& os, const EfficientConfig& c) {
  write_solver_config(os, c.base);
  const auto prec = os.precision(17);
  os << "tau_max1 = " << c.tau_max1 << '\n' << "tau_max2 = " << c.tau_max2 << '\n';
  if (c.mu > 0)
    os << "mu = " << c.mu << '\n';
  else
    os << "mu = auto\n";
  os.precision(prec);
}

SolverConfig load_solver_config(const std::string& path) {
  KeyValues kv = KeyValues::parse_file(path);
  SolverConfig c = read_solver_config(kv);
  kv.require_all_used();
  c.validate();
  return c;
}

}  // namespace rgfi::config
