#include "rgfi/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rgfi::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

bool symmetric_within(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

GsoFamily guess_family(const Matrix& m) {
  return (m.diagonal().array() == 0.0).all() ? GsoFamily::Adjacency : GsoFamily::CombinatorialLaplacian;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("not a number: '" + field + "'");
  return v;
}

void write_edge_list(std::ostream& os, const Gso& gso) {
  const Matrix& s = gso.matrix();
  os << "src,dst,weight\n" << std::setprecision(17);
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0.0) os << i << ',' << j << ',' << s(i, j) << '\n';
}

namespace {

Matrix edge_list_matrix(std::istream& is, Index n, bool symmetric) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("edge list is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "src" || header[1] != "dst" || header[2] != "weight")
    throw std::runtime_error("edge list must start with a src,dst,weight header");
  struct Entry { Index i, j; double w; };
  std::vector<Entry> entries;
  Index max_index = -1;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw std::runtime_error("malformed edge list row: " + line);
    const auto i = static_cast<Index>(parse_double(f[0]));
    const auto j = static_cast<Index>(parse_double(f[1]));
    if (i < 0 || j < 0) throw std::runtime_error("negative node index in edge list");
    entries.push_back({i, j, parse_double(f[2])});
    max_index = std::max({max_index, i, j});
  }
  if (n == 0) n = max_index + 1;
  if (max_index >= n) throw std::runtime_error("edge list references a node beyond n");
  Matrix s = Matrix::Zero(n, n);
  for (const auto& e : entries) {
    s(e.i, e.j) = e.w;
    if (symmetric) s(e.j, e.i) = e.w;
  }
  return s;
}

}  // namespace

Gso read_edge_list(std::istream& is, Index n, bool symmetric, GsoFamily family) {
  return Gso(edge_list_matrix(is, n, symmetric), family, symmetric);
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_csv_line(line)) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged matrix CSV");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("matrix CSV is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_edge_list_file(const std::string& path, const Gso& gso) {
  auto f = open_out(path);
  write_edge_list(f, gso);
}

Gso read_edge_list_file(const std::string& path, Index n, bool symmetric) {
  auto f = open_in(path);
  return read_edge_list(f, n, symmetric);
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  auto f = open_out(path);
  write_matrix(f, m);
}

Matrix read_matrix_file(const std::string& path) {
  auto f = open_in(path);
  return read_matrix(f);
}

Gso read_graph_file(const std::string& path) {
  auto f = open_in(path);
  std::string first;
  std::getline(f, first);
  f.seekg(0);
  Matrix s;
  if (trim(first).rfind("src", 0) == 0) {
    s = edge_list_matrix(f, 0, false);
  } else {
    s = read_matrix(f);
  }
  return Gso(s, guess_family(s), symmetric_within(s, 1e-12));
}

}  // namespace rgfi::io
