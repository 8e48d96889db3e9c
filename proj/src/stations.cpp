#include "rgfi/stations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "rgfi/io.hpp"

namespace rgfi {

namespace {

struct RawStation {
  StationInfo info;
  std::map<std::string, double> value;
  std::map<std::string, double> exo;
  bool has_coords = false;
};

Index column_of(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

}  // namespace

void fill_gaps(Eigen::Ref<Vector> s) {
  const Index t = s.size();
  Index first = -1, last = -1;
  for (Index i = 0; i < t; ++i)
    if (!std::isnan(s[i])) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) throw std::invalid_argument("series has no measurement to interpolate from");
  for (Index i = 0; i < first; ++i) s[i] = s[first];
  for (Index i = last + 1; i < t; ++i) s[i] = s[last];
  Index prev = first;
  for (Index i = first + 1; i <= last; ++i) {
    if (std::isnan(s[i])) continue;
    for (Index j = prev + 1; j < i; ++j) {
      const double w = static_cast<double>(j - prev) / static_cast<double>(i - prev);
      s[j] = (1.0 - w) * s[prev] + w * s[i];
    }
    prev = i;
  }
}

StationDataset ingest_station_csv(std::istream& is, const IngestOptions& options) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("station CSV is empty");
  const auto header = io::split_csv_line(line);
  const Index c_time = column_of(header, "timestamp");
  const Index c_node = column_of(header, "node_id");
  const Index c_val = column_of(header, options.value_column);
  const Index c_exo = column_of(header, "exogenous");
  const Index c_lat = column_of(header, "latitude");
  const Index c_lon = column_of(header, "longitude");
  if (c_time < 0 || c_node < 0 || c_val < 0)
    throw std::invalid_argument("station CSV needs timestamp, node_id and " + options.value_column + " columns");
  if ((c_lat < 0) != (c_lon < 0)) throw std::invalid_argument("station CSV: latitude and longitude come together");

  std::map<std::string, RawStation> raw;
  std::vector<std::string> order;  // first appearance
  std::vector<std::string> times;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = io::split_csv_line(line);
    if (static_cast<Index>(f.size()) != static_cast<Index>(header.size()))
      throw std::invalid_argument("station CSV line " + std::to_string(lineno) + ": wrong field count");
    const std::string& id = f[c_node];
    auto [it, inserted] = raw.try_emplace(id);
    if (inserted) {
      it->second.info.id = id;
      order.push_back(id);
    }
    RawStation& st = it->second;
    const std::string& ts = f[c_time];
    times.push_back(ts);
    if (!f[c_val].empty()) {
      if (st.value.count(ts))
        throw std::invalid_argument("station CSV line " + std::to_string(lineno) + ": duplicate measurement");
      st.value[ts] = io::parse_double(f[c_val]);
    }
    if (c_exo >= 0 && !f[c_exo].empty()) st.exo[ts] = io::parse_double(f[c_exo]);
    if (c_lat >= 0 && !f[c_lat].empty() && !f[c_lon].empty()) {
      st.info.latitude = io::parse_double(f[c_lat]);
      st.info.longitude = io::parse_double(f[c_lon]);
      st.has_coords = true;
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<const RawStation*> kept;
  for (const auto& id : order) {
    const RawStation& st = raw.at(id);
    if (static_cast<Index>(st.value.size()) >= options.min_measurements && !st.value.empty()) kept.push_back(&st);
  }
  if (kept.empty()) throw std::invalid_argument("no station meets the minimum measurement count");

  StationDataset ds;
  ds.units = options.units;
  ds.timestamps = times;
  const Index n = static_cast<Index>(kept.size()), t = static_cast<Index>(times.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ds.values = Matrix::Constant(n, t, nan);
  if (c_exo >= 0) ds.exogenous = Matrix::Constant(n, t, nan);
  ds.has_coordinates = c_lat >= 0;
  for (Index i = 0; i < n; ++i) {
    const RawStation& st = *kept[i];
    if (ds.has_coordinates && !st.has_coords)
      throw std::invalid_argument("station " + st.info.id + " has no coordinates");
    ds.nodes.push_back(st.info);
    for (Index j = 0; j < t; ++j) {
      if (auto v = st.value.find(times[j]); v != st.value.end()) ds.values(i, j) = v->second;
      if (ds.exogenous)
        if (auto e = st.exo.find(times[j]); e != st.exo.end()) (*ds.exogenous)(i, j) = e->second;
    }
  }

  auto complete = [&](Matrix& m, const char* what) {
    for (Index i = 0; i < n; ++i) {
      if (!m.row(i).array().isNaN().any()) continue;
      if (!options.interpolate)
        throw std::invalid_argument(std::string("station ") + ds.nodes[i].id + " has missing " + what +
                                    " and interpolation is disabled");
      Vector row = m.row(i).transpose();
      fill_gaps(row);
      m.row(i) = row.transpose();
    }
  };
  complete(ds.values, "values");
  if (ds.exogenous) complete(*ds.exogenous, "exogenous inputs");

  if (options.normalize) {
    for (Index i = 0; i < n; ++i) {
      const double norm = ds.values.row(i).norm();
      if (norm > 0) ds.values.row(i) /= norm;
    }
  }
  return ds;
}

StationDataset ingest_station_csv(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open station data " + path);
  return ingest_station_csv(in, options);
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double radius = 6371.0088;
  const double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad, dlon = (lon2 - lon1) * rad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * radius * std::asin(std::min(1.0, std::sqrt(a)));
}

Gso knn_graph(const std::vector<StationInfo>& stations, Index k) {
  const Index n = static_cast<Index>(stations.size());
  if (k < 1 || k >= n) throw std::invalid_argument("knn_graph: k must lie in [1, N-1]");
  Matrix a = Matrix::Zero(n, n);
  std::vector<std::pair<double, Index>> dist;
  for (Index i = 0; i < n; ++i) {
    dist.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i)
        dist.emplace_back(haversine_km(stations[i].latitude, stations[i].longitude, stations[j].latitude,
                                       stations[j].longitude),
                          j);
    std::sort(dist.begin(), dist.end());
    for (Index r = 0; r < k; ++r) {
      a(i, dist[r].second) = 1.0;
      a(dist[r].second, i) = 1.0;
    }
  }
  return Gso(std::move(a), GsoFamily::Adjacency, true);
}

}  // namespace rgfi
