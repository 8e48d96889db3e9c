#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgfi/graph.hpp"

namespace rgfi {

struct StationInfo {
  std::string id;
  double latitude = 0.0;
  double longitude = 0.0;
};

/// Node-by-time measurements on a common time grid.
struct StationDataset {
  std::vector<StationInfo> nodes;
  std::vector<std::string> timestamps;
  Matrix values;                    // N x T
  std::optional<Matrix> exogenous;  // N x T
  std::string units;
  bool has_coordinates = false;

  Index n() const { return values.rows(); }
  Index length() const { return values.cols(); }
};

struct IngestOptions {
  std::string value_column = "value";
  bool interpolate = true;
  /// scale every node series to unit l2 norm
  bool normalize = false;
  /// nodes with fewer raw measurements are dropped
  Index min_measurements = 1;
  std::string units;
};

/// Long-format CSV with header `timestamp,node_id,<value_column>` plus the
/// optional columns `exogenous`, `latitude` and `longitude`. Timestamps are
/// ordered lexicographically (ISO dates) and their union forms the time grid.
/// Interior gaps are filled linearly on that grid, leading and trailing gaps
/// repeat the nearest measurement.
StationDataset ingest_station_csv(std::istream& is, const IngestOptions& options = {});
StationDataset ingest_station_csv(const std::string& path, const IngestOptions& options = {});

/// Fills the NaN entries of one series in place. Throws when nothing is observed.
void fill_gaps(Eigen::Ref<Vector> series);

/// Great-circle distance in kilometres.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Unweighted k-nearest-neighbour graph under the great-circle distance,
/// symmetrized by union. Ties are broken by node index.
Gso knn_graph(const std::vector<StationInfo>& stations, Index k);
inline Gso knn_graph(const StationDataset& data, Index k) { return knn_graph(data.nodes, k); }

}  // namespace rgfi
