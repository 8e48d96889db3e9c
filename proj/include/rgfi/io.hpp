#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rgfi/graph.hpp"

namespace rgfi::io {

// Numbers are written with 17 significant digits so that a write/read cycle
// reproduces every double exactly.

/// Edge list with a `src,dst,weight` header, one row per nonzero entry
/// (both directions are listed for symmetric operators).
void write_edge_list(std::ostream& os, const Gso& gso);
/// `n` of 0 infers the node count from the largest index.
Gso read_edge_list(std::istream& is, Index n = 0, bool symmetric = false,
                   GsoFamily family = GsoFamily::Adjacency);

/// Dense matrix CSV, no header, one matrix row per line.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

/// Signals CSV: one column per signal, one row per node (same layout as a
/// dense matrix).
inline void write_signals(std::ostream& os, const Matrix& signals) { write_matrix(os, signals); }
inline Matrix read_signals(std::istream& is) { return read_matrix(is); }

void write_edge_list_file(const std::string& path, const Gso& gso);
Gso read_edge_list_file(const std::string& path, Index n = 0, bool symmetric = false);
void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix_file(const std::string& path);

/// Reads a GSO from either an edge list (detected by its `src,dst,weight`
/// header) or a dense matrix CSV. Symmetry is detected from the data.
Gso read_graph_file(const std::string& path);

/// Splits one CSV line on commas, trimming surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double(const std::string& field);

}  // namespace rgfi::io
