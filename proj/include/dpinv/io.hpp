#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv::io {

// Edge lists: one arc per line, "src<TAB>dst[<TAB>weight]", 0-based ids,
// weight 1 when omitted, '#' starts a comment line. Any run of spaces or
// tabs separates fields. A "# nodes N" comment fixes the node count;
// otherwise it is one past the largest id.
Digraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Digraph& g);

// Matrix Market coordinate files (real, integer or pattern; general or
// symmetric). Indices are 1-based in the file and 0-based in memory.
SparseMatrix read_matrix_market(std::istream& in);
void write_matrix_market(std::ostream& out, const SparseMatrix& m);

/// Arcs i -> j for every stored nonzero (i, j) with positive value.
Digraph digraph_from_matrix(const SparseMatrix& m);

/// Matrix Market by header, otherwise an edge list.
Digraph read_graph_file(const std::string& path);
/// Matrix Market by header, otherwise "row col value" triplets (0-based).
SparseMatrix read_matrix_file(const std::string& path);

/// Whitespace-separated reals, '#' comments allowed.
Vector read_vector(std::istream& in);
Vector read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const Vector& v);

/// Row-major CSV with 17 significant digits; row i holds entry i of every column.
void write_block_csv(std::ostream& out, const ColumnBlock& b);
ColumnBlock read_block_csv(std::istream& in);

/// uint32 n, uint32 |J|, then n * |J| little-endian float64 in row-major order.
void write_block_binary(std::ostream& out, const ColumnBlock& b);
ColumnBlock read_block_binary(std::istream& in);

/// Shortest text that reads back to exactly the same double.
std::string format_double(double v);

}  // namespace dpinv::io
