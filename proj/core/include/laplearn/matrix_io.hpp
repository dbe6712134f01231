#pragma once

#include "laplearn/types.hpp"

#include <string>

namespace laplearn {

// Plain-text CSV matrices: one row per line, comma-separated decimal values,
// no header; the dimension is inferred. Values are written with enough
// digits to round-trip doubles exactly, so rewriting a read matrix is
// byte-stable.

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

ConnectivityMask read_mask_csv(const std::string& path);
void write_mask_csv(const std::string& path, const ConnectivityMask& a);

/// "i,j,weight" lines with 1-based vertex indices, upper triangle only.
void write_edge_list(const std::string& path, const LaplacianMatrix& l, double tol = 0.0);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace laplearn
