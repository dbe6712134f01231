#include "laplearn/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace laplearn {

std::string format_double(double v) {
  char buf[32];
  // Try increasing precision until the value round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

namespace {

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw validation_error("bad numeric cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw validation_error("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw validation_error("empty matrix file " + path);
  return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  const auto rows = read_rows(path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw validation_error("write failed for " + path);
}

ConnectivityMask read_mask_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  Eigen::MatrixXi e(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != 0.0 && v != 1.0)
        throw validation_error("mask file " + path + " has entries outside {0,1}");
      e(i, j) = static_cast<int>(v);
    }
  return ConnectivityMask(std::move(e));
}

void write_mask_csv(const std::string& path, const ConnectivityMask& a) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) {
      if (j) out << ',';
      out << a(i, j);
    }
    out << '\n';
  }
}

void write_edge_list(const std::string& path, const LaplacianMatrix& l, double tol) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  const auto& th = l.theta();
  for (int i = 0; i < l.size(); ++i)
    for (int j = i + 1; j < l.size(); ++j)
      if (std::abs(th(i, j)) > tol)
        out << (i + 1) << ',' << (j + 1) << ',' << format_double(-th(i, j)) << '\n';
}

}  // namespace laplearn
