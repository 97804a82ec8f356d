#pragma once

#include <string>

#include "lpra/matrix.hpp"

namespace lpra {

/// Matrix Market array format ("%%MatrixMarket matrix array real general").
/// Values are written with 17 significant digits so a write/read round trip
/// reproduces every double bit-exactly.
void write_matrix_market(const Matrix& a, const std::string& path);
Matrix read_matrix_market(const std::string& path);

/// Header-less comma-separated rows.
void write_csv(const Matrix& a, const std::string& path);
Matrix read_csv(const std::string& path);

/// Dispatches on extension: .mtx / .mm -> Matrix Market, .csv -> CSV.
Matrix read_matrix_auto(const std::string& path);
void write_matrix_auto(const Matrix& a, const std::string& path);

}  // namespace lpra
