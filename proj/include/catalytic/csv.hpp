#pragma once

#include <iosfwd>
#include <string>

#include "catalytic/dataset.hpp"

namespace catalytic {

/// Dataset CSV format: header row; reserved column names __y__ (response),
/// __z__ (treatment), __w__ (weight); every other column is a covariate in
/// file order. An all-ones __intercept__ column is prepended on load unless
/// one is already present.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);

void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv_file(const Dataset& data, const std::string& path);

/// One draw per row, no header; used for exporting posterior samples.
void write_matrix_csv(const MatrixXd& m, std::ostream& out);
void write_matrix_csv_file(const MatrixXd& m, const std::string& path);

}  // namespace catalytic
