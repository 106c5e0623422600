#include "catalytic/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace catalytic {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: bad numeric field '" + s + "' on line " +
                             std::to_string(line_no));
  }
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  int y_col = -1, z_col = -1, w_col = -1;
  bool has_intercept = false;
  std::vector<int> cov_cols;
  std::vector<std::string> cov_names;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (header[j] == "__y__") {
      y_col = j;
    } else if (header[j] == "__z__") {
      z_col = j;
    } else if (header[j] == "__w__") {
      w_col = j;
    } else {
      if (header[j] == kInterceptName) has_intercept = true;
      cov_cols.push_back(j);
      cov_names.push_back(header[j]);
    }
  }
  if (y_col < 0) throw std::runtime_error("csv: missing __y__ column");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("csv: field count mismatch on line " +
                               std::to_string(line_no));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      row[j] = parse_double(fields[j], line_no);
    rows.push_back(std::move(row));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p_file = static_cast<Eigen::Index>(cov_cols.size());
  const Eigen::Index p = p_file + (has_intercept ? 0 : 1);

  Dataset d;
  d.covariates.resize(n, p);
  d.response.resize(n);
  d.weights.resize(n);
  if (z_col >= 0) d.treatment = VectorXi(n);

  const Eigen::Index off = has_intercept ? 0 : 1;
  if (!has_intercept) {
    d.covariates.col(0).setOnes();
    d.column_names.push_back(kInterceptName);
  }
  for (const auto& name : cov_names) d.column_names.push_back(name);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < p_file; ++c)
      d.covariates(i, off + c) = row[static_cast<std::size_t>(cov_cols[c])];
    d.response[i] = row[static_cast<std::size_t>(y_col)];
    d.weights[i] = w_col >= 0 ? row[static_cast<std::size_t>(w_col)] : 1.0;
    if (z_col >= 0)
      (*d.treatment)[i] =
          static_cast<int>(row[static_cast<std::size_t>(z_col)]);
  }
  d.validate();
  return d;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return read_dataset_csv(in);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (j) out << ',';
    out << (j < static_cast<Eigen::Index>(data.column_names.size())
                ? data.column_names[static_cast<std::size_t>(j)]
                : "x" + std::to_string(j));
  }
  out << ",__y__";
  if (data.treatment) out << ",__z__";
  out << ",__w__\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (j) out << ',';
      out << data.covariates(i, j);
    }
    out << ',' << data.response[i];
    if (data.treatment) out << ',' << (*data.treatment)[i];
    out << ',' << data.weights[i] << '\n';
  }
}

void write_dataset_csv_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open " + path);
  write_dataset_csv(data, out);
}

void write_matrix_csv(const MatrixXd& m, std::ostream& out) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_csv_file(const MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open " + path);
  write_matrix_csv(m, out);
}

}  // namespace catalytic
