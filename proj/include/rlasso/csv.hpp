#pragma once

#include "rlasso/model.hpp"

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlasso {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header row plus numeric body. Data rows are numbered from 1 in error
/// messages; the header is line 1 of the file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_numeric_csv(std::istream& in);
CsvTable read_numeric_csv_file(const std::string& path);

struct CsvDesign {
  RegressionData data;
  std::vector<std::string> regressors;
  bool has_response = false;
};

/// Column `y` is the response; every other column is a regressor. With
/// intercept a column named "(intercept)" of ones is put first.
CsvDesign design_from_csv(const CsvTable& table, bool intercept, bool require_response);

}  // namespace rlasso
