#include "rlasso/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rlasso {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CsvTable read_numeric_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (blank(line)) continue;
    auto cells = split(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    const std::size_t row_no = table.rows.size() + 1;
    if (cells.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "row " << row_no << " (line " << line_no << "): expected " << table.header.size()
          << " fields, found " << cells.size();
      throw CsvError(msg.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, row[c]);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        std::ostringstream msg;
        msg << "row " << row_no << " (line " << line_no << "), column '" << table.header[c]
            << "': cannot parse '" << cell << "' as a number";
        throw CsvError(msg.str());
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw CsvError("input is empty (expected a header row)");
  return table;
}

CsvTable read_numeric_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  return read_numeric_csv(in);
}

CsvDesign design_from_csv(const CsvTable& table, bool intercept, bool require_response) {
  const auto y_it = std::find(table.header.begin(), table.header.end(), "y");
  const bool has_y = y_it != table.header.end();
  if (require_response && !has_y) throw CsvError("no column named 'y' in header");
  const auto y_col = static_cast<std::size_t>(y_it - table.header.begin());

  CsvDesign out;
  out.has_response = has_y;
  std::vector<std::size_t> cols;
  if (intercept) out.regressors.emplace_back("(intercept)");
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (has_y && c == y_col) continue;
    cols.push_back(c);
    out.regressors.push_back(table.header[c]);
  }
  if (out.regressors.empty()) throw CsvError("no regressor columns (use --intercept?)");

  const auto n = static_cast<Index>(table.rows.size());
  const auto k = static_cast<Index>(out.regressors.size());
  Matrix x(n, k);
  Vector y = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    Index j = 0;
    if (intercept) x(i, j++) = 1.0;
    for (std::size_t c : cols) x(i, j++) = row[c];
    if (has_y) y(i) = row[y_col];
  }
  out.data = RegressionData(std::move(x), std::move(y));
  return out;
}

}  // namespace rlasso
