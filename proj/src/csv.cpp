#include "gbf/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gbf/errors.hpp"

namespace gbf {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim spaces and a trailing CR from windows line endings
    std::size_t b = cell.find_first_not_of(" \t\r");
    std::size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
  double x = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last)
    raise(errc::bad_input, "csv row " + std::to_string(row) + ", column '" + col +
                               "': not a number: '" + cell + "'");
  return x;
}

}  // namespace

RawDataset load_csv(const std::string& path, const std::string& response,
                    const std::vector<std::string>& drop) {
  std::ifstream in(path);
  if (!in) raise(errc::bad_input, "cannot open csv file: " + path);

  std::string line;
  if (!std::getline(in, line)) raise(errc::bad_input, "empty csv file: " + path);
  const auto header = split_row(line);
  if (header.empty()) raise(errc::bad_input, "csv header has no columns");

  int y_col = -1;
  std::vector<int> x_cols;
  std::vector<std::string> x_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    if (name.empty()) raise(errc::bad_input, "csv header has an unnamed column");
    if (name == response) {
      if (y_col >= 0) raise(errc::bad_input, "response column appears twice: " + response);
      y_col = static_cast<int>(j);
      continue;
    }
    if (std::find(drop.begin(), drop.end(), name) != drop.end()) continue;
    x_cols.push_back(static_cast<int>(j));
    x_names.push_back(name);
  }
  if (y_col < 0) raise(errc::bad_input, "response column not found: " + response);
  if (x_cols.empty()) raise(errc::bad_input, "no predictor columns left");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      raise(errc::bad_input, "csv row " + std::to_string(lineno) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      row[j] = parse_cell(cells[j], lineno, header[j]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(errc::bad_input, "csv has no data rows");

  RawDataset ds;
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(x_cols.size());
  ds.X.resize(n, p);
  ds.y.resize(n);
  ds.names = std::move(x_names);
  for (int i = 0; i < n; ++i) {
    ds.y(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(y_col)];
    for (int j = 0; j < p; ++j)
      ds.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(x_cols[j])];
  }
  return ds;
}

}  // namespace gbf
