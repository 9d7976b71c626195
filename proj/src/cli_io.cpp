#include "abacus/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string_view>

namespace abacus::io {

namespace {

std::string
locate(const std::string& source, std::size_t line, std::size_t column)
{
  std::string out = source;
  if (line > 0)
    out += ":" + std::to_string(line);
  if (column > 0)
    out += ":" + std::to_string(column);
  return out;
}

std::string_view
trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view>
split(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return cells;
}

bool
parse_double(std::string_view cell, double& out)
{
  if (cell.empty())
    return false;
  if (cell.front() == '+')
    cell.remove_prefix(1);
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ofstream
open_for_writing(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void
finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

std::string
join(const std::vector<Index>& v)
{
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

} // namespace

ParseError::ParseError(const std::string& source,
                       std::size_t line,
                       std::size_t column,
                       const std::string& what)
  : std::runtime_error(locate(source, line, column) + ": " + what)
  , line_(line)
  , column_(column)
{
}

MatrixXd
parse_csv(std::istream& in, const std::string& source)
{
  std::vector<std::vector<double>> rows;
  std::string text;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty())
      continue;
    const auto cells = split(text);
    std::vector<double> row(cells.size());
    std::size_t bad = 0;
    for (std::size_t c = 0; c < cells.size() && !bad; ++c)
      if (!parse_double(cells[c], row[c]))
        bad = c + 1;

    if (first) {
      first = false;
      width = cells.size();
      if (bad)
        continue; // header
    } else if (cells.size() != width) {
      throw ParseError(source, line_no, 0,
                       "expected " + std::to_string(width) + " fields, found " +
                         std::to_string(cells.size()));
    }
    if (bad)
      throw ParseError(source, line_no, bad,
                       "non-numeric value '" + std::string(cells[bad - 1]) +
                         "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ParseError(source, line_no, 0, "no numeric rows");

  MatrixXd X(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      X(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return X;
}

MatrixXd
read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in, path.string());
}

void
standardize_rows(MatrixXd& X)
{
  const auto n = static_cast<double>(X.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    const double scale = X.row(i).norm();
    X.row(i).array() -= X.row(i).mean();
    // Roundoff in the mean leaves constant rows slightly off zero.
    if (X.row(i).norm() <= 1e-12 * scale) {
      X.row(i).setZero();
      continue;
    }
    if (X.cols() < 2)
      continue;
    X.row(i) /= std::sqrt(X.row(i).squaredNorm() / (n - 1.0));
  }
}

ObservationMatrix
load_csv(const std::filesystem::path& path,
         Orientation orientation,
         bool standardize)
{
  MatrixXd X = read_csv(path);
  if (orientation == Orientation::channels_as_columns)
    X.transposeInPlace();
  if (standardize)
    standardize_rows(X);
  return ObservationMatrix(std::move(X));
}

std::string
format_number(double x)
{
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  if (std::isnan(x))
    return "nan";
  char buf[32];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x)
      break;
  }
  return buf;
}

void
write_csv(const std::filesystem::path& path, const MatrixXd& X)
{
  std::ofstream out = open_for_writing(path);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (j)
        out << ',';
      out << format_number(X(i, j));
    }
    out << '\n';
  }
  finish(out, path);
}

void
write_vector_csv(const std::filesystem::path& path, const VectorXd& x)
{
  write_csv(path, MatrixXd(x));
}

void
write_changes(const std::filesystem::path& path,
              std::vector<ChangeRecord> records)
{
  std::stable_sort(records.begin(), records.end(),
                   [](const ChangeRecord& a, const ChangeRecord& b) {
                     return a.index < b.index;
                   });
  std::ofstream out = open_for_writing(path);
  out << "index,type,g_value\n";
  for (const ChangeRecord& r : records)
    out << r.index << ','
        << (r.type == ChangeType::additive_outlier ? "AO" : "LS") << ','
        << format_number(r.g_value) << '\n';
  finish(out, path);
}

std::vector<ChangeRecord>
read_changes(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  const std::string source = path.string();

  std::vector<ChangeRecord> out;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty())
      continue;
    const auto cells = split(text);
    if (line_no == 1 && cells.size() == 3 && cells[0] == "index")
      continue;
    if (cells.size() != 3)
      throw ParseError(source, line_no, 0,
                       "expected 3 fields (index,type,g_value), found " +
                         std::to_string(cells.size()));
    double index = 0.0, g = 0.0;
    if (!parse_double(cells[0], index) || index < 1.0 ||
        index != std::floor(index))
      throw ParseError(source, line_no, 1, "index must be a positive integer");
    ChangeType type;
    if (cells[1] == "AO")
      type = ChangeType::additive_outlier;
    else if (cells[1] == "LS")
      type = ChangeType::level_shift;
    else
      throw ParseError(source, line_no, 2, "type must be AO or LS");
    if (!parse_double(cells[2], g))
      throw ParseError(source, line_no, 3, "non-numeric g_value");
    out.push_back({ static_cast<Index>(index), type, g });
  }
  return out;
}

std::pair<std::vector<Index>, std::vector<Index>>
split_changes(const std::vector<ChangeRecord>& records)
{
  std::vector<Index> ao, ls;
  for (const ChangeRecord& r : records)
    (r.type == ChangeType::additive_outlier ? ao : ls).push_back(r.index);
  std::sort(ao.begin(), ao.end());
  std::sort(ls.begin(), ls.end());
  return { ao, ls };
}

void
emit_report(const ChangeReport& report,
            const RunSettings& settings,
            const std::filesystem::path& out_dir)
{
  std::filesystem::create_directories(out_dir);

  std::vector<ChangeRecord> records;
  for (Index n : report.cpt0)
    records.push_back(
      { n, ChangeType::additive_outlier, report.g0_hat(n - 1) });
  for (Index n : report.cpt1)
    records.push_back({ n, ChangeType::level_shift, report.g1_hat(n - 1) });
  write_changes(out_dir / "changes.csv", std::move(records));

  write_csv(out_dir / "sources.csv", report.S_hat);
  write_csv(out_dir / "mixing.csv", report.M_hat);
  write_vector_csv(out_dir / "noise.csv", report.psi_hat);

  const auto path = out_dir / "metadata.txt";
  std::ofstream out = open_for_writing(path);
  out << "input=" << settings.input << '\n'
      << "seed=" << settings.seed << '\n'
      << "K=" << settings.rank << '\n'
      << "iterations=" << settings.iterations << '\n'
      << "burn_in=" << settings.burn_in << '\n'
      << "delta=" << format_number(settings.delta) << '\n'
      << "standardize=" << (settings.standardize ? "true" : "false") << '\n'
      << "prune=" << (settings.prune ? "true" : "false") << '\n'
      << "P=" << report.M_hat.rows() << '\n'
      << "N=" << report.S_hat.cols() << '\n'
      << "cutoff_AO=" << format_number(report.cutoff0) << '\n'
      << "cutoff_LS=" << format_number(report.cutoff1) << '\n'
      << "partial_AO=" << join(report.partial_cpt0) << '\n'
      << "partial_LS=" << join(report.partial_cpt1) << '\n';
  finish(out, path);
}

} // namespace abacus::io
