#pragma once

#include "abacus/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abacus::io {

enum class Orientation
{
  channels_as_rows,
  channels_as_columns
};

//! Malformed input, located by 1-based line and column (0 when not
//! applicable).
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& source,
             std::size_t line,
             std::size_t column,
             const std::string& what);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

//! Rectangular numeric CSV. A first row with any non-numeric cell is taken as
//! a header and skipped. Blank lines are ignored. `source` names the input in
//! diagnostics.
MatrixXd
parse_csv(std::istream& in, const std::string& source);

MatrixXd
read_csv(const std::filesystem::path& path);

//! Centers each row to mean 0 and scales it to unit sample standard
//! deviation; constant rows are only centered.
void
standardize_rows(MatrixXd& X);

//! Reads a CSV and returns it with channels in rows.
ObservationMatrix
load_csv(const std::filesystem::path& path,
         Orientation orientation = Orientation::channels_as_rows,
         bool standardize = false);

//! Shortest decimal form that round-trips (17 significant digits at most);
//! infinities are written "inf" and "-inf".
std::string
format_number(double x);

void
write_csv(const std::filesystem::path& path, const MatrixXd& X);

void
write_vector_csv(const std::filesystem::path& path, const VectorXd& x);

//! One row of a changes file.
struct ChangeRecord
{
  Index index; // 1-based
  ChangeType type;
  double g_value;
};

//! Header `index,type,g_value`, type `AO` or `LS`, sorted by index.
void
write_changes(const std::filesystem::path& path,
              std::vector<ChangeRecord> records);

std::vector<ChangeRecord>
read_changes(const std::filesystem::path& path);

//! Splits records into (AO indices, LS indices), both ascending.
std::pair<std::vector<Index>, std::vector<Index>>
split_changes(const std::vector<ChangeRecord>& records);

//! Everything about a detect run that belongs in metadata.txt besides the
//! report itself.
struct RunSettings
{
  std::uint64_t seed = 1;
  Index rank = 5;
  std::int64_t iterations = 3000;
  std::int64_t burn_in = 500;
  double delta = 1e-10;
  bool standardize = false;
  bool prune = false;
  std::string input;
};

//! Writes changes.csv, sources.csv (K x N), mixing.csv (P x K), noise.csv
//! (P values) and metadata.txt (key=value lines) into `out_dir`, creating it
//! if needed.
void
emit_report(const ChangeReport& report,
            const RunSettings& settings,
            const std::filesystem::path& out_dir);

} // namespace abacus::io
