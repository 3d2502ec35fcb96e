#ifndef PCOR_IO_HPP
#define PCOR_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcor/dataset.hpp"

namespace pcor {

/// Parse a schema file: one `attribute: v1, v2, ...` line per categorical
/// attribute, final line `metric: <name>`. Attribute and value order in this
/// file is canonical (it fixes context bit order). Blank lines are ignored.
Schema load_schema(std::istream& in);
Schema load_schema_file(const std::filesystem::path& path);

void write_schema(std::ostream& out, const Schema& schema);
void write_schema_file(const std::filesystem::path& path, const Schema& schema);

/// Parse an RFC-4180 CSV with header into a dataset. The header must contain
/// every schema attribute plus the metric column, in any order; an `id` column
/// is used when present, otherwise ids are assigned 1..N in row order.
/// Categorical values are validated against the declared domains.
Dataset load_dataset(std::istream& data, const Schema& schema);
Dataset load_dataset_file(const std::filesystem::path& data_path, const Schema& schema);

void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv_file(const std::filesystem::path& path, const Dataset& dataset);

/// Minimal RFC-4180 reader: quoted fields, escaped quotes, CRLF line ends,
/// embedded newlines inside quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Read one row into `fields`; false at end of input.
  bool next_row(std::vector<std::string>& fields);

  std::size_t rows_read() const { return rows_read_; }

 private:
  std::istream& in_;
  std::size_t rows_read_ = 0;
};

/// Quote a field for CSV output when needed.
std::string csv_escape(const std::string& field);

}  // namespace pcor

#endif  // PCOR_IO_HPP
