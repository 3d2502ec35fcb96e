#include "pcor/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pcor/errors.hpp"

namespace pcor {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_metric(const std::string& field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw IngestError("row " + std::to_string(row) + ", column '" + column +
                      "': non-numeric metric value '" + field + "'");
  return value;
}

std::int64_t parse_id(const std::string& field, std::size_t row) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw IngestError("row " + std::to_string(row) + ", column 'id': bad id '" + field + "'");
  return value;
}

}  // namespace

Schema load_schema(std::istream& in) {
  std::vector<Schema::Attribute> attrs;
  std::string metric;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw SchemaError("schema line " + std::to_string(lineno) + ": expected 'name: values'");
    const std::string name = trim(line.substr(0, colon));
    const std::string rest = trim(line.substr(colon + 1));
    if (name == "metric") {
      if (!metric.empty())
        throw SchemaError("schema line " + std::to_string(lineno) + ": duplicate metric line");
      metric = rest;
      continue;
    }
    if (!metric.empty())
      throw SchemaError("schema line " + std::to_string(lineno) +
                        ": attribute after the metric line");
    Schema::Attribute attr;
    attr.name = name;
    attr.domain = split_list(rest);
    attrs.push_back(std::move(attr));
  }
  if (metric.empty()) throw SchemaError("schema file is missing the final 'metric: <name>' line");
  return Schema(std::move(attrs), metric);
}

Schema load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file: " + path.string());
  return load_schema(in);
}

void write_schema(std::ostream& out, const Schema& schema) { out << schema.canonical_text(); }

void write_schema_file(const std::filesystem::path& path, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schema file: " + path.string());
  write_schema(out, schema);
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
  fields.clear();
  int ch = in_.get();
  if (ch == EOF) return false;
  std::string field;
  bool quoted = false;
  for (;;) {
    if (quoted) {
      if (ch == EOF) throw IngestError("unterminated quoted field at end of input");
      if (ch == '"') {
        const int nxt = in_.get();
        if (nxt == '"') {
          field += '"';
        } else {
          quoted = false;
          ch = nxt;
          continue;  // reprocess the delimiter after the closing quote
        }
      } else {
        field += static_cast<char>(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n' || ch == EOF) {
      break;
    } else if (ch == '\r') {
      const int nxt = in_.peek();
      if (nxt == '\n') {
        in_.get();
        break;
      }
      field += '\r';
    } else {
      field += static_cast<char>(ch);
    }
    ch = in_.get();
  }
  fields.push_back(std::move(field));
  ++rows_read_;
  return true;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Dataset load_dataset(std::istream& data, const Schema& schema) {
  CsvReader reader(data);
  std::vector<std::string> header;
  if (!reader.next_row(header)) throw IngestError("data file is empty (no header)");

  const std::uint32_t m = schema.attribute_count();
  std::vector<std::size_t> attr_col(m, SIZE_MAX);
  std::size_t metric_col = SIZE_MAX;
  std::size_t id_col = SIZE_MAX;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == "id") {
      id_col = c;
    } else if (name == schema.metric_name()) {
      metric_col = c;
    } else if (auto a = schema.attribute_index(name)) {
      attr_col[*a] = c;
    } else {
      throw IngestError("header column '" + name + "' is not in the schema");
    }
  }
  for (std::uint32_t a = 0; a < m; ++a)
    if (attr_col[a] == SIZE_MAX)
      throw IngestError("header is missing attribute column '" +
                        schema.attributes()[a].name + "'");
  if (metric_col == SIZE_MAX)
    throw IngestError("header is missing metric column '" + schema.metric_name() + "'");

  std::vector<Record> records;
  std::vector<std::string> row;
  while (reader.next_row(row)) {
    const std::size_t rowno = reader.rows_read();  // 1-based, row 1 is the header
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() != header.size())
      throw IngestError("row " + std::to_string(rowno) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.size()));
    Record rec;
    rec.id = (id_col != SIZE_MAX) ? parse_id(row[id_col], rowno)
                                  : static_cast<std::int64_t>(records.size() + 1);
    rec.values.reserve(m);
    for (std::uint32_t a = 0; a < m; ++a) {
      const std::string& field = row[attr_col[a]];
      auto v = schema.value_index(a, field);
      if (!v)
        throw IngestError("row " + std::to_string(rowno) + ", column '" +
                          schema.attributes()[a].name + "': value '" + field +
                          "' is outside the declared domain");
      rec.values.push_back(*v);
    }
    rec.metric = parse_metric(row[metric_col], rowno, schema.metric_name());
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

Dataset load_dataset_file(const std::filesystem::path& data_path, const Schema& schema) {
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw IoError("cannot open data file: " + data_path.string());
  return load_dataset(in, schema);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  out << "id";
  for (const auto& attr : schema.attributes()) out << ',' << csv_escape(attr.name);
  out << ',' << csv_escape(schema.metric_name()) << '\n';
  char buf[32];
  for (const Record& r : dataset.records()) {
    out << r.id;
    for (std::uint32_t a = 0; a < schema.attribute_count(); ++a)
      out << ',' << csv_escape(schema.attributes()[a].domain[r.values[a]]);
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r.metric);
    out << ',' << std::string_view(buf, ptr - buf) << '\n';
  }
}

void write_dataset_csv_file(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write data file: " + path.string());
  write_dataset_csv(out, dataset);
}

}  // namespace pcor
