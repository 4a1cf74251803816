#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ptkr/error.hpp"

namespace ptkr::experiments {

enum class ColumnType { real, integer, text };

inline std::string to_string(ColumnType t) {
  switch (t) {
    case ColumnType::real: return "real";
    case ColumnType::integer: return "integer";
    case ColumnType::text: return "text";
  }
  return "?";
}

inline ColumnType parse_column_type(std::string_view s) {
  if (s == "real") return ColumnType::real;
  if (s == "integer") return ColumnType::integer;
  if (s == "text") return ColumnType::text;
  throw Error("unknown column type '" + std::string(s) + "'");
}

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  std::string name;
  ColumnType type;
};

/// Shortest round-trip text for a double: 17 significant digits, "nan"/"inf" spelled out.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("real formatting failed");
  return {buf, end};
}

inline double parse_real(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw Error("not a real number: '" + std::string(s) + "'");
  return v;
}

inline std::int64_t parse_integer(std::string_view s) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw Error("not an integer: '" + std::string(s) + "'");
  return v;
}

/// Rectangular table of typed columns plus an ordered key/value metadata block.
///
/// On disk:
///   # key = value          (metadata, in insertion order)
///   # column_types = ...   (always last)
///   name1,name2,...
///   v11,v12,...
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {
    for (const auto& c : columns_)
      if (c.name.empty() || c.name.find_first_of(",\n\r") != std::string::npos)
        throw Error("invalid column name '" + c.name + "'");
  }

  [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
  [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return meta_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw Error("row width does not match the table");
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto want = columns_[i].type;
      const bool ok = (want == ColumnType::real && std::holds_alternative<double>(row[i])) ||
                      (want == ColumnType::integer && std::holds_alternative<std::int64_t>(row[i])) ||
                      (want == ColumnType::text && std::holds_alternative<std::string>(row[i]));
      if (!ok) throw Error("cell type mismatch in column '" + columns_[i].name + "'");
      if (want == ColumnType::text && std::get<std::string>(row[i]).find_first_of(",\n\r") != std::string::npos)
        throw Error("text cells may not contain commas or newlines");
    }
    rows_.push_back(std::move(row));
  }

  /// Appends, or replaces the value of an existing key in place.
  void set_meta(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of("=\n\r") != std::string::npos || key == "column_types")
      throw Error("invalid metadata key '" + key + "'");
    if (value.find_first_of("\n\r") != std::string::npos) throw Error("metadata values must be single-line");
    for (auto& [k, v] : meta_)
      if (k == key) {
        v = value;
        return;
      }
    meta_.emplace_back(key, value);
  }

  [[nodiscard]] const std::string* meta(const std::string& key) const {
    for (const auto& [k, v] : meta_)
      if (k == key) return &v;
    return nullptr;
  }

  [[nodiscard]] std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    throw Error("no column '" + name + "'");
  }

  [[nodiscard]] std::vector<double> real_column(const std::string& name) const {
    const std::size_t i = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(std::get<double>(r[i]));
    return out;
  }

  /// Cell-wise identity; reals compare by bit pattern so NaNs match.
  friend bool operator==(const ResultTable& a, const ResultTable& b) {
    if (a.meta_ != b.meta_ || a.rows_.size() != b.rows_.size() || a.columns_.size() != b.columns_.size())
      return false;
    for (std::size_t i = 0; i < a.columns_.size(); ++i)
      if (a.columns_[i].name != b.columns_[i].name || a.columns_[i].type != b.columns_[i].type) return false;
    for (std::size_t r = 0; r < a.rows_.size(); ++r)
      for (std::size_t c = 0; c < a.columns_.size(); ++c) {
        const Cell& x = a.rows_[r][c];
        const Cell& y = b.rows_[r][c];
        if (x.index() != y.index()) return false;
        if (const double* dx = std::get_if<double>(&x)) {
          if (std::bit_cast<std::uint64_t>(*dx) != std::bit_cast<std::uint64_t>(std::get<double>(y))) return false;
        } else if (x != y) {
          return false;
        }
      }
    return true;
  }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << " = " << v << '\n';
    os << "# column_types = ";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << to_string(columns_[i].type);
    os << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i].name;
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                os << format_real(v);
              else
                os << v;
            },
            r[i]);
      }
      os << '\n';
    }
  }

  [[nodiscard]] std::string to_csv() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  static ResultTable read(std::istream& is) {
    ResultTable t;
    std::string line;
    std::vector<ColumnType> types;
    bool have_types = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] != '#') break;
      const auto eq = line.find(" = ");
      if (line.size() < 2 || line[1] != ' ' || eq == std::string::npos) throw Error("malformed metadata line: " + line);
      std::string key = line.substr(2, eq - 2);
      std::string value = line.substr(eq + 3);
      if (key == "column_types") {
        for (const auto& s : split(value)) types.push_back(parse_column_type(s));
        have_types = true;
      } else {
        t.meta_.emplace_back(std::move(key), std::move(value));
      }
    }
    if (!have_types) throw Error("table has no column_types metadata");
    const auto names = split(line);
    if (names.size() != types.size()) throw Error("header and column_types disagree in width");
    for (std::size_t i = 0; i < names.size(); ++i) t.columns_.push_back({names[i], types[i]});
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto fields = split(line);
      if (fields.size() != types.size()) throw Error("ragged row: " + line);
      std::vector<Cell> row;
      row.reserve(fields.size());
      for (std::size_t i = 0; i < fields.size(); ++i) {
        switch (types[i]) {
          case ColumnType::real: row.emplace_back(parse_real(fields[i])); break;
          case ColumnType::integer: row.emplace_back(parse_integer(fields[i])); break;
          case ColumnType::text: row.emplace_back(fields[i]); break;
        }
      }
      t.rows_.push_back(std::move(row));
    }
    return t;
  }

  static ResultTable from_csv(const std::string& text) {
    std::istringstream is(text);
    return read(is);
  }

 private:
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find(',', start);
      out.push_back(s.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return out;
  }

  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Writes `table` to `path`; the parent directory must exist.
inline void save_table(const ResultTable& table, const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw ConfigError("output directory does not exist: " + parent.string());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file: " + path.string());
  table.write(os);
  if (!os) throw Error("write failed: " + path.string());
}

inline ResultTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open table: " + path.string());
  return ResultTable::read(is);
}

}  // namespace ptkr::experiments
