#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fastforest/dataset.hpp"

namespace fastforest {

enum class DataFormat { arff, csv };

/// Load failure with the 1-based line number where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what)
        : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

inline std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    return std::string(s);
}

/// Strict finite-double parse of a whole token. Rejects nan/inf spellings:
/// NaN is the in-memory missing marker and must not be forgeable from text.
inline std::optional<double> parse_double(std::string_view tok) {
    tok = trim(tok);
    if (tok.empty()) return std::nullopt;
    std::string buf(tok);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

/// Splits one CSV line. Supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(const std::filesystem::path& file,
                                               std::size_t line_no, const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && trim(field).empty()) {
            quoted = true;
            field.clear();
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError(file, line_no, "unterminated quoted field");
    out.push_back(field);
    return out;
}

/// Splits an ARFF @data row; '\'' and '"' quoting, no escapes.
inline std::vector<std::string> split_arff_row(const std::filesystem::path& file,
                                               std::size_t line_no, std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    char quote = 0;
    for (const char c : line) {
        if (quote != 0) {
            if (c == quote)
                quote = 0;
            else
                field += c;
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    if (quote != 0) throw ParseError(file, line_no, "unterminated quoted value");
    out.push_back(field);
    return out;
}

inline std::size_t resolve_class_index(const std::filesystem::path& file,
                                       const std::vector<AttributeSchema>& schema,
                                       const std::string& class_spec) {
    if (schema.empty()) throw ParseError(file, 0, "no attributes declared");
    if (class_spec.empty() || class_spec == "last") return schema.size() - 1;
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == class_spec) return i;
    throw std::invalid_argument(file.string() + ": no attribute named '" + class_spec + "'");
}

inline std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

/// Encode one categorical token against a value list; -1 when unseen.
inline int value_code(const AttributeSchema& attr, const std::string& token) {
    for (std::size_t i = 0; i < attr.values.size(); ++i)
        if (attr.values[i] == token) return static_cast<int>(i);
    return -1;
}

struct RawTable {
    std::vector<std::string> header;          // empty for ARFF
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;       // source line of each row
};

}  // namespace detail

/// Parse an ARFF file: @relation, @attribute (numeric/real/integer or nominal
/// {v,...}), then @data with comma-separated rows. '?' is missing. String and
/// date attributes are not supported and raise ParseError.
inline Dataset load_arff(const std::filesystem::path& file, const std::string& class_spec = "last") {
    using namespace detail;
    const auto lines = read_lines(file);

    std::vector<AttributeSchema> schema;
    std::size_t data_start = lines.size();
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string_view line = trim(lines[li]);
        if (line.empty() || line.front() == '%') continue;
        if (iequals(line.substr(0, 9), "@relation")) continue;
        if (iequals(line.substr(0, 5), "@data")) {
            data_start = li + 1;
            break;
        }
        if (!iequals(line.substr(0, 10), "@attribute"))
            throw ParseError(file, li + 1, "expected @attribute or @data");

        std::string_view rest = trim(line.substr(10));
        std::string name;
        if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
            const char q = rest.front();
            const std::size_t close = rest.find(q, 1);
            if (close == std::string_view::npos)
                throw ParseError(file, li + 1, "unterminated attribute name");
            name = std::string(rest.substr(1, close - 1));
            rest = trim(rest.substr(close + 1));
        } else {
            const std::size_t ws = rest.find_first_of(" \t");
            if (ws == std::string_view::npos)
                throw ParseError(file, li + 1, "attribute has no type");
            name = std::string(rest.substr(0, ws));
            rest = trim(rest.substr(ws));
        }
        if (name.empty()) throw ParseError(file, li + 1, "empty attribute name");

        AttributeSchema attr;
        attr.name = name;
        if (!rest.empty() && rest.front() == '{') {
            if (rest.back() != '}')
                throw ParseError(file, li + 1, "unterminated nominal value list");
            attr.kind = AttrKind::categorical;
            std::string_view body = rest.substr(1, rest.size() - 2);
            std::string buf(body);
            for (const auto& tok : split_arff_row(file, li + 1, buf)) {
                const std::string value = std::string(trim(tok));
                if (value.empty()) throw ParseError(file, li + 1, "empty nominal value");
                attr.values.push_back(value);
            }
        } else if (iequals(rest, "numeric") || iequals(rest, "real") || iequals(rest, "integer")) {
            attr.kind = AttrKind::numeric;
        } else {
            throw ParseError(file, li + 1,
                             "unsupported attribute type '" + std::string(rest) + "'");
        }
        schema.push_back(std::move(attr));
    }
    const std::size_t class_index = resolve_class_index(file, schema, class_spec);
    if (schema[class_index].is_numeric())
        throw std::invalid_argument(file.string() + ": class attribute '" +
                                    schema[class_index].name + "' must be nominal");

    std::vector<double> cells;
    std::size_t n = 0;
    for (std::size_t li = data_start; li < lines.size(); ++li) {
        const std::string_view line = trim(lines[li]);
        if (line.empty() || line.front() == '%') continue;
        const auto tokens = split_arff_row(file, li + 1, line);
        if (tokens.size() != schema.size())
            throw ParseError(file, li + 1,
                             "row has " + std::to_string(tokens.size()) + " values, expected " +
                                 std::to_string(schema.size()));
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            const std::string tok = std::string(trim(tokens[c]));
            if (tok == "?") {
                if (c == class_index)
                    throw ParseError(file, li + 1, "missing class value");
                cells.push_back(missing_cell());
                continue;
            }
            if (schema[c].is_numeric()) {
                const auto v = parse_double(tok);
                if (!v)
                    throw ParseError(file, li + 1,
                                     "bad numeric value '" + tok + "' in attribute '" +
                                         schema[c].name + "'");
                cells.push_back(*v);
            } else {
                const int code = value_code(schema[c], tok);
                if (code < 0)
                    throw ParseError(file, li + 1,
                                     "undeclared value '" + tok + "' for attribute '" +
                                         schema[c].name + "'");
                cells.push_back(static_cast<double>(code));
            }
        }
        ++n;
    }
    if (n == 0) throw ParseError(file, lines.size(), "no data rows");
    return Dataset(std::move(schema), class_index, std::move(cells));
}

/// Parse a headered CSV. Column types are inferred: a column is numeric when
/// every non-empty cell parses as a finite number, otherwise categorical with
/// values in first-appearance order. Empty cells are missing. The designated
/// class column is always treated as categorical, whatever its cells look
/// like, because class labels are labels even when they are spelled 0 and 1.
inline Dataset load_csv(const std::filesystem::path& file, const std::string& class_spec = "last") {
    using namespace detail;
    const auto lines = read_lines(file);

    RawTable table;
    std::size_t li = 0;
    for (; li < lines.size(); ++li)
        if (!trim(lines[li]).empty()) break;
    if (li == lines.size()) throw ParseError(file, lines.size(), "empty file");
    for (auto& name : split_csv_line(file, li + 1, lines[li]))
        table.header.push_back(std::string(trim(name)));
    for (++li; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        auto row = split_csv_line(file, li + 1, lines[li]);
        if (row.size() != table.header.size())
            throw ParseError(file, li + 1,
                             "row has " + std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(table.header.size()));
        for (auto& cell : row) cell = std::string(trim(cell));
        table.rows.push_back(std::move(row));
        table.row_lines.push_back(li + 1);
    }
    if (table.rows.empty()) throw ParseError(file, lines.size(), "no data rows");

    std::vector<AttributeSchema> schema(table.header.size());
    std::size_t class_index = table.header.size() - 1;
    if (!class_spec.empty() && class_spec != "last") {
        bool found = false;
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == class_spec) {
                class_index = i;
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument(file.string() + ": no column named '" + class_spec + "'");
    }

    for (std::size_t c = 0; c < schema.size(); ++c) {
        schema[c].name = table.header[c];
        bool numeric = c != class_index;
        for (const auto& row : table.rows) {
            if (row[c].empty()) continue;
            if (!parse_double(row[c])) {
                numeric = false;
                break;
            }
        }
        schema[c].kind = numeric ? AttrKind::numeric : AttrKind::categorical;
        if (!numeric) {
            for (const auto& row : table.rows)
                if (!row[c].empty() && value_code(schema[c], row[c]) < 0)
                    schema[c].values.push_back(row[c]);
        }
    }

    std::vector<double> cells;
    cells.reserve(table.rows.size() * schema.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string& tok = table.rows[r][c];
            if (tok.empty()) {
                if (c == class_index)
                    throw ParseError(file, table.row_lines[r], "missing class value");
                cells.push_back(missing_cell());
            } else if (schema[c].is_numeric()) {
                cells.push_back(*parse_double(tok));
            } else {
                cells.push_back(static_cast<double>(value_code(schema[c], tok)));
            }
        }
    }
    return Dataset(std::move(schema), class_index, std::move(cells));
}

inline DataFormat detect_format(const std::filesystem::path& file) {
    auto ext = file.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".arff") return DataFormat::arff;
    if (ext == ".csv") return DataFormat::csv;
    throw std::invalid_argument("cannot tell ARFF from CSV by extension: " + file.string());
}

inline Dataset load_dataset(const std::filesystem::path& file, DataFormat format,
                            const std::string& class_spec = "last") {
    return format == DataFormat::arff ? load_arff(file, class_spec) : load_csv(file, class_spec);
}

inline Dataset load_dataset(const std::filesystem::path& file,
                            const std::string& class_spec = "last") {
    return load_dataset(file, detect_format(file), class_spec);
}

/// Load a file against a schema fixed by an existing model, for scoring. Cells
/// must match the schema column-for-column by position (ARFF declarations are
/// checked against it by name). Categorical tokens the schema has never seen
/// become missing rather than errors, and class cells may be absent, so
/// unlabeled data can be scored.
inline Dataset load_for_scoring(const std::filesystem::path& file, DataFormat format,
                                const std::vector<AttributeSchema>& schema,
                                std::size_t class_index) {
    using namespace detail;
    const auto lines = read_lines(file);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;
    if (format == DataFormat::csv) {
        std::size_t li = 0;
        for (; li < lines.size(); ++li)
            if (!trim(lines[li]).empty()) break;
        if (li == lines.size()) throw ParseError(file, lines.size(), "empty file");
        const auto header = split_csv_line(file, li + 1, lines[li]);
        if (header.size() != schema.size())
            throw ParseError(file, li + 1,
                             "file has " + std::to_string(header.size()) +
                                 " columns, model expects " + std::to_string(schema.size()));
        for (std::size_t c = 0; c < header.size(); ++c)
            if (std::string(trim(header[c])) != schema[c].name)
                throw ParseError(file, li + 1,
                                 "column " + std::to_string(c + 1) + " is '" +
                                     std::string(trim(header[c])) + "', model expects '" +
                                     schema[c].name + "'");
        for (++li; li < lines.size(); ++li) {
            if (trim(lines[li]).empty()) continue;
            auto row = split_csv_line(file, li + 1, lines[li]);
            for (auto& cell : row) cell = std::string(trim(cell));
            rows.push_back(std::move(row));
            row_lines.push_back(li + 1);
        }
    } else {
        std::size_t attr_seen = 0;
        std::size_t li = 0;
        for (; li < lines.size(); ++li) {
            const std::string_view line = trim(lines[li]);
            if (line.empty() || line.front() == '%') continue;
            if (iequals(line.substr(0, 5), "@data")) {
                ++li;
                break;
            }
            if (iequals(line.substr(0, 10), "@attribute")) ++attr_seen;
        }
        if (attr_seen != 0 && attr_seen != schema.size())
            throw ParseError(file, li,
                             "file declares " + std::to_string(attr_seen) +
                                 " attributes, model expects " + std::to_string(schema.size()));
        for (; li < lines.size(); ++li) {
            const std::string_view line = trim(lines[li]);
            if (line.empty() || line.front() == '%') continue;
            auto row = split_arff_row(file, li + 1, line);
            for (auto& cell : row) cell = std::string(trim(cell));
            rows.push_back(std::move(row));
            row_lines.push_back(li + 1);
        }
    }
    if (rows.empty()) throw ParseError(file, lines.size(), "no data rows");

    std::vector<double> cells;
    cells.reserve(rows.size() * schema.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != schema.size())
            throw ParseError(file, row_lines[r],
                             "row has " + std::to_string(rows[r].size()) + " values, expected " +
                                 std::to_string(schema.size()));
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string& tok = rows[r][c];
            if (tok.empty() || tok == "?") {
                cells.push_back(missing_cell());
            } else if (schema[c].is_numeric()) {
                const auto v = parse_double(tok);
                if (!v)
                    throw ParseError(file, row_lines[r],
                                     "bad numeric value '" + tok + "' in column '" +
                                         schema[c].name + "'");
                cells.push_back(*v);
            } else {
                const int code = value_code(schema[c], tok);
                cells.push_back(code < 0 ? missing_cell() : static_cast<double>(code));
            }
        }
    }
    return Dataset(schema, class_index, std::move(cells));
}

namespace detail {

/// Shortest %g form that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    const bool needs_quotes = s.find_first_of(",\"\n") != std::string::npos ||
                              (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                                              std::isspace(static_cast<unsigned char>(s.back()))));
    if (!needs_quotes) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

/// Write a dataset as CSV. Loading the result back yields a dataset equal to
/// the source: numeric cells are printed with round-trip precision, missing
/// cells are empty, categorical cells are value names.
inline void save_csv(const Dataset& ds, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    const auto& schema = ds.schema();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out << ',';
        out << detail::csv_escape(schema[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < ds.n(); ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            if (c) out << ',';
            const double v = ds.cell(r, c);
            if (is_missing(v)) continue;
            if (schema[c].is_numeric())
                out << detail::format_double(v);
            else
                out << detail::csv_escape(schema[c].values[static_cast<std::size_t>(v)]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace fastforest
