#include "crosstask/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "crosstask/errors.hpp"

namespace crosstask {

namespace {

// Minimal CSV: commas separate fields; a field may be double-quoted, with
// "" as the embedded-quote escape. No multi-line fields.
std::vector<std::string> split_csv_line(const std::string& line, size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) fail(ErrorCode::kParse, "unterminated quote on line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

double parse_cell(const std::string& text, const std::string& row, const std::string& col) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        fail(ErrorCode::kParse,
             "malformed number '" + text + "' at row '" + row + "', column '" + col + "'");
    }
    if (pos != text.size())
        fail(ErrorCode::kParse,
             "trailing garbage in '" + text + "' at row '" + row + "', column '" + col + "'");
    return v;
}

void check_unique(const std::vector<std::string>& labels, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            fail(ErrorCode::kSchema, std::string("duplicate ") + what + " label: " + l);
}

}  // namespace

size_t PerformanceMatrix::row_index(std::string_view label) const {
    for (size_t i = 0; i < row_labels.size(); ++i)
        if (row_labels[i] == label) return i;
    fail(ErrorCode::kLookup, "unknown row label: " + std::string(label));
}

size_t PerformanceMatrix::col_index(std::string_view label) const {
    for (size_t i = 0; i < col_labels.size(); ++i)
        if (col_labels[i] == label) return i;
    fail(ErrorCode::kLookup, "unknown column label: " + std::string(label));
}

void PerformanceMatrix::validate() const {
    check_unique(row_labels, "row");
    check_unique(col_labels, "column");
    if (values.size() != rows() * cols())
        fail(ErrorCode::kSchema, "matrix value count does not match label dimensions");
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorCode::kSchema, "non-finite matrix cell");
    if (baseline_row) row_index(*baseline_row);
}

PerformanceMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open matrix csv: " + path);

    PerformanceMatrix m;
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) fail(ErrorCode::kParse, "empty matrix csv: " + path);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line, line_no);
    if (header.size() < 2) fail(ErrorCode::kSchema, "matrix header needs at least one task column");
    m.col_labels.assign(header.begin() + 1, header.end());

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        m.row_labels.push_back(fields[0]);
        for (size_t c = 1; c < fields.size(); ++c)
            m.values.push_back(parse_cell(fields[c], fields[0], m.col_labels[c - 1]));
    }
    if (m.row_labels.empty()) fail(ErrorCode::kSchema, "matrix csv has no data rows: " + path);
    for (const auto& r : m.row_labels)
        if (r == "None") m.baseline_row = r;
    m.validate();
    return m;
}

std::string matrix_to_csv(const PerformanceMatrix& m) {
    std::ostringstream out;
    out << "model";
    for (const auto& c : m.col_labels) out << ',' << csv_escape(c);
    out << '\n';
    char buf[32];
    for (size_t r = 0; r < m.rows(); ++r) {
        out << csv_escape(m.row_labels[r]);
        for (size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.2f", m.at(r, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_matrix_csv(const PerformanceMatrix& m, const std::string& path) {
    m.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write matrix csv: " + path);
    out << matrix_to_csv(m);
}

}  // namespace crosstask
