#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"

namespace iqp {

// Shared matrix text format: optional "# key=value" header lines, then one
// line of exactly n characters from {0,1} per row. No trailing whitespace.

struct MatrixText {
    std::vector<std::pair<std::string, std::string>> headers;
    BitMatrix matrix;

    const std::string* header(const std::string& key) const {
        for (const auto& [k, v] : headers) {
            if (k == key) {
                return &v;
            }
        }
        return nullptr;
    }
};

inline MatrixText read_matrix_text(std::istream& in) {
    MatrixText out;
    std::vector<BitVector> rows;
    std::size_t cols = 0;
    std::string line;
    std::size_t lineno = 0;
    bool saw_data = false;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) {
            continue;
        }
        if (line.starts_with("#")) {
            if (saw_data) {
                throw ParseError("line " + std::to_string(lineno) + ": header after data rows");
            }
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') {
                body.erase(0, 1);
            }
            std::size_t eq = body.find('=');
            if (eq == std::string::npos) {
                throw ParseError("line " + std::to_string(lineno) + ": header is not key=value");
            }
            out.headers.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        for (char c : line) {
            if (c != '0' && c != '1') {
                throw ParseError("line " + std::to_string(lineno) +
                                 ": row contains a character outside {0,1}");
            }
        }
        if (!saw_data) {
            cols = line.size();
            saw_data = true;
        } else if (line.size() != cols) {
            throw ParseError("line " + std::to_string(lineno) + ": ragged row (expected " +
                             std::to_string(cols) + " columns, got " +
                             std::to_string(line.size()) + ")");
        }
        rows.push_back(BitVector::from_string(line));
    }
    if (!saw_data) {
        // Width of an empty matrix comes from an n header when present.
        if (const std::string* n = out.header("n")) {
            cols = static_cast<std::size_t>(std::stoull(*n));
        }
    }
    out.matrix = BitMatrix::from_rows(std::move(rows), cols);
    return out;
}

inline void write_matrix_text(std::ostream& out,
                              const std::vector<std::pair<std::string, std::string>>& headers,
                              const BitMatrix& matrix) {
    for (const auto& [k, v] : headers) {
        out << "# " << k << "=" << v << "\n";
    }
    if (matrix.row_count() == 0) {
        out << "# n=" << matrix.col_count() << "\n";
    }
    for (std::size_t i = 0; i < matrix.row_count(); i++) {
        out << matrix.row(i).to_string() << "\n";
    }
}

}  // namespace iqp
