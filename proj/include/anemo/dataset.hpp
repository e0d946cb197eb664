#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "anemo/error.hpp"
#include "anemo/series.hpp"

namespace anemo {

/**
 * A named-column numeric table: the universal input for preprocessing and
 * regression. Rows are rectangular, column names unique, all cells finite.
 * An optional response column may be designated for supervised steps.
 */
class Dataset {
  public:
    Dataset(std::vector<std::string> column_names, std::vector<std::vector<double>> columns)
        : names_(std::move(column_names)), columns_(std::move(columns)) {
        if (names_.empty() || names_.size() != columns_.size())
            throw DimensionError("Dataset: column name/data count mismatch");
        std::unordered_set<std::string> seen;
        for (const auto& name : names_) {
            if (!seen.insert(name).second)
                throw DomainError("Dataset: duplicate column name '" + name + "'");
        }
        const std::size_t n = columns_.front().size();
        if (n == 0) throw InsufficientDataError("Dataset: no rows");
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            if (columns_[j].size() != n)
                throw DimensionError("Dataset: ragged column '" + names_[j] + "'");
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(columns_[j][i]))
                    throw DomainError("Dataset: non-finite value in column '" + names_[j]
                                      + "' row " + std::to_string(i + 1));
            }
        }
    }

    [[nodiscard]] std::size_t n_rows() const { return columns_.front().size(); }
    [[nodiscard]] std::size_t n_cols() const { return columns_.size(); }
    [[nodiscard]] const std::vector<std::string>& column_names() const { return names_; }

    [[nodiscard]] std::size_t column_index(std::string_view name) const {
        for (std::size_t j = 0; j < names_.size(); ++j)
            if (names_[j] == name) return j;
        throw DomainError("Dataset: no column named '" + std::string(name) + "'");
    }

    [[nodiscard]] bool has_column(std::string_view name) const {
        for (const auto& n : names_)
            if (n == name) return true;
        return false;
    }

    [[nodiscard]] const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
    [[nodiscard]] const std::vector<double>& column(std::string_view name) const {
        return columns_[column_index(name)];
    }

    [[nodiscard]] const std::optional<std::string>& response() const { return response_; }
    void set_response(std::string name) {
        (void)column_index(name);  // validates existence
        response_ = std::move(name);
    }

    /// New dataset keeping the named columns, in the given order.
    [[nodiscard]] Dataset select(const std::vector<std::string>& keep) const {
        std::vector<std::vector<double>> cols;
        cols.reserve(keep.size());
        for (const auto& name : keep) cols.push_back(column(name));
        Dataset out(keep, std::move(cols));
        if (response_ && out.has_column(*response_)) out.response_ = response_;
        return out;
    }

    /// New dataset with the given rows (indices may repeat, for resampling).
    [[nodiscard]] Dataset take_rows(const std::vector<std::size_t>& idx) const {
        std::vector<std::vector<double>> cols(n_cols());
        for (std::size_t j = 0; j < n_cols(); ++j) {
            cols[j].reserve(idx.size());
            for (std::size_t i : idx) cols[j].push_back(columns_[j].at(i));
        }
        Dataset out(names_, std::move(cols));
        out.response_ = response_;
        return out;
    }

  private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;  // column-major
    std::optional<std::string> response_;
};

namespace csv {

struct ReadOptions {
    bool drop_bad_rows = false;        // otherwise a non-numeric cell is an error
    std::optional<double> max_value;   // ingestion filter: drop rows with any cell above
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim ASCII whitespace and a trailing CR from CRLF input
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ' || cell.back() == '\t'))
            cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && (cell[start] == ' ' || cell[start] == '\t')) ++start;
        out.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool parse_number(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc{} && result.ptr == last && !cell.empty();
}

/**
 * Reads a Dataset from CSV: mandatory header row, comma separator, '.'
 * decimal, UTF-8. Rows with non-numeric cells are rejected with their row
 * number unless drop_bad_rows is set.
 */
inline Dataset read_dataset(std::istream& in, const ReadOptions& opt = {}) {
    std::string line;
    if (!std::getline(in, line)) throw Error("csv: empty input, header row required");
    const auto names = split_line(line);
    if (names.empty()) throw Error("csv: header row has no columns");

    std::vector<std::vector<double>> columns(names.size());
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != names.size()) {
            if (opt.drop_bad_rows) continue;
            throw Error("csv: row " + std::to_string(row_number) + " has "
                        + std::to_string(cells.size()) + " cells, expected "
                        + std::to_string(names.size()));
        }
        std::vector<double> parsed(cells.size());
        bool ok = true;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (!parse_number(cells[j], parsed[j]) || !std::isfinite(parsed[j])) {
                if (opt.drop_bad_rows) {
                    ok = false;
                    break;
                }
                throw Error("csv: non-numeric cell '" + cells[j] + "' at row "
                            + std::to_string(row_number) + ", column '" + names[j] + "'");
            }
        }
        if (!ok) continue;
        if (opt.max_value) {
            bool over = false;
            for (double x : parsed)
                if (x > *opt.max_value) over = true;
            if (over) continue;
        }
        for (std::size_t j = 0; j < cells.size(); ++j) columns[j].push_back(parsed[j]);
    }
    if (columns.front().empty()) throw Error("csv: no data rows");
    return Dataset(names, std::move(columns));
}

inline Dataset read_dataset_file(const std::string& path, const ReadOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw Error("csv: cannot open '" + path + "'");
    return read_dataset(in, opt);
}

inline void write_dataset(std::ostream& out, const Dataset& d) {
    const auto& names = d.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    char buffer[32];
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j) out << ',';
            const auto res = std::to_chars(buffer, buffer + sizeof(buffer), d.column(j)[i]);
            out.write(buffer, res.ptr - buffer);
        }
        out << '\n';
    }
}

inline void write_dataset_file(const std::string& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!out) throw Error("csv: cannot write '" + path + "'");
    write_dataset(out, d);
}

}  // namespace csv

}  // namespace anemo
