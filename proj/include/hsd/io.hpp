#pragma once
// File helpers, dense matrices and feature tables shared by every module.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Appends a row; the first row fixes the column count of an empty matrix.
    void push_row(std::span<const double> values);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Per-example feature rows keyed by example id, with named columns.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    Matrix values;

    std::size_t find(std::string_view id) const;  // npos when absent
    /// Rows reordered to `order`; throws DataError naming the first missing id.
    FeatureTable select(std::span<const std::string> order) const;
};

/// Joins tables column-wise, aligned on the ids (and order) of the first table.
FeatureTable hconcat(std::span<const FeatureTable> tables);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits file content into lines; a trailing newline does not yield an extra line.
std::vector<std::string_view> split_lines(std::string_view content);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// CSV with RFC 4180 quoting; first column is "id".
std::string feature_table_to_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view content);
FeatureTable load_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);

}  // namespace hsd
