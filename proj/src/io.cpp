#include "hsd/io.hpp"

#include "hsd/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_set>

namespace hsd {

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty()) cols_ = values.size();
    if (values.size() != cols_) {
        throw DataError("row has " + std::to_string(values.size()) + " columns, expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::size_t FeatureTable::find(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return i;
    }
    return std::string::npos;
}

FeatureTable FeatureTable::select(std::span<const std::string> order) const {
    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

    FeatureTable out;
    out.columns = columns;
    out.values = Matrix(order.size(), columns.size());
    out.ids.assign(order.begin(), order.end());
    for (std::size_t r = 0; r < order.size(); ++r) {
        auto it = index.find(order[r]);
        if (it == index.end()) throw DataError("feature table has no row for id '" + order[r] + "'");
        auto src = values.row(it->second);
        std::copy(src.begin(), src.end(), out.values.row(r).begin());
    }
    return out;
}

FeatureTable hconcat(std::span<const FeatureTable> tables) {
    if (tables.empty()) return {};
    FeatureTable out;
    out.ids = tables.front().ids;
    std::size_t total_cols = 0;
    for (const auto& t : tables) total_cols += t.columns.size();
    out.values = Matrix(out.ids.size(), total_cols);

    std::size_t offset = 0;
    for (const auto& t : tables) {
        const FeatureTable aligned = t.select(out.ids);
        out.columns.insert(out.columns.end(), t.columns.begin(), t.columns.end());
        for (std::size_t r = 0; r < out.ids.size(); ++r) {
            auto src = aligned.values.row(r);
            std::copy(src.begin(), src.end(), out.values.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
        }
        offset += t.columns.size();
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error("to_chars failed");
    return std::string(buf.data(), ptr);
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

namespace {

void append_csv_field(std::string& out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out += field;
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

// Splits CSV content into records of fields, honouring quoted fields.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view content) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        field_started = false;
    };
    while (i < content.size()) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (quoted) throw DataError("CSV: unterminated quoted field");
    if (field_started || !record.empty()) end_record();
    return records;
}

double parse_double_field(const std::string& s, std::size_t line) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw DataError("CSV line " + std::to_string(line) + ": not a number: '" + s + "'");
    }
    if (!std::isfinite(v)) throw DataError("CSV line " + std::to_string(line) + ": non-finite value");
    return v;
}

}  // namespace

std::string feature_table_to_csv(const FeatureTable& table) {
    std::string out = "id";
    for (const auto& c : table.columns) {
        out.push_back(',');
        append_csv_field(out, c);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < table.ids.size(); ++r) {
        append_csv_field(out, table.ids[r]);
        for (double v : table.values.row(r)) {
            out.push_back(',');
            out += format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view content) {
    auto records = parse_csv_records(content);
    if (records.empty()) throw DataError("CSV: missing header");
    auto& header = records.front();
    if (header.empty() || header.front() != "id") throw DataError("CSV: first column must be 'id'");

    FeatureTable table;
    table.columns.assign(header.begin() + 1, header.end());
    table.values = Matrix(0, table.columns.size());
    std::vector<double> row(table.columns.size());
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) {
            throw DataError("CSV line " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(rec.size()));
        }
        if (!seen.insert(rec[0]).second) {
            throw DataError("CSV line " + std::to_string(r + 1) + ": duplicate id '" + rec[0] + "'");
        }
        table.ids.push_back(rec[0]);
        for (std::size_t c = 1; c < rec.size(); ++c) row[c - 1] = parse_double_field(rec[c], r + 1);
        table.values.push_row(row);
    }
    return table;
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
    try {
        return parse_feature_csv(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
    write_file(path, feature_table_to_csv(table));
}

}  // namespace hsd
