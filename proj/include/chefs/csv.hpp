#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chefs/text.hpp"

namespace chefs {

/// Streaming RFC-4180 reader. Reads plain or gzip-compressed files transparently,
/// strips a leading UTF-8 BOM and skips blank lines. Quoted fields may span lines.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);
    ~CsvReader();
    CsvReader(CsvReader&&) noexcept;
    CsvReader& operator=(CsvReader&&) noexcept;

    /// Reads the next record into `fields`. Returns false at end of input.
    /// Throws Error(MalformedFile) on an unterminated quoted field.
    bool read_record(std::vector<std::string>& fields);

    /// 1-based ordinal of the last record returned (the header is record 1).
    std::size_t record_number() const noexcept { return records_; }
    /// Physical line on which the last record started.
    std::size_t line_number() const noexcept { return record_line_; }

private:
    bool fill();

    struct GzHandle;
    std::unique_ptr<GzHandle> gz_;
    std::string path_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    bool eof_ = false;
    bool at_start_ = true;
    std::size_t records_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Appends one field with canonical escaping: quoted only when it contains a
/// comma, a double quote, CR or LF.
void append_csv_field(std::string& out, std::string_view field);

template <typename Range>
void append_csv_row(std::string& out, const Range& fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out.push_back(',');
        first = false;
        append_csv_field(out, std::string_view(f));
    }
    out.push_back('\n');
}

/// Row with optional cells; absent cells are written as empty.
void append_csv_row(std::string& out, std::span<const Field> fields);

/// Reads a whole CSV file as header + rows. Convenient for small files such as
/// catalogues and configuration tables.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;
};
CsvTable read_csv_table(const std::filesystem::path& path);
CsvTable parse_csv_text(std::string_view text, std::string_view origin);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace chefs
