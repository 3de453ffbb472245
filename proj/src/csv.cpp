#include "chefs/csv.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "chefs/error.hpp"

namespace chefs {

struct CsvReader::GzHandle {
    gzFile file = nullptr;
    ~GzHandle() {
        if (file) gzclose(file);
    }
};

CsvReader::CsvReader(const std::filesystem::path& path)
    : gz_(std::make_unique<GzHandle>()), path_(path.string()), buffer_(1 << 20) {
    gz_->file = gzopen(path_.c_str(), "rb");
    if (!gz_->file) throw Error(ErrorCode::Io, "cannot open " + path_);
    gzbuffer(gz_->file, 1 << 18);
}

CsvReader::~CsvReader() = default;
CsvReader::CsvReader(CsvReader&&) noexcept = default;
CsvReader& CsvReader::operator=(CsvReader&&) noexcept = default;

bool CsvReader::fill() {
    if (eof_) return false;
    const int got = gzread(gz_->file, buffer_.data(), static_cast<unsigned>(buffer_.size()));
    if (got < 0) {
        int errnum = 0;
        const char* msg = gzerror(gz_->file, &errnum);
        throw Error(ErrorCode::Io, "read error in " + path_ + ": " + (msg ? msg : "unknown"));
    }
    pos_ = 0;
    end_ = static_cast<std::size_t>(got);
    if (got == 0) eof_ = true;
    if (at_start_ && end_ >= 3 && static_cast<unsigned char>(buffer_[0]) == 0xEF &&
        static_cast<unsigned char>(buffer_[1]) == 0xBB && static_cast<unsigned char>(buffer_[2]) == 0xBF)
        pos_ = 3;
    at_start_ = false;
    return got > 0;
}

bool CsvReader::read_record(std::vector<std::string>& fields) {
    fields.clear();
    while (true) {
        // Skip blank lines between records.
        while (true) {
            if (pos_ >= end_ && !fill()) return false;
            const char c = buffer_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (c == '\r') {
                ++pos_;
            } else {
                break;
            }
        }
        break;
    }

    record_line_ = line_;
    std::string field;
    bool in_quotes = false;
    bool field_started_quoted = false;
    while (true) {
        if (pos_ >= end_ && !fill()) {
            if (in_quotes)
                throw Error(ErrorCode::MalformedFile,
                            path_ + ": unterminated quoted field starting on line " + std::to_string(record_line_));
            fields.push_back(std::move(field));
            ++records_;
            return true;
        }
        const char c = buffer_[pos_++];
        if (in_quotes) {
            if (c == '"') {
                if (pos_ >= end_) fill();
                if (pos_ < end_ && buffer_[pos_] == '"') {
                    field.push_back('"');
                    ++pos_;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case ',':
                fields.push_back(std::move(field));
                field.clear();
                field_started_quoted = false;
                break;
            case '"':
                if (field.empty() && !field_started_quoted) {
                    in_quotes = true;
                    field_started_quoted = true;
                } else {
                    field.push_back(c);
                }
                break;
            case '\r':
                break;
            case '\n':
                ++line_;
                fields.push_back(std::move(field));
                ++records_;
                return true;
            default:
                field.push_back(c);
        }
    }
}

void append_csv_field(std::string& out, std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

void append_csv_row(std::string& out, std::span<const Field> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out.push_back(',');
        first = false;
        if (f) append_csv_field(out, *f);
    }
    out.push_back('\n');
}

CsvTable read_csv_table(const std::filesystem::path& path) {
    CsvReader reader(path);
    CsvTable table;
    std::vector<std::string> record;
    if (!reader.read_record(record)) return table;
    table.header = record;
    while (reader.read_record(record)) {
        table.rows.push_back(record);
        table.row_lines.push_back(reader.line_number());
    }
    return table;
}

CsvTable parse_csv_text(std::string_view text, std::string_view origin) {
    // Small in-memory tables (embedded defaults): route through a temp-free parser.
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool quoted = false;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool have_content = false;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        quoted = false;
        if (table.header.empty() && table.rows.empty()) {
            table.header = std::move(record);
        } else {
            table.rows.push_back(std::move(record));
            table.row_lines.push_back(record_line);
        }
        record.clear();
        have_content = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '\r') continue;
        if (c == '\n') {
            if (have_content) end_record();
            ++line;
            record_line = line;
            continue;
        }
        if (!have_content) record_line = line;
        have_content = true;
        if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            quoted = false;
        } else if (c == '"' && field.empty() && !quoted) {
            in_quotes = true;
            quoted = true;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw Error(ErrorCode::MalformedFile, std::string(origin) + ": unterminated quoted field");
    if (have_content) end_record();
    return table;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace chefs
