#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/ingest.hpp"

namespace fs = std::filesystem;

namespace chefs {

std::string PartitionKey::relative_dir() const {
    return std::string(hazard_code(hazard)) + "/" + country + "/" + std::to_string(year);
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<std::string_view> strip_data_extension(std::string_view name) {
    if (ends_with(name, ".csv.gz")) return name.substr(0, name.size() - 7);
    if (ends_with(name, ".csv")) return name.substr(0, name.size() - 4);
    return std::nullopt;
}

bool valid_country(std::string_view c) {
    return c.size() >= 2 && c.size() <= 3 &&
           std::all_of(c.begin(), c.end(), [](char ch) { return ch >= 'A' && ch <= 'Z'; });
}

}  // namespace

std::optional<ParsedFileName> parse_data_file_name(std::string_view file_name) {
    const auto stem = strip_data_extension(file_name);
    if (!stem) return std::nullopt;
    const auto parts = split(*stem, "_");
    if (parts.size() < 3) return std::nullopt;
    const auto hazard = parse_hazard_code(parts[0]);
    if (!hazard || parts[0] != hazard_code(*hazard)) return std::nullopt;
    if (!valid_country(parts[1])) return std::nullopt;
    if (parts[2].size() != 4) return std::nullopt;
    const auto year = parse_integer(parts[2]);
    if (!year || *year < kMinYear || *year > kMaxYear) return std::nullopt;
    for (std::size_t i = 3; i < parts.size(); ++i)
        if (parts[i].empty()) return std::nullopt;
    return ParsedFileName{*hazard, std::string(parts[1]), static_cast<int>(*year)};
}

Discovery discover_files(const fs::path& root, int ssd2_from_year) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error(ErrorCode::Io, "input directory not found: " + root.string());
    Discovery out;
    fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot read directory " + root.string() + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw Error(ErrorCode::Io, "cannot read directory " + root.string() + ": " + ec.message());
        if (!it->is_regular_file()) continue;
        const auto& path = it->path();
        const auto name = path.filename().string();
        const auto rel = path.lexically_relative(root).generic_string();
        if (ends_with(name, ".meta.json")) continue;
        if (!strip_data_extension(name)) {
            out.skipped.push_back({rel, "not a CSV data file"});
            continue;
        }
        auto parsed = parse_data_file_name(name);
        std::optional<HazardCategory> hazard = parsed ? std::optional(parsed->hazard) : std::nullopt;
        std::optional<std::string> country = parsed ? std::optional(parsed->country) : std::nullopt;
        std::optional<int> year = parsed ? std::optional(parsed->year) : std::nullopt;
        std::optional<Era> era;

        const fs::path sidecar = path.string() + ".meta.json";
        if (fs::exists(sidecar)) {
            try {
                const auto meta = nlohmann::json::parse(read_text_file(sidecar));
                if (meta.contains("hazard")) {
                    hazard = parse_hazard_code(meta.at("hazard").get<std::string>());
                    if (!hazard) throw Error(ErrorCode::MalformedFile, "unknown hazard in sidecar");
                }
                if (meta.contains("country")) country = meta.at("country").get<std::string>();
                if (meta.contains("year")) year = meta.at("year").get<int>();
                if (meta.contains("era")) {
                    era = parse_era(meta.at("era").get<std::string>());
                    if (!era) throw Error(ErrorCode::MalformedFile, "unknown era in sidecar");
                }
            } catch (const std::exception& e) {
                out.skipped.push_back({rel, std::string("invalid sidecar: ") + e.what()});
                continue;
            }
        }
        if (!hazard || !country || !year) {
            out.skipped.push_back({rel, "file name does not follow <HAZARD>_<COUNTRY>_<YEAR>.csv and no sidecar supplies it"});
            continue;
        }
        if (!valid_country(*country) || *year < kMinYear || *year > kMaxYear) {
            out.skipped.push_back({rel, "invalid country or year"});
            continue;
        }
        FileManifestEntry entry;
        entry.path = path;
        entry.relative_path = rel;
        entry.hazard = *hazard;
        entry.country = *country;
        entry.year = *year;
        entry.era = era.value_or(*year >= ssd2_from_year ? Era::SSD2 : Era::SSD1);
        entry.size_bytes = fs::file_size(path, ec);
        out.entries.push_back(std::move(entry));
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) { return a.relative_path < b.relative_path; });
    std::sort(out.skipped.begin(), out.skipped.end(),
              [](const auto& a, const auto& b) { return a.relative_path < b.relative_path; });
    return out;
}

}  // namespace chefs
