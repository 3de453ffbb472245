#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "chefs/model.hpp"

namespace chefs {

enum class Era : std::uint8_t { SSD1, SSD2 };
std::string_view to_string(Era era) noexcept;
std::optional<Era> parse_era(std::string_view s) noexcept;

enum class CatalogueKind : std::uint8_t { Param, MatrixFoodex, MatrixFoodex2, Country };
std::string_view to_string(CatalogueKind kind) noexcept;

struct CatalogueTerm {
    std::string term_id;
    std::string full_name;
    CatalogueKind catalogue = CatalogueKind::Param;
    std::optional<Era> era;
};

/// Hierarchical name split on "::". Segments are trimmed and never empty.
class OntologyPath {
public:
    explicit OntologyPath(std::vector<std::string> segments);

    const std::vector<std::string>& segments() const noexcept { return segments_; }
    std::size_t depth() const noexcept { return segments_.size(); }
    std::string joined() const;

private:
    std::vector<std::string> segments_;
};

/// Throws Error(MalformedPath) for empty input or an empty segment.
OntologyPath parse_param_path(std::string_view full_name);

struct OntologyGroup {
    std::string name;
    bool truncated = false;  ///< path was shallower than the requested level
};

/// Segment at 1-based `level`, or the deepest segment flagged as truncated.
OntologyGroup ontology_group(const OntologyPath& path, int level);

/// Loads a catalogue CSV with header term_id,full_name,era. Rejects malformed
/// rows and duplicate term ids within (catalogue, era), naming the row.
std::vector<CatalogueTerm> load_catalogue(const std::filesystem::path& path, CatalogueKind kind);
std::vector<CatalogueTerm> parse_catalogue(std::string_view csv_text, CatalogueKind kind, std::string_view origin);

/// Read-only lookup over loaded catalogues.
class CatalogueIndex {
public:
    void add(const std::vector<CatalogueTerm>& terms);

    /// Exact era first, then an era-less entry.
    const CatalogueTerm* find(CatalogueKind kind, std::string_view term_id, std::optional<Era> era) const;

    /// FoodEx for SSD1 files, FoodEx2 for SSD2 files, then the other one.
    std::optional<std::string> product_full_name(std::string_view product_id, Era era) const;
    std::optional<std::string> contaminant_full_name(std::string_view contaminant_id, Era era) const;

    std::size_t size() const noexcept { return terms_.size(); }

    /// The catalogue excerpts shipped with the project.
    static CatalogueIndex builtin();

private:
    using Key = std::tuple<CatalogueKind, int, std::string>;
    std::map<Key, CatalogueTerm, std::less<>> terms_;
};

enum class RuleScope : std::uint8_t { All, CC, PEST, VMPR };
std::optional<RuleScope> parse_rule_scope(std::string_view s) noexcept;

struct GroupingRule {
    int order = 0;
    std::string pattern;
    RuleScope scope = RuleScope::All;
    std::string category;
};

/// Ordered keyword rules that assign product full names to broad categories.
/// A whole-segment match of any rule beats a keyword match inside a segment;
/// within each pass the first rule in order wins. Unmatched names go to "Others".
class GroupingDictionary {
public:
    explicit GroupingDictionary(std::vector<GroupingRule> rules);

    static GroupingDictionary load(const std::filesystem::path& path);
    static GroupingDictionary parse(std::string_view csv_text, std::string_view origin);
    static const GroupingDictionary& builtin();

    const std::string& assign(std::string_view full_name, HazardCategory hazard) const;

    /// Configured categories (first spelling wins, compared case-insensitively) plus "Others".
    const std::vector<std::string>& categories() const noexcept { return categories_; }
    const std::vector<GroupingRule>& rules() const noexcept { return rules_; }

private:
    std::vector<GroupingRule> rules_;
    std::vector<std::string> lowered_patterns_;
    std::vector<std::string> rule_category_;  ///< canonical spelling per rule
    std::vector<std::string> categories_;
    std::string others_;
};

inline constexpr std::string_view kOthersCategory = "Others";

/// Lowercased segments of a product name for keyword matching. Unlike
/// parse_param_path this never throws: empty segments are dropped.
std::vector<std::string> product_segments(std::string_view full_name);

}  // namespace chefs
