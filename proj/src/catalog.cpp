#include "chefs/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "chefs/csv.hpp"
#include "chefs/embedded.hpp"
#include "chefs/error.hpp"

namespace chefs {

std::string_view to_string(Era era) noexcept { return era == Era::SSD1 ? "SSD1" : "SSD2"; }

std::optional<Era> parse_era(std::string_view s) noexcept {
    s = trim(s);
    if (iequals(s, "SSD1")) return Era::SSD1;
    if (iequals(s, "SSD2")) return Era::SSD2;
    return std::nullopt;
}

std::string_view to_string(CatalogueKind kind) noexcept {
    switch (kind) {
        case CatalogueKind::Param: return "PARAM";
        case CatalogueKind::MatrixFoodex: return "MATRIX_FOODEX";
        case CatalogueKind::MatrixFoodex2: return "MATRIX_FOODEX2";
        case CatalogueKind::Country: return "COUNTRY";
    }
    return "PARAM";
}

OntologyPath::OntologyPath(std::vector<std::string> segments) : segments_(std::move(segments)) {}

std::string OntologyPath::joined() const { return join(segments_, "::"); }

OntologyPath parse_param_path(std::string_view full_name) {
    if (trim(full_name).empty()) throw Error(ErrorCode::MalformedPath, "empty ontology path");
    std::vector<std::string> segments;
    for (auto piece : split(full_name, "::")) {
        const auto t = trim(piece);
        if (t.empty())
            throw Error(ErrorCode::MalformedPath, "empty segment in ontology path '" + std::string(full_name) + "'");
        segments.emplace_back(t);
    }
    return OntologyPath(std::move(segments));
}

OntologyGroup ontology_group(const OntologyPath& path, int level) {
    if (level < 1) throw std::invalid_argument("ontology level must be >= 1");
    const auto& s = path.segments();
    if (static_cast<std::size_t>(level) <= s.size()) return {s[static_cast<std::size_t>(level) - 1], false};
    return {s.back(), true};
}

std::vector<CatalogueTerm> parse_catalogue(std::string_view csv_text, CatalogueKind kind, std::string_view origin) {
    const auto table = parse_csv_text(csv_text, origin);
    const std::string where(origin);
    if (table.header.size() < 2 || trim(table.header[0]) != "term_id" || trim(table.header[1]) != "full_name" ||
        (table.header.size() > 2 && trim(table.header[2]) != "era"))
        throw Error(ErrorCode::MalformedFile, where + ": expected header term_id,full_name,era");
    std::vector<CatalogueTerm> terms;
    std::set<std::pair<int, std::string>> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto row_no = std::to_string(i < table.row_lines.size() ? table.row_lines[i] : i + 2);
        if (row.size() != table.header.size())
            throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": expected " +
                                                     std::to_string(table.header.size()) + " fields");
        CatalogueTerm term;
        term.catalogue = kind;
        term.term_id = std::string(trim(row[0]));
        if (term.term_id.empty()) throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": empty term_id");
        try {
            term.full_name = parse_param_path(row[1]).joined();
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, where + " line " + row_no + " (" + term.term_id + "): " + e.what());
        }
        if (row.size() > 2 && !trim(row[2]).empty()) {
            term.era = parse_era(row[2]);
            if (!term.era)
                throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": unknown era '" + row[2] + "'");
        }
        const int era_key = term.era ? static_cast<int>(*term.era) : -1;
        if (!seen.emplace(era_key, term.term_id).second)
            throw Error(ErrorCode::DuplicateTerm,
                        where + " line " + row_no + ": duplicate term_id '" + term.term_id + "'");
        terms.push_back(std::move(term));
    }
    return terms;
}

std::vector<CatalogueTerm> load_catalogue(const std::filesystem::path& path, CatalogueKind kind) {
    return parse_catalogue(read_text_file(path), kind, path.string());
}

void CatalogueIndex::add(const std::vector<CatalogueTerm>& terms) {
    for (const auto& t : terms) {
        Key key{t.catalogue, t.era ? static_cast<int>(*t.era) : -1, t.term_id};
        if (!terms_.emplace(std::move(key), t).second)
            throw Error(ErrorCode::DuplicateTerm, "duplicate term_id '" + t.term_id + "' in " +
                                                      std::string(to_string(t.catalogue)));
    }
}

const CatalogueTerm* CatalogueIndex::find(CatalogueKind kind, std::string_view term_id, std::optional<Era> era) const {
    const std::string id(term_id);
    if (era) {
        if (auto it = terms_.find(Key{kind, static_cast<int>(*era), id}); it != terms_.end()) return &it->second;
    }
    if (auto it = terms_.find(Key{kind, -1, id}); it != terms_.end()) return &it->second;
    return nullptr;
}

std::optional<std::string> CatalogueIndex::product_full_name(std::string_view product_id, Era era) const {
    const auto first = era == Era::SSD1 ? CatalogueKind::MatrixFoodex : CatalogueKind::MatrixFoodex2;
    const auto second = era == Era::SSD1 ? CatalogueKind::MatrixFoodex2 : CatalogueKind::MatrixFoodex;
    if (const auto* t = find(first, product_id, era)) return t->full_name;
    if (const auto* t = find(second, product_id, std::nullopt)) return t->full_name;
    const auto other_era = era == Era::SSD1 ? Era::SSD2 : Era::SSD1;
    if (const auto* t = find(second, product_id, other_era)) return t->full_name;
    return std::nullopt;
}

std::optional<std::string> CatalogueIndex::contaminant_full_name(std::string_view contaminant_id, Era era) const {
    if (const auto* t = find(CatalogueKind::Param, contaminant_id, era)) return t->full_name;
    return std::nullopt;
}

CatalogueIndex CatalogueIndex::builtin() {
    CatalogueIndex index;
    index.add(parse_catalogue(embedded::param_catalogue_csv(), CatalogueKind::Param, "builtin:param.csv"));
    index.add(parse_catalogue(embedded::foodex_catalogue_csv(), CatalogueKind::MatrixFoodex, "builtin:matrix_foodex.csv"));
    index.add(parse_catalogue(embedded::foodex2_catalogue_csv(), CatalogueKind::MatrixFoodex2, "builtin:matrix_foodex2.csv"));
    index.add(parse_catalogue(embedded::country_catalogue_csv(), CatalogueKind::Country, "builtin:country.csv"));
    return index;
}

std::optional<RuleScope> parse_rule_scope(std::string_view s) noexcept {
    s = trim(s);
    if (iequals(s, "ALL")) return RuleScope::All;
    if (iequals(s, "CC")) return RuleScope::CC;
    if (iequals(s, "PEST")) return RuleScope::PEST;
    if (iequals(s, "VMPR")) return RuleScope::VMPR;
    return std::nullopt;
}

namespace {

bool scope_applies(RuleScope scope, HazardCategory hazard) noexcept {
    switch (scope) {
        case RuleScope::All: return true;
        case RuleScope::CC: return hazard == HazardCategory::ChemicalContaminants;
        case RuleScope::PEST: return hazard == HazardCategory::PesticideResidues;
        case RuleScope::VMPR: return hazard == HazardCategory::VMPR;
    }
    return false;
}

bool is_word_char(char c) noexcept { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Keyword occurrence delimited by non-alphanumeric characters on both sides,
// so "oat" does not fire inside "goat".
bool contains_keyword(std::string_view haystack, std::string_view keyword) noexcept {
    if (keyword.empty()) return false;
    for (auto pos = haystack.find(keyword); pos != std::string_view::npos; pos = haystack.find(keyword, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]) || !is_word_char(keyword.front());
        const auto end = pos + keyword.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]) || !is_word_char(keyword.back());
        if (left_ok && right_ok) return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> product_segments(std::string_view full_name) {
    std::vector<std::string> out;
    for (auto piece : split(full_name, "::")) {
        auto s = canonicalize_text(piece);
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

GroupingDictionary::GroupingDictionary(std::vector<GroupingRule> rules) : rules_(std::move(rules)) {
    std::stable_sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
    for (std::size_t i = 1; i < rules_.size(); ++i)
        if (rules_[i].order == rules_[i - 1].order)
            throw Error(ErrorCode::InvalidConfig, "grouping dictionary: duplicate order " + std::to_string(rules_[i].order));
    for (const auto& r : rules_) {
        if (canonicalize_text(r.pattern).empty() || trim(r.category).empty())
            throw Error(ErrorCode::InvalidConfig,
                        "grouping dictionary: empty pattern or category at order " + std::to_string(r.order));
        lowered_patterns_.push_back(canonicalize_text(r.pattern));
        const std::string category(trim(r.category));
        auto existing = std::find_if(categories_.begin(), categories_.end(),
                                     [&](const std::string& c) { return iequals(c, category); });
        if (existing == categories_.end()) {
            categories_.push_back(category);
            rule_category_.push_back(category);
        } else {
            rule_category_.push_back(*existing);
        }
    }
    auto others = std::find_if(categories_.begin(), categories_.end(),
                               [](const std::string& c) { return iequals(c, kOthersCategory); });
    if (others == categories_.end()) {
        categories_.emplace_back(kOthersCategory);
        others_ = std::string(kOthersCategory);
    } else {
        others_ = *others;
    }
}

GroupingDictionary GroupingDictionary::parse(std::string_view csv_text, std::string_view origin) {
    const auto table = parse_csv_text(csv_text, origin);
    const std::string where(origin);
    const std::vector<std::string> expected{"order", "pattern", "scope", "category"};
    if (table.header.size() != expected.size() ||
        !std::equal(expected.begin(), expected.end(), table.header.begin(),
                    [](const std::string& e, const std::string& h) { return e == trim(h); }))
        throw Error(ErrorCode::MalformedFile, where + ": expected header order,pattern,scope,category");
    std::vector<GroupingRule> rules;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto row_no = std::to_string(i < table.row_lines.size() ? table.row_lines[i] : i + 2);
        if (row.size() != 4) throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": expected 4 fields");
        const auto order = parse_integer(row[0]);
        const auto scope = parse_rule_scope(row[2]);
        if (!order) throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": order is not an integer");
        if (!scope) throw Error(ErrorCode::MalformedRow, where + " line " + row_no + ": unknown scope '" + row[2] + "'");
        rules.push_back({static_cast<int>(*order), row[1], *scope, row[3]});
    }
    return GroupingDictionary(std::move(rules));
}

GroupingDictionary GroupingDictionary::load(const std::filesystem::path& path) {
    return parse(read_text_file(path), path.string());
}

const GroupingDictionary& GroupingDictionary::builtin() {
    static const GroupingDictionary dict = parse(embedded::grouping_dictionary_csv(), "builtin:grouping_dictionary.csv");
    return dict;
}

const std::string& GroupingDictionary::assign(std::string_view full_name, HazardCategory hazard) const {
    const auto segments = product_segments(full_name);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        if (!scope_applies(rules_[r].scope, hazard)) continue;
        for (const auto& seg : segments)
            if (seg == lowered_patterns_[r]) return rule_category_[r];
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        if (!scope_applies(rules_[r].scope, hazard)) continue;
        for (const auto& seg : segments)
            if (contains_keyword(seg, lowered_patterns_[r])) return rule_category_[r];
    }
    return others_;
}

}  // namespace chefs
