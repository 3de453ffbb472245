// Independent reading of a generated corpus. Mirrors the documented ingest
// rules with string keys and std containers only.
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <zlib.h>

#include "chefs/embedded.hpp"
#include "chefs/error.hpp"
#include "chefs/synth.hpp"
#include "naive_csv.hpp"

namespace fs = std::filesystem;

namespace chefs::synth {
namespace {

using nlohmann::json;

bool space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string strip(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && space(s[a])) ++a;
    while (b > a && space(s[b - 1])) --b;
    return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string collapse(std::string_view s) {
    std::string out;
    bool gap = false;
    for (char c : strip(s)) {
        if (space(c)) {
            gap = true;
            continue;
        }
        if (gap) out += ' ';
        gap = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool missing(const std::string& raw) {
    const auto t = lower(strip(raw));
    return t.empty() || t == "na" || t == "n/a" || t == "null";
}

std::string slurp(const fs::path& p) {
    std::string out;
    gzFile gz = gzopen(p.string().c_str(), "rb");  // also reads plain files
    if (!gz) throw Error(ErrorCode::Io, "oracle: cannot open " + p.string());
    char buf[1 << 16];
    int got;
    while ((got = gzread(gz, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
    gzclose(gz);
    return out;
}

std::optional<std::string> maybe_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Vocabulary {
    std::map<std::string, std::string> level;  ///< schema name -> "sample" / "result"
    std::vector<std::string> names;
    struct Syn {
        std::string source, canonical, era;
    };
    std::vector<Syn> synonyms;

    Vocabulary() {
        const auto schema = json::parse(embedded::schema_json());
        for (const auto& v : schema.at("variables")) {
            names.push_back(v.at("name").get<std::string>());
            level[names.back()] = v.at("level").get<std::string>();
        }
        const auto rows = naive::read_csv(embedded::synonyms_csv());
        for (std::size_t i = 1; i < rows.size(); ++i)
            synonyms.push_back({strip(rows[i].at(0)), strip(rows[i].at(1)), rows[i].size() > 2 ? strip(rows[i][2]) : ""});
    }

    std::optional<std::string> resolve(const std::string& column, const std::string& era) const {
        if (level.contains(column)) return column;
        for (const auto& s : synonyms)
            if (s.source == column && s.era == era) return s.canonical;
        for (const auto& s : synonyms)
            if (s.source == column && s.era.empty()) return s.canonical;
        for (const auto& s : synonyms)
            if (lower(s.source) == lower(column) && (s.era.empty() || s.era == era)) return s.canonical;
        for (const auto& n : names)
            if (lower(n) == lower(column)) return n;
        return std::nullopt;
    }
};

/// id -> full name per era ("" for era-less).
struct Names {
    std::map<std::pair<std::string, std::string>, std::string> param, foodex, foodex2;

    static std::string tidy(const std::string& full) {
        std::string out;
        std::size_t start = 0;
        while (true) {
            const auto pos = full.find("::", start);
            const auto piece = strip(std::string_view(full).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            out += (out.empty() && start == 0 ? "" : "::") + piece;
            if (pos == std::string::npos) break;
            start = pos + 2;
        }
        return out;
    }

    static void load(std::map<std::pair<std::string, std::string>, std::string>& into, const std::string& text) {
        const auto rows = naive::read_csv(text);
        for (std::size_t i = 1; i < rows.size(); ++i)
            into[{strip(rows[i].at(0)), rows[i].size() > 2 ? strip(rows[i][2]) : ""}] = tidy(rows[i].at(1));
    }

    static std::optional<std::string> find(const std::map<std::pair<std::string, std::string>, std::string>& m,
                                           const std::string& id, const std::string& era) {
        if (auto it = m.find({id, era}); it != m.end()) return it->second;
        if (auto it = m.find({id, ""}); it != m.end()) return it->second;
        return std::nullopt;
    }

    std::optional<std::string> product(const std::string& id, const std::string& era) const {
        const auto& own = era == "SSD1" ? foodex : foodex2;
        const auto& other = era == "SSD1" ? foodex2 : foodex;
        if (auto n = find(own, id, era)) return n;
        return find(other, id, era == "SSD1" ? "SSD2" : "SSD1");
    }
    std::optional<std::string> contaminant(const std::string& id, const std::string& era) const {
        return find(param, id, era);
    }
};

std::optional<int> integer(const std::string& raw) {
    const auto t = strip(raw);
    if (t.empty()) return std::nullopt;
    std::size_t i = t[0] == '-' || t[0] == '+' ? 1 : 0;
    if (i == t.size()) return std::nullopt;
    for (std::size_t k = i; k < t.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(t[k]))) return std::nullopt;
    if (t.size() - i > 9) return std::nullopt;
    const int v = std::stoi(t.substr(i));
    return t[0] == '-' ? -v : v;
}

std::optional<int> date_year(const std::string& raw) {
    const auto t = strip(raw);
    if (t.size() < 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
    if (t.size() > 10 && t[10] != 'T' && t[10] != ' ') return std::nullopt;
    const auto y = integer(t.substr(0, 4)), m = integer(t.substr(5, 2)), d = integer(t.substr(8, 2));
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1) return std::nullopt;
    const int days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (*d > days[*m - 1]) return std::nullopt;
    const bool leap = (*y % 4 == 0 && *y % 100 != 0) || *y % 400 == 0;
    if (*m == 2 && *d == 29 && !leap) return std::nullopt;
    return y;
}

SamplingStrategy strategy_of(const std::optional<std::string>& raw) {
    if (!raw) return SamplingStrategy::NotSpecified;
    static const std::map<std::string, SamplingStrategy> table{
        {"objective sampling", SamplingStrategy::Objective},   {"objective", SamplingStrategy::Objective},
        {"st10a", SamplingStrategy::Objective},                {"selective sampling", SamplingStrategy::Selective},
        {"selective", SamplingStrategy::Selective},            {"st20a", SamplingStrategy::Selective},
        {"suspect sampling", SamplingStrategy::Suspect},       {"suspect", SamplingStrategy::Suspect},
        {"st30a", SamplingStrategy::Suspect},                  {"convenient sampling", SamplingStrategy::Convenient},
        {"convenient", SamplingStrategy::Convenient},          {"st40a", SamplingStrategy::Convenient},
        {"census", SamplingStrategy::Other},                   {"st50a", SamplingStrategy::Other},
        {"other", SamplingStrategy::Other},                    {"st90a", SamplingStrategy::Other},
        {"not specified", SamplingStrategy::NotSpecified},     {"st00a", SamplingStrategy::NotSpecified},
    };
    const auto it = table.find(collapse(*raw));
    return it == table.end() ? SamplingStrategy::NotSpecified : it->second;
}

std::string origin_of(const std::optional<std::string>& raw) {
    if (!raw) return "UNKNOWN";
    const auto t = strip(*raw);
    const auto u = lower(t);
    if (t.empty() || u == "xx" || u == "unknown") return "UNKNOWN";
    return t;
}

struct DataFile {
    fs::path path;
    std::string rel;
    HazardCategory hazard;
    std::string country;
    int year;
    std::string era;
};

std::optional<DataFile> describe(const fs::path& path, const fs::path& root) {
    std::string name = path.filename().string();
    std::string stem;
    if (name.size() > 7 && name.ends_with(".csv.gz")) stem = name.substr(0, name.size() - 7);
    else if (name.size() > 4 && name.ends_with(".csv")) stem = name.substr(0, name.size() - 4);
    else return std::nullopt;
    DataFile f{path, path.lexically_relative(root).generic_string(), HazardCategory::ChemicalContaminants, "", 0, ""};
    bool have_hazard = false, have_country = false, have_year = false;
    std::vector<std::string> parts;
    std::stringstream ss(stem);
    for (std::string p; std::getline(ss, p, '_');) parts.push_back(p);
    if (stem.ends_with("_")) parts.emplace_back();
    const std::map<std::string, HazardCategory> codes{{"CC", HazardCategory::ChemicalContaminants},
                                                      {"PEST", HazardCategory::PesticideResidues},
                                                      {"VMPR", HazardCategory::VMPR}};
    auto country_ok = [](const std::string& c) {
        return c.size() >= 2 && c.size() <= 3 && std::all_of(c.begin(), c.end(), [](char x) { return x >= 'A' && x <= 'Z'; });
    };
    const bool parsed = parts.size() >= 3 && codes.contains(parts[0]) && country_ok(parts[1]) && parts[2].size() == 4 &&
                        integer(parts[2]) && *integer(parts[2]) >= 1900 && *integer(parts[2]) <= 2100 &&
                        std::none_of(parts.begin() + 3, parts.end(), [](const std::string& p) { return p.empty(); });
    if (parsed) {
        f.hazard = codes.at(parts[0]);
        f.country = parts[1];
        f.year = *integer(parts[2]);
        have_hazard = have_country = have_year = true;
    }
    if (const auto meta_text = maybe_file(path.string() + ".meta.json")) {
        try {
            const auto meta = json::parse(*meta_text);
            if (meta.contains("hazard")) {
                const auto h = meta.at("hazard").get<std::string>();
                std::string up = h;
                for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                if (!codes.contains(up)) return std::nullopt;
                f.hazard = codes.at(up);
                have_hazard = true;
            }
            if (meta.contains("country")) {
                f.country = meta.at("country").get<std::string>();
                have_country = true;
            }
            if (meta.contains("year")) {
                f.year = meta.at("year").get<int>();
                have_year = true;
            }
            if (meta.contains("era")) {
                const auto e = meta.at("era").get<std::string>();
                std::string up = e;
                for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                if (up != "SSD1" && up != "SSD2") return std::nullopt;
                f.era = up;
            }
        } catch (const json::exception&) {
            return std::nullopt;
        }
    }
    if (!have_hazard || !have_country || !have_year || !country_ok(f.country) || f.year < 1900 || f.year > 2100)
        return std::nullopt;
    if (f.era.empty()) f.era = f.year >= 2015 ? "SSD2" : "SSD1";
    return f;
}

using Opt = std::optional<std::string>;

}  // namespace

Truth oracle_parse(const fs::path& corpus_root) {
    const fs::path data = corpus_data_dir(corpus_root);
    const Vocabulary vocab;
    Names names;
    const fs::path cat = corpus_root / "catalogues";
    Names::load(names.param, maybe_file(cat / "param.csv").value_or(std::string(embedded::param_catalogue_csv())));
    Names::load(names.foodex, maybe_file(cat / "matrix_foodex.csv").value_or(std::string(embedded::foodex_catalogue_csv())));
    Names::load(names.foodex2,
                maybe_file(cat / "matrix_foodex2.csv").value_or(std::string(embedded::foodex2_catalogue_csv())));

    std::vector<DataFile> files;
    for (const auto& e : fs::recursive_directory_iterator(data))
        if (e.is_regular_file() && !e.path().filename().string().ends_with(".meta.json"))
            if (auto f = describe(e.path(), data)) files.push_back(std::move(*f));
    std::sort(files.begin(), files.end(), [](const DataFile& a, const DataFile& b) { return a.rel < b.rel; });
    std::stable_sort(files.begin(), files.end(), [](const DataFile& a, const DataFile& b) {
        return std::tie(a.hazard, a.country, a.year) < std::tie(b.hazard, b.country, b.year);
    });

    Truth truth;
    std::unordered_set<std::string> seen_results;
    std::unordered_map<std::string, std::size_t> sample_index;
    for (const auto& f : files) {
        const auto rows = naive::read_csv(slurp(f.path));
        TruthFile tf;
        tf.relative_path = f.rel;
        tf.hazard = f.hazard;
        tf.country = f.country;
        tf.year = f.year;
        if (rows.empty()) continue;

        const auto& header = rows[0];
        std::map<std::string, std::size_t> col;       // canonical -> index
        std::vector<std::pair<std::string, std::size_t>> counted;
        std::vector<std::size_t> signature_cols;
        std::map<std::string, std::string> claimed;  // target -> source column
        for (std::size_t i = 0; i < header.size(); ++i) {
            std::string name = strip(header[i]);
            if (name.empty()) name = "column_" + std::to_string(i + 1);
            static const std::set<std::string> reserved{"_derived", "_source_file", "_source_row", "sample_id", "result_id"};
            if (reserved.contains(name))
                throw Error(ErrorCode::SchemaConflict, f.rel + ": source column '" + name + "' uses a reserved name");
            const auto canonical = vocab.resolve(name, f.era);
            const std::string target = canonical.value_or(name);
            if (auto [it, fresh] = claimed.emplace(target, name); !fresh)
                throw Error(ErrorCode::SchemaConflict,
                            f.rel + ": columns '" + it->second + "' and '" + name + "' both resolve to '" + target + "'");
            if (canonical) {
                col[*canonical] = i;
                counted.emplace_back(*canonical, i);
                if (vocab.level.at(*canonical) == "sample") signature_cols.push_back(i);
            } else {
                counted.emplace_back(name, i);
            }
        }
        std::sort(signature_cols.begin(), signature_cols.end());
        auto cell = [&](const std::vector<std::string>& r, const char* name) -> Opt {
            const auto it = col.find(name);
            if (it == col.end() || missing(r[it->second])) return std::nullopt;
            return r[it->second];
        };

        std::map<std::string, std::uint64_t> non_empty;
        std::map<std::string, TruthSample> first_row;  // sample key -> attributes from its first row here
        std::string previous_signature;
        bool have_previous = false;
        long long ordinal = 0;
        for (std::size_t ri = 1; ri < rows.size(); ++ri) {
            const auto& r = rows[ri];
            ++tf.rows_read;
            if (r.size() != header.size()) {
                ++tf.rows_malformed;
                continue;
            }
            for (const auto& [name, i] : counted)
                if (!missing(r[i])) ++non_empty[name];

            const Opt product = cell(r, "product_id"), contaminant = cell(r, "contaminant_id");
            if (!product || !contaminant) {
                ++tf.rows_malformed;
                continue;
            }
            std::optional<int> year;
            if (const Opt y = cell(r, "sampling_year")) {
                year = integer(*y);
                if (!year || *year < 1900 || *year > 2100) {
                    ++tf.rows_malformed;
                    continue;
                }
            }
            const Opt date = cell(r, "sampling_date");
            if (!year && date) year = date_year(*date);
            if (year && (*year < 1900 || *year > 2100)) {
                ++tf.rows_malformed;
                continue;
            }

            std::string signature;
            for (auto i : signature_cols) signature += (missing(r[i]) ? std::string("\x01") : "=" + r[i]) + '\x02';
            if (!have_previous || signature != previous_signature) {
                ++ordinal;
                previous_signature = signature;
                have_previous = true;
            }

            const Opt code = cell(r, "sample_code");
            const Opt country = cell(r, "sampling_country");
            const std::string sampling_country = country ? *country : f.country;
            const Opt strategy = cell(r, "strategy");
            std::string key;
            if (code) {
                key = "code|" + *code;
            } else {
                json tuple = json::array({sampling_country, year ? json(*year) : json(), *product,
                                          date ? json(*date) : json(), strategy ? json(*strategy) : json(), f.rel, ordinal});
                key = "tuple|" + tuple.dump();
            }

            TruthSample s;
            s.product_id = *product;
            s.product_full_name = cell(r, "product_full_name");
            if (!s.product_full_name) s.product_full_name = names.product(*product, f.era);
            s.origin = origin_of(cell(r, "origin_country"));
            s.sampling_country = sampling_country;
            s.year = year.value_or(0);
            s.strategy = strategy_of(strategy);
            first_row.try_emplace(key, s);

            auto field = [](const Opt& o) { return o ? json(*o) : json(); };
            const std::string result_key =
                json::array({key, *contaminant, field(cell(r, "analysis_date")), field(cell(r, "result_value")),
                             field(cell(r, "loq")), field(cell(r, "eval_code"))})
                    .dump();
            if (!seen_results.insert(result_key).second) {
                ++tf.duplicates;
                continue;
            }
            auto [it, fresh] = sample_index.try_emplace(key, truth.samples.size());
            if (fresh) truth.samples.push_back(first_row.at(key));

            TruthResult tr;
            tr.sample = it->second;
            tr.contaminant_id = *contaminant;
            tr.contaminant_full_name = cell(r, "contaminant_full_name");
            if (!tr.contaminant_full_name) tr.contaminant_full_name = names.contaminant(*contaminant, f.era);
            tr.eval_code = collapse(cell(r, "eval_code").value_or(""));
            tr.hazard = f.hazard;
            truth.results.push_back(std::move(tr));
            ++tf.results;
        }
        tf.non_empty_cells = std::move(non_empty);
        truth.files.push_back(std::move(tf));
    }
    std::sort(truth.files.begin(), truth.files.end(),
              [](const TruthFile& a, const TruthFile& b) { return a.relative_path < b.relative_path; });
    return truth;
}

}  // namespace chefs::synth
