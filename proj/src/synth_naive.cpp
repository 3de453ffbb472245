// Reference aggregation over truth records. Written against plain std
// containers on purpose; it must not reuse the analytics code paths.
#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "chefs/embedded.hpp"
#include "chefs/error.hpp"
#include "chefs/synth.hpp"
#include "naive_csv.hpp"

namespace chefs::synth {
namespace {

using nlohmann::json;

const char* const kHazardCodes[] = {"CC", "PEST", "VMPR"};
const char* const kClassNames[] = {"NonCompliant", "Compliant", "NotEvaluated", "NotDetected", "OtherKnown", "Unknown"};
const char* const kStrategyNames[] = {"objective sampling", "selective sampling", "suspect sampling",
                                      "convenient sampling", "other", "not specified"};

int hz(HazardCategory h) { return static_cast<int>(h); }

bool space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && space(s[a])) ++a;
    while (b > a && space(s[b - 1])) --b;
    return s.substr(a, b - a);
}

std::string canon(const std::string& s) {
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

int eval_class(const std::string& canonical) {
    static const std::map<std::string, int> table{
        {"greater than max permissible quantities", 0},
        {"greater than maximum permissible quantities", 0},
        {"non-compliant", 0},
        {"detected", 0},
        {"unsatisfactory", 0},
        {"less than or equal to max permissible quantities", 1},
        {"less than or equal to maximum permissible quantities", 1},
        {"compliant", 1},
        {"compliant due to measurement uncertainty", 1},
        {"result not evaluated", 2},
        {"not detected", 3},
        {"acceptable", 4},
        {"satisfactory", 4},
    };
    const auto it = table.find(canonical);
    return it == table.end() ? 5 : it->second;
}

std::vector<std::string> split_path(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find("::", start);
        parts.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 2;
    }
    return parts;
}

/// Trimmed segments, or nothing when the name is blank or has an empty segment.
std::optional<std::vector<std::string>> segments(const std::optional<std::string>& full) {
    if (!full || strip(*full).empty()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& p : split_path(*full)) {
        const auto t = strip(p);
        if (t.empty()) return std::nullopt;
        out.push_back(t);
    }
    return out;
}

std::string display(const std::string& id, const std::optional<std::string>& full) {
    if (!full) return id;
    const auto seg = segments(full);
    return seg ? seg->back() : *full;
}

double ratio(std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }
Cell n(std::uint64_t v) { return static_cast<std::int64_t>(v); }

struct Dictionary {
    struct Rule {
        int order;
        std::string pattern;
        int scope;  ///< -1 for every hazard
        std::string category;
    };
    std::vector<Rule> rules;
    std::vector<std::string> categories;
    std::string others = "Others";

    static std::string lower(std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    explicit Dictionary(std::string_view text) {
        auto rows = naive::read_csv(text);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            Rule rule;
            rule.order = std::stoi(strip(r.at(0)));
            rule.pattern = canon(r.at(1));
            const auto scope = lower(strip(r.at(2)));
            rule.scope = scope == "cc" ? 0 : scope == "pest" ? 1 : scope == "vmpr" ? 2 : -1;
            const auto category = strip(r.at(3));
            const auto existing = std::find_if(categories.begin(), categories.end(),
                                               [&](const std::string& c) { return lower(c) == lower(category); });
            if (existing == categories.end()) {
                categories.push_back(category);
                rule.category = category;
            } else {
                rule.category = *existing;
            }
            rules.push_back(rule);
        }
        std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.order < b.order; });
        const auto o = std::find_if(categories.begin(), categories.end(),
                                    [](const std::string& c) { return lower(c) == "others"; });
        if (o == categories.end()) categories.push_back(others);
        else others = *o;
    }

    static bool word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

    static bool keyword_in(const std::string& hay, const std::string& key) {
        for (std::size_t pos = hay.find(key); pos != std::string::npos; pos = hay.find(key, pos + 1)) {
            const std::size_t end = pos + key.size();
            const bool left = pos == 0 || !word(hay[pos - 1]) || !word(key.front());
            const bool right = end == hay.size() || !word(hay[end]) || !word(key.back());
            if (left && right) return true;
        }
        return false;
    }

    std::string assign(const std::optional<std::string>& full, int hazard) const {
        std::vector<std::string> segs;
        if (full)
            for (const auto& p : split_path(*full))
                if (auto c = canon(p); !c.empty()) segs.push_back(c);
        for (const auto& r : rules)
            if (r.scope < 0 || r.scope == hazard)
                for (const auto& s : segs)
                    if (s == r.pattern) return r.category;
        for (const auto& r : rules)
            if (r.scope < 0 || r.scope == hazard)
                for (const auto& s : segs)
                    if (keyword_in(s, r.pattern)) return r.category;
        return others;
    }
};

struct Tally {
    std::uint64_t total = 0, nc = 0;
    void add(bool bad) {
        ++total;
        if (bad) ++nc;
    }
};

/// Everything the reports look up per record, precomputed once.
struct View {
    const Truth& truth;
    std::vector<bool> result_nc;
    std::vector<std::string> result_eval;
    std::map<std::string, std::optional<std::string>> product_name, contaminant_name;

    explicit View(const Truth& t) : truth(t) {
        auto keep = [](std::map<std::string, std::optional<std::string>>& m, const std::string& id,
                       const std::optional<std::string>& name) {
            auto& slot = m[id];
            if (name && (!slot || *name < *slot)) slot = name;
        };
        for (const auto& s : t.samples) keep(product_name, s.product_id, s.product_full_name);
        for (const auto& r : t.results) {
            keep(contaminant_name, r.contaminant_id, r.contaminant_full_name);
            result_eval.push_back(canon(r.eval_code));
            result_nc.push_back(eval_class(result_eval.back()) == 0);
        }
    }
    const TruthSample& sample_of(std::size_t r) const { return truth.samples[truth.results[r].sample]; }
};

class Args {
public:
    explicit Args(const ReportRequest& r) : p_(r.params.is_null() ? json::object() : r.params) {}
    std::vector<int> hazards() const {
        if (p_.contains("hazard") && p_.at("hazard").is_string()) {
            const auto s = Dictionary::lower(p_.at("hazard").get<std::string>());
            for (int h = 0; h < 3; ++h)
                if (Dictionary::lower(kHazardCodes[h]) == s) return {h};
            throw Error(ErrorCode::InvalidConfig, "naive: bad hazard");
        }
        return {0, 1, 2};
    }
    bool hazard_filtered() const { return p_.contains("hazard") && p_.at("hazard").is_string(); }
    long long get(const char* key, long long fallback) const {
        return p_.contains(key) && p_.at(key).is_number_integer() ? p_.at(key).get<long long>() : fallback;
    }
    std::optional<std::string> text(const char* key) const {
        if (p_.contains(key) && p_.at(key).is_string()) return p_.at(key).get<std::string>();
        return std::nullopt;
    }

private:
    json p_;
};

template <typename K>
std::vector<std::pair<K, Tally>> ranked(const std::map<K, Tally>& m, long long limit) {
    std::vector<std::pair<K, Tally>> v(m.begin(), m.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second.total > b.second.total; });
    if (limit > 0 && v.size() > static_cast<std::size_t>(limit)) v.resize(static_cast<std::size_t>(limit));
    return v;
}

AggregateReport yearly(const View& v, const Args& a) {
    AggregateReport rep;
    auto& t = rep.add_table("yearly_trend", {"year", "hazard", "total_results", "noncompliant_results", "pct_noncompliant"});
    const auto hs = a.hazards();
    const long long from = a.get("from", 2000), to = a.get("to", 2024);
    std::map<std::pair<int, int>, Tally> m;
    for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
        const int y = v.sample_of(i).year;
        const int h = hz(v.truth.results[i].hazard);
        if (y == 0 || y < from || y > to || std::find(hs.begin(), hs.end(), h) == hs.end()) continue;
        m[{y, h}].add(v.result_nc[i]);
    }
    for (const auto& [k, c] : m) t.rows.push_back({std::int64_t{k.first}, std::string(kHazardCodes[k.second]), n(c.total), n(c.nc), ratio(c.nc, c.total)});
    return rep;
}

AggregateReport top(const View& v, const Args& a) {
    AggregateReport rep;
    auto& t = rep.add_table("top_contaminants", {"hazard", "rank", "contaminant_id", "contaminant_name", "total_results",
                                                 "share", "noncompliant_results", "pct_noncompliant"});
    for (int h : a.hazards()) {
        std::map<std::string, Tally> m;
        std::uint64_t all = 0;
        for (std::size_t i = 0; i < v.truth.results.size(); ++i)
            if (hz(v.truth.results[i].hazard) == h) {
                m[v.truth.results[i].contaminant_id].add(v.result_nc[i]);
                ++all;
            }
        std::int64_t rank = 0;
        for (const auto& [id, c] : ranked(m, a.get("n", 10)))
            t.rows.push_back({std::string(kHazardCodes[h]), ++rank, id, display(id, v.contaminant_name.at(id)), n(c.total),
                              ratio(c.total, all), n(c.nc), ratio(c.nc, c.total)});
    }
    return rep;
}

AggregateReport cross(const View& v, const Args& a, bool contaminant_outer) {
    AggregateReport rep;
    auto& t = contaminant_outer
                  ? rep.add_table("hazard_product_table",
                                  {"hazard", "outer_rank", "contaminant_id", "contaminant_name", "contaminant_total",
                                   "inner_rank", "product_id", "product_name", "total_results", "noncompliant_results",
                                   "noncompliance_ratio"})
                  : rep.add_table("product_hazard_table",
                                  {"hazard", "outer_rank", "product_id", "product_name", "product_total", "inner_rank",
                                   "contaminant_id", "contaminant_name", "total_results", "noncompliant_results",
                                   "noncompliance_ratio"});
    const long long n_outer = a.get(contaminant_outer ? "top_hazards" : "top_products", 3);
    const long long n_inner = a.get(contaminant_outer ? "top_products" : "top_hazards", 3);
    const auto& outer_names = contaminant_outer ? v.contaminant_name : v.product_name;
    const auto& inner_names = contaminant_outer ? v.product_name : v.contaminant_name;
    for (int h : a.hazards()) {
        std::map<std::string, std::map<std::string, Tally>> m;
        std::map<std::string, Tally> outer;
        for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
            const auto& r = v.truth.results[i];
            if (hz(r.hazard) != h) continue;
            const auto& product = v.sample_of(i).product_id;
            const auto& o = contaminant_outer ? r.contaminant_id : product;
            const auto& in = contaminant_outer ? product : r.contaminant_id;
            m[o][in].add(v.result_nc[i]);
            outer[o].add(v.result_nc[i]);
        }
        std::int64_t oi = 0;
        for (const auto& [o, oc] : ranked(outer, n_outer)) {
            ++oi;
            std::int64_t ii = 0;
            for (const auto& [in, c] : ranked(m[o], n_inner))
                t.rows.push_back({std::string(kHazardCodes[h]), oi, o, display(o, outer_names.at(o)), n(oc.total), ++ii,
                                  in, display(in, inner_names.at(in)), n(c.total), n(c.nc), ratio(c.nc, c.total)});
        }
    }
    return rep;
}

AggregateReport ontology(const View& v, const Args& a) {
    AggregateReport rep;
    auto& t = rep.add_table("ontology_group_stats", {"hazard", "group", "truncated", "total_results",
                                                     "noncompliant_results", "pct_noncompliant", "contaminant_ids"});
    const auto level = static_cast<std::size_t>(a.get("level", 1));
    const auto parent = a.text("parent");
    for (int h : a.hazards()) {
        std::map<std::pair<std::string, bool>, Tally> m;
        std::map<std::pair<std::string, bool>, std::set<std::string>> ids;
        for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
            const auto& r = v.truth.results[i];
            if (hz(r.hazard) != h) continue;
            const auto seg = segments(v.contaminant_name.at(r.contaminant_id));
            std::pair<std::string, bool> key{"unparsed", false};
            if (seg) {
                if (parent && seg->front() != *parent) continue;
                key = level <= seg->size() ? std::pair{(*seg)[level - 1], false} : std::pair{seg->back(), true};
            } else if (parent) {
                continue;
            }
            m[key].add(v.result_nc[i]);
            ids[key].insert(r.contaminant_id);
        }
        for (const auto& [k, c] : ranked(m, 0))
            t.rows.push_back({std::string(kHazardCodes[h]), k.first, std::int64_t{k.second ? 1 : 0}, n(c.total), n(c.nc),
                              ratio(c.nc, c.total), n(ids[k].size())});
    }
    return rep;
}

AggregateReport categories(const View& v, const Args& a, const Dictionary& dict) {
    AggregateReport rep;
    auto& t = rep.add_table("product_category_stats", {"hazard", "rank", "category", "total_results", "share",
                                                       "noncompliant_results", "pct_noncompliant"});
    for (int h : a.hazards()) {
        std::map<std::string, Tally> m;
        std::uint64_t all = 0;
        for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
            if (hz(v.truth.results[i].hazard) != h) continue;
            m[dict.assign(v.product_name.at(v.sample_of(i).product_id), h)].add(v.result_nc[i]);
            ++all;
        }
        std::int64_t rank = 0;
        for (const auto& [cat, c] : ranked(m, a.get("top", 10)))
            t.rows.push_back({std::string(kHazardCodes[h]), ++rank, cat, n(c.total), ratio(c.total, all), n(c.nc),
                              ratio(c.nc, c.total)});
    }
    return rep;
}

AggregateReport countries(const View& v, const Args& a) {
    std::map<std::string, Tally> all;
    std::map<std::string, std::array<Tally, 3>> per;
    for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
        const auto& c = v.sample_of(i).sampling_country;
        all[c].add(v.result_nc[i]);
        per[c][hz(v.truth.results[i].hazard)].add(v.result_nc[i]);
    }
    AggregateReport rep;
    auto& t = rep.add_table("country_stats",
                            {"rank", "country", "total_results", "share", "noncompliant_results", "pct_noncompliant",
                             "cc_results", "cc_noncompliant", "pest_results", "pest_noncompliant", "vmpr_results",
                             "vmpr_noncompliant"});
    std::int64_t rank = 0;
    const auto grand = v.truth.results.size();
    for (const auto& [c, x] : ranked(all, a.get("top_n", 15))) {
        const auto& p = per[c];
        t.rows.push_back({++rank, c, n(x.total), ratio(x.total, grand), n(x.nc), ratio(x.nc, x.total), n(p[0].total),
                          n(p[0].nc), n(p[1].total), n(p[1].nc), n(p[2].total), n(p[2].nc)});
    }
    return rep;
}

std::vector<std::set<int>> sample_hazards(const Truth& truth) {
    std::vector<std::set<int>> out(truth.samples.size());
    for (const auto& r : truth.results) out[r.sample].insert(hz(r.hazard));
    return out;
}

AggregateReport strategies(const View& v, const Args& a) {
    const auto mode = a.text("group_by").value_or("overall");
    // group: (country, number) where number is a year or a hazard
    using Group = std::pair<std::string, long long>;
    std::map<Group, std::map<int, std::pair<std::uint64_t, Tally>>> g;
    const auto hazards = sample_hazards(v.truth);
    for (std::size_t s = 0; s < v.truth.samples.size(); ++s) {
        const auto& x = v.truth.samples[s];
        const int st = static_cast<int>(x.strategy);
        if (mode == "overall") ++g[{"", 0}][st].first;
        else if (mode == "year") {
            if (x.year) ++g[{"", x.year}][st].first;
        } else {
            for (int h : hazards[s]) ++g[{x.sampling_country, h}][st].first;
        }
    }
    for (std::size_t i = 0; i < v.truth.results.size(); ++i) {
        const auto& x = v.sample_of(i);
        const int st = static_cast<int>(x.strategy);
        if (mode == "overall") g[{"", 0}][st].second.add(v.result_nc[i]);
        else if (mode == "year") {
            if (x.year) g[{"", x.year}][st].second.add(v.result_nc[i]);
        } else {
            g[{x.sampling_country, hz(v.truth.results[i].hazard)}][st].second.add(v.result_nc[i]);
        }
    }
    std::vector<std::string> cols;
    if (mode == "year") cols = {"year"};
    if (mode == "country_hazard") cols = {"country", "hazard"};
    for (const char* c : {"strategy", "samples", "sample_pct", "results", "noncompliant_results", "pct_noncompliant"})
        cols.emplace_back(c);
    AggregateReport rep;
    auto& t = rep.add_table("sampling_strategy_breakdown", cols);
    for (const auto& [key, by] : g) {
        std::uint64_t group_samples = 0;
        for (const auto& [st, x] : by) group_samples += x.first;
        for (const auto& [st, x] : by) {
            std::vector<Cell> row;
            if (mode == "year") row.push_back(std::int64_t{key.second});
            if (mode == "country_hazard") {
                row.push_back(key.first);
                row.push_back(std::string(kHazardCodes[key.second]));
            }
            row.push_back(std::string(kStrategyNames[st]));
            row.push_back(n(x.first));
            row.push_back(ratio(x.first, group_samples));
            row.push_back(n(x.second.total));
            row.push_back(n(x.second.nc));
            row.push_back(ratio(x.second.nc, x.second.total));
            t.rows.push_back(std::move(row));
        }
    }
    return rep;
}

std::string origin_of(const std::string& raw) {
    const auto t = strip(raw);
    const auto up = [&] {
        std::string s = t;
        for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return s;
    }();
    if (t.empty() || up == "XX" || up == "UNKNOWN") return "UNKNOWN";
    return t;
}

AggregateReport trade(const View& v, const Args& a) {
    std::vector<bool> sample_nc(v.truth.samples.size(), false);
    for (std::size_t i = 0; i < v.truth.results.size(); ++i)
        if (v.result_nc[i]) sample_nc[v.truth.results[i].sample] = true;
    const long long from = a.get("from", 2000), to = a.get("to", 2024);
    std::map<std::pair<std::string, std::string>, Tally> m;
    for (std::size_t s = 0; s < v.truth.samples.size(); ++s) {
        const auto& x = v.truth.samples[s];
        const auto o = origin_of(x.origin);
        if (x.year == 0 || x.year < from || x.year > to || o == x.sampling_country) continue;
        m[{o, x.sampling_country}].add(sample_nc[s]);
    }
    const auto min_samples = static_cast<std::uint64_t>(a.get("min_samples", 100));
    std::vector<std::pair<std::pair<std::string, std::string>, Tally>> links;
    for (const auto& e : m)
        if (e.second.total > min_samples) links.push_back(e);
    // ties keep the (origin, destination) order of the map
    std::stable_sort(links.begin(), links.end(), [](const auto& x, const auto& y) {
        const auto lhs = x.second.nc * y.second.total, rhs = y.second.nc * x.second.total;
        if (lhs != rhs) return lhs > rhs;
        return x.second.total > y.second.total;
    });
    const long long limit = a.get("top", 20);
    if (limit > 0 && links.size() > static_cast<std::size_t>(limit)) links.resize(static_cast<std::size_t>(limit));
    AggregateReport rep;
    auto& t = rep.add_table("trade_links", {"rank", "origin", "destination", "samples", "noncompliant", "pct"});
    auto& e = rep.add_table("edges", {"origin", "destination", "samples", "noncompliant", "pct"});
    std::int64_t rank = 0;
    for (const auto& [k, c] : links) {
        t.rows.push_back({++rank, k.first, k.second, n(c.total), n(c.nc), ratio(c.nc, c.total)});
        e.rows.push_back({k.first, k.second, n(c.total), n(c.nc), ratio(c.nc, c.total)});
    }
    return rep;
}

AggregateReport unknown_origin(const View& v) {
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> m;
    for (const auto& s : v.truth.samples) {
        if (!s.year) continue;
        ++m[s.year].first;
        if (origin_of(s.origin) == "UNKNOWN") ++m[s.year].second;
    }
    AggregateReport rep;
    auto& t = rep.add_table("unknown_origin_trend", {"year", "total_samples", "unknown_samples", "pct_unknown"});
    for (const auto& [y, c] : m) t.rows.push_back({std::int64_t{y}, n(c.first), n(c.second), ratio(c.second, c.first)});
    return rep;
}

AggregateReport per_sample(const View& v) {
    std::vector<std::uint64_t> count(v.truth.samples.size(), 0);
    std::array<std::uint64_t, 3> results{};
    for (const auto& r : v.truth.results) {
        ++count[r.sample];
        ++results[hz(r.hazard)];
    }
    std::map<std::uint64_t, std::uint64_t> hist;
    for (auto c : count) ++hist[c];
    std::array<std::uint64_t, 3> samples{};
    for (const auto& hs : sample_hazards(v.truth))
        for (int h : hs) ++samples[h];
    AggregateReport rep;
    auto& t = rep.add_table("histogram", {"results_per_sample", "samples"});
    for (const auto& [k, c] : hist) t.rows.push_back({n(k), n(c)});
    auto& p = rep.add_table("per_hazard", {"hazard", "results", "samples", "mean_results_per_sample", "result_share",
                                           "sample_share"});
    for (int h = 0; h < 3; ++h)
        if (results[h])
            p.rows.push_back({std::string(kHazardCodes[h]), n(results[h]), n(samples[h]), ratio(results[h], samples[h]),
                              ratio(results[h], v.truth.results.size()), ratio(samples[h], v.truth.samples.size())});
    return rep;
}

AggregateReport overlap(const View& v) {
    std::map<std::string, std::set<int>> m;
    for (const auto& r : v.truth.results) m[r.contaminant_id].insert(hz(r.hazard));
    auto count_if = [&](auto pred) {
        std::uint64_t c = 0;
        for (const auto& [id, s] : m)
            if (pred(s)) ++c;
        return c;
    };
    AggregateReport rep;
    auto& card = rep.add_table("cardinality", {"categories", "contaminant_ids", "share"});
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto c = count_if([&](const std::set<int>& s) { return s.size() == k; });
        card.rows.push_back({static_cast<std::int64_t>(k), n(c), ratio(c, m.size())});
    }
    const std::vector<std::set<int>> regions{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
    auto label = [](const std::set<int>& s) {
        std::string out;
        for (int h : s) out += (out.empty() ? "" : "+") + std::string(kHazardCodes[h]);
        return out;
    };
    auto& reg = rep.add_table("regions", {"region", "contaminant_ids"});
    for (const auto& r : regions) reg.rows.push_back({label(r), n(count_if([&](const std::set<int>& s) { return s == r; }))});
    auto& pair = rep.add_table("pairwise", {"pair", "contaminant_ids"});
    for (std::size_t i = 3; i < 6; ++i)
        pair.rows.push_back({label(regions[i]), n(count_if([&](const std::set<int>& s) {
                                 return std::includes(s.begin(), s.end(), regions[i].begin(), regions[i].end());
                             }))});
    std::uint64_t total = 0;
    for (const auto& [id, s] : m) total += s.size();
    auto& sum = rep.add_table("summary", {"unique_ids", "total_ids"});
    sum.rows.push_back({n(m.size()), n(total)});
    return rep;
}

AggregateReport evaluations(const View& v) {
    std::map<std::string, Tally> m;
    for (std::size_t i = 0; i < v.truth.results.size(); ++i) m[v.result_eval[i]].add(v.result_nc[i]);
    const auto total = v.truth.results.size();
    AggregateReport rep;
    auto& t = rep.add_table("evaluation_summary", {"eval_code", "class", "results", "share"});
    std::array<std::uint64_t, 6> cls{};
    for (const auto& [code, c] : ranked(m, 0)) {
        const int k = eval_class(code);
        cls[k] += c.total;
        t.rows.push_back({code, std::string(kClassNames[k]), n(c.total), ratio(c.total, total)});
    }
    auto& c = rep.add_table("classes", {"class", "results", "share"});
    for (int k = 0; k < 6; ++k) c.rows.push_back({std::string(kClassNames[k]), n(cls[k]), ratio(cls[k], total)});
    return rep;
}

AggregateReport sparsity(const View& v) {
    std::vector<std::string> vars;
    const auto schema = json::parse(embedded::schema_json());
    for (const auto& x : schema.at("variables")) vars.push_back(x.at("name").get<std::string>());
    auto files = v.truth.files;
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.relative_path < b.relative_path; });
    AggregateReport rep;
    auto& t = rep.add_table("sparsity", {"file", "hazard", "country", "year", "rows", "variable", "missing_rate"});
    for (const auto& f : files)
        for (const auto& var : vars) {
            const auto it = f.non_empty_cells.find(var);
            double rate = 1.0;
            if (f.rows_read && it != f.non_empty_cells.end())
                rate = 1.0 - static_cast<double>(it->second) / static_cast<double>(f.rows_read);
            t.rows.push_back({f.relative_path, std::string(kHazardCodes[hz(f.hazard)]), f.country, std::int64_t{f.year},
                              n(f.rows_read), var, rate});
        }
    return rep;
}

AggregateReport dispatch(const View& v, const ReportRequest& req, const Dictionary& dict) {
    const Args a(req);
    const auto& name = req.name;
    if (name == "yearly_trend") return yearly(v, a);
    if (name == "top_contaminants") return top(v, a);
    if (name == "hazard_product_table") return cross(v, a, true);
    if (name == "product_hazard_table") return cross(v, a, false);
    if (name == "ontology_group_stats") return ontology(v, a);
    if (name == "product_category_stats") return categories(v, a, dict);
    if (name == "country_stats") return countries(v, a);
    if (name == "sampling_strategy_breakdown") return strategies(v, a);
    if (name == "trade_links") return trade(v, a);
    if (name == "unknown_origin_trend") return unknown_origin(v);
    if (name == "results_per_sample_distribution") return per_sample(v);
    if (name == "contaminant_overlap") return overlap(v);
    if (name == "evaluation_summary") return evaluations(v);
    if (name == "sparsity") return sparsity(v);
    throw Error(ErrorCode::UnknownReport, "naive: unknown report '" + name + "'");
}

}  // namespace

std::vector<AggregateReport> naive_reports(const Truth& truth, const std::vector<ReportRequest>& requests,
                                           std::string_view grouping_dictionary_csv) {
    const View v(truth);
    const Dictionary dict(grouping_dictionary_csv);
    std::vector<AggregateReport> out;
    for (const auto& req : requests) {
        auto rep = dispatch(v, req, dict);
        rep.name = req.name;
        rep.params = req.params;
        out.push_back(std::move(rep));
    }
    return out;
}

AggregateReport naive_report(const Truth& truth, const ReportRequest& request, std::string_view grouping_dictionary_csv) {
    return naive_reports(truth, {request}, grouping_dictionary_csv).front();
}

}  // namespace chefs::synth
