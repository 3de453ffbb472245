#include "chefs/analytics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "chefs/error.hpp"
#include "chefs/parallel.hpp"

namespace chefs {

const std::vector<std::string>& report_names() {
    static const std::vector<std::string> names{
        "yearly_trend",          "top_contaminants",       "hazard_product_table",
        "product_hazard_table",  "ontology_group_stats",   "product_category_stats",
        "country_stats",         "sampling_strategy_breakdown", "trade_links",
        "unknown_origin_trend",  "results_per_sample_distribution", "contaminant_overlap",
        "evaluation_summary",    "sparsity"};
    return names;
}

std::vector<ReportRequest> standard_report_requests() {
    using nlohmann::json;
    return {
        {"yearly_trend", {{"hazard", nullptr}, {"from", 2000}, {"to", 2024}}},
        {"top_contaminants", {{"hazard", nullptr}, {"n", 10}}},
        {"hazard_product_table", {{"hazard", nullptr}, {"top_hazards", 3}, {"top_products", 3}}},
        {"product_hazard_table", {{"hazard", nullptr}, {"top_products", 3}, {"top_hazards", 3}}},
        {"ontology_group_stats", {{"hazard", nullptr}, {"level", 1}, {"parent", nullptr}}},
        {"product_category_stats", {{"hazard", nullptr}, {"top", 10}}},
        {"country_stats", {{"top_n", 15}}},
        {"sampling_strategy_breakdown", {{"group_by", "overall"}}},
        {"trade_links", {{"min_samples", 100}, {"top", 20}, {"from", 2000}, {"to", 2024}}},
        {"unknown_origin_trend", json::object()},
        {"results_per_sample_distribution", json::object()},
        {"contaminant_overlap", json::object()},
        {"evaluation_summary", json::object()},
        {"sparsity", json::object()},
    };
}

std::string short_name(const std::string& id, const std::optional<std::string>& full_name) {
    if (!full_name) return id;
    try {
        return parse_param_path(*full_name).segments().back();
    } catch (const Error&) {
        return *full_name;
    }
}

namespace {

using nlohmann::json;

class Params {
public:
    Params(const ReportRequest& req, const std::vector<std::string_view>& allowed) : raw_(req.params) {
        if (raw_.is_null()) raw_ = json::object();
        if (!raw_.is_object()) throw Error(ErrorCode::InvalidConfig, req.name + ": parameters must be an object");
        for (const auto& [key, value] : raw_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw Error(ErrorCode::InvalidConfig, req.name + ": unknown parameter '" + key + "'");
        }
        name_ = req.name;
    }

    std::optional<HazardCategory> hazard() {
        const auto it = raw_.find("hazard");
        if (it == raw_.end() || it->is_null()) {
            normalized_["hazard"] = nullptr;
            return std::nullopt;
        }
        const auto h = it->is_string() ? parse_hazard_code(it->get<std::string>()) : std::nullopt;
        if (!h) throw Error(ErrorCode::InvalidConfig, name_ + ": hazard must be CC, PEST or VMPR");
        normalized_["hazard"] = hazard_code(*h);
        return h;
    }

    long long integer(const std::string& key, long long fallback, long long min) {
        long long v = fallback;
        const auto it = raw_.find(key);
        if (it != raw_.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw Error(ErrorCode::InvalidConfig, name_ + ": " + key + " must be an integer");
            v = it->get<long long>();
        }
        if (v < min)
            throw Error(ErrorCode::InvalidConfig, name_ + ": " + key + " must be at least " + std::to_string(min));
        normalized_[key] = v;
        return v;
    }

    std::optional<std::string> optional_text(const std::string& key) {
        const auto it = raw_.find(key);
        if (it == raw_.end() || it->is_null()) {
            normalized_[key] = nullptr;
            return std::nullopt;
        }
        if (!it->is_string()) throw Error(ErrorCode::InvalidConfig, name_ + ": " + key + " must be a string");
        normalized_[key] = it->get<std::string>();
        return it->get<std::string>();
    }

    json normalized() const { return normalized_.is_null() ? json::object() : normalized_; }

private:
    json raw_;
    json normalized_;
    std::string name_;
};

struct Counts {
    std::uint64_t total = 0;
    std::uint64_t noncompliant = 0;

    void add(bool nc) {
        ++total;
        noncompliant += nc ? 1 : 0;
    }
    void merge(const Counts& o) {
        total += o.total;
        noncompliant += o.noncompliant;
    }
};

using Tally = std::unordered_map<std::uint64_t, Counts>;
constexpr std::uint64_t kSkip = ~std::uint64_t{0};

/// Result-level counts keyed by key(result); kSkip drops the result.
template <typename KeyFn>
Tally tally(const Dataset& d, unsigned jobs, KeyFn key) {
    const auto& results = d.results();
    return parallel_fold<Tally>(
        results.size(), jobs,
        [&](Tally& t, std::size_t i) {
            const auto& r = results[i];
            const std::uint64_t k = key(r);
            if (k != kSkip) t[k].add(r.compliance == ComplianceClass::NonCompliant);
        },
        [](Tally& into, Tally&& from) {
            for (const auto& [k, c] : from) into[k].merge(c);
        });
}

double fraction(std::uint64_t a, std::uint64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }
Cell count(std::uint64_t v) { return static_cast<std::int64_t>(v); }
Cell text(std::string_view s) { return std::string(s); }
unsigned hidx(HazardCategory h) { return static_cast<unsigned>(h); }

std::vector<HazardCategory> hazards_for(const std::optional<HazardCategory>& h) {
    if (h) return {*h};
    return {kAllHazards.begin(), kAllHazards.end()};
}

/// Sorts entries by count descending, then by name ascending.
template <typename T, typename CountFn, typename NameFn>
void rank(std::vector<T>& v, CountFn cnt, NameFn name) {
    std::sort(v.begin(), v.end(), [&](const T& a, const T& b) {
        if (cnt(a) != cnt(b)) return cnt(a) > cnt(b);
        return name(a) < name(b);
    });
}

template <typename T>
void truncate(std::vector<T>& v, long long n) {
    if (n > 0 && v.size() > static_cast<std::size_t>(n)) v.resize(static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------

AggregateReport yearly_trend(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto hazard = p.hazard();
    const auto from = p.integer("from", 2000, kMinYear);
    const auto to = p.integer("to", 2024, kMinYear);
    const auto& samples = d.samples();
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        const int y = samples[r.sample].year;
        if (y == 0 || y < from || y > to || (hazard && r.hazard != *hazard)) return kSkip;
        return static_cast<std::uint64_t>(y) * 4 + hidx(r.hazard);
    });
    std::map<std::uint64_t, Counts> sorted(t.begin(), t.end());
    AggregateReport rep;
    auto& tab = rep.add_table("yearly_trend", {"year", "hazard", "total_results", "noncompliant_results", "pct_noncompliant"});
    for (const auto& [k, c] : sorted)
        tab.rows.push_back({count(k / 4), text(hazard_code(static_cast<HazardCategory>(k % 4))), count(c.total),
                            count(c.noncompliant), fraction(c.noncompliant, c.total)});
    return rep;
}

AggregateReport top_contaminants(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto hazard = p.hazard();
    const auto n = p.integer("n", 10, 1);
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        if (hazard && r.hazard != *hazard) return kSkip;
        return static_cast<std::uint64_t>(r.contaminant) * 4 + hidx(r.hazard);
    });
    AggregateReport rep;
    auto& tab = rep.add_table("top_contaminants", {"hazard", "rank", "contaminant_id", "contaminant_name", "total_results",
                                                   "share", "noncompliant_results", "pct_noncompliant"});
    const auto& terms = d.contaminants();
    for (const auto h : hazards_for(hazard)) {
        std::vector<std::pair<std::uint32_t, Counts>> rows;
        std::uint64_t hazard_total = 0;
        for (const auto& [k, c] : t)
            if (k % 4 == hidx(h)) {
                rows.emplace_back(static_cast<std::uint32_t>(k / 4), c);
                hazard_total += c.total;
            }
        rank(rows, [](const auto& e) { return e.second.total; }, [&](const auto& e) -> const std::string& { return terms[e.first].id; });
        truncate(rows, n);
        std::int64_t i = 0;
        for (const auto& [cid, c] : rows)
            tab.rows.push_back({text(hazard_code(h)), ++i, terms[cid].id, short_name(terms[cid].id, terms[cid].full_name),
                                count(c.total), fraction(c.total, hazard_total), count(c.noncompliant),
                                fraction(c.noncompliant, c.total)});
    }
    return rep;
}

/// outer_is_contaminant selects Table 2-4 (hazard x product) or Table 5-7 (product x hazard).
AggregateReport cross_table(const Dataset& d, Params& p, const AnalyticsContext& ctx, bool outer_is_contaminant) {
    const auto hazard = p.hazard();
    const auto n_outer = p.integer(outer_is_contaminant ? "top_hazards" : "top_products", 3, 1);
    const auto n_inner = p.integer(outer_is_contaminant ? "top_products" : "top_hazards", 3, 1);
    const auto& samples = d.samples();
    const auto& outer_terms = outer_is_contaminant ? d.contaminants() : d.products();
    const auto& inner_terms = outer_is_contaminant ? d.products() : d.contaminants();

    AggregateReport rep;
    auto& tab = outer_is_contaminant
                    ? rep.add_table("hazard_product_table",
                                    {"hazard", "outer_rank", "contaminant_id", "contaminant_name", "contaminant_total",
                                     "inner_rank", "product_id", "product_name", "total_results",
                                     "noncompliant_results", "noncompliance_ratio"})
                    : rep.add_table("product_hazard_table",
                                    {"hazard", "outer_rank", "product_id", "product_name", "product_total",
                                     "inner_rank", "contaminant_id", "contaminant_name", "total_results",
                                     "noncompliant_results", "noncompliance_ratio"});
    for (const auto h : hazards_for(hazard)) {
        const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
            if (r.hazard != h) return kSkip;
            const std::uint64_t product = samples[r.sample].product;
            return outer_is_contaminant ? (std::uint64_t{r.contaminant} << 32 | product)
                                        : (product << 32 | r.contaminant);
        });
        std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, Counts>>> inner;
        std::unordered_map<std::uint32_t, std::uint64_t> outer_total;
        for (const auto& [k, c] : t) {
            const auto o = static_cast<std::uint32_t>(k >> 32);
            inner[o].emplace_back(static_cast<std::uint32_t>(k & 0xffffffffu), c);
            outer_total[o] += c.total;
        }
        std::vector<std::pair<std::uint32_t, std::uint64_t>> outers(outer_total.begin(), outer_total.end());
        rank(outers, [](const auto& e) { return e.second; }, [&](const auto& e) -> const std::string& { return outer_terms[e.first].id; });
        truncate(outers, n_outer);
        std::int64_t oi = 0;
        for (const auto& [o, total] : outers) {
            ++oi;
            auto& cells = inner[o];
            rank(cells, [](const auto& e) { return e.second.total; }, [&](const auto& e) -> const std::string& { return inner_terms[e.first].id; });
            truncate(cells, n_inner);
            std::int64_t ii = 0;
            for (const auto& [in, c] : cells)
                tab.rows.push_back({text(hazard_code(h)), oi, outer_terms[o].id,
                                    short_name(outer_terms[o].id, outer_terms[o].full_name), count(total), ++ii,
                                    inner_terms[in].id, short_name(inner_terms[in].id, inner_terms[in].full_name),
                                    count(c.total), count(c.noncompliant), fraction(c.noncompliant, c.total)});
        }
    }
    return rep;
}

AggregateReport ontology_group_stats(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto hazard = p.hazard();
    const auto level = p.integer("level", 1, 1);
    const auto parent = p.optional_text("parent");

    struct Group {
        std::string name;
        bool truncated = false;
        bool include = true;
    };
    std::vector<Group> groups(d.contaminants().size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& term = d.contaminants()[i];
        try {
            if (!term.full_name) throw Error(ErrorCode::MalformedPath, "no full name");
            const auto path = parse_param_path(*term.full_name);
            const auto g = ontology_group(path, static_cast<int>(level));
            groups[i] = {g.name, g.truncated, !parent || path.segments().front() == *parent};
        } catch (const Error&) {
            groups[i] = {"unparsed", false, !parent};
        }
    }
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        if ((hazard && r.hazard != *hazard) || !groups[r.contaminant].include) return kSkip;
        return static_cast<std::uint64_t>(r.contaminant) * 4 + hidx(r.hazard);
    });

    AggregateReport rep;
    auto& tab = rep.add_table("ontology_group_stats", {"hazard", "group", "truncated", "total_results",
                                                       "noncompliant_results", "pct_noncompliant", "contaminant_ids"});
    for (const auto h : hazards_for(hazard)) {
        struct Row {
            std::pair<std::string, bool> key;
            Counts counts;
            std::uint64_t ids = 0;
        };
        std::map<std::pair<std::string, bool>, Row> by_group;
        for (const auto& [k, c] : t) {
            if (k % 4 != hidx(h)) continue;
            const auto& g = groups[k / 4];
            auto& row = by_group[{g.name, g.truncated}];
            row.key = {g.name, g.truncated};
            row.counts.merge(c);
            ++row.ids;
        }
        std::vector<Row> rows;
        for (auto& [k, r] : by_group) rows.push_back(std::move(r));
        rank(rows, [](const Row& r) { return r.counts.total; }, [](const Row& r) -> const auto& { return r.key; });
        for (const auto& r : rows)
            tab.rows.push_back({text(hazard_code(h)), r.key.first, count(r.key.second ? 1 : 0), count(r.counts.total),
                                count(r.counts.noncompliant), fraction(r.counts.noncompliant, r.counts.total),
                                count(r.ids)});
    }
    return rep;
}

AggregateReport product_category_stats(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto hazard = p.hazard();
    const auto top = p.integer("top", 10, 0);
    const auto& dict = *ctx.dictionary;
    const auto& categories = dict.categories();
    std::unordered_map<std::string_view, std::uint32_t> cat_index;
    for (std::uint32_t i = 0; i < categories.size(); ++i) cat_index.emplace(categories[i], i);

    const auto& products = d.products();
    std::vector<std::array<std::uint32_t, 3>> cat(products.size());
    for (std::size_t i = 0; i < products.size(); ++i)
        for (const auto h : kAllHazards)
            cat[i][hidx(h)] = cat_index.at(dict.assign(products[i].full_name.value_or(""), h));

    const auto& samples = d.samples();
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        if (hazard && r.hazard != *hazard) return kSkip;
        return static_cast<std::uint64_t>(cat[samples[r.sample].product][hidx(r.hazard)]) * 4 + hidx(r.hazard);
    });

    AggregateReport rep;
    auto& tab = rep.add_table("product_category_stats", {"hazard", "rank", "category", "total_results", "share",
                                                         "noncompliant_results", "pct_noncompliant"});
    for (const auto h : hazards_for(hazard)) {
        std::vector<std::pair<std::uint32_t, Counts>> rows;
        std::uint64_t hazard_total = 0;
        for (const auto& [k, c] : t)
            if (k % 4 == hidx(h)) {
                rows.emplace_back(static_cast<std::uint32_t>(k / 4), c);
                hazard_total += c.total;
            }
        rank(rows, [](const auto& e) { return e.second.total; }, [&](const auto& e) -> const std::string& { return categories[e.first]; });
        truncate(rows, top);
        std::int64_t i = 0;
        for (const auto& [ci, c] : rows)
            tab.rows.push_back({text(hazard_code(h)), ++i, categories[ci], count(c.total), fraction(c.total, hazard_total),
                                count(c.noncompliant), fraction(c.noncompliant, c.total)});
    }
    return rep;
}

AggregateReport country_stats(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto top_n = p.integer("top_n", 15, 1);
    const auto& samples = d.samples();
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        return static_cast<std::uint64_t>(samples[r.sample].sampling_country) * 4 + hidx(r.hazard);
    });
    struct Row {
        std::uint32_t country;
        Counts all;
        std::array<Counts, 3> per{};
    };
    std::unordered_map<std::uint32_t, Row> by_country;
    std::uint64_t grand = 0;
    for (const auto& [k, c] : t) {
        auto& row = by_country.try_emplace(static_cast<std::uint32_t>(k / 4), Row{static_cast<std::uint32_t>(k / 4), {}, {}}).first->second;
        row.all.merge(c);
        row.per[k % 4].merge(c);
        grand += c.total;
    }
    std::vector<Row> rows;
    for (auto& [k, r] : by_country) rows.push_back(r);
    const auto& countries = d.countries();
    rank(rows, [](const Row& r) { return r.all.total; }, [&](const Row& r) -> const std::string& { return countries[r.country]; });
    truncate(rows, top_n);

    AggregateReport rep;
    auto& tab = rep.add_table("country_stats",
                              {"rank", "country", "total_results", "share", "noncompliant_results", "pct_noncompliant",
                               "cc_results", "cc_noncompliant", "pest_results", "pest_noncompliant", "vmpr_results",
                               "vmpr_noncompliant"});
    std::int64_t i = 0;
    for (const auto& r : rows)
        tab.rows.push_back({++i, countries[r.country], count(r.all.total), fraction(r.all.total, grand),
                            count(r.all.noncompliant), fraction(r.all.noncompliant, r.all.total), count(r.per[0].total),
                            count(r.per[0].noncompliant), count(r.per[1].total), count(r.per[1].noncompliant),
                            count(r.per[2].total), count(r.per[2].noncompliant)});
    return rep;
}

AggregateReport sampling_strategy_breakdown(const Dataset& d, Params& p, const AnalyticsContext& ctx) {
    const auto group_by = p.optional_text("group_by").value_or("overall");
    if (group_by != "overall" && group_by != "year" && group_by != "country_hazard")
        throw Error(ErrorCode::InvalidConfig, "sampling_strategy_breakdown: group_by must be overall, year or country_hazard");
    const auto& samples = d.samples();
    const auto& countries = d.countries();
    // group key: 0 (overall), year, or country * 4 + hazard
    const auto t = tally(d, ctx.jobs, [&](const Dataset::ResultRow& r) {
        const auto& s = samples[r.sample];
        std::uint64_t g = 0;
        if (group_by == "year") {
            if (s.year == 0) return kSkip;
            g = static_cast<std::uint64_t>(s.year);
        } else if (group_by == "country_hazard") {
            g = static_cast<std::uint64_t>(s.sampling_country) * 4 + hidx(r.hazard);
        }
        return g * 8 + static_cast<unsigned>(s.strategy);
    });
    std::unordered_map<std::uint64_t, std::uint64_t> sample_counts;
    for (const auto& s : samples) {
        const unsigned st = static_cast<unsigned>(s.strategy);
        if (group_by == "overall") ++sample_counts[st];
        else if (group_by == "year") {
            if (s.year != 0) ++sample_counts[static_cast<std::uint64_t>(s.year) * 8 + st];
        } else {
            for (const auto h : kAllHazards)
                if (s.hazards & hazard_bit(h))
                    ++sample_counts[(static_cast<std::uint64_t>(s.sampling_country) * 4 + hidx(h)) * 8 + st];
        }
    }

    struct GroupKey {
        std::string country;
        std::int64_t number = 0;  ///< year, or hazard index
        auto operator<=>(const GroupKey&) const = default;
    };
    auto group_key = [&](std::uint64_t g) {
        if (group_by == "country_hazard") return GroupKey{countries[g / 4], static_cast<std::int64_t>(g % 4)};
        return GroupKey{"", static_cast<std::int64_t>(g)};
    };
    std::map<GroupKey, std::map<unsigned, std::pair<std::uint64_t, Counts>>> groups;
    for (const auto& [k, n] : sample_counts) groups[group_key(k / 8)][k % 8].first = n;
    for (const auto& [k, c] : t) groups[group_key(k / 8)][k % 8].second = c;

    std::vector<std::string> cols;
    if (group_by == "year") cols = {"year"};
    if (group_by == "country_hazard") cols = {"country", "hazard"};
    for (const char* c : {"strategy", "samples", "sample_pct", "results", "noncompliant_results", "pct_noncompliant"})
        cols.emplace_back(c);
    AggregateReport rep;
    auto& tab = rep.add_table("sampling_strategy_breakdown", cols);
    for (const auto& [gk, strategies] : groups) {
        std::uint64_t group_samples = 0;
        for (const auto& [st, v] : strategies) group_samples += v.first;
        for (const auto& [st, v] : strategies) {
            std::vector<Cell> row;
            if (group_by == "year") row.push_back(gk.number);
            if (group_by == "country_hazard") {
                row.push_back(gk.country);
                row.push_back(text(hazard_code(static_cast<HazardCategory>(gk.number))));
            }
            row.push_back(text(to_string(static_cast<SamplingStrategy>(st))));
            row.push_back(count(v.first));
            row.push_back(fraction(v.first, group_samples));
            row.push_back(count(v.second.total));
            row.push_back(count(v.second.noncompliant));
            row.push_back(fraction(v.second.noncompliant, v.second.total));
            tab.rows.push_back(std::move(row));
        }
    }
    return rep;
}

std::vector<std::uint8_t> noncompliant_samples(const Dataset& d) {
    std::vector<std::uint8_t> nc(d.samples().size(), 0);
    for (const auto& r : d.results())
        if (r.compliance == ComplianceClass::NonCompliant) nc[r.sample] = 1;
    return nc;
}

AggregateReport trade_links(const Dataset& d, Params& p, const AnalyticsContext&) {
    const auto min_samples = p.integer("min_samples", 100, 1);
    const auto top = p.integer("top", 20, 0);
    const auto from = p.integer("from", 2000, kMinYear);
    const auto to = p.integer("to", 2024, kMinYear);
    const auto nc = noncompliant_samples(d);
    const auto& countries = d.countries();
    std::unordered_map<std::uint64_t, Counts> pairs;
    for (std::size_t i = 0; i < d.samples().size(); ++i) {
        const auto& s = d.samples()[i];
        if (s.year == 0 || s.year < from || s.year > to) continue;
        if (countries[s.origin] == countries[s.sampling_country]) continue;
        pairs[std::uint64_t{s.origin} << 32 | s.sampling_country].add(nc[i] != 0);
    }
    struct Link {
        std::string origin, destination;
        Counts c;
    };
    std::vector<Link> links;
    for (const auto& [k, c] : pairs)
        if (c.total > static_cast<std::uint64_t>(min_samples))
            links.push_back({countries[k >> 32], countries[k & 0xffffffffu], c});
    std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
        // exact rational comparison of noncompliant / samples
        const auto lhs = static_cast<unsigned __int128>(a.c.noncompliant) * b.c.total;
        const auto rhs = static_cast<unsigned __int128>(b.c.noncompliant) * a.c.total;
        if (lhs != rhs) return lhs > rhs;
        if (a.c.total != b.c.total) return a.c.total > b.c.total;
        if (a.origin != b.origin) return a.origin < b.origin;
        return a.destination < b.destination;
    });
    truncate(links, top);
    AggregateReport rep;
    auto& tab = rep.add_table("trade_links", {"rank", "origin", "destination", "samples", "noncompliant", "pct"});
    std::int64_t i = 0;
    for (const auto& l : links)
        tab.rows.push_back({++i, l.origin, l.destination, count(l.c.total), count(l.c.noncompliant),
                            fraction(l.c.noncompliant, l.c.total)});
    auto& edges = rep.add_table("edges", {"origin", "destination", "samples", "noncompliant", "pct"});
    for (const auto& l : links)
        edges.rows.push_back({l.origin, l.destination, count(l.c.total), count(l.c.noncompliant),
                              fraction(l.c.noncompliant, l.c.total)});
    return rep;
}

AggregateReport unknown_origin_trend(const Dataset& d, Params&, const AnalyticsContext&) {
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> years;
    const auto& countries = d.countries();
    for (const auto& s : d.samples()) {
        if (s.year == 0) continue;
        auto& y = years[s.year];
        ++y.first;
        if (countries[s.origin] == kUnknownCountry) ++y.second;
    }
    AggregateReport rep;
    auto& tab = rep.add_table("unknown_origin_trend", {"year", "total_samples", "unknown_samples", "pct_unknown"});
    for (const auto& [y, c] : years)
        tab.rows.push_back({std::int64_t{y}, count(c.first), count(c.second), fraction(c.second, c.first)});
    return rep;
}

AggregateReport results_per_sample_distribution(const Dataset& d, Params&, const AnalyticsContext&) {
    std::vector<std::uint32_t> per_sample(d.samples().size(), 0);
    std::array<std::uint64_t, 3> hazard_results{};
    for (const auto& r : d.results()) {
        ++per_sample[r.sample];
        ++hazard_results[hidx(r.hazard)];
    }
    std::map<std::uint32_t, std::uint64_t> histogram;
    std::array<std::uint64_t, 3> hazard_samples{};
    for (std::size_t i = 0; i < per_sample.size(); ++i) {
        ++histogram[per_sample[i]];
        for (const auto h : kAllHazards)
            if (d.samples()[i].hazards & hazard_bit(h)) ++hazard_samples[hidx(h)];
    }
    AggregateReport rep;
    auto& tab = rep.add_table("histogram", {"results_per_sample", "samples"});
    for (const auto& [k, n] : histogram) tab.rows.push_back({count(k), count(n)});
    auto& ph = rep.add_table("per_hazard", {"hazard", "results", "samples", "mean_results_per_sample", "result_share",
                                            "sample_share"});
    const std::uint64_t total_results = d.results().size();
    const std::uint64_t total_samples = d.samples().size();
    for (const auto h : kAllHazards) {
        const auto r = hazard_results[hidx(h)];
        const auto s = hazard_samples[hidx(h)];
        if (r == 0) continue;
        ph.rows.push_back({text(hazard_code(h)), count(r), count(s), fraction(r, s), fraction(r, total_results),
                           fraction(s, total_samples)});
    }
    return rep;
}

AggregateReport contaminant_overlap(const Dataset& d, Params&, const AnalyticsContext&) {
    std::vector<std::uint8_t> mask(d.contaminants().size(), 0);
    for (const auto& r : d.results()) mask[r.contaminant] |= hazard_bit(r.hazard);
    std::array<std::uint64_t, 8> regions{};
    for (const auto m : mask) ++regions[m];
    const std::uint64_t unique = mask.size();

    AggregateReport rep;
    auto& card = rep.add_table("cardinality", {"categories", "contaminant_ids", "share"});
    for (int k = 1; k <= 3; ++k) {
        std::uint64_t n = 0;
        for (unsigned m = 1; m < 8; ++m)
            if (std::popcount(m) == k) n += regions[m];
        card.rows.push_back({std::int64_t{k}, count(n), fraction(n, unique)});
    }
    auto label = [](unsigned m) {
        std::vector<std::string> parts;
        for (const auto h : kAllHazards)
            if (m & hazard_bit(h)) parts.emplace_back(hazard_code(h));
        return join(parts, "+");
    };
    auto& reg = rep.add_table("regions", {"region", "contaminant_ids"});
    for (const unsigned m : {1u, 2u, 4u, 3u, 5u, 6u, 7u}) reg.rows.push_back({label(m), count(regions[m])});
    auto& pair = rep.add_table("pairwise", {"pair", "contaminant_ids"});
    for (const unsigned m : {3u, 5u, 6u}) {
        std::uint64_t n = 0;
        for (unsigned x = 1; x < 8; ++x)
            if ((x & m) == m) n += regions[x];
        pair.rows.push_back({label(m), count(n)});
    }
    std::uint64_t total_ids = 0;
    for (unsigned m = 1; m < 8; ++m) total_ids += regions[m] * static_cast<unsigned>(std::popcount(m));
    auto& summary = rep.add_table("summary", {"unique_ids", "total_ids"});
    summary.rows.push_back({count(unique), count(total_ids)});
    return rep;
}

AggregateReport evaluation_summary(const Dataset& d, Params&, const AnalyticsContext& ctx) {
    const auto t = tally(d, ctx.jobs, [](const Dataset::ResultRow& r) { return std::uint64_t{r.eval_code}; });
    const std::uint64_t total = d.results().size();
    std::vector<std::pair<std::uint32_t, Counts>> rows;
    for (const auto& [k, c] : t) rows.emplace_back(static_cast<std::uint32_t>(k), c);
    const auto& codes = d.eval_codes();
    rank(rows, [](const auto& e) { return e.second.total; }, [&](const auto& e) -> const std::string& { return codes[e.first]; });
    AggregateReport rep;
    auto& tab = rep.add_table("evaluation_summary", {"eval_code", "class", "results", "share"});
    std::array<std::uint64_t, kAllComplianceClasses.size()> by_class{};
    for (const auto& [code, c] : rows) {
        const auto cls = classify_evaluation(EvaluationCode(codes[code]));
        by_class[static_cast<unsigned>(cls)] += c.total;
        tab.rows.push_back({codes[code], text(to_string(cls)), count(c.total), fraction(c.total, total)});
    }
    auto& classes = rep.add_table("classes", {"class", "results", "share"});
    for (const auto cls : kAllComplianceClasses)
        classes.rows.push_back({text(to_string(cls)), count(by_class[static_cast<unsigned>(cls)]),
                                fraction(by_class[static_cast<unsigned>(cls)], total)});
    return rep;
}

AggregateReport sparsity(const Dataset& d, Params&, const AnalyticsContext&) {
    std::vector<std::string> variables;
    for (const auto& v : Schema::builtin().variables()) variables.push_back(v.name);
    AggregateReport rep;
    auto& tab = rep.add_table("sparsity", {"file", "hazard", "country", "year", "rows", "variable", "missing_rate"});
    std::vector<std::pair<const PartitionManifest*, const SourceRecord*>> sources;
    for (const auto& m : d.manifests())
        for (const auto& s : m.sources) sources.emplace_back(&m, &s);
    std::sort(sources.begin(), sources.end(),
              [](const auto& a, const auto& b) { return a.second->relative_path < b.second->relative_path; });
    for (const auto& [m, s] : sources) {
        const auto rates = s->stats.missing_rate_per_variable(variables);
        for (const auto& v : variables)
            tab.rows.push_back({s->relative_path, text(hazard_code(m->key.hazard)), m->key.country,
                                std::int64_t{m->key.year}, count(s->stats.rows_read), v, rates.at(v)});
    }
    return rep;
}

}  // namespace

AggregateReport run_report(const Dataset& d, const ReportRequest& req, const AnalyticsContext& ctx) {
    using Fn = AggregateReport (*)(const Dataset&, Params&, const AnalyticsContext&);
    static const std::map<std::string, std::pair<Fn, std::vector<std::string_view>>, std::less<>> table{
        {"yearly_trend", {yearly_trend, {"hazard", "from", "to"}}},
        {"top_contaminants", {top_contaminants, {"hazard", "n"}}},
        {"hazard_product_table",
         {[](const Dataset& d, Params& p, const AnalyticsContext& c) { return cross_table(d, p, c, true); },
          {"hazard", "top_hazards", "top_products"}}},
        {"product_hazard_table",
         {[](const Dataset& d, Params& p, const AnalyticsContext& c) { return cross_table(d, p, c, false); },
          {"hazard", "top_products", "top_hazards"}}},
        {"ontology_group_stats", {ontology_group_stats, {"hazard", "level", "parent"}}},
        {"product_category_stats", {product_category_stats, {"hazard", "top"}}},
        {"country_stats", {country_stats, {"top_n"}}},
        {"sampling_strategy_breakdown", {sampling_strategy_breakdown, {"group_by"}}},
        {"trade_links", {trade_links, {"min_samples", "top", "from", "to"}}},
        {"unknown_origin_trend", {unknown_origin_trend, {}}},
        {"results_per_sample_distribution", {results_per_sample_distribution, {}}},
        {"contaminant_overlap", {contaminant_overlap, {}}},
        {"evaluation_summary", {evaluation_summary, {}}},
        {"sparsity", {sparsity, {}}},
    };
    const auto it = table.find(req.name);
    if (it == table.end())
        throw Error(ErrorCode::UnknownReport,
                    "unknown report '" + req.name + "'; valid names: " + join(report_names(), ", "));
    Params p(req, it->second.second);
    AggregateReport rep = it->second.first(d, p, ctx);
    rep.name = req.name;
    rep.params = p.normalized();
    return rep;
}

}  // namespace chefs
