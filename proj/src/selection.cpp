#include <algorithm>
#include <map>
#include <unordered_map>

#include "chefs/error.hpp"
#include "chefs/store.hpp"

namespace chefs {

const std::vector<std::string>& selection_names() {
    static const std::vector<std::string> names{"noncompliant_results", "per_year_hazard_counts",
                                                "results_with_sample_context"};
    return names;
}

namespace {

const std::vector<std::string>& context_columns() {
    static const std::vector<std::string> cols{
        "result_id",     "sample_id",  "hazard",         "contaminant_id",   "result_value",  "loq",
        "eval_code",     "eval_class", "analysis_date",  "product_id",       "origin_country", "sampling_country",
        "sampling_year", "sampling_date", "strategy"};
    return cols;
}

bool accepts(const SelectionFilter& f, const Sample& s, const AnalyticalResult& r, ComplianceClass cls) {
    if (f.year && s.sampling_year != f.year) return false;
    if (f.hazard && r.hazard != *f.hazard) return false;
    if (f.sampling_country && s.sampling_country != *f.sampling_country) return false;
    if (f.eval_class && cls != *f.eval_class) return false;
    if (f.strategy && s.strategy != *f.strategy) return false;
    return true;
}

template <typename Fn>
void for_each_joined(const Store& store, const SelectionFilter& filter, Fn&& fn) {
    for (const auto* p : store.valid_partitions()) {
        if (filter.hazard && p->key.hazard != *filter.hazard) continue;
        const auto data = read_partition(*p);
        std::unordered_map<std::string_view, const Sample*> samples;
        samples.reserve(data.samples.size());
        for (const auto& s : data.samples) samples.emplace(s.sample_id, &s);
        for (const auto& r : data.results) {
            const auto it = samples.find(r.sample_id);
            if (it == samples.end())
                throw Error(ErrorCode::InvalidPartition,
                            p->dir.string() + ": result " + r.result_id + " references a missing sample");
            const auto cls = classify_evaluation(r.eval_code);
            if (accepts(filter, *it->second, r, cls)) fn(*it->second, r, cls);
        }
    }
}

}  // namespace

SelectionResult read_selection(const Store& store, std::string_view name, const SelectionFilter& filter) {
    SelectionResult out;
    if (name == "results_with_sample_context" || name == "noncompliant_results") {
        SelectionFilter f = filter;
        if (name == "noncompliant_results") {
            if (f.eval_class && *f.eval_class != ComplianceClass::NonCompliant) {
                out.columns = context_columns();
                return out;
            }
            f.eval_class = ComplianceClass::NonCompliant;
        }
        out.columns = context_columns();
        for_each_joined(store, f, [&](const Sample& s, const AnalyticalResult& r, ComplianceClass cls) {
            out.rows.push_back({r.result_id,
                                r.sample_id,
                                std::string(hazard_code(r.hazard)),
                                r.contaminant_id,
                                r.result_value_text,
                                r.loq_text,
                                r.eval_code_text,
                                std::string(to_string(cls)),
                                r.analysis_date,
                                s.product_id,
                                s.origin_country,
                                s.sampling_country,
                                s.sampling_year ? Field{std::to_string(*s.sampling_year)} : Field{},
                                s.sampling_date,
                                s.strategy_text});
        });
        return out;
    }
    if (name == "per_year_hazard_counts") {
        std::map<std::pair<int, HazardCategory>, std::pair<std::uint64_t, std::uint64_t>> counts;
        for_each_joined(store, filter, [&](const Sample& s, const AnalyticalResult& r, ComplianceClass cls) {
            if (!s.sampling_year) return;
            auto& c = counts[{*s.sampling_year, r.hazard}];
            ++c.first;
            if (cls == ComplianceClass::NonCompliant) ++c.second;
        });
        out.columns = {"year", "hazard", "total_results", "noncompliant_results"};
        for (const auto& [k, c] : counts)
            out.rows.push_back({std::to_string(k.first), std::string(hazard_code(k.second)), std::to_string(c.first),
                                std::to_string(c.second)});
        return out;
    }
    throw Error(ErrorCode::UnknownSelection,
                "unknown selection '" + std::string(name) + "'; available: " + join(selection_names(), ", "));
}

}  // namespace chefs
