#include "chefs/ingest.hpp"

#include <algorithm>
#include <set>

#include "chefs/csv.hpp"
#include "chefs/error.hpp"
#include "chefs/hash.hpp"

namespace chefs {

std::optional<std::size_t> ColumnMapping::column(std::string_view canonical) const {
    const auto it = resolved.find(std::string(canonical));
    if (it == resolved.end()) return std::nullopt;
    return it->second;
}

ColumnMapping resolve_columns(const std::vector<std::string>& header, const SynonymTable& synonyms, Era era,
                              const Schema& schema) {
    if (header.empty() || (header.size() == 1 && trim(header[0]).empty()))
        throw Error(ErrorCode::MalformedFile, "empty header");
    ColumnMapping m;
    std::map<std::string, std::string> canonical_source;  // canonical -> source column name
    std::set<std::string> unmapped_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name(trim(header[i]));
        if (name.empty()) name = "column_" + std::to_string(i + 1);
        m.header.push_back(name);
        if (is_reserved_column(name))
            throw Error(ErrorCode::SchemaConflict, "source column '" + name + "' uses a reserved name");

        std::optional<std::string> canonical;
        if (schema.find(name)) {
            canonical = name;
        } else if (auto syn = synonyms.lookup(name, era)) {
            if (!schema.find(*syn))
                throw Error(ErrorCode::InvalidConfig, "synonym '" + name + "' maps to unknown variable '" + *syn + "'");
            canonical = *syn;
        } else if (const auto* def = schema.find_icase(name)) {
            canonical = def->name;
        }

        if (canonical) {
            auto [it, inserted] = canonical_source.emplace(*canonical, name);
            if (!inserted)
                throw Error(ErrorCode::SchemaConflict, "columns '" + it->second + "' and '" + name +
                                                           "' both resolve to '" + *canonical + "'");
            m.resolved.emplace(*canonical, i);
        } else {
            if (!unmapped_names.insert(name).second)
                throw Error(ErrorCode::SchemaConflict, "column '" + name + "' appears more than once");
            m.unmapped_sources.emplace_back(name, i);
        }
    }
    for (const auto& v : schema.variables())
        if (!m.resolved.contains(v.name)) m.missing_canonicals.push_back(v.name);
    return m;
}

std::string make_sample_id(const Field& sample_code, std::string_view sampling_country, std::optional<int> year,
                           std::string_view product_id, const Field& sampling_date, const Field& strategy,
                           std::string_view source_file, long long ordinal) {
    if (sample_code) return KeyHasher("sample/code").add(std::string_view(*sample_code)).id();
    KeyHasher h("sample/tuple");
    h.add(sampling_country);
    if (year) h.add(static_cast<long long>(*year));
    else h.add_absent();
    h.add(product_id).add(sampling_date).add(strategy).add(source_file).add(ordinal);
    return h.id();
}

std::string make_result_id(std::string_view sample_id, std::string_view contaminant_id, const Field& analysis_date,
                           const Field& result_value, const Field& loq, const Field& eval_code) {
    return KeyHasher("result")
        .add(sample_id)
        .add(contaminant_id)
        .add(analysis_date)
        .add(result_value)
        .add(loq)
        .add(eval_code)
        .id();
}

RowHarmonizer::RowHarmonizer(const FileManifestEntry& entry, const ColumnMapping& mapping, const IngestContext& ctx)
    : entry_(entry), mapping_(mapping), ctx_(ctx) {
    for (const auto& [name, idx] : mapping_.resolved) {
        const auto* def = ctx_.schema->find(name);
        if (!def) continue;
        if (def->level == VariableLevel::Sample) sample_signature_columns_.push_back(idx);
        if (def->core) continue;
        if (name == "product_full_name" || name == "contaminant_full_name") continue;
        (def->level == VariableLevel::Sample ? sample_rest_ : result_rest_).emplace_back(name, idx);
    }
    for (const auto& u : mapping_.unmapped_sources) result_rest_.push_back(u);
    std::sort(sample_rest_.begin(), sample_rest_.end());
    std::sort(result_rest_.begin(), result_rest_.end());
    std::sort(sample_signature_columns_.begin(), sample_signature_columns_.end());
}

std::variant<HarmonizedRow, MalformedRow> RowHarmonizer::process(const std::vector<std::string>& fields,
                                                                 std::size_t row) {
    if (fields.size() != mapping_.header.size())
        return MalformedRow{row, "expected " + std::to_string(mapping_.header.size()) + " fields, found " +
                                     std::to_string(fields.size())};
    auto get = [&](std::string_view name) -> Field {
        const auto idx = mapping_.column(name);
        return idx ? normalize_cell(fields[*idx]) : std::nullopt;
    };

    HarmonizedRow out;
    out.row = row;
    auto diag = [&](std::string kind, std::string message) {
        out.diagnostics.push_back({entry_.relative_path, row, std::move(kind), std::move(message)});
    };

    const Field product_id = get("product_id");
    const Field contaminant_id = get("contaminant_id");
    if (!contaminant_id) return MalformedRow{row, "missing contaminant_id"};
    if (!product_id) return MalformedRow{row, "missing product_id"};

    const Field year_text = get("sampling_year");
    std::optional<int> reported_year;
    if (year_text) {
        const auto y = parse_integer(*year_text);
        if (!y) return MalformedRow{row, "unparsable sampling_year '" + *year_text + "'"};
        if (*y < kMinYear || *y > kMaxYear) return MalformedRow{row, "sampling_year " + *year_text + " outside [1900, 2100]"};
        reported_year = static_cast<int>(*y);
    }
    const Field sampling_date = get("sampling_date");
    std::optional<Date> date;
    if (sampling_date) {
        date = parse_date(*sampling_date);
        if (!date) diag("unparsed_date", "unparsable sampling_date '" + *sampling_date + "'");
    }
    std::optional<int> year;
    try {
        year = extract_year(date, reported_year);
    } catch (const Error& e) {
        return MalformedRow{row, e.what()};
    }

    std::string signature;
    for (auto idx : sample_signature_columns_) {
        const auto v = normalize_cell(fields[idx]);
        if (v) signature.append(*v);
        else signature.push_back('\x1e');
        signature.push_back('\x1f');
    }
    if (!have_previous_ || signature != previous_signature_) {
        ++ordinal_;
        previous_signature_ = std::move(signature);
        have_previous_ = true;
    }

    Sample& s = out.sample;
    const Field sample_code = get("sample_code");
    const Field sampling_country = get("sampling_country");
    s.sampling_country = sampling_country ? *sampling_country : entry_.country;
    if (!sampling_country) s.derived.emplace_back("sampling_country");
    s.product_id = *product_id;
    s.product_full_name = get("product_full_name");
    if (!s.product_full_name && ctx_.catalogues) {
        s.product_full_name = ctx_.catalogues->product_full_name(s.product_id, entry_.era);
        if (s.product_full_name) s.derived.emplace_back("product_full_name");
    }
    s.origin_country = get("origin_country");
    s.sampling_year = year;
    if (year && !reported_year) s.derived.emplace_back("sampling_year");
    s.sampling_date = sampling_date;
    s.strategy_text = get("strategy");
    const auto strategy = parse_strategy(s.strategy_text);
    s.strategy = strategy.strategy;
    if (!strategy.recognized) diag("unknown_strategy", "unrecognized sampling strategy '" + *s.strategy_text + "'");
    s.hazards = hazard_bit(entry_.hazard);
    for (const auto& [name, idx] : sample_rest_)
        if (auto v = normalize_cell(fields[idx])) s.extra.emplace_back(name, std::move(*v));
    std::sort(s.derived.begin(), s.derived.end());
    s.sample_id = make_sample_id(sample_code, s.sampling_country, year, s.product_id, s.sampling_date,
                                 s.strategy_text, entry_.relative_path, ordinal_);

    AnalyticalResult& r = out.result;
    r.sample_id = s.sample_id;
    r.contaminant_id = *contaminant_id;
    r.contaminant_full_name = get("contaminant_full_name");
    if (!r.contaminant_full_name && ctx_.catalogues) {
        r.contaminant_full_name = ctx_.catalogues->contaminant_full_name(r.contaminant_id, entry_.era);
        if (r.contaminant_full_name) r.derived.emplace_back("contaminant_full_name");
    }
    r.hazard = entry_.hazard;
    r.result_value_text = get("result_value");
    if (r.result_value_text) {
        r.result_value = parse_decimal(*r.result_value_text);
        if (!r.result_value) diag("unparsed_value", "unparsable result_value '" + *r.result_value_text + "'");
    }
    r.loq_text = get("loq");
    if (r.loq_text) {
        r.loq = parse_decimal(*r.loq_text);
        if (!r.loq) diag("unparsed_value", "unparsable loq '" + *r.loq_text + "'");
    }
    r.eval_code_text = get("eval_code");
    r.eval_code = EvaluationCode(r.eval_code_text.value_or(""));
    r.analysis_date = get("analysis_date");
    for (const auto& [name, idx] : result_rest_)
        if (auto v = normalize_cell(fields[idx])) r.extra.emplace_back(name, std::move(*v));
    r.source_file = entry_.relative_path;
    r.source_row = row;
    r.result_id = make_result_id(r.sample_id, r.contaminant_id, r.analysis_date, r.result_value_text, r.loq_text,
                                 r.eval_code_text);
    return out;
}

namespace {

bool same_sample_fields(const Sample& a, const Sample& b) {
    return a.product_id == b.product_id && a.product_full_name == b.product_full_name &&
           a.origin_country == b.origin_country && a.sampling_country == b.sampling_country &&
           a.sampling_year == b.sampling_year && a.sampling_date == b.sampling_date &&
           a.strategy_text == b.strategy_text && a.extra == b.extra;
}

}  // namespace

ColumnMapping read_mapping(const FileManifestEntry& entry, const IngestContext& ctx) {
    CsvReader reader(entry.path);
    std::vector<std::string> header;
    if (!reader.read_record(header)) throw Error(ErrorCode::MalformedFile, entry.relative_path + ": empty file");
    try {
        return resolve_columns(header, *ctx.synonyms, entry.era, *ctx.schema);
    } catch (const Error& e) {
        throw Error(e.code(), entry.relative_path + ": " + e.what());
    }
}

IngestStats ingest_file(const FileManifestEntry& entry, const ColumnMapping& mapping, const IngestContext& ctx,
                        const RowSink& sink) {
    IngestStats stats;
    CsvReader reader(entry.path);
    std::vector<std::string> fields;
    if (!reader.read_record(fields)) throw Error(ErrorCode::MalformedFile, entry.relative_path + ": empty file");

    std::vector<std::pair<std::string, std::size_t>> counted;
    for (const auto& [name, idx] : mapping.resolved) counted.emplace_back(name, idx);
    for (const auto& u : mapping.unmapped_sources) counted.push_back(u);
    std::vector<std::uint64_t> non_empty(counted.size(), 0);

    RowHarmonizer harmonizer(entry, mapping, ctx);
    std::unordered_map<std::string, Sample> first_seen;
    auto emit_diag = [&](const Diagnostic& d) {
        if (sink.on_diagnostic) sink.on_diagnostic(d);
    };

    while (reader.read_record(fields)) {
        ++stats.rows_read;
        const std::size_t row = reader.record_number() - 1;
        if (fields.size() == mapping.header.size())
            for (std::size_t c = 0; c < counted.size(); ++c)
                if (!is_missing_token(fields[counted[c].second])) ++non_empty[c];

        auto outcome = harmonizer.process(fields, row);
        if (auto* bad = std::get_if<MalformedRow>(&outcome)) {
            ++stats.rows_malformed;
            emit_diag({entry.relative_path, row, "malformed_row", bad->reason});
            continue;
        }
        auto& good = std::get<HarmonizedRow>(outcome);
        for (const auto& d : good.diagnostics) {
            if (d.kind == "unparsed_value") ++stats.unparsed_values;
            if (d.kind == "unknown_strategy") ++stats.unrecognized_strategies;
            emit_diag(d);
        }
        if (good.result.eval_code_text && classify_evaluation(good.result.eval_code) == ComplianceClass::Unknown) {
            ++stats.unknown_eval_codes;
            ++stats.unknown_eval_code_texts[good.result.eval_code.text()];
        }
        auto [it, inserted] = first_seen.try_emplace(good.sample.sample_id);
        if (inserted) {
            it->second = good.sample;
            if (sink.on_sample) sink.on_sample(std::move(good.sample));
        } else if (!same_sample_fields(it->second, good.sample)) {
            ++stats.sample_conflicts;
            emit_diag({entry.relative_path, row, "sample_conflict",
                       "sample-level values differ from the first row of this sample; first row kept"});
        }
        if (sink.on_result) sink.on_result(std::move(good.result));
    }
    for (std::size_t c = 0; c < counted.size(); ++c) stats.non_empty_cells[counted[c].first] = non_empty[c];
    return stats;
}

bool Deduplicator::admit(std::string_view result_id) {
    if (const auto id = parse_id128(result_id)) return ids_.insert(*id).second;
    return other_.emplace(result_id).second;
}

std::size_t dedup(std::vector<AnalyticalResult>& results) {
    Deduplicator seen;
    const auto before = results.size();
    std::erase_if(results, [&](const AnalyticalResult& r) { return !seen.admit(r.result_id); });
    return before - results.size();
}

std::map<std::string, double> IngestStats::missing_rate_per_variable(const std::vector<std::string>& all_variables) const {
    std::map<std::string, double> out;
    auto rate = [&](std::uint64_t filled) {
        return rows_read == 0 ? 1.0 : 1.0 - static_cast<double>(filled) / static_cast<double>(rows_read);
    };
    for (const auto& v : all_variables) out[v] = 1.0;
    for (const auto& [name, filled] : non_empty_cells) out[name] = rate(filled);
    return out;
}

void IngestStats::accumulate(const IngestStats& o) {
    rows_read += o.rows_read;
    rows_malformed += o.rows_malformed;
    duplicates_removed += o.duplicates_removed;
    samples_emitted += o.samples_emitted;
    results_emitted += o.results_emitted;
    unknown_eval_codes += o.unknown_eval_codes;
    unparsed_values += o.unparsed_values;
    sample_conflicts += o.sample_conflicts;
    unrecognized_strategies += o.unrecognized_strategies;
    for (const auto& [k, v] : o.non_empty_cells) non_empty_cells[k] += v;
    for (const auto& [k, v] : o.unknown_eval_code_texts) unknown_eval_code_texts[k] += v;
}

nlohmann::json IngestStats::to_json(const std::vector<std::string>& all_variables) const {
    nlohmann::json j;
    j["rows_read"] = rows_read;
    j["rows_malformed"] = rows_malformed;
    j["duplicates_removed"] = duplicates_removed;
    j["samples_emitted"] = samples_emitted;
    j["results_emitted"] = results_emitted;
    j["unknown_eval_codes"] = unknown_eval_codes;
    j["unparsed_values"] = unparsed_values;
    j["sample_conflicts"] = sample_conflicts;
    j["unrecognized_strategies"] = unrecognized_strategies;
    j["non_empty_cells"] = non_empty_cells;
    j["unknown_eval_code_texts"] = unknown_eval_code_texts;
    j["missing_rate_per_variable"] = missing_rate_per_variable(all_variables);
    return j;
}

IngestStats IngestStats::from_json(const nlohmann::json& j) {
    IngestStats s;
    s.rows_read = j.value("rows_read", 0ULL);
    s.rows_malformed = j.value("rows_malformed", 0ULL);
    s.duplicates_removed = j.value("duplicates_removed", 0ULL);
    s.samples_emitted = j.value("samples_emitted", 0ULL);
    s.results_emitted = j.value("results_emitted", 0ULL);
    s.unknown_eval_codes = j.value("unknown_eval_codes", 0ULL);
    s.unparsed_values = j.value("unparsed_values", 0ULL);
    s.sample_conflicts = j.value("sample_conflicts", 0ULL);
    s.unrecognized_strategies = j.value("unrecognized_strategies", 0ULL);
    if (j.contains("non_empty_cells")) s.non_empty_cells = j.at("non_empty_cells").get<std::map<std::string, std::uint64_t>>();
    if (j.contains("unknown_eval_code_texts"))
        s.unknown_eval_code_texts = j.at("unknown_eval_code_texts").get<std::map<std::string, std::uint64_t>>();
    return s;
}

}  // namespace chefs
