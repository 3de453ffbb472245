#include <algorithm>
#include <cmath>
#include <set>

#include <zlib.h>

#include "chefs/analytics.hpp"
#include "chefs/csv.hpp"
#include "chefs/embedded.hpp"
#include "chefs/error.hpp"
#include "chefs/synth.hpp"

namespace fs = std::filesystem;

namespace chefs::synth {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::Canonical: return "canonical";
        case Variant::Ssd2: return "ssd2";
        case Variant::Legacy: return "legacy";
        case Variant::Sparse: return "sparse";
    }
    return "canonical";
}

std::optional<Variant> parse_variant(std::string_view s) noexcept {
    for (auto v : {Variant::Canonical, Variant::Ssd2, Variant::Legacy, Variant::Sparse})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

namespace {

/// mt19937_64 with explicit mappings; std distributions differ between
/// standard libraries and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    std::size_t below(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(next() % n); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
    /// Index drawn with the given integer weights.
    std::size_t weighted(const std::vector<unsigned>& w) {
        unsigned total = 0;
        for (auto x : w) total += x;
        auto r = static_cast<unsigned>(below(total));
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (r < w[i]) return i;
            r -= w[i];
        }
        return w.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

HazardCategory hazard_from_param_id(std::string_view id) {
    if (id.ends_with("-PE")) return HazardCategory::PesticideResidues;
    if (id.ends_with("-VM")) return HazardCategory::VMPR;
    return HazardCategory::ChemicalContaminants;
}

nlohmann::json terms_json(const std::vector<CatalogueTerm>& terms) {
    auto j = nlohmann::json::array();
    for (const auto& t : terms) j.push_back({{"term_id", t.term_id}, {"full_name", t.full_name}});
    return j;
}

std::vector<CatalogueTerm> terms_from_json(const nlohmann::json& j, CatalogueKind kind, std::optional<Era> era) {
    std::vector<CatalogueTerm> out;
    for (const auto& t : j)
        out.push_back({t.at("term_id").get<std::string>(), t.at("full_name").get<std::string>(), kind, era});
    return out;
}

}  // namespace

Pools Pools::builtin() {
    Pools p;
    p.contaminants = parse_catalogue(embedded::param_catalogue_csv(), CatalogueKind::Param, "builtin:param.csv");
    for (const auto& t : p.contaminants) p.contaminant_hazards.push_back(hazard_from_param_id(t.term_id));
    p.products_ssd1 =
        parse_catalogue(embedded::foodex_catalogue_csv(), CatalogueKind::MatrixFoodex, "builtin:matrix_foodex.csv");
    p.products_ssd2 =
        parse_catalogue(embedded::foodex2_catalogue_csv(), CatalogueKind::MatrixFoodex2, "builtin:matrix_foodex2.csv");
    p.origins = {"AT", "BE", "DE", "DK", "ES", "FR", "IT", "NL", "PL", "PT", "SE", "CZ",
                 "CN", "IN", "TR", "US", "BR", "KH", "CH", "NO"};
    return p;
}

// Plan ------------------------------------------------------------------------

nlohmann::json CorpusPlan::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["duplicate_rate"] = duplicate_rate;
    j["noncompliance_rate"] = noncompliance_rate;
    j["unknown_origin_rate"] = unknown_origin_rate;
    j["malformed_rate"] = malformed_rate;
    j["undated_rate"] = undated_rate;
    j["max_results_per_sample"] = max_results_per_sample;
    auto& files_json = j["files"] = nlohmann::json::array();
    for (const auto& f : files)
        files_json.push_back({{"hazard", hazard_code(f.hazard)},
                              {"country", f.country},
                              {"year", f.year},
                              {"rows", f.rows},
                              {"variant", to_string(f.variant)},
                              {"full_names", f.full_names},
                              {"gzip", f.gzip},
                              {"suffix", f.suffix}});
    auto& trade = j["trade_plan"] = nlohmann::json::array();
    for (const auto& t : trade_plan)
        trade.push_back({{"origin", t.origin},
                         {"destination", t.destination},
                         {"hazard", hazard_code(t.hazard)},
                         {"year", t.year},
                         {"samples", t.samples},
                         {"noncompliant", t.noncompliant}});
    auto contaminants = nlohmann::json::array();
    for (std::size_t i = 0; i < pools.contaminants.size(); ++i)
        contaminants.push_back({{"term_id", pools.contaminants[i].term_id},
                                {"full_name", pools.contaminants[i].full_name},
                                {"hazard", hazard_code(pools.contaminant_hazards[i])}});
    j["pools"] = {{"contaminants", contaminants},
                  {"products_ssd1", terms_json(pools.products_ssd1)},
                  {"products_ssd2", terms_json(pools.products_ssd2)},
                  {"origins", pools.origins}};
    return j;
}

namespace {

HazardCategory hazard_field(const nlohmann::json& j, const char* key) {
    const auto h = parse_hazard_code(j.at(key).get<std::string>());
    if (!h) throw Error(ErrorCode::InvalidConfig, "plan: unknown hazard " + j.at(key).dump());
    return *h;
}

}  // namespace

CorpusPlan CorpusPlan::from_json(const nlohmann::json& j) {
    try {
        CorpusPlan plan;
        const std::uint64_t seed = j.value("seed", std::uint64_t{1});
        if (j.contains("auto")) {
            const auto& a = j.at("auto");
            plan = desk_scale(seed, a.value("files", std::size_t{50}), a.value("rows", std::size_t{1'000'000}));
        }
        plan.seed = seed;
        plan.duplicate_rate = j.value("duplicate_rate", plan.duplicate_rate);
        plan.noncompliance_rate = j.value("noncompliance_rate", plan.noncompliance_rate);
        plan.unknown_origin_rate = j.value("unknown_origin_rate", plan.unknown_origin_rate);
        plan.malformed_rate = j.value("malformed_rate", plan.malformed_rate);
        plan.undated_rate = j.value("undated_rate", plan.undated_rate);
        plan.max_results_per_sample = j.value("max_results_per_sample", plan.max_results_per_sample);
        if (j.contains("files")) {
            plan.files.clear();
            for (const auto& f : j.at("files")) {
                FilePlan fp;
                fp.hazard = hazard_field(f, "hazard");
                fp.country = f.at("country").get<std::string>();
                fp.year = f.at("year").get<int>();
                fp.rows = f.at("rows").get<std::size_t>();
                const auto variant = parse_variant(f.value("variant", std::string("canonical")));
                if (!variant) throw Error(ErrorCode::InvalidConfig, "plan: unknown variant " + f.at("variant").dump());
                fp.variant = *variant;
                fp.full_names = f.value("full_names", true);
                fp.gzip = f.value("gzip", false);
                fp.suffix = f.value("suffix", std::string());
                plan.files.push_back(std::move(fp));
            }
        }
        if (j.contains("trade_plan")) {
            plan.trade_plan.clear();
            for (const auto& t : j.at("trade_plan"))
                plan.trade_plan.push_back({t.at("origin").get<std::string>(), t.at("destination").get<std::string>(),
                                           hazard_field(t, "hazard"), t.at("year").get<int>(),
                                           t.at("samples").get<std::size_t>(), t.at("noncompliant").get<std::size_t>()});
        }
        if (j.contains("pools")) {
            const auto& p = j.at("pools");
            if (p.contains("contaminants")) {
                plan.pools.contaminants = terms_from_json(p.at("contaminants"), CatalogueKind::Param, std::nullopt);
                plan.pools.contaminant_hazards.clear();
                for (const auto& t : p.at("contaminants")) plan.pools.contaminant_hazards.push_back(hazard_field(t, "hazard"));
            }
            if (p.contains("products_ssd1"))
                plan.pools.products_ssd1 = terms_from_json(p.at("products_ssd1"), CatalogueKind::MatrixFoodex, Era::SSD1);
            if (p.contains("products_ssd2"))
                plan.pools.products_ssd2 = terms_from_json(p.at("products_ssd2"), CatalogueKind::MatrixFoodex2, Era::SSD2);
            if (p.contains("origins")) plan.pools.origins = p.at("origins").get<std::vector<std::string>>();
        }
        plan.validate();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("plan: ") + e.what());
    }
}

std::string file_name(const FilePlan& f) {
    std::string name = std::string(hazard_code(f.hazard)) + "_" + f.country + "_" + std::to_string(f.year);
    if (!f.suffix.empty()) name += "_" + f.suffix;
    name += f.gzip ? ".csv.gz" : ".csv";
    return name;
}

void CorpusPlan::validate() const {
    for (const double r : {duplicate_rate, noncompliance_rate, unknown_origin_rate, malformed_rate, undated_rate})
        if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidConfig, "plan: rates must lie in [0, 1]");
    if (duplicate_rate + malformed_rate > 1.0)
        throw Error(ErrorCode::InvalidConfig, "plan: duplicate_rate + malformed_rate exceeds 1");
    if (max_results_per_sample < 1) throw Error(ErrorCode::InvalidConfig, "plan: max_results_per_sample must be >= 1");
    if (pools.contaminants.size() != pools.contaminant_hazards.size())
        throw Error(ErrorCode::InvalidConfig, "plan: every contaminant needs a hazard");
    if (pools.products_ssd1.size() < 2 || pools.products_ssd2.size() < 2 || pools.origins.empty())
        throw Error(ErrorCode::InvalidConfig, "plan: product pools need at least two terms per era and one origin");
    for (const auto h : kAllHazards) {
        const auto n = std::count(pools.contaminant_hazards.begin(), pools.contaminant_hazards.end(), h);
        if (n < max_results_per_sample)
            throw Error(ErrorCode::InvalidConfig, "plan: contaminant pool for " + std::string(hazard_code(h)) +
                                                      " is smaller than max_results_per_sample");
    }
    std::set<std::string> names;
    for (const auto& f : files) {
        if (f.country.size() < 2 || f.country.size() > 3 ||
            !std::all_of(f.country.begin(), f.country.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
            throw Error(ErrorCode::InvalidConfig, "plan: bad country code '" + f.country + "'");
        if (f.year < 1900 || f.year > 2100) throw Error(ErrorCode::InvalidConfig, "plan: year out of range");
        if (!names.insert(file_name(f)).second) throw Error(ErrorCode::InvalidConfig, "plan: duplicate file " + file_name(f));
    }
    for (const auto& t : trade_plan) {
        if (t.noncompliant > t.samples) throw Error(ErrorCode::InvalidConfig, "plan: trade pair with noncompliant > samples");
        if (t.origin == t.destination) throw Error(ErrorCode::InvalidConfig, "plan: trade pair links a country to itself");
    }
}

CorpusPlan CorpusPlan::desk_scale(std::uint64_t seed, std::size_t files, std::size_t rows) {
    CorpusPlan plan;
    plan.seed = seed;
    plan.duplicate_rate = 0.02;
    plan.noncompliance_rate = 0.01;
    plan.unknown_origin_rate = 0.1;
    plan.malformed_rate = 0.002;
    plan.undated_rate = 0.01;
    plan.max_results_per_sample = 6;
    Rng rng(seed ^ 0x5eedf11e5ULL);
    const std::vector<std::string> countries{"DE", "FR", "IT", "ES", "NL", "BE", "AT", "PL", "SE", "DK", "CZ", "PT"};
    std::set<std::string> used;
    for (std::size_t i = 0; i < files; ++i) {
        FilePlan f;
        f.hazard = kAllHazards[i % 3];
        f.variant = static_cast<Variant>(i % 4);
        f.full_names = i % 3 != 2;
        f.gzip = i % 5 == 4;
        if (i > 0 && i % 17 == 0) {
            // second file for an existing partition, different header layout
            const auto& prev = plan.files[i - 1];
            f.hazard = prev.hazard;
            f.country = prev.country;
            f.year = prev.year;
            f.suffix = "part2";
        } else {
            do {
                f.country = rng.pick(countries);
                f.year = rng.between(2000, 2024);
            } while (!used.insert(std::string(hazard_code(f.hazard)) + f.country + std::to_string(f.year)).second);
        }
        plan.files.push_back(std::move(f));
    }
    // split rows with +-50% jitter, exact total
    std::vector<double> weights;
    double total = 0;
    for (std::size_t i = 0; i < files; ++i) {
        weights.push_back(0.5 + rng.unit());
        total += weights.back();
    }
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < files; ++i) {
        const auto n = i + 1 == files ? rows - assigned
                                      : static_cast<std::size_t>(std::floor(static_cast<double>(rows) * weights[i] / total));
        plan.files[i].rows = n;
        assigned += n;
    }
    plan.trade_plan = {
        {"CN", "NL", HazardCategory::PesticideResidues, 2019, 320, 19},
        {"KH", "CZ", HazardCategory::PesticideResidues, 2021, 165, 100},
        {"TR", "DE", HazardCategory::PesticideResidues, 2017, 240, 12},
        {"BR", "ES", HazardCategory::ChemicalContaminants, 2012, 130, 7},
    };
    return plan;
}

// Generation ------------------------------------------------------------------

namespace {

struct Column {
    std::string header;
    std::string canonical;  ///< empty for unmapped extras
};

std::vector<Column> columns_for(Variant v, Era era, bool full_names) {
    std::vector<Column> c;
    auto add = [&](std::string h, std::string canonical) { c.push_back({std::move(h), std::move(canonical)}); };
    switch (v) {
        case Variant::Canonical:
            add("sample_code", "sample_code");
            add("product_id", "product_id");
            if (full_names) add("product_full_name", "product_full_name");
            add("origin_country", "origin_country");
            add("sampling_country", "sampling_country");
            add("sampling_year", "sampling_year");
            add("sampling_date", "sampling_date");
            add("strategy", "strategy");
            add("contaminant_id", "contaminant_id");
            if (full_names) add("contaminant_full_name", "contaminant_full_name");
            add("result_value", "result_value");
            add("loq", "loq");
            add("result_unit", "result_unit");
            add("eval_code", "eval_code");
            add("analysis_date", "analysis_date");
            add("lab_comment", "");
            break;
        case Variant::Ssd2:
            add("sampId", "sample_code");
            add("sampCountry", "sampling_country");
            add("origCountry", "origin_country");
            add("prodCode", "product_id");
            if (full_names) add("prodFullName", "product_full_name");
            add("sampY", "sampling_year");
            add("sampM", "sampling_month");
            add("sampDate", "sampling_date");
            add("progSampStrategy", "strategy");
            add("paramCode", "contaminant_id");
            if (full_names) add("paramFullName", "contaminant_full_name");
            add("resVal", "result_value");
            add("resLOQ", "loq");
            add("resUnit", "result_unit");
            add("evalCode", "eval_code");
            add("analysisDate", "analysis_date");
            add("sampSize", "");
            break;
        case Variant::Legacy:
            add(era == Era::SSD1 ? "labSampCode" : "sampleId", "sample_code");
            add("matrixCode", "product_id");
            if (full_names) add("matrixFullName", "product_full_name");
            add("countryOfOrigin", "origin_country");
            add("countryOfSampling", "sampling_country");
            add("samplingYear", "sampling_year");
            add("samplingDate", "sampling_date");
            add("sampStrategy", "strategy");
            add("ParameterCode", "contaminant_id");
            if (full_names) add("parameterFullName", "contaminant_full_name");
            add("resultValue", "result_value");
            add("LOQ", "loq");
            add("evalcode_id", "eval_code");
            add("anDate", "analysis_date");
            add("Remarks", "");
            break;
        case Variant::Sparse:
            add("prodCode", "product_id");
            add("sampling_date", "sampling_date");
            add("sampling_strategy", "strategy");
            add("paramCode", "contaminant_id");
            add("resVal", "result_value");
            add("evalCode", "eval_code");
            break;
    }
    return c;
}

struct Cell {
    std::string text;
    bool present = false;
};
using Row = std::vector<Cell>;

const std::vector<std::string> kNonCompliantCodes{"Greater than max permissible quantities", "Non-compliant", "Detected",
                                                  "Unsatisfactory", "Greater than maximum permissible quantities"};
const std::vector<unsigned> kNonCompliantWeights{50, 25, 10, 10, 5};
// "" stands for an absent code; "pending review" is outside the vocabulary.
const std::vector<std::string> kOtherCodes{"Less than or equal to max permissible quantities",
                                           "Not detected",
                                           "Result not evaluated",
                                           "Compliant",
                                           "Compliant due to measurement uncertainty",
                                           "Acceptable",
                                           "Satisfactory",
                                           "pending review",
                                           ""};
const std::vector<unsigned> kOtherWeights{40, 25, 15, 10, 2, 2, 2, 2, 2};

const std::vector<SamplingStrategy> kStrategies{SamplingStrategy::Objective, SamplingStrategy::Selective,
                                                SamplingStrategy::Suspect,   SamplingStrategy::Convenient,
                                                SamplingStrategy::Other,     SamplingStrategy::NotSpecified};
const std::vector<unsigned> kStrategyWeights{53, 23, 5, 3, 4, 12};

std::string strategy_text(SamplingStrategy s, Variant v) {
    static const char* labels[] = {"objective sampling", "selective sampling", "suspect sampling",
                                   "convenient sampling", "other", "not specified"};
    static const char* codes[] = {"ST10A", "ST20A", "ST30A", "ST40A", "ST90A", "ST00A"};
    static const char* legacy[] = {"Objective sampling", "Selective sampling", "Suspect sampling",
                                   "Convenient sampling", "Other", "Not specified"};
    static const char* shorts[] = {"objective", "selective", "suspect", "convenient", "other", "not specified"};
    const auto i = static_cast<std::size_t>(s);
    switch (v) {
        case Variant::Canonical: return labels[i];
        case Variant::Ssd2: return codes[i];
        case Variant::Legacy: return legacy[i];
        case Variant::Sparse: return shorts[i];
    }
    return labels[i];
}

std::string lowercase(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Casing and spacing noise that canonicalization must undo.
std::string perturb_code(const std::string& code, Rng& rng) {
    switch (rng.below(6)) {
        case 0: {
            std::string s = code;
            for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return s;
        }
        case 1: return lowercase(code);
        case 2: return "  " + code + " ";
        case 3: {
            std::string s = code;
            const auto sp = s.find(' ');
            if (sp != std::string::npos) s.insert(sp, "  ");
            return s;
        }
        default: return code;
    }
}

std::string two_digits(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string decimal(Rng& rng) {
    const auto v = rng.below(100000);
    std::string s = std::to_string(v / 10000) + "." + std::to_string(10000 + v % 10000).substr(1);
    return s;
}

class CorpusWriter {
public:
    CorpusWriter(const CorpusPlan& plan, Truth& truth) : plan_(plan), truth_(truth), rng_(plan.seed) {
        for (const auto& t : plan.trade_plan) planted_origins_.insert(t.origin);
        for (const auto& o : plan.pools.origins)
            if (!planted_origins_.contains(o)) background_origins_.push_back(o);
        for (std::size_t i = 0; i < plan.pools.contaminants.size(); ++i)
            by_hazard_[static_cast<unsigned>(plan.pools.contaminant_hazards[i])].push_back(i);
    }

    void write_file(const FilePlan& f, const std::vector<TradePair>& planted, std::size_t file_index,
                    const fs::path& path, const std::string& relative_path);

private:
    struct SampleSpec {
        std::optional<std::string> origin;  ///< planted origin
        std::optional<bool> noncompliant;   ///< planted outcome
    };

    std::string origin_text(Variant v);
    void emit_sample(const FilePlan& f, Era era, const std::vector<Column>& cols, const SampleSpec& spec,
                     std::size_t results, std::vector<Row>& rows, const std::string& code,
                     const std::string& previous_product, std::string& product_out);

    const CorpusPlan& plan_;
    Truth& truth_;
    Rng rng_;
    std::set<std::string> planted_origins_;
    std::vector<std::string> background_origins_;
    std::array<std::vector<std::size_t>, 3> by_hazard_;
};

void CorpusWriter::emit_sample(const FilePlan& f, Era era, const std::vector<Column>& cols, const SampleSpec& spec,
                               std::size_t results, std::vector<Row>& rows, const std::string& code,
                               const std::string& previous_product, std::string& product_out) {
    const auto& products = era == Era::SSD1 ? plan_.pools.products_ssd1 : plan_.pools.products_ssd2;
    const CatalogueTerm* product = nullptr;
    do {
        product = &rng_.pick(products);
    } while (f.variant == Variant::Sparse && product->term_id == previous_product);
    product_out = product->term_id;

    TruthSample ts;
    ts.product_id = product->term_id;
    ts.product_full_name = product->full_name;
    ts.sampling_country = f.country;

    Cell origin;
    if (spec.origin) {
        origin = {*spec.origin, true};
    } else if (rng_.chance(plan_.unknown_origin_rate) || background_origins_.empty()) {
        const auto k = rng_.below(3);
        origin = k == 0 ? Cell{"", false} : Cell{k == 1 ? "XX" : "UNKNOWN", true};
    } else {
        origin = {rng_.pick(background_origins_), true};
    }
    const bool has_origin_column = f.variant != Variant::Sparse;
    ts.origin = has_origin_column && origin.present && origin.text != "XX" && origin.text != "UNKNOWN" ? origin.text
                                                                                                        : "UNKNOWN";

    const bool undated = !spec.origin && rng_.chance(plan_.undated_rate);
    const int month = rng_.between(1, 12);
    const int day = rng_.between(1, 28);
    Cell date{std::to_string(f.year) + "-" + two_digits(month) + "-" + two_digits(day), true};
    if (f.variant == Variant::Legacy && rng_.chance(0.3)) date.text += "T08:30:00";
    Cell year{std::to_string(f.year), true};
    Cell month_cell{std::to_string(month), true};
    if (undated) date = year = month_cell = Cell{"", false};
    ts.year = undated ? 0 : f.year;

    SamplingStrategy strategy = kStrategies[rng_.weighted(kStrategyWeights)];
    Cell strategy_cell{strategy_text(strategy, f.variant), true};
    const double roll = rng_.unit();
    if (roll < 0.03) {
        strategy_cell = {"", false};
        strategy = SamplingStrategy::NotSpecified;
    } else if (roll < 0.04) {
        strategy_cell = {"random pick", true};
        strategy = SamplingStrategy::NotSpecified;
    }
    ts.strategy = strategy;

    const std::size_t sample_index = truth_.samples.size();
    truth_.samples.push_back(std::move(ts));

    // distinct contaminants; a few borrowed from another hazard's pool
    std::vector<std::size_t> chosen;
    const auto& own = by_hazard_[static_cast<unsigned>(f.hazard)];
    while (chosen.size() < results) {
        const std::size_t c = rng_.chance(0.03) ? rng_.below(plan_.pools.contaminants.size()) : rng_.pick(own);
        if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
    }

    for (std::size_t k = 0; k < results; ++k) {
        const auto& param = plan_.pools.contaminants[chosen[k]];
        bool nc;
        if (spec.noncompliant) nc = *spec.noncompliant && k == 0;
        else nc = rng_.chance(plan_.noncompliance_rate);
        const std::string& base =
            nc ? kNonCompliantCodes[rng_.weighted(kNonCompliantWeights)] : kOtherCodes[rng_.weighted(kOtherWeights)];
        Cell eval = base.empty() ? Cell{"", false} : Cell{perturb_code(base, rng_), true};

        Cell value;
        const double v = rng_.unit();
        if (v < 0.7) value = {decimal(rng_), true};
        else if (v < 0.9) value = {"", false};
        else if (v < 0.95) value = {"NA", false};
        else value = {"<LOQ", true};
        const Cell loq{rng_.chance(0.5) ? "0.01" : "0.005", true};
        const Cell unit{"mg/kg", true};
        const Cell analysis = rng_.chance(0.8) ? Cell{std::to_string(f.year) + "-" + two_digits(month) + "-" +
                                                          two_digits(std::min(28, day + 1)),
                                                      true}
                                               : Cell{"", false};
        const double extra_roll = rng_.unit();
        const Cell extra = extra_roll < 0.5 ? Cell{"", false} : Cell{extra_roll < 0.75 ? "n=1" : "retest, \"B\"", true};

        Row row;
        row.reserve(cols.size());
        for (const auto& col : cols) {
            const auto& c = col.canonical;
            if (c == "sample_code") row.push_back({code, true});
            else if (c == "product_id") row.push_back({product->term_id, true});
            else if (c == "product_full_name") row.push_back({product->full_name, true});
            else if (c == "origin_country") row.push_back(origin);
            else if (c == "sampling_country") row.push_back({f.country, true});
            else if (c == "sampling_year") row.push_back(year);
            else if (c == "sampling_month") row.push_back(month_cell);
            else if (c == "sampling_date") row.push_back(date);
            else if (c == "strategy") row.push_back(strategy_cell);
            else if (c == "contaminant_id") row.push_back({param.term_id, true});
            else if (c == "contaminant_full_name") row.push_back({param.full_name, true});
            else if (c == "result_value") row.push_back(value);
            else if (c == "loq") row.push_back(loq);
            else if (c == "result_unit") row.push_back(unit);
            else if (c == "eval_code") row.push_back(eval);
            else if (c == "analysis_date") row.push_back(analysis);
            else row.push_back(extra);
        }
        rows.push_back(std::move(row));

        TruthResult tr;
        tr.sample = sample_index;
        tr.contaminant_id = param.term_id;
        tr.contaminant_full_name = param.full_name;
        tr.eval_code = eval.present ? lowercase(base) : "";
        tr.hazard = f.hazard;
        truth_.results.push_back(std::move(tr));
    }
}

void append_row(std::string& out, const Row& row, std::size_t limit) {
    for (std::size_t i = 0; i < std::min(limit, row.size()); ++i) {
        if (i) out.push_back(',');
        append_csv_field(out, row[i].text);
    }
    out.push_back('\n');
}

void write_output(const fs::path& path, const std::string& content, bool gzip) {
    if (!gzip) {
        write_text_file(path, content);
        return;
    }
    gzFile gz = gzopen(path.string().c_str(), "wb6");
    if (!gz) throw Error(ErrorCode::Io, "cannot write " + path.string());
    std::size_t off = 0;
    while (off < content.size()) {
        const auto chunk = static_cast<unsigned>(std::min<std::size_t>(content.size() - off, 1 << 20));
        if (gzwrite(gz, content.data() + off, chunk) != static_cast<int>(chunk)) {
            gzclose(gz);
            throw Error(ErrorCode::Io, "cannot write " + path.string());
        }
        off += chunk;
    }
    if (gzclose(gz) != Z_OK) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

void CorpusWriter::write_file(const FilePlan& f, const std::vector<TradePair>& planted, std::size_t file_index,
                              const fs::path& path, const std::string& relative_path) {
    const Era era = f.year >= 2015 ? Era::SSD2 : Era::SSD1;
    const auto cols = columns_for(f.variant, era, f.full_names);
    const auto duplicates = static_cast<std::size_t>(std::llround(plan_.duplicate_rate * static_cast<double>(f.rows)));
    const auto malformed = static_cast<std::size_t>(std::llround(plan_.malformed_rate * static_cast<double>(f.rows)));
    const std::size_t background_rows = f.rows - duplicates - malformed;
    const auto max_results = static_cast<std::size_t>(plan_.max_results_per_sample);

    // sample layout: planted samples first, then background, shuffled together
    std::vector<std::pair<SampleSpec, std::size_t>> specs;
    for (const auto& t : planted)
        for (std::size_t i = 0; i < t.samples; ++i)
            specs.push_back({SampleSpec{t.origin, i < t.noncompliant}, 1 + rng_.below(max_results)});
    for (std::size_t filled = 0; filled < background_rows;) {
        const std::size_t n = std::min(1 + rng_.below(max_results), background_rows - filled);
        specs.push_back({SampleSpec{}, n});
        filled += n;
    }
    if (f.variant != Variant::Sparse)
        for (std::size_t i = specs.size(); i > 1; --i) std::swap(specs[i - 1], specs[rng_.below(i)]);

    std::vector<Row> rows;
    const std::size_t first_result = truth_.results.size();
    std::string previous_product, product;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const std::string code = "S" + std::to_string(file_index) + "-" + std::to_string(s + 1);
        emit_sample(f, era, cols, specs[s].first, specs[s].second, rows, code, previous_product, product);
        previous_product = product;
    }
    const std::size_t unique = rows.size();
    if (unique == 0 && duplicates + malformed > 0)
        throw Error(ErrorCode::InvalidConfig, "plan: " + relative_path + " has no unique rows to copy or corrupt");

    std::vector<std::size_t> copies(unique, 0);
    for (std::size_t d = 0; d < duplicates; ++d) ++copies[rng_.below(unique)];

    // malformed rows: inserted before unique row `at` (unique == end)
    struct Bad {
        std::size_t at;
        Row row;
        bool short_row;
    };
    std::vector<Bad> bad;
    std::size_t contaminant_col = 0, product_col = 0;
    std::optional<std::size_t> year_col;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].canonical == "contaminant_id") contaminant_col = i;
        if (cols[i].canonical == "product_id") product_col = i;
        if (cols[i].canonical == "sampling_year") year_col = i;
    }
    for (std::size_t m = 0; m < malformed; ++m) {
        Bad b{rng_.below(unique + 1), rows[rng_.below(unique)], false};
        switch (rng_.below(year_col ? 5 : 3)) {
            case 0: b.row[contaminant_col] = {"", false}; break;
            case 1: b.row[product_col] = {"N/A", false}; break;
            case 2: b.short_row = true; break;
            case 3: b.row[*year_col] = {"1850", true}; break;
            default: b.row[*year_col] = {"20l7", true}; break;
        }
        bad.push_back(std::move(b));
    }
    std::stable_sort(bad.begin(), bad.end(), [](const Bad& a, const Bad& b) { return a.at < b.at; });

    TruthFile tf;
    tf.relative_path = relative_path;
    tf.hazard = f.hazard;
    tf.country = f.country;
    tf.year = f.year;
    tf.rows_read = unique + duplicates + malformed;
    tf.rows_malformed = malformed;
    tf.duplicates = duplicates;
    tf.results = unique;
    std::vector<std::uint64_t> non_empty(cols.size(), 0);
    auto count_cells = [&](const Row& r) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (r[i].present) ++non_empty[i];
    };

    std::string out;
    out.reserve(rows.size() * 160);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out.push_back(',');
        append_csv_field(out, cols[i].header);
    }
    out.push_back('\n');
    std::size_t next_bad = 0;
    for (std::size_t r = 0; r <= unique; ++r) {
        for (; next_bad < bad.size() && bad[next_bad].at == r; ++next_bad) {
            const auto& b = bad[next_bad];
            append_row(out, b.row, b.short_row ? cols.size() - 1 : cols.size());
            if (!b.short_row) count_cells(b.row);
        }
        if (r == unique) break;
        for (std::size_t c = 0; c <= copies[r]; ++c) {
            append_row(out, rows[r], cols.size());
            count_cells(rows[r]);
        }
    }
    for (std::size_t i = 0; i < cols.size(); ++i)
        tf.non_empty_cells[cols[i].canonical.empty() ? cols[i].header : cols[i].canonical] += non_empty[i];
    (void)first_result;
    write_output(path, out, f.gzip);
    truth_.files.push_back(std::move(tf));
}

std::string catalogue_csv(const std::vector<CatalogueTerm>& terms, std::string_view era) {
    std::string out = "term_id,full_name,era\n";
    for (const auto& t : terms) append_csv_row(out, std::vector<std::string>{t.term_id, t.full_name, std::string(era)});
    return out;
}

nlohmann::json truth_file_json(const TruthFile& f) {
    return {{"file", f.relative_path},
            {"hazard", hazard_code(f.hazard)},
            {"country", f.country},
            {"year", f.year},
            {"rows_read", f.rows_read},
            {"rows_malformed", f.rows_malformed},
            {"duplicates_removed", f.duplicates},
            {"results_emitted", f.results}};
}

}  // namespace

fs::path corpus_data_dir(const fs::path& root) {
    std::error_code ec;
    return fs::is_directory(root / "data", ec) ? root / "data" : root;
}

Corpus generate_corpus(const CorpusPlan& input_plan, const fs::path& out) {
    input_plan.validate();
    CorpusPlan plan = input_plan;
    // trade pairs need an origin column: attach them to a non-sparse file of the
    // matching partition, creating one when necessary
    std::vector<std::vector<TradePair>> planted(plan.files.size());
    for (const auto& t : plan.trade_plan) {
        std::optional<std::size_t> target;
        for (std::size_t i = 0; i < plan.files.size() && !target; ++i) {
            const auto& f = plan.files[i];
            if (f.hazard == t.hazard && f.country == t.destination && f.year == t.year && f.variant != Variant::Sparse)
                target = i;
        }
        if (!target) {
            FilePlan f;
            f.hazard = t.hazard;
            f.country = t.destination;
            f.year = t.year;
            f.suffix = "trade";
            plan.files.push_back(f);
            planted.emplace_back();
            target = plan.files.size() - 1;
        }
        planted[*target].push_back(t);
    }
    plan.validate();

    std::error_code ec;
    fs::create_directories(out / "data", ec);
    fs::create_directories(out / "catalogues", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out.string() + ": " + ec.message());

    Corpus corpus;
    CorpusWriter writer(plan, corpus.truth);
    std::vector<std::size_t> order(plan.files.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return file_name(plan.files[a]) < file_name(plan.files[b]); });
    for (const auto i : order) {
        const auto name = file_name(plan.files[i]);
        writer.write_file(plan.files[i], planted[i], i, out / "data" / name, name);
    }

    std::string params = "term_id,full_name,era\n";
    for (const auto& t : plan.pools.contaminants)
        append_csv_row(params, std::vector<std::string>{t.term_id, t.full_name, ""});
    write_text_file(out / "catalogues" / "param.csv", params);
    write_text_file(out / "catalogues" / "matrix_foodex.csv", catalogue_csv(plan.pools.products_ssd1, "SSD1"));
    write_text_file(out / "catalogues" / "matrix_foodex2.csv", catalogue_csv(plan.pools.products_ssd2, "SSD2"));
    write_text_file(out / "catalogues" / "country.csv", std::string(embedded::country_catalogue_csv()));
    write_text_file(out / "plan.json", input_plan.to_json().dump(2) + "\n");

    auto& ledger = corpus.ledger;
    std::uint64_t rows = 0, malformed = 0, dups = 0;
    auto files_json = nlohmann::json::array();
    for (const auto& f : corpus.truth.files) {
        rows += f.rows_read;
        malformed += f.rows_malformed;
        dups += f.duplicates;
        files_json.push_back(truth_file_json(f));
    }
    std::uint64_t nc = 0;
    for (const auto& r : corpus.truth.results)
        if (classify_evaluation(EvaluationCode(r.eval_code)) == ComplianceClass::NonCompliant) ++nc;
    ledger["seed"] = plan.seed;
    ledger["totals"] = {{"rows_read", rows},
                        {"rows_malformed", malformed},
                        {"duplicates_removed", dups},
                        {"results_emitted", corpus.truth.results.size()},
                        {"samples", corpus.truth.samples.size()},
                        {"noncompliant_results", nc}};
    ledger["files"] = std::move(files_json);
    auto& reports = ledger["reports"] = nlohmann::json::object();
    for (const auto& rep :
         naive_reports(corpus.truth, standard_report_requests(), embedded::grouping_dictionary_csv()))
        reports[rep.name] = rep.to_json();
    write_text_file(out / "ledger.json", ledger.dump(1) + "\n");
    return corpus;
}

}  // namespace chefs::synth
