#include "chefs/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "chefs/analytics.hpp"
#include "chefs/csv.hpp"
#include "chefs/embedded.hpp"
#include "chefs/error.hpp"
#include "chefs/hash.hpp"
#include "chefs/log.hpp"
#include "chefs/pipeline.hpp"
#include "chefs/svg.hpp"
#include "chefs/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace chefs::cli {

namespace {

/// Every setting; config-file keys are the long flag names with '_' for '-'.
struct RunConfig {
    std::string input, store, output, catalogues, synonyms, dictionary, log_level = "info";
    unsigned jobs = 1;
    bool overwrite = false;
    int ssd2_from_year = kDefaultSsd2FromYear;
    // report parameters
    std::optional<std::string> hazard, parent, group_by;
    std::optional<long long> n, from, to, min_samples, top, top_n, level, top_hazards, top_products;
    // synth
    std::string plan, corpus;
    std::uint64_t seed = 1;
    std::size_t files = 50, rows = 1'000'000;
};

const std::vector<std::string> kParamKeys{"hazard", "parent", "group_by", "n", "from", "to", "min_samples",
                                          "top", "top_n", "level", "top_hazards", "top_products"};

json param_json(const RunConfig& c, const std::string& key) {
    auto s = [](const std::optional<std::string>& v) { return v ? json(*v) : json(); };
    auto i = [](const std::optional<long long>& v) { return v ? json(*v) : json(); };
    if (key == "hazard") return s(c.hazard);
    if (key == "parent") return s(c.parent);
    if (key == "group_by") return s(c.group_by);
    if (key == "n") return i(c.n);
    if (key == "from") return i(c.from);
    if (key == "to") return i(c.to);
    if (key == "min_samples") return i(c.min_samples);
    if (key == "top") return i(c.top);
    if (key == "top_n") return i(c.top_n);
    if (key == "level") return i(c.level);
    if (key == "top_hazards") return i(c.top_hazards);
    return i(c.top_products);
}

void apply_config_file(const fs::path& path, RunConfig& c) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, path.string() + ": expected a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "input") c.input = v.get<std::string>();
            else if (key == "store") c.store = v.get<std::string>();
            else if (key == "output") c.output = v.get<std::string>();
            else if (key == "catalogues") c.catalogues = v.get<std::string>();
            else if (key == "synonyms") c.synonyms = v.get<std::string>();
            else if (key == "dictionary") c.dictionary = v.get<std::string>();
            else if (key == "log_level") c.log_level = v.get<std::string>();
            else if (key == "jobs") c.jobs = v.get<unsigned>();
            else if (key == "overwrite") c.overwrite = v.get<bool>();
            else if (key == "ssd2_from_year") c.ssd2_from_year = v.get<int>();
            else if (key == "hazard") c.hazard = v.get<std::string>();
            else if (key == "parent") c.parent = v.get<std::string>();
            else if (key == "group_by") c.group_by = v.get<std::string>();
            else if (key == "n") c.n = v.get<long long>();
            else if (key == "from") c.from = v.get<long long>();
            else if (key == "to") c.to = v.get<long long>();
            else if (key == "min_samples") c.min_samples = v.get<long long>();
            else if (key == "top") c.top = v.get<long long>();
            else if (key == "top_n") c.top_n = v.get<long long>();
            else if (key == "level") c.level = v.get<long long>();
            else if (key == "top_hazards") c.top_hazards = v.get<long long>();
            else if (key == "top_products") c.top_products = v.get<long long>();
            else if (key == "plan") c.plan = v.get<std::string>();
            else if (key == "corpus") c.corpus = v.get<std::string>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "files") c.files = v.get<std::size_t>();
            else if (key == "rows") c.rows = v.get<std::size_t>();
            else throw Error(ErrorCode::InvalidConfig, path.string() + ": unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
}

/// Content digest of an optional input file, "builtin" when absent.
json file_digest(const std::string& path) {
    if (path.empty()) return "builtin";
    return sha256_file_hex(path);
}

json catalogue_digests(const std::string& dir) {
    if (dir.empty()) return "builtin";
    json j = json::object();
    for (const char* name : {"param.csv", "matrix_foodex.csv", "matrix_foodex2.csv", "country.csv"})
        if (fs::exists(fs::path(dir) / name)) j[name] = sha256_file_hex(fs::path(dir) / name);
    return j;
}

/// Provenance echo. Locations and the degree of parallelism are left out so
/// that reruns elsewhere or with other --jobs produce identical files; inputs
/// are identified by content digests instead.
json config_echo(const RunConfig& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["ssd2_from_year"] = c.ssd2_from_year;
    j["catalogues"] = catalogue_digests(c.catalogues);
    j["synonyms"] = file_digest(c.synonyms);
    j["dictionary"] = file_digest(c.dictionary);
    json params = json::object();
    for (const auto& k : kParamKeys)
        if (auto v = param_json(c, k); !v.is_null()) params[k] = v;
    j["parameters"] = params;
    return j;
}

void require_dir(const std::string& path, const char* what) {
    if (path.empty()) throw Error(ErrorCode::InvalidConfig, std::string("--") + what + " is required");
    std::error_code ec;
    if (!fs::is_directory(path, ec)) throw Error(ErrorCode::Io, std::string(what) + " directory not found: " + path);
}

void require_file(const std::string& path, const char* what) {
    std::error_code ec;
    if (!path.empty() && !fs::is_regular_file(path, ec))
        throw Error(ErrorCode::Io, std::string(what) + " file not found: " + path);
}

void ensure_output(const std::string& path) {
    if (path.empty()) throw Error(ErrorCode::InvalidConfig, "--output is required");
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + path + ": " + ec.message());
}

struct Inputs {
    SynonymTable synonyms_storage = SynonymTable::builtin();
    CatalogueIndex catalogues;
    IngestContext ctx;

    explicit Inputs(const RunConfig& c) {
        require_file(c.synonyms, "synonyms");
        if (!c.synonyms.empty()) synonyms_storage = SynonymTable::load(c.synonyms);
        if (c.catalogues.empty()) {
            catalogues = CatalogueIndex::builtin();
        } else {
            require_dir(c.catalogues, "catalogues");
            const fs::path dir(c.catalogues);
            const std::pair<const char*, CatalogueKind> files[] = {{"param.csv", CatalogueKind::Param},
                                                                    {"matrix_foodex.csv", CatalogueKind::MatrixFoodex},
                                                                    {"matrix_foodex2.csv", CatalogueKind::MatrixFoodex2},
                                                                    {"country.csv", CatalogueKind::Country}};
            for (const auto& [name, kind] : files)
                if (fs::exists(dir / name)) catalogues.add(load_catalogue(dir / name, kind));
        }
        ctx.synonyms = &synonyms_storage;
        ctx.catalogues = &catalogues;
    }
};

std::optional<log::Level> parse_level(const std::string& s) {
    if (s == "debug") return log::Level::Debug;
    if (s == "info") return log::Level::Info;
    if (s == "warn") return log::Level::Warn;
    if (s == "error") return log::Level::Error;
    if (s == "off") return log::Level::Off;
    return std::nullopt;
}

// Commands ---------------------------------------------------------------------

int cmd_ingest(const RunConfig& c) {
    require_dir(c.input, "input");
    if (c.store.empty()) throw Error(ErrorCode::InvalidConfig, "--store is required (or set CHEFS_STORE)");
    Inputs in(c);
    IngestOptions opt;
    opt.input_root = c.input;
    opt.store_root = c.store;
    opt.ctx = in.ctx;
    opt.ssd2_from_year = c.ssd2_from_year;
    opt.jobs = c.jobs;
    opt.overwrite = c.overwrite;
    log::info("ingest_started", {{"input", c.input}, {"store", c.store}, {"jobs", c.jobs}});
    const auto summary = run_ingest(opt);
    json stats = summary.to_json();
    stats["config"] = config_echo(c, "ingest");
    write_text_file(fs::path(c.store) / "ingest_stats.json", stats.dump(2) + "\n");
    const auto& t = summary.totals;
    log::info("ingest_finished", {{"files", summary.files.size()}, {"partitions", summary.partitions},
                                  {"store_checksum", summary.store_checksum}});
    std::cout << "ingested " << summary.files.size() << " files into " << summary.partitions << " partitions ("
              << summary.skipped.size() << " skipped)\n"
              << "  rows read:          " << t.rows_read << "\n"
              << "  results emitted:    " << t.results_emitted << "\n"
              << "  duplicates removed: " << t.duplicates_removed << "\n"
              << "  malformed rows:     " << t.rows_malformed << "\n"
              << "  store checksum:     " << summary.store_checksum << "\n";
    return kOk;
}

int cmd_validate(const RunConfig& c) {
    require_dir(c.input, "input");
    require_dir(c.store, "store");
    Inputs in(c);
    const Store store(c.store);
    ValidateOptions opt;
    opt.ctx = in.ctx;
    opt.ssd2_from_year = c.ssd2_from_year;
    opt.jobs = c.jobs;
    const auto report = round_trip_validate(store, c.input, opt);
    if (!c.output.empty()) {
        ensure_output(c.output);
        json j = report.to_json();
        j["config"] = config_echo(c, "validate");
        j["store_checksum"] = store.checksum();
        write_text_file(fs::path(c.output) / "validation.json", j.dump(2) + "\n");
    }
    std::uint64_t rows = 0, matched = 0;
    for (const auto& p : report.partitions) {
        rows += p.rows_read;
        matched += p.rows_matched;
        for (const auto& m : p.mismatches)
            log::warn("mismatch", {{"file", m.file}, {"row", m.row}, {"column", m.column}, {"kind", m.kind}});
    }
    std::cout << "validated " << report.partitions.size() << " partitions: " << matched << " of " << rows
              << " source rows matched, " << report.mismatch_count << " mismatches\n";
    return report.ok() ? kOk : kValidationFailed;
}

/// Requests for `name` ("all" expands to every report). Set parameters
/// override the defaults of reports that take them; a single named report
/// receives every set parameter and rejects the ones it does not know.
std::vector<ReportRequest> build_requests(const RunConfig& c, const std::string& name,
                                          const std::vector<std::string>& universe) {
    std::vector<ReportRequest> out;
    if (name == "all") {
        for (auto req : standard_report_requests()) {
            if (std::find(universe.begin(), universe.end(), req.name) == universe.end()) continue;
            for (const auto& k : kParamKeys)
                if (req.params.contains(k))
                    if (auto v = param_json(c, k); !v.is_null()) req.params[k] = v;
            out.push_back(std::move(req));
        }
        return out;
    }
    ReportRequest req{name, json::object()};
    for (const auto& k : kParamKeys)
        if (auto v = param_json(c, k); !v.is_null()) req.params[k] = v;
    out.push_back(std::move(req));
    return out;
}

void check_report_name(const std::string& name, const std::vector<std::string>& valid) {
    if (name != "all" && std::find(valid.begin(), valid.end(), name) == valid.end())
        throw Error(ErrorCode::UnknownReport, "unknown report '" + name + "'; valid names: " + join(valid, ", "));
}

struct Analysis {
    std::optional<GroupingDictionary> dict;
    Dataset data;
    AnalyticsContext ctx;
};

Analysis load_analysis(const RunConfig& c) {
    require_dir(c.store, "store");
    require_file(c.dictionary, "dictionary");
    Analysis a;
    if (!c.dictionary.empty()) {
        a.dict = GroupingDictionary::load(c.dictionary);
        a.ctx.dictionary = &*a.dict;
    }
    a.ctx.jobs = c.jobs;
    const Store store(c.store);
    a.data = Dataset::load(store, c.jobs);
    return a;
}

int cmd_report(const RunConfig& c, const std::string& name) {
    check_report_name(name, report_names());
    ensure_output(c.output);
    const auto requests = build_requests(c, name, report_names());
    auto a = load_analysis(c);
    json provenance{{"config", config_echo(c, "report " + name)}, {"store_checksum", a.data.store_checksum()}};
    for (const auto& req : requests) {
        const auto rep = run_report(a.data, req, a.ctx);
        write_report_files(rep, c.output, provenance);
        log::info("report_written", {{"report", rep.name}, {"rows", rep.primary().rows.size()}});
        std::cout << rep.name << ": " << rep.primary().rows.size() << " rows\n";
    }
    write_text_file(fs::path(c.output) / "config.json", provenance.dump(2) + "\n");
    return kOk;
}

int cmd_plot(const RunConfig& c, const std::string& name) {
    const auto& plottable = plottable_reports();
    if (name != "all" && std::find(plottable.begin(), plottable.end(), name) == plottable.end()) {
        check_report_name(name, report_names());
        throw Error(ErrorCode::UnknownReport,
                    "report '" + name + "' cannot be plotted; plottable reports: " + join(plottable, ", "));
    }
    ensure_output(c.output);
    const auto requests = build_requests(c, name, plottable);
    auto a = load_analysis(c);
    for (const auto& req : requests) {
        const auto rep = run_report(a.data, req, a.ctx);
        const auto path = fs::path(c.output) / (rep.name + ".svg");
        write_text_file(path, render_svg(rep));
        std::cout << "wrote " << path.string() << "\n";
    }
    return kOk;
}

int cmd_synth_generate(const RunConfig& c) {
    if (c.output.empty()) throw Error(ErrorCode::InvalidConfig, "--output is required");
    require_file(c.plan, "plan");
    synth::CorpusPlan plan;
    if (!c.plan.empty()) {
        try {
            plan = synth::CorpusPlan::from_json(json::parse(read_text_file(c.plan)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, c.plan + ": " + e.what());
        }
    } else {
        plan = synth::CorpusPlan::desk_scale(c.seed, c.files, c.rows);
    }
    const auto corpus = synth::generate_corpus(plan, c.output);
    const auto& t = corpus.ledger.at("totals");
    std::cout << "generated " << corpus.truth.files.size() << " files in " << c.output << "\n"
              << "  rows:       " << t.at("rows_read") << "\n"
              << "  results:    " << t.at("results_emitted") << "\n"
              << "  samples:    " << t.at("samples") << "\n"
              << "  duplicates: " << t.at("duplicates_removed") << "\n"
              << "  malformed:  " << t.at("rows_malformed") << "\n";
    return kOk;
}

int cmd_synth_oracle(const RunConfig& c, const std::string& name) {
    require_dir(c.corpus, "corpus");
    check_report_name(name, report_names());
    require_file(c.dictionary, "dictionary");
    const std::string dict = c.dictionary.empty() ? std::string(embedded::grouping_dictionary_csv())
                                                  : read_text_file(c.dictionary);
    const auto truth = synth::oracle_parse(c.corpus);
    const auto reports = synth::naive_reports(truth, build_requests(c, name, report_names()), dict);
    if (!c.output.empty()) {
        ensure_output(c.output);
        const json provenance{{"config", config_echo(c, "synth oracle " + name)}};
        for (const auto& r : reports) write_report_files(r, c.output, provenance);
    }
    std::cout << "oracle: " << truth.results.size() << " results, " << truth.samples.size() << " samples in "
              << truth.files.size() << " files\n";

    // compare with the generation ledger when there is one
    const fs::path ledger_path = fs::path(c.corpus) / "ledger.json";
    if (!fs::exists(ledger_path)) return kOk;
    const auto ledger = json::parse(read_text_file(ledger_path));
    std::size_t differences = 0;
    for (const auto& r : reports) {
        if (!ledger.at("reports").contains(r.name)) continue;
        for (const auto& d : compare_reports(AggregateReport::from_json(ledger.at("reports").at(r.name)), r)) {
            ++differences;
            log::warn("ledger_difference", {{"report", r.name}, {"detail", d}});
        }
    }
    std::cout << "ledger: " << (differences == 0 ? "match" : std::to_string(differences) + " differences") << "\n";
    return differences == 0 ? kOk : kValidationFailed;
}

int exit_code(const Error& e) {
    switch (e.code()) {
        case ErrorCode::SchemaConflict: return kSchemaConflict;
        default: return kFatal;
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    RunConfig c;
    if (const char* env = std::getenv("CHEFS_STORE")) c.store = env;

    // the config file is applied first so that flags override it
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        if (path.empty()) continue;
        try {
            require_file(path, "config");
            apply_config_file(path, c);
        } catch (const Error& e) {
            log::error("fatal", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}});
            std::cerr << "error: " << e.what() << "\n";
            return exit_code(e);
        }
    }

    CLI::App app{"chefs: harmonize, store and analyse food-safety monitoring data"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; keys mirror the long flags");
    app.add_option("-j,--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--log-level", c.log_level, "debug, info, warn, error or off");

    auto add_store = [&](CLI::App* s) { s->add_option("--store", c.store, "Store root (default: $CHEFS_STORE)"); };
    auto add_inputs = [&](CLI::App* s) {
        s->add_option("-i,--input", c.input, "Directory of source CSV files");
        s->add_option("--catalogues", c.catalogues, "Directory with param.csv, matrix_foodex.csv, matrix_foodex2.csv");
        s->add_option("--synonyms", c.synonyms, "Synonym table CSV");
        s->add_option("--ssd2-from-year", c.ssd2_from_year, "First reporting year using SSD2 catalogues");
    };
    auto add_params = [&](CLI::App* s) {
        s->add_option("--hazard", c.hazard, "CC, PEST or VMPR");
        s->add_option("--n", c.n, "Rows per hazard (top_contaminants)");
        s->add_option("--from", c.from, "First year");
        s->add_option("--to", c.to, "Last year");
        s->add_option("--min-samples", c.min_samples, "Trade links: keep pairs with more samples than this");
        s->add_option("--top", c.top, "Rows to keep (0 = all)");
        s->add_option("--top-n", c.top_n, "Countries to keep");
        s->add_option("--level", c.level, "Ontology level");
        s->add_option("--parent", c.parent, "Ontology level-1 segment to restrict to");
        s->add_option("--group-by", c.group_by, "overall, year or country_hazard");
        s->add_option("--top-hazards", c.top_hazards, "Contaminants per hazard in cross tables");
        s->add_option("--top-products", c.top_products, "Products per hazard in cross tables");
        s->add_option("--dictionary", c.dictionary, "Grouping dictionary CSV");
        s->add_option("-o,--output", c.output, "Output directory");
    };

    auto* ingest = app.add_subcommand("ingest", "Discover, harmonize and store source files");
    add_inputs(ingest);
    add_store(ingest);
    ingest->add_flag("--overwrite", c.overwrite, "Replace an existing store");

    auto* validate = app.add_subcommand("validate", "Round-trip check of a store against its sources");
    add_inputs(validate);
    add_store(validate);
    validate->add_option("-o,--output", c.output, "Directory for validation.json");

    std::string report_name, plot_name, oracle_name = "all";
    auto* report = app.add_subcommand("report", "Compute a report (or all) into CSV and JSON files");
    report->add_option("name", report_name, "Report name or 'all'")->required();
    add_store(report);
    add_params(report);

    auto* plot = app.add_subcommand("plot", "Render a report as SVG");
    plot->add_option("name", plot_name, "Report name or 'all'")->required();
    add_store(plot);
    add_params(plot);

    auto* synth = app.add_subcommand("synth", "Synthetic corpora and the reference oracle");
    synth->require_subcommand(1);
    auto* generate = synth->add_subcommand("generate", "Write a synthetic corpus and its ledger");
    generate->add_option("--plan", c.plan, "Plan JSON (default: desk-scale plan from --seed)");
    generate->add_option("--seed", c.seed, "Seed for the desk-scale plan");
    generate->add_option("--files", c.files, "Files in the desk-scale plan");
    generate->add_option("--rows", c.rows, "Rows in the desk-scale plan");
    generate->add_option("-o,--output", c.output, "Corpus directory")->required();
    auto* oracle = synth->add_subcommand("oracle", "Recompute reports straight from a corpus and check its ledger");
    oracle->add_option("name", oracle_name, "Report name or 'all'");
    oracle->add_option("--corpus", c.corpus, "Corpus directory")->required();
    add_params(oracle);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kFatal;
    }

    try {
        const auto level = parse_level(c.log_level);
        if (!level) throw Error(ErrorCode::InvalidConfig, "unknown log level '" + c.log_level + "'");
        log::set_level(*level);
        if (c.jobs == 0) throw Error(ErrorCode::InvalidConfig, "jobs must be at least 1");
        if (*ingest) return cmd_ingest(c);
        if (*validate) return cmd_validate(c);
        if (*report) return cmd_report(c, report_name);
        if (*plot) return cmd_plot(c, plot_name);
        if (*generate) return cmd_synth_generate(c);
        if (*oracle) return cmd_synth_oracle(c, oracle_name);
    } catch (const Error& e) {
        log::error("fatal", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        log::error("fatal", {{"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    }
    return kFatal;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace chefs::cli
