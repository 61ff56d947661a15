// Command-line front end for the partitioning advisor.

#include "hpart/adaptivity.hpp"
#include "hpart/engine.hpp"
#include "hpart/optimizer.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string schema_def;
    std::string data_dir;
    std::string workload;
    std::string out = ".";
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw hpart::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string &path, const std::string &text) {
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw hpart::Error("cannot write " + path);
    out << text;
}

hpart::SchemaDef load_schema_def(const CommonOpts &opts) {
    if (opts.schema_def.empty()) throw hpart::Error("--schema-def is required");
    return hpart::SchemaDef::load(opts.schema_def);
}

hpart::Dataset load_data(const CommonOpts &opts, const hpart::SchemaDef &schema) {
    if (opts.data_dir.empty()) throw hpart::Error("--data-dir is required");
    hpart::Dataset data;
    for (const auto &rdef : schema.relations) {
        std::string path = opts.data_dir + "/" + rdef.name + ".csv";
        data.emplace(rdef.name, hpart::RelationData::load_csv(path, rdef));
    }
    return data;
}

std::vector<hpart::QueryShape> load_queries(const CommonOpts &opts,
                                            const hpart::SchemaDef &schema) {
    if (opts.workload.empty()) throw hpart::Error("--workload is required");
    return hpart::atomize_workload(hpart::load_workload(opts.workload, schema));
}

struct Pipeline {
    hpart::SchemaDef schema_def;
    hpart::Dataset data;
    std::vector<hpart::QueryShape> queries;
    hpart::PredicateSets psets;
    hpart::StatsMap stats;
};

Pipeline build_pipeline(const CommonOpts &opts, hpart::ExecMode mode) {
    Pipeline p;
    p.schema_def = load_schema_def(opts);
    p.data = load_data(opts, p.schema_def);
    p.queries = load_queries(opts, p.schema_def);
    p.psets = hpart::minimized_predicate_sets(p.queries, p.schema_def, p.data);
    p.stats = hpart::refresh_statistics(p.data, p.psets, p.schema_def, 100, mode);
    return p;
}

int cmd_gen_data(const CommonOpts &opts, double sf, std::uint64_t seed) {
    hpart::Dataset data = hpart::generate_star_toy(sf, seed);
    fs::create_directories(opts.out);
    for (const auto &[rel, rdata] : data) {
        rdata.save_csv(opts.out + "/" + rel + ".csv");
        std::cout << json{{"relation", rel}, {"rows", rdata.row_count()}}.dump() << "\n";
    }
    return 0;
}

int cmd_ingest(const CommonOpts &opts) {
    hpart::SchemaDef schema = load_schema_def(opts);
    hpart::Dataset data = load_data(opts, schema);
    for (const auto &[rel, rdata] : data)
        std::cout << json{{"relation", rel}, {"rows", rdata.row_count()}}.dump() << "\n";
    return 0;
}

int cmd_stats(const CommonOpts &opts) {
    Pipeline p = build_pipeline(opts, hpart::ExecMode::Parallel);
    fs::create_directories(opts.out);
    for (const auto &[rel, st] : p.stats) {
        std::string path = opts.out + "/" + rel + ".mdh";
        hpart::save_snapshot(st, path);
        std::cout << json{{"relation", rel},
                          {"predicates", st.preds.size()},
                          {"cells", st.mdh.cells.size()},
                          {"snapshot", path}}
                         .dump()
                  << "\n";
    }
    return 0;
}

int cmd_optimize(const CommonOpts &opts, const hpart::GAParams &params) {
    Pipeline p = build_pipeline(opts, hpart::ExecMode::Parallel);
    hpart::Problem prob =
        hpart::make_problem(p.schema_def, p.stats, p.psets, p.queries,
                            hpart::ExecMode::Parallel);

    // non-partitioned baseline for the improvement report
    hpart::Chromosome empty{prob.gene_len, {}};
    hpart::PartitionSchema base = hpart::decode_and_repair(empty, prob, params.max_fragments);
    hpart::CatalogStore base_store = hpart::populate_catalog(base, p.stats);
    hpart::CostContext base_ctx{&base, &base_store, &p.stats, &p.schema_def, {}};
    double base_cost = hpart::workload_cost(p.queries, base_ctx);

    hpart::GAResult res = hpart::evolve(prob, params);
    fs::create_directories(opts.out);
    spit(opts.out + "/best.schema", res.best.schema.serialize(p.psets));
    spit(opts.out + "/trace.tsv", hpart::trace_to_text(res.trace));
    std::cout << json{{"baseline_cost", base_cost},
                      {"best_cost", res.best.cost},
                      {"fragments", res.best.fragment_count},
                      {"feasible", res.best.feasible},
                      {"schema", opts.out + "/best.schema"},
                      {"trace", opts.out + "/trace.tsv"}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_validate(const CommonOpts &opts, const std::string &schema_file) {
    hpart::SchemaDef schema_def = load_schema_def(opts);
    hpart::Dataset data = load_data(opts, schema_def);
    std::vector<hpart::QueryShape> queries = load_queries(opts, schema_def);
    hpart::PredicateSets psets;
    hpart::PartitionSchema schema =
        hpart::PartitionSchema::deserialize(slurp(schema_file), schema_def, psets);
    hpart::StatsMap stats = hpart::refresh_statistics(data, psets, schema_def, 100,
                                                      hpart::ExecMode::Parallel);
    hpart::ValidationReport report =
        hpart::validate_simulation(schema, data, queries, stats, schema_def);
    std::string path = opts.out + "/validation.jsonl";
    fs::create_directories(opts.out);
    spit(path, report.to_json_lines());
    std::cout << json{{"mean_error", report.mean_error},
                      {"max_error", report.max_error},
                      {"report", path}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_export_catalog(const CommonOpts &opts, const std::string &schema_file) {
    hpart::SchemaDef schema_def = load_schema_def(opts);
    hpart::Dataset data = load_data(opts, schema_def);
    hpart::PredicateSets psets;
    hpart::PartitionSchema schema =
        hpart::PartitionSchema::deserialize(slurp(schema_file), schema_def, psets);
    hpart::StatsMap stats = hpart::refresh_statistics(data, psets, schema_def, 100,
                                                      hpart::ExecMode::Parallel);
    hpart::CatalogStore store =
        hpart::populate_catalog(schema, stats, hpart::ExecMode::Parallel);
    std::string path = opts.out + "/catalog.sql";
    fs::create_directories(opts.out);
    spit(path, hpart::export_catalog_script(store, stats, schema_def));
    std::cout << json{{"fragments", store.relations.size()}, {"script", path}}.dump()
              << "\n";
    return 0;
}

int cmd_adapt(const CommonOpts &opts, const std::string &schema_file,
              const std::string &remove_query, const std::string &add_query_file,
              bool apply) {
    hpart::SchemaDef schema_def = load_schema_def(opts);
    hpart::Dataset data = load_data(opts, schema_def);
    std::vector<hpart::QueryShape> queries = load_queries(opts, schema_def);
    hpart::PredicateSets psets;
    hpart::PartitionSchema schema =
        hpart::PartitionSchema::deserialize(slurp(schema_file), schema_def, psets);
    hpart::StatsMap stats = hpart::refresh_statistics(data, psets, schema_def, 100,
                                                      hpart::ExecMode::Parallel);
    hpart::CatalogStore store =
        hpart::populate_catalog(schema, stats, hpart::ExecMode::Parallel);

    const hpart::AdaptationPlanBase *plan = nullptr;
    hpart::MergePlan merge;
    hpart::SplitPlan split;
    json report;
    if (!remove_query.empty()) {
        merge = hpart::plan_merge_on_removal(schema, queries, remove_query, psets, stats,
                                             store, schema_def);
        plan = &merge;
        json groups = json::array();
        for (const auto &g : merge.groups)
            groups.push_back({{"relation", g.relation},
                              {"target", g.target},
                              {"sources", g.sources},
                              {"cost", g.cost}});
        report = {{"plan", "merge"}, {"groups", groups}, {"total_cost", merge.total_cost}};
    } else if (!add_query_file.empty()) {
        auto added = hpart::atomize_workload(
            hpart::parse_workload(slurp(add_query_file), schema_def));
        if (added.empty()) throw hpart::Error("no query found in " + add_query_file);
        split = hpart::plan_split_on_addition(schema, added[0], psets, stats, store,
                                              schema_def, data);
        plan = &split;
        json splits = json::array();
        for (const auto &s : split.splits)
            splits.push_back({{"relation", s.relation},
                              {"parent", s.parent},
                              {"smaller", s.smaller},
                              {"cost", s.cost}});
        report = {{"plan", "split"}, {"splits", splits}, {"total_cost", split.total_cost}};
    } else {
        throw hpart::Error("adapt needs --remove-query or --add-query");
    }

    if (apply) {
        hpart::AdaptationResult result = hpart::apply_adaptation(
            *plan, schema, psets, data, schema_def, store, 100, hpart::ExecMode::Parallel);
        fs::create_directories(opts.out);
        spit(opts.out + "/adapted.schema", result.schema.serialize(result.psets));
        report["applied"] = opts.out + "/adapted.schema";
    }
    std::cout << report.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"horizontal partitioning advisor"};
    app.require_subcommand(1);

    CommonOpts opts;
    hpart::GAParams params;
    double sf = 0.002;
    std::uint64_t seed = 42;
    std::string schema_file, remove_query, add_query_file;
    bool apply = false;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--schema-def", opts.schema_def, "schema definition file");
        cmd->add_option("--data-dir", opts.data_dir, "directory of <relation>.csv files");
        cmd->add_option("--workload", opts.workload, "SQL workload file");
        cmd->add_option("--out", opts.out, "output directory");
    };

    auto *gen = app.add_subcommand("gen-data", "generate the toy star dataset");
    add_common(gen);
    gen->add_option("--sf", sf, "scale fraction (fact rows = 6,000,000 * sf)");
    gen->add_option("--seed", seed, "generator seed");

    auto *ingest = app.add_subcommand("ingest", "load and check CSV data");
    add_common(ingest);

    auto *stats = app.add_subcommand("stats", "build statistics artifacts");
    add_common(stats);

    auto *optimize = app.add_subcommand("optimize", "search for a partitioned schema");
    add_common(optimize);
    optimize->add_option("--pop", params.pop, "population size");
    optimize->add_option("--generations", params.generations, "generations");
    optimize->add_option("--mutation", params.p_m, "per-digit mutation probability");
    optimize->add_option("--elitism", params.elitism, "elite count");
    optimize->add_option("--max-fragments", params.max_fragments, "fragment budget W");
    optimize->add_option("--max-relocation", params.max_relocation,
                         "relocated-tuple budget WW");
    optimize->add_option("--seed", params.seed, "search seed");

    auto *validate = app.add_subcommand("validate", "compare simulated vs exact statistics");
    add_common(validate);
    validate->add_option("--schema", schema_file, "serialized partition schema")->required();

    auto *adapt = app.add_subcommand("adapt", "plan a merge or split adaptation");
    add_common(adapt);
    adapt->add_option("--schema", schema_file, "serialized partition schema")->required();
    adapt->add_option("--remove-query", remove_query, "workload query id to remove");
    adapt->add_option("--add-query", add_query_file, "SQL file with one query to add");
    adapt->add_flag("--apply", apply, "apply the plan and write the adapted schema");

    auto *exportc = app.add_subcommand("export-catalog", "emit the catalog SQL script");
    add_common(exportc);
    exportc->add_option("--schema", schema_file, "serialized partition schema")->required();

    CLI11_PARSE(app, argc, argv);

    std::string stage = app.get_subcommands()[0]->get_name();
    try {
        if (gen->parsed()) return cmd_gen_data(opts, sf, seed);
        if (ingest->parsed()) return cmd_ingest(opts);
        if (stats->parsed()) return cmd_stats(opts);
        if (optimize->parsed()) return cmd_optimize(opts, params);
        if (validate->parsed()) return cmd_validate(opts, schema_file);
        if (adapt->parsed())
            return cmd_adapt(opts, schema_file, remove_query, add_query_file, apply);
        if (exportc->parsed()) return cmd_export_catalog(opts, schema_file);
    } catch (const std::exception &e) {
        std::cerr << "error: " << stage << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
