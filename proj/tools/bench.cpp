// Serial vs parallel kernel benchmark on the toy SSB fixture. Each kernel
// runs both modes on identical inputs; the checksum column makes it obvious
// when the two paths diverge.
#include "hpart/adaptivity.hpp"
#include "hpart/engine.hpp"
#include "hpart/optimizer.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

using namespace hpart;

namespace {

template <typename F> double time_seconds(F &&fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char *name, double serial, double parallel, const std::string &check) {
    std::printf("%-24s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0, check.c_str());
}

} // namespace

int main(int argc, char **argv) {
    double sf = argc > 1 ? std::stod(argv[1]) : 0.002;
    std::printf("toy star at sf=%g\n", sf);
    SchemaDef schema = ssb_schema();
    Dataset data = generate_star_toy(sf, 7);
    auto workload = atomize_workload(
        load_workload(std::string(HPART_BENCH_DATA_DIR) + "/ssb_workload.sql", schema));
    PredicateSets psets = minimized_predicate_sets(workload, schema, data);

    std::printf("%-24s %11s %11s %9s   %s\n", "kernel", "serial", "parallel",
                "speedup", "checksum");

    // statistics construction (fact relation dominates)
    StatsMap serial_stats, parallel_stats;
    double ts = time_seconds([&] {
        serial_stats = refresh_statistics(data, psets, schema, 100, ExecMode::Serial);
    });
    double tp = time_seconds([&] {
        parallel_stats = refresh_statistics(data, psets, schema, 100, ExecMode::Parallel);
    });
    std::size_t cells_s = serial_stats.at("lineorder").mdh.cells.size();
    std::size_t cells_p = parallel_stats.at("lineorder").mdh.cells.size();
    row("refresh_statistics", ts, tp,
        "fact cells " + std::to_string(cells_s) +
            (cells_s == cells_p ? " (equal)" : " != " + std::to_string(cells_p)));

    // one mid-sized schema for the remaining kernels
    Problem problem = make_problem(schema, serial_stats, psets, workload);
    std::mt19937_64 rng(5);
    GAParams params;
    params.pop = 8;
    params.max_fragments = 64;
    auto chroms = seed_population(params, problem, rng);
    PartitionSchema part = decode_and_repair(chroms[0], problem, params.max_fragments);

    CatalogStore store_s, store_p;
    ts = time_seconds(
        [&] { store_s = populate_catalog(part, serial_stats, ExecMode::Serial); });
    tp = time_seconds(
        [&] { store_p = populate_catalog(part, serial_stats, ExecMode::Parallel); });
    row("populate_catalog", ts, tp,
        "records " + std::to_string(store_s.relations.size()) +
            (store_s.relations.size() == store_p.relations.size() ? " (equal)" : " (!)"));

    CostContext ctx{&part, &store_s, &serial_stats, &schema, CostParams{}};
    double cost_s = 0, cost_p = 0;
    ts = time_seconds([&] {
        for (int i = 0; i < 20; ++i)
            cost_s = workload_cost(workload, ctx, ExecMode::Serial);
    });
    tp = time_seconds([&] {
        for (int i = 0; i < 20; ++i)
            cost_p = workload_cost(workload, ctx, ExecMode::Parallel);
    });
    row("workload_cost x20", ts, tp,
        "cost " + std::to_string(cost_s) + (cost_s == cost_p ? " (equal)" : " (!)"));

    Problem par_problem = make_problem(schema, serial_stats, psets, workload,
                                       ExecMode::Parallel);
    double fit_s = 0, fit_p = 0; // feasible records only; infeasible cost is inf
    ts = time_seconds([&] {
        for (const auto &c : chroms) {
            FitnessRecord r = evaluate(c, problem, params);
            if (r.feasible) fit_s += r.cost;
        }
    });
    tp = time_seconds([&] {
        for (const auto &c : chroms) {
            FitnessRecord r = evaluate(c, par_problem, params);
            if (r.feasible) fit_p += r.cost;
        }
    });
    row("evaluate x8", ts, tp,
        "fitness sum " + std::to_string(fit_s) + (fit_s == fit_p ? " (equal)" : " (!)"));
    return 0;
}
