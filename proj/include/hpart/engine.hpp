#pragma once

#include "hpart/costmodel.hpp"

namespace hpart {

/// One fragment's actual tuples plus exact statistics computed from them by
/// the same formulas the catalog simulation uses.
struct MaterializedFragment {
    std::string id;
    FragmentKey key;
    RelationData rows;
    ParentStats exact; // exact per-fragment statistics
    std::size_t exact_relpages = 0; // branch-consistent page count
};

struct MaterializedRelation {
    std::vector<MaterializedFragment> fragments;
};

struct MaterializedSchema {
    std::map<std::string, MaterializedRelation> relations;
};

/// Toy SSB-shaped star: lineorder fact over customer, supplier, part, ddate.
SchemaDef ssb_schema();

/// Workload predicate extraction pipeline: collect per-relation atomics and
/// drop the ones that create no fragments over the loaded base data.
PredicateSets minimized_predicate_sets(const std::vector<QueryShape> &queries,
                                       const SchemaDef &schema, const Dataset &data);

/// Deterministic desk-scale generator; fact rows = round(6,000,000 * sf).
Dataset generate_star_toy(double sf, std::uint64_t seed);

/// Route every tuple through the index tables into its unique fragment and
/// compute exact per-fragment statistics. Relations absent from the schema
/// become single whole-relation fragments.
MaterializedSchema materialize(const PartitionSchema &schema, const Dataset &data,
                               const StatsMap &stats);

/// Exact-statistics catalog built from materialized fragment contents,
/// mirroring the simulated store's record shapes and page-count branches.
CatalogStore exact_catalog(const MaterializedSchema &mat, const Dataset &data,
                           const SchemaDef &schema_def, std::size_t stats_target = 100);

struct ExecutionCounters {
    std::size_t tuples_read = 0;
    std::size_t pages_read = 0; // sum of scanned fragments' exact relpages
    std::size_t result_rows = 0;
};

/// Exact query answer over the materialized schema: scans participating
/// fragments (same pruning rule as the cost model), filters, and hash-joins
/// left-deep in the query's relation order. Rows are returned raw
/// (projection metadata is not applied).
std::vector<std::vector<Scalar>> execute_query(const QueryShape &q,
                                               const MaterializedSchema &mat,
                                               const StatsMap &stats,
                                               ExecutionCounters *counters = nullptr);

struct FragmentDelta {
    std::string fragment;
    std::size_t sim_reltuples = 0, exact_reltuples = 0;
    std::size_t sim_relpages = 0, exact_relpages = 0;
    double max_sigma_delta = 0.0; // largest |sim - exact| stadistinct gap
};

struct QueryError {
    std::string id;
    double sim_cost = 0.0;
    double exact_cost = 0.0;
    double relative_error = 0.0; // |sim - exact| / max(exact, tiny)
};

struct ValidationReport {
    std::vector<FragmentDelta> fragments;
    std::vector<QueryError> queries;
    double mean_error = 0.0, stddev_error = 0.0, min_error = 0.0, max_error = 0.0;

    std::string to_json_lines() const;
};

/// Materialize, rebuild exact statistics, and compare the cost model's
/// output on simulated vs exact catalog records.
ValidationReport validate_simulation(const PartitionSchema &schema, const Dataset &data,
                                     const std::vector<QueryShape> &workload,
                                     const StatsMap &stats, const SchemaDef &schema_def,
                                     const CostParams &params = {});

} // namespace hpart
