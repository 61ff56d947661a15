#pragma once

#include "hpart/catalog.hpp"

namespace hpart {

/// Relative cost units of the reference DBMS's documented defaults.
struct CostParams {
    double seq_page_cost = 1.0;
    double random_page_cost = 4.0; // carried for forward compatibility, unused
    double cpu_tuple_cost = 0.01;
    double cpu_operator_cost = 0.0025;
};

struct PlanCost {
    double total = 0.0;
    double output_rows = 0.0;
};

/// Everything query costing needs; all pointers borrowed and immutable.
struct CostContext {
    const PartitionSchema *schema = nullptr;
    const CatalogStore *store = nullptr;
    const StatsMap *stats = nullptr;
    const SchemaDef *schema_def = nullptr;
    CostParams params;
};

/// Selectivity of an atomized filter against one fragment's attribute
/// records. Equality resolves through MCVs, ranges through MCVs plus linear
/// histogram interpolation; degenerate statistics fall back to defaults
/// (1/3 for ranges, 1/distinct for equality). Clamped to [0,1].
double estimate_selectivity(const PredicateExpr &expr, const CatalogStore &store,
                            const std::string &fragment, double reltuples);

/// Sequential scan of one fragment with the query's filter pushed down.
PlanCost scan_cost(const RelationCatalogRecord &rec, const PredicateExpr *filter,
                   const CatalogStore &store, const CostParams &params);

/// Hash-style join of two costed inputs.
PlanCost join_cost(const PlanCost &outer, const PlanCost &inner, double join_selectivity,
                   const CostParams &params);

/// Cost of one query against a partitioned schema: sums left-deep join
/// chains over every compatible k-tuple of participating fragments.
/// `prune` disables satisfiability pruning for the over-costing property.
PlanCost query_cost(const QueryShape &q, const CostContext &ctx, bool prune = true);

double workload_cost(const std::vector<QueryShape> &queries, const CostContext &ctx,
                     ExecMode mode = ExecMode::Serial);

/// One structured-text record per query for the cost report.
std::string cost_report(const std::vector<QueryShape> &queries, const CostContext &ctx);

} // namespace hpart
