#include "doctest.h"
#include "helpers.hpp"

using namespace hpart;

namespace {

struct ToyCost {
    SchemaDef schema = testing::toy_schema();
    PredicateSets psets;
    PartitionSchema part;
    StatsMap stats;
    CatalogStore store;
    CostContext ctx;

    ToyCost() {
        psets["r"] = testing::toy_pset();
        std::map<std::string, std::vector<FragmentKey>> keys;
        keys["r"] = {FragmentKey::from_digits("12"), FragmentKey::from_digits("01")};
        part = build_partition_schema(keys, psets, schema);
        stats.emplace("r", testing::toy_stats());
        store = populate_catalog(part, stats);
        ctx = CostContext{&part, &store, &stats, &schema, CostParams{}};
    }
};

PredicateExpr atom_expr(CompareOp op, int c) {
    return PredicateExpr::make_atom({"r", "a", op, Scalar::integer(c)});
}

} // namespace

TEST_CASE("selectivity: equality, inequality and true") {
    ToyCost t;
    // r__12 holds {1,3,5}: no MCVs, sigma = -1 -> distinct 3.
    CHECK(estimate_selectivity(PredicateExpr::make_true(), t.store, "r__12", 3) == 1.0);
    CHECK(estimate_selectivity(atom_expr(CompareOp::Eq, 5), t.store, "r__12", 3) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(estimate_selectivity(atom_expr(CompareOp::Ne, 5), t.store, "r__12", 3) ==
          doctest::Approx(2.0 / 3.0));
}

TEST_CASE("selectivity: ranges interpolate the fragment histogram") {
    ToyCost t;
    // r__12 histogram = parent boundaries under a < 6 -> {1,3,5}, 2 buckets.
    CHECK(estimate_selectivity(atom_expr(CompareOp::Lt, 3), t.store, "r__12", 3) ==
          doctest::Approx(0.5));
    CHECK(estimate_selectivity(atom_expr(CompareOp::Le, 4), t.store, "r__12", 3) ==
          doctest::Approx(0.75));
    CHECK(estimate_selectivity(atom_expr(CompareOp::Gt, 2), t.store, "r__12", 3) ==
          doctest::Approx(0.75));
    CHECK(estimate_selectivity(atom_expr(CompareOp::Lt, 1), t.store, "r__12", 3) == 0.0);
    CHECK(estimate_selectivity(atom_expr(CompareOp::Ge, 5), t.store, "r__12", 3) == 0.0);
    // Monotone in the constant.
    double prev = -1.0;
    for (int c = 0; c <= 12; ++c) {
        double s = estimate_selectivity(atom_expr(CompareOp::Lt, c), t.store, "r__12", 3);
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("selectivity: and/or/not combinators") {
    ToyCost t;
    PredicateExpr a = atom_expr(CompareOp::Lt, 3);  // 0.5
    PredicateExpr b = atom_expr(CompareOp::Eq, 5);  // 1/3
    CHECK(estimate_selectivity(PredicateExpr::make_and({a, b}), t.store, "r__12", 3) ==
          doctest::Approx(0.5 / 3.0));
    CHECK(estimate_selectivity(PredicateExpr::make_or({a, b}), t.store, "r__12", 3) ==
          doctest::Approx(0.5 + 1.0 / 3.0 - 0.5 / 3.0));
    CHECK(estimate_selectivity(PredicateExpr::make_not(a), t.store, "r__12", 3) ==
          doctest::Approx(0.5));
}

TEST_CASE("scan cost follows the page/tuple/operator formula") {
    ToyCost t;
    const auto &rec = t.store.relation_record("r__12"); // 3 tuples, 1 page
    PredicateExpr f = atom_expr(CompareOp::Eq, 5);
    PlanCost pc = scan_cost(rec, &f, t.store, CostParams{});
    CHECK(pc.total == doctest::Approx(1.0 + 3 * 0.01 + 3 * 1 * 0.0025));
    CHECK(pc.output_rows == doctest::Approx(1.0));
    PlanCost bare = scan_cost(rec, nullptr, t.store, CostParams{});
    CHECK(bare.total == doctest::Approx(1.03));
    CHECK(bare.output_rows == doctest::Approx(3.0));
}

TEST_CASE("join cost charges build, probe and emit") {
    PlanCost outer{10.0, 100.0}, inner{5.0, 50.0};
    PlanCost j = join_cost(outer, inner, 0.1, CostParams{});
    CHECK(j.output_rows == doctest::Approx(500.0));
    CHECK(j.total == doctest::Approx(10.0 + 5.0 + 0.0025 * 50.0 + 0.01 * (100.0 + 500.0)));
}

TEST_CASE("query cost prunes unsatisfiable fragments") {
    ToyCost t;
    auto qs = atomize_workload(parse_workload("SELECT a FROM r WHERE a = 5;", t.schema));
    REQUIRE(qs.size() == 1);
    PlanCost pruned = query_cost(qs[0], t.ctx, true);
    PlanCost full = query_cost(qs[0], t.ctx, false);
    // a = 5 contradicts r__01's region (a >= 6), so only r__12 is scanned.
    CHECK(pruned.total == doctest::Approx(1.0375));
    CHECK(full.total == doctest::Approx(2 * 1.0375));
    CHECK(pruned.total <= full.total);
}

TEST_CASE("k-tuple pruning never exceeds the unpruned cost on the star") {
    SchemaDef schema = testing::star_schema();
    Dataset data = testing::star_data();
    auto queries = atomize_workload(parse_workload(
        "SELECT v FROM f, d1, d2 WHERE fk1 = k1 AND fk2 = k2 AND x < 40 AND y = 0;",
        schema));
    PredicateSets psets = minimized_predicate_sets(queries, schema, data);
    std::map<std::string, std::vector<FragmentKey>> keys;
    keys["d1"] = {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")};
    keys["d2"] = {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")};
    PartitionSchema part = build_partition_schema(keys, psets, schema);
    StatsMap stats;
    for (const auto &[name, rel] : data)
        stats.emplace(name, build_relation_stats(
                                rel, effective_predicates(name, psets, schema), data,
                                schema));
    CatalogStore store = populate_catalog(part, stats);
    CostContext ctx{&part, &store, &stats, &schema, CostParams{}};
    PlanCost pruned = query_cost(queries[0], ctx, true);
    PlanCost full = query_cost(queries[0], ctx, false);
    CHECK(pruned.total > 0.0);
    CHECK(pruned.total <= full.total);
    // Deterministic across calls and equal in both execution modes.
    CHECK(query_cost(queries[0], ctx, true).total == pruned.total);
    CHECK(workload_cost(queries, ctx, ExecMode::Serial) ==
          doctest::Approx(workload_cost(queries, ctx, ExecMode::Parallel)));
    std::string report = cost_report(queries, ctx);
    CHECK(report.find("Q1") != std::string::npos);
}
