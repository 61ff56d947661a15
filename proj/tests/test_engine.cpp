#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <set>

using namespace hpart;

namespace {

std::vector<std::vector<Scalar>> sorted_rows(std::vector<std::vector<Scalar>> rows) {
    auto key = [](const std::vector<Scalar> &r) {
        std::string s;
        for (const auto &v : r) s += v.to_sql() + "|";
        return s;
    };
    std::sort(rows.begin(), rows.end(),
              [&](const auto &a, const auto &b) { return key(a) < key(b); });
    return rows;
}

struct ToyMat {
    SchemaDef schema = testing::toy_schema();
    Dataset data = testing::toy_data();
    PredicateSets psets;
    StatsMap stats;

    ToyMat() {
        psets["r"] = testing::toy_pset();
        stats = refresh_statistics(data, psets, schema);
    }

    MaterializedSchema mat(std::vector<std::string> digits) const {
        std::map<std::string, std::vector<FragmentKey>> keys;
        for (const auto &d : digits) keys["r"].push_back(FragmentKey::from_digits(d));
        PartitionSchema ps = build_partition_schema(keys, psets, schema);
        return materialize(ps, data, stats);
    }
};

} // namespace

TEST_CASE("the toy generator is deterministic and referentially intact") {
    Dataset a = generate_star_toy(0.001, 42);
    Dataset b = generate_star_toy(0.001, 42);
    CHECK(a.at("ddate").row_count() == 2557); // all days of 1992-1998
    CHECK(a.at("customer").row_count() == 30);
    CHECK(a.at("supplier").row_count() == 2);
    CHECK(a.at("part").row_count() == 200);
    CHECK(a.at("lineorder").row_count() == 6000);
    for (const auto &[name, rel] : a) {
        REQUIRE(b.at(name).row_count() == rel.row_count());
        for (std::size_t r = 0; r < rel.row_count(); r += 97)
            for (std::size_t c = 0; c < rel.column_count(); ++c)
                CHECK(b.at(name).value(r, c) == rel.value(r, c));
    }
    Dataset c = generate_star_toy(0.001, 43);
    bool any_diff = false;
    const RelationData &lo_a = a.at("lineorder"), &lo_c = c.at("lineorder");
    for (std::size_t r = 0; r < 100 && !any_diff; ++r)
        if (!(lo_a.value(r, 6) == lo_c.value(r, 6))) any_diff = true;
    CHECK(any_diff); // a different seed changes the data

    // Referential integrity of every FK column.
    const RelationData &lo = a.at("lineorder");
    std::set<Scalar> dates;
    for (std::size_t r = 0; r < a.at("ddate").row_count(); ++r)
        dates.insert(a.at("ddate").value(r, 0));
    for (std::size_t r = 0; r < lo.row_count(); ++r) {
        CHECK(dates.count(lo.value(r, lo.column_index("lo_orderdate"))) == 1);
        auto in_range = [&](const char *attr, std::size_t n) {
            Scalar v = lo.value(r, lo.column_index(attr));
            return Scalar::integer(1) <= v && v <= Scalar::integer(static_cast<std::int64_t>(n));
        };
        CHECK(in_range("lo_custkey", 30));
        CHECK(in_range("lo_suppkey", 2));
        CHECK(in_range("lo_partkey", 200));
    }
    CHECK_THROWS_AS(generate_star_toy(0.5, 1), Error); // desk-scale only
}

TEST_CASE("materialize routes every tuple into exactly one fragment") {
    ToyMat t;
    MaterializedSchema mat = t.mat({"12", "01"});
    const auto &frags = mat.relations.at("r").fragments;
    REQUIRE(frags.size() == 2);
    std::size_t total = 0;
    for (const auto &f : frags) total += f.rows.row_count();
    CHECK(total == 6);
    for (const auto &f : frags) {
        if (f.id == "r__12") {
            CHECK(f.rows.row_count() == 3);
            CHECK(f.exact.reltuples == 3);
            CHECK(f.exact_relpages == 1);
        }
    }
    // The trivial schema keeps one whole-relation fragment.
    MaterializedSchema one = t.mat({"22"});
    REQUIRE(one.relations.at("r").fragments.size() == 1);
    CHECK(one.relations.at("r").fragments[0].rows.row_count() == 6);
    CHECK(one.relations.at("r").fragments[0].exact_relpages ==
          t.stats.at("r").parent.relpages);
}

TEST_CASE("the executor prunes fragments and counts its work") {
    ToyMat t;
    auto qs = atomize_workload(parse_workload("SELECT a FROM r WHERE a = 5;", t.schema));
    MaterializedSchema part = t.mat({"12", "01"});
    ExecutionCounters c1;
    auto rows1 = execute_query(qs[0], part, t.stats, &c1);
    CHECK(rows1.size() == 1);
    CHECK(c1.result_rows == 1);
    CHECK(c1.tuples_read == 3); // only r__12 is scanned
    CHECK(c1.pages_read == 1);
    MaterializedSchema whole = t.mat({"22"});
    ExecutionCounters c2;
    auto rows2 = execute_query(qs[0], whole, t.stats, &c2);
    CHECK(c2.tuples_read == 6); // no pruning possible
    CHECK(sorted_rows(rows1) == sorted_rows(rows2));
}

TEST_CASE("partitioning is transparent to join results on the star") {
    SchemaDef schema = testing::star_schema();
    Dataset data = testing::star_data();
    auto qs = atomize_workload(parse_workload(
        "SELECT v FROM f, d1, d2 WHERE fk1 = k1 AND fk2 = k2 AND x < 40 AND y = 0;",
        schema));
    PredicateSets psets = minimized_predicate_sets(qs, schema, data);
    StatsMap stats = refresh_statistics(data, psets, schema);
    auto run = [&](std::map<std::string, std::vector<FragmentKey>> keys) {
        PartitionSchema ps = build_partition_schema(keys, psets, schema);
        MaterializedSchema mat = materialize(ps, data, stats);
        ExecutionCounters c;
        auto rows = execute_query(qs[0], mat, stats, &c);
        return std::pair{sorted_rows(rows), c};
    };
    auto m_d1 = psets.at("d1").size(), m_d2 = psets.at("d2").size();
    auto [trivial, ct] = run({{"d1", {FragmentKey::all_wild(m_d1)}},
                              {"d2", {FragmentKey::all_wild(m_d2)}}});
    auto [fine, cf] = run({{"d1", {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")}},
                           {"d2", {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")}}});
    CHECK(trivial == fine);
    CHECK_FALSE(trivial.empty());
    CHECK(cf.tuples_read < ct.tuples_read); // induced pruning pays off
}

TEST_CASE("simulated statistics are exact, so validation reports zero error") {
    ToyMat t;
    std::map<std::string, std::vector<FragmentKey>> keys;
    keys["r"] = {FragmentKey::from_digits("12"), FragmentKey::from_digits("01")};
    PartitionSchema ps = build_partition_schema(keys, t.psets, t.schema);
    auto qs = atomize_workload(parse_workload(
        "SELECT a FROM r WHERE a = 5; SELECT a FROM r WHERE a < 8;", t.schema));
    ValidationReport rep = validate_simulation(ps, t.data, qs, t.stats, t.schema);
    REQUIRE(rep.fragments.size() == 2);
    for (const auto &f : rep.fragments) {
        CHECK(f.sim_reltuples == f.exact_reltuples);
        CHECK(f.sim_relpages == f.exact_relpages);
        CHECK(f.max_sigma_delta == doctest::Approx(0.0));
    }
    REQUIRE(rep.queries.size() == 2);
    CHECK(rep.mean_error == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.max_error == doctest::Approx(0.0).epsilon(1e-9));
    std::string json = rep.to_json_lines();
    CHECK(json.find("\"mean_error\"") != std::string::npos);
}

TEST_CASE("the bundled schema definition matches the embedded one") {
    SchemaDef embedded = ssb_schema();
    SchemaDef loaded = SchemaDef::load(testing::data_path("ssb_schema.def"));
    CHECK(loaded.to_text() == embedded.to_text());
}
