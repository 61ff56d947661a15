#include "doctest.h"
#include "helpers.hpp"

using namespace hpart;

TEST_CASE("keys cover cells ternarily") {
    FragmentKey k = FragmentKey::from_digits("12");
    CHECK(k.digit(0) == 1);
    CHECK(k.digit(1) == 2);
    CHECK(k.covers(Cell{0b01, 2})); // (1,0)
    CHECK(k.covers(Cell{0b11, 2})); // (1,1)
    CHECK_FALSE(k.covers(Cell{0b00, 2}));
    CHECK_FALSE(k.covers(Cell{0b10, 2}));
    CHECK(FragmentKey::all_wild(2).covers(Cell{0b10, 2}));
    CHECK_THROWS_AS(k.covers(Cell{0, 3}), Error);
    CHECK(k.digit_string() == "12");
    CHECK(FragmentKey::from_digits(k.digit_string()) == k);
}

TEST_CASE("generalize widens differing digits to wildcards") {
    FragmentKey a = FragmentKey::from_digits("10");
    FragmentKey b = FragmentKey::from_digits("11");
    CHECK(generalize(a, b).digit_string() == "12");
    CHECK(generalize(a, FragmentKey::from_digits("01")).digit_string() == "22");
    CHECK(generalize(a, a) == a);
}

TEST_CASE("slice and concat are inverse-ish") {
    FragmentKey f = FragmentKey::from_digits("10212");
    CHECK(f.slice(0, 2).digit_string() == "10");
    CHECK(f.slice(2, 3).digit_string() == "212");
    CHECK(f.slice(0, 2).concat(f.slice(2, 3)) == f);
}

TEST_CASE("satisfiability prunes contradictory keys") {
    PredicateSet p = testing::toy_pset(); // a < 6, a >= 4
    CHECK(satisfiable(FragmentKey::from_digits("11"), p)); // 4 <= a < 6
    CHECK(satisfiable(FragmentKey::from_digits("10"), p)); // a < 4
    CHECK(satisfiable(FragmentKey::from_digits("01"), p)); // a >= 6
    CHECK_FALSE(satisfiable(FragmentKey::from_digits("00"), p)); // a >= 6 and a < 4
    CHECK(satisfiable(FragmentKey::all_wild(2), p));
}

TEST_CASE("discrete kinds count integer points in intervals") {
    PredicateSet p{"r", {}};
    p.predicates.push_back({"r", "a", CompareOp::Gt, Scalar::integer(3)});
    p.predicates.push_back({"r", "a", CompareOp::Lt, Scalar::integer(5)});
    // digit (1,1): 3 < a < 5 has exactly a=4 -> satisfiable.
    CHECK(satisfiable(FragmentKey::from_digits("11"), p));
    PredicateSet q{"r", {}};
    q.predicates.push_back({"r", "a", CompareOp::Gt, Scalar::integer(3)});
    q.predicates.push_back({"r", "a", CompareOp::Lt, Scalar::integer(4)});
    // 3 < a < 4 has no integer point.
    CHECK_FALSE(satisfiable(FragmentKey::from_digits("11"), q));
    // Equality vs exclusion.
    PredicateSet e{"r", {}};
    e.predicates.push_back({"r", "a", CompareOp::Eq, Scalar::integer(7)});
    e.predicates.push_back({"r", "a", CompareOp::Ne, Scalar::integer(7)});
    CHECK_FALSE(satisfiable(FragmentKey::from_digits("11"), e));
    CHECK(satisfiable(FragmentKey::from_digits("10"), e));
}

TEST_CASE("satisfiable cell enumeration") {
    auto cells = satisfiable_cells(testing::toy_pset());
    REQUIRE(cells.size() == 3); // 00 is contradictory
    // m = 0 -> the single empty cell.
    auto none = satisfiable_cells(PredicateSet{"r", {}});
    CHECK(none.size() == 1);
    CHECK(none[0].m == 0);
}

TEST_CASE("validate_schema detects gaps and overlaps") {
    PredicateSet p = testing::toy_pset();
    std::vector<Fragment> good{{"f0", FragmentKey::from_digits("12")},
                               {"f1", FragmentKey::from_digits("01")}};
    IndexTable idx = validate_schema(good, p);
    CHECK(idx.size() == 3);
    CHECK(idx.at(0b01) == 0); // cell (1,0) -> f0
    CHECK(idx.at(0b11) == 0);
    CHECK(idx.at(0b10) == 1);
    std::vector<Fragment> gap{{"f0", FragmentKey::from_digits("12")}};
    CHECK_THROWS_AS(validate_schema(gap, p), Error);
    std::vector<Fragment> overlap{{"f0", FragmentKey::from_digits("12")},
                                  {"f1", FragmentKey::from_digits("21")},
                                  {"f2", FragmentKey::from_digits("01")}};
    CHECK_THROWS_AS(validate_schema(overlap, p), Error);
}

TEST_CASE("fact keys derive as the dimension cross product in star order") {
    SchemaDef schema = testing::star_schema();
    std::vector<Fragment> d1{{"a", FragmentKey::from_digits("1")},
                             {"b", FragmentKey::from_digits("0")}};
    std::vector<Fragment> d2{{"c", FragmentKey::from_digits("2")}};
    std::vector<std::pair<std::string, const std::vector<Fragment> *>> dims{
        {"d1", &d1}, {"d2", &d2}};
    auto fact = derive_fact_keys(dims, *schema.star);
    REQUIRE(fact.size() == 2);
    CHECK(fact[0].key.digit_string() == "12");
    CHECK(fact[1].key.digit_string() == "02");
}

TEST_CASE("build_partition_schema derives and validates the fact partition") {
    SchemaDef schema = testing::star_schema();
    PredicateSets psets;
    PredicateSet p1{"d1", {}};
    p1.predicates.push_back({"d1", "x", CompareOp::Lt, Scalar::integer(40)});
    psets["d1"] = p1;
    PredicateSet p2{"d2", {}};
    p2.predicates.push_back({"d2", "y", CompareOp::Eq, Scalar::integer(0)});
    psets["d2"] = p2;
    psets["f"] = PredicateSet{"f", {}};
    std::map<std::string, std::vector<FragmentKey>> keys;
    keys["d1"] = {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")};
    keys["d2"] = {FragmentKey::all_wild(1)};
    PartitionSchema ps = build_partition_schema(keys, psets, schema);
    REQUIRE(ps.has("f"));
    CHECK(ps.parts.at("f").derived);
    CHECK(ps.parts.at("f").fragments.size() == 2);
    CHECK(ps.parts.at("d1").fragments.size() == 2);
    // Supplying the fact directly is rejected in star mode.
    keys["f"] = {FragmentKey::all_wild(2)};
    CHECK_THROWS_AS(build_partition_schema(keys, psets, schema), Error);
}

TEST_CASE("schema serialization round-trips") {
    SchemaDef schema = testing::star_schema();
    PredicateSets psets;
    PredicateSet p1{"d1", {}};
    p1.predicates.push_back({"d1", "x", CompareOp::Lt, Scalar::integer(40)});
    psets["d1"] = p1;
    psets["d2"] = PredicateSet{"d2", {}};
    psets["f"] = PredicateSet{"f", {}};
    std::map<std::string, std::vector<FragmentKey>> keys;
    keys["d1"] = {FragmentKey::from_digits("1"), FragmentKey::from_digits("0")};
    keys["d2"] = {FragmentKey::all_wild(0)};
    PartitionSchema ps = build_partition_schema(keys, psets, schema);
    std::string text = ps.serialize(psets);
    PredicateSets back_psets;
    PartitionSchema back = PartitionSchema::deserialize(text, schema, back_psets);
    CHECK(back.serialize(back_psets) == text);
    CHECK(back.parts.at("d1").fragments.size() == 2);
    CHECK(back_psets.at("d1").predicates.size() == 1);
}

TEST_CASE("atomic predicate text parsing") {
    SchemaDef schema = testing::toy_schema();
    AtomicPredicate p = parse_atomic_predicate("a < 6", "r", schema);
    CHECK(p.attribute == "a");
    CHECK(p.op == CompareOp::Lt);
    CHECK(p.constant == Scalar::integer(6));
    CHECK_THROWS_AS(parse_atomic_predicate("bogus ?? 1", "r", schema), Error);
}
