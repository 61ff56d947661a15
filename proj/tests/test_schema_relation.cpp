#include "doctest.h"
#include "helpers.hpp"

#include <cstdio>
#include <fstream>

using namespace hpart;

TEST_CASE("schema definition text round-trips") {
    SchemaDef s = testing::star_schema();
    CHECK(s.relations.size() == 3);
    CHECK(s.is_fact("f"));
    CHECK(s.is_dimension("d1"));
    CHECK_FALSE(s.is_dimension("f"));
    CHECK(s.star->edges.size() == 2);
    SchemaDef round = SchemaDef::parse(s.to_text());
    CHECK(round.to_text() == s.to_text());
}

TEST_CASE("unqualified attributes resolve to their relation") {
    SchemaDef s = testing::star_schema();
    CHECK(s.relation_of_attribute("x") == "d1");
    CHECK(s.relation_of_attribute("fk2") == "f");
    CHECK_THROWS_AS(s.relation_of_attribute("nope"), Error);
}

TEST_CASE("csv load/save round-trips with quoting") {
    SchemaDef schema = SchemaDef::parse(
        "relation t\nattr id integer\nattr name text var\nattr day date\npk id\n");
    RelationData t(schema.require("t"));
    t.append_row({Scalar::integer(1), Scalar::text("plain"), Scalar::date(parse_date("1994-01-06"))});
    t.append_row({Scalar::integer(2), Scalar::text("with,comma"), Scalar::date(0)});
    t.append_row({Scalar::integer(3), Scalar::text("with \"quote\""), Scalar::date(1)});
    std::string path = "/tmp/hpart_test_roundtrip.csv";
    t.save_csv(path);
    RelationData back = RelationData::load_csv(path, schema.require("t"));
    REQUIRE(back.row_count() == 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) CHECK(back.value(r, c) == t.value(r, c));
    std::remove(path.c_str());
}

TEST_CASE("csv errors carry the row number") {
    std::string path = "/tmp/hpart_test_bad.csv";
    {
        std::ofstream out(path);
        out << "id,name,day\n1,ok,1994-01-06\n2,bad,not-a-date\n";
    }
    SchemaDef schema = SchemaDef::parse(
        "relation t\nattr id integer\nattr name text var\nattr day date\npk id\n");
    try {
        RelationData::load_csv(path, schema.require("t"));
        FAIL("expected an error");
    } catch (const Error &e) {
        // file line numbers: header is line 1, the bad row is line 3
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("empty csv with header loads as empty relation") {
    std::string path = "/tmp/hpart_test_empty.csv";
    {
        std::ofstream out(path);
        out << "a\n";
    }
    RelationData r = RelationData::load_csv(path, testing::toy_schema().require("r"));
    CHECK(r.row_count() == 0);
    std::remove(path.c_str());
}
