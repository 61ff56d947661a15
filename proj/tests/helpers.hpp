#pragma once

#include "hpart/adaptivity.hpp"
#include "hpart/engine.hpp"
#include "hpart/optimizer.hpp"

#include <string>

namespace hpart::testing {

/// Single-relation fixture: r(a) = {1,3,5,7,9,11} with phi1: a < 6 and
/// phi2: a >= 4. Cells: 1,3 -> (1,0); 5 -> (1,1); 7,9,11 -> (0,1).
inline SchemaDef toy_schema() {
    return SchemaDef::parse("relation r\nattr a integer\npk a\n");
}

inline Dataset toy_data() {
    Dataset data;
    RelationData r(toy_schema().require("r"));
    for (int v : {1, 3, 5, 7, 9, 11}) r.append_row({Scalar::integer(v)});
    data.emplace("r", std::move(r));
    return data;
}

inline PredicateSet toy_pset() {
    PredicateSet p{"r", {}};
    p.predicates.push_back({"r", "a", CompareOp::Lt, Scalar::integer(6)});
    p.predicates.push_back({"r", "a", CompareOp::Ge, Scalar::integer(4)});
    return p;
}

inline RelationStats toy_stats(ExecMode mode = ExecMode::Serial) {
    SchemaDef schema = toy_schema();
    Dataset data = toy_data();
    std::vector<PartitionPredicate> preds;
    for (const auto &a : toy_pset().predicates) preds.push_back({a, false, {}});
    return build_relation_stats(data.at("r"), preds, data, schema, 100, mode);
}

/// Two-dimension star fixture: fact f(fk1, fk2, v) over d1(k1, x) and
/// d2(k2, y).
inline SchemaDef star_schema() {
    return SchemaDef::parse(
        "relation d1\nattr k1 integer\nattr x integer\npk k1\n"
        "relation d2\nattr k2 integer\nattr y integer\npk k2\n"
        "relation f\nattr fk1 integer\nattr fk2 integer\nattr v integer\npk fk1\n"
        "fact f\nfk fk1 d1 k1\nfk fk2 d2 k2\n");
}

inline Dataset star_data() {
    SchemaDef schema = star_schema();
    Dataset data;
    RelationData d1(schema.require("d1"));
    for (int k = 1; k <= 6; ++k)
        d1.append_row({Scalar::integer(k), Scalar::integer(k * 10)});
    data.emplace("d1", std::move(d1));
    RelationData d2(schema.require("d2"));
    for (int k = 1; k <= 4; ++k)
        d2.append_row({Scalar::integer(k), Scalar::integer(k % 2)});
    data.emplace("d2", std::move(d2));
    RelationData f(schema.require("f"));
    for (int i = 0; i < 24; ++i)
        f.append_row({Scalar::integer(i % 6 + 1), Scalar::integer(i % 4 + 1),
                      Scalar::integer(i)});
    data.emplace("f", std::move(f));
    return data;
}

inline std::string data_path(const std::string &name) {
    return std::string(HPART_DATA_DIR) + "/" + name;
}

} // namespace hpart::testing
