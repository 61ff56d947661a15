#pragma once

#include "hpart/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpart {

struct AttributeDef {
    std::string name;
    Kind kind = Kind::Integer;
    bool variable_width = false; // only text attributes are variable-width
};

struct RelationDef {
    std::string name;
    std::vector<AttributeDef> attributes;
    std::string primary_key; // attribute name, may be empty

    const AttributeDef *find(const std::string &attr) const;
    int index_of(const std::string &attr) const; // -1 if absent
};

struct FkEdge {
    std::string fact_attr; // attribute of the fact relation
    std::string dimension; // referenced dimension relation
    std::string dim_pk;    // its primary key attribute
};

/// Star roles are optional; without them the schema is a plain set of
/// relations and every relation is partitioned directly.
struct StarDef {
    std::string fact;
    std::vector<FkEdge> edges; // order fixes the gene layout
};

struct SchemaDef {
    std::vector<RelationDef> relations;
    std::optional<StarDef> star;

    const RelationDef *find(const std::string &name) const;
    const RelationDef &require(const std::string &name) const;
    bool is_fact(const std::string &name) const;
    bool is_dimension(const std::string &name) const;
    /// Resolve an unqualified attribute to its relation; errors on ambiguity.
    std::string relation_of_attribute(const std::string &attr) const;

    static SchemaDef parse(const std::string &text);
    static SchemaDef load(const std::string &path);
    std::string to_text() const;
};

} // namespace hpart
