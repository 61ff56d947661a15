#pragma once

#include "hpart/bitmap.hpp"
#include "hpart/predicate.hpp"
#include "hpart/schema.hpp"

#include <map>
#include <string>
#include <vector>

namespace hpart {

struct JoinEdge {
    std::string left_rel, left_attr;
    std::string right_rel, right_attr;

    bool operator==(const JoinEdge &o) const = default;
};

/// Parsed shape of one SELECT statement. Projections and grouping are kept
/// as opaque metadata and never costed.
struct QueryShape {
    std::string id;
    std::vector<std::string> relations; // syntactic order
    std::vector<JoinEdge> joins;
    std::map<std::string, PredicateExpr> filters; // relation -> filter tree
    std::string select_list;  // opaque
    std::string group_by;     // opaque
    std::string order_by;     // opaque

    const PredicateExpr *filter_for(const std::string &rel) const;
    std::string to_sql() const;
};

/// Ordered, duplicate-free list of atomic predicates over one relation.
/// The ordering fixes bit positions for every fragment key and is immutable
/// after creation.
struct PredicateSet {
    std::string relation;
    std::vector<AtomicPredicate> predicates;

    std::size_t size() const { return predicates.size(); }
    bool contains(const AtomicPredicate &p) const;
    int position_of(const AtomicPredicate &p) const; // -1 if absent
};

using PredicateSets = std::map<std::string, PredicateSet>;

/// Parse a SQL script (statements separated by semicolons) against a schema.
/// Supported: SELECT with inner joins (comma or JOIN..ON), WHERE over
/// AND/OR/NOT, the six comparison operators, BETWEEN and IN.
std::vector<QueryShape> parse_workload(const std::string &sql, const SchemaDef &schema);
std::vector<QueryShape> load_workload(const std::string &path, const SchemaDef &schema);

/// Apply atomize() to every filter of every query.
std::vector<QueryShape> atomize_workload(std::vector<QueryShape> queries);

/// Deduplicated union of filter atomics per relation, first-seen order.
/// Every schema relation gets an entry, possibly empty.
PredicateSets collect_predicate_sets(const std::vector<QueryShape> &queries,
                                     const SchemaDef &schema);

/// Drop predicates that create no additional fragments over the given base
/// data: empty or full tuple bitmaps, and bitmaps equal to a retained
/// predicate's bitmap or its complement.
PredicateSet minimize_predicates(const PredicateSet &pset,
                                 const std::vector<Bitmap> &tuple_bitmaps);

/// Tuple-encoded bitmap of one atomic predicate over a relation instance.
Bitmap predicate_bitmap(const AtomicPredicate &p, const RelationData &rel);

} // namespace hpart
