#pragma once

#include "hpart/workload.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hpart {

/// Hard cap on predicates per relation; cells and keys pack into one word.
inline constexpr std::size_t kMaxPredicates = 48;

/// One finest-granularity region: a binary digit per predicate.
struct Cell {
    std::uint64_t bits = 0;
    std::size_t m = 0;

    bool bit(std::size_t i) const { return (bits >> i) & 1; }
    std::string to_string() const;
};

/// Ternary fragment key: digit 0 selects ~phi, 1 selects phi, 2 discards
/// the predicate (wildcard).
struct FragmentKey {
    std::uint64_t ones = 0; // positions with digit 1
    std::uint64_t wild = 0; // positions with digit 2
    std::size_t m = 0;

    static FragmentKey all_wild(std::size_t m);
    static FragmentKey from_digits(const std::string &digits);
    static FragmentKey from_cell(const Cell &c);

    int digit(std::size_t i) const;
    void set_digit(std::size_t i, int d);

    bool covers(const Cell &c) const {
        if (m != c.m) throw Error("fragment key / cell length mismatch");
        std::uint64_t mask = m == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << m) - 1;
        return ((c.bits ^ ones) & ~wild & mask) == 0;
    }

    /// Concatenation for derived fact keys.
    FragmentKey concat(const FragmentKey &tail) const;
    FragmentKey slice(std::size_t begin, std::size_t len) const;

    std::string digit_string() const;
    bool operator==(const FragmentKey &o) const = default;
    bool operator<(const FragmentKey &o) const;
};

/// Most specific ternary key covering both inputs (differing digits widen
/// to 2).
FragmentKey generalize(const FragmentKey &a, const FragmentKey &b);

/// Maps satisfiable cells to fragment positions. Absent cells are
/// unsatisfiable.
using IndexTable = std::map<std::uint64_t, std::size_t>;

struct Fragment {
    std::string id;
    FragmentKey key;
};

/// A literal with polarity; polarity false negates the comparison.
struct Literal {
    AtomicPredicate pred;
    bool positive = true;
};

/// Syntactic satisfiability of a conjunction of literals: per-attribute
/// interval intersection for ordered kinds plus equality/exclusion sets.
bool literals_satisfiable(const std::vector<Literal> &literals);

/// Literals enforced by a key over a predicate set (wildcards contribute
/// nothing).
std::vector<Literal> key_literals(const FragmentKey &key, const PredicateSet &pset);

bool satisfiable(const FragmentKey &key, const PredicateSet &pset);
bool satisfiable_with(const FragmentKey &key, const PredicateSet &pset,
                      const std::vector<AtomicPredicate> &extra);
bool cell_satisfiable(const Cell &c, const PredicateSet &pset);

/// Enumerate the satisfiable cells of a predicate set.
std::vector<Cell> satisfiable_cells(const PredicateSet &pset);

/// Check that every satisfiable cell is covered by exactly one key and
/// return the index table. Throws naming the offending cell otherwise.
IndexTable validate_schema(const std::vector<Fragment> &fragments, const PredicateSet &pset);

struct RelationPartition {
    std::vector<Fragment> fragments;
    IndexTable index;      // over this relation's cells (empty for derived)
    bool derived = false;  // fact partition induced by the dimensions
};

/// A validated partitioned schema: per relation the fragment list, plus the
/// fact relation's derived fragment list in star mode.
struct PartitionSchema {
    std::map<std::string, RelationPartition> parts;

    bool has(const std::string &rel) const { return parts.count(rel) != 0; }
    const RelationPartition *find(const std::string &rel) const;

    std::string serialize(const PredicateSets &psets) const;
    static PartitionSchema deserialize(const std::string &text, const SchemaDef &schema,
                                       PredicateSets &psets_out);
};

std::string fragment_name(const std::string &relation, const FragmentKey &key);

/// Cross product of dimension fragments in star order; each fact key is the
/// concatenation of the dimension keys.
std::vector<Fragment> derive_fact_keys(
    const std::vector<std::pair<std::string, const std::vector<Fragment> *>> &dim_fragments,
    const StarDef &star);

/// Global index over concatenated cells: maps every satisfiable concatenated
/// cell to its sub-star fragment position (the derive_fact_keys order).
IndexTable build_global_index(
    const std::vector<std::pair<std::string, const std::vector<Fragment> *>> &dim_fragments,
    const std::vector<const PredicateSet *> &dim_psets, const StarDef &star);

AtomicPredicate parse_atomic_predicate(const std::string &text, const std::string &relation,
                                       const SchemaDef &schema);

/// Assemble and validate a schema from per-relation key lists, deriving the
/// fact partition from the dimensions present in `keys` (star mode).
PartitionSchema build_partition_schema(const std::map<std::string, std::vector<FragmentKey>> &keys,
                                       const PredicateSets &psets, const SchemaDef &schema);

} // namespace hpart
