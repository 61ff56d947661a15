#pragma once

#include "hpart/relation.hpp"
#include "hpart/scalar.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hpart {

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

const char *op_symbol(CompareOp op);
CompareOp negate_op(CompareOp op);
bool compare(const Scalar &lhs, CompareOp op, const Scalar &rhs);

/// One comparison between an attribute and a constant; the unit of
/// partitioning.
struct AtomicPredicate {
    std::string relation;
    std::string attribute;
    CompareOp op = CompareOp::Eq;
    Scalar constant;

    bool evaluate(const Scalar &value) const { return compare(value, op, constant); }
    bool evaluate_row(const RelationData &rel, std::size_t row) const;

    bool operator==(const AtomicPredicate &o) const;
    std::string to_sql() const;
};

/// Boolean expression over atomic predicates. BETWEEN and IN survive parsing
/// and are rewritten away by atomize().
struct PredicateExpr {
    enum class Type { True, Atom, And, Or, Not, Between, In };

    Type type = Type::True;
    AtomicPredicate atom;                 // Atom
    std::string relation, attribute;      // Between / In
    Scalar lo, hi;                        // Between
    std::vector<Scalar> values;           // In
    std::vector<PredicateExpr> children;  // And / Or / Not

    static PredicateExpr make_true();
    static PredicateExpr make_atom(AtomicPredicate a);
    static PredicateExpr make_and(std::vector<PredicateExpr> cs);
    static PredicateExpr make_or(std::vector<PredicateExpr> cs);
    static PredicateExpr make_not(PredicateExpr c);
    static PredicateExpr make_between(std::string rel, std::string attr, Scalar lo, Scalar hi);
    static PredicateExpr make_in(std::string rel, std::string attr, std::vector<Scalar> vs);

    bool is_true() const { return type == Type::True; }
    bool evaluate_row(const RelationData &rel, std::size_t row) const;

    /// Number of atomic comparison leaves (counting BETWEEN as 2 and IN(n) as n).
    std::size_t atom_count() const;

    /// Collect atomic leaves in order. Requires an atomized tree.
    void collect_atoms(std::vector<AtomicPredicate> &out) const;

    /// Atomic leaves reachable from the root through AND edges only; these
    /// hold conjunctively for every qualifying tuple.
    void collect_conjunctive_atoms(std::vector<AtomicPredicate> &out) const;

    std::string to_sql() const;
};

/// Rewrite BETWEEN to a >=/<= conjunction and IN to an equality disjunction.
/// The result is logically equivalent and free of pre-atomization leaves.
PredicateExpr atomize(const PredicateExpr &expr);

} // namespace hpart
