#include "hpart/predicate.hpp"

namespace hpart {

const char *op_symbol(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    }
    return "?";
}

CompareOp negate_op(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return CompareOp::Ge;
    case CompareOp::Le: return CompareOp::Gt;
    case CompareOp::Gt: return CompareOp::Le;
    case CompareOp::Ge: return CompareOp::Lt;
    case CompareOp::Eq: return CompareOp::Ne;
    case CompareOp::Ne: return CompareOp::Eq;
    }
    return op;
}

bool compare(const Scalar &lhs, CompareOp op, const Scalar &rhs) {
    switch (op) {
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    }
    return false;
}

bool AtomicPredicate::evaluate_row(const RelationData &rel, std::size_t row) const {
    int col = rel.column_index(attribute);
    if (col < 0) throw Error("attribute " + attribute + " not in " + rel.def().name);
    return evaluate(rel.value(row, static_cast<std::size_t>(col)));
}

bool AtomicPredicate::operator==(const AtomicPredicate &o) const {
    if (relation != o.relation || attribute != o.attribute || op != o.op) return false;
    return constant.kind() == o.constant.kind() && constant == o.constant;
}

std::string AtomicPredicate::to_sql() const {
    return attribute + " " + op_symbol(op) + " " + constant.to_sql();
}

PredicateExpr PredicateExpr::make_true() { return PredicateExpr{}; }

PredicateExpr PredicateExpr::make_atom(AtomicPredicate a) {
    PredicateExpr e;
    e.type = Type::Atom;
    e.atom = std::move(a);
    return e;
}

PredicateExpr PredicateExpr::make_and(std::vector<PredicateExpr> cs) {
    PredicateExpr e;
    e.type = Type::And;
    e.children = std::move(cs);
    return e;
}

PredicateExpr PredicateExpr::make_or(std::vector<PredicateExpr> cs) {
    PredicateExpr e;
    e.type = Type::Or;
    e.children = std::move(cs);
    return e;
}

PredicateExpr PredicateExpr::make_not(PredicateExpr c) {
    PredicateExpr e;
    e.type = Type::Not;
    e.children.push_back(std::move(c));
    return e;
}

PredicateExpr PredicateExpr::make_between(std::string rel, std::string attr, Scalar lo, Scalar hi) {
    PredicateExpr e;
    e.type = Type::Between;
    e.relation = std::move(rel);
    e.attribute = std::move(attr);
    e.lo = std::move(lo);
    e.hi = std::move(hi);
    return e;
}

PredicateExpr PredicateExpr::make_in(std::string rel, std::string attr, std::vector<Scalar> vs) {
    if (vs.empty()) throw Error("IN list must not be empty");
    for (const auto &v : vs)
        if (v.kind() != vs.front().kind())
            throw Error("mixed-kind constant list in IN over " + attr);
    PredicateExpr e;
    e.type = Type::In;
    e.relation = std::move(rel);
    e.attribute = std::move(attr);
    e.values = std::move(vs);
    return e;
}

bool PredicateExpr::evaluate_row(const RelationData &rel, std::size_t row) const {
    switch (type) {
    case Type::True: return true;
    case Type::Atom: return atom.evaluate_row(rel, row);
    case Type::And:
        for (const auto &c : children)
            if (!c.evaluate_row(rel, row)) return false;
        return true;
    case Type::Or:
        for (const auto &c : children)
            if (c.evaluate_row(rel, row)) return true;
        return false;
    case Type::Not: return !children[0].evaluate_row(rel, row);
    case Type::Between: {
        Scalar v = rel.value(row, static_cast<std::size_t>(rel.column_index(attribute)));
        return lo <= v && v <= hi;
    }
    case Type::In: {
        Scalar v = rel.value(row, static_cast<std::size_t>(rel.column_index(attribute)));
        for (const auto &c : values)
            if (v == c) return true;
        return false;
    }
    }
    return false;
}

std::size_t PredicateExpr::atom_count() const {
    switch (type) {
    case Type::True: return 0;
    case Type::Atom: return 1;
    case Type::Between: return 2;
    case Type::In: return values.size();
    default: {
        std::size_t n = 0;
        for (const auto &c : children) n += c.atom_count();
        return n;
    }
    }
}

void PredicateExpr::collect_atoms(std::vector<AtomicPredicate> &out) const {
    switch (type) {
    case Type::True: return;
    case Type::Atom: out.push_back(atom); return;
    case Type::Between:
    case Type::In:
        throw Error("collect_atoms requires an atomized expression");
    default:
        for (const auto &c : children) c.collect_atoms(out);
    }
}

void PredicateExpr::collect_conjunctive_atoms(std::vector<AtomicPredicate> &out) const {
    if (type == Type::Atom) {
        out.push_back(atom);
    } else if (type == Type::And) {
        for (const auto &c : children) c.collect_conjunctive_atoms(out);
    }
    // OR / NOT subtrees contribute nothing; they do not hold conjunctively.
}

std::string PredicateExpr::to_sql() const {
    switch (type) {
    case Type::True: return "TRUE";
    case Type::Atom: return atom.to_sql();
    case Type::And: {
        std::string s;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) s += " AND ";
            bool paren = children[i].type == Type::Or;
            s += paren ? "(" + children[i].to_sql() + ")" : children[i].to_sql();
        }
        return s;
    }
    case Type::Or: {
        std::string s;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) s += " OR ";
            s += children[i].to_sql();
        }
        return s;
    }
    case Type::Not:
        return "NOT (" + children[0].to_sql() + ")";
    case Type::Between:
        return attribute + " BETWEEN " + lo.to_sql() + " AND " + hi.to_sql();
    case Type::In: {
        std::string s = attribute + " IN (";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ", ";
            s += values[i].to_sql();
        }
        return s + ")";
    }
    }
    return "";
}

PredicateExpr atomize(const PredicateExpr &expr) {
    switch (expr.type) {
    case PredicateExpr::Type::True:
    case PredicateExpr::Type::Atom:
        return expr;
    case PredicateExpr::Type::Between: {
        AtomicPredicate lo{expr.relation, expr.attribute, CompareOp::Ge, expr.lo};
        AtomicPredicate hi{expr.relation, expr.attribute, CompareOp::Le, expr.hi};
        std::vector<PredicateExpr> cs;
        cs.push_back(PredicateExpr::make_atom(std::move(lo)));
        cs.push_back(PredicateExpr::make_atom(std::move(hi)));
        return PredicateExpr::make_and(std::move(cs));
    }
    case PredicateExpr::Type::In: {
        std::vector<PredicateExpr> cs;
        for (const auto &v : expr.values)
            cs.push_back(PredicateExpr::make_atom(
                AtomicPredicate{expr.relation, expr.attribute, CompareOp::Eq, v}));
        if (cs.size() == 1) return cs.front();
        return PredicateExpr::make_or(std::move(cs));
    }
    default: {
        PredicateExpr out;
        out.type = expr.type;
        for (const auto &c : expr.children) out.children.push_back(atomize(c));
        return out;
    }
    }
}

} // namespace hpart
