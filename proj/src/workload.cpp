#include "hpart/workload.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hpart {

const PredicateExpr *QueryShape::filter_for(const std::string &rel) const {
    auto it = filters.find(rel);
    return it == filters.end() ? nullptr : &it->second;
}

std::string QueryShape::to_sql() const {
    std::string s = "SELECT " + (select_list.empty() ? "*" : select_list) + " FROM ";
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (i) s += ", ";
        s += relations[i];
    }
    std::vector<std::string> conjuncts;
    for (const auto &j : joins)
        conjuncts.push_back(j.left_rel + "." + j.left_attr + " = " + j.right_rel + "." +
                            j.right_attr);
    for (const auto &rel : relations) {
        const PredicateExpr *f = filter_for(rel);
        if (f && !f->is_true()) {
            bool paren = f->type == PredicateExpr::Type::Or;
            conjuncts.push_back(paren ? "(" + f->to_sql() + ")" : f->to_sql());
        }
    }
    if (!conjuncts.empty()) {
        s += " WHERE ";
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            if (i) s += " AND ";
            s += conjuncts[i];
        }
    }
    if (!group_by.empty()) s += " GROUP BY " + group_by;
    if (!order_by.empty()) s += " ORDER BY " + order_by;
    return s;
}

bool PredicateSet::contains(const AtomicPredicate &p) const {
    return position_of(p) >= 0;
}

int PredicateSet::position_of(const AtomicPredicate &p) const {
    for (std::size_t i = 0; i < predicates.size(); ++i)
        if (predicates[i] == p) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

struct Token {
    enum Type { Ident, Number, String, Symbol, End };
    Type type = End;
    std::string text;
    std::size_t pos = 0;
    int line = 1, col = 1;
};

struct Lexer {
    const std::string &src;
    std::size_t i = 0;
    int line = 1, col = 1;
    std::vector<Token> tokens;

    explicit Lexer(const std::string &s) : src(s) {}

    [[noreturn]] void fail(const std::string &msg, int l, int c) const {
        throw Error("parse error at line " + std::to_string(l) + ", column " +
                    std::to_string(c) + ": " + msg);
    }

    void advance(std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    }

    void run() {
        while (i < src.size()) {
            char c = src[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
                while (i < src.size() && src[i] != '\n') advance();
                continue;
            }
            Token t;
            t.pos = i;
            t.line = line;
            t.col = col;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                    ++j;
                t.type = Token::Ident;
                t.text = src.substr(i, j - i);
                advance(j - i);
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                bool dot = false;
                while (j < src.size() &&
                       (std::isdigit(static_cast<unsigned char>(src[j])) ||
                        (src[j] == '.' && !dot && j + 1 < src.size() &&
                         std::isdigit(static_cast<unsigned char>(src[j + 1]))))) {
                    if (src[j] == '.') dot = true;
                    ++j;
                }
                t.type = Token::Number;
                t.text = src.substr(i, j - i);
                advance(j - i);
            } else if (c == '\'') {
                std::string val;
                std::size_t j = i + 1;
                for (;; ++j) {
                    if (j >= src.size()) fail("unterminated string literal", t.line, t.col);
                    if (src[j] == '\'') {
                        if (j + 1 < src.size() && src[j + 1] == '\'') {
                            val += '\'';
                            ++j;
                        } else {
                            break;
                        }
                    } else {
                        val += src[j];
                    }
                }
                t.type = Token::String;
                t.text = val;
                advance(j + 1 - i);
            } else {
                static const char *two[] = {"<=", ">=", "<>", "!="};
                std::string sym(1, c);
                for (const char *s : two) {
                    if (i + 1 < src.size() && src[i] == s[0] && src[i + 1] == s[1]) {
                        sym = s;
                        break;
                    }
                }
                t.type = Token::Symbol;
                t.text = sym;
                advance(sym.size());
            }
            tokens.push_back(std::move(t));
        }
        Token end;
        end.pos = src.size();
        end.line = line;
        end.col = col;
        tokens.push_back(end);
    }
};

bool ikeyword(const Token &t, const char *kw) {
    if (t.type != Token::Ident) return false;
    const std::string &s = t.text;
    std::size_t n = 0;
    while (kw[n]) ++n;
    if (s.size() != n) return false;
    for (std::size_t k = 0; k < n; ++k)
        if (std::toupper(static_cast<unsigned char>(s[k])) != kw[k]) return false;
    return true;
}

// Extended expression node: a comparison between two attributes is a join
// leaf and may only appear as a top-level conjunct.
struct WhereNode {
    enum Type { Expr, Join, And } type = Expr;
    PredicateExpr expr;
    JoinEdge join;
    std::vector<WhereNode> children; // And
};

struct Parser {
    const std::string &src;
    const SchemaDef &schema;
    std::vector<Token> toks;
    std::size_t p = 0;
    std::map<std::string, std::string> aliases; // alias -> relation
    std::vector<std::string> relations;

    Parser(const std::string &s, const SchemaDef &sch, std::vector<Token> t)
        : src(s), schema(sch), toks(std::move(t)) {}

    const Token &peek(std::size_t k = 0) const {
        return toks[std::min(p + k, toks.size() - 1)];
    }
    const Token &next() { return toks[p == toks.size() - 1 ? p : p++]; }

    [[noreturn]] void fail(const std::string &msg) const {
        const Token &t = peek();
        throw Error("parse error at line " + std::to_string(t.line) + ", column " +
                    std::to_string(t.col) + ": " + msg);
    }

    void expect_symbol(const char *sym) {
        if (peek().type != Token::Symbol || peek().text != sym)
            fail(std::string("expected '") + sym + "'");
        next();
    }

    std::string resolve_relation(const std::string &name) const {
        auto it = aliases.find(name);
        if (it != aliases.end()) return it->second;
        if (schema.find(name)) return name;
        throw Error("unknown relation: " + name);
    }

    bool in_query(const std::string &rel) const {
        return std::find(relations.begin(), relations.end(), rel) != relations.end();
    }

    // attr reference: [rel '.'] attr -> (relation, attribute)
    struct AttrRef {
        std::string relation, attribute;
    };

    bool looks_like_attr() const {
        if (peek().type != Token::Ident) return false;
        // a bare ident followed by '(' is a function call, not an attribute
        return !(peek(1).type == Token::Symbol && peek(1).text == "(");
    }

    AttrRef parse_attr() {
        std::string first = next().text;
        if (peek().type == Token::Symbol && peek().text == ".") {
            next();
            if (peek().type != Token::Ident) fail("expected attribute after '.'");
            std::string attr = next().text;
            std::string rel = resolve_relation(first);
            if (!schema.require(rel).find(attr))
                throw Error("unknown attribute " + attr + " in " + rel);
            return {rel, attr};
        }
        std::string rel = schema.relation_of_attribute(first);
        return {rel, first};
    }

    Scalar parse_literal(Kind kind) {
        bool neg = false;
        if (peek().type == Token::Symbol && peek().text == "-") {
            neg = true;
            next();
        }
        const Token &t = peek();
        if (t.type == Token::Number) {
            std::string text = next().text;
            bool dot = text.find('.') != std::string::npos;
            switch (kind) {
            case Kind::Integer:
                if (dot) fail("decimal literal for integer attribute");
                return Scalar::integer((neg ? -1 : 1) * std::stoll(text));
            case Kind::Decimal:
                return Scalar::decimal((neg ? -1.0 : 1.0) * std::stod(text));
            case Kind::Date:
                // allow integer yyyymmdd-free day encodings only via strings
                fail("date attribute requires a 'YYYY-MM-DD' literal");
            case Kind::Text:
                fail("numeric literal for text attribute");
            }
        }
        if (t.type == Token::String) {
            if (neg) fail("negated string literal");
            std::string text = next().text;
            switch (kind) {
            case Kind::Date: return Scalar::date(parse_date(text));
            case Kind::Text: return Scalar::text(text);
            default: fail("string literal for numeric attribute");
            }
        }
        fail("expected literal");
    }

    WhereNode parse_or() {
        WhereNode lhs = parse_and();
        while (ikeyword(peek(), "OR")) {
            next();
            WhereNode rhs = parse_and();
            if (lhs.type != WhereNode::Expr || rhs.type != WhereNode::Expr)
                fail("join predicate inside OR is not supported");
            std::vector<PredicateExpr> cs;
            if (lhs.expr.type == PredicateExpr::Type::Or)
                cs = std::move(lhs.expr.children);
            else
                cs.push_back(std::move(lhs.expr));
            cs.push_back(std::move(rhs.expr));
            lhs.expr = PredicateExpr::make_or(std::move(cs));
        }
        return lhs;
    }

    WhereNode parse_and() {
        WhereNode lhs = parse_unary();
        while (ikeyword(peek(), "AND")) {
            next();
            WhereNode rhs = parse_unary();
            WhereNode both;
            both.type = WhereNode::And;
            auto push = [&both](WhereNode n) {
                if (n.type == WhereNode::And)
                    for (auto &c : n.children) both.children.push_back(std::move(c));
                else
                    both.children.push_back(std::move(n));
            };
            push(std::move(lhs));
            push(std::move(rhs));
            lhs = std::move(both);
        }
        return lhs;
    }

    WhereNode parse_unary() {
        if (ikeyword(peek(), "NOT")) {
            next();
            WhereNode inner = parse_unary();
            if (inner.type != WhereNode::Expr) fail("NOT over a join predicate");
            WhereNode n;
            n.expr = PredicateExpr::make_not(std::move(inner.expr));
            return n;
        }
        if (peek().type == Token::Symbol && peek().text == "(") {
            next();
            WhereNode inner = parse_or();
            expect_symbol(")");
            return inner;
        }
        return parse_comparison();
    }

    WhereNode parse_comparison() {
        if (!looks_like_attr()) fail("expected attribute reference");
        AttrRef lhs = parse_attr();
        if (!in_query(lhs.relation))
            throw Error("relation " + lhs.relation + " not in FROM clause");
        Kind kind = schema.require(lhs.relation).find(lhs.attribute)->kind;

        bool negated = false;
        if (ikeyword(peek(), "NOT")) {
            next();
            negated = true;
            if (!ikeyword(peek(), "BETWEEN") && !ikeyword(peek(), "IN"))
                fail("expected BETWEEN or IN after NOT");
        }
        if (ikeyword(peek(), "BETWEEN")) {
            next();
            Scalar lo = parse_literal(kind);
            if (!ikeyword(peek(), "AND")) fail("expected AND in BETWEEN");
            next();
            Scalar hi = parse_literal(kind);
            WhereNode n;
            n.expr = PredicateExpr::make_between(lhs.relation, lhs.attribute,
                                                 std::move(lo), std::move(hi));
            if (negated) n.expr = PredicateExpr::make_not(std::move(n.expr));
            return n;
        }
        if (ikeyword(peek(), "IN")) {
            next();
            expect_symbol("(");
            std::vector<Scalar> vals;
            for (;;) {
                vals.push_back(parse_literal(kind));
                if (peek().type == Token::Symbol && peek().text == ",") {
                    next();
                    continue;
                }
                break;
            }
            expect_symbol(")");
            WhereNode n;
            n.expr = PredicateExpr::make_in(lhs.relation, lhs.attribute, std::move(vals));
            if (negated) n.expr = PredicateExpr::make_not(std::move(n.expr));
            return n;
        }

        if (peek().type != Token::Symbol) fail("expected comparison operator");
        std::string sym = peek().text;
        CompareOp op;
        if (sym == "<") op = CompareOp::Lt;
        else if (sym == "<=") op = CompareOp::Le;
        else if (sym == ">") op = CompareOp::Gt;
        else if (sym == ">=") op = CompareOp::Ge;
        else if (sym == "=") op = CompareOp::Eq;
        else if (sym == "<>" || sym == "!=") op = CompareOp::Ne;
        else fail("unsupported operator '" + sym + "'");
        next();

        if (looks_like_attr()) {
            AttrRef rhs = parse_attr();
            if (op != CompareOp::Eq) fail("attribute-to-attribute comparison must use =");
            if (rhs.relation == lhs.relation)
                fail("join predicate must reference two distinct relations");
            if (!in_query(rhs.relation))
                throw Error("relation " + rhs.relation + " not in FROM clause");
            WhereNode n;
            n.type = WhereNode::Join;
            n.join = JoinEdge{lhs.relation, lhs.attribute, rhs.relation, rhs.attribute};
            return n;
        }
        Scalar c = parse_literal(kind);
        WhereNode n;
        n.expr = PredicateExpr::make_atom(
            AtomicPredicate{lhs.relation, lhs.attribute, op, std::move(c)});
        return n;
    }
};

// capture raw source between two token positions, trimmed
std::string raw_between(const std::string &src, std::size_t a, std::size_t b) {
    std::string s = src.substr(a, b - a);
    auto issp = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    // collapse interior whitespace runs
    std::string out;
    bool sp = false;
    for (char c : s) {
        if (issp(c)) {
            sp = true;
        } else {
            if (sp && !out.empty()) out += ' ';
            sp = false;
            out += c;
        }
    }
    return out;
}

QueryShape parse_statement(const std::string &stmt, const SchemaDef &schema) {
    Lexer lex(stmt);
    lex.run();
    Parser ps(stmt, schema, std::move(lex.tokens));

    if (!ikeyword(ps.peek(), "SELECT")) ps.fail("expected SELECT");
    ps.next();
    // select list: raw text up to FROM at parenthesis depth 0
    std::size_t sel_begin = ps.peek().pos;
    int depth = 0;
    while (true) {
        const Token &t = ps.peek();
        if (t.type == Token::End) ps.fail("expected FROM");
        if (t.type == Token::Symbol && t.text == "(") ++depth;
        if (t.type == Token::Symbol && t.text == ")") --depth;
        if (depth == 0 && ikeyword(t, "FROM")) break;
        ps.next();
    }
    QueryShape q;
    q.select_list = raw_between(stmt, sel_begin, ps.peek().pos);
    ps.next(); // FROM

    std::vector<JoinEdge> join_edges;
    auto parse_table_ref = [&]() {
        if (ps.peek().type != Token::Ident) ps.fail("expected relation name");
        std::string name = ps.next().text;
        if (!schema.find(name)) throw Error("unknown relation: " + name);
        if (ps.in_query(name)) throw Error("relation listed twice: " + name);
        ps.relations.push_back(name);
        q.relations.push_back(name);
        // optional alias
        if (ps.peek().type == Token::Ident && !ikeyword(ps.peek(), "JOIN") &&
            !ikeyword(ps.peek(), "WHERE") && !ikeyword(ps.peek(), "GROUP") &&
            !ikeyword(ps.peek(), "ORDER") && !ikeyword(ps.peek(), "ON") &&
            !ikeyword(ps.peek(), "INNER")) {
            std::string alias = ps.next().text;
            ps.aliases[alias] = name;
        }
    };

    parse_table_ref();
    while (true) {
        if (ps.peek().type == Token::Symbol && ps.peek().text == ",") {
            ps.next();
            parse_table_ref();
        } else if (ikeyword(ps.peek(), "INNER") || ikeyword(ps.peek(), "JOIN")) {
            if (ikeyword(ps.peek(), "INNER")) ps.next();
            if (!ikeyword(ps.peek(), "JOIN")) ps.fail("expected JOIN");
            ps.next();
            parse_table_ref();
            if (!ikeyword(ps.peek(), "ON")) ps.fail("expected ON");
            ps.next();
            WhereNode cond = ps.parse_and();
            auto take = [&](const WhereNode &n) {
                if (n.type != WhereNode::Join)
                    ps.fail("JOIN condition must be an equality between attributes");
                join_edges.push_back(n.join);
            };
            if (cond.type == WhereNode::And)
                for (const auto &c : cond.children) take(c);
            else
                take(cond);
        } else {
            break;
        }
    }

    std::map<std::string, std::vector<PredicateExpr>> rel_filters;
    if (ikeyword(ps.peek(), "WHERE")) {
        ps.next();
        WhereNode root = ps.parse_or();
        std::vector<WhereNode> conjuncts;
        if (root.type == WhereNode::And)
            conjuncts = std::move(root.children);
        else
            conjuncts.push_back(std::move(root));
        for (auto &c : conjuncts) {
            if (c.type == WhereNode::Join) {
                join_edges.push_back(c.join);
                continue;
            }
            // the conjunct must reference exactly one relation
            std::vector<AtomicPredicate> atoms;
            atomize(c.expr).collect_atoms(atoms);
            std::string rel;
            for (const auto &a : atoms) {
                if (rel.empty()) rel = a.relation;
                else if (rel != a.relation)
                    throw Error("filter mixes relations " + rel + " and " + a.relation);
            }
            if (rel.empty()) continue;
            rel_filters[rel].push_back(std::move(c.expr));
        }
    }
    for (auto &[rel, parts] : rel_filters) {
        if (parts.size() == 1)
            q.filters[rel] = std::move(parts.front());
        else
            q.filters[rel] = PredicateExpr::make_and(std::move(parts));
    }
    q.joins = std::move(join_edges);
    for (const auto &j : q.joins) {
        if (j.left_rel == j.right_rel)
            throw Error("join edge within one relation: " + j.left_rel);
    }

    if (ikeyword(ps.peek(), "GROUP")) {
        ps.next();
        if (!ikeyword(ps.peek(), "BY")) ps.fail("expected BY");
        ps.next();
        std::size_t begin = ps.peek().pos;
        while (ps.peek().type != Token::End && !ikeyword(ps.peek(), "ORDER")) ps.next();
        q.group_by = raw_between(stmt, begin, ps.peek().pos);
    }
    if (ikeyword(ps.peek(), "ORDER")) {
        ps.next();
        if (!ikeyword(ps.peek(), "BY")) ps.fail("expected BY");
        ps.next();
        std::size_t begin = ps.peek().pos;
        while (ps.peek().type != Token::End) ps.next();
        q.order_by = raw_between(stmt, begin, ps.peek().pos);
    }
    if (ps.peek().type != Token::End) ps.fail("trailing input after statement");
    return q;
}

} // namespace

std::vector<QueryShape> parse_workload(const std::string &sql, const SchemaDef &schema) {
    // split on semicolons outside string literals and line comments
    std::vector<std::string> stmts;
    std::string cur;
    bool in_str = false, in_comment = false;
    for (std::size_t i = 0; i < sql.size(); ++i) {
        char c = sql[i];
        if (in_comment) {
            if (c == '\n') in_comment = false;
            cur += c;
            continue;
        }
        if (in_str) {
            cur += c;
            if (c == '\'') in_str = false;
            continue;
        }
        if (c == '\'') {
            in_str = true;
            cur += c;
        } else if (c == '-' && i + 1 < sql.size() && sql[i + 1] == '-') {
            in_comment = true;
            cur += c;
        } else if (c == ';') {
            stmts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    stmts.push_back(cur);

    std::vector<QueryShape> out;
    for (const auto &stmt : stmts) {
        bool blank = true;
        Lexer probe(stmt);
        probe.run();
        blank = probe.tokens.size() <= 1;
        if (blank) continue;
        QueryShape q = parse_statement(stmt, schema);
        q.id = "Q" + std::to_string(out.size() + 1);
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<QueryShape> load_workload(const std::string &path, const SchemaDef &schema) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open workload file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_workload(ss.str(), schema);
}

std::vector<QueryShape> atomize_workload(std::vector<QueryShape> queries) {
    for (auto &q : queries)
        for (auto &[rel, f] : q.filters) f = atomize(f);
    return queries;
}

PredicateSets collect_predicate_sets(const std::vector<QueryShape> &queries,
                                     const SchemaDef &schema) {
    PredicateSets sets;
    for (const auto &r : schema.relations) sets[r.name] = PredicateSet{r.name, {}};
    for (const auto &q : queries) {
        for (const auto &[rel, f] : q.filters) {
            std::vector<AtomicPredicate> atoms;
            f.collect_atoms(atoms);
            auto &pset = sets[rel];
            for (auto &a : atoms)
                if (!pset.contains(a)) pset.predicates.push_back(a);
        }
    }
    return sets;
}

Bitmap predicate_bitmap(const AtomicPredicate &p, const RelationData &rel) {
    int col = rel.column_index(p.attribute);
    if (col < 0) throw Error("attribute " + p.attribute + " not in " + rel.def().name);
    Bitmap b(rel.row_count());
    const Column &column = rel.column(static_cast<std::size_t>(col));
    for (std::size_t row = 0; row < rel.row_count(); ++row)
        if (p.evaluate(column.at(row))) b.set(row);
    return b;
}

PredicateSet minimize_predicates(const PredicateSet &pset,
                                 const std::vector<Bitmap> &tuple_bitmaps) {
    if (tuple_bitmaps.size() != pset.size())
        throw Error("minimize_predicates: one bitmap per predicate required");
    PredicateSet out{pset.relation, {}};
    std::vector<const Bitmap *> kept;
    for (std::size_t i = 0; i < pset.size(); ++i) {
        const Bitmap &b = tuple_bitmaps[i];
        std::size_t card = b.cardinality();
        if (card == 0 || card == b.universe()) continue; // splits nothing
        bool redundant = false;
        for (const Bitmap *k : kept) {
            if (b == *k || b == ~*k) {
                redundant = true;
                break;
            }
        }
        if (redundant) continue;
        kept.push_back(&b);
        out.predicates.push_back(pset.predicates[i]);
    }
    return out;
}

} // namespace hpart
