#include "hpart/fragmodel.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace hpart {

std::string Cell::to_string() const {
    std::string s(m, '0');
    for (std::size_t i = 0; i < m; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

FragmentKey FragmentKey::all_wild(std::size_t m) {
    if (m > kMaxPredicates) throw Error("too many predicates for one relation");
    FragmentKey k;
    k.m = m;
    k.wild = m == 0 ? 0 : ((std::uint64_t(1) << m) - 1);
    return k;
}

FragmentKey FragmentKey::from_digits(const std::string &digits) {
    if (digits.size() > kMaxPredicates) throw Error("too many predicates for one relation");
    FragmentKey k;
    k.m = digits.size();
    for (std::size_t i = 0; i < digits.size(); ++i) {
        switch (digits[i]) {
        case '0': break;
        case '1': k.ones |= std::uint64_t(1) << i; break;
        case '2': k.wild |= std::uint64_t(1) << i; break;
        default: throw Error("bad digit in fragment key: " + digits);
        }
    }
    return k;
}

FragmentKey FragmentKey::from_cell(const Cell &c) {
    FragmentKey k;
    k.m = c.m;
    k.ones = c.bits;
    return k;
}

int FragmentKey::digit(std::size_t i) const {
    if ((wild >> i) & 1) return 2;
    return static_cast<int>((ones >> i) & 1);
}

void FragmentKey::set_digit(std::size_t i, int d) {
    std::uint64_t bit = std::uint64_t(1) << i;
    ones &= ~bit;
    wild &= ~bit;
    if (d == 1) ones |= bit;
    else if (d == 2) wild |= bit;
    else if (d != 0) throw Error("bad ternary digit");
}

FragmentKey FragmentKey::concat(const FragmentKey &tail) const {
    if (m + tail.m > kMaxPredicates) throw Error("concatenated key too long");
    FragmentKey k;
    k.m = m + tail.m;
    k.ones = ones | (tail.ones << m);
    k.wild = wild | (tail.wild << m);
    return k;
}

FragmentKey FragmentKey::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > m) throw Error("key slice out of range");
    std::uint64_t mask = len == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << len) - 1;
    FragmentKey k;
    k.m = len;
    k.ones = (ones >> begin) & mask;
    k.wild = (wild >> begin) & mask;
    return k;
}

std::string FragmentKey::digit_string() const {
    std::string s(m, '0');
    for (std::size_t i = 0; i < m; ++i) s[i] = static_cast<char>('0' + digit(i));
    return s;
}

bool FragmentKey::operator<(const FragmentKey &o) const {
    return std::tuple(m, ones, wild) < std::tuple(o.m, o.ones, o.wild);
}

FragmentKey generalize(const FragmentKey &a, const FragmentKey &b) {
    if (a.m != b.m) throw Error("generalize: key length mismatch");
    FragmentKey g;
    g.m = a.m;
    for (std::size_t i = 0; i < a.m; ++i) {
        int da = a.digit(i), db = b.digit(i);
        g.set_digit(i, da == db ? da : 2);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Satisfiability

namespace {

struct Bound {
    Scalar value;
    bool strict = false;
};

struct AttrConstraints {
    Kind kind = Kind::Integer;
    std::optional<Scalar> eq;
    std::vector<Scalar> neq;
    std::optional<Bound> lower; // value (<|<=) attr
    std::optional<Bound> upper; // attr (<|<=) value
    bool contradictory = false;

    void tighten_lower(const Scalar &v, bool strict) {
        if (!lower || v > lower->value || (v == lower->value && strict))
            lower = Bound{v, strict};
    }
    void tighten_upper(const Scalar &v, bool strict) {
        if (!upper || v < upper->value || (v == upper->value && strict))
            upper = Bound{v, strict};
    }

    void apply(CompareOp op, const Scalar &c) {
        switch (op) {
        case CompareOp::Eq:
            if (eq && !(*eq == c)) contradictory = true;
            eq = c;
            break;
        case CompareOp::Ne: neq.push_back(c); break;
        case CompareOp::Lt: tighten_upper(c, true); break;
        case CompareOp::Le: tighten_upper(c, false); break;
        case CompareOp::Gt: tighten_lower(c, true); break;
        case CompareOp::Ge: tighten_lower(c, false); break;
        }
    }

    bool within_bounds(const Scalar &v) const {
        if (lower && (v < lower->value || (v == lower->value && lower->strict))) return false;
        if (upper && (v > upper->value || (v == upper->value && upper->strict))) return false;
        return true;
    }

    bool excluded(const Scalar &v) const {
        return std::any_of(neq.begin(), neq.end(), [&](const Scalar &n) { return n == v; });
    }

    bool satisfiable() const {
        if (contradictory) return false;
        if (eq) return within_bounds(*eq) && !excluded(*eq);
        if (!lower || !upper) return true; // half-open: unbounded many values
        bool discrete = kind == Kind::Integer || kind == Kind::Date;
        if (discrete) {
            std::int64_t lo = (kind == Kind::Integer ? lower->value.as_int()
                                                     : lower->value.as_date()) +
                              (lower->strict ? 1 : 0);
            std::int64_t hi = (kind == Kind::Integer ? upper->value.as_int()
                                                     : upper->value.as_date()) -
                              (upper->strict ? 1 : 0);
            if (lo > hi) return false;
            if (static_cast<std::uint64_t>(hi - lo) >= neq.size()) return true;
            for (std::int64_t v = lo; v <= hi; ++v) {
                Scalar s = kind == Kind::Integer
                               ? Scalar::integer(v)
                               : Scalar::date(static_cast<std::int32_t>(v));
                if (!excluded(s)) return true;
            }
            return false;
        }
        // dense kinds (decimal, text with binary collation)
        if (lower->value < upper->value) return true;
        if (lower->value == upper->value && !lower->strict && !upper->strict)
            return !excluded(lower->value);
        return false;
    }
};

} // namespace

bool literals_satisfiable(const std::vector<Literal> &literals) {
    std::map<std::pair<std::string, std::string>, AttrConstraints> by_attr;
    for (const auto &lit : literals) {
        auto &ac = by_attr[{lit.pred.relation, lit.pred.attribute}];
        ac.kind = lit.pred.constant.kind();
        CompareOp op = lit.positive ? lit.pred.op : negate_op(lit.pred.op);
        ac.apply(op, lit.pred.constant);
        if (ac.contradictory) return false;
    }
    for (const auto &[attr, ac] : by_attr)
        if (!ac.satisfiable()) return false;
    return true;
}

std::vector<Literal> key_literals(const FragmentKey &key, const PredicateSet &pset) {
    if (key.m != pset.size()) throw Error("key / predicate set length mismatch");
    std::vector<Literal> lits;
    for (std::size_t i = 0; i < key.m; ++i) {
        int d = key.digit(i);
        if (d == 2) continue;
        lits.push_back(Literal{pset.predicates[i], d == 1});
    }
    return lits;
}

bool satisfiable(const FragmentKey &key, const PredicateSet &pset) {
    return literals_satisfiable(key_literals(key, pset));
}

bool satisfiable_with(const FragmentKey &key, const PredicateSet &pset,
                      const std::vector<AtomicPredicate> &extra) {
    std::vector<Literal> lits = key_literals(key, pset);
    for (const auto &p : extra) lits.push_back(Literal{p, true});
    return literals_satisfiable(lits);
}

bool cell_satisfiable(const Cell &c, const PredicateSet &pset) {
    return satisfiable(FragmentKey::from_cell(c), pset);
}

std::vector<Cell> satisfiable_cells(const PredicateSet &pset) {
    std::size_t m = pset.size();
    if (m > 24) throw Error("cell enumeration limit exceeded (m > 24)");
    std::vector<Cell> cells;
    for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << m); ++bits) {
        Cell c{bits, m};
        if (cell_satisfiable(c, pset)) cells.push_back(c);
    }
    return cells;
}

IndexTable validate_schema(const std::vector<Fragment> &fragments, const PredicateSet &pset) {
    IndexTable table;
    for (const Cell &c : satisfiable_cells(pset)) {
        std::size_t hits = 0, owner = 0;
        for (std::size_t f = 0; f < fragments.size(); ++f) {
            if (fragments[f].key.covers(c)) {
                ++hits;
                owner = f;
            }
        }
        if (hits == 0)
            throw Error("schema coverage violation: cell " + c.to_string() + " uncovered");
        if (hits > 1)
            throw Error("schema overlap violation at cell " + c.to_string());
        table[c.bits] = owner;
    }
    return table;
}

const RelationPartition *PartitionSchema::find(const std::string &rel) const {
    auto it = parts.find(rel);
    return it == parts.end() ? nullptr : &it->second;
}

std::string fragment_name(const std::string &relation, const FragmentKey &key) {
    return relation + "__" + key.digit_string();
}

std::vector<Fragment> derive_fact_keys(
    const std::vector<std::pair<std::string, const std::vector<Fragment> *>> &dim_fragments,
    const StarDef &star) {
    for (const auto &[dim, frags] : dim_fragments) {
        bool known = std::any_of(star.edges.begin(), star.edges.end(),
                                 [&](const FkEdge &e) { return e.dimension == dim; });
        if (!known) throw Error("relation " + dim + " is not a dimension of the star");
    }
    std::vector<FragmentKey> acc{FragmentKey{}};
    for (const auto &[dim, frags] : dim_fragments) {
        std::vector<FragmentKey> nxt;
        nxt.reserve(acc.size() * frags->size());
        for (const auto &head : acc)
            for (const auto &f : *frags) nxt.push_back(head.concat(f.key));
        acc = std::move(nxt);
    }
    std::vector<Fragment> out;
    out.reserve(acc.size());
    for (const auto &k : acc) out.push_back(Fragment{fragment_name(star.fact, k), k});
    return out;
}

IndexTable build_global_index(
    const std::vector<std::pair<std::string, const std::vector<Fragment> *>> &dim_fragments,
    const std::vector<const PredicateSet *> &dim_psets, const StarDef &star) {
    if (dim_psets.size() != dim_fragments.size())
        throw Error("build_global_index: predicate sets misaligned");
    // per dimension: validated local index tables
    std::vector<IndexTable> locals;
    std::vector<std::size_t> widths, counts;
    for (std::size_t d = 0; d < dim_fragments.size(); ++d) {
        locals.push_back(validate_schema(*dim_fragments[d].second, *dim_psets[d]));
        widths.push_back(dim_psets[d]->size());
        counts.push_back(dim_fragments[d].second->size());
    }
    (void)star;
    // cross product of local entries; fragment position follows the
    // derive_fact_keys ordering (first dimension slowest).
    IndexTable global;
    std::vector<IndexTable::const_iterator> its;
    for (const auto &t : locals) its.push_back(t.begin());
    if (std::any_of(locals.begin(), locals.end(), [](const IndexTable &t) { return t.empty(); }))
        return global;
    for (;;) {
        std::uint64_t bits = 0;
        std::size_t shift = 0;
        for (std::size_t d = 0; d < locals.size(); ++d) {
            bits |= its[d]->first << shift;
            shift += widths[d];
        }
        // derive_fact_keys iterates the last dimension fastest, so the
        // position composes as mixed radix with dimension 0 most significant
        std::size_t pos = 0;
        for (std::size_t d = 0; d < locals.size(); ++d)
            pos = pos * counts[d] + its[d]->second;
        global[bits] = pos;
        // advance odometer
        std::size_t d = locals.size();
        while (d > 0) {
            --d;
            if (++its[d] != locals[d].end()) break;
            its[d] = locals[d].begin();
            if (d == 0) return global;
        }
    }
}

AtomicPredicate parse_atomic_predicate(const std::string &text, const std::string &relation,
                                       const SchemaDef &schema) {
    std::istringstream in(text);
    std::string attr, opsym;
    if (!(in >> attr >> opsym)) throw Error("bad predicate text: " + text);
    std::string rest;
    std::getline(in, rest);
    while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
    CompareOp op;
    if (opsym == "<") op = CompareOp::Lt;
    else if (opsym == "<=") op = CompareOp::Le;
    else if (opsym == ">") op = CompareOp::Gt;
    else if (opsym == ">=") op = CompareOp::Ge;
    else if (opsym == "=") op = CompareOp::Eq;
    else if (opsym == "<>" || opsym == "!=") op = CompareOp::Ne;
    else throw Error("bad operator in predicate text: " + text);
    const AttributeDef *a = schema.require(relation).find(attr);
    if (!a) throw Error("unknown attribute " + attr + " in " + relation);
    Scalar c;
    if (!rest.empty() && rest.front() == '\'') {
        if (rest.size() < 2 || rest.back() != '\'')
            throw Error("unterminated literal in predicate text: " + text);
        std::string body;
        for (std::size_t i = 1; i + 1 < rest.size(); ++i) {
            if (rest[i] == '\'' && i + 2 < rest.size() && rest[i + 1] == '\'') ++i;
            body += rest[i];
        }
        c = a->kind == Kind::Date ? Scalar::date(parse_date(body)) : Scalar::text(body);
    } else {
        switch (a->kind) {
        case Kind::Integer: c = Scalar::integer(std::stoll(rest)); break;
        case Kind::Decimal: c = Scalar::decimal(std::stod(rest)); break;
        default: throw Error("quoted literal required in predicate text: " + text);
        }
    }
    return AtomicPredicate{relation, attr, op, std::move(c)};
}

std::string PartitionSchema::serialize(const PredicateSets &psets) const {
    std::ostringstream out;
    out << "# hpart partition schema v1\n";
    for (const auto &[rel, part] : parts) {
        out << "relation " << rel << (part.derived ? " derived" : "") << "\n";
        if (!part.derived) {
            auto it = psets.find(rel);
            if (it != psets.end())
                for (const auto &p : it->second.predicates)
                    out << "predicate " << p.to_sql() << "\n";
        }
        for (const auto &f : part.fragments)
            out << "fragment " << f.id << " " << f.key.digit_string() << "\n";
    }
    return out.str();
}

PartitionSchema PartitionSchema::deserialize(const std::string &text, const SchemaDef &schema,
                                             PredicateSets &psets_out) {
    PartitionSchema ps;
    std::istringstream in(text);
    std::string line;
    std::string cur;
    bool cur_derived = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "relation") {
            std::string flag;
            ls >> cur;
            cur_derived = (ls >> flag) && flag == "derived";
            schema.require(cur);
            ps.parts[cur].derived = cur_derived;
            if (!cur_derived && !psets_out.count(cur)) psets_out[cur] = PredicateSet{cur, {}};
        } else if (tok == "predicate") {
            if (cur.empty()) throw Error("predicate before relation in schema file");
            std::string rest;
            std::getline(ls, rest);
            while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
            AtomicPredicate p = parse_atomic_predicate(rest, cur, schema);
            if (!psets_out[cur].contains(p)) psets_out[cur].predicates.push_back(p);
        } else if (tok == "fragment") {
            if (cur.empty()) throw Error("fragment before relation in schema file");
            std::string id, digits;
            if (!(ls >> id)) throw Error("fragment needs id");
            if (!(ls >> digits)) digits = "";
            ps.parts[cur].fragments.push_back(Fragment{id, FragmentKey::from_digits(digits)});
        } else {
            throw Error("bad schema file directive: " + tok);
        }
    }
    // validate non-derived relations
    for (auto &[rel, part] : ps.parts) {
        if (part.derived) continue;
        part.index = validate_schema(part.fragments, psets_out.at(rel));
    }
    // rebuild the derived fact's routing index from the dimension partitions
    for (auto &[rel, part] : ps.parts) {
        if (!part.derived) continue;
        if (!schema.star || schema.star->fact != rel)
            throw Error("derived partition for non-fact relation " + rel);
        std::vector<std::pair<std::string, const std::vector<Fragment> *>> dim_fragments;
        std::vector<const PredicateSet *> dim_psets;
        for (const auto &e : schema.star->edges) {
            auto it = ps.parts.find(e.dimension);
            if (it == ps.parts.end() || it->second.derived) continue;
            dim_fragments.push_back({e.dimension, &it->second.fragments});
            dim_psets.push_back(&psets_out.at(e.dimension));
        }
        part.index = build_global_index(dim_fragments, dim_psets, *schema.star);
    }
    return ps;
}

PartitionSchema build_partition_schema(const std::map<std::string, std::vector<FragmentKey>> &keys,
                                       const PredicateSets &psets, const SchemaDef &schema) {
    PartitionSchema out;
    for (const auto &[rel, ks] : keys) {
        if (schema.star && rel == schema.star->fact)
            throw Error("fact partitions are derived, not given directly");
        RelationPartition part;
        for (const auto &k : ks) part.fragments.push_back(Fragment{fragment_name(rel, k), k});
        auto pit = psets.find(rel);
        if (pit == psets.end()) throw Error("no predicate set for relation " + rel);
        part.index = validate_schema(part.fragments, pit->second);
        out.parts[rel] = std::move(part);
    }
    if (schema.star) {
        const StarDef &star = *schema.star;
        std::vector<std::pair<std::string, const std::vector<Fragment> *>> dim_fragments;
        std::vector<const PredicateSet *> dim_psets;
        for (const auto &e : star.edges) {
            auto it = out.parts.find(e.dimension);
            if (it == out.parts.end()) continue;
            dim_fragments.push_back({e.dimension, &it->second.fragments});
            dim_psets.push_back(&psets.at(e.dimension));
        }
        if (!dim_fragments.empty()) {
            RelationPartition fact;
            fact.fragments = derive_fact_keys(dim_fragments, star);
            fact.index = build_global_index(dim_fragments, dim_psets, star);
            fact.derived = true;
            out.parts[star.fact] = std::move(fact);
        }
    }
    return out;
}

} // namespace hpart
