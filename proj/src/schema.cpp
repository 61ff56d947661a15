#include "hpart/schema.hpp"

#include <fstream>
#include <sstream>

namespace hpart {

const AttributeDef *RelationDef::find(const std::string &attr) const {
    for (const auto &a : attributes)
        if (a.name == attr) return &a;
    return nullptr;
}

int RelationDef::index_of(const std::string &attr) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == attr) return static_cast<int>(i);
    return -1;
}

const RelationDef *SchemaDef::find(const std::string &name) const {
    for (const auto &r : relations)
        if (r.name == name) return &r;
    return nullptr;
}

const RelationDef &SchemaDef::require(const std::string &name) const {
    const RelationDef *r = find(name);
    if (!r) throw Error("unknown relation: " + name);
    return *r;
}

bool SchemaDef::is_fact(const std::string &name) const {
    return star && star->fact == name;
}

bool SchemaDef::is_dimension(const std::string &name) const {
    if (!star) return false;
    for (const auto &e : star->edges)
        if (e.dimension == name) return true;
    return false;
}

std::string SchemaDef::relation_of_attribute(const std::string &attr) const {
    const RelationDef *owner = nullptr;
    for (const auto &r : relations) {
        if (r.find(attr)) {
            if (owner) throw Error("ambiguous attribute: " + attr);
            owner = &r;
        }
    }
    if (!owner) throw Error("unknown attribute: " + attr);
    return owner->name;
}

// Format, line oriented:
//   relation <name>
//   attr <name> <kind> [var]
//   pk <attr>
//   fact <relation>
//   fk <fact_attr> <dimension> <dim_pk>
SchemaDef SchemaDef::parse(const std::string &text) {
    SchemaDef def;
    RelationDef *cur = nullptr;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        auto fail = [&](const std::string &msg) {
            throw Error("schema-def line " + std::to_string(lineno) + ": " + msg);
        };
        if (tok == "relation") {
            std::string name;
            if (!(ls >> name)) fail("missing relation name");
            def.relations.push_back(RelationDef{name, {}, ""});
            cur = &def.relations.back();
        } else if (tok == "attr") {
            if (!cur) fail("attr before relation");
            std::string name, kind, extra;
            if (!(ls >> name >> kind)) fail("attr needs name and kind");
            AttributeDef a;
            a.name = name;
            a.kind = kind_from_name(kind);
            if (ls >> extra) {
                if (extra != "var") fail("unknown attr flag: " + extra);
                a.variable_width = true;
            } else if (a.kind == Kind::Text) {
                a.variable_width = true;
            }
            cur->attributes.push_back(a);
        } else if (tok == "pk") {
            if (!cur) fail("pk before relation");
            if (!(ls >> cur->primary_key)) fail("pk needs attribute");
        } else if (tok == "fact") {
            std::string name;
            if (!(ls >> name)) fail("fact needs relation name");
            if (!def.star) def.star = StarDef{};
            def.star->fact = name;
        } else if (tok == "fk") {
            FkEdge e;
            if (!(ls >> e.fact_attr >> e.dimension >> e.dim_pk)) fail("fk needs 3 fields");
            if (!def.star) def.star = StarDef{};
            def.star->edges.push_back(e);
        } else {
            fail("unknown directive: " + tok);
        }
    }
    for (const auto &r : def.relations) {
        if (!r.primary_key.empty() && !r.find(r.primary_key))
            throw Error("pk attribute not in relation " + r.name);
    }
    if (def.star) {
        if (def.star->fact.empty()) throw Error("schema-def: fk without fact");
        def.require(def.star->fact);
        for (const auto &e : def.star->edges) {
            const RelationDef &dim = def.require(e.dimension);
            if (!dim.find(e.dim_pk)) throw Error("fk target attribute missing: " + e.dim_pk);
            if (!def.require(def.star->fact).find(e.fact_attr))
                throw Error("fk source attribute missing: " + e.fact_attr);
        }
    }
    return def;
}

SchemaDef SchemaDef::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open schema-def file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string SchemaDef::to_text() const {
    std::ostringstream out;
    for (const auto &r : relations) {
        out << "relation " << r.name << "\n";
        for (const auto &a : r.attributes) {
            out << "attr " << a.name << " " << kind_name(a.kind);
            if (a.variable_width && a.kind != Kind::Text) out << " var";
            out << "\n";
        }
        if (!r.primary_key.empty()) out << "pk " << r.primary_key << "\n";
    }
    if (star) {
        out << "fact " << star->fact << "\n";
        for (const auto &e : star->edges)
            out << "fk " << e.fact_attr << " " << e.dimension << " " << e.dim_pk << "\n";
    }
    return out.str();
}

} // namespace hpart
