#include "hpart/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hpart {

const RelationCatalogRecord &CatalogStore::relation_record(const std::string &fragment) const {
    auto it = relations.find(fragment);
    if (it == relations.end()) throw Error("no catalog record for fragment " + fragment);
    return it->second;
}

const AttributeCatalogRecord &CatalogStore::attribute_record(const std::string &fragment,
                                                             const std::string &attr) const {
    auto it = attributes.find({fragment, attr});
    if (it == attributes.end())
        throw Error("no catalog record for " + fragment + "." + attr);
    return it->second;
}

std::size_t derive_reltuples(const FragmentKey &key, const RelationStats &stats) {
    return fragment_cardinality(key, stats);
}

std::size_t derive_relpages(std::size_t reltuples, const std::vector<double> &widths,
                            const ParentStats &parent, bool all_fixed) {
    if (!all_fixed) {
        double per_tuple = static_cast<double>(PageLayout::per_tuple_overhead);
        for (double w : widths) per_tuple += w;
        if (per_tuple > static_cast<double>(PageLayout::usable_bytes))
            throw Error("oversized tuple: cannot fit one page");
        if (reltuples == 0) return 0;
        std::size_t per_page =
            static_cast<std::size_t>(std::floor(PageLayout::usable_bytes / per_tuple));
        if (per_page == 0) throw Error("oversized tuple: cannot fit one page");
        return (reltuples + per_page - 1) / per_page;
    }
    if (reltuples == 0) return 0;
    if (parent.reltuples == 0) throw Error("fragment tuples without parent tuples");
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(parent.relpages) * static_cast<double>(reltuples) /
                  static_cast<double>(parent.reltuples)));
}

namespace {

struct FragmentRecords {
    RelationCatalogRecord rel;
    std::vector<AttributeCatalogRecord> attrs;
};

FragmentRecords build_fragment_records(const std::string &frag_id, const FragmentKey &key,
                                       const RelationStats &st) {
    FragmentRecords out;
    out.rel.fragment = frag_id;
    out.rel.relation = st.def.name;
    out.rel.key = key;
    out.rel.reltuples = derive_reltuples(key, st);

    const std::size_t nattr = st.def.attributes.size();
    std::vector<double> widths(nattr);
    for (std::size_t c = 0; c < nattr; ++c)
        widths[c] = derive_width(st.parent.attrs[c], key, st, c, out.rel.reltuples);
    out.rel.relpages =
        derive_relpages(out.rel.reltuples, widths, st.parent, st.parent.all_fixed);

    out.attrs.resize(nattr);
    for (std::size_t c = 0; c < nattr; ++c) {
        AttributeCatalogRecord &ar = out.attrs[c];
        ar.fragment = frag_id;
        ar.attribute = st.def.attributes[c].name;
        ar.width = widths[c];
        std::size_t distinct = derive_distinct_count(c, key, st);
        if (out.rel.reltuples == 0 || distinct == 0)
            ar.stadistinct = 0.0;
        else if (st.parent.attrs[c].stadistinct < 0)
            ar.stadistinct =
                -static_cast<double>(distinct) / static_cast<double>(out.rel.reltuples);
        else
            ar.stadistinct = static_cast<double>(distinct);
        if (out.rel.reltuples > 0) {
            McvResult mcv = derive_mcv(st.parent.attrs[c], key, st, c, out.rel.reltuples);
            ar.mcv_values = std::move(mcv.values);
            ar.mcv_freqs = std::move(mcv.freqs);
            ar.histogram = derive_histogram(st.parent.attrs[c], key, st.preds,
                                            st.def.attributes[c].name);
        }
    }
    return out;
}

void insert_records(CatalogStore &store, FragmentRecords &&recs) {
    std::string frag = recs.rel.fragment;
    store.relations[frag] = std::move(recs.rel);
    for (auto &ar : recs.attrs) {
        std::string attr = ar.attribute;
        store.attributes[{frag, attr}] = std::move(ar);
    }
}

} // namespace

CatalogStore populate_catalog(const PartitionSchema &schema, const StatsMap &stats,
                              ExecMode mode) {
    CatalogStore store;
    // (fragment id, key, stats) work list across all relations
    std::vector<std::pair<const Fragment *, const RelationStats *>> work;
    for (const auto &[rel, part] : schema.parts) {
        auto sit = stats.find(rel);
        if (sit == stats.end()) throw Error("missing statistics for relation " + rel);
        if (sit->second.preds.size() != (part.fragments.empty()
                                             ? sit->second.preds.size()
                                             : part.fragments[0].key.m))
            throw Error("statistics/schema predicate count mismatch for " + rel);
        for (const auto &f : part.fragments) work.push_back({&f, &sit->second});
    }
    std::vector<Fragment> whole; // single all-wildcard fragments for the rest
    whole.reserve(stats.size());
    for (const auto &[rel, st] : stats) {
        if (schema.has(rel)) continue;
        FragmentKey key = FragmentKey::all_wild(st.preds.size());
        whole.push_back(Fragment{fragment_name(rel, key), key});
        work.push_back({&whole.back(), &st});
    }

    std::vector<FragmentRecords> results(work.size());
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(work.size()); ++i)
            results[static_cast<std::size_t>(i)] =
                build_fragment_records(work[static_cast<std::size_t>(i)].first->id,
                                       work[static_cast<std::size_t>(i)].first->key,
                                       *work[static_cast<std::size_t>(i)].second);
    } else {
        for (std::size_t i = 0; i < work.size(); ++i)
            results[i] =
                build_fragment_records(work[i].first->id, work[i].first->key, *work[i].second);
    }
    for (auto &r : results) insert_records(store, std::move(r));
    return store;
}

// ---------------------------------------------------------------------------
// Export script

namespace {

/// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

const char *sql_type(Kind k) {
    switch (k) {
    case Kind::Integer: return "integer";
    case Kind::Decimal: return "double precision";
    case Kind::Date: return "date";
    case Kind::Text: return "text";
    }
    return "text";
}

/// Array element in pg anyarray text form.
std::string array_elem(const Scalar &v) {
    if (v.kind() != Kind::Text) return v.to_string();
    std::string out = "\"";
    for (char c : v.as_text()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string scalar_array(const std::vector<Scalar> &vals) {
    std::string out = "'{";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ',';
        out += array_elem(vals[i]);
    }
    out += "}'";
    return out;
}

std::string double_array(const std::vector<double> &vals) {
    std::string out = "'{";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(vals[i]);
    }
    out += "}'";
    return out;
}

} // namespace

std::string export_catalog_script(const CatalogStore &store, const StatsMap &stats,
                                  const SchemaDef &schema) {
    std::ostringstream out;
    out << "-- simulated catalog export: one table per fragment, statistics\n"
           "-- injected directly into pg_class / pg_statistic\n";
    for (const auto &[frag, rec] : store.relations) { // map order = by fragment id
        const RelationDef &rdef = schema.require(rec.relation);
        auto sit = stats.find(rec.relation);
        if (sit == stats.end()) throw Error("missing statistics for relation " + rec.relation);
        const RelationStats &st = sit->second;

        out << "\nCREATE TABLE " << frag << " (";
        for (std::size_t c = 0; c < rdef.attributes.size(); ++c) {
            if (c) out << ", ";
            out << rdef.attributes[c].name << ' ' << sql_type(rdef.attributes[c].kind);
        }
        // non-overlapping routing constraints; induced (semi-join) digits are
        // enforced by dimension routing, not expressible as a local CHECK
        std::vector<std::string> checks;
        for (std::size_t i = 0; i < rec.key.m; ++i) {
            int d = rec.key.digit(i);
            if (d == 2 || st.preds[i].induced) continue;
            std::string atom = st.preds[i].atom.to_sql();
            checks.push_back(d == 1 ? atom : "NOT (" + atom + ")");
        }
        if (!checks.empty()) {
            out << ", CHECK (";
            for (std::size_t i = 0; i < checks.size(); ++i) {
                if (i) out << " AND ";
                out << checks[i];
            }
            out << ")";
        }
        out << ");\n";

        out << "UPDATE pg_class SET relpages = " << rec.relpages
            << ", reltuples = " << rec.reltuples << " WHERE relname = '" << frag << "';\n";

        for (std::size_t c = 0; c < rdef.attributes.size(); ++c) {
            const AttributeCatalogRecord &ar =
                store.attribute_record(frag, rdef.attributes[c].name);
            out << "INSERT INTO pg_statistic (starelid, staattnum, stanullfrac, stawidth,"
                   " stadistinct";
            bool has_mcv = !ar.mcv_values.empty();
            bool has_hist = !ar.histogram.empty();
            if (has_mcv) out << ", stakind1, stanumbers1, stavalues1";
            if (has_hist) out << ", stakind2, stavalues2";
            out << ") VALUES ((SELECT oid FROM pg_class WHERE relname = '" << frag << "'), "
                << (c + 1) << ", 0, " << fmt_double(ar.width) << ", "
                << fmt_double(ar.stadistinct);
            if (has_mcv)
                out << ", 1, " << double_array(ar.mcv_freqs) << ", "
                    << scalar_array(ar.mcv_values);
            if (has_hist) out << ", 2, " << scalar_array(ar.histogram);
            out << ");\n";
        }
    }
    return out.str();
}

} // namespace hpart
