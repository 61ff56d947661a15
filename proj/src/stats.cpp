#include "hpart/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpart {

std::vector<PartitionPredicate> effective_predicates(const std::string &rel,
                                                     const PredicateSets &psets,
                                                     const SchemaDef &schema) {
    std::vector<PartitionPredicate> out;
    if (schema.is_fact(rel)) {
        for (const auto &edge : schema.star->edges) {
            auto it = psets.find(edge.dimension);
            if (it == psets.end()) continue;
            for (const auto &p : it->second.predicates)
                out.push_back(PartitionPredicate{p, true, edge.fact_attr});
        }
        return out;
    }
    auto it = psets.find(rel);
    if (it != psets.end())
        for (const auto &p : it->second.predicates)
            out.push_back(PartitionPredicate{p, false, {}});
    return out;
}

std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
fact_key_layout(const PredicateSets &psets, const SchemaDef &schema) {
    if (!schema.star) throw Error("fact_key_layout requires a star schema");
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> out;
    std::size_t offset = 0;
    for (const auto &edge : schema.star->edges) {
        std::size_t m = 0;
        auto it = psets.find(edge.dimension);
        if (it != psets.end()) m = it->second.size();
        out.push_back({edge.dimension, {offset, m}});
        offset += m;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parent statistics

ParentStats build_parent_stats(const RelationData &rel, std::size_t stats_target) {
    if (stats_target == 0) throw Error("stats_target must be positive");
    const std::size_t rows = rel.row_count();
    ParentStats ps;
    ps.reltuples = rows;
    ps.attrs.resize(rel.column_count());
    for (std::size_t c = 0; c < rel.column_count(); ++c) {
        const AttributeDef &adef = rel.def().attributes[c];
        AttrParentStats &as = ps.attrs[c];
        std::map<Scalar, std::size_t> counts;
        std::size_t total_bytes = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            counts[rel.value(r, c)] += 1;
            total_bytes += rel.column(c).byte_width_at(r);
        }
        as.distinct = counts.size();
        as.width = adef.variable_width
                       ? (rows ? static_cast<double>(total_bytes) / rows : 0.0)
                       : (adef.kind == Kind::Decimal ? 8.0 : 4.0);
        if (adef.variable_width) ps.all_fixed = false;

        // most common values: occurrence count >= 2, by descending frequency,
        // ties by value order
        std::vector<std::pair<Scalar, std::size_t>> candidates;
        for (const auto &[v, n] : counts)
            if (n >= 2) candidates.push_back({v, n});
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto &a, const auto &b) { return a.second > b.second; });
        if (candidates.size() > stats_target) candidates.resize(stats_target);
        for (const auto &[v, n] : candidates) {
            as.mcv_values.push_back(v);
            as.mcv_freqs.push_back(static_cast<double>(n) / rows);
        }

        // equi-depth boundaries over the non-MCV value instances
        std::vector<Scalar> inst;
        for (const auto &[v, n] : counts) {
            bool is_mcv = std::any_of(as.mcv_values.begin(), as.mcv_values.end(),
                                      [&](const Scalar &m) { return m == v; });
            if (is_mcv) continue;
            for (std::size_t k = 0; k < n; ++k) inst.push_back(v);
        }
        std::size_t distinct_non_mcv = as.distinct - as.mcv_values.size();
        if (distinct_non_mcv >= 2 && inst.size() >= 2) {
            std::size_t nb = std::min(stats_target, distinct_non_mcv - 1);
            std::vector<Scalar> bounds;
            for (std::size_t i = 0; i <= nb; ++i) {
                std::size_t idx = i * (inst.size() - 1) / nb;
                if (bounds.empty() || !(bounds.back() == inst[idx]))
                    bounds.push_back(inst[idx]);
            }
            if (bounds.size() >= 2) as.histogram = std::move(bounds);
        }

        if (rows == 0)
            as.stadistinct = 0.0;
        else if (as.distinct * 10 >= rows)
            as.stadistinct = -static_cast<double>(as.distinct) / rows;
        else
            as.stadistinct = static_cast<double>(as.distinct);
        ps.tuple_width += as.width;
    }
    if (rows > 0) {
        double per_tuple = 8.0 + ps.tuple_width;
        std::size_t per_page = static_cast<std::size_t>(std::floor(8168.0 / per_tuple));
        if (per_page == 0) throw Error("tuple wider than a page in " + rel.def().name);
        ps.relpages = (rows + per_page - 1) / per_page;
    }
    return ps;
}

// ---------------------------------------------------------------------------
// Index construction

Bitmap partition_predicate_bitmap(const PartitionPredicate &p, const RelationData &rel,
                                  const Dataset &data, const SchemaDef &schema) {
    if (!p.induced) return predicate_bitmap(p.atom, rel);
    auto dit = data.find(p.atom.relation);
    if (dit == data.end())
        throw Error("dimension data missing for induced predicate: " + p.atom.relation);
    const RelationData &dim = dit->second;
    // satisfying PK values of the dimension
    const FkEdge *edge = nullptr;
    for (const auto &e : schema.star->edges)
        if (e.dimension == p.atom.relation && e.fact_attr == p.via_fk_attr) edge = &e;
    if (!edge) throw Error("no FK edge for induced predicate via " + p.via_fk_attr);
    std::set<Scalar> sat_pks;
    {
        int pk_col = dim.column_index(edge->dim_pk);
        int col = dim.column_index(p.atom.attribute);
        if (pk_col < 0 || col < 0) throw Error("bad induced predicate attributes");
        for (std::size_t r = 0; r < dim.row_count(); ++r)
            if (p.atom.evaluate(dim.value(r, static_cast<std::size_t>(col))))
                sat_pks.insert(dim.value(r, static_cast<std::size_t>(pk_col)));
    }
    Bitmap b(rel.row_count());
    int fk_col = rel.column_index(p.via_fk_attr);
    if (fk_col < 0) throw Error("fact FK attribute missing: " + p.via_fk_attr);
    for (std::size_t r = 0; r < rel.row_count(); ++r)
        if (sat_pks.count(rel.value(r, static_cast<std::size_t>(fk_col)))) b.set(r);
    return b;
}

int AttrDomain::index_of(const Scalar &v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || !(*it == v)) return -1;
    return static_cast<int>(it - values.begin());
}

PredicateSet RelationStats::as_pset() const {
    PredicateSet p{def.name, {}};
    for (const auto &pp : preds) p.predicates.push_back(pp.atom);
    return p;
}

namespace {

void build_mdh_serial(const RelationData &rel, const std::vector<std::uint64_t> &row_cells,
                      MDH &mdh) {
    const std::size_t nattr = rel.column_count();
    for (std::size_t r = 0; r < rel.row_count(); ++r) {
        CellRecord &rec = mdh.cells[row_cells[r]];
        if (rec.value_counts.empty()) {
            rec.value_counts.resize(nattr);
            rec.byte_totals.assign(nattr, 0);
        }
        rec.tuple_count += 1;
        for (std::size_t c = 0; c < nattr; ++c) {
            rec.value_counts[c][rel.value(r, c)] += 1;
            rec.byte_totals[c] += rel.column(c).byte_width_at(r);
        }
    }
}

void merge_cell_record(CellRecord &into, const CellRecord &from, std::size_t nattr) {
    if (into.value_counts.empty()) {
        into.value_counts.resize(nattr);
        into.byte_totals.assign(nattr, 0);
    }
    into.tuple_count += from.tuple_count;
    for (std::size_t c = 0; c < nattr; ++c) {
        for (const auto &[v, n] : from.value_counts[c]) into.value_counts[c][v] += n;
        into.byte_totals[c] += from.byte_totals[c];
    }
}

void attach_mcv_counts(MDH &mdh, const ParentStats &parent, std::size_t nattr) {
    for (auto &[bits, rec] : mdh.cells) {
        rec.mcv_counts.assign(nattr, {});
        for (std::size_t c = 0; c < nattr; ++c) {
            const auto &mcvs = parent.attrs[c].mcv_values;
            for (std::uint32_t i = 0; i < mcvs.size(); ++i) {
                auto it = rec.value_counts[c].find(mcvs[i]);
                if (it != rec.value_counts[c].end())
                    rec.mcv_counts[c].push_back({i, static_cast<std::uint32_t>(it->second)});
            }
        }
    }
}

} // namespace

RelationStats build_relation_stats(const RelationData &rel,
                                   std::vector<PartitionPredicate> preds,
                                   const Dataset &data, const SchemaDef &schema,
                                   std::size_t stats_target, ExecMode mode) {
    if (preds.size() > kMaxPredicates)
        throw Error("too many partitioning predicates for " + rel.def().name);
    RelationStats st;
    st.def = rel.def();
    st.preds = std::move(preds);
    st.universe_ = rel.row_count();
    st.parent = build_parent_stats(rel, stats_target);

    const std::size_t npred = st.preds.size();
    const std::size_t nattr = rel.column_count();
    const std::size_t rows = rel.row_count();

    // tuple-encoded bitmaps, one per predicate
    st.tuple_idx.resize(npred);
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(npred); ++i)
            st.tuple_idx[static_cast<std::size_t>(i)] = partition_predicate_bitmap(
                st.preds[static_cast<std::size_t>(i)], rel, data, schema);
    } else {
        for (std::size_t i = 0; i < npred; ++i)
            st.tuple_idx[i] = partition_predicate_bitmap(st.preds[i], rel, data, schema);
    }

    // per-row finest cell
    st.row_cells.assign(rows, 0);
    for (std::size_t i = 0; i < npred; ++i) {
        const auto &words = st.tuple_idx[i].words();
        for (std::size_t r = 0; r < rows; ++r)
            if ((words[r >> 6] >> (r & 63)) & 1) st.row_cells[r] |= std::uint64_t(1) << i;
    }

    // attribute domains
    st.domains.resize(nattr);
    for (std::size_t c = 0; c < nattr; ++c) {
        std::set<Scalar> vals;
        for (std::size_t r = 0; r < rows; ++r) vals.insert(rel.value(r, c));
        st.domains[c].values.assign(vals.begin(), vals.end());
    }

    // value-encoded co-occurrence indexes
    st.value_pos.assign(nattr, {});
    st.value_neg.assign(nattr, {});
    auto build_value_indexes_for_attr = [&](std::size_t c) {
        const std::size_t dom = st.domains[c].values.size();
        std::vector<int> row_val(rows);
        for (std::size_t r = 0; r < rows; ++r)
            row_val[r] = st.domains[c].index_of(rel.value(r, c));
        st.value_pos[c].assign(npred, Bitmap(dom));
        st.value_neg[c].assign(npred, Bitmap(dom));
        for (std::size_t i = 0; i < npred; ++i) {
            const auto &words = st.tuple_idx[i].words();
            for (std::size_t r = 0; r < rows; ++r) {
                bool sat = (words[r >> 6] >> (r & 63)) & 1;
                if (sat)
                    st.value_pos[c][i].set(static_cast<std::size_t>(row_val[r]));
                else
                    st.value_neg[c][i].set(static_cast<std::size_t>(row_val[r]));
            }
        }
    };
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nattr); ++c)
            build_value_indexes_for_attr(static_cast<std::size_t>(c));
    } else {
        for (std::size_t c = 0; c < nattr; ++c) build_value_indexes_for_attr(c);
    }

    // multidimensional histogram of finest granularity
    st.mdh.relation = rel.def().name;
    st.mdh.m = npred;
    if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
        int nthreads = omp_get_max_threads();
#else
        int nthreads = 1;
#endif
        std::vector<MDH> partials(static_cast<std::size_t>(nthreads));
#pragma omp parallel num_threads(nthreads)
        {
#ifdef _OPENMP
            int tid = omp_get_thread_num();
            int nt = omp_get_num_threads();
#else
            int tid = 0, nt = 1;
#endif
            MDH &local = partials[static_cast<std::size_t>(tid)];
            std::size_t chunk = (rows + static_cast<std::size_t>(nt) - 1) /
                                static_cast<std::size_t>(nt);
            std::size_t begin = static_cast<std::size_t>(tid) * chunk;
            std::size_t end = std::min(rows, begin + chunk);
            for (std::size_t r = begin; r < end; ++r) {
                CellRecord &rec = local.cells[st.row_cells[r]];
                if (rec.value_counts.empty()) {
                    rec.value_counts.resize(nattr);
                    rec.byte_totals.assign(nattr, 0);
                }
                rec.tuple_count += 1;
                for (std::size_t c = 0; c < nattr; ++c) {
                    rec.value_counts[c][rel.value(r, c)] += 1;
                    rec.byte_totals[c] += rel.column(c).byte_width_at(r);
                }
            }
        }
        for (const auto &partial : partials)
            for (const auto &[bits, rec] : partial.cells)
                merge_cell_record(st.mdh.cells[bits], rec, nattr);
    } else {
        build_mdh_serial(rel, st.row_cells, st.mdh);
    }
    attach_mcv_counts(st.mdh, st.parent, nattr);
    return st;
}

// ---------------------------------------------------------------------------
// Derivations

Bitmap fragment_bitmap(const FragmentKey &key, const RelationStats &stats) {
    if (key.m != stats.preds.size()) throw Error("key / index family length mismatch");
    Bitmap b = Bitmap::full(stats.row_count());
    for (std::size_t i = 0; i < key.m; ++i) {
        int d = key.digit(i);
        if (d == 2) continue;
        if (d == 1)
            b.intersect_with(stats.tuple_idx[i]);
        else
            b.intersect_with_complement(stats.tuple_idx[i]);
    }
    return b;
}

std::size_t fragment_cardinality(const FragmentKey &key, const RelationStats &stats) {
    return fragment_bitmap(key, stats).cardinality();
}

CellRecord aggregate_cells(const MDH &mdh, const FragmentKey &key, std::size_t attr_count) {
    if (key.m != mdh.m) throw Error("key / MDH length mismatch");
    CellRecord out;
    out.value_counts.resize(attr_count);
    out.byte_totals.assign(attr_count, 0);
    for (const auto &[bits, rec] : mdh.cells) {
        if (!key.covers(Cell{bits, mdh.m})) continue;
        merge_cell_record(out, rec, attr_count);
    }
    return out;
}

namespace {

/// true iff value satisfies every non-wildcard predicate of the key that is
/// defined over this attribute
bool value_passes_key(const Scalar &v, const FragmentKey &key,
                      const std::vector<PartitionPredicate> &preds,
                      const std::string &attr) {
    for (std::size_t i = 0; i < key.m; ++i) {
        int d = key.digit(i);
        if (d == 2 || !preds[i].constrains_attribute(attr)) continue;
        bool sat = preds[i].atom.evaluate(v);
        if (sat != (d == 1)) return false;
    }
    return true;
}

} // namespace

std::vector<Scalar> derive_histogram(const AttrParentStats &parent, const FragmentKey &key,
                                     const std::vector<PartitionPredicate> &preds,
                                     const std::string &attr) {
    std::vector<Scalar> out;
    for (const auto &b : parent.histogram)
        if (value_passes_key(b, key, preds, attr)) out.push_back(b);
    if (out.size() < 2) out.clear();
    return out;
}

McvResult derive_mcv(const AttrParentStats &parent, const FragmentKey &key,
                     const RelationStats &stats, std::size_t attr_idx,
                     std::size_t fragment_card) {
    if (fragment_card == 0) throw Error("derive_mcv requires a nonempty fragment");
    const std::string &attr = stats.def.attributes[attr_idx].name;
    std::vector<std::size_t> counts(parent.mcv_values.size(), 0);
    for (const auto &[bits, rec] : stats.mdh.cells) {
        if (!key.covers(Cell{bits, stats.mdh.m})) continue;
        for (const auto &[idx, n] : rec.mcv_counts[attr_idx]) counts[idx] += n;
    }
    McvResult out;
    for (std::size_t i = 0; i < parent.mcv_values.size(); ++i) {
        if (counts[i] == 0) continue;
        if (!value_passes_key(parent.mcv_values[i], key, stats.preds, attr)) continue;
        out.values.push_back(parent.mcv_values[i]);
        out.freqs.push_back(static_cast<double>(counts[i]) / fragment_card);
    }
    return out;
}

double derive_width(const AttrParentStats &parent, const FragmentKey &key,
                    const RelationStats &stats, std::size_t attr_idx,
                    std::size_t fragment_card) {
    if (!stats.def.attributes[attr_idx].variable_width) return parent.width;
    if (fragment_card == 0) return parent.width; // degenerate fragment
    std::size_t bytes = 0;
    for (const auto &[bits, rec] : stats.mdh.cells) {
        if (!key.covers(Cell{bits, stats.mdh.m})) continue;
        bytes += rec.byte_totals[attr_idx];
    }
    return static_cast<double>(bytes) / fragment_card;
}

std::size_t derive_distinct_count(std::size_t attr_idx, const FragmentKey &key,
                                  const RelationStats &stats) {
    const std::size_t dom = stats.domains[attr_idx].values.size();
    Bitmap b = Bitmap::full(dom);
    for (std::size_t i = 0; i < key.m; ++i) {
        int d = key.digit(i);
        if (d == 2) continue;
        b.intersect_with(d == 1 ? stats.value_pos[attr_idx][i]
                                : stats.value_neg[attr_idx][i]);
    }
    return b.cardinality();
}

// ---------------------------------------------------------------------------
// Snapshot serialization ("PHMDH1")

namespace {

void put_u64(std::ostream &out, std::uint64_t v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

std::uint64_t get_u64(std::istream &in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char *>(&v), sizeof(v));
    if (!in) throw Error("truncated snapshot");
    return v;
}

void put_scalar(std::ostream &out, const Scalar &v) {
    out.put(static_cast<char>(v.kind()));
    switch (v.kind()) {
    case Kind::Integer: put_u64(out, static_cast<std::uint64_t>(v.as_int())); break;
    case Kind::Date: put_u64(out, static_cast<std::uint64_t>(v.as_date())); break;
    case Kind::Decimal: {
        double d = v.as_decimal();
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof(d));
        put_u64(out, bits);
        break;
    }
    case Kind::Text:
        put_u64(out, v.as_text().size());
        out.write(v.as_text().data(), static_cast<std::streamsize>(v.as_text().size()));
        break;
    }
}

Scalar get_scalar(std::istream &in) {
    int k = in.get();
    if (k < 0) throw Error("truncated snapshot");
    switch (static_cast<Kind>(k)) {
    case Kind::Integer: return Scalar::integer(static_cast<std::int64_t>(get_u64(in)));
    case Kind::Date: return Scalar::date(static_cast<std::int32_t>(get_u64(in)));
    case Kind::Decimal: {
        std::uint64_t bits = get_u64(in);
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        return Scalar::decimal(d);
    }
    case Kind::Text: {
        std::size_t n = get_u64(in);
        std::string s(n, '\0');
        in.read(s.data(), static_cast<std::streamsize>(n));
        if (!in) throw Error("truncated snapshot");
        return Scalar::text(std::move(s));
    }
    }
    throw Error("bad scalar kind in snapshot");
}

void put_bitmap(std::ostream &out, const Bitmap &b) {
    put_u64(out, b.universe());
    for (std::uint64_t w : b.words()) put_u64(out, w);
}

Bitmap get_bitmap(std::istream &in) {
    Bitmap b(get_u64(in));
    for (auto &w : b.mutable_words()) w = get_u64(in);
    return b;
}

constexpr char kMagic[6] = {'P', 'H', 'M', 'D', 'H', '1'};

} // namespace

void save_snapshot(const RelationStats &stats, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write snapshot: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::size_t nattr = stats.def.attributes.size();
    put_u64(out, stats.mdh.m);
    put_u64(out, nattr);
    put_u64(out, stats.universe_);
    put_u64(out, stats.tuple_idx.size());
    for (const auto &b : stats.tuple_idx) put_bitmap(out, b);
    put_u64(out, stats.mdh.cells.size());
    for (const auto &[bits, rec] : stats.mdh.cells) {
        put_u64(out, bits);
        put_u64(out, rec.tuple_count);
        for (std::size_t c = 0; c < nattr; ++c) {
            put_u64(out, rec.value_counts[c].size());
            for (const auto &[v, n] : rec.value_counts[c]) {
                put_scalar(out, v);
                put_u64(out, n);
            }
            put_u64(out, rec.byte_totals[c]);
            put_u64(out, rec.mcv_counts[c].size());
            for (const auto &[i, n] : rec.mcv_counts[c]) {
                put_u64(out, i);
                put_u64(out, n);
            }
        }
    }
    put_u64(out, stats.domains.size());
    for (const auto &d : stats.domains) {
        put_u64(out, d.values.size());
        for (const auto &v : d.values) put_scalar(out, v);
    }
    for (std::size_t c = 0; c < nattr; ++c) {
        for (const auto &b : stats.value_pos[c]) put_bitmap(out, b);
        for (const auto &b : stats.value_neg[c]) put_bitmap(out, b);
    }
    put_u64(out, stats.row_cells.size());
    for (std::uint64_t v : stats.row_cells) put_u64(out, v);
}

void load_snapshot_into(RelationStats &stats, const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot: " + path);
    char magic[6];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("bad snapshot magic in " + path);
    const std::size_t nattr = stats.def.attributes.size();
    std::size_t m = get_u64(in);
    if (get_u64(in) != nattr) throw Error("snapshot attribute count mismatch");
    stats.universe_ = get_u64(in);
    std::size_t npred = get_u64(in);
    stats.tuple_idx.clear();
    for (std::size_t i = 0; i < npred; ++i) stats.tuple_idx.push_back(get_bitmap(in));
    stats.mdh.m = m;
    stats.mdh.cells.clear();
    std::size_t ncells = get_u64(in);
    for (std::size_t k = 0; k < ncells; ++k) {
        std::uint64_t bits = get_u64(in);
        CellRecord rec;
        rec.tuple_count = get_u64(in);
        rec.value_counts.resize(nattr);
        rec.byte_totals.assign(nattr, 0);
        rec.mcv_counts.assign(nattr, {});
        for (std::size_t c = 0; c < nattr; ++c) {
            std::size_t nv = get_u64(in);
            for (std::size_t j = 0; j < nv; ++j) {
                Scalar v = get_scalar(in);
                rec.value_counts[c][v] = get_u64(in);
            }
            rec.byte_totals[c] = get_u64(in);
            std::size_t nm = get_u64(in);
            for (std::size_t j = 0; j < nm; ++j) {
                std::uint32_t idx = static_cast<std::uint32_t>(get_u64(in));
                std::uint32_t n = static_cast<std::uint32_t>(get_u64(in));
                rec.mcv_counts[c].push_back({idx, n});
            }
        }
        stats.mdh.cells[bits] = std::move(rec);
    }
    std::size_t ndom = get_u64(in);
    stats.domains.assign(ndom, {});
    for (auto &d : stats.domains) {
        std::size_t nv = get_u64(in);
        for (std::size_t j = 0; j < nv; ++j) d.values.push_back(get_scalar(in));
    }
    stats.value_pos.assign(nattr, {});
    stats.value_neg.assign(nattr, {});
    for (std::size_t c = 0; c < nattr; ++c) {
        for (std::size_t i = 0; i < npred; ++i) stats.value_pos[c].push_back(get_bitmap(in));
        for (std::size_t i = 0; i < npred; ++i) stats.value_neg[c].push_back(get_bitmap(in));
    }
    stats.row_cells.clear();
    std::size_t nrows = get_u64(in);
    for (std::size_t r = 0; r < nrows; ++r) stats.row_cells.push_back(get_u64(in));
}

} // namespace hpart
