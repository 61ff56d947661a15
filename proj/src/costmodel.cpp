#include "hpart/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hpart {

namespace {

constexpr double kDefaultRangeSel = 1.0 / 3.0;
constexpr double kDefaultDistinct = 200.0; // unknown-sigma fallback

double clamp01(double s) { return std::min(1.0, std::max(0.0, s)); }

double distinct_from_sigma(const AttributeCatalogRecord &ar, double reltuples) {
    if (ar.stadistinct > 0) return ar.stadistinct;
    if (ar.stadistinct < 0) return -ar.stadistinct * reltuples;
    return kDefaultDistinct;
}

/// Fraction of the histogram's mass below the constant, with linear
/// interpolation inside the straddled bucket. Bounds delimit z-1 equal-mass
/// buckets.
double histogram_fraction_below(const std::vector<Scalar> &bounds, const Scalar &c) {
    const std::size_t z = bounds.size();
    if (c <= bounds.front()) return 0.0;
    if (c >= bounds.back()) return 1.0;
    for (std::size_t i = 0; i + 1 < z; ++i) {
        if (c >= bounds[i + 1]) continue;
        double lo = bounds[i].numeric(), hi = bounds[i + 1].numeric();
        double within = hi > lo ? (c.numeric() - lo) / (hi - lo) : 0.0;
        return (static_cast<double>(i) + within) / static_cast<double>(z - 1);
    }
    return 1.0;
}

double atom_selectivity(const AtomicPredicate &atom, const AttributeCatalogRecord &ar,
                        double reltuples) {
    double mcv_mass = 0.0;
    for (double f : ar.mcv_freqs) mcv_mass += f;
    double distinct = distinct_from_sigma(ar, reltuples);

    if (atom.op == CompareOp::Eq) {
        for (std::size_t i = 0; i < ar.mcv_values.size(); ++i)
            if (ar.mcv_values[i] == atom.constant) return clamp01(ar.mcv_freqs[i]);
        double rest = std::max(1.0, distinct - static_cast<double>(ar.mcv_values.size()));
        return clamp01((1.0 - mcv_mass) / rest);
    }
    if (atom.op == CompareOp::Ne) {
        AtomicPredicate eq = atom;
        eq.op = CompareOp::Eq;
        return clamp01(1.0 - atom_selectivity(eq, ar, reltuples));
    }

    // range operator: qualifying MCV mass plus interpolated histogram mass
    double sel = 0.0;
    for (std::size_t i = 0; i < ar.mcv_values.size(); ++i)
        if (atom.evaluate(ar.mcv_values[i])) sel += ar.mcv_freqs[i];
    double rest_frac = kDefaultRangeSel;
    if (ar.histogram.size() >= 2) {
        bool numeric_ok = ar.histogram.front().kind() != Kind::Text &&
                          atom.constant.kind() != Kind::Text;
        if (numeric_ok) {
            double below = histogram_fraction_below(ar.histogram, atom.constant);
            switch (atom.op) {
            case CompareOp::Lt:
            case CompareOp::Le: rest_frac = below; break;
            case CompareOp::Gt:
            case CompareOp::Ge: rest_frac = 1.0 - below; break;
            default: break;
            }
        }
    } else if (ar.mcv_values.empty() && ar.histogram.empty()) {
        return kDefaultRangeSel;
    }
    sel += (1.0 - mcv_mass) * rest_frac;
    return clamp01(sel);
}

double expr_selectivity(const PredicateExpr &e, const CatalogStore &store,
                        const std::string &fragment, double reltuples) {
    switch (e.type) {
    case PredicateExpr::Type::True: return 1.0;
    case PredicateExpr::Type::Atom:
        return atom_selectivity(e.atom,
                                store.attribute_record(fragment, e.atom.attribute),
                                reltuples);
    case PredicateExpr::Type::And: {
        double s = 1.0;
        for (const auto &c : e.children)
            s *= expr_selectivity(c, store, fragment, reltuples);
        return clamp01(s);
    }
    case PredicateExpr::Type::Or: {
        double s = 0.0;
        for (const auto &c : e.children) {
            double cs = expr_selectivity(c, store, fragment, reltuples);
            s = s + cs - s * cs;
        }
        return clamp01(s);
    }
    case PredicateExpr::Type::Not:
        return clamp01(1.0 - expr_selectivity(e.children[0], store, fragment, reltuples));
    case PredicateExpr::Type::Between: {
        const auto &ar = store.attribute_record(fragment, e.attribute);
        AtomicPredicate ge{e.relation, e.attribute, CompareOp::Ge, e.lo};
        AtomicPredicate le{e.relation, e.attribute, CompareOp::Le, e.hi};
        return clamp01(atom_selectivity(ge, ar, reltuples) *
                       atom_selectivity(le, ar, reltuples));
    }
    case PredicateExpr::Type::In: {
        const auto &ar = store.attribute_record(fragment, e.attribute);
        double s = 0.0;
        for (const auto &v : e.values) {
            AtomicPredicate eq{e.relation, e.attribute, CompareOp::Eq, v};
            double cs = atom_selectivity(eq, ar, reltuples);
            s = s + cs - s * cs;
        }
        return clamp01(s);
    }
    }
    return 1.0;
}

} // namespace

double estimate_selectivity(const PredicateExpr &expr, const CatalogStore &store,
                            const std::string &fragment, double reltuples) {
    return expr_selectivity(expr, store, fragment, reltuples);
}

PlanCost scan_cost(const RelationCatalogRecord &rec, const PredicateExpr *filter,
                   const CatalogStore &store, const CostParams &params) {
    PlanCost pc;
    double tuples = static_cast<double>(rec.reltuples);
    double quals = filter ? static_cast<double>(filter->atom_count()) : 0.0;
    pc.total = static_cast<double>(rec.relpages) * params.seq_page_cost +
               tuples * params.cpu_tuple_cost +
               tuples * quals * params.cpu_operator_cost;
    double sel = 1.0;
    if (filter && rec.reltuples > 0)
        sel = estimate_selectivity(*filter, store, rec.fragment, tuples);
    pc.output_rows = tuples * sel;
    return pc;
}

PlanCost join_cost(const PlanCost &outer, const PlanCost &inner, double join_selectivity,
                   const CostParams &params) {
    PlanCost pc;
    pc.output_rows = outer.output_rows * inner.output_rows * join_selectivity;
    pc.total = outer.total + inner.total +
               params.cpu_operator_cost * inner.output_rows +
               params.cpu_tuple_cost * (outer.output_rows + pc.output_rows);
    return pc;
}

namespace {

/// Offset/length of the fact key segment induced through one FK attribute.
std::pair<std::size_t, std::size_t> fact_segment(const RelationStats &fact_stats,
                                                 const std::string &fk_attr) {
    std::size_t off = 0, len = 0;
    bool found = false;
    for (std::size_t i = 0; i < fact_stats.preds.size(); ++i) {
        const auto &p = fact_stats.preds[i];
        if (p.induced && p.via_fk_attr == fk_attr) {
            if (!found) off = i;
            found = true;
            ++len;
        } else if (found) {
            break; // segments are contiguous by construction
        }
    }
    return {off, len};
}

bool keys_compatible(const FragmentKey &a, const FragmentKey &b) {
    if (a.m != b.m) throw Error("segment length mismatch in k-tuple test");
    // incompatible iff some position pins 0 on one side and 1 on the other
    std::uint64_t mask = a.m == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << a.m) - 1;
    std::uint64_t decided = ~a.wild & ~b.wild & mask;
    return ((a.ones ^ b.ones) & decided) == 0;
}

struct RelFragments {
    std::string relation;
    std::vector<Fragment> fragments; // participating only
    const PredicateExpr *filter = nullptr;
};

/// k-tuple compatibility of the candidate fragment of rels[depth] with the
/// fragments already chosen, via the query's FK join edges.
bool compatible_with_chosen(const QueryShape &q, const CostContext &ctx,
                            const std::vector<RelFragments> &rels,
                            const std::vector<std::size_t> &chosen, std::size_t depth,
                            const Fragment &cand) {
    if (!ctx.schema_def->star) return true;
    const StarDef &star = *ctx.schema_def->star;
    for (const auto &je : q.joins) {
        for (std::size_t d = 0; d < depth; ++d) {
            const std::string &other = rels[d].relation;
            const std::string &self = rels[depth].relation;
            std::string fact_attr;
            const Fragment *fact_frag = nullptr, *dim_frag = nullptr;
            std::string dim_rel;
            if (je.left_rel == self && je.right_rel == other) {
                if (ctx.schema_def->is_fact(self)) {
                    fact_attr = je.left_attr;
                    fact_frag = &cand;
                    dim_frag = &rels[d].fragments[chosen[d]];
                    dim_rel = other;
                } else if (ctx.schema_def->is_fact(other)) {
                    fact_attr = je.right_attr;
                    fact_frag = &rels[d].fragments[chosen[d]];
                    dim_frag = &cand;
                    dim_rel = self;
                }
            } else if (je.left_rel == other && je.right_rel == self) {
                if (ctx.schema_def->is_fact(other)) {
                    fact_attr = je.left_attr;
                    fact_frag = &rels[d].fragments[chosen[d]];
                    dim_frag = &cand;
                    dim_rel = self;
                } else if (ctx.schema_def->is_fact(self)) {
                    fact_attr = je.right_attr;
                    fact_frag = &cand;
                    dim_frag = &rels[d].fragments[chosen[d]];
                    dim_rel = other;
                }
            }
            if (!fact_frag) continue; // not an FK correlation: conservative
            bool edge_ok = false;
            for (const auto &e : star.edges)
                if (e.fact_attr == fact_attr && e.dimension == dim_rel) edge_ok = true;
            if (!edge_ok) continue;
            auto sit = ctx.stats->find(star.fact);
            if (sit == ctx.stats->end()) continue;
            auto [off, len] = fact_segment(sit->second, fact_attr);
            if (len != dim_frag->key.m) continue;
            if (!keys_compatible(fact_frag->key.slice(off, len), dim_frag->key))
                return false;
        }
    }
    return true;
}

/// FK->PK selectivity: 1 / max(1, inner-side distinct of the join attribute).
double join_selectivity(const QueryShape &q, const CostContext &ctx,
                        const std::vector<RelFragments> &rels,
                        const std::vector<std::size_t> &chosen, std::size_t depth,
                        const Fragment &inner_frag, const RelationCatalogRecord &inner_rec) {
    const std::string &self = rels[depth].relation;
    for (const auto &je : q.joins) {
        std::string inner_attr;
        if (je.left_rel == self) {
            for (std::size_t d = 0; d < depth; ++d)
                if (rels[d].relation == je.right_rel) inner_attr = je.left_attr;
        } else if (je.right_rel == self) {
            for (std::size_t d = 0; d < depth; ++d)
                if (rels[d].relation == je.left_rel) inner_attr = je.right_attr;
        }
        if (inner_attr.empty()) continue;
        const auto &ar = ctx.store->attribute_record(inner_frag.id, inner_attr);
        double d = distinct_from_sigma(ar, static_cast<double>(inner_rec.reltuples));
        return 1.0 / std::max(1.0, d);
    }
    return 1.0; // cross join (no edge to the chain)
}

/// Walk every compatible k-tuple. `acc` carries the chain's estimated rows
/// and only the incremental join CPU cost: every fragment's scan is charged
/// once per query (a fragment is read once however many sub-star joins it
/// feeds), so scan totals are added separately for the fragments that
/// participate in at least one compatible k-tuple.
void enumerate_tuples(const QueryShape &q, const CostContext &ctx,
                      std::vector<RelFragments> &rels,
                      const std::vector<std::vector<PlanCost>> &scans,
                      std::vector<std::size_t> &chosen,
                      std::vector<std::vector<bool>> &used, std::size_t depth,
                      const PlanCost &acc, PlanCost &out) {
    if (depth == rels.size()) {
        out.total += acc.total;
        out.output_rows += acc.output_rows;
        for (std::size_t d = 0; d < rels.size(); ++d) used[d][chosen[d]] = true;
        return;
    }
    for (std::size_t i = 0; i < rels[depth].fragments.size(); ++i) {
        const Fragment &f = rels[depth].fragments[i];
        if (!compatible_with_chosen(q, ctx, rels, chosen, depth, f)) continue;
        const RelationCatalogRecord &rec = ctx.store->relation_record(f.id);
        PlanCost next;
        if (depth == 0) {
            next = PlanCost{0.0, scans[0][i].output_rows};
        } else {
            double sel = join_selectivity(q, ctx, rels, chosen, depth, f, rec);
            PlanCost inner{0.0, scans[depth][i].output_rows};
            next = join_cost(acc, inner, sel, ctx.params);
        }
        chosen[depth] = i;
        enumerate_tuples(q, ctx, rels, scans, chosen, used, depth + 1, next, out);
    }
}

} // namespace

PlanCost query_cost(const QueryShape &q, const CostContext &ctx, bool prune) {
    std::vector<RelFragments> rels;
    for (const std::string &rel : q.relations) {
        RelFragments rf;
        rf.relation = rel;
        rf.filter = q.filter_for(rel);

        std::vector<Fragment> all;
        const RelationPartition *part = ctx.schema->find(rel);
        if (part) {
            all = part->fragments;
        } else {
            auto sit = ctx.stats->find(rel);
            std::size_t m = sit != ctx.stats->end() ? sit->second.preds.size() : 0;
            FragmentKey key = FragmentKey::all_wild(m);
            all.push_back(Fragment{fragment_name(rel, key), key});
        }

        std::vector<AtomicPredicate> extra;
        if (prune && rf.filter) {
            std::vector<AtomicPredicate> conj;
            rf.filter->collect_conjunctive_atoms(conj);
            for (auto &a : conj)
                if (a.relation == rel) extra.push_back(std::move(a));
        }
        auto sit = ctx.stats->find(rel);
        for (auto &f : all) {
            if (prune && sit != ctx.stats->end()) {
                PredicateSet pset = sit->second.as_pset();
                if (!satisfiable_with(f.key, pset, extra)) continue;
            }
            rf.fragments.push_back(std::move(f));
        }
        rels.push_back(std::move(rf));
    }

    PlanCost out;
    if (rels.size() == 1) {
        for (const auto &f : rels[0].fragments) {
            PlanCost pc = scan_cost(ctx.store->relation_record(f.id), rels[0].filter,
                                    *ctx.store, ctx.params);
            out.total += pc.total;
            out.output_rows += pc.output_rows;
        }
        return out;
    }
    std::vector<std::vector<PlanCost>> scans(rels.size());
    std::vector<std::vector<bool>> used(rels.size());
    for (std::size_t d = 0; d < rels.size(); ++d) {
        for (const auto &f : rels[d].fragments)
            scans[d].push_back(scan_cost(ctx.store->relation_record(f.id), rels[d].filter,
                                         *ctx.store, ctx.params));
        used[d].assign(rels[d].fragments.size(), false);
    }
    std::vector<std::size_t> chosen(rels.size(), 0);
    enumerate_tuples(q, ctx, rels, scans, chosen, used, 0, PlanCost{}, out);
    for (std::size_t d = 0; d < rels.size(); ++d)
        for (std::size_t i = 0; i < scans[d].size(); ++i)
            if (used[d][i]) out.total += scans[d][i].total;
    return out;
}

double workload_cost(const std::vector<QueryShape> &queries, const CostContext &ctx,
                     ExecMode mode) {
    double total = 0.0;
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for reduction(+ : total) schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(queries.size()); ++i)
            total += query_cost(queries[static_cast<std::size_t>(i)], ctx).total;
    } else {
        for (const auto &q : queries) total += query_cost(q, ctx).total;
    }
    return total;
}

std::string cost_report(const std::vector<QueryShape> &queries, const CostContext &ctx) {
    std::ostringstream out;
    for (const auto &q : queries) {
        PlanCost pc = query_cost(q, ctx);
        std::size_t participating = 0;
        for (const std::string &rel : q.relations) {
            const RelationPartition *part = ctx.schema->find(rel);
            participating += part ? part->fragments.size() : 1;
        }
        out << "{\"query\":\"" << q.id << "\",\"fragments\":" << participating
            << ",\"total\":" << pc.total << ",\"outputRows\":" << pc.output_rows << "}\n";
    }
    return out.str();
}

} // namespace hpart
