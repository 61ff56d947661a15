#include "hpart/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace hpart {

std::size_t schema_fingerprint(const PartitionSchema &schema, const PredicateSets &psets) {
    return std::hash<std::string>{}(schema.serialize(psets));
}

namespace {

/// Atomic leaves of a query's filters, grouped per relation.
std::map<std::string, std::vector<AtomicPredicate>> query_atoms(const QueryShape &q) {
    std::map<std::string, std::vector<AtomicPredicate>> out;
    for (const auto &[rel, filter] : q.filters) {
        std::vector<AtomicPredicate> atoms;
        atomize(filter).collect_atoms(atoms);
        for (auto &a : atoms) out[a.relation].push_back(std::move(a));
    }
    return out;
}

bool contains_atom(const std::vector<AtomicPredicate> &atoms, const AtomicPredicate &a) {
    return std::any_of(atoms.begin(), atoms.end(),
                       [&](const AtomicPredicate &x) { return x == a; });
}

FragmentKey project_key(const FragmentKey &key, const std::vector<std::size_t> &kept) {
    FragmentKey out = FragmentKey::all_wild(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) out.set_digit(i, key.digit(kept[i]));
    return out;
}

} // namespace

MergePlan plan_merge_on_removal(const PartitionSchema &schema,
                                const std::vector<QueryShape> &workload,
                                const std::string &removed_id, const PredicateSets &psets,
                                const StatsMap &stats, const CatalogStore &store,
                                const SchemaDef &schema_def) {
    const QueryShape *removed = nullptr;
    for (const auto &q : workload)
        if (q.id == removed_id) removed = &q;
    if (!removed) throw Error("removed query " + removed_id + " is not in the workload");

    auto removed_atoms = query_atoms(*removed);
    std::map<std::string, std::vector<AtomicPredicate>> remaining_atoms;
    for (const auto &q : workload) {
        if (q.id == removed_id) continue;
        for (auto &[rel, atoms] : query_atoms(q))
            remaining_atoms[rel].insert(remaining_atoms[rel].end(), atoms.begin(),
                                        atoms.end());
    }

    MergePlan plan;
    plan.base_fingerprint = schema_fingerprint(schema, psets);

    // predicates used only by the removed query, per relation
    std::map<std::string, std::set<std::size_t>> drop_positions;
    for (const auto &[rel, atoms] : removed_atoms) {
        auto pit = psets.find(rel);
        if (pit == psets.end()) continue;
        for (const auto &a : atoms) {
            int pos = pit->second.position_of(a);
            if (pos < 0) continue;
            if (contains_atom(remaining_atoms[rel], a)) continue; // still in use
            drop_positions[rel].insert(static_cast<std::size_t>(pos));
        }
    }

    plan.new_psets = psets;
    std::map<std::string, std::vector<std::size_t>> kept_positions;
    for (const auto &[rel, pset] : psets) {
        std::vector<std::size_t> kept;
        const auto dit = drop_positions.find(rel);
        for (std::size_t i = 0; i < pset.size(); ++i)
            if (dit == drop_positions.end() || !dit->second.count(i)) kept.push_back(i);
        kept_positions[rel] = kept;
        PredicateSet trimmed{rel, {}};
        for (std::size_t i : kept) trimmed.predicates.push_back(pset.predicates[i]);
        plan.new_psets[rel] = std::move(trimmed);
    }

    std::map<std::string, std::vector<FragmentKey>> new_keys;
    for (const auto &[rel, part] : schema.parts) {
        if (part.derived) continue; // the fact is re-derived from the dimensions
        const auto &kept = kept_positions.at(rel);
        auto dit = drop_positions.find(rel);
        if (dit == drop_positions.end() || dit->second.empty()) {
            for (const auto &f : part.fragments) new_keys[rel].push_back(f.key);
            continue;
        }
        auto sit = stats.find(rel);
        if (sit == stats.end()) throw Error("missing statistics for relation " + rel);

        // group fragments that become indistinguishable under the reduced
        // predicate set: project every key onto the kept positions and unite
        // fragments whose projections share a satisfiable cell; wildcarded
        // keys can overlap without being equal, so grouping must follow
        // coverage, not digit strings
        const std::size_t n = part.fragments.size();
        const PredicateSet &npset = plan.new_psets.at(rel);
        std::vector<Cell> ncells = satisfiable_cells(npset);
        std::vector<FragmentKey> proj(n);
        for (std::size_t i = 0; i < n; ++i)
            proj[i] = project_key(part.fragments[i].key, kept);
        std::vector<std::size_t> uf(n);
        for (std::size_t i = 0; i < n; ++i) uf[i] = i;
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            while (uf[x] != x) x = uf[x] = uf[uf[x]];
            return x;
        };
        auto unite = [&](std::size_t a, std::size_t b) { uf[find(a)] = find(b); };
        for (const Cell &c : ncells) {
            std::size_t first = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (!proj[i].covers(c)) continue;
                if (first == n)
                    first = i;
                else
                    unite(first, i);
            }
        }
        // the generalized key of a component may swallow another component's
        // cells; keep uniting until the component keys are disjoint
        for (bool changed = true; changed;) {
            changed = false;
            std::map<std::size_t, FragmentKey> comp_key;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t r = find(i);
                auto it = comp_key.find(r);
                if (it == comp_key.end())
                    comp_key.emplace(r, proj[i]);
                else
                    it->second = generalize(it->second, proj[i]);
            }
            for (const Cell &c : ncells) {
                std::size_t first = n;
                for (const auto &[r, k] : comp_key) {
                    if (!k.covers(c)) continue;
                    if (first == n) {
                        first = r;
                    } else if (find(first) != find(r)) {
                        unite(first, r);
                        changed = true;
                    }
                }
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> groups; // by smallest member
        for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
        for (const auto &[root, members] : groups) {
            // target: the max-cardinality member; every other member is read
            // and rewritten into it
            std::size_t target = members[0];
            std::size_t target_card =
                fragment_cardinality(part.fragments[target].key, sit->second);
            for (std::size_t m : members) {
                std::size_t card = fragment_cardinality(part.fragments[m].key, sit->second);
                if (card > target_card) {
                    target = m;
                    target_card = card;
                }
            }
            if (members.size() > 1) {
                MergeGroup g;
                g.relation = rel;
                g.target = part.fragments[target].id;
                for (std::size_t m : members) {
                    if (m == target) continue;
                    g.sources.push_back(part.fragments[m].id);
                    double pages = static_cast<double>(
                        store.relation_record(part.fragments[m].id).relpages);
                    g.cost += 2.0 * pages; // read + write
                }
                plan.total_cost += g.cost;
                plan.groups.push_back(std::move(g));
            }
            FragmentKey merged = proj[members[0]];
            for (std::size_t m : members) merged = generalize(merged, proj[m]);
            new_keys[rel].push_back(merged);
        }
    }
    plan.result = build_partition_schema(new_keys, plan.new_psets, schema_def);
    return plan;
}

namespace {

/// Pages of a hypothetical fragment, from parent stats and a cardinality.
double pages_for(std::size_t card, const RelationStats &st) {
    if (card == 0) return 0.0;
    if (st.parent.all_fixed)
        return std::ceil(static_cast<double>(st.parent.relpages) *
                         static_cast<double>(card) /
                         static_cast<double>(st.parent.reltuples));
    double per_tuple = 8.0 + st.parent.tuple_width;
    double per_page = std::floor(8168.0 / per_tuple);
    return std::ceil(static_cast<double>(card) / per_page);
}

} // namespace

SplitPlan plan_split_on_addition(const PartitionSchema &schema, const QueryShape &new_query,
                                 const PredicateSets &psets, const StatsMap &stats,
                                 const CatalogStore &store, const SchemaDef &schema_def,
                                 const Dataset &data, SplitReadMode mode) {
    SplitPlan plan;
    plan.base_fingerprint = schema_fingerprint(schema, psets);
    plan.new_psets = psets;

    auto atoms_by_rel = query_atoms(new_query);
    std::map<std::string, std::vector<AtomicPredicate>> new_preds;
    for (const auto &[rel, atoms] : atoms_by_rel) {
        // the star's fact is never partitioned directly
        if (schema_def.star && rel == schema_def.star->fact) continue;
        auto pit = psets.find(rel);
        const PredicateSet *existing = pit == psets.end() ? nullptr : &pit->second;
        for (const auto &a : atoms) {
            if (existing && existing->contains(a)) continue; // already partitioned by it
            if (contains_atom(new_preds[rel], a)) continue;
            new_preds[rel].push_back(a);
        }
        if (new_preds[rel].empty()) new_preds.erase(rel);
    }
    for (const auto &[rel, preds] : new_preds) {
        PredicateSet &pset = plan.new_psets[rel];
        if (pset.relation.empty()) pset.relation = rel;
        for (const auto &p : preds) pset.predicates.push_back(p);
    }

    std::map<std::string, std::vector<FragmentKey>> new_keys;
    for (const auto &[rel, part] : schema.parts) {
        if (part.derived) continue;
        if (!new_preds.count(rel)) {
            for (const auto &f : part.fragments) new_keys[rel].push_back(f.key);
        }
    }
    for (const auto &[rel, preds] : new_preds) {
        auto sit = stats.find(rel);
        auto dit = data.find(rel);
        if (sit == stats.end() || dit == data.end())
            throw Error("missing statistics or data for relation " + rel);
        const RelationStats &st = sit->second;
        std::size_t old_m = st.preds.size();

        struct Working {
            FragmentKey key; // over the extended predicate set
            Bitmap rows;
            std::string id;     // catalog id when this is an original fragment
            bool original = true;
        };
        std::vector<Working> frags;
        if (const RelationPartition *p = schema.find(rel)) {
            for (const auto &f : p->fragments) {
                FragmentKey ext = f.key;
                ext.m = old_m + preds.size();
                for (std::size_t i = old_m; i < ext.m; ++i) ext.set_digit(i, 2);
                frags.push_back({ext, fragment_bitmap(f.key, st), f.id, true});
            }
        } else {
            FragmentKey ext = FragmentKey::all_wild(old_m + preds.size());
            frags.push_back({ext, Bitmap::full(st.row_count()),
                             fragment_name(rel, FragmentKey::all_wild(old_m)), true});
        }

        const PredicateSet &new_pset = plan.new_psets.at(rel);
        for (std::size_t pi = 0; pi < preds.size(); ++pi) {
            std::size_t pos = old_m + pi;
            Bitmap phi = predicate_bitmap(preds[pi], dit->second);
            std::vector<Working> next;
            for (auto &w : frags) {
                Working c0{w.key, w.rows, "", false}, c1{w.key, w.rows, "", false};
                c0.key.set_digit(pos, 0);
                c1.key.set_digit(pos, 1);
                c0.rows.intersect_with_complement(phi);
                c1.rows.intersect_with(phi);
                bool sat0 = satisfiable(c0.key, new_pset);
                bool sat1 = satisfiable(c1.key, new_pset);
                if (sat0 && sat1) {
                    SplitItem item;
                    item.relation = rel;
                    item.parent = w.original ? w.id : fragment_name(rel, w.key);
                    item.child0 = c0.key;
                    item.child1 = c1.key;
                    std::size_t n0 = c0.rows.cardinality(), n1 = c1.rows.cardinality();
                    const Working &small = n0 <= n1 ? c0 : c1;
                    item.smaller = fragment_name(rel, small.key);
                    double parent_pages =
                        w.original && store.relations.count(w.id)
                            ? static_cast<double>(store.relation_record(w.id).relpages)
                            : pages_for(w.rows.cardinality(), st);
                    double small_pages = pages_for(std::min(n0, n1), st);
                    double read = mode == SplitReadMode::Parent ? parent_pages : small_pages;
                    item.cost = std::min(n0, n1) == 0 ? read : read + small_pages;
                    plan.total_cost += item.cost;
                    plan.splits.push_back(std::move(item));
                    next.push_back(std::move(c0));
                    next.push_back(std::move(c1));
                } else {
                    // one side is unsatisfiable: the fragment passes through
                    Working kept = sat0 ? std::move(c0) : std::move(c1);
                    kept.id = w.id;
                    kept.original = w.original;
                    next.push_back(std::move(kept));
                }
            }
            frags = std::move(next);
        }
        for (const auto &w : frags) new_keys[rel].push_back(w.key);
    }
    plan.result = build_partition_schema(new_keys, plan.new_psets, schema_def);
    return plan;
}

StatsMap refresh_statistics(const Dataset &data, const PredicateSets &psets,
                            const SchemaDef &schema_def, std::size_t stats_target,
                            ExecMode mode) {
    StatsMap out;
    for (const auto &rdef : schema_def.relations) {
        auto dit = data.find(rdef.name);
        if (dit == data.end()) throw Error("no data loaded for relation " + rdef.name);
        out.emplace(rdef.name,
                    build_relation_stats(dit->second,
                                         effective_predicates(rdef.name, psets, schema_def),
                                         data, schema_def, stats_target, mode));
    }
    return out;
}

AdaptationResult apply_adaptation(const AdaptationPlanBase &plan,
                                  const PartitionSchema &current,
                                  const PredicateSets &current_psets, const Dataset &data,
                                  const SchemaDef &schema_def, const CatalogStore &old_store,
                                  std::size_t stats_target, ExecMode mode) {
    if (schema_fingerprint(current, current_psets) != plan.base_fingerprint)
        throw Error("stale adaptation plan: the schema changed since planning");

    AdaptationResult out;
    out.psets = plan.new_psets;
    out.schema = plan.result;
    out.stats = refresh_statistics(data, plan.new_psets, schema_def, stats_target, mode);
    out.store = populate_catalog(plan.result, out.stats, mode);

    // a relation's records are unchanged when its effective predicates are:
    // reuse the old records verbatim for those fragments
    for (auto &[frag, rec] : out.store.relations) {
        const std::string &rel = rec.relation;
        auto eff_old = effective_predicates(rel, current_psets, schema_def);
        auto eff_new = effective_predicates(rel, plan.new_psets, schema_def);
        bool same = eff_old.size() == eff_new.size();
        for (std::size_t i = 0; same && i < eff_old.size(); ++i)
            same = eff_old[i].atom == eff_new[i].atom &&
                   eff_old[i].induced == eff_new[i].induced &&
                   eff_old[i].via_fk_attr == eff_new[i].via_fk_attr;
        if (!same || !old_store.relations.count(frag)) continue;
        rec = old_store.relations.at(frag);
        for (const auto &adef : schema_def.require(rel).attributes) {
            auto key = std::make_pair(frag, adef.name);
            auto oit = old_store.attributes.find(key);
            if (oit != old_store.attributes.end()) out.store.attributes[key] = oit->second;
        }
    }
    return out;
}

} // namespace hpart
