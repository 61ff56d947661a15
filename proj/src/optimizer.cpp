#include "hpart/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hpart {

void GAParams::check() const {
    if (pop < 2) throw Error("population size must be at least 2");
    if (elitism >= pop) throw Error("elite count must be below the population size");
    if (p_m < 0.0 || p_m > 1.0) throw Error("mutation probability out of [0,1]");
    if (max_fragments < 1) throw Error("fragment budget must be at least 1");
}

Problem make_problem(const SchemaDef &schema_def, const StatsMap &stats,
                     const PredicateSets &psets, const std::vector<QueryShape> &workload,
                     ExecMode mode) {
    Problem p;
    p.schema_def = &schema_def;
    p.stats = &stats;
    p.psets = &psets;
    p.workload = &workload;
    p.mode = mode;

    // gene layout: the relations that are partitioned directly — the star's
    // dimensions in edge order, else every relation with predicates
    std::vector<std::string> rels;
    if (schema_def.star) {
        for (const auto &e : schema_def.star->edges) rels.push_back(e.dimension);
    } else {
        for (const auto &[rel, pset] : psets) rels.push_back(rel);
    }
    std::size_t offset = 0;
    for (const auto &rel : rels) {
        auto it = psets.find(rel);
        std::size_t m = it == psets.end() ? 0 : it->second.size();
        if (m == 0) continue;
        p.layout.push_back({rel, offset, m});
        offset += m;
        p.cells[rel] = satisfiable_cells(it->second);
    }
    p.gene_len = offset;
    return p;
}

namespace {

FragmentKey key_from_gene(const std::vector<std::uint8_t> &gene, std::size_t off,
                          std::size_t m) {
    FragmentKey k = FragmentKey::all_wild(m);
    for (std::size_t i = 0; i < m; ++i) k.set_digit(i, gene[off + i]);
    return k;
}

FragmentKey msc_of_cells(const std::vector<Cell> &cells, const std::vector<std::size_t> &idxs) {
    FragmentKey k = FragmentKey::from_cell(cells[idxs[0]]);
    for (std::size_t j = 1; j < idxs.size(); ++j)
        k = generalize(k, FragmentKey::from_cell(cells[idxs[j]]));
    return k;
}

/// Per-relation fragments under repair: keys plus the cell indices each owns.
struct RelDecode {
    std::vector<FragmentKey> keys;
    std::vector<std::vector<std::size_t>> frag_cells;
};

RelDecode decode_relation(const Chromosome &chrom, const std::vector<Cell> &cells,
                          std::size_t off, std::size_t m) {
    RelDecode out;
    std::vector<bool> claimed(cells.size(), false);
    std::size_t remaining = cells.size();
    for (const auto &gene : chrom.genes) {
        if (remaining == 0) break;
        FragmentKey key = key_from_gene(gene, off, m);
        std::vector<std::size_t> claim;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (!claimed[i] && key.covers(cells[i])) claim.push_back(i);
        if (claim.empty()) continue;
        // keep the most specific key of the claim, but only when it covers
        // nothing foreign; otherwise the gene would overlap a neighbor
        FragmentKey msc = msc_of_cells(cells, claim);
        bool clean = true;
        for (std::size_t i = 0; i < cells.size() && clean; ++i)
            if (claimed[i] && msc.covers(cells[i])) clean = false;
        if (!clean) continue;
        for (std::size_t i : claim) claimed[i] = true;
        remaining -= claim.size();
        out.keys.push_back(msc);
        out.frag_cells.push_back(std::move(claim));
    }
    // greedily group the unclaimed cells into remainder fragments
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (claimed[i]) continue;
        bool placed = false;
        for (std::size_t g = out.keys.size(); g-- > 0 && !placed;) {
            FragmentKey widened = generalize(out.keys[g], FragmentKey::from_cell(cells[i]));
            // valid only if widening swallows no cell outside the group
            bool clean = true;
            for (std::size_t j = 0; j < cells.size() && clean; ++j) {
                if (!widened.covers(cells[j])) continue;
                bool in_group = j == i || std::find(out.frag_cells[g].begin(),
                                                   out.frag_cells[g].end(),
                                                   j) != out.frag_cells[g].end();
                if (!in_group) clean = false;
            }
            if (clean) {
                out.keys[g] = widened;
                out.frag_cells[g].push_back(i);
                placed = true;
            }
        }
        if (!placed) {
            out.keys.push_back(FragmentKey::from_cell(cells[i]));
            out.frag_cells.push_back({i});
        }
        claimed[i] = true;
    }
    return out;
}

std::size_t schema_fragment_count(const std::map<std::string, RelDecode> &decoded,
                                  const Problem &problem) {
    std::size_t total = 0;
    for (const auto &[rel, d] : decoded) total += d.keys.size();
    if (problem.schema_def->star) {
        std::size_t fact = 1;
        bool any = false;
        for (const auto &e : problem.schema_def->star->edges) {
            auto it = decoded.find(e.dimension);
            if (it == decoded.end()) continue;
            fact *= it->second.keys.size();
            any = true;
        }
        if (any) total += fact;
    }
    return total;
}

/// Merge the lowest-cardinality mergeable pair of one relation; false when
/// no pair generalizes cleanly.
bool merge_one_pair(RelDecode &d, const std::vector<Cell> &cells,
                    const RelationStats &stats) {
    std::size_t best_i = 0, best_j = 0;
    std::size_t best_card = std::numeric_limits<std::size_t>::max();
    FragmentKey best_key;
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
        for (std::size_t j = i + 1; j < d.keys.size(); ++j) {
            FragmentKey g = generalize(d.keys[i], d.keys[j]);
            bool clean = true;
            for (std::size_t c = 0; c < cells.size() && clean; ++c) {
                if (!g.covers(cells[c])) continue;
                bool in_pair =
                    std::find(d.frag_cells[i].begin(), d.frag_cells[i].end(), c) !=
                        d.frag_cells[i].end() ||
                    std::find(d.frag_cells[j].begin(), d.frag_cells[j].end(), c) !=
                        d.frag_cells[j].end();
                if (!in_pair) clean = false;
            }
            if (!clean) continue;
            std::size_t card = fragment_cardinality(d.keys[i], stats) +
                               fragment_cardinality(d.keys[j], stats);
            if (card < best_card) {
                best_card = card;
                best_i = i;
                best_j = j;
                best_key = g;
            }
        }
    }
    if (best_card == std::numeric_limits<std::size_t>::max()) return false;
    d.keys[best_i] = best_key;
    d.frag_cells[best_i].insert(d.frag_cells[best_i].end(), d.frag_cells[best_j].begin(),
                                d.frag_cells[best_j].end());
    d.keys.erase(d.keys.begin() + static_cast<std::ptrdiff_t>(best_j));
    d.frag_cells.erase(d.frag_cells.begin() + static_cast<std::ptrdiff_t>(best_j));
    return true;
}

PartitionSchema assemble_schema(const std::map<std::string, RelDecode> &decoded,
                                const Problem &problem) {
    PartitionSchema out;
    for (const auto &[rel, d] : decoded) {
        RelationPartition part;
        for (const auto &k : d.keys) part.fragments.push_back({fragment_name(rel, k), k});
        part.index = validate_schema(part.fragments, problem.psets->at(rel));
        out.parts[rel] = std::move(part);
    }
    if (problem.schema_def->star) {
        const StarDef &star = *problem.schema_def->star;
        std::vector<std::pair<std::string, const std::vector<Fragment> *>> dim_fragments;
        std::vector<const PredicateSet *> dim_psets;
        for (const auto &e : star.edges) {
            auto it = out.parts.find(e.dimension);
            if (it == out.parts.end()) continue;
            dim_fragments.push_back({e.dimension, &it->second.fragments});
            dim_psets.push_back(&problem.psets->at(e.dimension));
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

} // namespace

PartitionSchema decode_and_repair(const Chromosome &chrom, const Problem &problem,
                                  std::size_t max_fragments, bool *feasible_out) {
    if (chrom.gene_len != problem.gene_len)
        throw Error("chromosome gene length does not match the problem");
    std::map<std::string, RelDecode> decoded;
    for (const auto &[rel, off, m] : problem.layout)
        decoded[rel] = decode_relation(chrom, problem.cells.at(rel), off, m);

    bool feasible = true;
    while (schema_fragment_count(decoded, problem) > max_fragments) {
        // merging the relation with the most fragments shrinks the total
        // fastest (for a star, it multiplies into the fact's count)
        std::vector<std::string> order;
        for (const auto &[rel, d] : decoded) order.push_back(rel);
        std::sort(order.begin(), order.end(), [&](const auto &a, const auto &b) {
            return decoded[a].keys.size() > decoded[b].keys.size();
        });
        bool merged = false;
        for (const auto &rel : order) {
            if (decoded[rel].keys.size() < 2) continue;
            if (merge_one_pair(decoded[rel], problem.cells.at(rel),
                               problem.stats->at(rel))) {
                merged = true;
                break;
            }
        }
        if (!merged) {
            feasible = false;
            break;
        }
    }
    if (feasible_out) *feasible_out = feasible;
    return assemble_schema(decoded, problem);
}

std::vector<Chromosome> seed_population(const GAParams &params, const Problem &problem,
                                        std::mt19937_64 &rng) {
    params.check();
    std::uniform_int_distribution<std::size_t> gene_count(1, params.max_fragments);
    std::uniform_int_distribution<int> digit(0, 2);
    std::vector<Chromosome> pop;
    pop.reserve(params.pop);
    for (std::size_t i = 0; i < params.pop; ++i) {
        Chromosome c;
        c.gene_len = problem.gene_len;
        std::size_t n = problem.gene_len == 0 ? 1 : gene_count(rng);
        for (std::size_t g = 0; g < n; ++g) {
            std::vector<std::uint8_t> gene(problem.gene_len);
            for (auto &d : gene) d = static_cast<std::uint8_t>(digit(rng));
            c.genes.push_back(std::move(gene));
        }
        pop.push_back(std::move(c));
    }
    return pop;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome &a, const Chromosome &b,
                                            std::size_t point) {
    if (a.gene_len != b.gene_len) throw Error("crossover gene length mismatch");
    std::size_t limit = std::min(a.total_len(), b.total_len());
    if (point == 0 || point >= limit) throw Error("crossover point out of range");
    Chromosome ca, cb;
    ca.gene_len = cb.gene_len = a.gene_len;
    auto splice = [&](const Chromosome &head, const Chromosome &tail) {
        Chromosome out;
        out.gene_len = a.gene_len;
        std::size_t total = tail.total_len();
        out.genes.assign(total / a.gene_len, std::vector<std::uint8_t>(a.gene_len));
        for (std::size_t i = 0; i < total; ++i)
            out.set_digit(i, i < point ? head.digit(i) : tail.digit(i));
        return out;
    };
    return {splice(a, b), splice(b, a)};
}

Chromosome mutate(Chromosome chrom, double p_m, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> pick(1, 2);
    for (auto &gene : chrom.genes) {
        for (auto &d : gene) {
            if (coin(rng) >= p_m) continue;
            // uniformly random different digit
            d = static_cast<std::uint8_t>((d + pick(rng)) % 3);
        }
    }
    return chrom;
}

FitnessRecord evaluate(const Chromosome &chrom, const Problem &problem,
                       const GAParams &params) {
    FitnessRecord rec;
    rec.chrom = chrom;
    bool budget_ok = true;
    rec.schema = decode_and_repair(chrom, problem, params.max_fragments, &budget_ok);
    for (const auto &[rel, part] : rec.schema.parts)
        rec.fragment_count += part.fragments.size();
    rec.feasible = budget_ok;
    if (problem.old_schema) {
        rec.relocated_tuples =
            relocation_cost(*problem.old_schema, rec.schema, *problem.stats).tuples;
        if (rec.relocated_tuples > params.max_relocation) rec.feasible = false;
    }
    if (rec.feasible) {
        CatalogStore store = populate_catalog(rec.schema, *problem.stats, problem.mode);
        CostContext ctx{&rec.schema, &store, problem.stats, problem.schema_def,
                        problem.cost_params};
        rec.cost = workload_cost(*problem.workload, ctx);
    }
    return rec;
}

namespace {

std::vector<FitnessRecord> evaluate_all(const std::vector<Chromosome> &pop,
                                        const Problem &problem, const GAParams &params) {
    std::vector<FitnessRecord> recs(pop.size());
    if (problem.mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pop.size()); ++i)
            recs[static_cast<std::size_t>(i)] =
                evaluate(pop[static_cast<std::size_t>(i)], problem, params);
    } else {
        for (std::size_t i = 0; i < pop.size(); ++i)
            recs[i] = evaluate(pop[i], problem, params);
    }
    return recs;
}

GenerationTrace trace_entry(std::size_t gen, const std::vector<FitnessRecord> &recs,
                            double best_so_far) {
    GenerationTrace t;
    t.generation = gen;
    t.best = best_so_far;
    double sum = 0.0;
    std::size_t feasible = 0;
    for (const auto &r : recs) {
        if (!r.feasible) continue;
        sum += r.cost;
        ++feasible;
    }
    t.mean = feasible ? sum / static_cast<double>(feasible)
                      : std::numeric_limits<double>::infinity();
    t.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(recs.size());
    return t;
}

/// Fitness-proportional pick on 1/(cost + delta); infeasible weight zero.
std::size_t roulette(const std::vector<FitnessRecord> &recs, std::mt19937_64 &rng) {
    std::vector<double> weights(recs.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].feasible) weights[i] = 1.0 / (recs[i].cost + 1e-9);
        total += weights[i];
    }
    if (total <= 0.0) {
        std::uniform_int_distribution<std::size_t> any(0, recs.size() - 1);
        return any(rng);
    }
    std::uniform_real_distribution<double> spin(0.0, total);
    double r = spin(rng), acc = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        acc += weights[i];
        if (r <= acc) return i;
    }
    return recs.size() - 1;
}

std::vector<std::size_t> rank_order(const std::vector<FitnessRecord> &recs) {
    std::vector<std::size_t> idx(recs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (recs[a].feasible != recs[b].feasible) return recs[a].feasible;
        return recs[a].cost < recs[b].cost;
    });
    return idx;
}

} // namespace

GAResult evolve(const Problem &problem, const GAParams &params) {
    params.check();
    std::mt19937_64 rng(params.seed);
    std::vector<Chromosome> pop = seed_population(params, problem, rng);
    std::vector<FitnessRecord> recs = evaluate_all(pop, problem, params);

    GAResult result;
    result.best = recs[rank_order(recs)[0]];
    result.trace.push_back(trace_entry(0, recs, result.best.cost));

    for (std::size_t gen = 1; gen <= params.generations; ++gen) {
        std::vector<std::size_t> order = rank_order(recs);
        std::vector<Chromosome> next;
        next.reserve(params.pop);
        for (std::size_t e = 0; e < params.elitism; ++e)
            next.push_back(recs[order[e]].chrom); // carried unaltered
        while (next.size() < params.pop) {
            const Chromosome &pa = recs[roulette(recs, rng)].chrom;
            const Chromosome &pb = recs[roulette(recs, rng)].chrom;
            std::size_t limit = std::min(pa.total_len(), pb.total_len());
            Chromosome ca = pa, cb = pb;
            if (limit > 1) {
                std::uniform_int_distribution<std::size_t> cut(1, limit - 1);
                std::tie(ca, cb) = crossover(pa, pb, cut(rng));
            }
            next.push_back(mutate(std::move(ca), params.p_m, rng));
            if (next.size() < params.pop)
                next.push_back(mutate(std::move(cb), params.p_m, rng));
        }
        pop = std::move(next);
        recs = evaluate_all(pop, problem, params);
        const FitnessRecord &gen_best = recs[rank_order(recs)[0]];
        if ((gen_best.feasible && !result.best.feasible) ||
            (gen_best.feasible == result.best.feasible && gen_best.cost < result.best.cost))
            result.best = gen_best;
        result.trace.push_back(trace_entry(gen, recs, result.best.cost));
    }
    return result;
}

RelocationCost relocation_cost(const PartitionSchema &old_schema,
                               const PartitionSchema &new_schema, const StatsMap &stats) {
    RelocationCost out;
    for (const auto &[rel, new_part] : new_schema.parts) {
        auto sit = stats.find(rel);
        if (sit == stats.end()) throw Error("missing statistics for relation " + rel);
        const RelationStats &st = sit->second;

        std::vector<Bitmap> new_bm, old_bm;
        for (const auto &f : new_part.fragments) new_bm.push_back(fragment_bitmap(f.key, st));
        const RelationPartition *old_part = old_schema.find(rel);
        if (old_part) {
            for (const auto &f : old_part->fragments)
                old_bm.push_back(fragment_bitmap(f.key, st));
        } else {
            old_bm.push_back(Bitmap::full(st.row_count()));
        }

        // greedy one-to-one retention by descending overlap
        struct Overlap {
            std::size_t n, i, j;
        };
        std::vector<Overlap> overlaps;
        for (std::size_t i = 0; i < new_bm.size(); ++i)
            for (std::size_t j = 0; j < old_bm.size(); ++j) {
                std::size_t n = (new_bm[i] & old_bm[j]).cardinality();
                if (n > 0) overlaps.push_back({n, i, j});
            }
        std::stable_sort(overlaps.begin(), overlaps.end(), [](const Overlap &a, const Overlap &b) {
            if (a.n != b.n) return a.n > b.n;
            if (a.i != b.i) return a.i < b.i;
            return a.j < b.j;
        });
        std::vector<bool> new_used(new_bm.size(), false), old_used(old_bm.size(), false);
        std::vector<std::size_t> retained(new_bm.size(), 0);
        for (const auto &o : overlaps) {
            if (new_used[o.i] || old_used[o.j]) continue;
            new_used[o.i] = old_used[o.j] = true;
            retained[o.i] = o.n;
        }
        for (std::size_t i = 0; i < new_bm.size(); ++i) {
            std::size_t moved = new_bm[i].cardinality() - retained[i];
            out.tuples += moved;
            out.bytes += static_cast<double>(moved) * st.parent.tuple_width;
        }
    }
    return out;
}

BaselineResult exhaustive_baseline(const Problem &problem, std::size_t max_fragments) {
    if (problem.gene_len > 6)
        throw Error("exhaustive baseline refuses beyond 6 total predicates");
    BaselineResult best;
    for (std::uint64_t subset = 0; subset < (std::uint64_t(1) << problem.gene_len); ++subset) {
        std::map<std::string, RelDecode> decoded;
        for (const auto &[rel, off, m] : problem.layout) {
            const auto &cells = problem.cells.at(rel);
            RelDecode d;
            std::map<std::uint64_t, std::size_t> seen; // projected key -> fragment
            for (std::size_t c = 0; c < cells.size(); ++c) {
                FragmentKey k = FragmentKey::all_wild(m);
                for (std::size_t i = 0; i < m; ++i)
                    if ((subset >> (off + i)) & 1)
                        k.set_digit(i, cells[c].bit(i) ? 1 : 0);
                std::uint64_t sig = k.ones | (k.wild << 16);
                auto it = seen.find(sig);
                if (it == seen.end()) {
                    seen[sig] = d.keys.size();
                    d.keys.push_back(k);
                    d.frag_cells.push_back({c});
                } else {
                    d.frag_cells[it->second].push_back(c);
                }
            }
            decoded[rel] = std::move(d);
        }
        if (schema_fragment_count(decoded, problem) > max_fragments) continue;
        PartitionSchema schema = assemble_schema(decoded, problem);
        CatalogStore store = populate_catalog(schema, *problem.stats, problem.mode);
        CostContext ctx{&schema, &store, problem.stats, problem.schema_def,
                        problem.cost_params};
        double cost = workload_cost(*problem.workload, ctx);
        if (cost < best.cost) {
            best.cost = cost;
            best.schema = std::move(schema);
        }
    }
    return best;
}

std::string trace_to_text(const std::vector<GenerationTrace> &trace) {
    std::ostringstream out;
    out << "generation\tbest\tmean\tfeasible_fraction\n";
    for (const auto &t : trace)
        out << t.generation << '\t' << t.best << '\t' << t.mean << '\t'
            << t.feasible_fraction << '\n';
    return out.str();
}

} // namespace hpart
