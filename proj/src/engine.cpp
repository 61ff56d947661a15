#include "hpart/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace hpart {

// ---------------------------------------------------------------------------
// Toy SSB schema and generator

SchemaDef ssb_schema() {
    const char *text =
        "relation ddate\n"
        "attr d_datekey integer\n"
        "attr d_year integer\n"
        "attr d_yearmonthnum integer\n"
        "attr d_yearmonth text var\n"
        "attr d_weeknuminyear integer\n"
        "attr d_sellingseason text var\n"
        "pk d_datekey\n"
        "relation customer\n"
        "attr c_custkey integer\n"
        "attr c_city text var\n"
        "attr c_nation text var\n"
        "attr c_region text var\n"
        "attr c_mktsegment text var\n"
        "pk c_custkey\n"
        "relation supplier\n"
        "attr s_suppkey integer\n"
        "attr s_city text var\n"
        "attr s_nation text var\n"
        "attr s_region text var\n"
        "pk s_suppkey\n"
        "relation part\n"
        "attr p_partkey integer\n"
        "attr p_mfgr text var\n"
        "attr p_category text var\n"
        "attr p_brand1 text var\n"
        "attr p_color text var\n"
        "pk p_partkey\n"
        "relation lineorder\n"
        "attr lo_orderkey integer\n"
        "attr lo_custkey integer\n"
        "attr lo_suppkey integer\n"
        "attr lo_partkey integer\n"
        "attr lo_orderdate integer\n"
        "attr lo_quantity integer\n"
        "attr lo_discount integer\n"
        "attr lo_extendedprice decimal\n"
        "attr lo_revenue decimal\n"
        "pk lo_orderkey\n"
        "fact lineorder\n"
        "fk lo_custkey customer c_custkey\n"
        "fk lo_suppkey supplier s_suppkey\n"
        "fk lo_partkey part p_partkey\n"
        "fk lo_orderdate ddate d_datekey\n";
    return SchemaDef::parse(text);
}

PredicateSets minimized_predicate_sets(const std::vector<QueryShape> &queries,
                                       const SchemaDef &schema, const Dataset &data) {
    PredicateSets psets = collect_predicate_sets(queries, schema);
    for (auto &[rel, pset] : psets) {
        auto dit = data.find(rel);
        if (dit == data.end()) throw Error("no data loaded for relation " + rel);
        std::vector<Bitmap> bitmaps;
        for (const auto &p : pset.predicates)
            bitmaps.push_back(predicate_bitmap(p, dit->second));
        pset = minimize_predicates(pset, bitmaps);
    }
    return psets;
}

namespace {

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    std::size_t uniform(std::size_t n) { return static_cast<std::size_t>(g() % n); }
    double unit() { return static_cast<double>(g() >> 11) / 9007199254740992.0; }
};

/// Cumulative Zipf-like weights 1/(k+1)^s, normalized.
std::vector<double> zipf_cum(std::size_t n, double s) {
    std::vector<double> cum(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += 1.0 / std::pow(static_cast<double>(k + 1), s);
        cum[k] = total;
    }
    for (auto &c : cum) c /= total;
    return cum;
}

std::size_t zipf_draw(Rng &rng, const std::vector<double> &cum) {
    double u = rng.unit();
    return static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
}

const std::vector<std::string> kRegions = {"AFRICA", "AMERICA", "ASIA", "EUROPE",
                                           "MIDDLE EAST"};
const std::vector<std::vector<std::string>> kNations = {
    {"ALGERIA", "ETHIOPIA", "KENYA", "MOROCCO", "MOZAMBIQUE"},
    {"ARGENTINA", "BRAZIL", "CANADA", "PERU", "UNITED STATES"},
    {"CHINA", "INDIA", "INDONESIA", "JAPAN", "VIETNAM"},
    {"FRANCE", "GERMANY", "ROMANIA", "RUSSIA", "UNITED KINGDOM"},
    {"EGYPT", "IRAN", "IRAQ", "JORDAN", "SAUDI ARABIA"}};
const std::vector<std::string> kSeasons = {"Christmas", "Summer", "Winter", "Fall",
                                           "Spring"};
const std::vector<std::string> kSegments = {"AUTOMOBILE", "BUILDING", "FURNITURE",
                                            "HOUSEHOLD", "MACHINERY"};
const std::vector<std::string> kColors = {"almond", "azure",  "chocolate", "forest",
                                          "ghost",  "linen",  "maroon",    "powder",
                                          "salmon", "yellow"};
const char *kMonths[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

/// SSB-style city: nation padded to nine characters plus a digit.
std::string city_name(const std::string &nation, std::size_t digit) {
    std::string base = nation;
    base.resize(9, ' ');
    return base + static_cast<char>('0' + digit);
}

} // namespace

Dataset generate_star_toy(double sf, std::uint64_t seed) {
    if (!(sf > 0.0) || sf > 0.01)
        throw Error("scale fraction must be in (0, 0.01] for the toy generator");
    SchemaDef schema = ssb_schema();
    Rng rng(seed);
    Dataset data;

    // date dimension: every day of seven consecutive years
    RelationData ddate(schema.require("ddate"));
    std::vector<std::int64_t> datekeys;
    {
        std::int32_t day = parse_date("1992-01-01");
        std::int32_t last = parse_date("1998-12-31");
        for (; day <= last; ++day) {
            std::string ymd = format_date(day);
            int y = std::stoi(ymd.substr(0, 4));
            int m = std::stoi(ymd.substr(5, 2));
            int d = std::stoi(ymd.substr(8, 2));
            std::int64_t key = y * 10000 + m * 100 + d;
            datekeys.push_back(key);
            std::int32_t year_start = parse_date(std::to_string(y) + "-01-01");
            std::int64_t week = 1 + (day - year_start) / 7;
            ddate.append_row({Scalar::integer(key), Scalar::integer(y),
                              Scalar::integer(y * 100 + m),
                              Scalar::text(std::string(kMonths[m - 1]) + std::to_string(y)),
                              Scalar::integer(week),
                              Scalar::text(kSeasons[rng.uniform(kSeasons.size())])});
        }
    }
    data.emplace("ddate", std::move(ddate));

    auto region_cum = zipf_cum(kRegions.size(), 1.1); // deliberate region skew

    std::size_t n_cust = std::max<std::size_t>(1, std::llround(30000.0 * sf));
    RelationData customer(schema.require("customer"));
    for (std::size_t i = 0; i < n_cust; ++i) {
        std::size_t r = zipf_draw(rng, region_cum);
        const std::string &nation = kNations[r][rng.uniform(5)];
        customer.append_row({Scalar::integer(static_cast<std::int64_t>(i + 1)),
                             Scalar::text(city_name(nation, rng.uniform(10))),
                             Scalar::text(nation), Scalar::text(kRegions[r]),
                             Scalar::text(kSegments[rng.uniform(kSegments.size())])});
    }
    data.emplace("customer", std::move(customer));

    std::size_t n_supp = std::max<std::size_t>(1, std::llround(2000.0 * sf));
    RelationData supplier(schema.require("supplier"));
    for (std::size_t i = 0; i < n_supp; ++i) {
        std::size_t r = rng.uniform(kRegions.size());
        const std::string &nation = kNations[r][rng.uniform(5)];
        supplier.append_row({Scalar::integer(static_cast<std::int64_t>(i + 1)),
                             Scalar::text(city_name(nation, rng.uniform(10))),
                             Scalar::text(nation), Scalar::text(kRegions[r])});
    }
    data.emplace("supplier", std::move(supplier));

    auto mfgr_cum = zipf_cum(5, 0.9); // deliberate manufacturer skew
    std::size_t n_part = std::max<std::size_t>(1, std::llround(200000.0 * sf));
    RelationData part(schema.require("part"));
    for (std::size_t i = 0; i < n_part; ++i) {
        std::size_t m = zipf_draw(rng, mfgr_cum);
        std::string mfgr = "MFGR#" + std::to_string(m + 1);
        std::string category = mfgr + std::to_string(rng.uniform(5) + 1);
        std::string brand = category + std::to_string(rng.uniform(40) + 1);
        part.append_row({Scalar::integer(static_cast<std::int64_t>(i + 1)),
                         Scalar::text(mfgr), Scalar::text(category), Scalar::text(brand),
                         Scalar::text(kColors[rng.uniform(kColors.size())])});
    }
    data.emplace("part", std::move(part));

    auto discount_cum = zipf_cum(11, 0.8); // deliberate discount skew
    std::size_t n_fact = std::max<std::size_t>(1, std::llround(6000000.0 * sf));
    RelationData lineorder(schema.require("lineorder"));
    for (std::size_t i = 0; i < n_fact; ++i) {
        std::int64_t discount = static_cast<std::int64_t>(zipf_draw(rng, discount_cum));
        double price = 900.0 + rng.unit() * 104049.0;
        price = std::floor(price * 100.0) / 100.0;
        double revenue = std::floor(price * (100.0 - static_cast<double>(discount))) / 100.0;
        lineorder.append_row(
            {Scalar::integer(static_cast<std::int64_t>(i / 4 + 1)),
             Scalar::integer(static_cast<std::int64_t>(rng.uniform(n_cust) + 1)),
             Scalar::integer(static_cast<std::int64_t>(rng.uniform(n_supp) + 1)),
             Scalar::integer(static_cast<std::int64_t>(rng.uniform(n_part) + 1)),
             Scalar::integer(datekeys[rng.uniform(datekeys.size())]),
             Scalar::integer(static_cast<std::int64_t>(rng.uniform(50) + 1)),
             Scalar::integer(discount), Scalar::decimal(price), Scalar::decimal(revenue)});
    }
    data.emplace("lineorder", std::move(lineorder));
    return data;
}

// ---------------------------------------------------------------------------
// Materialization

namespace {

std::size_t branch_relpages(const ParentStats &fragment_exact, const ParentStats &parent,
                            bool all_fixed) {
    if (all_fixed) {
        if (fragment_exact.reltuples == 0) return 0;
        return static_cast<std::size_t>(
            std::ceil(static_cast<double>(parent.relpages) *
                      static_cast<double>(fragment_exact.reltuples) /
                      static_cast<double>(parent.reltuples)));
    }
    return fragment_exact.relpages;
}

} // namespace

MaterializedSchema materialize(const PartitionSchema &schema, const Dataset &data,
                               const StatsMap &stats) {
    MaterializedSchema mat;
    for (const auto &[rel, st] : stats) {
        auto dit = data.find(rel);
        if (dit == data.end()) throw Error("no data loaded for relation " + rel);
        const RelationData &rdata = dit->second;

        MaterializedRelation mr;
        const RelationPartition *part = schema.find(rel);
        std::vector<std::size_t> route(rdata.row_count(), 0);
        std::size_t n_frags = 1;
        if (part) {
            n_frags = part->fragments.size();
            for (std::size_t r = 0; r < rdata.row_count(); ++r) {
                auto it = part->index.find(st.row_cells[r]);
                if (it == part->index.end())
                    throw Error("routing failure: uncovered cell in relation " + rel);
                route[r] = it->second;
            }
        }
        std::vector<RelationData> frag_rows;
        for (std::size_t f = 0; f < n_frags; ++f) frag_rows.emplace_back(rdata.def());
        std::vector<Scalar> tuple(rdata.column_count());
        for (std::size_t r = 0; r < rdata.row_count(); ++r) {
            for (std::size_t c = 0; c < rdata.column_count(); ++c)
                tuple[c] = rdata.value(r, c);
            frag_rows[route[r]].append_row(tuple);
        }
        for (std::size_t f = 0; f < n_frags; ++f) {
            MaterializedFragment mf;
            if (part) {
                mf.id = part->fragments[f].id;
                mf.key = part->fragments[f].key;
            } else {
                mf.key = FragmentKey::all_wild(st.preds.size());
                mf.id = fragment_name(rel, mf.key);
            }
            mf.rows = std::move(frag_rows[f]);
            mf.exact = build_parent_stats(mf.rows);
            mf.exact_relpages = branch_relpages(mf.exact, st.parent, st.parent.all_fixed);
            mr.fragments.push_back(std::move(mf));
        }
        mat.relations[rel] = std::move(mr);
    }
    return mat;
}

CatalogStore exact_catalog(const MaterializedSchema &mat, const Dataset &data,
                           const SchemaDef &schema_def, std::size_t stats_target) {
    (void)data;
    CatalogStore store;
    for (const auto &[rel, mr] : mat.relations) {
        const RelationDef &rdef = schema_def.require(rel);
        for (const auto &mf : mr.fragments) {
            ParentStats exact = stats_target == 100 ? mf.exact
                                                    : build_parent_stats(mf.rows, stats_target);
            RelationCatalogRecord rec;
            rec.fragment = mf.id;
            rec.relation = rel;
            rec.key = mf.key;
            rec.reltuples = exact.reltuples;
            rec.relpages = mf.exact_relpages;
            store.relations[mf.id] = rec;
            for (std::size_t c = 0; c < rdef.attributes.size(); ++c) {
                const AttrParentStats &as = exact.attrs[c];
                AttributeCatalogRecord ar;
                ar.fragment = mf.id;
                ar.attribute = rdef.attributes[c].name;
                ar.stadistinct = as.stadistinct;
                ar.width = as.width;
                ar.mcv_values = as.mcv_values;
                ar.mcv_freqs = as.mcv_freqs;
                ar.histogram = as.histogram;
                store.attributes[{mf.id, ar.attribute}] = std::move(ar);
            }
        }
    }
    return store;
}

// ---------------------------------------------------------------------------
// Executor

namespace {

std::vector<AtomicPredicate> conjunctive_query_atoms(const QueryShape &q) {
    std::vector<AtomicPredicate> out;
    for (const auto &[rel, filter] : q.filters)
        atomize(filter).collect_conjunctive_atoms(out);
    return out;
}

std::string hash_key(const std::vector<const Scalar *> &vals) {
    std::string key;
    for (const Scalar *v : vals) {
        key += v->to_string();
        key += '\x1f';
    }
    return key;
}

} // namespace

std::vector<std::vector<Scalar>> execute_query(const QueryShape &q,
                                               const MaterializedSchema &mat,
                                               const StatsMap &stats,
                                               ExecutionCounters *counters) {
    ExecutionCounters local;
    std::vector<AtomicPredicate> extras = conjunctive_query_atoms(q);

    // scan participating fragments per relation, filter pushed down
    std::map<std::string, std::vector<std::vector<Scalar>>> scanned;
    for (const std::string &rel : q.relations) {
        auto mit = mat.relations.find(rel);
        auto sit = stats.find(rel);
        if (mit == mat.relations.end() || sit == stats.end())
            throw Error("relation " + rel + " is not materialized");
        const PredicateExpr *filter = q.filter_for(rel);
        PredicateSet pset = sit->second.as_pset();
        auto &rows = scanned[rel];
        for (const auto &mf : mit->second.fragments) {
            if (!satisfiable_with(mf.key, pset, extras)) continue;
            local.tuples_read += mf.rows.row_count();
            local.pages_read += mf.exact_relpages;
            for (std::size_t r = 0; r < mf.rows.row_count(); ++r) {
                if (filter && !filter->evaluate_row(mf.rows, r)) continue;
                std::vector<Scalar> tuple(mf.rows.column_count());
                for (std::size_t c = 0; c < mf.rows.column_count(); ++c)
                    tuple[c] = mf.rows.value(r, c);
                rows.push_back(std::move(tuple));
            }
        }
    }

    // left-deep hash joins in the query's relation order
    std::vector<std::vector<Scalar>> result;
    std::map<std::string, std::size_t> offsets;
    std::size_t width = 0;
    auto def_of = [&](const std::string &rel) -> const RelationDef & {
        return stats.at(rel).def;
    };
    for (std::size_t d = 0; d < q.relations.size(); ++d) {
        const std::string &rel = q.relations[d];
        const RelationDef &rdef = def_of(rel);
        if (d == 0) {
            result = std::move(scanned[rel]);
            offsets[rel] = 0;
            width = rdef.attributes.size();
            continue;
        }
        // equality columns linking the new relation to the placed prefix
        std::vector<std::pair<std::size_t, std::size_t>> link; // (placed flat col, new col)
        for (const auto &je : q.joins) {
            const std::string *placed_rel = nullptr, *placed_attr = nullptr;
            const std::string *new_attr = nullptr;
            if (je.left_rel == rel && offsets.count(je.right_rel)) {
                placed_rel = &je.right_rel;
                placed_attr = &je.right_attr;
                new_attr = &je.left_attr;
            } else if (je.right_rel == rel && offsets.count(je.left_rel)) {
                placed_rel = &je.left_rel;
                placed_attr = &je.left_attr;
                new_attr = &je.right_attr;
            } else {
                continue;
            }
            int pc = def_of(*placed_rel).index_of(*placed_attr);
            int nc = rdef.index_of(*new_attr);
            if (pc < 0 || nc < 0) throw Error("unknown join attribute in " + q.id);
            link.push_back({offsets[*placed_rel] + static_cast<std::size_t>(pc),
                            static_cast<std::size_t>(nc)});
        }
        const auto &new_rows = scanned[rel];
        std::vector<std::vector<Scalar>> joined;
        if (link.empty()) { // cross product
            for (const auto &lhs : result)
                for (const auto &rhs : new_rows) {
                    std::vector<Scalar> row = lhs;
                    row.insert(row.end(), rhs.begin(), rhs.end());
                    joined.push_back(std::move(row));
                }
        } else {
            std::unordered_map<std::string, std::vector<std::size_t>> table;
            for (std::size_t r = 0; r < new_rows.size(); ++r) {
                std::vector<const Scalar *> vals;
                for (const auto &[pc, nc] : link) vals.push_back(&new_rows[r][nc]);
                table[hash_key(vals)].push_back(r);
            }
            for (const auto &lhs : result) {
                std::vector<const Scalar *> vals;
                for (const auto &[pc, nc] : link) vals.push_back(&lhs[pc]);
                auto it = table.find(hash_key(vals));
                if (it == table.end()) continue;
                for (std::size_t r : it->second) {
                    std::vector<Scalar> row = lhs;
                    row.insert(row.end(), new_rows[r].begin(), new_rows[r].end());
                    joined.push_back(std::move(row));
                }
            }
        }
        result = std::move(joined);
        offsets[rel] = width;
        width += rdef.attributes.size();
    }
    local.result_rows = result.size();
    if (counters) *counters = local;
    return result;
}

// ---------------------------------------------------------------------------
// Validation harness

std::string ValidationReport::to_json_lines() const {
    std::ostringstream out;
    for (const auto &f : fragments) {
        nlohmann::json j{{"type", "fragment"},
                         {"fragment", f.fragment},
                         {"sim_reltuples", f.sim_reltuples},
                         {"exact_reltuples", f.exact_reltuples},
                         {"sim_relpages", f.sim_relpages},
                         {"exact_relpages", f.exact_relpages},
                         {"max_sigma_delta", f.max_sigma_delta}};
        out << j.dump() << '\n';
    }
    for (const auto &qe : queries) {
        nlohmann::json j{{"type", "query"},
                         {"id", qe.id},
                         {"sim_cost", qe.sim_cost},
                         {"exact_cost", qe.exact_cost},
                         {"relative_error", qe.relative_error}};
        out << j.dump() << '\n';
    }
    nlohmann::json j{{"type", "aggregate"},
                     {"mean_error", mean_error},
                     {"stddev_error", stddev_error},
                     {"min_error", min_error},
                     {"max_error", max_error}};
    out << j.dump() << '\n';
    return out.str();
}

ValidationReport validate_simulation(const PartitionSchema &schema, const Dataset &data,
                                     const std::vector<QueryShape> &workload,
                                     const StatsMap &stats, const SchemaDef &schema_def,
                                     const CostParams &params) {
    ValidationReport report;
    CatalogStore sim = populate_catalog(schema, stats);
    MaterializedSchema mat = materialize(schema, data, stats);
    CatalogStore exact = exact_catalog(mat, data, schema_def);

    for (const auto &[frag, rec] : sim.relations) {
        const RelationCatalogRecord &ex = exact.relation_record(frag);
        FragmentDelta d;
        d.fragment = frag;
        d.sim_reltuples = rec.reltuples;
        d.exact_reltuples = ex.reltuples;
        d.sim_relpages = rec.relpages;
        d.exact_relpages = ex.relpages;
        for (const auto &adef : schema_def.require(rec.relation).attributes) {
            double s = sim.attribute_record(frag, adef.name).stadistinct;
            double e = exact.attribute_record(frag, adef.name).stadistinct;
            d.max_sigma_delta = std::max(d.max_sigma_delta, std::abs(s - e));
        }
        report.fragments.push_back(std::move(d));
    }

    CostContext sim_ctx{&schema, &sim, &stats, &schema_def, params};
    CostContext exact_ctx{&schema, &exact, &stats, &schema_def, params};
    constexpr double kTiny = 1e-9;
    double sum = 0.0, sq = 0.0;
    for (const auto &q : workload) {
        QueryError qe;
        qe.id = q.id;
        qe.sim_cost = query_cost(q, sim_ctx).total;
        qe.exact_cost = query_cost(q, exact_ctx).total;
        qe.relative_error =
            std::abs(qe.sim_cost - qe.exact_cost) / std::max(qe.exact_cost, kTiny);
        sum += qe.relative_error;
        sq += qe.relative_error * qe.relative_error;
        if (report.queries.empty()) {
            report.min_error = report.max_error = qe.relative_error;
        } else {
            report.min_error = std::min(report.min_error, qe.relative_error);
            report.max_error = std::max(report.max_error, qe.relative_error);
        }
        report.queries.push_back(std::move(qe));
    }
    if (!report.queries.empty()) {
        double n = static_cast<double>(report.queries.size());
        report.mean_error = sum / n;
        double var = sq / n - report.mean_error * report.mean_error;
        report.stddev_error = var > 0 ? std::sqrt(var) : 0.0;
    }
    return report;
}

} // namespace hpart
