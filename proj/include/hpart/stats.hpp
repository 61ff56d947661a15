#pragma once

#include "hpart/bitmap.hpp"
#include "hpart/fragmodel.hpp"
#include "hpart/relation.hpp"
#include "hpart/workload.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hpart {

/// Kernel execution mode. Parallel kernels are OpenMP; the serial path is
/// the reference implementation and both must produce identical results.
enum class ExecMode { Serial, Parallel };

/// One position of a relation's partitioning vector. Dimension and
/// standalone relations carry their own atomics; the fact relation in star
/// mode carries predicates induced through FK semi-joins with the
/// dimensions.
struct PartitionPredicate {
    AtomicPredicate atom;      // the defining atomic (over the dimension, if induced)
    bool induced = false;
    std::string via_fk_attr;   // fact FK attribute when induced

    bool constrains_attribute(const std::string &attr) const {
        return !induced && atom.attribute == attr;
    }
};

/// Effective partitioning vector per relation: own predicates, except the
/// star fact whose vector is the concatenation of the dimensions' predicate
/// sets in star edge order.
std::vector<PartitionPredicate> effective_predicates(const std::string &rel,
                                                     const PredicateSets &psets,
                                                     const SchemaDef &schema);

/// Per-dimension segment offsets of the fact's concatenated key.
std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
fact_key_layout(const PredicateSets &psets, const SchemaDef &schema);

struct AttrParentStats {
    std::vector<Scalar> histogram;  // z boundaries (z >= 2) or empty
    std::vector<Scalar> mcv_values;
    std::vector<double> mcv_freqs;  // aligned, each in (0,1]
    double width = 0.0;             // average bytes
    double stadistinct = 0.0;       // signed catalog convention
    std::size_t distinct = 0;       // exact distinct count in the parent
};

struct ParentStats {
    std::size_t reltuples = 0;
    std::size_t relpages = 0;
    std::vector<AttrParentStats> attrs; // aligned with relation attributes
    double tuple_width = 0.0;           // sum of attribute widths
    bool all_fixed = true;
};

ParentStats build_parent_stats(const RelationData &rel, std::size_t stats_target = 100);

/// One finest-granularity record: per attribute an ordered counting map of
/// values plus byte totals for variable-width recalculation.
struct CellRecord {
    std::size_t tuple_count = 0;
    std::vector<std::map<Scalar, std::size_t>> value_counts; // per attribute
    std::vector<std::size_t> byte_totals;                    // per attribute
    // sparse per-attribute counts of parent MCV values, (mcv index, count),
    // sorted by index; redundant with value_counts, kept for the hot path
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> mcv_counts;
};

struct MDH {
    std::string relation;
    std::size_t m = 0;                       // effective predicate count
    std::map<std::uint64_t, CellRecord> cells; // nonempty cells only
};

/// Sorted distinct values of one attribute as present in the relation.
struct AttrDomain {
    std::vector<Scalar> values;
    int index_of(const Scalar &v) const; // -1 if absent
};

/// Everything derivable statistics need for one relation: parent stats,
/// the finest-granularity histogram, and both bitmap index families.
struct RelationStats {
    RelationDef def;
    std::vector<PartitionPredicate> preds;
    ParentStats parent;
    MDH mdh;
    std::vector<Bitmap> tuple_idx;              // per predicate, universe = |R|
    std::vector<AttrDomain> domains;            // per attribute
    // value-encoded co-occurrence indexes: bit d set iff some tuple with
    // value d satisfies phi (pos) / ~phi (neg); for a predicate over the
    // indexed attribute itself neg equals the strict complement of pos
    std::vector<std::vector<Bitmap>> value_pos; // [attr][pred]
    std::vector<std::vector<Bitmap>> value_neg; // [attr][pred]
    std::vector<std::uint64_t> row_cells;       // per row: finest cell bits

    std::size_t row_count() const { return tuple_idx.empty() ? universe_ : tuple_idx[0].universe(); }
    std::size_t universe_ = 0; // row count when there are no predicates

    PredicateSet as_pset() const; // non-induced views for satisfiability
};

/// Build all statistics artifacts for one relation. `data` supplies the
/// dimension columns needed by induced predicates.
RelationStats build_relation_stats(const RelationData &rel,
                                   std::vector<PartitionPredicate> preds,
                                   const Dataset &data, const SchemaDef &schema,
                                   std::size_t stats_target = 100,
                                   ExecMode mode = ExecMode::Serial);

/// Row satisfaction of one partition predicate (handles induced predicates).
Bitmap partition_predicate_bitmap(const PartitionPredicate &p, const RelationData &rel,
                                  const Dataset &data, const SchemaDef &schema);

/// |AND over non-wildcard digits of (possibly negated) tuple bitmaps|.
std::size_t fragment_cardinality(const FragmentKey &key, const RelationStats &stats);
Bitmap fragment_bitmap(const FragmentKey &key, const RelationStats &stats);

/// Sum of cell records covered by the key (value-wise map merge).
CellRecord aggregate_cells(const MDH &mdh, const FragmentKey &key,
                           std::size_t attr_count);

std::vector<Scalar> derive_histogram(const AttrParentStats &parent, const FragmentKey &key,
                                     const std::vector<PartitionPredicate> &preds,
                                     const std::string &attr);

struct McvResult {
    std::vector<Scalar> values;
    std::vector<double> freqs;
};

McvResult derive_mcv(const AttrParentStats &parent, const FragmentKey &key,
                     const RelationStats &stats, std::size_t attr_idx,
                     std::size_t fragment_card);

double derive_width(const AttrParentStats &parent, const FragmentKey &key,
                    const RelationStats &stats, std::size_t attr_idx,
                    std::size_t fragment_card);

std::size_t derive_distinct_count(std::size_t attr_idx, const FragmentKey &key,
                                  const RelationStats &stats);

/// Binary snapshot of the MDH and bitmap indexes (magic "PHMDH1").
void save_snapshot(const RelationStats &stats, const std::string &path);
void load_snapshot_into(RelationStats &stats, const std::string &path);

} // namespace hpart
