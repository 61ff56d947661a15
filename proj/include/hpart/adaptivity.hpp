#pragma once

#include "hpart/catalog.hpp"

namespace hpart {

/// Common plan state: the predicate sets and schema after the adaptation,
/// plus a fingerprint of the schema the plan was computed against.
struct AdaptationPlanBase {
    PredicateSets new_psets;
    PartitionSchema result;
    double total_cost = 0.0; // page-access units
    std::size_t base_fingerprint = 0;
};

struct MergeGroup {
    std::string relation;
    std::string target;               // max-cardinality member, retained
    std::vector<std::string> sources; // merged into the target
    double cost = 0.0;                // sum of source read + write pages
};

struct MergePlan : AdaptationPlanBase {
    std::vector<MergeGroup> groups;
};

enum class SplitReadMode { Parent, Smaller };

struct SplitItem {
    std::string relation;
    std::string parent;
    FragmentKey child0, child1; // over the relation's new predicate set
    std::string smaller;        // smaller child (written out)
    double cost = 0.0;
};

struct SplitPlan : AdaptationPlanBase {
    std::vector<SplitItem> splits;
};

struct AdaptationResult {
    PredicateSets psets;
    PartitionSchema schema;
    StatsMap stats;
    CatalogStore store;
};

std::size_t schema_fingerprint(const PartitionSchema &schema, const PredicateSets &psets);

/// Drop the predicates used only by the removed query and merge the
/// fragments that become indistinguishable; the largest group member is the
/// merge target and every other member pays read + write of its pages.
MergePlan plan_merge_on_removal(const PartitionSchema &schema,
                                const std::vector<QueryShape> &workload,
                                const std::string &removed_id, const PredicateSets &psets,
                                const StatsMap &stats, const CatalogStore &store,
                                const SchemaDef &schema_def);

/// Split every fragment of a relation along each genuinely new predicate of
/// the added query. Cost per split: read the parent (or, under
/// SplitReadMode::Smaller, only the smaller child) and write the smaller
/// child.
SplitPlan plan_split_on_addition(const PartitionSchema &schema, const QueryShape &new_query,
                                 const PredicateSets &psets, const StatsMap &stats,
                                 const CatalogStore &store, const SchemaDef &schema_def,
                                 const Dataset &data,
                                 SplitReadMode mode = SplitReadMode::Parent);

/// Swap in the plan's schema, rebuild statistics for relations whose
/// predicate set changed, and re-derive only the affected catalog records.
/// Throws a staleness error when the schema changed since planning.
AdaptationResult apply_adaptation(const AdaptationPlanBase &plan,
                                  const PartitionSchema &current,
                                  const PredicateSets &current_psets, const Dataset &data,
                                  const SchemaDef &schema_def, const CatalogStore &old_store,
                                  std::size_t stats_target = 100,
                                  ExecMode mode = ExecMode::Serial);

/// Rebuild every relation's statistics artifacts from (possibly new) base
/// data under the given predicate sets.
StatsMap refresh_statistics(const Dataset &data, const PredicateSets &psets,
                            const SchemaDef &schema_def, std::size_t stats_target = 100,
                            ExecMode mode = ExecMode::Serial);

} // namespace hpart
