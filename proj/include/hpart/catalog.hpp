#pragma once

#include "hpart/stats.hpp"

#include <map>
#include <string>
#include <vector>

namespace hpart {

/// Reference 8KB page layout used by the physical estimates.
struct PageLayout {
    static constexpr std::size_t block_bytes = 8192;
    static constexpr std::size_t header_bytes = 24;
    static constexpr std::size_t usable_bytes = 8168; // block - header
    static constexpr std::size_t per_tuple_overhead = 8; // line pointer + offset
};

/// Simulated pg_class row for one fragment.
struct RelationCatalogRecord {
    std::string fragment; // fragment id (also the simulated table name)
    std::string relation; // parent relation
    FragmentKey key;
    std::size_t reltuples = 0;
    std::size_t relpages = 0;
};

/// Simulated pg_statistic row for one (fragment, attribute) pair.
struct AttributeCatalogRecord {
    std::string fragment;
    std::string attribute;
    double stadistinct = 0.0; // signed catalog convention
    double width = 0.0;
    std::vector<Scalar> mcv_values;
    std::vector<double> mcv_freqs;
    std::vector<Scalar> histogram; // boundary values, empty when absent
};

/// Write-once store of simulated catalog records.
struct CatalogStore {
    std::map<std::string, RelationCatalogRecord> relations; // by fragment id
    std::map<std::pair<std::string, std::string>, AttributeCatalogRecord> attributes;

    const RelationCatalogRecord &relation_record(const std::string &fragment) const;
    const AttributeCatalogRecord &attribute_record(const std::string &fragment,
                                                   const std::string &attr) const;
};

std::size_t derive_reltuples(const FragmentKey &key, const RelationStats &stats);

/// Variable-length branch: ceil(n / floor(usable / (overhead + sum w))).
/// All-fixed branch: ceil(parent.relpages * n / |R|). Zero tuples -> zero
/// pages. Throws when a tuple cannot fit one page.
std::size_t derive_relpages(std::size_t reltuples, const std::vector<double> &widths,
                            const ParentStats &parent, bool all_fixed);

using StatsMap = std::map<std::string, RelationStats>;

/// Build records for every fragment of the schema. Relations present in the
/// stats map but absent from the schema get one all-wildcard fragment, so
/// downstream costing sees every relation.
CatalogStore populate_catalog(const PartitionSchema &schema, const StatsMap &stats,
                              ExecMode mode = ExecMode::Serial);

/// SQL script: per fragment a CREATE TABLE with non-overlapping CHECK
/// constraints, a pg_class UPDATE and per-attribute pg_statistic INSERTs.
/// Deterministic: fragments by id, attributes in relation order.
std::string export_catalog_script(const CatalogStore &store, const StatsMap &stats,
                                  const SchemaDef &schema);

} // namespace hpart
