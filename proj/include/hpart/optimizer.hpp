#pragma once

#include "hpart/costmodel.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace hpart {

struct GAParams {
    std::size_t pop = 20;          // K_pop
    std::size_t generations = 30;  // G
    double p_m = 0.1;              // per-digit mutation probability
    std::size_t elitism = 2;       // epsilon
    std::size_t max_fragments = 64; // W, total fragments incl. derived fact
    std::size_t max_relocation =    // WW, tuples (re-partitioning mode only)
        std::numeric_limits<std::size_t>::max();
    std::uint64_t seed = 0;

    void check() const;
};

/// Ordered genes; each gene is one ternary digit vector over the problem's
/// concatenated predicate positions.
struct Chromosome {
    std::size_t gene_len = 0;
    std::vector<std::vector<std::uint8_t>> genes; // digits in {0,1,2}

    std::size_t total_len() const { return genes.size() * gene_len; }
    std::uint8_t digit(std::size_t flat) const { return genes[flat / gene_len][flat % gene_len]; }
    void set_digit(std::size_t flat, std::uint8_t d) { genes[flat / gene_len][flat % gene_len] = d; }
};

/// Immutable search problem: schema, statistics, workload, and the
/// precomputed per-relation satisfiable cells and gene layout.
struct Problem {
    const SchemaDef *schema_def = nullptr;
    const StatsMap *stats = nullptr;
    const PredicateSets *psets = nullptr;
    const std::vector<QueryShape> *workload = nullptr;
    const PartitionSchema *old_schema = nullptr; // re-partitioning mode when set
    CostParams cost_params;
    ExecMode mode = ExecMode::Serial;

    // gene layout: (relation, offset, m), partitioned relations only
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> layout;
    std::size_t gene_len = 0;
    std::map<std::string, std::vector<Cell>> cells; // satisfiable cells per relation
};

Problem make_problem(const SchemaDef &schema_def, const StatsMap &stats,
                     const PredicateSets &psets, const std::vector<QueryShape> &workload,
                     ExecMode mode = ExecMode::Serial);

struct FitnessRecord {
    Chromosome chrom;
    PartitionSchema schema;
    double cost = std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::size_t fragment_count = 0;
    std::size_t relocated_tuples = 0;
};

struct GenerationTrace {
    std::size_t generation = 0;
    double best = 0.0;          // best-so-far cost (monotone non-increasing)
    double mean = 0.0;          // mean cost over this generation's feasible records
    double feasible_fraction = 0.0;
};

struct GAResult {
    FitnessRecord best;
    std::vector<GenerationTrace> trace;
};

/// Deterministic repair decode: genes claim unclaimed satisfiable cells
/// first-wins, claiming genes keep the most specific key of their claim,
/// leftovers become greedily grouped remainder fragments, then
/// lowest-cardinality pairs merge until the fragment budget holds.
/// `feasible_out` reports whether the budget could be met.
PartitionSchema decode_and_repair(const Chromosome &chrom, const Problem &problem,
                                  std::size_t max_fragments, bool *feasible_out = nullptr);

std::vector<Chromosome> seed_population(const GAParams &params, const Problem &problem,
                                        std::mt19937_64 &rng);

/// Single-point suffix swap at flat digit `point` (0 < point < min length).
std::pair<Chromosome, Chromosome> crossover(const Chromosome &a, const Chromosome &b,
                                            std::size_t point);

Chromosome mutate(Chromosome chrom, double p_m, std::mt19937_64 &rng);

FitnessRecord evaluate(const Chromosome &chrom, const Problem &problem,
                       const GAParams &params);

GAResult evolve(const Problem &problem, const GAParams &params);

struct RelocationCost {
    std::size_t tuples = 0;
    double bytes = 0.0;
};

/// Tuples (and bytes) a re-partitioning must move: new fragments greedily
/// retain the old fragment file with the largest overlap, one-to-one.
RelocationCost relocation_cost(const PartitionSchema &old_schema,
                               const PartitionSchema &new_schema, const StatsMap &stats);

struct BaselineResult {
    PartitionSchema schema;
    double cost = std::numeric_limits<double>::infinity();
};

/// Brute-force oracle over every predicate subset; refuses beyond
/// sum(m_i) <= 6.
BaselineResult exhaustive_baseline(const Problem &problem, std::size_t max_fragments);

std::string trace_to_text(const std::vector<GenerationTrace> &trace);

} // namespace hpart
