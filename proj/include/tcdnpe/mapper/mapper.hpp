#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace tcdnpe::mapper {

// rows TCD-MAC groups (TGs) of cols MACs each.
struct ArrayShape {
    int rows = 16;
    int cols = 8;

    int total() const { return rows * cols; }
    friend bool operator==(const ArrayShape&, const ArrayShape&) = default;
};

// NPE(K, N): N neurons for each of K batches per roll.
struct NpeConfig {
    int batches = 1; // K
    int neurons = 1; // N

    friend auto operator<=>(const NpeConfig&, const NpeConfig&) = default;
};

// Gamma(B, I, U).
struct LayerProblem {
    int batches = 1;
    int inputs = 1;
    int neurons = 1;
};

// Effective load psi = (K*, N*) of a roll, K* <= K and N* <= N.
struct Load {
    int batches = 0;
    int neurons = 0;

    friend bool operator==(const Load&, const Load&) = default;
};

bool is_legal(const NpeConfig& cfg, const ArrayShape& shape);

// Legal configurations: K * N == rows * cols, K divides rows (TGs are never
// split across batches) and therefore N >= cols. Sorted by descending N.
std::vector<NpeConfig> enumerate_configs(const ArrayShape& shape);

// ---- Computational tree ----------------------------------------------------
// Subproblems are shared between parents, so the "tree" is stored as a DAG
// memoised on (batches, neurons).

struct CompNode;

struct CompChoice {
    NpeConfig config;
    Load load;
    int rolls = 0;
    std::shared_ptr<const CompNode> residual_batches; // (B mod K*, Theta)
    std::shared_ptr<const CompNode> residual_neurons; // (B - B mod K*, Theta mod N*)
};

struct CompNode {
    int batches = 0;
    int neurons = 0;
    std::vector<CompChoice> choices; // empty for a leaf (no work left)

    bool empty() const { return batches == 0 || neurons == 0; }
};

// `allowed` restricts the configurations tried at every node; empty means all legal ones.
std::shared_ptr<const CompNode> create_tree(int batches, int neurons, const ArrayShape& shape,
                                            std::span<const NpeConfig> allowed = {});

// ---- Execution tree --------------------------------------------------------

struct ExecNode {
    int batches = 0; // problem solved by this subtree
    int neurons = 0;
    NpeConfig config;
    Load load;
    int rolls = 0;
    int batch_groups = 0;  // rolls == batch_groups * neuron_groups
    int neuron_groups = 0;
    std::unique_ptr<ExecNode> residual_batches;
    std::unique_ptr<ExecNode> residual_neurons;

    int total_rolls() const;
};

// Picks, at every node, the child choice with the fewest total rolls. Ties go
// to the larger N, then the larger K. Returns null for an empty problem.
std::unique_ptr<ExecNode> best_exec_tree(const CompNode& root);

// ---- Schedule --------------------------------------------------------------

struct ScheduleEvent {
    int layer = 0; // 1-based index of the computed layer
    NpeConfig config;
    Load load;
    int rolls = 0;
    int cycles_per_roll = 0; // I + 1 on TCD-MACs, I on conventional MACs
    // Rolls cover batches [batch_begin, batch_begin + batch_groups * load.batches)
    // and neurons [neuron_begin, neuron_begin + neuron_groups * load.neurons).
    int batch_begin = 0;
    int neuron_begin = 0;
    int batch_groups = 0;
    int neuron_groups = 0;
};

struct ScheduleOptions {
    // Extra cycles per roll on top of the I streaming cycles (1 for the CPM cycle).
    int cycles_overhead = 1;
    // Restricts every node to these configurations; empty means all legal ones.
    std::vector<NpeConfig> allowed;
};

// Breadth-first walk of the execution tree.
std::vector<ScheduleEvent> bfs_events(const ExecNode* root, int layer, int inputs, int cycles_overhead);

std::vector<ScheduleEvent> schedule_layer(const LayerProblem& problem, const ArrayShape& shape,
                                          int layer = 1, const ScheduleOptions& opts = {});

// One Gamma(B, M[l-1], M[l]) per consecutive pair of layer sizes.
std::vector<ScheduleEvent> schedule(std::span<const int> layer_sizes, int batches, const ArrayShape& shape,
                                    const ScheduleOptions& opts = {});

int total_rolls(std::span<const ScheduleEvent> events);

// Useful neuron computations over PE slots offered: B * U / (rolls * PEs).
double utilization(std::span<const ScheduleEvent> events, const LayerProblem& problem, const ArrayShape& shape);

// Splits B into passes of at most `fit` batches (the batches the feature memory holds).
std::vector<int> split_batches(int batches, int fit);

// Test oracle: exhaustive memoised minimum over every config, every load up to
// the config's (K, N) and both residual orientations. Guarded to B <= 16, Theta <= 64.
int brute_force_min_rolls(int batches, int neurons, const ArrayShape& shape);

} // namespace tcdnpe::mapper
