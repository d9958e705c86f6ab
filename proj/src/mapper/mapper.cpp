#include "tcdnpe/mapper/mapper.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "tcdnpe/error.hpp"

namespace tcdnpe::mapper {

bool is_legal(const NpeConfig& cfg, const ArrayShape& shape) {
    return cfg.batches >= 1 && cfg.neurons >= shape.cols && shape.rows % cfg.batches == 0 &&
           cfg.batches * cfg.neurons == shape.total();
}

std::vector<NpeConfig> enumerate_configs(const ArrayShape& shape) {
    if (shape.rows < 1 || shape.cols < 1) {
        throw ConfigError("array shape must be at least 1x1");
    }
    std::vector<NpeConfig> out;
    for (int k = 1; k <= shape.rows; ++k) {
        if (shape.rows % k == 0) {
            out.push_back({k, shape.total() / k});
        }
    }
    return out; // ascending K is descending N
}

namespace {

std::vector<NpeConfig> resolve_allowed(const ArrayShape& shape, std::span<const NpeConfig> allowed) {
    if (allowed.empty()) {
        return enumerate_configs(shape);
    }
    std::vector<NpeConfig> out(allowed.begin(), allowed.end());
    for (const NpeConfig& c : out) {
        if (!is_legal(c, shape)) {
            throw ConfigError("NPE(" + std::to_string(c.batches) + "," + std::to_string(c.neurons) +
                              ") is not a legal configuration for a " + std::to_string(shape.rows) + "x" +
                              std::to_string(shape.cols) + " array");
        }
    }
    std::sort(out.begin(), out.end(), [](const NpeConfig& x, const NpeConfig& y) {
        return x.neurons != y.neurons ? x.neurons > y.neurons : x.batches > y.batches;
    });
    return out;
}

class TreeBuilder {
public:
    explicit TreeBuilder(std::vector<NpeConfig> configs) : configs_(std::move(configs)) {}

    std::shared_ptr<const CompNode> build(int b, int theta) {
        const auto key = std::make_pair(b, theta);
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        auto node = std::make_shared<CompNode>();
        node->batches = b;
        node->neurons = theta;
        if (b > 0 && theta > 0) {
            for (const NpeConfig& cfg : configs_) {
                const int mb = std::min(b, cfg.batches);
                const int mt = std::min(theta, cfg.neurons);
                CompChoice choice;
                choice.config = cfg;
                choice.load = {mb, mt};
                choice.rolls = (b / mb) * (theta / mt);
                if (b % mb != 0) {
                    choice.residual_batches = build(b % mb, theta);
                }
                if (theta % mt != 0) {
                    choice.residual_neurons = build(b - b % mb, theta % mt);
                }
                node->choices.push_back(std::move(choice));
            }
        }
        memo_.emplace(key, node);
        return node;
    }

private:
    std::vector<NpeConfig> configs_;
    std::map<std::pair<int, int>, std::shared_ptr<const CompNode>> memo_;
};

class BestTree {
public:
    int min_rolls(const CompNode* node) {
        if (node == nullptr || node->empty()) {
            return 0;
        }
        if (auto it = best_.find(node); it != best_.end()) {
            return it->second.second;
        }
        int best = std::numeric_limits<int>::max();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < node->choices.size(); ++i) {
            const CompChoice& c = node->choices[i];
            const int total = c.rolls + min_rolls(c.residual_batches.get()) + min_rolls(c.residual_neurons.get());
            // Choices are ordered by descending N, then K: strict < keeps the first on ties.
            if (total < best) {
                best = total;
                best_idx = i;
            }
        }
        best_.emplace(node, std::make_pair(best_idx, best));
        return best;
    }

    std::unique_ptr<ExecNode> extract(const CompNode* node) {
        if (node == nullptr || node->empty()) {
            return nullptr;
        }
        min_rolls(node);
        const CompChoice& c = node->choices[best_.at(node).first];
        auto out = std::make_unique<ExecNode>();
        out->batches = node->batches;
        out->neurons = node->neurons;
        out->config = c.config;
        out->load = c.load;
        out->rolls = c.rolls;
        out->batch_groups = node->batches / c.load.batches;
        out->neuron_groups = node->neurons / c.load.neurons;
        out->residual_batches = extract(c.residual_batches.get());
        out->residual_neurons = extract(c.residual_neurons.get());
        return out;
    }

private:
    std::map<const CompNode*, std::pair<std::size_t, int>> best_;
};

} // namespace

std::shared_ptr<const CompNode> create_tree(int batches, int neurons, const ArrayShape& shape,
                                            std::span<const NpeConfig> allowed) {
    if (batches < 0 || neurons < 0) {
        throw ConfigError("create_tree: negative problem size");
    }
    TreeBuilder builder(resolve_allowed(shape, allowed));
    return builder.build(batches, neurons);
}

int ExecNode::total_rolls() const {
    int t = rolls;
    if (residual_batches) {
        t += residual_batches->total_rolls();
    }
    if (residual_neurons) {
        t += residual_neurons->total_rolls();
    }
    return t;
}

std::unique_ptr<ExecNode> best_exec_tree(const CompNode& root) {
    BestTree best;
    return best.extract(&root);
}

std::vector<ScheduleEvent> bfs_events(const ExecNode* root, int layer, int inputs, int cycles_overhead) {
    struct Item {
        const ExecNode* node;
        int batch_begin;
        int neuron_begin;
    };
    std::vector<ScheduleEvent> events;
    std::deque<Item> queue;
    if (root != nullptr) {
        queue.push_back({root, 0, 0});
    }
    while (!queue.empty()) {
        const Item it = queue.front();
        queue.pop_front();
        const ExecNode& n = *it.node;
        ScheduleEvent ev;
        ev.layer = layer;
        ev.config = n.config;
        ev.load = n.load;
        ev.rolls = n.rolls;
        ev.cycles_per_roll = inputs + cycles_overhead;
        ev.batch_begin = it.batch_begin;
        ev.neuron_begin = it.neuron_begin;
        ev.batch_groups = n.batch_groups;
        ev.neuron_groups = n.neuron_groups;
        events.push_back(ev);

        const int full_batches = n.batch_groups * n.load.batches;
        const int full_neurons = n.neuron_groups * n.load.neurons;
        if (n.residual_batches) {
            queue.push_back({n.residual_batches.get(), it.batch_begin + full_batches, it.neuron_begin});
        }
        if (n.residual_neurons) {
            queue.push_back({n.residual_neurons.get(), it.batch_begin, it.neuron_begin + full_neurons});
        }
    }
    return events;
}

std::vector<ScheduleEvent> schedule_layer(const LayerProblem& problem, const ArrayShape& shape, int layer,
                                          const ScheduleOptions& opts) {
    if (problem.batches < 1 || problem.inputs < 1 || problem.neurons < 1) {
        throw ConfigError("layer problem dimensions must be positive");
    }
    const auto tree = create_tree(problem.batches, problem.neurons, shape, opts.allowed);
    const auto exec = best_exec_tree(*tree);
    return bfs_events(exec.get(), layer, problem.inputs, opts.cycles_overhead);
}

std::vector<ScheduleEvent> schedule(std::span<const int> layer_sizes, int batches, const ArrayShape& shape,
                                    const ScheduleOptions& opts) {
    if (layer_sizes.size() < 2) {
        throw ConfigError("schedule: model needs an input layer and at least one computed layer");
    }
    std::vector<ScheduleEvent> all;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        const LayerProblem p{batches, layer_sizes[l - 1], layer_sizes[l]};
        auto ev = schedule_layer(p, shape, static_cast<int>(l), opts);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    return all;
}

int total_rolls(std::span<const ScheduleEvent> events) {
    int t = 0;
    for (const ScheduleEvent& e : events) {
        t += e.rolls;
    }
    return t;
}

double utilization(std::span<const ScheduleEvent> events, const LayerProblem& problem, const ArrayShape& shape) {
    const int rolls = total_rolls(events);
    if (rolls == 0) {
        return 0.0;
    }
    return static_cast<double>(problem.batches) * problem.neurons /
           (static_cast<double>(rolls) * shape.total());
}

std::vector<int> split_batches(int batches, int fit) {
    if (fit < 1) {
        throw CapacityError("no batch fits the feature memory");
    }
    std::vector<int> passes;
    for (int left = batches; left > 0; left -= fit) {
        passes.push_back(std::min(left, fit));
    }
    return passes;
}

int brute_force_min_rolls(int batches, int neurons, const ArrayShape& shape) {
    if (batches < 0 || neurons < 0 || batches > 16 || neurons > 64) {
        throw ConfigError("brute_force_min_rolls is limited to B <= 16, Theta <= 64");
    }
    const std::vector<NpeConfig> configs = enumerate_configs(shape);
    std::vector<int> memo(static_cast<std::size_t>((batches + 1) * (neurons + 1)), -1);

    // Any load (k, n) that fits some configuration may tile the block; the rest
    // is split in either orientation.
    auto solve = [&](auto&& self, int b, int t) -> int {
        if (b == 0 || t == 0) {
            return 0;
        }
        int& slot = memo[static_cast<std::size_t>(b * (neurons + 1) + t)];
        if (slot >= 0) {
            return slot;
        }
        int best = std::numeric_limits<int>::max();
        for (const NpeConfig& cfg : configs) {
            for (int k = 1; k <= std::min(b, cfg.batches); ++k) {
                for (int n = 1; n <= std::min(t, cfg.neurons); ++n) {
                    const int r = (b / k) * (t / n);
                    const int rb = b % k;
                    const int rt = t % n;
                    const int split_rows = self(self, rb, t) + self(self, b - rb, rt);
                    const int split_cols = self(self, rb, t - rt) + self(self, b, rt);
                    best = std::min(best, r + std::min(split_rows, split_cols));
                }
            }
        }
        slot = best;
        return best;
    };
    return solve(solve, batches, neurons);
}

} // namespace tcdnpe::mapper
