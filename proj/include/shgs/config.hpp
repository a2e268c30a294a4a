#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/space.hpp"

namespace shgs {

// Pool overrides from a config file or flags. Numeric entries use
// "lo:hi:step", catalogs a comma list. Validated against the stock pool
// bounds when applied (batch size and hidden nodes only get their upper
// bound once the training partition size is known).
struct SpaceOverrides {
    std::optional<ValueRange> epochs, batch_size, learning_rate, dropout, momentum, decay, l1, l2,
        hidden_nodes;
    std::optional<std::vector<int>> hidden_layers;
    std::optional<std::vector<OptimizerKind>> optimizers;
    std::optional<std::vector<Initializer>> initializers;
    std::optional<std::vector<Activation>> input_activations, hidden_activations;
};

struct RunConfig {
    std::filesystem::path dataset;
    std::string target_column = "metastasis";
    std::string positive_label = "yes";
    TargetHyperparameter target = TargetHyperparameter::epochs;
    bool target_set = false;
    int iterations = 10;
    std::uint64_t master_seed = 1;
    double test_fraction = 0.2;
    int folds = 5;
    int threads = 1;
    std::filesystem::path output_dir = ".";
    SpaceOverrides overrides;

    void validate() const {
        if (dataset.empty()) throw usage_error("config: dataset is required");
        if (!target_set) throw usage_error("config: target hyperparameter is required");
        if (iterations < 1) throw usage_error("config: iterations must be >= 1");
        if (!(test_fraction > 0.0 && test_fraction < 1.0))
            throw usage_error("config: test_fraction must lie in (0,1)");
        if (folds < 2) throw usage_error("config: folds must be >= 2");
        if (threads < 1) throw usage_error("config: threads must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

inline std::vector<std::string> split_list(const std::string& s) { return split_on(s, ','); }

inline ValueRange parse_range(const std::string& key, const std::string& s) {
    const auto parts = split_on(s, ':');
    if (parts.size() != 3)
        throw usage_error("override " + key + ": expected lo:hi:step, got '" + s + "'");
    ValueRange r;
    try {
        r.lo = std::stod(parts[0]);
        r.hi = std::stod(parts[1]);
        r.step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw usage_error("override " + key + ": bad number in '" + s + "'");
    }
    r.validate(key);
    return r;
}

}  // namespace detail

// One "key = value" override, e.g. "epochs=5:101:3" or "optimizer=sgd,adam".
inline void apply_override_entry(SpaceOverrides& ov, const std::string& key,
                                 const std::string& value) {
    auto range = [&](std::optional<ValueRange>& slot) {
        slot = detail::parse_range(key, value);
    };
    if (key == "epochs") range(ov.epochs);
    else if (key == "batch_size") range(ov.batch_size);
    else if (key == "learning_rate") range(ov.learning_rate);
    else if (key == "dropout") range(ov.dropout);
    else if (key == "momentum") range(ov.momentum);
    else if (key == "decay") range(ov.decay);
    else if (key == "l1") range(ov.l1);
    else if (key == "l2") range(ov.l2);
    else if (key == "hidden_nodes") range(ov.hidden_nodes);
    else if (key == "hidden_layers") {
        std::vector<int> layers;
        for (const auto& item : detail::split_list(value)) layers.push_back(std::stoi(item));
        ov.hidden_layers = layers;
    } else if (key == "optimizer") {
        std::vector<OptimizerKind> kinds;
        for (const auto& item : detail::split_list(value)) kinds.push_back(parse_optimizer(item));
        ov.optimizers = kinds;
    } else if (key == "initializer") {
        std::vector<Initializer> inits;
        for (const auto& item : detail::split_list(value)) inits.push_back(parse_initializer(item));
        ov.initializers = inits;
    } else if (key == "input_activation") {
        std::vector<Activation> acts;
        for (const auto& item : detail::split_list(value)) acts.push_back(parse_activation(item));
        ov.input_activations = acts;
    } else if (key == "hidden_activation") {
        std::vector<Activation> acts;
        for (const auto& item : detail::split_list(value)) acts.push_back(parse_activation(item));
        ov.hidden_activations = acts;
    } else {
        throw usage_error("unknown space override key: " + key);
    }
}

namespace detail {

inline void check_range_within(const char* name, const ValueRange& pool,
                               const std::optional<ValueRange>& r) {
    if (!r) return;
    if (r->lo < pool.lo - pool.step * 1e-9 || r->hi > pool.hi + pool.step * 1e-9)
        throw usage_error(std::string("override ") + name + ": [" + fmt_g6(r->lo) + ", " +
                          fmt_g6(r->hi) + "] is outside the pool [" + fmt_g6(pool.lo) + ", " +
                          fmt_g6(pool.hi) + "]");
}

inline void check_layers_within(const std::optional<std::vector<int>>& layers) {
    if (!layers) return;
    if (layers->empty()) throw usage_error("override hidden_layers: empty catalog");
    for (int l : *layers)
        if (l < 1 || l > 4)
            throw usage_error("override hidden_layers: " + std::to_string(l) +
                              " outside the pool {1,2,3,4}");
}

}  // namespace detail

// Bound checks that do not depend on the training-partition size, so a
// config can be rejected before any data is loaded. Batch size and hidden
// nodes are checked when the overrides land on a concrete space.
inline void validate_override_bounds(const SpaceOverrides& ov) {
    const HyperparameterSpace stock;  // static pools only
    detail::check_range_within("epochs", stock.epochs, ov.epochs);
    detail::check_range_within("learning_rate", stock.learning_rate, ov.learning_rate);
    detail::check_range_within("dropout", stock.dropout, ov.dropout);
    detail::check_range_within("momentum", stock.momentum, ov.momentum);
    detail::check_range_within("decay", stock.decay, ov.decay);
    detail::check_range_within("l1", stock.l1, ov.l1);
    detail::check_range_within("l2", stock.l2, ov.l2);
    detail::check_layers_within(ov.hidden_layers);
}

// Applies overrides onto a concrete space, rejecting anything outside the
// stock pool bounds.
inline void apply_overrides(HyperparameterSpace& space, const SpaceOverrides& ov) {
    auto replace = [](const char* name, ValueRange& pool, const std::optional<ValueRange>& r) {
        detail::check_range_within(name, pool, r);
        if (r) pool = *r;
    };
    replace("epochs", space.epochs, ov.epochs);
    if (ov.batch_size) {
        replace("batch_size", space.batch_size, ov.batch_size);
        space.batch_size_overridden = true;
    }
    replace("learning_rate", space.learning_rate, ov.learning_rate);
    replace("dropout", space.dropout, ov.dropout);
    replace("momentum", space.momentum, ov.momentum);
    replace("decay", space.decay, ov.decay);
    replace("l1", space.l1, ov.l1);
    replace("l2", space.l2, ov.l2);
    replace("hidden_nodes", space.hidden_nodes, ov.hidden_nodes);
    if (ov.hidden_layers) {
        detail::check_layers_within(ov.hidden_layers);
        space.hidden_layers = *ov.hidden_layers;
    }
    if (ov.optimizers) {
        if (ov.optimizers->empty()) throw usage_error("override optimizer: empty catalog");
        space.optimizers = *ov.optimizers;
    }
    if (ov.initializers) {
        if (ov.initializers->empty()) throw usage_error("override initializer: empty catalog");
        space.initializers = *ov.initializers;
    }
    if (ov.input_activations) {
        if (ov.input_activations->empty())
            throw usage_error("override input_activation: empty catalog");
        space.input_activations = *ov.input_activations;
    }
    if (ov.hidden_activations) {
        if (ov.hidden_activations->empty())
            throw usage_error("override hidden_activation: empty catalog");
        space.hidden_activations = *ov.hidden_activations;
    }
}

// Key-value config file: "key = value" lines, '#' comments, and a
// "[space]" section whose entries override the hyperparameter pools.
inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path.string());

    RunConfig cfg;
    bool in_space = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line == "[space]") {
                in_space = true;
                continue;
            }
            throw usage_error(path.string() + ":" + std::to_string(line_no) +
                              ": unknown section " + line);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error(path.string() + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        try {
            if (in_space) {
                apply_override_entry(cfg.overrides, key, value);
            } else if (key == "dataset") {
                cfg.dataset = value;
            } else if (key == "target_column") {
                cfg.target_column = value;
            } else if (key == "positive_label") {
                cfg.positive_label = value;
            } else if (key == "target") {
                cfg.target = parse_target(value);
                cfg.target_set = true;
            } else if (key == "iterations") {
                cfg.iterations = std::stoi(value);
            } else if (key == "seed") {
                cfg.master_seed = std::stoull(value);
            } else if (key == "test_fraction") {
                cfg.test_fraction = std::stod(value);
            } else if (key == "folds") {
                cfg.folds = std::stoi(value);
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else {
                throw usage_error("unknown config key: " + key);
            }
        } catch (const usage_error&) {
            throw;
        } catch (const std::exception& e) {
            throw usage_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    validate_override_bounds(cfg.overrides);
    return cfg;
}

}  // namespace shgs
