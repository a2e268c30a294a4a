#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/training.hpp"

namespace shgs {

// The eight hyperparameters a sweep can target. Everything else
// (layer/node counts, optimizer, initializer, activations) is
// background-only.
enum class TargetHyperparameter {
    epochs,
    batch_size,
    learning_rate,
    dropout,
    momentum,
    decay,
    l1,
    l2
};

inline constexpr TargetHyperparameter kAllTargets[] = {
    TargetHyperparameter::epochs,     TargetHyperparameter::batch_size,
    TargetHyperparameter::learning_rate, TargetHyperparameter::dropout,
    TargetHyperparameter::momentum,   TargetHyperparameter::decay,
    TargetHyperparameter::l1,         TargetHyperparameter::l2};

inline const char* to_string(TargetHyperparameter t) {
    switch (t) {
        case TargetHyperparameter::epochs: return "epochs";
        case TargetHyperparameter::batch_size: return "batch_size";
        case TargetHyperparameter::learning_rate: return "learning_rate";
        case TargetHyperparameter::dropout: return "dropout";
        case TargetHyperparameter::momentum: return "momentum";
        case TargetHyperparameter::decay: return "decay";
        case TargetHyperparameter::l1: return "l1";
        case TargetHyperparameter::l2: return "l2";
    }
    return "?";
}

inline TargetHyperparameter parse_target(const std::string& s) {
    for (auto t : kAllTargets)
        if (s == to_string(t)) return t;
    throw usage_error("unknown target hyperparameter: " + s);
}

// Inclusive arithmetic sequence lo, lo+step, ... <= hi.
struct ValueRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    void validate(const std::string& name) const {
        if (!(step > 0.0)) throw usage_error(name + ": step must be > 0");
        if (lo > hi) throw usage_error(name + ": lo must be <= hi");
    }

    std::size_t count() const {
        auto m = static_cast<long long>(std::llround((hi - lo) / step));
        if (lo + static_cast<double>(m) * step > hi + step * 1e-6) --m;
        if (m < 0) m = 0;
        return static_cast<std::size_t>(m) + 1;
    }

    double value(std::size_t i) const {
        const double v = lo + static_cast<double>(i) * step;
        return v > hi ? hi : v;  // absorb float drift at the top end
    }

    std::vector<double> values() const {
        std::vector<double> out;
        const std::size_t m = count();
        out.reserve(m);
        for (std::size_t i = 0; i < m; ++i) out.push_back(value(i));
        return out;
    }

    bool contains(double v) const {
        const double tol = step * 1e-6;
        return v >= lo - tol && v <= hi + tol;
    }
};

// Value pools for all tunable hyperparameters. The batch-size and
// hidden-node pools are bounded by the training-partition size, so a
// space is always built for a concrete n_train.
struct HyperparameterSpace {
    int n_train = 0;
    ValueRange epochs{5, 1001, 3};
    ValueRange batch_size{1, 1, 1};
    ValueRange learning_rate{0.001, 0.3, 0.001};
    ValueRange dropout{0.0, 0.9, 0.01};
    ValueRange momentum{0.1, 0.9, 0.01};
    ValueRange decay{0.0, 0.3, 0.001};
    ValueRange l1{0.0, 0.3, 0.001};
    ValueRange l2{0.0, 0.3, 0.001};
    ValueRange hidden_nodes{1, 1, 1};
    std::vector<int> hidden_layers{1, 2, 3, 4};
    std::vector<OptimizerKind> optimizers{OptimizerKind::sgd, OptimizerKind::adam,
                                          OptimizerKind::adagrad, OptimizerKind::nadam,
                                          OptimizerKind::adamax};
    std::vector<Initializer> initializers{Initializer::constant, Initializer::glorot_normal,
                                          Initializer::glorot_uniform, Initializer::he_normal,
                                          Initializer::he_uniform};
    std::vector<Activation> input_activations{Activation::relu, Activation::sigmoid,
                                              Activation::softmax, Activation::tanh};
    std::vector<Activation> hidden_activations{Activation::relu, Activation::sigmoid,
                                               Activation::softmax, Activation::tanh};
    // set when the batch-size range was overridden; the default sweep
    // expansion rule applies only to the stock pool
    bool batch_size_overridden = false;

    static HyperparameterSpace defaults(int n_train) {
        if (n_train < 2) throw std::invalid_argument("space: n_train must be >= 2");
        HyperparameterSpace s;
        s.n_train = n_train;
        s.batch_size = ValueRange{1, static_cast<double>(n_train), 1};
        s.hidden_nodes = ValueRange{1, static_cast<double>(n_train), 1};
        return s;
    }

    const ValueRange& range_of(TargetHyperparameter t) const {
        switch (t) {
            case TargetHyperparameter::epochs: return epochs;
            case TargetHyperparameter::batch_size: return batch_size;
            case TargetHyperparameter::learning_rate: return learning_rate;
            case TargetHyperparameter::dropout: return dropout;
            case TargetHyperparameter::momentum: return momentum;
            case TargetHyperparameter::decay: return decay;
            case TargetHyperparameter::l1: return l1;
            case TargetHyperparameter::l2: return l2;
        }
        throw std::invalid_argument("range_of: bad target");
    }
};

struct TargetSweepSpec {
    TargetHyperparameter target;
    std::vector<double> values;  // strictly increasing
};

// Expands the target's pool into the ordered sweep value list. The stock
// batch-size pool enumerates the even sizes 2, 4, ..., 2*floor(n_train/2);
// an overridden batch-size range expands like any other numeric range.
inline TargetSweepSpec expand_values(const HyperparameterSpace& space, TargetHyperparameter target) {
    TargetSweepSpec spec;
    spec.target = target;
    if (target == TargetHyperparameter::batch_size && !space.batch_size_overridden) {
        const int top = 2 * (space.n_train / 2);
        if (top < 2) throw data_error("expand_values: training partition too small for a batch sweep");
        for (int v = 2; v <= top; v += 2) spec.values.push_back(static_cast<double>(v));
    } else {
        spec.values = space.range_of(target).values();
    }
    return spec;
}

// One value for every non-target hyperparameter; the target's slot in
// `base` stays at its default and is never read.
struct BackgroundSetting {
    TargetHyperparameter target = TargetHyperparameter::epochs;
    HyperparameterSetting base;

    bool operator==(const BackgroundSetting& other) const {
        return target == other.target && base.epochs == other.base.epochs &&
               base.batch_size == other.base.batch_size &&
               base.learning_rate == other.base.learning_rate &&
               base.dropout == other.base.dropout && base.momentum == other.base.momentum &&
               base.decay == other.base.decay && base.l1 == other.base.l1 &&
               base.l2 == other.base.l2 && base.hidden_layers == other.base.hidden_layers &&
               base.hidden_nodes == other.base.hidden_nodes &&
               base.optimizer == other.base.optimizer &&
               base.initializer == other.base.initializer &&
               base.input_activation == other.base.input_activation &&
               base.hidden_activation == other.base.hidden_activation;
    }
};

namespace detail {

inline double draw_from_range(const ValueRange& r, rng_t& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, r.count() - 1);
    return r.value(pick(rng));
}

template <class T>
const T& draw_from_catalog(const std::vector<T>& pool, rng_t& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

}  // namespace detail

// Uniform draw of every non-target hyperparameter from its pool. Momentum
// is only meaningful under SGD: a momentum sweep forces the optimizer to
// sgd, and a non-sgd draw leaves momentum unset.
inline BackgroundSetting sample_background(const HyperparameterSpace& space,
                                           TargetHyperparameter target, rng_t& rng) {
    BackgroundSetting bg;
    bg.target = target;
    auto& s = bg.base;
    using T = TargetHyperparameter;
    if (target != T::epochs)
        s.epochs = static_cast<int>(std::llround(detail::draw_from_range(space.epochs, rng)));
    if (target != T::batch_size)
        s.batch_size = static_cast<int>(std::llround(detail::draw_from_range(space.batch_size, rng)));
    if (target != T::learning_rate)
        s.learning_rate = detail::draw_from_range(space.learning_rate, rng);
    if (target != T::dropout) s.dropout = detail::draw_from_range(space.dropout, rng);
    if (target != T::momentum) s.momentum = detail::draw_from_range(space.momentum, rng);
    if (target != T::decay) s.decay = detail::draw_from_range(space.decay, rng);
    if (target != T::l1) s.l1 = detail::draw_from_range(space.l1, rng);
    if (target != T::l2) s.l2 = detail::draw_from_range(space.l2, rng);
    s.hidden_layers = detail::draw_from_catalog(space.hidden_layers, rng);
    s.hidden_nodes = static_cast<int>(std::llround(detail::draw_from_range(space.hidden_nodes, rng)));
    s.optimizer = detail::draw_from_catalog(space.optimizers, rng);
    s.initializer = detail::draw_from_catalog(space.initializers, rng);
    s.input_activation = detail::draw_from_catalog(space.input_activations, rng);
    s.hidden_activation = detail::draw_from_catalog(space.hidden_activations, rng);

    if (target == T::momentum) {
        s.optimizer = OptimizerKind::sgd;  // a momentum sweep is inert otherwise
        s.momentum.reset();
    } else if (s.optimizer != OptimizerKind::sgd) {
        s.momentum.reset();
    }
    return bg;
}

// background + one target value = one fully specified setting
inline HyperparameterSetting make_setting(const BackgroundSetting& bg, double target_value) {
    HyperparameterSetting s = bg.base;
    switch (bg.target) {
        case TargetHyperparameter::epochs:
            s.epochs = static_cast<int>(std::llround(target_value));
            break;
        case TargetHyperparameter::batch_size:
            s.batch_size = static_cast<int>(std::llround(target_value));
            break;
        case TargetHyperparameter::learning_rate:
            s.learning_rate = target_value;
            break;
        case TargetHyperparameter::dropout:
            s.dropout = target_value;
            break;
        case TargetHyperparameter::momentum:
            s.momentum = target_value;
            break;
        case TargetHyperparameter::decay:
            s.decay = target_value;
            break;
        case TargetHyperparameter::l1:
            s.l1 = target_value;
            break;
        case TargetHyperparameter::l2:
            s.l2 = target_value;
            break;
    }
    return s;
}

}  // namespace shgs
