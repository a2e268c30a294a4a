#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/network.hpp"

namespace shgs {

enum class OptimizerKind { sgd, adam, adagrad, nadam, adamax };

inline const char* to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::adam: return "adam";
        case OptimizerKind::adagrad: return "adagrad";
        case OptimizerKind::nadam: return "nadam";
        case OptimizerKind::adamax: return "adamax";
    }
    return "?";
}

inline OptimizerKind parse_optimizer(const std::string& s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "adam") return OptimizerKind::adam;
    if (s == "adagrad") return OptimizerKind::adagrad;
    if (s == "nadam") return OptimizerKind::nadam;
    if (s == "adamax") return OptimizerKind::adamax;
    throw usage_error("unknown optimizer: " + s);
}

// Learning rate after the per-epoch decay schedule.
inline double effective_lr(double base_lr, double decay, long epoch) {
    return base_lr / (1.0 + decay * static_cast<double>(epoch));
}

// Per-parameter slots for one training run. slot1 holds the SGD velocity
// or the first moment, slot2 the squared-gradient accumulator, second
// moment, or infinity norm, depending on the kind.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::sgd;
    double base_lr = 0.01;
    double decay = 0.0;
    double momentum = 0.0;  // consulted only when kind == sgd
    long step_count = 0;

    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-7;

    std::vector<Eigen::MatrixXd> w_slot1, w_slot2;
    std::vector<Eigen::VectorXd> b_slot1, b_slot2;

    static OptimizerState create(OptimizerKind kind, const NetworkParameters& shapes,
                                 double base_lr, double decay, double momentum) {
        OptimizerState s;
        s.kind = kind;
        s.base_lr = base_lr;
        s.decay = decay;
        s.momentum = momentum;
        for (const auto& w : shapes.weights) {
            s.w_slot1.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
            s.w_slot2.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        }
        for (const auto& b : shapes.biases) {
            s.b_slot1.emplace_back(Eigen::VectorXd::Zero(b.size()));
            s.b_slot2.emplace_back(Eigen::VectorXd::Zero(b.size()));
        }
        return s;
    }
};

namespace detail {

template <class Param, class Grad, class Slot>
void update_one(OptimizerState& st, double lr, Param& p, const Grad& g, Slot& s1, Slot& s2) {
    const double b1 = OptimizerState::beta1;
    const double b2 = OptimizerState::beta2;
    const double eps = OptimizerState::epsilon;
    const double t = static_cast<double>(st.step_count);
    switch (st.kind) {
        case OptimizerKind::sgd:
            s1 = st.momentum * s1 - lr * g;
            p += s1;
            break;
        case OptimizerKind::adagrad:
            s2.array() += g.array().square();
            p.array() -= lr * g.array() / (s2.array().sqrt() + eps);
            break;
        case OptimizerKind::adam: {
            s1 = b1 * s1 + (1.0 - b1) * g;
            s2.array() = b2 * s2.array() + (1.0 - b2) * g.array().square();
            const double c1 = 1.0 - std::pow(b1, t);
            const double c2 = 1.0 - std::pow(b2, t);
            p.array() -= lr * (s1.array() / c1) / ((s2.array() / c2).sqrt() + eps);
            break;
        }
        case OptimizerKind::adamax: {
            s1 = b1 * s1 + (1.0 - b1) * g;
            s2.array() = (b2 * s2.array()).max(g.array().abs());
            const double c1 = 1.0 - std::pow(b1, t);
            p.array() -= (lr / c1) * s1.array() / (s2.array() + eps);
            break;
        }
        case OptimizerKind::nadam: {
            s1 = b1 * s1 + (1.0 - b1) * g;
            s2.array() = b2 * s2.array() + (1.0 - b2) * g.array().square();
            const double c1 = 1.0 - std::pow(b1, t);
            const double c2 = 1.0 - std::pow(b2, t);
            p.array() -= lr * (b1 * s1.array() / c1 + (1.0 - b1) * g.array() / c1) /
                         ((s2.array() / c2).sqrt() + eps);
            break;
        }
    }
}

}  // namespace detail

// One optimizer step. The step counter increments first, so the bias
// corrections of adam/nadam/adamax see t = 1 on the first update. The
// epoch index drives the decay schedule.
inline void apply_update(OptimizerState& state, NetworkParameters& params, const Gradients& grads,
                         long epoch) {
    if (params.weights.size() != grads.weights.size())
        throw std::invalid_argument("apply_update: parameter/gradient shape mismatch");
    ++state.step_count;
    const double lr = effective_lr(state.base_lr, state.decay, epoch);
    for (std::size_t i = 0; i < params.weights.size(); ++i)
        detail::update_one(state, lr, params.weights[i], grads.weights[i], state.w_slot1[i],
                           state.w_slot2[i]);
    for (std::size_t i = 0; i < params.biases.size(); ++i)
        detail::update_one(state, lr, params.biases[i], grads.biases[i], state.b_slot1[i],
                           state.b_slot2[i]);
}

}  // namespace shgs
