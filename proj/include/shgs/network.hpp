#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "shgs/common.hpp"

namespace shgs {

enum class Activation { relu, sigmoid, softmax, tanh };
enum class Initializer { constant, glorot_normal, glorot_uniform, he_normal, he_uniform };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::softmax: return "softmax";
        case Activation::tanh: return "tanh";
    }
    return "?";
}

inline const char* to_string(Initializer i) {
    switch (i) {
        case Initializer::constant: return "constant";
        case Initializer::glorot_normal: return "glorot_normal";
        case Initializer::glorot_uniform: return "glorot_uniform";
        case Initializer::he_normal: return "he_normal";
        case Initializer::he_uniform: return "he_uniform";
    }
    return "?";
}

inline Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "softmax") return Activation::softmax;
    if (s == "tanh") return Activation::tanh;
    throw usage_error("unknown activation: " + s);
}

inline Initializer parse_initializer(const std::string& s) {
    if (s == "constant") return Initializer::constant;
    if (s == "glorot_normal") return Initializer::glorot_normal;
    if (s == "glorot_uniform") return Initializer::glorot_uniform;
    if (s == "he_normal") return Initializer::he_normal;
    if (s == "he_uniform") return Initializer::he_uniform;
    throw usage_error("unknown initializer: " + s);
}

// Dense feed-forward binary classifier: 1-4 hidden layers of equal width,
// a 2-unit sigmoid output (unit 0 scores the positive class). The first
// hidden layer uses input_activation, the remaining hidden layers
// hidden_activation.
struct NetworkArchitecture {
    int input_dim = 0;
    int hidden_layer_count = 1;  // 1..4
    int hidden_nodes = 1;
    Activation input_activation = Activation::relu;
    Activation hidden_activation = Activation::relu;
    static constexpr int output_dim = 2;

    void validate() const {
        if (input_dim < 1) throw std::invalid_argument("architecture: input_dim must be >= 1");
        if (hidden_layer_count < 1 || hidden_layer_count > 4)
            throw std::invalid_argument("architecture: hidden_layer_count must be in 1..4");
        if (hidden_nodes < 1) throw std::invalid_argument("architecture: hidden_nodes must be >= 1");
    }

    // [input_dim, hidden..., 2]
    std::vector<int> layer_dims() const {
        std::vector<int> dims{input_dim};
        dims.insert(dims.end(), static_cast<std::size_t>(hidden_layer_count), hidden_nodes);
        dims.push_back(output_dim);
        return dims;
    }

    int layer_count() const { return hidden_layer_count + 1; }

    Activation activation_of(int layer) const {
        if (layer == 0) return input_activation;
        return hidden_activation;  // output layer handled separately
    }
};

// Weight matrices are fan_in x fan_out; activations are row vectors, so a
// layer computes X * W + b.
struct NetworkParameters {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    std::size_t layer_count() const { return weights.size(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
        for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
        return n;
    }

    bool all_finite() const {
        for (const auto& w : weights)
            if (!w.allFinite()) return false;
        for (const auto& b : biases)
            if (!b.allFinite()) return false;
        return true;
    }
};

using Gradients = NetworkParameters;

// Inverted dropout: per hidden layer one unit mask, entries 0 (dropped) or
// 1/(1-p) (kept), shared by every sample of the batch.
struct DropoutMask {
    double rate = 0.0;
    std::vector<Eigen::VectorXd> layer_masks;  // one per hidden layer
};

inline NetworkParameters initialize(const NetworkArchitecture& arch, Initializer init,
                                    std::uint64_t seed) {
    arch.validate();
    const auto dims = arch.layer_dims();
    NetworkParameters params;
    rng_t rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        Eigen::MatrixXd w(fan_in, fan_out);
        switch (init) {
            case Initializer::constant:
                w.setZero();
                break;
            case Initializer::glorot_uniform: {
                const double limit = std::sqrt(6.0 / (fan_in + fan_out));
                std::uniform_real_distribution<double> dist(-limit, limit);
                for (int r = 0; r < fan_in; ++r)
                    for (int c = 0; c < fan_out; ++c) w(r, c) = dist(rng);
                break;
            }
            case Initializer::glorot_normal: {
                std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (fan_in + fan_out)));
                for (int r = 0; r < fan_in; ++r)
                    for (int c = 0; c < fan_out; ++c) w(r, c) = dist(rng);
                break;
            }
            case Initializer::he_uniform: {
                const double limit = std::sqrt(6.0 / fan_in);
                std::uniform_real_distribution<double> dist(-limit, limit);
                for (int r = 0; r < fan_in; ++r)
                    for (int c = 0; c < fan_out; ++c) w(r, c) = dist(rng);
                break;
            }
            case Initializer::he_normal: {
                std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
                for (int r = 0; r < fan_in; ++r)
                    for (int c = 0; c < fan_out; ++c) w(r, c) = dist(rng);
                break;
            }
        }
        params.weights.push_back(std::move(w));
        params.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return params;
}

// Each hidden unit kept independently with probability 1-p; kept entries
// carry the 1/(1-p) inverted-dropout scale.
inline DropoutMask sample_masks(const NetworkArchitecture& arch, double p, rng_t& rng) {
    if (p < 0.0 || p > 0.9) throw std::invalid_argument("dropout rate must lie in [0, 0.9]");
    DropoutMask mask;
    mask.rate = p;
    const double keep_scale = 1.0 / (1.0 - p);
    std::bernoulli_distribution keep(1.0 - p);
    for (int l = 0; l < arch.hidden_layer_count; ++l) {
        Eigen::VectorXd m(arch.hidden_nodes);
        for (int u = 0; u < arch.hidden_nodes; ++u) m(u) = keep(rng) ? keep_scale : 0.0;
        mask.layer_masks.push_back(std::move(m));
    }
    return mask;
}

namespace detail {

inline Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
    switch (act) {
        case Activation::relu:
            return z.cwiseMax(0.0);
        case Activation::sigmoid:
            return ((-z.array()).exp() + 1.0).inverse().matrix();
        case Activation::tanh:
            return z.array().tanh().matrix();
        case Activation::softmax: {
            // row-wise, shifted by the row max for stability
            Eigen::ArrayXXd shifted =
                z.array().colwise() - z.array().rowwise().maxCoeff();
            Eigen::ArrayXXd e = shifted.exp();
            return (e.colwise() / e.rowwise().sum()).matrix();
        }
    }
    return z;
}

// dL/dz from dL/da, using the cached (pre-mask) activation values.
inline Eigen::MatrixXd activation_backward(const Eigen::MatrixXd& grad_a,
                                           const Eigen::MatrixXd& a, Activation act) {
    switch (act) {
        case Activation::relu:
            return (a.array() > 0.0).cast<double>().matrix().cwiseProduct(grad_a);
        case Activation::sigmoid:
            return (a.array() * (1.0 - a.array()) * grad_a.array()).matrix();
        case Activation::tanh:
            return ((1.0 - a.array().square()) * grad_a.array()).matrix();
        case Activation::softmax: {
            // dL/dz_k = a_k * (g_k - sum_j g_j a_j), row-wise
            Eigen::ArrayXd dot = (grad_a.array() * a.array()).rowwise().sum();
            return (a.array() * (grad_a.array().colwise() - dot)).matrix();
        }
    }
    return grad_a;
}

inline Eigen::MatrixXd one_hot_targets(const std::vector<int>& labels) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(labels.size()), 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y(static_cast<Eigen::Index>(i), 0) = labels[i] ? 1.0 : 0.0;
        y(static_cast<Eigen::Index>(i), 1) = labels[i] ? 0.0 : 1.0;
    }
    return y;
}

}  // namespace detail

// Everything backward() needs: per layer its input matrix and its pre-mask
// activation output. layer_inputs[l] already carries the previous layer's
// mask, so it is the exact matrix the weights multiplied.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> layer_inputs;  // one per layer
    std::vector<Eigen::MatrixXd> activations;   // pre-mask output per layer

    const Eigen::MatrixXd& output() const { return activations.back(); }
};

inline ForwardCache forward(const NetworkArchitecture& arch, const NetworkParameters& params,
                            const Eigen::MatrixXd& batch, const DropoutMask* masks = nullptr) {
    if (batch.cols() != arch.input_dim)
        throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols()) +
                                    " columns, expected " + std::to_string(arch.input_dim));
    const int layers = arch.layer_count();
    ForwardCache cache;
    cache.layer_inputs.reserve(static_cast<std::size_t>(layers));
    cache.activations.reserve(static_cast<std::size_t>(layers));

    Eigen::MatrixXd x = batch;
    for (int l = 0; l < layers; ++l) {
        cache.layer_inputs.push_back(x);
        Eigen::MatrixXd z =
            (x * params.weights[static_cast<std::size_t>(l)]).rowwise() +
            params.biases[static_cast<std::size_t>(l)].transpose();
        const bool is_output = (l == layers - 1);
        Eigen::MatrixXd a =
            detail::apply_activation(z, is_output ? Activation::sigmoid : arch.activation_of(l));
        cache.activations.push_back(a);
        if (!is_output && masks != nullptr)
            a = (a.array().rowwise() *
                 masks->layer_masks[static_cast<std::size_t>(l)].transpose().array())
                    .matrix();
        x = std::move(a);
    }
    return cache;
}

// Mean binary cross-entropy over samples and both output units, with
// one-hot targets (y_pos = label, y_neg = 1-label), plus l1*sum|W| +
// l2*sum W^2 over the weight matrices. Probabilities are clipped to
// [1e-7, 1-1e-7] so the logs stay finite.
inline double loss(const Eigen::MatrixXd& outputs, const std::vector<int>& labels,
                   const NetworkParameters& params, double l1, double l2) {
    constexpr double clip = 1e-7;
    const Eigen::MatrixXd y = detail::one_hot_targets(labels);
    Eigen::ArrayXXd p = outputs.array().min(1.0 - clip).max(clip);
    const double data_term =
        -(y.array() * p.log() + (1.0 - y.array()) * (1.0 - p).log()).mean();

    double penalty = 0.0;
    for (const auto& w : params.weights) {
        if (l1 != 0.0) penalty += l1 * w.array().abs().sum();
        if (l2 != 0.0) penalty += l2 * w.array().square().sum();
    }
    return data_term + penalty;
}

// Exact gradient of loss(): output delta (p - y)/(2n) through the sigmoid
// units, masks replayed on the hidden layers, sign(0) = 0 for the l1 term.
inline Gradients backward(const NetworkArchitecture& arch, const NetworkParameters& params,
                          const ForwardCache& cache, const std::vector<int>& labels,
                          const DropoutMask* masks, double l1, double l2) {
    const int layers = arch.layer_count();
    if (cache.layer_inputs.size() != static_cast<std::size_t>(layers))
        throw std::invalid_argument("backward: cache does not match architecture");
    const auto n = cache.output().rows();
    if (n != static_cast<Eigen::Index>(labels.size()))
        throw std::invalid_argument("backward: cache/labels size mismatch");

    Gradients grads;
    grads.weights.resize(static_cast<std::size_t>(layers));
    grads.biases.resize(static_cast<std::size_t>(layers));

    const Eigen::MatrixXd y = detail::one_hot_targets(labels);
    Eigen::MatrixXd delta =
        (cache.output() - y) / (2.0 * static_cast<double>(n));  // dL/dz of the output layer

    for (int l = layers - 1; l >= 0; --l) {
        const auto lu = static_cast<std::size_t>(l);
        Eigen::MatrixXd gw = cache.layer_inputs[lu].transpose() * delta;
        if (l1 != 0.0) gw += l1 * params.weights[lu].array().sign().matrix();
        if (l2 != 0.0) gw += 2.0 * l2 * params.weights[lu];
        grads.weights[lu] = std::move(gw);
        grads.biases[lu] = delta.colwise().sum().transpose();

        if (l == 0) break;
        Eigen::MatrixXd grad_a = delta * params.weights[lu].transpose();
        if (masks != nullptr)
            grad_a = (grad_a.array().rowwise() *
                      masks->layer_masks[lu - 1].transpose().array())
                         .matrix();
        delta = detail::activation_backward(grad_a, cache.activations[lu - 1],
                                            arch.activation_of(l - 1));
    }
    return grads;
}

// Positive-class scores; dropout is never applied at prediction time.
inline Eigen::VectorXd predict(const NetworkArchitecture& arch, const NetworkParameters& params,
                               const Eigen::MatrixXd& features) {
    return forward(arch, params, features).output().col(0);
}

inline std::vector<double> predict_vector(const NetworkArchitecture& arch,
                                          const NetworkParameters& params,
                                          const Eigen::MatrixXd& features) {
    const Eigen::VectorXd s = predict(arch, params, features);
    return std::vector<double>(s.data(), s.data() + s.size());
}

}  // namespace shgs
