#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "shgs/network.hpp"
#include "testutil.hpp"

using namespace shgs;

namespace {

NetworkArchitecture small_arch(Activation in_act, Activation hid_act, int input_dim = 2,
                               int layers = 2, int nodes = 2) {
    NetworkArchitecture arch;
    arch.input_dim = input_dim;
    arch.hidden_layer_count = layers;
    arch.hidden_nodes = nodes;
    arch.input_activation = in_act;
    arch.hidden_activation = hid_act;
    return arch;
}

// keeps gradient checks away from relu/|w| kinks and sigmoid saturation
void jitter(NetworkParameters& params, std::uint64_t seed) {
    rng_t rng(seed);
    std::uniform_real_distribution<double> dist(-0.25, 0.25);
    for (auto& w : params.weights)
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) += dist(rng);
    for (auto& b : params.biases)
        for (Eigen::Index r = 0; r < b.size(); ++r) b(r) += dist(rng);
}

}  // namespace

TEST_CASE("weight shapes follow the layer chain") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 18, 2, 8);
    const auto params = initialize(arch, Initializer::glorot_uniform, 1);
    REQUIRE(params.weights.size() == 3);
    REQUIRE(params.weights[0].rows() == 18);
    REQUIRE(params.weights[0].cols() == 8);
    REQUIRE(params.weights[1].rows() == 8);
    REQUIRE(params.weights[1].cols() == 8);
    REQUIRE(params.weights[2].rows() == 8);
    REQUIRE(params.weights[2].cols() == 2);
    for (const auto& b : params.biases) REQUIRE(b.isZero());
}

TEST_CASE("constant initializer is all zeros") {
    const auto params = initialize(small_arch(Activation::relu, Activation::relu), Initializer::constant, 5);
    for (const auto& w : params.weights) REQUIRE(w.isZero());
}

TEST_CASE("glorot_uniform respects its bound and centers on zero") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 4, 1, 6);
    const double limit = std::sqrt(6.0 / 10.0);  // fan_in 4, fan_out 6
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto params = initialize(arch, Initializer::glorot_uniform, seed);
        const auto& w = params.weights[0];
        REQUIRE(w.array().abs().maxCoeff() <= limit);
        sum += w.sum();
        count += static_cast<int>(w.size());
    }
    REQUIRE(std::abs(sum / count) < 0.02);  // 3 sigma for 4800 uniform draws
}

TEST_CASE("he_uniform bound and normal sigmas") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 100, 1, 100);
    const auto he_u = initialize(arch, Initializer::he_uniform, 3);
    REQUIRE(he_u.weights[0].array().abs().maxCoeff() <= std::sqrt(6.0 / 100.0));

    for (auto [init, expected] :
         {std::pair{Initializer::he_normal, std::sqrt(2.0 / 100.0)},
          std::pair{Initializer::glorot_normal, std::sqrt(2.0 / 200.0)}}) {
        const auto params = initialize(arch, init, 4);
        const auto& w = params.weights[0];
        const double sd = std::sqrt(w.array().square().mean());
        REQUIRE(std::abs(sd - expected) / expected < 0.1);
    }
}

TEST_CASE("initialization is bit-identical per seed") {
    const auto arch = small_arch(Activation::tanh, Activation::sigmoid, 7, 3, 5);
    for (auto init : {Initializer::glorot_normal, Initializer::he_uniform}) {
        const auto a = initialize(arch, init, 123);
        const auto b = initialize(arch, init, 123);
        for (std::size_t l = 0; l < a.weights.size(); ++l)
            REQUIRE(a.weights[l] == b.weights[l]);
    }
}

TEST_CASE("zero parameters output one half everywhere") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 3, 2, 4);
    const auto params = initialize(arch, Initializer::constant, 0);
    const auto cache = forward(arch, params, Eigen::MatrixXd::Random(6, 3));
    REQUIRE((cache.output().array() == 0.5).all());
}

TEST_CASE("a relu unit clips negative input") {
    auto arch = small_arch(Activation::relu, Activation::relu, 1, 1, 1);
    auto params = initialize(arch, Initializer::constant, 0);
    params.weights[0](0, 0) = 1.0;
    Eigen::MatrixXd x(1, 1);
    x << -2.0;
    const auto cache = forward(arch, params, x);
    REQUIRE(cache.activations[0](0, 0) == 0.0);
}

TEST_CASE("softmax rows are normalized") {
    const auto arch = small_arch(Activation::softmax, Activation::softmax, 5, 2, 7);
    const auto params = initialize(arch, Initializer::glorot_normal, 9);
    const auto cache = forward(arch, params, Eigen::MatrixXd::Random(11, 5));
    for (int l = 0; l < 2; ++l)
        for (Eigen::Index r = 0; r < 11; ++r)
            REQUIRE(std::abs(cache.activations[static_cast<std::size_t>(l)].row(r).sum() - 1.0) <
                    1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 3, 1, 2);
    const auto params = initialize(arch, Initializer::constant, 0);
    REQUIRE_THROWS_AS(forward(arch, params, Eigen::MatrixXd::Random(4, 5)),
                      std::invalid_argument);
}

TEST_CASE("uninformative outputs cost ln 2") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 2, 1, 2);
    const auto params = initialize(arch, Initializer::constant, 0);
    const auto cache = forward(arch, params, Eigen::MatrixXd::Random(8, 2));
    const double l = loss(cache.output(), std::vector<int>(8, 1), params, 0.0, 0.0);
    REQUIRE(std::abs(l - std::log(2.0)) < 1e-12);
}

TEST_CASE("near-perfect prediction costs almost nothing") {
    NetworkParameters params;  // empty: no penalty contribution
    Eigen::MatrixXd outputs(1, 2);
    outputs << 1.0 - 1e-9, 1e-9;
    REQUIRE(loss(outputs, {1}, params, 0.0, 0.0) < 1e-6);
}

TEST_CASE("regularization penalties follow their formulas") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 1, 1, 1);
    auto params = initialize(arch, Initializer::constant, 0);
    params.weights[0](0, 0) = 0.5;
    Eigen::MatrixXd outputs(1, 2);
    outputs << 0.5, 0.5;
    const double base = loss(outputs, {1}, params, 0.0, 0.0);
    REQUIRE(loss(outputs, {1}, params, 0.0, 0.1) - base == Catch::Approx(0.025).margin(1e-15));
    REQUIRE(loss(outputs, {1}, params, 0.1, 0.0) - base == Catch::Approx(0.05).margin(1e-15));
}

TEST_CASE("saturated correct predictions have vanishing data gradient") {
    // p matches y to ~1e-13, so every data-term gradient entry vanishes
    auto arch = small_arch(Activation::tanh, Activation::tanh, 1, 1, 1);
    auto params = initialize(arch, Initializer::constant, 0);
    params.weights[0](0, 0) = 30.0;
    params.weights[1](0, 0) = 30.0;
    params.weights[1](0, 1) = -30.0;
    Eigen::MatrixXd x(2, 1);
    x << 1.0, -1.0;
    const std::vector<int> y{1, 0};
    const auto cache = forward(arch, params, x);
    const auto grads = backward(arch, params, cache, y, nullptr, 0.0, 0.0);
    for (const auto& g : grads.weights) REQUIRE(g.array().abs().maxCoeff() < 1e-12);
    for (const auto& g : grads.biases) REQUIRE(g.array().abs().maxCoeff() < 1e-12);
}

TEST_CASE("penalty gradients add onto the data gradient") {
    const auto arch = small_arch(Activation::sigmoid, Activation::sigmoid, 2, 1, 2);
    auto params = initialize(arch, Initializer::glorot_uniform, 17);
    params.weights[0](0, 0) = 0.5;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);
    const std::vector<int> y{1, 0, 1, 0, 1};
    const auto cache = forward(arch, params, x);
    const auto plain = backward(arch, params, cache, y, nullptr, 0.0, 0.0);
    const auto with_l2 = backward(arch, params, cache, y, nullptr, 0.0, 0.1);
    const auto with_l1 = backward(arch, params, cache, y, nullptr, 0.1, 0.0);
    REQUIRE(with_l2.weights[0](0, 0) - plain.weights[0](0, 0) ==
            Catch::Approx(2.0 * 0.1 * 0.5).margin(1e-15));
    REQUIRE(with_l1.weights[0](0, 0) - plain.weights[0](0, 0) ==
            Catch::Approx(0.1).margin(1e-15));
    // biases are unpenalized
    REQUIRE(with_l2.biases[0] == plain.biases[0]);
}

TEST_CASE("analytic gradients match finite differences") {
    const Activation acts[] = {Activation::relu, Activation::sigmoid, Activation::softmax,
                               Activation::tanh};
    std::uint64_t seed = 1000;
    for (auto in_act : acts) {
        for (auto hid_act : acts) {
            for (auto [l1, l2] : {std::pair{0.0, 0.0}, std::pair{0.01, 0.0},
                                  std::pair{0.0, 0.01}, std::pair{0.01, 0.01}}) {
                for (double p : {0.0, 0.3}) {
                    ++seed;
                    const auto arch = small_arch(in_act, hid_act, 2, 2, 2);
                    auto params = initialize(arch, Initializer::glorot_uniform, seed);
                    jitter(params, seed * 31);
                    rng_t rng(seed * 7);
                    std::uniform_real_distribution<double> dist(-1.0, 1.0);
                    Eigen::MatrixXd x(3, 2);
                    for (Eigen::Index r = 0; r < x.rows(); ++r)
                        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = dist(rng);
                    const std::vector<int> y{1, 0, 1};
                    DropoutMask masks;
                    if (p > 0.0) masks = sample_masks(arch, p, rng);
                    const double err = testutil::max_gradient_rel_error(
                        arch, params, x, y, p > 0.0 ? &masks : nullptr, l1, l2);
                    INFO("in=" << to_string(in_act) << " hid=" << to_string(hid_act)
                               << " l1=" << l1 << " l2=" << l2 << " p=" << p);
                    REQUIRE(err < 1e-4);
                }
            }
        }
    }
}

TEST_CASE("prediction reads the positive unit and ignores dropout") {
    const auto arch = small_arch(Activation::sigmoid, Activation::tanh, 3, 2, 4);
    const auto params = initialize(arch, Initializer::he_normal, 21);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(9, 3);
    const auto scores = predict(arch, params, x);
    const auto cache = forward(arch, params, x);  // no masks at prediction time
    REQUIRE(scores == cache.output().col(0));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        REQUIRE(scores(i) > 0.0);
        REQUIRE(scores(i) < 1.0);
    }

    const auto zeros = initialize(arch, Initializer::constant, 0);
    REQUIRE((predict(arch, zeros, x).array() == 0.5).all());
}

TEST_CASE("dropout masks scale kept units by 1/(1-p)") {
    const auto arch = small_arch(Activation::relu, Activation::relu, 2, 2, 50);
    rng_t rng(5);
    const auto none = sample_masks(arch, 0.0, rng);
    for (const auto& m : none.layer_masks) REQUIRE((m.array() == 1.0).all());

    const auto half = sample_masks(arch, 0.5, rng);
    for (const auto& m : half.layer_masks)
        for (Eigen::Index i = 0; i < m.size(); ++i) REQUIRE((m(i) == 0.0 || m(i) == 2.0));

    REQUIRE_THROWS_AS(sample_masks(arch, 0.95, rng), std::invalid_argument);
}

TEST_CASE("empirical keep rate approaches 1-p") {
    NetworkArchitecture arch;
    arch.input_dim = 1;
    arch.hidden_layer_count = 1;
    arch.hidden_nodes = 100;
    rng_t rng(6);
    for (double p : {0.2, 0.5, 0.9}) {
        std::size_t kept = 0, total = 0;
        for (int draw = 0; draw < 1000; ++draw) {  // 100k unit decisions
            const auto mask = sample_masks(arch, p, rng);
            for (Eigen::Index i = 0; i < mask.layer_masks[0].size(); ++i)
                kept += (mask.layer_masks[0](i) != 0.0);
            total += 100;
        }
        REQUIRE(std::abs(static_cast<double>(kept) / static_cast<double>(total) - (1.0 - p)) <
                0.01);
    }
}

TEST_CASE("inverted dropout is unbiased in expectation") {
    // E[mask * a] = a; check the Monte-Carlo mean within 3 sigma
    const auto arch = small_arch(Activation::sigmoid, Activation::sigmoid, 2, 1, 4);
    const auto params = initialize(arch, Initializer::glorot_uniform, 33);
    Eigen::MatrixXd x(1, 2);
    x << 0.7, -0.4;
    const auto plain = forward(arch, params, x).activations[0];

    const double p = 0.3;
    const int n_draws = 10000;
    rng_t rng(34);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(1, 4);
    for (int i = 0; i < n_draws; ++i) {
        const auto masks = sample_masks(arch, p, rng);
        // layer_inputs[1] is the masked hidden activation actually fed onward
        mean += forward(arch, params, x, &masks).layer_inputs[1];
    }
    mean /= n_draws;
    const double sigma = std::sqrt(p / (1.0 - p) / n_draws);  // per-entry, relative to a
    for (Eigen::Index c = 0; c < 4; ++c)
        REQUIRE(std::abs(mean(0, c) - plain(0, c)) <= 3.0 * sigma * std::abs(plain(0, c)) + 1e-12);
}

TEST_CASE("forward and backward preserve parameter shapes") {
    const auto arch = small_arch(Activation::tanh, Activation::relu, 4, 3, 5);
    const auto params = initialize(arch, Initializer::he_uniform, 55);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 4);
    const std::vector<int> y{1, 0, 1, 0, 1, 0};
    const auto cache = forward(arch, params, x);
    const auto grads = backward(arch, params, cache, y, nullptr, 0.01, 0.01);
    REQUIRE(grads.weights.size() == params.weights.size());
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        REQUIRE(grads.weights[l].rows() == params.weights[l].rows());
        REQUIRE(grads.weights[l].cols() == params.weights[l].cols());
        REQUIRE(grads.biases[l].size() == params.biases[l].size());
    }
}
