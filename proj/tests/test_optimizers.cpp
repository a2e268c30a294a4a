#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "shgs/optimizer.hpp"

using namespace shgs;

namespace {

// single 1x1 weight, no biases: a scalar parameter for hand traces
NetworkParameters scalar_param(double w0) {
    NetworkParameters p;
    p.weights.push_back(Eigen::MatrixXd::Constant(1, 1, w0));
    p.biases.push_back(Eigen::VectorXd::Zero(0));
    return p;
}

Gradients scalar_grad(double g) {
    Gradients gr;
    gr.weights.push_back(Eigen::MatrixXd::Constant(1, 1, g));
    gr.biases.push_back(Eigen::VectorXd::Zero(0));
    return gr;
}

double step(OptimizerState& st, NetworkParameters& p, double g, long epoch = 0) {
    apply_update(st, p, scalar_grad(g), epoch);
    return p.weights[0](0, 0);
}

}  // namespace

TEST_CASE("effective_lr decays per epoch") {
    REQUIRE(effective_lr(0.05, 0.0, 0) == 0.05);
    REQUIRE(effective_lr(0.05, 0.0, 500) == 0.05);
    REQUIRE(effective_lr(0.1, 0.1, 0) == 0.1);
    REQUIRE(effective_lr(0.1, 0.1, 1) == Catch::Approx(0.09090909090909091).epsilon(1e-14));
    double prev = 1e9;
    for (long e = 0; e < 50; ++e) {
        const double lr = effective_lr(0.2, 0.03, e);
        REQUIRE(lr <= prev);
        prev = lr;
    }
}

TEST_CASE("plain sgd is exactly minus lr times gradient") {
    auto p = scalar_param(1.0);
    auto st = OptimizerState::create(OptimizerKind::sgd, p, 0.1, 0.0, 0.0);
    REQUIRE(step(st, p, 0.5) == 0.95);
    REQUIRE(st.step_count == 1);
}

TEST_CASE("sgd momentum accumulates velocity") {
    auto p = scalar_param(1.0);
    auto st = OptimizerState::create(OptimizerKind::sgd, p, 0.1, 0.0, 0.9);
    REQUIRE(step(st, p, 1.0) == Catch::Approx(0.9).margin(1e-12));
    REQUIRE(st.w_slot1[0](0, 0) == Catch::Approx(-0.1).margin(1e-12));
    REQUIRE(step(st, p, 1.0) == Catch::Approx(0.71).margin(1e-12));
    REQUIRE(st.w_slot1[0](0, 0) == Catch::Approx(-0.19).margin(1e-12));
}

TEST_CASE("adam first step follows the closed form") {
    auto p = scalar_param(1.0);
    auto st = OptimizerState::create(OptimizerKind::adam, p, 0.001, 0.0, 0.0);
    // t=1: m_hat = g, v_hat = g^2 -> delta = -lr*g/(|g|+eps)
    REQUIRE(step(st, p, 1.0) == Catch::Approx(1.0 - 0.001 / (1.0 + 1e-7)).epsilon(1e-12));
}

TEST_CASE("hand recurrences for the adaptive optimizers") {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-7;

    SECTION("adagrad") {
        auto p = scalar_param(1.0);
        auto st = OptimizerState::create(OptimizerKind::adagrad, p, 0.1, 0.0, 0.0);
        double a = 0.0, w = 1.0;
        for (int t = 1; t <= 3; ++t) {
            a += 1.0;
            w -= 0.1 / (std::sqrt(a) + eps);
            REQUIRE(step(st, p, 1.0) == Catch::Approx(w).margin(1e-10));
        }
        REQUIRE(p.weights[0](0, 0) == Catch::Approx(0.8292893368813439 - 0.1 / (std::sqrt(3.0) + eps))
                                          .margin(1e-10));
    }

    SECTION("adam") {
        auto p = scalar_param(1.0);
        auto st = OptimizerState::create(OptimizerKind::adam, p, 0.001, 0.0, 0.0);
        double m = 0.0, v = 0.0, w = 1.0;
        for (int t = 1; t <= 3; ++t) {
            m = b1 * m + (1 - b1) * 1.0;
            v = b2 * v + (1 - b2) * 1.0;
            const double mh = m / (1 - std::pow(b1, t));
            const double vh = v / (1 - std::pow(b2, t));
            w -= 0.001 * mh / (std::sqrt(vh) + eps);
            REQUIRE(step(st, p, 1.0) == Catch::Approx(w).margin(1e-10));
        }
        REQUIRE(p.weights[0](0, 0) == Catch::Approx(0.9970000003).margin(1e-9));
    }

    SECTION("adamax") {
        auto p = scalar_param(1.0);
        auto st = OptimizerState::create(OptimizerKind::adamax, p, 0.001, 0.0, 0.0);
        double m = 0.0, u = 0.0, w = 1.0;
        for (int t = 1; t <= 3; ++t) {
            m = b1 * m + (1 - b1) * 1.0;
            u = std::max(b2 * u, 1.0);
            w -= (0.001 / (1 - std::pow(b1, t))) * m / (u + eps);
            REQUIRE(step(st, p, 1.0) == Catch::Approx(w).margin(1e-10));
        }
    }

    SECTION("nadam") {
        auto p = scalar_param(1.0);
        auto st = OptimizerState::create(OptimizerKind::nadam, p, 0.001, 0.0, 0.0);
        double m = 0.0, v = 0.0, w = 1.0;
        for (int t = 1; t <= 3; ++t) {
            m = b1 * m + (1 - b1) * 1.0;
            v = b2 * v + (1 - b2) * 1.0;
            const double c1 = 1 - std::pow(b1, t);
            const double vh = v / (1 - std::pow(b2, t));
            w -= 0.001 * (b1 * m / c1 + (1 - b1) * 1.0 / c1) / (std::sqrt(vh) + eps);
            REQUIRE(step(st, p, 1.0) == Catch::Approx(w).margin(1e-10));
        }
        REQUIRE(p.weights[0](0, 0) < 1.0 - 2 * 0.001);  // overshoots adam's trajectory
    }
}

TEST_CASE("updates oppose a constant-sign gradient") {
    for (auto kind : {OptimizerKind::adam, OptimizerKind::adagrad, OptimizerKind::adamax,
                      OptimizerKind::nadam}) {
        for (double g : {0.7, -0.7}) {
            auto p = scalar_param(0.0);
            auto st = OptimizerState::create(kind, p, 0.01, 0.0, 0.0);
            double prev = 0.0;
            for (int t = 0; t < 10; ++t) {
                const double w = step(st, p, g);
                REQUIRE((g > 0 ? w < prev : w > prev));
                prev = w;
            }
        }
    }
}

TEST_CASE("momentum has no effect outside sgd") {
    for (auto kind : {OptimizerKind::adam, OptimizerKind::adagrad, OptimizerKind::adamax,
                      OptimizerKind::nadam}) {
        auto p1 = scalar_param(0.3);
        auto p2 = scalar_param(0.3);
        auto st1 = OptimizerState::create(kind, p1, 0.01, 0.0, 0.0);
        auto st2 = OptimizerState::create(kind, p2, 0.01, 0.0, 0.9);
        for (int t = 0; t < 5; ++t) {
            step(st1, p1, 0.4);
            step(st2, p2, 0.4);
            REQUIRE(p1.weights[0](0, 0) == p2.weights[0](0, 0));  // bit-identical
        }
    }
}

TEST_CASE("decay enters through the epoch index") {
    auto p1 = scalar_param(1.0);
    auto st1 = OptimizerState::create(OptimizerKind::sgd, p1, 0.1, 0.5, 0.0);
    REQUIRE(step(st1, p1, 1.0, 0) == Catch::Approx(0.9).margin(1e-15));    // epoch 0: full lr
    REQUIRE(step(st1, p1, 1.0, 1) == Catch::Approx(0.9 - 0.1 / 1.5).margin(1e-15));
}

TEST_CASE("shape mismatch is rejected") {
    auto p = scalar_param(1.0);
    auto st = OptimizerState::create(OptimizerKind::sgd, p, 0.1, 0.0, 0.0);
    Gradients bad;
    REQUIRE_THROWS_AS(apply_update(st, p, bad, 0), std::invalid_argument);
}
