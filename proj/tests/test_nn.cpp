#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "streamlink/error.hpp"
#include "streamlink/nn.hpp"

using namespace streamlink;

namespace {

/// One scalar weight; loss w^2.
struct Scalar {
    Mat w = Mat::Constant(1, 1, 1.0);

    template <class F>
    void visit(F&& f) {
        f("w", w);
    }
    template <class F>
    void visit(F&& f) const {
        f("w", w);
    }
};

std::vector<LossTerm> square(const Scalar& m, Scalar& grad) {
    const double w = m.w(0, 0);
    grad.w(0, 0) += 2.0 * w;
    return {{"square", w * w}};
}

}  // namespace

TEST(Gate, ZeroParamsGiveHalf) {
    const GateNetwork g(5, 3);
    std::mt19937_64 rng(1);
    EXPECT_DOUBLE_EQ(g.forward(oracle::random_vec(rng, 5)), 0.5);
}

TEST(Gate, HandComputedCase) {
    GateNetwork g(1, 1);
    g.w2(0, 0) = 2.0;
    g.w1(0, 0) = 1.0;
    EXPECT_NEAR(g.forward(Vec::Ones(1)), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
    EXPECT_NEAR(g.forward(Vec::Ones(1)), 0.8808, 1e-4);
}

TEST(Gate, OutputInOpenInterval) {
    std::mt19937_64 rng(2);
    const auto g = GateNetwork::xavier(5, 4, rng);
    for (int k = 0; k < 100; ++k) {
        const double y = g.forward(oracle::random_vec(rng, 5, 3.0));
        EXPECT_GT(y, 0.0);
        EXPECT_LT(y, 1.0);
    }
}

TEST(Softmax, Examples) {
    const Vec s = softmax(Vec::Zero(2));
    EXPECT_DOUBLE_EQ(s[0], 0.5);
    EXPECT_DOUBLE_EQ(s[1], 0.5);
    const Vec big = softmax((Vec(2) << 1000, 0).finished());
    EXPECT_TRUE(big.allFinite());
    EXPECT_NEAR(big[0], 1.0, 1e-12);
    EXPECT_NEAR(big[1], 0.0, 1e-12);
}

TEST(Softmax, ShiftInvariantProbabilityVector) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Vec v = oracle::random_vec(rng, 5, 4.0);
        const Vec s = softmax(v);
        EXPECT_NEAR(s.sum(), 1.0, 1e-9);
        EXPECT_GE(s.minCoeff(), 0.0);
        EXPECT_TRUE(softmax((v.array() + 17.0).matrix()).isApprox(s, 1e-12));
    }
}

TEST(Softmax, BackwardMatchesFiniteDifferences) {
    std::mt19937_64 rng(4);
    const Vec v = oracle::random_vec(rng, 5);
    const Vec w = oracle::random_vec(rng, 5);
    const Vec analytic = softmax_backward(softmax(v), w);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Vec up = v, down = v;
        up[i] += h;
        down[i] -= h;
        const double numeric = (w.dot(softmax(up)) - w.dot(softmax(down))) / (2 * h);
        EXPECT_LE(relative_error(analytic[i], numeric), 1e-4);
    }
}

TEST(Sgd, OneStepOnSquare) {
    Scalar m;
    const double loss = backprop_and_step(m, square, 0.1);
    EXPECT_DOUBLE_EQ(loss, 1.0);
    EXPECT_DOUBLE_EQ(m.w(0, 0), 0.8);
}

TEST(Sgd, ZeroLearningRateLeavesParams) {
    std::mt19937_64 rng(5);
    auto net = BinaryMlp::xavier(4, 3, rng);
    const auto before = net;
    auto grad = zeros_like(net);
    grad.visit([](const std::string&, Mat& m) { m.setOnes(); });
    sgd_step(net, grad, 0.0);
    const auto a = param_list(std::as_const(net));
    const auto b = param_list(before);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
}

TEST(Sgd, NonFiniteLossNamesTermAndKeepsParams) {
    Scalar m;
    auto bad = [](const Scalar&, Scalar&) {
        return std::vector<LossTerm>{{"fine", 1.0}, {"info_retention", std::nan("")}};
    };
    try {
        backprop_and_step(m, bad, 0.1);
        FAIL() << "expected NonFiniteLoss";
    } catch (const NonFiniteLoss& e) {
        EXPECT_EQ(e.term(), "info_retention");
    }
    EXPECT_EQ(m.w(0, 0), 1.0);
}

TEST(Bce, ClampAndGradient) {
    EXPECT_NEAR(bce_loss(0.0, true), -std::log(kProbClamp), 1e-9);
    EXPECT_TRUE(std::isfinite(bce_loss(1.0, false)));
    EXPECT_EQ(bce_grad(0.0, true), 0.0);
    const double p = 0.3, h = 1e-6;
    for (bool y : {true, false}) {
        const double numeric = (bce_loss(p + h, y) - bce_loss(p - h, y)) / (2 * h);
        EXPECT_NEAR(bce_grad(p, y), numeric, 1e-6);
    }
}

TEST(GradientCheck, GateAndMlpOnRandomNets) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        EXPECT_LE(oracle::check_gate(rng, 5, 4), 1e-4);
        EXPECT_LE(oracle::check_discourse(rng, 5, 4), 1e-4);
        EXPECT_LE(oracle::check_link_head(rng, 5, 4), 1e-4);
    }
}

TEST(GradientCheck, DetectsWrongGradient) {
    Scalar m;
    m.w(0, 0) = 0.7;
    Scalar wrong;
    wrong.w(0, 0) = 1.0;  // true gradient is 1.4
    const auto r = gradient_check(m, wrong, [](const Scalar& s) { return s.w(0, 0) * s.w(0, 0); });
    EXPECT_GT(r.max_relative_error, 0.2);
    EXPECT_EQ(r.worst_parameter, "w[0]");
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.epochs = 0;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.hidden_dim = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Checkpoint, RoundTripIsExact) {
    std::mt19937_64 rng(7);
    const auto net = BinaryMlp::xavier(6, 5, rng);
    Checkpoint ckpt;
    ckpt.kind = "test";
    ckpt.meta["threshold"] = format_double(0.1 + 0.2);
    export_params(net, "net.", ckpt);
    std::stringstream buf;
    write_checkpoint(buf, ckpt);
    const auto back = read_checkpoint(buf, "buf");
    EXPECT_EQ(back.kind, "test");
    EXPECT_EQ(std::stod(back.meta_value("threshold")), 0.1 + 0.2);
    BinaryMlp loaded;
    import_params(loaded, "net.", back);
    const auto a = param_list(net);
    const auto b = param_list(std::as_const(loaded));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
    EXPECT_THROW(back.tensor("missing"), Error);
    EXPECT_THROW(back.meta_value("missing"), Error);
}

TEST(Checkpoint, ShapeMismatchRejected) {
    std::mt19937_64 rng(8);
    Checkpoint ckpt;
    export_params(BinaryMlp::xavier(6, 5, rng), "", ckpt);
    BinaryMlp other(4, 5);
    EXPECT_THROW(import_params(other, "", ckpt), Error);
}

TEST(Checkpoint, TruncatedFileRejected) {
    std::mt19937_64 rng(9);
    Checkpoint ckpt;
    ckpt.kind = "x";
    export_params(BinaryMlp::xavier(3, 2, rng), "", ckpt);
    std::stringstream buf;
    write_checkpoint(buf, ckpt);
    const std::string text = buf.str();
    std::istringstream cut(text.substr(0, text.size() / 2));
    EXPECT_THROW(read_checkpoint(cut, "cut"), Error);
}
