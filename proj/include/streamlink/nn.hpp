#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "streamlink/embed.hpp"
#include "streamlink/error.hpp"

namespace streamlink {

// Models in this kit expose their parameters through
//     template <class F> void visit(F&& f);   // f(const std::string& name, Mat& m)
// with a const overload. A gradient is a model of the same shape, so the
// helpers below (zeros_like, sgd_step, checkpoint export) work on any of them.

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Softmax with the maximum subtracted first.
Vec softmax(const Vec& v);
/// Gradient w.r.t. the logits given s = softmax(v) and the gradient w.r.t. s.
Vec softmax_backward(const Vec& s, const Vec& grad_s);

inline constexpr double kProbClamp = 1e-7;

/// -log p for a positive, -log(1 - p) for a negative; p clamped to
/// [kProbClamp, 1 - kProbClamp].
double bce_loss(double p, bool positive);
/// d bce_loss / dp. Zero where the clamp is active.
double bce_grad(double p, bool positive);

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 50;
    std::uint64_t seed = 13;
    double alpha = 1.0;  // weights inside the distinctiveness loss
    double beta = 1.0;
    double loss_mix_alpha = 1.0;  // weights of the info-retention and distinctiveness terms
    double loss_mix_beta = 1.0;
    std::size_t hidden_dim = 64;

    /// Throws Error on a non-positive learning rate, zero epochs or zero hidden size.
    void validate() const;
};

/// Word gate: sigmoid(w1 * (w2 * e + b2) + b1).
struct GateNetwork {
    Mat w2;  // hidden x input
    Mat b2;  // hidden x 1
    Mat w1;  // 1 x hidden
    Mat b1;  // 1 x 1

    GateNetwork() = default;
    /// All-zero parameters.
    GateNetwork(std::size_t input_dim, std::size_t hidden_dim);
    static GateNetwork xavier(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng);

    std::size_t input_dim() const { return static_cast<std::size_t>(w2.cols()); }
    std::size_t hidden_dim() const { return static_cast<std::size_t>(w2.rows()); }

    double forward(const Vec& e) const;
    /// Adds d(loss)/d(params) to `grad` given d(loss)/d(output) at input e.
    void backward(const Vec& e, double grad_output, GateNetwork& grad) const;

    template <class F>
    void visit(F&& f) {
        f("w2", w2);
        f("b2", b2);
        f("w1", w1);
        f("b1", b1);
    }
    template <class F>
    void visit(F&& f) const {
        f("w2", w2);
        f("b2", b2);
        f("w1", w1);
        f("b1", b1);
    }
};

/// Two dense layers with a tanh between them and a sigmoid output. Backs the
/// discriminator, the discourse classifier and the link head.
struct BinaryMlp {
    Mat w_hidden;  // hidden x input
    Mat b_hidden;  // hidden x 1
    Mat w_out;     // 1 x hidden
    Mat b_out;     // 1 x 1

    BinaryMlp() = default;
    BinaryMlp(std::size_t input_dim, std::size_t hidden_dim);
    static BinaryMlp xavier(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng);

    std::size_t input_dim() const { return static_cast<std::size_t>(w_hidden.cols()); }

    double forward(const Vec& x) const;
    /// Adds parameter gradients to `grad` and returns d(loss)/d(x).
    Vec backward(const Vec& x, double grad_output, BinaryMlp& grad) const;

    template <class F>
    void visit(F&& f) {
        f("w_hidden", w_hidden);
        f("b_hidden", b_hidden);
        f("w_out", w_out);
        f("b_out", b_out);
    }
    template <class F>
    void visit(F&& f) const {
        f("w_hidden", w_hidden);
        f("b_hidden", b_hidden);
        f("w_out", w_out);
        f("b_out", b_out);
    }
};

Vec concat(const Vec& a, const Vec& b);

template <class M>
std::vector<Mat*> param_list(M& model) {
    std::vector<Mat*> out;
    model.visit([&](const std::string&, Mat& m) { out.push_back(&m); });
    return out;
}

template <class M>
std::vector<const Mat*> param_list(const M& model) {
    std::vector<const Mat*> out;
    model.visit([&](const std::string&, const Mat& m) { out.push_back(&m); });
    return out;
}

template <class M>
M zeros_like(const M& model) {
    M out = model;
    out.visit([](const std::string&, Mat& m) { m.setZero(); });
    return out;
}

template <class M>
std::size_t param_count(const M& model) {
    std::size_t n = 0;
    model.visit([&](const std::string&, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
}

/// model -= learning_rate * grad
template <class M>
void sgd_step(M& model, const M& grad, double learning_rate) {
    auto params = param_list(model);
    auto grads = param_list(grad);
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= learning_rate * *grads[i];
}

struct LossTerm {
    std::string name;
    double value;
};

/// One plain gradient-descent step.
///
/// `loss_and_grad(const M& model, M& grad)` returns the named loss terms and
/// accumulates their gradient into `grad` (zeroed beforehand). Throws
/// NonFiniteLoss naming the first term that is NaN or infinite, before any
/// parameter changes. Returns the total loss at the pre-step parameters.
template <class M, class LossFn>
double backprop_and_step(M& model, LossFn&& loss_and_grad, double learning_rate) {
    M grad = zeros_like(model);
    const std::vector<LossTerm> terms = loss_and_grad(std::as_const(model), grad);
    double total = 0.0;
    for (const auto& t : terms) {
        if (!std::isfinite(t.value)) throw NonFiniteLoss(t.name);
        total += t.value;
    }
    for (const Mat* g : param_list(std::as_const(grad))) {
        if (!g->allFinite()) throw NonFiniteLoss("gradient");
    }
    sgd_step(model, grad, learning_rate);
    return total;
}

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t checked = 0;
};

/// Relative difference used by the gradient checker: |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Compares `analytic` against central differences of `loss(model)` with step h.
template <class M, class LossFn>
GradCheckResult gradient_check(M model, const M& analytic, LossFn&& loss, double h = 1e-5) {
    GradCheckResult result;
    std::vector<std::pair<std::string, Mat*>> params;
    model.visit([&](const std::string& name, Mat& m) { params.emplace_back(name, &m); });
    const auto grads = param_list(analytic);
    for (std::size_t p = 0; p < params.size(); ++p) {
        Mat& m = *params[p].second;
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            const double saved = m.data()[k];
            m.data()[k] = saved + h;
            const double up = loss(std::as_const(model));
            m.data()[k] = saved - h;
            const double down = loss(std::as_const(model));
            m.data()[k] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double err = relative_error(grads[p]->data()[k], numeric);
            ++result.checked;
            if (err > result.max_relative_error) {
                result.max_relative_error = err;
                result.worst_parameter = params[p].first + "[" + std::to_string(k) + "]";
            }
        }
    }
    return result;
}

/// Versioned text checkpoint: a kind tag, string metadata and named tensors.
struct Checkpoint {
    std::string kind;
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, Mat>> tensors;

    const Mat& tensor(const std::string& name) const;
    const std::string& meta_value(const std::string& key) const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in, const std::string& source);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

template <class M>
void export_params(const M& model, const std::string& prefix, Checkpoint& ckpt) {
    model.visit([&](const std::string& name, const Mat& m) { ckpt.tensors.emplace_back(prefix + name, m); });
}

/// Copies tensors named prefix + parameter name into the model. Shapes must match.
template <class M>
void import_params(M& model, const std::string& prefix, const Checkpoint& ckpt) {
    model.visit([&](const std::string& name, Mat& m) {
        const Mat& src = ckpt.tensor(prefix + name);
        if (m.size() != 0 && (src.rows() != m.rows() || src.cols() != m.cols())) {
            throw Error("checkpoint tensor '" + prefix + name + "' has the wrong shape");
        }
        m = src;
    });
}

}  // namespace streamlink
