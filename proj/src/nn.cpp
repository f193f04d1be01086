#include "streamlink/nn.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace streamlink {
namespace {

constexpr std::string_view kCheckpointMagic = "streamlink-checkpoint";
constexpr int kCheckpointVersion = 1;

Mat xavier_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
    }
    return m;
}

void check_input(const Mat& weights, const Vec& x, const char* what) {
    if (weights.cols() != x.size()) {
        throw Error(std::string(what) + ": input has dimension " + std::to_string(x.size()) + ", expected " +
                    std::to_string(weights.cols()));
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Vec softmax(const Vec& v) {
    if (v.size() == 0) return v;
    const Vec shifted = v.array() - v.maxCoeff();
    Vec e = shifted.array().exp();
    return e / e.sum();
}

Vec softmax_backward(const Vec& s, const Vec& grad_s) {
    return s.cwiseProduct(Vec(grad_s.array() - s.dot(grad_s)));
}

double bce_loss(double p, bool positive) {
    const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return positive ? -std::log(q) : -std::log(1.0 - q);
}

double bce_grad(double p, bool positive) {
    if (p < kProbClamp || p > 1.0 - kProbClamp) return 0.0;
    return positive ? -1.0 / p : 1.0 / (1.0 - p);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw Error("learning_rate must be positive");
    if (epochs < 1) throw Error("epochs must be at least 1");
    if (hidden_dim < 1) throw Error("hidden_dim must be at least 1");
}

GateNetwork::GateNetwork(std::size_t input_dim, std::size_t hidden_dim)
    : w2(Mat::Zero(static_cast<Eigen::Index>(hidden_dim), static_cast<Eigen::Index>(input_dim))),
      b2(Mat::Zero(static_cast<Eigen::Index>(hidden_dim), 1)),
      w1(Mat::Zero(1, static_cast<Eigen::Index>(hidden_dim))),
      b1(Mat::Zero(1, 1)) {}

GateNetwork GateNetwork::xavier(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng) {
    GateNetwork net(input_dim, hidden_dim);
    net.w2 = xavier_matrix(hidden_dim, input_dim, rng);
    net.w1 = xavier_matrix(1, hidden_dim, rng);
    return net;
}

double GateNetwork::forward(const Vec& e) const {
    check_input(w2, e, "gate network");
    const Vec hidden = w2 * e + b2;
    return sigmoid((w1 * hidden)(0, 0) + b1(0, 0));
}

void GateNetwork::backward(const Vec& e, double grad_output, GateNetwork& grad) const {
    const Vec hidden = w2 * e + b2;
    const double g = sigmoid((w1 * hidden)(0, 0) + b1(0, 0));
    const double dz = grad_output * g * (1.0 - g);
    grad.w1 += dz * hidden.transpose();
    grad.b1(0, 0) += dz;
    const Vec dhidden = dz * w1.transpose();
    grad.w2 += dhidden * e.transpose();
    grad.b2 += dhidden;
}

BinaryMlp::BinaryMlp(std::size_t input_dim, std::size_t hidden_dim)
    : w_hidden(Mat::Zero(static_cast<Eigen::Index>(hidden_dim), static_cast<Eigen::Index>(input_dim))),
      b_hidden(Mat::Zero(static_cast<Eigen::Index>(hidden_dim), 1)),
      w_out(Mat::Zero(1, static_cast<Eigen::Index>(hidden_dim))),
      b_out(Mat::Zero(1, 1)) {}

BinaryMlp BinaryMlp::xavier(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng) {
    BinaryMlp net(input_dim, hidden_dim);
    net.w_hidden = xavier_matrix(hidden_dim, input_dim, rng);
    net.w_out = xavier_matrix(1, hidden_dim, rng);
    return net;
}

double BinaryMlp::forward(const Vec& x) const {
    check_input(w_hidden, x, "binary classifier");
    const Vec h = (w_hidden * x + b_hidden).array().tanh();
    return sigmoid((w_out * h)(0, 0) + b_out(0, 0));
}

Vec BinaryMlp::backward(const Vec& x, double grad_output, BinaryMlp& grad) const {
    const Vec h = (w_hidden * x + b_hidden).array().tanh();
    const double p = sigmoid((w_out * h)(0, 0) + b_out(0, 0));
    const double dz = grad_output * p * (1.0 - p);
    grad.w_out += dz * h.transpose();
    grad.b_out(0, 0) += dz;
    const Vec dpre = (dz * w_out.transpose()).cwiseProduct(Vec((1.0 - h.array().square()).matrix()));
    grad.w_hidden += dpre * x.transpose();
    grad.b_hidden += dpre;
    return w_hidden.transpose() * dpre;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

const Mat& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, m] : tensors) {
        if (n == name) return m;
    }
    throw Error("checkpoint of kind '" + kind + "' has no tensor '" + name + "'");
}

const std::string& Checkpoint::meta_value(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw Error("checkpoint of kind '" + kind + "' has no metadata '" + key + "'");
    return it->second;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    out << "kind " << ckpt.kind << '\n';
    for (const auto& [k, v] : ckpt.meta) out << "meta " << k << ' ' << v << '\n';
    for (const auto& [name, m] : ckpt.tensors) {
        out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (c) out << ' ';
                out << format_double(m(r, c));
            }
            out << '\n';
        }
    }
    out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
    Checkpoint ckpt;
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw ParseError(source, line_no + 1, "unexpected end of checkpoint");
        ++line_no;
    };

    next_line();
    {
        std::istringstream ls(line);
        std::string magic;
        int version = 0;
        ls >> magic >> version;
        if (magic != kCheckpointMagic) throw ParseError(source, line_no, "not a checkpoint file");
        if (version != kCheckpointVersion) {
            throw ParseError(source, line_no, "unsupported checkpoint version " + std::to_string(version));
        }
    }
    while (true) {
        next_line();
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "end") break;
        if (key == "kind") {
            ls >> ckpt.kind;
        } else if (key == "meta") {
            std::string k, v;
            ls >> k;
            std::getline(ls >> std::ws, v);
            ckpt.meta[k] = v;
        } else if (key == "tensor") {
            std::string name;
            Eigen::Index rows = -1, cols = -1;
            if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) {
                throw ParseError(source, line_no, "bad tensor header");
            }
            Mat m(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                next_line();
                std::istringstream values(line);
                for (Eigen::Index c = 0; c < cols; ++c) {
                    std::string field;
                    values >> field;
                    double v = 0.0;
                    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
                    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
                        throw ParseError(source, line_no, "bad value in tensor '" + name + "'");
                    }
                    m(r, c) = v;
                }
            }
            ckpt.tensors.emplace_back(name, std::move(m));
        } else {
            throw ParseError(source, line_no, "unknown checkpoint entry '" + key + "'");
        }
    }
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_checkpoint(in, path);
}

}  // namespace streamlink
