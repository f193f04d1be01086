#include "streamlink/summarizer.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace streamlink {
namespace {

struct GatedPool {
    DocRepresentations reps;
    std::vector<double> gates;
    std::vector<std::size_t> summary_arg;
    std::vector<std::size_t> rest_arg;
};

GatedPool gated_pool(std::span<const Vec> embeddings, const GateNetwork& gate) {
    if (embeddings.empty()) throw Error("cannot represent a document without tokens");
    GatedPool out;
    out.gates.reserve(embeddings.size());
    for (const auto& e : embeddings) out.gates.push_back(gate.forward(e));

    const Eigen::Index d = embeddings.front().size();
    out.reps.full = pool_max(embeddings);
    out.reps.summary = embeddings[0] * out.gates[0];
    out.reps.rest = embeddings[0] * (1.0 - out.gates[0]);
    out.summary_arg.assign(static_cast<std::size_t>(d), 0);
    out.rest_arg.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t k = 1; k < embeddings.size(); ++k) {
        const double g = out.gates[k];
        for (Eigen::Index c = 0; c < d; ++c) {
            const double s = embeddings[k][c] * g;
            const double r = embeddings[k][c] * (1.0 - g);
            if (s > out.reps.summary[c]) {
                out.reps.summary[c] = s;
                out.summary_arg[static_cast<std::size_t>(c)] = k;
            }
            if (r > out.reps.rest[c]) {
                out.reps.rest[c] = r;
                out.rest_arg[static_cast<std::size_t>(c)] = k;
            }
        }
    }
    return out;
}

void gated_pool_backward(std::span<const Vec> embeddings, const GateNetwork& gate, const GatedPool& pooled,
                         const RepresentationGrad& upstream, GateNetwork& grad) {
    std::vector<double> dgate(embeddings.size(), 0.0);
    for (std::size_t c = 0; c < pooled.summary_arg.size(); ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        const std::size_t ks = pooled.summary_arg[c];
        dgate[ks] += upstream.summary[ci] * embeddings[ks][ci];
        const std::size_t kr = pooled.rest_arg[c];
        dgate[kr] -= upstream.rest[ci] * embeddings[kr][ci];
    }
    for (std::size_t k = 0; k < embeddings.size(); ++k) {
        if (dgate[k] != 0.0) gate.backward(embeddings[k], dgate[k], grad);
    }
}

template <class M>
void add_scaled(M& into, const M& from, double scale) {
    auto dst = param_list(into);
    auto src = param_list(from);
    for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] += scale * *src[i];
}

}  // namespace

void SummarizerModel::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw Error("summary threshold must lie in (0, 1)");
    const std::size_t d = params.gate.input_dim();
    if (params.discriminator.input_dim() != 2 * d) {
        throw Error("discriminator input must be twice the gate input dimension");
    }
    if (encoder && encoder->dim() != d) throw Error("encoder dimension does not match the gate network");
}

DocRepresentations doc_representations(std::span<const Vec> embeddings, const GateNetwork& gate) {
    return gated_pool(embeddings, gate).reps;
}

DocRepresentations doc_representations(const Transcript& doc, const SummarizerModel& model) {
    if (!model.encoder) throw Error("summarizer has no encoder attached");
    const auto embeddings = model.encoder->encode(doc);
    return doc_representations(embeddings, model.params.gate);
}

void doc_representations_backward(std::span<const Vec> embeddings, const GateNetwork& gate,
                                  const RepresentationGrad& upstream, GateNetwork& grad) {
    gated_pool_backward(embeddings, gate, gated_pool(embeddings, gate), upstream, grad);
}

double dist_loss(const DocRepresentations& rep_i, const DocRepresentations& rep_j, double alpha, double beta,
                 RepresentationGrad* grad_i, RepresentationGrad* grad_j) {
    const Vec si = softmax(rep_i.summary);
    const Vec sj = softmax(rep_j.summary);
    const Vec ri = softmax(rep_i.rest);
    const Vec rj = softmax(rep_j.rest);
    if (grad_i) {
        grad_i->summary = alpha * softmax_backward(si, sj);
        grad_i->rest = -beta * softmax_backward(ri, rj);
    }
    if (grad_j) {
        grad_j->summary = alpha * softmax_backward(sj, si);
        grad_j->rest = -beta * softmax_backward(rj, ri);
    }
    return alpha * si.dot(sj) - beta * ri.dot(rj);
}

double ir_loss(const Vec& full_i, const Vec& summary_i, const Vec& summary_j, const BinaryMlp& discriminator,
               BinaryMlp* disc_grad, Vec* grad_summary_i, Vec* grad_summary_j) {
    const Vec positive = concat(full_i, summary_i);
    const Vec negative = concat(full_i, summary_j);
    const double p_pos = discriminator.forward(positive);
    const double p_neg = discriminator.forward(negative);
    if (disc_grad || grad_summary_i || grad_summary_j) {
        BinaryMlp scratch = zeros_like(discriminator);
        BinaryMlp& g = disc_grad ? *disc_grad : scratch;
        const Vec dpos = discriminator.backward(positive, bce_grad(p_pos, true), g);
        const Vec dneg = discriminator.backward(negative, bce_grad(p_neg, false), g);
        if (grad_summary_i) *grad_summary_i = dpos.tail(summary_i.size());
        if (grad_summary_j) *grad_summary_j = dneg.tail(summary_j.size());
    }
    return bce_loss(p_pos, true) + bce_loss(p_neg, false);
}

PairLoss pair_loss(const SummarizerParams& params, std::span<const Vec> emb_i, std::span<const Vec> emb_j,
                   const TrainConfig& config, SummarizerParams* grad) {
    const GatedPool pi = gated_pool(emb_i, params.gate);
    const GatedPool pj = gated_pool(emb_j, params.gate);

    PairLoss loss;
    if (!grad) {
        loss.info_retention = ir_loss(pi.reps.full, pi.reps.summary, pj.reps.summary, params.discriminator);
        loss.distinctiveness = dist_loss(pi.reps, pj.reps, config.alpha, config.beta);
    } else {
        BinaryMlp disc_grad = zeros_like(params.discriminator);
        Vec ir_si, ir_sj;
        loss.info_retention = ir_loss(pi.reps.full, pi.reps.summary, pj.reps.summary, params.discriminator,
                                      &disc_grad, &ir_si, &ir_sj);
        RepresentationGrad gi, gj;
        loss.distinctiveness = dist_loss(pi.reps, pj.reps, config.alpha, config.beta, &gi, &gj);

        add_scaled(grad->discriminator, disc_grad, config.loss_mix_alpha);
        const double ma = config.loss_mix_alpha;
        const double mb = config.loss_mix_beta;
        gated_pool_backward(emb_i, params.gate, pi, {ma * ir_si + mb * gi.summary, mb * gi.rest}, grad->gate);
        gated_pool_backward(emb_j, params.gate, pj, {ma * ir_sj + mb * gj.summary, mb * gj.rest}, grad->gate);
    }
    loss.total = config.loss_mix_alpha * loss.info_retention + config.loss_mix_beta * loss.distinctiveness;
    return loss;
}

SummarizerModel train_summarizer(std::span<const Transcript> transcripts,
                                 std::shared_ptr<const TokenEncoder> encoder, const TrainConfig& config,
                                 double threshold, TrainLog* log) {
    config.validate();
    if (transcripts.size() < 2) throw Error("summarizer training needs at least two transcripts");
    if (!encoder) throw Error("summarizer training needs an encoder");

    std::vector<std::vector<Vec>> embeddings;
    embeddings.reserve(transcripts.size());
    for (const auto& t : transcripts) embeddings.push_back(encoder->encode(t));

    const std::size_t d = encoder->dim();
    std::mt19937_64 rng(config.seed);
    SummarizerModel model;
    model.threshold = threshold;
    model.encoder = encoder;
    model.params.gate = GateNetwork::xavier(d, config.hidden_dim, rng);
    model.params.discriminator = BinaryMlp::xavier(2 * d, config.hidden_dim, rng);
    model.validate();

    std::vector<std::size_t> order(transcripts.size());
    std::iota(order.begin(), order.end(), 0);
    std::uniform_int_distribution<std::size_t> other(0, transcripts.size() - 2);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        for (std::size_t i : order) {
            std::size_t j = other(rng);
            if (j >= i) ++j;
            sum += backprop_and_step(
                model.params,
                [&](const SummarizerParams& p, SummarizerParams& g) {
                    const PairLoss l = pair_loss(p, embeddings[i], embeddings[j], config, &g);
                    return std::vector<LossTerm>{{"info_retention", config.loss_mix_alpha * l.info_retention},
                                                 {"distinctiveness", config.loss_mix_beta * l.distinctiveness}};
                },
                config.learning_rate);
        }
        if (log) log->epoch_mean_loss.push_back(sum / static_cast<double>(order.size()));
    }
    return model;
}

std::vector<std::size_t> select_by_gate(std::span<const double> gates, double threshold) {
    const std::size_t n = gates.size();
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k) {
        if (gates[k] > threshold) kept.push_back(k);
    }
    if (n <= 1) {
        kept.assign(n, 0);
        return kept;
    }
    if (!kept.empty() && kept.size() < n) return kept;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gates[a] > gates[b]; });
    order.resize((n + 1) / 2);
    std::sort(order.begin(), order.end());
    return order;
}

Summary summarize(const Transcript& doc, const SummarizerModel& model) {
    if (!model.encoder) throw Error("summarizer has no encoder attached");
    const Tokens tokens = doc.tokens();
    const auto embeddings = model.encoder->encode(doc);
    Summary out;
    out.gates.reserve(embeddings.size());
    for (const auto& e : embeddings) out.gates.push_back(model.params.gate.forward(e));
    out.kept = select_by_gate(out.gates, model.threshold);
    out.tokens.reserve(out.kept.size());
    for (std::size_t k : out.kept) out.tokens.push_back(tokens[k]);
    return out;
}

void write_summaries_jsonl(std::ostream& out, std::span<const Transcript> transcripts, const SummarizerModel& model) {
    for (const auto& doc : transcripts) {
        nlohmann::ordered_json row;
        row["transcript_id"] = doc.id;
        row["kept_token_indices"] = summarize(doc, model).kept;
        out << row.dump() << '\n';
    }
}

double discriminator_accuracy(const SummarizerModel& model, std::span<const Transcript> transcripts,
                              std::uint64_t seed) {
    if (transcripts.size() < 2) throw Error("need at least two transcripts to measure accuracy");
    std::vector<DocRepresentations> reps;
    for (const auto& t : transcripts) reps.push_back(doc_representations(t, model));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> other(0, reps.size() - 2);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        std::size_t j = other(rng);
        if (j >= i) ++j;
        const auto& disc = model.params.discriminator;
        if (disc.forward(concat(reps[i].full, reps[i].summary)) > 0.5) ++correct;
        if (disc.forward(concat(reps[i].full, reps[j].summary)) <= 0.5) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(2 * reps.size());
}

Checkpoint to_checkpoint(const SummarizerModel& model) {
    Checkpoint ckpt;
    ckpt.kind = "summarizer";
    ckpt.meta["threshold"] = format_double(model.threshold);
    export_params(model.params, "", ckpt);
    return ckpt;
}

SummarizerModel summarizer_from_checkpoint(const Checkpoint& ckpt, std::shared_ptr<const TokenEncoder> encoder) {
    if (ckpt.kind != "summarizer") throw Error("expected a summarizer checkpoint, found '" + ckpt.kind + "'");
    SummarizerModel model;
    import_params(model.params, "", ckpt);
    model.threshold = std::stod(ckpt.meta_value("threshold"));
    model.encoder = std::move(encoder);
    model.validate();
    return model;
}

}  // namespace streamlink
