#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "streamlink/corpus.hpp"
#include "streamlink/embed.hpp"
#include "streamlink/nn.hpp"

namespace streamlink {

/// Document vectors used by the summarizer losses.
struct DocRepresentations {
    Vec full;     // max-pool of the raw token vectors
    Vec summary;  // max-pool of e_k * gate(e_k)
    Vec rest;     // max-pool of e_k * (1 - gate(e_k))
};

/// Gradients of a loss with respect to the gated parts of a DocRepresentations.
struct RepresentationGrad {
    Vec summary;
    Vec rest;
};

/// Gate network and discriminator, trained jointly.
struct SummarizerParams {
    GateNetwork gate;
    BinaryMlp discriminator;  // input: [full : summary]

    template <class F>
    void visit(F&& f) {
        gate.visit([&](const std::string& n, Mat& m) { f("gate." + n, m); });
        discriminator.visit([&](const std::string& n, Mat& m) { f("disc." + n, m); });
    }
    template <class F>
    void visit(F&& f) const {
        gate.visit([&](const std::string& n, const Mat& m) { f("gate." + n, m); });
        discriminator.visit([&](const std::string& n, const Mat& m) { f("disc." + n, m); });
    }
};

struct SummarizerModel {
    SummarizerParams params;
    double threshold = 0.5;
    std::shared_ptr<const TokenEncoder> encoder;

    /// Throws Error if the threshold is outside (0, 1) or the dimensions disagree.
    void validate() const;
};

DocRepresentations doc_representations(std::span<const Vec> embeddings, const GateNetwork& gate);
DocRepresentations doc_representations(const Transcript& doc, const SummarizerModel& model);

/// Backpropagates representation gradients through the gated max-pools into
/// the gate parameters. Ties in the max go to the earliest token.
void doc_representations_backward(std::span<const Vec> embeddings, const GateNetwork& gate,
                                  const RepresentationGrad& upstream, GateNetwork& grad);

/// alpha * <softmax(summary_i), softmax(summary_j)> - beta * <softmax(rest_i), softmax(rest_j)>
///
/// The elementwise product of the softmaxed vectors is summed to a scalar.
/// Optional outputs receive the gradient with respect to each representation.
double dist_loss(const DocRepresentations& rep_i, const DocRepresentations& rep_j, double alpha, double beta,
                 RepresentationGrad* grad_i = nullptr, RepresentationGrad* grad_j = nullptr);

/// -(log D([full_i : summary_i]) + log(1 - D([full_i : summary_j]))) with the
/// probabilities clamped to [1e-7, 1 - 1e-7].
double ir_loss(const Vec& full_i, const Vec& summary_i, const Vec& summary_j, const BinaryMlp& discriminator,
               BinaryMlp* disc_grad = nullptr, Vec* grad_summary_i = nullptr, Vec* grad_summary_j = nullptr);

struct PairLoss {
    double info_retention = 0.0;
    double distinctiveness = 0.0;
    double total = 0.0;  // loss_mix_alpha * info_retention + loss_mix_beta * distinctiveness
};

/// Combined loss for one (i, j) pair; accumulates parameter gradients when
/// `grad` is non-null.
PairLoss pair_loss(const SummarizerParams& params, std::span<const Vec> emb_i, std::span<const Vec> emb_j,
                   const TrainConfig& config, SummarizerParams* grad = nullptr);

struct TrainLog {
    std::vector<double> epoch_mean_loss;
};

/// Trains gate and discriminator with plain SGD, one (i, j) pair per step.
/// Each epoch visits the transcripts in a seeded shuffled order and pairs each
/// with a uniformly drawn other transcript. Needs at least two transcripts.
SummarizerModel train_summarizer(std::span<const Transcript> transcripts,
                                 std::shared_ptr<const TokenEncoder> encoder, const TrainConfig& config,
                                 double threshold = 0.5, TrainLog* log = nullptr);

struct Summary {
    std::vector<std::size_t> kept;  // token positions, ascending
    Tokens tokens;
    std::vector<double> gates;  // one per input token
};

/// Positions with gate > threshold, in order. When that selects nothing or
/// everything, the ceil(n/2) highest gates are kept instead (ties to the
/// earlier token). A single token is always kept.
std::vector<std::size_t> select_by_gate(std::span<const double> gates, double threshold);

Summary summarize(const Transcript& doc, const SummarizerModel& model);

/// One {"transcript_id", "kept_token_indices"} line per transcript.
void write_summaries_jsonl(std::ostream& out, std::span<const Transcript> transcripts, const SummarizerModel& model);

/// Fraction of correct discriminator calls (threshold 0.5) on one positive
/// [full_i : summary_i] and one seeded negative [full_i : summary_j] per transcript.
double discriminator_accuracy(const SummarizerModel& model, std::span<const Transcript> transcripts,
                              std::uint64_t seed);

Checkpoint to_checkpoint(const SummarizerModel& model);
/// Restores parameters and threshold; the encoder is supplied by the caller.
SummarizerModel summarizer_from_checkpoint(const Checkpoint& ckpt, std::shared_ptr<const TokenEncoder> encoder);

}  // namespace streamlink
