#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "streamlink/corpus.hpp"
#include "streamlink/embed.hpp"
#include "streamlink/nn.hpp"
#include "streamlink/summarizer.hpp"

namespace streamlink {

/// Turns a (sentence, tutorial title) pair into one feature vector.
class SentenceEncoder {
public:
    virtual ~SentenceEncoder() = default;
    virtual std::string backend() const = 0;
    virtual std::size_t dim() const = 0;
    virtual Vec encode_pair(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const = 0;
};

/// [pool_max(sentence) : pool_max(title)], the title half zero for an empty title.
/// The pooled encoder passes an empty title for the None entry.
Vec encode_pair(const EmbeddingTable& table, std::span<const std::string> sentence_tokens,
                std::span<const std::string> title_tokens);

class PooledStaticEncoder final : public SentenceEncoder {
public:
    explicit PooledStaticEncoder(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}

    std::string backend() const override { return "pooled_static"; }
    std::size_t dim() const override { return 2 * table_->dim(); }
    Vec encode_pair(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const override;

private:
    std::shared_ptr<const EmbeddingTable> table_;
};

/// Pair vectors computed elsewhere. File lines are
/// "transcript_id sentence_index tutorial_id v1 ... vd".
class ExternalPairVectors final : public SentenceEncoder {
public:
    static ExternalPairVectors parse(std::istream& in, const std::string& source);
    static ExternalPairVectors load(const std::filesystem::path& path);

    std::string backend() const override { return "external_pair_vectors"; }
    std::size_t dim() const override { return dim_; }
    /// Throws Error naming the missing key.
    Vec encode_pair(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const override;

private:
    using Key = std::tuple<std::string, std::size_t, std::string>;
    std::size_t dim_ = 0;
    std::map<Key, Vec> vectors_;
};

struct LinkClassifier {
    BinaryMlp head;
    double decision_threshold = 0.5;
    std::size_t negative_ratio = 5;
    std::shared_ptr<const SentenceEncoder> encoder;

    void validate() const;
    double probability(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const;
};

/// Positives are annotated (sentence, tutorial) pairs plus (sentence, None) for
/// every sentence of an annotated transcript that carries no link. For each of
/// those sentences `negative_ratio` unlinked pool entries (None included) are
/// drawn without replacement, once, before training.
LinkClassifier train_link_classifier(std::span<const AnnotationRecord> annotations,
                                     std::span<const Transcript> transcripts, const TutorialPool& pool,
                                     std::shared_ptr<const SentenceEncoder> encoder, const TrainConfig& config,
                                     std::size_t negative_ratio = 5, double decision_threshold = 0.5,
                                     TrainLog* log = nullptr);

struct LinkScore {
    std::string tutorial_id;
    double probability = 0.0;
};

/// Every pool entry, None included, by probability descending then id.
std::vector<LinkScore> predict_links(const LinkClassifier& model, const Transcript& doc, const Sentence& sentence,
                                     const TutorialPool& pool);

/// Non-None tutorials whose probability exceeds both the threshold and the
/// None probability. Empty means the sentence is not linked.
std::vector<std::string> linked_tutorials(std::span<const LinkScore> ranked, double decision_threshold);

struct SentencePrediction {
    std::string transcript_id;
    std::size_t sentence_index = 0;
    std::vector<LinkScore> ranked;
};

/// Predictions for every sentence of the given transcripts.
std::vector<SentencePrediction> predict_corpus(const LinkClassifier& model, std::span<const Transcript> transcripts,
                                               const TutorialPool& pool);

void write_predictions_jsonl(std::ostream& out, std::span<const SentencePrediction> predictions);
std::vector<SentencePrediction> parse_predictions_jsonl(std::istream& in, const std::string& source);

Checkpoint to_checkpoint(const LinkClassifier& model);
/// Restores the head and settings; the encoder is supplied by the caller.
LinkClassifier link_classifier_from_checkpoint(const Checkpoint& ckpt, std::shared_ptr<const SentenceEncoder> encoder);

}  // namespace streamlink
