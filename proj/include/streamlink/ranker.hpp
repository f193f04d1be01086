#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamlink/corpus.hpp"
#include "streamlink/embed.hpp"
#include "streamlink/filter.hpp"
#include "streamlink/nn.hpp"
#include "streamlink/stats.hpp"
#include "streamlink/summarizer.hpp"

namespace streamlink {

/// Scores whether a second text continues the first, from the max-pooled
/// static embeddings of both: C([pool_max(left) : pool_max(right)]).
struct DiscourseClassifier {
    BinaryMlp net;

    double score(const Vec& left_pooled, const Vec& right_pooled) const;
};

/// Splits a token sequence at ceil(n/2): the odd token goes to the first half.
std::pair<std::span<const std::string>, std::span<const std::string>> split_halves(
    std::span<const std::string> tokens);

/// Positive pairs are the two halves of one transcript, negatives pair a first
/// half with the second half of a different, uniformly drawn transcript.
/// Transcripts with fewer than two tokens are skipped with a warning; fewer
/// than two usable transcripts is an error.
DiscourseClassifier train_discourse_classifier(std::span<const Transcript> transcripts,
                                               const EmbeddingTable& table, const TrainConfig& config,
                                               TrainLog* log = nullptr);

/// Fraction of correctly classified pairs (threshold 0.5) over one positive and
/// one seeded negative per usable transcript.
double discourse_accuracy(const DiscourseClassifier& classifier, std::span<const Transcript> transcripts,
                          const EmbeddingTable& table, std::uint64_t seed);

Checkpoint to_checkpoint(const DiscourseClassifier& classifier);
DiscourseClassifier discourse_from_checkpoint(const Checkpoint& ckpt);

/// Cosine between the mean embeddings of the tutorial (title and body) and the summary.
double score_str(const Tutorial& tutorial, std::span<const std::string> summary, const EmbeddingTable& table);
/// Discourse classifier applied to [tutorial : summary].
double score_disc(const DiscourseClassifier& classifier, const Tutorial& tutorial,
                  std::span<const std::string> summary, const EmbeddingTable& table);

struct RankedEntry {
    std::string tutorial_id;
    double score_str = 0.0;
    double score_disc = 0.0;
    double total = 0.0;
};

struct RankedList {
    std::vector<RankedEntry> entries;

    std::vector<std::string> ids() const;
};

/// Orders by total descending, then tutorial id ascending.
void sort_ranked(std::vector<RankedEntry>& entries);

void write_ranked_jsonl(std::ostream& out, const std::string& transcript_id, const RankedList& list);

struct RankOptions {
    bool use_filter = true;
    bool use_summarizer = true;
    bool use_discourse = true;
    /// Min-max normalize each score component over the candidate set before summing.
    bool normalize = false;
};

/// Filter, summarize, then sort candidates by score_str + score_disc.
///
/// Holds references to its inputs, which must outlive it. Tutorial vectors are
/// computed once at construction.
class Recommender {
public:
    Recommender(const TutorialPool& pool, const ToolOntology& ontology, const CooccurrenceStats& stats,
                const SummarizerModel& summarizer, const DiscourseClassifier& discourse,
                const EmbeddingTable& table, FilterConfig filter = {}, RankOptions options = {});

    RankedList rank(const Transcript& doc) const;

    const RankOptions& options() const { return options_; }

private:
    struct TutorialVectors {
        Vec mean;
        Vec max;
    };

    const TutorialPool& pool_;
    const ToolOntology& ontology_;
    const CooccurrenceStats& stats_;
    const SummarizerModel& summarizer_;
    const DiscourseClassifier& discourse_;
    const EmbeddingTable& table_;
    FilterConfig filter_;
    RankOptions options_;
    std::unordered_map<const Tutorial*, TutorialVectors> vectors_;
};

RankedList rank(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology,
                const CooccurrenceStats& stats, const SummarizerModel& summarizer,
                const DiscourseClassifier& discourse, const EmbeddingTable& table, const FilterConfig& filter,
                const RankOptions& options = {});

}  // namespace streamlink
