#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "streamlink/corpus.hpp"
#include "streamlink/embed.hpp"
#include "streamlink/ranker.hpp"
#include "streamlink/stats.hpp"
#include "streamlink/supervised.hpp"

namespace streamlink {

/// 1 if any gold id is among the first k ranked ids, else 0. Throws Error for
/// k == 0 or an empty gold set.
int hit_at_k(std::span<const std::string> ranked, const std::set<std::string>& gold, std::size_t k);

/// (transcript id, sentence index, tutorial id)
using LinkPair = std::tuple<std::string, std::size_t, std::string>;

struct F1Score {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;  // 0 when there is no true positive
};

F1Score micro_f1(const std::set<LinkPair>& predicted, const std::set<LinkPair>& gold);

// Baselines rank every candidate of the pool (None excluded), score descending,
// id ascending on ties. The score lands in `total` and in `score_str`.
RankedList baseline_string_similarity(const Transcript& doc, const TutorialPool& pool, const EmbeddingTable& table);
/// Score is the number of transcript tool names that also occur in the
/// tutorial title or body.
RankedList baseline_keyword(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology);
RankedList baseline_information(const Transcript& doc, const TutorialPool& pool, const CooccurrenceStats& stats);

struct RankingSystem {
    std::string name;
    std::function<RankedList(const Transcript&)> rank;
};

enum class Granularity { Transcript, Sentence };

Granularity parse_granularity(std::string_view text);
std::string_view to_string(Granularity g);

struct SystemRow {
    std::string system;
    std::size_t units = 0;
    std::map<std::size_t, double> hit_at;  // k -> mean hit
    std::optional<F1Score> f1;
};

struct EvalReport {
    std::string granularity;
    std::size_t excluded_units = 0;  // units without gold
    std::vector<SystemRow> rows;

    const SystemRow& row(std::string_view system) const;
    void write_table(std::ostream& out) const;
    void write_jsonl(std::ostream& out) const;
};

/// Mean hit@k per system.
///
/// Transcript granularity: one unit per transcript, gold is the union of its
/// non-None sentence links. Sentence granularity: one unit per sentence with a
/// non-None link, scored against the ranking of its whole transcript.
/// Transcripts without any gold are excluded and counted.
EvalReport evaluate_unsupervised(const CorpusBundle& bundle, std::span<const RankingSystem> systems,
                                 std::span<const std::size_t> ks, Granularity granularity = Granularity::Transcript);

/// Micro F1 over non-None (sentence, tutorial) pairs of annotated transcripts.
/// A pair is predicted when linked_tutorials() selects it. Throws Error listing
/// the annotated sentences without a prediction.
SystemRow evaluate_supervised(std::string system, std::span<const SentencePrediction> predictions,
                              std::span<const AnnotationRecord> annotations, double decision_threshold);

}  // namespace streamlink
