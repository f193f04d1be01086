#include "streamlink/ranker.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "streamlink/log.hpp"

namespace streamlink {
namespace {

struct PooledHalves {
    Vec first;
    Vec second;
};

std::vector<PooledHalves> pooled_halves(std::span<const Transcript> transcripts, const EmbeddingTable& table) {
    std::vector<PooledHalves> out;
    for (const auto& t : transcripts) {
        const Tokens tokens = t.tokens();
        if (tokens.size() < 2) {
            warn("transcript '" + t.id + "' has fewer than two tokens, skipped for discourse training");
            continue;
        }
        auto [first, second] = split_halves(tokens);
        out.push_back({pool_max(embed_tokens(table, first)), pool_max(embed_tokens(table, second))});
    }
    return out;
}

std::size_t draw_other(std::size_t i, std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 2);
    std::size_t j = dist(rng);
    return j >= i ? j + 1 : j;
}

void min_max_normalize(std::vector<double>& values) {
    if (values.empty()) return;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double low = *lo;
    const double span = *hi - *lo;
    for (double& v : values) v = span > 0.0 ? (v - low) / span : 0.0;
}

}  // namespace

double DiscourseClassifier::score(const Vec& left_pooled, const Vec& right_pooled) const {
    return net.forward(concat(left_pooled, right_pooled));
}

std::pair<std::span<const std::string>, std::span<const std::string>> split_halves(
    std::span<const std::string> tokens) {
    const std::size_t first = (tokens.size() + 1) / 2;
    return {tokens.first(first), tokens.subspan(first)};
}

DiscourseClassifier train_discourse_classifier(std::span<const Transcript> transcripts,
                                               const EmbeddingTable& table, const TrainConfig& config,
                                               TrainLog* log) {
    config.validate();
    const auto halves = pooled_halves(transcripts, table);
    if (halves.size() < 2) throw Error("discourse training needs at least two transcripts with two or more tokens");

    std::mt19937_64 rng(config.seed);
    DiscourseClassifier classifier{BinaryMlp::xavier(2 * table.dim(), config.hidden_dim, rng)};

    std::vector<std::size_t> order(halves.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        for (std::size_t i : order) {
            const std::size_t j = draw_other(i, halves.size(), rng);
            const Vec positive = concat(halves[i].first, halves[i].second);
            const Vec negative = concat(halves[i].first, halves[j].second);
            sum += backprop_and_step(
                classifier.net,
                [&](const BinaryMlp& net, BinaryMlp& grad) {
                    const double p_pos = net.forward(positive);
                    const double p_neg = net.forward(negative);
                    net.backward(positive, bce_grad(p_pos, true), grad);
                    net.backward(negative, bce_grad(p_neg, false), grad);
                    return std::vector<LossTerm>{{"discourse_positive", bce_loss(p_pos, true)},
                                                 {"discourse_negative", bce_loss(p_neg, false)}};
                },
                config.learning_rate);
        }
        if (log) log->epoch_mean_loss.push_back(sum / static_cast<double>(order.size()));
    }
    return classifier;
}

double discourse_accuracy(const DiscourseClassifier& classifier, std::span<const Transcript> transcripts,
                          const EmbeddingTable& table, std::uint64_t seed) {
    const auto halves = pooled_halves(transcripts, table);
    if (halves.size() < 2) throw Error("need at least two usable transcripts to measure accuracy");
    std::mt19937_64 rng(seed);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < halves.size(); ++i) {
        const std::size_t j = draw_other(i, halves.size(), rng);
        if (classifier.score(halves[i].first, halves[i].second) > 0.5) ++correct;
        if (classifier.score(halves[i].first, halves[j].second) <= 0.5) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(2 * halves.size());
}

Checkpoint to_checkpoint(const DiscourseClassifier& classifier) {
    Checkpoint ckpt;
    ckpt.kind = "discourse";
    export_params(classifier.net, "", ckpt);
    return ckpt;
}

DiscourseClassifier discourse_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.kind != "discourse") throw Error("expected a discourse checkpoint, found '" + ckpt.kind + "'");
    DiscourseClassifier classifier;
    import_params(classifier.net, "", ckpt);
    if (classifier.net.input_dim() % 2 != 0) throw Error("discourse classifier input must have even dimension");
    return classifier;
}

double score_str(const Tutorial& tutorial, std::span<const std::string> summary, const EmbeddingTable& table) {
    const Tokens tokens = tutorial.all_tokens();
    if (tokens.empty() || summary.empty()) return 0.0;
    return cosine(pool_mean(embed_tokens(table, tokens)), pool_mean(embed_tokens(table, summary)));
}

double score_disc(const DiscourseClassifier& classifier, const Tutorial& tutorial,
                  std::span<const std::string> summary, const EmbeddingTable& table) {
    const Tokens tokens = tutorial.all_tokens();
    const Vec left = tokens.empty() ? Vec::Zero(static_cast<Eigen::Index>(table.dim()))
                                    : pool_max(embed_tokens(table, tokens));
    const Vec right = summary.empty() ? Vec::Zero(static_cast<Eigen::Index>(table.dim()))
                                      : pool_max(embed_tokens(table, summary));
    return classifier.score(left, right);
}

std::vector<std::string> RankedList::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.tutorial_id);
    return out;
}

void sort_ranked(std::vector<RankedEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.tutorial_id < b.tutorial_id;
    });
}

void write_ranked_jsonl(std::ostream& out, const std::string& transcript_id, const RankedList& list) {
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
        const auto& e = list.entries[r];
        nlohmann::ordered_json row;
        row["transcript_id"] = transcript_id;
        row["rank"] = r + 1;
        row["tutorial_id"] = e.tutorial_id;
        row["score_str"] = e.score_str;
        row["score_disc"] = e.score_disc;
        row["score"] = e.total;
        out << row.dump() << '\n';
    }
}

Recommender::Recommender(const TutorialPool& pool, const ToolOntology& ontology, const CooccurrenceStats& stats,
                         const SummarizerModel& summarizer, const DiscourseClassifier& discourse,
                         const EmbeddingTable& table, FilterConfig filter, RankOptions options)
    : pool_(pool),
      ontology_(ontology),
      stats_(stats),
      summarizer_(summarizer),
      discourse_(discourse),
      table_(table),
      filter_(filter),
      options_(options) {
    for (const Tutorial* t : pool_.candidates()) {
        const auto embedded = embed_tokens(table_, t->all_tokens());
        vectors_.emplace(t, TutorialVectors{pool_mean(embedded), pool_max(embedded)});
    }
}

RankedList Recommender::rank(const Transcript& doc) const {
    const TutorialRefs candidates =
        options_.use_filter ? filter_pool(doc, pool_, ontology_, stats_, filter_) : pool_.candidates();
    const Tokens summary = options_.use_summarizer ? summarize(doc, summarizer_).tokens : doc.tokens();

    const auto embedded = embed_tokens(table_, summary);
    const Vec summary_mean = pool_mean(embedded);
    const Vec summary_max = pool_max(embedded);

    std::vector<double> str(candidates.size());
    std::vector<double> disc(candidates.size(), 0.0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& v = vectors_.at(candidates[c]);
        str[c] = cosine(v.mean, summary_mean);
        if (options_.use_discourse) disc[c] = discourse_.score(v.max, summary_max);
    }
    if (options_.normalize) {
        min_max_normalize(str);
        if (options_.use_discourse) min_max_normalize(disc);
    }

    RankedList list;
    list.entries.reserve(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        list.entries.push_back({candidates[c]->id, str[c], disc[c], str[c] + disc[c]});
    }
    sort_ranked(list.entries);
    return list;
}

RankedList rank(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology,
                const CooccurrenceStats& stats, const SummarizerModel& summarizer,
                const DiscourseClassifier& discourse, const EmbeddingTable& table, const FilterConfig& filter,
                const RankOptions& options) {
    return Recommender(pool, ontology, stats, summarizer, discourse, table, filter, options).rank(doc);
}

}  // namespace streamlink
