#include "streamlink/supervised.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace streamlink {
namespace {

Vec pooled_or_zero(const EmbeddingTable& table, std::span<const std::string> tokens) {
    if (tokens.empty()) return Vec::Zero(static_cast<Eigen::Index>(table.dim()));
    return pool_max(embed_tokens(table, tokens));
}

std::string pair_key(const std::string& transcript_id, std::size_t sentence_index, const std::string& tutorial_id) {
    return "(" + transcript_id + ", " + std::to_string(sentence_index) + ", " + tutorial_id + ")";
}

struct Example {
    Vec x;
    bool positive;
};

using SentenceKey = std::pair<std::string, std::size_t>;

}  // namespace

Vec encode_pair(const EmbeddingTable& table, std::span<const std::string> sentence_tokens,
                std::span<const std::string> title_tokens) {
    if (sentence_tokens.empty()) throw Error("cannot encode an empty sentence");
    return concat(pool_max(embed_tokens(table, sentence_tokens)), pooled_or_zero(table, title_tokens));
}

Vec PooledStaticEncoder::encode_pair(const Transcript&, const Sentence& sentence, const Tutorial& tutorial) const {
    // The None entry has a display title but encodes as an empty one.
    if (tutorial.is_none()) return streamlink::encode_pair(*table_, sentence.tokens, {});
    return streamlink::encode_pair(*table_, sentence.tokens, tutorial.title_tokens);
}

ExternalPairVectors ExternalPairVectors::parse(std::istream& in, const std::string& source) {
    ExternalPairVectors out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string transcript_id, index_text, tutorial_id;
        if (!(fields >> transcript_id)) continue;
        if (!(fields >> index_text >> tutorial_id)) {
            throw ParseError(source, line_no, "expected transcript id, sentence index, tutorial id and values");
        }
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
        if (ec != std::errc{} || ptr != index_text.data() + index_text.size()) {
            throw ParseError(source, line_no, "bad sentence index '" + index_text + "'");
        }
        std::vector<double> values;
        std::string field;
        while (fields >> field) {
            double v = 0.0;
            const auto [p, e] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (e != std::errc{} || p != field.data() + field.size()) {
                throw ParseError(source, line_no, "bad number '" + field + "'");
            }
            values.push_back(v);
        }
        if (values.empty()) throw ParseError(source, line_no, "pair vector has no values");
        if (out.dim_ == 0) out.dim_ = values.size();
        if (values.size() != out.dim_) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(out.dim_) + " values, found " + std::to_string(values.size()));
        }
        Vec v = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
        if (!out.vectors_.emplace(Key{transcript_id, index, tutorial_id}, std::move(v)).second) {
            throw ParseError(source, line_no, "duplicate pair " + pair_key(transcript_id, index, tutorial_id));
        }
    }
    if (out.vectors_.empty()) throw Error(source + ": pair vector file is empty");
    return out;
}

ExternalPairVectors ExternalPairVectors::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse(in, path.string());
}

Vec ExternalPairVectors::encode_pair(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const {
    auto it = vectors_.find(Key{doc.id, sentence.index, tutorial.id});
    if (it == vectors_.end()) {
        throw Error("no pair vector for " + pair_key(doc.id, sentence.index, tutorial.id));
    }
    return it->second;
}

void LinkClassifier::validate() const {
    if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
        throw Error("decision threshold must lie in (0, 1)");
    }
    if (negative_ratio < 1) throw Error("negative ratio must be at least 1");
    if (encoder && encoder->dim() != head.input_dim()) {
        throw Error("sentence encoder dimension does not match the link head");
    }
}

double LinkClassifier::probability(const Transcript& doc, const Sentence& sentence, const Tutorial& tutorial) const {
    if (!encoder) throw Error("link classifier has no encoder attached");
    return head.forward(encoder->encode_pair(doc, sentence, tutorial));
}

LinkClassifier train_link_classifier(std::span<const AnnotationRecord> annotations,
                                     std::span<const Transcript> transcripts, const TutorialPool& pool,
                                     std::shared_ptr<const SentenceEncoder> encoder, const TrainConfig& config,
                                     std::size_t negative_ratio, double decision_threshold, TrainLog* log) {
    config.validate();
    if (annotations.empty()) throw Error("link training needs at least one annotation");
    if (!encoder) throw Error("link training needs a sentence encoder");

    std::mt19937_64 rng(config.seed);
    LinkClassifier model;
    model.head = BinaryMlp::xavier(encoder->dim(), config.hidden_dim, rng);
    model.decision_threshold = decision_threshold;
    model.negative_ratio = negative_ratio;
    model.encoder = encoder;
    model.validate();

    std::map<SentenceKey, std::set<std::string>> links;
    std::set<std::string> annotated_docs;
    for (const auto& a : annotations) {
        annotated_docs.insert(a.transcript_id);
        auto& ids = links[{a.transcript_id, a.sentence_index}];
        for (const auto& id : a.linked_tutorial_ids) {
            if (id != kNoneTutorialId) ids.insert(id);
        }
    }

    std::vector<Example> examples;
    for (const auto& doc : transcripts) {
        if (!annotated_docs.contains(doc.id)) continue;
        for (const auto& sentence : doc.sentences) {
            auto it = links.find({doc.id, sentence.index});
            std::set<std::string> linked;
            if (it != links.end()) linked = it->second;
            if (linked.empty()) linked.insert(std::string(kNoneTutorialId));

            std::vector<const Tutorial*> unlinked;
            for (const auto& t : pool.tutorials()) {
                if (linked.contains(t.id)) {
                    examples.push_back({encoder->encode_pair(doc, sentence, t), true});
                } else {
                    unlinked.push_back(&t);
                }
            }
            std::vector<const Tutorial*> drawn;
            std::sample(unlinked.begin(), unlinked.end(), std::back_inserter(drawn),
                        std::min(negative_ratio, unlinked.size()), rng);
            for (const Tutorial* t : drawn) examples.push_back({encoder->encode_pair(doc, sentence, *t), false});
        }
    }
    if (examples.empty()) throw Error("annotations do not match any transcript sentence");

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        for (std::size_t k : order) {
            const Example& ex = examples[k];
            sum += backprop_and_step(
                model.head,
                [&](const BinaryMlp& head, BinaryMlp& grad) {
                    const double p = head.forward(ex.x);
                    head.backward(ex.x, bce_grad(p, ex.positive), grad);
                    return std::vector<LossTerm>{{"link", bce_loss(p, ex.positive)}};
                },
                config.learning_rate);
        }
        if (log) log->epoch_mean_loss.push_back(sum / static_cast<double>(order.size()));
    }
    return model;
}

std::vector<LinkScore> predict_links(const LinkClassifier& model, const Transcript& doc, const Sentence& sentence,
                                     const TutorialPool& pool) {
    std::vector<LinkScore> out;
    out.reserve(pool.size());
    for (const auto& t : pool.tutorials()) out.push_back({t.id, model.probability(doc, sentence, t)});
    std::sort(out.begin(), out.end(), [](const LinkScore& a, const LinkScore& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.tutorial_id < b.tutorial_id;
    });
    return out;
}

std::vector<std::string> linked_tutorials(std::span<const LinkScore> ranked, double decision_threshold) {
    double none_p = 0.0;
    for (const auto& s : ranked) {
        if (s.tutorial_id == kNoneTutorialId) none_p = s.probability;
    }
    std::vector<std::string> out;
    for (const auto& s : ranked) {
        if (s.tutorial_id != kNoneTutorialId && s.probability > decision_threshold && s.probability > none_p) {
            out.push_back(s.tutorial_id);
        }
    }
    return out;
}

std::vector<SentencePrediction> predict_corpus(const LinkClassifier& model, std::span<const Transcript> transcripts,
                                               const TutorialPool& pool) {
    std::vector<SentencePrediction> out;
    for (const auto& doc : transcripts) {
        for (const auto& sentence : doc.sentences) {
            out.push_back({doc.id, sentence.index, predict_links(model, doc, sentence, pool)});
        }
    }
    return out;
}

void write_predictions_jsonl(std::ostream& out, std::span<const SentencePrediction> predictions) {
    for (const auto& p : predictions) {
        nlohmann::ordered_json row;
        row["transcript_id"] = p.transcript_id;
        row["sentence_index"] = p.sentence_index;
        auto ranked = nlohmann::ordered_json::array();
        for (const auto& s : p.ranked) ranked.push_back({s.tutorial_id, s.probability});
        row["ranked"] = std::move(ranked);
        out << row.dump() << '\n';
    }
}

std::vector<SentencePrediction> parse_predictions_jsonl(std::istream& in, const std::string& source) {
    std::vector<SentencePrediction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto row = nlohmann::json::parse(line);
            SentencePrediction p;
            p.transcript_id = row.at("transcript_id").get<std::string>();
            p.sentence_index = row.at("sentence_index").get<std::size_t>();
            for (const auto& entry : row.at("ranked")) {
                p.ranked.push_back({entry.at(0).get<std::string>(), entry.at(1).get<double>()});
            }
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return out;
}

Checkpoint to_checkpoint(const LinkClassifier& model) {
    Checkpoint ckpt;
    ckpt.kind = "link";
    ckpt.meta["decision_threshold"] = format_double(model.decision_threshold);
    ckpt.meta["negative_ratio"] = std::to_string(model.negative_ratio);
    if (model.encoder) ckpt.meta["encoder"] = model.encoder->backend();
    export_params(model.head, "", ckpt);
    return ckpt;
}

LinkClassifier link_classifier_from_checkpoint(const Checkpoint& ckpt, std::shared_ptr<const SentenceEncoder> encoder) {
    if (ckpt.kind != "link") throw Error("expected a link checkpoint, found '" + ckpt.kind + "'");
    LinkClassifier model;
    import_params(model.head, "", ckpt);
    model.decision_threshold = std::stod(ckpt.meta_value("decision_threshold"));
    model.negative_ratio = std::stoul(ckpt.meta_value("negative_ratio"));
    model.encoder = std::move(encoder);
    model.validate();
    return model;
}

}  // namespace streamlink
