#include "streamlink/engine.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "streamlink/ranker.hpp"
#include "streamlink/summarizer.hpp"

namespace streamlink {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw Error("config: '" + where + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw Error("config: unknown key '" + key + "' in '" + where + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& into) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            into = it->get<T>();
        } catch (const json::exception&) {
            throw Error(std::string("config: bad value for '") + key + "'");
        }
    }
}

void read_train(const json& j, const std::string& where, TrainConfig& c, std::set<std::string> extra = {}) {
    extra.insert({"learning_rate", "epochs", "seed", "alpha", "beta", "loss_mix_alpha", "loss_mix_beta",
                  "hidden_dim"});
    check_keys(j, where, extra);
    read(j, "learning_rate", c.learning_rate);
    read(j, "epochs", c.epochs);
    read(j, "seed", c.seed);
    read(j, "alpha", c.alpha);
    read(j, "beta", c.beta);
    read(j, "loss_mix_alpha", c.loss_mix_alpha);
    read(j, "loss_mix_beta", c.loss_mix_beta);
    read(j, "hidden_dim", c.hidden_dim);
}

void require_file(const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw Error(std::string("config: no ") + what + " path set");
    if (!std::filesystem::exists(p)) throw Error(std::string(what) + " not found: " + p.string());
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

EngineConfig EngineConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    EngineConfig c;
    check_keys(j, "config",
               {"paths", "seed", "filter", "summarizer", "ranker", "supervised", "eval", "normalize"});

    const json paths = j.value("paths", json::object());
    check_keys(paths, "paths",
               {"transcripts", "tutorials", "ontology", "annotations", "embeddings", "model_dir", "stats",
                "contextual_vectors", "pair_vectors"});
    auto path = [&](const char* key) { return resolve(base_dir, paths.value(key, std::string())); };
    c.paths.transcripts = path("transcripts");
    c.paths.tutorials = path("tutorials");
    c.paths.ontology = path("ontology");
    c.paths.annotations = path("annotations");
    c.paths.embeddings = path("embeddings");
    c.paths.model_dir = path("model_dir");
    if (c.paths.model_dir.empty()) c.paths.model_dir = base_dir / "models";
    c.paths.stats = path("stats");
    if (c.paths.stats.empty()) c.paths.stats = c.paths.model_dir / "stats.txt";
    c.paths.contextual_vectors = path("contextual_vectors");
    c.paths.pair_vectors = path("pair_vectors");

    if (j.contains("seed")) {
        std::uint64_t seed = 0;
        read(j, "seed", seed);
        c.set_seed(seed);
    }

    if (auto it = j.find("filter"); it != j.end()) {
        check_keys(*it, "filter", {"delta", "fallback_min_keep"});
        if (auto d = it->find("delta"); d != it->end() && !d->is_null()) read(*it, "delta", c.filter.delta);
        read(*it, "fallback_min_keep", c.filter.fallback_min_keep);
    }
    if (auto it = j.find("summarizer"); it != j.end()) {
        read_train(*it, "summarizer", c.summarizer, {"threshold"});
        read(*it, "threshold", c.summary_threshold);
    }
    if (auto it = j.find("ranker"); it != j.end()) read_train(*it, "ranker", c.ranker);
    if (auto it = j.find("supervised"); it != j.end()) {
        read_train(*it, "supervised", c.supervised.train, {"negative_ratio", "decision_threshold"});
        read(*it, "negative_ratio", c.supervised.negative_ratio);
        read(*it, "decision_threshold", c.supervised.decision_threshold);
    }
    if (auto it = j.find("eval"); it != j.end()) {
        check_keys(*it, "eval", {"granularity", "ks"});
        if (it->contains("granularity")) c.granularity = parse_granularity(it->at("granularity").get<std::string>());
        read(*it, "ks", c.ks);
    }
    read(j, "normalize", c.normalize);
    return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

void EngineConfig::set_seed(std::uint64_t seed) {
    summarizer.seed = seed;
    ranker.seed = seed;
    supervised.train.seed = seed;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {}

std::filesystem::path Engine::summarizer_path() const { return config_.paths.model_dir / "summarizer.ckpt"; }
std::filesystem::path Engine::discourse_path() const { return config_.paths.model_dir / "discourse.ckpt"; }
std::filesystem::path Engine::link_path() const { return config_.paths.model_dir / "link.ckpt"; }

const CorpusBundle& Engine::bundle() {
    if (!bundle_) {
        require_file(config_.paths.transcripts, "transcripts");
        require_file(config_.paths.tutorials, "tutorials");
        require_file(config_.paths.ontology, "ontology");
        if (!config_.paths.annotations.empty()) require_file(config_.paths.annotations, "annotations");
        bundle_ = load_bundle({config_.paths.transcripts, config_.paths.tutorials, config_.paths.ontology,
                               config_.paths.annotations});
    }
    return *bundle_;
}

std::shared_ptr<const EmbeddingTable> Engine::table() {
    if (!table_) {
        require_file(config_.paths.embeddings, "embeddings");
        table_ = std::make_shared<const EmbeddingTable>(load_embeddings(config_.paths.embeddings));
    }
    return table_;
}

const CooccurrenceStats& Engine::stats() {
    if (!stats_) {
        std::filesystem::create_directories(config_.paths.stats.parent_path());
        stats_ = load_or_build_stats(config_.paths.stats, bundle().transcripts);
    }
    return *stats_;
}

std::shared_ptr<const TokenEncoder> Engine::token_encoder() {
    if (!config_.paths.contextual_vectors.empty()) {
        require_file(config_.paths.contextual_vectors, "contextual vectors");
        return std::make_shared<const ContextualVectors>(ContextualVectors::load(config_.paths.contextual_vectors));
    }
    return std::make_shared<const StaticEncoder>(table());
}

std::shared_ptr<const SentenceEncoder> Engine::sentence_encoder() {
    if (!config_.paths.pair_vectors.empty()) {
        require_file(config_.paths.pair_vectors, "pair vectors");
        return std::make_shared<const ExternalPairVectors>(ExternalPairVectors::load(config_.paths.pair_vectors));
    }
    return std::make_shared<const PooledStaticEncoder>(table());
}

void Engine::write_loss_log(const std::string& name, const TrainLog& log, std::ostream& diag) const {
    const auto path = config_.paths.model_dir / (name + ".loss.tsv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "epoch\tloss\n";
    for (std::size_t e = 0; e < log.epoch_mean_loss.size(); ++e) {
        out << e + 1 << '\t' << format_double(log.epoch_mean_loss[e]) << '\n';
    }
    if (!log.epoch_mean_loss.empty()) {
        diag << name << ": " << log.epoch_mean_loss.size() << " epochs, loss " << log.epoch_mean_loss.front()
             << " -> " << log.epoch_mean_loss.back() << '\n';
    }
}

void Engine::validate(std::ostream& out) {
    const auto& b = bundle();
    std::size_t sentences = 0;
    std::size_t tokens = 0;
    for (const auto& t : b.transcripts) {
        sentences += t.sentences.size();
        tokens += t.token_count();
    }
    std::size_t using_count = 0;
    std::size_t howto_count = 0;
    for (const Tutorial* t : b.pool.candidates()) (t->kind == TutorialKind::Using ? using_count : howto_count)++;
    std::size_t with_tools = 0;
    for (const auto& t : b.transcripts) with_tools += match_tool_names(t, b.ontology).empty() ? 0 : 1;

    out << "transcripts: " << b.transcripts.size() << '\n';
    out << "sentences: " << sentences << '\n';
    out << "tokens: " << tokens << '\n';
    out << "transcripts mentioning tools: " << with_tools << '\n';
    out << "tutorials: " << b.pool.candidates().size() << " (using " << using_count << ", howto " << howto_count
        << ")\n";
    out << "tool names: " << b.ontology.size() << '\n';
    out << "annotations: " << b.annotations.size() << '\n';
    if (!config_.paths.embeddings.empty()) {
        const auto t = table();
        out << "embeddings: " << t->size() << " x " << t->dim() << '\n';
    }
}

void Engine::build_stats(std::ostream& diag) {
    const auto& s = stats();
    diag << "stats: " << s.num_docs() << " documents, " << s.vocab_size() << " words, " << s.num_pairs()
         << " pairs -> " << config_.paths.stats.string() << '\n';
}

void Engine::train_summarizer(std::ostream& diag) {
    std::filesystem::create_directories(config_.paths.model_dir);
    TrainLog log;
    const auto model =
        streamlink::train_summarizer(bundle().transcripts, token_encoder(), config_.summarizer,
                                     config_.summary_threshold, &log);
    save_checkpoint(summarizer_path(), to_checkpoint(model));
    write_loss_log("summarizer", log, diag);
}

void Engine::train_ranker(std::ostream& diag) {
    std::filesystem::create_directories(config_.paths.model_dir);
    TrainLog log;
    const auto model = train_discourse_classifier(bundle().transcripts, *table(), config_.ranker, &log);
    save_checkpoint(discourse_path(), to_checkpoint(model));
    write_loss_log("discourse", log, diag);
    diag << "discourse accuracy: " << discourse_accuracy(model, bundle().transcripts, *table(), config_.ranker.seed)
         << '\n';
}

void Engine::train_supervised(std::ostream& diag) {
    std::filesystem::create_directories(config_.paths.model_dir);
    const auto& b = bundle();
    if (b.annotations.empty()) throw Error("train-supervised needs annotations");
    TrainLog log;
    const auto model = train_link_classifier(b.annotations, b.transcripts, b.pool, sentence_encoder(),
                                             config_.supervised.train, config_.supervised.negative_ratio,
                                             config_.supervised.decision_threshold, &log);
    save_checkpoint(link_path(), to_checkpoint(model));
    write_loss_log("link", log, diag);
}

void Engine::recommend(const std::string& transcript_id, std::size_t top_k, std::ostream& out) {
    if (top_k == 0) throw Error("--top-k must be at least 1");
    const auto& b = bundle();
    const Transcript* doc = b.find_transcript(transcript_id);
    if (!doc) throw Error("unknown transcript '" + transcript_id + "'");
    require_file(summarizer_path(), "summarizer checkpoint (run train-summarizer)");
    require_file(discourse_path(), "discourse checkpoint (run train-ranker)");
    const auto summarizer = summarizer_from_checkpoint(load_checkpoint(summarizer_path()), token_encoder());
    const auto discourse = discourse_from_checkpoint(load_checkpoint(discourse_path()));
    const Recommender recommender(b.pool, b.ontology, stats(), summarizer, discourse, *table(), config_.filter,
                                  {.normalize = config_.normalize});
    RankedList list = recommender.rank(*doc);
    if (list.entries.size() > top_k) list.entries.resize(top_k);
    write_ranked_jsonl(out, doc->id, list);
}

EvalReport Engine::evaluate(const std::vector<std::string>& systems) {
    if (systems.empty()) throw Error("no systems to evaluate");
    const auto& b = bundle();
    if (b.annotations.empty()) throw Error("evaluate needs annotations");

    std::optional<SummarizerModel> summarizer;
    std::optional<DiscourseClassifier> discourse;
    std::optional<Recommender> ours;
    std::vector<RankingSystem> ranking;
    bool supervised = false;
    for (const auto& name : systems) {
        if (name == "ours") {
            require_file(summarizer_path(), "summarizer checkpoint (run train-summarizer)");
            require_file(discourse_path(), "discourse checkpoint (run train-ranker)");
            summarizer = summarizer_from_checkpoint(load_checkpoint(summarizer_path()), token_encoder());
            discourse = discourse_from_checkpoint(load_checkpoint(discourse_path()));
            ours.emplace(b.pool, b.ontology, stats(), *summarizer, *discourse, *table(), config_.filter,
                         RankOptions{.normalize = config_.normalize});
            ranking.push_back({name, [&](const Transcript& d) { return ours->rank(d); }});
        } else if (name == "string") {
            auto t = table();
            ranking.push_back({name, [&b, t](const Transcript& d) { return baseline_string_similarity(d, b.pool, *t); }});
        } else if (name == "keyword") {
            ranking.push_back({name, [&b](const Transcript& d) { return baseline_keyword(d, b.pool, b.ontology); }});
        } else if (name == "pmi") {
            const auto& s = stats();
            ranking.push_back({name, [&b, &s](const Transcript& d) { return baseline_information(d, b.pool, s); }});
        } else if (name == "supervised") {
            supervised = true;
        } else {
            throw Error("unknown system '" + name + "' (expected ours, string, keyword, pmi or supervised)");
        }
    }

    EvalReport report;
    if (!ranking.empty()) report = evaluate_unsupervised(b, ranking, config_.ks, config_.granularity);
    if (supervised) {
        require_file(link_path(), "link checkpoint (run train-supervised)");
        const auto model = link_classifier_from_checkpoint(load_checkpoint(link_path()), sentence_encoder());
        std::set<std::string> annotated;
        for (const auto& a : b.annotations) annotated.insert(a.transcript_id);
        std::vector<Transcript> docs;
        for (const auto& t : b.transcripts) {
            if (annotated.contains(t.id)) docs.push_back(t);
        }
        const auto predictions = predict_corpus(model, docs, b.pool);
        report.rows.push_back(
            evaluate_supervised("supervised", predictions, b.annotations, model.decision_threshold));
    }
    return report;
}

}  // namespace streamlink
