#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "streamlink/eval.hpp"
#include "streamlink/filter.hpp"
#include "streamlink/nn.hpp"
#include "streamlink/synth.hpp"

namespace streamlink {

struct EnginePaths {
    std::filesystem::path transcripts;
    std::filesystem::path tutorials;
    std::filesystem::path ontology;
    std::filesystem::path annotations;
    std::filesystem::path embeddings;
    std::filesystem::path model_dir;
    std::filesystem::path stats;               // default: model_dir/stats.txt
    std::filesystem::path contextual_vectors;  // optional token vectors for the summarizer
    std::filesystem::path pair_vectors;        // optional pair vectors for the link classifier
};

struct SupervisedSettings {
    TrainConfig train;
    std::size_t negative_ratio = 5;
    double decision_threshold = 0.5;
};

/// Everything a command needs. Built from a JSON file whose relative paths are
/// resolved against the file's directory; command-line flags are applied on top.
struct EngineConfig {
    EnginePaths paths;
    FilterConfig filter;
    TrainConfig summarizer;
    double summary_threshold = 0.5;
    TrainConfig ranker;
    SupervisedSettings supervised;
    Granularity granularity = Granularity::Transcript;
    std::vector<std::size_t> ks{3, 5};
    bool normalize = false;

    static EngineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static EngineConfig load(const std::filesystem::path& path);

    /// Uses `seed` for every trainer.
    void set_seed(std::uint64_t seed);
};

/// Runs the pipeline commands. Data goes to `out`, progress to `diag`.
class Engine {
public:
    explicit Engine(EngineConfig config);

    const EngineConfig& config() const { return config_; }

    void validate(std::ostream& out);
    void build_stats(std::ostream& diag);
    void train_summarizer(std::ostream& diag);
    void train_ranker(std::ostream& diag);
    void train_supervised(std::ostream& diag);
    /// Writes the top_k ranked tutorials for one transcript as jsonl.
    void recommend(const std::string& transcript_id, std::size_t top_k, std::ostream& out);
    /// Ranking systems: ours, string, keyword, pmi. "supervised" adds an F1 row.
    EvalReport evaluate(const std::vector<std::string>& systems);

    std::filesystem::path summarizer_path() const;
    std::filesystem::path discourse_path() const;
    std::filesystem::path link_path() const;

private:
    const CorpusBundle& bundle();
    std::shared_ptr<const EmbeddingTable> table();
    const CooccurrenceStats& stats();
    std::shared_ptr<const TokenEncoder> token_encoder();
    std::shared_ptr<const SentenceEncoder> sentence_encoder();
    void write_loss_log(const std::string& name, const TrainLog& log, std::ostream& diag) const;

    EngineConfig config_;
    std::optional<CorpusBundle> bundle_;
    std::shared_ptr<const EmbeddingTable> table_;
    std::optional<CooccurrenceStats> stats_;
};

}  // namespace streamlink
