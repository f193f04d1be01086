#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "streamlink/corpus.hpp"

namespace streamlink {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Static word vectors with a subword fallback for unknown tokens.
///
/// An unknown token is embedded as the mean of the vectors of its character
/// trigrams, each trigram hashed into one of `oov_buckets` fixed pseudo-random
/// unit vectors derived from `seed`. Tokens shorter than three characters use
/// the bucket of the whole token.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim, std::size_t oov_buckets = 4096, std::uint64_t seed = 0x5eedULL);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    std::size_t oov_buckets() const { return oov_buckets_; }
    std::uint64_t seed() const { return seed_; }

    /// Stores a vector. Returns true when it replaced an existing entry.
    bool set(const std::string& token, Vec vector);
    const Vec* find(std::string_view token) const;

    Vec bucket_vector(std::size_t bucket) const;
    std::size_t bucket_of(std::string_view piece) const;

private:
    std::size_t dim_;
    std::size_t oov_buckets_;
    std::uint64_t seed_;
    std::unordered_map<std::string, Vec> vectors_;
};

/// Reads "token v1 ... vd" lines. d comes from the first line; a leading
/// "<count> <dim>" header line, as written by word2vec and fastText, is skipped.
/// Duplicate tokens keep the last vector and emit a warning.
EmbeddingTable parse_embeddings(std::istream& in, const std::string& source, std::size_t oov_buckets = 4096,
                                std::uint64_t seed = 0x5eedULL);
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t oov_buckets = 4096,
                               std::uint64_t seed = 0x5eedULL);

Vec embed_word(const EmbeddingTable& table, std::string_view token);
std::vector<Vec> embed_tokens(const EmbeddingTable& table, std::span<const std::string> tokens);

// Pooling throws Error on an empty list or mismatched dimensions.
Vec pool_max(std::span<const Vec> vectors);
Vec pool_mean(std::span<const Vec> vectors);
/// Cosine similarity; 0 when either vector has zero norm.
double cosine(const Vec& u, const Vec& v);

/// Source of per-token vectors for a transcript.
class TokenEncoder {
public:
    virtual ~TokenEncoder() = default;
    virtual std::size_t dim() const = 0;
    /// One vector per token of doc.tokens(), in order.
    virtual std::vector<Vec> encode(const Transcript& doc) const = 0;
};

class StaticEncoder final : public TokenEncoder {
public:
    explicit StaticEncoder(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}

    std::size_t dim() const override { return table_->dim(); }
    std::vector<Vec> encode(const Transcript& doc) const override;
    const EmbeddingTable& table() const { return *table_; }

private:
    std::shared_ptr<const EmbeddingTable> table_;
};

/// Precomputed per-token vectors, e.g. from a contextual encoder run elsewhere.
/// File lines are "transcript_id token_index v1 ... vd".
class ContextualVectors final : public TokenEncoder {
public:
    static ContextualVectors parse(std::istream& in, const std::string& source);
    static ContextualVectors load(const std::filesystem::path& path);

    std::size_t dim() const override { return dim_; }
    /// Throws Error if the transcript is missing or its vector count differs
    /// from its token count.
    std::vector<Vec> encode(const Transcript& doc) const override;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<Vec>> docs_;
};

}  // namespace streamlink
