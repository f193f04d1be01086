#include "streamlink/embed.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "streamlink/error.hpp"
#include "streamlink/log.hpp"

namespace streamlink {
namespace {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Byte offsets where UTF-8 characters start, plus the end offset.
std::vector<std::size_t> char_starts(std::string_view s) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) starts.push_back(i);
    }
    starts.push_back(s.size());
    return starts;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool parse_double(std::string_view field, double& out) {
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool is_unsigned_integer(std::string_view field) {
    return !field.empty() && std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void require_same_dim(std::span<const Vec> vectors) {
    if (vectors.empty()) throw Error("cannot pool an empty list of vectors");
    for (const auto& v : vectors) {
        if (v.size() != vectors.front().size()) throw Error("cannot pool vectors of different dimensions");
    }
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, std::size_t oov_buckets, std::uint64_t seed)
    : dim_(dim), oov_buckets_(oov_buckets), seed_(seed) {
    if (dim == 0) throw Error("embedding dimension must be positive");
    if (oov_buckets == 0) throw Error("need at least one OOV bucket");
}

bool EmbeddingTable::set(const std::string& token, Vec vector) {
    if (static_cast<std::size_t>(vector.size()) != dim_) {
        throw Error("vector for '" + token + "' has dimension " + std::to_string(vector.size()) + ", expected " +
                    std::to_string(dim_));
    }
    auto [it, inserted] = vectors_.insert_or_assign(token, std::move(vector));
    return !inserted;
}

const Vec* EmbeddingTable::find(std::string_view token) const {
    auto it = vectors_.find(std::string(token));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::size_t EmbeddingTable::bucket_of(std::string_view piece) const {
    return static_cast<std::size_t>(fnv1a(piece) % oov_buckets_);
}

Vec EmbeddingTable::bucket_vector(std::size_t bucket) const {
    std::mt19937_64 rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (bucket + 1)));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec v(static_cast<Eigen::Index>(dim_));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    const double norm = v.norm();
    return norm > 0.0 ? Vec(v / norm) : v;
}

EmbeddingTable parse_embeddings(std::istream& in, const std::string& source, std::size_t oov_buckets,
                                std::uint64_t seed) {
    std::unique_ptr<EmbeddingTable> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (!table && fields.size() == 2 && is_unsigned_integer(fields[0]) && is_unsigned_integer(fields[1])) {
            continue;  // word2vec-style header
        }
        if (fields.size() < 2) throw ParseError(source, line_no, "expected a token followed by values");
        const std::size_t dim = fields.size() - 1;
        if (!table) table = std::make_unique<EmbeddingTable>(dim, oov_buckets, seed);
        if (dim != table->dim()) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(table->dim()) + " values, found " + std::to_string(dim));
        }
        Vec v(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_double(fields[k + 1], v[static_cast<Eigen::Index>(k)])) {
                throw ParseError(source, line_no, "bad number '" + std::string(fields[k + 1]) + "'");
            }
        }
        const std::string token(fields[0]);
        if (table->set(token, std::move(v))) {
            warn(source + ":" + std::to_string(line_no) + ": duplicate embedding for '" + token +
                 "', keeping the last one");
        }
    }
    if (!table) throw Error(source + ": embedding file is empty");
    return std::move(*table);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t oov_buckets, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_embeddings(in, path.string(), oov_buckets, seed);
}

Vec embed_word(const EmbeddingTable& table, std::string_view token) {
    if (const Vec* v = table.find(token)) return *v;
    const auto starts = char_starts(token);
    const std::size_t chars = starts.size() - 1;
    if (chars < 3) return table.bucket_vector(table.bucket_of(token));

    Vec sum = Vec::Zero(static_cast<Eigen::Index>(table.dim()));
    for (std::size_t c = 0; c + 3 <= chars; ++c) {
        sum += table.bucket_vector(table.bucket_of(token.substr(starts[c], starts[c + 3] - starts[c])));
    }
    return sum / static_cast<double>(chars - 2);
}

std::vector<Vec> embed_tokens(const EmbeddingTable& table, std::span<const std::string> tokens) {
    std::vector<Vec> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(embed_word(table, t));
    return out;
}

Vec pool_max(std::span<const Vec> vectors) {
    require_same_dim(vectors);
    Vec out = vectors.front();
    for (std::size_t i = 1; i < vectors.size(); ++i) out = out.cwiseMax(vectors[i]);
    return out;
}

Vec pool_mean(std::span<const Vec> vectors) {
    require_same_dim(vectors);
    Vec out = Vec::Zero(vectors.front().size());
    for (const auto& v : vectors) out += v;
    return out / static_cast<double>(vectors.size());
}

double cosine(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw Error("cosine of vectors with different dimensions");
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<Vec> StaticEncoder::encode(const Transcript& doc) const {
    return embed_tokens(*table_, doc.tokens());
}

ContextualVectors ContextualVectors::parse(std::istream& in, const std::string& source) {
    ContextualVectors out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() < 3) throw ParseError(source, line_no, "expected transcript id, token index and values");
        const std::size_t dim = fields.size() - 2;
        if (out.dim_ == 0) out.dim_ = dim;
        if (dim != out.dim_) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(out.dim_) + " values, found " + std::to_string(dim));
        }
        if (!is_unsigned_integer(fields[1])) throw ParseError(source, line_no, "bad token index");
        const std::size_t index = std::stoul(std::string(fields[1]));
        auto& vectors = out.docs_[std::string(fields[0])];
        if (index != vectors.size()) {
            throw ParseError(source, line_no, "token indices must be contiguous from 0 per transcript");
        }
        Vec v(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_double(fields[k + 2], v[static_cast<Eigen::Index>(k)])) {
                throw ParseError(source, line_no, "bad number '" + std::string(fields[k + 2]) + "'");
            }
        }
        vectors.push_back(std::move(v));
    }
    if (out.docs_.empty()) throw Error(source + ": contextual vector file is empty");
    return out;
}

ContextualVectors ContextualVectors::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse(in, path.string());
}

std::vector<Vec> ContextualVectors::encode(const Transcript& doc) const {
    auto it = docs_.find(doc.id);
    if (it == docs_.end()) throw Error("no contextual vectors for transcript '" + doc.id + "'");
    if (it->second.size() != doc.token_count()) {
        throw Error("transcript '" + doc.id + "' has " + std::to_string(doc.token_count()) + " tokens but " +
                    std::to_string(it->second.size()) + " contextual vectors");
    }
    return it->second;
}

}  // namespace streamlink
