#include "streamlink/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "streamlink/error.hpp"

namespace streamlink {
namespace {

constexpr std::string_view kToolConsonants = "bdgkmprstvz";
constexpr std::string_view kChatConsonants = "fhlnwy";
constexpr std::string_view kVowels = "aeiou";

const std::vector<std::string> kSuffixes = {"brush", "filter", "panel"};
const std::vector<std::string> kVerbs = {"retouch", "sketch", "blend", "shade", "frame"};
const std::vector<std::string> kFunctionWords = {"using", "the", "how", "to", "with", "and", "select", "then"};

std::string pseudo_word(std::string_view consonants, std::size_t syllables, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1);
    std::uniform_int_distribution<std::size_t> v(0, kVowels.size() - 1);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
        w += consonants[c(rng)];
        w += kVowels[v(rng)];
    }
    return w;
}

std::vector<std::string> distinct_words(std::size_t n, std::string_view consonants, std::size_t syllables,
                                        std::mt19937_64& rng) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        std::string w = pseudo_word(consonants, syllables, rng);
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

/// C(n, k), saturating at `cap`.
std::size_t choose_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (r >= static_cast<double>(cap)) return cap;
    }
    return static_cast<std::size_t>(r + 0.5);
}

std::vector<std::vector<std::size_t>> tool_subsets(const SynthConfig& c, std::mt19937_64& rng) {
    const std::size_t k = c.tools_per_tutorial;
    std::vector<std::vector<std::size_t>> out;
    if (c.tool_vocab_size >= c.num_tutorials * k) {
        std::vector<std::size_t> ids(c.tool_vocab_size);
        std::iota(ids.begin(), ids.end(), 0);
        std::shuffle(ids.begin(), ids.end(), rng);
        for (std::size_t t = 0; t < c.num_tutorials; ++t) {
            std::vector<std::size_t> s(ids.begin() + static_cast<std::ptrdiff_t>(t * k),
                                       ids.begin() + static_cast<std::ptrdiff_t>((t + 1) * k));
            std::sort(s.begin(), s.end());
            out.push_back(std::move(s));
        }
        return out;
    }
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> ids(c.tool_vocab_size);
    std::iota(ids.begin(), ids.end(), 0);
    while (out.size() < c.num_tutorials) {
        std::vector<std::size_t> s;
        std::sample(ids.begin(), ids.end(), std::back_inserter(s), k, rng);
        std::shuffle(s.begin(), s.end(), rng);
        std::vector<std::size_t> key = s;
        std::sort(key.begin(), key.end());
        if (seen.insert(key).second) out.push_back(std::move(s));
    }
    return out;
}

Vec unit_normal(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(rng);
    return v / v.norm();
}

std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string sentence_text(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return capitalized(out) + ".";
}

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    return s == "-0.000000" ? "0.000000" : s;
}

}  // namespace

void SynthConfig::validate() const {
    if (num_tutorials == 0 || num_transcripts == 0 || tools_per_tutorial == 0 || transcript_length == 0 ||
        sentence_length == 0 || chitchat_vocab_size == 0 || tool_vocab_size == 0 || embedding_dim == 0) {
        throw Error("synthetic corpus counts must all be at least 1");
    }
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw Error("noise rate must lie in [0, 1]");
    if (!(embedding_scale > 0.0)) throw Error("embedding scale must be positive");
    if (choose_capped(tool_vocab_size, tools_per_tutorial, num_tutorials) < num_tutorials) {
        throw Error("infeasible synthetic config: " + std::to_string(tool_vocab_size) + " tools cannot form " +
                    std::to_string(num_tutorials) + " distinct subsets of size " +
                    std::to_string(tools_per_tutorial));
    }
    // The word generators draw until they find enough distinct words.
    if (tool_vocab_size > 100000 || chitchat_vocab_size > 100000) throw Error("synthetic vocabulary too large");
}

EmbeddingTable SynthCorpus::embedding_table() const {
    if (vectors.empty()) throw Error("synthetic corpus has no embeddings");
    EmbeddingTable table(vectors.front().size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        table.set(vocabulary[i],
                  Eigen::Map<const Vec>(vectors[i].data(), static_cast<Eigen::Index>(vectors[i].size())));
    }
    return table;
}

SynthCorpus generate_corpus(const SynthConfig& c) {
    c.validate();
    std::mt19937_64 rng(c.seed);

    // Tool phrases: a three-syllable word, every third one followed by a suffix.
    const auto tool_words = distinct_words(c.tool_vocab_size, kToolConsonants, 3, rng);
    std::vector<std::vector<std::string>> tools;
    for (std::size_t i = 0; i < tool_words.size(); ++i) {
        std::vector<std::string> phrase{tool_words[i]};
        if (i % 3 == 2) phrase.push_back(kSuffixes[(i / 3) % kSuffixes.size()]);
        tools.push_back(std::move(phrase));
    }
    const auto chitchat = distinct_words(c.chitchat_vocab_size, kChatConsonants, 2 + c.chitchat_vocab_size / 150, rng);
    const auto subsets = tool_subsets(c, rng);

    std::uniform_int_distribution<std::size_t> pick_chat(0, chitchat.size() - 1);
    auto chat = [&] { return chitchat[pick_chat(rng)]; };
    auto append = [](std::vector<std::string>& words, const std::vector<std::string>& phrase) {
        words.insert(words.end(), phrase.begin(), phrase.end());
    };

    SynthCorpus out;
    std::vector<Tutorial> tutorials;
    for (std::size_t t = 0; t < c.num_tutorials; ++t) {
        const auto& mine = subsets[t];
        Tutorial tut;
        char id[32];
        std::snprintf(id, sizeof id, "tut%03zu", t);
        tut.id = id;
        std::vector<std::string> title;
        if (t % 2 == 0 || mine.size() == 1) {
            tut.kind = TutorialKind::Using;
            title = {"using", "the"};
            append(title, tools[mine[0]]);
        } else {
            tut.kind = TutorialKind::HowTo;
            title = {"how", "to", kVerbs[t % kVerbs.size()], "with", "the"};
            append(title, tools[mine[0]]);
            title.push_back("and");
            append(title, tools[mine[1]]);
        }
        tut.title = sentence_text(title);
        tut.title.pop_back();
        std::string body;
        for (std::size_t tool : mine) {
            std::vector<std::string> s{"select", "the"};
            append(s, tools[tool]);
            s.push_back("then");
            s.push_back(chat());
            s.push_back(chat());
            if (!body.empty()) body += ' ';
            body += sentence_text(s);
        }
        body += ' ' + sentence_text({chat(), chat(), chat(), chat()});
        tut.body = body;
        tut.title_tokens = tokenize(tut.title);
        tut.body_tokens = tokenize(tut.body);
        tutorials.push_back(std::move(tut));
    }
    out.bundle.pool = TutorialPool(tutorials);
    for (const auto& phrase : tools) out.bundle.ontology.add(join_tokens(phrase));

    std::bernoulli_distribution is_noise(c.noise_rate);
    std::uniform_int_distribution<std::size_t> pick_tool(0, c.tools_per_tutorial - 1);
    for (std::size_t d = 0; d < c.num_transcripts; ++d) {
        const std::size_t g = d % c.num_tutorials;
        const auto& mine = subsets[g];
        Transcript doc;
        char id[32];
        std::snprintf(id, sizeof id, "live%03zu", d);
        doc.id = id;
        std::size_t mentions = 0;
        for (std::size_t s = 0; s < c.transcript_length; ++s) {
            std::vector<std::string> words;
            bool mentions_tool = false;
            for (std::size_t slot = 0; slot < c.sentence_length; ++slot) {
                if (is_noise(rng)) {
                    words.push_back(chat());
                    continue;
                }
                const std::size_t which = mentions < mine.size() ? mentions : pick_tool(rng);
                append(words, tools[mine[which]]);
                ++mentions;
                mentions_tool = true;
            }
            Sentence sentence;
            sentence.index = s;
            sentence.text = sentence_text(words);
            sentence.tokens = tokenize(sentence.text);
            doc.sentences.push_back(std::move(sentence));
            out.bundle.annotations.push_back(
                {doc.id, s, {mentions_tool ? out.bundle.pool.tutorials()[g].id : std::string(kNoneTutorialId)}});
        }
        out.bundle.transcripts.push_back(std::move(doc));
        out.gold.push_back(out.bundle.pool.tutorials()[g].id);
    }

    // Embeddings: tool words lean towards their tutorial's direction, all tool
    // words share a positive domain component and chitchat a negative one.
    // Directions are coordinate axes when they fit, so max-pooling keeps them
    // apart; otherwise they are random.
    const std::size_t dim = c.embedding_dim;
    const bool axes = c.num_tutorials + 1 <= dim;
    auto direction = [&](std::size_t axis) {
        if (!axes) return unit_normal(dim, rng);
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
        v[static_cast<Eigen::Index>(axis)] = 1.0;
        return v;
    };
    const Vec domain = direction(c.num_tutorials);
    std::vector<Vec> cluster;
    for (std::size_t t = 0; t < c.num_tutorials; ++t) cluster.push_back(direction(t));
    std::map<std::string, Vec> vectors;
    for (std::size_t i = 0; i < tool_words.size(); ++i) {
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t t = 0; t < c.num_tutorials; ++t) {
            if (std::find(subsets[t].begin(), subsets[t].end(), i) != subsets[t].end()) v += cluster[t];
        }
        vectors[tool_words[i]] = v + 0.5 * domain + 0.35 * unit_normal(dim, rng);
    }
    for (const auto& w : kSuffixes) vectors[w] = unit_normal(dim, rng);
    for (const auto& w : chitchat) vectors[w] = -0.5 * domain + unit_normal(dim, rng);
    for (const auto& w : kFunctionWords) vectors[w] = -0.5 * domain + unit_normal(dim, rng);
    for (const auto& w : kVerbs) vectors[w] = -0.5 * domain + unit_normal(dim, rng);
    for (auto& [word, v] : vectors) {
        v *= c.embedding_scale / v.norm();
        std::vector<double> rounded(dim);
        for (std::size_t k = 0; k < dim; ++k) rounded[k] = std::stod(fixed6(v[static_cast<Eigen::Index>(k)]));
        out.vocabulary.push_back(word);
        out.vectors.push_back(std::move(rounded));
    }
    return out;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("transcripts.jsonl");
        write_transcripts(f, corpus.bundle.transcripts);
    }
    {
        auto f = open("tutorials.jsonl");
        write_tutorial_pool(f, corpus.bundle.pool);
    }
    {
        auto f = open("ontology.txt");
        write_ontology(f, corpus.bundle.ontology);
    }
    {
        auto f = open("annotations.jsonl");
        write_annotations(f, corpus.bundle.annotations);
    }
    {
        auto f = open("embeddings.txt");
        for (std::size_t i = 0; i < corpus.vocabulary.size(); ++i) {
            f << corpus.vocabulary[i];
            for (double v : corpus.vectors[i]) f << ' ' << fixed6(v);
            f << '\n';
        }
    }
    {
        nlohmann::ordered_json config;
        config["paths"] = {{"transcripts", "transcripts.jsonl"}, {"tutorials", "tutorials.jsonl"},
                           {"ontology", "ontology.txt"},         {"annotations", "annotations.jsonl"},
                           {"embeddings", "embeddings.txt"},     {"model_dir", "models"}};
        auto f = open("streamlink.json");
        f << config.dump(2) << '\n';
    }
}

}  // namespace streamlink
