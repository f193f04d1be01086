#include "streamlink/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace streamlink {
namespace {

RankedList sorted_by_score(const TutorialPool& pool, const std::function<double(const Tutorial&)>& score) {
    RankedList list;
    for (const Tutorial* t : pool.candidates()) {
        const double s = score(*t);
        list.entries.push_back({t->id, s, 0.0, s});
    }
    sort_ranked(list.entries);
    return list;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
    return buf;
}

double round6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::stod(buf);
}

}  // namespace

int hit_at_k(std::span<const std::string> ranked, const std::set<std::string>& gold, std::size_t k) {
    if (k == 0) throw Error("hit@k needs k >= 1");
    if (gold.empty()) throw Error("hit@k needs a non-empty gold set");
    const std::size_t n = std::min(k, ranked.size());
    for (std::size_t r = 0; r < n; ++r) {
        if (gold.contains(ranked[r])) return 1;
    }
    return 0;
}

F1Score micro_f1(const std::set<LinkPair>& predicted, const std::set<LinkPair>& gold) {
    F1Score s;
    for (const auto& p : predicted) {
        if (gold.contains(p)) {
            ++s.true_positives;
        } else {
            ++s.false_positives;
        }
    }
    s.false_negatives = gold.size() - s.true_positives;
    if (s.true_positives == 0) return s;
    s.precision = static_cast<double>(s.true_positives) / static_cast<double>(predicted.size());
    s.recall = static_cast<double>(s.true_positives) / static_cast<double>(gold.size());
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

RankedList baseline_string_similarity(const Transcript& doc, const TutorialPool& pool, const EmbeddingTable& table) {
    const Tokens tokens = doc.tokens();
    const Vec doc_mean = pool_mean(embed_tokens(table, tokens));
    return sorted_by_score(pool, [&](const Tutorial& t) {
        const Tokens tt = t.all_tokens();
        return tt.empty() ? 0.0 : cosine(pool_mean(embed_tokens(table, tt)), doc_mean);
    });
}

RankedList baseline_keyword(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology) {
    const std::set<std::string> names = match_tool_names(doc, ontology);
    return sorted_by_score(pool, [&](const Tutorial& t) {
        std::set<std::string> present = ontology.match(t.title_tokens);
        present.merge(ontology.match(t.body_tokens));
        return static_cast<double>(std::count_if(present.begin(), present.end(),
                                                 [&](const std::string& n) { return names.contains(n); }));
    });
}

RankedList baseline_information(const Transcript& doc, const TutorialPool& pool, const CooccurrenceStats& stats) {
    return sorted_by_score(pool, [&](const Tutorial& t) { return pmi_similarity(stats, doc, t); });
}

Granularity parse_granularity(std::string_view text) {
    if (text == "transcript") return Granularity::Transcript;
    if (text == "sentence") return Granularity::Sentence;
    throw Error("unknown granularity '" + std::string(text) + "' (expected transcript or sentence)");
}

std::string_view to_string(Granularity g) {
    return g == Granularity::Transcript ? "transcript" : "sentence";
}

const SystemRow& EvalReport::row(std::string_view system) const {
    for (const auto& r : rows) {
        if (r.system == system) return r;
    }
    throw Error("no report row for system '" + std::string(system) + "'");
}

void EvalReport::write_table(std::ostream& out) const {
    std::set<std::size_t> ks;
    bool has_f1 = false;
    for (const auto& r : rows) {
        for (const auto& [k, v] : r.hit_at) ks.insert(k);
        has_f1 = has_f1 || r.f1.has_value();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-12s %7s", "system", "units");
    out << buf;
    for (std::size_t k : ks) {
        std::snprintf(buf, sizeof buf, " %8s", ("Hit@" + std::to_string(k)).c_str());
        out << buf;
    }
    if (has_f1) out << "        F1";
    out << '\n';
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-12s %7zu", r.system.c_str(), r.units);
        out << buf;
        for (std::size_t k : ks) {
            auto it = r.hit_at.find(k);
            std::snprintf(buf, sizeof buf, " %8s", it == r.hit_at.end() ? "-" : percent(it->second).c_str());
            out << buf;
        }
        if (has_f1) {
            std::snprintf(buf, sizeof buf, " %9s", r.f1 ? percent(r.f1->f1).c_str() : "-");
            out << buf;
        }
        out << '\n';
    }
    if (!granularity.empty()) out << "granularity: " << granularity << '\n';
    if (excluded_units > 0) out << "excluded (no gold): " << excluded_units << '\n';
}

void EvalReport::write_jsonl(std::ostream& out) const {
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["system"] = r.system;
        if (!granularity.empty()) row["granularity"] = granularity;
        row["units"] = r.units;
        for (const auto& [k, v] : r.hit_at) row["hit_at_" + std::to_string(k)] = round6(v);
        if (r.f1) {
            row["precision"] = round6(r.f1->precision);
            row["recall"] = round6(r.f1->recall);
            row["f1"] = round6(r.f1->f1);
        }
        if (excluded_units > 0) row["excluded"] = excluded_units;
        out << row.dump() << '\n';
    }
}

EvalReport evaluate_unsupervised(const CorpusBundle& bundle, std::span<const RankingSystem> systems,
                                 std::span<const std::size_t> ks, Granularity granularity) {
    if (ks.empty()) throw Error("evaluation needs at least one k");

    std::map<std::string, std::map<std::size_t, std::set<std::string>>> gold;
    for (const auto& a : bundle.annotations) {
        for (const auto& id : a.linked_tutorial_ids) {
            if (id != kNoneTutorialId) gold[a.transcript_id][a.sentence_index].insert(id);
        }
    }

    struct Unit {
        const Transcript* doc;
        std::set<std::string> gold;
    };
    std::vector<Unit> units;
    EvalReport report;
    report.granularity = std::string(to_string(granularity));
    for (const auto& doc : bundle.transcripts) {
        auto it = gold.find(doc.id);
        if (it == gold.end()) {
            ++report.excluded_units;
            continue;
        }
        if (granularity == Granularity::Transcript) {
            Unit u{&doc, {}};
            for (const auto& [index, ids] : it->second) u.gold.insert(ids.begin(), ids.end());
            units.push_back(std::move(u));
        } else {
            for (const auto& [index, ids] : it->second) units.push_back({&doc, ids});
        }
    }
    if (units.empty()) throw Error("no transcript carries gold links to evaluate against");

    for (const auto& system : systems) {
        SystemRow row;
        row.system = system.name;
        row.units = units.size();
        std::map<std::size_t, std::size_t> hits;
        const Transcript* cached_doc = nullptr;
        std::vector<std::string> ranked;
        for (const auto& u : units) {
            if (u.doc != cached_doc) {
                ranked = system.rank(*u.doc).ids();
                cached_doc = u.doc;
            }
            for (std::size_t k : ks) hits[k] += static_cast<std::size_t>(hit_at_k(ranked, u.gold, k));
        }
        for (const auto& [k, h] : hits) row.hit_at[k] = static_cast<double>(h) / static_cast<double>(units.size());
        report.rows.push_back(std::move(row));
    }
    return report;
}

SystemRow evaluate_supervised(std::string system, std::span<const SentencePrediction> predictions,
                              std::span<const AnnotationRecord> annotations, double decision_threshold) {
    std::set<std::string> annotated_docs;
    std::set<LinkPair> gold;
    std::set<std::pair<std::string, std::size_t>> needed;
    for (const auto& a : annotations) {
        annotated_docs.insert(a.transcript_id);
        needed.insert({a.transcript_id, a.sentence_index});
        for (const auto& id : a.linked_tutorial_ids) {
            if (id != kNoneTutorialId) gold.insert({a.transcript_id, a.sentence_index, id});
        }
    }

    std::set<LinkPair> predicted;
    for (const auto& p : predictions) {
        if (!annotated_docs.contains(p.transcript_id)) continue;
        needed.erase({p.transcript_id, p.sentence_index});
        for (auto& id : linked_tutorials(p.ranked, decision_threshold)) {
            predicted.insert({p.transcript_id, p.sentence_index, std::move(id)});
        }
    }
    if (!needed.empty()) {
        std::string list;
        for (const auto& [doc, index] : needed) {
            if (!list.empty()) list += ", ";
            list += doc + "#" + std::to_string(index);
        }
        throw Error("predictions missing for annotated sentences: " + list);
    }

    SystemRow row;
    row.system = std::move(system);
    row.units = gold.size();
    row.f1 = micro_f1(predicted, gold);
    return row;
}

}  // namespace streamlink
