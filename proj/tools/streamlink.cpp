#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamlink/engine.hpp"

using namespace streamlink;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streamlink: recommend software tutorials for live-stream transcripts"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON config file (falls back to $STREAMLINK_CONFIG)");
    app.add_option("--seed", seed, "Seed for every trainer, overriding the config");

    app.add_subcommand("validate", "Load the corpus and print a summary");
    app.add_subcommand("stats", "Build or refresh the cached co-occurrence statistics");
    app.add_subcommand("train-summarizer", "Train the gate network and discriminator");
    app.add_subcommand("train-ranker", "Train the discourse classifier");
    app.add_subcommand("train-supervised", "Train the sentence link classifier");

    auto* recommend = app.add_subcommand("recommend", "Rank tutorials for one transcript (jsonl)");
    std::string transcript_id;
    std::size_t top_k = 5;
    recommend->add_option("--transcript-id", transcript_id, "Transcript to rank for")->required();
    recommend->add_option("--top-k", top_k, "Number of tutorials to print")->capture_default_str();

    auto* evaluate = app.add_subcommand("evaluate", "Compare systems on the annotated corpus");
    std::string systems = "ours,string,keyword,pmi";
    std::string granularity;
    std::string format = "table";
    evaluate->add_option("--systems", systems, "Comma-separated: ours,string,keyword,pmi,supervised")
        ->capture_default_str();
    evaluate->add_option("--granularity", granularity, "transcript or sentence")
        ->check(CLI::IsMember({"transcript", "sentence"}));
    evaluate->add_option("--format", format, "table or jsonl")
        ->check(CLI::IsMember({"table", "jsonl"}))
        ->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with planted answers");
    std::string out_dir;
    SynthConfig sc;
    synth->add_option("--out-dir", out_dir, "Directory to write")->required();
    synth->add_option("--tutorials", sc.num_tutorials)->capture_default_str();
    synth->add_option("--transcripts", sc.num_transcripts)->capture_default_str();
    synth->add_option("--tools-per-tutorial", sc.tools_per_tutorial)->capture_default_str();
    synth->add_option("--sentences", sc.transcript_length)->capture_default_str();
    synth->add_option("--sentence-length", sc.sentence_length)->capture_default_str();
    synth->add_option("--noise", sc.noise_rate)->capture_default_str();
    synth->add_option("--chitchat-vocab", sc.chitchat_vocab_size)->capture_default_str();
    synth->add_option("--tool-vocab", sc.tool_vocab_size)->capture_default_str();
    synth->add_option("--dim", sc.embedding_dim)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            if (seed) sc.seed = *seed;
            write_corpus(generate_corpus(sc), out_dir);
            std::cerr << "wrote synthetic corpus to " << out_dir << '\n';
            return 0;
        }

        if (config_path.empty()) {
            if (const char* env = std::getenv("STREAMLINK_CONFIG")) config_path = env;
        }
        if (config_path.empty()) throw Error("no config: pass --config or set STREAMLINK_CONFIG");
        EngineConfig config = EngineConfig::load(config_path);
        if (seed) config.set_seed(*seed);
        if (!granularity.empty()) config.granularity = parse_granularity(granularity);
        Engine engine(std::move(config));

        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "validate") {
            engine.validate(std::cout);
        } else if (command == "stats") {
            engine.build_stats(std::cerr);
        } else if (command == "train-summarizer") {
            engine.train_summarizer(std::cerr);
        } else if (command == "train-ranker") {
            engine.train_ranker(std::cerr);
        } else if (command == "train-supervised") {
            engine.train_supervised(std::cerr);
        } else if (command == "recommend") {
            engine.recommend(transcript_id, top_k, std::cout);
        } else if (command == "evaluate") {
            const EvalReport report = engine.evaluate(split_list(systems));
            if (format == "jsonl") {
                report.write_jsonl(std::cout);
            } else {
                report.write_table(std::cout);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
