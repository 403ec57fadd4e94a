// lexrag: command-line driver for the retrieval-augmented legal QA pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 provider/transport
// error. Diagnostics go to stderr; data goes to stdout or the --out target.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <fnmatch.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexrag/chunker.hpp"
#include "lexrag/corpus.hpp"
#include "lexrag/error.hpp"
#include "lexrag/harness.hpp"
#include "lexrag/metrics.hpp"
#include "lexrag/providers.hpp"

namespace {

using nlohmann::ordered_json;

// Writes either to --out or to stdout when no path was given.
class output_target {
public:
    explicit output_target(const std::string& path) {
        if (path.empty()) return;
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        file_.open(path, std::ios::binary);
        if (!file_) throw lexrag::DataError("cannot open output file: " + path);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

lexrag::ProviderRegistry build_registry(const std::string& providers_path, std::uint64_t seed) {
    auto registry = lexrag::make_default_registry(seed);
    if (providers_path.empty()) return registry;
    std::ifstream in(providers_path);
    if (!in) throw lexrag::DataError("cannot open providers file: " + providers_path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lexrag::DataError(providers_path + ": malformed providers JSON: " +
                                std::string(e.what()));
    }
    lexrag::add_providers_from_json(registry, doc, seed);
    return registry;
}

// Expands a --results argument: literal paths pass through, patterns with
// * ? [ match file names inside the pattern's directory.
std::vector<std::string> expand_results_pattern(const std::string& pattern) {
    if (pattern.find_first_of("*?[") == std::string::npos) return {pattern};

    const std::filesystem::path p(pattern);
    const auto dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    const auto name_pattern = p.filename().string();
    if (!std::filesystem::is_directory(dir))
        throw lexrag::DataError("no such directory for results pattern: " + pattern);

    std::vector<std::string> matched;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (fnmatch(name_pattern.c_str(), name.c_str(), 0) == 0)
            matched.push_back(entry.path().string());
    }
    if (matched.empty()) throw lexrag::DataError("no results match pattern: " + pattern);
    std::sort(matched.begin(), matched.end());
    return matched;
}

void cmd_ingest(const std::string& corpus_path, const std::string& store_dir) {
    const auto cleaned = lexrag::load_corpus(corpus_path);
    std::filesystem::create_directories(store_dir);
    const auto out_path = (std::filesystem::path(store_dir) / "corpus.jsonl").string();
    lexrag::save_corpus(cleaned, out_path);

    const auto stats = lexrag::corpus_stats(cleaned);
    std::printf("kind\tdocuments\tavg_words\n");
    for (const auto kind : {lexrag::DocKind::judgment, lexrag::DocKind::act,
                            lexrag::DocKind::article}) {
        const auto& ks = stats.for_kind(kind);
        std::printf("%s\t%zu\t%.2f\n", lexrag::to_string(kind), ks.doc_count, ks.avg_word_count);
    }
    std::cerr << "ingested " << cleaned.size() << " documents into " << out_path << "\n";
}

void cmd_chunk(const std::string& store_dir, const std::string& out_path,
               const lexrag::ChunkerConfig& cfg) {
    const auto corpus_path = (std::filesystem::path(store_dir) / "corpus.jsonl").string();
    const auto docs = lexrag::load_corpus(corpus_path);

    std::vector<lexrag::Chunk> chunks;
    for (const auto& doc : docs) {
        auto doc_chunks = lexrag::split_document(doc, cfg);
        chunks.insert(chunks.end(), std::make_move_iterator(doc_chunks.begin()),
                      std::make_move_iterator(doc_chunks.end()));
    }

    output_target out(out_path);
    lexrag::save_chunks_jsonl(chunks, out.stream());
    std::cerr << "wrote " << chunks.size() << " chunks from " << docs.size() << " documents\n";
}

void cmd_index_bm25(const std::string& chunks_path, const std::string& out_path, double k1,
                    double b) {
    const auto chunks = lexrag::load_chunks_jsonl(chunks_path);
    const auto index =
        lexrag::Bm25Index::build(chunks, lexrag::TokenizerConfig{}, lexrag::Bm25Index::Params{k1, b});
    index.save(out_path);
    std::cerr << "indexed " << index.size() << " chunks (avgdl " << index.avgdl() << ") into "
              << out_path << "\n";
}

void cmd_index_vector(const std::string& chunks_path, const std::string& provider_name,
                      const std::string& out_path, const std::string& providers_path,
                      std::uint64_t seed) {
    const auto chunks = lexrag::load_chunks_jsonl(chunks_path);
    const auto registry = build_registry(providers_path, seed);
    const auto provider = registry.embedding(provider_name);

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& chunk : chunks) texts.push_back(chunk.text);

    const auto batch = provider->embed_batch(texts);
    lexrag::VectorStore store(provider->dimension(), provider->name());
    for (std::size_t i = 0; i < chunks.size(); ++i)
        store.add(chunks[i].chunk_id, batch.vectors[i]);
    store.save(out_path);

    std::cerr << "embedded " << chunks.size() << " chunks with " << provider->name();
    if (batch.token_usage) std::cerr << " (" << *batch.token_usage << " tokens)";
    std::cerr << " into " << out_path << "\n";
}

void cmd_query(const std::string& config_path, const std::string& question,
               const std::string& out_path) {
    const auto setup = lexrag::load_run_setup(config_path);
    const auto artifacts = lexrag::load_artifacts(setup.config);
    const auto outcome =
        lexrag::answer_question(setup.config, question, artifacts, setup.providers);

    ordered_json doc;
    doc["run"] = setup.config.name;
    doc["question"] = question;
    doc["answer"] = {{"text", outcome.answer.text},
                     {"mode", lexrag::to_string(outcome.answer.mode)},
                     {"abstained", outcome.answer.abstained},
                     {"context_chunk_ids", outcome.answer.context_chunk_ids},
                     {"truncated_context", outcome.answer.truncated_context}};
    auto retrieved = ordered_json::array();
    for (const auto& scored : outcome.retrieved)
        retrieved.push_back({{"chunk_id", scored.chunk_id}, {"score", scored.score}});
    doc["retrieved"] = std::move(retrieved);

    output_target out(out_path);
    out.stream() << doc.dump(2) << "\n";
}

void cmd_eval(const std::string& config_path, const std::string& testset_path,
              const std::string& out_path, bool resume, std::size_t max_in_flight) {
    const auto setup = lexrag::load_run_setup(config_path);
    const auto tests = lexrag::load_test_set(testset_path);
    const auto artifacts = lexrag::load_artifacts(setup.config);

    lexrag::RunOptions opts;
    opts.max_in_flight = max_in_flight;
    if (resume) opts.skip_question_ids = lexrag::completed_question_ids(out_path);

    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(out_path,
                      resume ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
    if (!out) throw lexrag::DataError("cannot open results file for writing: " + out_path);
    opts.on_row = [&](const lexrag::RunRow& row) {
        lexrag::append_result_row(setup.config.name, row, out);
        out.flush();
    };

    const auto result = lexrag::run(setup.config, tests, artifacts, setup.providers, opts);
    std::size_t failed = 0;
    for (const auto& row : result.rows)
        if (!row.ok) ++failed;
    std::cerr << "run " << setup.config.name << ": " << result.rows.size() << " rows ("
              << result.rows.size() - failed << " ok, " << failed << " failed), skipped "
              << opts.skip_question_ids.size() << " completed, results in " << out_path << "\n";
}

void cmd_report(const std::vector<std::string>& result_patterns, const std::string& ratings_path,
                const std::string& out_path) {
    std::vector<lexrag::RunResult> results;
    for (const auto& pattern : result_patterns)
        for (const auto& path : expand_results_pattern(pattern))
            results.push_back(lexrag::load_results_jsonl(path));

    std::vector<lexrag::RatingRecord> ratings;
    if (!ratings_path.empty()) ratings = lexrag::load_ratings_csv(ratings_path);

    const auto report = lexrag::make_report(results, ratings);
    output_target out(out_path);
    lexrag::write_report_tsv(report, out.stream());
}

void cmd_plot_data(const std::string& results_path, const std::string& out_path,
                   double bin_width) {
    const auto result = lexrag::load_results_jsonl(results_path);
    const auto bins = lexrag::plot_data(result, bin_width);
    output_target out(out_path);
    lexrag::write_histogram_tsv(bins, out.stream());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"retrieval-augmented question answering over an Indian legal corpus"};
    app.require_subcommand(1);

    // ingest
    std::string ingest_corpus, ingest_out;
    auto* ingest = app.add_subcommand("ingest", "clean a raw corpus and persist it to a store");
    ingest->add_option("--corpus", ingest_corpus, "raw corpus JSONL")->required();
    ingest->add_option("--out", ingest_out, "store directory")->required();
    ingest->callback([&] { cmd_ingest(ingest_corpus, ingest_out); });

    // chunk
    std::string chunk_store, chunk_out;
    lexrag::ChunkerConfig chunk_cfg;
    auto* chunk = app.add_subcommand("chunk", "split stored documents into retrieval chunks");
    chunk->add_option("--store", chunk_store, "store directory from ingest")->required();
    chunk->add_option("--out", chunk_out, "chunk JSONL (stdout when omitted)");
    chunk->add_option("--size", chunk_cfg.chunk_size, "chunk size budget in characters");
    chunk->add_option("--overlap", chunk_cfg.overlap, "overlap budget in characters");
    chunk->add_option("--sep", chunk_cfg.separator, "segment separator");
    chunk->callback([&] { cmd_chunk(chunk_store, chunk_out, chunk_cfg); });

    // index-bm25
    std::string bm25_chunks, bm25_out;
    double bm25_k1 = 1.5, bm25_b = 0.75;
    auto* index_bm25 = app.add_subcommand("index-bm25", "build a BM25 index over chunks");
    index_bm25->add_option("--chunks", bm25_chunks, "chunk JSONL")->required();
    index_bm25->add_option("--out", bm25_out, "index file")->required();
    index_bm25->add_option("--k1", bm25_k1, "BM25 k1");
    index_bm25->add_option("--b", bm25_b, "BM25 b");
    index_bm25->callback([&] { cmd_index_bm25(bm25_chunks, bm25_out, bm25_k1, bm25_b); });

    // index-vector
    std::string vec_chunks, vec_provider, vec_out, vec_providers;
    std::uint64_t vec_seed = 0;
    auto* index_vector = app.add_subcommand("index-vector", "embed chunks into a vector store");
    index_vector->add_option("--chunks", vec_chunks, "chunk JSONL")->required();
    index_vector->add_option("--provider", vec_provider, "embedding provider name")->required();
    index_vector->add_option("--out", vec_out, "vector store file")->required();
    index_vector->add_option("--providers", vec_providers, "provider specs JSON");
    index_vector->add_option("--seed", vec_seed, "seed for mock providers");
    index_vector->callback(
        [&] { cmd_index_vector(vec_chunks, vec_provider, vec_out, vec_providers, vec_seed); });

    // query
    std::string query_config, query_question, query_out;
    auto* query = app.add_subcommand("query", "answer one question with a run configuration");
    query->add_option("--config", query_config, "run config JSON")->required();
    query->add_option("--question", query_question, "question text")->required();
    query->add_option("--out", query_out, "answer JSON (stdout when omitted)");
    query->callback([&] { cmd_query(query_config, query_question, query_out); });

    // eval
    std::string eval_config, eval_testset, eval_out;
    bool eval_resume = false;
    std::size_t eval_in_flight = 1;
    auto* eval = app.add_subcommand("eval", "run a configuration over a test set");
    eval->add_option("--config", eval_config, "run config JSON")->required();
    eval->add_option("--testset", eval_testset, "test set JSON")->required();
    eval->add_option("--out", eval_out, "results JSONL")->required();
    eval->add_flag("--resume", eval_resume, "skip questions already answered in --out");
    eval->add_option("--max-in-flight", eval_in_flight, "concurrent test cases");
    eval->callback(
        [&] { cmd_eval(eval_config, eval_testset, eval_out, eval_resume, eval_in_flight); });

    // report
    std::vector<std::string> report_results;
    std::string report_ratings, report_out;
    auto* report = app.add_subcommand("report", "aggregate results files into a score table");
    report->add_option("--results", report_results, "results JSONL paths or patterns")->required();
    report->add_option("--ratings", report_ratings, "expert ratings CSV");
    report->add_option("--out", report_out, "report TSV (stdout when omitted)");
    report->callback([&] { cmd_report(report_results, report_ratings, report_out); });

    // plot-data
    std::string plot_results, plot_out;
    double plot_bin_width = 0.1;
    auto* plot = app.add_subcommand("plot-data", "histogram of semantic similarity scores");
    plot->add_option("--results", plot_results, "results JSONL")->required();
    plot->add_option("--out", plot_out, "histogram TSV (stdout when omitted)");
    plot->add_option("--bin-width", plot_bin_width, "bin width in (0, 1]");
    plot->callback([&] { cmd_plot_data(plot_results, plot_out, plot_bin_width); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const lexrag::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const lexrag::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
