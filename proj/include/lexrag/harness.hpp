#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexrag/bm25.hpp"
#include "lexrag/generation.hpp"
#include "lexrag/metrics.hpp"
#include "lexrag/providers.hpp"
#include "lexrag/vector_store.hpp"

namespace lexrag {

struct TestCase {
    std::string id;
    std::string question;
    std::string ground_truth;
};

/// JSON array of {"id", "question", "ground_truth"}; every field non-empty,
/// ids unique. Throws DataError otherwise.
std::vector<TestCase> load_test_set(const std::string& path);

enum class RetrieverKind { embedding, bm25, none };

const char* to_string(RetrieverKind kind);
std::optional<RetrieverKind> retriever_kind_from_string(std::string_view s);

struct RunConfig {
    std::string name;
    RetrieverKind retriever = RetrieverKind::embedding;
    std::string embedder;  // provider for retrieval and/or the semantic metric
    std::string generator; // provider producing answers
    PromptTemplateId prompt = PromptTemplateId::none;
    std::size_t k = 4; // retrieval depth; defaults to 4 (embedding) or 3 (bm25)
    std::uint64_t seed = 0;

    // Artifact paths, resolved relative to the config file that declared them.
    std::string chunks_path;
    std::string bm25_index_path;
    std::string vector_store_path;
};

/// A run config file plus the providers it declares.
struct RunSetup {
    RunConfig config;
    ProviderRegistry providers;
};

/// Parses a run config JSON file: the RunConfig fields, an "artifacts" object
/// ({"chunks", "bm25_index", "vector_store"}), and a "providers" array (see
/// add_providers_from_json). Built-in mocks stay available unless overridden.
RunSetup load_run_setup(const std::string& path);

/// Everything a run reads: the chunk texts plus whichever index the retriever
/// needs.
struct CorpusArtifacts {
    std::vector<Chunk> chunks;
    std::shared_ptr<const Bm25Index> bm25;
    std::shared_ptr<const VectorStore> vectors;
};

/// Loads the artifacts a config's retriever requires, from the config's paths.
CorpusArtifacts load_artifacts(const RunConfig& cfg);

struct RowMetrics {
    PRF rouge1;
    PRF rouge2;
    PRF rougeL;
    double bleu = 0.0;
    double semantic = 0.0;
};

struct RunRow {
    std::string question_id;
    bool ok = true;
    std::string error; // quarantined per-row failure, empty when ok
    Answer answer;
    std::vector<ScoredChunk> retrieved;
    RowMetrics metrics;
    double wall_time_ms = 0.0; // in-memory only; never persisted
};

struct RunResult {
    std::string run_name;
    std::vector<RunRow> rows;
};

struct RunOptions {
    std::size_t max_in_flight = 1;       // worker bound; rows still emit in test-set order
    std::set<std::string> skip_question_ids; // resume support
    std::function<void(const RunRow&)> on_row; // invoked in test-set order
};

/// One question taken through the config's full retrieve-then-answer flow.
struct QueryOutcome {
    Answer answer;
    std::vector<ScoredChunk> retrieved;
};

QueryOutcome answer_question(const RunConfig& cfg,
                             const std::string& question,
                             const CorpusArtifacts& artifacts,
                             const ProviderRegistry& providers);

/// Executes one configuration over the test set. A failing row is recorded
/// with ok=false and never aborts the run. Rows appear in test-set order, and
/// with deterministic providers two executions produce identical results.
RunResult run(const RunConfig& cfg,
              const std::vector<TestCase>& tests,
              const CorpusArtifacts& artifacts,
              const ProviderRegistry& providers,
              const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// Results persistence (JSONL, one row object per line)
// ---------------------------------------------------------------------------

void append_result_row(const std::string& run_name, const RunRow& row, std::ostream& out);

/// Reads a results file. When a question id appears more than once (resume
/// retried a failed row), the last row wins. Throws DataError when rows name
/// different runs or a line is malformed.
RunResult load_results_jsonl(const std::string& path);

/// Question ids already answered successfully in an existing results file;
/// empty when the file does not exist.
std::set<std::string> completed_question_ids(const std::string& path);

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct ReportLine {
    std::string model;
    double rouge1 = 0.0; // mean F1 over non-errored rows
    double rouge2 = 0.0;
    double rougeL = 0.0;
    double bleu = 0.0;
    double semantic = 0.0;
    std::optional<double> rating; // set when rating records matched this run
    std::size_t rows = 0;
    std::size_t errored = 0;
};

struct Report {
    std::vector<ReportLine> lines; // ordered by model name
};

/// Aggregates per-run means over the non-errored rows. Ratings join on
/// (run name, question id); raters of one question average first, and the
/// rating column divides by all non-errored rows, so unrated questions count
/// as zero points. Throws DataError for a RunResult with no rows.
Report make_report(const std::vector<RunResult>& results,
                   const std::vector<RatingRecord>& ratings = {});

/// TSV with header: model, rouge1, rouge2, rougeL, bleu, semantic, rating.
void write_report_tsv(const Report& report, std::ostream& out);

/// Histogram of the semantic similarity scores of non-errored rows.
std::vector<HistogramBin> plot_data(const RunResult& result, double bin_width = 0.1);

/// TSV with header: lower, upper, count.
void write_histogram_tsv(const std::vector<HistogramBin>& bins, std::ostream& out);

} // namespace lexrag
