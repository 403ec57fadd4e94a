#include "lexrag/harness.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::ordered_json;

std::string fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

ordered_json answer_to_json(const Answer& answer) {
    ordered_json obj;
    obj["text"] = answer.text;
    obj["mode"] = to_string(answer.mode);
    obj["abstained"] = answer.abstained;
    obj["context_chunk_ids"] = answer.context_chunk_ids;
    obj["truncated_context"] = answer.truncated_context;
    return obj;
}

Answer answer_from_json(const ordered_json& obj) {
    Answer answer;
    answer.text = obj.at("text").get<std::string>();
    answer.mode = obj.at("mode").get<std::string>() == "extractive" ? GenerationMode::extractive
                                                                    : GenerationMode::generative;
    answer.abstained = obj.at("abstained").get<bool>();
    answer.context_chunk_ids = obj.at("context_chunk_ids").get<std::vector<std::string>>();
    answer.truncated_context = obj.at("truncated_context").get<bool>();
    return answer;
}

ordered_json prf_to_json(const PRF& prf) {
    ordered_json obj;
    obj["precision"] = prf.precision;
    obj["recall"] = prf.recall;
    obj["f1"] = prf.f1;
    return obj;
}

PRF prf_from_json(const ordered_json& obj) {
    return {obj.at("precision").get<double>(), obj.at("recall").get<double>(),
            obj.at("f1").get<double>()};
}

} // namespace

std::vector<TestCase> load_test_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open test set: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed test set JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw DataError(path + ": test set must be a JSON array");

    std::vector<TestCase> tests;
    std::unordered_set<std::string> seen;
    std::size_t index = 0;
    for (const auto& item : doc) {
        ++index;
        TestCase tc;
        try {
            tc.id = item.at("id").get<std::string>();
            tc.question = item.at("question").get<std::string>();
            tc.ground_truth = item.at("ground_truth").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": test case #" + std::to_string(index) + ": " + e.what());
        }
        if (tc.id.empty() || tc.question.empty() || tc.ground_truth.empty())
            throw DataError(path + ": test case #" + std::to_string(index) +
                            ": id, question, and ground_truth must be non-empty");
        if (!seen.insert(tc.id).second)
            throw DataError(path + ": duplicate test case id \"" + tc.id + "\"");
        tests.push_back(std::move(tc));
    }
    return tests;
}

const char* to_string(RetrieverKind kind) {
    switch (kind) {
        case RetrieverKind::embedding: return "embedding";
        case RetrieverKind::bm25: return "bm25";
        case RetrieverKind::none: return "none";
    }
    return "none";
}

std::optional<RetrieverKind> retriever_kind_from_string(std::string_view s) {
    if (s == "embedding") return RetrieverKind::embedding;
    if (s == "bm25") return RetrieverKind::bm25;
    if (s == "none") return RetrieverKind::none;
    return std::nullopt;
}

RunSetup load_run_setup(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open run config: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed run config JSON: " + std::string(e.what()));
    }

    RunSetup setup;
    auto& cfg = setup.config;
    try {
        cfg.name = doc.at("name").get<std::string>();
        const auto retriever = retriever_kind_from_string(doc.at("retriever").get<std::string>());
        if (!retriever)
            throw DataError(path + ": unknown retriever \"" +
                            doc.at("retriever").get<std::string>() + "\"");
        cfg.retriever = *retriever;
        cfg.embedder = doc.value("embedder", "");
        cfg.generator = doc.at("generator").get<std::string>();
        const std::string prompt = doc.value("prompt", "none");
        const auto tmpl = prompt_template_id_from_string(prompt);
        if (!tmpl) throw DataError(path + ": unknown prompt template \"" + prompt + "\"");
        cfg.prompt = *tmpl;
        cfg.k = doc.value("k", cfg.retriever == RetrieverKind::bm25 ? std::size_t{3}
                                                                    : std::size_t{4});
        cfg.seed = doc.value("seed", std::uint64_t{0});

        const auto base = std::filesystem::path(path).parent_path();
        const auto resolve = [&](const std::string& p) {
            if (p.empty()) return p;
            const std::filesystem::path fp(p);
            return fp.is_absolute() ? fp.string() : (base / fp).lexically_normal().string();
        };
        if (doc.contains("artifacts")) {
            const auto& art = doc["artifacts"];
            cfg.chunks_path = resolve(art.value("chunks", ""));
            cfg.bm25_index_path = resolve(art.value("bm25_index", ""));
            cfg.vector_store_path = resolve(art.value("vector_store", ""));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad run config: " + std::string(e.what()));
    }
    if (cfg.name.empty()) throw DataError(path + ": run config needs a non-empty name");

    setup.providers = make_default_registry(cfg.seed);
    if (doc.contains("providers")) add_providers_from_json(setup.providers, doc["providers"], cfg.seed);
    return setup;
}

CorpusArtifacts load_artifacts(const RunConfig& cfg) {
    CorpusArtifacts artifacts;
    if (cfg.retriever == RetrieverKind::none) return artifacts;

    if (cfg.chunks_path.empty())
        throw DataError("run \"" + cfg.name + "\": retriever needs an artifacts.chunks path");
    artifacts.chunks = load_chunks_jsonl(cfg.chunks_path);

    if (cfg.retriever == RetrieverKind::bm25) {
        if (cfg.bm25_index_path.empty())
            throw DataError("run \"" + cfg.name + "\": retriever bm25 needs artifacts.bm25_index");
        artifacts.bm25 = std::make_shared<Bm25Index>(Bm25Index::load(cfg.bm25_index_path));
    } else {
        if (cfg.vector_store_path.empty())
            throw DataError("run \"" + cfg.name +
                            "\": retriever embedding needs artifacts.vector_store");
        artifacts.vectors = std::make_shared<VectorStore>(VectorStore::load(cfg.vector_store_path));
    }
    return artifacts;
}

namespace {

void validate_run(const RunConfig& cfg, const CorpusArtifacts& artifacts,
                  const ProviderRegistry& providers) {
    const auto generator = providers.generation(cfg.generator);
    if (cfg.embedder.empty())
        throw DataError("run \"" + cfg.name +
                        "\": an embedder is required for the semantic metric");
    providers.embedding(cfg.embedder);

    switch (cfg.retriever) {
        case RetrieverKind::embedding:
            if (!artifacts.vectors)
                throw DataError("run \"" + cfg.name + "\": vector store not loaded");
            if (artifacts.vectors->provider_name() != cfg.embedder)
                throw DataError("run \"" + cfg.name + "\": vector store was built with provider \"" +
                                artifacts.vectors->provider_name() + "\" but the run embeds with \"" +
                                cfg.embedder + "\"");
            if (artifacts.chunks.empty())
                throw DataError("run \"" + cfg.name + "\": chunk texts not loaded");
            break;
        case RetrieverKind::bm25:
            if (!artifacts.bm25)
                throw DataError("run \"" + cfg.name + "\": bm25 index not loaded");
            if (artifacts.chunks.empty())
                throw DataError("run \"" + cfg.name + "\": chunk texts not loaded");
            break;
        case RetrieverKind::none:
            if (generator->mode() != GenerationMode::generative)
                throw DataError("run \"" + cfg.name +
                                "\": retriever \"none\" requires a generative provider");
            break;
    }
}

} // namespace

QueryOutcome answer_question(const RunConfig& cfg, const std::string& question,
                             const CorpusArtifacts& artifacts,
                             const ProviderRegistry& providers) {
    validate_run(cfg, artifacts, providers);
    const auto generator = providers.generation(cfg.generator);

    QueryOutcome outcome;
    std::vector<Chunk> ranked;
    if (cfg.retriever == RetrieverKind::bm25) {
        outcome.retrieved = artifacts.bm25->retrieve_top_k(question, cfg.k);
    } else if (cfg.retriever == RetrieverKind::embedding) {
        const auto embedder = providers.embedding(cfg.embedder);
        const auto query = embedder->embed_batch({question});
        for (const auto& nb : artifacts.vectors->knn_query(query.vectors[0], cfg.k))
            outcome.retrieved.push_back({nb.chunk_id, nb.similarity});
    }
    if (!outcome.retrieved.empty()) {
        std::unordered_map<std::string, const Chunk*> chunk_by_id;
        for (const auto& chunk : artifacts.chunks) chunk_by_id.emplace(chunk.chunk_id, &chunk);
        for (const auto& scored : outcome.retrieved) {
            const auto it = chunk_by_id.find(scored.chunk_id);
            if (it == chunk_by_id.end())
                throw DataError("retrieved chunk \"" + scored.chunk_id +
                                "\" has no text in the chunk file");
            ranked.push_back(*it->second);
        }
    }

    if (cfg.retriever == RetrieverKind::none)
        outcome.answer = direct_answer(*generator, question);
    else if (generator->mode() == GenerationMode::generative)
        outcome.answer = generate_answer(*generator, PromptTemplate::get(cfg.prompt), question, ranked);
    else
        outcome.answer = extract_answer(*generator, question, ranked);
    return outcome;
}

RunResult run(const RunConfig& cfg, const std::vector<TestCase>& tests,
              const CorpusArtifacts& artifacts, const ProviderRegistry& providers,
              const RunOptions& opts) {
    validate_run(cfg, artifacts, providers);
    const auto embedder = providers.embedding(cfg.embedder);

    const auto process = [&](const TestCase& tc) {
        RunRow row;
        row.question_id = tc.id;
        const auto started = std::chrono::steady_clock::now();
        try {
            auto outcome = answer_question(cfg, tc.question, artifacts, providers);
            row.retrieved = std::move(outcome.retrieved);
            row.answer = std::move(outcome.answer);

            row.metrics.rouge1 = rouge_n(row.answer.text, tc.ground_truth, 1);
            row.metrics.rouge2 = rouge_n(row.answer.text, tc.ground_truth, 2);
            row.metrics.rougeL = rouge_l(row.answer.text, tc.ground_truth);
            row.metrics.bleu = bleu(row.answer.text, tc.ground_truth);
            row.metrics.semantic = semantic_similarity(row.answer.text, tc.ground_truth, *embedder);
        } catch (const std::exception& e) {
            row = RunRow{};
            row.question_id = tc.id;
            row.ok = false;
            row.error = e.what();
        }
        row.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started)
                               .count();
        return row;
    };

    std::vector<const TestCase*> pending;
    for (const auto& tc : tests)
        if (!opts.skip_question_ids.count(tc.id)) pending.push_back(&tc);

    RunResult result;
    result.run_name = cfg.name;
    result.rows.resize(pending.size());

    const std::size_t workers =
        std::max<std::size_t>(1, std::min(opts.max_in_flight, pending.size() ? pending.size() : 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            result.rows[i] = process(*pending[i]);
            if (opts.on_row) opts.on_row(result.rows[i]);
        }
        return result;
    }

    // Rows are computed by a small pool but handed to on_row strictly in
    // test-set order so identical inputs always produce identical output files.
    std::mutex mu;
    std::condition_variable ready;
    std::vector<char> done(pending.size(), 0);
    std::size_t next_claim = 0;

    const auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next_claim >= pending.size()) return;
                idx = next_claim++;
            }
            RunRow row = process(*pending[idx]);
            {
                std::lock_guard<std::mutex> lock(mu);
                result.rows[idx] = std::move(row);
                done[idx] = 1;
            }
            ready.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

    {
        std::unique_lock<std::mutex> lock(mu);
        for (std::size_t i = 0; i < pending.size(); ++i) {
            ready.wait(lock, [&] { return done[i] != 0; });
            if (opts.on_row) opts.on_row(result.rows[i]);
        }
    }
    for (auto& t : pool) t.join();
    return result;
}

void append_result_row(const std::string& run_name, const RunRow& row, std::ostream& out) {
    ordered_json obj;
    obj["run"] = run_name;
    obj["question_id"] = row.question_id;
    obj["ok"] = row.ok;
    if (!row.ok) {
        obj["error"] = row.error;
        out << obj.dump() << '\n';
        return;
    }
    obj["answer"] = answer_to_json(row.answer);
    auto retrieved = ordered_json::array();
    for (const auto& scored : row.retrieved) {
        ordered_json item;
        item["chunk_id"] = scored.chunk_id;
        item["score"] = scored.score;
        retrieved.push_back(std::move(item));
    }
    obj["retrieved"] = std::move(retrieved);
    ordered_json metrics;
    metrics["rouge1"] = prf_to_json(row.metrics.rouge1);
    metrics["rouge2"] = prf_to_json(row.metrics.rouge2);
    metrics["rougeL"] = prf_to_json(row.metrics.rougeL);
    metrics["bleu"] = row.metrics.bleu;
    metrics["semantic"] = row.metrics.semantic;
    obj["metrics"] = std::move(metrics);
    out << obj.dump() << '\n';
}

RunResult load_results_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open results file: " + path);

    RunResult result;
    std::map<std::string, std::size_t> row_index; // question id -> slot, last row wins
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": malformed result row: " +
                            e.what());
        }
        try {
            const auto run_name = obj.at("run").get<std::string>();
            if (result.run_name.empty()) result.run_name = run_name;
            else if (result.run_name != run_name)
                throw DataError(path + ":" + std::to_string(lineno) + ": row for run \"" +
                                run_name + "\" in results of run \"" + result.run_name + "\"");

            RunRow row;
            row.question_id = obj.at("question_id").get<std::string>();
            row.ok = obj.at("ok").get<bool>();
            if (!row.ok) {
                row.error = obj.value("error", "");
            } else {
                row.answer = answer_from_json(obj.at("answer"));
                for (const auto& item : obj.at("retrieved"))
                    row.retrieved.push_back({item.at("chunk_id").get<std::string>(),
                                             item.at("score").get<double>()});
                const auto& metrics = obj.at("metrics");
                row.metrics.rouge1 = prf_from_json(metrics.at("rouge1"));
                row.metrics.rouge2 = prf_from_json(metrics.at("rouge2"));
                row.metrics.rougeL = prf_from_json(metrics.at("rougeL"));
                row.metrics.bleu = metrics.at("bleu").get<double>();
                row.metrics.semantic = metrics.at("semantic").get<double>();
            }

            const auto it = row_index.find(row.question_id);
            if (it != row_index.end()) {
                result.rows[it->second] = std::move(row);
            } else {
                row_index.emplace(row.question_id, result.rows.size());
                result.rows.push_back(std::move(row));
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad result row: " + e.what());
        }
    }
    return result;
}

std::set<std::string> completed_question_ids(const std::string& path) {
    std::set<std::string> done;
    if (!std::filesystem::exists(path)) return done;
    const auto result = load_results_jsonl(path);
    for (const auto& row : result.rows)
        if (row.ok) done.insert(row.question_id);
    return done;
}

Report make_report(const std::vector<RunResult>& results,
                   const std::vector<RatingRecord>& ratings) {
    Report report;
    for (const auto& result : results) {
        if (result.rows.empty())
            throw DataError("report: run \"" + result.run_name + "\" has no rows");

        ReportLine line;
        line.model = result.run_name;
        line.rows = result.rows.size();

        // Per-question rating means for this run (multiple raters average).
        std::unordered_map<std::string, std::pair<double, std::size_t>> question_ratings;
        bool any_rating = false;
        for (const auto& rec : ratings) {
            if (rec.run_id != result.run_name) continue;
            auto& acc = question_ratings[rec.question_id];
            acc.first += static_cast<double>(rec.score);
            acc.second += 1;
            any_rating = true;
        }

        std::size_t ok_rows = 0;
        double rating_sum = 0.0;
        for (const auto& row : result.rows) {
            if (!row.ok) {
                ++line.errored;
                continue;
            }
            ++ok_rows;
            line.rouge1 += row.metrics.rouge1.f1;
            line.rouge2 += row.metrics.rouge2.f1;
            line.rougeL += row.metrics.rougeL.f1;
            line.bleu += row.metrics.bleu;
            line.semantic += row.metrics.semantic;
            const auto it = question_ratings.find(row.question_id);
            if (it != question_ratings.end())
                rating_sum += it->second.first / static_cast<double>(it->second.second);
        }
        if (ok_rows > 0) {
            const auto n = static_cast<double>(ok_rows);
            line.rouge1 /= n;
            line.rouge2 /= n;
            line.rougeL /= n;
            line.bleu /= n;
            line.semantic /= n;
            // Unrated questions count as zero points, the divisor stays the
            // full set of non-errored rows.
            if (any_rating) line.rating = rating_sum / n;
        }
        report.lines.push_back(std::move(line));
    }
    std::sort(report.lines.begin(), report.lines.end(),
              [](const ReportLine& a, const ReportLine& b) { return a.model < b.model; });
    return report;
}

void write_report_tsv(const Report& report, std::ostream& out) {
    out << "model\trouge1\trouge2\trougeL\tbleu\tsemantic\trating\n";
    for (const auto& line : report.lines) {
        out << line.model << '\t' << fixed4(line.rouge1) << '\t' << fixed4(line.rouge2) << '\t'
            << fixed4(line.rougeL) << '\t' << fixed4(line.bleu) << '\t' << fixed4(line.semantic)
            << '\t' << (line.rating ? fixed4(*line.rating) : std::string()) << '\n';
    }
}

std::vector<HistogramBin> plot_data(const RunResult& result, double bin_width) {
    std::vector<double> scores;
    scores.reserve(result.rows.size());
    for (const auto& row : result.rows)
        if (row.ok) scores.push_back(row.metrics.semantic);
    return similarity_histogram(scores, bin_width);
}

void write_histogram_tsv(const std::vector<HistogramBin>& bins, std::ostream& out) {
    out << "lower\tupper\tcount\n";
    for (const auto& bin : bins)
        out << compact(bin.lower) << '\t' << compact(bin.upper) << '\t' << bin.count << '\n';
}

} // namespace lexrag
