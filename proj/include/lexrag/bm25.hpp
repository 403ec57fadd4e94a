#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexrag/chunker.hpp"
#include "lexrag/tokenizer.hpp"

namespace lexrag {

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;
};

/// Okapi BM25 over chunk texts.
///
///   score(q, d) = sum over distinct query terms t of
///                 idf(t) * f(t,d) * (k1 + 1) / (f(t,d) + k1 * (1 - b + b * |d| / avgdl))
///   idf(t)      = ln(1 + (N - n_t + 0.5) / (n_t + 0.5))
///
/// Chunks with no tokens still count toward N and may appear as zero-score
/// padding in retrieval results.
class Bm25Index {
public:
    struct Params {
        double k1 = 1.5;
        double b = 0.75;
    };

    static Bm25Index build(const std::vector<Chunk>& chunks,
                           const TokenizerConfig& tok,
                           const Params& params);
    static Bm25Index build(const std::vector<Chunk>& chunks);

    std::size_t size() const { return ids_.size(); } // N
    double avgdl() const { return avgdl_; }
    const Params& params() const { return params_; }
    const TokenizerConfig& tokenizer() const { return tok_; }

    /// ln(1 + (N - n_t + 0.5) / (n_t + 0.5)); n_t = 0 for unseen terms.
    double idf(const std::string& term) const;

    /// BM25 score of one chunk for the given query tokens (deduplicated
    /// internally). Throws DataError for an unknown chunk_id.
    double score(const std::vector<std::string>& query_tokens, const std::string& chunk_id) const;

    /// Top-k chunks by score, ties broken by ascending chunk_id. Zero-score
    /// chunks pad the tail, so the result always has min(k, N) entries.
    std::vector<ScoredChunk> retrieve_top_k(const std::string& query, std::size_t k = 3) const;

    void save(const std::string& path) const;
    static Bm25Index load(const std::string& path);

private:
    TokenizerConfig tok_;
    Params params_;
    std::vector<std::string> ids_;              // insertion order
    std::vector<std::size_t> lengths_;          // token count per chunk
    std::unordered_map<std::string, std::size_t> id_to_idx_;
    // term -> (chunk index, term frequency), sorted by chunk_id
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::uint32_t>>> postings_;
    double avgdl_ = 0.0;

    double score_at(const std::vector<std::string>& distinct_terms, std::size_t idx) const;
};

inline Bm25Index Bm25Index::build(const std::vector<Chunk>& chunks) {
    return build(chunks, TokenizerConfig{}, Params{});
}

} // namespace lexrag
