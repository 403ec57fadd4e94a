#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexrag/embedding.hpp"
#include "lexrag/tokenizer.hpp"

namespace lexrag {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Rouge-N with clipped n-gram overlap: precision = overlap / candidate
/// n-grams, recall = overlap / reference n-grams, F1 their harmonic mean.
/// Zero-denominator cases yield 0.
PRF rouge_n(std::string_view candidate, std::string_view reference, std::size_t n,
            const TokenizerConfig& tok = {});

/// Rouge-L from the token-level longest common subsequence L:
/// precision = L / |candidate|, recall = L / |reference|.
PRF rouge_l(std::string_view candidate, std::string_view reference,
            const TokenizerConfig& tok = {});

/// Sentence BLEU with clipped modified precisions for n = 1..max_n. A p_n
/// with zero numerator is smoothed to 1 / (2 * denominator); a p_n with zero
/// denominator is excluded. Brevity penalty is 1 when the candidate is at
/// least as long as the reference, exp(1 - |ref|/|cand|) otherwise. An empty
/// candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference, std::size_t max_n = 4,
            const TokenizerConfig& tok = {});

/// Cosine similarity of the provider's embeddings of the two texts, both of
/// which must be non-empty.
double semantic_similarity(const std::string& candidate, const std::string& reference,
                           const EmbeddingProvider& provider);

// ---------------------------------------------------------------------------
// Human ratings
// ---------------------------------------------------------------------------

struct RatingRecord {
    std::string run_id;
    std::string question_id;
    std::string rater_id;
    int score = 0; // integer in 1..5
};

struct RatingDistribution {
    std::array<std::size_t, 5> counts{}; // counts[i] holds ratings of score i+1
    std::size_t total = 0;               // number of rating records
    std::size_t sum_points = 0;          // sum of all scores

    /// Mean score per rating record.
    double mean() const;
    /// Mean score over an explicit question count, so questions that never
    /// received a rating weigh in as zero points.
    double mean_over(std::size_t question_count) const;
};

/// Aggregates the records matching run_id. Throws DataError when none match
/// or when a matching record has a score outside 1..5.
RatingDistribution aggregate_ratings(const std::vector<RatingRecord>& records,
                                     const std::string& run_id);

/// CSV with columns run_id,question_id,rater_id,score; an optional header row
/// is skipped. Throws DataError naming the offending line.
std::vector<RatingRecord> load_ratings_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Fixed-width bins over similarity scores in [-1, 1]: one leading bin
/// [-1, 0) for negatives, then right-open bins of bin_width covering [0, 1],
/// the last bin closed at 1. Bins with zero counts are kept, so the layout is
/// a function of bin_width alone.
std::vector<HistogramBin> similarity_histogram(const std::vector<double>& scores,
                                               double bin_width = 0.1);

} // namespace lexrag
