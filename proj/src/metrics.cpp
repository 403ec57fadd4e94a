#include "lexrag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "lexrag/error.hpp"
#include "lexrag/vector_store.hpp"

namespace lexrag {

namespace {

// n-grams as joined keys; tokens are alphanumeric so '\x1f' cannot collide.
std::unordered_map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                                          std::size_t n) {
    std::unordered_map<std::string, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t clipped_overlap(const std::vector<std::string>& cand,
                            const std::vector<std::string>& ref, std::size_t n) {
    const auto cand_counts = ngram_counts(cand, n);
    const auto ref_counts = ngram_counts(ref, n);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

PRF make_prf(std::size_t overlap, std::size_t cand_total, std::size_t ref_total) {
    PRF prf;
    prf.precision = cand_total ? static_cast<double>(overlap) / static_cast<double>(cand_total) : 0.0;
    prf.recall = ref_total ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
    if (prf.precision + prf.recall > 0.0)
        prf.f1 = 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall);
    return prf;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

} // namespace

PRF rouge_n(std::string_view candidate, std::string_view reference, std::size_t n,
            const TokenizerConfig& tok) {
    if (n == 0) throw std::invalid_argument("rouge_n: n must be at least 1");
    const auto cand = tokenize(candidate, tok);
    const auto ref = tokenize(reference, tok);
    const std::size_t cand_total = cand.size() >= n ? cand.size() - n + 1 : 0;
    const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
    return make_prf(clipped_overlap(cand, ref, n), cand_total, ref_total);
}

PRF rouge_l(std::string_view candidate, std::string_view reference, const TokenizerConfig& tok) {
    const auto cand = tokenize(candidate, tok);
    const auto ref = tokenize(reference, tok);
    return make_prf(lcs_length(cand, ref), cand.size(), ref.size());
}

double bleu(std::string_view candidate, std::string_view reference, std::size_t max_n,
            const TokenizerConfig& tok) {
    if (max_n == 0) throw std::invalid_argument("bleu: max_n must be at least 1");
    const auto cand = tokenize(candidate, tok);
    const auto ref = tokenize(reference, tok);
    if (cand.empty()) return 0.0;

    double log_sum = 0.0;
    std::size_t included = 0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        const std::size_t denom = cand.size() >= n ? cand.size() - n + 1 : 0;
        if (denom == 0) continue; // candidate too short for this order
        const std::size_t overlap = clipped_overlap(cand, ref, n);
        const double p = overlap > 0
                             ? static_cast<double>(overlap) / static_cast<double>(denom)
                             : 1.0 / (2.0 * static_cast<double>(denom));
        log_sum += std::log(p);
        ++included;
    }
    if (included == 0) return 0.0;

    const double geo = std::exp(log_sum / static_cast<double>(included));
    const double bp = cand.size() >= ref.size()
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(ref.size()) /
                                               static_cast<double>(cand.size()));
    return bp * geo;
}

double semantic_similarity(const std::string& candidate, const std::string& reference,
                           const EmbeddingProvider& provider) {
    if (candidate.empty() || reference.empty())
        throw std::invalid_argument("semantic_similarity: texts must be non-empty");
    const auto batch = provider.embed_batch({candidate, reference});
    return cosine_similarity(batch.vectors[0], batch.vectors[1]);
}

double RatingDistribution::mean() const {
    if (total == 0) throw DataError("rating distribution is empty");
    return static_cast<double>(sum_points) / static_cast<double>(total);
}

double RatingDistribution::mean_over(std::size_t question_count) const {
    if (question_count == 0)
        throw std::invalid_argument("rating mean: question count must be positive");
    return static_cast<double>(sum_points) / static_cast<double>(question_count);
}

RatingDistribution aggregate_ratings(const std::vector<RatingRecord>& records,
                                     const std::string& run_id) {
    RatingDistribution dist;
    for (const auto& rec : records) {
        if (rec.run_id != run_id) continue;
        if (rec.score < 1 || rec.score > 5)
            throw DataError("rating for run \"" + run_id + "\", question \"" + rec.question_id +
                            "\" is " + std::to_string(rec.score) + ", expected 1..5");
        ++dist.counts[static_cast<std::size_t>(rec.score - 1)];
        ++dist.total;
        dist.sum_points += static_cast<std::size_t>(rec.score);
    }
    if (dist.total == 0) throw DataError("no rating records for run \"" + run_id + "\"");
    return dist;
}

std::vector<RatingRecord> load_ratings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ratings file: " + path);

    std::vector<RatingRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "run_id") continue; // header
        if (fields.size() != 4)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 4 fields " +
                            "(run_id,question_id,rater_id,score), got " +
                            std::to_string(fields.size()));
        RatingRecord rec;
        rec.run_id = fields[0];
        rec.question_id = fields[1];
        rec.rater_id = fields[2];
        try {
            std::size_t used = 0;
            rec.score = std::stoi(fields[3], &used);
            if (used != fields[3].size()) throw std::invalid_argument(fields[3]);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": score \"" + fields[3] +
                            "\" is not an integer");
        }
        if (rec.score < 1 || rec.score > 5)
            throw DataError(path + ":" + std::to_string(lineno) + ": score " +
                            std::to_string(rec.score) + " outside 1..5");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<HistogramBin> similarity_histogram(const std::vector<double>& scores,
                                               double bin_width) {
    if (!(bin_width > 0.0) || bin_width > 1.0)
        throw std::invalid_argument("similarity_histogram: bin_width must lie in (0, 1]");

    const auto upper_bins = static_cast<std::size_t>(std::ceil(1.0 / bin_width));
    std::vector<HistogramBin> bins;
    bins.reserve(upper_bins + 1);
    bins.push_back({-1.0, 0.0, 0}); // all negative scores
    for (std::size_t i = 0; i < upper_bins; ++i) {
        const double lower = static_cast<double>(i) * bin_width;
        const double upper = i + 1 == upper_bins ? 1.0
                                                 : std::min(1.0, static_cast<double>(i + 1) * bin_width);
        bins.push_back({lower, upper, 0});
    }

    for (double s : scores) {
        if (s < -1.0 || s > 1.0)
            throw std::invalid_argument("similarity_histogram: score outside [-1, 1]");
        if (s < 0.0) {
            ++bins.front().count;
            continue;
        }
        std::size_t target = bins.size() - 1; // s == 1 lands in the closed last bin
        for (std::size_t i = 1; i < bins.size(); ++i) {
            if (s < bins[i].upper) {
                target = i;
                break;
            }
        }
        ++bins[target].count;
    }
    return bins;
}

} // namespace lexrag
