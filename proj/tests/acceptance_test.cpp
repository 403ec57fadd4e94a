// Acceptance gate for the whole pipeline. Each criterion is checked against
// independently coded oracles (naive n-gram counting, full-matrix LCS,
// brute-force BM25 and cosine scans, a backtracking chunk-coverage check) and
// prints exactly one PASS/FAIL line. The process exits non-zero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lexrag/bm25.hpp"
#include "lexrag/chunker.hpp"
#include "lexrag/corpus.hpp"
#include "lexrag/error.hpp"
#include "lexrag/generation.hpp"
#include "lexrag/harness.hpp"
#include "lexrag/metrics.hpp"
#include "lexrag/providers.hpp"
#include "lexrag/vector_store.hpp"

using namespace lexrag;

namespace {

constexpr double kTolerance = 1e-9;

// Collects expectations; the first failing one becomes the FAIL detail.
struct checker {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
    void expect_near(double actual, double expected, const std::string& what) {
        expect(std::abs(actual - expected) <= kTolerance,
               what + ": expected " + std::to_string(expected) + ", got " +
                   std::to_string(actual));
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ===========================================================================
// Independent text oracles. These share nothing with the library: their own
// tokenizer, their own counting, their own arithmetic.
// ===========================================================================

bool oracle_is_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::vector<std::string> oracle_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (oracle_is_alnum(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                                   : static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

std::map<std::vector<std::string>, long> oracle_ngrams(const std::vector<std::string>& tokens,
                                                       std::size_t n) {
    std::map<std::vector<std::string>, long> counts;
    if (n == 0 || tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

long oracle_clipped_overlap(const std::map<std::vector<std::string>, long>& cand,
                            const std::map<std::vector<std::string>, long>& ref) {
    long overlap = 0;
    for (const auto& [gram, count] : cand) {
        const auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

PRF oracle_rouge_n(const std::string& candidate, const std::string& reference, std::size_t n) {
    const auto cand = oracle_ngrams(oracle_tokens(candidate), n);
    const auto ref = oracle_ngrams(oracle_tokens(reference), n);
    long cand_total = 0;
    for (const auto& [_, c] : cand) cand_total += c;
    long ref_total = 0;
    for (const auto& [_, c] : ref) ref_total += c;

    const long overlap = oracle_clipped_overlap(cand, ref);
    PRF out;
    out.precision = cand_total > 0 ? static_cast<double>(overlap) / cand_total : 0.0;
    out.recall = ref_total > 0 ? static_cast<double>(overlap) / ref_total : 0.0;
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

PRF oracle_rouge_l(const std::string& candidate, const std::string& reference) {
    const auto c = oracle_tokens(candidate);
    const auto r = oracle_tokens(reference);
    // full O(len(c) * len(r)) LCS matrix
    std::vector<std::vector<long>> lcs(c.size() + 1, std::vector<long>(r.size() + 1, 0));
    for (std::size_t i = 1; i <= c.size(); ++i)
        for (std::size_t j = 1; j <= r.size(); ++j)
            lcs[i][j] = c[i - 1] == r[j - 1] ? lcs[i - 1][j - 1] + 1
                                             : std::max(lcs[i - 1][j], lcs[i][j - 1]);
    const long l = lcs[c.size()][r.size()];
    PRF out;
    out.precision = c.empty() ? 0.0 : static_cast<double>(l) / static_cast<double>(c.size());
    out.recall = r.empty() ? 0.0 : static_cast<double>(l) / static_cast<double>(r.size());
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

double oracle_bleu(const std::string& candidate, const std::string& reference,
                   std::size_t max_n = 4) {
    const auto c = oracle_tokens(candidate);
    const auto r = oracle_tokens(reference);
    if (c.empty()) return 0.0;

    double log_sum = 0.0;
    std::size_t included = 0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        if (c.size() < n) continue; // zero-denominator orders are excluded
        const double denom = static_cast<double>(c.size() - n + 1);
        const long num = oracle_clipped_overlap(oracle_ngrams(c, n), oracle_ngrams(r, n));
        const double p = num > 0 ? static_cast<double>(num) / denom : 1.0 / (2.0 * denom);
        log_sum += std::log(p);
        ++included;
    }
    if (included == 0) return 0.0;
    const double geo = std::exp(log_sum / static_cast<double>(included));
    const double bp = c.size() >= r.size()
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(r.size()) /
                                               static_cast<double>(c.size()));
    return bp * geo;
}

// ===========================================================================
// Criterion 1: the eight rating distributions aggregate to the published
// per-question means.
// ===========================================================================

checker criterion_ratings() {
    checker check;
    const auto started = std::chrono::steady_clock::now();

    struct distribution {
        const char* run;
        std::size_t counts[5]; // ratings of score 1..5
        double expected_mean;  // over 50 questions
    };
    const distribution table[] = {
        {"ada_davinci", {2, 7, 6, 12, 21}, 3.74},
        {"instructor_davinci", {2, 7, 11, 15, 15}, 3.68},
        {"bm25_davinci", {11, 11, 7, 15, 6}, 2.88},
        {"chatgpt_direct", {0, 9, 13, 20, 8}, 3.54},
        {"instructor_flan_ul2", {5, 36, 9, 0, 0}, 2.08},
        {"ada_flan_ul2", {11, 33, 5, 1, 0}, 1.92},
        {"instructor_longformer", {20, 30, 0, 0, 0}, 1.60},
        {"ada_longformer", {16, 34, 0, 0, 0}, 1.68},
    };

    std::vector<RatingRecord> records;
    for (const auto& dist : table) {
        int question = 0;
        for (int score = 1; score <= 5; ++score)
            for (std::size_t i = 0; i < dist.counts[score - 1]; ++i)
                records.push_back({dist.run, "q" + std::to_string(++question), "r1", score});
    }

    for (const auto& dist : table) {
        const auto agg = aggregate_ratings(records, dist.run);
        std::size_t expected_total = 0;
        std::size_t expected_points = 0;
        for (int score = 1; score <= 5; ++score) {
            check.expect(agg.counts[score - 1] == dist.counts[score - 1],
                         std::string(dist.run) + ": score " + std::to_string(score) + " count");
            expected_total += dist.counts[score - 1];
            expected_points += dist.counts[score - 1] * static_cast<std::size_t>(score);
        }
        check.expect(agg.total == expected_total, std::string(dist.run) + ": total");
        check.expect(agg.sum_points == expected_points, std::string(dist.run) + ": points");
        check.expect_near(agg.mean_over(50), dist.expected_mean,
                          std::string(dist.run) + ": mean over 50 questions");
    }

    const double elapsed = seconds_since(started);
    check.expect(elapsed < 1.0, "aggregation took " + std::to_string(elapsed) + "s, budget 1s");
    return check;
}

// ===========================================================================
// Criterion 2: Rouge-1/2/L and BLEU match the oracles on hand-picked and
// random pairs.
// ===========================================================================

void check_metric_pair(checker& check, const std::string& candidate,
                       const std::string& reference, const std::string& label) {
    const PRF lib1 = rouge_n(candidate, reference, 1);
    const PRF ora1 = oracle_rouge_n(candidate, reference, 1);
    check.expect_near(lib1.precision, ora1.precision, label + ": rouge1 precision");
    check.expect_near(lib1.recall, ora1.recall, label + ": rouge1 recall");
    check.expect_near(lib1.f1, ora1.f1, label + ": rouge1 f1");

    const PRF lib2 = rouge_n(candidate, reference, 2);
    const PRF ora2 = oracle_rouge_n(candidate, reference, 2);
    check.expect_near(lib2.precision, ora2.precision, label + ": rouge2 precision");
    check.expect_near(lib2.recall, ora2.recall, label + ": rouge2 recall");
    check.expect_near(lib2.f1, ora2.f1, label + ": rouge2 f1");

    const PRF libl = rouge_l(candidate, reference);
    const PRF oral = oracle_rouge_l(candidate, reference);
    check.expect_near(libl.precision, oral.precision, label + ": rougeL precision");
    check.expect_near(libl.recall, oral.recall, label + ": rougeL recall");
    check.expect_near(libl.f1, oral.f1, label + ": rougeL f1");

    check.expect_near(bleu(candidate, reference), oracle_bleu(candidate, reference),
                      label + ": bleu");
}

checker criterion_text_metrics() {
    checker check;

    const std::pair<const char*, const char*> hand_pairs[] = {
        {"the cat sat on the mat", "the cat is on the mat"},
        {"a b c d", "a c b d"},
        {"the cat sat", "the cat sat on the mat"},
        {"police arrested the accused", "police arrested the accused"},
        {"", "the law"},
        {"the law", ""},
        {"", ""},
        {"a a a a", "a a"},
        {"a a", "a a a a"},
        {"alpha beta", "gamma delta"},
        {"bail", "bail"},
        {"bail", "appeal"},
        {"?!,", "law"},
        {"a b a b a b", "a b a b"},
        {"one two three four five six seven", "one two"},
        {"section 438 grants anticipatory bail", "anticipatory bail is granted by section 438"},
        {"The Law", "the law"},
        {"article 21 of 1950", "article 21"},
        {"b a", "a b"},
        {"the the the", "the"},
        {"x y z", "x y z w"},
        {"w x y z", "x y z"},
        {"caf\xc3\xa9 law", "caf\xc3\xa9 law"},
        {"amendment power of parliament", "power of parliament to amend"},
        {"right to life under article 21", "article 21 protects the right to life"},
        {"a", "a a a a a a a a"},
        {"a b c d e f g h", "a"},
    };
    int index = 0;
    for (const auto& [candidate, reference] : hand_pairs)
        check_metric_pair(check, candidate, reference, "hand pair " + std::to_string(index++));
    check.expect(index >= 25, "need at least 25 hand pairs");

    const std::vector<std::string> vocab = {"court",   "bail",   "act",    "section", "appeal",
                                            "arrest",  "law",    "right",  "damages", "breach",
                                            "article", "remedy"};
    std::mt19937_64 rng(20250825);
    std::uniform_int_distribution<std::size_t> len_dist(0, 25);
    std::uniform_int_distribution<std::size_t> word_dist(0, vocab.size() - 1);
    const auto random_text = [&] {
        std::string text;
        const std::size_t len = len_dist(rng);
        for (std::size_t i = 0; i < len; ++i) {
            if (!text.empty()) text += ' ';
            text += vocab[word_dist(rng)];
        }
        return text;
    };
    for (int i = 0; i < 200; ++i)
        check_metric_pair(check, random_text(), random_text(),
                          "random pair " + std::to_string(i));
    return check;
}

// ===========================================================================
// Criterion 3: BM25 retrieval agrees with a brute-force scorer on every rank.
// ===========================================================================

struct oracle_doc {
    std::string id;
    std::vector<std::string> tokens;
};

std::vector<ScoredChunk> oracle_bm25_top_k(const std::vector<oracle_doc>& docs,
                                           const std::string& query, double k1, double b,
                                           std::size_t k) {
    const auto query_tokens = oracle_tokens(query);
    const std::set<std::string> terms(query_tokens.begin(), query_tokens.end());

    const double n = static_cast<double>(docs.size());
    std::size_t total_len = 0;
    for (const auto& doc : docs) total_len += doc.tokens.size();
    const double avgdl = static_cast<double>(total_len) / static_cast<double>(docs.size());

    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        const std::set<std::string> uniq(doc.tokens.begin(), doc.tokens.end());
        for (const auto& t : uniq) ++df[t];
    }

    std::vector<double> scores(docs.size(), 0.0);
    for (const auto& term : terms) { // std::set iterates in sorted order
        const auto df_it = df.find(term);
        const double n_t = df_it == df.end() ? 0.0 : static_cast<double>(df_it->second);
        const double idf = std::log(1.0 + (n - n_t + 0.5) / (n_t + 0.5));
        const double w = idf * (k1 + 1.0);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const double tf = static_cast<double>(
                std::count(docs[i].tokens.begin(), docs[i].tokens.end(), term));
            if (tf == 0.0) continue;
            const double dl = static_cast<double>(docs[i].tokens.size());
            scores[i] += w * tf / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
    }

    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        if (scores[a] != scores[c]) return scores[a] > scores[c];
        return docs[a].id < docs[c].id;
    });

    std::vector<ScoredChunk> top;
    for (std::size_t i = 0; i < std::min(k, docs.size()); ++i)
        top.push_back({docs[order[i]].id, scores[order[i]]});
    return top;
}

checker criterion_bm25() {
    checker check;
    const auto started = std::chrono::steady_clock::now();

    const std::vector<std::string> vocab = {
        "court", "bail", "act",     "section", "appeal",  "arrest",   "law",
        "right", "writ", "damages", "breach",  "article", "remedy",   "judge",
        "trial", "code", "penal",   "custody", "hearing", "evidence", "contract"};
    std::mt19937_64 rng(438);
    std::uniform_int_distribution<std::size_t> corpus_size_dist(1, 100);
    std::uniform_int_distribution<std::size_t> doc_len_dist(0, 60);
    std::uniform_int_distribution<std::size_t> query_len_dist(0, 5);
    std::uniform_int_distribution<std::size_t> word_dist(0, vocab.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int corpus_idx = 0; corpus_idx < 50 && check.ok; ++corpus_idx) {
        const std::size_t doc_count = corpus_size_dist(rng);
        std::vector<Chunk> chunks;
        std::vector<oracle_doc> docs;
        std::set<std::string> used_ids;
        for (std::size_t d = 0; d < doc_count; ++d) {
            // random ids so lexicographic tie-breaks differ from insert order
            std::string id;
            do {
                id.clear();
                for (int c = 0; c < 4; ++c)
                    id += static_cast<char>('a' + static_cast<char>(rng() % 26));
            } while (!used_ids.insert(id).second);

            oracle_doc doc;
            doc.id = id;
            const std::size_t len = doc_len_dist(rng);
            std::string text;
            for (std::size_t t = 0; t < len; ++t) {
                doc.tokens.push_back(vocab[word_dist(rng)]);
                if (!text.empty()) text += ' ';
                text += doc.tokens.back();
            }
            docs.push_back(doc);
            chunks.push_back({id, "doc", d, text});
        }

        Bm25Index::Params params;
        if (corpus_idx % 2 == 1) {
            params.k1 = 0.5 + 2.0 * unit(rng);
            params.b = unit(rng);
        }
        const auto index = Bm25Index::build(chunks, TokenizerConfig{}, params);

        for (int query_idx = 0; query_idx < 20 && check.ok; ++query_idx) {
            std::string query;
            const std::size_t qlen = query_len_dist(rng);
            for (std::size_t t = 0; t < qlen; ++t) {
                if (!query.empty()) query += ' ';
                query += rng() % 7 == 0 ? "zzzunseen" : vocab[word_dist(rng)];
            }
            const std::size_t k = 1 + rng() % (doc_count + 3);

            const auto got = index.retrieve_top_k(query, k);
            const auto want = oracle_bm25_top_k(docs, query, params.k1, params.b, k);

            const std::string label = "corpus " + std::to_string(corpus_idx) + " query " +
                                      std::to_string(query_idx);
            check.expect(got.size() == want.size(), label + ": result count");
            for (std::size_t i = 0; i < got.size() && check.ok; ++i) {
                check.expect(got[i].chunk_id == want[i].chunk_id,
                             label + ": rank " + std::to_string(i) + " expected \"" +
                                 want[i].chunk_id + "\", got \"" + got[i].chunk_id + "\"");
                check.expect_near(got[i].score, want[i].score,
                                  label + ": score at rank " + std::to_string(i));
            }
        }
    }

    const double elapsed = seconds_since(started);
    check.expect(elapsed < 10.0, "bm25 sweep took " + std::to_string(elapsed) + "s, budget 10s");
    return check;
}

// ===========================================================================
// Criterion 4: exact kNN agrees with a brute-force cosine scan.
// ===========================================================================

checker criterion_knn() {
    checker check;
    constexpr std::size_t kDim = 24;
    std::mt19937_64 rng(9241);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);

    const auto own_norm = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x * x;
        return std::sqrt(sum);
    };
    const auto own_dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
        return sum;
    };

    const std::size_t sizes[] = {1, 13, 137, 1000};
    for (const std::size_t size : sizes) {
        VectorStore store(kDim, "acceptance");
        std::vector<std::pair<std::string, std::vector<double>>> records;
        for (std::size_t i = 0; i < size; ++i) {
            std::string id = "v";
            for (int c = 0; c < 5; ++c) id += static_cast<char>('a' + rng() % 26);
            id += std::to_string(i);

            std::vector<double> vec;
            if (i > 2 && rng() % 10 == 0) {
                vec = records[rng() % records.size()].second; // exact tie with an earlier record
            } else {
                vec.resize(kDim);
                for (auto& x : vec) x = coord(rng);
            }
            store.add(id, vec);
            records.emplace_back(std::move(id), std::move(vec));
        }

        for (int query_idx = 0; query_idx < 25 && check.ok; ++query_idx) {
            std::vector<double> query(kDim);
            for (auto& x : query) x = coord(rng);
            const std::size_t ks[] = {1, 4, 10, size, size + 7};
            const std::size_t k = std::max<std::size_t>(1, ks[query_idx % 5]);

            const auto got = store.knn_query(query, k);

            // brute force: same similarity expression, ordered by (sim desc, id asc)
            const double qnorm = own_norm(query);
            std::vector<std::pair<double, std::string>> sims;
            for (const auto& [id, vec] : records) {
                const double sim =
                    std::clamp(own_dot(query, vec) / (qnorm * own_norm(vec)), -1.0, 1.0);
                sims.emplace_back(sim, id);
            }
            std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });

            const std::string label =
                "store size " + std::to_string(size) + " query " + std::to_string(query_idx);
            check.expect(got.size() == std::min(k, size), label + ": result count");
            for (std::size_t i = 0; i < got.size() && check.ok; ++i) {
                check.expect(got[i].chunk_id == sims[i].second,
                             label + ": rank " + std::to_string(i) + " expected \"" +
                                 sims[i].second + "\", got \"" + got[i].chunk_id + "\"");
                check.expect_near(got[i].similarity, sims[i].first,
                                  label + ": similarity at rank " + std::to_string(i));
            }
        }
    }
    return check;
}

// ===========================================================================
// Criterion 5: chunker hand traces plus structural invariants on random docs.
// ===========================================================================

// Independent re-segmentation following the documented rule: cut after every
// separator occurrence; bare-separator pieces extend the preceding segment,
// leading ones attach to the first segment with content.
std::vector<std::string> oracle_segments(const std::string& text, const std::string& sep) {
    std::vector<std::string> segments;
    std::string carry;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto hit = text.find(sep, pos);
        const std::string piece = hit == std::string::npos
                                      ? text.substr(pos)
                                      : text.substr(pos, hit + sep.size() - pos);
        pos = hit == std::string::npos ? text.size() : hit + sep.size();
        if (piece == sep) {
            if (segments.empty())
                carry += piece;
            else
                segments.back() += piece;
        } else if (carry.empty()) {
            segments.push_back(piece);
        } else {
            segments.push_back(carry + piece);
            carry.clear();
        }
    }
    return segments;
}

// True when some choice of overlap lengths (each at most cfg.overlap) makes
// the chunks tile the document exactly.
bool oracle_covers(const std::string& doc, const std::vector<Chunk>& chunks,
                   std::size_t overlap, std::size_t index, std::size_t end_prev) {
    if (index == chunks.size()) return end_prev == doc.size();
    const std::string& text = chunks[index].text;
    const std::size_t max_back = std::min({overlap, text.size(), end_prev});
    for (std::size_t back = 0; back <= max_back; ++back) {
        const std::size_t start = end_prev - back;
        if (index == 0 && start != 0) break; // the first chunk must sit at the doc start
        if (start + text.size() > doc.size()) continue;
        if (doc.compare(start, text.size(), text) != 0) continue;
        if (oracle_covers(doc, chunks, overlap, index + 1, start + text.size())) return true;
    }
    return false;
}

checker criterion_chunker() {
    checker check;

    {
        CleanDocument doc;
        doc.id = "trace1";
        doc.text = "aaaa.bbbb.cccc";
        const auto chunks = split_document(doc, {".", 10, 3});
        check.expect(chunks.size() == 2, "trace1: chunk count");
        if (chunks.size() == 2) {
            check.expect(chunks[0].text == "aaaa.bbbb.", "trace1: first chunk");
            check.expect(chunks[1].text == "cccc", "trace1: second chunk");
        }
    }
    {
        CleanDocument doc;
        doc.id = "trace2";
        doc.text = "aa.bb.cc.dd";
        const auto chunks = split_document(doc, {".", 6, 3});
        check.expect(chunks.size() == 3, "trace2: chunk count");
        if (chunks.size() == 3) {
            check.expect(chunks[0].text == "aa.bb.", "trace2: first chunk");
            check.expect(chunks[1].text == "bb.cc.", "trace2: second chunk");
            check.expect(chunks[2].text == "cc.dd", "trace2: third chunk");
        }
    }

    std::mt19937_64 rng(1973);
    const std::string separators[] = {".", "||", "\n\n"};
    for (int iter = 0; iter < 500 && check.ok; ++iter) {
        ChunkerConfig cfg;
        cfg.separator = separators[rng() % 3];
        cfg.chunk_size = 3 + rng() % 38;
        cfg.overlap = rng() % std::min<std::size_t>(cfg.chunk_size, 13);

        // random pieces joined by the separator; empty pieces make bare runs
        std::string text;
        const std::size_t piece_count = rng() % 13;
        for (std::size_t p = 0; p < piece_count; ++p) {
            const std::size_t len = rng() % (cfg.chunk_size * 2);
            for (std::size_t c = 0; c < len; ++c)
                text += static_cast<char>('a' + rng() % 26);
            if (p + 1 < piece_count || rng() % 2 == 0) text += cfg.separator;
        }

        CleanDocument doc;
        doc.id = "doc" + std::to_string(iter);
        doc.text = text;
        const auto chunks = split_document(doc, cfg);
        const std::string label = "doc " + std::to_string(iter);

        const bool has_content = !oracle_segments(text, cfg.separator).empty();
        check.expect(chunks.empty() == !has_content, label + ": emptiness");
        if (chunks.empty()) continue;

        for (std::size_t i = 0; i < chunks.size(); ++i) {
            check.expect(chunks[i].doc_id == doc.id, label + ": doc_id");
            check.expect(chunks[i].seq == i, label + ": seq");
            check.expect(chunks[i].chunk_id == doc.id + "#" + std::to_string(i),
                         label + ": chunk_id");
            check.expect(!chunks[i].text.empty(), label + ": chunk text non-empty");
            check.expect(text.find(chunks[i].text) != std::string::npos,
                         label + ": chunk is a substring of the document");

            const auto segments = oracle_segments(chunks[i].text, cfg.separator);
            if (segments.size() >= 2)
                check.expect(chunks[i].text.size() <= cfg.chunk_size + cfg.overlap,
                             label + ": multi-segment chunk of " +
                                 std::to_string(chunks[i].text.size()) + " bytes exceeds " +
                                 std::to_string(cfg.chunk_size + cfg.overlap));
        }

        check.expect(oracle_covers(text, chunks, cfg.overlap, 0, 0),
                     label + ": chunks do not tile the document");

        const auto again = split_document(doc, cfg);
        bool same = again.size() == chunks.size();
        for (std::size_t i = 0; same && i < chunks.size(); ++i)
            same = again[i].chunk_id == chunks[i].chunk_id && again[i].text == chunks[i].text;
        check.expect(same, label + ": chunking twice differs");
    }
    return check;
}

// ===========================================================================
// Criterion 6: an embedding-retrieval run with deterministic providers is
// byte-for-byte reproducible end to end.
// ===========================================================================

checker criterion_determinism() {
    checker check;

    const auto execute = [&check]() -> std::pair<std::string, std::string> {
        const auto corpus =
            load_corpus(std::string(LEXRAG_DATA_DIR) + "/sample_corpus.jsonl");
        std::vector<Chunk> chunks;
        for (const auto& doc : corpus) {
            auto doc_chunks = split_document(doc, ChunkerConfig{});
            chunks.insert(chunks.end(), doc_chunks.begin(), doc_chunks.end());
        }

        auto registry = make_default_registry(0);
        registry.add(std::make_shared<MockEmbeddingProvider>("ada-mock", 1536, 0));
        const auto embedder = registry.embedding("ada-mock");

        auto store = std::make_shared<VectorStore>(embedder->dimension(), embedder->name());
        std::vector<std::string> texts;
        for (const auto& chunk : chunks) texts.push_back(chunk.text);
        const auto batch = embedder->embed_batch(texts);
        for (std::size_t i = 0; i < chunks.size(); ++i)
            store->add(chunks[i].chunk_id, batch.vectors[i]);

        CorpusArtifacts artifacts;
        artifacts.chunks = chunks;
        artifacts.vectors = store;

        RunConfig cfg;
        cfg.name = "ada_davinci";
        cfg.retriever = RetrieverKind::embedding;
        cfg.embedder = "ada-mock";
        cfg.generator = "mock-echo";
        cfg.prompt = PromptTemplateId::davinci_legal;
        cfg.k = 4;

        const std::vector<TestCase> tests = {
            {"q01", "What is anticipatory bail under Section 438?",
             "Anticipatory bail is a direction to release a person on bail before arrest."},
            {"q02", "Which article protects personal liberty?",
             "Article 21 protects life and personal liberty."},
            {"q03", "What does the basic structure doctrine limit?",
             "It limits the amending power of Parliament."},
            {"q04", "What compensation does Section 73 provide?",
             "Compensation for loss caused by a breach of contract."},
            {"q05", "When can police arrest without a warrant?",
             "In cognizable offences under Section 41."},
            {"q06", "What is a first information report?",
             "Information about a cognizable offence recorded under Section 154."},
            {"q07", "Who may grant anticipatory bail?",
             "The High Court or the Court of Session."},
            {"q08", "What are liquidated damages?",
             "A sum named in the contract as payable on breach under Section 74."},
            {"q09", "What makes an agreement a contract?",
             "Free consent, lawful consideration and a lawful object under Section 10."},
            {"q10", "Can bail conditions be imposed?",
             "Yes, courts may impose conditions when granting bail."},
        };

        const auto result = run(cfg, tests, artifacts, registry);
        for (const auto& row : result.rows)
            check.expect(row.ok, "row " + row.question_id + " failed: " + row.error);

        std::ostringstream rows_out;
        for (const auto& row : result.rows)
            append_result_row(result.run_name, row, rows_out);

        const auto report = make_report({result});
        std::ostringstream report_out;
        write_report_tsv(report, report_out);
        return {rows_out.str(), report_out.str()};
    };

    const auto first = execute();
    const auto second = execute();
    check.expect(!first.first.empty(), "no result rows were produced");
    check.expect(first.first == second.first, "results JSONL differs between executions");
    check.expect(first.second == second.second, "report TSV differs between executions");
    return check;
}

// ===========================================================================
// Criterion 7: extractive answers are substrings of the assembled context and
// invalid spans always raise ProviderError.
// ===========================================================================

class planted_span_provider : public GenerationProvider {
public:
    std::size_t start = 0;
    std::size_t end = 0;

    const std::string& name() const override { return name_; }
    GenerationMode mode() const override { return GenerationMode::extractive; }
    std::size_t token_budget() const override { return 4096; }
    ExtractionSpan extract(const std::string&, const std::string&) const override {
        return {start, end, 1};
    }

private:
    std::string name_ = "planted";
};

checker criterion_extractive() {
    checker check;

    const std::vector<std::string> sentences = {
        "Anticipatory bail is a direction under Section 438.",
        "The sum named in the contract limits the compensation.",
        "Parliament cannot destroy the basic structure of the Constitution.",
        "An officer in charge of a police station records the information.",
        "The High Court may impose conditions while granting relief.",
        "Compensation is recoverable for loss which naturally arose.",
    };
    std::mt19937_64 rng(811);
    planted_span_provider provider;

    for (int iter = 0; iter < 200 && check.ok; ++iter) {
        std::vector<Chunk> ranked;
        const std::size_t chunk_count = 1 + rng() % 4;
        for (std::size_t i = 0; i < chunk_count; ++i) {
            std::string text;
            const std::size_t sentence_count = 1 + rng() % 3;
            for (std::size_t s = 0; s < sentence_count; ++s) {
                if (!text.empty()) text += ' ';
                text += sentences[rng() % sentences.size()];
            }
            ranked.push_back({"c" + std::to_string(i), "doc", i, text});
        }
        const std::string question = "What does sentence " + std::to_string(iter) + " hold?";
        const std::string label = "iteration " + std::to_string(iter);

        const auto expected =
            assemble_context(ranked, provider.token_budget(), 0, estimate_tokens(question));

        provider.start = rng() % expected.text.size();
        provider.end = provider.start + 1 + rng() % (expected.text.size() - provider.start);
        const auto answer = extract_answer(provider, question, ranked);

        check.expect(answer.mode == GenerationMode::extractive, label + ": mode");
        check.expect(answer.text ==
                         expected.text.substr(provider.start, provider.end - provider.start),
                     label + ": answer must equal the planted span");
        if (!answer.abstained)
            check.expect(expected.text.find(answer.text) != std::string::npos,
                         label + ": answer must be a substring of the context");
        check.expect(answer.context_chunk_ids == expected.chunk_ids, label + ": context ids");

        // invalid spans: empty, inverted, or past the end of the context
        bool threw = false;
        switch (iter % 3) {
            case 0:
                provider.start = rng() % (expected.text.size() + 1);
                provider.end = provider.start; // empty
                break;
            case 1:
                provider.start = 1 + rng() % expected.text.size();
                provider.end = rng() % provider.start; // inverted
                break;
            default:
                provider.start = rng() % expected.text.size();
                provider.end = expected.text.size() + 1 + rng() % 40; // out of bounds
                break;
        }
        try {
            extract_answer(provider, question, ranked);
        } catch (const ProviderError&) {
            threw = true;
        }
        check.expect(threw, label + ": invalid span [" + std::to_string(provider.start) + ", " +
                                std::to_string(provider.end) + ") must raise ProviderError");

        // the built-in extractive mock must obey the same substring property
        const auto registry = make_default_registry(0);
        const auto mock = registry.generation("mock-extract");
        const auto mock_answer = extract_answer(*mock, question, ranked);
        const auto mock_context =
            assemble_context(ranked, mock->token_budget(), 0, estimate_tokens(question));
        check.expect(mock_context.text.find(mock_answer.text) != std::string::npos,
                     label + ": mock-extract answer must be a substring of its context");
    }
    return check;
}

// ===========================================================================
// Criterion 8: all eight run configurations load and resolve their providers,
// in both the offline and the remote variants, without touching the network.
// ===========================================================================

checker criterion_configs() {
    checker check;

    const char* names[] = {"ada_davinci",   "instructor_davinci",   "bm25_davinci",
                           "chatgpt_direct", "instructor_flan_ul2", "ada_flan_ul2",
                           "instructor_longformer", "ada_longformer"};
    const char* variants[] = {"", "remote/"};

    for (const char* variant : variants) {
        for (const char* name : names) {
            const std::string path =
                std::string(LEXRAG_CONFIG_DIR) + "/" + variant + name + ".json";
            const std::string label = std::string(variant) + name;
            try {
                const auto setup = load_run_setup(path);
                check.expect(setup.config.name == name, label + ": run name");

                const auto generator = setup.providers.generation(setup.config.generator);
                check.expect(generator != nullptr, label + ": generator resolves");
                check.expect(!setup.config.embedder.empty(), label + ": embedder configured");
                const auto embedder = setup.providers.embedding(setup.config.embedder);
                check.expect(embedder != nullptr && embedder->dimension() > 0,
                             label + ": embedder resolves");

                switch (setup.config.retriever) {
                    case RetrieverKind::embedding:
                        check.expect(!setup.config.vector_store_path.empty(),
                                     label + ": vector store artifact");
                        check.expect(setup.config.k == 4, label + ": retrieval depth");
                        break;
                    case RetrieverKind::bm25:
                        check.expect(!setup.config.bm25_index_path.empty(),
                                     label + ": bm25 index artifact");
                        check.expect(setup.config.k == 3, label + ": retrieval depth");
                        break;
                    case RetrieverKind::none:
                        check.expect(generator->mode() == GenerationMode::generative,
                                     label + ": direct runs need a generative provider");
                        break;
                }
            } catch (const std::exception& e) {
                check.expect(false, label + ": " + e.what());
            }
        }
    }
    return check;
}

} // namespace

int main() {
    const struct {
        int number;
        const char* label;
        checker (*fn)();
    } criteria[] = {
        {1, "rating distributions aggregate to the published means", criterion_ratings},
        {2, "rouge and bleu match brute-force oracles", criterion_text_metrics},
        {3, "bm25 ranking matches a brute-force scorer", criterion_bm25},
        {4, "knn matches a brute-force cosine scan", criterion_knn},
        {5, "chunker hand traces and invariants hold", criterion_chunker},
        {6, "mock evaluation runs are byte-identical", criterion_determinism},
        {7, "extractive spans are validated substrings", criterion_extractive},
        {8, "all eight configurations load and resolve providers", criterion_configs},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        checker result;
        try {
            result = criterion.fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("unexpected exception: ") + e.what();
        }
        if (result.ok) {
            std::printf("PASS criterion %d: %s\n", criterion.number, criterion.label);
        } else {
            std::printf("FAIL criterion %d: %s (%s)\n", criterion.number, criterion.label,
                        result.detail.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
