#include "lexrag/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "lexrag-bm25";

std::vector<std::string> distinct_terms(const std::vector<std::string>& tokens) {
    std::vector<std::string> terms(tokens);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

} // namespace

Bm25Index Bm25Index::build(const std::vector<Chunk>& chunks, const TokenizerConfig& tok,
                           const Params& params) {
    if (!(params.k1 > 0.0)) throw std::invalid_argument("bm25: k1 must be positive");
    if (params.b < 0.0 || params.b > 1.0)
        throw std::invalid_argument("bm25: b must lie in [0, 1]");

    Bm25Index index;
    index.tok_ = tok;
    index.params_ = params;

    std::size_t total_len = 0;
    for (const auto& chunk : chunks) {
        if (index.id_to_idx_.count(chunk.chunk_id))
            throw DataError("bm25: duplicate chunk_id \"" + chunk.chunk_id + "\"");
        const std::size_t idx = index.ids_.size();
        index.id_to_idx_.emplace(chunk.chunk_id, idx);
        index.ids_.push_back(chunk.chunk_id);

        const auto tokens = tokenize(chunk.text, tok);
        index.lengths_.push_back(tokens.size());
        total_len += tokens.size();

        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (auto& [term, freq] : tf) index.postings_[term].emplace_back(idx, freq);
    }
    index.avgdl_ = chunks.empty() ? 0.0
                                  : static_cast<double>(total_len) / static_cast<double>(chunks.size());

    for (auto& [term, posting] : index.postings_) {
        std::sort(posting.begin(), posting.end(), [&](const auto& a, const auto& b) {
            return index.ids_[a.first] < index.ids_[b.first];
        });
    }
    return index;
}

double Bm25Index::idf(const std::string& term) const {
    const auto it = postings_.find(term);
    const double n_t = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
    const double n = static_cast<double>(ids_.size());
    return std::log(1.0 + (n - n_t + 0.5) / (n_t + 0.5));
}

double Bm25Index::score_at(const std::vector<std::string>& terms, std::size_t idx) const {
    const double dl = static_cast<double>(lengths_[idx]);
    double total = 0.0;
    for (const auto& term : terms) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        double tf = 0.0;
        for (const auto& [chunk_idx, freq] : it->second) {
            if (chunk_idx == idx) {
                tf = static_cast<double>(freq);
                break;
            }
        }
        if (tf == 0.0) continue;
        const double denom = tf + params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_);
        total += idf(term) * tf * (params_.k1 + 1.0) / denom;
    }
    return total;
}

double Bm25Index::score(const std::vector<std::string>& query_tokens,
                        const std::string& chunk_id) const {
    const auto it = id_to_idx_.find(chunk_id);
    if (it == id_to_idx_.end()) throw DataError("bm25: unknown chunk_id \"" + chunk_id + "\"");
    return score_at(distinct_terms(query_tokens), it->second);
}

std::vector<ScoredChunk> Bm25Index::retrieve_top_k(const std::string& query, std::size_t k) const {
    if (k == 0) throw std::invalid_argument("bm25: k must be at least 1");
    if (ids_.empty()) return {};

    const auto terms = distinct_terms(tokenize(query, tok_));
    std::vector<double> scores(ids_.size(), 0.0);
    for (const auto& term : terms) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double w = idf(term) * (params_.k1 + 1.0);
        for (const auto& [idx, freq] : it->second) {
            const double tf = static_cast<double>(freq);
            const double dl = static_cast<double>(lengths_[idx]);
            scores[idx] += w * tf / (tf + params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_));
        }
    }

    std::vector<std::size_t> order(ids_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids_[a] < ids_[b];
    });

    std::vector<ScoredChunk> top;
    const std::size_t limit = std::min(k, ids_.size());
    top.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) top.push_back({ids_[order[i]], scores[order[i]]});
    return top;
}

void Bm25Index::save(const std::string& path) const {
    ordered_json doc;
    doc["format"] = kFormatName;
    doc["version"] = kFormatVersion;
    doc["params"] = {{"k1", params_.k1}, {"b", params_.b}};
    doc["tokenizer"] = {{"lowercase", tok_.lowercase}};

    ordered_json chunks = ordered_json::array();
    for (std::size_t i = 0; i < ids_.size(); ++i)
        chunks.push_back(ordered_json::array({ids_[i], lengths_[i]}));
    doc["chunks"] = std::move(chunks);

    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    ordered_json postings = ordered_json::object();
    for (const auto& term : terms) {
        ordered_json rows = ordered_json::array();
        for (const auto& [idx, freq] : postings_.at(term))
            rows.push_back(ordered_json::array({ids_[idx], freq}));
        postings[term] = std::move(rows);
    }
    doc["postings"] = std::move(postings);

    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write bm25 index: " + path);
    out << doc.dump() << '\n';
}

Bm25Index Bm25Index::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open bm25 index: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": corrupt bm25 index: " + std::string(e.what()));
    }

    try {
        if (doc.at("format").get<std::string>() != kFormatName)
            throw DataError(path + ": not a bm25 index file");
        if (doc.at("version").get<int>() != kFormatVersion)
            throw DataError(path + ": unsupported bm25 index version " +
                            doc.at("version").dump());

        Bm25Index index;
        index.params_.k1 = doc.at("params").at("k1").get<double>();
        index.params_.b = doc.at("params").at("b").get<double>();
        index.tok_.lowercase = doc.at("tokenizer").at("lowercase").get<bool>();

        std::size_t total_len = 0;
        for (const auto& row : doc.at("chunks")) {
            const auto id = row.at(0).get<std::string>();
            const auto len = row.at(1).get<std::size_t>();
            if (index.id_to_idx_.count(id))
                throw DataError(path + ": duplicate chunk_id \"" + id + "\"");
            index.id_to_idx_.emplace(id, index.ids_.size());
            index.ids_.push_back(id);
            index.lengths_.push_back(len);
            total_len += len;
        }
        index.avgdl_ = index.ids_.empty()
                           ? 0.0
                           : static_cast<double>(total_len) / static_cast<double>(index.ids_.size());

        for (const auto& [term, rows] : doc.at("postings").items()) {
            auto& posting = index.postings_[term];
            for (const auto& row : rows) {
                const auto id = row.at(0).get<std::string>();
                const auto it = index.id_to_idx_.find(id);
                if (it == index.id_to_idx_.end())
                    throw DataError(path + ": posting references unknown chunk_id \"" + id + "\"");
                posting.emplace_back(it->second, row.at(1).get<std::uint32_t>());
            }
        }
        return index;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": corrupt bm25 index: " + std::string(e.what()));
    }
}

} // namespace lexrag
