#include "lexrag/vector_store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "lexrag-vectors";

} // namespace

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_similarity: dimension mismatch");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("cosine_similarity: zero vector");
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

VectorStore::VectorStore(std::size_t dimension, std::string provider_name)
    : dimension_(dimension), provider_name_(std::move(provider_name)) {
    if (dimension_ == 0) throw std::invalid_argument("vector store: dimension must be positive");
}

void VectorStore::add(const std::string& chunk_id, std::vector<double> vector) {
    if (vector.size() != dimension_)
        throw DataError("vector store: vector for \"" + chunk_id + "\" has dimension " +
                        std::to_string(vector.size()) + ", expected " + std::to_string(dimension_));
    if (id_to_idx_.count(chunk_id))
        throw DataError("vector store: duplicate chunk_id \"" + chunk_id + "\"");
    const double norm = l2_norm(vector);
    if (norm == 0.0)
        throw DataError("vector store: zero vector for \"" + chunk_id + "\"");
    id_to_idx_.emplace(chunk_id, ids_.size());
    ids_.push_back(chunk_id);
    vectors_.push_back(std::move(vector));
    norms_.push_back(norm);
}

std::vector<ScoredNeighbor> VectorStore::knn_query(const std::vector<double>& query,
                                                   std::size_t k) const {
    if (k == 0) throw std::invalid_argument("vector store: k must be at least 1");
    if (query.size() != dimension_)
        throw std::invalid_argument("vector store: query has dimension " +
                                    std::to_string(query.size()) + ", expected " +
                                    std::to_string(dimension_));
    const double qnorm = l2_norm(query);
    if (qnorm == 0.0) throw std::invalid_argument("vector store: query must be non-zero");
    if (ids_.empty()) return {};

    std::vector<double> sims(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
        sims[i] = std::clamp(dot(query, vectors_[i]) / (qnorm * norms_[i]), -1.0, 1.0);

    std::vector<std::size_t> order(ids_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sims[a] != sims[b]) return sims[a] > sims[b];
        return ids_[a] < ids_[b];
    });

    std::vector<ScoredNeighbor> top;
    const std::size_t limit = std::min(k, ids_.size());
    top.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) top.push_back({ids_[order[i]], sims[order[i]]});
    return top;
}

void VectorStore::save(const std::string& path) const {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write vector store: " + path);

    ordered_json header;
    header["format"] = kFormatName;
    header["version"] = kFormatVersion;
    header["dimension"] = dimension_;
    header["provider"] = provider_name_;
    header["count"] = ids_.size();
    out << header.dump() << '\n';

    for (std::size_t i = 0; i < ids_.size(); ++i) {
        ordered_json row;
        row["chunk_id"] = ids_[i];
        row["vector"] = vectors_[i];
        out << row.dump() << '\n';
    }
}

VectorStore VectorStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vector store: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError(path + ": corrupt vector store: missing header");
    ordered_json header;
    try {
        header = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": corrupt vector store header: " + std::string(e.what()));
    }

    std::size_t expected_count = 0;
    try {
        if (header.at("format").get<std::string>() != kFormatName)
            throw DataError(path + ": not a vector store file");
        if (header.at("version").get<int>() != kFormatVersion)
            throw DataError(path + ": unsupported vector store version " +
                            header.at("version").dump());
        VectorStore store(header.at("dimension").get<std::size_t>(),
                          header.at("provider").get<std::string>());
        expected_count = header.at("count").get<std::size_t>();

        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            ordered_json row;
            try {
                row = ordered_json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": corrupt vector record: " + std::string(e.what()));
            }
            store.add(row.at("chunk_id").get<std::string>(),
                      row.at("vector").get<std::vector<double>>());
        }
        if (store.size() != expected_count)
            throw DataError(path + ": header claims " + std::to_string(expected_count) +
                            " records, file holds " + std::to_string(store.size()));
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": corrupt vector store: " + std::string(e.what()));
    }
}

} // namespace lexrag
