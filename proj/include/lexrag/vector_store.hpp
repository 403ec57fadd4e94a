#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexrag {

double l2_norm(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);

/// Cosine of the angle between two equal-dimension vectors, clamped to
/// [-1, 1]. Throws std::invalid_argument on dimension mismatch or zero norm.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct ScoredNeighbor {
    std::string chunk_id;
    double similarity = 0.0;
};

/// Exact (non-approximate) cosine k-nearest-neighbour store over chunk
/// embeddings produced by a single named provider.
class VectorStore {
public:
    VectorStore(std::size_t dimension, std::string provider_name);

    std::size_t dimension() const { return dimension_; }
    const std::string& provider_name() const { return provider_name_; }
    std::size_t size() const { return ids_.size(); }

    /// Throws DataError for duplicate chunk ids, dimension mismatches, or
    /// zero vectors.
    void add(const std::string& chunk_id, std::vector<double> vector);

    /// Exact top-k by cosine similarity, descending, ties broken by ascending
    /// chunk_id. Returns min(k, size()) neighbours.
    std::vector<ScoredNeighbor> knn_query(const std::vector<double>& query, std::size_t k = 4) const;

    void save(const std::string& path) const;
    static VectorStore load(const std::string& path);

private:
    std::size_t dimension_;
    std::string provider_name_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> vectors_;
    std::vector<double> norms_;
    std::unordered_map<std::string, std::size_t> id_to_idx_;
};

} // namespace lexrag
