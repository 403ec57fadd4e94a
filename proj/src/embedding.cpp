#include "lexrag/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "http_transport.hpp"
#include "lexrag/error.hpp"
#include "lexrag/tokenizer.hpp"

namespace lexrag {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull;
    h ^= seed;
    h *= 1099511628211ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void validate_batch_input(const std::vector<std::string>& texts) {
    if (texts.empty()) throw std::invalid_argument("embed_batch: batch must be non-empty");
    for (const auto& t : texts)
        if (t.empty()) throw std::invalid_argument("embed_batch: texts must be non-empty");
}

} // namespace

std::vector<double> mock_embed(std::string_view text, std::size_t dimension, std::uint64_t seed) {
    if (dimension < 8)
        throw std::invalid_argument("mock_embed: dimension must be at least 8");

    std::vector<double> v(dimension, 0.0);
    const auto bump = [&](std::string_view feature) { v[fnv1a(feature, seed) % dimension] += 1.0; };
    for (const auto& token : tokenize(text)) {
        bump(token);
        for (std::size_t i = 0; i + 1 < token.size(); ++i)
            bump(std::string_view(token).substr(i, 2));
    }

    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) {
        // No alphanumeric features at all; fall back to one bucket derived
        // from the raw bytes so the unit-norm invariant still holds.
        v[fnv1a(text, seed ^ 0x517cc1b727220a95ull) % dimension] = 1.0;
        norm_sq = 1.0;
    }
    const double norm = std::sqrt(norm_sq);
    for (double& x : v) x /= norm;
    return v;
}

MockEmbeddingProvider::MockEmbeddingProvider(EmbeddingProviderSpec spec) : spec_(std::move(spec)) {
    if (spec_.dimension < 8)
        throw std::invalid_argument("mock embedding provider: dimension must be at least 8");
}

MockEmbeddingProvider::MockEmbeddingProvider(std::string name, std::size_t dimension,
                                             std::uint64_t seed) {
    spec_.name = std::move(name);
    spec_.dimension = dimension;
    spec_.seed = seed;
    if (spec_.dimension < 8)
        throw std::invalid_argument("mock embedding provider: dimension must be at least 8");
}

EmbeddingBatch MockEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    validate_batch_input(texts);
    EmbeddingBatch batch;
    batch.vectors.reserve(texts.size());
    for (const auto& text : texts) {
        const std::string input = spec_.instruction ? *spec_.instruction + text : text;
        batch.vectors.push_back(mock_embed(input, spec_.dimension, spec_.seed));
    }
    return batch;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingProviderSpec spec) : spec_(std::move(spec)) {
    if (!spec_.endpoint || spec_.endpoint->empty())
        throw DataError("http embedding provider \"" + spec_.name + "\": endpoint required");
    if (spec_.dimension == 0)
        throw DataError("http embedding provider \"" + spec_.name + "\": dimension required");
    if (spec_.batch_size == 0)
        throw DataError("http embedding provider \"" + spec_.name + "\": batch_size must be >= 1");
}

EmbeddingBatch HttpEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    validate_batch_input(texts);

    EmbeddingBatch batch;
    batch.vectors.resize(texts.size());
    std::int64_t usage = 0;
    bool saw_usage = false;

    for (std::size_t offset = 0; offset < texts.size(); offset += spec_.batch_size) {
        const std::size_t count = std::min(spec_.batch_size, texts.size() - offset);

        nlohmann::json payload;
        payload["model"] = spec_.name;
        auto& input = payload["input"] = nlohmann::json::array();
        for (std::size_t i = 0; i < count; ++i) {
            const auto& text = texts[offset + i];
            input.push_back(spec_.instruction ? *spec_.instruction + text : text);
        }

        const auto response = detail::post_json(*spec_.endpoint, spec_.auth_env, spec_.timeout_ms,
                                                spec_.retry, payload);
        batch.attempts = std::max(batch.attempts, response.attempts);

        if (!response.body.contains("data") || !response.body["data"].is_array())
            throw ProviderError("embedding provider \"" + spec_.name +
                                "\": response missing \"data\" array");
        const auto& data = response.body["data"];
        if (data.size() != count)
            throw ProviderError("embedding provider \"" + spec_.name + "\": sent " +
                                std::to_string(count) + " inputs, received " +
                                std::to_string(data.size()) + " embeddings");
        for (const auto& item : data) {
            std::size_t index = 0;
            std::vector<double> vec;
            try {
                index = item.at("index").get<std::size_t>();
                vec = item.at("embedding").get<std::vector<double>>();
            } catch (const nlohmann::json::exception& e) {
                throw ProviderError("embedding provider \"" + spec_.name +
                                    "\": malformed data item: " + e.what());
            }
            if (index >= count)
                throw ProviderError("embedding provider \"" + spec_.name +
                                    "\": embedding index " + std::to_string(index) +
                                    " out of range");
            if (vec.size() != spec_.dimension)
                throw ProviderError("embedding provider \"" + spec_.name +
                                    "\": dimension mismatch: expected " +
                                    std::to_string(spec_.dimension) + ", got " +
                                    std::to_string(vec.size()));
            batch.vectors[offset + index] = std::move(vec);
        }
        for (std::size_t i = 0; i < count; ++i)
            if (batch.vectors[offset + i].empty())
                throw ProviderError("embedding provider \"" + spec_.name +
                                    "\": missing embedding for input " +
                                    std::to_string(offset + i));

        if (response.body.contains("usage") && response.body["usage"].contains("total_tokens")) {
            usage += response.body["usage"]["total_tokens"].get<std::int64_t>();
            saw_usage = true;
        }
    }
    if (saw_usage) batch.token_usage = usage;
    return batch;
}

} // namespace lexrag
