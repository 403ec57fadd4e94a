#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexrag {

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_base_ms = 200; // delay before attempt n+1 is base * 2^(n-1)
};

struct EmbeddingProviderSpec {
    std::string name;
    std::size_t dimension = 256;
    std::optional<std::string> instruction; // prepended to every input text
    std::optional<std::string> endpoint;    // remote HTTP provider when set
    std::string auth_env;                   // env var holding the bearer token
    std::size_t batch_size = 32;
    RetryPolicy retry;
    int timeout_ms = 30000;
    std::uint64_t seed = 0; // mock hash seed
};

struct EmbeddingBatch {
    std::vector<std::vector<double>> vectors; // one per input, in input order
    std::optional<std::int64_t> token_usage;
    int attempts = 1; // transport attempts behind the batch (max over requests)
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual const std::string& name() const = 0;
    virtual std::size_t dimension() const = 0;

    /// Embeds a non-empty batch of non-empty texts. Every vector has exactly
    /// dimension() entries. Throws ProviderError on remote failures.
    virtual EmbeddingBatch embed_batch(const std::vector<std::string>& texts) const = 0;
};

/// Deterministic offline embedding: each token and each character bigram of a
/// token hashes to a bucket in [0, dimension) and accumulates +1; the bucket
/// vector is then L2-normalized. A pure function of (text, dimension, seed),
/// so equal texts always map to equal unit vectors. dimension must be >= 8.
std::vector<double> mock_embed(std::string_view text, std::size_t dimension, std::uint64_t seed = 0);

class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(EmbeddingProviderSpec spec);
    MockEmbeddingProvider(std::string name, std::size_t dimension, std::uint64_t seed = 0);

    const std::string& name() const override { return spec_.name; }
    std::size_t dimension() const override { return spec_.dimension; }
    EmbeddingBatch embed_batch(const std::vector<std::string>& texts) const override;

private:
    EmbeddingProviderSpec spec_;
};

/// Remote provider speaking JSON over HTTP:
///   POST endpoint  {"model": name, "input": [texts...]}
///   200            {"data": [{"index": i, "embedding": [...]}, ...]}
/// Bearer auth comes from the environment variable named in the spec. Inputs
/// are split into batches of spec.batch_size; transport failures and 5xx
/// responses are retried with exponential backoff.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(EmbeddingProviderSpec spec);

    const std::string& name() const override { return spec_.name; }
    std::size_t dimension() const override { return spec_.dimension; }
    EmbeddingBatch embed_batch(const std::vector<std::string>& texts) const override;

private:
    EmbeddingProviderSpec spec_;
};

} // namespace lexrag
