#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "lexrag/embedding.hpp"
#include "lexrag/generation.hpp"

namespace lexrag {

/// Name-keyed lookup of the providers a run may use. Registering a name twice
/// replaces the earlier provider, so config files can override the built-ins.
class ProviderRegistry {
public:
    void add(std::shared_ptr<EmbeddingProvider> provider);
    void add(std::shared_ptr<GenerationProvider> provider);

    /// Throws DataError for names nobody registered.
    std::shared_ptr<EmbeddingProvider> embedding(const std::string& name) const;
    std::shared_ptr<GenerationProvider> generation(const std::string& name) const;

    bool has_embedding(const std::string& name) const;
    bool has_generation(const std::string& name) const;

private:
    std::unordered_map<std::string, std::shared_ptr<EmbeddingProvider>> embedders_;
    std::unordered_map<std::string, std::shared_ptr<GenerationProvider>> generators_;
};

/// Registry preloaded with the offline deterministic providers: mock-embed
/// (256-dim), mock-echo, mock-abstain, and mock-extract.
ProviderRegistry make_default_registry(std::uint64_t default_seed = 0);

/// Builds providers from a JSON array of specs and registers them. Each spec
/// carries "kind" ("embedding" | "generation"), "type" ("mock", "mock-echo",
/// "mock-abstain", "mock-fixed", "mock-extract", or "http"), a "name", and
/// the type-specific fields of EmbeddingProviderSpec / GenerationProviderSpec.
/// Mock embedders inherit default_seed unless the spec pins its own.
void add_providers_from_json(ProviderRegistry& registry, const nlohmann::json& specs,
                             std::uint64_t default_seed = 0);

} // namespace lexrag
