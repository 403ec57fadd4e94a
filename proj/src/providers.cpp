#include "lexrag/providers.hpp"

#include <stdexcept>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::json;

std::string require_name(const json& spec) {
    if (!spec.contains("name") || !spec["name"].is_string() || spec["name"].empty())
        throw DataError("provider spec missing a \"name\": " + spec.dump());
    return spec["name"].get<std::string>();
}

RetryPolicy retry_from_json(const json& spec) {
    RetryPolicy retry;
    if (spec.contains("retry")) {
        const auto& r = spec["retry"];
        if (r.contains("max_attempts")) retry.max_attempts = r["max_attempts"].get<int>();
        if (r.contains("backoff_base_ms")) retry.backoff_base_ms = r["backoff_base_ms"].get<int>();
    }
    return retry;
}

std::shared_ptr<EmbeddingProvider> embedding_from_json(const json& spec,
                                                       std::uint64_t default_seed) {
    const std::string name = require_name(spec);
    const std::string type = spec.value("type", "mock");

    EmbeddingProviderSpec out;
    out.name = name;
    if (spec.contains("dimension")) out.dimension = spec["dimension"].get<std::size_t>();
    if (spec.contains("instruction") && !spec["instruction"].is_null())
        out.instruction = spec["instruction"].get<std::string>();
    if (spec.contains("auth_env")) out.auth_env = spec["auth_env"].get<std::string>();
    if (spec.contains("batch_size")) out.batch_size = spec["batch_size"].get<std::size_t>();
    if (spec.contains("timeout_ms")) out.timeout_ms = spec["timeout_ms"].get<int>();
    out.retry = retry_from_json(spec);
    out.seed = spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : default_seed;

    if (type == "mock") return std::make_shared<MockEmbeddingProvider>(std::move(out));
    if (type == "http") {
        if (spec.contains("endpoint")) out.endpoint = spec["endpoint"].get<std::string>();
        return std::make_shared<HttpEmbeddingProvider>(std::move(out));
    }
    throw DataError("embedding provider \"" + name + "\": unknown type \"" + type + "\"");
}

std::shared_ptr<GenerationProvider> generation_from_json(const json& spec) {
    const std::string name = require_name(spec);
    const std::string type = spec.value("type", "http");

    if (type == "mock-echo")
        return std::make_shared<MockGenerativeProvider>(
            name, MockGenerativeProvider::Behavior::echo_context,
            spec.value("token_budget", std::size_t{4097}));
    if (type == "mock-abstain")
        return std::make_shared<MockGenerativeProvider>(
            name, MockGenerativeProvider::Behavior::abstain,
            spec.value("token_budget", std::size_t{4097}));
    if (type == "mock-fixed")
        return std::make_shared<MockGenerativeProvider>(
            name, MockGenerativeProvider::Behavior::fixed,
            spec.value("token_budget", std::size_t{4097}), spec.value("text", ""));
    if (type == "mock-extract")
        return std::make_shared<MockExtractiveProvider>(
            name, spec.value("token_budget", std::size_t{4096}));

    if (type != "http")
        throw DataError("generation provider \"" + name + "\": unknown type \"" + type + "\"");

    GenerationProviderSpec out;
    out.name = name;
    const std::string mode = spec.value("mode", "generative");
    if (mode == "generative") out.mode = GenerationMode::generative;
    else if (mode == "extractive") out.mode = GenerationMode::extractive;
    else throw DataError("generation provider \"" + name + "\": unknown mode \"" + mode + "\"");
    if (spec.contains("token_budget")) out.token_budget = spec["token_budget"].get<std::size_t>();
    if (spec.contains("endpoint")) out.endpoint = spec["endpoint"].get<std::string>();
    if (spec.contains("auth_env")) out.auth_env = spec["auth_env"].get<std::string>();
    if (spec.contains("timeout_ms")) out.timeout_ms = spec["timeout_ms"].get<int>();
    if (spec.contains("max_output_tokens"))
        out.max_output_tokens = spec["max_output_tokens"].get<std::size_t>();
    if (spec.contains("temperature")) out.temperature = spec["temperature"].get<double>();
    out.retry = retry_from_json(spec);

    if (out.mode == GenerationMode::generative)
        return std::make_shared<HttpGenerativeProvider>(std::move(out));
    return std::make_shared<HttpExtractiveProvider>(std::move(out));
}

} // namespace

void ProviderRegistry::add(std::shared_ptr<EmbeddingProvider> provider) {
    embedders_[provider->name()] = std::move(provider);
}

void ProviderRegistry::add(std::shared_ptr<GenerationProvider> provider) {
    generators_[provider->name()] = std::move(provider);
}

std::shared_ptr<EmbeddingProvider> ProviderRegistry::embedding(const std::string& name) const {
    const auto it = embedders_.find(name);
    if (it == embedders_.end())
        throw DataError("embedding provider \"" + name + "\" is not configured");
    return it->second;
}

std::shared_ptr<GenerationProvider> ProviderRegistry::generation(const std::string& name) const {
    const auto it = generators_.find(name);
    if (it == generators_.end())
        throw DataError("generation provider \"" + name + "\" is not configured");
    return it->second;
}

bool ProviderRegistry::has_embedding(const std::string& name) const {
    return embedders_.count(name) > 0;
}

bool ProviderRegistry::has_generation(const std::string& name) const {
    return generators_.count(name) > 0;
}

ProviderRegistry make_default_registry(std::uint64_t default_seed) {
    ProviderRegistry registry;
    registry.add(std::make_shared<MockEmbeddingProvider>("mock-embed", 256, default_seed));
    registry.add(std::make_shared<MockGenerativeProvider>(
        "mock-echo", MockGenerativeProvider::Behavior::echo_context));
    registry.add(std::make_shared<MockGenerativeProvider>(
        "mock-abstain", MockGenerativeProvider::Behavior::abstain));
    registry.add(std::make_shared<MockExtractiveProvider>("mock-extract"));
    return registry;
}

void add_providers_from_json(ProviderRegistry& registry, const nlohmann::json& specs,
                             std::uint64_t default_seed) {
    if (!specs.is_array()) throw DataError("\"providers\" must be a JSON array");
    for (const auto& spec : specs) {
        if (!spec.is_object()) throw DataError("provider spec must be an object: " + spec.dump());
        const std::string kind = spec.value("kind", "");
        if (kind == "embedding")
            registry.add(embedding_from_json(spec, default_seed));
        else if (kind == "generation")
            registry.add(generation_from_json(spec));
        else
            throw DataError("provider spec needs \"kind\" of embedding or generation: " +
                            spec.dump());
    }
}

} // namespace lexrag
