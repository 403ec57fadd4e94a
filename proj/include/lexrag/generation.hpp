#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexrag/chunker.hpp"
#include "lexrag/embedding.hpp" // RetryPolicy

namespace lexrag {

enum class PromptTemplateId { davinci_legal, flan_stepwise, none };

const char* to_string(PromptTemplateId id);
std::optional<PromptTemplateId> prompt_template_id_from_string(std::string_view s);

/// A prompt template holds exactly two slots, {context} and {question}.
struct PromptTemplate {
    PromptTemplateId id = PromptTemplateId::none;
    std::string text;

    static PromptTemplate get(PromptTemplateId id);
};

enum class GenerationMode { generative, extractive };

const char* to_string(GenerationMode mode);

struct GenerationProviderSpec {
    std::string name;
    GenerationMode mode = GenerationMode::generative;
    std::size_t token_budget = 4097; // prompt budget under the ceil(chars/4) estimator
    std::optional<std::string> endpoint;
    std::string auth_env;
    RetryPolicy retry;
    int timeout_ms = 60000;
    std::size_t max_output_tokens = 512;
    double temperature = 0.0;
    std::string fixed_text; // mock-fixed behaviour
};

struct GenerationResult {
    std::string text;
    int attempts = 1;
};

struct ExtractionSpan {
    std::size_t start = 0;
    std::size_t end = 0; // half-open byte offsets into the context
    int attempts = 1;
};

class GenerationProvider {
public:
    virtual ~GenerationProvider() = default;
    virtual const std::string& name() const = 0;
    virtual GenerationMode mode() const = 0;
    virtual std::size_t token_budget() const = 0;

    /// Generative providers answer a fully rendered prompt.
    virtual GenerationResult generate(const std::string& prompt) const;
    /// Extractive providers return a span into the given context.
    virtual ExtractionSpan extract(const std::string& question, const std::string& context) const;
};

struct AssembledContext {
    std::string text;
    std::vector<std::string> chunk_ids; // chunks actually packed, rank order
    bool truncated = false;             // first chunk was cut to fit
};

struct Answer {
    std::string text;
    GenerationMode mode = GenerationMode::generative;
    bool abstained = false;
    std::vector<std::string> context_chunk_ids;
    bool truncated_context = false;
};

/// ceil(chars / 4), the token estimator used for all budget math.
std::size_t estimate_tokens(std::string_view text);

/// Packs ranked chunks into a single context, joining with one blank line.
/// Chunks are appended greedily while the estimate stays within
/// budget_tokens - template_overhead_tokens - question_tokens. The first chunk
/// is always included, truncated at a character boundary when it alone
/// overflows the budget. Throws DataError on an empty chunk list and
/// std::invalid_argument unless budget_tokens > template_overhead_tokens.
AssembledContext assemble_context(const std::vector<Chunk>& ranked,
                                  std::size_t budget_tokens,
                                  std::size_t template_overhead_tokens,
                                  std::size_t question_tokens = 0);

/// Substitutes the context and question into the template slots. Throws for
/// the none template or an empty question.
std::string render_prompt(const PromptTemplate& tmpl, std::string_view context, std::string_view question);

/// True when the trimmed text contains "sorry, i don't know", compared
/// case-insensitively with whitespace runs collapsed.
bool detect_abstention(std::string_view answer_text);

/// Retrieval-augmented generative answer: assemble, render, generate.
Answer generate_answer(const GenerationProvider& provider,
                       const PromptTemplate& tmpl,
                       const std::string& question,
                       const std::vector<Chunk>& ranked_chunks);

/// Extractive answer: the provider's span must be a valid, non-empty range
/// into the assembled context; anything else raises ProviderError.
Answer extract_answer(const GenerationProvider& provider,
                      const std::string& question,
                      const std::vector<Chunk>& ranked_chunks);

/// Sends the bare question with no template and no context.
Answer direct_answer(const GenerationProvider& provider, const std::string& question);

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

class MockGenerativeProvider : public GenerationProvider {
public:
    enum class Behavior {
        echo_context, // first sentence of the context slot; echoes bare prompts
        abstain,      // always "Sorry, I don't know"
        fixed,        // spec.fixed_text
    };

    MockGenerativeProvider(std::string name, Behavior behavior,
                           std::size_t token_budget = 4097, std::string fixed_text = "");

    const std::string& name() const override { return name_; }
    GenerationMode mode() const override { return GenerationMode::generative; }
    std::size_t token_budget() const override { return token_budget_; }
    GenerationResult generate(const std::string& prompt) const override;

private:
    std::string name_;
    Behavior behavior_;
    std::size_t token_budget_;
    std::string fixed_text_;
};

/// Returns the sentence around the first occurrence of the longest question
/// token in the context; the first sentence when nothing matches.
class MockExtractiveProvider : public GenerationProvider {
public:
    explicit MockExtractiveProvider(std::string name, std::size_t token_budget = 4096);

    const std::string& name() const override { return name_; }
    GenerationMode mode() const override { return GenerationMode::extractive; }
    std::size_t token_budget() const override { return token_budget_; }
    ExtractionSpan extract(const std::string& question, const std::string& context) const override;

private:
    std::string name_;
    std::size_t token_budget_;
};

/// Remote generative provider:
///   POST endpoint  {"model", "prompt", "max_output_tokens", "temperature"}
///   200            {"text": "..."}
class HttpGenerativeProvider : public GenerationProvider {
public:
    explicit HttpGenerativeProvider(GenerationProviderSpec spec);

    const std::string& name() const override { return spec_.name; }
    GenerationMode mode() const override { return GenerationMode::generative; }
    std::size_t token_budget() const override { return spec_.token_budget; }
    GenerationResult generate(const std::string& prompt) const override;

private:
    GenerationProviderSpec spec_;
};

/// Remote extractive provider:
///   POST endpoint  {"question", "context"}
///   200            {"start": int, "end": int}
class HttpExtractiveProvider : public GenerationProvider {
public:
    explicit HttpExtractiveProvider(GenerationProviderSpec spec);

    const std::string& name() const override { return spec_.name; }
    GenerationMode mode() const override { return GenerationMode::extractive; }
    std::size_t token_budget() const override { return spec_.token_budget; }
    ExtractionSpan extract(const std::string& question, const std::string& context) const override;

private:
    GenerationProviderSpec spec_;
};

} // namespace lexrag
