#include "lexrag/generation.hpp"

#include <algorithm>
#include <stdexcept>

#include "http_transport.hpp"
#include "lexrag/error.hpp"
#include "lexrag/tokenizer.hpp"

namespace lexrag {

namespace {

constexpr const char* kContextSlot = "{context}";
constexpr const char* kQuestionSlot = "{question}";

const char* const kDavinciLegalText =
    "Your task is to answer a question as a legal assistant to the best of your abilities, "
    "using the context given in the document. If the country is not mentioned in the question, "
    "your response should be related to India. You have knowledge of all laws and legal "
    "judgments of India. Be detailed in your answer, provide relevant sections and case laws "
    "in your answer only if you are confident that they are correct.\n"
    "Note that if you do not know the answer, it is acceptable to say Sorry, I don't know.\n"
    "Context:{context}\n"
    "Question:{question}.";

const char* const kFlanStepwiseText =
    "Answer the following question using the context by reasoning step by step. "
    "If you don't know the answer, just say Sorry, I don't know:\n"
    "Context:{context}\n"
    "Question:{question}.";

// Largest byte count <= limit that does not split a UTF-8 sequence.
std::size_t utf8_floor(std::string_view s, std::size_t limit) {
    std::size_t cut = std::min(limit, s.size());
    while (cut > 0 && cut < s.size() && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80)
        --cut;
    return cut;
}

// Token estimate of the template text itself, with the slots excluded.
std::size_t template_overhead(const PromptTemplate& tmpl) {
    std::string text = tmpl.text;
    for (const char* slot : {kContextSlot, kQuestionSlot}) {
        const auto pos = text.find(slot);
        if (pos != std::string::npos) text.erase(pos, std::string_view(slot).size());
    }
    return estimate_tokens(text);
}

std::string_view first_sentence(std::string_view text) {
    const auto dot = text.find('.');
    return dot == std::string_view::npos ? text : text.substr(0, dot + 1);
}

} // namespace

const char* to_string(PromptTemplateId id) {
    switch (id) {
        case PromptTemplateId::davinci_legal: return "davinci_legal";
        case PromptTemplateId::flan_stepwise: return "flan_stepwise";
        case PromptTemplateId::none: return "none";
    }
    return "none";
}

std::optional<PromptTemplateId> prompt_template_id_from_string(std::string_view s) {
    if (s == "davinci_legal") return PromptTemplateId::davinci_legal;
    if (s == "flan_stepwise") return PromptTemplateId::flan_stepwise;
    if (s == "none") return PromptTemplateId::none;
    return std::nullopt;
}

const char* to_string(GenerationMode mode) {
    return mode == GenerationMode::generative ? "generative" : "extractive";
}

PromptTemplate PromptTemplate::get(PromptTemplateId id) {
    switch (id) {
        case PromptTemplateId::davinci_legal: return {id, kDavinciLegalText};
        case PromptTemplateId::flan_stepwise: return {id, kFlanStepwiseText};
        case PromptTemplateId::none: return {id, ""};
    }
    return {PromptTemplateId::none, ""};
}

GenerationResult GenerationProvider::generate(const std::string&) const {
    throw std::invalid_argument("provider \"" + name() + "\" does not support generative mode");
}

ExtractionSpan GenerationProvider::extract(const std::string&, const std::string&) const {
    throw std::invalid_argument("provider \"" + name() + "\" does not support extractive mode");
}

std::size_t estimate_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

AssembledContext assemble_context(const std::vector<Chunk>& ranked, std::size_t budget_tokens,
                                  std::size_t template_overhead_tokens,
                                  std::size_t question_tokens) {
    if (ranked.empty()) throw DataError("assemble_context: no chunks to pack");
    if (budget_tokens <= template_overhead_tokens)
        throw std::invalid_argument("assemble_context: token budget must exceed template overhead");

    const std::size_t reserved = template_overhead_tokens + question_tokens;
    const std::size_t available = budget_tokens > reserved ? budget_tokens - reserved : 0;

    AssembledContext out;
    const std::string& first = ranked.front().text;
    if (estimate_tokens(first) > available) {
        out.text = first.substr(0, utf8_floor(first, available * 4));
        out.chunk_ids.push_back(ranked.front().chunk_id);
        out.truncated = true;
        return out;
    }
    out.text = first;
    out.chunk_ids.push_back(ranked.front().chunk_id);

    for (std::size_t i = 1; i < ranked.size(); ++i) {
        const std::size_t joined_len = out.text.size() + 2 + ranked[i].text.size();
        if ((joined_len + 3) / 4 > available) break;
        out.text += "\n\n";
        out.text += ranked[i].text;
        out.chunk_ids.push_back(ranked[i].chunk_id);
    }
    return out;
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view context,
                          std::string_view question) {
    if (tmpl.id == PromptTemplateId::none)
        throw std::invalid_argument("render_prompt: template \"none\" cannot be rendered");
    if (question.empty())
        throw std::invalid_argument("render_prompt: question must be non-empty");

    const auto cpos = tmpl.text.find(kContextSlot);
    const auto qpos = tmpl.text.find(kQuestionSlot);
    if (cpos == std::string::npos || qpos == std::string::npos || qpos < cpos)
        throw std::invalid_argument("render_prompt: template is missing its slots");

    std::string out;
    out.reserve(tmpl.text.size() + context.size() + question.size());
    out.append(tmpl.text, 0, cpos);
    out.append(context);
    const auto mid_begin = cpos + std::string_view(kContextSlot).size();
    out.append(tmpl.text, mid_begin, qpos - mid_begin);
    out.append(question);
    out.append(tmpl.text, qpos + std::string_view(kQuestionSlot).size());
    return out;
}

bool detect_abstention(std::string_view answer_text) {
    // Case folded with whitespace runs collapsed, then a substring scan.
    std::string norm;
    norm.reserve(answer_text.size());
    bool pending_space = false;
    for (unsigned char c : answer_text) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (ws) {
            pending_space = !norm.empty();
        } else {
            if (pending_space) norm.push_back(' ');
            norm.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                                  : static_cast<char>(c));
            pending_space = false;
        }
    }
    return norm.find("sorry, i don't know") != std::string::npos;
}

Answer generate_answer(const GenerationProvider& provider, const PromptTemplate& tmpl,
                       const std::string& question, const std::vector<Chunk>& ranked_chunks) {
    if (provider.mode() != GenerationMode::generative)
        throw std::invalid_argument("generate_answer: provider \"" + provider.name() +
                                    "\" is not generative");
    if (tmpl.id == PromptTemplateId::none)
        throw std::invalid_argument("generate_answer: template \"none\" used with generative mode");
    if (question.empty())
        throw std::invalid_argument("generate_answer: question must be non-empty");

    const auto ctx = assemble_context(ranked_chunks, provider.token_budget(),
                                      template_overhead(tmpl), estimate_tokens(question));
    const auto result = provider.generate(render_prompt(tmpl, ctx.text, question));

    Answer answer;
    answer.text = result.text;
    answer.mode = GenerationMode::generative;
    answer.abstained = detect_abstention(answer.text);
    answer.context_chunk_ids = ctx.chunk_ids;
    answer.truncated_context = ctx.truncated;
    return answer;
}

Answer extract_answer(const GenerationProvider& provider, const std::string& question,
                      const std::vector<Chunk>& ranked_chunks) {
    if (provider.mode() != GenerationMode::extractive)
        throw std::invalid_argument("extract_answer: provider \"" + provider.name() +
                                    "\" is not extractive");
    if (question.empty())
        throw std::invalid_argument("extract_answer: question must be non-empty");

    const auto ctx = assemble_context(ranked_chunks, provider.token_budget(), 0,
                                      estimate_tokens(question));
    const auto span = provider.extract(question, ctx.text);
    if (span.end <= span.start)
        throw ProviderError("extract_answer: provider \"" + provider.name() +
                            "\" returned an empty span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ")");
    if (span.end > ctx.text.size())
        throw ProviderError("extract_answer: provider \"" + provider.name() +
                            "\" returned a span out of bounds: [" + std::to_string(span.start) +
                            ", " + std::to_string(span.end) + ") over " +
                            std::to_string(ctx.text.size()) + " characters");

    Answer answer;
    answer.text = ctx.text.substr(span.start, span.end - span.start);
    answer.mode = GenerationMode::extractive;
    answer.abstained = detect_abstention(answer.text);
    answer.context_chunk_ids = ctx.chunk_ids;
    answer.truncated_context = ctx.truncated;
    return answer;
}

Answer direct_answer(const GenerationProvider& provider, const std::string& question) {
    if (provider.mode() != GenerationMode::generative)
        throw std::invalid_argument("direct_answer: provider \"" + provider.name() +
                                    "\" is not generative");
    if (question.empty())
        throw std::invalid_argument("direct_answer: question must be non-empty");

    const auto result = provider.generate(question);
    Answer answer;
    answer.text = result.text;
    answer.mode = GenerationMode::generative;
    answer.abstained = detect_abstention(answer.text);
    return answer;
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

MockGenerativeProvider::MockGenerativeProvider(std::string name, Behavior behavior,
                                               std::size_t token_budget, std::string fixed_text)
    : name_(std::move(name)),
      behavior_(behavior),
      token_budget_(token_budget),
      fixed_text_(std::move(fixed_text)) {}

GenerationResult MockGenerativeProvider::generate(const std::string& prompt) const {
    switch (behavior_) {
        case Behavior::abstain:
            return {"Sorry, I don't know", 1};
        case Behavior::fixed:
            return {fixed_text_, 1};
        case Behavior::echo_context:
            break;
    }
    const auto cpos = prompt.find("Context:");
    const auto qpos = prompt.rfind("\nQuestion:");
    if (cpos == std::string::npos || qpos == std::string::npos || qpos < cpos)
        return {prompt, 1}; // bare question, no template
    const std::string_view context =
        std::string_view(prompt).substr(cpos + 8, qpos - (cpos + 8));
    return {std::string(first_sentence(context)), 1};
}

MockExtractiveProvider::MockExtractiveProvider(std::string name, std::size_t token_budget)
    : name_(std::move(name)), token_budget_(token_budget) {}

ExtractionSpan MockExtractiveProvider::extract(const std::string& question,
                                               const std::string& context) const {
    std::string lowered(context);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });

    // Longest question token that occurs in the context wins; earlier tokens
    // break length ties.
    std::size_t hit = std::string::npos;
    std::string best;
    for (const auto& token : tokenize(question)) {
        if (token.size() <= best.size()) continue;
        const auto pos = lowered.find(token);
        if (pos != std::string::npos) {
            best = token;
            hit = pos;
        }
    }

    std::size_t start = 0;
    std::size_t end = context.size();
    if (hit != std::string::npos) {
        const auto prev_dot = context.rfind('.', hit);
        if (prev_dot != std::string::npos) start = prev_dot + 1;
        const auto next_dot = context.find('.', hit);
        if (next_dot != std::string::npos) end = next_dot + 1;
    } else {
        end = first_sentence(context).size();
    }
    return {start, end, 1};
}

HttpGenerativeProvider::HttpGenerativeProvider(GenerationProviderSpec spec)
    : spec_(std::move(spec)) {
    if (!spec_.endpoint || spec_.endpoint->empty())
        throw DataError("http generation provider \"" + spec_.name + "\": endpoint required");
}

GenerationResult HttpGenerativeProvider::generate(const std::string& prompt) const {
    nlohmann::json payload;
    payload["model"] = spec_.name;
    payload["prompt"] = prompt;
    payload["max_output_tokens"] = spec_.max_output_tokens;
    payload["temperature"] = spec_.temperature;

    const auto response =
        detail::post_json(*spec_.endpoint, spec_.auth_env, spec_.timeout_ms, spec_.retry, payload);
    if (!response.body.contains("text") || !response.body["text"].is_string())
        throw ProviderError("generation provider \"" + spec_.name +
                            "\": response missing \"text\"");
    return {response.body["text"].get<std::string>(), response.attempts};
}

HttpExtractiveProvider::HttpExtractiveProvider(GenerationProviderSpec spec)
    : spec_(std::move(spec)) {
    if (!spec_.endpoint || spec_.endpoint->empty())
        throw DataError("http extraction provider \"" + spec_.name + "\": endpoint required");
}

ExtractionSpan HttpExtractiveProvider::extract(const std::string& question,
                                               const std::string& context) const {
    nlohmann::json payload;
    payload["question"] = question;
    payload["context"] = context;

    const auto response =
        detail::post_json(*spec_.endpoint, spec_.auth_env, spec_.timeout_ms, spec_.retry, payload);
    if (!response.body.contains("start") || !response.body.contains("end") ||
        !response.body["start"].is_number_integer() || !response.body["end"].is_number_integer())
        throw ProviderError("extraction provider \"" + spec_.name +
                            "\": response missing integer \"start\"/\"end\"");
    const auto start = response.body["start"].get<std::int64_t>();
    const auto end = response.body["end"].get<std::int64_t>();
    if (start < 0 || end < 0)
        throw ProviderError("extraction provider \"" + spec_.name +
                            "\" returned a negative span offset");
    return {static_cast<std::size_t>(start), static_cast<std::size_t>(end), response.attempts};
}

} // namespace lexrag
