#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexrag {

enum class DocKind { judgment, act, article };

const char* to_string(DocKind kind);
std::optional<DocKind> doc_kind_from_string(std::string_view s);

struct RawDocument {
    std::string id;
    DocKind kind = DocKind::judgment;
    std::string title;
    std::string text;
    std::optional<std::string> source_url;
};

struct CleanDocument {
    std::string id;
    DocKind kind = DocKind::judgment;
    std::string title;
    std::string text; // single-spaced, no leading/trailing whitespace
    std::size_t word_count = 0;
};

struct KindStats {
    std::size_t doc_count = 0;
    double avg_word_count = 0.0;
};

struct CorpusStats {
    KindStats judgment;
    KindStats act;
    KindStats article;

    const KindStats& for_kind(DocKind k) const;
    KindStats& for_kind(DocKind k);
};

/// Collapses every run of Unicode whitespace to one ASCII space and strips the
/// ends. Non-whitespace bytes pass through untouched, in order. Idempotent.
std::string clean_text(std::string_view raw);

/// Number of whitespace-delimited words in already-cleaned text.
std::size_t count_words(std::string_view clean);

CleanDocument clean_document(const RawDocument& raw);

/// Reads a corpus JSONL file, one document object per line:
///   {"id", "kind", "title", "text", "source_url"}
/// kind is "judgment" | "act" | "article"; source_url may be null or absent.
/// Throws DataError naming the offending line for malformed input, bad kinds,
/// or duplicate ids. Documents come back cleaned, in file order.
std::vector<CleanDocument> load_corpus(const std::string& path);

/// Writes cleaned documents back out in the corpus JSONL schema.
void save_corpus(const std::vector<CleanDocument>& docs, const std::string& path);

CorpusStats corpus_stats(const std::vector<CleanDocument>& docs);

} // namespace lexrag
