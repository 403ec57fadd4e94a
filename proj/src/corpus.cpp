#include "lexrag/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::ordered_json;

// Decodes one UTF-8 code point at offset i; malformed sequences fall back to
// the single byte so no input is ever dropped.
std::pair<char32_t, std::size_t> decode_utf8(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) return {b0, 1};
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1Fu; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0Fu; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07u; }
    else return {b0, 1};
    if (i + len > s.size()) return {b0, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0) != 0x80) return {b0, 1};
        cp = (cp << 6) | (bk & 0x3Fu);
    }
    return {cp, len};
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
        case 0x0085: // NEL
        case 0x00A0: // no-break space
        case 0x1680: // ogham space mark
        case 0x2028: case 0x2029: // line / paragraph separator
        case 0x202F: // narrow no-break space
        case 0x205F: // medium mathematical space
        case 0x3000: // ideographic space
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A; // en quad .. hair space
    }
}

ordered_json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
}

std::string require_string(const ordered_json& obj, const char* key,
                           const std::string& path, std::size_t lineno) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw DataError(path + ":" + std::to_string(lineno) + ": missing or non-string field \"" +
                        key + "\"");
    }
    return obj[key].get<std::string>();
}

} // namespace

const char* to_string(DocKind kind) {
    switch (kind) {
        case DocKind::judgment: return "judgment";
        case DocKind::act: return "act";
        case DocKind::article: return "article";
    }
    return "judgment";
}

std::optional<DocKind> doc_kind_from_string(std::string_view s) {
    if (s == "judgment") return DocKind::judgment;
    if (s == "act") return DocKind::act;
    if (s == "article") return DocKind::article;
    return std::nullopt;
}

const KindStats& CorpusStats::for_kind(DocKind k) const {
    switch (k) {
        case DocKind::judgment: return judgment;
        case DocKind::act: return act;
        case DocKind::article: return article;
    }
    return judgment;
}

KindStats& CorpusStats::for_kind(DocKind k) {
    switch (k) {
        case DocKind::judgment: return judgment;
        case DocKind::act: return act;
        case DocKind::article: return article;
    }
    return judgment;
}

std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        const auto [cp, len] = decode_utf8(raw, i);
        if (is_unicode_space(cp)) {
            pending_space = !out.empty(); // leading whitespace never emits
        } else {
            if (pending_space) out.push_back(' ');
            out.append(raw.substr(i, len));
            pending_space = false;
        }
        i += len;
    }
    return out; // trailing whitespace stays pending and is dropped
}

std::size_t count_words(std::string_view clean) {
    if (clean.empty()) return 0;
    std::size_t words = 1;
    for (char c : clean)
        if (c == ' ') ++words;
    return words;
}

CleanDocument clean_document(const RawDocument& raw) {
    CleanDocument doc;
    doc.id = raw.id;
    doc.kind = raw.kind;
    doc.title = clean_text(raw.title);
    doc.text = clean_text(raw.text);
    doc.word_count = count_words(doc.text);
    return doc;
}

std::vector<CleanDocument> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);

    std::vector<CleanDocument> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const ordered_json obj = parse_line(line, path, lineno);
        if (!obj.is_object())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected a JSON object");

        RawDocument raw;
        raw.id = require_string(obj, "id", path, lineno);
        if (raw.id.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": empty document id");
        const std::string kind = require_string(obj, "kind", path, lineno);
        const auto parsed_kind = doc_kind_from_string(kind);
        if (!parsed_kind)
            throw DataError(path + ":" + std::to_string(lineno) + ": unknown kind \"" + kind +
                            "\" (expected judgment, act, or article)");
        raw.kind = *parsed_kind;
        raw.title = require_string(obj, "title", path, lineno);
        raw.text = require_string(obj, "text", path, lineno);
        if (obj.contains("source_url") && !obj["source_url"].is_null()) {
            if (!obj["source_url"].is_string())
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": source_url must be a string or null");
            raw.source_url = obj["source_url"].get<std::string>();
        }
        if (!seen.insert(raw.id).second)
            throw DataError(path + ":" + std::to_string(lineno) + ": duplicate document id \"" +
                            raw.id + "\"");
        docs.push_back(clean_document(raw));
    }
    return docs;
}

void save_corpus(const std::vector<CleanDocument>& docs, const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write corpus file: " + path);
    for (const auto& doc : docs) {
        ordered_json obj;
        obj["id"] = doc.id;
        obj["kind"] = to_string(doc.kind);
        obj["title"] = doc.title;
        obj["text"] = doc.text;
        obj["source_url"] = nullptr;
        out << obj.dump() << '\n';
    }
}

CorpusStats corpus_stats(const std::vector<CleanDocument>& docs) {
    CorpusStats stats;
    struct Acc { std::size_t docs = 0; std::size_t words = 0; };
    Acc acc[3];
    for (const auto& doc : docs) {
        auto& a = acc[static_cast<int>(doc.kind)];
        ++a.docs;
        a.words += doc.word_count;
    }
    for (DocKind k : {DocKind::judgment, DocKind::act, DocKind::article}) {
        const auto& a = acc[static_cast<int>(k)];
        auto& s = stats.for_kind(k);
        s.doc_count = a.docs;
        s.avg_word_count = a.docs ? static_cast<double>(a.words) / static_cast<double>(a.docs) : 0.0;
    }
    return stats;
}

} // namespace lexrag
