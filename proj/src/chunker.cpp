#include "lexrag/chunker.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "lexrag/error.hpp"

namespace lexrag {

namespace {

using nlohmann::ordered_json;

// Cuts the text after every separator occurrence, so each piece keeps its
// trailing separator (except possibly the last). Bare-separator pieces carry
// no content of their own and merge into a neighbour: runs of separators
// extend the preceding segment, and leading runs attach to the first segment
// that follows. The concatenation of the returned segments is always the
// original text; an all-separator text yields no segments at all.
std::vector<std::string> segment_text(const std::string& text, const std::string& sep) {
    std::vector<std::string> segments;
    std::string carry; // leading bare separators waiting for content
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t hit = text.find(sep, pos);
        std::string piece = (hit == std::string::npos)
                                ? text.substr(pos)
                                : text.substr(pos, hit + sep.size() - pos);
        pos = (hit == std::string::npos) ? text.size() : hit + sep.size();
        if (piece == sep) {
            if (segments.empty())
                carry += piece;
            else
                segments.back() += piece;
        } else if (carry.empty()) {
            segments.push_back(std::move(piece));
        } else {
            segments.push_back(carry + piece);
            carry.clear();
        }
    }
    return segments; // leftover carry means the text was separators only
}

} // namespace

void ChunkerConfig::validate() const {
    if (separator.empty()) throw std::invalid_argument("chunker: separator must be non-empty");
    if (chunk_size == 0) throw std::invalid_argument("chunker: chunk_size must be at least 1");
    if (overlap >= chunk_size)
        throw std::invalid_argument("chunker: overlap must be smaller than chunk_size");
}

std::vector<Chunk> split_document(const CleanDocument& doc, const ChunkerConfig& cfg) {
    cfg.validate();

    std::vector<Chunk> chunks;
    const auto segments = segment_text(doc.text, cfg.separator);
    if (segments.empty()) return chunks;

    const auto emit = [&](std::string text) {
        Chunk chunk;
        chunk.doc_id = doc.id;
        chunk.seq = chunks.size();
        chunk.chunk_id = doc.id + "#" + std::to_string(chunk.seq);
        chunk.text = std::move(text);
        chunks.push_back(std::move(chunk));
    };

    std::vector<std::size_t> carried; // overlap segments carried into the next chunk
    std::size_t i = 0;
    while (i < segments.size()) {
        if (segments[i].size() > cfg.chunk_size) {
            // Oversized segments go out verbatim; no overlap prefix fits in
            // front of them and none of them fits inside an overlap budget.
            emit(segments[i]);
            carried.clear();
            ++i;
            continue;
        }

        std::vector<std::size_t> members = carried;
        std::size_t total = 0;
        for (std::size_t idx : members) total += segments[idx].size();

        // The first fresh segment is unconditional so every chunk advances.
        members.push_back(i);
        total += segments[i].size();
        ++i;
        while (i < segments.size() && segments[i].size() <= cfg.chunk_size &&
               total + segments[i].size() <= cfg.chunk_size) {
            members.push_back(i);
            total += segments[i].size();
            ++i;
        }

        std::string text;
        text.reserve(total);
        for (std::size_t idx : members) text += segments[idx];
        emit(std::move(text));

        // Longest suffix of whole member segments that fits the overlap budget.
        carried.clear();
        std::size_t overlap_len = 0;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            if (overlap_len + segments[*it].size() > cfg.overlap) break;
            overlap_len += segments[*it].size();
            carried.insert(carried.begin(), *it);
        }
    }
    return chunks;
}

void save_chunks_jsonl(const std::vector<Chunk>& chunks, std::ostream& out) {
    for (const auto& chunk : chunks) {
        ordered_json obj;
        obj["chunk_id"] = chunk.chunk_id;
        obj["doc_id"] = chunk.doc_id;
        obj["seq"] = chunk.seq;
        obj["text"] = chunk.text;
        out << obj.dump() << '\n';
    }
}

void save_chunks_jsonl(const std::vector<Chunk>& chunks, const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write chunk file: " + path);
    save_chunks_jsonl(chunks, out);
}

std::vector<Chunk> load_chunks_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open chunk file: " + path);

    std::vector<Chunk> chunks;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
        }
        Chunk chunk;
        try {
            chunk.chunk_id = obj.at("chunk_id").get<std::string>();
            chunk.doc_id = obj.at("doc_id").get<std::string>();
            chunk.seq = obj.at("seq").get<std::size_t>();
            chunk.text = obj.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad chunk record: " + e.what());
        }
        if (!seen.insert(chunk.chunk_id).second)
            throw DataError(path + ":" + std::to_string(lineno) + ": duplicate chunk_id \"" +
                            chunk.chunk_id + "\"");
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

} // namespace lexrag
