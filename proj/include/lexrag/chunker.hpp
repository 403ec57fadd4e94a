#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexrag/corpus.hpp"

namespace lexrag {

struct ChunkerConfig {
    std::string separator = ".";
    std::size_t chunk_size = 1000; // characters
    std::size_t overlap = 250;     // characters

    void validate() const; // separator non-empty, chunk_size >= 1, overlap < chunk_size
};

struct Chunk {
    std::string chunk_id; // "<doc_id>#<seq>"
    std::string doc_id;
    std::size_t seq = 0;
    std::string text;
};

/// Splits a document into chunks of whole separator-terminated segments.
/// Segments are accumulated greedily while the chunk stays within chunk_size;
/// a single segment longer than chunk_size becomes its own chunk, unmodified.
/// Every chunk after the first starts with the longest suffix of whole
/// segments from the previous chunk that fits within overlap. Removing those
/// overlap prefixes and concatenating reproduces the document text exactly.
std::vector<Chunk> split_document(const CleanDocument& doc, const ChunkerConfig& cfg);

/// Chunk dump as JSONL: {"chunk_id", "doc_id", "seq", "text"} per line.
void save_chunks_jsonl(const std::vector<Chunk>& chunks, std::ostream& out);
void save_chunks_jsonl(const std::vector<Chunk>& chunks, const std::string& path);
std::vector<Chunk> load_chunks_jsonl(const std::string& path);

} // namespace lexrag
