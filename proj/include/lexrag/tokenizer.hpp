#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexrag {

/// Shared tokenization for BM25 indexing, the syntactic metrics, and the mock
/// embedder, so scores agree on what a term is. Tokens are maximal runs of
/// ASCII alphanumerics; everything else is a separator. No stemming, no
/// stopword removal.
struct TokenizerConfig {
    bool lowercase = true;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

} // namespace lexrag
