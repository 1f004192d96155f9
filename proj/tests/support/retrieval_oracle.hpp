#pragma once

#include <string>
#include <vector>

#include "satrag/retrieval.hpp"

namespace satrag::testing {

// Brute-force reference for graph retrieval. Instead of traversing, it walks
// every value leaf, decides admission from parent chains, scores each leaf's
// key text directly and rebuilds neighbor expansion by scanning all leaves.
// Returns cell ids in final rank order.
std::vector<std::string> oracle_retrieve(const SATGraph& g, const QuerySlots& slots, const Query& q,
                                         Embedder& embedder, const RetrievalConfig& cfg);

}  // namespace satrag::testing
