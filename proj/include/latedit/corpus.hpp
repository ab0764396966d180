#pragma once

#include <cstdint>
#include <vector>

#include "latedit/metrics.hpp"
#include "latedit/scene.hpp"

namespace latedit {

// Deterministic edit-pair corpus: enumerate all (class, position) ->
// (class', position') pairs, drop identities, and subsample `count` items
// with a seeded shuffle. position_only keeps pairs that move an object
// without changing its class.
std::vector<GroundTruth> make_edit_corpus(const SceneConfig& config,
                                          std::size_t count, std::uint64_t seed,
                                          bool position_only = false);

}  // namespace latedit
