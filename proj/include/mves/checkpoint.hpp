#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mves/training.hpp"

namespace mves {

// Training snapshot: everything needed to resume or to reproduce forward
// outputs exactly. Serialized as plain text with shortest round-trip decimal
// numbers, so save/load is bit-exact and diffs stay readable.
struct Checkpoint {
  int version = 1;
  int epoch = 0;  // completed epochs
  std::uint64_t dataset_hash = 0;
  TrainConfig train;
  NetworkParams params;
  AdamState state;
};

std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 14695981039346656037ULL);

// Order-sensitive content hash of the training corpus; pairs a checkpoint to
// the data it was fitted on.
std::uint64_t dataset_fingerprint(const std::vector<DayProfile>& days,
                                  const std::vector<ErrorSample>& errors);

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mves
