//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_CHECKPOINT_HPP_
#define IPBIND_CORE_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>

#include "trainer.hpp"

namespace ipbind {

// Binary layout, little-endian:
//   magic "IPBCKPT\0", u32 version,
//   str config (canonical key-value text), str rng state,
//   i64 global_step, i32 epoch, u8 has_best, f64 best_val_pearson,
//   u32 tensor count, then per tensor: str name, u64 rows, u64 cols,
//   f64 params[rows*cols], f64 adam_m[...], f64 adam_v[...]
// where str = u64 length + bytes.
constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const TrainState &state, const std::filesystem::path &path);
TrainState load_checkpoint(const std::filesystem::path &path);

} // namespace ipbind

#endif // IPBIND_CORE_CHECKPOINT_HPP_
