#pragma once

// QNT1 model checkpoint:
//   "QNT1" | u32 header_bytes | UTF-8 JSON header | f32 params[parameter_count]
//   | optionally f32 adam_m[parameter_count], f32 adam_v[parameter_count]
// The header carries the model and training configs, the normalizer, the
// layer table (names and blob offsets), the loss history and, when Adam
// moments follow, the optimizer step count.

#include <filesystem>
#include <optional>
#include <vector>

#include "drain/normalizer.hpp"
#include "drain/trainer.hpp"
#include "drain/unet.hpp"

namespace drain::qunet {

struct Checkpoint {
    ModelConfig model;
    TrainConfig train;
    dataset::Normalizer normalizer;
    std::vector<EpochRecord> history;
    std::vector<float> params;
    std::optional<AdamState<float>> adam;
};

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::vector<unsigned char> bytes, const std::string& origin = "<memory>");

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Resumable training state held by a checkpoint (fresh Adam moments when absent).
TrainState restore_state(const Checkpoint& ckpt);

}  // namespace drain::qunet
