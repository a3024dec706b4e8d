#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace stripscreen::data {

// The 11 reagent pads of the strip, in the canonical order used for every
// feature layout and report in the pipeline.
enum class PadId {
    Blood,
    Urobilinogen,
    Bilirubin,
    Protein,
    Nitrite,
    Ketone,
    AscorbicAcid,
    Glucose,
    PH,
    SpecificGravity,
    Leukocytes,
};

inline constexpr int kPadCount = 11;

constexpr std::array<PadId, kPadCount> all_pads() {
    return {PadId::Blood,        PadId::Urobilinogen,    PadId::Bilirubin,
            PadId::Protein,      PadId::Nitrite,         PadId::Ketone,
            PadId::AscorbicAcid, PadId::Glucose,         PadId::PH,
            PadId::SpecificGravity, PadId::Leukocytes};
}

// CSV column token, e.g. "AscorbicAcid" in "AscorbicAcid_R".
std::string_view pad_token(PadId pad);

// Human-readable label, e.g. "Ascorbic Acid".
std::string_view pad_label(PadId pad);

std::optional<PadId> pad_from_token(std::string_view token);

}  // namespace stripscreen::data
