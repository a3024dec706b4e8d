#include "stripscreen/pads.hpp"

namespace stripscreen::data {

namespace {
constexpr std::array<std::string_view, kPadCount> kTokens = {
    "Blood",  "Urobilinogen", "Bilirubin",       "Protein", "Nitrite", "Ketone",
    "AscorbicAcid", "Glucose", "PH", "SpecificGravity", "Leukocytes"};

constexpr std::array<std::string_view, kPadCount> kLabels = {
    "Blood",         "Urobilinogen", "Bilirubin", "Protein",
    "Nitrite",       "Ketone",       "Ascorbic Acid", "Glucose",
    "PH",            "Specific Gravity", "Leukocytes"};
}  // namespace

std::string_view pad_token(PadId pad) { return kTokens[static_cast<int>(pad)]; }

std::string_view pad_label(PadId pad) { return kLabels[static_cast<int>(pad)]; }

std::optional<PadId> pad_from_token(std::string_view token) {
    for (int i = 0; i < kPadCount; ++i) {
        if (kTokens[i] == token) return static_cast<PadId>(i);
    }
    return std::nullopt;
}

}  // namespace stripscreen::data
