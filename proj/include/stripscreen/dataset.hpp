#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stripscreen/pads.hpp"

namespace stripscreen::data {

struct Rgb24 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb24&, const Rgb24&) = default;
};

enum class Center { A, B, C, D };
enum class Gender { male, female };

// Clinical indicators may be unrecorded; "unknown" never blocks ingestion and
// is excluded pairwise from correlation analysis.
enum class TriFlag { negative, positive, unknown };

std::string_view center_name(Center c);
std::optional<Center> center_from_name(std::string_view s);

struct StripSample {
    std::string id;
    Center center = Center::A;
    int age = 0;  // years, nonnegative
    Gender gender = Gender::male;
    TriFlag diabetes = TriFlag::unknown;
    TriFlag blood_pressure = TriFlag::unknown;
    TriFlag smoking = TriFlag::unknown;
    bool pcr_positive = false;
    std::array<Rgb24, kPadCount> pads{};  // canonical pad order

    friend bool operator==(const StripSample&, const StripSample&) = default;
};

// Immutable after ingestion; sample order is file order and all randomness is
// seed-driven, never iteration-order dependent. The ingest timestamp is
// in-memory provenance only and never reaches any output file.
struct Dataset {
    std::vector<StripSample> samples;
    std::string source;
    std::chrono::system_clock::time_point ingested_at{};

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// PCR labels as 0/1 in sample order (1 = positive).
std::vector<int> labels(const Dataset& ds);

struct CenterSummary {
    int male = 0;
    int female = 0;
    int diabetes_positive = 0;
    int diabetes_negative = 0;
    int blood_pressure_positive = 0;
    int blood_pressure_negative = 0;
    int smoking_positive = 0;
    int smoking_negative = 0;
};

struct SummaryReport {
    int n_samples = 0;
    double mean_age = 0.0;  // full precision; round only at display time
    int male = 0;
    int female = 0;
    int healthy = 0;  // PCR negative
    int sick = 0;     // PCR positive
    std::map<Center, CenterSummary> per_center;
};

// Counts and means over the whole dataset. Throws DataError on an empty
// dataset.
SummaryReport summarize(const Dataset& ds);

struct SplitResult {
    Dataset train;
    Dataset test;
};

// Seeded disjoint partition. With stratified=true the per-class test counts
// are within one sample of exact proportionality. Throws DataError when a
// part would come out empty.
SplitResult split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                  bool stratified);

}  // namespace stripscreen::data
