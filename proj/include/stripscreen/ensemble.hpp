#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stripscreen/dataset.hpp"
#include "stripscreen/learners.hpp"

namespace stripscreen::ensemble {

// One member per color space (canonical space order), all the same family
// and trained on the same split. Immutable after training.
struct EnsembleModel {
    learn::Family family = learn::Family::mlp;
    std::uint64_t seed = 0;
    std::vector<learn::TrainedModel> members;  // size kSpaceCount
};

// Member i trains on space i with seed `seed + i`.
EnsembleModel train_ensemble(const data::Dataset& train, learn::Family family,
                             const learn::ModelConfig& config, std::uint64_t seed,
                             int workers = 1);

// Count of members scoring strictly above 0.5 (a score of exactly 0.5 votes
// negative).
int vote(const EnsembleModel& model, const data::StripSample& sample);
std::vector<int> vote_all(const EnsembleModel& model, const data::Dataset& ds,
                          int workers = 1);

// Positive iff votes >= 6 (strict majority of 11).
int majority_predict(int votes);

enum class Triage { negative, positive, insufficient_information };

std::string_view triage_name(Triage t);

// Symmetric band rule: positive at votes >= k, negative at votes <= 11-k,
// insufficient information between. The asymmetric alternative (negative at
// votes <= 5 regardless of k) is kept for comparison.
enum class BandRule { symmetric, asymmetric };

Triage abstaining_predict(int votes, int k, BandRule rule = BandRule::symmetric);

// Vote fraction in [0,1], the ensemble's ROC score.
double ensemble_score(int votes);

struct SweepRow {
    int k = 6;
    double response_ratio = 1.0;  // answered / total
    std::optional<double> accuracy;
    std::optional<double> recall;
    std::optional<double> specificity;
    // Extra detail beyond the fixed report columns: how much of the whole
    // healthy population is cleared, i.e. answered-negative true negatives
    // over all negatives (answered or not).
    std::int64_t answered = 0;
    std::optional<double> healthy_cleared;
};

// One row per k in 6..11; metrics are computed on the answered subset only.
std::vector<SweepRow> abstention_sweep(const std::vector<int>& votes,
                                       const std::vector<int>& labels,
                                       BandRule rule = BandRule::symmetric);
std::vector<SweepRow> abstention_sweep(const EnsembleModel& model, const data::Dataset& test,
                                       BandRule rule = BandRule::symmetric, int workers = 1);

// The fixed five-column report.
std::string sweep_csv(const std::vector<SweepRow>& rows);
// Companion file with answered counts and the population-level clearing rate.
std::string sweep_details_csv(const std::vector<SweepRow>& rows);

struct TriageRecord {
    std::string id;
    int votes = 0;
    Triage decision = Triage::negative;
};

std::vector<TriageRecord> triage(const EnsembleModel& model, const data::Dataset& ds, int k,
                                 BandRule rule = BandRule::symmetric, int workers = 1);
std::string triage_csv(const std::vector<TriageRecord>& records);

// Directory layout: ensemble.json plus one model file per color space.
void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir);
EnsembleModel load_ensemble(const std::filesystem::path& dir);

}  // namespace stripscreen::ensemble
