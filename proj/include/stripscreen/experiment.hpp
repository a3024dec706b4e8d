#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stripscreen/colorspace.hpp"
#include "stripscreen/dataset.hpp"
#include "stripscreen/learners.hpp"
#include "stripscreen/metrics.hpp"

namespace stripscreen::experiment {

// Hyperparameter tuning placement relative to the repetition loop. `once`
// tunes on rep 0's training split and reuses the result everywhere.
enum class TuneMode { off, once, per_rep };

struct ExperimentPlan {
    std::vector<color::ColorSpaceId> spaces{color::ColorSpaceId::rgb};
    std::vector<learn::Family> families{learn::Family::mlp};
    int reps = 30;
    double test_fraction = 0.1;
    std::uint64_t master_seed = 0;
    bool stratified = true;
    learn::ModelConfig base_config;
    TuneMode tune = TuneMode::off;
    int cv_folds = 3;
    // When set, an extra row evaluates the 11-space max-vote ensemble of
    // `ensemble_family` members per rep; requires spaces to be all 11.
    bool with_ensemble = false;
    learn::Family ensemble_family = learn::Family::mlp;
    int workers = 1;
};

// Featurizes both splits in `space`, fits the model on the training part
// (standardization included), and evaluates hard labels at threshold 0.5 on
// the test part.
metrics::MetricSet run_single(const data::Dataset& train, const data::Dataset& test,
                              color::ColorSpaceId space, const learn::ModelConfig& cfg);

struct RepRecord {
    int rep = 0;
    std::uint64_t split_seed = 0;
    std::string space;
    std::string family;
    metrics::ConfusionMatrix cm;
    metrics::MetricSet metrics;
};

struct MetricAggregate {
    double mean = 0.0;    // over defined values only
    double stddev = 0.0;  // population stddev over defined values
    int defined = 0;
    int undefined = 0;
};

struct CellAverage {
    std::string space;
    std::string family;
    MetricAggregate precision;
    MetricAggregate recall;
    MetricAggregate specificity;
    MetricAggregate accuracy;
};

struct AveragedMetrics {
    int reps = 0;
    std::vector<CellAverage> cells;       // ordered (space, family); ensemble row last
    std::vector<RepRecord> rep_records;   // ordered (space, family, rep)
};

// Rep i splits with seed master_seed + i; cells run independently and reduce
// in fixed (space, family, rep) order, so the report is identical for any
// worker count.
AveragedMetrics run_repeated(const data::Dataset& ds, const ExperimentPlan& plan);

// Metric columns in report order: Precision, Recall, Specificity, Accuracy.
std::string report_csv(const AveragedMetrics& report);
std::string report_text(const AveragedMetrics& report);
std::string reps_jsonl(const AveragedMetrics& report);

}  // namespace stripscreen::experiment
