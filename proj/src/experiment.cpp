#include "stripscreen/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "stripscreen/error.hpp"
#include "stripscreen/parallel.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::experiment {

namespace {

using json = nlohmann::json;

struct EvalOutput {
    metrics::ConfusionMatrix cm;
    metrics::MetricSet metrics;
    Eigen::VectorXd scores;  // test scores, kept for ensemble voting
};

EvalOutput evaluate_split(const data::Dataset& train, const data::Dataset& test,
                          color::ColorSpaceId space, const learn::ModelConfig& cfg) {
    const color::FeatureMatrix train_x = color::featurize(train, space);
    const color::FeatureMatrix test_x = color::featurize(test, space);
    const learn::TrainedModel model = learn::train(train_x, data::labels(train), cfg);

    EvalOutput out;
    out.scores = learn::predict_scores(model, test_x);
    std::vector<int> preds(static_cast<std::size_t>(out.scores.size()));
    for (Eigen::Index i = 0; i < out.scores.size(); ++i)
        preds[static_cast<std::size_t>(i)] = out.scores[i] > 0.5 ? 1 : 0;
    out.cm = metrics::confusion(preds, data::labels(test));
    out.metrics = metrics::metric_set(out.cm);
    return out;
}

MetricAggregate aggregate(const std::vector<std::optional<double>>& values) {
    MetricAggregate agg;
    double sum = 0.0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++agg.defined;
        } else {
            ++agg.undefined;
        }
    }
    if (agg.defined > 0) {
        agg.mean = sum / agg.defined;
        double sq = 0.0;
        for (const auto& v : values)
            if (v) sq += (*v - agg.mean) * (*v - agg.mean);
        agg.stddev = std::sqrt(sq / agg.defined);
    }
    return agg;
}

CellAverage aggregate_cell(const std::string& space, const std::string& family,
                           const std::vector<metrics::MetricSet>& sets) {
    CellAverage cell;
    cell.space = space;
    cell.family = family;
    std::vector<std::optional<double>> precision, recall, specificity, accuracy;
    for (const auto& ms : sets) {
        precision.push_back(ms.precision);
        recall.push_back(ms.sensitivity);
        specificity.push_back(ms.specificity);
        accuracy.push_back(ms.accuracy);
    }
    cell.precision = aggregate(precision);
    cell.recall = aggregate(recall);
    cell.specificity = aggregate(specificity);
    cell.accuracy = aggregate(accuracy);
    return cell;
}

std::string aggregate_cell_text(const MetricAggregate& agg) {
    if (agg.defined == 0) return "NA";
    return format_fixed(100.0 * agg.mean, 2);
}

json metric_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

metrics::MetricSet run_single(const data::Dataset& train, const data::Dataset& test,
                              color::ColorSpaceId space, const learn::ModelConfig& cfg) {
    if (train.empty() || test.empty()) throw DataError("run_single: empty split");
    return evaluate_split(train, test, space, cfg).metrics;
}

AveragedMetrics run_repeated(const data::Dataset& ds, const ExperimentPlan& plan) {
    if (plan.reps < 1) throw DataError("run_repeated: reps must be >= 1");
    if (!(plan.test_fraction > 0.0 && plan.test_fraction < 1.0))
        throw DataError("run_repeated: test_fraction must be in (0,1)");
    if (plan.spaces.empty() || plan.families.empty())
        throw DataError("run_repeated: plan needs at least one space and family");
    if (plan.with_ensemble) {
        const auto all = color::all_spaces();
        if (plan.spaces.size() != all.size() ||
            !std::equal(plan.spaces.begin(), plan.spaces.end(), all.begin()))
            throw DataError("run_repeated: the ensemble row needs all 11 spaces "
                            "in canonical order");
    }

    // Families actually trained: the requested ones plus the ensemble member
    // family when it is not already listed.
    std::vector<learn::Family> trained_families = plan.families;
    if (plan.with_ensemble &&
        std::find(trained_families.begin(), trained_families.end(), plan.ensemble_family) ==
            trained_families.end())
        trained_families.push_back(plan.ensemble_family);

    // Splits are shared by every (space, family) cell within a rep.
    std::vector<data::SplitResult> splits;
    splits.reserve(static_cast<std::size_t>(plan.reps));
    for (int rep = 0; rep < plan.reps; ++rep)
        splits.push_back(data::split(ds, plan.test_fraction,
                                     plan.master_seed + static_cast<std::uint64_t>(rep),
                                     plan.stratified));

    // Optional tuning, outside the parallel region.
    std::map<std::pair<std::size_t, std::size_t>, learn::ModelConfig> cell_config;
    for (std::size_t s = 0; s < plan.spaces.size(); ++s) {
        for (std::size_t f = 0; f < trained_families.size(); ++f) {
            learn::ModelConfig cfg = plan.base_config;
            cfg.family = trained_families[f];
            if (plan.tune == TuneMode::once) {
                cfg = learn::grid_search(trained_families[f],
                                         learn::default_grid(trained_families[f]),
                                         splits.front().train, plan.spaces[s], plan.cv_folds,
                                         plan.master_seed, cfg);
            }
            cell_config[{s, f}] = cfg;
        }
    }

    struct Task {
        std::size_t space_index;
        std::size_t family_index;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < plan.spaces.size(); ++s)
        for (std::size_t f = 0; f < trained_families.size(); ++f)
            for (int rep = 0; rep < plan.reps; ++rep)
                tasks.push_back(Task{s, f, rep});

    std::vector<EvalOutput> outputs(tasks.size());
    parallel_for(tasks.size(), plan.workers, [&](std::size_t t) {
        const Task& task = tasks[t];
        learn::ModelConfig cfg = cell_config.at({task.space_index, task.family_index});
        if (plan.tune == TuneMode::per_rep) {
            cfg = learn::grid_search(cfg.family, learn::default_grid(cfg.family),
                                     splits[static_cast<std::size_t>(task.rep)].train,
                                     plan.spaces[task.space_index], plan.cv_folds,
                                     plan.master_seed + static_cast<std::uint64_t>(task.rep),
                                     cfg);
        }
        outputs[t] = evaluate_split(splits[static_cast<std::size_t>(task.rep)].train,
                                    splits[static_cast<std::size_t>(task.rep)].test,
                                    plan.spaces[task.space_index], cfg);
    });

    const auto task_index = [&](std::size_t s, std::size_t f, int rep) {
        return (s * trained_families.size() + f) * static_cast<std::size_t>(plan.reps) +
               static_cast<std::size_t>(rep);
    };

    AveragedMetrics report;
    report.reps = plan.reps;
    for (std::size_t s = 0; s < plan.spaces.size(); ++s) {
        const std::string space_name(color::space_name(plan.spaces[s]));
        for (std::size_t f = 0; f < plan.families.size(); ++f) {
            // Requested families are a prefix of trained_families.
            const std::string family_name(learn::family_name(plan.families[f]));
            std::vector<metrics::MetricSet> sets;
            for (int rep = 0; rep < plan.reps; ++rep) {
                const EvalOutput& out = outputs[task_index(s, f, rep)];
                sets.push_back(out.metrics);
                RepRecord record;
                record.rep = rep;
                record.split_seed = plan.master_seed + static_cast<std::uint64_t>(rep);
                record.space = space_name;
                record.family = family_name;
                record.cm = out.cm;
                record.metrics = out.metrics;
                report.rep_records.push_back(std::move(record));
            }
            report.cells.push_back(aggregate_cell(space_name, family_name, sets));
        }
    }

    if (plan.with_ensemble) {
        const std::size_t ensemble_f =
            static_cast<std::size_t>(std::find(trained_families.begin(), trained_families.end(),
                                               plan.ensemble_family) -
                                     trained_families.begin());
        std::vector<metrics::MetricSet> sets;
        for (int rep = 0; rep < plan.reps; ++rep) {
            const auto test_y = data::labels(splits[static_cast<std::size_t>(rep)].test);
            std::vector<int> preds(test_y.size());
            for (std::size_t i = 0; i < test_y.size(); ++i) {
                int votes = 0;
                for (std::size_t s = 0; s < plan.spaces.size(); ++s) {
                    const EvalOutput& out = outputs[task_index(s, ensemble_f, rep)];
                    if (out.scores[static_cast<Eigen::Index>(i)] > 0.5) ++votes;
                }
                preds[i] = votes >= 6 ? 1 : 0;
            }
            const auto cm = metrics::confusion(preds, test_y);
            const auto ms = metrics::metric_set(cm);
            sets.push_back(ms);
            RepRecord record;
            record.rep = rep;
            record.split_seed = plan.master_seed + static_cast<std::uint64_t>(rep);
            record.space = "all";
            record.family = "ensemble";
            record.cm = cm;
            record.metrics = ms;
            report.rep_records.push_back(std::move(record));
        }
        report.cells.push_back(aggregate_cell("all", "ensemble", sets));
    }
    return report;
}

std::string report_csv(const AveragedMetrics& report) {
    std::string out =
        "space,family,precision,recall,specificity,accuracy,"
        "precision_std,recall_std,specificity_std,accuracy_std,"
        "precision_undefined,recall_undefined,specificity_undefined,accuracy_undefined,"
        "reps\n";
    const auto mean_cell = [](const MetricAggregate& a) {
        return a.defined > 0 ? format_double(a.mean) : std::string("NA");
    };
    const auto std_cell = [](const MetricAggregate& a) {
        return a.defined > 0 ? format_double(a.stddev) : std::string("NA");
    };
    for (const auto& cell : report.cells) {
        out += cell.space + "," + cell.family + ",";
        out += mean_cell(cell.precision) + "," + mean_cell(cell.recall) + "," +
               mean_cell(cell.specificity) + "," + mean_cell(cell.accuracy) + ",";
        out += std_cell(cell.precision) + "," + std_cell(cell.recall) + "," +
               std_cell(cell.specificity) + "," + std_cell(cell.accuracy) + ",";
        out += std::to_string(cell.precision.undefined) + "," +
               std::to_string(cell.recall.undefined) + "," +
               std::to_string(cell.specificity.undefined) + "," +
               std::to_string(cell.accuracy.undefined) + ",";
        out += std::to_string(report.reps) + "\n";
    }
    return out;
}

std::string report_text(const AveragedMetrics& report) {
    // Table-style block per space, Precision / Recall / Specificity /
    // Accuracy means as percentages.
    std::string out;
    std::string current_space;
    char line[160];
    const std::map<std::string, std::string> display = {
        {"mlp", "MLP"},
        {"logreg", "Logistic Regression"},
        {"random_forest", "Random Forest"},
        {"gradient_boosting", "Gradient Boosting"},
        {"ensemble", "Ensemble model"},
    };
    for (const auto& cell : report.cells) {
        if (cell.space != current_space) {
            current_space = cell.space;
            if (!out.empty()) out += '\n';
            out += "Evaluation of models (space: " + cell.space + ", " +
                   std::to_string(report.reps) + " reps, mean %)\n";
            std::snprintf(line, sizeof(line), "%-22s %10s %10s %12s %10s\n", "Model",
                          "Precision", "Recall", "Specificity", "Accuracy");
            out += line;
        }
        const auto it = display.find(cell.family);
        const std::string name = it != display.end() ? it->second : cell.family;
        std::snprintf(line, sizeof(line), "%-22s %10s %10s %12s %10s\n", name.c_str(),
                      aggregate_cell_text(cell.precision).c_str(),
                      aggregate_cell_text(cell.recall).c_str(),
                      aggregate_cell_text(cell.specificity).c_str(),
                      aggregate_cell_text(cell.accuracy).c_str());
        out += line;
    }
    return out;
}

std::string reps_jsonl(const AveragedMetrics& report) {
    std::string out;
    for (const auto& rec : report.rep_records) {
        json j;
        j["rep"] = rec.rep;
        j["split_seed"] = rec.split_seed;
        j["space"] = rec.space;
        j["family"] = rec.family;
        j["tp"] = rec.cm.tp;
        j["tn"] = rec.cm.tn;
        j["fp"] = rec.cm.fp;
        j["fn"] = rec.cm.fn;
        j["precision"] = metric_json(rec.metrics.precision);
        j["recall"] = metric_json(rec.metrics.sensitivity);
        j["specificity"] = metric_json(rec.metrics.specificity);
        j["accuracy"] = metric_json(rec.metrics.accuracy);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace stripscreen::experiment
