// stripscreen: urine test-strip screening pipeline.
//
// Subcommands cover the whole flow: dataset validation and summaries,
// group-difference and correlation analysis, model training and repeated
// evaluation, the 11-color-space voting ensemble with triage and abstention
// sweeps, ROC reports, and synthetic benchmark generation. Every run is
// seed-driven and writes a manifest next to its outputs; identical inputs,
// flags and seed reproduce outputs byte for byte.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "stripscreen/csv.hpp"
#include "stripscreen/ensemble.hpp"
#include "stripscreen/error.hpp"
#include "stripscreen/experiment.hpp"
#include "stripscreen/learners.hpp"
#include "stripscreen/manifest.hpp"
#include "stripscreen/metrics.hpp"
#include "stripscreen/stats.hpp"
#include "stripscreen/synth.hpp"
#include "stripscreen/text.hpp"

namespace fs = std::filesystem;
using namespace stripscreen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
    std::string input;
    std::string out = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    bool strict = false;
    std::string config_path;
};

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value) {
    if (seed_opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("STRIPSCREEN_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw DataError("STRIPSCREEN_SEED is not a valid unsigned integer");
        }
    }
    return 0;
}

data::Dataset load_dataset(const std::string& path, bool strict,
                           data::IngestReport* report = nullptr) {
    if (!fs::exists(path)) throw DataError("input file not found: " + path);
    return data::ingest_csv(path, strict, report);
}

color::ColorSpaceId parse_space(const std::string& name) {
    const auto space = color::space_from_name(name);
    if (!space) throw DataError("unknown color space '" + name + "'");
    return *space;
}

learn::Family parse_family(const std::string& name) {
    const auto family = learn::family_from_name(name);
    if (!family) throw DataError("unknown model family '" + name + "'");
    return *family;
}

// Flat key=value hyperparameter file; unknown keys are rejected so typos do
// not silently fall back to defaults.
learn::ModelConfig load_model_config(const std::string& path) {
    learn::ModelConfig cfg;
    if (path.empty()) return cfg;
    const std::string content = read_file(path);
    for (const auto& raw_line : split(content, '\n')) {
        const auto line = trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw DataError(path + ": expected key=value, got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        try {
            if (key == "mlp_hidden") {
                cfg.mlp.hidden_sizes.clear();
                for (const auto& part : split(value, ','))
                    cfg.mlp.hidden_sizes.push_back(std::stoi(part));
            } else if (key == "mlp_learning_rate") cfg.mlp.learning_rate = std::stod(value);
            else if (key == "mlp_l2") cfg.mlp.l2 = std::stod(value);
            else if (key == "mlp_batch_size") cfg.mlp.batch_size = std::stoi(value);
            else if (key == "mlp_epochs") cfg.mlp.epochs = std::stoi(value);
            else if (key == "logreg_lambda") cfg.logreg.lambda = std::stod(value);
            else if (key == "logreg_tolerance") cfg.logreg.tolerance = std::stod(value);
            else if (key == "logreg_max_iterations")
                cfg.logreg.max_iterations = std::stoi(value);
            else if (key == "forest_trees") cfg.forest.n_trees = std::stoi(value);
            else if (key == "forest_max_depth") cfg.forest.max_depth = std::stoi(value);
            else if (key == "forest_min_samples_split")
                cfg.forest.min_samples_split = std::stoi(value);
            else if (key == "forest_features_per_split")
                cfg.forest.features_per_split = std::stoi(value);
            else if (key == "forest_bootstrap") cfg.forest.bootstrap = std::stoi(value) != 0;
            else if (key == "boosting_stages") cfg.boosting.n_stages = std::stoi(value);
            else if (key == "boosting_max_depth") cfg.boosting.max_depth = std::stoi(value);
            else if (key == "boosting_shrinkage") cfg.boosting.shrinkage = std::stod(value);
            else if (key == "boosting_min_samples_split")
                cfg.boosting.min_samples_split = std::stoi(value);
            else throw DataError(path + ": unknown hyperparameter key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw DataError(path + ": unparsable value for '" + key + "'");
        }
    }
    learn::validate_config(cfg);
    return cfg;
}

// The worker count is deliberately absent: it cannot affect any output, so
// runs at different parallelism keep byte-identical manifests.
nlohmann::json flags_json(const CommonFlags& flags) {
    nlohmann::json j;
    j["input"] = flags.input;
    j["out"] = flags.out;
    j["strict"] = flags.strict;
    if (!flags.config_path.empty()) j["config"] = flags.config_path;
    return j;
}

struct OutputWriter {
    fs::path dir;
    RunManifest manifest;

    explicit OutputWriter(const std::string& out_dir, const std::string& subcommand) {
        dir = out_dir;
        fs::create_directories(dir);
        manifest.subcommand = subcommand;
    }

    void add_input(const std::string& path) {
        manifest.inputs.emplace_back(path, file_hash_hex(path));
    }

    fs::path write(const std::string& filename, const std::string& content) {
        const fs::path path = dir / filename;
        write_file(path, content);
        manifest.outputs.push_back(path.string());
        std::cout << "wrote " << path.string() << "\n";
        return path;
    }

    void note_output(const fs::path& path) { manifest.outputs.push_back(path.string()); }

    void finish() {
        write_manifest(manifest, dir / (manifest.subcommand + "_manifest.json"));
    }
};

// --- summarize rendering -----------------------------------------------------

std::string summary_stats_csv(const data::SummaryReport& rep) {
    std::string out = "statistic,value\n";
    out += "n_samples," + std::to_string(rep.n_samples) + "\n";
    out += "mean_age," + format_double(rep.mean_age) + "\n";
    out += "male," + std::to_string(rep.male) + "\n";
    out += "female," + std::to_string(rep.female) + "\n";
    out += "healthy," + std::to_string(rep.healthy) + "\n";
    out += "sick," + std::to_string(rep.sick) + "\n";
    return out;
}

std::string summary_gender_csv(const data::SummaryReport& rep) {
    std::string out = "center,male,female\n";
    for (const auto& [center, block] : rep.per_center)
        out += std::string(data::center_name(center)) + "," + std::to_string(block.male) +
               "," + std::to_string(block.female) + "\n";
    return out;
}

std::string summary_clinical_csv(const data::SummaryReport& rep) {
    std::string out =
        "center,diabetes_positive,diabetes_negative,blood_pressure_positive,"
        "blood_pressure_negative,smoking_positive,smoking_negative\n";
    for (const auto& [center, block] : rep.per_center)
        out += std::string(data::center_name(center)) + "," +
               std::to_string(block.diabetes_positive) + "," +
               std::to_string(block.diabetes_negative) + "," +
               std::to_string(block.blood_pressure_positive) + "," +
               std::to_string(block.blood_pressure_negative) + "," +
               std::to_string(block.smoking_positive) + "," +
               std::to_string(block.smoking_negative) + "\n";
    return out;
}

std::string summary_text(const data::SummaryReport& rep) {
    char line[192];
    std::string out = "Statistics of the data set\n";
    std::snprintf(line, sizeof(line), "  %-42s %s\n", "Number of Samples",
                  std::to_string(rep.n_samples).c_str());
    out += line;
    std::snprintf(line, sizeof(line), "  %-42s %s\n", "Average of age",
                  format_fixed(rep.mean_age, 2).c_str());
    out += line;
    std::snprintf(line, sizeof(line), "  %-42s Male: %d - Female: %d\n",
                  "Gender distribution", rep.male, rep.female);
    out += line;
    std::snprintf(line, sizeof(line), "  %-42s Healthy: %d - Sick: %d\n",
                  "Distribution of healthy and sick people", rep.healthy, rep.sick);
    out += line;

    out += "\nGender of clients by data center\n";
    std::snprintf(line, sizeof(line), "  %-12s %8s %8s\n", "Data Center", "Male", "Female");
    out += line;
    for (const auto& [center, block] : rep.per_center) {
        std::snprintf(line, sizeof(line), "  %-12s %8d %8d\n",
                      std::string(data::center_name(center)).c_str(), block.male,
                      block.female);
        out += line;
    }

    out += "\nClinical indicators by data center (positive / negative)\n";
    std::snprintf(line, sizeof(line), "  %-12s %18s %18s %18s\n", "Data Center", "Diabetes",
                  "Blood pressure", "Smoking");
    out += line;
    for (const auto& [center, block] : rep.per_center) {
        const auto pair = [&](int pos, int neg) {
            return std::to_string(pos) + " / " + std::to_string(neg);
        };
        std::snprintf(line, sizeof(line), "  %-12s %18s %18s %18s\n",
                      std::string(data::center_name(center)).c_str(),
                      pair(block.diabetes_positive, block.diabetes_negative).c_str(),
                      pair(block.blood_pressure_positive, block.blood_pressure_negative).c_str(),
                      pair(block.smoking_positive, block.smoking_negative).c_str());
        out += line;
    }
    return out;
}

// --- subcommands --------------------------------------------------------------

int cmd_validate(const CommonFlags& flags, bool write_outputs) {
    data::IngestReport report;
    const auto ds = load_dataset(flags.input, flags.strict, &report);
    std::cout << "rows read: " << report.rows_read << ", kept: " << report.rows_kept
              << ", rejected: " << report.rejected.size() << "\n";
    for (const auto& rej : report.rejected)
        std::cout << "rejected line " << rej.line << " (id '" << rej.id
                  << "'): " << rej.reason << "\n";
    if (write_outputs) {
        OutputWriter out(flags.out, "validate");
        out.manifest.seed = 0;
        out.manifest.resolved = flags_json(flags);
        out.add_input(flags.input);
        std::string csv = "line,id,reason\n";
        for (const auto& rej : report.rejected)
            csv += std::to_string(rej.line) + "," + rej.id + "," + rej.reason + "\n";
        out.write("validation_report.csv", csv);
        out.finish();
    }
    (void)ds;
    return kExitOk;
}

int cmd_summarize(const CommonFlags& flags) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto rep = data::summarize(ds);
    OutputWriter out(flags.out, "summarize");
    out.manifest.resolved = flags_json(flags);
    out.add_input(flags.input);
    out.write("summary.txt", summary_text(rep));
    out.write("summary_stats.csv", summary_stats_csv(rep));
    out.write("summary_gender_by_center.csv", summary_gender_csv(rep));
    out.write("summary_clinical_by_center.csv", summary_clinical_csv(rep));
    out.finish();
    return kExitOk;
}

int cmd_analyze(const CommonFlags& flags, const std::string& space_name, bool pooled) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto space = parse_space(space_name);
    OutputWriter out(flags.out, "analyze");
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["space"] = space_name;
    out.manifest.resolved["pooled"] = pooled;
    out.add_input(flags.input);

    const auto variant = pooled ? stats::TTestVariant::pooled : stats::TTestVariant::welch;
    const auto table = stats::group_difference_table(ds, space, variant);
    out.write("ttest_pvalues.csv", stats::pvalue_table_csv(table));
    out.write("ttest_pvalues.txt", stats::pvalue_table_text(table));
    out.write("ttest_pvalues_points.csv", stats::pvalue_table_points(table));

    auto feature_vars = stats::feature_columns(ds, space);
    feature_vars.push_back(stats::label_column(ds));
    const auto features = stats::correlation_matrix(feature_vars);
    out.write("corr_features.csv", stats::correlation_csv(features));
    out.write("corr_features_points.csv", stats::correlation_points(features));

    auto clinical_vars = stats::clinical_columns(ds);
    clinical_vars.push_back(stats::label_column(ds));
    const auto clinical = stats::correlation_matrix(clinical_vars);
    out.write("corr_clinical.csv", stats::correlation_csv(clinical));
    out.write("corr_clinical_points.csv", stats::correlation_points(clinical));
    out.finish();
    return kExitOk;
}

int cmd_train(const CommonFlags& flags, const std::string& family_name,
              const std::string& space_name) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto family = parse_family(family_name);
    const auto space = parse_space(space_name);
    learn::ModelConfig cfg = load_model_config(flags.config_path);
    cfg.family = family;
    cfg.seed = flags.seed;

    const auto fm = color::featurize(ds, space);
    const auto model = learn::train(fm, data::labels(ds), cfg);

    OutputWriter out(flags.out, "train");
    out.manifest.seed = flags.seed;
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["family"] = family_name;
    out.manifest.resolved["space"] = space_name;
    out.add_input(flags.input);
    if (!flags.config_path.empty()) out.add_input(flags.config_path);
    const std::string filename = "model_" + family_name + "_" + space_name + ".model";
    learn::save_model(model, out.dir / filename);
    out.note_output((out.dir / filename).string());
    std::cout << "wrote " << (out.dir / filename).string() << "\n";
    out.finish();
    return kExitOk;
}

int cmd_eval(const CommonFlags& flags, std::vector<std::string> space_names,
             std::vector<std::string> family_names, int reps, double test_fraction,
             const std::string& tune_mode, bool with_ensemble,
             const std::string& ensemble_family, bool no_stratify) {
    const auto ds = load_dataset(flags.input, flags.strict);

    experiment::ExperimentPlan plan;
    plan.reps = reps;
    plan.test_fraction = test_fraction;
    plan.master_seed = flags.seed;
    plan.stratified = !no_stratify;
    plan.workers = flags.workers;
    plan.base_config = load_model_config(flags.config_path);
    plan.with_ensemble = with_ensemble;
    plan.ensemble_family = parse_family(ensemble_family);

    if (space_names.size() == 1 && space_names[0] == "all") {
        const auto all = color::all_spaces();
        plan.spaces.assign(all.begin(), all.end());
    } else {
        plan.spaces.clear();
        for (const auto& name : space_names) plan.spaces.push_back(parse_space(name));
    }
    if (family_names.size() == 1 && family_names[0] == "all") {
        // Customary report row order.
        plan.families = {learn::Family::random_forest, learn::Family::logreg,
                         learn::Family::gradient_boosting, learn::Family::mlp};
    } else {
        plan.families.clear();
        for (const auto& name : family_names) plan.families.push_back(parse_family(name));
    }
    if (tune_mode == "off") plan.tune = experiment::TuneMode::off;
    else if (tune_mode == "once") plan.tune = experiment::TuneMode::once;
    else if (tune_mode == "per-rep") plan.tune = experiment::TuneMode::per_rep;
    else throw DataError("unknown tune mode '" + tune_mode + "'");

    const auto report = experiment::run_repeated(ds, plan);

    OutputWriter out(flags.out, "eval");
    out.manifest.seed = flags.seed;
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["spaces"] = space_names;
    out.manifest.resolved["families"] = family_names;
    out.manifest.resolved["reps"] = reps;
    out.manifest.resolved["test_fraction"] = test_fraction;
    out.manifest.resolved["tune"] = tune_mode;
    out.manifest.resolved["with_ensemble"] = with_ensemble;
    out.manifest.resolved["stratified"] = plan.stratified;
    out.add_input(flags.input);
    if (!flags.config_path.empty()) out.add_input(flags.config_path);
    out.write("eval_report.csv", experiment::report_csv(report));
    out.write("eval_report.txt", experiment::report_text(report));
    out.write("eval_reps.jsonl", experiment::reps_jsonl(report));
    out.finish();
    return kExitOk;
}

int cmd_ensemble(const CommonFlags& flags, const std::string& family_name) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto family = parse_family(family_name);
    learn::ModelConfig cfg = load_model_config(flags.config_path);
    const auto model =
        ensemble::train_ensemble(ds, family, cfg, flags.seed, flags.workers);

    OutputWriter out(flags.out, "ensemble");
    out.manifest.seed = flags.seed;
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["family"] = family_name;
    out.add_input(flags.input);
    if (!flags.config_path.empty()) out.add_input(flags.config_path);
    ensemble::save_ensemble(model, out.dir);
    out.note_output((out.dir / "ensemble.json").string());
    std::cout << "wrote " << (out.dir / "ensemble.json").string() << " and 11 member models\n";
    out.finish();
    return kExitOk;
}

ensemble::BandRule parse_band(const std::string& band) {
    if (band == "symmetric") return ensemble::BandRule::symmetric;
    if (band == "asymmetric") return ensemble::BandRule::asymmetric;
    throw DataError("unknown band rule '" + band + "'");
}

int cmd_triage(const CommonFlags& flags, const std::string& ensemble_dir, int k,
               const std::string& band) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto model = ensemble::load_ensemble(ensemble_dir);
    const auto records = ensemble::triage(model, ds, k, parse_band(band), flags.workers);

    OutputWriter out(flags.out, "triage");
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["ensemble_dir"] = ensemble_dir;
    out.manifest.resolved["k"] = k;
    out.manifest.resolved["band"] = band;
    out.add_input(flags.input);
    out.add_input((fs::path(ensemble_dir) / "ensemble.json").string());
    out.write("triage.csv", ensemble::triage_csv(records));
    out.finish();
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& ensemble_dir,
              const std::string& band) {
    const auto ds = load_dataset(flags.input, flags.strict);
    const auto model = ensemble::load_ensemble(ensemble_dir);
    const auto rows = ensemble::abstention_sweep(model, ds, parse_band(band), flags.workers);

    OutputWriter out(flags.out, "sweep");
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["ensemble_dir"] = ensemble_dir;
    out.manifest.resolved["band"] = band;
    out.add_input(flags.input);
    out.add_input((fs::path(ensemble_dir) / "ensemble.json").string());
    out.write("sweep.csv", ensemble::sweep_csv(rows));
    out.write("sweep_details.csv", ensemble::sweep_details_csv(rows));
    out.finish();
    return kExitOk;
}

int cmd_roc(const CommonFlags& flags, const std::string& ensemble_dir,
            const std::string& family_name, const std::string& space_name,
            double test_fraction) {
    const auto ds = load_dataset(flags.input, flags.strict);

    std::vector<double> scores;
    std::vector<int> labels;
    std::string score_label;
    if (!ensemble_dir.empty()) {
        const auto model = ensemble::load_ensemble(ensemble_dir);
        const auto votes = ensemble::vote_all(model, ds, flags.workers);
        for (int v : votes) scores.push_back(ensemble::ensemble_score(v));
        labels = data::labels(ds);
        score_label = "ensemble vote fraction";
    } else {
        const auto family = parse_family(family_name);
        const auto space = parse_space(space_name);
        learn::ModelConfig cfg = load_model_config(flags.config_path);
        cfg.family = family;
        cfg.seed = flags.seed;
        const auto parts = data::split(ds, test_fraction, flags.seed, true);
        const auto fm_train = color::featurize(parts.train, space);
        const auto model = learn::train(fm_train, data::labels(parts.train), cfg);
        const auto fm_test = color::featurize(parts.test, space);
        const Eigen::VectorXd s = learn::predict_scores(model, fm_test);
        scores.assign(s.begin(), s.end());
        labels = data::labels(parts.test);
        score_label = family_name + " score (" + space_name + ")";
    }
    const auto roc = metrics::roc_curve(scores, labels);

    OutputWriter out(flags.out, "roc");
    out.manifest.seed = flags.seed;
    out.manifest.resolved = flags_json(flags);
    out.manifest.resolved["score_source"] = score_label;
    if (!ensemble_dir.empty()) {
        out.manifest.resolved["ensemble_dir"] = ensemble_dir;
        out.add_input((fs::path(ensemble_dir) / "ensemble.json").string());
    } else {
        out.manifest.resolved["family"] = family_name;
        out.manifest.resolved["space"] = space_name;
        out.manifest.resolved["test_fraction"] = test_fraction;
    }
    out.add_input(flags.input);
    out.write("roc.csv", metrics::roc_csv(roc));
    out.write("roc.svg", metrics::roc_svg(roc, score_label));
    std::cout << "auc " << format_double(roc.auc) << " (" << score_label << ")\n";
    out.finish();
    return kExitOk;
}

int cmd_synth(const std::string& config_path, const std::string& out_path,
              const CLI::Option* seed_opt, std::uint64_t seed_flag) {
    auto cfg = synth::load_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed_flag;

    const auto result = synth::generate(cfg);
    const fs::path out_file(out_path);
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    data::write_csv(result.dataset, out_file);
    std::cout << "wrote " << out_file.string() << " (" << result.dataset.size()
              << " samples, clamp rate " << format_double(result.clamp_rate()) << ")\n";

    RunManifest manifest;
    manifest.subcommand = "synth";
    manifest.seed = cfg.seed;
    manifest.resolved["config"] = config_path;
    manifest.resolved["out"] = out_path;
    manifest.resolved["resolved_config"] = synth::config_to_string(cfg);
    manifest.resolved["clamp_rate"] = result.clamp_rate();
    manifest.inputs.emplace_back(config_path, file_hash_hex(config_path));
    manifest.outputs.push_back(out_file.string());
    const fs::path manifest_path =
        out_file.parent_path().empty() ? fs::path("synth_manifest.json")
                                       : out_file.parent_path() / "synth_manifest.json";
    write_manifest(manifest, manifest_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"urine test-strip screening pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonFlags flags;
    std::string space = "rgb";
    std::string family = "mlp";
    std::vector<std::string> spaces{"rgb"};
    std::vector<std::string> families{"all"};
    std::string ensemble_dir;
    std::string band = "symmetric";
    std::string tune = "off";
    std::string ensemble_family = "mlp";
    int reps = 30;
    double test_fraction = 0.1;
    int k = 6;
    bool pooled = false;
    bool with_ensemble = false;
    bool no_stratify = false;
    std::string synth_config;
    std::string synth_out;

    const auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
        if (needs_input)
            cmd->add_option("--input", flags.input, "input dataset CSV")->required();
        cmd->add_option("--out", flags.out, "output directory (default: current)");
        cmd->add_option("--workers", flags.workers, "worker thread bound (default 1)")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--strict", flags.strict,
                      "abort on the first invalid row instead of dropping it");
        return cmd->add_option("--seed", flags.seed,
                               "RNG seed (default: STRIPSCREEN_SEED env var, then 0)");
    };

    auto* validate = app.add_subcommand("validate", "validate a dataset CSV");
    auto* validate_seed = add_common(validate);

    auto* summarize = app.add_subcommand("summarize", "dataset summary tables");
    auto* summarize_seed = add_common(summarize);

    auto* analyze =
        app.add_subcommand("analyze", "per-channel group p-values and correlation matrices");
    auto* analyze_seed = add_common(analyze);
    analyze->add_option("--space", space, "color space for feature analysis (default rgb)");
    analyze->add_flag("--pooled", pooled, "use the pooled-variance t-test variant");

    auto* train = app.add_subcommand("train", "fit one model on the whole input");
    auto* train_seed = add_common(train);
    train->add_option("--family", family, "model family (default mlp)");
    train->add_option("--space", space, "color space (default rgb)");
    train->add_option("--config", flags.config_path, "hyperparameter key=value file");

    auto* eval =
        app.add_subcommand("eval", "repeated split/train/test evaluation with averages");
    auto* eval_seed = add_common(eval);
    eval->add_option("--space", spaces,
                     "color space(s), repeatable; 'all' for all 11 (default rgb)");
    eval->add_option("--family", families,
                     "model family(ies), repeatable; 'all' for all four (default all)");
    eval->add_option("--reps", reps, "number of repetitions (default 30)")
        ->check(CLI::PositiveNumber);
    eval->add_option("--test-fraction", test_fraction, "held-out fraction (default 0.1)");
    eval->add_option("--tune", tune, "grid search mode: off|once|per-rep (default off)");
    eval->add_flag("--with-ensemble", with_ensemble,
                   "add the 11-space vote ensemble row (needs --space all)");
    eval->add_option("--ensemble-family", ensemble_family,
                     "member family for the ensemble row (default mlp)");
    eval->add_flag("--no-stratify", no_stratify, "plain random splits");
    eval->add_option("--config", flags.config_path, "hyperparameter key=value file");

    auto* ensemble_cmd =
        app.add_subcommand("ensemble", "train the 11-color-space voting ensemble");
    auto* ensemble_seed = add_common(ensemble_cmd);
    ensemble_cmd->add_option("--family", family, "member family (default mlp)");
    ensemble_cmd->add_option("--config", flags.config_path, "hyperparameter key=value file");

    auto* triage = app.add_subcommand("triage", "per-sample decisions at threshold k");
    auto* triage_seed = add_common(triage);
    triage->add_option("--ensemble-dir", ensemble_dir, "trained ensemble directory")
        ->required();
    triage->add_option("--k", k, "positive-vote threshold in [6,11] (default 6)");
    triage->add_option("--band", band, "uncertain band rule: symmetric|asymmetric (default symmetric)");

    auto* sweep = app.add_subcommand("sweep", "abstention sweep over k = 6..11");
    auto* sweep_seed = add_common(sweep);
    sweep->add_option("--ensemble-dir", ensemble_dir, "trained ensemble directory")
        ->required();
    sweep->add_option("--band", band, "uncertain band rule: symmetric|asymmetric (default symmetric)");

    auto* roc = app.add_subcommand("roc", "ROC curve data and SVG");
    auto* roc_seed = add_common(roc);
    roc->add_option("--ensemble-dir", ensemble_dir,
                    "score with a trained ensemble's vote fraction");
    roc->add_option("--family", family, "model family when training fresh (default mlp)");
    roc->add_option("--space", space, "color space when training fresh (default rgb)");
    roc->add_option("--test-fraction", test_fraction, "held-out fraction (default 0.1)");
    roc->add_option("--config", flags.config_path, "hyperparameter key=value file");

    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
    synth->add_option("--config", synth_config, "flat key=value synthesis config")
        ->required();
    synth->add_option("--out", synth_out, "output CSV path")->required();
    auto* synth_seed =
        synth->add_option("--seed", flags.seed, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) {
            flags.seed = resolve_seed(validate_seed, flags.seed);
            return cmd_validate(flags, validate->count("--out") > 0);
        }
        if (summarize->parsed()) {
            flags.seed = resolve_seed(summarize_seed, flags.seed);
            return cmd_summarize(flags);
        }
        if (analyze->parsed()) {
            flags.seed = resolve_seed(analyze_seed, flags.seed);
            return cmd_analyze(flags, space, pooled);
        }
        if (train->parsed()) {
            flags.seed = resolve_seed(train_seed, flags.seed);
            return cmd_train(flags, family, space);
        }
        if (eval->parsed()) {
            flags.seed = resolve_seed(eval_seed, flags.seed);
            return cmd_eval(flags, spaces, families, reps, test_fraction, tune,
                            with_ensemble, ensemble_family, no_stratify);
        }
        if (ensemble_cmd->parsed()) {
            flags.seed = resolve_seed(ensemble_seed, flags.seed);
            return cmd_ensemble(flags, family);
        }
        if (triage->parsed()) {
            flags.seed = resolve_seed(triage_seed, flags.seed);
            return cmd_triage(flags, ensemble_dir, k, band);
        }
        if (sweep->parsed()) {
            flags.seed = resolve_seed(sweep_seed, flags.seed);
            return cmd_sweep(flags, ensemble_dir, band);
        }
        if (roc->parsed()) {
            flags.seed = resolve_seed(roc_seed, flags.seed);
            return cmd_roc(flags, ensemble_dir, family, space, test_fraction);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_config, synth_out, synth_seed, flags.seed);
        }
        std::cerr << "error: usage: no subcommand\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << "\n";
        return kExitRuntime;
    }
}
