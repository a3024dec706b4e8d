// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Invoked as: acceptance <stripscreen-binary> <configs-dir>.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stripscreen/csv.hpp"
#include "stripscreen/ensemble.hpp"
#include "stripscreen/experiment.hpp"
#include "stripscreen/learners.hpp"
#include "stripscreen/metrics.hpp"
#include "stripscreen/parallel.hpp"
#include "stripscreen/rng.hpp"
#include "stripscreen/stats.hpp"
#include "stripscreen/synth.hpp"
#include "stripscreen/text.hpp"

namespace fs = std::filesystem;
using namespace stripscreen;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
fs::path g_configs;
fs::path g_work;
int g_workers = 2;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

// --- criterion 1: color-space golden suite ---------------------------------

bool near(const Eigen::Vector3d& got, const Eigen::Vector3d& want, double tol) {
    return (got - want).cwiseAbs().maxCoeff() <= tol;
}

void criterion_colorspace(Check& check) {
    using color::ColorSpaceId;
    const Eigen::Vector3d white{1, 1, 1};
    check.require(near(color::convert(white, ColorSpaceId::lab), {100, 0, 0}, 1e-3),
                  "white->lab");
    check.require(
        near(color::convert(white, ColorSpaceId::xyz), {0.9505, 1.0000, 1.0888}, 1e-3),
        "white->xyz");
    check.require(near(color::convert(Eigen::Vector3d::Zero(), ColorSpaceId::ycbcr),
                       {16, 128, 128}, 1e-3),
                  "black->ycbcr");
    check.require(near(color::convert(white, ColorSpaceId::hed), {0, 0, 0}, 1e-6),
                  "white->hed");

    for (double g : {0.0, 0.2, 0.5, 0.85, 1.0}) {
        const Eigen::Vector3d gray{g, g, g};
        const auto ycbcr = color::convert(gray, ColorSpaceId::ycbcr);
        check.require(std::fabs(ycbcr[1] - 128.0) <= 1e-9 &&
                          std::fabs(ycbcr[2] - 128.0) <= 1e-9,
                      "gray chroma ycbcr");
        for (auto space : {ColorSpaceId::ypbpr, ColorSpaceId::yuv, ColorSpaceId::ydbdr,
                           ColorSpaceId::yiq}) {
            const auto v = color::convert(gray, space);
            check.require(std::fabs(v[1]) <= 1e-9 && std::fabs(v[2]) <= 1e-9,
                          "gray chroma " + std::string(color::space_name(space)));
        }
    }

    const auto linear_spaces = {ColorSpaceId::xyz,   ColorSpaceId::ypbpr, ColorSpaceId::yuv,
                                ColorSpaceId::ydbdr, ColorSpaceId::yiq,   ColorSpaceId::cie};
    for (int r = 0; r < 9 && check.ok; ++r)
        for (int g = 0; g < 9; ++g)
            for (int b = 0; b < 9; ++b) {
                const Eigen::Vector3d rgb{r / 8.0, g / 8.0, b / 8.0};
                for (auto space : linear_spaces) {
                    const auto back =
                        color::convert_inverse(color::convert(rgb, space), space);
                    check.require(near(back, rgb, 1e-6),
                                  "round trip " + std::string(color::space_name(space)));
                }
            }
}

// --- criterion 2: MLP gradient check ----------------------------------------

void criterion_gradients(Check& check) {
    rng::SplitMix64 gen(424242);
    for (int net = 0; net < 20; ++net) {
        auto weights = learn::init_mlp(6, {3, 2}, gen);
        // Random biases keep pre-activations away from the exact ReLU kink,
        // where central differences are ill-posed.
        for (auto& b : weights.b)
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.2 * gen.normal();
        const int batch = 4 + static_cast<int>(gen.below(12));
        Eigen::MatrixXd x(batch, 6);
        std::vector<int> y;
        for (int i = 0; i < batch; ++i) {
            for (int j = 0; j < 6; ++j) x(i, j) = gen.normal();
            y.push_back(gen.uniform() < 0.5 ? 1 : 0);
        }
        const double l2 = 0.05;
        const auto [loss, grads] = learn::mlp_loss_and_gradients(weights, x, y, l2);
        check.require(std::isfinite(loss), "finite loss");

        const double h = 1e-5;
        for (std::size_t l = 0; l < weights.w.size(); ++l) {
            double err_sq = 0.0, norm_sq = 0.0;
            const auto probe_param = [&](double* param, double analytic) {
                *param += h;
                const double up = learn::mlp_loss(weights, x, y, l2);
                *param -= 2 * h;
                const double down = learn::mlp_loss(weights, x, y, l2);
                *param += h;
                const double numeric = (up - down) / (2 * h);
                err_sq += (analytic - numeric) * (analytic - numeric);
                norm_sq += analytic * analytic + numeric * numeric;
            };
            for (Eigen::Index r = 0; r < weights.w[l].rows(); ++r)
                for (Eigen::Index c = 0; c < weights.w[l].cols(); ++c)
                    probe_param(&weights.w[l](r, c), grads.w[l](r, c));
            for (Eigen::Index r = 0; r < weights.b[l].size(); ++r)
                probe_param(&weights.b[l][r], grads.b[l][r]);
            const double rel = std::sqrt(err_sq) / std::max(std::sqrt(norm_sq), 1e-12);
            check.require(rel < 1e-5,
                          "net " + std::to_string(net) + " layer " + std::to_string(l) +
                              " rel err " + format_double(rel));
        }
    }
}

// --- criterion 3: metric identities ------------------------------------------

void criterion_metric_identities(Check& check) {
    rng::SplitMix64 gen(7321);
    for (int trial = 0; trial < 1000; ++trial) {
        metrics::ConfusionMatrix cm;
        cm.tp = static_cast<std::int64_t>(gen.below(200));
        cm.fn = static_cast<std::int64_t>(gen.below(200)) + 1;
        cm.tn = static_cast<std::int64_t>(gen.below(200));
        cm.fp = static_cast<std::int64_t>(gen.below(200)) + 1;
        const auto m = metrics::metric_set(cm);
        const double p = static_cast<double>(cm.tp + cm.fn);
        const double n = static_cast<double>(cm.tn + cm.fp);
        const double mixed = (*m.sensitivity * p + *m.specificity * n) / (p + n);
        check.require(std::fabs(*m.accuracy - mixed) <= 1e-12,
                      "prevalence-weighted accuracy identity");
    }

    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 12 + gen.below(80);
        std::vector<double> scores;
        std::vector<int> labels;
        int pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(static_cast<double>(gen.below(10)) / 10.0);
            labels.push_back(gen.uniform() < 0.5 ? 1 : 0);
            pos += labels.back();
        }
        if (pos == 0 || pos == static_cast<int>(n)) continue;
        const double auc = metrics::roc_curve(scores, labels).auc;
        std::vector<int> flipped;
        for (int y : labels) flipped.push_back(1 - y);
        const double auc_flipped = metrics::roc_curve(scores, flipped).auc;
        check.require(std::fabs(auc + auc_flipped - 1.0) <= 1e-12, "AUC complement");
    }

    const std::vector<double> tied(10, 0.3);
    const std::vector<int> labels{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
    check.require(metrics::roc_curve(tied, labels).auc == 0.5, "tied-score AUC exactly 0.5");
}

// --- criterion 4: abstention structure ----------------------------------------

void criterion_abstention_structure(Check& check) {
    rng::SplitMix64 gen(90125);

    for (int v = 0; v <= 11; ++v) {
        const auto t = ensemble::abstaining_predict(v, 6);
        check.require(t != ensemble::Triage::insufficient_information, "k=6 always answers");
        check.require((t == ensemble::Triage::positive ? 1 : 0) ==
                          ensemble::majority_predict(v),
                      "abstain(.,6) == majority");
        for (int k = 6; k <= 10; ++k) {
            const bool next = ensemble::abstaining_predict(v, k + 1) !=
                              ensemble::Triage::insufficient_information;
            const bool now = ensemble::abstaining_predict(v, k) !=
                             ensemble::Triage::insufficient_information;
            check.require(!next || now, "answered(k+1) subset of answered(k)");
        }
    }

    // 10,000 random vote profiles across 100 sweeps.
    for (int set = 0; set < 100; ++set) {
        std::vector<int> votes, labels;
        for (int i = 0; i < 100; ++i) {
            votes.push_back(static_cast<int>(gen.below(12)));
            labels.push_back(static_cast<int>(gen.below(2)));
        }
        const auto rows = ensemble::abstention_sweep(votes, labels);
        check.require(rows.size() == 6, "sweep has 6 rows");
        check.require(rows[0].response_ratio == 1.0, "k=6 response ratio exactly 1");
        for (std::size_t r = 1; r < rows.size(); ++r)
            check.require(rows[r].response_ratio <= rows[r - 1].response_ratio,
                          "response ratio nonincreasing");
    }
}

// --- criterion 5: synthetic end-to-end ----------------------------------------

void criterion_synthetic_end_to_end(Check& check) {
    const auto separable = synth::load_config(g_configs / "separable.cfg");
    const double bayes_sep = synth::bayes_accuracy(separable);
    check.require(std::fabs(bayes_sep - 0.98) < 0.005, "separable config near 0.98");
    const auto sep_data = synth::generate(separable);
    check.require(sep_data.clamp_rate() < 0.01, "separable clamp rate");

    experiment::ExperimentPlan plan;
    const auto all_spaces = color::all_spaces();
    plan.spaces.assign(all_spaces.begin(), all_spaces.end());
    plan.families = {learn::Family::mlp};
    plan.reps = 30;
    plan.test_fraction = 0.1;
    plan.master_seed = 7000;
    plan.with_ensemble = true;
    plan.ensemble_family = learn::Family::mlp;
    plan.workers = g_workers;
    const auto report = experiment::run_repeated(sep_data.dataset, plan);
    for (const auto& cell : report.cells) {
        check.require(cell.accuracy.defined == 30, cell.space + " all reps defined");
        check.require(cell.accuracy.mean >= 0.93,
                      cell.space + "/" + cell.family + " mean accuracy " +
                          format_double(cell.accuracy.mean) + " < 0.93");
        check.require(cell.accuracy.mean <= bayes_sep + 0.03,
                      cell.space + " beats the separable oracle bound");
    }

    const auto null_cfg = synth::load_config(g_configs / "null.cfg");
    check.require(synth::bayes_accuracy(null_cfg) == 0.5, "null oracle is 0.5");
    const auto null_data = synth::generate(null_cfg);
    experiment::ExperimentPlan null_plan;
    null_plan.spaces = {color::ColorSpaceId::rgb};
    const auto all_families = learn::all_families();
    null_plan.families.assign(all_families.begin(), all_families.end());
    null_plan.reps = 30;
    null_plan.test_fraction = 0.1;
    null_plan.master_seed = 7100;
    null_plan.workers = g_workers;
    const auto null_report = experiment::run_repeated(null_data.dataset, null_plan);
    for (const auto& cell : null_report.cells) {
        check.require(cell.accuracy.mean >= 0.45 && cell.accuracy.mean <= 0.55,
                      "null " + cell.family + " mean accuracy " +
                          format_double(cell.accuracy.mean) + " outside [0.45,0.55]");
        check.require(cell.accuracy.mean <= 0.5 + 0.03,
                      "null " + cell.family + " beats the oracle bound");
    }
}

// --- criterion 6: abstention benefit -------------------------------------------

void criterion_abstention_benefit(Check& check) {
    const auto cfg = synth::load_config(g_configs / "weak_signal.cfg");
    const double bayes = synth::bayes_accuracy(cfg);
    check.require(std::fabs(bayes - 0.66) < 0.01, "weak-signal config near 0.66");
    const auto ds = synth::generate(cfg).dataset;

    const int reps = 30;
    std::vector<std::vector<ensemble::SweepRow>> sweeps(reps);
    learn::ModelConfig member_cfg;
    parallel_for(static_cast<std::size_t>(reps), g_workers, [&](std::size_t rep) {
        const auto parts =
            data::split(ds, 0.1, 9000 + static_cast<std::uint64_t>(rep), true);
        const auto model = ensemble::train_ensemble(
            parts.train, learn::Family::mlp, member_cfg,
            17000 + 100 * static_cast<std::uint64_t>(rep), 1);
        sweeps[rep] = ensemble::abstention_sweep(model, parts.test);
    });

    double acc6 = 0.0, acc10 = 0.0, ratio10 = 0.0;
    int n6 = 0, n10 = 0;
    for (const auto& rows : sweeps) {
        if (rows[0].accuracy) {
            acc6 += *rows[0].accuracy;
            ++n6;
        }
        ratio10 += rows[4].response_ratio;
        if (rows[4].accuracy) {
            acc10 += *rows[4].accuracy;
            ++n10;
        }
    }
    check.require(n6 == 30, "k=6 accuracy defined in every rep");
    check.require(n10 > 0, "k=10 accuracy defined somewhere");
    acc6 /= n6;
    acc10 /= n10;
    ratio10 /= 30.0;
    check.require(ratio10 < 1.0, "k=10 mean response ratio " + format_double(ratio10) +
                                     " not strictly below 1");
    check.require(acc10 >= acc6, "answered accuracy k=10 " + format_double(acc10) +
                                     " < k=6 " + format_double(acc6));
}

// --- criterion 7: statistics calibration ----------------------------------------

// Independent oracle: regularized incomplete beta by adaptive Simpson
// quadrature of the beta density.
double beta_density_integral(double a, double b, double lo, double hi, double tol,
                             int depth) {
    const auto f = [&](double t) {
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
    };
    const double mid = (lo + hi) / 2.0;
    const auto simpson = [&](double x0, double x1) {
        const double m = (x0 + x1) / 2.0;
        return (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(m) + f(x1));
    };
    const double whole = simpson(lo, hi);
    const double halves = simpson(lo, mid) + simpson(mid, hi);
    if (depth <= 0 || std::fabs(whole - halves) < 15.0 * tol) return halves;
    return beta_density_integral(a, b, lo, mid, tol / 2.0, depth - 1) +
           beta_density_integral(a, b, mid, hi, tol / 2.0, depth - 1);
}

double quadrature_incomplete_beta(double a, double b, double x) {
    const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double eps = 1e-12;  // avoid the endpoint singularities of t^(a-1)
    const double integral = beta_density_integral(a, b, eps, x, 1e-13, 40);
    return integral / std::exp(ln_beta);
}

void criterion_stats_calibration(Check& check) {
    rng::SplitMix64 gen(555);
    int below = 0;
    const int trials = 2000;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < 40; ++i) a.push_back(gen.normal());
        for (int i = 0; i < 40; ++i) b.push_back(gen.normal());
        if (stats::welch_t_test(a, b).p_value < 0.05) ++below;
    }
    const double fraction = static_cast<double>(below) / trials;
    check.require(fraction >= 0.03 && fraction <= 0.07,
                  "null p<0.05 fraction " + format_double(fraction));

    const double p_impl = stats::t_sf_two_tailed(2.0, 10.0);
    const double x = 10.0 / (10.0 + 4.0);
    const double p_oracle = quadrature_incomplete_beta(5.0, 0.5, x);
    check.require(std::fabs(p_impl - 0.07339) <= 1e-4, "t=2 df=10 vs frozen value");
    check.require(std::fabs(p_impl - p_oracle) <= 1e-7,
                  "t=2 df=10 vs quadrature oracle: impl " + format_double(p_impl) +
                      " oracle " + format_double(p_oracle));

    const std::vector<double> px{1, 2, 3, 4};
    const std::vector<double> py{1, 3, 2, 4};
    check.require(std::fabs(stats::pearson(px, py) - 0.8) <= 1e-12, "pearson hand case");
}

// --- criterion 8: CLI determinism ------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), dir).string()] = read_file(entry.path());
    return files;
}

void criterion_cli_determinism(Check& check) {
    const fs::path root = g_work / "determinism";
    fs::remove_all(root);
    fs::create_directories(root);

    const auto cfg = synth::uniform_config(150, 110, 145, 15, 31);
    write_file(root / "bench.cfg", synth::config_to_string(cfg));
    write_file(root / "fast.cfg",
               "logreg_max_iterations=400\nmlp_epochs=25\nmlp_batch_size=16\n"
               "forest_trees=10\nboosting_stages=10\n");
    const std::string data_csv = (root / "data.csv").string();
    const std::string fast = (root / "fast.cfg").string();

    // Command list: every subcommand, rerun into the same output location.
    std::vector<std::pair<std::string, std::string>> commands;
    commands.emplace_back("synth", "synth --config " + (root / "bench.cfg").string() +
                                       " --out " + data_csv);
    const std::string edir = (root / "ens").string();
    commands.emplace_back("validate",
                          "validate --input " + data_csv + " --out " + (root / "val").string());
    commands.emplace_back("summarize",
                          "summarize --input " + data_csv + " --out " + (root / "sum").string());
    commands.emplace_back("analyze",
                          "analyze --input " + data_csv + " --out " + (root / "ana").string());
    commands.emplace_back("train", "train --input " + data_csv + " --out " +
                                       (root / "train").string() +
                                       " --family logreg --space hsv --seed 5 --config " + fast);
    commands.emplace_back("eval", "eval --input " + data_csv + " --out " +
                                      (root / "eval").string() +
                                      " --family logreg --family gradient_boosting "
                                      "--reps 2 --test-fraction 0.2 --seed 6 --config " +
                                      fast);
    commands.emplace_back("ensemble", "ensemble --input " + data_csv + " --out " + edir +
                                          " --family logreg --seed 7 --config " + fast);
    commands.emplace_back("triage", "triage --input " + data_csv + " --ensemble-dir " + edir +
                                        " --out " + (root / "tri").string() + " --k 8");
    commands.emplace_back("sweep", "sweep --input " + data_csv + " --ensemble-dir " + edir +
                                       " --out " + (root / "swp").string());
    commands.emplace_back("roc", "roc --input " + data_csv + " --out " +
                                     (root / "roc").string() +
                                     " --family logreg --space rgb --test-fraction 0.3 "
                                     "--seed 8 --config " +
                                     fast);

    for (const auto& [name, command] : commands) {
        if (run_cli(command) != 0) {
            check.require(false, name + " failed on first run");
            return;
        }
    }
    auto before = snapshot_dir(root);
    for (const auto& [name, command] : commands) {
        if (run_cli(command) != 0) {
            check.require(false, name + " failed on rerun");
            return;
        }
    }
    const auto after = snapshot_dir(root);
    check.require(before.size() == after.size(), "rerun changed the file set");
    for (const auto& [file, content] : before) {
        const auto it = after.find(file);
        check.require(it != after.end() && it->second == content,
                      "rerun changed " + file);
        if (!check.ok) return;
    }

    // Worker-count parity on the heaviest subcommand.
    const std::string eval_base = "eval --input " + data_csv + " --out " +
                                  (root / "eval").string() +
                                  " --family logreg --family gradient_boosting --reps 2 "
                                  "--test-fraction 0.2 --seed 6 --config " +
                                  fast;
    check.require(run_cli(eval_base + " --workers 1") == 0, "eval workers=1");
    const auto serial = snapshot_dir(root / "eval");
    check.require(run_cli(eval_base + " --workers 8") == 0, "eval workers=8");
    const auto threaded = snapshot_dir(root / "eval");
    check.require(serial == threaded, "workers 1 vs 8 outputs differ");

    const std::string ens_base = "ensemble --input " + data_csv + " --out " + edir +
                                 " --family logreg --seed 7 --config " + fast;
    check.require(run_cli(ens_base + " --workers 8") == 0, "ensemble workers=8");
    const auto ens_threaded = snapshot_dir(root / "ens");
    check.require(run_cli(ens_base + " --workers 1") == 0, "ensemble workers=1");
    check.require(snapshot_dir(root / "ens") == ens_threaded,
                  "ensemble workers 1 vs 8 outputs differ");
}

// --- criterion 9: report-shape conformance ---------------------------------------

std::vector<std::string> lines_of(const std::string& content) {
    std::vector<std::string> lines;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void criterion_report_shapes(Check& check) {
    const fs::path root = g_work / "determinism";

    const auto summary = read_file(root / "sum" / "summary.txt");
    check.require(summary.find("Number of Samples") != std::string::npos &&
                      summary.find("Average of age") != std::string::npos &&
                      summary.find("Gender distribution") != std::string::npos &&
                      summary.find("Distribution of healthy and sick people") !=
                          std::string::npos,
                  "summary.txt statistics block");
    check.require(summary.find("Gender of clients by data center") != std::string::npos,
                  "summary.txt gender block");
    check.require(summary.find("Clinical indicators by data center") != std::string::npos,
                  "summary.txt clinical block");
    const auto stats_lines = lines_of(read_file(root / "sum" / "summary_stats.csv"));
    check.require(stats_lines.size() == 7 && stats_lines[0] == "statistic,value",
                  "summary_stats.csv shape");
    const auto clinical_lines =
        lines_of(read_file(root / "sum" / "summary_clinical_by_center.csv"));
    check.require(clinical_lines[0] ==
                      "center,diabetes_positive,diabetes_negative,blood_pressure_positive,"
                      "blood_pressure_negative,smoking_positive,smoking_negative",
                  "clinical csv header");

    const auto eval_lines = lines_of(read_file(root / "eval" / "eval_report.csv"));
    check.require(eval_lines[0].rfind("space,family,precision,recall,specificity,accuracy,",
                                      0) == 0,
                  "eval column order");

    const auto sweep_lines = lines_of(read_file(root / "swp" / "sweep.csv"));
    check.require(sweep_lines.size() == 7, "sweep has exactly 6 data rows");
    check.require(sweep_lines[0] == "k,response_ratio,accuracy,recall,specificity",
                  "sweep column order");
    for (int k = 6; k <= 11; ++k)
        check.require(sweep_lines[static_cast<std::size_t>(k - 5)].rfind(
                          std::to_string(k) + ",", 0) == 0,
                      "sweep row order");
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0 = no limit
    std::function<void(Check&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <stripscreen-binary> <configs-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_configs = argv[2];
    g_work = fs::temp_directory_path() / "stripscreen_acceptance";
    fs::create_directories(g_work);
    const unsigned hw = std::thread::hardware_concurrency();
    g_workers = hw == 0 ? 2 : static_cast<int>(hw);

    const std::vector<Criterion> criteria = {
        {1, "color-space golden suite and round trips", 5.0, criterion_colorspace},
        {2, "mlp gradient check vs central differences", 10.0, criterion_gradients},
        {3, "confusion/auc metric identities", 0.0, criterion_metric_identities},
        {4, "abstention rule structure", 0.0, criterion_abstention_structure},
        {5, "synthetic end-to-end oracle bounds", 120.0, criterion_synthetic_end_to_end},
        {6, "abstention benefit on the weak-signal benchmark", 180.0,
         criterion_abstention_benefit},
        {7, "statistics calibration", 0.0, criterion_stats_calibration},
        {8, "cli determinism and worker parity", 0.0, criterion_cli_determinism},
        {9, "report-shape conformance", 0.0, criterion_report_shapes},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = Clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s)
            check.require(false, "runtime " + format_fixed(elapsed, 1) + "s exceeds " +
                                     format_fixed(criterion.time_limit_s, 0) + "s");
        std::cout << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id
                  << ": " << criterion.name << " (" << format_fixed(elapsed, 1) << "s)";
        if (!check.ok) std::cout << " -- " << check.detail;
        std::cout << "\n";
        if (!check.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
