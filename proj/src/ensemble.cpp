#include "stripscreen/ensemble.hpp"

#include <nlohmann/json.hpp>

#include "stripscreen/error.hpp"
#include "stripscreen/metrics.hpp"
#include "stripscreen/parallel.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::ensemble {

namespace {

using json = nlohmann::json;

std::optional<double> answered_metric(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EnsembleModel train_ensemble(const data::Dataset& train, learn::Family family,
                             const learn::ModelConfig& config, std::uint64_t seed,
                             int workers) {
    EnsembleModel model;
    model.family = family;
    model.seed = seed;
    model.members.resize(color::kSpaceCount);
    const auto spaces = color::all_spaces();
    parallel_for(color::kSpaceCount, workers, [&](std::size_t i) {
        learn::ModelConfig cfg = config;
        cfg.family = family;
        cfg.seed = seed + static_cast<std::uint64_t>(i);
        const color::FeatureMatrix fm = color::featurize(train, spaces[i]);
        model.members[i] = learn::train(fm, data::labels(train), cfg);
    });
    return model;
}

int vote(const EnsembleModel& model, const data::StripSample& sample) {
    if (model.members.size() != color::kSpaceCount)
        throw DataError("vote: ensemble must have one member per color space");
    int votes = 0;
    for (const auto& member : model.members) {
        const color::FeatureVector fv = color::featurize(sample, member.space());
        if (learn::predict_score(member, fv) > 0.5) ++votes;
    }
    return votes;
}

std::vector<int> vote_all(const EnsembleModel& model, const data::Dataset& ds, int workers) {
    if (model.members.size() != color::kSpaceCount)
        throw DataError("vote_all: ensemble must have one member per color space");
    std::vector<int> votes(ds.size(), 0);
    // Parallelize over members; each member scores the whole set at once.
    std::vector<std::vector<char>> member_votes(model.members.size());
    parallel_for(model.members.size(), workers, [&](std::size_t m) {
        const auto& member = model.members[m];
        const color::FeatureMatrix fm = color::featurize(ds, member.space());
        const Eigen::VectorXd scores = learn::predict_scores(member, fm);
        std::vector<char> v(ds.size(), 0);
        for (Eigen::Index i = 0; i < scores.size(); ++i)
            v[static_cast<std::size_t>(i)] = scores[i] > 0.5 ? 1 : 0;
        member_votes[m] = std::move(v);
    });
    for (const auto& mv : member_votes)
        for (std::size_t i = 0; i < votes.size(); ++i) votes[i] += mv[i];
    return votes;
}

int majority_predict(int votes) {
    if (votes < 0 || votes > color::kSpaceCount)
        throw DataError("majority_predict: vote count out of [0,11]");
    return votes >= 6 ? 1 : 0;
}

std::string_view triage_name(Triage t) {
    switch (t) {
        case Triage::negative: return "negative";
        case Triage::positive: return "positive";
        case Triage::insufficient_information: return "insufficient_information";
    }
    return "?";
}

Triage abstaining_predict(int votes, int k, BandRule rule) {
    if (votes < 0 || votes > color::kSpaceCount)
        throw DataError("abstaining_predict: vote count out of [0,11]");
    if (k < 6 || k > 11) throw DataError("abstaining_predict: k must be in [6,11]");
    if (votes >= k) return Triage::positive;
    const int negative_cut = rule == BandRule::symmetric ? color::kSpaceCount - k : 5;
    if (votes <= negative_cut) return Triage::negative;
    return Triage::insufficient_information;
}

double ensemble_score(int votes) {
    if (votes < 0 || votes > color::kSpaceCount)
        throw DataError("ensemble_score: vote count out of [0,11]");
    return static_cast<double>(votes) / static_cast<double>(color::kSpaceCount);
}

std::vector<SweepRow> abstention_sweep(const std::vector<int>& votes,
                                       const std::vector<int>& labels, BandRule rule) {
    if (votes.size() != labels.size())
        throw DataError("abstention_sweep: votes/labels length mismatch");
    if (votes.empty()) throw DataError("abstention_sweep: empty test set");

    const std::int64_t total_negative =
        static_cast<std::int64_t>(std::count(labels.begin(), labels.end(), 0));

    std::vector<SweepRow> rows;
    for (int k = 6; k <= 11; ++k) {
        std::int64_t answered = 0, correct = 0, tp = 0, fn = 0, tn = 0, fp = 0;
        for (std::size_t i = 0; i < votes.size(); ++i) {
            const Triage t = abstaining_predict(votes[i], k, rule);
            if (t == Triage::insufficient_information) continue;
            ++answered;
            const int pred = t == Triage::positive ? 1 : 0;
            const int truth = labels[i];
            if (pred == truth) ++correct;
            if (truth == 1) (pred == 1 ? tp : fn) += 1;
            else (pred == 0 ? tn : fp) += 1;
        }
        SweepRow row;
        row.k = k;
        row.response_ratio =
            static_cast<double>(answered) / static_cast<double>(votes.size());
        row.accuracy = answered_metric(correct, answered);
        row.recall = answered_metric(tp, tp + fn);
        row.specificity = answered_metric(tn, tn + fp);
        row.answered = answered;
        row.healthy_cleared = answered_metric(tn, total_negative);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepRow> abstention_sweep(const EnsembleModel& model, const data::Dataset& test,
                                       BandRule rule, int workers) {
    return abstention_sweep(vote_all(model, test, workers), data::labels(test), rule);
}

namespace {

std::string optional_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "k,response_ratio,accuracy,recall,specificity\n";
    for (const auto& row : rows) {
        out += std::to_string(row.k) + "," + format_double(row.response_ratio) + "," +
               optional_cell(row.accuracy) + "," + optional_cell(row.recall) + "," +
               optional_cell(row.specificity) + '\n';
    }
    return out;
}

std::string sweep_details_csv(const std::vector<SweepRow>& rows) {
    std::string out = "k,response_ratio,answered,accuracy,recall,specificity,healthy_cleared\n";
    for (const auto& row : rows) {
        out += std::to_string(row.k) + "," + format_double(row.response_ratio) + "," +
               std::to_string(row.answered) + "," + optional_cell(row.accuracy) + "," +
               optional_cell(row.recall) + "," + optional_cell(row.specificity) + "," +
               optional_cell(row.healthy_cleared) + '\n';
    }
    return out;
}

std::vector<TriageRecord> triage(const EnsembleModel& model, const data::Dataset& ds, int k,
                                 BandRule rule, int workers) {
    const auto votes = vote_all(model, ds, workers);
    std::vector<TriageRecord> records;
    records.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        TriageRecord rec;
        rec.id = ds.samples[i].id;
        rec.votes = votes[i];
        rec.decision = abstaining_predict(votes[i], k, rule);
        records.push_back(std::move(rec));
    }
    return records;
}

std::string triage_csv(const std::vector<TriageRecord>& records) {
    std::string out = "id,votes,decision\n";
    for (const auto& rec : records)
        out += rec.id + "," + std::to_string(rec.votes) + "," +
               std::string(triage_name(rec.decision)) + '\n';
    return out;
}

void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["format"] = 1;
    manifest["family"] = learn::family_name(model.family);
    manifest["seed"] = model.seed;
    json members = json::array();
    for (const auto& member : model.members) {
        const std::string filename =
            "member_" + std::string(color::space_name(member.space())) + ".model";
        learn::save_model(member, dir / filename);
        json m;
        m["space"] = color::space_name(member.space());
        m["file"] = filename;
        members.push_back(std::move(m));
    }
    manifest["members"] = std::move(members);
    write_file(dir / "ensemble.json", manifest.dump(2) + "\n");
}

EnsembleModel load_ensemble(const std::filesystem::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "ensemble.json"));
    } catch (const json::exception& e) {
        throw DataError(dir.string() + ": bad ensemble.json: " + e.what());
    }
    if (manifest.at("format").get<int>() != 1)
        throw DataError(dir.string() + ": unsupported ensemble format");

    EnsembleModel model;
    const auto family = learn::family_from_name(manifest.at("family").get<std::string>());
    if (!family) throw DataError(dir.string() + ": unknown ensemble family");
    model.family = *family;
    model.seed = manifest.at("seed").get<std::uint64_t>();

    const auto& members = manifest.at("members");
    if (members.size() != color::kSpaceCount)
        throw DataError(dir.string() + ": ensemble must list 11 members");
    const auto spaces = color::all_spaces();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto file = members[i].at("file").get<std::string>();
        learn::TrainedModel member = learn::load_model(dir / file);
        if (member.space() != spaces[i])
            throw DataError(dir.string() + ": member " + file +
                            " is not in canonical space order");
        if (member.family != model.family)
            throw DataError(dir.string() + ": member " + file + " has a different family");
        model.members.push_back(std::move(member));
    }
    return model;
}

}  // namespace stripscreen::ensemble
