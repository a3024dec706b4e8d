#include "stripscreen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stripscreen/error.hpp"
#include "stripscreen/rng.hpp"

namespace stripscreen::data {

std::string_view center_name(Center c) {
    switch (c) {
        case Center::A: return "A";
        case Center::B: return "B";
        case Center::C: return "C";
        case Center::D: return "D";
    }
    return "?";
}

std::optional<Center> center_from_name(std::string_view s) {
    if (s == "A") return Center::A;
    if (s == "B") return Center::B;
    if (s == "C") return Center::C;
    if (s == "D") return Center::D;
    return std::nullopt;
}

std::vector<int> labels(const Dataset& ds) {
    std::vector<int> y;
    y.reserve(ds.samples.size());
    for (const auto& s : ds.samples) y.push_back(s.pcr_positive ? 1 : 0);
    return y;
}

SummaryReport summarize(const Dataset& ds) {
    if (ds.empty()) throw DataError("summarize: empty dataset");
    SummaryReport rep;
    rep.n_samples = static_cast<int>(ds.size());
    double age_sum = 0.0;
    for (const auto& s : ds.samples) {
        age_sum += s.age;
        (s.gender == Gender::male ? rep.male : rep.female) += 1;
        (s.pcr_positive ? rep.sick : rep.healthy) += 1;
        auto& c = rep.per_center[s.center];
        (s.gender == Gender::male ? c.male : c.female) += 1;
        if (s.diabetes == TriFlag::positive) c.diabetes_positive += 1;
        if (s.diabetes == TriFlag::negative) c.diabetes_negative += 1;
        if (s.blood_pressure == TriFlag::positive) c.blood_pressure_positive += 1;
        if (s.blood_pressure == TriFlag::negative) c.blood_pressure_negative += 1;
        if (s.smoking == TriFlag::positive) c.smoking_positive += 1;
        if (s.smoking == TriFlag::negative) c.smoking_negative += 1;
    }
    rep.mean_age = age_sum / rep.n_samples;
    return rep;
}

namespace {

// Largest-remainder allocation of the test quota across classes keeps every
// class within one sample of exact proportionality for any seed.
std::vector<std::size_t> stratified_test_quota(const std::vector<std::size_t>& class_sizes,
                                               std::size_t test_total) {
    const std::size_t n_classes = class_sizes.size();
    const std::size_t total =
        std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
    std::vector<std::size_t> quota(n_classes, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double exact = static_cast<double>(class_sizes[c]) *
                             static_cast<double>(test_total) / static_cast<double>(total);
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        quota[c] = std::min(quota[c], class_sizes[c]);
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // deterministic tie-break by class index
    });
    for (const auto& [frac, c] : remainders) {
        if (assigned >= test_total) break;
        if (quota[c] < class_sizes[c]) {
            quota[c] += 1;
            assigned += 1;
        }
    }
    return quota;
}

}  // namespace

SplitResult split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                  bool stratified) {
    if (ds.empty()) throw DataError("split: empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw DataError("split: test_fraction must be in (0,1)");
    const std::size_t n = ds.size();
    const std::size_t test_total = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    if (test_total == 0 || test_total >= n)
        throw DataError("split: fraction yields an empty part");

    std::vector<char> in_test(n, 0);
    rng::SplitMix64 gen = rng::substream(seed, 0x73706c6974ull);  // split stream tag
    if (stratified) {
        std::vector<std::size_t> neg_idx, pos_idx;
        for (std::size_t i = 0; i < n; ++i)
            (ds.samples[i].pcr_positive ? pos_idx : neg_idx).push_back(i);
        const auto quota = stratified_test_quota({neg_idx.size(), pos_idx.size()}, test_total);
        rng::shuffle(neg_idx, gen);
        rng::shuffle(pos_idx, gen);
        for (std::size_t i = 0; i < quota[0]; ++i) in_test[neg_idx[i]] = 1;
        for (std::size_t i = 0; i < quota[1]; ++i) in_test[pos_idx[i]] = 1;
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        rng::shuffle(idx, gen);
        for (std::size_t i = 0; i < test_total; ++i) in_test[idx[i]] = 1;
    }

    SplitResult out;
    out.train.source = ds.source;
    out.test.source = ds.source;
    for (std::size_t i = 0; i < n; ++i)
        (in_test[i] ? out.test : out.train).samples.push_back(ds.samples[i]);
    if (out.train.empty() || out.test.empty())
        throw DataError("split: fraction yields an empty part");
    return out;
}

}  // namespace stripscreen::data
