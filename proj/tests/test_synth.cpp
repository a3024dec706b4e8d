#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "stripscreen/csv.hpp"
#include "stripscreen/error.hpp"
#include "stripscreen/synth.hpp"
#include "stripscreen/text.hpp"

using namespace stripscreen;

TEST_CASE("generation is deterministic per seed") {
    const auto cfg = synth::uniform_config(400, 115, 135, 20, 99);
    const auto a = synth::generate(cfg);
    const auto b = synth::generate(cfg);
    CHECK(data::to_csv(a.dataset) == data::to_csv(b.dataset));

    auto cfg2 = cfg;
    cfg2.seed = 100;
    CHECK(data::to_csv(synth::generate(cfg2).dataset) != data::to_csv(a.dataset));
}

TEST_CASE("positive count respects the prior within a binomial bound") {
    const auto cfg = synth::uniform_config(1000, 120, 130, 20, 7);
    const auto res = synth::generate(cfg);
    int pos = 0;
    for (const auto& s : res.dataset.samples) pos += s.pcr_positive ? 1 : 0;
    CHECK(pos >= 440);  // 3 sigma around 500
    CHECK(pos <= 560);
}

TEST_CASE("per-class channel means converge to the configured means") {
    auto cfg = synth::uniform_config(4000, 110, 140, 15, 21);
    const auto res = synth::generate(cfg);
    double sum0 = 0.0, sum1 = 0.0;
    int n0 = 0, n1 = 0;
    for (const auto& s : res.dataset.samples) {
        const double v = s.pads[0].r;
        if (s.pcr_positive) {
            sum1 += v;
            ++n1;
        } else {
            sum0 += v;
            ++n0;
        }
    }
    CHECK(std::fabs(sum0 / n0 - 110.0) <= 3.0 * 15.0 / std::sqrt(static_cast<double>(n0)) + 0.5);
    CHECK(std::fabs(sum1 / n1 - 140.0) <= 3.0 * 15.0 / std::sqrt(static_cast<double>(n1)) + 0.5);
}

TEST_CASE("clamping is counted and rare for interior means") {
    const auto cfg = synth::uniform_config(2000, 120, 134, 20, 13);
    const auto res = synth::generate(cfg);
    CHECK(res.total_channels == 2000 * 33);
    CHECK(res.clamp_rate() < 0.01);

    // Means at a byte boundary clamp often.
    const auto edge = synth::uniform_config(500, 2, 253, 20, 13);
    CHECK(synth::generate(edge).clamp_rate() > 0.05);
}

TEST_CASE("bayes accuracy closed form") {
    auto cfg = synth::uniform_config(100, 120, 120, 20, 1);
    CHECK(synth::bayes_accuracy(cfg) == doctest::Approx(0.5).epsilon(1e-12));

    // One discriminative channel with (mu1-mu0)/sigma = 2 -> Phi(1).
    cfg.mu1 = cfg.mu0;
    cfg.mu1[0] += 40.0;
    CHECK(std::fabs(synth::bayes_accuracy(cfg) - 0.8413447460685429) < 1e-4);

    // Distance grows -> accuracy approaches 1.
    auto far = synth::uniform_config(100, 20, 230, 5, 1);
    CHECK(synth::bayes_accuracy(far) > 0.999999);

    auto skewed = cfg;
    skewed.positive_prior = 0.3;
    CHECK_THROWS_AS(synth::bayes_accuracy(skewed), DataError);

    auto latent = cfg;
    latent.latent_weight = 0.5;
    CHECK_THROWS_AS(synth::bayes_accuracy(latent), DataError);
}

TEST_CASE("label shuffling preserves the marginal and is seeded") {
    const auto ds = synth::generate(synth::uniform_config(500, 110, 140, 20, 31)).dataset;
    const auto shuffled = synth::shuffle_labels(ds, 8);
    const auto again = synth::shuffle_labels(ds, 8);
    int before = 0, after = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        before += ds.samples[i].pcr_positive ? 1 : 0;
        after += shuffled.samples[i].pcr_positive ? 1 : 0;
        CHECK(shuffled.samples[i].pads == ds.samples[i].pads);
        CHECK(shuffled.samples[i].pcr_positive == again.samples[i].pcr_positive);
    }
    CHECK(before == after);

    // Fixed-point fraction over seeds behaves like a random permutation of a
    // two-value multiset: expected agreement p^2 + (1-p)^2.
    const double p = static_cast<double>(before) / static_cast<double>(ds.size());
    double agree = 0.0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const auto perm = synth::shuffle_labels(ds, 1000 + static_cast<std::uint64_t>(r));
        int same = 0;
        for (std::size_t i = 0; i < ds.size(); ++i)
            same += perm.samples[i].pcr_positive == ds.samples[i].pcr_positive ? 1 : 0;
        agree += static_cast<double>(same) / static_cast<double>(ds.size());
    }
    const double expected = p * p + (1.0 - p) * (1.0 - p);
    CHECK(std::fabs(agree / runs - expected) < 0.02);
}

TEST_CASE("latent factor couples the channels") {
    auto independent = synth::uniform_config(3000, 128, 128, 20, 61);
    auto coupled = independent;
    coupled.latent_weight = 0.7;

    const auto corr_between_first_two = [](const data::Dataset& ds) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        const double n = static_cast<double>(ds.size());
        for (const auto& s : ds.samples) {
            const double x = s.pads[0].r;
            const double y = s.pads[3].g;
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        }
        const double cov = sxy / n - sx / n * sy / n;
        const double vx = sxx / n - sx / n * sx / n;
        const double vy = syy / n - sy / n * sy / n;
        return cov / std::sqrt(vx * vy);
    };
    CHECK(std::fabs(corr_between_first_two(synth::generate(independent).dataset)) < 0.08);
    CHECK(corr_between_first_two(synth::generate(coupled).dataset) > 0.3);
}

TEST_CASE("config files round trip") {
    auto cfg = synth::uniform_config(250, 100, 150, 18, 77);
    cfg.mu1[4] = 200.0;  // non-uniform channel list path
    cfg.latent_weight = 0.25;
    const auto dir = std::filesystem::temp_directory_path() / "stripscreen_synth_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "cfg.txt";
    write_file(path, synth::config_to_string(cfg));
    const auto back = synth::load_config(path);
    CHECK(back.n == cfg.n);
    CHECK(back.seed == cfg.seed);
    CHECK(back.positive_prior == cfg.positive_prior);
    CHECK(back.mu0 == cfg.mu0);
    CHECK(back.mu1 == cfg.mu1);
    CHECK(back.sigma == cfg.sigma);
    CHECK(back.latent_weight == cfg.latent_weight);

    write_file(path, "n=10\npositive_prior=0.5\n");
    CHECK_THROWS_AS(synth::load_config(path), DataError);
    write_file(path, "n=10\npositive_prior=2\nseed=1\nmu0=1\nmu1=1\nsigma=1\n");
    CHECK_THROWS_AS(synth::load_config(path), DataError);
}

TEST_CASE("generated datasets pass ingestion validation") {
    const auto cfg = synth::uniform_config(100, 120, 130, 20, 55);
    const auto ds = synth::generate(cfg).dataset;
    const auto dir = std::filesystem::temp_directory_path() / "stripscreen_synth_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "gen.csv";
    data::write_csv(ds, path);
    data::IngestReport report;
    const auto back = data::ingest_csv(path, true, &report);
    CHECK(back.size() == 100);
    CHECK(report.rejected.empty());
}
