#include "stripscreen/synth.hpp"

#include <cmath>
#include <map>

#include "stripscreen/error.hpp"
#include "stripscreen/rng.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::synth {

namespace {

constexpr int kChannels = 3 * data::kPadCount;
constexpr std::uint64_t kLabelStream = 0x6c61626c;
constexpr std::uint64_t kShuffleStream = 0x73687566;

void validate(const SynthConfig& cfg) {
    if (cfg.n < 1) throw DataError("synth: n must be >= 1");
    if (!(cfg.positive_prior > 0.0 && cfg.positive_prior < 1.0))
        throw DataError("synth: positive_prior must be in (0,1)");
    if (cfg.mu0.size() != kChannels || cfg.mu1.size() != kChannels ||
        cfg.sigma.size() != kChannels)
        throw DataError("synth: mu0, mu1 and sigma must each have 33 entries");
    for (int j = 0; j < kChannels; ++j) {
        if (cfg.mu0[j] < 0.0 || cfg.mu0[j] > 255.0 || cfg.mu1[j] < 0.0 || cfg.mu1[j] > 255.0)
            throw DataError("synth: channel means must lie in [0,255]");
        if (!(cfg.sigma[j] > 0.0)) throw DataError("synth: sigma must be positive");
    }
    if (cfg.latent_weight < 0.0 || cfg.latent_weight >= 1.0)
        throw DataError("synth: latent_weight must be in [0,1)");
}

Eigen::VectorXd parse_channel_values(const std::string& raw, const std::string& key) {
    const auto parts = split(raw, ',');
    Eigen::VectorXd v(kChannels);
    if (parts.size() == 1) {
        v.setConstant(std::stod(parts[0]));
    } else if (parts.size() == kChannels) {
        for (int j = 0; j < kChannels; ++j) v[j] = std::stod(parts[static_cast<std::size_t>(j)]);
    } else {
        throw DataError("synth config: " + key + " needs 1 or 33 values, got " +
                        std::to_string(parts.size()));
    }
    return v;
}

}  // namespace

SynthConfig uniform_config(int n, double mu0, double mu1, double sigma, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n = n;
    cfg.mu0 = Eigen::VectorXd::Constant(kChannels, mu0);
    cfg.mu1 = Eigen::VectorXd::Constant(kChannels, mu1);
    cfg.sigma = Eigen::VectorXd::Constant(kChannels, sigma);
    cfg.seed = seed;
    return cfg;
}

SynthConfig load_config(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::map<std::string, std::string> kv;
    for (const auto& raw_line : split(content, '\n')) {
        const std::string_view line = trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw DataError(path.string() + ": expected key=value, got '" + std::string(line) +
                            "'");
        kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }

    SynthConfig cfg;
    const auto required = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(path.string() + ": missing key '" + key + "'");
        return it->second;
    };
    try {
        cfg.n = std::stoi(required("n"));
        cfg.positive_prior = std::stod(required("positive_prior"));
        cfg.seed = std::stoull(required("seed"));
        cfg.mu0 = parse_channel_values(required("mu0"), "mu0");
        cfg.mu1 = parse_channel_values(required("mu1"), "mu1");
        cfg.sigma = parse_channel_values(required("sigma"), "sigma");
        if (const auto it = kv.find("latent_weight"); it != kv.end())
            cfg.latent_weight = std::stod(it->second);
    } catch (const std::invalid_argument&) {
        throw DataError(path.string() + ": unparsable numeric value");
    } catch (const std::out_of_range&) {
        throw DataError(path.string() + ": numeric value out of range");
    }
    validate(cfg);
    return cfg;
}

std::string config_to_string(const SynthConfig& cfg) {
    const auto channels = [](const Eigen::VectorXd& v) {
        const bool uniform = (v.array() == v[0]).all();
        if (uniform) return format_double(v[0]);
        std::string s;
        for (int j = 0; j < kChannels; ++j) {
            if (j) s += ',';
            s += format_double(v[j]);
        }
        return s;
    };
    std::string out;
    out += "n=" + std::to_string(cfg.n) + "\n";
    out += "positive_prior=" + format_double(cfg.positive_prior) + "\n";
    out += "seed=" + std::to_string(cfg.seed) + "\n";
    out += "mu0=" + channels(cfg.mu0) + "\n";
    out += "mu1=" + channels(cfg.mu1) + "\n";
    out += "sigma=" + channels(cfg.sigma) + "\n";
    if (cfg.latent_weight != 0.0)
        out += "latent_weight=" + format_double(cfg.latent_weight) + "\n";
    return out;
}

SynthResult generate(const SynthConfig& cfg) {
    validate(cfg);
    SynthResult result;
    result.dataset.source = "synthetic";
    result.dataset.samples.reserve(static_cast<std::size_t>(cfg.n));
    result.total_channels = static_cast<std::int64_t>(cfg.n) * kChannels;

    const double latent = cfg.latent_weight;
    const double residual = std::sqrt(1.0 - latent * latent);

    for (int i = 0; i < cfg.n; ++i) {
        rng::SplitMix64 gen = rng::substream(cfg.seed, static_cast<std::uint64_t>(i));
        data::StripSample s;
        s.id = "synth-" + std::to_string(i);
        s.pcr_positive = gen.uniform() < cfg.positive_prior;
        const Eigen::VectorXd& mu = s.pcr_positive ? cfg.mu1 : cfg.mu0;

        const double z_shared = latent > 0.0 ? gen.normal() : 0.0;
        for (int j = 0; j < kChannels; ++j) {
            const double noise = residual * gen.normal() + latent * z_shared;
            const double value = mu[j] + cfg.sigma[j] * noise;
            double byte = std::floor(value + 0.5);
            if (byte < 0.0 || byte > 255.0) {
                ++result.clamped_channels;
                byte = std::min(255.0, std::max(0.0, byte));
            }
            const int pad = j / 3;
            const int chan = j % 3;
            auto& rgb = s.pads[static_cast<std::size_t>(pad)];
            const auto v = static_cast<std::uint8_t>(byte);
            if (chan == 0) rgb.r = v;
            else if (chan == 1) rgb.g = v;
            else rgb.b = v;
        }

        // Demographics from simple categorical draws; they carry no class
        // signal.
        s.center = static_cast<data::Center>(gen.below(4));
        s.gender = gen.uniform() < 0.57 ? data::Gender::male : data::Gender::female;
        s.age = 18 + static_cast<int>(gen.below(63));
        const auto draw_flag = [&]() {
            const double u = gen.uniform();
            if (u < 0.05) return data::TriFlag::positive;
            if (u < 0.95) return data::TriFlag::negative;
            return data::TriFlag::unknown;
        };
        s.diabetes = draw_flag();
        s.blood_pressure = draw_flag();
        s.smoking = draw_flag();

        result.dataset.samples.push_back(std::move(s));
    }
    return result;
}

double bayes_accuracy(const SynthConfig& cfg) {
    validate(cfg);
    if (cfg.positive_prior != 0.5)
        throw DataError("bayes_accuracy: closed form requires equal priors");
    if (cfg.latent_weight != 0.0)
        throw DataError("bayes_accuracy: closed form requires independent channels");
    const double d_squared =
        ((cfg.mu1 - cfg.mu0).array() / cfg.sigma.array()).square().sum();
    const double d = std::sqrt(d_squared);
    // Phi(d/2) via the complementary error function.
    return 0.5 * std::erfc(-(d / 2.0) / std::sqrt(2.0));
}

data::Dataset shuffle_labels(const data::Dataset& ds, std::uint64_t seed) {
    if (ds.empty()) throw DataError("shuffle_labels: empty dataset");
    std::vector<char> perm_labels;
    perm_labels.reserve(ds.size());
    for (const auto& s : ds.samples) perm_labels.push_back(s.pcr_positive ? 1 : 0);
    rng::SplitMix64 gen = rng::substream(seed, kShuffleStream);
    rng::shuffle(perm_labels, gen);

    data::Dataset out = ds;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i].pcr_positive = perm_labels[i] != 0;
    return out;
}

}  // namespace stripscreen::synth
