#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "stripscreen/colorspace.hpp"
#include "stripscreen/error.hpp"
#include "stripscreen/rng.hpp"

using namespace stripscreen;
using color::ColorSpaceId;
using Eigen::Vector3d;

namespace {

void check_close(const Vector3d& got, const Vector3d& want, double tol) {
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(got[i] - want[i]) <= tol);
}

}  // namespace

TEST_CASE("rgb is the identity space") {
    const Vector3d x{0.21, 0.61, 0.97};
    CHECK(color::convert(x, ColorSpaceId::rgb) == x);
}

TEST_CASE("white and black map to the textbook anchors") {
    const Vector3d white{1, 1, 1};
    const Vector3d black{0, 0, 0};
    check_close(color::convert(white, ColorSpaceId::lab), {100, 0, 0}, 1e-3);
    check_close(color::convert(white, ColorSpaceId::xyz), {0.9505, 1.0000, 1.0888}, 1e-3);
    check_close(color::convert(black, ColorSpaceId::ycbcr), {16, 128, 128}, 1e-3);
    check_close(color::convert(white, ColorSpaceId::hed), {0, 0, 0}, 1e-6);
    check_close(color::convert(Vector3d{1, 0, 0}, ColorSpaceId::hsv), {0, 1, 1}, 0.0);
}

TEST_CASE("grays carry zero chroma in the opponent spaces") {
    for (double g : {0.0, 0.125, 0.5, 0.73, 1.0}) {
        const Vector3d gray{g, g, g};
        const Vector3d yiq = color::convert(gray, ColorSpaceId::yiq);
        check_close(yiq, {g, 0, 0}, 1e-9);
        const Vector3d ycbcr = color::convert(gray, ColorSpaceId::ycbcr);
        CHECK(std::fabs(ycbcr[1] - 128.0) <= 1e-9);
        CHECK(std::fabs(ycbcr[2] - 128.0) <= 1e-9);
        for (auto space : {ColorSpaceId::ypbpr, ColorSpaceId::yuv, ColorSpaceId::ydbdr}) {
            const Vector3d v = color::convert(gray, space);
            CHECK(std::fabs(v[1]) <= 1e-9);
            CHECK(std::fabs(v[2]) <= 1e-9);
        }
    }
}

// Reference values computed independently with NumPy from the adopted
// standard formulas before this module was written.
TEST_CASE("golden probes across all ten derived spaces") {
    const Vector3d p{0.2, 0.5, 0.8};
    check_close(color::convert(p, ColorSpaceId::xyz),
                {0.199135331258, 0.203691701057, 0.599925293933}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::lab),
                {52.252060579046, 2.777480800294, -46.289528859307}, 1e-6);
    check_close(color::convert(p, ColorSpaceId::hsv), {0.583333333333, 0.75, 0.8}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::ycbcr), {113.3455, 172.9391, 88.9358}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::ypbpr), {0.4445, 0.2006208, -0.1743936},
                1e-9);
    check_close(color::convert(p, ColorSpaceId::yuv), {0.4445, 0.174906, -0.2144265}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::ydbdr), {0.4445, 0.5349, 0.465}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::yiq), {0.4445, -0.2750937, 0.0299037}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::cie),
                {0.006409110772, 0.241132077534, 0.603624501569}, 1e-9);
    check_close(color::convert(p, ColorSpaceId::hed),
                {0.205747074602, -0.068217706978, -0.046167993631}, 1e-9);

    const Vector3d q{0.9, 0.1, 0.3};
    check_close(color::convert(q, ColorSpaceId::xyz),
                {0.341568515104, 0.179913265143, 0.086012113179}, 1e-9);
    check_close(color::convert(q, ColorSpaceId::lab),
                {49.485585928223, 73.217357402518, 27.089192114595}, 1e-6);
    check_close(color::convert(q, ColorSpaceId::hsv),
                {0.958333333333, 0.888888888889, 0.9}, 1e-9);
    check_close(color::convert(q, ColorSpaceId::ycbcr), {95.278, 120.1624, 213.9572}, 1e-9);
    check_close(color::convert(q, ColorSpaceId::hed),
                {-0.049116808640, 0.139570526071, 0.110304582288}, 1e-9);
    check_close(color::convert(q, ColorSpaceId::cie),
                {0.607338267658, 0.088523161514, 0.085986242671}, 1e-9);
}

TEST_CASE("linear-space round trips reconstruct rgb within 1e-6 on a 9x9x9 grid") {
    const auto spaces = {ColorSpaceId::xyz,   ColorSpaceId::ypbpr, ColorSpaceId::yuv,
                         ColorSpaceId::ydbdr, ColorSpaceId::yiq,   ColorSpaceId::cie};
    for (int r = 0; r < 9; ++r)
        for (int g = 0; g < 9; ++g)
            for (int b = 0; b < 9; ++b) {
                const Vector3d rgb{r / 8.0, g / 8.0, b / 8.0};
                for (auto space : spaces) {
                    const Vector3d back =
                        color::convert_inverse(color::convert(rgb, space), space);
                    check_close(back, rgb, 1e-6);
                }
            }
}

TEST_CASE("lab round trip within 1e-4 on a 9x9x9 grid") {
    for (int r = 0; r < 9; ++r)
        for (int g = 0; g < 9; ++g)
            for (int b = 0; b < 9; ++b) {
                const Vector3d rgb{r / 8.0, g / 8.0, b / 8.0};
                const Vector3d back =
                    color::convert_inverse(color::convert(rgb, ColorSpaceId::lab),
                                           ColorSpaceId::lab);
                check_close(back, rgb, 1e-4);
            }
}

TEST_CASE("hsv round trip is exact away from grays; grays have zero saturation") {
    rng::SplitMix64 gen(123);
    int tested = 0;
    while (tested < 500) {
        const Vector3d rgb{gen.uniform(), gen.uniform(), gen.uniform()};
        const double spread = rgb.maxCoeff() - rgb.minCoeff();
        const Vector3d hsv = color::convert(rgb, ColorSpaceId::hsv);
        if (spread > 1e-6) {
            check_close(color::convert_inverse(hsv, ColorSpaceId::hsv), rgb, 1e-9);
            ++tested;
        } else {
            CHECK(hsv[1] == 0.0);
        }
    }
    const Vector3d gray{0.4, 0.4, 0.4};
    CHECK(color::convert(gray, ColorSpaceId::hsv)[1] == 0.0);
}

TEST_CASE("hed round trips within its clamping domain") {
    rng::SplitMix64 gen(321);
    for (int i = 0; i < 200; ++i) {
        const Vector3d rgb{0.01 + 0.99 * gen.uniform(), 0.01 + 0.99 * gen.uniform(),
                           0.01 + 0.99 * gen.uniform()};
        const Vector3d back =
            color::convert_inverse(color::convert(rgb, ColorSpaceId::hed), ColorSpaceId::hed);
        check_close(back, rgb, 1e-9);
    }
}

TEST_CASE("small input perturbations stay small in every matrix-based space") {
    // ycbcr is compared on its natural [16,240] range, scaled back to unit.
    rng::SplitMix64 gen(55);
    const auto spaces = {ColorSpaceId::xyz,   ColorSpaceId::ycbcr, ColorSpaceId::ypbpr,
                         ColorSpaceId::yuv,   ColorSpaceId::ydbdr, ColorSpaceId::yiq,
                         ColorSpaceId::cie};
    for (int i = 0; i < 100; ++i) {
        const Vector3d rgb{0.1 + 0.8 * gen.uniform(), 0.1 + 0.8 * gen.uniform(),
                           0.1 + 0.8 * gen.uniform()};
        for (int channel = 0; channel < 3; ++channel) {
            Vector3d bumped = rgb;
            bumped[channel] += 1e-6;
            for (auto space : spaces) {
                Vector3d delta =
                    color::convert(bumped, space) - color::convert(rgb, space);
                if (space == ColorSpaceId::ycbcr) delta /= 255.0;
                for (int c = 0; c < 3; ++c) CHECK(std::fabs(delta[c]) <= 1e-4);
            }
        }
    }
}

TEST_CASE("domain violations are rejected after a 1e-9 clamp") {
    CHECK_THROWS_AS(color::convert(Vector3d{1.1, 0, 0}, ColorSpaceId::xyz),
                    std::invalid_argument);
    CHECK_THROWS_AS(color::convert(Vector3d{-0.01, 0, 0}, ColorSpaceId::rgb),
                    std::invalid_argument);
    // Within tolerance: clamps quietly.
    const Vector3d nudged = color::convert(Vector3d{1.0 + 5e-10, 0.5, 0.5}, ColorSpaceId::rgb);
    CHECK(nudged[0] == 1.0);
}

TEST_CASE("featurize lays out 33 values pad-major") {
    data::StripSample s;
    s.id = "x";
    for (auto& pad : s.pads) pad = data::Rgb24{255, 255, 255};
    s.pads[1] = data::Rgb24{0, 0, 0};  // Urobilinogen

    const auto fv = color::featurize(s, ColorSpaceId::rgb);
    REQUIRE(fv.values.size() == 33);
    CHECK(fv.values[0] == 1.0);
    CHECK(fv.values[3] == 0.0);  // second pad, first channel
    CHECK(fv.values[4] == 0.0);
    CHECK(fv.values[32] == 1.0);
    CHECK_FALSE(fv.standardized);

    const auto lab = color::featurize(s, ColorSpaceId::lab);
    for (int p = 0; p < data::kPadCount; ++p) {
        if (p == 1) continue;
        CHECK(std::fabs(lab.values[3 * p] - 100.0) <= 1e-3);
        CHECK(std::fabs(lab.values[3 * p + 1]) <= 1e-3);
        CHECK(std::fabs(lab.values[3 * p + 2]) <= 1e-3);
    }

    // Determinism.
    const auto again = color::featurize(s, ColorSpaceId::lab);
    CHECK(lab.values == again.values);
}

TEST_CASE("standardizer: moments, degenerate features, space checks") {
    color::FeatureMatrix fm;
    fm.space = ColorSpaceId::rgb;
    fm.values.resize(2, 33);
    fm.values.row(0).setZero();
    fm.values.row(1).setConstant(2.0);
    const auto stats = color::fit_standardizer(fm);
    for (int j = 0; j < 33; ++j) {
        CHECK(stats.mean[j] == 1.0);
        CHECK(stats.stddev[j] == 1.0);  // population stddev of {0,2}
        CHECK_FALSE(stats.degenerate[static_cast<std::size_t>(j)]);
    }

    // Constant column gets stddev 1 and a flag.
    fm.values.col(5).setConstant(3.0);
    const auto stats2 = color::fit_standardizer(fm);
    CHECK(stats2.degenerate[5]);
    CHECK(stats2.stddev[5] == 1.0);

    // Vector at the fitted mean standardizes to zero.
    color::FeatureVector v;
    v.space = ColorSpaceId::rgb;
    v.values = stats.mean;
    const auto z = color::apply_standardizer(stats, v);
    CHECK(z.standardized);
    CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);

    // After standardizing the training set: mean 0, stddev 1.
    const auto zs = color::apply_standardizer(stats2, fm);
    CHECK(zs.values.colwise().mean().cwiseAbs().maxCoeff() <= 1e-9);
    for (int j = 0; j < 33; ++j) {
        const double var = zs.values.col(j).squaredNorm() / 2.0;
        if (!stats2.degenerate[static_cast<std::size_t>(j)])
            CHECK(std::fabs(var - 1.0) <= 1e-9);
    }

    // Mixed spaces rejected.
    std::vector<color::FeatureVector> mixed(2);
    mixed[0].space = ColorSpaceId::rgb;
    mixed[0].values = Eigen::VectorXd::Zero(33);
    mixed[1].space = ColorSpaceId::hsv;
    mixed[1].values = Eigen::VectorXd::Ones(33);
    CHECK_THROWS_AS(color::fit_standardizer(mixed), DataError);

    // Too few vectors rejected.
    color::FeatureMatrix tiny;
    tiny.space = ColorSpaceId::rgb;
    tiny.values.resize(1, 33);
    CHECK_THROWS_AS(color::fit_standardizer(tiny), DataError);

    // Space mismatch on apply rejected.
    color::FeatureVector wrong;
    wrong.space = ColorSpaceId::hsv;
    wrong.values = Eigen::VectorXd::Zero(33);
    CHECK_THROWS_AS(color::apply_standardizer(stats, wrong), DataError);
}

TEST_CASE("space names round trip") {
    for (auto space : color::all_spaces()) {
        const auto name = color::space_name(space);
        REQUIRE(color::space_from_name(name).has_value());
        CHECK(*color::space_from_name(name) == space);
    }
    CHECK_FALSE(color::space_from_name("cmyk").has_value());
}
