#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "stripscreen/dataset.hpp"

namespace stripscreen::color {

// The 11 working color spaces; rgb is the identity space.
enum class ColorSpaceId { rgb, hed, hsv, lab, xyz, ycbcr, ypbpr, yuv, cie, ydbdr, yiq };

inline constexpr int kSpaceCount = 11;

constexpr std::array<ColorSpaceId, kSpaceCount> all_spaces() {
    return {ColorSpaceId::rgb,   ColorSpaceId::hed,  ColorSpaceId::hsv,
            ColorSpaceId::lab,   ColorSpaceId::xyz,  ColorSpaceId::ycbcr,
            ColorSpaceId::ypbpr, ColorSpaceId::yuv,  ColorSpaceId::cie,
            ColorSpaceId::ydbdr, ColorSpaceId::yiq};
}

std::string_view space_name(ColorSpaceId space);
std::optional<ColorSpaceId> space_from_name(std::string_view name);

// Per-component display names, e.g. {"L","a","b"} for lab. For rgb these are
// {"Red","Green","Blue"} in component order.
std::array<std::string_view, 3> channel_names(ColorSpaceId space);

// Forward conversion from rgb in [0,1]^3. Components outside [0,1] by more
// than 1e-9 are rejected; smaller excursions are clamped.
Eigen::Vector3d convert(const Eigen::Vector3d& rgb, ColorSpaceId space);

// Inverse of convert. Exact for the matrix/affine spaces; hsv is exact away
// from grays; lab and hed invert their forward clamping domains.
Eigen::Vector3d convert_inverse(const Eigen::Vector3d& value, ColorSpaceId space);

// 33 features per sample, pad-major in canonical pad order, components in
// space order (c1,c2,c3).
struct FeatureVector {
    Eigen::VectorXd values;
    ColorSpaceId space = ColorSpaceId::rgb;
    bool standardized = false;
};

// Row per sample, 33 columns, same layout as FeatureVector.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    ColorSpaceId space = ColorSpaceId::rgb;
    bool standardized = false;

    Eigen::Index rows() const { return values.rows(); }
    FeatureVector row(Eigen::Index i) const {
        return FeatureVector{values.row(i).transpose(), space, standardized};
    }
};

FeatureVector featurize(const data::StripSample& sample, ColorSpaceId space);
FeatureMatrix featurize(const data::Dataset& ds, ColorSpaceId space);

// Feature column label, e.g. "Blood_R" for rgb or "Blood_c1" style for other
// spaces; index in [0,33).
std::string feature_name(ColorSpaceId space, int feature_index);

// Per-feature mean and population standard deviation, fitted on training data
// only. Near-constant features get stddev 1 and a degenerate flag.
struct StandardizationStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    std::vector<bool> degenerate;
    ColorSpaceId space = ColorSpaceId::rgb;
};

StandardizationStats fit_standardizer(const FeatureMatrix& train);
StandardizationStats fit_standardizer(const std::vector<FeatureVector>& train);

FeatureVector apply_standardizer(const StandardizationStats& stats, const FeatureVector& v);
FeatureMatrix apply_standardizer(const StandardizationStats& stats, const FeatureMatrix& m);

}  // namespace stripscreen::color
