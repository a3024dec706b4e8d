#include "stripscreen/colorspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stripscreen/error.hpp"

namespace stripscreen::color {

namespace {

constexpr std::array<std::string_view, kSpaceCount> kNames = {
    "rgb", "hed", "hsv", "lab", "xyz", "ycbcr", "ypbpr", "yuv", "cie", "ydbdr", "yiq"};

// sRGB -> XYZ (D65). The implied white point M*(1,1,1) doubles as the CIELAB
// reference white so that pure white maps to L=100, a=b=0 exactly.
const Eigen::Matrix3d kXyzFromLinearRgb = [] {
    Eigen::Matrix3d m;
    m << 0.412453, 0.357580, 0.180423,
         0.212671, 0.715160, 0.072169,
         0.019334, 0.119193, 0.950227;
    return m;
}();

const Eigen::Vector3d kLabWhite = kXyzFromLinearRgb * Eigen::Vector3d::Ones();

// XYZ -> CIE-1931 RGB.
const Eigen::Matrix3d kCieFromXyz = [] {
    Eigen::Matrix3d m;
    m <<  2.3706743, -0.9000405, -0.4706338,
         -0.5138850,  1.4253036,  0.0885814,
          0.0052982, -0.0146949,  1.0093968;
    return m;
}();

// Haematoxylin / Eosin / DAB stain vectors (rows).
const Eigen::Matrix3d kRgbFromHed = [] {
    Eigen::Matrix3d m;
    m << 0.65, 0.70, 0.29,
         0.07, 0.99, 0.11,
         0.27, 0.57, 0.78;
    return m;
}();

// Stain separation works on row vectors: hed = od * S^-1, i.e. (S^-1)^T * od
// in column form.
const Eigen::Matrix3d kHedFromOd = kRgbFromHed.inverse().transpose();
const Eigen::Matrix3d kOdFromHed = kRgbFromHed.transpose();

constexpr double kHedClamp = 1e-6;

// BT.601 luma on gamma-encoded components, shared by the Y* family.
const Eigen::RowVector3d kLuma{0.299, 0.587, 0.114};

const Eigen::Matrix3d kYpbprFromRgb = [] {
    Eigen::Matrix3d m;
    m << 0.299,      0.587,     0.114,
        -0.168736,  -0.331264,  0.5,
         0.5,       -0.418688, -0.081312;
    return m;
}();

const Eigen::Matrix3d kYuvFromRgb = [] {
    Eigen::Matrix3d m;
    m.row(0) = kLuma;
    m.row(1) = 0.492 * (Eigen::RowVector3d(0, 0, 1) - kLuma);
    m.row(2) = 0.877 * (Eigen::RowVector3d(1, 0, 0) - kLuma);
    return m;
}();

const Eigen::Matrix3d kYdbdrFromRgb = [] {
    Eigen::Matrix3d m;
    m << 0.299,  0.587, 0.114,
        -0.450, -0.883, 1.333,
        -1.333,  1.116, 0.217;
    return m;
}();

const Eigen::Matrix3d kYiqFromRgb = [] {
    Eigen::Matrix3d m;
    m << 0.299,     0.587,     0.114,
         0.595716, -0.274453, -0.321263,
         0.211456, -0.522591,  0.311135;
    return m;
}();

// BT.601 digital (studio range): scale matrix plus (16,128,128) offset.
const Eigen::Matrix3d kYcbcrScale = [] {
    Eigen::Matrix3d m;
    m <<  65.481, 128.553,  24.966,
         -37.797, -74.203, 112.0,
         112.0,   -93.786, -18.214;
    return m;
}();
const Eigen::Vector3d kYcbcrOffset{16.0, 128.0, 128.0};

const Eigen::Matrix3d kRgbFromYpbpr = kYpbprFromRgb.inverse();
const Eigen::Matrix3d kRgbFromYuv = kYuvFromRgb.inverse();
const Eigen::Matrix3d kRgbFromYdbdr = kYdbdrFromRgb.inverse();
const Eigen::Matrix3d kRgbFromYiq = kYiqFromRgb.inverse();
const Eigen::Matrix3d kRgbFromYcbcrScale = kYcbcrScale.inverse();
const Eigen::Matrix3d kLinearRgbFromXyz = kXyzFromLinearRgb.inverse();
const Eigen::Matrix3d kXyzFromCie = kCieFromXyz.inverse();

double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_delinearize(double c) {
    return c <= 0.04045 / 12.92 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

Eigen::Vector3d linearize(const Eigen::Vector3d& rgb) {
    return {srgb_linearize(rgb.x()), srgb_linearize(rgb.y()), srgb_linearize(rgb.z())};
}

Eigen::Vector3d delinearize(const Eigen::Vector3d& rgb) {
    return {srgb_delinearize(rgb.x()), srgb_delinearize(rgb.y()), srgb_delinearize(rgb.z())};
}

constexpr double kLabDelta = 6.0 / 29.0;

double lab_f(double t) {
    return t > kLabDelta * kLabDelta * kLabDelta
               ? std::cbrt(t)
               : t / (3.0 * kLabDelta * kLabDelta) + 4.0 / 29.0;
}

double lab_f_inverse(double f) {
    return f > kLabDelta ? f * f * f : 3.0 * kLabDelta * kLabDelta * (f - 4.0 / 29.0);
}

Eigen::Vector3d to_xyz(const Eigen::Vector3d& rgb) { return kXyzFromLinearRgb * linearize(rgb); }

Eigen::Vector3d to_lab(const Eigen::Vector3d& rgb) {
    const Eigen::Vector3d xyz = to_xyz(rgb);
    const double fx = lab_f(xyz.x() / kLabWhite.x());
    const double fy = lab_f(xyz.y() / kLabWhite.y());
    const double fz = lab_f(xyz.z() / kLabWhite.z());
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Eigen::Vector3d lab_to_rgb(const Eigen::Vector3d& lab) {
    const double fy = (lab.x() + 16.0) / 116.0;
    const double fx = fy + lab.y() / 500.0;
    const double fz = fy - lab.z() / 200.0;
    const Eigen::Vector3d xyz{kLabWhite.x() * lab_f_inverse(fx),
                              kLabWhite.y() * lab_f_inverse(fy),
                              kLabWhite.z() * lab_f_inverse(fz)};
    return delinearize(kLinearRgbFromXyz * xyz);
}

Eigen::Vector3d to_hsv(const Eigen::Vector3d& rgb) {
    const double mx = rgb.maxCoeff();
    const double mn = rgb.minCoeff();
    const double chroma = mx - mn;
    const double v = mx;
    const double s = mx == 0.0 ? 0.0 : chroma / mx;
    double h = 0.0;
    if (chroma > 0.0) {
        if (mx == rgb.x()) {
            h = std::fmod((rgb.y() - rgb.z()) / chroma, 6.0);
            if (h < 0.0) h += 6.0;
        } else if (mx == rgb.y()) {
            h = (rgb.z() - rgb.x()) / chroma + 2.0;
        } else {
            h = (rgb.x() - rgb.y()) / chroma + 4.0;
        }
        h /= 6.0;
        if (h >= 1.0) h -= 1.0;
    }
    return {h, s, v};
}

Eigen::Vector3d hsv_to_rgb(const Eigen::Vector3d& hsv) {
    const double h = hsv.x() * 6.0;
    const double s = hsv.y();
    const double v = hsv.z();
    const int sector = static_cast<int>(std::floor(h)) % 6;
    const double f = h - std::floor(h);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector < 0 ? sector + 6 : sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

Eigen::Vector3d to_hed(const Eigen::Vector3d& rgb) {
    const Eigen::Vector3d clamped = rgb.cwiseMax(kHedClamp).cwiseMin(1.0);
    // Optical density normalized so that the clamp floor maps to od = 1.
    const Eigen::Vector3d od = clamped.array().log10() / std::log10(kHedClamp);
    return kHedFromOd * od;
}

Eigen::Vector3d hed_to_rgb(const Eigen::Vector3d& hed) {
    const Eigen::Vector3d od = kOdFromHed * hed;
    Eigen::Vector3d rgb;
    for (int i = 0; i < 3; ++i) rgb[i] = std::pow(10.0, od[i] * std::log10(kHedClamp));
    return rgb;
}

Eigen::Vector3d check_rgb_domain(Eigen::Vector3d rgb) {
    constexpr double kTol = 1e-9;
    for (int i = 0; i < 3; ++i) {
        if (rgb[i] < -kTol || rgb[i] > 1.0 + kTol)
            throw std::invalid_argument("convert: rgb component " + std::to_string(rgb[i]) +
                                        " outside [0,1]");
        rgb[i] = std::min(1.0, std::max(0.0, rgb[i]));
    }
    return rgb;
}

}  // namespace

std::string_view space_name(ColorSpaceId space) {
    return kNames[static_cast<int>(space)];
}

std::optional<ColorSpaceId> space_from_name(std::string_view name) {
    for (int i = 0; i < kSpaceCount; ++i)
        if (kNames[i] == name) return static_cast<ColorSpaceId>(i);
    return std::nullopt;
}

std::array<std::string_view, 3> channel_names(ColorSpaceId space) {
    switch (space) {
        case ColorSpaceId::rgb:   return {"R", "G", "B"};
        case ColorSpaceId::hed:   return {"H", "E", "D"};
        case ColorSpaceId::hsv:   return {"H", "S", "V"};
        case ColorSpaceId::lab:   return {"L", "a", "b"};
        case ColorSpaceId::xyz:   return {"X", "Y", "Z"};
        case ColorSpaceId::ycbcr: return {"Y", "Cb", "Cr"};
        case ColorSpaceId::ypbpr: return {"Y", "Pb", "Pr"};
        case ColorSpaceId::yuv:   return {"Y", "U", "V"};
        case ColorSpaceId::cie:   return {"R", "G", "B"};
        case ColorSpaceId::ydbdr: return {"Y", "Db", "Dr"};
        case ColorSpaceId::yiq:   return {"Y", "I", "Q"};
    }
    return {"c1", "c2", "c3"};
}

Eigen::Vector3d convert(const Eigen::Vector3d& rgb_in, ColorSpaceId space) {
    const Eigen::Vector3d rgb = check_rgb_domain(rgb_in);
    switch (space) {
        case ColorSpaceId::rgb:   return rgb;
        case ColorSpaceId::hed:   return to_hed(rgb);
        case ColorSpaceId::hsv:   return to_hsv(rgb);
        case ColorSpaceId::lab:   return to_lab(rgb);
        case ColorSpaceId::xyz:   return to_xyz(rgb);
        case ColorSpaceId::ycbcr: return kYcbcrScale * rgb + kYcbcrOffset;
        case ColorSpaceId::ypbpr: return kYpbprFromRgb * rgb;
        case ColorSpaceId::yuv:   return kYuvFromRgb * rgb;
        case ColorSpaceId::cie:   return kCieFromXyz * to_xyz(rgb);
        case ColorSpaceId::ydbdr: return kYdbdrFromRgb * rgb;
        case ColorSpaceId::yiq:   return kYiqFromRgb * rgb;
    }
    throw std::invalid_argument("convert: unknown color space");
}

Eigen::Vector3d convert_inverse(const Eigen::Vector3d& value, ColorSpaceId space) {
    switch (space) {
        case ColorSpaceId::rgb:   return value;
        case ColorSpaceId::hed:   return hed_to_rgb(value);
        case ColorSpaceId::hsv:   return hsv_to_rgb(value);
        case ColorSpaceId::lab:   return lab_to_rgb(value);
        case ColorSpaceId::xyz:   return delinearize(kLinearRgbFromXyz * value);
        case ColorSpaceId::ycbcr: return kRgbFromYcbcrScale * (value - kYcbcrOffset);
        case ColorSpaceId::ypbpr: return kRgbFromYpbpr * value;
        case ColorSpaceId::yuv:   return kRgbFromYuv * value;
        case ColorSpaceId::cie:   return delinearize(kLinearRgbFromXyz * (kXyzFromCie * value));
        case ColorSpaceId::ydbdr: return kRgbFromYdbdr * value;
        case ColorSpaceId::yiq:   return kRgbFromYiq * value;
    }
    throw std::invalid_argument("convert_inverse: unknown color space");
}

FeatureVector featurize(const data::StripSample& sample, ColorSpaceId space) {
    FeatureVector fv;
    fv.space = space;
    fv.values.resize(3 * data::kPadCount);
    for (int p = 0; p < data::kPadCount; ++p) {
        const auto& pad = sample.pads[p];
        const Eigen::Vector3d rgb{pad.r / 255.0, pad.g / 255.0, pad.b / 255.0};
        fv.values.segment<3>(3 * p) = convert(rgb, space);
    }
    return fv;
}

FeatureMatrix featurize(const data::Dataset& ds, ColorSpaceId space) {
    FeatureMatrix fm;
    fm.space = space;
    fm.values.resize(static_cast<Eigen::Index>(ds.size()), 3 * data::kPadCount);
    for (Eigen::Index i = 0; i < fm.values.rows(); ++i)
        fm.values.row(i) = featurize(ds.samples[static_cast<std::size_t>(i)], space).values;
    return fm;
}

std::string feature_name(ColorSpaceId space, int feature_index) {
    const int pad = feature_index / 3;
    const int chan = feature_index % 3;
    return std::string(data::pad_token(static_cast<data::PadId>(pad))) + "_" +
           std::string(channel_names(space)[chan]);
}

StandardizationStats fit_standardizer(const FeatureMatrix& train) {
    const Eigen::Index n = train.values.rows();
    if (n < 2) throw DataError("fit_standardizer: need at least 2 vectors");
    StandardizationStats stats;
    stats.space = train.space;
    stats.mean = train.values.colwise().mean();
    const Eigen::MatrixXd centered = train.values.rowwise() - stats.mean.transpose();
    stats.stddev =
        (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt();
    stats.degenerate.assign(static_cast<std::size_t>(stats.stddev.size()), false);
    for (Eigen::Index j = 0; j < stats.stddev.size(); ++j) {
        if (stats.stddev[j] < 1e-12) {
            stats.stddev[j] = 1.0;
            stats.degenerate[static_cast<std::size_t>(j)] = true;
        }
    }
    return stats;
}

StandardizationStats fit_standardizer(const std::vector<FeatureVector>& train) {
    if (train.size() < 2) throw DataError("fit_standardizer: need at least 2 vectors");
    FeatureMatrix fm;
    fm.space = train.front().space;
    fm.values.resize(static_cast<Eigen::Index>(train.size()), train.front().values.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].space != fm.space)
            throw DataError("fit_standardizer: mixed color spaces");
        fm.values.row(static_cast<Eigen::Index>(i)) = train[i].values;
    }
    return fit_standardizer(fm);
}

FeatureVector apply_standardizer(const StandardizationStats& stats, const FeatureVector& v) {
    if (v.space != stats.space)
        throw DataError("apply_standardizer: color space mismatch");
    FeatureVector out;
    out.space = v.space;
    out.standardized = true;
    out.values = (v.values - stats.mean).cwiseQuotient(stats.stddev);
    return out;
}

FeatureMatrix apply_standardizer(const StandardizationStats& stats, const FeatureMatrix& m) {
    if (m.space != stats.space)
        throw DataError("apply_standardizer: color space mismatch");
    FeatureMatrix out;
    out.space = m.space;
    out.standardized = true;
    out.values = (m.values.rowwise() - stats.mean.transpose()).array().rowwise() /
                 stats.stddev.transpose().array();
    return out;
}

}  // namespace stripscreen::color
