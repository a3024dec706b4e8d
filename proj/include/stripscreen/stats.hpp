#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stripscreen/colorspace.hpp"
#include "stripscreen/dataset.hpp"

namespace stripscreen::stats {

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;  // two-tailed
};

enum class TTestVariant { welch, pooled };

// Regularized incomplete beta I_x(a,b) by Lentz continued fraction,
// absolute tolerance 1e-10.
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed Student-t survival probability, p = I_{df/(df+t^2)}(df/2, 1/2).
double t_sf_two_tailed(double t, double df);

// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom; the
// pooled variant is available for comparison.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                         TTestVariant variant = TTestVariant::welch);

// Sample Pearson correlation coefficient.
double pearson(std::span<const double> x, std::span<const double> y);

// 11x3 grid of two-tailed p-values comparing healthy vs sick per (pad,
// channel). Channel display order for rgb follows the report convention
// Blue, Green, Red; other spaces use component order.
struct PValueTable {
    color::ColorSpaceId space = color::ColorSpaceId::rgb;
    std::array<std::string, 3> channel_labels;
    Eigen::Matrix<double, data::kPadCount, 3> p;  // row = pad, col = display channel
};

PValueTable group_difference_table(const data::Dataset& ds, color::ColorSpaceId space,
                                   TTestVariant variant = TTestVariant::welch);

// One analysis variable: values in sample order plus a validity mask
// (pairwise deletion for unknown clinical flags).
struct VariableColumn {
    std::string name;
    Eigen::VectorXd values;
    std::vector<char> valid;
};

std::vector<VariableColumn> feature_columns(const data::Dataset& ds,
                                            color::ColorSpaceId space);
// gender (M=1,F=0), age, diabetes, blood_pressure, smoking (1/0, unknown
// masked out).
std::vector<VariableColumn> clinical_columns(const data::Dataset& ds);
VariableColumn label_column(const data::Dataset& ds);

struct CorrelationMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd r;
};

// Symmetric Pearson matrix with pairwise deletion. Throws DataError naming
// any variable with zero variance on a pairwise-valid subset.
CorrelationMatrix correlation_matrix(const std::vector<VariableColumn>& variables);

// Writers: CSV with row/column headers, plus (x,y,value) triples for heatmap
// renderers, plus a 5-decimal display table for the p-values.
std::string pvalue_table_csv(const PValueTable& table);
std::string pvalue_table_text(const PValueTable& table);
std::string pvalue_table_points(const PValueTable& table);
std::string correlation_csv(const CorrelationMatrix& m);
std::string correlation_points(const CorrelationMatrix& m);

}  // namespace stripscreen::stats
