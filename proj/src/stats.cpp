#include "stripscreen/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stripscreen/error.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::stats {

namespace {

double sample_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

// Continued fraction for the incomplete beta (Lentz's method).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kTol) return h;
    }
    return h;  // converged to working precision for all df/t in practice
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("regularized_incomplete_beta: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_sf_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("t_sf_two_tailed: df must be positive");
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                         TTestVariant variant) {
    if (a.size() < 2 || b.size() < 2)
        throw DataError("t_test: each group needs at least 2 values");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_variance(a, ma);
    const double vb = sample_variance(b, mb);
    if (va <= 0.0 || vb <= 0.0) throw DataError("t_test: zero-variance group");

    TTestResult res;
    if (variant == TTestVariant::welch) {
        const double sa = va / na;
        const double sb = vb / nb;
        res.t_statistic = (ma - mb) / std::sqrt(sa + sb);
        res.degrees_of_freedom =
            (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    } else {
        const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        res.t_statistic = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        res.degrees_of_freedom = na + nb - 2.0;
    }
    res.p_value = t_sf_two_tailed(res.t_statistic, res.degrees_of_freedom);
    return res;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least 2 pairs");
    const double mx = sample_mean(x);
    const double my = sample_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DataError("pearson: zero-variance input");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::min(1.0, std::max(-1.0, r));
}

PValueTable group_difference_table(const data::Dataset& ds, color::ColorSpaceId space,
                                   TTestVariant variant) {
    const auto y = data::labels(ds);
    const auto fm = color::featurize(ds, space);

    PValueTable table;
    table.space = space;
    // Report display order for rgb is Blue, Green, Red.
    const bool rgb = space == color::ColorSpaceId::rgb;
    const std::array<int, 3> component_for_col = rgb ? std::array<int, 3>{2, 1, 0}
                                                     : std::array<int, 3>{0, 1, 2};
    if (rgb) {
        table.channel_labels = {"Blue", "Green", "Red"};
    } else {
        const auto names = color::channel_names(space);
        table.channel_labels = {std::string(names[0]), std::string(names[1]),
                                std::string(names[2])};
    }

    for (int pad = 0; pad < data::kPadCount; ++pad) {
        for (int col = 0; col < 3; ++col) {
            const int feature = 3 * pad + component_for_col[col];
            std::vector<double> healthy, sick;
            for (Eigen::Index i = 0; i < fm.values.rows(); ++i) {
                const double v = fm.values(i, feature);
                (y[static_cast<std::size_t>(i)] ? sick : healthy).push_back(v);
            }
            if (healthy.size() < 2 || sick.size() < 2)
                throw DataError("group_difference_table: a label group has fewer than 2 samples");
            table.p(pad, col) = welch_t_test(healthy, sick, variant).p_value;
        }
    }
    return table;
}

std::vector<VariableColumn> feature_columns(const data::Dataset& ds,
                                            color::ColorSpaceId space) {
    const auto fm = color::featurize(ds, space);
    std::vector<VariableColumn> cols;
    cols.reserve(3 * data::kPadCount);
    for (int f = 0; f < 3 * data::kPadCount; ++f) {
        VariableColumn col;
        col.name = color::feature_name(space, f);
        col.values = fm.values.col(f);
        col.valid.assign(ds.size(), 1);
        cols.push_back(std::move(col));
    }
    return cols;
}

namespace {

VariableColumn flag_column(const data::Dataset& ds, const std::string& name,
                           data::TriFlag data::StripSample::* field) {
    VariableColumn col;
    col.name = name;
    col.values.resize(static_cast<Eigen::Index>(ds.size()));
    col.valid.assign(ds.size(), 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const data::TriFlag f = ds.samples[i].*field;
        if (f != data::TriFlag::unknown) {
            col.values[static_cast<Eigen::Index>(i)] = f == data::TriFlag::positive ? 1.0 : 0.0;
            col.valid[i] = 1;
        } else {
            col.values[static_cast<Eigen::Index>(i)] = 0.0;
        }
    }
    return col;
}

}  // namespace

std::vector<VariableColumn> clinical_columns(const data::Dataset& ds) {
    std::vector<VariableColumn> cols;
    VariableColumn gender;
    gender.name = "gender";
    gender.values.resize(static_cast<Eigen::Index>(ds.size()));
    gender.valid.assign(ds.size(), 1);
    VariableColumn age = gender;
    age.name = "age";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        gender.values[static_cast<Eigen::Index>(i)] =
            ds.samples[i].gender == data::Gender::male ? 1.0 : 0.0;
        age.values[static_cast<Eigen::Index>(i)] = ds.samples[i].age;
    }
    cols.push_back(std::move(gender));
    cols.push_back(std::move(age));
    cols.push_back(flag_column(ds, "diabetes", &data::StripSample::diabetes));
    cols.push_back(flag_column(ds, "blood_pressure", &data::StripSample::blood_pressure));
    cols.push_back(flag_column(ds, "smoking", &data::StripSample::smoking));
    return cols;
}

VariableColumn label_column(const data::Dataset& ds) {
    VariableColumn col;
    col.name = "pcr";
    col.values.resize(static_cast<Eigen::Index>(ds.size()));
    col.valid.assign(ds.size(), 1);
    for (std::size_t i = 0; i < ds.size(); ++i)
        col.values[static_cast<Eigen::Index>(i)] = ds.samples[i].pcr_positive ? 1.0 : 0.0;
    return col;
}

CorrelationMatrix correlation_matrix(const std::vector<VariableColumn>& variables) {
    const std::size_t k = variables.size();
    CorrelationMatrix out;
    out.names.reserve(k);
    for (const auto& v : variables) out.names.push_back(v.name);
    out.r.setIdentity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> xi, xj;
            for (std::size_t s = 0; s < variables[i].valid.size(); ++s) {
                if (variables[i].valid[s] && variables[j].valid[s]) {
                    xi.push_back(variables[i].values[static_cast<Eigen::Index>(s)]);
                    xj.push_back(variables[j].values[static_cast<Eigen::Index>(s)]);
                }
            }
            double r;
            try {
                r = pearson(xi, xj);
            } catch (const DataError&) {
                throw DataError("correlation_matrix: zero variance or too few joint samples for '" +
                                variables[i].name + "' vs '" + variables[j].name + "'");
            }
            out.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
            out.r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
        }
    }
    return out;
}

std::string pvalue_table_csv(const PValueTable& table) {
    std::string out = "parameter";
    for (const auto& label : table.channel_labels) out += "," + label;
    out += '\n';
    for (int pad = 0; pad < data::kPadCount; ++pad) {
        out += std::string(data::pad_label(static_cast<data::PadId>(pad)));
        for (int c = 0; c < 3; ++c) out += "," + format_double(table.p(pad, c));
        out += '\n';
    }
    return out;
}

std::string pvalue_table_text(const PValueTable& table) {
    std::string out = "P-value of per-channel group difference tests (";
    out += space_name(table.space);
    out += ")\n";
    char line[128];
    std::snprintf(line, sizeof(line), "%-18s %10s %10s %10s\n", "Channel/Parameter",
                  table.channel_labels[0].c_str(), table.channel_labels[1].c_str(),
                  table.channel_labels[2].c_str());
    out += line;
    for (int pad = 0; pad < data::kPadCount; ++pad) {
        std::snprintf(line, sizeof(line), "%-18s %10.5f %10.5f %10.5f\n",
                      std::string(data::pad_label(static_cast<data::PadId>(pad))).c_str(),
                      table.p(pad, 0), table.p(pad, 1), table.p(pad, 2));
        out += line;
    }
    return out;
}

std::string pvalue_table_points(const PValueTable& table) {
    std::string out = "x,y,value\n";
    for (int pad = 0; pad < data::kPadCount; ++pad)
        for (int c = 0; c < 3; ++c)
            out += table.channel_labels[c] + "," +
                   std::string(data::pad_label(static_cast<data::PadId>(pad))) + "," +
                   format_double(table.p(pad, c)) + '\n';
    return out;
}

std::string correlation_csv(const CorrelationMatrix& m) {
    std::string out = "variable";
    for (const auto& n : m.names) out += "," + n;
    out += '\n';
    for (Eigen::Index i = 0; i < m.r.rows(); ++i) {
        out += m.names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.r.cols(); ++j) out += "," + format_double(m.r(i, j));
        out += '\n';
    }
    return out;
}

std::string correlation_points(const CorrelationMatrix& m) {
    std::string out = "x,y,value\n";
    for (Eigen::Index i = 0; i < m.r.rows(); ++i)
        for (Eigen::Index j = 0; j < m.r.cols(); ++j)
            out += m.names[static_cast<std::size_t>(j)] + "," +
                   m.names[static_cast<std::size_t>(i)] + "," + format_double(m.r(i, j)) + '\n';
    return out;
}

}  // namespace stripscreen::stats
