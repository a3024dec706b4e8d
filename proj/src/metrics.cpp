#include "stripscreen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stripscreen/error.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::metrics {

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw DataError("confusion: predictions/labels length mismatch");
    if (predictions.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred = predictions[i] != 0;
        const bool truth = labels[i] != 0;
        if (pred && truth) ++cm.tp;
        else if (pred && !truth) ++cm.fp;
        else if (!pred && truth) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricSet metric_set(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("metric_set: empty confusion matrix");
    MetricSet m;
    const auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.precision = ratio(cm.tp, cm.tp + cm.fp);
    m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
    m.specificity = ratio(cm.tn, cm.tn + cm.fp);
    return m;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw DataError("roc_curve: scores/labels length mismatch");
    const std::int64_t n_pos = std::count_if(labels.begin(), labels.end(),
                                             [](int y) { return y != 0; });
    const std::int64_t n_neg = static_cast<std::int64_t>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("roc_curve: both classes must be present");
    for (double s : scores)
        if (!std::isfinite(s)) throw DataError("roc_curve: non-finite score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Tied scores move together: one curve point per distinct threshold.
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] != 0 ? tp : fp) += 1;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        roc.points.push_back({fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    roc.auc = auc;
    return roc;
}

std::string roc_csv(const RocCurve& roc) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : roc.points)
        out += format_double(p.fpr) + "," + format_double(p.tpr) + '\n';
    return out;
}

std::string roc_svg(const RocCurve& roc, const std::string& score_label) {
    constexpr int kSize = 480;
    constexpr int kMargin = 40;
    constexpr int kPlot = kSize - 2 * kMargin;
    auto px = [&](double x) { return format_fixed(kMargin + x * kPlot, 2); };
    auto py = [&](double y) { return format_fixed(kSize - kMargin - y * kPlot, 2); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSize) +
           "\" height=\"" + std::to_string(kSize) + "\" viewBox=\"0 0 " +
           std::to_string(kSize) + " " + std::to_string(kSize) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <rect x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin) +
           "\" width=\"" + std::to_string(kPlot) + "\" height=\"" + std::to_string(kPlot) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "  <line x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(1) + "\" y2=\"" +
           py(1) + "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    svg += "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < roc.points.size(); ++i) {
        if (i) svg += ' ';
        svg += px(roc.points[i].fpr) + "," + py(roc.points[i].tpr);
    }
    svg += "\"/>\n";
    svg += "  <text x=\"" + std::to_string(kSize / 2) + "\" y=\"" + std::to_string(kSize - 8) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           "False positive rate</text>\n";
    svg += "  <text x=\"14\" y=\"" + std::to_string(kSize / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 14 " + std::to_string(kSize / 2) + ")\">"
           "True positive rate</text>\n";
    svg += "  <text x=\"" + std::to_string(kSize / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">ROC (" + score_label +
           "), AUC = " + format_fixed(roc.auc, 4) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace stripscreen::metrics
