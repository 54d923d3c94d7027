#include "credit_transfer/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "credit_transfer/format.hpp"

namespace credit_transfer {

namespace {

void check_inputs(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores and labels differ in length");
  if (scores.size() == 0) throw std::invalid_argument("empty score vector");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw std::invalid_argument("labels must be 0 or 1");
}

ConfusionCounts tally(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                      double threshold) {
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == 1.0;
    if (predicted && actual) ++c.true_positive;
    else if (predicted) ++c.false_positive;
    else if (actual) ++c.false_negative;
    else ++c.true_negative;
  }
  return c;
}

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                          double threshold) {
  check_inputs(scores, labels);
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("confusion: threshold must lie in (0, 1)");
  return tally(scores, labels, threshold);
}

ErrorReport error_report(const ConfusionCounts& counts, double threshold) {
  if (counts.total() <= 0) throw std::invalid_argument("error_report: empty confusion counts");
  ErrorReport r;
  r.threshold = threshold;
  r.test_error = ratio(counts.false_positive + counts.false_negative, counts.total());
  r.type_i = ratio(counts.false_positive, counts.negatives());
  r.type_ii = ratio(counts.false_negative, counts.positives());
  r.type_i_undefined = counts.negatives() == 0;
  r.type_ii_undefined = counts.positives() == 0;
  return r;
}

RocCurve roc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  check_inputs(scores, labels);
  const Eigen::Index positives = (labels.array() == 1.0).count();
  const Eigen::Index negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("roc: both classes must be present");

  std::vector<double> thresholds(scores.data(), scores.data() + scores.size());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double lowest = std::min(0.0, thresholds.front());
  const double highest = thresholds.back() < 1.0
                             ? 1.0
                             : std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity());
  if (thresholds.front() > lowest) thresholds.insert(thresholds.begin(), lowest);
  thresholds.push_back(highest);

  // Sorted sweep: walk the scores once instead of re-tallying per threshold.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(),
            [&scores](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  RocCurve curve;
  std::int64_t below_pos = 0;  // positives with score < threshold (false negatives)
  std::int64_t below_neg = 0;  // negatives with score < threshold (true negatives)
  std::size_t cursor = 0;
  for (double t : thresholds) {
    while (cursor < order.size() && scores[order[cursor]] < t) {
      (labels[order[cursor]] == 1.0 ? below_pos : below_neg) += 1;
      ++cursor;
    }
    RocPoint p;
    p.threshold = t;
    // Same ratios as error_report at this cut, so the two agree bit for bit.
    p.x = ratio(below_pos, positives);
    p.fpr = ratio(negatives - below_neg, negatives);
    p.y = 1.0 - p.fpr;
    p.tpr = 1.0 - p.x;
    if (!curve.points.empty() && curve.points.back().x == p.x && curve.points.back().y == p.y)
      continue;
    curve.points.push_back(p);
  }

  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.x - a.x) * (a.y + b.y) / 2.0;
  }
  return curve;
}

std::string roc_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "threshold,x,y,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << format_double(p.threshold) << ',' << format_double(p.x) << ',' << format_double(p.y)
        << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  return out.str();
}

std::string roc_svg(const std::vector<NamedCurve>& curves) {
  constexpr double kSize = 600.0;
  constexpr double kMargin = 60.0;
  constexpr double kPlot = kSize - 2.0 * kMargin;
  constexpr std::array<const char*, 8> kColors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const auto px = [](double x) { return format_fixed(kMargin + x * kPlot, 2); };
  const auto py = [](double y) { return format_fixed(kSize - kMargin - y * kPlot, 2); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n";
  svg << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << format_fixed(kPlot, 2)
      << "\" height=\"" << format_fixed(kPlot, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
      << py(1) << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    svg << "<text x=\"" << px(v) << "\" y=\"" << format_fixed(kSize - kMargin + 18, 2)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_fixed(v, 2) << "</text>\n";
    svg << "<text x=\"" << format_fixed(kMargin - 8, 2) << "\" y=\"" << py(v)
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_fixed(v, 2) << "</text>\n";
  }
  svg << "<text x=\"300\" y=\"585\" font-size=\"13\" text-anchor=\"middle\">"
         "Type II error rate</text>\n";
  svg << "<text x=\"18\" y=\"300\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 300)\">1 - Type I error rate</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curves[i].curve.points.size(); ++k) {
      const auto& p = curves[i].curve.points[k];
      svg << (k ? " " : "") << px(p.x) << ',' << py(p.y);
    }
    svg << "\"/>\n";
    const double ly = kMargin + 320.0 + 16.0 * static_cast<double>(i);
    svg << "<line x1=\"380\" y1=\"" << format_fixed(ly, 2) << "\" x2=\"400\" y2=\""
        << format_fixed(ly, 2) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"405\" y=\"" << format_fixed(ly + 4.0, 2) << "\" font-size=\"11\">"
        << curves[i].name << " (AUC " << format_fixed(curves[i].curve.auc, 4) << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace credit_transfer
