#include "ngrc/metrics.hpp"

#include "ngrc/error.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ngrc {

using Index = Eigen::Index;

Eigen::MatrixXd ConfusionMatrix::row_percentages() const
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
    for (Index r = 0; r < counts.rows(); ++r) {
        const auto sum = counts.row(r).sum();
        if (sum > 0) {
            out.row(r) = counts.row(r).cast<double>() * (100.0 / static_cast<double>(sum));
        }
    }
    return out;
}

std::vector<std::int64_t> ConfusionMatrix::row_sums() const
{
    std::vector<std::int64_t> sums;
    for (Index r = 0; r < counts.rows(); ++r) {
        sums.push_back(counts.row(r).sum());
    }
    return sums;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int classes,
                          std::vector<std::string> class_names)
{
    if (truth.size() != predicted.size()) {
        raise(ErrorCode::LengthMismatch, std::to_string(truth.size()) + " true labels vs " +
                                             std::to_string(predicted.size()) + " predictions");
    }
    if (classes < 1) {
        raise(ErrorCode::LabelOutOfRange, "class count must be positive");
    }
    ConfusionMatrix cm;
    cm.counts.setZero(classes, classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = predicted[i];
        if (t < 1 || t > classes || p < 1 || p > classes) {
            raise(ErrorCode::LabelOutOfRange, "label pair (" + std::to_string(t) + ", " + std::to_string(p) +
                                                  ") at position " + std::to_string(i) + " outside 1.." +
                                                  std::to_string(classes));
        }
        ++cm.counts(t - 1, p - 1);
    }
    if (class_names.empty()) {
        for (int s = 1; s <= classes; ++s) {
            class_names.push_back("class-" + std::to_string(s));
        }
    }
    cm.class_names = std::move(class_names);
    return cm;
}

double accuracy(const ConfusionMatrix& cm)
{
    const auto total = cm.total();
    if (total <= 0) {
        raise(ErrorCode::EmptyMatrix, "confusion matrix is empty");
    }
    return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

std::vector<double> per_class_accuracy(const ConfusionMatrix& cm)
{
    std::vector<double> out;
    for (Index r = 0; r < cm.counts.rows(); ++r) {
        const auto sum = cm.counts.row(r).sum();
        out.push_back(sum > 0 ? static_cast<double>(cm.counts(r, r)) / static_cast<double>(sum) : 0.0);
    }
    return out;
}

std::string render_confusion(const ConfusionMatrix& cm)
{
    std::size_t name_width = 4;
    for (const auto& n : cm.class_names) {
        name_width = std::max(name_width, n.size());
    }
    const auto pct = cm.row_percentages();
    std::ostringstream os;
    char buf[64];

    os << std::string(name_width, ' ');
    for (Index c = 0; c < cm.counts.cols(); ++c) {
        std::snprintf(buf, sizeof buf, " %14s", ("pred " + std::to_string(c + 1)).c_str());
        os << buf;
    }
    os << '\n';
    for (Index r = 0; r < cm.counts.rows(); ++r) {
        const std::string& name = cm.class_names[static_cast<std::size_t>(r)];
        os << name << std::string(name_width - name.size(), ' ');
        for (Index c = 0; c < cm.counts.cols(); ++c) {
            std::snprintf(buf, sizeof buf, " %6lld (%5.1f%%)", static_cast<long long>(cm.counts(r, c)),
                          pct(r, c));
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm)
{
    nlohmann::json counts = nlohmann::json::array();
    nlohmann::json percent = nlohmann::json::array();
    const auto pct = cm.row_percentages();
    for (Index r = 0; r < cm.counts.rows(); ++r) {
        std::vector<std::int64_t> row;
        std::vector<double> prow;
        for (Index c = 0; c < cm.counts.cols(); ++c) {
            row.push_back(cm.counts(r, c));
            prow.push_back(pct(r, c));
        }
        counts.push_back(row);
        percent.push_back(prow);
    }
    return {{"class_names", cm.class_names}, {"counts", counts}, {"row_percent", percent}};
}

} // namespace ngrc
