#include "ngrc/readout.hpp"

#include "ngrc/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <fstream>
#include <limits>

namespace ngrc {

namespace {

using Index = Eigen::Index;

constexpr int kModelFormatVersion = 1;

// Reciprocal condition estimate below which an unregularized system is rejected.
constexpr double kSingularRcond = 1e-14;

nlohmann::json layout_to_json(const FeatureLayout& layout)
{
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : layout.blocks) {
        blocks.push_back({{"name", b.name}, {"offset", b.offset}, {"length", b.length}, {"weight", b.weight}});
    }
    return {{"blocks", blocks}, {"bias", layout.bias}};
}

FeatureLayout layout_from_json(const nlohmann::json& doc)
{
    FeatureLayout layout;
    for (const auto& b : doc.at("blocks")) {
        layout.blocks.push_back({b.at("name").get<std::string>(), b.at("offset").get<std::size_t>(),
                                 b.at("length").get<std::size_t>(), b.at("weight").get<double>()});
    }
    layout.bias = doc.at("bias").get<bool>();
    return layout;
}

} // namespace

TargetMatrix one_hot(std::span<const int> labels, int classes)
{
    if (classes < 1) {
        raise(ErrorCode::LabelOutOfRange, "class count must be positive");
    }
    TargetMatrix targets{Eigen::MatrixXd::Zero(classes, static_cast<Index>(labels.size()))};
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const int label = labels[j];
        if (label < 1 || label > classes) {
            raise(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " at position " +
                                                  std::to_string(j) + " outside 1.." + std::to_string(classes));
        }
        targets.values(label - 1, static_cast<Index>(j)) = 1.0;
    }
    return targets;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& features)
{
    const Index n = features.rows();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

Eigen::MatrixXd solve_ridge(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double lambda)
{
    if (gram.rows() != gram.cols() || cross.cols() != gram.rows()) {
        raise(ErrorCode::DimensionMismatch, "Gram matrix is " + std::to_string(gram.rows()) + "x" +
                                                std::to_string(gram.cols()) + ", cross term has " +
                                                std::to_string(cross.cols()) + " columns");
    }
    if (!std::isfinite(lambda) || lambda < 0.0) {
        raise(ErrorCode::NonFiniteInput, "lambda must be finite and nonnegative");
    }
    if (!gram.allFinite() || !cross.allFinite()) {
        raise(ErrorCode::NonFiniteInput, "non-finite entries in the normal equations");
    }

    Eigen::MatrixXd system = gram;
    system.diagonal().array() += lambda;

    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        raise(ErrorCode::SingularSystem, "regularized Gram matrix is not positive definite (lambda=" +
                                             std::to_string(lambda) + ")");
    }
    if (lambda == 0.0) {
        const double rcond = llt.rcond();
        if (!(rcond > kSingularRcond)) {
            raise(ErrorCode::SingularSystem,
                  "Gram matrix is rank deficient (rcond=" + std::to_string(rcond) + ") and lambda is 0");
        }
    }

    // The system is symmetric, so W^T = (G + lambda I)^-1 C^T.
    Eigen::MatrixXd w = llt.solve(cross.transpose()).transpose();
    if (!w.allFinite()) {
        raise(ErrorCode::SingularSystem, "solve produced non-finite weights");
    }
    return w;
}

ReadoutModel train_readout(const FeatureMatrix& features, const TargetMatrix& targets, double lambda,
                           std::vector<std::string> class_names)
{
    if (features.sample_count() != targets.sample_count()) {
        raise(ErrorCode::DimensionMismatch, "feature matrix has " + std::to_string(features.sample_count()) +
                                                " samples, targets have " +
                                                std::to_string(targets.sample_count()));
    }
    if (features.layout.dimension() != features.dimension() && !features.layout.blocks.empty()) {
        raise(ErrorCode::DimensionMismatch, "feature layout does not match matrix rows");
    }
    if (!features.values.allFinite() || !targets.values.allFinite()) {
        raise(ErrorCode::NonFiniteInput, "training data contains non-finite values");
    }

    const Eigen::MatrixXd gram = gram_matrix(features.values);
    const Eigen::MatrixXd cross = targets.values * features.values.transpose();

    ReadoutModel model;
    model.w_out = solve_ridge(gram, cross, lambda);
    model.lambda = lambda;
    model.layout = features.layout;
    if (class_names.empty()) {
        for (std::size_t s = 0; s < targets.classes(); ++s) {
            class_names.push_back("class-" + std::to_string(s + 1));
        }
    }
    model.class_names = std::move(class_names);
    return model;
}

Eigen::MatrixXd predict_scores(const ReadoutModel& model, const FeatureMatrix& features)
{
    if (features.dimension() != model.dimension()) {
        raise(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.dimension()) +
                                                " features, got " + std::to_string(features.dimension()));
    }
    if (!(features.layout == model.layout)) {
        raise(ErrorCode::LayoutMismatch, "feature layout [" + features.layout.describe() +
                                             "] differs from model layout [" + model.layout.describe() + "]");
    }
    return model.w_out * features.values;
}

std::vector<int> classify(const Eigen::MatrixXd& scores)
{
    if (!scores.allFinite()) {
        raise(ErrorCode::NonFiniteScores, "score matrix contains non-finite values");
    }
    std::vector<int> labels(static_cast<std::size_t>(scores.cols()));
    for (Index j = 0; j < scores.cols(); ++j) {
        Index best = 0;
        for (Index s = 1; s < scores.rows(); ++s) {
            if (scores(s, j) > scores(best, j)) {
                best = s;
            }
        }
        labels[static_cast<std::size_t>(j)] = static_cast<int>(best) + 1;
    }
    return labels;
}

nlohmann::json model_to_json(const ReadoutModel& model)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index s = 0; s < model.w_out.rows(); ++s) {
        std::vector<double> row(static_cast<std::size_t>(model.w_out.cols()));
        for (Index n = 0; n < model.w_out.cols(); ++n) {
            row[static_cast<std::size_t>(n)] = model.w_out(s, n);
        }
        rows.push_back(std::move(row));
    }
    return {{"format", "ngrc-readout"},
            {"version", kModelFormatVersion},
            {"lambda", model.lambda},
            {"class_names", model.class_names},
            {"layout", layout_to_json(model.layout)},
            {"w_out", std::move(rows)}};
}

ReadoutModel model_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("format").get<std::string>() != "ngrc-readout" ||
            doc.at("version").get<int>() != kModelFormatVersion) {
            raise(ErrorCode::InvalidConfig, "unsupported readout model format");
        }
        ReadoutModel model;
        model.lambda = doc.at("lambda").get<double>();
        model.class_names = doc.at("class_names").get<std::vector<std::string>>();
        model.layout = layout_from_json(doc.at("layout"));
        const auto& rows = doc.at("w_out");
        const auto classes = static_cast<Index>(rows.size());
        const auto dim = static_cast<Index>(model.layout.dimension());
        model.w_out.resize(classes, dim);
        for (Index s = 0; s < classes; ++s) {
            const auto row = rows[static_cast<std::size_t>(s)].get<std::vector<double>>();
            if (static_cast<Index>(row.size()) != dim) {
                raise(ErrorCode::DimensionMismatch, "w_out row length disagrees with layout");
            }
            for (Index n = 0; n < dim; ++n) {
                model.w_out(s, n) = row[static_cast<std::size_t>(n)];
            }
        }
        if (!model.w_out.allFinite()) {
            raise(ErrorCode::NonFiniteInput, "model weights are not finite");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("malformed readout model: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ReadoutModel& model)
{
    std::ofstream out(path);
    if (!out) {
        raise(ErrorCode::Io, "cannot write " + path.string());
    }
    out << model_to_json(model).dump() << '\n';
}

ReadoutModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::MissingFile, "cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("cannot parse model: ") + e.what());
    }
    return model_from_json(doc);
}

} // namespace ngrc
