#include "avdb/metrics.hpp"

#include "avdb/error.hpp"

namespace avdb {

ConfusionMatrix confusion(const std::vector<Label>& preds,
                          const std::vector<Label>& truth) {
    if (preds.size() != truth.size())
        raise(ErrorCode::LengthMismatch, "prediction/truth length mismatch");
    if (preds.empty()) raise(ErrorCode::EmptyInput, "nothing to evaluate");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        bool pred_drone = preds[i] == Label::Drone;
        bool true_drone = truth[i] == Label::Drone;
        if (pred_drone && true_drone)
            ++cm.tp;
        else if (!pred_drone && !true_drone)
            ++cm.tn;
        else if (pred_drone)
            ++cm.fp;
        else
            ++cm.fn;
    }
    return cm;
}

MetricReport report(const ConfusionMatrix& cm) {
    MetricReport r;
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.accuracy = ratio(cm.tp + cm.tn, cm.total());
    r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
    r.precision = ratio(cm.tp, cm.tp + cm.fp);
    return r;
}

std::vector<std::string> misclassified_ids(const std::vector<std::string>& ids,
                                           const std::vector<Label>& preds,
                                           const std::vector<Label>& truth) {
    if (ids.size() != preds.size() || preds.size() != truth.size())
        raise(ErrorCode::LengthMismatch, "ids/prediction/truth length mismatch");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (preds[i] != truth[i]) out.push_back(ids[i]);
    return out;
}

}  // namespace avdb
