#include "cfnormal/report_io.hpp"

#include <sstream>

namespace cfn {

Json pattern_json(const Pattern& s) {
    Json out = Json::array();
    for (Digit d : s.digits()) out.push_back(d);
    return out;
}

Json to_json(const NormalityReport& report) {
    Json j;
    j["params"] = {
        {"source", report.source},
        {"conv", std::string(to_string(report.convention))},
        {"N", report.N},
        {"max_digit", report.max_digit},
        {"max_len", report.max_len},
    };
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({
            {"pattern", pattern_json(r.pattern)},
            {"count", r.count},
            {"N", r.N},
            {"empirical", r.empirical},
            {"mu", r.mu},
            {"deviation", r.deviation},
        });
    }
    j["rows"] = std::move(rows);
    j["growth"] = {
        {"logq", report.growth.log_q},
        {"n", report.growth.n},
        {"g_ref", report.growth.g_ref},
        {"per_digit", report.growth.per_digit},
        {"checkpoints", report.growth.checkpoints},
        {"checkpoint_max_rel_error", report.growth.checkpoint_max_rel_error},
    };
    j["max_deviation"] = report.max_deviation();
    return j;
}

Json to_json(const HypothesisRow& row) {
    return {
        {"n", row.n},
        {"length_sum", row.length_sum},
        {"max_length", row.max_length},
        {"digit_rational", row.digit_rational},
        {"max_length_to_m", row.max_length_to_m},
        {"den_at_m", row.den_at_m},
        {"n_over_sum", row.n_over_sum},
        {"n_max_over_sum", row.n_max_over_sum},
        {"m_over_n", row.m_over_n},
    };
}

Json census_json(const std::vector<CensusReport>& reports, bool timing) {
    Json j;
    Json params = Json::object();
    if (!reports.empty()) {
        const auto& p = reports.front().params;
        params = {
            {"kind", std::string(to_string(reports.front().kind))},
            {"eps", p.epsilon},
            {"s", pattern_json(p.s)},
            {"conv", std::string(to_string(p.convention))},
        };
    }
    j["params"] = std::move(params);
    Json rows = Json::array();
    for (const auto& r : reports) {
        Json row = {
            {"m", r.m},
            {"kind", std::string(to_string(r.kind))},
            {"eps", r.params.epsilon},
            {"s", pattern_json(r.params.s)},
            {"total", r.total},
            {"abnormal", r.abnormal},
            {"ratio", r.ratio()},
            {"normalized", r.normalized()},
        };
        if (timing) row["wall_seconds"] = r.wall_seconds;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json to_json(const MeasureEstimate& est) {
    return {{"estimate", est.estimate}, {"stderr", est.stderr_}, {"samples", est.samples}};
}

Json to_json(const Constants& c) { return {{"g", c.g}, {"G", c.G}, {"log2", c.log2}}; }

std::string census_csv(const std::vector<CensusReport>& reports) {
    std::ostringstream out;
    out.precision(17);
    out << "m,kind,eps,s,total,abnormal,ratio\n";
    for (const auto& r : reports) {
        out << r.m << ',' << to_string(r.kind) << ',' << r.params.epsilon << ",\"" << r.params.s.to_string()
            << "\"," << r.total << ',' << r.abnormal << ',' << r.ratio() << '\n';
    }
    return out.str();
}

} // namespace cfn
