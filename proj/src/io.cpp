#include "sigstop/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "sigstop/errors.hpp"

namespace sigstop {

namespace {

std::vector<double> to_vector(const Eigen::Ref<const Eigen::VectorXd>& v) { return {v.data(), v.data() + v.size()}; }

template <typename T>
T required(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing JSON field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("bad JSON field '") + key + "': " + e.what());
    }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json signature_to_json(const Signatured& sig) {
    Json levels = Json::array();
    for (int n = 0; n <= sig.order(); ++n) levels.push_back(to_vector(sig.level(n)));
    return Json{{"dimension", sig.dimension()}, {"order", sig.order()}, {"levels", levels}};
}

Json policy_to_json(const LinearPolicy& policy) {
    return Json{{"dimension", policy.dimension()},
                {"order", policy.order()},
                {"threshold", policy.threshold},
                {"sharpness", policy.sharpness},
                {"normalizer", {{"mean", policy.normalizer.mean}, {"scale", policy.normalizer.scale}}},
                {"coefficients", to_vector(policy.coefficients.coefficients())}};
}

LinearPolicy policy_from_json(const Json& j) {
    const auto dimension = required<Index>(j, "dimension");
    const auto order = required<int>(j, "order");
    const auto coeffs = required<std::vector<double>>(j, "coefficients");
    const Json normalizer = required<Json>(j, "normalizer");
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Index>(coeffs.size()));
    LinearPolicy policy{DualVectord(dimension, order, std::move(c)), required<double>(j, "threshold"),
                        required<double>(j, "sharpness"),
                        Normalizer{required<double>(normalizer, "mean"), required<double>(normalizer, "scale")}};
    policy.validate();
    return policy;
}

Json ou_to_json(const OUParams& params) {
    return Json{{"mean_level", params.mean_level}, {"speed", params.speed}, {"vol", params.vol}};
}

OUParams ou_from_json(const Json& j) {
    OUParams p{required<double>(j, "mean_level"), required<double>(j, "speed"), required<double>(j, "vol")};
    p.validate();
    return p;
}

Json spread_to_json(const SpreadSpec& spec) {
    return Json{{"symbol_a", spec.symbol_a},
                {"symbol_b", spec.symbol_b},
                {"hedge_ratio", spec.hedge_ratio},
                {"fitted", ou_to_json(spec.fitted)},
                {"log_likelihood", spec.log_likelihood}};
}

Json schedule_to_json(const TradeSchedule& schedule) {
    Json trades = Json::array();
    for (const auto& t : schedule.trades)
        trades.push_back(Json{{"entry_index", t.entry_index},
                              {"exit_index", t.exit_index},
                              {"entry_value", t.entry_value},
                              {"exit_value", t.exit_value}});
    return Json{{"side", to_string(schedule.side)}, {"trades", trades}, {"forced_close", schedule.forced_close}};
}

Json audit_to_json(const TradeSchedule& schedule) {
    Json out = Json::array();
    for (const auto& r : schedule.audit)
        out.push_back(Json{{"kind", to_string(r.kind)},
                           {"window_start", r.window_start},
                           {"window_length", r.window_length},
                           {"anchor", r.anchor},
                           {"stop_index", r.stop_index},
                           {"best_loss", r.best_loss}});
    return out;
}

Json report_to_json(const PerformanceReport& r) {
    return Json{{"daily_ret", r.daily_ret},
                {"daily_std", r.daily_std},
                {"sharpe", optional_number(r.sharpe)},
                {"sharpe_defined", r.sharpe.has_value()},
                {"max_dd", r.max_dd},
                {"cum_pnl", r.cum_pnl},
                {"trade_num", r.trade_num},
                {"annualized", {{"ret", r.annual_ret}, {"std", r.annual_std}, {"sharpe", optional_number(r.annual_sharpe)}}}};
}

Pathd parse_path_csv(std::istream& in) {
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                numeric = false;
                break;
            }
            fields.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw ParseError("non-numeric path row", line_no);
        }
        first = false;
        if (fields.size() < 2) throw ParseError("path rows need a time and at least one value", line_no);
        if (!rows.empty() && fields.size() - 1 != rows.front().size())
            throw ParseError("inconsistent number of path columns", line_no);
        times.push_back(fields.front());
        rows.emplace_back(fields.begin() + 1, fields.end());
    }
    if (rows.size() < 2) throw InvalidArgument("path file needs at least 2 rows");
    Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<Index>(times.size()));
    Eigen::MatrixXd x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) x(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    return Pathd(std::move(t), std::move(x));
}

Pathd read_path_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open path file " + file.string());
    try {
        return parse_path_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

void write_path_csv(std::ostream& out, const Pathd& path) {
    out << "t";
    for (Index k = 0; k < path.dimension(); ++k) out << ",x" << (k + 1);
    out << '\n';
    char buf[32];
    for (Index j = 0; j < path.size(); ++j) {
        auto w = [&](double v) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, p - buf);
        };
        w(path.times()[j]);
        for (Index k = 0; k < path.dimension(); ++k) {
            out << ',';
            w(path.values()(j, k));
        }
        out << '\n';
    }
}

}  // namespace sigstop
