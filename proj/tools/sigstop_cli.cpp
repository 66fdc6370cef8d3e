// sigstop: command line front end.
//
// Every command resolves its parameters from built-in defaults, then an
// optional flat JSON config file (--config), then explicit flags. The resolved
// parameter set is echoed into every output file.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sigstop/backtest.hpp"
#include "sigstop/engine.hpp"
#include "sigstop/errors.hpp"
#include "sigstop/io.hpp"
#include "sigstop/models.hpp"
#include "sigstop/pipeline.hpp"
#include "sigstop/policy.hpp"
#include "sigstop/signature.hpp"

namespace fs = std::filesystem;
using namespace sigstop;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInput = 2;

// Binds flags to variables and fills unset ones from the config file.
class Resolver {
public:
    explicit Resolver(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_file_, "JSON config file (flat keys, flags override)");
    }

    template <typename T>
    Resolver& add(const std::string& key, T& target, const std::string& help) {
        const std::string flag = "--" + dashed(key);
        CLI::Option* opt = app_->add_option(flag, target, help);
        if constexpr (!std::is_same_v<T, std::string>) opt->capture_default_str();
        entries_.push_back(Entry{key, opt, [&target, key](const Json& cfg) {
                                     try {
                                         target = cfg.at(key).get<T>();
                                     } catch (const Json::exception& e) {
                                         throw ParseError("config key '" + key + "': " + e.what());
                                     }
                                 },
                                 [&target]() { return Json(target); }});
        return *this;
    }

    Resolver& flag(const std::string& key, bool& target, const std::string& help) {
        CLI::Option* opt = app_->add_flag("--" + dashed(key), target, help);
        entries_.push_back(Entry{key, opt, [&target, key](const Json& cfg) { target = cfg.at(key).get<bool>(); },
                                 [&target]() { return Json(target); }});
        return *this;
    }

    // Seed with no default; it must come from a flag or the config file.
    Resolver& seed(std::optional<std::uint64_t>& target) {
        CLI::Option* opt = app_->add_option("--seed", seed_raw_, "random seed (required)");
        seed_ = &target;
        entries_.push_back(Entry{"seed", opt, [this](const Json& cfg) { seed_raw_ = cfg.at("seed").get<std::uint64_t>(); },
                                 [this]() { return Json(seed_raw_); }});
        return *this;
    }

    // Applies the config file; returns the resolved parameter set.
    Json resolve() {
        Json cfg = Json::object();
        if (!config_file_.empty()) {
            std::ifstream in(config_file_);
            if (!in) throw ValidationError("cannot open config file " + config_file_);
            try {
                cfg = Json::parse(in);
            } catch (const Json::exception& e) {
                throw ParseError("config file " + config_file_ + ": " + e.what());
            }
            if (!cfg.is_object()) throw ParseError("config file must hold a JSON object");
            if (cfg.value("config_version", 1) != 1) throw ValidationError("unsupported config_version");
        }
        bool seed_given = false;
        Json resolved = Json::object();
        resolved["config_version"] = 1;
        for (auto& e : entries_) {
            const bool from_flag = e.option->count() > 0;
            if (!from_flag && cfg.contains(e.key)) e.load(cfg);
            if (e.key == "seed") {
                seed_given = from_flag || cfg.contains("seed");
                if (!seed_given) continue;
            }
            resolved[e.key] = e.dump();
        }
        if (seed_) {
            if (!seed_given) throw ValidationError("a seed is required: pass --seed or set \"seed\" in the config file");
            *seed_ = seed_raw_;
        }
        return resolved;
    }

private:
    struct Entry {
        std::string key;
        CLI::Option* option;
        std::function<void(const Json&)> load;
        std::function<Json()> dump;
    };

    static std::string dashed(std::string key) {
        for (auto& c : key)
            if (c == '_') c = '-';
        return key;
    }

    CLI::App* app_;
    std::string config_file_;
    std::vector<Entry> entries_;
    std::uint64_t seed_raw_ = 0;
    std::optional<std::uint64_t>* seed_ = nullptr;
};

void write_text(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + file.string());
    out << text;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

std::string config_comment(const Json& config) { return "# config: " + config.dump() + "\n"; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ---- shared parameter blocks -----------------------------------------------------

struct OptimizerFlags {
    int iterations = 200;
    double step_size = 0.01;
    double init_scale = -1.0;  // negative: 0.1 / graded length

    void bind(Resolver& r) {
        r.add("iterations", iterations, "optimizer iterations")
            .add("step_size", step_size, "optimizer step size")
            .add("init_scale", init_scale, "initial coefficient scale (negative = 0.1 / graded length)");
    }
    OptimizerConfig make(double threshold, double sharpness, std::uint64_t seed) const {
        OptimizerConfig c;
        c.iterations = iterations;
        c.step_size = step_size;
        if (init_scale >= 0.0) c.init_scale = init_scale;
        c.threshold = threshold;
        c.sharpness = sharpness;
        c.seed = seed;
        return c;
    }
};

struct CostFlags {
    TradingCosts costs;
    void bind(Resolver& r) {
        r.add("entry_cost", costs.entry_cost, "entry transaction cost c")
            .add("exit_cost", costs.exit_cost, "exit transaction cost")
            .add("entry_discount", costs.entry_discount, "entry discount rate r per unit time")
            .add("exit_discount", costs.exit_discount, "exit discount rate per unit time");
    }
};

struct StrategyFlags {
    std::string side = "long";
    int order = 3;
    double threshold = 0.05;
    double sharpness = 20.0;
    Index samples = 100;
    std::string generator = "ou-fit";
    Index min_window = 10;
    Index block_length = 0;
    OptimizerFlags optimizer;
    CostFlags costs;

    void bind(Resolver& r) {
        r.add("side", side, "long or short")
            .add("order", order, "signature truncation order (1..6)")
            .add("threshold", threshold, "stopping threshold k")
            .add("sharpness", sharpness, "sigmoid sharpness")
            .add("samples", samples, "training samples per stopping problem")
            .add("generator", generator, "sample generator: ou-fit or bootstrap")
            .add("min_window", min_window, "smallest window (grid points) for a new stopping problem")
            .add("block_length", block_length, "bootstrap block length (0 = default)");
        optimizer.bind(r);
        costs.bind(r);
    }
    StrategyConfig make(std::uint64_t seed) const {
        StrategyConfig c;
        c.side = parse_side(side);
        c.order = order;
        c.threshold = threshold;
        c.sharpness = sharpness;
        c.sample_count = samples;
        c.generator = parse_generator(generator);
        c.min_window = min_window;
        c.block_length = block_length;
        c.seed = seed;
        c.optimizer = optimizer.make(threshold, sharpness, seed);
        return c;
    }
};

Json trade_report(const TradeRun& run, const PerformanceReport& report, const TradingCosts& costs, const Json& config) {
    Json pnl = Json::array();
    for (const auto& t : run.schedule.trades) pnl.push_back(trade_pnl(t, run.schedule.side, costs));
    Json j{{"config", config},
           {"spread", spread_to_json(run.spec)},
           {"report", report_to_json(report)},
           {"trade_pnl", pnl},
           {"degenerate", run.degenerate},
           {"audit", audit_to_json(run.schedule)}};
    if (!run.note.empty()) j["note"] = run.note;
    return j;
}

std::string equity_csv(const TradeRun& run, const std::vector<const EquityCurve*>& curves,
                       const std::vector<std::string>& names, const Json& config) {
    std::string out = config_comment(config);
    out += "index,date";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    for (Index j = 0; j < run.spread.size(); ++j) {
        out += std::to_string(j) + "," + format_date(run.dates[static_cast<std::size_t>(j)]);
        for (const auto* c : curves) out += "," + fmt(c->values[j]);
        out += "\n";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signature-based optimal stopping for mean-reverting spreads"};
    app.require_subcommand(1);
    std::function<void()> action;

    // sig ------------------------------------------------------------------------
    auto* sig = app.add_subcommand("sig", "print the truncated signature of a time-augmented CSV path");
    Resolver sig_r(sig);
    std::string sig_input;
    int sig_order = 3;
    bool sig_raw_time = false;
    sig->add_option("input", sig_input, "CSV file with rows t,x1,...,xd")->required();
    sig_r.add("order", sig_order, "truncation order").flag("raw_time", sig_raw_time, "do not rescale time to [0,1]");
    sig->callback([&] {
        action = [&] {
            sig_r.resolve();
            if (!fs::exists(sig_input)) throw ValidationError("input file not found: " + sig_input);
            if (sig_order < 1 || sig_order > 6) throw InvalidArgument("order must lie in 1..6");
            const Pathd path = read_path_csv(sig_input);
            std::cout << signature_to_json(signature(augment(path, !sig_raw_time), sig_order)).dump() << "\n";
        };
    });

    // simulate -------------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate OU paths (exact transition) to CSV");
    Resolver sim_r(sim);
    OUParams sim_params{10.0, 10.0, 1.0};
    double sim_x0 = std::numeric_limits<double>::quiet_NaN();
    TimeGrid sim_grid{100, 1.0};
    Index sim_count = 1;
    std::string sim_out;
    std::optional<std::uint64_t> sim_seed;
    sim_r.add("mean_level", sim_params.mean_level, "OU long-run mean")
        .add("speed", sim_params.speed, "OU mean-reversion speed")
        .add("vol", sim_params.vol, "OU volatility")
        .add("x0", sim_x0, "initial value (default: mean level)")
        .add("steps", sim_grid.steps, "grid intervals n")
        .add("horizon", sim_grid.horizon, "horizon T")
        .add("count", sim_count, "number of paths (one column each)")
        .add("out", sim_out, "output CSV (default: stdout)")
        .seed(sim_seed);
    sim->callback([&] {
        action = [&] {
            Json config = sim_r.resolve();
            const double x0 = std::isnan(sim_x0) ? sim_params.mean_level : sim_x0;
            config["x0"] = x0;
            if (sim_count < 1) throw InvalidArgument("count must be >= 1");
            const auto paths = generate_paths(SampleGenerator{sim_params, *sim_seed}, x0, sim_grid, sim_count);
            Eigen::MatrixXd values(sim_grid.steps + 1, sim_count);
            for (Index m = 0; m < sim_count; ++m) values.col(m) = paths[static_cast<std::size_t>(m)].values().col(0);
            std::ostringstream os;
            os << config_comment(config);
            write_path_csv(os, Pathd(sim_grid.times(), values));
            if (sim_out.empty())
                std::cout << os.str();
            else
                write_text(sim_out, os.str());
        };
    });

    // fit ------------------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit OU parameters to a 1-D CSV path by maximum likelihood");
    Resolver fit_r(fit);
    std::string fit_input;
    fit->add_option("input", fit_input, "CSV file with rows t,x")->required();
    fit->callback([&] {
        action = [&] {
            Json config = fit_r.resolve();
            if (!fs::exists(fit_input)) throw ValidationError("input file not found: " + fit_input);
            const Pathd path = read_path_csv(fit_input);
            if (path.dimension() != 1) throw InvalidArgument("fit expects a single value column");
            const double dt = (path.times()[path.size() - 1] - path.times()[0]) / static_cast<double>(path.size() - 1);
            const OUFit f = fit_ou_mle(path.values().col(0), dt);
            std::cout << pretty(Json{{"config", config},
                                     {"params", ou_to_json(f.params)},
                                     {"ar_coefficient", f.ar_coefficient},
                                     {"log_likelihood", f.log_likelihood},
                                     {"dt", dt}});
        };
    });

    // train ----------------------------------------------------------------------
    auto* tr = app.add_subcommand("train", "train a linear signature stopping policy on simulated OU paths");
    Resolver tr_r(tr);
    OUParams tr_params{10.0, 10.0, 1.0};
    double tr_x0 = std::numeric_limits<double>::quiet_NaN();
    TimeGrid tr_grid{100, 1.0};
    Index tr_samples = 100;
    int tr_order = 3;
    double tr_threshold = 0.05;
    double tr_sharpness = 20.0;
    std::string tr_payoff = "identity";
    std::string tr_out;
    OptimizerFlags tr_opt;
    CostFlags tr_costs;
    std::optional<std::uint64_t> tr_seed;
    tr_r.add("mean_level", tr_params.mean_level, "OU long-run mean")
        .add("speed", tr_params.speed, "OU mean-reversion speed")
        .add("vol", tr_params.vol, "OU volatility")
        .add("x0", tr_x0, "initial value (default: mean level)")
        .add("steps", tr_grid.steps, "grid intervals n")
        .add("horizon", tr_grid.horizon, "horizon T")
        .add("samples", tr_samples, "training samples M")
        .add("order", tr_order, "signature truncation order")
        .add("threshold", tr_threshold, "stopping threshold k")
        .add("sharpness", tr_sharpness, "sigmoid sharpness")
        .add("payoff", tr_payoff, "identity, long_entry, long_exit, short_entry or short_exit")
        .add("out", tr_out, "policy JSON output (default: stdout)")
        .seed(tr_seed);
    tr_opt.bind(tr_r);
    tr_costs.bind(tr_r);
    tr->callback([&] {
        action = [&] {
            Json config = tr_r.resolve();
            const double x0 = std::isnan(tr_x0) ? tr_params.mean_level : tr_x0;
            config["x0"] = x0;
            PayoffFn payoff = identity_payoff;
            if (tr_payoff != "identity") {
                PayoffKind kind;
                if (tr_payoff == "long_entry") kind = PayoffKind::LongEntry;
                else if (tr_payoff == "long_exit") kind = PayoffKind::LongExit;
                else if (tr_payoff == "short_entry") kind = PayoffKind::ShortEntry;
                else if (tr_payoff == "short_exit") kind = PayoffKind::ShortExit;
                else throw InvalidArgument("unknown payoff '" + tr_payoff + "'");
                const TradingCosts costs = tr_costs.costs;
                costs.validate();
                payoff = [costs, kind](const Pathd& p) { return problem_payoff(p, costs, kind); };
            }
            if (tr_order < 1 || tr_order > 6) throw InvalidArgument("order must lie in 1..6");
            const TrainingSet set =
                generate_training_set(SampleGenerator{tr_params, *tr_seed}, x0, tr_grid, tr_samples, payoff, tr_order);
            const TrainResult res = train(set, tr_opt.make(tr_threshold, tr_sharpness, *tr_seed));
            Json out = policy_to_json(res.policy);
            out["config"] = config;
            out["training"] = {{"best_loss", res.best_loss},
                               {"final_loss", res.final_loss},
                               {"history_length", res.loss_history.size()}};
            if (tr_out.empty())
                std::cout << pretty(out);
            else
                write_text(tr_out, pretty(out));
        };
    });

    // table1 ---------------------------------------------------------------------
    auto* t1 = app.add_subcommand("table1", "single-stop OU experiment over the mean and volatility sweeps");
    Resolver t1_r(t1);
    OUExperimentConfig t1_cfg;
    double t1_threshold = 0.05;
    double t1_sharpness = 20.0;
    std::string t1_rows = "all";
    std::string t1_out;
    OptimizerFlags t1_opt;
    std::optional<std::uint64_t> t1_seed;
    t1_r.add("train_samples", t1_cfg.train_samples, "training samples per seed")
        .add("test_samples", t1_cfg.test_samples, "held-out samples per seed")
        .add("seeds", t1_cfg.seeds, "number of seeds averaged per row")
        .add("steps", t1_cfg.grid.steps, "grid intervals n")
        .add("horizon", t1_cfg.grid.horizon, "horizon T")
        .add("order", t1_cfg.order, "signature truncation order")
        .add("threshold", t1_threshold, "stopping threshold k")
        .add("sharpness", t1_sharpness, "sigmoid sharpness")
        .add("rows", t1_rows, "all, mean or vol")
        .add("out", t1_out, "output directory for table1.csv / table1.json")
        .seed(t1_seed);
    t1_opt.bind(t1_r);
    t1->callback([&] {
        action = [&] {
            Json config = t1_r.resolve();
            t1_cfg.seed = *t1_seed;
            t1_cfg.optimizer = t1_opt.make(t1_threshold, t1_sharpness, *t1_seed);
            auto rows = table1_rows();
            if (t1_rows == "mean")
                rows.resize(5);
            else if (t1_rows == "vol")
                rows.erase(rows.begin(), rows.begin() + 5);
            else if (t1_rows != "all")
                throw InvalidArgument("rows must be all, mean or vol");

            std::string csv = config_comment(config) + "mean_level,vol,speed,x0,stopped_value,stop_at_first,stop_at_last\n";
            Json results = Json::array();
            for (const auto& row : rows) {
                const auto r = run_ou_experiment(row, t1_cfg);
                csv += fmt(row.params.mean_level) + "," + fmt(row.params.vol) + "," + fmt(row.params.speed) + "," +
                       fmt(row.x0) + "," + fmt(r.mean) + "," + fmt(r.baseline_first) + "," + fmt(r.baseline_last) + "\n";
                results.push_back(Json{{"params", ou_to_json(row.params)},
                                       {"x0", row.x0},
                                       {"stopped_value", r.mean},
                                       {"per_seed", r.per_seed},
                                       {"stop_at_first", r.baseline_first},
                                       {"stop_at_last", r.baseline_last}});
            }
            const Json doc{{"config", config}, {"rows", results}};
            if (t1_out.empty()) {
                std::cout << csv;
            } else {
                write_text(fs::path(t1_out) / "table1.csv", csv);
                write_text(fs::path(t1_out) / "table1.json", pretty(doc));
                std::cout << csv;
            }
        };
    });

    // trade / compare --------------------------------------------------------------
    auto* trade = app.add_subcommand("trade", "build the spread on the formation window and trade it sequentially");
    auto* cmp = app.add_subcommand("compare", "run the signature strategy and the moving-band baseline side by side");
    Resolver trade_r(trade);
    Resolver cmp_r(cmp);
    std::string trade_manifest;
    std::string trade_out = "out";
    StrategyFlags trade_flags;
    std::optional<std::uint64_t> trade_seed;
    std::string cmp_manifest;
    std::string cmp_out = "out";
    StrategyFlags cmp_flags;
    BaselineConfig cmp_baseline;
    std::optional<std::uint64_t> cmp_seed;

    trade->add_option("manifest", trade_manifest, "pair manifest JSON")->required();
    trade_r.add("out", trade_out, "output directory").seed(trade_seed);
    trade_flags.bind(trade_r);
    cmp->add_option("manifest", cmp_manifest, "pair manifest JSON")->required();
    cmp_r.add("out", cmp_out, "output directory")
        .add("band_mult", cmp_baseline.band_mult, "baseline band multiplier")
        .add("window", cmp_baseline.window, "baseline look-back window")
        .seed(cmp_seed);
    cmp_flags.bind(cmp_r);

    trade->callback([&] {
        action = [&] {
            Json config = trade_r.resolve();
            config["manifest"] = trade_manifest;
            const StrategyConfig strategy = trade_flags.make(*trade_seed);
            const TradingCosts costs = trade_flags.costs.costs;
            strategy.validate();
            costs.validate();
            const PairManifest manifest = load_manifest(trade_manifest);
            const TradeRun run = run_trade(manifest, strategy, costs);
            const EquityCurve curve = equity_curve(run.spread.values().col(0), run.schedule, costs);
            const PerformanceReport report = compute_metrics(curve, run.schedule);

            Json schedule = schedule_to_json(run.schedule);
            schedule["config"] = config;
            const fs::path out(trade_out);
            write_text(out / "schedule.json", pretty(schedule));
            write_text(out / "equity.csv", equity_csv(run, {&curve}, {"equity_strategy"}, config));
            write_text(out / "report.json", pretty(trade_report(run, report, costs, config)));
            std::cout << "trades: " << run.schedule.trades.size() << "  cum_pnl(%): " << report.cum_pnl
                      << "  outputs: " << out.string() << "\n";
        };
    });

    cmp->callback([&] {
        action = [&] {
            Json config = cmp_r.resolve();
            config["manifest"] = cmp_manifest;
            const StrategyConfig strategy = cmp_flags.make(*cmp_seed);
            const TradingCosts costs = cmp_flags.costs.costs;
            strategy.validate();
            costs.validate();
            cmp_baseline.validate();
            const PairManifest manifest = load_manifest(cmp_manifest);
            const PairData pair = load_pair(manifest);
            if (manifest.formation_length < cmp_baseline.window)
                throw ValidationError("formation window is shorter than the baseline window");
            (void)pair;
            const TradeRun run = run_trade(manifest, strategy, costs);
            const TradeSchedule baseline = run_baseline(run, cmp_baseline);
            const Comparison c = compare(run.spread.values().col(0), run.schedule, baseline, costs);

            Json schedule = schedule_to_json(run.schedule);
            schedule["config"] = config;
            Json base_schedule = schedule_to_json(baseline);
            base_schedule["config"] = config;
            const fs::path out(cmp_out);
            write_text(out / "schedule.json", pretty(schedule));
            write_text(out / "baseline_schedule.json", pretty(base_schedule));
            write_text(out / "equity.csv",
                       equity_csv(run, {&c.strategy_curve, &c.baseline_curve}, {"equity_strategy", "equity_baseline"},
                                  config));
            Json doc{{"config", config},
                     {"spread", spread_to_json(run.spec)},
                     {"strategy", report_to_json(c.strategy)},
                     {"baseline", report_to_json(c.baseline)},
                     {"degenerate", run.degenerate}};
            if (!run.note.empty()) doc["note"] = run.note;
            write_text(out / "comparison.json", pretty(doc));

            std::printf("%-14s %12s %12s\n", "", "Baseline", "SOT");
            const auto row = [](const char* name, double b, double s) { std::printf("%-14s %12.4f %12.4f\n", name, b, s); };
            row("DailyRet(%)", c.baseline.daily_ret, c.strategy.daily_ret);
            row("DailyStd(%)", c.baseline.daily_std, c.strategy.daily_std);
            const auto sharpe = [](const std::optional<double>& v) {
                if (!v) return std::string("undefined");
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", *v);
                return std::string(buf);
            };
            std::printf("%-14s %12s %12s\n", "Sharpe", sharpe(c.baseline.sharpe).c_str(), sharpe(c.strategy.sharpe).c_str());
            row("MaxDD(%)", c.baseline.max_dd, c.strategy.max_dd);
            row("CumPnL(%)", c.baseline.cum_pnl, c.strategy.cum_pnl);
            std::printf("%-14s %12td %12td\n", "TradeNum", static_cast<std::ptrdiff_t>(c.baseline.trade_num),
                        static_cast<std::ptrdiff_t>(c.strategy.trade_num));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        action();
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const TrainingDiverged& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const ConstructionFailed& e) {
        std::cerr << "spread error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const FitDegenerate& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const NonMeanReverting& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
