// anemo: batch CLI for wind-speed regression and dependence modeling.
//
// Subcommands cover the full pipeline: CSV ingestion, feature screening,
// train/test splitting, linear-family regression, marginal distribution
// fitting, copula fitting/selection, joint-model construction, simulation
// and goodness of fit. Every figure-style output is emitted as plot DATA
// (CSV series); nothing is rendered.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "anemo/anemo.hpp"

namespace {

using anemo::Json;

// ---------------------------------------------------------------- helpers

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw anemo::Error("cannot open '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Wall-clock timings are opt-in: they would break the byte-identical
// reports guarantee, so the default document carries none.
bool g_emit_timings = false;

struct ReportBuilder {
    Json doc;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    explicit ReportBuilder(const std::string& subcommand) {
        doc["tool_version"] = anemo::kToolVersion;
        doc["kind"] = "report";
        doc["subcommand"] = subcommand;
        doc["seed"] = nullptr;
        doc["inputs"] = Json::array();
        doc["results"] = Json::object();
    }
    void add_input(const std::string& path) {
        doc["inputs"].push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64_file(path))}});
    }
    void set_seed(std::uint64_t seed) { doc["seed"] = seed; }
    Json& results() { return doc["results"]; }
    void write(const std::string& path) {
        if (path.empty()) return;
        if (g_emit_timings) {
            doc["timings"] = {{"total_seconds",
                               std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start)
                                   .count()}};
        }
        anemo::write_json_file(path, doc);
    }
};

// Seed handling: stochastic subcommands refuse to run without --seed; the
// literal "auto" draws one from system entropy and records it.
struct SeedOption {
    std::string raw;
    bool required = true;

    void attach(CLI::App* cmd, bool required_here = true) {
        required = required_here;
        cmd->add_option("--seed", raw,
                        required_here
                            ? "RNG seed (integer, or 'auto' to draw and record one); required"
                            : "RNG seed (integer or 'auto'); optional here")
            ->default_str(required_here ? "" : "100");
    }
    std::optional<std::uint64_t> resolve() const {
        if (raw.empty()) {
            if (required)
                throw CLI::ValidationError(
                    "--seed", "this subcommand is stochastic: pass --seed <integer> "
                              "(conventional default: 100) or --seed auto");
            return std::nullopt;
        }
        if (raw == "auto") return std::random_device{}();
        std::uint64_t v = 0;
        const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
            throw CLI::ValidationError("--seed", "expected an integer or 'auto'");
        return v;
    }
};

void write_csv_columns(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& cols) {
    anemo::csv::write_dataset_file(path, anemo::Dataset(names, cols));
}

anemo::Dataset read_input(const std::string& path, bool drop_bad_rows,
                          std::optional<double> max_speed) {
    anemo::csv::ReadOptions opt;
    opt.drop_bad_rows = drop_bad_rows;
    opt.max_value = max_speed;
    return anemo::csv::read_dataset_file(path, opt);
}

std::vector<std::pair<double, double>> column_pairs(const anemo::Dataset& d,
                                                    const std::string& col1,
                                                    const std::string& col2) {
    const auto& a = col1.empty() ? d.column(0) : d.column(col1);
    const auto& b = col2.empty() ? d.column(1) : d.column(col2);
    std::vector<std::pair<double, double>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = {a[i], b[i]};
    return out;
}

Json descriptive_json(const std::string& name, const anemo::Descriptive& d) {
    return Json{{"column", name},     {"n", d.n},
                {"mean", d.mean},     {"std_dev", d.std_dev},
                {"median", d.median}, {"min", d.min},
                {"max", d.max},       {"skewness", d.skewness},
                {"excess_kurtosis", d.excess_kurtosis},
                {"std_error", d.std_error_mean},
                {"degenerate", d.degenerate}};
}

Json copula_param_json(const anemo::CopulaFit& f) {
    Json j = anemo::to_json_fragment(f);
    return j;
}

anemo::CopulaSpec spec_from_flags(const std::string& family, double theta, double delta,
                                  const std::string& rotation, int code) {
    anemo::CopulaSpec s;
    if (family.empty() && code < 0)
        throw CLI::ValidationError("--family", "pass --family <name> or --code <number>");
    if (code >= 0) {
        const auto [fam, rot] = anemo::copula_family_from_code(code);
        s.family = fam;
        s.rotation = rot;
    } else {
        s.family = anemo::copula_family_from_string(family);
        if (rotation == "survival") s.rotation = anemo::CopulaRotation::survival;
        else if (rotation != "none")
            throw anemo::DomainError("unknown rotation '" + rotation + "'");
    }
    s.theta = theta;
    s.delta = delta;
    return s;
}

std::vector<anemo::CopulaCandidate> candidates_from_flag(const std::vector<std::string>& names) {
    if (names.empty()) return anemo::default_copula_candidates();
    std::vector<anemo::CopulaCandidate> out;
    for (const auto& n : names) {
        anemo::CopulaCandidate c{anemo::CopulaFamily::independence, anemo::CopulaRotation::none};
        std::string base = n;
        if (base.size() > 9 && base.substr(base.size() - 9) == "-survival") {
            c.rotation = anemo::CopulaRotation::survival;
            base = base.substr(0, base.size() - 9);
        }
        c.family = anemo::copula_family_from_string(base);
        out.push_back(c);
    }
    return out;
}

// ------------------------------------------------------------ subcommands

struct DescribeArgs {
    std::string input, column, output;
    bool drop_bad_rows = false;
    std::optional<double> max_speed;
};

int run_describe(const DescribeArgs& a) {
    auto d = read_input(a.input, a.drop_bad_rows, a.max_speed);
    ReportBuilder report("describe");
    report.add_input(a.input);
    Json table = Json::array();
    if (!a.column.empty()) {
        table.push_back(descriptive_json(
            a.column, anemo::describe(anemo::Series(d.column(a.column)))));
    } else {
        for (const auto& name : d.column_names())
            table.push_back(descriptive_json(name, anemo::describe(anemo::Series(d.column(name)))));
    }
    report.results()["describe"] = table;
    report.write(a.output);
    std::cout << report.doc["results"].dump(2) << '\n';
    return 0;
}

struct PreprocessArgs {
    std::string input, response, output, scaler_out, report_out;
    std::string method = "spearman";
    double corr_threshold = 0.9;
    double vif_threshold = 5.0;
    bool scale = false;
    bool drop_bad_rows = false;
    std::optional<double> max_speed;
};

int run_preprocess(const PreprocessArgs& a) {
    auto d = read_input(a.input, a.drop_bad_rows, a.max_speed);
    d.set_response(a.response);
    anemo::CorrelationMethod method = anemo::CorrelationMethod::spearman;
    if (a.method == "pearson") method = anemo::CorrelationMethod::pearson;
    else if (a.method == "kendall") method = anemo::CorrelationMethod::kendall;
    else if (a.method != "spearman")
        throw anemo::DomainError("unknown correlation method '" + a.method + "'");

    ReportBuilder report("preprocess");
    report.add_input(a.input);

    const auto [pruned, prune_log] = anemo::prune_high_correlation(d, a.corr_threshold, method);
    Json prune_json = Json::array();
    for (const auto& r : prune_log)
        prune_json.push_back({{"removed", r.removed}, {"kept", r.against},
                              {"correlation", r.correlation}});
    report.results()["pruned"] = prune_json;

    // VIF elimination runs on the predictors only
    std::vector<std::string> predictor_names;
    for (const auto& n : pruned.column_names())
        if (n != a.response) predictor_names.push_back(n);
    Json vif_json = Json::object();
    anemo::Dataset result = pruned;
    if (predictor_names.size() >= 2) {
        const auto [kept, vif_report] =
            anemo::eliminate_collinear(pruned.select(predictor_names), a.vif_threshold);
        Json removed = Json::array();
        for (const auto& e : vif_report.removed)
            removed.push_back({{"column", e.column}, {"vif", e.vif}});
        Json final_vifs = Json::array();
        for (const auto& e : vif_report.entries)
            final_vifs.push_back({{"column", e.column}, {"vif", e.vif}});
        vif_json["removed"] = removed;
        vif_json["final"] = final_vifs;
        std::vector<std::string> keep = kept.column_names();
        keep.push_back(a.response);
        result = d.select(keep);
        result.set_response(a.response);
    }
    report.results()["vif"] = vif_json;

    if (a.scale) {
        const auto [scaled, params] = anemo::minmax_scale(result);
        result = scaled;
        if (!a.scaler_out.empty()) {
            Json sj;
            sj["format_version"] = anemo::kFormatVersion;
            sj["tool_version"] = anemo::kToolVersion;
            sj["kind"] = "scaler";
            sj["column_names"] = params.column_names;
            sj["mins"] = params.mins;
            sj["maxs"] = params.maxs;
            anemo::write_json_file(a.scaler_out, sj);
        }
    }
    anemo::csv::write_dataset_file(a.output, result);
    report.results()["columns_out"] = result.column_names();
    report.write(a.report_out);
    std::cout << "kept " << result.n_cols() << " columns, " << result.n_rows() << " rows\n";
    return 0;
}

struct SplitArgs {
    std::string input, train_out, test_out, report_out;
    double test_fraction = 0.2;
    SeedOption seed;
    bool drop_bad_rows = false;
};

int run_split(const SplitArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    const auto seed = a.seed.resolve();
    anemo::Rng rng(*seed);
    const auto split = anemo::train_test_split(d.n_rows(), a.test_fraction, rng);
    anemo::csv::write_dataset_file(a.train_out, d.take_rows(split.train));
    anemo::csv::write_dataset_file(a.test_out, d.take_rows(split.test));
    ReportBuilder report("split");
    report.add_input(a.input);
    report.set_seed(*seed);
    report.results()["train_rows"] = split.train.size();
    report.results()["test_rows"] = split.test.size();
    report.write(a.report_out);
    std::cout << "train " << split.train.size() << " rows, test " << split.test.size()
              << " rows\n";
    return 0;
}

struct TrainArgs {
    std::string input, response, model_kind = "ols", output, report_out;
    double lambda = 0.01;
    double sigma2 = 1.0;
    bool evidence = false;
    double delta = 1.35;
    std::size_t members = 10;
    std::string base = "ols";
    SeedOption seed;
    bool scale = false;
    bool drop_bad_rows = false;
};

int run_train(const TrainArgs& a) {
    auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    d.set_response(a.response);
    std::vector<std::string> predictors;
    for (const auto& n : d.column_names())
        if (n != a.response) predictors.push_back(n);
    if (predictors.empty()) throw anemo::DomainError("train: no predictor columns");

    anemo::PersistedRegression persisted;
    persisted.column_names = predictors;
    persisted.response = a.response;

    anemo::Dataset design_data = d.select(predictors);
    if (a.scale) {
        auto [scaled, params] = anemo::minmax_scale(design_data);
        design_data = std::move(scaled);
        persisted.scaler = std::move(params);
    }
    anemo::Matrix X(design_data.n_rows(), predictors.size());
    for (std::size_t j = 0; j < predictors.size(); ++j)
        for (std::size_t i = 0; i < design_data.n_rows(); ++i)
            X(i, j) = design_data.column(j)[i];
    const auto& y = d.column(a.response);

    const auto kind = anemo::regressor_kind_from_string(a.model_kind);
    std::optional<std::uint64_t> seed;
    if (kind == anemo::RegressorKind::bagging) {
        seed = a.seed.resolve();  // stochastic: seed mandatory
    }
    switch (kind) {
        case anemo::RegressorKind::ols:
            persisted.model = anemo::fit_ols(X, y);
            break;
        case anemo::RegressorKind::ridge:
            persisted.model = anemo::fit_ridge(X, y, a.lambda);
            break;
        case anemo::RegressorKind::lasso:
            persisted.model = anemo::fit_lasso(X, y, a.lambda);
            break;
        case anemo::RegressorKind::bayes_ridge: {
            anemo::BayesRidgeOptions opt;
            opt.evidence_iteration = a.evidence;
            persisted.model = anemo::fit_bayes_ridge(X, y, a.lambda, a.sigma2, opt);
            break;
        }
        case anemo::RegressorKind::huber: {
            anemo::HuberOptions opt;
            opt.delta = a.delta;
            persisted.model = anemo::fit_huber(X, y, opt);
            break;
        }
        case anemo::RegressorKind::bagging: {
            anemo::BaggingOptions opt;
            opt.base = anemo::regressor_kind_from_string(a.base);
            opt.lambda = a.lambda;
            opt.delta = a.delta;
            opt.members = a.members;
            anemo::Rng rng(*seed);
            persisted.model = anemo::fit_bagging(X, y, opt, rng).aggregate;
            break;
        }
    }
    anemo::write_json_file(a.output, anemo::to_json(persisted));

    ReportBuilder report("train");
    report.add_input(a.input);
    if (seed) report.set_seed(*seed);
    report.results()["model"] = to_string(kind);
    report.results()["intercept"] = persisted.model.intercept;
    report.results()["coefficients"] = persisted.model.coefficients;
    report.results()["converged"] = persisted.model.converged;
    report.write(a.report_out);
    std::cout << "fitted " << to_string(kind) << " on " << X.rows() << " rows, "
              << predictors.size() << " predictors\n";
    return 0;
}

struct EvaluateArgs {
    std::string model, input, pred, truth_column = "y", pred_column = "yhat";
    std::string r2_denominator = "true-mean";
    std::string output, residuals_out;
    bool drop_bad_rows = false;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto denom = a.r2_denominator == "pred-mean" ? anemo::R2Denominator::prediction_mean
                                                       : anemo::R2Denominator::true_mean;
    if (a.r2_denominator != "true-mean" && a.r2_denominator != "pred-mean")
        throw anemo::DomainError("--r2-denominator must be true-mean or pred-mean");

    ReportBuilder report("evaluate");
    std::vector<double> y, yhat;
    if (!a.pred.empty()) {
        // externally produced predictions: a CSV with truth and prediction columns
        const auto d = read_input(a.pred, a.drop_bad_rows, std::nullopt);
        report.add_input(a.pred);
        y = d.column(a.truth_column);
        yhat = d.column(a.pred_column);
    } else {
        if (a.model.empty() || a.input.empty())
            throw anemo::DomainError("evaluate: pass either --pred, or --model with --input");
        const auto persisted = anemo::regression_from_json(anemo::read_json_file(a.model));
        auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
        report.add_input(a.model);
        report.add_input(a.input);
        auto X = anemo::design_for(persisted, d);
        if (persisted.scaler) {
            // apply the trained scaler, not a refit
            for (std::size_t j = 0; j < X.cols(); ++j) {
                const double lo = persisted.scaler->mins[j];
                const double hi = persisted.scaler->maxs[j];
                for (std::size_t i = 0; i < X.rows(); ++i)
                    X(i, j) = hi == lo ? 0.0 : (X(i, j) - lo) / (hi - lo);
            }
        }
        y = d.column(persisted.response);
        yhat = anemo::predict(persisted.model, X);
    }
    const auto m = anemo::metrics(y, yhat, denom);
    report.results()["metrics"] = {{"mae", m.mae}, {"mse", m.mse}, {"med_ae", m.med_ae},
                                   {"r2", m.r2},   {"n", m.n}};
    report.write(a.output);
    if (!a.residuals_out.empty()) {
        std::vector<double> res(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) res[i] = y[i] - yhat[i];
        write_csv_columns(a.residuals_out, {"fitted", "residual"}, {yhat, res});
    }
    std::cout << "MAE " << m.mae << "  MSE " << m.mse << "  MedAE " << m.med_ae << "  R2 "
              << m.r2 << '\n';
    return 0;
}

struct FitMarginalArgs {
    std::string input, column, dist = "all", output, report_out, inspection_prefix;
    std::optional<double> max_speed;
    bool drop_bad_rows = false;
};

int run_fit_marginal(const FitMarginalArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, a.max_speed);
    const anemo::Series data(a.column.empty() ? d.column(0) : d.column(a.column));

    std::vector<anemo::DistributionKind> kinds;
    if (a.dist == "all") {
        kinds = {anemo::DistributionKind::weibull, anemo::DistributionKind::gamma,
                 anemo::DistributionKind::lognormal};
    } else {
        kinds = {anemo::distribution_kind_from_string(a.dist)};
    }
    const auto cmp = anemo::compare_fits(data, kinds);
    if (cmp.fits.empty())
        throw anemo::NumericalError("fit-marginal: every candidate family failed");

    ReportBuilder report("fit-marginal");
    report.add_input(a.input);
    Json table = Json::array();
    for (const auto& f : cmp.fits) table.push_back(anemo::to_json_fragment(f));
    for (const auto& [kind, why] : cmp.failures)
        table.push_back({{"distribution", to_string(kind)}, {"error", why}});
    report.results()["fits"] = table;
    report.write(a.report_out);

    if (!a.output.empty()) anemo::write_json_file(a.output, anemo::to_json(cmp.fits.front()));

    if (!a.inspection_prefix.empty()) {
        for (const auto& f : cmp.fits) {
            const auto insp = anemo::fit_inspection(data, f);
            const std::string stem = a.inspection_prefix + "_" + to_string(f.dist.kind);
            write_csv_columns(stem + "_density.csv", {"x", "fitted_pdf"},
                              {insp.grid, insp.fitted_pdf});
            write_csv_columns(stem + "_cdf.csv", {"x", "fitted_cdf", "empirical_cdf"},
                              {insp.grid, insp.fitted_cdf, insp.empirical_cdf});
            write_csv_columns(stem + "_qq.csv", {"theoretical", "empirical"},
                              {insp.theoretical_q, insp.sorted_data});
            write_csv_columns(stem + "_pp.csv", {"theoretical", "empirical"},
                              {insp.theoretical_p, insp.empirical_p});
        }
    }
    const auto& best = cmp.fits.front();
    std::cout << "best fit: " << to_string(best.dist.kind) << " (" << best.dist.p1 << ", "
              << best.dist.p2 << "), bic " << best.bic << '\n';
    return 0;
}

struct CullenFreyArgs {
    std::string input, column, output = "fig16_cullen_frey.csv", report_out;
    std::size_t boot = 500;
    SeedOption seed;
    std::optional<double> max_speed;
    bool drop_bad_rows = false;
};

int run_cullen_frey(const CullenFreyArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, a.max_speed);
    const anemo::Series data(a.column.empty() ? d.column(0) : d.column(a.column));
    const auto seed = a.seed.resolve();
    anemo::Rng rng(*seed);
    const auto cf = anemo::cullen_frey(data, a.boot, rng);

    // one CSV: series column distinguishes observation/bootstrap/markers
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw anemo::Error("cannot write '" + a.output + "'");
    out << "series,skewness_sq,kurtosis\n";
    const auto row = [&](const char* name, const anemo::MomentPoint& p) {
        out << name << ',' << p.skewness_sq << ',' << p.kurtosis << '\n';
    };
    row("observed", cf.observed);
    for (const auto& p : cf.bootstrap_points) row("bootstrap", p);
    row("normal", cf.normal_marker);
    row("exponential", cf.exponential_marker);
    for (const auto& p : cf.gamma_curve) row("gamma_curve", p);
    for (const auto& p : cf.lognormal_curve) row("lognormal_curve", p);
    out.close();

    ReportBuilder report("cullen-frey");
    report.add_input(a.input);
    report.set_seed(*seed);
    report.results()["observed"] = {{"skewness_sq", cf.observed.skewness_sq},
                                    {"kurtosis", cf.observed.kurtosis}};
    report.results()["bootstrap_points"] = cf.bootstrap_points.size();
    report.write(a.report_out);
    std::cout << "observed (skewness^2, kurtosis) = (" << cf.observed.skewness_sq << ", "
              << cf.observed.kurtosis << ")\n";
    return 0;
}

struct FitCopulaArgs {
    std::string input, col1, col2, family, rotation = "none", output, report_out;
    int code = -1;
    bool already_uniform = false;
    bool drop_bad_rows = false;
};

int run_fit_copula(const FitCopulaArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    auto pairs = column_pairs(d, a.col1, a.col2);
    if (!a.already_uniform) pairs = anemo::pobs(pairs);
    anemo::CopulaFamily family;
    anemo::CopulaRotation rot;
    if (a.family.empty() && a.code < 0)
        throw CLI::ValidationError("--family", "pass --family <name> or --code <number>");
    if (a.code >= 0) {
        std::tie(family, rot) = anemo::copula_family_from_code(a.code);
    } else {
        family = anemo::copula_family_from_string(a.family);
        rot = a.rotation == "survival" ? anemo::CopulaRotation::survival
                                       : anemo::CopulaRotation::none;
    }
    const auto fit = anemo::copula_fit(family, rot, pairs);
    anemo::write_json_file(a.output, anemo::to_json(fit));

    ReportBuilder report("fit-copula");
    report.add_input(a.input);
    report.results()["fit"] = copula_param_json(fit);
    report.write(a.report_out);
    std::cout << to_string(fit.spec.family) << " theta " << fit.spec.theta;
    if (anemo::is_two_parameter(fit.spec.family)) std::cout << " delta " << fit.spec.delta;
    std::cout << " tau " << fit.tau << " bic " << fit.bic << '\n';
    return 0;
}

struct SelectCopulaArgs {
    std::string input, col1, col2, criterion = "bic", output, report_out;
    std::vector<std::string> families;
    SeedOption seed;  // accepted for reproducibility bookkeeping; fits are deterministic
    bool already_uniform = false;
    bool drop_bad_rows = false;
};

int run_select_copula(const SelectCopulaArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    auto pairs = column_pairs(d, a.col1, a.col2);
    if (!a.already_uniform) pairs = anemo::pobs(pairs);
    const auto criterion = a.criterion == "aic" ? anemo::SelectionCriterion::aic
                                                : anemo::SelectionCriterion::bic;
    if (a.criterion != "aic" && a.criterion != "bic")
        throw anemo::DomainError("--criterion must be aic or bic");
    const auto sel = anemo::copula_select(pairs, candidates_from_flag(a.families), criterion);

    ReportBuilder report("select-copula");
    report.add_input(a.input);
    if (const auto seed = a.seed.resolve()) report.set_seed(*seed);
    Json ranked = Json::array();
    for (const auto& f : sel.ranked) ranked.push_back(copula_param_json(f));
    Json failures = Json::array();
    for (const auto& [family, why] : sel.failures)
        failures.push_back({{"family", family}, {"error", why}});
    report.results()["criterion"] = a.criterion;
    report.results()["best"] = copula_param_json(sel.best);
    report.results()["ranked"] = ranked;
    report.results()["failures"] = failures;
    report.write(a.report_out);
    if (!a.output.empty()) anemo::write_json_file(a.output, anemo::to_json(sel.best));

    std::cout << "selected " << to_string(sel.best.spec.family)
              << (sel.best.spec.rotation == anemo::CopulaRotation::survival ? " (survival)" : "")
              << " theta " << sel.best.spec.theta;
    if (anemo::is_two_parameter(sel.best.spec.family))
        std::cout << " delta " << sel.best.spec.delta;
    std::cout << " tau " << sel.best.tau << '\n';
    return 0;
}

struct TauArgs {
    std::string family, rotation = "none";
    double theta = 0.0, delta = 0.0;
    int code = -1;
};

int run_tau(const TauArgs& a) {
    const auto spec = spec_from_flags(a.family, a.theta, a.delta, a.rotation, a.code);
    std::cout << anemo::copula_tau(spec) << '\n';
    return 0;
}

struct SampleCopulaArgs {
    std::string family, rotation = "none", output = "fig23_copula_samples.csv";
    double theta = 0.0, delta = 0.0;
    int code = -1;
    std::size_t n = 1000;
    SeedOption seed;
};

int run_sample_copula(const SampleCopulaArgs& a) {
    const auto spec = spec_from_flags(a.family, a.theta, a.delta, a.rotation, a.code);
    const auto seed = a.seed.resolve();
    anemo::Rng rng(*seed);
    const auto uv = anemo::copula_sample(spec, a.n, rng);
    std::vector<double> us, vs;
    for (const auto& [u, v] : uv) {
        us.push_back(u);
        vs.push_back(v);
    }
    write_csv_columns(a.output, {"u", "v"}, {us, vs});
    std::cout << "wrote " << a.n << " pairs to " << a.output << '\n';
    return 0;
}

struct BuildJointArgs {
    std::string margin1, margin2, copula, output;
    std::string label1 = "x", label2 = "y";
    std::string grid_output;
    std::size_t grid_size = 41;
};

int run_build_joint(const BuildJointArgs& a) {
    const auto m1 = anemo::marginal_from_json(anemo::read_json_file(a.margin1));
    const auto m2 = anemo::marginal_from_json(anemo::read_json_file(a.margin2));
    const auto cop = anemo::copula_from_json(anemo::read_json_file(a.copula));
    const auto joint = anemo::build_joint(m1, m2, cop, a.label1, a.label2);
    anemo::write_json_file(a.output, anemo::to_json(joint));

    if (!a.grid_output.empty()) {
        // pdf/cdf surface samples between the 0.1% and 99.9% quantiles
        std::vector<double> xs, ys, pdfs, cdfs;
        const double x_lo = anemo::quantile(m1.dist, 0.001), x_hi = anemo::quantile(m1.dist, 0.999);
        const double y_lo = anemo::quantile(m2.dist, 0.001), y_hi = anemo::quantile(m2.dist, 0.999);
        for (std::size_t i = 0; i < a.grid_size; ++i) {
            const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i)
                                 / static_cast<double>(a.grid_size - 1);
            for (std::size_t k = 0; k < a.grid_size; ++k) {
                const double y = y_lo + (y_hi - y_lo) * static_cast<double>(k)
                                     / static_cast<double>(a.grid_size - 1);
                xs.push_back(x);
                ys.push_back(y);
                pdfs.push_back(anemo::joint_pdf(joint, x, y));
                cdfs.push_back(anemo::joint_cdf(joint, x, y));
            }
        }
        write_csv_columns(a.grid_output, {"x", "y", "pdf", "cdf"}, {xs, ys, pdfs, cdfs});
    }
    std::cout << "joint model written to " << a.output << '\n';
    return 0;
}

struct SampleJointArgs {
    std::string model, output;
    std::size_t n = 1000;
    SeedOption seed;
};

int run_sample_joint(const SampleJointArgs& a) {
    const auto joint = anemo::joint_from_json(anemo::read_json_file(a.model));
    const auto seed = a.seed.resolve();
    anemo::Rng rng(*seed);
    const auto xy = anemo::joint_sample(joint, a.n, rng);
    std::vector<double> xs, ys;
    for (const auto& [x, y] : xy) {
        xs.push_back(x);
        ys.push_back(y);
    }
    write_csv_columns(a.output, {joint.label_1, joint.label_2}, {xs, ys});
    std::cout << "wrote " << a.n << " samples to " << a.output << '\n';
    return 0;
}

struct GofArgs {
    std::string model, input, col1, col2, output, qq_prefix;
    std::size_t n_sim = 0;
    SeedOption seed;
    bool drop_bad_rows = false;
};

int run_gof(const GofArgs& a) {
    const auto joint = anemo::joint_from_json(anemo::read_json_file(a.model));
    const auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    const auto pairs = column_pairs(d, a.col1, a.col2);
    const auto seed = a.seed.resolve();
    anemo::Rng rng(*seed);
    const auto r = anemo::gof(joint, pairs, a.n_sim, rng);

    ReportBuilder report("gof");
    report.add_input(a.model);
    report.add_input(a.input);
    report.set_seed(*seed);
    report.results()["spearman_real"] = r.spearman_real;
    report.results()["spearman_sim"] = r.spearman_sim;
    report.results()["se_real"] = r.se_real;
    report.results()["se_sim"] = r.se_sim;
    report.results()["n_real"] = r.n_real;
    report.results()["n_sim"] = r.n_sim;
    report.write(a.output);

    if (!a.qq_prefix.empty()) {
        std::vector<double> s1, r1, s2, r2;
        for (const auto& [s, rr] : r.qq_margin_1) {
            s1.push_back(s);
            r1.push_back(rr);
        }
        for (const auto& [s, rr] : r.qq_margin_2) {
            s2.push_back(s);
            r2.push_back(rr);
        }
        write_csv_columns(a.qq_prefix + "_margin1.csv", {"simulated", "real"}, {s1, r1});
        write_csv_columns(a.qq_prefix + "_margin2.csv", {"simulated", "real"}, {s2, r2});
    }
    std::cout << "spearman real " << r.spearman_real << " (se " << r.se_real << "), simulated "
              << r.spearman_sim << " (se " << r.se_sim << ")\n";
    return 0;
}

struct QqDataArgs {
    std::string input, output = "fig5_qq.csv";
    bool drop_bad_rows = false;
};

int run_qq_data(const QqDataArgs& a) {
    const auto d = read_input(a.input, a.drop_bad_rows, std::nullopt);
    const auto qq = anemo::chisq_qq(d);
    std::vector<double> t, o;
    for (const auto& p : qq) {
        t.push_back(p.theoretical);
        o.push_back(p.observed);
    }
    write_csv_columns(a.output, {"theoretical_quantile", "observed_distance_sq"}, {t, o});
    std::cout << "wrote " << qq.size() << " points to " << a.output << '\n';
    return 0;
}

struct PairReportArgs {
    std::string manifest, output;
    std::string criterion = "both";
    bool drop_bad_rows = false;
};

int run_pair_report(const PairReportArgs& a) {
    std::ifstream in(a.manifest);
    if (!in) throw anemo::Error("cannot open '" + a.manifest + "'");
    std::vector<std::pair<std::string, std::string>> entries;  // label, path
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = anemo::csv::split_line(line);
        if (first && cells.size() >= 2 && cells[0] == "label") {
            first = false;
            continue;  // optional header
        }
        first = false;
        if (cells.size() < 2)
            throw anemo::Error("pair-report: manifest line needs 'label,path': " + line);
        entries.emplace_back(cells[0], cells[1]);
    }
    if (entries.empty())
        throw CLI::ValidationError("--manifest", "manifest lists no pairs");

    ReportBuilder report("pair-report");
    report.add_input(a.manifest);
    Json rows = Json::array();
    for (const auto& [label, path] : entries) {
        Json row;
        row["pair"] = label;
        try {
            const auto d = read_input(path, a.drop_bad_rows, std::nullopt);
            const auto raw = column_pairs(d, "", "");
            std::vector<double> xs, ys;
            for (const auto& [x, y] : raw) {
                xs.push_back(x);
                ys.push_back(y);
            }
            row["n"] = raw.size();
            row["spearman"] = anemo::spearman(xs, ys);
            const auto pairs = anemo::pobs(raw);
            if (a.criterion != "bic") {
                const auto sel = anemo::copula_select(pairs, anemo::SelectionCriterion::aic);
                row["aic_selection"] = copula_param_json(sel.best);
            }
            if (a.criterion != "aic") {
                const auto sel = anemo::copula_select(pairs, anemo::SelectionCriterion::bic);
                row["bic_selection"] = copula_param_json(sel.best);
            }
        } catch (const anemo::Error& e) {
            row["error"] = e.what();  // keep going: one bad pair is not fatal
        }
        rows.push_back(row);
    }
    report.results()["pairs"] = rows;
    report.write(a.output);
    std::cout << rows.size() << " pairs processed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wind-speed statistics toolkit: regression, marginals, copulas"};
    app.require_subcommand(1);
    app.set_version_flag("--version", anemo::kToolVersion);
    app.add_flag("--timings", g_emit_timings,
                 "record wall-clock timings in reports (breaks byte-determinism)");

    DescribeArgs describe_args;
    auto* describe = app.add_subcommand("describe", "summary statistics per column");
    describe->add_option("--input", describe_args.input)->required();
    describe->add_option("--column", describe_args.column);
    describe->add_option("--output", describe_args.output, "report JSON path");
    describe->add_flag("--drop-bad-rows", describe_args.drop_bad_rows);
    describe->add_option("--max-speed", describe_args.max_speed,
                         "drop rows with any value above this");

    PreprocessArgs pre_args;
    auto* pre = app.add_subcommand("preprocess",
                                   "correlation pruning, VIF elimination, optional scaling");
    pre->add_option("--input", pre_args.input)->required();
    pre->add_option("--response", pre_args.response)->required();
    pre->add_option("--output", pre_args.output)->required();
    pre->add_option("--method", pre_args.method, "spearman|pearson|kendall");
    pre->add_option("--corr-threshold", pre_args.corr_threshold);
    pre->add_option("--vif-threshold", pre_args.vif_threshold);
    pre->add_flag("--scale", pre_args.scale, "min-max scale the output to [0,1]");
    pre->add_option("--scaler", pre_args.scaler_out, "write scaler parameters here");
    pre->add_option("--report", pre_args.report_out);
    pre->add_flag("--drop-bad-rows", pre_args.drop_bad_rows);
    pre->add_option("--max-speed", pre_args.max_speed);

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "seeded train/test split");
    split->add_option("--input", split_args.input)->required();
    split->add_option("--test-fraction", split_args.test_fraction);
    split->add_option("--train-out", split_args.train_out)->required();
    split->add_option("--test-out", split_args.test_out)->required();
    split->add_option("--report", split_args.report_out);
    split->add_flag("--drop-bad-rows", split_args.drop_bad_rows);
    split_args.seed.attach(split);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "fit a linear-family regressor");
    train->add_option("--input", train_args.input)->required();
    train->add_option("--response", train_args.response)->required();
    train->add_option("--model", train_args.model_kind,
                      "ols|ridge|lasso|bayes-ridge|huber|bagging");
    train->add_option("--output", train_args.output)->required();
    train->add_option("--lambda", train_args.lambda, "penalty (ridge/lasso/bayes-ridge)");
    train->add_option("--sigma2", train_args.sigma2, "noise variance (bayes-ridge)");
    train->add_flag("--evidence", train_args.evidence, "bayes-ridge evidence iteration");
    train->add_option("--delta", train_args.delta, "huber threshold on standardized residuals");
    train->add_option("--members", train_args.members, "bagging ensemble size");
    train->add_option("--base", train_args.base, "bagging base learner");
    train->add_flag("--scale", train_args.scale, "min-max scale predictors before fitting");
    train->add_option("--report", train_args.report_out);
    train->add_flag("--drop-bad-rows", train_args.drop_bad_rows);
    train_args.seed.attach(train, false);

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "score predictions (MAE/MSE/MedAE/R2)");
    eval->add_option("--model", eval_args.model);
    eval->add_option("--input", eval_args.input);
    eval->add_option("--pred", eval_args.pred, "CSV with truth and prediction columns");
    eval->add_option("--truth-column", eval_args.truth_column);
    eval->add_option("--pred-column", eval_args.pred_column);
    eval->add_option("--r2-denominator", eval_args.r2_denominator, "true-mean|pred-mean");
    eval->add_option("--output", eval_args.output);
    eval->add_option("--residuals-out", eval_args.residuals_out,
                     "fig13-style (fitted, residual) plot data CSV");
    eval->add_flag("--drop-bad-rows", eval_args.drop_bad_rows);

    FitMarginalArgs fm_args;
    auto* fm = app.add_subcommand("fit-marginal", "fit candidate marginal distributions");
    fm->add_option("--input", fm_args.input)->required();
    fm->add_option("--column", fm_args.column);
    fm->add_option("--dist", fm_args.dist, "weibull|gamma|lognormal|all");
    fm->add_option("--output", fm_args.output, "best fit model JSON");
    fm->add_option("--report", fm_args.report_out);
    fm->add_option("--inspection-prefix", fm_args.inspection_prefix,
                   "emit density/cdf/qq/pp plot data CSVs with this prefix");
    fm->add_option("--max-speed", fm_args.max_speed);
    fm->add_flag("--drop-bad-rows", fm_args.drop_bad_rows);

    CullenFreyArgs cf_args;
    auto* cf = app.add_subcommand("cullen-frey", "skewness/kurtosis diagnostic data");
    cf->add_option("--input", cf_args.input)->required();
    cf->add_option("--column", cf_args.column);
    cf->add_option("--boot", cf_args.boot);
    cf->add_option("--output", cf_args.output);
    cf->add_option("--report", cf_args.report_out);
    cf->add_option("--max-speed", cf_args.max_speed);
    cf->add_flag("--drop-bad-rows", cf_args.drop_bad_rows);
    cf_args.seed.attach(cf);

    FitCopulaArgs fc_args;
    auto* fc = app.add_subcommand("fit-copula", "maximum-likelihood copula fit");
    fc->add_option("--input", fc_args.input)->required();
    fc->add_option("--col1", fc_args.col1);
    fc->add_option("--col2", fc_args.col2);
    fc->add_option("--family", fc_args.family);
    fc->add_option("--rotation", fc_args.rotation, "none|survival");
    fc->add_option("--code", fc_args.code, "numeric family code alias");
    fc->add_option("--output", fc_args.output)->required();
    fc->add_option("--report", fc_args.report_out);
    fc->add_flag("--already-uniform", fc_args.already_uniform,
                 "input is already pseudo-observations in (0,1)^2");
    fc->add_flag("--drop-bad-rows", fc_args.drop_bad_rows);

    SelectCopulaArgs sc_args;
    auto* sc = app.add_subcommand("select-copula", "fit all families, rank by AIC/BIC");
    sc->add_option("--input", sc_args.input)->required();
    sc->add_option("--col1", sc_args.col1);
    sc->add_option("--col2", sc_args.col2);
    sc->add_option("--criterion", sc_args.criterion, "aic|bic");
    sc->add_option("--families", sc_args.families,
                   "candidate list (append -survival for rotations); default: all");
    sc->add_option("--output", sc_args.output, "best fit model JSON");
    sc->add_option("--report", sc_args.report_out);
    sc->add_flag("--already-uniform", sc_args.already_uniform);
    sc->add_flag("--drop-bad-rows", sc_args.drop_bad_rows);
    sc_args.seed.attach(sc, false);

    TauArgs tau_args;
    auto* tau = app.add_subcommand("tau", "Kendall tau of a copula at its parameters");
    tau->add_option("--family", tau_args.family);
    tau->add_option("--theta", tau_args.theta);
    tau->add_option("--delta", tau_args.delta);
    tau->add_option("--rotation", tau_args.rotation);
    tau->add_option("--code", tau_args.code, "numeric family code alias");

    SampleCopulaArgs scp_args;
    auto* scp = app.add_subcommand("sample-copula", "draw (u,v) pairs from a copula");
    scp->add_option("--family", scp_args.family);
    scp->add_option("--theta", scp_args.theta);
    scp->add_option("--delta", scp_args.delta);
    scp->add_option("--rotation", scp_args.rotation);
    scp->add_option("--code", scp_args.code);
    scp->add_option("-n,--n", scp_args.n);
    scp->add_option("--output", scp_args.output);
    scp_args.seed.attach(scp);

    BuildJointArgs bj_args;
    auto* bj = app.add_subcommand("build-joint", "compose two marginals and a copula");
    bj->add_option("--margin1", bj_args.margin1)->required();
    bj->add_option("--margin2", bj_args.margin2)->required();
    bj->add_option("--copula", bj_args.copula)->required();
    bj->add_option("--label1", bj_args.label1);
    bj->add_option("--label2", bj_args.label2);
    bj->add_option("--output", bj_args.output)->required();
    bj->add_option("--grid-output", bj_args.grid_output, "fig24/25-style pdf+cdf surface CSV");
    bj->add_option("--grid-size", bj_args.grid_size);

    SampleJointArgs sj_args;
    auto* sj = app.add_subcommand("sample-joint", "draw (x,y) samples from a joint model");
    sj->add_option("--model", sj_args.model)->required();
    sj->add_option("-n,--n", sj_args.n);
    sj->add_option("--output", sj_args.output)->required();
    sj_args.seed.attach(sj);

    GofArgs gof_args;
    auto* gofc = app.add_subcommand("gof", "simulation goodness of fit against real pairs");
    gofc->add_option("--model", gof_args.model)->required();
    gofc->add_option("--input", gof_args.input)->required();
    gofc->add_option("--col1", gof_args.col1);
    gofc->add_option("--col2", gof_args.col2);
    gofc->add_option("--n-sim", gof_args.n_sim, "simulation size (default: size of real data)");
    gofc->add_option("--output", gof_args.output);
    gofc->add_option("--qq-prefix", gof_args.qq_prefix, "write fig27-style Q-Q CSVs");
    gofc->add_flag("--drop-bad-rows", gof_args.drop_bad_rows);
    gof_args.seed.attach(gofc);

    QqDataArgs qq_args;
    auto* qq = app.add_subcommand("qq-data", "chi-squared Q-Q data for multivariate normality");
    qq->add_option("--input", qq_args.input)->required();
    qq->add_option("--output", qq_args.output);
    qq->add_flag("--drop-bad-rows", qq_args.drop_bad_rows);

    PairReportArgs pr_args;
    auto* pr = app.add_subcommand("pair-report",
                                  "per-pair correlation and copula selection table");
    pr->add_option("--manifest", pr_args.manifest)->required();
    pr->add_option("--criterion", pr_args.criterion, "aic|bic|both");
    pr->add_option("--output", pr_args.output);
    pr->add_flag("--drop-bad-rows", pr_args.drop_bad_rows);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // uniform usage-error code
    }

    try {
        if (*describe) return run_describe(describe_args);
        if (*pre) return run_preprocess(pre_args);
        if (*split) return run_split(split_args);
        if (*train) return run_train(train_args);
        if (*eval) return run_evaluate(eval_args);
        if (*fm) return run_fit_marginal(fm_args);
        if (*cf) return run_cullen_frey(cf_args);
        if (*fc) return run_fit_copula(fc_args);
        if (*sc) return run_select_copula(sc_args);
        if (*tau) return run_tau(tau_args);
        if (*scp) return run_sample_copula(scp_args);
        if (*bj) return run_build_joint(bj_args);
        if (*sj) return run_sample_joint(sj_args);
        if (*gofc) return run_gof(gof_args);
        if (*qq) return run_qq_data(qq_args);
        if (*pr) return run_pair_report(pr_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const anemo::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const anemo::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
