#include "oslr/cli.hpp"

#include "oslr/errors.hpp"
#include "oslr/fitting.hpp"
#include "oslr/linalg.hpp"
#include "oslr/nonparametric.hpp"
#include "oslr/serialize.hpp"
#include "oslr/simulation.hpp"
#include "oslr/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace oslr::cli {

namespace {

struct Options {
    std::string control;
    std::string experimental;
    std::string family = "auto";
    std::optional<double> w;
    std::optional<double> horizon;
    double alpha = 0.05;
    std::optional<double> pi;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string fixed_reference;
    std::string input;
    unsigned threads = 0;
    bool svg = false;
};

/// Loads one cohort; a file with several groups must contain `preferred`.
Cohort load_cohort(const std::string& path, const std::string& preferred)
{
    if (path.empty()) throw UsageError("missing input file");
    CohortSet set = ingest_csv(path);
    if (set.size() == 1) return set.front();
    return find_cohort(set, preferred);
}

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

void check_common(const Options& o)
{
    if (o.w && !(*o.w >= 0.0 && *o.w <= 1.0)) throw UsageError("--w must lie in [0, 1]");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (o.horizon && !(*o.horizon > 0.0)) throw UsageError("--horizon must be positive");
    if (o.pi && !(*o.pi > 0.0)) throw UsageError("--pi must be positive");
}

struct Candidate {
    Family family;
    std::optional<FitResult> fit;
    std::string error;
};

std::vector<Candidate> fit_candidates(const std::string& family, const Cohort& control)
{
    std::vector<Family> families;
    if (family == "auto") families = {kExponential, kWeibull, kLogLogistic};
    else {
        try {
            families = {Family::from_name(family)};
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    std::vector<Candidate> out;
    for (Family f : families) {
        Candidate c{f, std::nullopt, {}};
        try {
            c.fit = fit_mle(f, control);
        } catch (const FitError& e) {
            if (families.size() == 1) throw;
            c.error = e.what();
        }
        out.push_back(std::move(c));
    }
    return out;
}

const FitResult& selected_fit(const std::vector<Candidate>& candidates, std::vector<FitResult>& storage)
{
    storage.clear();
    for (const auto& c : candidates)
        if (c.fit) storage.push_back(*c.fit);
    if (storage.empty()) throw FitError("no candidate family could be fitted");
    return select_model(storage);
}

Json candidates_json(const std::vector<Candidate>& candidates)
{
    Json arr = Json::array();
    for (const auto& c : candidates) {
        Json j;
        j["family"] = std::string(c.family.name());
        if (c.fit) {
            j["aic"] = c.fit->aic;
            j["loglik"] = c.fit->loglik;
            j["converged"] = true;
        } else {
            j["aic"] = nullptr;
            j["converged"] = false;
            j["error"] = c.error;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

void write_aic_table(std::ostream& out, const std::vector<Candidate>& candidates)
{
    out << std::left << std::setw(14) << "family" << std::right << std::setw(14) << "loglik" << std::setw(14)
        << "AIC" << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& c : candidates) {
        out << std::left << std::setw(14) << c.family.name() << std::right;
        if (c.fit) out << std::setw(14) << c.fit->loglik << std::setw(14) << c.fit->aic << '\n';
        else out << std::setw(28) << "failed" << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

void write_fit_text(std::ostream& out, const FitResult& fit)
{
    out << std::fixed << std::setprecision(4);
    out << "family: " << fit.family.name() << "\ntheta_hat:";
    for (int k = 0; k < fit.theta_hat.q(); ++k) out << ' ' << fit.theta_hat[k];
    out << "\nloglik: " << fit.loglik << "\nAIC: " << fit.aic << "\nn: " << fit.n << "\ninformation matrix J:\n";
    for (Eigen::Index r = 0; r < fit.info_matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < fit.info_matrix.cols(); ++c) out << std::setw(12) << fit.info_matrix(r, c);
        out << '\n';
    }
    const Eigen::MatrixXd inv = pseudo_inverse(Eigen::MatrixXd(fit.info_matrix));
    out << "pseudoinverse J+:\n";
    for (Eigen::Index r = 0; r < inv.rows(); ++r) {
        for (Eigen::Index c = 0; c < inv.cols(); ++c) out << std::setw(12) << inv(r, c);
        out << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

int cmd_fit(const Options& o, std::ostream& out)
{
    const Cohort control = load_cohort(o.control, "A");
    const auto candidates = fit_candidates(o.family, control);
    std::vector<FitResult> storage;
    const FitResult& fit = selected_fit(candidates, storage);

    OutputTarget target(o.out, out);
    if (o.format == "table") {
        if (candidates.size() > 1) write_aic_table(target.stream(), candidates);
        write_fit_text(target.stream(), fit);
    } else if (o.format.empty() || o.format == "json") {
        Json j = to_json(fit);
        if (candidates.size() > 1) j["candidates"] = candidates_json(candidates);
        target.stream() << j.dump(2) << '\n';
    } else {
        throw UsageError("fit supports --format json|table");
    }
    return kSuccess;
}

std::string weight_label(double w)
{
    std::ostringstream s;
    s << "w=" << w;
    return s.str();
}

struct TestRun {
    std::optional<FitResult> fit;
    std::vector<Candidate> candidates;
    double horizon = 0.0;
    std::vector<MethodRow> rows;
};

TestRun run_tests(const Options& o)
{
    TestRun run;
    const Cohort experimental = load_cohort(o.experimental, "B");

    std::vector<double> weights{0.0, 0.5};
    if (o.w && std::find(weights.begin(), weights.end(), *o.w) == weights.end()) weights.push_back(*o.w);

    if (!o.fixed_reference.empty()) {
        const auto ref = parse_fixed_reference(o.fixed_reference);
        run.horizon = o.horizon.value_or(experimental.max_time());
        for (double w : weights)
            run.rows.push_back({"uncorrected OSLR (" + weight_label(w) + ")",
                                oslr_test(ref, experimental, run.horizon, w, false)});
        return run;
    }

    const Cohort control = load_cohort(o.control, "A");
    run.candidates = fit_candidates(o.family, control);
    std::vector<FitResult> storage;
    run.fit = selected_fit(run.candidates, storage);
    const auto ref = ReferenceCurve::fitted(*run.fit);
    run.horizon = o.horizon.value_or(std::max(control.max_time(), experimental.max_time()));

    for (double w : weights)
        run.rows.push_back({"uncorrected OSLR (" + weight_label(w) + ")",
                            oslr_test(ref, experimental, run.horizon, w, false)});
    for (double w : weights)
        run.rows.push_back({"corrected OSLR (" + weight_label(w) + ")",
                            oslr_test(ref, experimental, run.horizon, w, true, o.pi)});
    return run;
}

Json test_run_json(const TestRun& run, double alpha)
{
    Json j;
    j["horizon"] = run.horizon;
    j["alpha"] = alpha;
    j["fit"] = run.fit ? to_json(*run.fit) : Json(nullptr);
    if (run.candidates.size() > 1) j["candidates"] = candidates_json(run.candidates);
    Json tests = Json::array();
    for (const auto& row : run.rows) {
        Json t = to_json(row.report);
        t["method"] = row.method;
        t["reject_two_sided"] = row.report.rejects_two_sided(alpha);
        t["reject_one_sided"] = row.report.rejects_one_sided(alpha / 2.0);
        tests.push_back(std::move(t));
    }
    j["tests"] = std::move(tests);
    return j;
}

int cmd_test(const Options& o, std::ostream& out)
{
    check_common(o);
    const TestRun run = run_tests(o);
    OutputTarget target(o.out, out);
    if (o.format.empty() || o.format == "table") {
        write_test_table(target.stream(), run.rows);
    } else if (o.format == "json") {
        target.stream() << test_run_json(run, o.alpha).dump(2) << '\n';
    } else {
        throw UsageError("test supports --format table|json");
    }
    return kSuccess;
}

void write_overlay_csv(std::ostream& out, const FitResult& fit, double t_max)
{
    constexpr int kGridPoints = 200;
    out << "time,value\n";
    for (int i = 0; i < kGridPoints; ++i) {
        const double t = t_max * static_cast<double>(i) / (kGridPoints - 1);
        out << format_double(t) << ',' << format_double(survival(fit.family, fit.theta_hat, t)) << '\n';
    }
}

int cmd_km(const Options& o, std::ostream& out)
{
    const std::string path = !o.input.empty() ? o.input : !o.control.empty() ? o.control : o.experimental;
    if (path.empty()) throw UsageError("km requires an input file");
    const CohortSet cohorts = ingest_csv(path);
    std::optional<Family> overlay;
    if (o.family != "auto" && !o.family.empty()) {
        try {
            overlay = Family::from_name(o.family);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }

    for (const auto& cohort : cohorts) {
        const std::string suffix = cohort.label().empty() ? "" : "_" + cohort.label();
        const StepCurve km = kaplan_meier(cohort);
        const StepCurve na = nelson_aalen(cohort);
        std::optional<FitResult> fit;
        if (overlay) fit = fit_mle(*overlay, cohort);

        auto emit = [&](const std::string& kind, auto&& writer) {
            if (o.out.empty()) {
                out << "# " << kind << (cohort.label().empty() ? "" : " group=" + cohort.label()) << '\n';
                writer(out);
            } else {
                OutputTarget target(o.out + "_" + kind + suffix + ".csv", out);
                writer(target.stream());
            }
        };
        emit("km", [&](std::ostream& s) { write_step_csv(s, km); });
        emit("na", [&](std::ostream& s) { write_step_csv(s, na); });
        if (fit) emit("fit", [&](std::ostream& s) { write_overlay_csv(s, *fit, cohort.max_time()); });

        if (o.svg) {
            if (o.out.empty()) throw UsageError("--svg requires --out");
            std::ofstream svg_file(o.out + "_km" + suffix + ".svg");
            if (!svg_file) throw UsageError("cannot write SVG output");
            std::vector<SvgSeries> series{{"Kaplan-Meier", step_points(km), "#1f77b4"}};
            if (fit) {
                std::vector<std::pair<double, double>> pts;
                for (int i = 0; i < 200; ++i) {
                    const double t = cohort.max_time() * i / 199.0;
                    pts.emplace_back(t, survival(fit->family, fit->theta_hat, t));
                }
                series.push_back({std::string("fitted ") + std::string(fit->family.name()), pts, "#d62728"});
            }
            write_svg(svg_file, series, "time", "survival");
        }
    }
    return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out)
{
    if (o.input.empty()) throw UsageError("simulate requires a scenario file");
    std::ifstream in(o.input);
    if (!in) throw UsageError("cannot open scenario '" + o.input + "'");
    ScenarioGrid grid;
    try {
        grid = parse_scenario(Json::parse(in));
    } catch (const Json::exception& e) {
        throw UsageError(std::string("invalid scenario JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw UsageError(std::string("invalid scenario: ") + e.what());
    }
    if (o.seed) grid.base.seed = *o.seed;

    std::vector<Scenario> cells;
    try {
        cells = grid.expand();
    } catch (const DomainError& e) {
        throw UsageError(std::string("invalid scenario: ") + e.what());
    }
    const unsigned workers = o.threads > 0 ? std::min(o.threads, default_workers()) : default_workers();

    std::vector<SimulationResult> results;
    for (const auto& cell : cells) results.push_back(run_scenario(cell, workers));

    Json records = Json::array();
    for (const auto& r : results) records.push_back(to_json(r));

    if (!o.out.empty()) {
        OutputTarget json_out(o.out + ".json", out);
        json_out.stream() << records.dump(2) << '\n';
        OutputTarget csv_out(o.out + ".csv", out);
        write_simulation_csv(csv_out.stream(), results);
    } else if (o.format == "csv") {
        write_simulation_csv(out, results);
    } else if (o.format.empty() || o.format == "json") {
        out << records.dump(2) << '\n';
    } else {
        throw UsageError("simulate supports --format json|csv");
    }
    return kSuccess;
}

int cmd_report(const Options& o, std::ostream& out)
{
    check_common(o);
    if (!o.fixed_reference.empty()) throw UsageError("report needs a fitted reference; drop --fixed-reference");
    const TestRun run = run_tests(o);
    const Cohort control = load_cohort(o.control, "A");
    const Cohort experimental = load_cohort(o.experimental, "B");

    OutputTarget target(o.out, out);
    std::ostream& s = target.stream();
    s << "One-sample log-rank analysis\n============================\n\n";
    s << "control: n=" << control.size() << ", events=" << control.n_events() << '\n';
    s << "experimental: n=" << experimental.size() << ", events=" << experimental.n_events() << '\n';
    s << "allocation ratio n_B/n_A: " << std::fixed << std::setprecision(4)
      << static_cast<double>(experimental.size()) / static_cast<double>(control.size()) << '\n';
    s << "analysis time: " << run.horizon << "\n\n";
    s.unsetf(std::ios::floatfield);
    if (run.candidates.size() > 1) {
        s << "Model selection\n---------------\n";
        write_aic_table(s, run.candidates);
        s << '\n';
    }
    s << "Reference fit\n-------------\n";
    write_fit_text(s, *run.fit);
    s << "\nTests (one-sided p-values; small values favour the experimental group)\n"
         "-----------------------------------------------------------------------\n";
    write_test_table(s, run.rows);
    s << "\nTwo-sided decisions at alpha=" << o.alpha << ":\n";
    for (const auto& row : run.rows) {
        s << "  " << row.method << ": " << (row.report.rejects_two_sided(o.alpha) ? "reject" : "do not reject")
          << " (p=" << std::fixed << std::setprecision(4) << row.report.p_two_sided << ")\n";
        s.unsetf(std::ios::floatfield);
    }
    return kSuccess;
}

}  // namespace

ReferenceCurve parse_fixed_reference(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("--fixed-reference expects family:params");
    Family family = kExponential;
    try {
        family = Family::from_name(spec.substr(0, colon));
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    Vec theta(family.q());
    std::string rest = spec.substr(colon + 1);
    int k = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = rest.find(',', start);
        const std::string field = rest.substr(start, comma - start);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
            throw UsageError("invalid reference parameter '" + field + "'");
        if (k >= family.q()) throw UsageError("too many parameters for " + std::string(family.name()));
        theta[k++] = v;
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (k != family.q()) throw UsageError(std::string(family.name()) + " expects " + std::to_string(family.q()) + " parameter(s)");
    try {
        return ReferenceCurve::fixed(family, ParameterVector(theta));
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

void write_test_table(std::ostream& out, const std::vector<MethodRow>& rows)
{
    std::size_t width = std::string("Testing method").size();
    for (const auto& r : rows) width = std::max(width, r.method.size());
    const auto saved = out.flags();
    out << std::left << std::setw(static_cast<int>(width)) << "Testing method" << std::right;
    for (const char* h : {"M_OSLR", "V1", "V2", "Z", "p-value"}) out << " | " << std::setw(8) << h;
    out << '\n' << std::string(width + 5 * 11, '-') << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(width)) << r.method << std::right;
        out << " | " << std::setw(8) << r.report.m_oslr << " | " << std::setw(8) << r.report.v1 << " | ";
        if (r.report.v2) out << std::setw(8) << *r.report.v2;
        else out << std::setw(8) << "---";
        out << " | " << std::setw(8) << r.report.z << " | " << std::setw(8) << r.report.p_one_sided << '\n';
    }
    out.flags(saved);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"One-sample log-rank tests against parametric historical controls"};
    app.require_subcommand(1);
    Options o;

    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--control", o.control, "historical control CSV (time,event[,group])");
        sub->add_option("--experimental", o.experimental, "experimental cohort CSV");
        sub->add_option("--family", o.family, "exponential | weibull | loglogistic | auto");
        sub->add_option("--out", o.out, "output file (or prefix for multi-file outputs)");
        sub->add_option("--format", o.format, "json | csv | table");
    };
    auto add_test = [&](CLI::App* sub) {
        sub->add_option("--w", o.w, "additional variance weight in [0, 1]");
        sub->add_option("--horizon", o.horizon, "analysis time (default: largest observed time)");
        sub->add_option("--alpha", o.alpha, "two-sided significance level");
        sub->add_option("--pi", o.pi, "allocation ratio override for the correction");
        sub->add_option("--fixed-reference", o.fixed_reference, "known reference, e.g. exponential:1.0");
    };

    auto* fit = app.add_subcommand("fit", "fit a reference curve to the control cohort");
    add_data(fit);
    auto* test = app.add_subcommand("test", "uncorrected and corrected one-sample log-rank tests");
    add_data(test);
    add_test(test);
    auto* km = app.add_subcommand("km", "Kaplan-Meier and Nelson-Aalen curves as CSV");
    add_data(km);
    km->add_option("input", o.input, "CSV file");
    km->add_flag("--svg", o.svg, "also write SVG renderings (needs --out)");
    auto* sim = app.add_subcommand("simulate", "type I error simulation over a scenario grid");
    sim->add_option("scenario", o.input, "scenario JSON file")->required();
    sim->add_option("--seed", o.seed, "override the scenario seed");
    sim->add_option("--threads", o.threads, "worker threads (capped by OSLR_THREADS)");
    sim->add_option("--out", o.out, "output prefix: writes <prefix>.json and <prefix>.csv");
    sim->add_option("--format", o.format, "json | csv (stdout)");
    auto* report = app.add_subcommand("report", "fit, model selection and test table in one text report");
    add_data(report);
    add_test(report);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*fit) return cmd_fit(o, out);
        if (*test) return cmd_test(o, out);
        if (*km) return cmd_km(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*report) return cmd_report(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateTestError& e) {
        err << "degenerate test: " << e.what() << '\n';
        return kDegenerate;
    } catch (const FitError& e) {
        err << "fit failure: " << e.what() << '\n';
        return kFitFailure;
    } catch (const SelectionError& e) {
        err << "fit failure: " << e.what() << '\n';
        return kFitFailure;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kFitFailure;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kFitFailure;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace oslr::cli
