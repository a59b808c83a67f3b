#include "oslr/serialize.hpp"

#include "oslr/errors.hpp"

#include <ostream>

namespace oslr {

Json to_json(const FitResult& fit)
{
    Json theta = Json::array();
    for (int k = 0; k < fit.theta_hat.q(); ++k) theta.push_back(fit.theta_hat[k]);
    Json info = Json::array();
    for (Eigen::Index r = 0; r < fit.info_matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < fit.info_matrix.cols(); ++c) info.push_back(fit.info_matrix(r, c));
    Json j;
    j["family"] = std::string(fit.family.name());
    j["theta_hat"] = theta;
    j["info_matrix"] = info;
    j["loglik"] = fit.loglik;
    j["aic"] = fit.aic;
    j["n"] = fit.n;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    return j;
}

Json to_json(const TestReport& r)
{
    Json j;
    j["t"] = r.t;
    j["m_oslr"] = r.m_oslr;
    j["n_events"] = r.n_events;
    j["expected_events"] = r.expected_events;
    j["v1"] = r.v1;
    j["v2"] = r.v2 ? Json(*r.v2) : Json(nullptr);
    j["w"] = r.w;
    j["z"] = r.z;
    j["p_two_sided"] = r.p_two_sided;
    j["p_one_sided"] = r.p_one_sided;
    j["corrected"] = r.corrected;
    j["pi"] = r.pi ? Json(*r.pi) : Json(nullptr);
    return j;
}

Json to_json(const Scenario& s)
{
    Json j;
    j["accrual_years"] = s.accrual_years;
    j["followup_years"] = s.followup_years;
    j["kappa"] = s.kappa;
    j["n_b"] = s.n_b;
    j["pi"] = s.pi;
    j["n_a"] = s.n_a();
    j["replicates"] = s.replicates;
    j["seed"] = s.seed;
    j["alpha"] = s.alpha;
    return j;
}

Json to_json(const SimulationResult& result)
{
    const Scenario& s = result.scenario;
    Json procedures = Json::array();
    for (Procedure p : all_procedures()) {
        const auto& summary = result[p];
        Json j;
        j["procedure"] = std::string(procedure_id(p));
        j["label"] = std::string(procedure_label(p));
        j["two_sided_rate"] = summary.two_sided_rate;
        j["one_sided_rate"] = summary.one_sided_rate;
        j["two_sided_rejections"] = summary.two_sided_rejections;
        j["one_sided_rejections"] = summary.one_sided_rejections;
        j["n_eff"] = summary.n_eff;
        j["failed"] = summary.failed;
        if (summary.n_eff > 0) {
            const auto [lo2, hi2] = mc_error_interval(s.alpha, summary.n_eff);
            const auto [lo1, hi1] = mc_error_interval(s.alpha / 2.0, summary.n_eff);
            j["two_sided_band"] = {lo2, hi2};
            j["one_sided_band"] = {lo1, hi1};
        }
        procedures.push_back(std::move(j));
    }
    Json j;
    j["scenario"] = to_json(s);
    j["procedures"] = std::move(procedures);
    return j;
}

namespace {

template <class T>
T get_number(const Json& v, const char* key)
{
    if (!v.is_number()) throw DomainError(std::string("scenario key '") + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned())
            throw DomainError(std::string("scenario key '") + key + "' must be a non-negative integer");
    }
    return v.get<T>();
}

template <class T>
std::vector<T> get_list(const Json& v, const char* key)
{
    std::vector<T> out;
    if (v.is_array()) {
        if (v.empty()) throw DomainError(std::string("scenario key '") + key + "' must not be an empty list");
        for (const auto& item : v) out.push_back(get_number<T>(item, key));
    } else {
        out.push_back(get_number<T>(v, key));
    }
    return out;
}

}  // namespace

ScenarioGrid parse_scenario(const Json& doc)
{
    if (!doc.is_object()) throw DomainError("scenario file must contain a JSON object");
    ScenarioGrid grid;
    Scenario& s = grid.base;
    for (const auto& [key, value] : doc.items()) {
        if (key == "accrual_years") s.accrual_years = get_number<double>(value, "accrual_years");
        else if (key == "followup_years") s.followup_years = get_number<double>(value, "followup_years");
        else if (key == "kappa") grid.kappa = get_list<double>(value, "kappa");
        else if (key == "n_b") grid.n_b = get_list<std::size_t>(value, "n_b");
        else if (key == "pi") grid.pi = get_list<double>(value, "pi");
        else if (key == "replicates") s.replicates = get_number<std::size_t>(value, "replicates");
        else if (key == "seed") s.seed = get_number<std::uint64_t>(value, "seed");
        else if (key == "alpha") s.alpha = get_number<double>(value, "alpha");
        else throw DomainError("unknown scenario key '" + key + "'");
    }
    if (!grid.kappa.empty()) s.kappa = grid.kappa.front();
    if (!grid.n_b.empty()) s.n_b = grid.n_b.front();
    if (!grid.pi.empty()) s.pi = grid.pi.front();
    s.validate();
    return grid;
}

void write_simulation_csv(std::ostream& out, std::span<const SimulationResult> results)
{
    out << "kappa,n_b,pi,procedure,sided,rate,lo,hi,n_eff\n";
    for (const auto& result : results) {
        const Scenario& s = result.scenario;
        for (Procedure p : all_procedures()) {
            const auto& summary = result[p];
            for (int sided : {2, 1}) {
                const double nominal = sided == 2 ? s.alpha : s.alpha / 2.0;
                const double rate = sided == 2 ? summary.two_sided_rate : summary.one_sided_rate;
                out << format_double(s.kappa) << ',' << s.n_b << ',' << format_double(s.pi) << ','
                    << procedure_id(p) << ',' << (sided == 2 ? "two" : "one") << ',' << format_double(rate) << ',';
                if (summary.n_eff > 0) {
                    const auto [lo, hi] = mc_error_interval(nominal, summary.n_eff);
                    out << format_double(lo) << ',' << format_double(hi);
                } else {
                    out << ',';
                }
                out << ',' << summary.n_eff << '\n';
            }
        }
    }
}

}  // namespace oslr
