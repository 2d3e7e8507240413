// runner.cpp — Run configuration, parameter sweeps, validation and file comparison

#include "pcqed/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pcqed/diagnostics.hpp"
#include "pcqed/errors.hpp"
#include "pcqed/io.hpp"

namespace pcqed {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kParameters = {"system.omega_eg", "system.omega_c", "system.g",   "system.kappa",
                                           "bath.alpha",      "bath.nu_c",      "bath.mu",    "bath.temperature"};

std::string qualified(const std::string& name)
{
    if (kParameters.count(name) != 0) return name;
    for (const char* prefix : {"system.", "bath."}) {
        const std::string q = prefix + name;
        if (kParameters.count(q) != 0) return q;
    }
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

double& parameter_ref(SystemParams& s, BathParams& p, const std::string& name)
{
    const std::string q = qualified(name);
    if (q == "system.omega_eg") return s.omega_eg;
    if (q == "system.omega_c") return s.omega_c;
    if (q == "system.g") return s.g;
    if (q == "system.kappa") return s.kappa;
    if (q == "bath.alpha") return p.alpha;
    if (q == "bath.nu_c") return p.nu_c;
    if (q == "bath.mu") return p.mu;
    return p.temperature;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& item : obj.items()) {
        if (allowed.count(item.key()) == 0) throw ConfigError("unknown key '" + where + "." + item.key() + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + where + "." + key + "' has the wrong type");
    }
}

void apply_override(json& root, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::string pointer;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        pointer += "/" + part;
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    try {
        root[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
        throw ConfigError("override '" + key + "': " + e.what());
    }
}

RunConfig from_json(const json& j)
{
    check_keys(j, {"system", "bath", "methods", "routes", "sweep", "derived", "grids", "tolerances",
                   "dephasing_convention", "include_dephasing", "oracle", "outputs", "workers"},
               "config");
    RunConfig c;
    if (j.contains("system")) {
        const json& s = j["system"];
        check_keys(s, {"omega_eg", "omega_c", "g", "kappa"}, "system");
        read(s, "omega_eg", c.system.omega_eg, "system");
        read(s, "omega_c", c.system.omega_c, "system");
        read(s, "g", c.system.g, "system");
        read(s, "kappa", c.system.kappa, "system");
    }
    if (j.contains("bath")) {
        const json& b = j["bath"];
        check_keys(b, {"alpha", "nu_c", "mu", "temperature"}, "bath");
        read(b, "alpha", c.bath.alpha, "bath");
        read(b, "nu_c", c.bath.nu_c, "bath");
        read(b, "mu", c.bath.mu, "bath");
        read(b, "temperature", c.bath.temperature, "bath");
    }
    read(j, "methods", c.methods, "config");
    if (j.contains("routes")) {
        std::vector<std::string> names;
        read(j, "routes", names, "config");
        c.routes.clear();
        for (const auto& n : names) c.routes.push_back(route_from_string(n));
    }
    if (j.contains("sweep")) {
        if (!j["sweep"].is_array()) throw ConfigError("'sweep' must be an array");
        for (const json& a : j["sweep"]) {
            check_keys(a, {"parameter", "values"}, "sweep[]");
            SweepAxis axis;
            read(a, "parameter", axis.parameter, "sweep[]");
            read(a, "values", axis.values, "sweep[]");
            c.sweep.push_back(std::move(axis));
        }
    }
    if (j.contains("derived")) {
        if (!j["derived"].is_array()) throw ConfigError("'derived' must be an array");
        for (const json& a : j["derived"]) {
            check_keys(a, {"parameter", "from", "scale", "offset"}, "derived[]");
            DerivedAxis axis;
            read(a, "parameter", axis.parameter, "derived[]");
            read(a, "from", axis.from, "derived[]");
            read(a, "scale", axis.scale, "derived[]");
            read(a, "offset", axis.offset, "derived[]");
            c.derived.push_back(std::move(axis));
        }
    }
    if (j.contains("grids")) {
        const json& g = j["grids"];
        check_keys(g, {"population", "quadrature", "tau", "spectrum"}, "grids");
        if (g.contains("population")) {
            check_keys(g["population"], {"t_max", "n_t"}, "grids.population");
            read(g["population"], "t_max", c.population.t_max, "grids.population");
            read(g["population"], "n_t", c.population.n_t, "grids.population");
        }
        if (g.contains("quadrature")) {
            check_keys(g["quadrature"], {"nodes", "nu_max_factor"}, "grids.quadrature");
            read(g["quadrature"], "nodes", c.build.quadrature_nodes, "grids.quadrature");
            read(g["quadrature"], "nu_max_factor", c.build.nu_max_factor, "grids.quadrature");
        }
        if (g.contains("tau")) {
            check_keys(g["tau"], {"dt", "tau_max", "decay_tol", "tau_cap"}, "grids.tau");
            read(g["tau"], "dt", c.build.tau.dt, "grids.tau");
            read(g["tau"], "tau_max", c.build.tau.tau_max, "grids.tau");
            read(g["tau"], "decay_tol", c.build.tau.decay_tol, "grids.tau");
            read(g["tau"], "tau_cap", c.build.tau.tau_cap, "grids.tau");
        }
        if (g.contains("spectrum")) {
            const json& s = g["spectrum"];
            check_keys(s, {"omega_window", "omega_step", "dtau", "t_max", "tau_max", "time_cap", "green_function"},
                       "grids.spectrum");
            read(s, "omega_window", c.spectrum.omega_window, "grids.spectrum");
            read(s, "omega_step", c.spectrum.omega_step, "grids.spectrum");
            read(s, "dtau", c.spectrum.dtau, "grids.spectrum");
            read(s, "t_max", c.spectrum.t_max, "grids.spectrum");
            read(s, "tau_max", c.spectrum.tau_max, "grids.spectrum");
            read(s, "time_cap", c.spectrum.time_cap, "grids.spectrum");
            read(s, "green_function", c.spectrum.green_function, "grids.spectrum");
        }
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, {"population_tol", "coherence_tol", "window_trigger", "variational_tol", "variational_damping",
                       "variational_max_iterations"},
                   "tolerances");
        read(t, "population_tol", c.spectrum.population_tol, "tolerances");
        read(t, "coherence_tol", c.spectrum.coherence_tol, "tolerances");
        read(t, "window_trigger", c.spectrum.window_trigger, "tolerances");
        read(t, "variational_tol", c.build.variational.tolerance, "tolerances");
        read(t, "variational_damping", c.build.variational.damping, "tolerances");
        read(t, "variational_max_iterations", c.build.variational.max_iterations, "tolerances");
    }
    if (j.contains("dephasing_convention")) {
        std::string name;
        read(j, "dephasing_convention", name, "config");
        if (name == "as_printed") c.build.dephasing = DephasingConvention::as_printed;
        else if (name == "bose") c.build.dephasing = DephasingConvention::bose;
        else throw ConfigError("dephasing_convention must be 'as_printed' or 'bose'");
    }
    read(j, "include_dephasing", c.build.include_dephasing, "config");
    if (j.contains("oracle")) {
        const json& o = j["oracle"];
        check_keys(o, {"modes", "nu_max", "fock_cutoff", "max_total", "dt", "t_max", "population_tol", "time_cap",
                       "dimension_limit", "initial", "check_convergence", "tolerance"},
                   "oracle");
        read(o, "modes", c.oracle.refinement.M, "oracle");
        read(o, "nu_max", c.oracle.refinement.nu_max, "oracle");
        read(o, "fock_cutoff", c.oracle.refinement.fock_cutoff, "oracle");
        read(o, "max_total", c.oracle.refinement.max_total, "oracle");
        read(o, "dt", c.oracle.options.dt, "oracle");
        read(o, "t_max", c.oracle.options.t_max, "oracle");
        read(o, "population_tol", c.oracle.options.population_tol, "oracle");
        read(o, "time_cap", c.oracle.options.time_cap, "oracle");
        read(o, "dimension_limit", c.oracle.options.dimension_limit, "oracle");
        read(o, "check_convergence", c.oracle.check_convergence, "oracle");
        read(o, "tolerance", c.oracle.tolerance, "oracle");
        if (o.contains("initial")) {
            std::string name;
            read(o, "initial", name, "oracle");
            if (name == "thermal") c.oracle.options.initial = InitialBath::thermal;
            else if (name == "displaced") c.oracle.options.initial = InitialBath::displaced;
            else throw ConfigError("oracle.initial must be 'thermal' or 'displaced'");
        }
    }
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        check_keys(o, {"directory", "spectra", "populations", "diagnostics"}, "outputs");
        std::string dir = c.outputs.directory.string();
        read(o, "directory", dir, "outputs");
        c.outputs.directory = dir;
        read(o, "spectra", c.outputs.spectra, "outputs");
        read(o, "populations", c.outputs.populations, "outputs");
        read(o, "diagnostics", c.outputs.diagnostics, "outputs");
    }
    read(j, "workers", c.workers, "config");
    c.validate();
    return c;
}

bool is_oracle(const std::string& m) { return m == "oracle"; }

std::string point_prefix(const SweepPoint& pt) { return fmt::format("p{:04d}", pt.index); }

std::string axis_label(const std::string& name)
{
    const std::string q = qualified(name);
    return q.substr(q.find('.') + 1);
}

void add_warnings(io::Record& record, const std::vector<std::string>& w)
{
    record.warnings.insert(record.warnings.end(), w.begin(), w.end());
}

struct MethodOutcome {
    std::optional<MasterEquationSpec> spec;
    std::string error;
    double ps{kNaN};
    double bound{kNaN};
};

class PointEvaluator {
public:
    PointEvaluator(const RunConfig& c, const SweepPoint& pt) : c_(c), pt_(pt), dir_(c.outputs.directory) {}

    std::vector<SummaryRow> evaluate()
    {
        std::map<std::string, Spectrum> oracle;
        if (std::any_of(c_.methods.begin(), c_.methods.end(), is_oracle)) run_oracle(oracle);

        std::map<std::string, MethodOutcome> built;
        for (const auto& m : c_.methods) {
            if (!is_oracle(m)) built[m] = build_method(m);
        }
        double pp_bound = kNaN;
        if (auto it = built.find("polariton-polaron"); it != built.end() && it->second.spec) {
            pp_bound = it->second.bound;
        } else if (pt_.system.delta() == 0.0) {
            try {
                pp_bound = bogoliubov_bound(build_polariton_polaron(pt_.system, pt_.bath, c_.build));
            } catch (const std::exception&) {
            }
        }
        for (const auto& m : c_.methods) {
            if (!is_oracle(m)) run_method(m, built[m], pp_bound, oracle);
        }
        return std::move(rows_);
    }

private:
    SummaryRow row(const std::string& method, Route route) const
    {
        SummaryRow r;
        r.point = pt_.index;
        r.coordinates = pt_.coordinates;
        r.method = method;
        r.route = to_string(route);
        r.relative_error = kNaN;
        r.perturbation_strength = kNaN;
        r.bogoliubov_bound = kNaN;
        r.bound_minus_pp = kNaN;
        r.shift = kNaN;
        r.delta_eta = kNaN;
        return r;
    }

    std::filesystem::path file(const std::string& method, const std::string& what) const
    {
        return dir_ / fmt::format("{}_{}_{}", point_prefix(pt_), method, what);
    }

    void fail_all(const std::string& method, const std::string& message)
    {
        for (Route route : c_.routes) {
            SummaryRow r = row(method, route);
            r.error = message;
            rows_.push_back(std::move(r));
        }
    }

    void run_oracle(std::map<std::string, Spectrum>& out)
    {
        OracleResult result;
        try {
            if (c_.oracle.check_convergence) {
                result = converged_oracle(pt_.system, pt_.bath, c_.oracle.refinement, c_.oracle.options, c_.spectrum,
                                          c_.oracle.tolerance);
            } else {
                const OracleRefinement& r = c_.oracle.refinement;
                const double nu_max = r.nu_max > 0.0 ? r.nu_max : 4.0 * pt_.bath.nu_c;
                const DiscreteBath bath = discretize_bath(pt_.bath, r.M, nu_max, r.fock_cutoff, r.max_total);
                result = exact_evolve(pt_.system, bath, pt_.bath.temperature, c_.oracle.options, c_.spectrum);
            }
        } catch (const std::exception& e) {
            fail_all("oracle", e.what());
            return;
        }
        io::Record record;
        record.text["method"] = "oracle";
        record.values["dimension"] = static_cast<double>(result.dimension);
        record.values["cutoff_change"] = result.report.checked ? result.report.cutoff_change : kNaN;
        record.values["modes_change"] = result.report.checked ? result.report.modes_change : kNaN;
        record.text["convergence"] = !result.report.checked ? "unchecked" : result.report.converged ? "converged" : "not converged";
        if (!result.report.detail.empty()) record.text["convergence_detail"] = result.report.detail;
        if (result.report.checked && !result.report.converged) record.warnings.push_back("oracle not converged: " + result.report.detail);

        double shift = kNaN, delta_eta = kNaN;
        try {
            const ShiftRenormalization sr = shift_and_renormalization(extract_peaks(result.cavity_spectrum), pt_.system.g);
            shift = sr.shift;
            delta_eta = sr.delta_eta;
        } catch (const std::exception& e) {
            record.warnings.push_back(std::string("peaks: ") + e.what());
        }
        record.values["shift"] = shift;
        record.values["delta_eta"] = delta_eta;

        if (c_.outputs.populations) io::write_population_csv(file("oracle", "population.csv"), result.grid, result.population);
        for (Route route : c_.routes) {
            const Spectrum& S = route == Route::cavity ? result.cavity_spectrum : result.dipole_spectrum;
            write_spectrum(S, "oracle", route);
            add_warnings(record, S.warnings);
            SummaryRow r = row("oracle", route);
            r.ok = true;
            r.shift = shift;
            r.delta_eta = delta_eta;
            r.warnings = S.warnings.size() + (result.report.checked && !result.report.converged ? 1 : 0);
            rows_.push_back(std::move(r));
            out[to_string(route)] = S;
        }
        if (c_.outputs.diagnostics) io::write_record_json(file("oracle", "diagnostics.json"), record);
    }

    MethodOutcome build_method(const std::string& name) const
    {
        MethodOutcome out;
        try {
            out.spec = build(method_from_string(name), pt_.system, pt_.bath, c_.build);
            out.ps = perturbation_strength(*out.spec);
            out.bound = bogoliubov_bound(*out.spec);
        } catch (const std::exception& e) {
            out.spec.reset();
            out.error = e.what();
        }
        return out;
    }

    void write_spectrum(const Spectrum& S, const std::string& method, Route route) const
    {
        if (!c_.outputs.spectra) return;
        io::write_spectrum_csv(file(method, to_string(route) + ".csv"), S);
        io::write_spectrum_metadata(file(method, to_string(route) + ".json"), S);
    }

    void run_method(const std::string& name, const MethodOutcome& m, double pp_bound,
                    const std::map<std::string, Spectrum>& oracle)
    {
        if (!m.spec) {
            fail_all(name, m.error);
            return;
        }
        const MasterEquationSpec& spec = *m.spec;
        io::Record record;
        record.text["method"] = name;
        record.text["frame"] = to_string(spec.frame);
        record.values["perturbation_strength"] = m.ps;
        record.values["bogoliubov_bound"] = m.bound;
        record.values["bound_minus_pp"] = m.bound - pp_bound;
        record.values["polaron_shift"] = spec.polaron_shift;
        record.values["dephasing_rate"] = spec.dephasing;
        if (spec.profile) {
            record.values["R"] = spec.profile->R;
            record.values["B"] = spec.profile->B;
            record.values["gV"] = spec.profile->gV;
        }

        double shift = kNaN, delta_eta = kNaN;
        std::vector<std::string> common;
        try {
            const Liouvillian L = assemble(spec);
            const StabilityReport stab = L.stability();
            record.values["max_real_eigenvalue"] = stab.max_real;
            record.values["positive_eigenvalues"] = static_cast<double>(stab.positive.size());
            record.values["trace_residual"] = L.trace_residual();
            try {
                const PeakPair peaks = extract_peaks(L);
                const ShiftRenormalization sr = shift_and_renormalization(peaks, spec.system.g);
                shift = sr.shift;
                delta_eta = sr.delta_eta;
                record.values["S_plus"] = peaks.S_plus;
                record.values["S_minus"] = peaks.S_minus;
                record.values["width_plus"] = peaks.width_plus;
                record.values["width_minus"] = peaks.width_minus;
            } catch (const std::exception& e) {
                common.push_back(std::string("peaks: ") + e.what());
            }
            if (c_.outputs.populations) {
                io::write_population_csv(file(name, "population.csv"), c_.population,
                                         exciton_population(spec, c_.population));
            }
        } catch (const std::exception& e) {
            fail_all(name, e.what());
            return;
        }
        record.values["shift"] = shift;
        record.values["delta_eta"] = delta_eta;
        add_warnings(record, common);

        for (Route route : c_.routes) {
            SummaryRow r = row(name, route);
            r.perturbation_strength = m.ps;
            r.bogoliubov_bound = m.bound;
            r.bound_minus_pp = m.bound - pp_bound;
            r.shift = shift;
            r.delta_eta = delta_eta;
            try {
                const Spectrum S = emission_spectrum(spec, route, c_.spectrum);
                write_spectrum(S, name, route);
                add_warnings(record, S.warnings);
                r.warnings = S.warnings.size() + common.size();
                if (auto it = oracle.find(to_string(route)); it != oracle.end()) {
                    r.relative_error = relative_error(it->second, S);
                    record.values["relative_error_" + to_string(route)] = r.relative_error;
                }
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            rows_.push_back(std::move(r));
        }
        if (c_.outputs.diagnostics) io::write_record_json(file(name, "diagnostics.json"), record);
    }

    const RunConfig& c_;
    const SweepPoint& pt_;
    std::filesystem::path dir_;
    std::vector<SummaryRow> rows_;
};

std::string csv_number(double v) { return std::isfinite(v) ? fmt::format("{:.12e}", v) : std::string(); }

std::string csv_text(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_summary(const RunConfig& c, const RunSummary& summary)
{
    std::filesystem::create_directories(c.outputs.directory);
    std::ofstream csv(c.outputs.directory / "summary.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("cannot write summary to '" + c.outputs.directory.string() + "'");
    csv << "point";
    if (!summary.rows.empty()) {
        for (const auto& [name, v] : summary.rows.front().coordinates) csv << ',' << name;
    }
    csv << ",method,route,status,relative_error,perturbation_strength,bogoliubov_bound,bound_minus_pp,shift,delta_eta,"
           "warnings,error\n";
    json rows = json::array();
    for (const auto& r : summary.rows) {
        csv << r.point;
        for (const auto& [name, v] : r.coordinates) csv << ',' << csv_number(v);
        csv << ',' << r.method << ',' << r.route << ',' << (r.ok ? "ok" : "failed") << ',' << csv_number(r.relative_error)
            << ',' << csv_number(r.perturbation_strength) << ',' << csv_number(r.bogoliubov_bound) << ','
            << csv_number(r.bound_minus_pp) << ',' << csv_number(r.shift) << ',' << csv_number(r.delta_eta) << ','
            << r.warnings << ',' << csv_text(r.error) << '\n';
        json j;
        j["point"] = r.point;
        for (const auto& [name, v] : r.coordinates) j[name] = v;
        j["method"] = r.method;
        j["route"] = r.route;
        j["status"] = r.ok ? "ok" : "failed";
        for (const auto& [key, v] : {std::pair<const char*, double>{"relative_error", r.relative_error},
                                     {"perturbation_strength", r.perturbation_strength},
                                     {"bogoliubov_bound", r.bogoliubov_bound},
                                     {"bound_minus_pp", r.bound_minus_pp},
                                     {"shift", r.shift},
                                     {"delta_eta", r.delta_eta}}) {
            j[key] = std::isfinite(v) ? json(v) : json(nullptr);
        }
        j["warnings"] = r.warnings;
        if (!r.error.empty()) j["error"] = r.error;
        rows.push_back(std::move(j));
    }
    std::ofstream js(c.outputs.directory / "summary.json", std::ios::binary | std::ios::trunc);
    js << json{{"rows", rows}, {"failed", summary.failed}}.dump(2) << '\n';
}

bool writable_directory(std::filesystem::path dir)
{
    dir = std::filesystem::absolute(dir);
    while (!dir.empty() && !std::filesystem::exists(dir)) {
        if (dir == dir.parent_path()) break;
        dir = dir.parent_path();
    }
    return std::filesystem::is_directory(dir) && ::access(dir.c_str(), W_OK) == 0;
}

} // namespace

void RunConfig::validate() const
{
    if (methods.empty()) throw ConfigError("methods must not be empty");
    for (const auto& m : methods) {
        if (!is_oracle(m)) method_from_string(m);
    }
    if (routes.empty()) throw ConfigError("routes must not be empty");
    std::set<std::string> axes;
    for (const auto& a : sweep) {
        const std::string q = qualified(a.parameter);
        if (a.values.empty()) throw ConfigError("sweep axis '" + a.parameter + "' has no values");
        if (!axes.insert(q).second) throw ConfigError("sweep axis '" + a.parameter + "' appears twice");
    }
    for (const auto& d : derived) {
        const std::string q = qualified(d.parameter);
        qualified(d.from);
        if (axes.count(q) != 0) throw ConfigError("derived axis '" + d.parameter + "' is also a sweep axis");
    }
    if (population.n_t < 1 || !(population.t_max >= 0.0)) throw ConfigError("grids.population needs n_t >= 1, t_max >= 0");
    if (!(spectrum.omega_window > 0.0) || !(spectrum.omega_step > 0.0)) {
        throw ConfigError("grids.spectrum needs omega_window > 0 and omega_step > 0");
    }
    if (outputs.directory.empty()) throw ConfigError("outputs.directory must not be empty");
    if (oracle.refinement.M > 64) throw ConfigError("oracle.modes must be <= 64");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides)
{
    json j = json::parse(text, nullptr, false, true);
    if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");
    for (const auto& o : overrides) apply_override(j, o);
    return from_json(j);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string default_config_text()
{
    const RunConfig c;
    json j;
    j["system"] = {{"omega_eg", c.system.omega_eg}, {"omega_c", c.system.omega_c}, {"g", c.system.g}, {"kappa", c.system.kappa}};
    j["bath"] = {{"alpha", c.bath.alpha}, {"nu_c", c.bath.nu_c}, {"mu", c.bath.mu}, {"temperature", c.bath.temperature}};
    j["methods"] = c.methods;
    j["routes"] = {"cavity"};
    j["sweep"] = json::array({{{"parameter", "g"}, {"values", {0.57, 2.23, 4.0, 7.91}}},
                              {{"parameter", "temperature"}, {"values", {4.0, 50.0}}}});
    j["derived"] = json::array();
    j["grids"] = {{"population", {{"t_max", c.population.t_max}, {"n_t", c.population.n_t}}},
                  {"quadrature", {{"nodes", c.build.quadrature_nodes}, {"nu_max_factor", c.build.nu_max_factor}}},
                  {"tau", {{"dt", c.build.tau.dt}, {"tau_max", c.build.tau.tau_max}, {"decay_tol", c.build.tau.decay_tol},
                           {"tau_cap", c.build.tau.tau_cap}}},
                  {"spectrum", {{"omega_window", c.spectrum.omega_window}, {"omega_step", c.spectrum.omega_step},
                                {"dtau", c.spectrum.dtau}, {"t_max", c.spectrum.t_max}, {"tau_max", c.spectrum.tau_max},
                                {"time_cap", c.spectrum.time_cap}, {"green_function", c.spectrum.green_function}}}};
    j["tolerances"] = {{"population_tol", c.spectrum.population_tol}, {"coherence_tol", c.spectrum.coherence_tol},
                       {"window_trigger", c.spectrum.window_trigger}, {"variational_tol", c.build.variational.tolerance},
                       {"variational_damping", c.build.variational.damping},
                       {"variational_max_iterations", c.build.variational.max_iterations}};
    j["dephasing_convention"] = "as_printed";
    j["include_dephasing"] = c.build.include_dephasing;
    j["oracle"] = {{"modes", c.oracle.refinement.M}, {"nu_max", c.oracle.refinement.nu_max},
                   {"fock_cutoff", c.oracle.refinement.fock_cutoff}, {"max_total", c.oracle.refinement.max_total},
                   {"dt", c.oracle.options.dt}, {"t_max", c.oracle.options.t_max},
                   {"population_tol", c.oracle.options.population_tol}, {"time_cap", c.oracle.options.time_cap},
                   {"dimension_limit", c.oracle.options.dimension_limit}, {"initial", "thermal"},
                   {"check_convergence", c.oracle.check_convergence}, {"tolerance", c.oracle.tolerance}};
    j["outputs"] = {{"directory", c.outputs.directory.string()}, {"spectra", c.outputs.spectra},
                    {"populations", c.outputs.populations}, {"diagnostics", c.outputs.diagnostics}};
    j["workers"] = c.workers;
    return j.dump(2) + "\n";
}

std::vector<SweepPoint> expand_sweep(const RunConfig& config)
{
    std::vector<SweepPoint> points;
    std::vector<std::size_t> digit(config.sweep.size(), 0);
    for (;;) {
        SweepPoint pt;
        pt.index = points.size();
        pt.system = config.system;
        pt.bath = config.bath;
        for (std::size_t a = 0; a < config.sweep.size(); ++a) {
            const double v = config.sweep[a].values[digit[a]];
            parameter_ref(pt.system, pt.bath, config.sweep[a].parameter) = v;
            pt.coordinates.emplace_back(axis_label(config.sweep[a].parameter), v);
        }
        for (const auto& d : config.derived) {
            const double src = parameter_ref(pt.system, pt.bath, d.from);
            const double v = d.scale * src + d.offset;
            parameter_ref(pt.system, pt.bath, d.parameter) = v;
            pt.coordinates.emplace_back(axis_label(d.parameter), v);
        }
        points.push_back(std::move(pt));
        // Odometer with the last axis fastest.
        std::size_t a = config.sweep.size();
        while (a > 0) {
            --a;
            if (++digit[a] < config.sweep[a].values.size()) break;
            digit[a] = 0;
            if (a == 0) return points;
        }
        if (config.sweep.empty()) return points;
    }
}

RunSummary run(const RunConfig& config)
{
    config.validate();
    const std::vector<SweepPoint> points = expand_sweep(config);
    std::vector<std::vector<SummaryRow>> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                results[i] = PointEvaluator(config, points[i]).evaluate();
            } catch (const std::exception& e) {
                SummaryRow r;
                r.point = points[i].index;
                r.coordinates = points[i].coordinates;
                r.method = "*";
                r.route = "*";
                r.error = e.what();
                results[i] = {r};
            }
        }
    };
    unsigned n = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(points.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    RunSummary summary;
    for (auto& rs : results) {
        for (auto& r : rs) {
            if (!r.ok) ++summary.failed;
            summary.rows.push_back(std::move(r));
        }
    }
    write_summary(config, summary);
    return summary;
}

ValidationReport validate(const RunConfig& config)
{
    ValidationReport report;
    try {
        config.validate();
    } catch (const std::exception& e) {
        report.errors.push_back(e.what());
        return report;
    }
    if (!writable_directory(config.outputs.directory)) {
        report.errors.push_back("output directory '" + config.outputs.directory.string() + "' is not writable");
    }
    if (config.spectrum.dtau > 0.0 && config.spectrum.dtau * config.spectrum.omega_window > 3.14159265358979) {
        report.errors.push_back("grids.spectrum.dtau aliases the requested omega window (dtau * omega_window > pi)");
    }
    const std::vector<SweepPoint> points = expand_sweep(config);
    report.notes.push_back(fmt::format("{} sweep point(s), {} method(s), {} route(s)", points.size(),
                                       config.methods.size(), config.routes.size()));
    for (const auto& pt : points) {
        const std::string where = point_prefix(pt);
        try {
            pt.system.validate();
            pt.bath.validate();
        } catch (const std::exception& e) {
            report.errors.push_back(where + ": " + e.what());
            continue;
        }
        try {
            const QuadratureGrid q = QuadratureGrid::standard(pt.bath, config.build.quadrature_nodes,
                                                              config.build.nu_max_factor);
            const double a = polaron_shift(pt.bath, q);
            const double b = polaron_shift(pt.bath, q.refined());
            if (std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(b))) {
                report.errors.push_back(fmt::format("{}: quadrature not converged (polaron shift changes by {:.3e} on refinement)",
                                                    where, std::abs(a - b)));
            }
            dephasing_rate(pt.bath, q, config.build.dephasing);
        } catch (const std::exception& e) {
            report.errors.push_back(where + ": quadrature probe failed: " + e.what());
        }
        for (const auto& m : config.methods) {
            if (is_oracle(m)) continue;
            try {
                const MasterEquationSpec spec = build(method_from_string(m), pt.system, pt.bath, config.build);
                (void)assemble(spec);
            } catch (const TruncationError& e) {
                report.errors.push_back(where + " " + m + ": truncation violation: " + e.what());
            } catch (const UnsupportedConfiguration& e) {
                report.notes.push_back(where + " " + m + ": will fail: " + e.what());
            } catch (const std::exception& e) {
                report.errors.push_back(where + " " + m + ": " + e.what());
            }
        }
    }
    if (std::any_of(config.methods.begin(), config.methods.end(), is_oracle)) {
        const OracleRefinement& r = config.oracle.refinement;
        const int max_total = r.max_total >= 0 ? r.max_total : r.fock_cutoff * static_cast<int>(r.M);
        std::size_t dim = 3 * bath_state_count(r.M, r.fock_cutoff, max_total);
        std::string detail = fmt::format("M={}, cutoff={}, max_total={}", r.M, r.fock_cutoff, max_total);
        if (config.oracle.check_convergence) {
            const std::size_t M2 = static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(r.M)));
            dim = std::max({dim, 3 * bath_state_count(r.M, 2 * r.fock_cutoff, 2 * max_total),
                            3 * bath_state_count(M2, r.fock_cutoff, max_total)});
            detail += " with refinements";
        }
        if (dim > config.oracle.options.dimension_limit) {
            std::size_t M = r.M;
            while (M > 1 && 3 * bath_state_count(M, r.fock_cutoff, max_total) * (config.oracle.check_convergence ? 4 : 1) >
                                config.oracle.options.dimension_limit) {
                --M;
            }
            report.errors.push_back(fmt::format("oracle dimension {} ({}) exceeds the limit {}; reduce oracle.modes to about {} "
                                                "or lower oracle.max_total",
                                                dim, detail, config.oracle.options.dimension_limit, M));
        } else {
            report.notes.push_back(fmt::format("oracle dimension {} ({})", dim, detail));
        }
    }
    return report;
}

double compare_files(const std::filesystem::path& reference, const std::filesystem::path& test, double window)
{
    return relative_error(io::read_spectrum_csv(reference), io::read_spectrum_csv(test), window);
}

} // namespace pcqed
