#include "recdep/cli.hpp"

#include "recdep/property_suite.hpp"
#include "recdep/uniform_closed_form.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "CLI11.hpp"

namespace recdep::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void allow_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) fail(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(where + ": missing '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where + "." + key + " must be finite");
    return x;
}

std::uint64_t unsigned_integer(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(where + "." + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

// Library constructors validate with std::invalid_argument; surface those as config errors.
template <class F>
auto checked(F&& make) {
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ModelSpec parse_model(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) fail("model.kind must be a string");
    ModelSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "uniform") {
        allow_keys(j, {"kind"}, "model");
    } else if (spec.kind == "beta") {
        allow_keys(j, {"kind", "a", "b", "sigma_h", "sigma_m"}, "model");
        const BetaFamilyModel::Params d;
        spec.beta = {number(j, "a", "model", d.a), number(j, "b", "model", d.b),
                     number(j, "sigma_h", "model", d.sigma_h), number(j, "sigma_m", "model", d.sigma_m)};
        checked([&] { return BetaFamilyModel(spec.beta).name(); });
    } else {
        fail("model.kind must be 'uniform' or 'beta'");
    }
    return spec;
}

Behavior parse_behavior(const json& doc) {
    int blocks = 0;
    for (const char* k : {"refdep", "lambda", "deviation", "behavior"}) blocks += doc.contains(k) ? 1 : 0;
    if (blocks != 1) fail("exactly one of 'refdep', 'lambda', 'deviation' or 'behavior' is required");

    Behavior b;
    if (doc.contains("refdep")) {
        const json& j = doc.at("refdep");
        allow_keys(j, {"delta_I", "delta_II"}, "refdep");
        b.kind = BehaviorKind::ref_dependent;
        b.rd = checked([&] {
            return ReferenceDependence(number(j, "delta_I", "refdep", 0.0), number(j, "delta_II", "refdep", 0.0));
        });
    } else if (doc.contains("lambda")) {
        const json& j = doc.at("lambda");
        if (!j.is_number()) fail("lambda must be a number");
        b.kind = BehaviorKind::prospect;
        b.loss_aversion = checked([&] { return LossAversion(j.get<double>()); });
    } else if (doc.contains("deviation")) {
        const json& j = doc.at("deviation");
        allow_keys(j, {"d_risky", "d_safe"}, "deviation");
        b.kind = BehaviorKind::deviation_cost;
        b.deviation = checked([&] {
            return DeviationCosts(number(j, "d_risky", "deviation", 0.0), number(j, "d_safe", "deviation", 0.0));
        });
    } else {
        const json& j = doc.at("behavior");
        const std::string kind = j.is_string() ? j.get<std::string>() : "";
        if (kind == "rational")
            b.kind = BehaviorKind::rational;
        else if (kind == "oracle")
            b.kind = BehaviorKind::oracle;
        else
            fail("behavior must be 'rational' or 'oracle'");
    }
    return b;
}

PolicySpec parse_policy(const json& doc) {
    PolicySpec spec;
    if (!doc.contains("policy")) return spec;
    const json& j = doc.at("policy");
    allow_keys(j, {"levels", "thresholds"}, "policy");
    if (j.contains("levels")) {
        const json& l = j.at("levels");
        if (l == 2)
            spec.levels = Levels::two;
        else if (l == 3)
            spec.levels = Levels::three;
        else if (l == "delegate")
            spec.levels = Levels::delegate;
        else
            fail("policy.levels must be 2, 3 or \"delegate\"");
    }
    if (!j.contains("thresholds") || j.at("thresholds") == "optimize") return spec;
    const json& t = j.at("thresholds");
    if (spec.levels == Levels::two) {
        allow_keys(t, {"q_bar"}, "policy.thresholds");
        spec.fixed = TwoLevelPolicy{number(t, "q_bar", "policy.thresholds")};
    } else {
        allow_keys(t, {"q_low", "q_high"}, "policy.thresholds");
        const double lo = number(t, "q_low", "policy.thresholds");
        const double hi = number(t, "q_high", "policy.thresholds");
        spec.fixed = spec.levels == Levels::three ? Policy{ThreeLevelPolicy{lo, hi}} : Policy{DelegationPolicy{lo, hi}};
    }
    checked([&] {
        validate(*spec.fixed);
        return 0;
    });
    return spec;
}

SweepSpec parse_sweep(const json& j, Levels levels) {
    allow_keys(j, {"axis", "values"}, "sweep");
    SweepSpec spec;
    const std::string axis = j.contains("axis") && j.at("axis").is_string() ? j.at("axis").get<std::string>() : "";
    if (axis == "delta_I")
        spec.axis = SweepAxis::delta_I;
    else if (axis == "delta_II")
        spec.axis = SweepAxis::delta_II;
    else if (axis == "lambda")
        spec.axis = SweepAxis::lambda;
    else if (axis == "q_bar")
        spec.axis = SweepAxis::q_bar;
    else
        fail("sweep.axis must be one of delta_I, delta_II, lambda, q_bar");
    if (!j.contains("values") || !j.at("values").is_array()) fail("sweep.values must be an array");
    for (const auto& v : j.at("values")) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) fail("sweep.values must hold finite numbers");
        spec.values.push_back(v.get<double>());
    }
    if (spec.values.empty()) fail("sweep.values must not be empty");
    for (double v : spec.values) {
        if (spec.axis == SweepAxis::lambda && v < 1.0) fail("sweep: lambda values must be >= 1");
        if ((spec.axis == SweepAxis::delta_I || spec.axis == SweepAxis::delta_II) && v < 0.0)
            fail("sweep: delta values must be >= 0");
        if (spec.axis == SweepAxis::q_bar && (v < 0.0 || v > 1.0)) fail("sweep: q_bar values must lie in [0,1]");
    }
    if (spec.axis == SweepAxis::q_bar && levels != Levels::two) fail("sweep: a q_bar axis needs policy.levels = 2");
    return spec;
}

json behavior_json(const Behavior& b) {
    json j = {{"kind", to_string(b.kind)}};
    switch (b.kind) {
        case BehaviorKind::ref_dependent: j["delta"] = {b.rd.delta_I, b.rd.delta_II}; break;
        case BehaviorKind::deviation_cost: j["deviation"] = {b.deviation.d_risky, b.deviation.d_safe}; break;
        case BehaviorKind::prospect: j["lambda"] = b.loss_aversion.lambda; break;
        default: break;
    }
    return j;
}

std::string_view to_string(Levels l) {
    switch (l) {
        case Levels::two: return "2";
        case Levels::three: return "3";
        case Levels::delegate: return "delegate";
    }
    return "?";
}

json policy_json(const Policy& p) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TwoLevelPolicy>)
                return {{"kind", "two_level"}, {"q_bar", v.q_bar}};
            else if constexpr (std::is_same_v<T, ThreeLevelPolicy>)
                return {{"kind", "three_level"}, {"q_low", v.q_low}, {"q_high", v.q_high}};
            else
                return {{"kind", "delegation"}, {"q_low", v.q_low}, {"q_high", v.q_high}};
        },
        p);
}

json header(const char* command, const RunConfig& cfg, const SignalModel& model) {
    return {{"command", command},
            {"schema_version", cfg.schema_version},
            {"model", model.describe()},
            {"costs", {{"c_I", cfg.costs.c_I}, {"c_II", cfg.costs.c_II}}},
            {"behavior", behavior_json(cfg.behavior)},
            {"levels", to_string(cfg.policy.levels)}};
}

json cutoffs_json(const ResponseCutoffs& c, const CostStructure& costs) {
    return {{"p_bar_risky", c.p_bar_risky}, {"p_bar_safe", c.p_bar_safe}, {"p_bar_star", costs.p_bar_star()}};
}

json benchmarks_json(const Benchmarks& b) {
    return {{"oracle_loss", b.oracle_loss},
            {"human_alone_loss", b.human_alone_loss},
            {"machine_alone_loss", b.machine_alone_loss},
            {"no_recommendation_loss", b.no_recommendation_loss}};
}

json report_json(const SimReport& r) {
    json counts = json::array();
    for (auto y : {Outcome::good, Outcome::bad})
        for (auto a : {Action::risky, Action::safe})
            for (auto rec : {Recommendation::risky, Recommendation::safe, Recommendation::dont_know,
                             Recommendation::delegate})
                if (const auto n = r.counts.at(y, a, rec))
                    counts.push_back({{"y", to_string(y)}, {"a", to_string(a)}, {"r", to_string(rec)}, {"n", n}});
    return {{"n_samples", r.n_samples},
            {"mean_loss", r.mean_loss},
            {"stderr", r.stderr_loss},
            {"type_I_rate", r.type_I_rate},
            {"type_II_rate", r.type_II_rate},
            {"adherence_risky", r.adherence_risky},
            {"adherence_safe", r.adherence_safe},
            {"counts", counts}};
}

// Reference dependence equivalent to the behavior, if it is of that form.
std::optional<ReferenceDependence> effective_refdep(const Behavior& b, const CostStructure& costs) {
    switch (b.kind) {
        case BehaviorKind::ref_dependent: return b.rd;
        case BehaviorKind::rational: return ReferenceDependence{};
        case BehaviorKind::prospect: return pt_to_refdep(b.loss_aversion, costs);
        default: return std::nullopt;
    }
}

void write_number(std::ostringstream& os, const json& v) {
    if (v.is_number_unsigned())
        os << v.get<std::uint64_t>();
    else if (v.is_number_integer())
        os << v.get<std::int64_t>();
    else {
        const double x = v.get<double>();
        if (std::isfinite(x))
            os << format_number(x);
        else
            os << "null";
    }
}

void write_json(std::ostringstream& os, const json& v, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    if (v.is_object()) {
        if (v.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            os << (first ? "" : ",") << pad << json(key).dump() << sep;
            write_json(os, item, indent, depth + 1);
            first = false;
        }
        os << close << '}';
    } else if (v.is_array()) {
        if (v.empty()) {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& item : v) {
            os << (first ? "" : ",") << pad;
            write_json(os, item, indent, depth + 1);
            first = false;
        }
        os << close << ']';
    } else if (v.is_number()) {
        write_number(os, v);
    } else {
        os << v.dump();
    }
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number()) {
        std::ostringstream os;
        write_number(os, v);
        return os.str() == "null" ? "" : os.str();
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
    if (v.is_object() && !v.empty()) {
        for (const auto& [key, item] : v.items()) flatten(item, prefix.empty() ? key : prefix + "." + key, out);
    } else if (v.is_array() && !v.empty()) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
    } else {
        out.emplace_back(prefix, v);
    }
}

}  // namespace

std::unique_ptr<SignalModel> ModelSpec::build() const {
    if (kind == "beta") return std::make_unique<BetaFamilyModel>(beta);
    return std::make_unique<UniformModel>();
}

RunConfig parse_config(const json& doc) {
    allow_keys(doc, {"schema_version", "model", "costs", "refdep", "lambda", "deviation", "behavior", "policy", "sim",
                     "sweep", "output"},
               "config");
    RunConfig cfg;
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        fail("schema_version is required");
    cfg.schema_version = doc.at("schema_version").get<int>();
    if (cfg.schema_version != kSchemaVersion)
        fail("unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
             std::to_string(kSchemaVersion) + ")");

    if (!doc.contains("model")) fail("model is required");
    cfg.model = parse_model(doc.at("model"));

    if (!doc.contains("costs")) fail("costs is required");
    const json& c = doc.at("costs");
    allow_keys(c, {"c_I", "c_II"}, "costs");
    cfg.costs = checked([&] { return CostStructure(number(c, "c_I", "costs"), number(c, "c_II", "costs")); });

    cfg.behavior = parse_behavior(doc);
    cfg.policy = parse_policy(doc);

    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        allow_keys(s, {"n", "seed"}, "sim");
        cfg.sim.n = unsigned_integer(s, "n", "sim", cfg.sim.n);
        cfg.sim.seed = unsigned_integer(s, "seed", "sim", cfg.sim.seed);
        if (cfg.sim.n < 1) fail("sim.n must be >= 1");
    }
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"), cfg.policy.levels);

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        allow_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o.at("path").is_string()) fail("output.path must be a string");
            cfg.output.path = o.at("path").get<std::string>();
        }
        if (o.contains("format")) {
            if (o.at("format") == "json")
                cfg.output.format = Format::json;
            else if (o.at("format") == "csv")
                cfg.output.format = Format::csv;
            else
                fail("output.format must be 'json' or 'csv'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    return parse_config(doc);
}

CommandResult cmd_solve(const RunConfig& cfg, bool cross_check) {
    const auto model = cfg.model.build();
    CommandResult result;
    json& rec = result.record;
    rec = header("solve", cfg, *model);
    const ResponseCutoffs cutoffs = behavior_cutoffs(cfg.behavior, cfg.costs);
    rec["cutoffs"] = cutoffs_json(cutoffs, cfg.costs);
    rec["benchmarks"] = benchmarks_json(benchmarks(*model, cfg.costs));

    const auto rd = effective_refdep(cfg.behavior, cfg.costs);
    const bool closed_form = cfg.model.kind == "uniform" && rd && rd->delta_I == 0.0 && !cfg.policy.fixed &&
                             cfg.policy.levels != Levels::delegate;
    const uniform::UniformExample ex{cfg.costs, rd ? rd->delta_II : 0.0};

    Policy policy;
    double loss = 0.0;
    if (cfg.behavior.kind == BehaviorKind::oracle) {
        rec["method"] = "oracle";
        rec["loss"] = model->oracle_loss(cfg.costs);
        return result;
    }
    if (closed_form && cfg.policy.levels == Levels::two) {
        const auto sol = uniform::optimal_threshold_two_level(ex);
        policy = TwoLevelPolicy{sol.q_opt};
        loss = sol.expected_loss;
        rec["h_cutoffs"] = {{"h_bar_risky", sol.h_bar_risky}, {"h_bar_safe", sol.h_bar_safe}};
    } else if (closed_form) {
        const auto sol = uniform::optimal_thresholds_three_level(ex);
        policy = ThreeLevelPolicy{sol.q_low, sol.q_high};
        loss = sol.expected_loss;
    }
    rec["method"] = closed_form ? "closed_form" : (cfg.policy.fixed ? "fixed" : "numeric");

    if (!closed_form || cross_check) {
        const PolicyEvaluation ev = evaluate_policy(*model, cfg.costs, cfg.behavior, cfg.policy.levels, cfg.policy.fixed);
        if (closed_form) {
            auto thresholds = [](const Policy& p) {
                return std::visit(
                    [](const auto& v) -> std::vector<double> {
                        if constexpr (requires { v.q_bar; })
                            return {v.q_bar};
                        else
                            return {v.q_low, v.q_high};
                    },
                    p);
            };
            const auto a = thresholds(policy);
            const auto b = thresholds(ev.policy);
            double threshold_gap = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) threshold_gap = std::max(threshold_gap, std::abs(a[i] - b[i]));
            const double loss_gap = std::abs(loss - ev.loss);
            const bool agree = threshold_gap <= 1e-6 && loss_gap <= 1e-8;
            rec["cross_check"] = {{"numeric_policy", policy_json(ev.policy)},
                                  {"numeric_loss", ev.loss},
                                  {"threshold_gap", threshold_gap},
                                  {"loss_gap", loss_gap},
                                  {"agree", agree}};
            if (!agree) result.exit_code = exit_numeric;
        } else {
            policy = ev.policy;
            loss = ev.loss;
            rec["multimodal_flag"] = ev.multimodal;
            if (cross_check) rec["cross_check"] = "no closed form for this configuration";
        }
    }
    rec["policy"] = policy_json(policy);
    rec["loss"] = loss;
    if (const auto* two = std::get_if<TwoLevelPolicy>(&policy); two && cfg.behavior.kind != BehaviorKind::delegate) {
        try {
            const Adherence a = adherence(*model, *two, cfg.costs, cutoffs);
            rec["adherence"] = {{"risky", a.prob_risky}, {"safe", a.prob_safe}};
        } catch (const std::invalid_argument&) {
            rec["adherence"] = nullptr;
        }
    }
    return result;
}

CommandResult cmd_simulate(const RunConfig& cfg, bool expect_analytic) {
    const auto model = cfg.model.build();
    const PolicyEvaluation ev = evaluate_policy(*model, cfg.costs, cfg.behavior, cfg.policy.levels, cfg.policy.fixed);
    SimConfig sim;
    sim.n_samples = cfg.sim.n;
    sim.seed = cfg.sim.seed;
    sim.behavior = cfg.behavior;
    const SimReport rep = simulate(*model, ev.policy, cfg.costs, sim);

    CommandResult result;
    json& rec = result.record;
    rec = header("simulate", cfg, *model);
    rec["seed"] = cfg.sim.seed;
    rec["policy"] = policy_json(ev.policy);
    rec["analytic_loss"] = ev.loss;
    rec["report"] = report_json(rep);
    if (expect_analytic) {
        const double diff = std::abs(rep.mean_loss - ev.loss);
        const bool pass = rep.stderr_loss > 0.0 ? diff <= 4.0 * rep.stderr_loss : diff <= 1e-12;
        rec["expectation"] = {{"abs_difference", diff}, {"tolerance", 4.0 * rep.stderr_loss}, {"pass", pass}};
        if (!pass) result.exit_code = exit_check_failed;
    }
    return result;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) fail("sweep block is required for the sweep command");
    const auto model = cfg.model.build();
    SweepRequest req;
    req.axis = cfg.sweep->axis;
    req.values = cfg.sweep->values;
    req.levels = cfg.policy.levels;
    req.fixed_policy = cfg.policy.fixed;
    SimConfig sim;
    sim.n_samples = cfg.sim.n;
    sim.seed = cfg.sim.seed;
    sim.behavior = cfg.behavior;
    const auto rows = sweep(*model, cfg.costs, req, sim);

    CommandResult result;
    result.record = json::array();
    for (const auto& r : rows) {
        json row = {{"axis", to_string(req.axis)},
                    {"axis_value", r.axis_value},
                    {"q_opt", nullptr},
                    {"q_low", nullptr},
                    {"q_high", nullptr},
                    {"p_bar_risky", r.cutoffs.p_bar_risky},
                    {"p_bar_safe", r.cutoffs.p_bar_safe},
                    {"analytic_loss", r.analytic_loss},
                    {"mc_loss", r.mc.mean_loss},
                    {"mc_stderr", r.mc.stderr_loss},
                    {"adherence_risky", r.mc.adherence_risky},
                    {"adherence_safe", r.mc.adherence_safe}};
        const json p = policy_json(r.policy);
        if (p.contains("q_bar"))
            row["q_opt"] = p["q_bar"];
        else
            row["q_low"] = p["q_low"], row["q_high"] = p["q_high"];
        result.record.push_back(row);
    }
    return result;
}

CommandResult cmd_verify(const std::vector<std::string>& only) {
    const auto& ids = property_ids();
    std::vector<std::string> selected;
    for (const auto& id : only) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            std::string valid;
            for (const auto& v : ids) valid += (valid.empty() ? "" : ", ") + v;
            fail("unknown property id '" + id + "'; valid ids: " + valid);
        }
        if (std::find(selected.begin(), selected.end(), id) == selected.end()) selected.push_back(id);
    }
    if (selected.empty()) selected = ids;

    CommandResult result;
    json reports = json::array();
    bool pass = true;
    for (const auto& id : selected) {
        const PropertyReport r = run_property(id);
        pass = pass && r.pass;
        reports.push_back(to_json(r));
    }
    result.record = {{"command", "verify"}, {"pass", pass}, {"reports", reports}};
    if (!pass) result.exit_code = exit_check_failed;
    return result;
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string dump_json(const json& value, int indent) {
    std::ostringstream os;
    write_json(os, value, indent, 0);
    if (indent > 0) os << '\n';
    return os.str();
}

std::string sweep_csv(const json& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) os << (i ? "," : "") << kSweepColumns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
            const auto& key = kSweepColumns[i];
            os << (i ? "," : "") << (row.contains(key) ? csv_cell(row.at(key)) : "");
        }
        os << '\n';
    }
    return os.str();
}

std::string flat_csv(const json& record) {
    std::vector<std::pair<std::string, json>> items;
    flatten(record, "", items);
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : items) os << csv_cell(json(k)) << ',' << csv_cell(v) << '\n';
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal recommendation thresholds for reference-dependent decision-makers"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name, only_raw;
    std::vector<std::string> only;
    bool cross_check = false, expect_analytic = false;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
        if (needs_config) opt->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--format", format_name, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* solve = app.add_subcommand("solve", "optimal thresholds, cutoffs, losses and benchmarks");
    add_common(solve, true);
    solve->add_flag("--cross-check", cross_check, "compare the closed form with the numeric solver");
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo report for the configured policy");
    add_common(simulate_cmd, true);
    simulate_cmd->add_flag("--expect-analytic", expect_analytic, "fail unless MC is within 4 stderr of the analytic loss");
    simulate_cmd->add_option("--seed", seed, "override sim.seed");
    auto* sweep_cmd = app.add_subcommand("sweep", "comparative statics along one parameter axis");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--seed", seed, "override sim.seed");
    auto* verify = app.add_subcommand("verify", "run the property suite");
    add_common(verify, false);
    verify->add_option("--only", only, "property id (repeatable or comma separated)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        CommandResult result;
        OutputSpec output;
        bool sweep_output = false;
        if (verify->parsed()) {
            result = cmd_verify(only);
        } else {
            RunConfig cfg = load_config(config_path);
            if (seed) cfg.sim.seed = *seed;
            output = cfg.output;
            if (solve->parsed()) {
                result = cmd_solve(cfg, cross_check);
            } else if (simulate_cmd->parsed()) {
                result = cmd_simulate(cfg, expect_analytic);
            } else {
                result = cmd_sweep(cfg);
                sweep_output = true;
            }
        }
        if (!out_path.empty()) output.path = out_path;
        Format format = output.format.value_or(sweep_output ? Format::csv : Format::json);
        if (!format_name.empty()) format = format_name == "csv" ? Format::csv : Format::json;

        std::string text;
        if (format == Format::json)
            text = dump_json(result.record);
        else
            text = sweep_output ? sweep_csv(result.record) : flat_csv(result.record);

        if (output.path.empty()) {
            out << text;
        } else {
            std::ofstream file(output.path, std::ios::binary);
            if (!file) throw ConfigError("cannot write output file '" + output.path + "'");
            file << text;
        }
        return result.exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const QuadratureError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    }
}

}  // namespace recdep::cli
