#include "urlab/cli.hpp"

#include "parallel.hpp"
#include "urlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace urlab::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 5> kCommands{{
    {Command::check, "check"},
    {Command::scan, "scan"},
    {Command::minimize, "minimize"},
    {Command::compare, "compare"},
    {Command::divergence, "divergence"},
}};

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

double parse_double(const std::string& s, const std::string& ctx) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        config_error(ctx + ": not a number: '" + s + "'");
    }
    if (used != s.size()) config_error(ctx + ": not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& ctx) {
    const double v = parse_double(s, ctx);
    if (v != std::floor(v) || std::abs(v) > 1e9) config_error(ctx + ": not an integer: '" + s + "'");
    return static_cast<int>(v);
}

// "a", "bi", "a+bi", "a-bi", "i", "-i".
cplx parse_complex_literal(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) config_error("empty complex literal");
    if (s.back() != 'i') return {parse_double(s, "complex"), 0.0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = split == std::string::npos ? "" : s.substr(0, split);
    std::string im = split == std::string::npos ? s : s.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : parse_double(re, "complex"), parse_double(im, "complex")};
}

struct Call {
    std::string name;
    std::vector<std::string> args;
};

Call parse_call(const std::string& s) {
    Call c;
    const auto open = s.find('(');
    if (open == std::string::npos) {
        c.name = s;
        return c;
    }
    if (s.back() != ')') config_error("malformed builder '" + s + "'");
    c.name = s.substr(0, open);
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::string cur;
    for (char ch : inner) {
        if (ch == ',') {
            c.args.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!inner.empty()) c.args.push_back(cur);
    return c;
}

void expect_args(const Call& c, std::size_t lo, std::size_t hi) {
    if (c.args.size() < lo || c.args.size() > hi) {
        config_error("builder '" + c.name + "' takes " + std::to_string(lo) +
                     (hi != lo ? ".." + std::to_string(hi) : std::string{}) + " argument(s)");
    }
}

int twice(double v, const std::string& ctx) {
    const double t = 2.0 * v;
    if (t != std::round(t) || t < 0.0) config_error(ctx + ": expected a non-negative integer or half-integer");
    return static_cast<int>(std::lround(t));
}

int twice(const std::string& s, const std::string& ctx) { return twice(parse_double(s, ctx), ctx); }

ComplexMatrix parse_matrix(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) config_error(ctx + ": expected a row-major matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) config_error(ctx + ": ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c]);
    }
    return m;
}

ComplexVector parse_vector(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) config_error(ctx + ": expected a vector");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = parse_complex(j[k]);
    return v;
}

GaussianParams gaussian_from_json(const json& j) {
    if (j.is_string()) {
        const Call c = parse_call(j.get<std::string>());
        if (c.name == "coherent") {
            expect_args(c, 1, 1);
            return {parse_complex_literal(c.args[0]), 0.0, 0.0};
        }
        if (c.name == "squeezed") {
            expect_args(c, 2, 3);
            return {parse_complex_literal(c.args[0]), parse_double(c.args[1], "squeezed r"),
                    c.args.size() > 2 ? parse_double(c.args[2], "squeezed phi") : 0.0};
        }
        if (c.name == "vacuum") return {};
        config_error("'" + c.name + "' is not a Gaussian-family state");
    }
    if (!j.is_object()) config_error("Gaussian slot must be a string, object or null");
    GaussianParams p;
    if (j.contains("alpha")) p.alpha = parse_complex(j["alpha"]);
    p.r = j.value("r", 0.0);
    p.phi = j.value("phi", 0.0);
    return p;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const GaussianParams& p) { return {{"alpha", to_json(p.alpha)}, {"r", p.r}, {"phi", p.phi}}; }

json to_json(const URReport& r) {
    return {{"ur", std::string(to_string(r.id))},
            {"n", r.n},
            {"m", r.m},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"slack", r.slack},
            {"saturated", r.saturated},
            {"violated", r.violated()},
            {"tol", r.tol},
            {"inputs_digest", r.inputs_digest}};
}

json to_json(const std::optional<Counterexample>& c) {
    if (!c) return nullptr;
    return {{"inputs", c->inputs},
            {"slack_a", c->slack_a},
            {"slack_b", c->slack_b},
            {"measure_a", c->measure_a},
            {"measure_b", c->measure_b}};
}

UrSpec ur_from_json(const json& j) {
    UrSpec spec;
    std::string name;
    if (j.is_string()) {
        name = j.get<std::string>();
    } else if (j.is_object() && j.contains("id")) {
        name = j["id"].get<std::string>();
        spec.order = j.value("order", 0);
        const std::string form = j.value("form", std::string("consistent"));
        if (form == "literal") {
            spec.form = TwoMForm::literal;
        } else if (form != "consistent") {
            config_error("unknown type_2_m form '" + form + "'");
        }
    } else {
        config_error("UR entry must be a name or an object with \"id\"");
    }
    const auto id = ur_from_string(name);
    if (!id) config_error("unknown UR '" + name + "'");
    spec.id = *id;
    if (spec.order < 0) config_error("order must be >= 0");
    return spec;
}

std::vector<UrSpec> urs_from_config(const json& doc) {
    if (!doc.contains("urs")) config_error("missing \"urs\"");
    const json& u = doc["urs"];
    std::vector<UrSpec> out;
    if (u.is_string() && u.get<std::string>() == "all") {
        for (int k = 0; k <= static_cast<int>(UrId::lemma2_superadditive); ++k) out.push_back(UrSpec{static_cast<UrId>(k)});
        return out;
    }
    if (!u.is_array() || u.empty()) config_error("\"urs\" must be \"all\" or a non-empty list");
    for (const auto& e : u) out.push_back(ur_from_json(e));
    return out;
}

bool is_lemma2(UrId id) { return id == UrId::lemma2_entangled || id == UrId::lemma2_superadditive; }

Lemma2Flavor flavor(UrId id) {
    return id == UrId::lemma2_entangled ? Lemma2Flavor::entangled : Lemma2Flavor::superadditive;
}

std::vector<Observable> observables_from(const json& doc, int dim) {
    std::vector<Observable> out;
    if (!doc.contains("observables")) return out;
    if (!doc["observables"].is_array()) config_error("\"observables\" must be a list");
    for (const auto& e : doc["observables"]) out.push_back(build_observable(e, dim));
    return out;
}

std::vector<QuantumState> states_from(const json& doc, int dim) {
    std::vector<QuantumState> out;
    if (!doc.contains("states")) return out;
    if (!doc["states"].is_array()) config_error("\"states\" must be a list");
    for (const auto& e : doc["states"]) out.push_back(build_state(e, dim));
    return out;
}

template <class T>
std::vector<T> pick(const std::vector<T>& all, const json& entry, const char* key, int arity, const std::string& ur) {
    std::vector<T> out;
    if (entry.is_object() && entry.contains(key)) {
        for (const auto& idx : entry[key]) {
            const auto k = idx.get<std::size_t>();
            if (k >= all.size()) config_error(ur + ": " + key + " index " + std::to_string(k) + " out of range");
            out.push_back(all[k]);
        }
        return out;
    }
    if (arity < 0) return all;
    if (static_cast<int>(all.size()) < arity) {
        config_error(ur + " needs " + std::to_string(arity) + " " + key + ", config has " + std::to_string(all.size()));
    }
    return {all.begin(), all.begin() + arity};
}

URReport evaluate_any(const UrSpec& spec, std::span<const Observable> obs, std::span<const QuantumState> states,
                      const Tolerances& tol) {
    if (!is_lemma2(spec.id)) return evaluate(spec, obs, states, tol);
    std::vector<GramUR> grams;
    for (const auto& s : states) grams.push_back(robertson_matrix(obs, s));
    return lemma2_ur(grams, spec.order, flavor(spec.id), tol);
}

json header(const RunConfig& cfg) {
    return {{"tool", kToolName},
            {"version", kVersion},
            {"command", std::string(to_string(cfg.command))},
            {"config", cfg.doc},
            {"resolved", {{"seed", cfg.seed}, {"hilbert_dim", cfg.hilbert_dim}, {"ensemble_size", cfg.ensemble_size}}}};
}

// Rows carry "violated"; summary counts them and tracks the smallest slack.
RunResult finish(json report, const json& rows, const char* slack_key = "slack") {
    std::size_t fail = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_digest;
    for (const auto& r : rows) {
        if (r.value("violated", false)) ++fail;
        if (r.contains(slack_key) && r[slack_key].is_number() && r[slack_key].get<double>() < worst) {
            worst = r[slack_key].get<double>();
            worst_digest = r.value("inputs_digest", std::string{});
        }
    }
    report["rows"] = rows;
    report["summary"] = {{"rows", rows.size()},
                         {"pass", rows.size() - fail},
                         {"fail", fail},
                         {"worst_slack", std::isfinite(worst) ? json(worst) : json(nullptr)},
                         {"worst_inputs_digest", worst_digest}};
    return {std::move(report), fail ? kExitViolation : kExitOk};
}

std::pair<int, int> dims_from(const json& j, std::pair<int, int> dflt) {
    if (!j.contains("dims")) return dflt;
    const auto& d = j["dims"];
    if (!d.is_array() || d.size() != 2) config_error("\"dims\" must be [lo, hi]");
    const int lo = d[0].get<int>(), hi = d[1].get<int>();
    if (lo < 2 || hi < lo || hi > 512) config_error("\"dims\" must satisfy 2 <= lo <= hi <= 512");
    return {lo, hi};
}

}  // namespace

std::optional<Command> command_from_string(std::string_view s) {
    for (const auto& [c, n] : kCommands)
        if (n == s) return c;
    return std::nullopt;
}

std::string_view to_string(Command c) {
    for (const auto& [k, n] : kCommands)
        if (k == c) return n;
    return "?";
}

cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex_literal(j.get<std::string>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    config_error("complex number must be [re, im], a number or a literal like \"1-2i\"");
}

Observable build_observable(const json& j, int hilbert_dim) {
    if (j.is_object()) {
        if (!j.contains("raw_matrix")) config_error("observable object needs \"raw_matrix\"");
        return make_observable(j.value("name", std::string("raw")), parse_matrix(j["raw_matrix"], "raw_matrix"));
    }
    if (!j.is_string()) config_error("observable must be a builder string or {\"raw_matrix\": ...}");
    const Call c = parse_call(j.get<std::string>());
    const HilbertDim n(hilbert_dim);
    if (c.name == "fock_q") return fock_operators(n).q;
    if (c.name == "fock_p") return fock_operators(n).p;
    if (c.name == "quad_plus") return quad_plus(n);
    if (c.name == "quad_mix") return quad_mix(n);
    if (c.name == "spin_jx" || c.name == "spin_jy" || c.name == "spin_jz") {
        expect_args(c, 1, 1);
        const auto ops = spin_operators(twice(c.args[0], c.name));
        return c.name == "spin_jx" ? ops.jx : c.name == "spin_jy" ? ops.jy : ops.jz;
    }
    config_error("unknown observable builder '" + c.name + "'");
}

QuantumState build_state(const json& j, int hilbert_dim) {
    if (j.is_object()) {
        const std::string label = j.value("label", std::string{});
        if (j.contains("raw_vector")) {
            return PureState::from(parse_vector(j["raw_vector"], "raw_vector"), label.empty() ? "raw" : label,
                                   j.value("normalize", false));
        }
        if (j.contains("raw_density")) {
            return DensityMatrix::from(parse_matrix(j["raw_density"], "raw_density"), label.empty() ? "raw" : label);
        }
        if (j.contains("builder")) {
            const std::string b = j["builder"].get<std::string>();
            if (b == "coherent" || b == "squeezed") return make_gaussian(gaussian_from_json(j), HilbertDim(hilbert_dim));
            config_error("unknown state builder '" + b + "'");
        }
        config_error("state object needs \"raw_vector\", \"raw_density\" or \"builder\"");
    }
    if (!j.is_string()) config_error("state must be a builder string or an object");
    const Call c = parse_call(j.get<std::string>());
    const HilbertDim n(hilbert_dim);
    if (c.name == "vacuum") return fock_state(0, n);
    if (c.name == "fock_n") {
        expect_args(c, 1, 1);
        return fock_state(parse_int(c.args[0], "fock_n"), n);
    }
    if (c.name == "coherent") {
        expect_args(c, 1, 1);
        return coherent_state(parse_complex_literal(c.args[0]), n);
    }
    if (c.name == "squeezed") {
        const GaussianParams p = gaussian_from_json(j);
        return squeezed_state(p.alpha, p.r, p.phi, n);
    }
    if (c.name == "spin_m") {
        expect_args(c, 2, 2);
        const double m = parse_double(c.args[1], "spin_m m");
        const int tm = twice(std::abs(m), "spin_m m");
        return spin_state(twice(c.args[0], "spin_m j"), m < 0 ? -tm : tm);
    }
    config_error("unknown state builder '" + c.name + "'");
}

std::uint64_t resolve_seed(const Overrides& o, const json& doc) {
    if (o.seed) return *o.seed;
    if (o.env_seed && !o.env_seed->empty()) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(*o.env_seed, &used);
            if (used == o.env_seed->size()) return v;
        } catch (const std::exception&) {
        }
        config_error(std::string(kSeedEnv) + " is not an unsigned integer: '" + *o.env_seed + "'");
    }
    if (doc.contains("seed")) {
        const json& sd = doc["seed"];
        if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<std::int64_t>() < 0)) config_error("\"seed\" must be a non-negative integer");
        return doc["seed"].get<std::uint64_t>();
    }
    return kDefaultSeed;
}

RunConfig parse_config(Command command, const json& doc, const Overrides& o) {
    if (!doc.is_object()) config_error("config must be a JSON object");
    RunConfig cfg;
    cfg.command = command;
    cfg.doc = doc;
    if (doc.contains("command")) {
        const auto c = command_from_string(doc["command"].get<std::string>());
        if (!c) config_error("unknown command '" + doc["command"].get<std::string>() + "'");
        if (*c != command) config_error("config is for '" + doc["command"].get<std::string>() + "'");
    }
    cfg.seed = resolve_seed(o, doc);
    cfg.hilbert_dim = o.dim ? *o.dim : doc.value("hilbert_dim", kDefaultHilbertDim);
    if (cfg.hilbert_dim < 2 || cfg.hilbert_dim > 512) config_error("hilbert_dim must lie in [2, 512]");
    if (doc.contains("ensemble_size")) {
        const long long s = doc["ensemble_size"].get<long long>();
        if (s < 1) config_error("ensemble_size must be >= 1");
        cfg.ensemble_size = static_cast<std::size_t>(s);
    }
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        cfg.tol.herm = t.value("herm", cfg.tol.herm);
        cfg.tol.psd = t.value("psd", cfg.tol.psd);
        cfg.tol.slack = t.value("slack", cfg.tol.slack);
        if (!(cfg.tol.herm > 0 && cfg.tol.psd > 0 && cfg.tol.slack > 0)) config_error("tolerances must be positive");
    }
    return cfg;
}

RunResult run_check(const RunConfig& cfg) {
    const auto urs = urs_from_config(cfg.doc);
    const auto obs = observables_from(cfg.doc, cfg.hilbert_dim);
    const auto states = states_from(cfg.doc, cfg.hilbert_dim);
    json rows = json::array();
    for (std::size_t k = 0; k < urs.size(); ++k) {
        const UrSpec& spec = urs[k];
        const json& entry = cfg.doc["urs"].is_array() ? cfg.doc["urs"][k] : json{};
        const auto o = pick(obs, entry, "observables", observable_arity(spec.id), spec.name());
        const auto s = pick(states, entry, "states", state_arity(spec.id), spec.name());
        rows.push_back(to_json(evaluate_any(spec, o, s, cfg.tol)));
    }
    return finish(header(cfg), rows);
}

RunResult run_scan(const RunConfig& cfg) {
    const auto urs = urs_from_config(cfg.doc);
    const json sc = cfg.doc.value("scan", json::object());
    const auto [lo, hi] = dims_from(sc, {2, 8});
    const int n_any = sc.value("n_obs", 3);
    const int m_any = sc.value("m", 3);
    const bool mixed = sc.value("mixed", true);
    const std::string family = sc.value("observables", std::string("random"));
    if (family != "random" && family != "spin") config_error("scan.observables must be \"random\" or \"spin\"");
    if (n_any < 1 || m_any < 1) config_error("scan.n_obs and scan.m must be >= 1");

    json rows = json::array();
    for (std::size_t u = 0; u < urs.size(); ++u) {
        const UrSpec& spec = urs[u];
        const int n = observable_arity(spec.id) < 0 ? n_any : observable_arity(spec.id);
        const int m = state_arity(spec.id) < 0 ? m_any : state_arity(spec.id);
        const bool mix = mixed && admits_mixed(spec.id);
        Ensemble ens;
        if (family == "spin") {
            const int tj = twice(sc.value("spin_j", 1.0), "scan.spin_j");
            if (n > 3) config_error("spin family provides 3 observables, " + spec.name() + " needs " + std::to_string(n));
            auto ops = std::make_shared<const std::vector<Observable>>([&] {
                const auto s = spin_operators(tj);
                std::vector<Observable> v{s.jx, s.jy, s.jz};
                v.erase(v.begin() + n, v.end());
                return v;
            }());
            const std::uint64_t seed = cfg.seed;
            ens = Ensemble{cfg.ensemble_size, [ops, tj, m, mix, seed](std::size_t i) {
                               std::vector<QuantumState> st;
                               for (int k = 0; k < m; ++k) {
                                   const std::uint64_t s = derive_seed(seed, 200 + k, i);
                                   if (mix && (s >> 63)) {
                                       st.emplace_back(sample_density(tj + 1, s));
                                   } else {
                                       st.emplace_back(sample_pure(tj + 1, s));
                                   }
                               }
                               return Instance{ops, std::move(st)};
                           }};
        } else {
            ens = random_ensemble(cfg.ensemble_size, n, m, lo, hi, mix, cfg.seed);
        }

        std::vector<URReport> reports(ens.size);
        detail::parallel_for(ens.size, [&](std::size_t i) {
            const Instance inst = ens.make(i);
            reports[i] = evaluate_any(spec, *inst.observables, inst.states, cfg.tol);
        });

        std::size_t violations = 0, saturated = 0;
        double worst = std::numeric_limits<double>::infinity(), max_abs = 0.0;
        std::string worst_digest;
        for (const auto& r : reports) {
            violations += r.violated();
            saturated += r.saturated;
            max_abs = std::max(max_abs, std::abs(r.slack));
            if (r.slack < worst) {
                worst = r.slack;
                worst_digest = r.inputs_digest;
            }
        }
        rows.push_back({{"ur", spec.name()},
                        {"instances", ens.size},
                        {"n", n},
                        {"m", m},
                        {"mixed", mix},
                        {"violations", violations},
                        {"saturated", saturated},
                        {"worst_slack", worst},
                        {"max_abs_slack", max_abs},
                        {"violated", violations > 0},
                        {"inputs_digest", worst_digest}});
    }
    return finish(header(cfg), rows, "worst_slack");
}

RunResult run_minimize(const RunConfig& cfg) {
    const auto urs = urs_from_config(cfg.doc);
    const json mc = cfg.doc.value("minimize", json::object());
    if (mc.value("family", std::string("gaussian")) != "gaussian") config_error("minimize.family must be \"gaussian\"");
    auto obs = observables_from(cfg.doc, cfg.hilbert_dim);
    if (obs.empty()) {
        const auto qp = fock_operators(HilbertDim(cfg.hilbert_dim));
        obs = {qp.q, qp.p};
    }
    json rows = json::array();
    for (std::size_t k = 0; k < urs.size(); ++k) {
        const UrSpec& spec = urs[k];
        if (is_lemma2(spec.id)) config_error(spec.name() + " cannot be minimized over states");
        const json& entry = cfg.doc["urs"].is_array() ? cfg.doc["urs"][k] : json{};
        MinimizeSpec ms;
        ms.ur = spec;
        ms.observables = pick(obs, entry, "observables", observable_arity(spec.id), spec.name());
        ms.dim = HilbertDim(cfg.hilbert_dim);
        ms.seed = cfg.seed;
        ms.restarts = mc.value("restarts", ms.restarts);
        ms.budget = mc.value("budget", ms.budget);
        ms.alpha_max = mc.value("alpha_max", ms.alpha_max);
        ms.r_max = mc.value("r_max", ms.r_max);
        ms.tol = cfg.tol;
        if (ms.restarts < 1 || ms.budget < 1 || !(ms.alpha_max > 0) || !(ms.r_max > 0)) {
            config_error("minimize: restarts, budget, alpha_max and r_max must be positive");
        }
        if (mc.contains("slots")) {
            for (const auto& s : mc["slots"]) {
                ms.slots.push_back(s.is_null() ? std::nullopt : std::optional<GaussianParams>(gaussian_from_json(s)));
            }
        } else {
            const int m = state_arity(spec.id) < 0 ? mc.value("m", 2) : state_arity(spec.id);
            ms.slots.assign(static_cast<std::size_t>(m), std::nullopt);
        }
        if (mc.contains("init")) {
            for (const auto& s : mc["init"]) ms.init.push_back(gaussian_from_json(s));
        }
        const MinimizationResult res = minimize_slack(ms);
        json params = json::array();
        for (const auto& p : res.params) params.push_back(to_json(p));
        json row = to_json(res.report);
        row["ur"] = spec.name();
        row["params"] = params;
        row["iterations"] = res.iterations;
        row["converged"] = res.converged;
        rows.push_back(row);
    }
    return finish(header(cfg), rows);
}

RunResult run_compare(const RunConfig& cfg) {
    const json cc = cfg.doc.value("compare", json::object());
    if (!cc.contains("a") || !cc.contains("b")) config_error("compare needs \"a\" and \"b\"");
    const UrSpec a = ur_from_json(cc["a"]);
    const UrSpec b = ur_from_json(cc["b"]);
    if (is_lemma2(a.id) || is_lemma2(b.id)) config_error("compare takes observable/state relations");
    const std::string measure_name = cc.value("measure", std::string("relative"));
    if (measure_name != "relative" && measure_name != "absolute") config_error("compare.measure must be relative or absolute");
    const SlackMeasure measure = measure_name == "relative" ? SlackMeasure::relative : SlackMeasure::absolute;

    const json ec = cc.value("ensemble", json{{"kind", "random"}});
    const std::string kind = ec.value("kind", std::string("random"));
    Ensemble ens;
    std::string digest;
    if (kind == "coherent_grid") {
        if (observable_arity(a.id) != 1) config_error("coherent_grid ensembles need a one-observable relation");
        const auto obs = observables_from(cfg.doc, cfg.hilbert_dim);
        if (obs.empty()) config_error("coherent_grid needs one entry in \"observables\"");
        const double lo = ec.value("lo", -2.0), hi = ec.value("hi", 2.0), step = ec.value("step", 0.5);
        ens = coherent_pair_grid(obs[0], lo, hi, step, HilbertDim(cfg.hilbert_dim));
        digest = "coherent_grid|obs=" + obs[0].name + "|lo=" + json(lo).dump() + "|hi=" + json(hi).dump() +
                 "|step=" + json(step).dump() + "|N=" + std::to_string(cfg.hilbert_dim);
    } else if (kind == "random") {
        const auto [lo, hi] = dims_from(ec, {2, 8});
        const int n = std::max(1, observable_arity(a.id) < 0 ? ec.value("n_obs", 3) : observable_arity(a.id));
        const int m = std::max(1, state_arity(a.id) < 0 ? ec.value("m", 3) : state_arity(a.id));
        const bool mixed = ec.value("mixed", false) && admits_mixed(a.id) && admits_mixed(b.id);
        ens = random_ensemble(cfg.ensemble_size, n, m, lo, hi, mixed, cfg.seed);
        digest = "random|dims=" + std::to_string(lo) + ".." + std::to_string(hi) + "|size=" +
                 std::to_string(cfg.ensemble_size) + "|seed=" + std::to_string(cfg.seed);
    } else {
        config_error("compare.ensemble.kind must be coherent_grid or random");
    }
    const PrecisionStats st = compare_precision(a, b, ens, measure, cfg.tol);
    json row = {{"a", a.name()},
                {"b", b.name()},
                {"measure", measure_name},
                {"size", st.size},
                {"a_tighter", st.a_tighter},
                {"b_tighter", st.b_tighter},
                {"ties", st.ties},
                {"fraction_a_tighter", st.fraction_a_tighter},
                {"violations", st.violations},
                {"violated", st.violations > 0},
                {"a_tighter_example", to_json(st.a_tighter_example)},
                {"b_tighter_example", to_json(st.b_tighter_example)},
                {"inputs_digest", digest}};
    return finish(header(cfg), json::array({row}));
}

RunResult run_divergence(const RunConfig& cfg) {
    const json dc = cfg.doc.value("divergence", json::object());
    const std::string vname = dc.value("variant", std::string("a"));
    if (vname != "a" && vname != "b") config_error("divergence.variant must be \"a\" or \"b\"");
    const Variant v = vname == "a" ? Variant::a : Variant::b;
    const auto obs = observables_from(cfg.doc, cfg.hilbert_dim);
    if (obs.empty()) config_error("divergence needs one entry in \"observables\"");
    std::vector<PureState> states;
    for (const auto& s : states_from(cfg.doc, cfg.hilbert_dim)) {
        const auto* p = std::get_if<PureState>(&s);
        if (!p) throw InputError("divergence: state '" + state_label(s) + "' is not pure");
        states.push_back(*p);
    }
    if (states.size() < 2) config_error("divergence needs at least two states");

    json rows = json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double dij = divergence(obs[0], states[i], states[j], v, cfg.tol);
            const double dji = divergence(obs[0], states[j], states[i], v, cfg.tol);
            rows.push_back({{"x", obs[0].name},
                            {"psi1", states[i].label()},
                            {"psi2", states[j].label()},
                            {"variant", vname},
                            {"d", dij},
                            {"d_swapped", dji},
                            {"symmetric", std::abs(dij - dji) <= cfg.tol.slack * std::max(1.0, dij)},
                            {"violated", false},
                            {"inputs_digest", std::string("divergence|obs=") + obs[0].name + "|states=" +
                                                  states[i].label() + "," + states[j].label()}});
        }
    }
    RunResult res = finish(header(cfg), rows, "d");
    if (dc.value("triangle", false)) {
        const TriangleScan t = divergence_triangle_scan(obs[0], states, v);
        res.report["triangle"] = {{"triples", t.triples}, {"violations", t.violations}, {"rate", t.rate()}};
    }
    return res;
}

RunResult run(Command command, const std::string& config_text, const Overrides& o) {
    auto error = [&](int code, const char* kind, const std::string& msg) {
        json report = {{"tool", kToolName},
                       {"version", kVersion},
                       {"command", std::string(to_string(command))},
                       {"error", {{"kind", kind}, {"message", msg}}}};
        return RunResult{std::move(report), code};
    };
    try {
        const json doc = json::parse(config_text);
        const RunConfig cfg = parse_config(command, doc, o);
        switch (command) {
            case Command::check: return run_check(cfg);
            case Command::scan: return run_scan(cfg);
            case Command::minimize: return run_minimize(cfg);
            case Command::compare: return run_compare(cfg);
            case Command::divergence: return run_divergence(cfg);
        }
        return error(kExitConfig, "config", "unknown command");
    } catch (const ConfigError& e) {
        return error(kExitConfig, "config", e.what());
    } catch (const json::exception& e) {
        return error(kExitConfig, "config", e.what());
    } catch (const InputError& e) {
        return error(kExitInput, "input", e.what());
    } catch (const NumericError& e) {
        return error(kExitNumeric, "numeric", e.what());
    } catch (const std::exception& e) {
        return error(kExitNumeric, "numeric", e.what());
    }
}

}  // namespace urlab::cli
