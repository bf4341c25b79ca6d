#include "rfem/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rfem/errors.hpp"

namespace rfem {

using nlohmann::json;

namespace {

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

// typed field access with the dotted path in every message
template <typename T>
T get_as(const json& j, const std::string& path)
{
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + path + "': unexpected type " + std::string(j.type_name()));
    }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out)
{
    auto it = obj.find(key);
    if (it != obj.end())
        out = get_as<T>(*it, path + "." + key);
}

void require_object(const json& j, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError("config field '" + path + "': expected an object");
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
{
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key()))
            throw ConfigError("config field '" + path + "." + it.key() + "': unknown field");
}

Interval read_interval(const json& j, const std::string& path)
{
    auto v = get_as<std::vector<double>>(j, path);
    if (v.size() != 2)
        throw ConfigError("config field '" + path + "': expected [lo, hi]");
    return {v[0], v[1]};
}

json load_to_json(const LoadSpec& l)
{
    return {{"family", to_string(l.family)},
            {"value", l.value},
            {"alpha", l.alpha},
            {"s", l.s},
            {"s1", l.s1},
            {"s2", l.s2},
            {"sigma", l.sigma},
            {"mode", l.mode == IntegrationMode::Exact ? "exact" : "quadrature"},
            {"order", l.order}};
}

IntegrationMode mode_from_string(const std::string& s, const std::string& path)
{
    if (s == "exact")
        return IntegrationMode::Exact;
    if (s == "quadrature")
        return IntegrationMode::Quadrature;
    throw ConfigError("config field '" + path + "': expected 'exact' or 'quadrature'");
}

void read_load(const json& j, const std::string& path, LoadSpec& l)
{
    require_object(j, path);
    check_keys(j, path, {"family", "value", "alpha", "s", "s1", "s2", "sigma", "mode", "order"});
    if (j.contains("family"))
        l.family = forcing_family_from_string(get_as<std::string>(j["family"], path + ".family"));
    read(j, "value", path, l.value);
    read(j, "alpha", path, l.alpha);
    read(j, "s", path, l.s);
    read(j, "s1", path, l.s1);
    read(j, "s2", path, l.s2);
    read(j, "sigma", path, l.sigma);
    if (j.contains("mode"))
        l.mode = mode_from_string(get_as<std::string>(j["mode"], path + ".mode"), path + ".mode");
    read(j, "order", path, l.order);
}

ReferenceSource reference_from_string(const std::string& s, const std::string& path)
{
    for (auto r : {ReferenceSource::Analytic, ReferenceSource::Quadrature, ReferenceSource::Table,
                   ReferenceSource::None})
        if (to_string(r) == s)
            return r;
    throw ConfigError("config field '" + path + "': unknown reference source '" + s + "'");
}

json axis_to_json(const AxisSpec& a)
{
    return {{"dist", to_string(a.dist)}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}};
}

AxisSpec axis_from_json(const json& j, const std::string& path)
{
    require_object(j, path);
    check_keys(j, path, {"dist", "lo", "hi", "count"});
    AxisSpec a;
    if (j.contains("dist"))
        a.dist = axis_dist_from_string(get_as<std::string>(j["dist"], path + ".dist"));
    read(j, "lo", path, a.lo);
    read(j, "hi", path, a.hi);
    read(j, "count", path, a.count);
    return a;
}

json schedule_to_json(const LrSchedule& s)
{
    json out = json::array();
    for (const auto& [e, lr] : s.steps)
        out.push_back(json::array({e, lr}));
    return out;
}

LrSchedule schedule_from_json(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw ConfigError("config field '" + path + "': expected a list of [epoch, lr] pairs");
    LrSchedule s;
    s.steps.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2)
            throw ConfigError("config field '" + p + "': expected [epoch, lr]");
        s.steps.emplace_back(get_as<int>(j[i][0], p + "[0]"), get_as<double>(j[i][1], p + "[1]"));
    }
    s.validate();
    return s;
}

} // namespace

// --- problem ----------------------------------------------------------------------

json problem_to_json(const ProblemSpec& p)
{
    json regions = json::array();
    for (const Region& r : p.material.regions)
        regions.push_back({{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}, {"value", r.value}});
    return {{"family", to_string(p.family)},
            {"sigma", p.sigma},
            {"N", p.elements},
            {"dim", p.dim},
            {"domain_x", interval_json(p.domain_x)},
            {"domain_y", interval_json(p.domain_y)},
            {"boundary", to_string(p.boundary)},
            {"material", {{"default", p.material.default_value}, {"regions", regions}}},
            {"load", load_to_json(p.load)},
            {"neumann_g", p.neumann_g},
            {"fixed_x", p.fixed_x},
            {"fixed_y", p.fixed_y},
            {"reference", to_string(p.reference)}};
}

ProblemSpec problem_from_json(const json& j, const std::string& where)
{
    require_object(j, where);
    check_keys(j, where,
               {"family", "sigma", "N", "dim", "domain_x", "domain_y", "boundary", "material", "load", "neumann_g",
                "fixed_x", "fixed_y", "reference", "integration", "order"});
    const Family f = j.contains("family") ? family_from_string(get_as<std::string>(j["family"], where + ".family"))
                                          : Family::Arctan1D;
    std::vector<double> sigma = default_parameters(f);
    read(j, "sigma", where, sigma);
    int N = 32;
    read(j, "N", where, N);
    if (N < 1)
        throw ConfigError("config field '" + where + ".N': must be positive");
    ProblemSpec p = make_problem(f, sigma, N);

    read(j, "dim", where, p.dim);
    if (j.contains("domain_x"))
        p.domain_x = read_interval(j["domain_x"], where + ".domain_x");
    if (j.contains("domain_y"))
        p.domain_y = read_interval(j["domain_y"], where + ".domain_y");
    if (j.contains("boundary"))
        p.boundary = boundary_from_string(get_as<std::string>(j["boundary"], where + ".boundary"));
    if (j.contains("material")) {
        const json& m = j["material"];
        const std::string mp = where + ".material";
        require_object(m, mp);
        check_keys(m, mp, {"default", "regions"});
        read(m, "default", mp, p.material.default_value);
        if (m.contains("regions")) {
            p.material.regions.clear();
            for (std::size_t i = 0; i < m["regions"].size(); ++i) {
                const json& r = m["regions"][i];
                const std::string rp = mp + ".regions[" + std::to_string(i) + "]";
                require_object(r, rp);
                check_keys(r, rp, {"x0", "x1", "y0", "y1", "value"});
                Region reg;
                read(r, "x0", rp, reg.x0);
                read(r, "x1", rp, reg.x1);
                read(r, "y0", rp, reg.y0);
                read(r, "y1", rp, reg.y1);
                read(r, "value", rp, reg.value);
                p.material.regions.push_back(reg);
            }
        }
    }
    if (j.contains("load"))
        read_load(j["load"], where + ".load", p.load);
    if (j.contains("integration"))
        p.load.mode = mode_from_string(get_as<std::string>(j["integration"], where + ".integration"),
                                       where + ".integration");
    read(j, "order", where, p.load.order);
    read(j, "neumann_g", where, p.neumann_g);
    read(j, "fixed_x", where, p.fixed_x);
    read(j, "fixed_y", where, p.fixed_y);
    if (j.contains("reference"))
        p.reference = reference_from_string(get_as<std::string>(j["reference"], where + ".reference"),
                                            where + ".reference");
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config field '" + where + "': " + e.what());
    }
    return p;
}

// --- run config ---------------------------------------------------------------------

json to_json(const RunConfig& c)
{
    json grid = json::array();
    for (const AxisSpec& a : c.grid)
        grid.push_back(axis_to_json(a));
    return {{"command", c.command},
            {"problem", problem_to_json(c.problem)},
            {"solver", to_string(c.solver)},
            {"N_list", c.N_list},
            {"iterations", c.iterations},
            {"log_every", c.log_every},
            {"optimizer", to_string(c.optimizer)},
            {"schedule", schedule_to_json(c.schedule)},
            {"grid", grid},
            {"epochs", c.epochs},
            {"batch", c.batch},
            {"monitor_every", c.monitor_every},
            {"hidden", c.hidden},
            {"train_fraction", c.train_fraction},
            {"monitor_size", c.monitor_size},
            {"resume", c.resume},
            {"landscape",
             {{"alpha", c.landscape.alpha},
              {"s", c.landscape.s},
              {"N", c.landscape.N},
              {"node", c.landscape.node},
              {"points", c.landscape.points},
              {"half_width", c.landscape.half_width},
              {"orders", c.landscape.orders}}},
            {"seed", c.seed},
            {"output", c.output}};
}

RunConfig run_config_from_json(const json& j)
{
    const std::string root = "config";
    require_object(j, root);
    check_keys(j, root,
               {"command", "problem", "solver", "N_list", "iterations", "log_every", "optimizer", "schedule", "grid",
                "epochs", "batch", "monitor_every", "hidden", "train_fraction", "monitor_size", "resume",
                "landscape", "seed", "output"});
    RunConfig c;
    read(j, "command", root, c.command);
    if (j.contains("problem"))
        c.problem = problem_from_json(j["problem"], root + ".problem");
    if (j.contains("solver"))
        c.solver = solve_method_from_string(get_as<std::string>(j["solver"], root + ".solver"));
    read(j, "N_list", root, c.N_list);
    read(j, "iterations", root, c.iterations);
    read(j, "log_every", root, c.log_every);
    if (j.contains("optimizer"))
        c.optimizer = optimizer_from_string(get_as<std::string>(j["optimizer"], root + ".optimizer"));
    if (j.contains("schedule"))
        c.schedule = schedule_from_json(j["schedule"], root + ".schedule");
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_array())
            throw ConfigError("config field 'config.grid': expected a list of axes");
        for (std::size_t i = 0; i < g.size(); ++i)
            c.grid.push_back(axis_from_json(g[i], root + ".grid[" + std::to_string(i) + "]"));
    }
    read(j, "epochs", root, c.epochs);
    read(j, "batch", root, c.batch);
    read(j, "monitor_every", root, c.monitor_every);
    read(j, "hidden", root, c.hidden);
    read(j, "train_fraction", root, c.train_fraction);
    read(j, "monitor_size", root, c.monitor_size);
    read(j, "resume", root, c.resume);
    if (j.contains("landscape")) {
        const json& l = j["landscape"];
        const std::string lp = root + ".landscape";
        require_object(l, lp);
        check_keys(l, lp, {"alpha", "s", "N", "node", "points", "half_width", "orders"});
        read(l, "alpha", lp, c.landscape.alpha);
        read(l, "s", lp, c.landscape.s);
        read(l, "N", lp, c.landscape.N);
        read(l, "node", lp, c.landscape.node);
        read(l, "points", lp, c.landscape.points);
        read(l, "half_width", lp, c.landscape.half_width);
        read(l, "orders", lp, c.landscape.orders);
    }
    read(j, "seed", root, c.seed);
    read(j, "output", root, c.output);

    if (c.iterations < 0 || c.epochs < 0)
        throw ConfigError("config: iterations and epochs must be non-negative");
    if (c.batch < 1 || c.hidden < 1)
        throw ConfigError("config: batch and hidden must be positive");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
        throw ConfigError("config field 'config.train_fraction': must lie in (0, 1)");
    for (int N : c.N_list)
        if (N < 1)
            throw ConfigError("config field 'config.N_list': entries must be positive");
    return c;
}

json parse_json_text(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line and column
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min(e.byte, text.size() + 1);
        for (std::size_t i = 0; i + 1 < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        const auto pos = msg.find("syntax error");
        if (pos != std::string::npos)
            msg = msg.substr(pos);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

// --- presets ------------------------------------------------------------------------

namespace {

const std::map<std::string, json>& presets()
{
    static const std::map<std::string, json> table = {
        {"arctan1d-nonparametric",
         json::parse(R"({"command":"adapt","problem":{"family":"arctan1d","sigma":[10,0.5],"N":32},
                         "iterations":5000,"schedule":[[0,0.01]]})")},
        {"arctan1d-parametric",
         json::parse(R"({"command":"train","problem":{"family":"arctan1d","N":32},
                         "grid":[{"dist":"reversed_log2","lo":1,"hi":50,"count":100},
                                 {"dist":"uniform","lo":0.2,"hi":0.8,"count":100}],
                         "epochs":50,"batch":10,"schedule":[[0,0.01],[20,0.001]]})")},
        {"arctan1d-desk",
         json::parse(R"({"command":"train","problem":{"family":"arctan1d","N":16},
                         "grid":[{"dist":"reversed_log2","lo":1,"hi":50,"count":10},
                                 {"dist":"uniform","lo":0.2,"hi":0.8,"count":10}],
                         "epochs":50,"batch":10,"schedule":[[0,0.01]]})")},
        {"power-nonparametric",
         json::parse(R"({"command":"adapt","problem":{"family":"power","sigma":[0.7],"N":32},
                         "iterations":20000,"schedule":[[0,0.01]]})")},
        {"power-convergence",
         json::parse(R"({"command":"convergence","problem":{"family":"power","sigma":[0.7]},
                         "N_list":[32,64,128,256],"iterations":20000,"schedule":[[0,0.01]]})")},
        {"power-parametric",
         json::parse(R"({"command":"train","problem":{"family":"power","N":32},
                         "grid":[{"dist":"log10","lo":0.51,"hi":5,"count":200}],
                         "epochs":50,"batch":10,"schedule":[[0,0.01]]})")},
        {"two-material-nonparametric",
         json::parse(R"({"command":"adapt","problem":{"family":"two_material","sigma":[10],"N":32},
                         "iterations":10000,"schedule":[[0,0.01]]})")},
        {"two-material-parametric",
         json::parse(R"({"command":"train","problem":{"family":"two_material","N":32},
                         "grid":[{"dist":"log10","lo":1e-4,"hi":1e4,"count":1000}],
                         "epochs":50,"batch":10,"schedule":[[0,0.01],[30,0.001]]})")},
        {"two-material-desk",
         json::parse(R"({"command":"train","problem":{"family":"two_material","N":12},
                         "grid":[{"dist":"log10","lo":1e-4,"hi":1e4,"count":20}],
                         "epochs":150,"batch":10,"schedule":[[0,0.01],[30,0.001]]})")},
        {"arctan2d-nonparametric",
         json::parse(R"({"command":"adapt","problem":{"family":"arctan2d","sigma":[10,0.05,0.05],"N":32},
                         "iterations":2500,"schedule":[[0,0.01]]})")},
        {"arctan2d-parametric",
         json::parse(R"({"command":"train","problem":{"family":"arctan2d","N":32},
                         "grid":[{"dist":"reversed_log2","lo":1,"hi":20,"count":20},
                                 {"dist":"uniform","lo":0.1,"hi":0.9,"count":10},
                                 {"dist":"uniform","lo":0.1,"hi":0.9,"count":10}],
                         "epochs":5,"batch":1,"schedule":[[0,0.01]]})")},
        {"lshape-nonparametric",
         json::parse(R"({"command":"adapt","problem":{"family":"lshape","sigma":[1,1],"N":32},
                         "iterations":100000,"schedule":[[0,0.01]]})")},
        {"lshape-parametric",
         json::parse(R"({"command":"train","problem":{"family":"lshape","N":32},
                         "grid":[{"dist":"log10","lo":0.1,"hi":10,"count":20},
                                 {"dist":"log10","lo":0.1,"hi":10,"count":20}],
                         "epochs":50,"batch":1,"schedule":[[0,0.01]]})")},
        {"landscape",
         json::parse(R"({"command":"landscape","landscape":{"alpha":50,"s":0.5,"N":10,"node":5,"points":200,
                         "half_width":0.1,"orders":[2]}})")},
    };
    return table;
}

} // namespace

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : presets())
        out.push_back(k);
    return out;
}

json preset_json(const std::string& name)
{
    auto it = presets().find(name);
    if (it == presets().end())
        throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

RunConfig load_run_config(const std::string& config_path, const std::string& preset)
{
    json merged = json::object();
    if (!preset.empty())
        merged = preset_json(preset);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("cannot open config " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        merged.merge_patch(parse_json_text(ss.str(), config_path));
    }
    return run_config_from_json(merged);
}

} // namespace rfem
