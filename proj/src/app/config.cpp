#include "app/config.hpp"

#include "conekernel/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace conekernel::app {

namespace {

ParamSpec num(std::string_view name, json def, std::string_view help) {
    return {name, ParamType::number, false, std::move(def), help};
}
ParamSpec req_num(std::string_view name, std::string_view help) {
    return {name, ParamType::number, true, nullptr, help};
}
ParamSpec opt_num(std::string_view name, std::string_view help) {
    return {name, ParamType::number, false, nullptr, help};
}
ParamSpec integer(std::string_view name, std::int64_t def, std::string_view help) {
    return {name, ParamType::integer, false, def, help};
}
ParamSpec boolean(std::string_view name, bool def, std::string_view help) {
    return {name, ParamType::boolean, false, def, help};
}
ParamSpec vec2(std::string_view name, bool required, std::string_view help) {
    return {name, ParamType::vec2, required, nullptr, help};
}

const ParamSpec kKappa = req_num("kappa", "opening angle of the wedge in radians, in (0, 2pi)");
const ParamSpec kAlpha = num("alpha", 0.0, "direction of the center ray in radians");
const ParamSpec kMatrix{"matrix", ParamType::vec3, false, json::array({1.0, 0.0, 1.0}),
                        "coefficient matrix a,b,c for ((a,b),(b,c))"};
const ParamSpec kAmplitude{"amplitude", ParamType::vec3, false, json::array({0.0, 0.0, 0.0}),
                           "A(t) = matrix + amplitude * sin(frequency * t)"};
const ParamSpec kFrequency = num("frequency", 0.0, "angular frequency of the coefficient oscillation");

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw InputError("BAD_ARGUMENT", "not a finite number: '" + text + "'");
    }
    return v;
}

json parse_list(const std::string& text, std::size_t expected, std::string_view name) {
    json out = json::array();
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_double(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.size() != expected) {
        throw InputError("BAD_ARGUMENT", std::string(name) + " expects " + std::to_string(expected) +
                                             " comma-separated numbers");
    }
    return out;
}

bool is_finite_number(const json& v) {
    return v.is_number() && std::isfinite(v.get<double>());
}

void check_type(const ParamSpec& spec, const json& v) {
    const std::string name(spec.name);
    switch (spec.type) {
    case ParamType::number:
        if (!is_finite_number(v)) throw InputError("BAD_ARGUMENT", name + " must be a finite number");
        return;
    case ParamType::integer:
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw InputError("BAD_ARGUMENT", name + " must be a nonnegative integer");
        }
        return;
    case ParamType::boolean:
        if (!v.is_boolean()) throw InputError("BAD_ARGUMENT", name + " must be true or false");
        return;
    case ParamType::vec2:
    case ParamType::vec3: {
        const std::size_t n = spec.type == ParamType::vec2 ? 2 : 3;
        if (!v.is_array() || v.size() != n) {
            throw InputError("BAD_ARGUMENT", name + " must be an array of " + std::to_string(n) + " numbers");
        }
        for (const auto& e : v) {
            if (!is_finite_number(e)) throw InputError("BAD_ARGUMENT", name + " must contain finite numbers");
        }
        return;
    }
    }
}

} // namespace

const std::vector<CommandSpec>& command_table() {
    static const std::vector<CommandSpec> table = {
        {"exponents",
         "critical exponents for constant coefficients and the parabolicity lower bounds",
         {kKappa, kAlpha, kMatrix, opt_num("nu1", "lower parabolicity bound (default: smallest eigenvalue)"),
          opt_num("nu2", "upper parabolicity bound (default: largest eigenvalue)"),
          opt_num("nu", "constant of the older bound (default: min(nu1, 1/nu2))")}},
        {"kappa-tilde", "opening of the transformed wedge by three independent routes", {kKappa, kAlpha, kMatrix}},
        {"eigenvalue-cap", "first Dirichlet eigenvalue of a spherical cap and its two-sided bound", {kKappa}},
        {"kernel-exact",
         "exact Dirichlet heat kernel on a polar grid (constant coefficients)",
         {kKappa, kAlpha, kMatrix, num("tau", 1.0, "elapsed time t - s"), vec2("y", true, "source point x1,x2"),
          vec2("x", false, "optional evaluation point x1,x2"),
          opt_num("r_max", "outer grid radius (default |y| + 6 sqrt(tau))"),
          integer("n_radial", 40, "radial grid points"), integer("n_angular", 24, "angular grid points")}},
        {"kernel-mc",
         "Monte Carlo killed-diffusion density for time-dependent coefficients",
         {kKappa, kAlpha, kMatrix, kAmplitude, kFrequency, num("s", 0.0, "start time"), num("t", 1.0, "end time"),
          vec2("y", true, "start point x1,x2"), integer("n_paths", 100000, "number of paths"),
          num("dt", 0.01, "largest time step, at most (t - s)/100"),
          boolean("bridge", true, "Brownian-bridge crossing correction"),
          num("r_min", 0.0, "inner histogram radius"),
          opt_num("r_max", "outer histogram radius (default |y| + 4 sqrt(t - s))"),
          integer("n_radial", 20, "radial histogram cells"), integer("n_angular", 12, "angular histogram cells")}},
        {"verify-bound",
         "two-weight bound feasibility under grid refinement, plus exponent fits",
         {kKappa, kAlpha, kMatrix, num("tau", 1.0, "elapsed time"),
          num("lambda_plus_factor", 0.9, "lambda+ as a multiple of lambda_c"),
          num("lambda_minus_factor", 0.9, "lambda- as a multiple of lambda_c"),
          num("supercritical_factor", 1.2, "lambda+ multiple for the blow-up trend"),
          num("sigma", 0.125, "Gaussian rate of the envelope"), integer("levels", 4, "refinement levels"),
          num("decay", 1000.0, "kernel decay per refinement level"),
          num("vertex_min", 0.01, "coarsest resolved |x| / sqrt(tau)"),
          num("boundary_min", 0.01, "coarsest resolved rho(x) / sqrt(tau)")}},
        {"duality",
         "forward versus time-reversed Monte Carlo kernel",
         {kKappa, kAlpha, kMatrix, kAmplitude, kFrequency, num("s", 0.0, "start time"), num("t", 1.0, "end time"),
          vec2("x", true, "centroid of the target cell x1,x2"), vec2("y", true, "start point x1,x2"),
          num("cell_dr", 0.1, "radial cell width"), num("cell_dtheta", 0.1, "angular cell width"),
          integer("n_paths", 100000, "paths per direction"), num("dt", 0.01, "largest time step"),
          boolean("bridge", true, "Brownian-bridge crossing correction")}},
    };
    return table;
}

const CommandSpec* find_command(std::string_view name) noexcept {
    for (const auto& c : command_table()) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string flag_name(std::string_view key) {
    std::string f = "--";
    for (char ch : key) f.push_back(ch == '_' ? '-' : ch);
    return f;
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("BAD_CONFIG", "configuration must be a JSON object");
    RunConfig c;
    for (const auto& [key, value] : doc.items()) {
        if (key == "command") {
            if (!value.is_string()) throw InputError("BAD_CONFIG", "command must be a string");
            c.command = value.get<std::string>();
        } else if (key == "parameters") {
            if (!value.is_object()) throw InputError("BAD_CONFIG", "parameters must be an object");
            c.parameters = value;
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw InputError("BAD_CONFIG", "seed must be a nonnegative integer");
            c.seed = value.get<std::uint64_t>();
        } else if (key == "output_dir") {
            if (!value.is_string()) throw InputError("BAD_CONFIG", "output_dir must be a string");
            c.output_dir = value.get<std::string>();
        } else {
            throw InputError("BAD_CONFIG", "unknown configuration key '" + key + "'");
        }
    }
    return c;
}

json config_to_json(const RunConfig& config) {
    json j = json::object();
    j["command"] = config.command;
    j["parameters"] = config.parameters;
    j["seed"] = config.seed;
    j["output_dir"] = config.output_dir;
    return j;
}

json parse_flag_value(const ParamSpec& spec, const std::string& text) {
    switch (spec.type) {
    case ParamType::number:
        return parse_double(text);
    case ParamType::integer: {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || v < 0) {
            throw InputError("BAD_ARGUMENT", std::string(spec.name) + " must be a nonnegative integer");
        }
        return v;
    }
    case ParamType::boolean:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw InputError("BAD_ARGUMENT", std::string(spec.name) + " must be true or false");
    case ParamType::vec2:
        return parse_list(text, 2, spec.name);
    case ParamType::vec3:
        return parse_list(text, 3, spec.name);
    }
    return nullptr;
}

json resolve_parameters(const CommandSpec& spec, const json& given) {
    if (!given.is_object()) throw InputError("BAD_CONFIG", "parameters must be an object");
    for (const auto& [key, value] : given.items()) {
        bool known = false;
        for (const auto& p : spec.params) known = known || p.name == key;
        if (!known) {
            throw InputError("UNKNOWN_PARAMETER",
                             "'" + key + "' is not a parameter of " + std::string(spec.name));
        }
    }
    json out = json::object();
    for (const auto& p : spec.params) {
        const std::string key(p.name);
        if (given.contains(key) && !given[key].is_null()) {
            json v = given[key];
            if (p.type == ParamType::number && v.is_number()) v = v.get<double>();
            check_type(p, v);
            if (p.type == ParamType::vec2 || p.type == ParamType::vec3) {
                for (auto& e : v) e = e.get<double>();
            }
            out[key] = v;
        } else if (p.required) {
            throw InputError("MISSING_PARAMETER", std::string(spec.name) + " requires " + flag_name(p.name));
        } else if (!p.default_value.is_null()) {
            out[key] = p.default_value;
        }
    }
    return out;
}

} // namespace conekernel::app
