#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedfem/errors.hpp"

namespace fedfem::app {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

/// Object view that remembers which keys were read, so leftovers can be rejected.
class Object {
public:
    Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) fail(at(key), "required field is missing");
        return *v;
    }

    double number(const std::string& key) { return as_number(require(key), at(key)); }

    std::optional<double> optional_number(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return as_number(*v, at(key));
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = require(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) fail(at(key), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

/// [[T, v1, ..., va], ...] into a table of the given arity.
PropertyTable table(const json& j, const std::string& path, int arity) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [temperature, value...] rows");
    std::vector<double> temps;
    std::vector<double> values;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        const std::vector<double> row = number_array(j[r], row_path);
        if (row.size() != static_cast<std::size_t>(arity) + 1) {
            fail(row_path, "expected " + std::to_string(arity + 1) + " numbers (temperature then " +
                               std::to_string(arity) + " value" + (arity > 1 ? "s" : "") + ")");
        }
        temps.push_back(row[0]);
        values.insert(values.end(), row.begin() + 1, row.end());
    }
    try {
        return PropertyTable(std::move(temps), std::move(values), arity);
    } catch (const MaterialError& e) {
        fail(path, e.what());
    }
}

SymmetryClass symmetry_from(const std::string& s, const std::string& path) {
    if (s == "isotropic") return SymmetryClass::isotropic;
    if (s == "orthotropic") return SymmetryClass::orthotropic;
    if (s == "anisotropic") return SymmetryClass::anisotropic;
    fail(path, "expected isotropic, orthotropic or anisotropic, got '" + s + "'");
}

MaterialModel parse_material(const json& j, const std::string& path) {
    Object o(j, path);
    const double density = o.number("density");
    if (!(density > 0.0)) fail(o.at("density"), "must be positive");

    const json& cj = o.require("specific_heat");
    PropertyTable specific_heat = cj.is_number() ? PropertyTable::constant(cj.get<double>())
                                                 : table(cj, o.at("specific_heat"), 1);

    Object k(o.require("conductivity"), o.at("conductivity"));
    const SymmetryClass symmetry = symmetry_from(k.string("symmetry"), k.at("symmetry"));
    const int a = arity(symmetry);
    const json* value = k.find("value");
    const json* rows = k.find("table");
    if ((value != nullptr) == (rows != nullptr)) fail(k.at("value"), "give exactly one of 'value' or 'table'");
    PropertyTable conductivity = PropertyTable::constant(0.0);
    if (value) {
        std::vector<double> v = value->is_number() ? std::vector<double>{value->get<double>()}
                                                    : number_array(*value, k.at("value"));
        if (v.size() != static_cast<std::size_t>(a)) {
            fail(k.at("value"), std::string(to_string(symmetry)) + " conductivity needs " + std::to_string(a) +
                                    " value" + (a > 1 ? "s" : ""));
        }
        conductivity = PropertyTable::constant(v);
    } else {
        conductivity = table(*rows, k.at("table"), a);
    }
    k.finish();
    o.finish();
    try {
        return MaterialModel(density, std::move(specific_heat), std::move(conductivity), symmetry);
    } catch (const MaterialError& e) {
        fail(path, e.what());
    }
}

BoundaryRecord parse_record(const json& j, const std::string& path) {
    Object o(j, path);
    const std::string type = o.string("type");
    BoundaryRecord record;
    if (type == "dirichlet") {
        record = DirichletBC{o.string("node_set"), o.number("temperature")};
    } else if (type == "flux") {
        record = FluxBC{o.string("node_set"), o.number("watts_per_node")};
    } else if (type == "convection") {
        ConvectionBC c{o.string("facet_set"), o.number("h"), o.number("ambient")};
        if (!(c.h >= 0.0)) fail(o.at("h"), "must be >= 0");
        record = c;
    } else if (type == "radiation") {
        RadiationBC r{o.string("facet_set"), o.number("emissivity"), o.number("ambient"),
                      o.optional_number("absolute_zero").value_or(kAbsoluteZeroCelsius),
                      o.optional_number("stefan_boltzmann").value_or(kStefanBoltzmann)};
        if (!(r.emissivity >= 0.0 && r.emissivity <= 1.0)) fail(o.at("emissivity"), "must lie in [0, 1]");
        if (!(r.stefan_boltzmann > 0.0)) fail(o.at("stefan_boltzmann"), "must be positive");
        if (!(r.ambient > r.absolute_zero)) fail(o.at("ambient"), "must exceed absolute_zero");
        record = r;
    } else {
        fail(o.at("type"), "expected dirichlet, flux, convection or radiation, got '" + type + "'");
    }
    o.finish();
    return record;
}

TimeConfig parse_time(const json& j, const std::string& path) {
    Object o(j, path);
    TimeConfig t;
    t.dt = o.number("dt");
    if (!(t.dt > 0.0)) fail(o.at("dt"), "must be positive");
    t.duration = o.optional_number("duration");
    if (t.duration && !(*t.duration > 0.0)) fail(o.at("duration"), "must be positive");
    t.steady_tolerance = o.optional_number("steady_tolerance").value_or(t.steady_tolerance);
    if (!(t.steady_tolerance >= 0.0)) fail(o.at("steady_tolerance"), "must be >= 0");
    t.stop_on_steady = o.boolean("stop_on_steady", false);
    t.strict_stability = o.boolean("strict_stability", false);
    o.finish();
    if (!t.duration && !t.stop_on_steady) fail(path, "needs a duration or stop_on_steady = true");
    return t;
}

OutputConfig parse_output(const json& j, const std::string& path, const std::filesystem::path& base_dir) {
    Object o(j, path);
    OutputConfig out;
    if (const json* every = o.find("every")) {
        if (!every->is_number_integer() || every->get<long long>() < 1) fail(o.at("every"), "must be an integer >= 1");
        out.every = every->get<std::size_t>();
    }
    if (o.find("directory")) out.directory = o.string("directory");
    if (o.find("format")) {
        const std::string f = o.string("format");
        if (f == "csv") {
            out.format = SnapshotFormat::csv;
        } else if (f == "vtk") {
            out.format = SnapshotFormat::vtk;
        } else {
            fail(o.at("format"), "expected csv or vtk, got '" + f + "'");
        }
    }
    o.finish();
    out.directory = base_dir / out.directory;
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    Object root(j, "");
    const std::string mesh = root.string("mesh");
    MaterialModel material = parse_material(root.require("material"), "material");
    const double t0 = root.number("initial_temperature");

    BoundarySpec spec;
    if (const json* bcs = root.find("boundary_conditions")) {
        if (!bcs->is_array()) fail("boundary_conditions", "expected an array");
        for (std::size_t i = 0; i < bcs->size(); ++i) {
            spec.records.push_back(parse_record((*bcs)[i], "boundary_conditions[" + std::to_string(i) + "]"));
        }
    }
    TimeConfig time = parse_time(root.require("time"), "time");
    OutputConfig output;
    if (const json* o = root.find("output")) {
        output = parse_output(*o, "output", base_dir);
    } else {
        output.directory = base_dir / output.directory;
    }
    root.finish();
    return RunConfig{.mesh = base_dir / mesh,
                     .material = std::move(material),
                     .initial_temperature = t0,
                     .boundary = std::move(spec),
                     .time = time,
                     .output = std::move(output)};
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

}  // namespace fedfem::app
