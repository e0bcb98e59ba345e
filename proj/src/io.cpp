#include "quermass/io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace quermass {

namespace {

using nlohmann::json;

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing key \"") + key + "\"");
    return j.at(key).get<T>();
}

}  // namespace

int default_file_resolution(int n, int L) { return n <= 3 ? std::max(L + 1, 2 * L + 8) : std::max(L + 1, 10); }

ScalarField field_from_json(const json& j, int resolution_override) {
    const int n = require<int>(j, "n");
    if (n < 2) throw std::invalid_argument("field file: n must be >= 2");
    if (j.contains("coeffs")) {
        const int L = require<int>(j, "L");
        if (L < 0) throw std::invalid_argument("field file: L must be >= 0");
        int res = resolution_override > 0 ? resolution_override
                  : j.contains("grid_resolution") ? j.at("grid_resolution").get<int>()
                                                  : default_file_resolution(n, L);
        SpherePtr s = make_sphere(n, res, L);
        const auto& basis = s->basis();
        Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
        for (const json& e : j.at("coeffs")) {
            int l = require<int>(e, "l"), m = require<int>(e, "m_index");
            if (l < 0 || l > L || m < 0 || m >= basis.multiplicity(l))
                throw std::invalid_argument("field file: coefficient index out of range");
            c[basis.offset(l) + m] = require<double>(e, "value");
        }
        return synthesize(c, s);
    }
    if (j.contains("values")) {
        const int res = require<int>(j, "grid_resolution");
        const int L = j.contains("L") ? j.at("L").get<int>() : -1;
        SpherePtr s = make_sphere(n, res, L);
        auto v = j.at("values").get<std::vector<double>>();
        if (static_cast<int>(v.size()) != s->size())
            throw std::invalid_argument("field file: expected " + std::to_string(s->size()) + " values, got " +
                                        std::to_string(v.size()));
        ScalarField f = field_from_values(s, Eigen::Map<Eigen::VectorXd>(v.data(), s->size()));
        return L >= 0 ? analyze(f, L) : f;
    }
    throw std::invalid_argument("field file: needs \"coeffs\" or \"values\"");
}

json field_to_json(const ScalarField& u) {
    json j;
    j["n"] = u.n();
    j["grid_resolution"] = u.sphere->grid().resolution;
    if (u.coeffs) {
        const auto& basis = u.sphere->basis();
        j["L"] = basis.max_degree();
        json arr = json::array();
        for (int l = 0; l <= basis.max_degree(); ++l)
            for (int m = 0; m < basis.multiplicity(l); ++m) {
                double v = (*u.coeffs)[basis.offset(l) + m];
                if (v != 0.0) arr.push_back({{"l", l}, {"m_index", m}, {"value", v}});
            }
        j["coeffs"] = arr;
    } else {
        j["values"] = std::vector<double>(u.values.data(), u.values.data() + u.values.size());
    }
    return j;
}

StarDomain domain_from_json(const json& j, int resolution_override) {
    ScalarField f = field_from_json(j, resolution_override);
    Eigen::VectorXd center;
    if (j.contains("center")) {
        auto c = j.at("center").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != f.n()) throw std::invalid_argument("domain file: center has wrong length");
        center = Eigen::Map<Eigen::VectorXd>(c.data(), f.n());
    }
    return make_domain(std::move(f), center);
}

json domain_to_json(const StarDomain& K) {
    json j = field_to_json(K.profile);
    j["center"] = std::vector<double>(K.center.data(), K.center.data() + K.center.size());
    return j;
}

bool is_axial_json(const json& j) { return j.contains("zonal_coeffs") || j.contains("theta_nodes"); }

AxialProfile axial_from_json(const json& j) {
    const int n = require<int>(j, "n");
    const int nodes = j.contains("nodes") ? j.at("nodes").get<int>() : 512;
    if (j.contains("zonal_coeffs")) return axial_from_zonal(n, j.at("zonal_coeffs").get<std::vector<double>>(), nodes);
    if (j.contains("theta_nodes")) {
        auto th = j.at("theta_nodes").get<std::vector<double>>();
        auto v = require<std::vector<double>>(j, "values");
        if (th.size() != v.size()) throw std::invalid_argument("axial file: theta_nodes and values differ in length");
        return axial_from_samples(n, th, v, nodes);
    }
    throw std::invalid_argument("axial file: needs \"zonal_coeffs\" or \"theta_nodes\"");
}

json zonal_to_json(const ZonalField& z) { return {{"n", z.n}, {"zonal_coeffs", z.coeffs}}; }

ZonalField zonal_from_json(const json& j) {
    return ZonalField{require<int>(j, "n"), require<std::vector<double>>(j, "zonal_coeffs")};
}

json candidate_to_json(const ConjectureCandidate& c) {
    json j = c.u ? field_to_json(*c.u) : c.zonal ? zonal_to_json(*c.zonal) : json{{"n", c.n}, {"zonal_coeffs", {0.0}}};
    j["ratio"] = c.ratio;
    j["constraint_margin"] = c.constraint_margin;
    j["grad_norm_inf"] = c.grad_norm_inf;
    j["feasible"] = c.feasible;
    return j;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace quermass
