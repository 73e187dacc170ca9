#include <json.hpp>

#include <cmath>
#include <sstream>

#include "fracstep/mesh.hpp"
#include "fracstep/soe.hpp"

namespace fracstep {

using nlohmann::json;

std::string mesh_to_text(const TimeMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < mesh.nodes().size(); ++i) out << mesh.nodes()[i] << '\n';
    return out.str();
}

TimeMesh mesh_from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<double> nodes;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        double value = 0.0;
        std::string rest;
        if (!(fields >> value) || (fields >> rest))
            throw Error(ErrorKind::InvalidMesh, "mesh text: bad line '" + line + "'");
        nodes.push_back(value);
    }
    return TimeMesh::from_nodes(nodes);
}

std::string mesh_to_json(const TimeMesh& mesh) {
    const auto& n = mesh.nodes();
    return json(std::vector<double>(n.data(), n.data() + n.size())).dump();
}

TimeMesh mesh_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        const json& array = doc.is_object() ? doc.at("nodes") : doc;
        return TimeMesh::from_nodes(array.get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidMesh, std::string("mesh JSON: ") + e.what());
    }
}

std::string soe_to_json(const SOEApprox& approx) {
    json doc;
    doc["alpha"] = approx.alpha;
    doc["eps"] = approx.eps;
    doc["delta_t"] = approx.delta_t;
    doc["T"] = approx.T;
    doc["certified_error"] = approx.certified_error;
    doc["nodes"] = std::vector<double>(approx.nodes.data(), approx.nodes.data() + approx.nodes.size());
    doc["weights"] = std::vector<double>(approx.weights.data(), approx.weights.data() + approx.weights.size());
    return doc.dump(2);
}

SOEApprox soe_from_json(std::string_view text) {
    SOEApprox approx;
    std::vector<double> nodes, weights;
    try {
        const json doc = json::parse(text);
        approx.alpha = doc.at("alpha").get<double>();
        approx.eps = doc.at("eps").get<double>();
        approx.delta_t = doc.at("delta_t").get<double>();
        approx.T = doc.at("T").get<double>();
        approx.certified_error = doc.value("certified_error", 0.0);
        nodes = doc.at("nodes").get<std::vector<double>>();
        weights = doc.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Domain, std::string("SOE JSON: ") + e.what());
    }
    if (nodes.size() != weights.size() || nodes.empty())
        throw Error(ErrorKind::LengthMismatch, "SOE JSON: nodes and weights differ in length");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!(nodes[i] > 0.0 && weights[i] > 0.0))
            throw Error(ErrorKind::Domain, "SOE JSON: nodes and weights must be positive");
    approx.nodes = Eigen::Map<const Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
    approx.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return approx;
}

} // namespace fracstep
