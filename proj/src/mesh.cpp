#include "fracstep/mesh.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace fracstep {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(std::string_view field, std::string_view what) {
    try {
        std::size_t used = 0;
        const std::string s(field);
        const double value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidMesh, "mesh spec: cannot read " + std::string(what) + " from '" +
                                                std::string(field) + "'");
    }
}

std::uint64_t parse_count(std::string_view field, std::string_view what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw Error(ErrorKind::InvalidMesh, "mesh spec: cannot read " + std::string(what) + " from '" +
                                                std::string(field) + "'");
    return value;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidMesh, "cannot open mesh file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TimeMesh quasi_uniform_mesh(std::size_t steps, double final_time, double min_fraction, std::uint64_t seed) {
    if (steps == 0) throw Error(ErrorKind::InvalidMesh, "random mesh needs N >= 1");
    if (!(min_fraction > 0.0 && min_fraction <= 1.0))
        throw Error(ErrorKind::InvalidMesh, "random mesh min_fraction must lie in (0, 1]");
    if (!(final_time > 0.0)) throw Error(ErrorKind::InvalidMesh, "random mesh needs T > 0");
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> draw(min_fraction, 1.0);
    Eigen::VectorXd nodes(static_cast<Eigen::Index>(steps) + 1);
    nodes[0] = 0.0;
    for (std::size_t n = 1; n <= steps; ++n) nodes[static_cast<Eigen::Index>(n)] = nodes[n - 1] + draw(engine);
    nodes *= final_time / nodes[static_cast<Eigen::Index>(steps)];
    nodes[static_cast<Eigen::Index>(steps)] = final_time;
    return TimeMesh::from_nodes(std::move(nodes));
}

TimeMesh parse_mesh_spec(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw Error(ErrorKind::InvalidMesh, "mesh spec must look like kind:args, got '" + std::string(spec) + "'");
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view args = spec.substr(colon + 1);
    if (kind == "file") {
        const std::string path(args);
        const std::string text = read_file(path);
        if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return mesh_from_json(text);
        return mesh_from_text(text);
    }
    const auto fields = split(args, ',');
    if (kind == "graded") {
        if (fields.size() != 3) throw Error(ErrorKind::InvalidMesh, "expected graded:N,gamma,T");
        return TimeMesh::graded(parse_count(fields[0], "N"), parse_double(fields[1], "gamma"),
                                parse_double(fields[2], "T"));
    }
    if (kind == "uniform") {
        if (fields.size() != 2) throw Error(ErrorKind::InvalidMesh, "expected uniform:N,T");
        return TimeMesh::graded(parse_count(fields[0], "N"), 1.0, parse_double(fields[1], "T"));
    }
    if (kind == "random") {
        if (fields.size() < 2 || fields.size() > 4)
            throw Error(ErrorKind::InvalidMesh, "expected random:N,seed[,min_fraction[,T]]");
        const double min_fraction = fields.size() > 2 ? parse_double(fields[2], "min_fraction") : 0.6;
        const double final_time = fields.size() > 3 ? parse_double(fields[3], "T") : 1.0;
        return quasi_uniform_mesh(parse_count(fields[0], "N"), final_time, min_fraction,
                                  parse_count(fields[1], "seed"));
    }
    throw Error(ErrorKind::InvalidMesh, "unknown mesh kind '" + std::string(kind) + "'");
}

} // namespace fracstep
