#include "hpvem/errors.hpp"
#include "hpvem/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hpvem {

namespace {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void write_mesh(std::ostream& out, const PolyMesh& mesh, const std::vector<int>* layers,
                const std::vector<int>* degrees)
{
    out << "polymesh 1\n";
    for (const Point& p : mesh.vertices()) {
        out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
    }
    for (const auto& loop : mesh.cells()) {
        out << 'c';
        for (int v : loop) {
            out << ' ' << v;
        }
        out << '\n';
    }
    if (layers != nullptr) {
        for (int j : *layers) {
            out << "layer " << j << '\n';
        }
    }
    if (degrees != nullptr) {
        for (int p : *degrees) {
            out << "deg " << p << '\n';
        }
    }
}

void write_mesh_file(const std::string& path, const PolyMesh& mesh, const std::vector<int>* layers,
                     const std::vector<int>* degrees)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open mesh file for writing: " + path);
    }
    write_mesh(out, mesh, layers, degrees);
    if (!out) {
        throw IoError("failed writing mesh file: " + path);
    }
}

MeshFile read_mesh(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("polymesh 1", 0) != 0) {
        throw IoError("mesh file must start with 'polymesh 1'");
    }
    std::vector<Point> vertices;
    std::vector<std::vector<int>> cells;
    std::vector<int> layers;
    std::vector<int> degrees;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') {
            continue;
        }
        if (key == "v") {
            double x = 0.0, y = 0.0;
            if (!(ls >> x >> y)) {
                throw IoError("malformed vertex on line " + std::to_string(lineno));
            }
            vertices.emplace_back(x, y);
        } else if (key == "c") {
            std::vector<int> loop;
            int v = 0;
            while (ls >> v) {
                loop.push_back(v);
            }
            cells.push_back(std::move(loop));
        } else if (key == "layer") {
            int j = 0;
            if (!(ls >> j)) {
                throw IoError("malformed layer on line " + std::to_string(lineno));
            }
            layers.push_back(j);
        } else if (key == "deg") {
            int p = 0;
            if (!(ls >> p)) {
                throw IoError("malformed degree on line " + std::to_string(lineno));
            }
            degrees.push_back(p);
        } else {
            throw IoError("unknown record '" + key + "' on line " + std::to_string(lineno));
        }
    }
    MeshFile file;
    file.mesh = PolyMesh(std::move(vertices), std::move(cells), "file");
    if (!layers.empty()) {
        if (static_cast<int>(layers.size()) != file.mesh.num_cells()) {
            throw IoError("layer count does not match cell count");
        }
        file.layers = std::move(layers);
    }
    if (!degrees.empty()) {
        if (static_cast<int>(degrees.size()) != file.mesh.num_cells()) {
            throw IoError("degree count does not match cell count");
        }
        file.degrees = std::move(degrees);
    }
    return file;
}

MeshFile read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open mesh file: " + path);
    }
    return read_mesh(in);
}

} // namespace hpvem
