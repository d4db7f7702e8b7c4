#include "fedfem/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <Eigen/Geometry>

#include "fedfem/element_kernels.hpp"
#include "fedfem/errors.hpp"

namespace fedfem {

std::string_view to_string(ElementKind kind) noexcept { return kind == ElementKind::tet4 ? "tet4" : "hex8"; }

Facet::Facet(std::initializer_list<NodeIndex> nodes) : Facet(std::span<const NodeIndex>(nodes.begin(), nodes.size())) {}

Facet::Facet(std::span<const NodeIndex> nodes) {
    if (nodes.size() != 3 && nodes.size() != 4) {
        throw MeshError("facet must have 3 or 4 nodes, got " + std::to_string(nodes.size()));
    }
    std::copy(nodes.begin(), nodes.end(), nodes_.begin());
    size_ = nodes.size();
}

bool operator==(const Facet& a, const Facet& b) noexcept {
    return std::ranges::equal(a.nodes(), b.nodes());
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(ElementKind kind, std::vector<Point> nodes, std::vector<NodeIndex> connectivity, NodeSets node_sets,
           FacetSets facet_sets)
    : kind_(kind),
      nodes_(std::move(nodes)),
      connectivity_(std::move(connectivity)),
      node_sets_(std::move(node_sets)),
      facet_sets_(std::move(facet_sets)) {
    const auto k = static_cast<std::size_t>(nodes_per_element());
    if (connectivity_.size() % k != 0) {
        throw MeshError("connectivity length " + std::to_string(connectivity_.size()) + " is not a multiple of " +
                        std::to_string(k));
    }
    const auto n = nodes_.size();
    for (std::size_t e = 0; e < num_elements(); ++e) {
        for (const NodeIndex v : element(e)) {
            if (v >= n) {
                throw MeshError("element " + std::to_string(e + 1) + " references node " + std::to_string(v + 1) +
                                " but the mesh has " + std::to_string(n) + " nodes");
            }
        }
        try {
            (void)element_kernel(*this, e);
        } catch (const MeshError& err) {
            throw MeshError("element " + std::to_string(e + 1) + ": " + err.what());
        }
    }
    for (const auto& [name, members] : node_sets_) {
        if (name.empty()) throw MeshError("node set with empty name");
        std::vector<NodeIndex> sorted = members;
        std::ranges::sort(sorted);
        if (std::ranges::adjacent_find(sorted) != sorted.end()) {
            throw MeshError("node set '" + name + "' contains duplicate nodes");
        }
        if (!sorted.empty() && sorted.back() >= n) {
            throw MeshError("node set '" + name + "' references node " + std::to_string(sorted.back() + 1) +
                            " out of range");
        }
    }
    for (const auto& [name, facets] : facet_sets_) {
        if (name.empty()) throw MeshError("facet set with empty name");
        for (const Facet& f : facets) {
            for (const NodeIndex v : f.nodes()) {
                if (v >= n) {
                    throw MeshError("facet set '" + name + "' references node " + std::to_string(v + 1) +
                                    " out of range");
                }
            }
            std::array<NodeIndex, 4> sorted{};
            std::ranges::copy(f.nodes(), sorted.begin());
            std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(f.size()));
            if (std::adjacent_find(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(f.size())) !=
                sorted.begin() + static_cast<std::ptrdiff_t>(f.size())) {
                throw MeshError("facet set '" + name + "' has a facet with repeated nodes");
            }
            try {
                (void)facet_area(f, nodes_);
            } catch (const MeshError& err) {
                throw MeshError("facet set '" + name + "': " + err.what());
            }
        }
    }
}

const std::vector<NodeIndex>& Mesh::node_set(std::string_view name) const {
    const auto it = node_sets_.find(name);
    if (it == node_sets_.end()) throw ConfigError("unknown node set '" + std::string(name) + "'");
    return it->second;
}

const std::vector<Facet>& Mesh::facet_set(std::string_view name) const {
    const auto it = facet_sets_.find(name);
    if (it == facet_sets_.end()) throw ConfigError("unknown facet set '" + std::string(name) + "'");
    return it->second;
}

double Mesh::element_volume(std::size_t e) const { return element_kernel(*this, e).scale; }

double Mesh::total_volume() const {
    double total = 0.0;
    for (std::size_t e = 0; e < num_elements(); ++e) total += element_volume(e);
    return total;
}

bool operator==(const Mesh& a, const Mesh& b) {
    return a.kind_ == b.kind_ && a.nodes_ == b.nodes_ && a.connectivity_ == b.connectivity_ &&
           a.node_sets_ == b.node_sets_ && a.facet_sets_ == b.facet_sets_;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            column = 1;
            ++i;
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++column;
        } else {
            const std::size_t start = i;
            const std::size_t start_col = column;
            while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' && text[i] != '\n' &&
                   text[i] != '#') {
                ++i;
                ++column;
            }
            tokens.push_back({text.substr(start, i - start), line, start_col});
        }
    }
    return tokens;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    Mesh parse() {
        auto header = record(2, "mesh-version header");
        if (header[0].text != "mesh-version") fail(header[0], "expected 'mesh-version'");
        if (unsigned_value(header[1]) != 1) fail(header[1], "unsupported mesh version");

        auto nodes_header = record(2, "nodes header");
        if (nodes_header[0].text != "nodes") fail(nodes_header[0], "expected 'nodes'");
        const auto n = unsigned_value(nodes_header[1]);
        std::vector<Point> nodes;
        nodes.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = record(4, "node record 'id x y z'");
            expect_id(row[0], i + 1);
            nodes.emplace_back(real_value(row[1]), real_value(row[2]), real_value(row[3]));
        }

        auto elem_header = record(3, "elements header");
        if (elem_header[0].text != "elements") fail(elem_header[0], "expected 'elements'");
        ElementKind kind;
        if (elem_header[1].text == "tet4") {
            kind = ElementKind::tet4;
        } else if (elem_header[1].text == "hex8") {
            kind = ElementKind::hex8;
        } else {
            fail(elem_header[1], "unknown element kind '" + std::string(elem_header[1].text) + "'");
        }
        const auto m = unsigned_value(elem_header[2]);
        const auto k = static_cast<std::size_t>(nodes_per_element(kind));
        std::vector<NodeIndex> connectivity;
        connectivity.reserve(m * k);
        for (std::size_t e = 0; e < m; ++e) {
            auto row = record(k + 1, std::string(to_string(kind)) + " element record");
            expect_id(row[0], e + 1);
            for (std::size_t j = 1; j <= k; ++j) connectivity.push_back(node_ref(row[j], n));
        }

        Mesh::NodeSets node_sets;
        Mesh::FacetSets facet_sets;
        while (pos_ < tokens_.size()) {
            auto head = record(3, "set header 'nodeset|facetset NAME COUNT'");
            const std::string name(head[1].text);
            const auto count = unsigned_value(head[2]);
            if (head[0].text == "nodeset") {
                if (node_sets.contains(name)) fail(head[1], "duplicate node set name '" + name + "'");
                std::vector<NodeIndex> members;
                members.reserve(count);
                for (std::size_t i = 0; i < count; ++i) {
                    if (pos_ >= tokens_.size()) fail_at_end("node set '" + name + "' truncated");
                    members.push_back(node_ref(tokens_[pos_++], n));
                }
                node_sets.emplace(name, std::move(members));
            } else if (head[0].text == "facetset") {
                if (facet_sets.contains(name)) fail(head[1], "duplicate facet set name '" + name + "'");
                std::vector<Facet> facets;
                facets.reserve(count);
                for (std::size_t i = 0; i < count; ++i) {
                    if (pos_ >= tokens_.size()) fail_at_end("facet set '" + name + "' truncated");
                    const Token& size_token = tokens_[pos_];
                    const auto size = unsigned_value(size_token);
                    if (size != 3 && size != 4) fail(size_token, "facet must have 3 or 4 nodes");
                    auto row = record(size + 1, "facet record 'k n1 .. nk'");
                    std::array<NodeIndex, 4> ids{};
                    for (std::size_t j = 0; j < size; ++j) ids[j] = node_ref(row[j + 1], n);
                    facets.emplace_back(std::span<const NodeIndex>(ids.data(), size));
                }
                facet_sets.emplace(name, std::move(facets));
            } else if (head[0].text == "elements") {
                fail(head[0], "only one elements section is allowed per mesh");
            } else {
                fail(head[0], "expected 'nodeset' or 'facetset'");
            }
        }
        return Mesh(kind, std::move(nodes), std::move(connectivity), std::move(node_sets), std::move(facet_sets));
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& what) const { throw ParseError(t.line, t.column, what); }

    [[noreturn]] void fail_at_end(const std::string& what) const {
        const std::size_t line = tokens_.empty() ? 1 : tokens_.back().line;
        const std::size_t col = tokens_.empty() ? 1 : tokens_.back().column + tokens_.back().text.size();
        throw ParseError(line, col, what + ": unexpected end of input");
    }

    /// Next `count` tokens, which must make up one whole line.
    std::vector<Token> record(std::size_t count, const std::string& what) {
        if (pos_ >= tokens_.size()) fail_at_end("expected " + what);
        const std::size_t line = tokens_[pos_].line;
        std::vector<Token> out;
        while (out.size() < count) {
            if (pos_ >= tokens_.size() || tokens_[pos_].line != line) {
                const Token& last = tokens_[pos_ - 1];
                throw ParseError(last.line, last.column + last.text.size(),
                                 what + ": expected " + std::to_string(count) + " fields, found " +
                                     std::to_string(out.size()));
            }
            out.push_back(tokens_[pos_++]);
        }
        if (pos_ < tokens_.size() && tokens_[pos_].line == line) {
            fail(tokens_[pos_], what + ": expected " + std::to_string(count) + " fields, found extra token '" +
                                    std::string(tokens_[pos_].text) + "'");
        }
        return out;
    }

    std::size_t unsigned_value(const Token& t) const {
        std::size_t v = 0;
        const auto* end = t.text.data() + t.text.size();
        const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
        if (ec != std::errc{} || ptr != end) fail(t, "expected a non-negative integer, got '" + std::string(t.text) + "'");
        return v;
    }

    double real_value(const Token& t) const {
        double v = 0.0;
        const auto* end = t.text.data() + t.text.size();
        const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
            fail(t, "expected a finite number, got '" + std::string(t.text) + "'");
        }
        return v;
    }

    void expect_id(const Token& t, std::size_t expected) const {
        if (unsigned_value(t) != expected) {
            fail(t, "expected id " + std::to_string(expected) + " (ids are 1-based, contiguous, ascending)");
        }
    }

    NodeIndex node_ref(const Token& t, std::size_t num_nodes) const {
        const auto id = unsigned_value(t);
        if (id < 1 || id > num_nodes) {
            fail(t, "node id " + std::to_string(id) + " out of range 1.." + std::to_string(num_nodes));
        }
        return static_cast<NodeIndex>(id - 1);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void append_number(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

double triangle_area(const Point& a, const Point& b, const Point& c) { return 0.5 * (b - a).cross(c - a).norm(); }

}  // namespace

Mesh parse_mesh(std::string_view text) { return Parser(text).parse(); }

std::string serialize_mesh(const Mesh& mesh) {
    std::string out = "mesh-version 1\nnodes " + std::to_string(mesh.num_nodes()) + "\n";
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        out += std::to_string(i + 1);
        for (int c = 0; c < 3; ++c) {
            out += ' ';
            append_number(out, mesh.node(i)[c]);
        }
        out += '\n';
    }
    out += "elements " + std::string(to_string(mesh.kind())) + " " + std::to_string(mesh.num_elements()) + "\n";
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        out += std::to_string(e + 1);
        for (const NodeIndex v : mesh.element(e)) out += " " + std::to_string(v + 1);
        out += '\n';
    }
    for (const auto& [name, members] : mesh.node_sets()) {
        out += "nodeset " + name + " " + std::to_string(members.size()) + "\n";
        for (std::size_t i = 0; i < members.size(); ++i) {
            out += std::to_string(members[i] + 1);
            out += (i + 1 == members.size() || (i + 1) % 16 == 0) ? '\n' : ' ';
        }
    }
    for (const auto& [name, facets] : mesh.facet_sets()) {
        out += "facetset " + name + " " + std::to_string(facets.size()) + "\n";
        for (const Facet& f : facets) {
            out += std::to_string(f.size());
            for (const NodeIndex v : f.nodes()) out += " " + std::to_string(v + 1);
            out += '\n';
        }
    }
    return out;
}

Mesh read_mesh_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_mesh(buf.str());
    } catch (const ParseError& err) {
        throw ParseError(err.line(), err.column(), path.string() + ": " + err.what());
    }
}

void write_mesh_file(const Mesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write mesh file '" + path.string() + "'");
    out << serialize_mesh(mesh);
    if (!out) throw IoError("failed writing mesh file '" + path.string() + "'");
}

double facet_area(const Facet& facet, std::span<const Point> nodes) {
    const Point& a = nodes[facet[0]];
    const Point& b = nodes[facet[1]];
    const Point& c = nodes[facet[2]];
    double area = triangle_area(a, b, c);
    double longest = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    if (facet.size() == 4) {
        const Point& d = nodes[facet[3]];
        area += triangle_area(a, c, d);
        longest = std::max({longest, (d - c).squaredNorm(), (a - d).squaredNorm()});
    }
    if (!(area > 1e-12 * longest)) throw MeshError("degenerate facet (zero area)");
    return area;
}

double facet_area(const Facet& facet, const Mesh& mesh) { return facet_area(facet, mesh.nodes()); }

NodalArea nodal_area(const Mesh& mesh, std::string_view facet_set) {
    const auto& facets = mesh.facet_set(facet_set);
    if (facets.empty()) throw MeshError("facet set '" + std::string(facet_set) + "' is empty");
    NodalArea result;
    for (const Facet& f : facets) {
        result.total_area += facet_area(f, mesh);
        result.nodes.insert(result.nodes.end(), f.nodes().begin(), f.nodes().end());
    }
    std::ranges::sort(result.nodes);
    const auto dup = std::ranges::unique(result.nodes);
    result.nodes.erase(dup.begin(), dup.end());
    result.area_per_node = result.total_area / static_cast<double>(result.nodes.size());
    return result;
}

std::vector<NodeIndex> boundary_nodes(const Mesh& mesh) {
    static constexpr std::array<std::array<int, 4>, 4> kTetFaces{{{0, 1, 2, -1}, {0, 1, 3, -1}, {0, 2, 3, -1}, {1, 2, 3, -1}}};
    static constexpr std::array<std::array<int, 4>, 6> kHexFaces{
        {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}}};
    const std::span<const std::array<int, 4>> faces =
        mesh.kind() == ElementKind::tet4 ? std::span<const std::array<int, 4>>(kTetFaces)
                                         : std::span<const std::array<int, 4>>(kHexFaces);

    using Key = std::array<NodeIndex, 4>;
    constexpr NodeIndex kPad = std::numeric_limits<NodeIndex>::max();
    std::vector<Key> keys;
    keys.reserve(mesh.num_elements() * faces.size());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto nodes = mesh.element(e);
        for (const auto& face : faces) {
            Key key{kPad, kPad, kPad, kPad};
            for (std::size_t j = 0; j < 4; ++j) {
                if (face[j] >= 0) key[j] = nodes[static_cast<std::size_t>(face[j])];
            }
            std::ranges::sort(key);
            keys.push_back(key);
        }
    }
    std::ranges::sort(keys);
    std::vector<NodeIndex> result;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        if (j - i == 1) {
            for (const NodeIndex v : keys[i]) {
                if (v != kPad) result.push_back(v);
            }
        }
        i = j;
    }
    std::ranges::sort(result);
    const auto dup = std::ranges::unique(result);
    result.erase(dup.begin(), dup.end());
    return result;
}

}  // namespace fedfem
