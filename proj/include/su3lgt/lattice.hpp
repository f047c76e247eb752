#pragma once

#include <array>
#include <string>
#include <vector>

namespace su3lgt {

enum class Boundary { open, periodic };

struct OrientedLink {
    int tail = 0, head = 0;
};

// Four oriented links traversed counterclockwise; forward[k] is false when the
// stored link orientation opposes the traversal (its adjoint operator enters).
struct Plaquette {
    std::array<int, 4> links{};
    std::array<bool, 4> forward{};
};

struct VertexEnd {
    int link = 0;
    bool is_head = false;  // head end: canonical rep; tail end: dual rep
    auto operator<=>(const VertexEnd&) const = default;
};

// Open lattices have no exterior links: the vacuum outside a boundary vertex
// contributes only singlets, which drop out of every vertex coupling.
struct LatticeGeometry {
    int dim = 1;                 // 1: plaquette string, 2: plaquette grid
    std::vector<int> extents;    // plaquettes per axis
    Boundary boundary = Boundary::open;

    int num_vertices = 0;
    std::vector<OrientedLink> links;
    std::vector<Plaquette> plaquettes;
    std::vector<std::vector<VertexEnd>> vertex_ends;  // sorted by (link, is_head)

    static LatticeGeometry string_chain(int n_plaquettes, Boundary b = Boundary::open);
    static LatticeGeometry grid(int nx, int ny, Boundary b = Boundary::open);
    // arbitrary link list, no plaquettes; for vertex-level studies
    static LatticeGeometry custom(int n_vertices, std::vector<OrientedLink> links);

    std::string describe() const;
    void validate() const;  // plaquettes closed, ends consistent
};

}  // namespace su3lgt
