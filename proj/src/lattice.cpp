#include "su3lgt/lattice.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace su3lgt {

namespace {

void finalize(LatticeGeometry& g) {
    g.vertex_ends.assign(g.num_vertices, {});
    for (int li = 0; li < static_cast<int>(g.links.size()); ++li) {
        g.vertex_ends[g.links[li].tail].push_back({li, false});
        g.vertex_ends[g.links[li].head].push_back({li, true});
    }
    for (auto& v : g.vertex_ends) std::sort(v.begin(), v.end());
    g.validate();
}

}  // namespace

LatticeGeometry LatticeGeometry::string_chain(int n, Boundary b) {
    if (n < 1) throw std::invalid_argument("string_chain: need at least one plaquette");
    LatticeGeometry g;
    g.dim = 1;
    g.extents = {n};
    g.boundary = b;
    // vertices v(c,r) = 2c+r, c = 0..nc-1, r = 0,1
    const int ncols = (b == Boundary::open) ? n + 1 : n;
    auto vid = [&](int c, int r) { return 2 * ((c % ncols + ncols) % ncols) + r; };
    g.num_vertices = 2 * ncols;
    // bottoms b_c = c, tops t_c = n + c, verticals m_c = 2n + c
    for (int c = 0; c < n; ++c) g.links.push_back({vid(c, 0), vid(c + 1, 0)});
    for (int c = 0; c < n; ++c) g.links.push_back({vid(c, 1), vid(c + 1, 1)});
    const int nvert = (b == Boundary::open) ? n + 1 : n;
    for (int c = 0; c < nvert; ++c) g.links.push_back({vid(c, 0), vid(c, 1)});
    auto bot = [&](int c) { return c; };
    auto top = [&](int c) { return n + c; };
    auto mid = [&](int c) { return 2 * n + (c % nvert); };
    for (int c = 0; c < n; ++c)
        g.plaquettes.push_back({{bot(c), mid(c + 1), top(c), mid(c)}, {true, true, false, false}});
    finalize(g);
    return g;
}

LatticeGeometry LatticeGeometry::grid(int nx, int ny, Boundary b) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid: need positive extents");
    LatticeGeometry g;
    g.dim = 2;
    g.extents = {nx, ny};
    g.boundary = b;
    const int vx = (b == Boundary::open) ? nx + 1 : nx;
    const int vy = (b == Boundary::open) ? ny + 1 : ny;
    auto vid = [&](int x, int y) {
        return ((x % vx + vx) % vx) * vy + ((y % vy + vy) % vy);
    };
    g.num_vertices = vx * vy;
    // horizontal links h(x,y): (x,y)->(x+1,y); vertical links v(x,y): (x,y)->(x,y+1)
    std::map<std::pair<int, int>, int> hid, vidx;
    const int hx = (b == Boundary::open) ? nx : nx;
    const int hy = (b == Boundary::open) ? ny + 1 : ny;
    for (int x = 0; x < hx; ++x)
        for (int y = 0; y < hy; ++y) {
            hid[{x, y}] = static_cast<int>(g.links.size());
            g.links.push_back({vid(x, y), vid(x + 1, y)});
        }
    const int wx = (b == Boundary::open) ? nx + 1 : nx;
    const int wy = (b == Boundary::open) ? ny : ny;
    for (int x = 0; x < wx; ++x)
        for (int y = 0; y < wy; ++y) {
            vidx[{x, y}] = static_cast<int>(g.links.size());
            g.links.push_back({vid(x, y), vid(x, y + 1)});
        }
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            g.plaquettes.push_back({{hid[{x, y}], vidx[{(x + 1) % (b == Boundary::open ? nx + 1 : nx), y}],
                                     hid[{x, (y + 1) % (b == Boundary::open ? ny + 1 : ny)}], vidx[{x, y}]},
                                    {true, true, false, false}});
    finalize(g);
    return g;
}

LatticeGeometry LatticeGeometry::custom(int n_vertices, std::vector<OrientedLink> links) {
    LatticeGeometry g;
    g.dim = 0;
    g.num_vertices = n_vertices;
    g.links = std::move(links);
    finalize(g);
    return g;
}

void LatticeGeometry::validate() const {
    for (const auto& l : links)
        if (l.tail < 0 || l.tail >= num_vertices || l.head < 0 || l.head >= num_vertices)
            throw std::runtime_error("link endpoint out of range");
    for (const auto& p : plaquettes) {
        // traversal endpoints must chain into a closed loop
        int at = -1;
        for (int k = 0; k < 4; ++k) {
            const auto& l = links[p.links[k]];
            const int from = p.forward[k] ? l.tail : l.head;
            const int to = p.forward[k] ? l.head : l.tail;
            if (at >= 0 && from != at) throw std::runtime_error("plaquette loop not closed");
            at = to;
        }
        const auto& l0 = links[p.links[0]];
        if (at != (p.forward[0] ? l0.tail : l0.head))
            throw std::runtime_error("plaquette loop not closed at start");
    }
}

std::string LatticeGeometry::describe() const {
    std::ostringstream os;
    if (dim == 1)
        os << "string(" << extents[0] << ")";
    else if (dim == 2)
        os << "grid(" << extents[0] << "x" << extents[1] << ")";
    else
        os << "custom";
    os << (boundary == Boundary::open ? " open" : " periodic");
    os << " vertices=" << num_vertices << " links=" << links.size()
       << " plaquettes=" << plaquettes.size();
    return os.str();
}

}  // namespace su3lgt
