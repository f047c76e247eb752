#pragma once

#include <filesystem>

#include "su3lgt/basis.hpp"

namespace su3lgt {

// A fixed assignment of irreps to the links neighboring one plaquette: every
// non-active link incident to the four plaquette vertices. Assignments whose
// triality cannot be balanced by any active configuration carry no matrix
// elements; they are kept (flagged) so that every register state of the
// controls has a sector.
struct ControlSector {
    std::vector<Irrep> assignment;  // per control link, control_links order
    bool mod3_compatible = true;
};

struct GivensRotation {
    long i = 0, j = 0;   // config indices within the sector block, i < j
    double coeff = 0.0;  // matrix element of box + box†
};

// One basis label of a sector block: irreps on the 4 plaquette links (in
// plaquette link order) plus the singlet multiplicity label per plaquette
// vertex (ascending vertex id).
struct ActiveConfig {
    std::array<Irrep, 4> active{};
    std::vector<int> mults;
    auto operator<=>(const ActiveConfig&) const = default;
};

struct SectorBlock {
    ControlSector sector;
    std::vector<ActiveConfig> configs;
    // upper triangle (i < j) of box + box† on `configs`; triality forbids
    // diagonal entries
    std::vector<std::tuple<long, long, double>> elements;
    std::vector<GivensRotation> program;
    // irrep content (with multiplicity) of the product of control ends per
    // plaquette vertex: the flux the auxiliary conduit link would carry
    std::vector<std::vector<std::pair<Irrep, int>>> conduit;
    int merged_into = -1;  // index of an identical earlier sector, or -1

    Eigen::MatrixXd dense() const;  // box + box† as a dense symmetric matrix
};

struct CompiledPlaquette {
    int plaquette = 0;
    int lam = 0;
    std::string convention;
    std::string geometry;
    std::vector<int> control_links;   // sorted link ids
    std::vector<int> plaq_vertices;   // sorted vertex ids
    std::vector<SectorBlock> sectors;

    const SectorBlock* sector_for(const std::vector<Irrep>& assignment) const;
    long total_rotations() const;
};

// All control assignments within the truncation (lexicographic in the
// per-link irrep index), before any merging, each flagged with its mod-3
// compatibility.
std::vector<ControlSector> control_sector_assignments(const LatticeGeometry& g, int lam,
                                                      int plaquette);

CompiledPlaquette compile_plaquette(const LatticeGeometry& g, int lam, int plaquette,
                                    SingletBasisCache& sb);

// One rotation per off-diagonal transition, ordered by (|coeff| descending,
// (i,j) ascending).
std::vector<GivensRotation> givens_program(const std::vector<std::tuple<long, long, double>>& elements);

struct RotationScanRow {
    int lam = 0;
    long sectors = 0;
    long rotations = 0;
};
std::vector<RotationScanRow> rotation_count_scan(const LatticeGeometry& g, int plaquette,
                                                 int lam_min, int lam_max, SingletBasisCache& sb);

void save_compiled(const CompiledPlaquette& c, const std::filesystem::path& file,
                   const std::string& config_hash = "");
CompiledPlaquette load_compiled(const std::filesystem::path& file);

// The compiled box + box† of one plaquette lifted to the lattice physical
// basis: identity on spectator links and non-plaquette vertex labels, the
// sector block selected by the control irreps of each state.
Eigen::MatrixXd compiled_plaquette_matrix_physical(const LatticeGeometry& g,
                                                   const PhysicalBasis& phys,
                                                   const CompiledPlaquette& cp);

}  // namespace su3lgt
