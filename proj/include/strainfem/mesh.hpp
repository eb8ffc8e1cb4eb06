#pragma once

#include <strainfem/sym_tensor.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace strainfem {

struct EdgeRef {
    int edge;  // global edge index
    int sign;  // +1 if the local (a,b) pair runs from lower to higher global id
};

struct BoundaryFace {
    std::array<int, 3> v;  // ordered so the normal points out of the domain
    int tet;
};

// Local edge order within a tet: vertex pairs (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Tetrahedral mesh with a globally oriented edge list. Immutable after
/// construction; safe for concurrent reads.
struct TetMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;        // positively oriented
    std::vector<std::array<int, 2>> edges;       // (i,j) with i<j, lexicographic
    std::vector<std::array<EdgeRef, 6>> tet_edges;
    std::vector<BoundaryFace> boundary_faces;
    std::vector<bool> vertex_on_boundary;
    std::vector<bool> edge_on_boundary;
    std::vector<double> tet_volumes;

    // vertex -> incident tets (CSR)
    std::vector<int> vertex_tet_offsets;
    std::vector<int> vertex_tet_list;

    std::unordered_map<std::int64_t, int> edge_lookup;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_tets() const { return static_cast<int>(tets.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    static std::int64_t edge_key(int i, int j) {
        return (static_cast<std::int64_t>(i) << 32) | static_cast<std::int64_t>(j);
    }

    /// Global edge index of the vertex pair {i,j}; -1 if no such edge.
    int edge_index(int i, int j) const {
        if (i > j) std::swap(i, j);
        auto it = edge_lookup.find(edge_key(i, j));
        return it == edge_lookup.end() ? -1 : it->second;
    }

    Vec3 edge_vector(int e) const { return vertices[edges[e][1]] - vertices[edges[e][0]]; }
    double edge_length(int e) const { return edge_vector(e).norm(); }
    Vec3 edge_tangent(int e) const { return edge_vector(e).normalized(); }

    std::array<Vec3, 4> tet_points(int t) const {
        const auto& k = tets[t];
        return {vertices[k[0]], vertices[k[1]], vertices[k[2]], vertices[k[3]]};
    }

    double total_volume() const;
    Vec3 domain_centroid() const;  // volume centroid
    double max_diameter() const;   // largest tet diameter
};

/// Builds the full topology from raw connectivity. Tets are re-oriented to
/// positive volume. Throws on degenerate tets (volume below
/// volume_floor_rel * longest_edge^3), non-manifold faces, inconsistent
/// orientation, out-of-range or unreferenced vertices.
TetMesh build_topology(std::vector<Vec3> vertices,
                       std::vector<std::array<int, 4>> tets,
                       double volume_floor_rel = 1e-12);

/// Unit cube [0,1]^3, n^3 cells, 6 Kuhn tets per cell. Mesh size h = sqrt(3)/n.
TetMesh generate_cube_mesh(int n);

/// Plain text format: "nv nt", nv lines "x y z", nt lines "i j k l" (0-based).
TetMesh read_mesh(const std::string& path);
void write_mesh(const TetMesh& mesh, const std::string& path);

/// Star of a vertex: all tets sharing it, with the counts of Lemma-style
/// Euler identities. The star must be a topological ball (link a sphere for
/// interior centers, a disk for boundary centers).
struct VertexPatch {
    int center = -1;
    bool boundary_center = false;
    std::vector<int> tets;      // ascending global tet ids
    std::vector<int> vertices;  // ascending global vertex ids (center included)
    std::vector<int> edges;     // ascending global edge ids
    int N = 0;     // vertices in the patch closure
    int A = 0;     // edges in the patch closure
    int N_b = 0;   // vertices on the patch boundary surface
    int N_ib = 0;  // interior vertices of the link disk (boundary centers)

    int local_vertex(int global_vertex) const;  // -1 if absent
    int local_edge(int global_edge) const;
};

VertexPatch vertex_patch(const TetMesh& mesh, int a);

/// Integer residual of the Euler identity: A - (3N-6) - (N_b - 3) for an
/// interior center, A - (3N-6) - N_ib for a boundary center.
struct EulerResult {
    int residual;
    bool pass;
};
EulerResult euler_check(const VertexPatch& patch);

}  // namespace strainfem
