#include <strainfem/mesh.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace strainfem {

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

// Outward-oriented faces of a positively oriented tet, opposite local
// vertices 0..3: 1-2-3, 0-3-2, 0-1-3, 0-2-1.
constexpr std::array<std::array<int, 3>, 4> kOutwardFaces = {
    {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

std::array<int, 3> sorted_tri(std::array<int, 3> f) {
    std::sort(f.begin(), f.end());
    return f;
}

}  // namespace

double TetMesh::total_volume() const {
    return std::accumulate(tet_volumes.begin(), tet_volumes.end(), 0.0);
}

Vec3 TetMesh::domain_centroid() const {
    Vec3 c = Vec3::Zero();
    double vol = 0.0;
    for (int t = 0; t < num_tets(); ++t) {
        const auto p = tet_points(t);
        c += tet_volumes[t] * (p[0] + p[1] + p[2] + p[3]) / 4.0;
        vol += tet_volumes[t];
    }
    return c / vol;
}

double TetMesh::max_diameter() const {
    double h = 0.0;
    for (int t = 0; t < num_tets(); ++t)
        for (const auto& le : kLocalEdges) {
            const double len = (vertices[tets[t][le[0]]] - vertices[tets[t][le[1]]]).norm();
            h = std::max(h, len);
        }
    return h;
}

TetMesh build_topology(std::vector<Vec3> vertices,
                       std::vector<std::array<int, 4>> tets,
                       double volume_floor_rel) {
    if (tets.empty()) throw std::invalid_argument("build_topology: no tets");
    const int nv = static_cast<int>(vertices.size());

    TetMesh mesh;
    mesh.vertices = std::move(vertices);

    // Validate connectivity and normalize orientation.
    mesh.tet_volumes.resize(tets.size());
    for (std::size_t t = 0; t < tets.size(); ++t) {
        auto& k = tets[t];
        for (int i = 0; i < 4; ++i) {
            if (k[i] < 0 || k[i] >= nv)
                throw std::invalid_argument("build_topology: vertex index out of range in tet " +
                                            std::to_string(t));
            for (int j = i + 1; j < 4; ++j)
                if (k[i] == k[j])
                    throw std::invalid_argument("build_topology: degenerate tet " +
                                                std::to_string(t) + " (repeated vertex index)");
        }
        double vol = signed_volume(mesh.vertices[k[0]], mesh.vertices[k[1]],
                                   mesh.vertices[k[2]], mesh.vertices[k[3]]);
        if (vol < 0.0) {
            std::swap(k[2], k[3]);
            vol = -vol;
        }
        double lmax = 0.0;
        for (const auto& le : kLocalEdges)
            lmax = std::max(lmax, (mesh.vertices[k[le[0]]] - mesh.vertices[k[le[1]]]).norm());
        if (!(vol >= volume_floor_rel * lmax * lmax * lmax))
            throw std::invalid_argument("build_topology: degenerate tet " + std::to_string(t) +
                                        " (volume below floor)");
        mesh.tet_volumes[t] = vol;
    }
    mesh.tets = std::move(tets);
    const int nt = mesh.num_tets();

    // Faces: occurrence count plus one oriented representative, to verify
    // that interior faces appear with opposite orientations.
    struct FaceUse {
        int count = 0;
        int tet = -1;
        std::array<int, 3> oriented{};
    };
    std::map<std::array<int, 3>, FaceUse> faces;
    for (int t = 0; t < nt; ++t) {
        for (const auto& of : kOutwardFaces) {
            std::array<int, 3> tri = {mesh.tets[t][of[0]], mesh.tets[t][of[1]],
                                      mesh.tets[t][of[2]]};
            auto& use = faces[sorted_tri(tri)];
            if (use.count == 0) {
                use.tet = t;
                use.oriented = tri;
            } else if (use.count == 1) {
                // Opposite orientation means the two cyclic orders are reverses.
                auto rolled = [](std::array<int, 3> f, int r) {
                    return std::array<int, 3>{f[r % 3], f[(r + 1) % 3], f[(r + 2) % 3]};
                };
                bool reversed = false;
                for (int r = 0; r < 3; ++r)
                    if (rolled(tri, r) == std::array<int, 3>{use.oriented[2], use.oriented[1],
                                                             use.oriented[0]})
                        reversed = true;
                if (!reversed)
                    throw std::invalid_argument(
                        "build_topology: inconsistent connectivity (face shared with equal "
                        "orientation)");
            } else {
                throw std::invalid_argument("build_topology: non-manifold face (shared by >2 tets)");
            }
            ++use.count;
        }
    }
    for (const auto& [key, use] : faces) {
        if (use.count == 1) mesh.boundary_faces.push_back({use.oriented, use.tet});
    }

    // Global edge list, lexicographic by (i,j).
    std::set<std::array<int, 2>> edge_set;
    for (int t = 0; t < nt; ++t)
        for (const auto& le : kLocalEdges) {
            int i = mesh.tets[t][le[0]], j = mesh.tets[t][le[1]];
            if (i > j) std::swap(i, j);
            edge_set.insert({i, j});
        }
    mesh.edges.assign(edge_set.begin(), edge_set.end());
    mesh.edge_lookup.reserve(mesh.edges.size());
    for (int e = 0; e < mesh.num_edges(); ++e)
        mesh.edge_lookup.emplace(TetMesh::edge_key(mesh.edges[e][0], mesh.edges[e][1]), e);

    mesh.tet_edges.resize(nt);
    for (int t = 0; t < nt; ++t)
        for (int le = 0; le < 6; ++le) {
            const int a = mesh.tets[t][kLocalEdges[le][0]];
            const int b = mesh.tets[t][kLocalEdges[le][1]];
            mesh.tet_edges[t][le] = {mesh.edge_index(a, b), a < b ? 1 : -1};
        }

    // Boundary classification: an entity is boundary iff it lies in a boundary face.
    mesh.vertex_on_boundary.assign(nv, false);
    mesh.edge_on_boundary.assign(mesh.num_edges(), false);
    for (const auto& bf : mesh.boundary_faces) {
        for (int i = 0; i < 3; ++i) {
            mesh.vertex_on_boundary[bf.v[i]] = true;
            const int e = mesh.edge_index(bf.v[i], bf.v[(i + 1) % 3]);
            mesh.edge_on_boundary[e] = true;
        }
    }

    // vertex -> tets adjacency
    mesh.vertex_tet_offsets.assign(nv + 1, 0);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 4; ++i) ++mesh.vertex_tet_offsets[mesh.tets[t][i] + 1];
    for (int v = 0; v < nv; ++v)
        mesh.vertex_tet_offsets[v + 1] += mesh.vertex_tet_offsets[v];
    mesh.vertex_tet_list.resize(mesh.vertex_tet_offsets[nv]);
    std::vector<int> cursor(mesh.vertex_tet_offsets.begin(), mesh.vertex_tet_offsets.end() - 1);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 4; ++i) mesh.vertex_tet_list[cursor[mesh.tets[t][i]]++] = t;

    for (int v = 0; v < nv; ++v)
        if (mesh.vertex_tet_offsets[v] == mesh.vertex_tet_offsets[v + 1])
            throw std::invalid_argument("build_topology: inconsistent connectivity (vertex " +
                                        std::to_string(v) + " unreferenced)");

    return mesh;
}

TetMesh generate_cube_mesh(int n) {
    if (n < 1) throw std::invalid_argument("generate_cube_mesh: n must be >= 1");
    const int s = n + 1;
    auto vid = [s](int i, int j, int k) { return i + s * (j + s * k); };

    std::vector<Vec3> verts(static_cast<std::size_t>(s) * s * s);
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < s; ++i)
                verts[vid(i, j, k)] =
                    Vec3(double(i) / n, double(j) / n, double(k) / n);

    // Kuhn subdivision: each cell is cut by the 6 axis orderings along the
    // main diagonal, so diagonals match across shared faces.
    constexpr std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    std::vector<std::array<int, 4>> tets;
    tets.reserve(static_cast<std::size_t>(6) * n * n * n);
    for (int ck = 0; ck < n; ++ck)
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci)
                for (const auto& p : perms) {
                    std::array<int, 3> c = {ci, cj, ck};
                    std::array<int, 4> tet;
                    tet[0] = vid(c[0], c[1], c[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++c[p[step]];
                        tet[step + 1] = vid(c[0], c[1], c[2]);
                    }
                    tets.push_back(tet);
                }
    return build_topology(std::move(verts), std::move(tets));
}

TetMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open " + path);
    int nv = -1, nt = -1;
    if (!(in >> nv >> nt) || nv <= 0 || nt <= 0)
        throw std::runtime_error("read_mesh: bad header in " + path);
    std::vector<Vec3> verts(nv);
    for (int v = 0; v < nv; ++v)
        if (!(in >> verts[v][0] >> verts[v][1] >> verts[v][2]))
            throw std::runtime_error("read_mesh: bad vertex line in " + path);
    std::vector<std::array<int, 4>> tets(nt);
    for (int t = 0; t < nt; ++t)
        if (!(in >> tets[t][0] >> tets[t][1] >> tets[t][2] >> tets[t][3]))
            throw std::runtime_error("read_mesh: bad tet line in " + path);
    return build_topology(std::move(verts), std::move(tets));
}

void write_mesh(const TetMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    char buf[128];
    out << mesh.num_vertices() << " " << mesh.num_tets() << "\n";
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& t : mesh.tets)
        out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
    if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

int VertexPatch::local_vertex(int global_vertex) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), global_vertex);
    if (it == vertices.end() || *it != global_vertex) return -1;
    return static_cast<int>(it - vertices.begin());
}

int VertexPatch::local_edge(int global_edge) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), global_edge);
    if (it == edges.end() || *it != global_edge) return -1;
    return static_cast<int>(it - edges.begin());
}

VertexPatch vertex_patch(const TetMesh& mesh, int a) {
    if (a < 0 || a >= mesh.num_vertices())
        throw std::invalid_argument("vertex_patch: vertex index out of range");

    VertexPatch patch;
    patch.center = a;
    patch.boundary_center = mesh.vertex_on_boundary[a];
    for (int i = mesh.vertex_tet_offsets[a]; i < mesh.vertex_tet_offsets[a + 1]; ++i)
        patch.tets.push_back(mesh.vertex_tet_list[i]);
    std::sort(patch.tets.begin(), patch.tets.end());

    // Link of a: the triangle opposite a in each patch tet. The star is a
    // ball iff the link is a connected sphere (interior a) or disk (boundary a).
    std::vector<std::array<int, 3>> link_tris;
    link_tris.reserve(patch.tets.size());
    std::set<int> vert_set;
    vert_set.insert(a);
    for (int t : patch.tets) {
        std::array<int, 3> tri;
        int k = 0;
        for (int i = 0; i < 4; ++i) {
            const int v = mesh.tets[t][i];
            vert_set.insert(v);
            if (v != a) tri[k++] = v;
        }
        link_tris.push_back(sorted_tri(tri));
    }

    std::map<std::array<int, 2>, std::vector<int>> link_edge_tris;
    for (int f = 0; f < static_cast<int>(link_tris.size()); ++f) {
        const auto& tri = link_tris[f];
        link_edge_tris[{tri[0], tri[1]}].push_back(f);
        link_edge_tris[{tri[0], tri[2]}].push_back(f);
        link_edge_tris[{tri[1], tri[2]}].push_back(f);
    }

    int boundary_link_edges = 0;
    std::set<int> boundary_link_vertices;
    for (const auto& [e, tris] : link_edge_tris) {
        if (tris.size() > 2)
            throw std::runtime_error("vertex_patch: non-ball vertex star at vertex " +
                                     std::to_string(a) + " (non-manifold link edge)");
        if (tris.size() == 1) {
            ++boundary_link_edges;
            boundary_link_vertices.insert(e[0]);
            boundary_link_vertices.insert(e[1]);
        }
    }

    // Link connectivity by BFS over shared link edges.
    std::vector<bool> seen(link_tris.size(), false);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = true;
    int reached = 1;
    while (!bfs.empty()) {
        const int f = bfs.front();
        bfs.pop();
        const auto& tri = link_tris[f];
        for (const auto& e : {std::array<int, 2>{tri[0], tri[1]},
                              std::array<int, 2>{tri[0], tri[2]},
                              std::array<int, 2>{tri[1], tri[2]}}) {
            for (int g : link_edge_tris[e])
                if (!seen[g]) {
                    seen[g] = true;
                    ++reached;
                    bfs.push(g);
                }
        }
    }
    if (reached != static_cast<int>(link_tris.size()))
        throw std::runtime_error("vertex_patch: non-ball vertex star at vertex " +
                                 std::to_string(a) + " (disconnected link)");

    const int v_link = static_cast<int>(vert_set.size()) - 1;
    const int e_link = static_cast<int>(link_edge_tris.size());
    const int f_link = static_cast<int>(link_tris.size());
    const int chi = v_link - e_link + f_link;
    if (patch.boundary_center) {
        if (boundary_link_edges == 0 || chi != 1)
            throw std::runtime_error("vertex_patch: non-ball vertex star at vertex " +
                                     std::to_string(a) + " (link is not a disk)");
    } else {
        if (boundary_link_edges != 0 || chi != 2)
            throw std::runtime_error("vertex_patch: non-ball vertex star at vertex " +
                                     std::to_string(a) + " (link is not a sphere)");
    }

    patch.vertices.assign(vert_set.begin(), vert_set.end());
    std::set<int> edge_set;
    for (int t : patch.tets)
        for (const auto& er : mesh.tet_edges[t]) edge_set.insert(er.edge);
    patch.edges.assign(edge_set.begin(), edge_set.end());
    patch.N = static_cast<int>(patch.vertices.size());
    patch.A = static_cast<int>(patch.edges.size());

    // Patch boundary surface: faces of patch tets not shared by two patch tets.
    std::map<std::array<int, 3>, int> face_count;
    for (int t : patch.tets)
        for (const auto& of : kOutwardFaces)
            ++face_count[sorted_tri({mesh.tets[t][of[0]], mesh.tets[t][of[1]],
                                     mesh.tets[t][of[2]]})];
    std::set<int> boundary_verts;
    for (const auto& [tri, count] : face_count)
        if (count == 1)
            for (int v : tri) boundary_verts.insert(v);
    patch.N_b = static_cast<int>(boundary_verts.size());

    if (!patch.boundary_center && patch.N_b != patch.N - 1)
        throw std::runtime_error("vertex_patch: interior star of vertex " + std::to_string(a) +
                                 " violates N_b = N - 1");

    // N_ib: interior vertices of the link disk, i.e. link vertices not on its
    // boundary cycle. (The rim of the interface surface del Omega_a \ del Omega
    // lies on del Omega; counting link-interior vertices keeps the Euler
    // identity valid even when whole link triangles lie in del Omega.)
    if (patch.boundary_center) {
        int n_ib = 0;
        for (int v : patch.vertices)
            if (v != a && !boundary_link_vertices.count(v)) ++n_ib;
        patch.N_ib = n_ib;
    }
    return patch;
}

EulerResult euler_check(const VertexPatch& patch) {
    const int base = 3 * patch.N - 6;
    const int residual = patch.boundary_center
                             ? patch.A - base - patch.N_ib
                             : patch.A - base - (patch.N_b - 3);
    return {residual, residual == 0};
}

}  // namespace strainfem
