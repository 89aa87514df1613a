// Regenerates include/trinl/ns_vertices.hpp from the brute-force enumeration.

#include "trinl/polytope.hpp"

#include <cstdio>

int main() {
    const auto verts = trinl::enumerate_ns_bipartite_vertices();
    std::printf("#pragma once\n\n");
    std::printf("// Generated by gen_ns_vertices. Vertices of the bipartite no-signaling\n");
    std::printf("// polytope, entry (x*2 + y)*4 + a*2 + b holds P(ab|xy).\n\n");
    std::printf("#include <array>\n\nnamespace trinl {\n\n");
    std::printf("inline constexpr std::array<std::array<double, 16>, %zu> kNsBipartiteVertices{{\n", verts.size());
    for (const auto& v : verts) {
        std::printf("    {{");
        for (std::size_t j = 0; j < v.size(); ++j) std::printf("%s%g", j ? ", " : "", v[j]);
        std::printf("}},\n");
    }
    std::printf("}};\n\n}  // namespace trinl\n");
}
