#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "topotext/distance_matrix.hpp"
#include "topotext/filtration.hpp"

using namespace topotext;

namespace {

DistanceMatrix unit_square() {
    // corners of the unit square: sides 1, diagonals sqrt(2)
    DistanceMatrix d(4);
    const double diag = std::sqrt(2.0);
    d.set(0, 1, 1.0);
    d.set(1, 2, 1.0);
    d.set(2, 3, 1.0);
    d.set(0, 3, 1.0);
    d.set(0, 2, diag);
    d.set(1, 3, diag);
    return d;
}

} // namespace

TEST_CASE("two points at distance 1") {
    DistanceMatrix d(2);
    d.set(0, 1, 1.0);
    const auto f = build_filtration(d, 1);
    REQUIRE(f.size() == 3);
    CHECK(f[0].dim == 0);
    CHECK(f[0].verts[0] == 0);
    CHECK(f[1].dim == 0);
    CHECK(f[1].verts[0] == 1);
    CHECK(f[2].dim == 1);
    CHECK(f[2].diameter == 1.0);
}

TEST_CASE("single point") {
    DistanceMatrix d(1);
    const auto f = build_filtration(d, 1);
    REQUIRE(f.size() == 1);
    CHECK(f[0].dim == 0);
    CHECK(f[0].diameter == 0.0);
}

TEST_CASE("unit square enumerates vertices, edges, diagonals, triangles in order") {
    const auto f = build_filtration(unit_square(), 1);
    REQUIRE(f.size() == 4 + 6 + 4);
    const double diag = std::sqrt(2.0);

    for (int i = 0; i < 4; ++i) CHECK(f[i].dim == 0);
    for (int i = 4; i < 8; ++i) {
        CHECK(f[i].dim == 1);
        CHECK(f[i].diameter == 1.0);
    }
    for (int i = 8; i < 10; ++i) {
        CHECK(f[i].dim == 1);
        CHECK(f[i].diameter == doctest::Approx(diag));
    }
    for (int i = 10; i < 14; ++i) {
        CHECK(f[i].dim == 2);
        CHECK(f[i].diameter == doctest::Approx(diag));
    }
}

TEST_CASE("every face precedes its simplex") {
    DistanceMatrix d(5);
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) d.set(i, j, 1.0 + 0.3 * i + 0.7 * j);
    const auto f = build_filtration(d, 1);

    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& s : f) {
        const auto vs = s.vertices();
        if (s.dim > 0) {
            for (std::size_t drop = 0; drop < vs.size(); ++drop) {
                std::vector<std::uint32_t> face;
                for (std::size_t k = 0; k < vs.size(); ++k)
                    if (k != drop) face.push_back(vs[k]);
                CHECK(seen.count(face) == 1);
            }
        }
        seen.insert(std::vector<std::uint32_t>(vs.begin(), vs.end()));
    }
}

TEST_CASE("max_dim 0 leaves out triangles") {
    const auto f = build_filtration(unit_square(), 0);
    CHECK(f.size() == 4 + 6);
}

TEST_CASE("validation failures name the offending indices") {
    DistanceMatrix bad(2, {0.0, 1.0, 2.0, 0.0});
    CHECK_THROWS_WITH_AS(build_filtration(bad, 1), doctest::Contains("(0, 1)"), validation_error);

    DistanceMatrix neg(2, {0.0, -1.0, -1.0, 0.0});
    CHECK_THROWS_WITH_AS(build_filtration(neg, 1), doctest::Contains("negative"),
                         validation_error);

    CHECK_THROWS_AS(build_filtration(unit_square(), 2), validation_error);
}

TEST_CASE("scale cap drops large simplices") {
    const auto f = build_filtration(unit_square(), 1, 1.0);
    // 4 vertices + the 4 sides; diagonals and triangles exceed the cap
    CHECK(f.size() == 8);
}
