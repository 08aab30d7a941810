#include "test_support.hpp"

#include "losray/sweep.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace losray;
using test::square;

TEST_CASE("empty scene: polygon covers the whole grid")
{
    const SceneModel scene = make_scene({}, 257, 257, 1.0);
    const VisibilityPolygon poly = sweep_visibility_polygon(Vec2(100, 100), scene);
    REQUIRE(!poly.pieces.empty());
    for (const auto &p : poly.pieces)
        CHECK(p.grid_boundary);
    CHECK(poly.contains(Vec2(0.5, 0.5)));
    CHECK(poly.contains(Vec2(256.5, 256.5)));
    CHECK(poly.contains(Vec2(100, 100)));
}

TEST_CASE("tx inside a footprint is rejected")
{
    const SceneModel scene = test::single_square_scene();
    CHECK_THROWS_AS(sweep_visibility_polygon(Vec2(15, 15), scene), GeometryError);
    CHECK_THROWS_AS(exact_vertex_attributes(Vec2(15, 15), scene), GeometryError);
    CHECK_THROWS_AS(exact_los_map(Vec2(15, 15), scene), GeometryError);
}

TEST_CASE("single square: shadow wedge matches the per-pixel brute force")
{
    const SceneModel scene = test::single_square_scene();
    const Vec2 tx(0.0, 15.0);
    const LosMap map = exact_los_map(tx, scene);
    const BinaryGrid oracle = test::brute_force_los_grid(tx, scene);
    int mismatches = 0;
    for (int i = 0; i < map.grid.rows(); ++i)
        for (int j = 0; j < map.grid.cols(); ++j)
            mismatches += (map.grid(i, j) != oracle(i, j));
    CHECK(mismatches == 0);

    // Spot checks: deep shadow behind the square, lit cell before it.
    const VisibilityPolygon poly = sweep_visibility_polygon(tx, scene);
    CHECK(poly.contains(Vec2(5.5, 15.5)));
    CHECK(!poly.contains(Vec2(30.5, 15.5)));
    // Pixel of the transmitter itself.
    CHECK(map.grid(15, 0) == 1);
}

TEST_CASE("membership queries agree with direct segment tests")
{
    const auto scenes = test::random_scene_set(4, 12, 900);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(1.0, 127.0);
    for (const SceneModel &scene : scenes) {
        const Vec2 tx = pick_free_point(scene, 77);
        const VisibilityPolygon poly = sweep_visibility_polygon(tx, scene);
        for (int k = 0; k < 2000; ++k) {
            const Vec2 p(uni(rng), uni(rng));
            const bool direct = !segment_hits_building(tx, p, scene);
            CHECK(poly.contains(p) == direct);
        }
    }
}

TEST_CASE("exact attributes on the single square")
{
    const SceneModel scene = test::single_square_scene();
    const Vec2 tx(0.0, 15.0);
    const VertexAttributes attrs = exact_vertex_attributes(tx, scene);
    REQUIRE(attrs.records.size() == 4);

    // Near-face vertices visible, far-face hidden.
    CHECK(attrs.records[0].visible);  // (10,10)
    CHECK(!attrs.records[1].visible); // (20,10)
    CHECK(!attrs.records[2].visible); // (20,20)
    CHECK(attrs.records[3].visible);  // (10,20)

    // Invisible vertices default to their own position.
    CHECK(attrs.records[1].projection.x() == 20.0);
    CHECK(attrs.records[1].projection.y() == 10.0);
    CHECK(!attrs.records[1].open_boundary);

    // (10,10): the ray dives below the square and exits through y=0 at (30,0).
    CHECK(attrs.records[0].open_boundary);
    CHECK(attrs.records[0].projection.x() == doctest::Approx(30.0));
    CHECK(attrs.records[0].projection.y() == doctest::Approx(0.0));

    // (10,20): exits through x=257 at y=143.5.
    CHECK(attrs.records[3].open_boundary);
    CHECK(attrs.records[3].projection.x() == doctest::Approx(257.0));
    CHECK(attrs.records[3].projection.y() == doctest::Approx(143.5));
}

TEST_CASE("projection onto a farther edge, t > 1")
{
    // Second building behind the square catches the silhouette ray.
    const SceneModel scene = make_scene({square(10, 10, 10), square(20, 0, 8)}, 257, 257, 1.0);
    const Vec2 tx(0.0, 15.0);
    const VertexAttributes attrs = exact_vertex_attributes(tx, scene);
    const auto &rec = attrs.records[0]; // vertex (10,10)
    REQUIRE(rec.visible);
    CHECK(!rec.open_boundary);
    CHECK(rec.projection.x() == doctest::Approx(20.0));
    CHECK(rec.projection.y() == doctest::Approx(5.0));
    // Collinearity and t > 1.
    const Vec2 d = rec.position - tx;
    const Vec2 dp = rec.projection - tx;
    CHECK(std::abs(cross2(dp, d)) <= kEpsGeo * dp.norm() * d.norm() * 10.0);
    CHECK(dp.norm() > d.norm());
}

TEST_CASE("property: visible projections are collinear with t > 1")
{
    const auto scenes = test::random_scene_set(5, 14, 50);
    for (const SceneModel &scene : scenes) {
        const Vec2 tx = pick_free_point(scene, 13);
        const VertexAttributes attrs = exact_vertex_attributes(tx, scene);
        for (const auto &rec : attrs.records) {
            if (!rec.visible)
                continue;
            const Vec2 d = rec.position - tx;
            const Vec2 dp = rec.projection - tx;
            if ((rec.projection - rec.position).norm() <= kEpsGeo)
                continue;
            CHECK(std::abs(cross2(dp, d)) <= 1e-6 * std::max(1.0, dp.norm() * d.norm()));
            CHECK(dp.norm() >= d.norm() * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("oracle agreement on random scenes")
{
    const auto scenes = test::random_scene_set(5, 15, 1234, 96);
    for (const SceneModel &scene : scenes) {
        const Vec2 tx = pick_free_point(scene, 5);
        const LosMap map = exact_los_map(tx, scene);
        const BinaryGrid oracle = test::brute_force_los_grid(tx, scene);
        int mismatches = 0;
        for (int i = 0; i < map.grid.rows(); ++i)
            for (int j = 0; j < map.grid.cols(); ++j)
                mismatches += (map.grid(i, j) != oracle(i, j));
        CHECK(mismatches == 0);
    }
}

TEST_CASE("oracle agreement on rectilinear scenes")
{
    const auto scenes = test::random_scene_set(3, 10, 777, 96, true);
    for (const SceneModel &scene : scenes) {
        const Vec2 tx = pick_free_point(scene, 21);
        const LosMap map = exact_los_map(tx, scene);
        const BinaryGrid oracle = test::brute_force_los_grid(tx, scene);
        int mismatches = 0;
        for (int i = 0; i < map.grid.rows(); ++i)
            for (int j = 0; j < map.grid.cols(); ++j)
                mismatches += (map.grid(i, j) != oracle(i, j));
        CHECK(mismatches == 0);
    }
}

TEST_CASE("vertex adjacency on squares")
{
    SUBCASE("single square")
    {
        const SceneModel scene = test::single_square_scene();
        const VisibilityAdjacency adj = vertex_adjacency(scene);
        // Opposite corners: diagonal crosses the interior.
        CHECK(!adj.at(0, 2));
        CHECK(!adj.at(1, 3));
        // Adjacent corners along faces.
        CHECK(adj.at(0, 1));
        CHECK(adj.at(1, 2));
        CHECK(adj.at(2, 3));
        CHECK(adj.at(3, 0));
    }

    SUBCASE("two separated squares with a clear gap")
    {
        const SceneModel scene = make_scene({square(10, 10, 10), square(40, 10, 10)}, 257, 257, 1.0);
        const VisibilityAdjacency adj = vertex_adjacency(scene);
        // Facing corners: (20,10) is id 1, (40,10) is id 4.
        CHECK(adj.at(1, 4));
        CHECK(!segment_hits_building_bruteforce(scene.vertices[1].position, scene.vertices[4].position,
                                                scene,
                                                {scene.vertices[1].edge_prev, scene.vertices[1].edge_next,
                                                 scene.vertices[4].edge_prev, scene.vertices[4].edge_next}));
        // Far corner of the left square cannot see through its own building.
        CHECK(!adj.at(0, 5));
    }
}

TEST_CASE("property: adjacency is symmetric and irreflexive")
{
    const auto scenes = test::random_scene_set(3, 10, 4321, 96);
    for (const SceneModel &scene : scenes) {
        const VisibilityAdjacency adj = vertex_adjacency(scene);
        const std::size_t n = adj.size();
        for (std::size_t u = 0; u < n; ++u) {
            CHECK(!adj.at(u, u));
            for (std::size_t v = u + 1; v < n; ++v)
                CHECK(adj.at(u, v) == adj.at(v, u));
        }
    }
}

TEST_CASE("attribute export format")
{
    const SceneModel scene = test::single_square_scene();
    const VertexAttributes attrs = exact_vertex_attributes(Vec2(0, 15), scene);
    std::ostringstream os;
    write_vertex_attributes(os, attrs);
    const std::string text = os.str();
    CHECK(text.rfind("tx 0 15\n", 0) == 0);
    CHECK(text.find("\n0 10 10 1 ") != std::string::npos);
    CHECK(text.find("\n1 20 10 0 20 10 0\n") != std::string::npos);
}
