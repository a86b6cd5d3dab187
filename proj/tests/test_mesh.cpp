#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <set>

#include "fvdae/mesh.hpp"

using namespace fvdae;

namespace {

const Rectangle kSquare{0.0, 2.0 * std::numbers::pi, 0.0, 2.0 * std::numbers::pi};

StructuredMesh2D periodic(Index n) {
  return build_uniform_mesh(n, n, kSquare, {BoundaryKind::Periodic, BoundaryKind::Periodic});
}
StructuredMesh2D walled(Index n) {
  return build_uniform_mesh(n, n, kSquare, {BoundaryKind::Dirichlet, BoundaryKind::Dirichlet});
}

}  // namespace

TEST_CASE("face counts") {
  const auto p = periodic(16);
  CHECK(p.cell_count() == 256);
  CHECK(p.face_count() == 512);
  CHECK(p.boundary_face_count() == 0);

  const auto w = walled(16);
  CHECK(w.face_count() == 15 * 16 + 16 * 15);
  CHECK(w.boundary_face_count() == 64);

  const auto tiny = build_uniform_mesh(2, 2, Rectangle{}, {BoundaryKind::Dirichlet, BoundaryKind::Dirichlet});
  CHECK(tiny.cell_count() == 4);
  CHECK(tiny.face_count() == 4);
  CHECK(tiny.boundary_face_count() == 8);

  const auto mixed = build_uniform_mesh(6, 4, Rectangle{}, {BoundaryKind::Dirichlet, BoundaryKind::Periodic});
  CHECK(mixed.x_face_count() == 5 * 4);
  CHECK(mixed.face_count() == 5 * 4 + 6 * 4);
}

TEST_CASE("spacing and face geometry") {
  const auto m = build_uniform_mesh(4, 8, Rectangle{0.0, 2.0, 1.0, 3.0},
                                    {BoundaryKind::Dirichlet, BoundaryKind::Dirichlet});
  CHECK(m.dx() == doctest::Approx(0.5));
  CHECK(m.dy() == doctest::Approx(0.25));
  CHECK(m.cell_volume() == doctest::Approx(0.125));
  for (const FaceRecord& f : m.faces()) {
    CHECK(f.owner != f.neighbor);
    CHECK(f.area == doctest::Approx(f.axis == 0 ? m.dy() : m.dx()));
    const Point a = m.cell_centroid(f.owner), b = m.cell_centroid(f.neighbor);
    // normal runs owner -> neighbour along the axis
    CHECK((f.axis == 0 ? b.x - a.x : b.y - a.y) > 0.0);
  }
  const Point c0 = m.cell_centroid(0);
  CHECK(c0.x == doctest::Approx(0.25));
  CHECK(c0.y == doctest::Approx(1.125));
}

TEST_CASE("every cell has four faces and closed control volumes") {
  for (const auto& m : {periodic(5), walled(5)}) {
    std::vector<int> seen(static_cast<std::size_t>(m.face_count()), 0);
    for (Index c = 0; c < m.cell_count(); ++c) {
      CHECK(m.cell_faces(c).size() + m.cell_boundary_faces(c).size() == 4);
      double sx = 0.0, sy = 0.0;
      for (Index f : m.cell_faces(c)) {
        ++seen[static_cast<std::size_t>(f)];
        const FaceRecord& face = m.face(f);
        const double sign = face.owner == c ? 1.0 : -1.0;
        (face.axis == 0 ? sx : sy) += sign * face.area;
      }
      for (Index b : m.cell_boundary_faces(c)) {
        const BoundaryFaceRecord& face = m.boundary_faces()[static_cast<std::size_t>(b)];
        (face.axis == 0 ? sx : sy) += face.outward_sign() * face.area;
      }
      CHECK(sx == doctest::Approx(0.0));
      CHECK(sy == doctest::Approx(0.0));
    }
    for (int s : seen) CHECK(s == 2);
  }
}

TEST_CASE("enumeration is stable") {
  const auto a = walled(7), b = walled(7);
  REQUIRE(a.face_count() == b.face_count());
  for (Index f = 0; f < a.face_count(); ++f) {
    CHECK(a.face(f).owner == b.face(f).owner);
    CHECK(a.face(f).neighbor == b.face(f).neighbor);
  }
}

TEST_CASE("shift wraps on periodic axes and stops at walls") {
  const auto p = periodic(4);
  CHECK(p.shift(p.cell_index(0, 0), 0, -1) == p.cell_index(3, 0));
  CHECK(p.shift(p.cell_index(3, 2), 1, 2) == p.cell_index(3, 0));
  const auto w = walled(4);
  CHECK(w.shift(w.cell_index(0, 1), 0, -1) == -1);
  CHECK(w.shift(w.cell_index(1, 1), 0, 2) == w.cell_index(3, 1));
  CHECK(w.touches_wall(w.cell_index(0, 1), 0));
  CHECK_FALSE(w.touches_wall(w.cell_index(0, 1), 1));
  CHECK(w.boundary_face_at(w.cell_index(3, 3), 1, Side::High) >= 0);
  CHECK(w.boundary_face_at(w.cell_index(1, 1), 1, Side::High) == -1);
}

TEST_CASE("face line stencils") {
  const auto p = periodic(16);
  for (Index f = 0; f < p.x_face_count(); ++f) {
    const LineStencil s = face_line_stencil(p, f, 4);
    CHECK_FALSE(s.truncated);
    CHECK(std::set<Index>(s.cells.begin(), s.cells.end()).size() == 4);
  }
  const auto w = walled(16);
  for (Index f = 0; f < w.face_count(); ++f) {
    const FaceRecord& face = w.face(f);
    const LineStencil two = face_line_stencil(w, f, 2);
    REQUIRE(two.cells.size() == 2);
    CHECK(two.cells[0] == face.owner);
    CHECK(two.cells[1] == face.neighbor);
    const bool near_wall = w.touches_wall(face.owner, face.axis) || w.touches_wall(face.neighbor, face.axis);
    CHECK(face_line_stencil(w, f, 4).truncated == near_wall);
  }
  // owner-relative window: offsets 0..3 run from the owner away from the low side
  const Index f0 = 0;
  const LineStencil win = face_line_cells(w, f0, 0, 4);
  CHECK_FALSE(win.truncated);
  CHECK(win.cells[0] == w.face(f0).owner);
  CHECK(win.cells[1] == w.face(f0).neighbor);
  CHECK(face_line_cells(w, f0, -1, 4).truncated);
}
