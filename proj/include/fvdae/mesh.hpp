#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fvdae {

using Index = std::ptrdiff_t;

enum class BoundaryKind { Periodic, Dirichlet };
enum class Side { Low, High };

struct Rectangle {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Interior or periodic-wrap face. The normal is +axis, from owner to neighbor.
struct FaceRecord {
  Index owner = 0;
  Index neighbor = 0;
  int axis = 0;
  double area = 0.0;
  Point centroid;
};

struct BoundaryFaceRecord {
  Index owner = 0;
  int axis = 0;
  Side side = Side::Low;
  double area = 0.0;
  Point centroid;
  // outward normal component along the face axis: -1 on the low side, +1 on the high side
  double outward_sign() const { return side == Side::Low ? -1.0 : 1.0; }
};

struct LineStencil {
  std::vector<Index> cells;
  bool truncated = false;
};

class StructuredMesh2D {
public:
  StructuredMesh2D(Index nx, Index ny, Rectangle bounds, std::array<BoundaryKind, 2> bc);

  Index nx() const { return n_[0]; }
  Index ny() const { return n_[1]; }
  Index cells_along(int axis) const { return n_[axis]; }
  double dx() const { return spacing_[0]; }
  double dy() const { return spacing_[1]; }
  double spacing(int axis) const { return spacing_[axis]; }
  const Rectangle& bounds() const { return bounds_; }
  BoundaryKind bc(int axis) const { return bc_[axis]; }
  bool periodic(int axis) const { return bc_[axis] == BoundaryKind::Periodic; }

  Index cell_count() const { return n_[0] * n_[1]; }
  Index face_count() const { return static_cast<Index>(faces_.size()); }
  Index boundary_face_count() const { return static_cast<Index>(boundary_faces_.size()); }
  // number of x-faces; y-faces follow in the face enumeration
  Index x_face_count() const { return x_faces_; }

  double cell_volume() const { return spacing_[0] * spacing_[1]; }
  Index cell_index(Index i, Index j) const { return j * n_[0] + i; }
  std::array<Index, 2> cell_ij(Index c) const { return {c % n_[0], c / n_[0]}; }
  Point cell_centroid(Index c) const;

  const FaceRecord& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }
  std::span<const FaceRecord> faces() const { return faces_; }
  std::span<const BoundaryFaceRecord> boundary_faces() const { return boundary_faces_; }

  // Cell reached by moving `offset` cells along `axis`; -1 when a wall is crossed.
  Index shift(Index c, int axis, Index offset) const;
  // Cell touches a Dirichlet wall on `axis`.
  bool touches_wall(Index c, int axis) const;

  // Dirichlet wall face of a cell on the given axis and side, -1 if none.
  Index boundary_face_at(Index c, int axis, Side side) const;

  // Faces incident to a cell: interior/wrap faces and boundary faces.
  std::span<const Index> cell_faces(Index c) const;
  std::span<const Index> cell_boundary_faces(Index c) const;

private:
  std::array<Index, 2> n_;
  Rectangle bounds_;
  std::array<BoundaryKind, 2> bc_;
  std::array<double, 2> spacing_;
  Index x_faces_ = 0;
  std::vector<FaceRecord> faces_;
  std::vector<BoundaryFaceRecord> boundary_faces_;
  std::vector<Index> cell_face_offsets_, cell_face_list_;
  std::vector<Index> cell_bface_offsets_, cell_bface_list_;
};

StructuredMesh2D build_uniform_mesh(Index nx, Index ny, Rectangle bounds,
                                    std::array<BoundaryKind, 2> bc);

// Cells along the face axis centred on the face: width 2 -> owner, neighbor;
// width 3 -> owner-1, owner, neighbor; width 4 -> owner-1, owner, neighbor, neighbor+1.
LineStencil face_line_stencil(const StructuredMesh2D& mesh, Index face, int width);

// Cells at owner-relative offsets first..first+count-1 along the face axis
// (0 is the owner, 1 the neighbor).
LineStencil face_line_cells(const StructuredMesh2D& mesh, Index face, int first, int count);

}  // namespace fvdae
