#include "fvdae/mesh.hpp"

#include <stdexcept>
#include <string>

namespace fvdae {

namespace {

// Compressed adjacency list from (cell, item) pairs, preserving insertion order.
void build_adjacency(Index cells, const std::vector<std::pair<Index, Index>>& pairs,
                     std::vector<Index>& offsets, std::vector<Index>& list) {
  offsets.assign(static_cast<std::size_t>(cells + 1), 0);
  for (const auto& [c, item] : pairs) ++offsets[static_cast<std::size_t>(c + 1)];
  for (std::size_t k = 1; k < offsets.size(); ++k) offsets[k] += offsets[k - 1];
  list.assign(pairs.size(), 0);
  std::vector<Index> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [c, item] : pairs) list[static_cast<std::size_t>(fill[static_cast<std::size_t>(c)]++)] = item;
}

}  // namespace

StructuredMesh2D::StructuredMesh2D(Index nx, Index ny, Rectangle bounds,
                                   std::array<BoundaryKind, 2> bc)
    : n_{nx, ny}, bounds_(bounds), bc_(bc) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("mesh needs at least 2 cells per axis, got " + std::to_string(nx) +
                                "x" + std::to_string(ny));
  const double lx = bounds.x_max - bounds.x_min;
  const double ly = bounds.y_max - bounds.y_min;
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("mesh bounds have zero measure");
  spacing_ = {lx / static_cast<double>(nx), ly / static_cast<double>(ny)};

  std::vector<std::pair<Index, Index>> cf, cb;
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    const double area = spacing_[other];
    const Index along = n_[axis];
    const Index last = periodic(axis) ? along : along - 1;
    // row-major over (j, i) so enumeration is stable
    for (Index j = 0; j < n_[1]; ++j) {
      for (Index i = 0; i < n_[0]; ++i) {
        const Index pos = axis == 0 ? i : j;
        if (pos >= last) continue;
        const Index owner = cell_index(i, j);
        const Index neighbor = shift(owner, axis, 1);
        Point centroid = cell_centroid(owner);
        if (axis == 0) centroid.x += 0.5 * spacing_[0];
        else centroid.y += 0.5 * spacing_[1];
        const Index f = static_cast<Index>(faces_.size());
        faces_.push_back({owner, neighbor, axis, area, centroid});
        cf.emplace_back(owner, f);
        cf.emplace_back(neighbor, f);
      }
    }
    if (axis == 0) x_faces_ = static_cast<Index>(faces_.size());
  }

  for (int axis = 0; axis < 2; ++axis) {
    if (periodic(axis)) continue;
    const int other = 1 - axis;
    for (Side side : {Side::Low, Side::High}) {
      for (Index k = 0; k < n_[other]; ++k) {
        const Index pos = side == Side::Low ? 0 : n_[axis] - 1;
        const Index owner = axis == 0 ? cell_index(pos, k) : cell_index(k, pos);
        Point centroid = cell_centroid(owner);
        const double half = 0.5 * spacing_[axis] * (side == Side::Low ? -1.0 : 1.0);
        if (axis == 0) centroid.x += half;
        else centroid.y += half;
        const Index b = static_cast<Index>(boundary_faces_.size());
        boundary_faces_.push_back({owner, axis, side, spacing_[other], centroid});
        cb.emplace_back(owner, b);
      }
    }
  }
  build_adjacency(cell_count(), cf, cell_face_offsets_, cell_face_list_);
  build_adjacency(cell_count(), cb, cell_bface_offsets_, cell_bface_list_);
}

Point StructuredMesh2D::cell_centroid(Index c) const {
  const auto [i, j] = cell_ij(c);
  return {bounds_.x_min + (static_cast<double>(i) + 0.5) * spacing_[0],
          bounds_.y_min + (static_cast<double>(j) + 0.5) * spacing_[1]};
}

Index StructuredMesh2D::shift(Index c, int axis, Index offset) const {
  auto ij = cell_ij(c);
  Index pos = ij[static_cast<std::size_t>(axis)] + offset;
  const Index along = n_[axis];
  if (periodic(axis)) {
    pos %= along;
    if (pos < 0) pos += along;
  } else if (pos < 0 || pos >= along) {
    return -1;
  }
  ij[static_cast<std::size_t>(axis)] = pos;
  return cell_index(ij[0], ij[1]);
}

bool StructuredMesh2D::touches_wall(Index c, int axis) const {
  if (periodic(axis)) return false;
  const Index pos = cell_ij(c)[static_cast<std::size_t>(axis)];
  return pos == 0 || pos == n_[axis] - 1;
}

Index StructuredMesh2D::boundary_face_at(Index c, int axis, Side side) const {
  if (periodic(axis)) return -1;
  const auto ij = cell_ij(c);
  const Index pos = ij[static_cast<std::size_t>(axis)];
  if (pos != (side == Side::Low ? 0 : n_[axis] - 1)) return -1;
  const int other = 1 - axis;
  // enumeration: axis 0 (low row, high row) then axis 1, skipping periodic axes
  Index base = 0;
  if (axis == 1 && !periodic(0)) base = 2 * n_[1];
  return base + (side == Side::Low ? 0 : n_[other]) + ij[static_cast<std::size_t>(other)];
}

std::span<const Index> StructuredMesh2D::cell_faces(Index c) const {
  const auto b = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(c)]);
  const auto e = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(c + 1)]);
  return std::span<const Index>(cell_face_list_).subspan(b, e - b);
}

std::span<const Index> StructuredMesh2D::cell_boundary_faces(Index c) const {
  const auto b = static_cast<std::size_t>(cell_bface_offsets_[static_cast<std::size_t>(c)]);
  const auto e = static_cast<std::size_t>(cell_bface_offsets_[static_cast<std::size_t>(c + 1)]);
  return std::span<const Index>(cell_bface_list_).subspan(b, e - b);
}

StructuredMesh2D build_uniform_mesh(Index nx, Index ny, Rectangle bounds,
                                    std::array<BoundaryKind, 2> bc) {
  return StructuredMesh2D(nx, ny, bounds, bc);
}

LineStencil face_line_cells(const StructuredMesh2D& mesh, Index face, int first, int count) {
  if (face < 0 || face >= mesh.face_count())
    throw std::out_of_range("face index " + std::to_string(face) + " is not an interior face");
  const FaceRecord& rec = mesh.face(face);
  LineStencil out;
  for (int k = first; k < first + count; ++k) {
    const Index c = mesh.shift(rec.owner, rec.axis, k);
    if (c < 0) {
      out.truncated = true;
      continue;
    }
    out.cells.push_back(c);
  }
  return out;
}

LineStencil face_line_stencil(const StructuredMesh2D& mesh, Index face, int width) {
  switch (width) {
    case 2: return face_line_cells(mesh, face, 0, 2);
    case 3: return face_line_cells(mesh, face, -1, 3);
    case 4: return face_line_cells(mesh, face, -1, 4);
    default: throw std::invalid_argument("stencil width must be 2, 3 or 4");
  }
}

}  // namespace fvdae
