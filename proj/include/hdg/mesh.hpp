#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaceKind { Interior, Boundary };

// Axis of the face normal. In 1D every face is an x-face (a point).
enum class FaceAxis { X = 0, Y = 1 };

struct Face {
  int id = -1;
  FaceAxis axis = FaceAxis::X;
  FaceKind kind = FaceKind::Boundary;
  Point a;  // endpoints; a == b in 1D
  Point b;
  Vec2 normal;  // unit, outward from the minus element
  int minus = -1;
  int plus = -1;  // -1 on boundary faces
  int minus_local = -1;  // local face index within the minus element
  int plus_local = -1;

  [[nodiscard]] double measure() const;
  [[nodiscard]] Point midpoint() const { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
};

// Local face numbering of an element:
//   1D: 0 = left (n = -1), 1 = right (n = +1)
//   2D: 0 = left (-x), 1 = right (+x), 2 = bottom (-y), 3 = top (+y)
struct Element {
  int id = -1;
  int cell = -1;  // index into the underlying structured grid
  Point lo;
  Point hi;
  std::array<int, 4> faces{-1, -1, -1, -1};

  [[nodiscard]] double hx() const { return hi.x - lo.x; }
  [[nodiscard]] double hy() const { return hi.y - lo.y; }
  [[nodiscard]] Point center() const { return {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)}; }
};

struct FaceNeighbors {
  int minus = -1;
  std::optional<int> plus;
  Vec2 normal;
};

/// Outward unit normal of local face `local` of an element in `dim` dimensions.
Vec2 local_face_normal(int dim, int local);

// Predicate on a cell center: true when the cell is solid.
using CellMask = std::function<bool(const Point&)>;

/// Immutable 1D interval or 2D structured rectangular mesh with its skeleton.
///
/// Faces are numbered x-faces first, then y-faces, each group ordered by the
/// grid index of the face (row-major, x fastest). For interior faces the
/// element with the smaller index is the minus element and the stored normal
/// points out of it. Faces between a fluid and a solid cell are boundary faces.
class Mesh {
 public:
  [[nodiscard]] int dimension() const { return dim_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  [[nodiscard]] const Element& element(int id) const { return elements_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] const Face& face(int id) const { return faces_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] int num_elements() const { return static_cast<int>(elements_.size()); }
  [[nodiscard]] int num_faces() const { return static_cast<int>(faces_.size()); }
  [[nodiscard]] int faces_per_element() const { return dim_ == 1 ? 2 : 4; }
  [[nodiscard]] int num_interior_faces() const;
  [[nodiscard]] int num_boundary_faces() const;

  // Structured-grid lookup; -1 for solid cells.
  [[nodiscard]] int element_of_cell(int i, int j = 0) const;
  [[nodiscard]] bool is_solid(int i, int j = 0) const { return element_of_cell(i, j) < 0; }
  [[nodiscard]] Point origin() const { return origin_; }
  [[nodiscard]] double cell_dx() const { return dx_; }
  [[nodiscard]] double cell_dy() const { return dy_; }

  // Element containing p (closed cells, first match), or -1.
  [[nodiscard]] int locate(const Point& p) const;

  [[nodiscard]] FaceNeighbors face_neighbors(int face_id) const;

  [[nodiscard]] double fluid_measure() const;

  friend Mesh build_interval_mesh(double a, double b, int n_elements);
  friend Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx, int ny,
                              const CellMask& mask);

 private:
  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  Point origin_;
  double dx_ = 0.0;
  double dy_ = 0.0;
  std::vector<int> cell_to_element_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
};

Mesh build_interval_mesh(double a, double b, int n_elements);

Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx, int ny,
                     const CellMask& mask = {});

/// Nested-dissection order of the faces of a structured mesh: recursive
/// bisection along grid lines, separator faces numbered after both halves.
std::vector<int> nested_dissection_faces(const Mesh& mesh, int leaf_size = 32);

}  // namespace hdg
